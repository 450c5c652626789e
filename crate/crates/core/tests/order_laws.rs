//! Partial-order laws of the containment oracle, and the algebraic
//! properties of canonicalization and printing.

mod common;

use common::*;
use proptest::prelude::*;
use subop_core::program::parse_raw_type;
use subop_core::{
    canonicalize, enumerate_types, Budget, ClassName, ClassTable, GroundType, Oracle, Variance,
    VarianceArg,
};

fn carrier(t: &ClassTable, rank: u32) -> Vec<GroundType> {
    enumerate_types(t, rank, Budget::default()).unwrap()
}

#[test]
fn reflexive_up_to_rank_3() {
    for (label, t) in test_tables() {
        let o = Oracle::new(&t);
        for x in carrier(&t, 3) {
            assert!(o.subtype(&x, &x), "{label}: {x}");
        }
    }
}

#[test]
fn global_bounds_up_to_rank_3() {
    for (label, t) in test_tables() {
        let o = Oracle::new(&t);
        for x in carrier(&t, 3) {
            assert!(o.subtype(&GroundType::Null, &x), "{label}: N <: {x}");
            assert!(o.subtype(&x, &GroundType::Object), "{label}: {x} <: O");
        }
    }
}

#[test]
fn transitive_and_antisymmetric_up_to_rank_2() {
    for (label, t) in test_tables() {
        let o = Oracle::new(&t);
        let xs = carrier(&t, 2);
        let le: Vec<Vec<bool>> = xs
            .iter()
            .map(|a| xs.iter().map(|b| o.subtype(a, b)).collect())
            .collect();
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                if i != j {
                    assert!(!(le[i][j] && le[j][i]), "{label}: {} ~ {}", xs[i], xs[j]);
                }
                if !le[i][j] {
                    continue;
                }
                for k in 0..xs.len() {
                    if le[j][k] {
                        assert!(le[i][k], "{label}: {} {} {}", xs[i], xs[j], xs[k]);
                    }
                }
            }
        }
    }
}

#[test]
fn variance_rules_up_to_rank_2() {
    for (label, t) in test_tables() {
        let o = Oracle::new(&t);
        let xs = carrier(&t, 1);
        for head in t.generic_classes() {
            for x in &xs {
                for y in &xs {
                    let le = o.subtype(x, y);
                    let co =
                        |a: &GroundType| GroundType::wrap(head, Variance::Covariant, a.clone());
                    let contra =
                        |a: &GroundType| GroundType::wrap(head, Variance::Contravariant, a.clone());
                    let inv =
                        |a: &GroundType| GroundType::wrap(head, Variance::Invariant, a.clone());
                    assert_eq!(o.subtype(&co(x), &co(y)), le, "{label}: co {x} {y}");
                    assert_eq!(
                        o.subtype(&contra(y), &contra(x)),
                        le,
                        "{label}: contra {x} {y}"
                    );
                    assert_eq!(o.subtype(&inv(x), &inv(y)), x == y, "{label}: inv {x} {y}");
                }
            }
        }
    }
}

#[test]
fn no_redundant_forms_up_to_rank_3() {
    fn scan(t: &GroundType) {
        if let Some(arg) = t.arg() {
            assert!(
                !matches!(
                    arg,
                    VarianceArg::Extends(GroundType::Object | GroundType::Null)
                        | VarianceArg::Super(GroundType::Object | GroundType::Null)
                ),
                "{t}"
            );
            if let Some(b) = arg.bound() {
                scan(b);
            }
        }
    }
    for (_, t) in test_tables() {
        for x in carrier(&t, 3) {
            scan(&x);
            assert!(x.is_canonical());
        }
    }
}

#[test]
fn rank_grows_under_wrapping() {
    for (_, t) in test_tables() {
        for x in carrier(&t, 2) {
            if matches!(x, GroundType::Object | GroundType::Null) {
                continue;
            }
            for head in t.generic_classes() {
                for v in Variance::ALL {
                    let w = GroundType::wrap(head, v, x.clone());
                    assert_eq!(w.rank().0, x.rank().0 + 1, "{w}");
                }
            }
        }
    }
}

#[test]
fn display_parse_round_trip_up_to_rank_3() {
    for (label, t) in test_tables() {
        for x in carrier(&t, 3) {
            assert_eq!(t.parse_type(&x.to_string()).unwrap(), x, "{label}");
        }
    }
}

/// Well-formed but possibly non-canonical terms over the chain table.
fn raw_term() -> impl Strategy<Value = GroundType> {
    let leaf = prop_oneof![
        Just(GroundType::Object),
        Just(GroundType::Null),
        Just(GroundType::named("A")),
        Just(GroundType::named("B")),
        Just(GroundType::Generic(
            ClassName::new("C"),
            Box::new(VarianceArg::Unbounded)
        )),
    ];
    leaf.prop_recursive(4, 32, 1, |inner| {
        (0..3u8, inner).prop_map(|(v, t)| {
            let arg = match v {
                0 => VarianceArg::Extends(t),
                1 => VarianceArg::Super(t),
                _ => VarianceArg::Invariant(t),
            };
            GroundType::Generic(ClassName::new("C"), Box::new(arg))
        })
    })
}

fn raw_text(t: &GroundType) -> String {
    // Long-form keywords to exercise the other half of the grammar.
    match t {
        GroundType::Object => "Object".into(),
        GroundType::Null => "Null".into(),
        GroundType::Named(n) => n.to_string(),
        GroundType::Generic(h, a) => match a.as_ref() {
            VarianceArg::Unbounded => format!("{h}<?>"),
            VarianceArg::Extends(x) => format!("{h}<? extends {}>", raw_text(x)),
            VarianceArg::Super(x) => format!("{h}<? super {}>", raw_text(x)),
            VarianceArg::Invariant(x) => format!("{h}<{}>", raw_text(x)),
        },
    }
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(raw in raw_term()) {
        let t = table(CHAIN);
        let once = canonicalize(&t, &raw).unwrap();
        prop_assert!(once.is_canonical());
        prop_assert_eq!(canonicalize(&t, &once).unwrap(), once.clone());
        prop_assert!(once.rank() <= raw.rank());
    }

    #[test]
    fn parse_of_long_form_canonicalizes(raw in raw_term()) {
        let t = table(CHAIN);
        prop_assert_eq!(parse_raw_type(&raw_text(&raw)).unwrap(), raw.clone());
        let parsed = t.parse_type(&raw_text(&raw)).unwrap();
        prop_assert_eq!(&parsed, &canonicalize(&t, &raw).unwrap());
        prop_assert_eq!(t.parse_type(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn oracle_laws_spot_checks_at_rank_3(
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        k in any::<prop::sample::Index>(),
    ) {
        let t = table(TWO_CLASS);
        let xs = carrier(&t, 3);
        let (a, b, c) = (i.get(&xs), j.get(&xs), k.get(&xs));
        let o = Oracle::new(&t);
        prop_assert!(o.subtype(a, a));
        if o.subtype(a, b) && o.subtype(b, c) {
            prop_assert!(o.subtype(a, c));
        }
        if a != b {
            prop_assert!(!(o.subtype(a, b) && o.subtype(b, a)));
        }
    }
}
