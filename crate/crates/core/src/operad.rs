//! Relation transformers that build the next approximation of the subtyping
//! relation from the current one.
//!
//! For every generic class `C`, [`copy`], [`flip`] and [`flat`] each build one
//! family of new types over the input carrier (`C<? <: T>`, `C<? :> T>` and
//! `C<T>` respectively) and embed it into the input relation where `C<?>`
//! sits. [`merge`] glues the three outputs together and [`jsm`] is the
//! composite of all four.

use std::thread;

use crate::program::ClassTable;
use crate::relation::{initial_subtyping, RelationError, SubtypingRelation};
use crate::types::{GroundType, Variance, VarianceArg};
use crate::{Budget, BudgetExceeded, BuildError};

/// The outputs of [`copy`], [`flip`] and [`flat`] over one input relation.
#[derive(Clone, Debug)]
pub struct RelationTriple {
    pub covariant: SubtypingRelation,
    pub contravariant: SubtypingRelation,
    pub invariant: SubtypingRelation,
}

fn embed(
    table: &ClassTable,
    input: &SubtypingRelation,
    variance: Variance,
) -> Result<SubtypingRelation, RelationError> {
    let mut carrier = input.carrier().to_vec();
    carrier.push(GroundType::Null);
    let mut edges: Vec<(GroundType, GroundType)> = input
        .hasse_edges()
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();

    for head in table.generic_classes() {
        let family: Vec<GroundType> = input
            .carrier()
            .iter()
            .map(|t| GroundType::wrap(head, variance, t.clone()))
            .collect();
        let top = GroundType::unbounded(head);
        carrier.push(top.clone());
        match variance {
            Variance::Covariant => {
                for &(i, j) in input.hasse_indices() {
                    edges.push((family[i].clone(), family[j].clone()));
                }
                let bottom = GroundType::wrap(head, variance, GroundType::Null);
                edges.push((GroundType::Null, bottom));
            }
            Variance::Contravariant => {
                for &(i, j) in input.hasse_indices() {
                    edges.push((family[j].clone(), family[i].clone()));
                }
                let bottom = GroundType::wrap(head, variance, GroundType::Object);
                edges.push((GroundType::Null, bottom));
            }
            Variance::Invariant => {
                for t in &family {
                    edges.push((GroundType::Null, t.clone()));
                    edges.push((t.clone(), top.clone()));
                }
            }
        }
        carrier.extend(family);
    }
    SubtypingRelation::from_edges(carrier, edges, input.iteration())
}

/// Adds `C<? <: T>` for every input type `T`, ordered like the input.
pub fn copy(
    table: &ClassTable,
    input: &SubtypingRelation,
) -> Result<SubtypingRelation, RelationError> {
    embed(table, input, Variance::Covariant)
}

/// Adds `C<? :> T>` for every input type `T`, ordered opposite to the input.
pub fn flip(
    table: &ClassTable,
    input: &SubtypingRelation,
) -> Result<SubtypingRelation, RelationError> {
    embed(table, input, Variance::Contravariant)
}

/// Adds `C<T>` for every input type `T` as an antichain between `Null` and
/// `C<?>`.
pub fn flat(
    table: &ClassTable,
    input: &SubtypingRelation,
) -> Result<SubtypingRelation, RelationError> {
    embed(table, input, Variance::Invariant)
}

/// Unions the three relations, identifying equal types, and relates each
/// invariant application `C<X>` to its wildcard counterparts `C<? <: X>` and
/// `C<? :> X>`.
///
/// The triple must come from [`copy`], [`flip`] and [`flat`] over a single
/// input; otherwise a counterpart may be missing from the union.
pub fn merge(triple: &RelationTriple) -> Result<SubtypingRelation, RelationError> {
    let parts = [&triple.covariant, &triple.contravariant, &triple.invariant];
    let carrier: Vec<GroundType> = parts
        .iter()
        .flat_map(|r| r.carrier().iter().cloned())
        .collect();
    let mut edges: Vec<(GroundType, GroundType)> = parts
        .iter()
        .flat_map(|r| r.hasse_edges().map(|(a, b)| (a.clone(), b.clone())))
        .collect();

    let in_union = |t: &GroundType| parts.iter().any(|r| r.contains(t));
    for t in &carrier {
        let Some((head, VarianceArg::Invariant(payload))) = t.head().zip(t.arg()) else {
            continue;
        };
        for v in [Variance::Covariant, Variance::Contravariant] {
            let wider = GroundType::wrap(head, v, payload.clone());
            if wider == *t {
                continue;
            }
            if !in_union(&wider) {
                return Err(RelationError::NotInCarrier(wider));
            }
            edges.push((t.clone(), wider));
        }
    }
    let iteration = parts.iter().map(|r| r.iteration()).max().unwrap_or(0);
    SubtypingRelation::from_edges(carrier, edges, iteration)
}

/// One full construction step: `merge ∘ (copy, flip, flat)`.
pub fn jsm(
    table: &ClassTable,
    input: &SubtypingRelation,
) -> Result<SubtypingRelation, RelationError> {
    let (covariant, contravariant, invariant) = thread::scope(|s| {
        let co = s.spawn(|| copy(table, input));
        let contra = s.spawn(|| flip(table, input));
        let inv = flat(table, input);
        (
            co.join().expect("copy panicked"),
            contra.join().expect("flip panicked"),
            inv,
        )
    });
    let triple = RelationTriple {
        covariant: covariant?,
        contravariant: contravariant?,
        invariant: invariant?,
    };
    Ok(merge(&triple)?.with_iteration(input.iteration() + 1))
}

pub fn identity(relation: SubtypingRelation) -> SubtypingRelation {
    relation
}

/// Carrier size after one more step, or an upper bound on it when that bound
/// already fits in `limit`.
fn projected_size(table: &ClassTable, input: &SubtypingRelation, limit: usize) -> usize {
    let generics = table.generic_classes().count();
    let bound = input.len().saturating_mul(1 + 3 * generics);
    if bound <= limit {
        return bound;
    }
    let mut seen: std::collections::HashSet<GroundType> = input.carrier().iter().cloned().collect();
    for head in table.generic_classes() {
        for v in Variance::ALL {
            for t in input.carrier() {
                seen.insert(GroundType::wrap(head, v, t.clone()));
            }
        }
    }
    seen.len()
}

/// Every approximation from rank 0 up to `n`, inclusive.
pub fn iterate_stages(
    table: &ClassTable,
    n: u32,
    budget: Budget,
) -> Result<Vec<SubtypingRelation>, BuildError> {
    let mut current = initial_subtyping(table);
    if current.len() > budget.0 {
        return Err(BudgetExceeded {
            iteration: 0,
            projected: current.len(),
            budget: budget.0,
        }
        .into());
    }
    let mut stages = Vec::with_capacity(n as usize + 1);
    for k in 0..n {
        let projected = projected_size(table, &current, budget.0);
        if projected > budget.0 {
            return Err(BudgetExceeded {
                iteration: k + 1,
                projected,
                budget: budget.0,
            }
            .into());
        }
        let next = jsm(table, &current)?;
        stages.push(current);
        current = next;
    }
    stages.push(current);
    Ok(stages)
}

/// Applies [`jsm`] `n` times to the rank-0 relation of `table`.
pub fn iterate(
    table: &ClassTable,
    n: u32,
    budget: Budget,
) -> Result<SubtypingRelation, BuildError> {
    Ok(iterate_stages(table, n, budget)?
        .pop()
        .expect("at least the rank-0 stage"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_class() -> ClassTable {
        ClassTable::parse("class C<T> extends Object {}").unwrap()
    }

    fn ty(t: &ClassTable, s: &str) -> GroundType {
        t.parse_type(s).unwrap()
    }

    fn hasse(r: &SubtypingRelation) -> Vec<(String, String)> {
        r.hasse_edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut v: Vec<_> = list
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        v.sort();
        v
    }

    fn sorted(mut v: Vec<(String, String)>) -> Vec<(String, String)> {
        v.sort();
        v
    }

    #[test]
    fn copy_one_class_is_covariant_chain() {
        let t = one_class();
        let r = copy(&t, &initial_subtyping(&t)).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(
            sorted(hasse(&r)),
            pairs(&[
                ("N", "C<N>"),
                ("C<N>", "C<? <: C<?>>"),
                ("C<? <: C<?>>", "C<?>"),
                ("C<?>", "O"),
            ])
        );
        r.check_bounds().unwrap();
    }

    #[test]
    fn flip_one_class_is_contravariant_chain() {
        let t = one_class();
        let r = flip(&t, &initial_subtyping(&t)).unwrap();
        assert_eq!(
            sorted(hasse(&r)),
            pairs(&[
                ("N", "C<O>"),
                ("C<O>", "C<? :> C<?>>"),
                ("C<? :> C<?>>", "C<?>"),
                ("C<?>", "O"),
            ])
        );
        r.check_bounds().unwrap();
    }

    #[test]
    fn flat_one_class_is_antichain() {
        let t = one_class();
        let r = flat(&t, &initial_subtyping(&t)).unwrap();
        assert_eq!(
            sorted(hasse(&r)),
            pairs(&[
                ("N", "C<O>"),
                ("N", "C<C<?>>"),
                ("N", "C<N>"),
                ("C<O>", "C<?>"),
                ("C<C<?>>", "C<?>"),
                ("C<N>", "C<?>"),
                ("C<?>", "O"),
            ])
        );
        assert!(!r.is_edge(&ty(&t, "C<O>"), &ty(&t, "C<C<?>>")).unwrap());
        assert!(!r.is_edge(&ty(&t, "C<C<?>>"), &ty(&t, "C<O>")).unwrap());
    }

    #[test]
    fn no_generics_leaves_relation_alone() {
        let t = ClassTable::parse("class A extends Object {} class B extends A {}").unwrap();
        let r = initial_subtyping(&t);
        assert_eq!(copy(&t, &r).unwrap(), r);
        assert_eq!(flip(&t, &r).unwrap(), r);
        assert_eq!(flat(&t, &r).unwrap(), r);
        let triple = RelationTriple {
            covariant: r.clone(),
            contravariant: r.clone(),
            invariant: r.clone(),
        };
        assert_eq!(merge(&triple).unwrap(), r);
        assert_eq!(jsm(&t, &r).unwrap(), r);
    }

    #[test]
    fn merge_rank1_matches_figure() {
        let t = one_class();
        let r0 = initial_subtyping(&t);
        let triple = RelationTriple {
            covariant: copy(&t, &r0).unwrap(),
            contravariant: flip(&t, &r0).unwrap(),
            invariant: flat(&t, &r0).unwrap(),
        };
        let m = merge(&triple).unwrap();
        assert_eq!(m.len(), 8);
        assert_eq!(
            sorted(hasse(&m)),
            pairs(&[
                ("N", "C<N>"),
                ("N", "C<O>"),
                ("N", "C<C<?>>"),
                ("C<N>", "C<? <: C<?>>"),
                ("C<C<?>>", "C<? <: C<?>>"),
                ("C<C<?>>", "C<? :> C<?>>"),
                ("C<O>", "C<? :> C<?>>"),
                ("C<? <: C<?>>", "C<?>"),
                ("C<? :> C<?>>", "C<?>"),
                ("C<?>", "O"),
            ])
        );
        m.check_bounds().unwrap();
    }

    #[test]
    fn merge_requires_counterparts() {
        let t = one_class();
        let r0 = initial_subtyping(&t);
        let inv = flat(&t, &r0).unwrap();
        let triple = RelationTriple {
            covariant: r0.clone(),
            contravariant: r0,
            invariant: inv,
        };
        assert!(matches!(
            merge(&triple),
            Err(RelationError::NotInCarrier(_))
        ));
    }

    #[test]
    fn jsm_counts_and_iteration_index() {
        let t = one_class();
        let r1 = jsm(&t, &initial_subtyping(&t)).unwrap();
        assert_eq!(r1.len(), 8);
        assert_eq!(r1.iteration(), 1);
        let e = ClassTable::new();
        let r = jsm(&e, &initial_subtyping(&e)).unwrap();
        assert_eq!(r, initial_subtyping(&e));
        let cd =
            ClassTable::parse("class C<T> extends Object {} class D<T> extends Object {}").unwrap();
        assert_eq!(jsm(&cd, &initial_subtyping(&cd)).unwrap().len(), 20);
    }

    #[test]
    fn identity_commutes_with_jsm() {
        let t = one_class();
        let r0 = initial_subtyping(&t);
        assert_eq!(identity(r0.clone()), r0);
        assert_eq!(
            identity(jsm(&t, &r0).unwrap()),
            jsm(&t, &identity(r0.clone())).unwrap()
        );
        assert_eq!(identity(r0.dual()), r0.dual());
    }

    #[test]
    fn iterate_sizes() {
        let t = one_class();
        let sizes: Vec<usize> = iterate_stages(&t, 3, Budget::default())
            .unwrap()
            .iter()
            .map(SubtypingRelation::len)
            .collect();
        assert_eq!(sizes, [3, 8, 23, 68]);
    }

    #[test]
    fn budget_is_enforced() {
        let t = one_class();
        let err = iterate(&t, 3, Budget(30)).unwrap_err();
        assert_eq!(
            err,
            BuildError::Budget(BudgetExceeded {
                iteration: 3,
                projected: 68,
                budget: 30
            })
        );
        assert!(iterate(&t, 2, Budget(23)).is_ok());
        assert!(matches!(
            iterate(&t, 0, Budget(2)),
            Err(BuildError::Budget(BudgetExceeded { iteration: 0, .. }))
        ));
    }
}
