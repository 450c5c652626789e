//! A direct decision procedure for subtyping between ground types.
//!
//! This is the reference the operad construction is checked against. It
//! shares nothing with [`crate::operad`]: subtyping between same-head generic
//! applications is decided by argument containment, everything else by the
//! class table.

use std::collections::HashSet;

use crate::program::ClassTable;
use crate::relation::{reduction, SubtypingRelation};
use crate::types::{canonicalize, GroundType, TypeError, Variance, VarianceArg};
use crate::{Budget, BudgetExceeded, BuildError};

/// Subtyping over canonical types of one table.
#[derive(Clone, Copy, Debug)]
pub struct Oracle<'a> {
    table: &'a ClassTable,
}

impl<'a> Oracle<'a> {
    pub fn new(table: &'a ClassTable) -> Self {
        Oracle { table }
    }

    /// `sub <: sup`. Both must be canonical over the table.
    pub fn subtype(&self, sub: &GroundType, sup: &GroundType) -> bool {
        use GroundType::*;
        if *sup == Object || *sub == Null {
            return true;
        }
        match (sub, sup) {
            (Object, _) | (_, Null) => false,
            (Named(a), Named(b)) => self.table.is_subclass(a, b),
            (Generic(c, a), Generic(d, b)) => c == d && self.contains(b, a),
            // generic classes only extend Object
            _ => false,
        }
    }

    /// Whether argument `outer` contains argument `inner`.
    pub fn contains(&self, outer: &VarianceArg, inner: &VarianceArg) -> bool {
        use VarianceArg::*;
        match (outer, inner) {
            (Unbounded, _) => true,
            (_, Unbounded) => false,
            (Extends(x), Extends(y) | Invariant(y)) => self.subtype(y, x),
            (Extends(_), Super(_)) => false,
            (Super(x), Super(y) | Invariant(y)) => self.subtype(x, y),
            (Super(_), Extends(_)) => false,
            (Invariant(x), Invariant(y)) => x == y,
            (Invariant(_), _) => false,
        }
    }
}

/// Decides `sub <: sup` after validating and canonicalizing both.
pub fn oracle_subtype(
    table: &ClassTable,
    sub: &GroundType,
    sup: &GroundType,
) -> Result<bool, TypeError> {
    let sub = canonicalize(table, sub)?;
    let sup = canonicalize(table, sup)?;
    Ok(Oracle::new(table).subtype(&sub, &sup))
}

pub fn contains(table: &ClassTable, outer: &VarianceArg, inner: &VarianceArg) -> bool {
    Oracle::new(table).contains(outer, inner)
}

/// All canonical types of rank at most `max_rank`, in canonical order.
pub fn enumerate_types(
    table: &ClassTable,
    max_rank: u32,
    budget: Budget,
) -> Result<Vec<GroundType>, BudgetExceeded> {
    let mut all: Vec<GroundType> = vec![GroundType::Object, GroundType::Null];
    all.extend(table.plain_classes().map(|n| GroundType::Named(n.clone())));
    all.extend(table.generic_classes().map(GroundType::unbounded));
    let mut seen: HashSet<GroundType> = all.iter().cloned().collect();
    if all.len() > budget.0 {
        return Err(BudgetExceeded {
            iteration: 0,
            projected: all.len(),
            budget: budget.0,
        });
    }
    for rank in 1..=max_rank {
        let mut fresh = Vec::new();
        for head in table.generic_classes() {
            for v in Variance::ALL {
                for t in &all {
                    let candidate = GroundType::wrap(head, v, t.clone());
                    if seen.insert(candidate.clone()) {
                        fresh.push(candidate);
                    }
                }
            }
        }
        if all.len() + fresh.len() > budget.0 {
            return Err(BudgetExceeded {
                iteration: rank,
                projected: all.len() + fresh.len(),
                budget: budget.0,
            });
        }
        all.extend(fresh);
    }
    all.sort_by_cached_key(|t| (t.rank(), t.to_string()));
    Ok(all)
}

/// The relation on [`enumerate_types`] given by pairwise oracle queries.
pub fn oracle_relation(
    table: &ClassTable,
    max_rank: u32,
    budget: Budget,
) -> Result<SubtypingRelation, BuildError> {
    let carrier = enumerate_types(table, max_rank, budget)?;
    let oracle = Oracle::new(table);
    let mut closed = HashSet::new();
    for s in &carrier {
        for t in &carrier {
            if oracle.subtype(s, t) {
                closed.insert((s.clone(), t.clone()));
            }
        }
    }
    Ok(reduction(carrier, &closed, max_rank)?)
}
