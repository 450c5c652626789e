//! Finite subtyping relations stored as Hasse diagrams.
//!
//! A [`SubtypingRelation`] keeps its carrier sorted in canonical type order
//! and its edges as the transitive reduction. The reflexive-transitive
//! closure is computed once per value and cached.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::program::{Arity, ClassTable};
use crate::types::GroundType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("type `{0}` is not in the carrier")]
    NotInCarrier(GroundType),
    #[error("`{0}` and `{1}` are subtypes of each other")]
    NotAntisymmetric(GroundType, GroundType),
    #[error("node map is not a bijection between the carriers: {0}")]
    NotBijection(String),
    #[error("relation does not have {expected} as its unique {role}")]
    Bounds {
        expected: GroundType,
        role: &'static str,
    },
}

/// Reflexive-transitive closure as one up-set per carrier index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    up: Vec<FixedBitSet>,
}

impl Closure {
    /// `i ≤ j`
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn up_set(&self, i: usize) -> &FixedBitSet {
        &self.up[i]
    }

    /// Number of related pairs, reflexive ones included.
    pub fn pair_count(&self) -> usize {
        self.up.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.up
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.ones().map(move |j| (i, j)))
    }

    fn transpose(&self) -> Closure {
        let n = self.up.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, j) in self.pairs() {
            up[j].insert(i);
        }
        Closure { up }
    }

    /// Covering pairs `(i, j)` with `i < j` and nothing strictly between.
    fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.up.len();
        let mut edges = Vec::new();
        let mut above = FixedBitSet::with_capacity(n);
        for i in 0..n {
            above.clear();
            for k in self.up[i].ones().filter(|&k| k != i) {
                for m in self.up[k].ones().filter(|&m| m != k) {
                    above.insert(m);
                }
            }
            for j in self.up[i].ones() {
                if j != i && !above.contains(j) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}

/// A finite partial order over canonical ground types.
///
/// Equality compares carriers and Hasse edges; the iteration index is
/// bookkeeping and does not take part.
#[derive(Clone)]
pub struct SubtypingRelation {
    carrier: Vec<GroundType>,
    index: HashMap<GroundType, usize>,
    hasse: Vec<(usize, usize)>,
    iteration: u32,
    closure: OnceLock<Closure>,
}

impl PartialEq for SubtypingRelation {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.hasse == other.hasse
    }
}

impl Eq for SubtypingRelation {}

impl fmt::Debug for SubtypingRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .hasse_edges()
            .map(|(a, b)| format!("{a} -> {b}"))
            .collect();
        f.debug_struct("SubtypingRelation")
            .field("iteration", &self.iteration)
            .field(
                "carrier",
                &self
                    .carrier
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>(),
            )
            .field("hasse", &edges)
            .finish()
    }
}

fn sorted_carrier(carrier: impl IntoIterator<Item = GroundType>) -> Vec<GroundType> {
    let mut v: Vec<GroundType> = carrier
        .into_iter()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    v.sort_by_cached_key(|t| (t.rank(), t.to_string()));
    v
}

fn index_of(carrier: &[GroundType]) -> HashMap<GroundType, usize> {
    carrier
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect()
}

impl SubtypingRelation {
    /// Builds the partial order generated by `edges` (pairs `(sub, super)`).
    /// Self-loops are ignored; a cycle through distinct types is an error.
    pub fn from_edges(
        carrier: impl IntoIterator<Item = GroundType>,
        edges: impl IntoIterator<Item = (GroundType, GroundType)>,
        iteration: u32,
    ) -> Result<Self, RelationError> {
        let carrier = sorted_carrier(carrier);
        let index = index_of(&carrier);
        let mut succ = vec![Vec::new(); carrier.len()];
        for (a, b) in edges {
            let i = *index.get(&a).ok_or(RelationError::NotInCarrier(a))?;
            let j = *index.get(&b).ok_or(RelationError::NotInCarrier(b))?;
            if i != j {
                succ[i].push(j);
            }
        }
        let closure = reach(&carrier, &succ)?;
        Ok(Self::from_closure(carrier, index, closure, iteration))
    }

    fn from_closure(
        carrier: Vec<GroundType>,
        index: HashMap<GroundType, usize>,
        closure: Closure,
        iteration: u32,
    ) -> Self {
        let hasse = closure.covers();
        SubtypingRelation {
            carrier,
            index,
            hasse,
            iteration,
            closure: OnceLock::from(closure),
        }
    }

    pub fn carrier(&self) -> &[GroundType] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains(&self, t: &GroundType) -> bool {
        self.index.contains_key(t)
    }

    pub fn index(&self, t: &GroundType) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn with_iteration(mut self, iteration: u32) -> Self {
        self.iteration = iteration;
        self
    }

    /// Hasse edges as carrier indices, sorted.
    pub fn hasse_indices(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn hasse_edges(&self) -> impl Iterator<Item = (&GroundType, &GroundType)> {
        self.hasse
            .iter()
            .map(|&(i, j)| (&self.carrier[i], &self.carrier[j]))
    }

    pub fn is_hasse_edge(&self, s: &GroundType, t: &GroundType) -> bool {
        match (self.index(s), self.index(t)) {
            (Some(i), Some(j)) => self.hasse.binary_search(&(i, j)).is_ok(),
            _ => false,
        }
    }

    pub fn closure(&self) -> &Closure {
        self.closure.get_or_init(|| {
            let mut succ = vec![Vec::new(); self.carrier.len()];
            for &(i, j) in &self.hasse {
                succ[i].push(j);
            }
            reach(&self.carrier, &succ).expect("stored Hasse diagram is acyclic")
        })
    }

    /// The closure as a set of typed pairs.
    pub fn closure_set(&self) -> HashSet<(GroundType, GroundType)> {
        self.closure()
            .pairs()
            .map(|(i, j)| (self.carrier[i].clone(), self.carrier[j].clone()))
            .collect()
    }

    /// `s ≤ t` in the closure.
    pub fn is_edge(&self, s: &GroundType, t: &GroundType) -> Result<bool, RelationError> {
        let i = self
            .index(s)
            .ok_or_else(|| RelationError::NotInCarrier(s.clone()))?;
        let j = self
            .index(t)
            .ok_or_else(|| RelationError::NotInCarrier(t.clone()))?;
        Ok(self.closure().le(i, j))
    }

    pub fn maximal(&self) -> Vec<&GroundType> {
        let c = self.closure();
        (0..self.len())
            .filter(|&i| c.up_set(i).count_ones(..) == 1)
            .map(|i| &self.carrier[i])
            .collect()
    }

    pub fn minimal(&self) -> Vec<&GroundType> {
        let mut has_below = FixedBitSet::with_capacity(self.len());
        for &(_, j) in &self.hasse {
            has_below.insert(j);
        }
        (0..self.len())
            .filter(|&i| !has_below.contains(i))
            .map(|i| &self.carrier[i])
            .collect()
    }

    /// Checks that `Object` is the unique top and `Null` the unique bottom.
    pub fn check_bounds(&self) -> Result<(), RelationError> {
        if self.maximal() != [&GroundType::Object] {
            return Err(RelationError::Bounds {
                expected: GroundType::Object,
                role: "top",
            });
        }
        if self.minimal() != [&GroundType::Null] {
            return Err(RelationError::Bounds {
                expected: GroundType::Null,
                role: "bottom",
            });
        }
        Ok(())
    }

    /// The same carrier with the order reversed. `Object` and `Null` swap
    /// roles, so the result is only meaningful as an intermediate.
    pub fn dual(&self) -> SubtypingRelation {
        let mut hasse: Vec<_> = self.hasse.iter().map(|&(i, j)| (j, i)).collect();
        hasse.sort_unstable();
        SubtypingRelation {
            carrier: self.carrier.clone(),
            index: self.index.clone(),
            hasse,
            iteration: self.iteration,
            closure: OnceLock::from(self.closure().transpose()),
        }
    }

    /// The sub-order on the types satisfying `keep`.
    pub fn induced(&self, keep: impl Fn(&GroundType) -> bool) -> SubtypingRelation {
        let kept: Vec<usize> = (0..self.len())
            .filter(|&i| keep(&self.carrier[i]))
            .collect();
        let c = self.closure();
        let up = kept
            .iter()
            .map(|&i| {
                let mut s = FixedBitSet::with_capacity(kept.len());
                for (new_j, &j) in kept.iter().enumerate() {
                    if c.le(i, j) {
                        s.insert(new_j);
                    }
                }
                s
            })
            .collect();
        let carrier: Vec<GroundType> = kept.iter().map(|&i| self.carrier[i].clone()).collect();
        let index = index_of(&carrier);
        Self::from_closure(carrier, index, Closure { up }, self.iteration)
    }
}

/// Reflexive-transitive closure of the successor lists. Fails if two
/// distinct nodes lie on a common cycle.
fn reach(carrier: &[GroundType], succ: &[Vec<usize>]) -> Result<Closure, RelationError> {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &j in s {
            indeg[j] += 1;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    while let Some(i) = stack.pop() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    if order.len() < n {
        let (a, b) = find_cycle_pair(succ, &indeg);
        return Err(RelationError::NotAntisymmetric(
            carrier[a].clone(),
            carrier[b].clone(),
        ));
    }
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for &i in order.iter().rev() {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert(i);
        for &j in &succ[i] {
            s.union_with(&up[j]);
        }
        up[i] = s;
    }
    Ok(Closure { up })
}

/// Every node left with positive in-degree after a topological sweep has a
/// predecessor that was also left over; walking predecessors must revisit.
fn find_cycle_pair(succ: &[Vec<usize>], indeg: &[usize]) -> (usize, usize) {
    let n = succ.len();
    let mut pred = vec![None; n];
    for (i, s) in succ.iter().enumerate() {
        if indeg[i] == 0 {
            continue;
        }
        for &j in s {
            if indeg[j] > 0 {
                pred[j] = Some(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut cur = (0..n).find(|&i| indeg[i] > 0).expect("cycle exists");
    while !seen[cur] {
        seen[cur] = true;
        cur = pred[cur].expect("leftover node has a leftover predecessor");
    }
    (pred[cur].unwrap(), cur)
}

/// Transitive reduction of an already-closed order given as typed pairs.
pub fn reduction(
    carrier: impl IntoIterator<Item = GroundType>,
    closed: &HashSet<(GroundType, GroundType)>,
    iteration: u32,
) -> Result<SubtypingRelation, RelationError> {
    for (a, b) in closed {
        if a != b && closed.contains(&(b.clone(), a.clone())) {
            return Err(RelationError::NotAntisymmetric(a.clone(), b.clone()));
        }
    }
    SubtypingRelation::from_edges(carrier, closed.iter().cloned(), iteration)
}

/// Whether `map` is an order isomorphism from `left` onto `right`.
pub fn order_isomorphic(
    left: &SubtypingRelation,
    right: &SubtypingRelation,
    map: impl Fn(&GroundType) -> GroundType,
) -> Result<bool, RelationError> {
    if left.len() != right.len() {
        return Err(RelationError::NotBijection(format!(
            "carrier sizes differ ({} vs {})",
            left.len(),
            right.len()
        )));
    }
    let mut image = Vec::with_capacity(left.len());
    let mut hit = FixedBitSet::with_capacity(right.len());
    for t in left.carrier() {
        let u = map(t);
        let j = right.index(&u).ok_or_else(|| {
            RelationError::NotBijection(format!("`{t}` maps to `{u}` outside the target"))
        })?;
        if hit.put(j) {
            return Err(RelationError::NotBijection(format!("`{u}` is hit twice")));
        }
        image.push(j);
    }
    let (cl, cr) = (left.closure(), right.closure());
    for i in 0..left.len() {
        for k in 0..left.len() {
            if cl.le(i, k) != cr.le(image[i], image[k]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The subclassing order of a table: one node per class (generic classes by
/// bare name) plus `Object` on top and `Null` below every class.
pub fn subclassing_relation(table: &ClassTable) -> SubtypingRelation {
    let mut carrier = vec![GroundType::Object, GroundType::Null];
    let mut edges = vec![(GroundType::Null, GroundType::Object)];
    for (name, decl) in table.declarations() {
        let node = GroundType::Named(name.clone());
        let sup = decl
            .superclass
            .as_ref()
            .map_or(GroundType::Object, |s| GroundType::Named(s.clone()));
        carrier.push(node.clone());
        edges.push((GroundType::Null, node.clone()));
        edges.push((node, sup));
    }
    SubtypingRelation::from_edges(carrier, edges, 0).expect("class tables are trees")
}

/// Maps a class-node of [`subclassing_relation`] to its rank-0 type.
pub fn rank0_type(table: &ClassTable, node: &GroundType) -> GroundType {
    match node {
        GroundType::Named(n) if table.arity(n) == Some(Arity::Generic) => GroundType::unbounded(n),
        other => other.clone(),
    }
}

/// The rank-0 subtyping relation: the subclassing order with every generic
/// class `C` replaced by `C<?>`.
pub fn initial_subtyping(table: &ClassTable) -> SubtypingRelation {
    let sub = subclassing_relation(table);
    let edges: Vec<_> = sub
        .hasse_edges()
        .map(|(a, b)| (rank0_type(table, a), rank0_type(table, b)))
        .collect();
    let carrier = sub.carrier().iter().map(|t| rank0_type(table, t));
    SubtypingRelation::from_edges(carrier, edges, 0).expect("isomorphic to a tree")
}

/// First point where two closures disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureDifference {
    /// A type present in only one of the carriers.
    Carrier { ty: GroundType, in_left: bool },
    /// A pair related in exactly one of the two orders.
    Pair {
        sub: GroundType,
        sup: GroundType,
        left: bool,
        right: bool,
    },
}

impl fmt::Display for ClosureDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureDifference::Carrier { ty, in_left } => {
                let (yes, no) = if *in_left {
                    ("left", "right")
                } else {
                    ("right", "left")
                };
                write!(f, "type {ty} is in the {yes} carrier but not the {no}")
            }
            ClosureDifference::Pair {
                sub,
                sup,
                left,
                right,
            } => {
                write!(f, "{sub} <: {sup}: left={left}, right={right}")
            }
        }
    }
}

/// Compares `closure(left)` with `closure(right)`, scanning pairs in
/// canonical order.
pub fn first_closure_difference(
    left: &SubtypingRelation,
    right: &SubtypingRelation,
) -> Option<ClosureDifference> {
    for t in left.carrier() {
        if !right.contains(t) {
            return Some(ClosureDifference::Carrier {
                ty: t.clone(),
                in_left: true,
            });
        }
    }
    for t in right.carrier() {
        if !left.contains(t) {
            return Some(ClosureDifference::Carrier {
                ty: t.clone(),
                in_left: false,
            });
        }
    }
    // Same carrier, and both are sorted the same way.
    let (cl, cr) = (left.closure(), right.closure());
    for i in 0..left.len() {
        if cl.up_set(i) == cr.up_set(i) {
            continue;
        }
        for j in 0..left.len() {
            let (l, r) = (cl.le(i, j), cr.le(i, j));
            if l != r {
                return Some(ClosureDifference::Pair {
                    sub: left.carrier[i].clone(),
                    sup: left.carrier[j].clone(),
                    left: l,
                    right: r,
                });
            }
        }
    }
    None
}
