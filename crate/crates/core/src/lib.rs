//! Construction of the generic nominal subtyping relation of a small
//! Java-like class language.
//!
//! Starting from the subclassing order, each step builds the covariant
//! (`C<? <: T>`), contravariant (`C<? :> T>`) and invariant (`C<T>`)
//! applications of every generic class to the types built so far, and merges
//! them into the next, strictly larger, finite approximation of the relation.
//! [`oracle`] decides the same relation directly by wildcard containment and
//! serves as the reference for the construction.
//!
//! ```
//! use subop_core::{iterate, oracle_relation, Budget, ClassTable};
//!
//! let table = ClassTable::parse("class C<T> extends Object {}").unwrap();
//! let built = iterate(&table, 1, Budget::default()).unwrap();
//! assert_eq!(built.len(), 8);
//! let reference = oracle_relation(&table, 1, Budget::default()).unwrap();
//! assert_eq!(built, reference);
//! ```

use thiserror::Error;

pub mod export;
pub mod operad;
pub mod oracle;
pub mod program;
pub mod relation;
pub mod types;

pub use export::{from_json, to_dot, to_json, ExportDocument, Format};
pub use operad::{copy, flat, flip, identity, iterate, iterate_stages, jsm, merge, RelationTriple};
pub use oracle::{enumerate_types, oracle_relation, oracle_subtype, Oracle};
pub use program::{parse_program, parse_type, ClassTable};
pub use relation::{
    first_closure_difference, initial_subtyping, order_isomorphic, reduction, subclassing_relation,
    ClosureDifference, RelationError, SubtypingRelation,
};
pub use types::{canonicalize, ClassName, GroundType, Rank, Variance, VarianceArg};

/// Upper limit on carrier size for the iteration driver and the enumerator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budget(pub usize);

impl Default for Budget {
    fn default() -> Self {
        Budget(100_000)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("iteration {iteration} would hold {projected} types, over the budget of {budget}")]
pub struct BudgetExceeded {
    pub iteration: u32,
    pub projected: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Relation(#[from] RelationError),
}
