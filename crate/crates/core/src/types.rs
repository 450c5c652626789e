//! Ground types, their canonical forms, and the (rank, display) ordering.
//!
//! A ground type is either a builtin (`Object`, `Null`), a non-generic class
//! name, or a single-parameter generic class applied to a variance-annotated
//! argument. Several syntactically distinct wildcard forms denote the same
//! type; [`canonicalize`] rewrites them to one representative so that type
//! identity is plain structural equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::program::{Arity, ClassTable};

/// Name of a user-declared class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassName(Arc<str>);

impl ClassName {
    pub fn new(name: &str) -> Self {
        ClassName(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassName {
    fn from(s: &str) -> Self {
        ClassName::new(s)
    }
}

/// The argument position of a generic application.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum VarianceArg {
    /// `?`
    Unbounded,
    /// `? extends T`, written `? <: T`
    Extends(GroundType),
    /// `? super T`, written `? :> T`
    Super(GroundType),
    /// plain `T`
    Invariant(GroundType),
}

/// The three bounded argument forms, used when building families of types.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Variance {
    Covariant,
    Contravariant,
    Invariant,
}

impl Variance {
    pub const ALL: [Variance; 3] = [
        Variance::Covariant,
        Variance::Contravariant,
        Variance::Invariant,
    ];

    pub fn wrap(self, bound: GroundType) -> VarianceArg {
        match self {
            Variance::Covariant => VarianceArg::Extends(bound),
            Variance::Contravariant => VarianceArg::Super(bound),
            Variance::Invariant => VarianceArg::Invariant(bound),
        }
    }
}

impl VarianceArg {
    pub fn bound(&self) -> Option<&GroundType> {
        match self {
            VarianceArg::Unbounded => None,
            VarianceArg::Extends(t) | VarianceArg::Super(t) | VarianceArg::Invariant(t) => Some(t),
        }
    }

    /// Applies the argument-level identifications, assuming the bound is
    /// already canonical.
    fn normalize(self) -> VarianceArg {
        match self {
            VarianceArg::Extends(GroundType::Object) | VarianceArg::Super(GroundType::Null) => {
                VarianceArg::Unbounded
            }
            VarianceArg::Extends(GroundType::Null) => VarianceArg::Invariant(GroundType::Null),
            VarianceArg::Super(GroundType::Object) => VarianceArg::Invariant(GroundType::Object),
            other => other,
        }
    }
}

/// A ground type term.
///
/// Values produced by the parser, the morphisms and the enumerator are always
/// canonical. Hand-built terms may not be; pass them through [`canonicalize`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GroundType {
    Object,
    Null,
    Named(ClassName),
    Generic(ClassName, Box<VarianceArg>),
}

/// Nesting depth of a type: zero for the types read off the class table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Rank(pub u32);

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl GroundType {
    pub fn named(name: &str) -> Self {
        GroundType::Named(ClassName::new(name))
    }

    /// `head<?>`
    pub fn unbounded(head: &ClassName) -> Self {
        GroundType::Generic(head.clone(), Box::new(VarianceArg::Unbounded))
    }

    /// Builds `head<arg>` with the outermost identifications applied. The
    /// bound inside `arg` must already be canonical.
    pub fn apply(head: &ClassName, arg: VarianceArg) -> Self {
        GroundType::Generic(head.clone(), Box::new(arg.normalize()))
    }

    /// Builds the canonical `head<v bound>` for a canonical `bound`.
    pub fn wrap(head: &ClassName, variance: Variance, bound: GroundType) -> Self {
        Self::apply(head, variance.wrap(bound))
    }

    pub fn rank(&self) -> Rank {
        match self {
            GroundType::Object | GroundType::Null | GroundType::Named(_) => Rank(0),
            GroundType::Generic(_, arg) => match arg.bound() {
                None => Rank(0),
                Some(t) => Rank(t.rank().0 + 1),
            },
        }
    }

    pub fn head(&self) -> Option<&ClassName> {
        match self {
            GroundType::Generic(h, _) => Some(h),
            _ => None,
        }
    }

    pub fn arg(&self) -> Option<&VarianceArg> {
        match self {
            GroundType::Generic(_, a) => Some(a),
            _ => None,
        }
    }

    /// True when no redundant wildcard form occurs at any depth.
    pub fn is_canonical(&self) -> bool {
        match self {
            GroundType::Generic(_, arg) => match arg.as_ref() {
                VarianceArg::Unbounded => true,
                VarianceArg::Extends(GroundType::Object | GroundType::Null)
                | VarianceArg::Super(GroundType::Object | GroundType::Null) => false,
                VarianceArg::Extends(t) | VarianceArg::Super(t) | VarianceArg::Invariant(t) => {
                    t.is_canonical()
                }
            },
            _ => true,
        }
    }

    pub fn display(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GroundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundType::Object => f.write_str("O"),
            GroundType::Null => f.write_str("N"),
            GroundType::Named(n) => write!(f, "{n}"),
            GroundType::Generic(h, arg) => match arg.as_ref() {
                VarianceArg::Unbounded => write!(f, "{h}<?>"),
                VarianceArg::Extends(t) => write!(f, "{h}<? <: {t}>"),
                VarianceArg::Super(t) => write!(f, "{h}<? :> {t}>"),
                VarianceArg::Invariant(t) => write!(f, "{h}<{t}>"),
            },
        }
    }
}

/// Canonical type order: by rank, then by display string.
impl Ord for GroundType {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for GroundType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown class `{0}`")]
    UnknownClass(ClassName),
    #[error("class `{0}` is not generic and cannot take a type argument")]
    NotGeneric(ClassName),
    #[error("generic class `{0}` needs a type argument")]
    MissingArgument(ClassName),
}

/// Validates `raw` against `table` and rewrites it bottom-up into its
/// canonical representative:
///
/// * `? extends Object` and `? super Null` become `?`
/// * `? extends Null` becomes `Null`
/// * `? super Object` becomes `Object`
pub fn canonicalize(table: &ClassTable, raw: &GroundType) -> Result<GroundType, TypeError> {
    match raw {
        GroundType::Object | GroundType::Null => Ok(raw.clone()),
        GroundType::Named(name) => match table.arity(name) {
            None => Err(TypeError::UnknownClass(name.clone())),
            Some(Arity::Generic) => Err(TypeError::MissingArgument(name.clone())),
            Some(Arity::Plain) => Ok(raw.clone()),
        },
        GroundType::Generic(head, arg) => {
            match table.arity(head) {
                None => return Err(TypeError::UnknownClass(head.clone())),
                Some(Arity::Plain) => return Err(TypeError::NotGeneric(head.clone())),
                Some(Arity::Generic) => {}
            }
            let arg = match arg.as_ref() {
                VarianceArg::Unbounded => VarianceArg::Unbounded,
                VarianceArg::Extends(t) => VarianceArg::Extends(canonicalize(table, t)?),
                VarianceArg::Super(t) => VarianceArg::Super(canonicalize(table, t)?),
                VarianceArg::Invariant(t) => VarianceArg::Invariant(canonicalize(table, t)?),
            };
            Ok(GroundType::apply(head, arg))
        }
    }
}
