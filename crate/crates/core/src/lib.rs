//! Almost upper triangular matrix groups over finite fields, indexed by
//! Z-like preorders, computed through finite strongly convex windows.
//!
//! The crate is organized bottom-up: [`gf`] and [`linalg`] provide exact
//! arithmetic, [`preorder`] the index sets, [`matgroup`] the windowed
//! elements, [`truncation`] the finite quotient groups, [`invariants`] the
//! block-size invariant, and [`lab`] the verification suites built on top.

pub mod error;
pub mod gf;
pub mod linalg;
pub mod preorder;
pub mod invariants;
pub mod matgroup;
pub mod truncation;
pub mod format;
pub mod lab;

pub use error::{Error, Result};
pub use gf::{Field, FieldElem, FieldOp};
pub use invariants::semilinear::{NormalForm, SemilinearSet, SymDiff};
pub use invariants::{locally_isomorphic_necessary, pgl_quotient_exists, sharp_of, SharpInvariant, Verdict};
pub use linalg::Mat;
pub use preorder::{BaseShape, BlockKind, BlockSpec, FinitaryPartition, Index, IndexSet, PreorderSpec};
pub use matgroup::{DeviationRank, FiniteMatrix, InversionTrace, Predicates, Profile, WindowElement};
pub use truncation::{FiniteGroupSet, Truncation};
pub use lab::{CaseRecord, CaseVerdict, Family, SuiteConfig, SuiteReport};
