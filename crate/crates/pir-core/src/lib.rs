//! A laboratory for linear private information retrieval over prime fields.
//!
//! The crate models a retrieval scheme as the full table of its query
//! realizations and then audits it mechanically: does a decoding matrix
//! exist for every realization, does any coalition of servers learn the
//! target index, and do the rank conditions for meeting the download
//! capacity hold — each verdict backed by either exact linear algebra or an
//! exhaustive entropy enumeration, never floating point.
//!
//! Modules:
//!
//! * [`field`] — arithmetic in F_p;
//! * [`matrix`] — exact dense linear algebra (rank, solving, inversion);
//! * [`scheme`] — the scheme table, responses and retrieval;
//! * [`entropy`] — the exhaustive enumeration oracle;
//! * [`rate`] — exact rate and capacity arithmetic;
//! * [`reference`] — the capacity-achieving power-block construction;
//! * [`verifier`] — the property checkers and the verification report;
//! * [`format`] — the scheme file format.

pub mod entropy;
pub mod field;
pub mod format;
pub mod matrix;
pub mod rate;
pub mod reference;
pub mod scheme;
pub mod verifier;

pub use entropy::{conditional_entropy, Conditioning, EntropyError, DEFAULT_ENUMERATION_BUDGET};
pub use field::{FieldElement, FieldError, FieldSpec};
pub use format::{parse_scheme, serialize_scheme, FormatError};
pub use matrix::{ColumnBlock, FpMatrix, MatrixError};
pub use rate::{capacity_formula, rate_exact, RateResult, Rational};
pub use reference::{build_reference_table, reference_decoder, ReferenceKey};
pub use scheme::{MessageVector, ResponseVector, SchemeError, SchemeParams, SchemeTable};
pub use verifier::{
    adversary_posterior, check_capacity_colluding, check_capacity_standard, check_correctness,
    check_privacy_colluding, check_privacy_standard, full_report, rank_entropy_crosscheck,
    ReportOptions, VerificationReport, VerifierError,
};
