//! Rewrites on the QIR module itself: partial evaluation, static qubit
//! allocation and lowering to the base profile.

mod allocate;
mod lower;
mod partial_eval;

use thiserror::Error;

pub use allocate::{allocate_static_addresses, allocate_static_addresses_with_map, AllocationMap};
pub use lower::{lower_to_base, lower_to_base_with_cap};
pub use partial_eval::unroll_and_fold;

/// Iteration bound used when none is given.
pub const DEFAULT_ITERATION_CAP: u64 = 65536;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("CapExceeded: block `{block}` re-entered more than {cap} times")]
    CapExceeded { block: String, cap: u64 },
    #[error("DataDependent: branch at `{block}` depends on a measurement result")]
    DataDependent { block: String, feedback: bool },
    #[error("FeedbackRequired: {location}: {reason}")]
    FeedbackRequired { location: String, reason: String },
    #[error("EscapingHandle: {location}: qubit handle `%{handle}` used outside an intrinsic argument")]
    EscapingHandle { location: String, handle: String },
    #[error("UseAfterRelease: {location}: qubit handle `%{handle}` used after release")]
    UseAfterRelease { location: String, handle: String },
    #[error("NonConstantAllocation: {location}: {reason}")]
    NonConstantAllocation { location: String, reason: String },
    #[error("MeasurementNotSinkable: {location}: {reason}")]
    MeasurementNotSinkable { location: String, reason: String },
    #[error("Unsupported: {0}")]
    Unsupported(String),
}

impl TransformError {
    /// Variant name, as printed at the start of the message.
    pub fn kind(&self) -> &'static str {
        match self {
            TransformError::CapExceeded { .. } => "CapExceeded",
            TransformError::DataDependent { .. } => "DataDependent",
            TransformError::FeedbackRequired { .. } => "FeedbackRequired",
            TransformError::EscapingHandle { .. } => "EscapingHandle",
            TransformError::UseAfterRelease { .. } => "UseAfterRelease",
            TransformError::NonConstantAllocation { .. } => "NonConstantAllocation",
            TransformError::MeasurementNotSinkable { .. } => "MeasurementNotSinkable",
            TransformError::Unsupported(_) => "Unsupported",
        }
    }
}

fn require_supported(module: &crate::frontend::QirModule) -> Result<(), TransformError> {
    let v = crate::frontend::adaptive_violations(module);
    if v.is_empty() {
        Ok(())
    } else {
        let reasons: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(TransformError::Unsupported(reasons.join("; ")))
    }
}
