//! Trace functions of the local systems H(psi, N, D) and F(psi, N, D),
//! their Kloosterman factors, Gauss-sum formulas and the induced-case
//! pushforward matcher.
//!
//! All sums are exact. A point t of K^x is addressed either as a
//! [`FieldElement`](crate::field::FieldElement) or by its discrete log
//! with respect to the field's generator.

mod det;
mod gauss;
mod induced;
mod params;
mod table;
mod traces;

use thiserror::Error;

use crate::cyclo::CycloError;
use crate::field::FieldError;

pub use det::{
    determinant_sign, eigenvalue_sum_matches_trace, frob_zero_eigenvalues, multiplicative_order, DetSign, Eigenvalue,
    EigenvalueList,
};
pub use gauss::{
    gauss_sum, gauss_sum_at_level, mellin_product_formula, mellin_value, twisted_mellin, twisting_factor,
    MellinComparison, compare_mellin,
};
pub use induced::{
    induced_pushforward_table, induced_pushforward_trace, match_up_to_translate_twist, random_control_table,
    InducedCase, Match, D3_CHARACTERS,
};
pub use params::{ParamsError, SheafParams};
pub use table::{parse_trace_table_csv, parse_trace_table_json, TableError, TableHeader, TraceKind, TraceTable, TraceValue};
pub use traces::{
    convolution_table, convolution_trace, frobenius_trace_sequence, frobenius_trace_sequence_with,
    kloosterman_a0_trace, kloosterman_b0_trace, normalized_trace, trace_f, trace_f_with, trace_h, trace_h_table,
    trace_h_with,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("the point must be nonzero")]
    ZeroPoint,
    #[error("field characteristic {field} does not match p = {params}")]
    WrongCharacteristic { field: u32, params: u32 },
    #[error("{m} does not divide q - 1 = {group_order}")]
    OrderNotSplit { m: u64, group_order: u64 },
    #[error("table is incomplete or of the wrong kind: {0}")]
    IncompleteTable(String),
    #[error("bad induced-case parameters: {0}")]
    BadCaseParameters(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

pub type Result<T> = std::result::Result<T, SheafError>;
