//! Prolate spheroidal wave functions, the eigenvalues of the associated
//! differential and integral operators, and explicit upper bounds on the
//! decay of those eigenvalues.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigenvalues;
pub mod elliptic;
pub mod error;
pub mod experiments;
mod extended;
pub mod legendre;
pub mod logscale;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod theorem_lab;
pub mod verify;

pub use error::{ProlateError, Result};
pub use logscale::LogScaledReal;
pub use spectrum::{ChiEntry, MatrixBand, Parity, ProlateContext, ProlateMode, Truncation};
pub use bounds::{BoundReport, DeltaPolicy};
pub use eigenvalues::EigenvalueRecord;
pub use experiments::{FigureRow, NPolicy, OutputFormat, RunConfig, Session, Table1Row, ThresholdRecord};
pub use theorem_lab::SequenceTrace;
pub use verify::{CheckRecord, VerifyPlan, VerifyReport};
