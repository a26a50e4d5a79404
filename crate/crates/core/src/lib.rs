//! Truncated power series over the complex numbers with FFT-based
//! exponential, logarithm, inverse and constant power, plus a ledger that
//! counts every DFT the fast algorithms perform.

pub mod block;
pub mod cli;
pub mod error;
pub mod fast;
pub mod fft;
pub mod ledger;
pub mod oracle;
pub mod sample;
pub mod series;
pub mod textio;

pub use error::{Result, SeriesError};
pub use fft::{Complex64, Polynomial, Spectrum, SpectrumKind};
pub use ledger::CostLedger;
pub use series::TruncatedSeries;
