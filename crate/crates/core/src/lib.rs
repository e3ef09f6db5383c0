//! Worst-case sensitivity of linear programs.
//!
//! Every coefficient of `A`, `b` and `c` is given a radius; scaling all radii
//! by `α` yields a box of problems. [`sensitivity::analyze`] computes how fast
//! the worst optimal value over that box grows as `α` leaves zero (`d_w`) and
//! the same rate per unit of pattern norm (`d_r`).
//!
//! ```
//! use lpsens::linalg::Matrix;
//! use lpsens::lp::LpProblem;
//! use lpsens::pattern::PerturbationPattern;
//! use lpsens::sensitivity::{analyze, AnalyzeOptions};
//!
//! let a = Matrix::from_rows(vec![vec![5.0, -7.0, 1.0], vec![7.0, -10.0, 1.0]]).unwrap();
//! let lp = LpProblem::standard(a, vec![1.0, 0.0], vec![12.0, -17.0, 2.5])?;
//! let report = analyze(&lp, &PerturbationPattern::relative(&lp), &AnalyzeOptions::default())?;
//! assert!((report.d_w - 479.0).abs() < 1e-6);
//! # Ok::<(), lpsens::Error>(())
//! ```
//!
//! The guide in `book/` covers the concepts chapter by chapter.

pub mod error;
pub mod forms;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod pattern;
pub mod scalar;
pub mod sensitivity;

pub use error::{Error, Result};
