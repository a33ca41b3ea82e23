//! Integer relation detection with PSLQ and its incremental variant, and
//! exact minimal polynomial reconstruction of algebraic numbers from
//! high-precision decimal approximations.
//!
//! ```
//! use ipslq_core::{arith::PrecisionContext, minpoly::*};
//!
//! let ctx = PrecisionContext::new(60, 0).unwrap();
//! let alpha = &ctx.int(3).sqrt() + &ctx.int(2).sqrt();
//! let req = MinPolyRequest::new(alpha, 5, 11, ctx.clone()).unwrap();
//! let out = minpoly(&req, &MinPolyOptions::new(&ctx)).unwrap();
//! assert_eq!(out.polynomial().unwrap().to_string(), "y^4 - 10*y^2 + 1");
//! ```

pub mod arith;
pub mod error;
pub mod ipslq;
pub mod matrix;
pub mod minpoly;
pub mod oracle;
pub mod pslq;

pub use arith::{PrecisionContext, Real};
pub use error::{Error, Result};
pub use ipslq::{ipslq, StageOutcome, StageRecord, StageTrace};
pub use minpoly::{IntPolynomial, MinPolyOutcome, MinPolyRequest};
pub use pslq::{pslq, Outcome, RelationOutcome, Workspace};
