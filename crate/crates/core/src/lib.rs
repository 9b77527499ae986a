pub mod error;
pub mod gf2poly;
pub mod word;
pub mod dictionary;
pub mod starcomm;
pub mod scalar;
pub mod cylinder;
pub mod matrixmodel;
pub mod ledrappier;
pub mod report;

pub use error::{Error, Result};
pub use gf2poly::{Factorization, Gf2Poly};
pub use scalar::QuadScalar;
pub use word::{PeriodicSeq, Word};
