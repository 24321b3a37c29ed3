//! Bloch-affine representations of finite-dimensional quantum channels and
//! processes, and non-Markovianity diagnostics built on them.
//!
//! A process is a family of channels `E_t` given by transfer matrices in a
//! fixed Hermitian orthonormal basis (`λ_0 = 𝟙/√d` followed by generalized
//! Gell-Mann matrices). On top of that the crate computes:
//!
//! * the trace-distance (BLP) measure, [`measures::blp_measure`];
//! * the divisibility witness `g(t)` and its integral, [`processes::rhp_measure`];
//! * the non-unitality measure, [`measures::nonunitality_measure`];
//! * the non-unital non-Markovianity measure, [`measures::nonunital_nm_measure`].
//!
//! ```
//! use nonmarkov::basis::HermitianBasis;
//! use nonmarkov::gadc::{gadc_process, GadcProcessParams};
//! use nonmarkov::processes::{rhp_g, TimeGrid};
//!
//! let basis = HermitianBasis::new(2).unwrap();
//! let p = gadc_process(GadcProcessParams::new(5.0).unwrap());
//! let g = rhp_g(&p, 0.3, 1e-5, &basis).unwrap();
//! assert!(g >= 0.0);
//! let grid = TimeGrid::new(20.0, 4001).unwrap();
//! assert_eq!(grid.len(), 4001);
//! ```

pub mod basis;
pub mod channels;
pub mod distances;
pub mod error;
pub mod gadc;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod policy;
pub mod processes;
pub mod states;

pub use error::{Error, Result};
