#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod params;

pub use num_complex::Complex64 as C64;

/// Re-export of the linear-algebra backend whose types appear in public
/// signatures (`DMatrix<C64>`, `DVector<C64>`), so downstream crates can name
/// them without pinning a matching nalgebra version themselves.
pub use nalgebra;
