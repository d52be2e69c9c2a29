//! Trade-in-value-added analytics over multi-country input-output
//! tables: GVC participation, position, labor content, network
//! structure, growth decomposition, and determinant regressions.

#![forbid(unsafe_code)]

pub mod backward;
pub mod econ;
pub mod fixtures;
pub mod forward;
pub mod grosstrade;
pub mod growth;
pub mod icio;
pub mod io;
pub mod labor;
pub mod leontief;
pub mod network;

pub use icio::{exports_vector, validate_balance, IcioTable, Sector};
pub use leontief::LeontiefSystem;
