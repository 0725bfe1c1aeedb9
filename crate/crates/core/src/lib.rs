//! Bond percolation on the square lattice: regions, configurations,
//! crossing events, exact enumeration and Monte Carlo estimation.

pub mod config;
pub mod crossing;
pub mod error;
pub mod estimate;
pub mod lattice;
pub mod oracle;
pub mod renorm;
pub mod rsw;
pub mod unionfind;

pub use config::{sample, Configuration};
pub use error::{Error, Result};
pub use lattice::{Annulus, DualRect, DualVertex, Edge, EdgeId, Orientation, Rect, Region, Torus, Vertex};
