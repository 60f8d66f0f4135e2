//! Exact combinatorics and power counting for quartic random tensor models.
//!
//! Feynman graphs built from quartic bubbles ([`coloured_graphs`]) are in
//! bijection with ciliated multicoloured maps ([`stranded_maps`]) through
//! [`if_transform`]. Maps are enumerated exhaustively ([`enumeration`]),
//! summed into exact series in the couplings and in `N` ([`series`]), and
//! cross-checked against a brute-force Wick expansion ([`wick_oracle`]).
//! [`renormalization`] covers multiscale power counting.

pub mod checks;
pub mod cli;
pub mod colour_kernel;
pub mod coloured_graphs;
pub mod enumeration;
pub mod error;
pub mod if_transform;
pub mod renormalization;
pub mod series;
pub mod series_engine;
pub mod stranded_maps;
pub mod wick_oracle;

pub use colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, Propagator, Scaling};
pub use coloured_graphs::ColouredGraph;
pub use error::{Error, Result};
pub use series::{FormalSeries, SeriesTerm};
pub use stranded_maps::StrandedMap;
