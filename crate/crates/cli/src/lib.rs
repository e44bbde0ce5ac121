//! Orbit catalogs on top of `orbit_spaces`: loading and saving element
//! catalogs, pairwise distance matrices, nearest-neighbor queries and the
//! `orbits` command line front end.

pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod matrix;
pub mod output;

pub use catalog::{
    load_catalog, parse_catalog, save_catalog, Catalog, CatalogRecord, FileFormat, LoadOptions,
};
pub use config::{MetricKind, RunConfig, Threads};
pub use error::{CatalogError, Result, RowError};
pub use matrix::{dist, distance_matrix, nearest, DistanceMatrix, Neighbor};
