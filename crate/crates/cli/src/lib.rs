//! Library surface of the `sim` front end: everything the binary does is
//! reachable here so integration tests and fuzz targets can drive the same
//! code paths.

pub mod config;
pub mod csv;
pub mod demos;
pub mod manifest;
pub mod report;
pub mod runs;
pub mod svg;
