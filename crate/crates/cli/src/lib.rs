//! Support code for the `maxgeom` binary: the batch bench runner and the SVG
//! renderer. The solvers themselves live in the `maxgeom` library crate.

pub mod bench;
pub mod svg;
