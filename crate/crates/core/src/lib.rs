pub mod bodies;
pub mod error;
pub mod generators;
pub mod grid;
pub mod hull;
pub mod io;
pub mod metrics;
pub mod polar;
pub mod sphere;
pub mod verify;
pub mod wulff;
