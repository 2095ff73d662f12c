//! Net total curvature of piecewise-linear graphs in R^3.

pub mod crofton;
pub mod curvature;
pub mod double_cover;
pub mod error;
pub mod geom;
pub mod graph;
pub mod inscribe;
pub mod minimizer;
pub mod projection;
pub mod random;
pub mod repro;
pub mod sampling;
pub mod vertex;

pub use error::{Error, Result};
pub use geom::{Direction, HalfInt, Point3, Vec3};
pub use graph::{load_graph, CombinatorialGraph, Edge, EdgeEnd, End, GraphBuilder, SpatialGraph, Vertex};
pub use vertex::VertexStar;
