//! Numerical toolkit for minimal-surface gluing constructions in the round
//! 3-sphere: Karcher-Scherk towers from their Weierstrass data, Clifford-torus
//! configurations with their scaffoldings and symmetry groups, watertight
//! initial-surface meshes, curvature and Jacobi-operator checks, and the
//! associated model spectral problems.

pub mod cutoff;
pub mod weierstrass;
pub mod sphere;
pub mod mesh;
pub mod assembly;
pub mod curvature;
pub mod jacobi;
pub mod spectral;
pub mod export;
pub mod verify;

pub use assembly::InitialSurfaceSpec;
pub use cutoff::cutoff;
pub use mesh::SurfaceMesh;
pub use sphere::{GreatCircle, PointS3, SphereIsometry};
pub use weierstrass::{TowerPoint, UnitDiscParameter};
