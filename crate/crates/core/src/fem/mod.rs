//! Conforming Lagrange finite elements on triangles.

pub mod projection;
pub mod quadrature;
pub mod reference;
pub mod space;

pub use projection::{
    constant_wavespeed, interpolate_nodal, FeFunction, SpatialOperators, Wavespeed,
};
pub use quadrature::TriangleRule;
pub use reference::{BasisTable, ReferenceElement};
pub use space::{BrokenField, CellGeometry, LagrangeSpace, OperatorKind, MAX_DEGREE};
