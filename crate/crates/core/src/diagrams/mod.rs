//! Link diagrams: braid words, planar-diagram codes and the diagram
//! families built from them (torus links, cables, twisted Whitehead doubles).

mod braid;
mod families;
mod meta;
mod pd;

pub use braid::{parallel_cable, torus_braid, BraidWord};
pub use families::{
    braid_closure, cable_braid, cable_diagram, cable_torus_crossing, column_smoothings, torus_column_smoothings,
    torus_link, whitehead_double,
};
pub use meta::{metadata, seifert_circles, LinkMetadata};
pub use pd::{Crossing, PlanarDiagram, Sign, UnionFind};
