//! Core library for modular building layouts (MBL).
//!
//! A layout is assembled by executing a small action language: modules
//! (prefab volumes) are placed on a plane, grouped into units (dwellings),
//! subdivided into rooms, and fitted with doors and holes. This crate
//! provides the geometry kernel, the language front end, layout execution,
//! topology extraction, evaluation metrics, and a seeded synthesizer for
//! generating paired (description, code, layout) records.

pub mod dsl;
pub mod geom;
pub mod kernel;
pub mod layout_json;
pub mod metrics;
pub mod svg;
pub mod synth;
pub mod topology;

pub use geom::{Contour, GeomError, Point, Rect};
