//! Synthesis and simulation of analytic vector fields on the unit sphere whose
//! ω-limit sets are boundaries of prescribed shrubs built from hypocycloids and
//! segments.

pub mod poly;
pub mod curves;
pub mod io;
pub mod shrub;
pub mod field;
pub mod flow;
