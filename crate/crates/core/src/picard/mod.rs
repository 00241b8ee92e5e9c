//! Picard-lattice combinatorics, trace bounds, Urabe tables and the
//! anticanonical elliptic fibration of degree-1 surfaces.

mod fibers;
mod lattice;
mod urabe;

pub use fibers::{fiber_count, fibers, hasse_holds, min_fiber_points, FiberReport, FiberSummary, FIBER_SMOOTH_BOUND};
pub use lattice::{candidate_fields, exceptional_classes, min_trace_on_pic, pair, weil_count, PicClass};
pub use urabe::{filter_rows, parse_table, parse_table_str, urabe_f, UrabeRow, PRIMED_ROWS};
