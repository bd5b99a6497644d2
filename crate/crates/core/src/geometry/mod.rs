//! Spatial kernels behind the point-process sufficient statistics.

pub mod grid;
pub mod segment;
pub mod union;

pub use grid::{pair_count, GridIndex};
pub use segment::{candy_counts, connection, orientation_distance, rejects, CandyCounts, Segment};
pub use union::{area_statistic, union_disks_area, CoverageGrid};
