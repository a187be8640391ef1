//! Points, domains and partitions.

mod domain;
mod partition;
mod points;
pub mod spatial;

pub use domain::{AxisBox, Domain, Polycube};
pub use partition::{grid_partition, partition_sum, whitney_partition, Cell, CellTag, Partition, WhitneyConstants};
pub use points::PointSet;
