pub mod characteristics;
pub mod chart;
pub mod error;
pub mod family;
pub mod grid;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod sg;
pub mod singular;
pub mod table;
pub mod verify;

pub use chart::{fold_example, AmbientPoint, ChartKind, ChartPoint, GeneratingFunction};
pub use error::{Error, Result};
pub use linalg::Sym3;
