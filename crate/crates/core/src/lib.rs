pub mod category;
pub mod diagram;
pub mod distance;
pub mod error;
pub mod format;
pub mod homogeneity;
pub mod prob;
pub mod random;
pub mod tropical;
pub mod verify;

pub use category::IndexingCategory;
pub use diagram::{EntropyVector, ProbDiagram};
pub use distance::{ikd, CouplingFan, DistanceReport, IkdOptions, Method};
pub use error::{Error, Result};
pub use prob::ProbSpace;
pub use tropical::{tropical_condition, TropicalConditioned, TropicalRep};
