//! Grand generalized weighted Morrey norms, Hardy–Littlewood maximal operators,
//! θ-type Calderón–Zygmund operators and their BMO commutators, evaluated
//! exactly on finite metric measure spaces, together with a harness that
//! measures empirical operator-norm constants and their stability under
//! refinement.

pub mod balls;
pub mod cli;
pub mod error;
pub mod growth;
pub mod kernel;
pub mod maximal;
pub mod norms;
pub mod quad;
pub mod space;
pub mod verify;
pub mod weight;

pub use balls::{Ball, BallFamily};
pub use error::{Error, Result};
pub use growth::{EpsGrid, GrandConvention, GrandParams, GrandWeight, MorreyGrowth};
pub use norms::PointFunction;
pub use space::{build_space, FiniteSpace, MeasureSpec, MetricSpec, SpaceFile};
pub use weight::Weight;
