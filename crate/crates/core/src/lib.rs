//! Planar human-object interaction playground.
//!
//! A deterministic 2D rigid-body environment in which a 4-DOF arm robot
//! interacts with a bouncing ball, plus everything needed to train skill
//! policies that imitate recorded interaction clips and a high-level
//! controller that sequences frozen skills to solve goal tasks.
//!
//! Numeric kernels (vectors, rewards, advantage estimation, networks) are
//! generic over the scalar type via [`math::Real`]; the simulation and
//! training stack instantiate them at [`Scalar`].

pub mod clips;
pub mod math;
pub mod obs;
pub mod playground;
pub mod rewards;
pub mod state;

/// Scalar type used by the simulation and training pipeline.
///
/// Gradient checks and bit-exact replay both want f64; the generic kernels
/// stay usable at f32 for callers that prefer it.
pub type Scalar = f64;

/// Concrete 2D vector at the pipeline scalar type.
pub type Vec2 = math::Vector2<Scalar>;

pub use state::{BallState, ContactEdges, HoiFrame, RobotState, SkillLabel};
