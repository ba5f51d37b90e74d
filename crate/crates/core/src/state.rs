//! Domain state types: robot kinematics, ball state, contact-graph edges,
//! and the recorded interaction frame.

use serde::{Deserialize, Serialize};

use crate::math::Vector2;
use crate::{Scalar, Vec2};

/// Number of actuated degrees of freedom: prismatic base plus three revolute joints.
pub const DOF_COUNT: usize = 4;

/// DOF names in state order.
pub const DOF_NAMES: [&str; DOF_COUNT] = ["base_x", "shoulder", "elbow", "wrist"];

/// Contact-graph node names in edge-index order.
pub const NODE_NAMES: [&str; 3] = ["hand", "body", "ball"];

/// Height of the base joint above the ground; the base translates only in x.
pub const BASE_HEIGHT: Scalar = 1.0;

/// Link lengths: upper arm, forearm, wrist-to-hand offset.
pub const LINK_LENGTHS: [Scalar; 3] = [0.4, 0.4, 0.1];

/// Generalized coordinate vector of the robot.
pub type DofVector = [Scalar; DOF_COUNT];

/// Robot joint-space state.
///
/// `dof_pos` is `[base_x (m), shoulder, elbow, wrist (rad)]`; angles are kept
/// unwrapped (continuous, no modular jumps) so finite differences stay valid.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub dof_pos: DofVector,
    pub dof_vel: DofVector,
}

impl RobotState {
    pub fn new(dof_pos: DofVector, dof_vel: DofVector) -> Self {
        Self { dof_pos, dof_vel }
    }

    pub fn at_rest(dof_pos: DofVector) -> Self {
        Self::new(dof_pos, [0.0; DOF_COUNT])
    }

    pub fn base_x(&self) -> Scalar {
        self.dof_pos[0]
    }

    pub fn key_points(&self) -> KeyPoints {
        forward_kinematics(&self.dof_pos)
    }

    /// Velocities of the three key points under the current joint rates.
    pub fn key_point_velocities(&self) -> [Vec2; 3] {
        let kp = self.key_points();
        [
            Vec2::new(self.dof_vel[0], 0.0),
            point_velocity(&self.dof_pos, &self.dof_vel, kp.elbow, 2),
            point_velocity(&self.dof_pos, &self.dof_vel, kp.hand, 3),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.dof_pos.iter().chain(&self.dof_vel).all(|v| v.is_finite())
    }
}

/// Key points produced by forward kinematics.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KeyPoints {
    pub base: Vec2,
    pub elbow: Vec2,
    pub hand: Vec2,
}

impl KeyPoints {
    pub fn as_array(&self) -> [Vec2; 3] {
        [self.base, self.elbow, self.hand]
    }
}

/// Joint frame positions of the chain: base pivot, elbow pivot, wrist pivot,
/// and hand center, with cumulative link angles.
#[derive(Copy, Clone, Debug)]
pub struct ChainFrames {
    /// Pivot of joint i (shoulder, elbow, wrist).
    pub joints: [Vec2; 3],
    pub hand: Vec2,
    /// Cumulative link angle after each joint.
    pub link_angles: [Scalar; 3],
}

/// Full chain geometry for a joint configuration.
pub fn chain_frames(dof_pos: &DofVector) -> ChainFrames {
    let base = Vec2::new(dof_pos[0], BASE_HEIGHT);
    let a1 = dof_pos[1];
    let a2 = a1 + dof_pos[2];
    let a3 = a2 + dof_pos[3];
    let elbow = base + Vec2::new(a1.cos(), a1.sin()) * LINK_LENGTHS[0];
    let wrist = elbow + Vec2::new(a2.cos(), a2.sin()) * LINK_LENGTHS[1];
    let hand = wrist + Vec2::new(a3.cos(), a3.sin()) * LINK_LENGTHS[2];
    ChainFrames {
        joints: [base, elbow, wrist],
        hand,
        link_angles: [a1, a2, a3],
    }
}

/// Key points (base center, elbow, hand center) for a joint configuration.
pub fn forward_kinematics(dof_pos: &DofVector) -> KeyPoints {
    let f = chain_frames(dof_pos);
    KeyPoints {
        base: f.joints[0],
        elbow: f.joints[1],
        hand: f.hand,
    }
}

/// Jacobian row pair of a point rigidly attached to link `link` (1-based:
/// 1 = upper arm, 2 = forearm, 3 = hand). Columns follow DOF order.
pub fn point_jacobian(dof_pos: &DofVector, point: Vec2, link: usize) -> [Vec2; DOF_COUNT] {
    debug_assert!((1..=3).contains(&link));
    let f = chain_frames(dof_pos);
    let mut cols = [Vec2::zero(); DOF_COUNT];
    cols[0] = Vec2::new(1.0, 0.0);
    for j in 0..link {
        cols[j + 1] = (point - f.joints[j]).perp();
    }
    cols
}

/// Velocity of a point attached to `link` under joint rates `dof_vel`.
pub fn point_velocity(dof_pos: &DofVector, dof_vel: &DofVector, point: Vec2, link: usize) -> Vec2 {
    let cols = point_jacobian(dof_pos, point, link);
    let mut v = Vec2::zero();
    for (c, &qd) in cols.iter().zip(dof_vel) {
        v += *c * qd;
    }
    v
}

/// Ball rigid-body state. Rotation is unwrapped radians.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallState {
    pub pos: Vec2,
    pub rot: Scalar,
    pub vel: Vec2,
    pub ang_vel: Scalar,
}

impl BallState {
    pub fn at_rest(pos: Vec2) -> Self {
        Self {
            pos,
            rot: 0.0,
            vel: Vec2::zero(),
            ang_vel: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.rot.is_finite() && self.vel.is_finite() && self.ang_vel.is_finite()
    }
}

/// Binary contact-graph edge values over the three scene nodes
/// (hand, hands-exclusive body, ball). Node values derive as the OR of
/// incident edges and are never stored.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ContactEdges {
    pub hand_ball: bool,
    pub body_ball: bool,
    pub hand_body: bool,
}

impl ContactEdges {
    pub const EDGE_COUNT: usize = 3;

    pub fn none() -> Self {
        Self::default()
    }

    /// Edge values in fixed order: hand-ball, body-ball, hand-body.
    pub fn as_array(&self) -> [u8; 3] {
        [self.hand_ball as u8, self.body_ball as u8, self.hand_body as u8]
    }

    pub fn from_array(edges: [u8; 3]) -> Self {
        Self {
            hand_ball: edges[0] != 0,
            body_ball: edges[1] != 0,
            hand_body: edges[2] != 0,
        }
    }

    pub fn hand_node(&self) -> bool {
        self.hand_ball || self.hand_body
    }

    pub fn body_node(&self) -> bool {
        self.body_ball || self.hand_body
    }

    pub fn ball_node(&self) -> bool {
        self.hand_ball || self.body_ball
    }
}

impl Serialize for ContactEdges {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.as_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ContactEdges {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let edges = <[u8; 3]>::deserialize(deserializer)?;
        for (i, &e) in edges.iter().enumerate() {
            if e > 1 {
                return Err(serde::de::Error::custom(format!(
                    "cg edge {i} must be 0 or 1, got {e}"
                )));
            }
        }
        Ok(Self::from_array(edges))
    }
}

/// One reference time-slice: robot kinematics, ball kinematics, and the
/// contact-graph edges observed at that instant.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoiFrame {
    pub robot: RobotState,
    pub ball: BallState,
    pub cg: ContactEdges,
}

impl HoiFrame {
    pub fn is_finite(&self) -> bool {
        self.robot.is_finite() && self.ball.is_finite()
    }
}

/// Skill identity: a dense id within a dataset plus a human-readable name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillLabel {
    pub id: usize,
    pub name: String,
}

impl SkillLabel {
    pub fn new(id: usize, name: impl Into<String>) -> Self {
        Self { id, name: name.into() }
    }
}

/// Mirror a robot state about the vertical axis x = 0.
pub fn mirror_robot(r: &RobotState) -> RobotState {
    RobotState {
        dof_pos: [
            -r.dof_pos[0],
            std::f64::consts::PI - r.dof_pos[1],
            -r.dof_pos[2],
            -r.dof_pos[3],
        ],
        dof_vel: [-r.dof_vel[0], -r.dof_vel[1], -r.dof_vel[2], -r.dof_vel[3]],
    }
}

/// Mirror a ball state about the vertical axis x = 0.
pub fn mirror_ball(b: &BallState) -> BallState {
    BallState {
        pos: Vector2::new(-b.pos.x, b.pos.y),
        rot: -b.rot,
        vel: Vector2::new(-b.vel.x, b.vel.y),
        ang_vel: -b.ang_vel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn fk_straight_chain() {
        let kp = forward_kinematics(&[0.3, 0.0, 0.0, 0.0]);
        assert_eq!(kp.base, Vec2::new(0.3, 1.0));
        assert!((kp.hand - Vec2::new(0.3 + 0.9, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn fk_quarter_turn() {
        let kp = forward_kinematics(&[-0.5, FRAC_PI_2, 0.0, 0.0]);
        assert!((kp.hand - Vec2::new(-0.5, 1.9)).norm() < 1e-12);
        assert!((kp.elbow - Vec2::new(-0.5, 1.4)).norm() < 1e-12);
    }

    /// Independent oracle: compose per-link homogeneous transforms.
    fn fk_oracle(dof: &DofVector) -> Vec2 {
        fn mat_mul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
            let mut c = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        }
        fn rot_then_translate(theta: f64, len: f64) -> [[f64; 3]; 3] {
            // Rotate by theta, then advance len along the new x axis.
            let (s, c) = theta.sin_cos();
            [[c, -s, c * len], [s, c, s * len], [0.0, 0.0, 1.0]]
        }
        let base = [[1.0, 0.0, dof[0]], [0.0, 1.0, BASE_HEIGHT], [0.0, 0.0, 1.0]];
        let mut t = mat_mul(base, rot_then_translate(dof[1], LINK_LENGTHS[0]));
        t = mat_mul(t, rot_then_translate(dof[2], LINK_LENGTHS[1]));
        t = mat_mul(t, rot_then_translate(dof[3], LINK_LENGTHS[2]));
        Vec2::new(t[0][2], t[1][2])
    }

    #[test]
    fn fk_matches_transform_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dof = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            ];
            let kp = forward_kinematics(&dof);
            assert!((kp.hand - fk_oracle(&dof)).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-7;
        for _ in 0..50 {
            let dof: DofVector = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            ];
            let hand = chain_frames(&dof).hand;
            let cols = point_jacobian(&dof, hand, 3);
            for k in 0..DOF_COUNT {
                let mut dp = dof;
                let mut dm = dof;
                dp[k] += h;
                dm[k] -= h;
                let num = (chain_frames(&dp).hand - chain_frames(&dm).hand) / (2.0 * h);
                // The analytic column is evaluated at the unperturbed point.
                assert!(
                    (cols[k] - num).norm() < 1e-6,
                    "jacobian column {k} mismatch: {cols:?} vs {num:?}"
                );
            }
        }
    }

    #[test]
    fn key_point_velocities_match_finite_differences() {
        let dof = [0.2, 0.7, -0.4, 0.3];
        let vel = [0.5, -0.2, 0.8, -1.1];
        let state = RobotState::new(dof, vel);
        let v = state.key_point_velocities();

        let h = 1e-7;
        let mut advanced = dof;
        for k in 0..DOF_COUNT {
            advanced[k] += vel[k] * h;
        }
        let kp0 = forward_kinematics(&dof);
        let kp1 = forward_kinematics(&advanced);
        assert!((v[1] - (kp1.elbow - kp0.elbow) / h).norm() < 1e-5);
        assert!((v[2] - (kp1.hand - kp0.hand) / h).norm() < 1e-5);
        assert_eq!(v[0], Vec2::new(0.5, 0.0));
    }

    #[test]
    fn cg_edges_round_trip_and_nodes() {
        let cg = ContactEdges::from_array([1, 0, 1]);
        assert_eq!(cg.as_array(), [1, 0, 1]);
        assert!(cg.hand_node());
        assert!(cg.body_node());
        assert!(cg.ball_node());
        let none = ContactEdges::none();
        assert!(!none.hand_node() && !none.body_node() && !none.ball_node());

        let json = serde_json::to_string(&cg).unwrap();
        assert_eq!(json, "[1,0,1]");
        let back: ContactEdges = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cg);
        assert!(serde_json::from_str::<ContactEdges>("[2,0,0]").is_err());
    }

    #[test]
    fn mirrored_fk_mirrors_points() {
        let dof = [0.4, 0.9, -0.6, 0.2];
        let kp = forward_kinematics(&dof);
        let m = mirror_robot(&RobotState::at_rest(dof));
        let kpm = forward_kinematics(&m.dof_pos);
        assert!((kpm.hand.x + kp.hand.x).abs() < 1e-12);
        assert!((kpm.hand.y - kp.hand.y).abs() < 1e-12);
        assert!((kpm.elbow.x + kp.elbow.x).abs() < 1e-12);
    }
}
