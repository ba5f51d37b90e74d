//! Deterministic planar rigid-body playground: PD-actuated 4-DOF robot,
//! bouncing ball, contact detection with per-pair records, and
//! contact-graph extraction.

mod narrowphase;
mod solver;

pub use narrowphase::{closest_on_segment, contact_candidates, ContactGeom};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{chain_frames, BallState, ContactEdges, DofVector, HoiFrame, RobotState, DOF_COUNT};
use crate::{Scalar, Vec2};

/// Contact-graph scene nodes plus the ground, which carries contacts but is
/// not a graph node.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Node {
    Hand,
    Body,
    Ball,
    Ground,
}

/// One resolved contact from a substep.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct ContactRecord {
    pub node_a: Node,
    pub node_b: Node,
    pub point: Vec2,
    /// Unit normal pointing from `node_a` toward `node_b`.
    pub normal: Vec2,
    /// Accumulated normal impulse over the substep, N*s, non-negative.
    pub impulse: Scalar,
    /// Accumulated friction impulse along the contact tangent, N*s.
    pub tangent_impulse: Scalar,
}

/// Net contact force on each scene node over the last substep.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetForces {
    pub hand: Vec2,
    pub body: Vec2,
    pub ball: Vec2,
}

impl NetForces {
    pub fn of(&self, node: Node) -> Vec2 {
        match node {
            Node::Hand => self.hand,
            Node::Body => self.body,
            Node::Ball => self.ball,
            Node::Ground => Vec2::zero(),
        }
    }
}

/// Physical parameters of the playground.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    /// Gravitational acceleration, m/s^2, acting along -y on the ball.
    pub gravity: Scalar,
    /// Simulation substep, seconds.
    pub dt_sim: Scalar,
    pub ball_radius: Scalar,
    /// Disc density, kg/m^3 at unit depth: mass = density * pi * r^2.
    pub ball_density: Scalar,
    pub restitution_ball: Scalar,
    pub restitution_ground: Scalar,
    pub restitution_robot: Scalar,
    /// Coulomb friction coefficient shared by all pairs.
    pub friction: Scalar,
    pub pd_kp: DofVector,
    pub pd_kd: DofVector,
    pub torque_limit: DofVector,
    /// Joint-space inertia per DOF (kg for the prismatic base, kg*m^2 for
    /// the revolute joints); the links themselves are massless.
    pub dof_inertia: DofVector,
    pub hand_radius: Scalar,
    pub link_radius: Scalar,
    pub base_radius: Scalar,
    /// Contact force threshold for a contact-graph edge to activate, N.
    pub cg_force_threshold: Scalar,
    /// Minimum approach speed for restitution to apply, m/s.
    pub restitution_threshold: Scalar,
    /// Resting-contact activation distance, m.
    pub contact_margin: Scalar,
    /// Positional correction factor per substep.
    pub baumgarte: Scalar,
    /// Penetration depth tolerated without positional correction, m.
    pub penetration_slop: Scalar,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            gravity: 9.81,
            dt_sim: 1.0 / 120.0,
            ball_radius: 0.12,
            ball_density: 1000.0,
            restitution_ball: 0.81,
            restitution_ground: 0.8,
            restitution_robot: 0.0,
            friction: 0.6,
            pd_kp: [400.0, 120.0, 80.0, 40.0],
            pd_kd: [40.0, 12.0, 8.0, 4.0],
            torque_limit: [600.0, 200.0, 120.0, 60.0],
            dof_inertia: [12.0, 1.5, 0.6, 0.1],
            hand_radius: 0.10,
            link_radius: 0.05,
            base_radius: 0.15,
            cg_force_threshold: 1.0,
            restitution_threshold: 0.2,
            contact_margin: 0.002,
            baumgarte: 0.2,
            penetration_slop: 0.001,
        }
    }
}

impl PhysicsParams {
    pub fn ball_mass(&self) -> Scalar {
        self.ball_density * std::f64::consts::PI * self.ball_radius * self.ball_radius
    }

    pub fn ball_inertia(&self) -> Scalar {
        0.5 * self.ball_mass() * self.ball_radius * self.ball_radius
    }

    /// Scale one physical attribute by a factor (evaluation perturbations).
    pub fn scaled(&self, attribute: &str, factor: Scalar) -> Option<Self> {
        let mut p = self.clone();
        match attribute {
            "radius" => p.ball_radius *= factor,
            "density" => p.ball_density *= factor,
            "restitution" => {
                p.restitution_ball = (p.restitution_ball * factor).min(1.0);
                p.restitution_ground = (p.restitution_ground * factor).min(1.0);
            }
            _ => return None,
        }
        Some(p)
    }
}

/// Full dynamic state of the playground.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimState {
    pub robot: RobotState,
    pub ball: BallState,
    pub contacts: Vec<ContactRecord>,
    pub net_force: NetForces,
    pub time: Scalar,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite simulation state in {field}")]
    NonFinite { field: &'static str },
    #[error("reset frame interpenetrates: {pair} by {depth:.4} m")]
    ResetPenetration { pair: String, depth: Scalar },
}

/// PD torque law: tau_i = clamp(kp_i (target_i - pos_i) - kd_i vel_i).
pub fn pd_torque(
    dof_pos: &DofVector,
    dof_vel: &DofVector,
    target_pos: &DofVector,
    params: &PhysicsParams,
) -> DofVector {
    let mut tau = [0.0; DOF_COUNT];
    for i in 0..DOF_COUNT {
        let raw = params.pd_kp[i] * (target_pos[i] - dof_pos[i]) - params.pd_kd[i] * dof_vel[i];
        tau[i] = raw.clamp(-params.torque_limit[i], params.torque_limit[i]);
    }
    tau
}

fn check_finite(state: &SimState) -> Result<(), SimError> {
    if !state.robot.is_finite() {
        return Err(SimError::NonFinite { field: "robot" });
    }
    if !state.ball.is_finite() {
        return Err(SimError::NonFinite { field: "ball" });
    }
    Ok(())
}

/// Advance one simulation substep under the given PD targets.
///
/// Order: PD torque, semi-implicit Euler velocity update, narrowphase,
/// impulse velocity solve, position integration, positional correction.
pub fn step(
    state: &SimState,
    target_dof: &DofVector,
    params: &PhysicsParams,
) -> Result<SimState, SimError> {
    check_finite(state)?;
    let dt = params.dt_sim;
    let mut robot = state.robot;
    let mut ball = state.ball;

    // Velocity update: actuation on the joints, gravity on the ball.
    let tau = pd_torque(&robot.dof_pos, &robot.dof_vel, target_dof, params);
    for i in 0..DOF_COUNT {
        robot.dof_vel[i] += tau[i] / params.dof_inertia[i] * dt;
    }
    ball.vel.y -= params.gravity * dt;

    // Contacts at pre-integration geometry.
    let frames = chain_frames(&robot.dof_pos);
    let candidates = contact_candidates(&frames, robot.dof_pos[0], ball.pos, params);
    let jacobians: Vec<_> = candidates
        .iter()
        .map(|g| narrowphase::robot_point_jacobian(&frames, g.node, g.link, g.surface_point))
        .collect();
    let input = solver::SolveInput {
        params,
        dt,
        ball_mass: params.ball_mass(),
        ball_inertia: params.ball_inertia(),
    };
    let mut constraints =
        solver::prepare_constraints(&candidates, &jacobians, &ball, &robot.dof_vel, &input);
    solver::solve_velocities(&mut constraints, &mut ball, &mut robot.dof_vel, &input);

    // Position update.
    for i in 0..DOF_COUNT {
        robot.dof_pos[i] += robot.dof_vel[i] * dt;
    }
    ball.pos += ball.vel * dt;
    ball.rot += ball.ang_vel * dt;

    solver::project_positions(&candidates, &mut ball.pos, params);

    let contacts: Vec<ContactRecord> = constraints
        .iter()
        .filter(|c| c.impulse_n > 0.0 || c.impulse_t != 0.0)
        .map(|c| ContactRecord {
            node_a: c.node,
            node_b: Node::Ball,
            point: c.point,
            normal: c.normal,
            impulse: c.impulse_n,
            tangent_impulse: c.impulse_t,
        })
        .collect();
    let net_force = accumulate_net_forces(&contacts, dt);

    let next = SimState {
        robot,
        ball,
        contacts,
        net_force,
        time: state.time + dt,
    };
    check_finite(&next)?;
    Ok(next)
}

fn accumulate_net_forces(contacts: &[ContactRecord], dt: Scalar) -> NetForces {
    let mut net = NetForces::default();
    for c in contacts {
        let f = (c.normal * c.impulse + c.normal.perp() * c.tangent_impulse) / dt;
        // The stored normal points a -> b, so node_b receives +f.
        match c.node_b {
            Node::Hand => net.hand += f,
            Node::Body => net.body += f,
            Node::Ball => net.ball += f,
            Node::Ground => {}
        }
        match c.node_a {
            Node::Hand => net.hand -= f,
            Node::Body => net.body -= f,
            Node::Ball => net.ball -= f,
            Node::Ground => {}
        }
    }
    net
}

/// Contact-graph edges from per-pair records: an edge activates when any
/// record joining that pair carries at least the force threshold. Ground
/// contacts are not part of the graph.
pub fn extract_cg(contacts: &[ContactRecord], params: &PhysicsParams) -> ContactEdges {
    let mut cg = ContactEdges::none();
    let threshold = params.cg_force_threshold * params.dt_sim;
    for c in contacts {
        if c.impulse < threshold {
            continue;
        }
        match (c.node_a, c.node_b) {
            (Node::Hand, Node::Ball) | (Node::Ball, Node::Hand) => cg.hand_ball = true,
            (Node::Body, Node::Ball) | (Node::Ball, Node::Body) => cg.body_ball = true,
            (Node::Hand, Node::Body) | (Node::Body, Node::Hand) => cg.hand_body = true,
            _ => {}
        }
    }
    cg
}

/// Reset the playground to a reference frame.
///
/// Kinematic fields are copied exactly; contact records are regenerated
/// geometrically (with zero impulse, since no dynamics have run yet);
/// time restarts at zero.
pub fn reset_to(frame: &HoiFrame, params: &PhysicsParams) -> Result<SimState, SimError> {
    const MAX_PENETRATION: Scalar = 0.01;
    if !frame.is_finite() {
        return Err(SimError::NonFinite { field: "frame" });
    }
    let frames = chain_frames(&frame.robot.dof_pos);
    let candidates = contact_candidates(&frames, frame.robot.dof_pos[0], frame.ball.pos, params);
    let mut contacts = Vec::new();
    for geom in &candidates {
        if -geom.gap > MAX_PENETRATION {
            return Err(SimError::ResetPenetration {
                pair: format!("{:?}-ball", geom.node),
                depth: -geom.gap,
            });
        }
        if geom.gap <= params.contact_margin {
            contacts.push(ContactRecord {
                node_a: geom.node,
                node_b: Node::Ball,
                point: geom.surface_point + geom.normal * (geom.gap * 0.5),
                normal: geom.normal,
                impulse: 0.0,
                tangent_impulse: 0.0,
            });
        }
    }
    Ok(SimState {
        robot: frame.robot,
        ball: frame.ball,
        contacts,
        net_force: NetForces::default(),
        time: 0.0,
    })
}

/// Initial state: robot at a given pose, ball resting on the ground.
pub fn initial_state(dof_pos: DofVector, ball_x: Scalar, params: &PhysicsParams) -> SimState {
    SimState {
        robot: RobotState::at_rest(dof_pos),
        ball: BallState::at_rest(Vec2::new(ball_x, params.ball_radius)),
        contacts: Vec::new(),
        net_force: NetForces::default(),
        time: 0.0,
    }
}

/// Kinetic plus potential energy of the passive degrees of freedom:
/// ball (translation, spin, height) and joint-space robot motion.
pub fn mechanical_energy(state: &SimState, params: &PhysicsParams) -> Scalar {
    let m = params.ball_mass();
    let inertia = params.ball_inertia();
    let ball = &state.ball;
    let mut e = 0.5 * m * ball.vel.norm_sq()
        + 0.5 * inertia * ball.ang_vel * ball.ang_vel
        + m * params.gravity * ball.pos.y;
    for i in 0..DOF_COUNT {
        e += 0.5 * params.dof_inertia[i] * state.robot.dof_vel[i] * state.robot.dof_vel[i];
    }
    e
}

/// Current hand-to-ball surface distance (negative when interpenetrating).
pub fn hand_ball_gap(state: &SimState, params: &PhysicsParams) -> Scalar {
    let kp = state.robot.key_points();
    (state.ball.pos - kp.hand).norm() - params.hand_radius - params.ball_radius
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rest_state(params: &PhysicsParams) -> SimState {
        initial_state([0.0, 1.2, 0.4, 0.2], 2.0, params)
    }

    #[test]
    fn pd_torque_law() {
        let params = PhysicsParams::default();
        let pos = [0.1, 0.2, 0.3, 0.4];
        // Target equals position, zero velocity: no torque.
        assert_eq!(pd_torque(&pos, &[0.0; 4], &pos, &params), [0.0; 4]);

        // Linear law: kp 400 on DOF 0, error 0.1 -> 40.
        let mut target = pos;
        target[0] += 0.1;
        let tau = pd_torque(&pos, &[0.0; 4], &target, &params);
        assert!((tau[0] - 40.0).abs() < 1e-12);

        // Saturation at the limit.
        target[0] = pos[0] + 100.0;
        let tau = pd_torque(&pos, &[0.0; 4], &target, &params);
        assert_eq!(tau[0], params.torque_limit[0]);
    }

    #[test]
    fn resting_ball_is_stationary() {
        let params = PhysicsParams::default();
        let mut state = rest_state(&params);
        let hold = state.robot.dof_pos;
        for _ in 0..240 {
            let prev = state.ball;
            state = step(&state, &hold, &params).unwrap();
            assert!((state.ball.pos - prev.pos).norm() < 1e-9);
            assert!((state.ball.vel - prev.vel).norm() < 1e-9);
        }
        assert!((state.ball.pos.y - params.ball_radius).abs() < 1e-9);
    }

    #[test]
    fn dropped_ball_rebounds_at_combined_restitution() {
        let params = PhysicsParams::default();
        let mut state = rest_state(&params);
        state.ball.pos = Vec2::new(2.0, 1.5);
        let hold = state.robot.dof_pos;

        // Find the impact step: vertical velocity flips sign.
        let mut prev_vy = 0.0;
        let mut rebound = None;
        for _ in 0..400 {
            state = step(&state, &hold, &params).unwrap();
            if prev_vy < -1.0 && state.ball.vel.y > 0.0 {
                // Approach speed at solve time includes this substep's gravity.
                let approach = -prev_vy + params.gravity * params.dt_sim;
                rebound = Some((approach, state.ball.vel.y));
                break;
            }
            prev_vy = state.ball.vel.y;
        }
        let (approach, separation) = rebound.expect("ball never bounced");
        let e = 0.5 * (params.restitution_ball + params.restitution_ground);
        assert!(
            (separation / approach - e).abs() < 1e-9,
            "measured ratio {} vs expected {}",
            separation / approach,
            e
        );
    }

    #[test]
    fn unit_restitution_conserves_bounce_speed() {
        let mut params = PhysicsParams::default();
        params.restitution_ball = 1.0;
        params.restitution_ground = 1.0;
        params.friction = 0.0;
        let mut state = rest_state(&params);
        state.ball.pos = Vec2::new(2.0, 1.0);
        let hold = state.robot.dof_pos;

        let mut prev_vy = 0.0;
        for _ in 0..400 {
            state = step(&state, &hold, &params).unwrap();
            if prev_vy < -1.0 && state.ball.vel.y > 0.0 {
                let approach = -prev_vy + params.gravity * params.dt_sim;
                assert!((state.ball.vel.y - approach).abs() / approach < 1e-3);
                return;
            }
            prev_vy = state.ball.vel.y;
        }
        panic!("ball never bounced");
    }

    #[test]
    fn hand_ball_contact_is_recorded() {
        let params = PhysicsParams::default();
        // Arm pointing straight out (+x), ball falling onto the hand.
        let mut state = initial_state([0.0, 0.0, 0.0, 0.0], 0.9, &params);
        state.ball.pos = Vec2::new(0.9, 1.5);
        let hold = state.robot.dof_pos;
        let mut saw_hand_contact = false;
        for _ in 0..120 {
            state = step(&state, &hold, &params).unwrap();
            if let Some(c) = state
                .contacts
                .iter()
                .find(|c| c.node_a == Node::Hand && c.impulse > 0.0)
            {
                assert_eq!(c.node_b, Node::Ball);
                saw_hand_contact = true;
                break;
            }
        }
        assert!(saw_hand_contact);
    }

    #[test]
    fn cg_extraction_thresholds_and_pairs() {
        let params = PhysicsParams::default();
        assert_eq!(extract_cg(&[], &params), ContactEdges::none());

        let strong = ContactRecord {
            node_a: Node::Hand,
            node_b: Node::Ball,
            point: Vec2::zero(),
            normal: Vec2::new(0.0, 1.0),
            impulse: 10.0 * params.dt_sim,
            tangent_impulse: 0.0,
        };
        let cg = extract_cg(&[strong], &params);
        assert_eq!(cg.as_array(), [1, 0, 0]);

        let weak = ContactRecord {
            impulse: 0.5 * params.dt_sim,
            ..strong
        };
        assert_eq!(extract_cg(&[weak], &params), ContactEdges::none());

        let body = ContactRecord {
            node_a: Node::Body,
            ..strong
        };
        let ground = ContactRecord {
            node_a: Node::Ground,
            ..strong
        };
        let cg = extract_cg(&[strong, body, ground], &params);
        assert_eq!(cg.as_array(), [1, 1, 0]);
    }

    #[test]
    fn reset_round_trips_and_rejects_penetration() {
        let params = PhysicsParams::default();
        let frame = HoiFrame {
            robot: RobotState::new([0.3, 0.9, -0.4, 0.1], [0.1, -0.2, 0.3, 0.0]),
            ball: BallState {
                pos: Vec2::new(1.5, 0.8),
                rot: 0.4,
                vel: Vec2::new(-0.5, 0.2),
                ang_vel: 1.0,
            },
            cg: ContactEdges::none(),
        };
        let state = reset_to(&frame, &params).unwrap();
        assert_eq!(state.robot, frame.robot);
        assert_eq!(state.ball, frame.ball);
        assert_eq!(state.time, 0.0);

        let mut bad = frame;
        bad.ball.pos = Vec2::new(1.5, params.ball_radius - 0.02);
        assert!(matches!(
            reset_to(&bad, &params),
            Err(SimError::ResetPenetration { .. })
        ));
    }

    #[test]
    fn determinism_bitwise() {
        let params = PhysicsParams::default();
        let mut a = rest_state(&params);
        let mut b = rest_state(&params);
        a.ball.pos = Vec2::new(1.2, 1.3);
        b.ball.pos = Vec2::new(1.2, 1.3);
        a.ball.vel = Vec2::new(-0.8, -2.0);
        b.ball.vel = Vec2::new(-0.8, -2.0);
        let target = [0.5, 0.8, -0.5, 0.3];
        for _ in 0..600 {
            a = step(&a, &target, &params).unwrap();
            b = step(&b, &target, &params).unwrap();
        }
        assert_eq!(a.robot, b.robot);
        assert_eq!(a.ball, b.ball);
    }

    #[test]
    fn non_finite_state_is_reported() {
        let params = PhysicsParams::default();
        let mut state = rest_state(&params);
        state.ball.vel.x = f64::NAN;
        let err = step(&state, &[0.0; 4], &params).unwrap_err();
        assert!(matches!(err, SimError::NonFinite { field: "ball" }));
    }
}
