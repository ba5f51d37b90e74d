//! Sequential-impulse contact solver in mixed coordinates: the ball is a
//! free rigid disc, the robot is a generalized-coordinate chain with a
//! diagonal joint-space inertia matrix.

use crate::state::{BallState, DofVector, DOF_COUNT};
use crate::{Scalar, Vec2};

use super::narrowphase::ContactGeom;
use super::{Node, PhysicsParams};

const VELOCITY_ITERATIONS: usize = 10;

/// One active contact prepared for the velocity pass.
pub struct Constraint {
    pub node: Node,
    pub link: usize,
    /// Reported contact point (midway between surfaces).
    pub point: Vec2,
    pub normal: Vec2,
    pub gap: Scalar,
    /// Robot material-point Jacobian columns at the contact.
    j_robot: [Vec2; DOF_COUNT],
    /// Ball surface point relative to the ball center.
    r_ball: Vec2,
    inv_mass_n: Scalar,
    inv_mass_t: Scalar,
    /// Target normal velocity after the solve.
    bias: Scalar,
    pub impulse_n: Scalar,
    pub impulse_t: Scalar,
}

pub struct SolveInput<'a> {
    pub params: &'a PhysicsParams,
    pub dt: Scalar,
    pub ball_mass: Scalar,
    pub ball_inertia: Scalar,
}

fn relative_velocity_along(
    c: &Constraint,
    ball: &BallState,
    dof_vel: &DofVector,
    dir: Vec2,
) -> Scalar {
    // Ball surface point velocity minus robot material point velocity.
    let v_ball = ball.vel + c.r_ball.perp() * ball.ang_vel;
    let mut v_robot = Vec2::zero();
    for (col, &qd) in c.j_robot.iter().zip(dof_vel) {
        v_robot += *col * qd;
    }
    (v_ball - v_robot).dot(dir)
}

fn apply_impulse(
    c: &Constraint,
    impulse: Vec2,
    ball: &mut BallState,
    dof_vel: &mut DofVector,
    input: &SolveInput,
) {
    ball.vel += impulse / input.ball_mass;
    ball.ang_vel += c.r_ball.cross(impulse) / input.ball_inertia;
    for k in 0..DOF_COUNT {
        dof_vel[k] -= c.j_robot[k].dot(impulse) / input.params.dof_inertia[k];
    }
}

fn effective_inv_mass(c: &Constraint, dir: Vec2, input: &SolveInput) -> Scalar {
    let mut inv = 1.0 / input.ball_mass + c.r_ball.cross(dir).powi(2) / input.ball_inertia;
    for k in 0..DOF_COUNT {
        inv += c.j_robot[k].dot(dir).powi(2) / input.params.dof_inertia[k];
    }
    inv
}

fn combined_restitution(node: Node, params: &PhysicsParams) -> Scalar {
    let other = match node {
        Node::Ground => params.restitution_ground,
        _ => params.restitution_robot,
    };
    0.5 * (params.restitution_ball + other)
}

/// Build solver constraints from geometric candidates.
///
/// A pair becomes active when its gap is within a speculative horizon that
/// covers the distance closed this substep, so fast approaches are caught
/// before they penetrate. Restitution targets use the approach speed captured
/// here, before any impulse is applied.
pub fn prepare_constraints(
    candidates: &[ContactGeom],
    jacobians: &[[Vec2; DOF_COUNT]],
    ball: &BallState,
    dof_vel: &DofVector,
    input: &SolveInput,
) -> Vec<Constraint> {
    let params = input.params;
    let mut out = Vec::with_capacity(candidates.len());
    for (geom, j) in candidates.iter().zip(jacobians) {
        let mut c = Constraint {
            node: geom.node,
            link: geom.link,
            point: geom.surface_point + geom.normal * (geom.gap * 0.5),
            normal: geom.normal,
            gap: geom.gap,
            j_robot: *j,
            r_ball: -geom.normal * params.ball_radius,
            inv_mass_n: 0.0,
            inv_mass_t: 0.0,
            bias: 0.0,
            impulse_n: 0.0,
            impulse_t: 0.0,
        };
        let v_n = relative_velocity_along(&c, ball, dof_vel, c.normal);
        let horizon = params.contact_margin + (-v_n).max(0.0) * input.dt;
        if geom.gap > horizon {
            continue;
        }
        let approach = (-v_n).max(0.0);
        let e = if approach > params.restitution_threshold {
            combined_restitution(geom.node, params)
        } else {
            0.0
        };
        // Speculative: never close more than the remaining gap this substep.
        let speculative_floor = -(geom.gap.max(0.0)) / input.dt;
        c.bias = (e * approach).max(speculative_floor);

        c.inv_mass_n = effective_inv_mass(&c, c.normal, input);
        c.inv_mass_t = effective_inv_mass(&c, c.normal.perp(), input);
        out.push(c);
    }
    out
}

/// Velocity pass: projected Gauss-Seidel over normal then friction impulses.
pub fn solve_velocities(
    constraints: &mut [Constraint],
    ball: &mut BallState,
    dof_vel: &mut DofVector,
    input: &SolveInput,
) {
    let friction = input.params.friction;
    for _ in 0..VELOCITY_ITERATIONS {
        for c in constraints.iter_mut() {
            // Normal impulse toward the bias target, accumulated non-negative.
            let v_n = relative_velocity_along(c, ball, dof_vel, c.normal);
            let delta = -(v_n - c.bias) / c.inv_mass_n;
            let new_total = (c.impulse_n + delta).max(0.0);
            let applied = new_total - c.impulse_n;
            c.impulse_n = new_total;
            if applied != 0.0 {
                apply_impulse(c, c.normal * applied, ball, dof_vel, input);
            }

            // Coulomb friction toward zero tangential relative velocity.
            let tangent = c.normal.perp();
            let v_t = relative_velocity_along(c, ball, dof_vel, tangent);
            let delta_t = -v_t / c.inv_mass_t;
            let max_t = friction * c.impulse_n;
            let new_total_t = (c.impulse_t + delta_t).clamp(-max_t, max_t);
            let applied_t = new_total_t - c.impulse_t;
            c.impulse_t = new_total_t;
            if applied_t != 0.0 {
                apply_impulse(c, tangent * applied_t, ball, dof_vel, input);
            }
        }
    }
}

/// Position pass: project the ball out of any remaining penetration.
///
/// Positions move without touching velocities, so the correction cannot feed
/// energy into the velocity state. Returns the deepest penetration seen
/// before correction.
pub fn project_positions(
    candidates: &[ContactGeom],
    ball_pos: &mut Vec2,
    params: &PhysicsParams,
) -> Scalar {
    let mut deepest: Scalar = 0.0;
    for geom in candidates {
        let (normal, gap) = gap_against(geom, *ball_pos, params);
        deepest = deepest.max(-gap);
        let depth = -gap - params.penetration_slop;
        if depth > 0.0 {
            *ball_pos += normal * (params.baumgarte * depth);
        }
    }
    deepest
}

/// Recompute (normal, gap) of a candidate against a moved ball center.
/// The robot-side geometry is the pre-integration snapshot; one substep of
/// staleness is within the correction tolerance.
fn gap_against(geom: &ContactGeom, ball_pos: Vec2, params: &PhysicsParams) -> (Vec2, Scalar) {
    match geom.node {
        Node::Ground => (Vec2::new(0.0, 1.0), ball_pos.y - params.ball_radius),
        _ => {
            let collider_radius = match geom.link {
                0 => params.base_radius,
                3 => params.hand_radius,
                _ => params.link_radius,
            };
            let center = geom.surface_point - geom.normal * collider_radius;
            let d = ball_pos - center;
            let dist = d.norm();
            let n = if dist > 1e-9 { d / dist } else { geom.normal };
            (n, dist - collider_radius - params.ball_radius)
        }
    }
}
