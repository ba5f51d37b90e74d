//! Narrowphase contact generation between the ball disc, the robot's
//! colliders (hand circle, base circle, link capsules), and the ground plane.

use crate::state::{ChainFrames, DOF_COUNT};
use crate::{Scalar, Vec2};

use super::{Node, PhysicsParams};

/// Geometric contact candidate between the ball and one scene collider.
///
/// `normal` points from the other body toward the ball, so positive normal
/// velocity of the ball separates the pair. `gap` is the signed surface
/// distance (negative when penetrating).
#[derive(Copy, Clone, Debug)]
pub struct ContactGeom {
    /// Robot-side (or ground) node of the pair; the other node is always the ball.
    pub node: Node,
    /// Robot link carrying the contact: 0 = base body, 1 = upper arm,
    /// 2 = forearm, 3 = hand. Unused for ground contacts.
    pub link: usize,
    /// Material point on the robot/ground surface, world frame.
    pub surface_point: Vec2,
    pub normal: Vec2,
    pub gap: Scalar,
}

fn circle_vs_ball(
    node: Node,
    link: usize,
    center: Vec2,
    radius: Scalar,
    ball_pos: Vec2,
    ball_radius: Scalar,
) -> ContactGeom {
    let d = ball_pos - center;
    let dist = d.norm();
    let normal = if dist > 1e-9 {
        d / dist
    } else {
        Vec2::new(0.0, 1.0)
    };
    ContactGeom {
        node,
        link,
        surface_point: center + normal * radius,
        normal,
        gap: dist - radius - ball_radius,
    }
}

/// Closest point on segment `[a, b]` to `p`.
pub fn closest_on_segment(a: Vec2, b: Vec2, p: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq < 1e-18 {
        return a;
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

/// All contact candidates for the current configuration, in a fixed order
/// (ground, hand, base, upper arm, forearm) so the solver is deterministic.
pub fn contact_candidates(
    frames: &ChainFrames,
    base_x: Scalar,
    ball_pos: Vec2,
    params: &PhysicsParams,
) -> [ContactGeom; 5] {
    let r = params.ball_radius;
    let ground = ContactGeom {
        node: Node::Ground,
        link: 0,
        surface_point: Vec2::new(ball_pos.x, 0.0),
        normal: Vec2::new(0.0, 1.0),
        gap: ball_pos.y - r,
    };
    let hand = circle_vs_ball(Node::Hand, 3, frames.hand, params.hand_radius, ball_pos, r);
    let base = circle_vs_ball(
        Node::Body,
        0,
        Vec2::new(base_x, crate::state::BASE_HEIGHT),
        params.base_radius,
        ball_pos,
        r,
    );
    let upper = {
        let p = closest_on_segment(frames.joints[0], frames.joints[1], ball_pos);
        circle_vs_ball(Node::Body, 1, p, params.link_radius, ball_pos, r)
    };
    let fore = {
        let p = closest_on_segment(frames.joints[1], frames.joints[2], ball_pos);
        circle_vs_ball(Node::Body, 2, p, params.link_radius, ball_pos, r)
    };
    [ground, hand, base, upper, fore]
}

/// Jacobian of a material point attached to robot link `link`
/// (0 = base, 1..=3 = chain links); zero for the ground.
pub fn robot_point_jacobian(
    frames: &ChainFrames,
    node: Node,
    link: usize,
    point: Vec2,
) -> [Vec2; DOF_COUNT] {
    let mut cols = [Vec2::zero(); DOF_COUNT];
    if node == Node::Ground {
        return cols;
    }
    cols[0] = Vec2::new(1.0, 0.0);
    for j in 0..link {
        cols[j + 1] = (point - frames.joints[j]).perp();
    }
    cols
}
