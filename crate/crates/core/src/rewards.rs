//! Imitation and task rewards.
//!
//! Every sub-reward is an exponential of a non-negative error, so each factor
//! lies in (0, 1] and equals 1 exactly when its error vanishes. The full
//! imitation reward multiplies the body, object, relative-motion,
//! regularization, and contact-graph factors; ablation variants replace the
//! product with sums or drop factors.

use serde::{Deserialize, Serialize};

use crate::math::{mse, shortest_arc, Real, Vector2};
use crate::state::{point_velocity, DofVector, HoiFrame};
use crate::Scalar;

/// Negative-exponential normalization of a non-negative error.
pub fn sub_reward<S: Real>(error: S, lambda: S) -> S {
    (-lambda * error).exp()
}

/// Flat MSE over the scalar components of a point set.
pub fn point_set_error<S: Real>(a: &[Vector2<S>], b: &[Vector2<S>]) -> S {
    assert_eq!(a.len(), b.len());
    let flat_a: Vec<S> = a.iter().flat_map(|v| [v.x, v.y]).collect();
    let flat_b: Vec<S> = b.iter().flat_map(|v| [v.x, v.y]).collect();
    mse(&flat_a, &flat_b)
}

/// MSE of shortest-arc angle differences.
pub fn angle_set_error<S: Real>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return S::zero();
    }
    let sum: S = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = shortest_arc(x - y);
            d * d
        })
        .fold(S::zero(), |acc, v| acc + v);
    sum / S::from_f64_c(a.len() as f64)
}

/// Contact-graph reward: exponential penalty on mismatched edges with
/// per-edge sensitivities.
pub fn cg_reward<S: Real>(sim_edges: &[u8], ref_edges: &[u8], lambda_cg: &[S]) -> S {
    assert_eq!(sim_edges.len(), ref_edges.len());
    assert_eq!(sim_edges.len(), lambda_cg.len());
    let mut exponent = S::zero();
    for ((&s, &r), &l) in sim_edges.iter().zip(ref_edges).zip(lambda_cg) {
        let e = S::from_f64_c((s as i32 - r as i32).abs() as f64);
        exponent += l * e;
    }
    (-exponent).exp()
}

/// Velocity-regularization reward: penalizes joint accelerations scaled by
/// how stationary the reference is. The sensitivity appears in both the
/// exponent and the denominator.
pub fn reg_reward<S: Real>(sim_dof_acc: &[S], ref_dof_vel: &[S], lambda_reg: S) -> S {
    assert_eq!(sim_dof_acc.len(), ref_dof_vel.len());
    if sim_dof_acc.is_empty() {
        return S::one();
    }
    let sum: S = sim_dof_acc
        .iter()
        .zip(ref_dof_vel)
        .map(|(&a, &v)| (a * a) / (v * v + lambda_reg))
        .fold(S::zero(), |acc, v| acc + v);
    let e_acc = sum / S::from_f64_c(sim_dof_acc.len() as f64);
    (-lambda_reg * e_acc).exp()
}

/// Reward for throwing the ball toward a target height.
pub fn throwing_reward<S: Real>(ball_height: S, target_height: S) -> S {
    (-(ball_height - target_height).abs()).exp()
}

/// Reward for moving the ball toward a target position (squared distance).
pub fn heading_reward<S: Real>(ball_pos: Vector2<S>, target_pos: Vector2<S>) -> S {
    (-(ball_pos - target_pos).norm_sq()).exp()
}

/// Speed gate: 1 when the squared ball speed exceeds 0.5, else 0.1.
pub fn speed_gate<S: Real>(ball_vel: Vector2<S>) -> S {
    if ball_vel.norm_sq() > S::from_f64_c(0.5) {
        S::one()
    } else {
        S::from_f64_c(0.1)
    }
}

/// Reward for circling the ball around a center at a target radius.
///
/// The printed form compares the target radius against the *squared* distance;
/// `unsquared` switches to a plain distance comparison for experimentation.
pub fn circling_reward<S: Real>(
    ball_pos: Vector2<S>,
    ball_vel: Vector2<S>,
    center: Vector2<S>,
    target_radius: S,
    unsquared: bool,
) -> S {
    let d = if unsquared {
        (ball_pos - center).norm()
    } else {
        (ball_pos - center).norm_sq()
    };
    speed_gate(ball_vel) * (-(target_radius - d).abs()).exp()
}

/// Composite scoring reward: speed gate times heading toward the basket,
/// a score bonus, and a height shaping term.
pub fn scoring_reward<S: Real>(
    ball_pos: Vector2<S>,
    ball_vel: Vector2<S>,
    basket_pos: Vector2<S>,
    scored: bool,
) -> S {
    let bonus = if scored { S::one() } else { S::zero() };
    speed_gate(ball_vel)
        * (heading_reward(ball_pos, basket_pos)
            + bonus
            + S::from_f64_c(0.2) * throwing_reward(ball_pos.y, basket_pos.y))
}

/// Reward-variant selection for ablation runs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardVariant {
    /// Product of body, object, relative, regularization, and contact factors.
    Full,
    /// Sum of the five factors instead of their product.
    NoMultiplication,
    /// Product without the contact-graph factor.
    NoCgr,
    /// Sum of position, rotation, rotation-velocity, and object factors.
    DmStyle,
}

/// Sensitivities of every sub-reward plus the variant switch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub lambda_p: Scalar,
    pub lambda_r: Scalar,
    pub lambda_pv: Scalar,
    pub lambda_rv: Scalar,
    pub lambda_op: Scalar,
    pub lambda_or: Scalar,
    pub lambda_opv: Scalar,
    pub lambda_orv: Scalar,
    pub lambda_rel: Scalar,
    pub lambda_cg: [Scalar; 3],
    pub lambda_reg: Scalar,
    pub variant: RewardVariant,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            lambda_p: 20.0,
            lambda_r: 20.0,
            lambda_pv: 0.0,
            lambda_rv: 0.0,
            lambda_op: 20.0,
            lambda_or: 0.0,
            lambda_opv: 0.0,
            lambda_orv: 0.0,
            lambda_rel: 20.0,
            lambda_cg: [5.0, 5.0, 5.0],
            lambda_reg: 1e-12,
            variant: RewardVariant::Full,
        }
    }
}

impl RewardWeights {
    /// Weight table for a given variant, applying the DM-style overrides.
    pub fn for_variant(variant: RewardVariant) -> Self {
        let mut w = Self {
            variant,
            ..Self::default()
        };
        if variant == RewardVariant::DmStyle {
            w.lambda_r = 2.0;
            w.lambda_rv = 0.1;
        }
        w
    }
}

/// Every factor of one imitation-reward evaluation.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RewardBreakdown {
    pub r_p: Scalar,
    pub r_r: Scalar,
    pub r_pv: Scalar,
    pub r_rv: Scalar,
    pub r_op: Scalar,
    pub r_or: Scalar,
    pub r_opv: Scalar,
    pub r_orv: Scalar,
    pub r_b: Scalar,
    pub r_o: Scalar,
    pub r_rel: Scalar,
    pub r_reg: Scalar,
    pub r_cg: Scalar,
    pub total: Scalar,
}

/// Body kinematics factor: key-point positions, DOF rotations, and their
/// velocities, each exponentially normalized and multiplied.
pub fn body_reward(sim: &HoiFrame, reference: &HoiFrame, w: &RewardWeights) -> (Scalar, [Scalar; 4]) {
    let sim_kp = sim.robot.key_points().as_array();
    let ref_kp = reference.robot.key_points().as_array();
    let r_p = sub_reward(point_set_error(&sim_kp, &ref_kp), w.lambda_p);
    // The prismatic base coordinate is a length, not an angle, but it never
    // wraps, so the shortest-arc difference reduces to a plain difference
    // for any physically reachable pair.
    let r_r = sub_reward(
        angle_set_error(&sim.robot.dof_pos, &reference.robot.dof_pos),
        w.lambda_r,
    );
    let r_pv = sub_reward(
        point_set_error(
            &sim.robot.key_point_velocities(),
            &reference.robot.key_point_velocities(),
        ),
        w.lambda_pv,
    );
    let r_rv = sub_reward(mse(&sim.robot.dof_vel, &reference.robot.dof_vel), w.lambda_rv);
    (r_p * r_r * r_pv * r_rv, [r_p, r_r, r_pv, r_rv])
}

/// Object kinematics factor: ball position, rotation, and velocities.
pub fn object_reward(sim: &HoiFrame, reference: &HoiFrame, w: &RewardWeights) -> (Scalar, [Scalar; 4]) {
    let r_op = sub_reward(
        point_set_error(&[sim.ball.pos], &[reference.ball.pos]),
        w.lambda_op,
    );
    let r_or = sub_reward(
        angle_set_error(&[sim.ball.rot], &[reference.ball.rot]),
        w.lambda_or,
    );
    let r_opv = sub_reward(
        point_set_error(&[sim.ball.vel], &[reference.ball.vel]),
        w.lambda_opv,
    );
    let r_orv = sub_reward(
        mse(&[sim.ball.ang_vel], &[reference.ball.ang_vel]),
        w.lambda_orv,
    );
    (r_op * r_or * r_opv * r_orv, [r_op, r_or, r_opv, r_orv])
}

/// Relative-motion factor: key points expressed relative to the ball.
pub fn relative_reward(sim: &HoiFrame, reference: &HoiFrame, w: &RewardWeights) -> Scalar {
    let rel = |frame: &HoiFrame| -> Vec<crate::Vec2> {
        frame
            .robot
            .key_points()
            .as_array()
            .iter()
            .map(|kp| *kp - frame.ball.pos)
            .collect()
    };
    sub_reward(point_set_error(&rel(sim), &rel(reference)), w.lambda_rel)
}

/// The unified imitation reward for one transition.
///
/// `sim_dof_acc` is the backward difference of simulated DOF velocities at
/// the policy rate.
pub fn imitation_reward(
    sim: &HoiFrame,
    sim_dof_acc: &DofVector,
    reference: &HoiFrame,
    w: &RewardWeights,
) -> RewardBreakdown {
    let (r_b, [r_p, r_r, r_pv, r_rv]) = body_reward(sim, reference, w);
    let (r_o, [r_op, r_or, r_opv, r_orv]) = object_reward(sim, reference, w);
    let r_rel = relative_reward(sim, reference, w);
    let r_reg = reg_reward(sim_dof_acc, &reference.robot.dof_vel, w.lambda_reg);
    let r_cg = cg_reward(&sim.cg.as_array(), &reference.cg.as_array(), &w.lambda_cg);

    let total = match w.variant {
        RewardVariant::Full => r_b * r_o * r_rel * r_reg * r_cg,
        RewardVariant::NoMultiplication => r_b + r_o + r_rel + r_reg + r_cg,
        RewardVariant::NoCgr => r_b * r_o * r_rel * r_reg,
        RewardVariant::DmStyle => r_p + r_r + r_rv + r_o,
    };
    RewardBreakdown {
        r_p,
        r_r,
        r_pv,
        r_rv,
        r_op,
        r_or,
        r_opv,
        r_orv,
        r_b,
        r_o,
        r_rel,
        r_reg,
        r_cg,
        total,
    }
}

/// Velocity of the hand key point; exposed for reward oracles in tests.
pub fn hand_velocity(frame: &HoiFrame) -> crate::Vec2 {
    let kp = frame.robot.key_points();
    point_velocity(&frame.robot.dof_pos, &frame.robot.dof_vel, kp.hand, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{BallState, ContactEdges, RobotState};
    use crate::Vec2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(dof: DofVector, ball_pos: Vec2) -> HoiFrame {
        HoiFrame {
            robot: RobotState::at_rest(dof),
            ball: BallState::at_rest(ball_pos),
            cg: ContactEdges::none(),
        }
    }

    fn random_frame(rng: &mut ChaCha8Rng) -> HoiFrame {
        HoiFrame {
            robot: RobotState::new(
                [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                ],
                [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                ],
            ),
            ball: BallState {
                pos: Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0)),
                rot: rng.gen_range(-3.0..3.0),
                vel: Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                ang_vel: rng.gen_range(-10.0..10.0),
            },
            cg: ContactEdges::from_array([rng.gen_range(0..2), rng.gen_range(0..2), 0]),
        }
    }

    #[test]
    fn sub_reward_values() {
        assert_eq!(sub_reward(0.0, 20.0), 1.0);
        assert!((sub_reward(0.01, 20.0) - (-0.2_f64).exp()).abs() < 1e-15);
        assert!((sub_reward(0.01_f64, 20.0) - 0.8187307530779818).abs() < 1e-12);
        assert_eq!(sub_reward(123.456, 0.0), 1.0);
    }

    #[test]
    fn sub_reward_generic_f32() {
        let r: f32 = sub_reward(0.5, 2.0);
        assert!((r - (-1.0_f32).exp()).abs() < 1e-6);
    }

    #[test]
    fn cg_reward_values() {
        let l = [5.0_f64, 5.0, 5.0];
        assert_eq!(cg_reward(&[1, 0, 1], &[1, 0, 1], &l), 1.0);
        let one = cg_reward(&[1, 0, 0], &[0, 0, 0], &l);
        assert!((one - 0.006737946999085467).abs() < 1e-12);
        let two = cg_reward(&[1, 1, 0], &[0, 0, 0], &l);
        assert!((two - 4.5399929762484854e-5).abs() < 1e-16);
    }

    #[test]
    fn reg_reward_values() {
        // Zero acceleration: 1.
        assert_eq!(reg_reward(&[0.0_f64; 4], &[1.0; 4], 1e-12), 1.0);
        // acc 1 against a stationary reference: e_acc = 1e12, r = exp(-1).
        let r = reg_reward(&[1.0_f64], &[0.0], 1e-12);
        assert!((r - (-1.0_f64).exp()).abs() < 1e-9);
        // Large reference velocity dominates the denominator.
        let r = reg_reward(&[3.0_f64], &[2.0], 1e-12);
        assert!((r - 1.0).abs() < 1e-11);
    }

    #[test]
    fn body_reward_perfect_and_offset() {
        let w = RewardWeights::default();
        let a = frame([0.1, 0.4, -0.2, 0.3], Vec2::new(1.0, 0.5));
        assert_eq!(body_reward(&a, &a, &w).0, 1.0);

        // Shift base by d: all three key points move by d in x, so the flat
        // component MSE is 3 d^2 / 6 and r_r sees d^2/4 on the base DOF.
        let mut b = a;
        let d = 0.1;
        b.robot.dof_pos[0] += d;
        let (_, [r_p, r_r, r_pv, r_rv]) = body_reward(&b, &a, &w);
        assert!((r_p - (-w.lambda_p * d * d / 2.0).exp()).abs() < 1e-12);
        assert!((r_r - (-w.lambda_r * d * d / 4.0).exp()).abs() < 1e-12);
        assert_eq!(r_pv, 1.0);
        assert_eq!(r_rv, 1.0);
    }

    #[test]
    fn object_reward_position_only_under_default_weights() {
        let w = RewardWeights::default();
        let a = frame([0.0; 4], Vec2::new(1.0, 0.5));
        let mut b = a;
        b.ball.pos.x += (0.1_f64).sqrt(); // component MSE = 0.1/2 = 0.05
        b.ball.rot = 2.0;
        b.ball.vel = Vec2::new(3.0, -1.0);
        b.ball.ang_vel = 7.0;
        let (r_o, [r_op, r_or, r_opv, r_orv]) = object_reward(&b, &a, &w);
        assert!((r_op - (-1.0_f64).exp()).abs() < 1e-12);
        assert_eq!((r_or, r_opv, r_orv), (1.0, 1.0, 1.0));
        assert!((r_o - (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn relative_reward_translation_cancels() {
        let w = RewardWeights::default();
        let a = frame([0.2, 0.5, 0.1, -0.3], Vec2::new(1.2, 0.8));
        let mut b = a;
        b.robot.dof_pos[0] += 0.1;
        b.ball.pos.x += 0.1;
        assert!((relative_reward(&b, &a, &w) - 1.0).abs() < 1e-12);
        assert_eq!(relative_reward(&a, &a, &w), 1.0);
    }

    #[test]
    fn task_reward_values() {
        assert_eq!(throwing_reward(2.5_f64, 2.5), 1.0);
        assert!((throwing_reward(1.5_f64, 2.5) - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((throwing_reward(3.5_f64, 2.5) - (-1.0_f64).exp()).abs() < 1e-15);

        let t = Vec2::new(1.0, 0.0);
        assert_eq!(heading_reward(t, t), 1.0);
        assert!((heading_reward(Vec2::new(2.0, 0.0), t) - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((heading_reward(Vec2::new(3.0, 0.0), t) - (-4.0_f64).exp()).abs() < 1e-15);

        assert_eq!(speed_gate(Vec2::new(0.6_f64.sqrt(), 0.0)), 1.0);
        assert_eq!(speed_gate(Vec2::zero()), 0.1);
        assert_eq!(speed_gate(Vec2::new(0.5_f64, 0.5)), 0.1); // norm_sq exactly 0.5

        // At the target squared radius with a fast ball: 1.
        let c = Vec2::zero();
        let fast = Vec2::new(1.0, 0.0);
        let at = Vec2::new(1.5_f64.sqrt(), 0.0);
        assert!((circling_reward(at, fast, c, 1.5_f64, false) - 1.0).abs() < 1e-12);
        let off = Vec2::new(2.5_f64.sqrt(), 0.0);
        assert!((circling_reward(off, fast, c, 1.5_f64, false) - (-1.0_f64).exp()).abs() < 1e-12);
        assert!((circling_reward(at, Vec2::zero(), c, 1.5_f64, false) - 0.1).abs() < 1e-12);

        // Scoring composition.
        let basket = Vec2::new(2.0, 2.5);
        let r = scoring_reward(basket, fast, basket, true);
        assert!((r - 2.2).abs() < 1e-12);
        let r = scoring_reward(basket, fast, basket, false);
        assert!((r - 1.2).abs() < 1e-12);
        let far = Vec2::new(30.0, 0.0);
        let r = scoring_reward(far, Vec2::zero(), basket, false);
        assert!((r - 0.1 * (heading_reward(far, basket) + 0.2 * throwing_reward(0.0, 2.5))).abs() < 1e-15);
    }

    #[test]
    fn imitation_variants() {
        let w = RewardWeights::default();
        let a = frame([0.1, 0.2, 0.3, 0.4], Vec2::new(0.8, 0.6));
        let b = imitation_reward(&a, &[0.0; 4], &a, &w);
        assert_eq!(b.total, 1.0);
        assert!(b.r_b == 1.0 && b.r_o == 1.0 && b.r_rel == 1.0 && b.r_reg == 1.0 && b.r_cg == 1.0);

        let w = RewardWeights::for_variant(RewardVariant::NoMultiplication);
        let b = imitation_reward(&a, &[0.0; 4], &a, &w);
        assert_eq!(b.total, 5.0);

        let w = RewardWeights::for_variant(RewardVariant::DmStyle);
        assert_eq!(w.lambda_r, 2.0);
        assert_eq!(w.lambda_rv, 0.1);
        let b = imitation_reward(&a, &[0.0; 4], &a, &w);
        assert_eq!(b.total, 4.0);

        // A wrong contact edge suppresses the full product but not NoCgr.
        let mut sim = a;
        sim.cg = ContactEdges::from_array([1, 0, 0]);
        let full = imitation_reward(&sim, &[0.0; 4], &a, &RewardWeights::default());
        assert!((full.total - (-5.0_f64).exp()).abs() < 1e-12);
        let nocgr = imitation_reward(
            &sim,
            &[0.0; 4],
            &a,
            &RewardWeights::for_variant(RewardVariant::NoCgr),
        );
        assert_eq!(nocgr.total, 1.0);
    }

    /// Straightforward scalar-by-scalar reimplementation of the full reward.
    fn oracle_full(sim: &HoiFrame, acc: &DofVector, reference: &HoiFrame, w: &RewardWeights) -> Scalar {
        let exp = |lambda: f64, err: f64| (-lambda * err).exp();
        let kp_s = sim.robot.key_points().as_array();
        let kp_r = reference.robot.key_points().as_array();
        let mut e_p = 0.0;
        for i in 0..3 {
            e_p += (kp_s[i].x - kp_r[i].x).powi(2) + (kp_s[i].y - kp_r[i].y).powi(2);
        }
        e_p /= 6.0;
        let mut e_r = 0.0;
        for i in 0..4 {
            e_r += shortest_arc(sim.robot.dof_pos[i] - reference.robot.dof_pos[i]).powi(2);
        }
        e_r /= 4.0;
        let kv_s = sim.robot.key_point_velocities();
        let kv_r = reference.robot.key_point_velocities();
        let mut e_pv = 0.0;
        for i in 0..3 {
            e_pv += (kv_s[i].x - kv_r[i].x).powi(2) + (kv_s[i].y - kv_r[i].y).powi(2);
        }
        e_pv /= 6.0;
        let mut e_rv = 0.0;
        for i in 0..4 {
            e_rv += (sim.robot.dof_vel[i] - reference.robot.dof_vel[i]).powi(2);
        }
        e_rv /= 4.0;
        let r_b = exp(w.lambda_p, e_p) * exp(w.lambda_r, e_r) * exp(w.lambda_pv, e_pv) * exp(w.lambda_rv, e_rv);

        let e_op = ((sim.ball.pos.x - reference.ball.pos.x).powi(2)
            + (sim.ball.pos.y - reference.ball.pos.y).powi(2))
            / 2.0;
        let e_or = shortest_arc(sim.ball.rot - reference.ball.rot).powi(2);
        let e_opv = ((sim.ball.vel.x - reference.ball.vel.x).powi(2)
            + (sim.ball.vel.y - reference.ball.vel.y).powi(2))
            / 2.0;
        let e_orv = (sim.ball.ang_vel - reference.ball.ang_vel).powi(2);
        let r_o = exp(w.lambda_op, e_op) * exp(w.lambda_or, e_or) * exp(w.lambda_opv, e_opv) * exp(w.lambda_orv, e_orv);

        let mut e_rel = 0.0;
        for i in 0..3 {
            let rs = kp_s[i] - sim.ball.pos;
            let rr = kp_r[i] - reference.ball.pos;
            e_rel += (rs.x - rr.x).powi(2) + (rs.y - rr.y).powi(2);
        }
        e_rel /= 6.0;
        let r_rel = exp(w.lambda_rel, e_rel);

        let mut e_acc = 0.0;
        for i in 0..4 {
            e_acc += acc[i].powi(2) / (reference.robot.dof_vel[i].powi(2) + w.lambda_reg);
        }
        e_acc /= 4.0;
        let r_reg = exp(w.lambda_reg, e_acc);

        let es = sim.cg.as_array();
        let er = reference.cg.as_array();
        let mut cg_exp = 0.0;
        for i in 0..3 {
            cg_exp += w.lambda_cg[i] * ((es[i] as i32 - er[i] as i32).abs() as f64);
        }
        let r_cg = (-cg_exp).exp();

        r_b * r_o * r_rel * r_reg * r_cg
    }

    #[test]
    fn matches_definitional_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        // Exercise nonzero velocity weights too.
        let mut w = RewardWeights::default();
        w.lambda_pv = 1.5;
        w.lambda_rv = 0.7;
        w.lambda_or = 2.0;
        w.lambda_opv = 0.3;
        w.lambda_orv = 0.1;
        for _ in 0..300 {
            let sim = random_frame(&mut rng);
            let reference = random_frame(&mut rng);
            let acc = [
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
            ];
            let got = imitation_reward(&sim, &acc, &reference, &w);
            let want = oracle_full(&sim, &acc, &reference, &w);
            assert!(
                (got.total - want).abs() <= 1e-12 * want.max(1e-300),
                "{} vs {}",
                got.total,
                want
            );
            // Structural invariants.
            for f in [got.r_b, got.r_o, got.r_rel, got.r_reg, got.r_cg] {
                assert!(f > 0.0 && f <= 1.0);
            }
            let min_factor = got
                .r_b
                .min(got.r_o)
                .min(got.r_rel)
                .min(got.r_reg)
                .min(got.r_cg);
            assert!(got.total <= min_factor + 1e-15);
        }
    }
}
