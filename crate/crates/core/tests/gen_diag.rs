//! Scratch diagnostics for generator tuning (run with --nocapture).

use mimiclab_core::clips::gen::{ik_hand, GenParams};
use mimiclab_core::playground::{self, extract_cg, hand_ball_gap, PhysicsParams};
use mimiclab_core::state::BallState;
use mimiclab_core::Vec2;

#[test]
#[ignore]
fn trace_hold() {
    let params = PhysicsParams::default();
    let ball = Vec2::new(0.0, 1.0 + params.base_radius + params.ball_radius);
    let (s, e, w) = ik_hand(
        0.0,
        ball + Vec2::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
            * (params.hand_radius + params.ball_radius),
        0.75 * std::f64::consts::PI,
        1.0,
    );
    let mut sim = playground::initial_state([0.0, s, e, w], ball.x, &params);
    sim.ball = BallState::at_rest(ball);
    println!("initial pose s={s:.3} e={e:.3} w={w:.3} hand gap {:.4}", hand_ball_gap(&sim, &params));

    let press = 0.03;
    for k in 0..360 {
        let reach = params.hand_radius + params.ball_radius - press;
        let dir = Vec2::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
        let (s, e, w) = ik_hand(sim.robot.base_x(), sim.ball.pos + dir * reach, 0.75 * std::f64::consts::PI, 1.0);
        let target = [0.0, s, e, w];
        sim = playground::step(&sim, &target, &params).unwrap();
        if k % 30 == 0 {
            let cg = extract_cg(&sim.contacts, &params);
            println!(
                "t={:.2} ball=({:+.3},{:.3}) v=({:+.2},{:+.2}) gap={:+.4} cg={:?} nforce={:.1}/{:.1}",
                sim.time, sim.ball.pos.x, sim.ball.pos.y, sim.ball.vel.x, sim.ball.vel.y,
                hand_ball_gap(&sim, &params),
                cg.as_array(),
                sim.net_force.hand.norm(),
                sim.net_force.body.norm(),
            );
        }
    }
}

#[test]
#[ignore]
fn trace_dribble() {
    let params = PhysicsParams::default();
    let ball = Vec2::new(0.0, 0.95);
    let (s, e, w) = ik_hand(
        0.0,
        Vec2::new(0.0, ball.y + params.ball_radius + params.hand_radius + 0.02),
        -std::f64::consts::FRAC_PI_2,
        1.0,
    );
    let mut sim = playground::initial_state([0.0, s, e, w], ball.x, &params);
    sim.ball = BallState::at_rest(ball);
    let kp = sim.robot.key_points();
    println!("hand starts at ({:.3},{:.3})", kp.hand.x, kp.hand.y);

    let press = 0.06;
    let release_y = 0.55;
    let ready_y = 1.05;
    let mut target = sim.robot.dof_pos;
    for k in 0..720 {
        if k % 2 == 0 {
            let b = &sim.ball;
            let ball_top = b.pos.y + params.ball_radius;
            let hand_y = if b.vel.y > 0.0 || b.pos.y > release_y + params.ball_radius {
                (ball_top + params.hand_radius - press).min(ready_y + 0.35)
            } else {
                ready_y
            };
            let (s, e, w) = ik_hand(
                sim.robot.base_x(),
                Vec2::new(b.pos.x, hand_y.max(0.42)),
                -std::f64::consts::FRAC_PI_2,
                1.0,
            );
            target = [b.pos.x, s, e, w];
        }
        sim = playground::step(&sim, &target, &params).unwrap();
        if k % 12 == 0 {
            let kp = sim.robot.key_points();
            let cg = extract_cg(&sim.contacts, &params);
            println!(
                "t={:.2} ball=({:+.3},{:.3}) vy={:+.2} hand=({:+.3},{:.3}) gap={:+.3} cg={:?}",
                sim.time, sim.ball.pos.x, sim.ball.pos.y, sim.ball.vel.y,
                kp.hand.x, kp.hand.y, hand_ball_gap(&sim, &params), cg.as_array(),
            );
        }
    }
    let _ = GenParams::default();
}
