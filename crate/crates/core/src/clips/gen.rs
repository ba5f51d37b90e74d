//! Scripted feedback controllers that generate reference clips in the
//! playground: dribble, toss, hold, and carry (either direction).
//!
//! Generators run the real simulator, record one frame per substep, and
//! return the action sequence alongside the clip so recorder honesty can be
//! verified by replay.
//!
//! The ball is heavy relative to the joint torque limits, which shapes the
//! scripts: holds park the ball on top of the base circle with the hand
//! bracing it; the toss slings the ball from a cradle formed by the upper
//! arm and an uphill forearm; and every static pose feeds gravity sag back
//! into its PD targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::playground::{self, extract_cg, PhysicsParams, SimState};
use crate::state::{chain_frames, BallState, DofVector, HoiFrame, SkillLabel, BASE_HEIGHT, LINK_LENGTHS};
use crate::{Scalar, Vec2};

use super::{validate_clip, Clip};

const FRAC_PI_2: Scalar = std::f64::consts::FRAC_PI_2;
const PI: Scalar = std::f64::consts::PI;

/// Skill names accepted by the generator.
pub const SKILL_NAMES: [&str; 5] = ["dribble", "toss", "hold", "carry", "carry_left"];

#[derive(Debug, Error)]
pub enum GenError {
    #[error("unknown skill name {0:?}; valid: dribble, toss, hold, carry, carry_left")]
    UnknownSkill(String),
    #[error("scripted {skill} controller lost the ball at t = {time:.2} s")]
    LostBall { skill: String, time: Scalar },
    #[error("scripted {skill} run produced no usable cycle window")]
    NoCycle { skill: String },
    #[error("scripted toss reached apex {apex:.2} m, below the target")]
    TossTooLow { apex: Scalar },
    #[error("generated {skill} clip fails validation: {first}")]
    InvalidClip { skill: String, first: String },
    #[error(transparent)]
    Sim(#[from] playground::SimError),
}

/// Generation knobs; the defaults produce the standard dataset.
#[derive(Clone, Debug)]
pub struct GenParams {
    /// Carry cruise speed, m/s (sign fixed by the skill variant).
    pub carry_speed: Scalar,
    /// Required ball apex for a toss clip, m.
    pub toss_apex: Scalar,
    /// Hold/carry clip duration, s.
    pub steady_duration: Scalar,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            carry_speed: 0.12,
            toss_apex: 2.5,
            steady_duration: 1.0,
        }
    }
}

/// A generated clip plus the per-substep PD targets that produced it.
#[derive(Clone, Debug)]
pub struct GeneratedClip {
    pub clip: Clip,
    /// `actions[k]` advanced `frames[k]` to `frames[k+1]`.
    pub actions: Vec<DofVector>,
}

/// Two-link inverse kinematics to a wrist target, with a chosen elbow side.
/// Returns `(shoulder, elbow)` joint angles, reach-clamped.
pub fn ik_wrist(base_x: Scalar, wrist_target: Vec2, elbow_sign: Scalar) -> (Scalar, Scalar) {
    let l1 = LINK_LENGTHS[0];
    let l2 = LINK_LENGTHS[1];
    let d = wrist_target - Vec2::new(base_x, BASE_HEIGHT);
    let r = d.norm().clamp((l1 - l2).abs() + 1e-6, l1 + l2 - 1e-6);
    let cos_elbow = ((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let elbow = elbow_sign.signum() * cos_elbow.acos();
    let shoulder = d.y.atan2(d.x) - (l2 * elbow.sin()).atan2(l1 + l2 * elbow.cos());
    (shoulder, elbow)
}

/// Full-arm IK: hand center target plus the world angle of the hand link.
pub fn ik_hand(
    base_x: Scalar,
    hand_target: Vec2,
    hand_world_angle: Scalar,
    elbow_sign: Scalar,
) -> (Scalar, Scalar, Scalar) {
    let wrist_target =
        hand_target - Vec2::new(hand_world_angle.cos(), hand_world_angle.sin()) * LINK_LENGTHS[2];
    let (shoulder, elbow) = ik_wrist(base_x, wrist_target, elbow_sign);
    let wrist = hand_world_angle - shoulder - elbow;
    (shoulder, elbow, wrist)
}

/// Per-skill scripted controller, consulted at the policy cadence (60 Hz).
trait Script {
    fn control(&mut self, sim: &SimState, params: &PhysicsParams) -> DofVector;
    /// True once the script considers the recording complete.
    fn finished(&self, sim: &SimState, substep: usize) -> bool {
        let _ = (sim, substep);
        false
    }
}

struct Rollout {
    frames: Vec<HoiFrame>,
    actions: Vec<DofVector>,
}

fn record_rollout(
    mut sim: SimState,
    script: &mut dyn Script,
    params: &PhysicsParams,
    max_substeps: usize,
    skill: &str,
) -> Result<Rollout, GenError> {
    let mut frames = Vec::with_capacity(max_substeps + 1);
    let mut actions = Vec::with_capacity(max_substeps);
    frames.push(snapshot(&sim, params));
    let mut target = sim.robot.dof_pos;
    for k in 0..max_substeps {
        if k % 2 == 0 {
            target = script.control(&sim, params);
        }
        sim = playground::step(&sim, &target, params)?;
        actions.push(target);
        frames.push(snapshot(&sim, params));
        if (sim.ball.pos.x - sim.robot.base_x()).abs() > 2.8 || sim.ball.vel.norm() > 25.0 {
            return Err(GenError::LostBall {
                skill: skill.into(),
                time: sim.time,
            });
        }
        if script.finished(&sim, k) {
            break;
        }
    }
    Ok(Rollout { frames, actions })
}

fn snapshot(sim: &SimState, params: &PhysicsParams) -> HoiFrame {
    HoiFrame {
        robot: sim.robot,
        ball: sim.ball,
        cg: extract_cg(&sim.contacts, params),
    }
}

/// Distance between two frames up to a rigid x-translation, used to find
/// seamless cycle windows.
fn cycle_distance(a: &HoiFrame, b: &HoiFrame) -> Scalar {
    let mut d = 0.0;
    for k in 1..4 {
        d += (a.robot.dof_pos[k] - b.robot.dof_pos[k]).powi(2);
    }
    for k in 0..4 {
        d += 0.1 * (a.robot.dof_vel[k] - b.robot.dof_vel[k]).powi(2);
    }
    let rel_a = a.ball.pos - Vec2::new(a.robot.dof_pos[0], 0.0);
    let rel_b = b.ball.pos - Vec2::new(b.robot.dof_pos[0], 0.0);
    d += (rel_a - rel_b).norm_sq() * 4.0;
    d += 0.1 * (a.ball.vel - b.ball.vel).norm_sq();
    let cg_mismatch = a
        .cg
        .as_array()
        .iter()
        .zip(b.cg.as_array())
        .filter(|(x, y)| **x != *y)
        .count();
    d += cg_mismatch as Scalar;
    d.sqrt()
}

/// Trim a rollout to a window starting at `search_from` whose end state best
/// matches its start state (translation-invariant), for seamless wrapping.
fn trim_to_cycle(
    rollout: &Rollout,
    search_from: usize,
    min_len: usize,
    max_len: usize,
    tol: Scalar,
    skill: &str,
) -> Result<(Vec<HoiFrame>, Vec<DofVector>), GenError> {
    let n = rollout.frames.len();
    if search_from + min_len + 1 >= n {
        return Err(GenError::NoCycle { skill: skill.into() });
    }
    let start = search_from;
    let hi = (start + max_len).min(n - 1);
    let mut best = (Scalar::INFINITY, start + min_len);
    for end in (start + min_len)..=hi {
        let d = cycle_distance(&rollout.frames[start], &rollout.frames[end]);
        if d < best.0 {
            best = (d, end);
        }
    }
    if best.0 > tol {
        return Err(GenError::NoCycle { skill: skill.into() });
    }
    let (_, end) = best;
    Ok((
        rollout.frames[start..end].to_vec(),
        rollout.actions[start..end - 1].to_vec(),
    ))
}

// ---------------------------------------------------------------------------
// Hold / carry: ball nested in the V-pocket between upper arm and forearm,
// hand folded over as a brace. The pocket confines the ball geometrically;
// rolling out would require sliding at a contact, which friction prevents.
// ---------------------------------------------------------------------------

/// Ground-pinch pose for hold and carry: the ball rests on the ground and
/// the palm presses straight down on it. The ground backs the press, so the
/// contact force is constant and the hand-ball edge cannot flicker; carrying
/// rolls the pinched ball along under the moving press.
fn pinch_geometry(params: &PhysicsParams) -> (DofVector, Vec2) {
    let ball = Vec2::new(0.0, params.ball_radius);
    let hand = ball + Vec2::new(0.0, params.hand_radius + params.ball_radius);
    let (th1, th2, th3) = ik_hand(0.0, hand, -FRAC_PI_2, 1.0);
    ([0.0, th1, th2, th3], ball)
}

struct HoldScript {
    base_target: Box<dyn Fn(Scalar) -> Scalar + Send>,
    /// Press the palm target this far into the resting ball.
    inset: Scalar,
}

impl Script for HoldScript {
    fn control(&mut self, sim: &SimState, params: &PhysicsParams) -> DofVector {
        let dt = params.dt_sim;
        let cmd = (self.base_target)(sim.time);
        let cmd_vel = ((self.base_target)(sim.time + dt) - cmd) / dt;
        // The palm rides the ball; tilting the press toward the station
        // error turns its normal force into gentle traction. The ground
        // backs the press, so the contact cannot chatter.
        let ball = &sim.ball;
        // A press inside the friction cone sticks and jams the ball against
        // the ground; tilting past the cone makes the top contact slip and
        // the normal force drives the ball. The tilt tracks the speed and
        // station errors, so the press brakes as well as it drives.
        let err = 3.0 * (cmd_vel - ball.vel.x) + 0.8 * (cmd - ball.pos.x);
        let azimuth = -err.clamp(-1.0, 1.0) * 0.72;
        let reach = params.hand_radius + params.ball_radius - self.inset;
        let hand_target =
            Vec2::new(ball.pos.x, params.ball_radius) + Vec2::new(azimuth.sin(), azimuth.cos()) * reach;
        let (s, e, w) = ik_hand(sim.robot.base_x(), hand_target, -FRAC_PI_2, 1.0);
        // Never let the commanded station outrun the ball beyond arm reach.
        let base = ball.pos.x + (cmd - ball.pos.x).clamp(-0.2, 0.2);
        [base, s, e, w]
    }
}

/// Cradle carry: the arm pocket holds the ball while the base translates.
struct CarryScript {
    pose: DofVector,
    trim: [Scalar; 4],
    base_target: Box<dyn Fn(Scalar) -> Scalar + Send>,
}

impl CarryScript {
    fn new(params: &PhysicsParams, base_target: Box<dyn Fn(Scalar) -> Scalar + Send>) -> Self {
        let (pose, _, trim) = cradle_geometry(params);
        Self {
            pose,
            trim,
            base_target,
        }
    }
}

impl Script for CarryScript {
    fn control(&mut self, sim: &SimState, _params: &PhysicsParams) -> DofVector {
        [
            (self.base_target)(sim.time),
            self.pose[1] + self.trim[1],
            self.pose[2] + self.trim[2],
            self.pose[3] + self.trim[3],
        ]
    }
}

fn hold_initial_state(params: &PhysicsParams, jitter: Scalar) -> SimState {
    let (pose, ball) = pinch_geometry(params);
    let mut sim = playground::initial_state(pose, ball.x, params);
    sim.ball = BallState::at_rest(ball + Vec2::new(jitter * 0.5, 0.0));
    sim
}

/// V-pocket cradle for the toss: upper arm down-right at -45 degrees,
/// forearm up-right at +45, ball nested between them, hand extending the
/// forearm ramp. Returns the pose, ball center, and static gravity trim.
fn cradle_geometry(params: &PhysicsParams) -> (DofVector, Vec2, [Scalar; 4]) {
    let th1 = -std::f64::consts::FRAC_PI_4;
    let th2 = FRAC_PI_2;
    let pose = [0.0, th1, th2, 0.0];
    let f = chain_frames(&pose);
    let elbow = f.joints[1];
    let half = std::f64::consts::FRAC_PI_4;
    let nest = (params.link_radius + params.ball_radius) / half.sin();
    let ball = elbow + Vec2::new(0.0, nest);

    // Static feed-forward: the total contact load about the shoulder equals
    // the ball weight at its lateral offset; the forearm contact carries a
    // 45-degree share about the elbow.
    let weight = params.ball_mass() * params.gravity;
    let mut trim = [0.0; 4];
    trim[1] = weight * ball.x / params.pd_kp[1];
    trim[2] = (params.link_radius + params.ball_radius) * half.cos() * weight / params.pd_kp[2];
    (pose, ball, trim)
}

// ---------------------------------------------------------------------------
// Dribble: lateral bounce station, the hand meets the rising ball and rides
// it down.
// ---------------------------------------------------------------------------

struct DribbleScript {
    /// Ball station offset from the base, m.
    station: Scalar,
    press: Scalar,
    ready_y: Scalar,
    floor_y: Scalar,
}

impl DribbleScript {
    fn standard() -> Self {
        Self {
            station: 0.35,
            press: 0.05,
            ready_y: 0.80,
            floor_y: 0.40,
        }
    }
}

impl Script for DribbleScript {
    fn control(&mut self, sim: &SimState, params: &PhysicsParams) -> DofVector {
        let ball = &sim.ball;
        let bx = ball.pos.x - self.station;
        let contact_h = ball.pos.y + params.ball_radius + params.hand_radius;
        // Press the falling ball to pump energy in; shadow just above the
        // rising ball so the catch near the apex stays soft.
        let hand_y = if ball.vel.y < 0.0 {
            (contact_h - self.press).clamp(self.floor_y, self.ready_y)
        } else {
            (contact_h + 0.004).clamp(self.floor_y, self.ready_y)
        };
        let (s, e, w) = ik_hand(
            sim.robot.base_x(),
            Vec2::new(ball.pos.x, hand_y),
            -FRAC_PI_2,
            1.0,
        );
        [bx, s, e, w]
    }
}

fn dribble_initial_state(params: &PhysicsParams, jitter: Scalar) -> SimState {
    let station = 0.35;
    let ball = Vec2::new(station, 0.55 + jitter);
    let (s, e, w) = ik_hand(
        0.0,
        Vec2::new(station, 0.80),
        -FRAC_PI_2,
        1.0,
    );
    let mut sim = playground::initial_state([0.0, s, e, w], ball.x, params);
    sim.ball = BallState::at_rest(ball);
    sim
}

// ---------------------------------------------------------------------------
// Toss: sling from the cradle. A saturated shoulder sweep whips the pocket
// up and the ball releases over the forearm ramp near the top of the arc.
// ---------------------------------------------------------------------------

struct TossScript {
    pose: DofVector,
    trim: [Scalar; 4],
    settle_until: Scalar,
    swing_target: Scalar,
    apex_target: Scalar,
    released: bool,
}

impl TossScript {
    fn new(params: &PhysicsParams, apex_target: Scalar) -> Self {
        let (pose, _, trim) = cradle_geometry(params);
        Self {
            pose,
            trim,
            settle_until: 0.5,
            swing_target: 2.4,
            apex_target,
            released: false,
        }
    }
}

impl Script for TossScript {
    fn control(&mut self, sim: &SimState, _params: &PhysicsParams) -> DofVector {
        let bx = sim.robot.base_x();
        if sim.time < self.settle_until {
            [
                bx,
                self.pose[1] + self.trim[1],
                self.pose[2] + self.trim[2],
                self.pose[3],
            ]
        } else {
            if !self.released && sim.ball.vel.y > 1.5 && sim.ball.pos.y > 1.3 {
                self.released = true;
            }
            // Chase the flying ball with the base so it stays in frame.
            let chase = if self.released { sim.ball.pos.x } else { bx };
            [chase, self.swing_target, self.pose[2] + self.trim[2], self.pose[3]]
        }
    }

    fn finished(&self, sim: &SimState, _substep: usize) -> bool {
        // Stop just past the apex, well before the ball lands.
        self.released && sim.ball.vel.y < 0.0 && sim.ball.pos.y > self.apex_target.max(1.2)
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Generate one validated reference clip for a named skill.
///
/// The seed perturbs initial conditions slightly so retries explore
/// different transients; the controllers themselves are deterministic.
pub fn generate_skill_clip(
    skill_name: &str,
    gen: &GenParams,
    params: &PhysicsParams,
    skill_label: SkillLabel,
    seed: u64,
) -> Result<GeneratedClip, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5D3C_A11B);
    let jitter: Scalar = rng.gen_range(-0.008..0.008);
    let fps = 1.0 / params.dt_sim;

    let (frames, actions, cyclic) = match skill_name {
        "hold" => {
            let sim = hold_initial_state(params, jitter);
            let mut script = HoldScript {
                base_target: Box::new(|_| 0.0),
                inset: 0.012,
            };
            let settle = 90;
            let len = (gen.steady_duration * fps) as usize;
            let total = settle + len + 60;
            let rollout = record_rollout(sim, &mut script, params, total, "hold")?;
            trim_to_cycle(&rollout, settle, len, len + 30, 0.25, "hold")
                .map(|(f, a)| (f, a, true))?
        }
        "carry" | "carry_left" => {
            let speed = if skill_name == "carry_left" {
                -gen.carry_speed
            } else {
                gen.carry_speed
            };
            // The ball rides the arm cradle while the base translates.
            let sim = {
                let (pose, ball, _) = cradle_geometry(params);
                let mut sim = playground::initial_state(pose, ball.x, params);
                sim.ball = BallState::at_rest(ball + Vec2::new(0.0, jitter.abs()));
                sim
            };
            let ramp = 1.2;
            let mut script = CarryScript::new(
                params,
                Box::new(move |t| {
                    if t < ramp {
                        0.5 * speed / ramp * t * t
                    } else {
                        0.5 * speed * ramp + speed * (t - ramp)
                    }
                }),
            );
            let settle = (1.8 * fps) as usize;
            let len = (gen.steady_duration * fps) as usize;
            let total = settle + len + 60;
            let rollout = record_rollout(sim, &mut script, params, total, skill_name)?;
            trim_to_cycle(&rollout, settle, len, len + 30, 0.3, skill_name)
                .map(|(f, a)| (f, a, true))?
        }
        "dribble" => {
            let sim = dribble_initial_state(params, jitter);
            let mut script = DribbleScript::standard();
            let total = (6.0 * fps) as usize;
            let rollout = record_rollout(sim, &mut script, params, total, "dribble")?;
            // Skip the transient, then cut one bounce period.
            let settle = (3.0 * fps) as usize;
            trim_to_cycle(&rollout, settle, 30, (2.0 * fps) as usize, 0.4, "dribble")
                .map(|(f, a)| (f, a, true))?
        }
        "toss" => {
            let sim = {
                let (pose, ball, _) = cradle_geometry(params);
                let mut sim = playground::initial_state(pose, ball.x, params);
                sim.ball = BallState::at_rest(ball + Vec2::new(0.0, jitter.abs()));
                sim
            };
            let mut script = TossScript::new(params, gen.toss_apex);
            let total = (4.0 * fps) as usize;
            let rollout = record_rollout(sim, &mut script, params, total, "toss")?;
            let apex = rollout
                .frames
                .iter()
                .map(|f| f.ball.pos.y)
                .fold(0.0, Scalar::max);
            if apex <= gen.toss_apex {
                return Err(GenError::TossTooLow { apex });
            }
            (rollout.frames, rollout.actions, false)
        }
        other => return Err(GenError::UnknownSkill(other.to_string())),
    };

    let clip = Clip {
        fps,
        skill: skill_label,
        cyclic,
        frames,
    };
    let violations = validate_clip(&clip, params);
    if let Some(first) = violations.first() {
        return Err(GenError::InvalidClip {
            skill: skill_name.into(),
            first: format!("frame {:?}: {}", first.frame, first.message),
        });
    }
    Ok(GeneratedClip { clip, actions })
}

/// Generate with retries over derived seeds, as scripted transients
/// occasionally miss their cycle window.
pub fn generate_with_retries(
    skill_name: &str,
    gen: &GenParams,
    params: &PhysicsParams,
    skill_label: SkillLabel,
    seed: u64,
    attempts: usize,
) -> Result<GeneratedClip, GenError> {
    let mut last = None;
    for k in 0..attempts.max(1) {
        match generate_skill_clip(
            skill_name,
            gen,
            params,
            skill_label.clone(),
            seed.wrapping_add(k as u64),
        ) {
            Ok(out) => return Ok(out),
            Err(GenError::UnknownSkill(s)) => return Err(GenError::UnknownSkill(s)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
