//! Policy observation: a frozen flat layout shared by the trainer and all
//! policy heads.
//!
//! Layout (base-local: positions are translated by -base_x; the base does
//! not rotate, so vectors and velocities pass through unchanged):
//!
//! ```text
//! arm_dof_pos (3) | dof_vel (4) | hand_pos_local (2) | hand_vel_local (2) |
//! hand_contact_force (2) | ball_pos_local (2) | ball_rot_sincos (2) |
//! ball_vel_local (2) | ball_ang_vel (1) | skill_onehot (num_skills)
//! ```

use thiserror::Error;

use crate::playground::SimState;
use crate::state::SkillLabel;
use crate::{Scalar, Vec2};

/// Observation entries before the skill one-hot block.
pub const OBS_BASE_DIM: usize = 20;

/// Contact-force components are clipped to this magnitude, in newtons.
pub const OBS_FORCE_CLIP: Scalar = 500.0;

#[derive(Debug, Error, PartialEq)]
pub enum ObsError {
    #[error("skill id {id} out of range for {num_skills} skills")]
    SkillOutOfRange { id: usize, num_skills: usize },
    #[error("encoded observation has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
}

/// Structured view of one policy observation.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub arm_dof_pos: [Scalar; 3],
    pub dof_vel: [Scalar; 4],
    pub hand_pos_local: Vec2,
    pub hand_vel_local: Vec2,
    pub hand_contact_force: Vec2,
    pub ball_pos_local: Vec2,
    pub ball_rot_sincos: (Scalar, Scalar),
    pub ball_vel_local: Vec2,
    pub ball_ang_vel: Scalar,
    pub skill_onehot: Vec<Scalar>,
}

impl Observation {
    pub fn dim(num_skills: usize) -> usize {
        OBS_BASE_DIM + num_skills
    }

    pub fn encode(&self) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(OBS_BASE_DIM + self.skill_onehot.len());
        v.extend_from_slice(&self.arm_dof_pos);
        v.extend_from_slice(&self.dof_vel);
        v.extend_from_slice(&[self.hand_pos_local.x, self.hand_pos_local.y]);
        v.extend_from_slice(&[self.hand_vel_local.x, self.hand_vel_local.y]);
        v.extend_from_slice(&[self.hand_contact_force.x, self.hand_contact_force.y]);
        v.extend_from_slice(&[self.ball_pos_local.x, self.ball_pos_local.y]);
        v.extend_from_slice(&[self.ball_rot_sincos.0, self.ball_rot_sincos.1]);
        v.extend_from_slice(&[self.ball_vel_local.x, self.ball_vel_local.y]);
        v.push(self.ball_ang_vel);
        v.extend_from_slice(&self.skill_onehot);
        v
    }

    pub fn decode(flat: &[Scalar], num_skills: usize) -> Result<Self, ObsError> {
        let expected = Self::dim(num_skills);
        if flat.len() != expected {
            return Err(ObsError::BadLength {
                got: flat.len(),
                expected,
            });
        }
        Ok(Self {
            arm_dof_pos: [flat[0], flat[1], flat[2]],
            dof_vel: [flat[3], flat[4], flat[5], flat[6]],
            hand_pos_local: Vec2::new(flat[7], flat[8]),
            hand_vel_local: Vec2::new(flat[9], flat[10]),
            hand_contact_force: Vec2::new(flat[11], flat[12]),
            ball_pos_local: Vec2::new(flat[13], flat[14]),
            ball_rot_sincos: (flat[15], flat[16]),
            ball_vel_local: Vec2::new(flat[17], flat[18]),
            ball_ang_vel: flat[19],
            skill_onehot: flat[20..].to_vec(),
        })
    }
}

fn clip_force(f: Vec2) -> Vec2 {
    Vec2::new(
        f.x.clamp(-OBS_FORCE_CLIP, OBS_FORCE_CLIP),
        f.y.clamp(-OBS_FORCE_CLIP, OBS_FORCE_CLIP),
    )
}

/// Build the policy observation for a skill-conditioned step.
pub fn build_observation(
    sim: &SimState,
    skill: &SkillLabel,
    num_skills: usize,
) -> Result<Observation, ObsError> {
    if skill.id >= num_skills {
        return Err(ObsError::SkillOutOfRange {
            id: skill.id,
            num_skills,
        });
    }
    let mut onehot = vec![0.0; num_skills];
    onehot[skill.id] = 1.0;
    Ok(build_observation_with_onehot(sim, onehot))
}

/// Observation with a caller-supplied conditioning block (used by the
/// high-level controller, which conditions on task features instead).
pub fn build_observation_with_onehot(sim: &SimState, skill_onehot: Vec<Scalar>) -> Observation {
    let base_x = sim.robot.base_x();
    let local = |p: Vec2| Vec2::new(p.x - base_x, p.y);
    let kp = sim.robot.key_points();
    let hand_vel = sim.robot.key_point_velocities()[2];

    Observation {
        arm_dof_pos: [
            sim.robot.dof_pos[1],
            sim.robot.dof_pos[2],
            sim.robot.dof_pos[3],
        ],
        dof_vel: sim.robot.dof_vel,
        hand_pos_local: local(kp.hand),
        hand_vel_local: hand_vel,
        hand_contact_force: clip_force(sim.net_force.hand),
        ball_pos_local: local(sim.ball.pos),
        ball_rot_sincos: (sim.ball.rot.sin(), sim.ball.rot.cos()),
        ball_vel_local: sim.ball.vel,
        ball_ang_vel: sim.ball.ang_vel,
        skill_onehot,
    }
}
