//! Interaction clip format, dataset management, resampling, and
//! finite-difference velocities.

pub mod gen;

use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::playground::{contact_candidates, PhysicsParams};
use crate::state::{chain_frames, ContactEdges, HoiFrame, SkillLabel, DOF_COUNT, DOF_NAMES, NODE_NAMES};
use crate::{math, Scalar, Vec2};

pub const CLIP_FORMAT_VERSION: u32 = 1;

/// A skill-labeled sequence of interaction frames at a fixed frame rate.
#[derive(Clone, Debug, PartialEq)]
pub struct Clip {
    pub fps: Scalar,
    pub skill: SkillLabel,
    pub cyclic: bool,
    pub frames: Vec<HoiFrame>,
}

#[derive(Debug, Error)]
pub enum ClipError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed clip {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("frame {frame}: {message}")]
    BadFrame { frame: usize, message: String },
    #[error("invalid clip: {0}")]
    Invalid(String),
    #[error("unknown skill {0}")]
    UnknownSkill(String),
    #[error("skill {0} has no clips")]
    EmptySkill(usize),
}

/// On-disk representation: explicit header plus a flat frame array.
#[derive(Serialize, Deserialize)]
struct ClipFile {
    format_version: u32,
    fps: Scalar,
    skill: SkillLabel,
    cyclic: bool,
    dof_names: Vec<String>,
    node_names: Vec<String>,
    frames: Vec<FrameRecord>,
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    dof_pos: [Scalar; DOF_COUNT],
    dof_vel: [Scalar; DOF_COUNT],
    ball_pos: [Scalar; 2],
    ball_rot: Scalar,
    ball_vel: [Scalar; 2],
    ball_ang_vel: Scalar,
    cg: ContactEdges,
}

impl From<&HoiFrame> for FrameRecord {
    fn from(f: &HoiFrame) -> Self {
        Self {
            dof_pos: f.robot.dof_pos,
            dof_vel: f.robot.dof_vel,
            ball_pos: [f.ball.pos.x, f.ball.pos.y],
            ball_rot: f.ball.rot,
            ball_vel: [f.ball.vel.x, f.ball.vel.y],
            ball_ang_vel: f.ball.ang_vel,
            cg: f.cg,
        }
    }
}

impl From<&FrameRecord> for HoiFrame {
    fn from(r: &FrameRecord) -> Self {
        Self {
            robot: crate::state::RobotState::new(r.dof_pos, r.dof_vel),
            ball: crate::state::BallState {
                pos: Vec2::new(r.ball_pos[0], r.ball_pos[1]),
                rot: r.ball_rot,
                vel: Vec2::new(r.ball_vel[0], r.ball_vel[1]),
                ang_vel: r.ball_ang_vel,
            },
            cg: r.cg,
        }
    }
}

impl Clip {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dt(&self) -> Scalar {
        1.0 / self.fps
    }

    /// Horizontal displacement accumulated per cycle, extrapolated one frame
    /// past the end so a steady translating motion wraps seamlessly.
    pub fn cycle_offset_x(&self) -> Scalar {
        let first = &self.frames[0];
        let last = &self.frames[self.frames.len() - 1];
        (last.robot.dof_pos[0] + last.robot.dof_vel[0] * self.dt()) - first.robot.dof_pos[0]
    }

    /// Reference frame for an unbounded step index.
    ///
    /// Cyclic clips wrap modulo length with the per-cycle x offset applied to
    /// the base and the ball; acyclic clips return `None` once exhausted.
    pub fn reference_at(&self, index: usize) -> Option<HoiFrame> {
        let len = self.frames.len();
        if index < len {
            return Some(self.frames[index]);
        }
        if !self.cyclic {
            return None;
        }
        let cycles = (index / len) as Scalar;
        let mut f = self.frames[index % len];
        let shift = cycles * self.cycle_offset_x();
        f.robot.dof_pos[0] += shift;
        f.ball.pos.x += shift;
        Some(f)
    }
}

/// Save a clip as a structured-text document (lossless numeric round-trip).
pub fn save_clip(clip: &Clip, path: &Path) -> Result<(), ClipError> {
    let file = ClipFile {
        format_version: CLIP_FORMAT_VERSION,
        fps: clip.fps,
        skill: clip.skill.clone(),
        cyclic: clip.cyclic,
        dof_names: DOF_NAMES.iter().map(|s| s.to_string()).collect(),
        node_names: NODE_NAMES.iter().map(|s| s.to_string()).collect(),
        frames: clip.frames.iter().map(FrameRecord::from).collect(),
    };
    let text = serde_json::to_string_pretty(&file).expect("clip serialization cannot fail");
    std::fs::write(path, text).map_err(|source| ClipError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and structurally validate a clip.
pub fn load_clip(path: &Path) -> Result<Clip, ClipError> {
    let text = std::fs::read_to_string(path).map_err(|source| ClipError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ClipFile = serde_json::from_str(&text).map_err(|e| ClipError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.format_version != CLIP_FORMAT_VERSION {
        return Err(ClipError::Malformed {
            path: path.to_path_buf(),
            message: format!("unsupported format_version {}", file.format_version),
        });
    }
    if file.fps <= 0.0 || !file.fps.is_finite() {
        return Err(ClipError::Malformed {
            path: path.to_path_buf(),
            message: format!("fps must be positive, got {}", file.fps),
        });
    }
    if file.frames.len() < 2 {
        return Err(ClipError::Malformed {
            path: path.to_path_buf(),
            message: format!(
                "frame list truncated at frame {}: need at least 2 frames",
                file.frames.len()
            ),
        });
    }
    let clip = Clip {
        fps: file.fps,
        skill: file.skill,
        cyclic: file.cyclic,
        frames: file.frames.iter().map(HoiFrame::from).collect(),
    };
    for (i, f) in clip.frames.iter().enumerate() {
        if !f.is_finite() {
            return Err(ClipError::BadFrame {
                frame: i,
                message: "non-finite field".into(),
            });
        }
    }
    Ok(clip)
}

/// Recompute all velocity fields by finite differences of the stored
/// positions: central differences in the interior, one-sided at the ends.
pub fn finite_diff_velocities(clip: &Clip) -> Clip {
    let n = clip.frames.len();
    assert!(n >= 2, "finite differences need at least two frames");
    let fps = clip.fps;
    let mut out = clip.clone();
    for i in 0..n {
        let (prev, next, scale) = if i == 0 {
            (0, 1, fps)
        } else if i == n - 1 {
            (n - 2, n - 1, fps)
        } else {
            (i - 1, i + 1, fps / 2.0)
        };
        let a = &clip.frames[prev];
        let b = &clip.frames[next];
        for k in 0..DOF_COUNT {
            out.frames[i].robot.dof_vel[k] = (b.robot.dof_pos[k] - a.robot.dof_pos[k]) * scale;
        }
        out.frames[i].ball.vel = (b.ball.pos - a.ball.pos) * scale;
        out.frames[i].ball.ang_vel = (b.ball.rot - a.ball.rot) * scale;
    }
    out
}

/// Resample a clip to a new frame rate.
///
/// Integer downsampling keeps every n-th frame untouched. Any other ratio
/// linearly interpolates positions (shortest arc for revolute angles),
/// copies the nearest frame's binary contact edges, and recomputes
/// velocities by finite differences.
pub fn resample(clip: &Clip, target_fps: Scalar) -> Result<Clip, ClipError> {
    if target_fps <= 0.0 || !target_fps.is_finite() {
        return Err(ClipError::Invalid(format!(
            "target fps must be positive, got {target_fps}"
        )));
    }
    if (target_fps - clip.fps).abs() < 1e-9 {
        return Ok(clip.clone());
    }

    let ratio = clip.fps / target_fps;
    let is_integer_down = ratio > 1.0 && (ratio - ratio.round()).abs() < 1e-9;
    if is_integer_down {
        let stride = ratio.round() as usize;
        let frames: Vec<HoiFrame> = clip.frames.iter().step_by(stride).copied().collect();
        if frames.len() < 2 {
            return Err(ClipError::Invalid(format!(
                "resampling to {target_fps} Hz leaves {} frame(s)",
                frames.len()
            )));
        }
        return Ok(Clip {
            fps: target_fps,
            skill: clip.skill.clone(),
            cyclic: clip.cyclic,
            frames,
        });
    }

    let duration = (clip.frames.len() - 1) as Scalar / clip.fps;
    let new_len = ((duration * target_fps).floor() as usize + 1).max(2);
    let mut frames = Vec::with_capacity(new_len);
    for i in 0..new_len {
        let t = (i as Scalar / target_fps).min(duration);
        let src = t * clip.fps;
        let i0 = (src.floor() as usize).min(clip.frames.len() - 2);
        let alpha = src - i0 as Scalar;
        let a = &clip.frames[i0];
        let b = &clip.frames[i0 + 1];

        let mut dof_pos = [0.0; DOF_COUNT];
        dof_pos[0] = a.robot.dof_pos[0] + (b.robot.dof_pos[0] - a.robot.dof_pos[0]) * alpha;
        for k in 1..DOF_COUNT {
            dof_pos[k] = math::lerp_angle(a.robot.dof_pos[k], b.robot.dof_pos[k], alpha);
        }
        let ball_pos = a.ball.pos.lerp(b.ball.pos, alpha);
        let ball_rot = math::lerp_angle(a.ball.rot, b.ball.rot, alpha);
        let cg = if alpha < 0.5 { a.cg } else { b.cg };
        frames.push(HoiFrame {
            robot: crate::state::RobotState::at_rest(dof_pos),
            ball: crate::state::BallState {
                pos: ball_pos,
                rot: ball_rot,
                vel: Vec2::zero(),
                ang_vel: 0.0,
            },
            cg,
        });
    }
    let out = Clip {
        fps: target_fps,
        skill: clip.skill.clone(),
        cyclic: clip.cyclic,
        frames,
    };
    Ok(finite_diff_velocities(&out))
}

/// One validation finding; `frame` is absent for clip-level issues.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub frame: Option<usize>,
    pub message: String,
}

/// Check clip invariants; returns all violations instead of aborting.
///
/// Velocity consistency accepts either backward-Euler or trapezoid
/// integration residuals, matching both recorder output (backward) and
/// finite-difference velocities (central).
pub fn validate_clip(clip: &Clip, params: &PhysicsParams) -> Vec<Violation> {
    const POSITION_RESIDUAL_TOL: Scalar = 1e-3;
    const MAX_PENETRATION: Scalar = 0.01;
    const CG_DISTANCE_TOL: Scalar = 0.02;

    let mut out = Vec::new();
    if clip.frames.len() < 2 {
        out.push(Violation {
            frame: None,
            message: format!("clip has {} frame(s), need at least 2", clip.frames.len()),
        });
        return out;
    }
    if clip.fps <= 0.0 {
        out.push(Violation {
            frame: None,
            message: format!("fps must be positive, got {}", clip.fps),
        });
        return out;
    }
    let dt = clip.dt();

    for (i, f) in clip.frames.iter().enumerate() {
        if !f.is_finite() {
            out.push(Violation {
                frame: Some(i),
                message: "non-finite field".into(),
            });
            continue;
        }

        let frames = chain_frames(&f.robot.dof_pos);
        let candidates = contact_candidates(&frames, f.robot.dof_pos[0], f.ball.pos, params);
        for geom in &candidates {
            if -geom.gap > MAX_PENETRATION {
                out.push(Violation {
                    frame: Some(i),
                    message: format!("interpenetration {:.4} m with {:?}", -geom.gap, geom.node),
                });
            }
        }

        // Contact-graph / kinematics consistency. Edges reflect impulses
        // applied during the preceding substep, so allow one substep of
        // relative travel on top of the base tolerance.
        let travel = f.ball.vel.norm() * dt;
        let hand_gap = (f.ball.pos - frames.hand).norm() - params.hand_radius - params.ball_radius;
        if f.cg.hand_ball && hand_gap > CG_DISTANCE_TOL + travel {
            out.push(Violation {
                frame: Some(i),
                message: format!(
                    "hand-ball edge set but surfaces are {:.3} m apart",
                    hand_gap
                ),
            });
        }
        let body_gap = candidates
            .iter()
            .filter(|g| g.node == crate::playground::Node::Body)
            .map(|g| g.gap)
            .fold(Scalar::INFINITY, Scalar::min);
        if f.cg.body_ball && body_gap > CG_DISTANCE_TOL + travel {
            out.push(Violation {
                frame: Some(i),
                message: format!(
                    "body-ball edge set but surfaces are {:.3} m apart",
                    body_gap
                ),
            });
        }
    }

    for i in 0..clip.frames.len() - 1 {
        let a = &clip.frames[i];
        let b = &clip.frames[i + 1];
        let mut check = |label: &str, xa: Scalar, xb: Scalar, va: Scalar, vb: Scalar| {
            let backward = (xb - xa - vb * dt).abs();
            let trapezoid = (xb - xa - 0.5 * (va + vb) * dt).abs();
            if backward.min(trapezoid) > POSITION_RESIDUAL_TOL {
                out.push(Violation {
                    frame: Some(i + 1),
                    message: format!(
                        "velocity inconsistency in {label}: residual {:.2e}",
                        backward.min(trapezoid)
                    ),
                });
            }
        };
        for k in 0..DOF_COUNT {
            check(
                DOF_NAMES[k],
                a.robot.dof_pos[k],
                b.robot.dof_pos[k],
                a.robot.dof_vel[k],
                b.robot.dof_vel[k],
            );
        }
        check("ball_x", a.ball.pos.x, b.ball.pos.x, a.ball.vel.x, b.ball.vel.x);
        check("ball_y", a.ball.pos.y, b.ball.pos.y, a.ball.vel.y, b.ball.vel.y);
        check("ball_rot", a.ball.rot, b.ball.rot, a.ball.ang_vel, b.ball.ang_vel);
    }
    out
}

/// A skill with all of its clips.
#[derive(Clone, Debug)]
pub struct SkillEntry {
    pub label: SkillLabel,
    pub clips: Vec<Clip>,
}

/// Immutable clip collection grouped by skill; skill ids are dense indices.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub skills: Vec<SkillEntry>,
}

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    format_version: u32,
    skills: Vec<ManifestSkill>,
}

#[derive(Serialize, Deserialize)]
struct ManifestSkill {
    id: usize,
    name: String,
    clips: Vec<String>,
}

impl Dataset {
    pub fn num_skills(&self) -> usize {
        self.skills.len()
    }

    pub fn skill_names(&self) -> Vec<String> {
        self.skills.iter().map(|s| s.label.name.clone()).collect()
    }

    pub fn skill_by_name(&self, name: &str) -> Option<&SkillEntry> {
        self.skills.iter().find(|s| s.label.name == name)
    }

    pub fn validate(&self) -> Result<(), ClipError> {
        for (i, entry) in self.skills.iter().enumerate() {
            if entry.label.id != i {
                return Err(ClipError::Invalid(format!(
                    "skill ids must be dense: slot {i} holds id {}",
                    entry.label.id
                )));
            }
            if entry.clips.is_empty() {
                return Err(ClipError::EmptySkill(i));
            }
        }
        Ok(())
    }

    /// All clips resampled to a target rate (typically the policy rate).
    pub fn resampled(&self, target_fps: Scalar) -> Result<Dataset, ClipError> {
        let mut skills = Vec::with_capacity(self.skills.len());
        for entry in &self.skills {
            let clips = entry
                .clips
                .iter()
                .map(|c| resample(c, target_fps))
                .collect::<Result<Vec<_>, _>>()?;
            skills.push(SkillEntry {
                label: entry.label.clone(),
                clips,
            });
        }
        Ok(Dataset { skills })
    }

    /// Write the manifest plus one file per clip into a directory.
    pub fn save(&self, dir: &Path) -> Result<PathBuf, ClipError> {
        std::fs::create_dir_all(dir).map_err(|source| ClipError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut skills = Vec::new();
        for entry in &self.skills {
            let mut paths = Vec::new();
            for (k, clip) in entry.clips.iter().enumerate() {
                let file = format!("{}_{k}.clip.json", entry.label.name);
                save_clip(clip, &dir.join(&file))?;
                paths.push(file);
            }
            skills.push(ManifestSkill {
                id: entry.label.id,
                name: entry.label.name.clone(),
                clips: paths,
            });
        }
        let manifest = ManifestFile {
            format_version: CLIP_FORMAT_VERSION,
            skills,
        };
        let path = dir.join("dataset.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
        std::fs::write(&path, text).map_err(|source| ClipError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    /// Load a dataset from its manifest file.
    pub fn load(manifest_path: &Path) -> Result<Dataset, ClipError> {
        let text = std::fs::read_to_string(manifest_path).map_err(|source| ClipError::Io {
            path: manifest_path.to_path_buf(),
            source,
        })?;
        let manifest: ManifestFile =
            serde_json::from_str(&text).map_err(|e| ClipError::Malformed {
                path: manifest_path.to_path_buf(),
                message: e.to_string(),
            })?;
        let dir = manifest_path.parent().unwrap_or(Path::new("."));
        let mut skills = Vec::new();
        for s in &manifest.skills {
            let mut clips = Vec::new();
            for rel in &s.clips {
                clips.push(load_clip(&dir.join(rel))?);
            }
            skills.push(SkillEntry {
                label: SkillLabel::new(s.id, s.name.clone()),
                clips,
            });
        }
        let ds = Dataset { skills };
        ds.validate()?;
        Ok(ds)
    }
}

/// Sample a reference-state-initialization point: clip uniform over the
/// skill's clips, frame uniform over `[0, len-2]` so at least one reference
/// transition remains.
pub fn sample_rsi<R: Rng>(
    dataset: &Dataset,
    skill_id: usize,
    rng: &mut R,
) -> Result<(usize, usize), ClipError> {
    let entry = dataset
        .skills
        .get(skill_id)
        .ok_or_else(|| ClipError::UnknownSkill(format!("id {skill_id}")))?;
    if entry.clips.is_empty() {
        return Err(ClipError::EmptySkill(skill_id));
    }
    let clip_idx = rng.gen_range(0..entry.clips.len());
    let frame_idx = rng.gen_range(0..entry.clips[clip_idx].len() - 1);
    Ok((clip_idx, frame_idx))
}
