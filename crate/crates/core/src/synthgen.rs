//! Seeded synthetic scenario generator: ground truth, detections and
//! embeddings with controllable noise, occlusions and confidence degradation.
//! Outputs use the same file formats as real data, so the full pipeline
//! consumes both identically.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::association::Detection;
use crate::error::{Error, Result};
use crate::mot_io::{self, EmbeddingTable, MotRow};

pub const CANVAS_WIDTH: f64 = 1920.0;
pub const CANVAS_HEIGHT: f64 = 1080.0;
const MARGIN: f64 = 40.0;
const MIN_LANE_HEIGHT: f64 = 40.0;

/// Maximum number of targets the lane layout can hold.
pub fn layout_capacity() -> usize {
    ((CANVAS_HEIGHT - 2.0 * MARGIN) / MIN_LANE_HEIGHT) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionPattern {
    Linear,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OcclusionMode {
    /// The detection is not emitted at all.
    Drop,
    /// The detection stays but its embedding is blended toward another
    /// identity's prototype and its confidence straddles the threshold.
    Corrupt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occlusion {
    /// 0-based target index.
    pub target: usize,
    pub start_frame: u32,
    pub end_frame: u32,
    pub mode: OcclusionMode,
}

/// Maps visibility to detection confidence. Clean detections draw from
/// `base + jitter * N(0,1)` clamped to `[threshold + corrupt_band, 0.999]`;
/// corrupted ones draw uniformly from the band around `threshold`, so some
/// fall below it (dropped at ingest) and the rest get near-total EMA
/// rejection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfModel {
    pub base: f64,
    pub jitter: f64,
    pub threshold: f64,
    pub corrupt_band: f64,
}

impl Default for ConfModel {
    fn default() -> Self {
        Self {
            base: 0.9,
            jitter: 0.03,
            threshold: 0.7,
            corrupt_band: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub n_targets: usize,
    pub n_frames: u32,
    pub motion: MotionPattern,
    /// Std deviation (pixels) of the box corner/size jitter.
    pub det_noise_px: f64,
    /// Expected norm of the embedding perturbation (spread over all
    /// components).
    pub embed_noise: f64,
    pub embed_dim: usize,
    /// Weight of the other identity's prototype in corrupt-mode embeddings;
    /// 0.5 lands exactly between the two identities.
    pub corrupt_blend: f64,
    pub occlusions: Vec<Occlusion>,
    pub conf: ConfModel,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_targets: 5,
            n_frames: 100,
            motion: MotionPattern::Linear,
            det_noise_px: 0.0,
            embed_noise: 0.0,
            embed_dim: 64,
            corrupt_blend: 0.5,
            occlusions: Vec::new(),
            conf: ConfModel::default(),
            seed: 1,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_targets == 0 {
            return Err(Error::Scenario("n_targets must be at least 1".into()));
        }
        if self.n_targets > layout_capacity() {
            return Err(Error::Scenario(format!(
                "{} targets exceed the layout capacity of {}",
                self.n_targets,
                layout_capacity()
            )));
        }
        if self.n_frames == 0 {
            return Err(Error::Scenario("n_frames must be at least 1".into()));
        }
        if self.det_noise_px < 0.0 || self.embed_noise < 0.0 {
            return Err(Error::Scenario("noise parameters must be non-negative".into()));
        }
        if self.embed_dim < self.n_targets {
            return Err(Error::Scenario(format!(
                "embed_dim {} cannot host {} orthogonal prototypes",
                self.embed_dim, self.n_targets
            )));
        }
        for occ in &self.occlusions {
            if occ.target >= self.n_targets {
                return Err(Error::Scenario(format!(
                    "occlusion target {} out of range",
                    occ.target
                )));
            }
            if occ.start_frame == 0 || occ.end_frame > self.n_frames || occ.start_frame > occ.end_frame
            {
                return Err(Error::Scenario(format!(
                    "occlusion window {}..{} outside 1..{}",
                    occ.start_frame, occ.end_frame, self.n_frames
                )));
            }
        }
        if !(0.0..1.0).contains(&self.conf.threshold) || self.conf.jitter < 0.0 {
            return Err(Error::Scenario("invalid confidence model".into()));
        }
        if !(0.0..=1.0).contains(&self.corrupt_blend) {
            return Err(Error::Scenario("corrupt_blend must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let scenario: Self = toml::from_str(s).map_err(|e| Error::Scenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    fn occlusion_at(&self, target: usize, frame: u32) -> Option<OcclusionMode> {
        self.occlusions
            .iter()
            .find(|o| o.target == target && (o.start_frame..=o.end_frame).contains(&frame))
            .map(|o| o.mode)
    }
}

/// Orthonormal identity prototypes (one-hot per target).
pub fn prototypes(n_targets: usize, dim: usize) -> Vec<Vec<f32>> {
    assert!(n_targets <= dim);
    (0..n_targets)
        .map(|k| {
            let mut v = vec![0.0f32; dim];
            v[k] = 1.0;
            v
        })
        .collect()
}

/// Generated scene: full ground truth plus the emitted (possibly degraded)
/// detections and their embeddings.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub gt_rows: Vec<MotRow>,
    pub det_rows: Vec<MotRow>,
    pub embeddings: EmbeddingTable,
}

#[derive(Debug, Clone)]
pub struct SynthPaths {
    pub gt: PathBuf,
    pub det: PathBuf,
    pub emb: PathBuf,
}

impl SyntheticData {
    pub fn write_to_dir(&self, dir: &Path) -> Result<SynthPaths> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = SynthPaths {
            gt: dir.join("gt.txt"),
            det: dir.join("det.txt"),
            emb: dir.join("emb.bin"),
        };
        mot_io::write_mot_rows(&self.gt_rows, &paths.gt)?;
        mot_io::write_mot_rows(&self.det_rows, &paths.det)?;
        mot_io::write_embeddings(&self.embeddings, &paths.emb)?;
        Ok(paths)
    }

    /// In-memory equivalent of reading the detection and embedding files:
    /// the same join and confidence filter as the file path.
    pub fn detections(&self, sigma: f64) -> Result<Vec<Detection>> {
        mot_io::join_detections(&self.det_rows, &self.embeddings, sigma)
    }
}

struct TargetTrack {
    width: f64,
    height: f64,
    x0: f64,
    vx: f64,
    y_center: f64,
    amp: f64,
    period: f64,
    phase: f64,
}

impl TargetTrack {
    fn center_at(&self, frame: u32, motion: MotionPattern) -> (f64, f64) {
        let t = (frame - 1) as f64;
        let x = self.x0 + self.vx * t;
        let y = match motion {
            MotionPattern::Linear => self.y_center,
            MotionPattern::Sinusoidal => {
                self.y_center + self.amp * (std::f64::consts::TAU * t / self.period + self.phase).sin()
            }
        };
        (x, y)
    }
}

/// Generates the scenario deterministically from its seed.
pub fn generate(scenario: &Scenario) -> Result<SyntheticData> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let n = scenario.n_targets;
    let lane_h = (CANVAS_HEIGHT - 2.0 * MARGIN) / n as f64;
    let protos = prototypes(n, scenario.embed_dim);

    // per-target motion parameters, drawn in target order
    let tracks: Vec<TargetTrack> = (0..n)
        .map(|k| {
            let width = 54.0 + 10.0 * (k % 5) as f64;
            let height = 104.0 + 12.0 * (k % 4) as f64;
            let usable = CANVAS_WIDTH - 2.0 * MARGIN - width;
            let speed: f64 = rng.random_range(1.5..5.0);
            let steps = (scenario.n_frames.max(2) - 1) as f64;
            let speed = speed.min(usable / steps);
            let span = speed * steps;
            let slack = usable - span;
            let offset: f64 = rng.random_range(0.0..1.0) * slack;
            // alternate sweep directions so neighbors cross paths
            let (x0, vx) = if k % 2 == 0 {
                (MARGIN + width / 2.0 + offset, speed)
            } else {
                (CANVAS_WIDTH - MARGIN - width / 2.0 - offset, -speed)
            };
            let y_center = MARGIN + (k as f64 + 0.5) * lane_h;
            TargetTrack {
                width,
                height,
                x0,
                vx,
                y_center,
                amp: 0.35 * lane_h,
                period: 40.0,
                phase: std::f64::consts::TAU * k as f64 / n as f64,
            }
        })
        .collect();

    let mut gt_rows = Vec::new();
    let mut det_rows = Vec::new();
    let mut embeddings = EmbeddingTable::new(scenario.embed_dim, "<synthetic>");

    for frame in 1..=scenario.n_frames {
        let mut rank: u32 = 0;
        for (k, track) in tracks.iter().enumerate() {
            let (cx, cy) = track.center_at(frame, scenario.motion);
            let left = cx - track.width / 2.0;
            let top = cy - track.height / 2.0;
            gt_rows.push(MotRow {
                frame,
                id: k as i64 + 1,
                left,
                top,
                width: track.width,
                height: track.height,
                conf: 1.0,
                x: -1.0,
                y: -1.0,
                z: -1.0,
            });

            let occlusion = scenario.occlusion_at(k, frame);
            if occlusion == Some(OcclusionMode::Drop) {
                continue;
            }

            // box jitter: four draws regardless of the noise level so that
            // noise settings do not shift the rest of the stream
            let s = scenario.det_noise_px;
            let jl = left + s * normal.sample(&mut rng);
            let jt = top + s * normal.sample(&mut rng);
            let jw = (track.width + 0.5 * s * normal.sample(&mut rng)).max(1.0);
            let jh = (track.height + 0.5 * s * normal.sample(&mut rng)).max(1.0);

            let corrupt = occlusion == Some(OcclusionMode::Corrupt);
            let conf = if corrupt {
                let u: f64 = rng.random_range(0.0..1.0);
                scenario.conf.threshold + scenario.conf.corrupt_band * (2.0 * u - 1.0)
            } else {
                let lo = scenario.conf.threshold + scenario.conf.corrupt_band;
                (scenario.conf.base + scenario.conf.jitter * normal.sample(&mut rng))
                    .clamp(lo, 0.999)
            };

            let comp_sigma = scenario.embed_noise / (scenario.embed_dim as f64).sqrt();
            let mut emb: Vec<f32> = if corrupt {
                let other = (k + 1) % n;
                let toward = scenario.corrupt_blend as f32;
                protos[k]
                    .iter()
                    .zip(&protos[other])
                    .map(|(&a, &b)| (1.0 - toward) * a + toward * b)
                    .collect()
            } else {
                protos[k].clone()
            };
            for v in emb.iter_mut() {
                *v += (comp_sigma * normal.sample(&mut rng)) as f32;
            }
            let norm = emb.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in emb.iter_mut() {
                    *v = (*v as f64 / norm) as f32;
                }
            }

            det_rows.push(MotRow {
                frame,
                id: -1,
                left: jl,
                top: jt,
                width: jw,
                height: jh,
                conf,
                x: -1.0,
                y: -1.0,
                z: -1.0,
            });
            embeddings.insert(frame, rank, emb)?;
            rank += 1;
        }
    }

    Ok(SyntheticData {
        gt_rows,
        det_rows,
        embeddings,
    })
}
