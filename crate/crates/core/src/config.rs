//! Tracker hyperparameters and dataset presets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::appearance::AppearanceMode;
use crate::error::{Error, Result};
use crate::geometry::SpatialMetric;

/// All tracker hyperparameters.
///
/// The default is the MOT17 preset with the standard window, threshold and
/// velocity settings. `merge_cutoff` and `stage1_gate` are not dataset
/// presets; their defaults were calibrated on the synthetic scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Sliding window length (frames) for building lifted frames.
    pub window_len: u32,
    /// Detection confidence threshold (sigma); detections below it never
    /// enter the tracker.
    pub det_threshold: f64,
    /// Confidence threshold for the appearance EMA update. Defaults to
    /// `det_threshold` when unset.
    pub ema_sigma: Option<f64>,
    /// Floor of the adaptive EMA weight.
    pub beta_f: f64,
    /// Offset of the spatio-temporal modulation factor.
    pub off: f64,
    /// Velocity averaging window N (frames); 2 is the two-frame baseline.
    #[serde(alias = "n")]
    pub velocity_window: u32,
    /// Tracklet appearance representation.
    pub appearance_mode: AppearanceMode,
    /// Spatial distance between a predicted box and a merge candidate.
    pub spatial_metric: SpatialMetric,
    /// Clustering stops once no feasible pair is below this distance.
    pub merge_cutoff: f64,
    /// Maximum cosine distance for a stage-1 adjacent-frame match.
    pub stage1_gate: f64,
    /// Keep the last observed box size when predicting across a gap.
    pub freeze_size: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            window_len: 6,
            det_threshold: 0.7,
            ema_sigma: None,
            beta_f: 0.822,
            off: 0.525,
            velocity_window: 9,
            appearance_mode: AppearanceMode::Dynamic,
            spatial_metric: SpatialMetric::Dgiou,
            merge_cutoff: 0.5,
            stage1_gate: 0.4,
            freeze_size: false,
        }
    }
}

impl TrackerConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self::default();
        match preset {
            Preset::Mot17 => Self {
                beta_f: 0.822,
                off: 0.525,
                ..base
            },
            Preset::Mot20 => Self {
                beta_f: 0.66,
                off: 0.9,
                ..base
            },
            Preset::DanceTrack => Self {
                beta_f: 0.8,
                off: 0.1,
                ..base
            },
        }
    }

    /// Compatibility configuration reproducing the pre-modulation baseline:
    /// median appearance, plain IoU spatial distance, two-frame velocity.
    pub fn baseline_compat() -> Self {
        Self {
            appearance_mode: AppearanceMode::Median,
            spatial_metric: SpatialMetric::Iou,
            velocity_window: 2,
            ..Self::default()
        }
    }

    /// Effective threshold for the appearance EMA update.
    pub fn ema_sigma(&self) -> f64 {
        self.ema_sigma.unwrap_or(self.det_threshold)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 {
            return Err(Error::Config("window_len must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.det_threshold) {
            return Err(Error::Config("det_threshold must be in [0, 1)".into()));
        }
        if let Some(s) = self.ema_sigma {
            if !(0.0..1.0).contains(&s) {
                return Err(Error::Config("ema_sigma must be in [0, 1)".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.beta_f) {
            return Err(Error::Config("beta_f must be in [0, 1]".into()));
        }
        if self.off < 0.0 {
            return Err(Error::Config("off must be non-negative".into()));
        }
        if self.velocity_window < 2 {
            return Err(Error::Config("velocity window must be at least 2".into()));
        }
        if self.merge_cutoff < 0.0 || self.merge_cutoff > 2.0 {
            return Err(Error::Config("merge_cutoff must be in [0, 2]".into()));
        }
        if self.stage1_gate < 0.0 || self.stage1_gate > 2.0 {
            return Err(Error::Config("stage1_gate must be in [0, 2]".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Mot17,
    Mot20,
    DanceTrack,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Preset::Mot17 => "mot17",
            Preset::Mot20 => "mot20",
            Preset::DanceTrack => "dancetrack",
        };
        f.write_str(s)
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mot17" => Ok(Preset::Mot17),
            "mot20" => Ok(Preset::Mot20),
            "dancetrack" => Ok(Preset::DanceTrack),
            other => Err(format!(
                "unknown preset '{other}' (expected mot17, mot20 or dancetrack)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_mot17_preset() {
        let d = TrackerConfig::default();
        assert_eq!(d, TrackerConfig::preset(Preset::Mot17));
        assert_eq!(d.window_len, 6);
        assert_eq!(d.det_threshold, 0.7);
        assert_eq!(d.beta_f, 0.822);
        assert_eq!(d.off, 0.525);
        assert_eq!(d.velocity_window, 9);
    }

    #[test]
    fn presets_carry_their_parameters() {
        let mot20 = TrackerConfig::preset(Preset::Mot20);
        assert_eq!((mot20.beta_f, mot20.off), (0.66, 0.9));
        let dance = TrackerConfig::preset(Preset::DanceTrack);
        assert_eq!((dance.beta_f, dance.off), (0.8, 0.1));
    }

    #[test]
    fn baseline_compat_flags() {
        let b = TrackerConfig::baseline_compat();
        assert_eq!(b.appearance_mode, AppearanceMode::Median);
        assert_eq!(b.spatial_metric, SpatialMetric::Iou);
        assert_eq!(b.velocity_window, 2);
    }

    #[test]
    fn ema_sigma_falls_back_to_det_threshold() {
        let mut c = TrackerConfig::default();
        assert_eq!(c.ema_sigma(), 0.7);
        c.ema_sigma = Some(0.5);
        assert_eq!(c.ema_sigma(), 0.5);
    }

    #[test]
    fn toml_round_trip_and_aliases() {
        let c = TrackerConfig::from_toml_str(
            "n = 4\nappearance_mode = \"median\"\nspatial_metric = \"iou\"\n",
        )
        .unwrap();
        assert_eq!(c.velocity_window, 4);
        assert_eq!(c.appearance_mode, AppearanceMode::Median);
        assert_eq!(c.spatial_metric, SpatialMetric::Iou);

        let text = toml::to_string(&TrackerConfig::default()).unwrap();
        let back = TrackerConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, TrackerConfig::default());
    }

    #[test]
    fn validation_rejects_bad_ranges() {
        let bad = [
            TrackerConfig {
                velocity_window: 1,
                ..Default::default()
            },
            TrackerConfig {
                det_threshold: 1.0,
                ..Default::default()
            },
            TrackerConfig {
                window_len: 0,
                ..Default::default()
            },
        ];
        for config in bad {
            assert!(config.validate().is_err());
        }
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(TrackerConfig::from_toml_str("no_such_key = 1\n").is_err());
    }
}
