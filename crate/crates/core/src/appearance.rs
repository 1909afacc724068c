//! Appearance embeddings and the tracklet-level appearance representations:
//! confidence-weighted EMA ("dynamic"), median-frame, max-confidence and mean.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum L2 norm below which a vector is treated as zero rather than
/// normalized.
const MIN_NORM: f64 = 1e-12;

/// A unit-norm appearance embedding.
///
/// Values are stored as `f32` to match the on-disk format; all arithmetic
/// accumulates in `f64`. Construction normalizes, so every `Embedding` in the
/// program has L2 norm 1 within `f32` precision. Zero and non-finite inputs
/// are rejected instead of normalized, which is how corrupt embedding files
/// surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f32>,
}

impl Embedding {
    /// Normalizes `values` to unit length.
    pub fn unit(values: Vec<f32>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEmbedding);
        }
        let norm = l2_norm(&values);
        if norm < MIN_NORM {
            return Err(Error::ZeroNormEmbedding);
        }
        let values = values.iter().map(|&v| (v as f64 / norm) as f32).collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn dot(&self, other: &Embedding) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a as f64 * b as f64)
            .sum()
    }
}

fn l2_norm(values: &[f32]) -> f64 {
    values.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt()
}

/// Cosine distance `1 - a·b` between unit embeddings, clamped to `[0, 2]`.
pub fn cosine_distance(a: &Embedding, b: &Embedding) -> f64 {
    assert_eq!(
        a.dim(),
        b.dim(),
        "cosine distance requires embeddings of equal dimension"
    );
    (1.0 - a.dot(b)).clamp(0.0, 2.0)
}

/// Adaptive EMA weight for a detection of confidence `s_det`:
///
/// `beta = beta_f + (1 - beta_f) * (1 - (s_det - sigma) / (1 - sigma))`
///
/// Defined for `s_det` in `[sigma, 1]`, where it decreases linearly from 1 at
/// `s_det = sigma` (new embedding fully rejected) down to `beta_f` at
/// `s_det = 1`. Detections below `sigma` must be skipped by the caller;
/// [`ema_update`] does so.
pub fn adaptive_beta(s_det: f64, sigma: f64, beta_f: f64) -> f64 {
    debug_assert!(sigma < 1.0);
    beta_f + (1.0 - beta_f) * (1.0 - (s_det - sigma) / (1.0 - sigma))
}

/// Blends `beta * prev + (1 - beta) * next` and renormalizes.
///
/// Renormalization is a deliberate addition over the plain EMA so that cosine
/// distances on the result stay well conditioned. Errors if the blend cancels
/// to zero (antipodal inputs at beta = 0.5).
pub fn ema_blend(prev: &Embedding, next: &Embedding, beta: f64) -> Result<Embedding> {
    debug_assert_eq!(prev.dim(), next.dim());
    let blended: Vec<f32> = prev
        .values
        .iter()
        .zip(&next.values)
        .map(|(&p, &n)| (beta * p as f64 + (1.0 - beta) * n as f64) as f32)
        .collect();
    Embedding::unit(blended)
}

/// How a tracklet summarizes the appearance of its detections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppearanceMode {
    /// Confidence-weighted EMA over the detection history.
    Dynamic,
    /// Embedding of the detection nearest the middle frame of the tracklet.
    Median,
    /// Embedding of the highest-confidence detection.
    Max,
    /// Renormalized arithmetic mean of all detection embeddings.
    Mean,
}

impl AppearanceMode {
    pub const ALL: [AppearanceMode; 4] = [
        AppearanceMode::Dynamic,
        AppearanceMode::Median,
        AppearanceMode::Max,
        AppearanceMode::Mean,
    ];
}

impl fmt::Display for AppearanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AppearanceMode::Dynamic => "dynamic",
            AppearanceMode::Median => "median",
            AppearanceMode::Max => "max",
            AppearanceMode::Mean => "mean",
        };
        f.write_str(s)
    }
}

impl FromStr for AppearanceMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dynamic" => Ok(AppearanceMode::Dynamic),
            "median" => Ok(AppearanceMode::Median),
            "max" => Ok(AppearanceMode::Max),
            "mean" => Ok(AppearanceMode::Mean),
            other => Err(format!(
                "unknown appearance mode '{other}' (expected dynamic, median, max or mean)"
            )),
        }
    }
}

/// One frame's appearance evidence, borrowed from a detection.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingObservation<'a> {
    pub frame: u32,
    pub embedding: &'a Embedding,
    pub confidence: f64,
}

/// Computes the representative embedding of a frame-ordered history under the
/// given mode.
///
/// Median picks the element nearest to the middle of the tracklet's frame
/// range `[n, m]` (index `floor((n + m) / 2)`), mapped to the closest frame
/// actually present; ties break toward the earlier detection, as do
/// confidence ties in max mode. Dynamic replays the confidence-weighted EMA
/// in frame order: the first observation initializes the state, later ones
/// with confidence below `sigma` are skipped.
pub fn representative(
    history: &[EmbeddingObservation<'_>],
    mode: AppearanceMode,
    beta_f: f64,
    sigma: f64,
) -> Result<Embedding> {
    let first = history.first().ok_or(Error::EmptyHistory)?;
    debug_assert!(history.windows(2).all(|w| w[0].frame < w[1].frame));
    match mode {
        AppearanceMode::Median => {
            let n = first.frame as i64;
            let m = history.last().unwrap().frame as i64;
            let mid = (n + m) / 2;
            let obs = history
                .iter()
                .min_by_key(|o| ((o.frame as i64 - mid).abs(), o.frame))
                .unwrap();
            Ok(obs.embedding.clone())
        }
        AppearanceMode::Max => {
            let mut best = first;
            for o in &history[1..] {
                if o.confidence > best.confidence {
                    best = o;
                }
            }
            Ok(best.embedding.clone())
        }
        AppearanceMode::Mean => {
            let dim = first.embedding.dim();
            let mut acc = vec![0.0f64; dim];
            for o in history {
                for (slot, &v) in acc.iter_mut().zip(o.embedding.values()) {
                    *slot += v as f64;
                }
            }
            let scale = 1.0 / history.len() as f64;
            Embedding::unit(acc.into_iter().map(|v| (v * scale) as f32).collect())
        }
        AppearanceMode::Dynamic => {
            let mut state = AppearanceState::new(AppearanceMode::Dynamic, first.embedding.clone());
            for o in &history[1..] {
                state.ema_update(o.embedding, o.confidence, beta_f, sigma)?;
            }
            Ok(state.into_current())
        }
    }
}

/// The maintained appearance representation of one tracklet.
///
/// Owned by exactly one tracklet and updated sequentially; the stored
/// embedding is what tracklet distances compare against.
#[derive(Debug, Clone)]
pub struct AppearanceState {
    mode: AppearanceMode,
    current: Embedding,
}

impl AppearanceState {
    pub fn new(mode: AppearanceMode, current: Embedding) -> Self {
        Self { mode, current }
    }

    /// Builds the state for a full frame-ordered history.
    pub fn from_history(
        history: &[EmbeddingObservation<'_>],
        mode: AppearanceMode,
        beta_f: f64,
        sigma: f64,
    ) -> Result<Self> {
        Ok(Self {
            mode,
            current: representative(history, mode, beta_f, sigma)?,
        })
    }

    pub fn mode(&self) -> AppearanceMode {
        self.mode
    }

    pub fn current(&self) -> &Embedding {
        &self.current
    }

    pub fn into_current(self) -> Embedding {
        self.current
    }

    /// One EMA step for dynamic mode. Detections with `s_det < sigma` are
    /// rejected: the state is left unchanged.
    pub fn ema_update(
        &mut self,
        e_new: &Embedding,
        s_det: f64,
        beta_f: f64,
        sigma: f64,
    ) -> Result<()> {
        debug_assert_eq!(self.mode, AppearanceMode::Dynamic);
        if s_det < sigma {
            return Ok(());
        }
        let beta = adaptive_beta(s_det, sigma, beta_f);
        self.current = ema_blend(&self.current, e_new, beta)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn emb(values: &[f32]) -> Embedding {
        Embedding::unit(values.to_vec()).unwrap()
    }

    #[test]
    fn unit_rejects_zero_vector() {
        assert!(matches!(
            Embedding::unit(vec![0.0, 0.0]),
            Err(Error::ZeroNormEmbedding)
        ));
    }

    #[test]
    fn unit_rejects_non_finite() {
        assert!(matches!(
            Embedding::unit(vec![1.0, f32::NAN]),
            Err(Error::NonFiniteEmbedding)
        ));
    }

    #[test]
    fn cosine_distance_identity_antipodal_orthogonal() {
        let a = emb(&[1.0, 0.0]);
        let neg = emb(&[-1.0, 0.0]);
        let orth = emb(&[0.0, 1.0]);
        assert_abs_diff_eq!(cosine_distance(&a, &a), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(cosine_distance(&a, &neg), 2.0, epsilon = 1e-7);
        assert_abs_diff_eq!(cosine_distance(&a, &orth), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn adaptive_beta_boundaries() {
        // at full confidence the floor weight applies
        assert_abs_diff_eq!(adaptive_beta(1.0, 0.7, 0.822), 0.822, epsilon = 1e-12);
        // at the threshold the new embedding gets weight exactly zero
        assert_abs_diff_eq!(adaptive_beta(0.7, 0.7, 0.822), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(adaptive_beta(0.85, 0.7, 0.822), 0.911, epsilon = 1e-12);
    }

    #[test]
    fn ema_update_rejects_below_sigma() {
        let mut state = AppearanceState::new(AppearanceMode::Dynamic, emb(&[1.0, 0.0]));
        state
            .ema_update(&emb(&[0.0, 1.0]), 0.5, 0.822, 0.7)
            .unwrap();
        assert_eq!(state.current(), &emb(&[1.0, 0.0]));
    }

    #[test]
    fn ema_update_fixed_point() {
        let e = emb(&[0.6, 0.8]);
        let mut state = AppearanceState::new(AppearanceMode::Dynamic, e.clone());
        state.ema_update(&e, 0.9, 0.822, 0.7).unwrap();
        assert_abs_diff_eq!(cosine_distance(state.current(), &e), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn ema_blend_renormalizes() {
        // (0.822, 0.178) / |(0.822, 0.178)|
        let blended = ema_blend(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0]), 0.822).unwrap();
        let norm = (0.822f64.powi(2) + 0.178f64.powi(2)).sqrt();
        assert_abs_diff_eq!(blended.values()[0] as f64, 0.822 / norm, epsilon = 1e-6);
        assert_abs_diff_eq!(blended.values()[1] as f64, 0.178 / norm, epsilon = 1e-6);
        // matches the expected direction to three decimals
        assert_abs_diff_eq!(blended.values()[0] as f64, 0.97725, epsilon = 1e-3);
        assert_abs_diff_eq!(blended.values()[1] as f64, 0.21162, epsilon = 1e-3);
    }

    #[test]
    fn ema_blend_cancellation_is_an_error() {
        let a = emb(&[1.0, 0.0]);
        let b = emb(&[-1.0, 0.0]);
        assert!(matches!(
            ema_blend(&a, &b, 0.5),
            Err(Error::ZeroNormEmbedding)
        ));
    }

    fn history<'a>(entries: &'a [(u32, Embedding, f64)]) -> Vec<EmbeddingObservation<'a>> {
        entries
            .iter()
            .map(|(frame, e, conf)| EmbeddingObservation {
                frame: *frame,
                embedding: e,
                confidence: *conf,
            })
            .collect()
    }

    #[test]
    fn representative_singleton_all_modes() {
        let entries = [(4u32, emb(&[0.0, 1.0]), 0.8)];
        let h = history(&entries);
        for mode in AppearanceMode::ALL {
            let r = representative(&h, mode, 0.822, 0.7).unwrap();
            assert_eq!(&r, &entries[0].1);
        }
    }

    #[test]
    fn representative_max_prefers_highest_confidence_then_earliest() {
        let entries = [
            (1u32, emb(&[1.0, 0.0]), 0.9),
            (2, emb(&[0.0, 1.0]), 0.5),
            (3, emb(&[0.7, 0.7]), 0.8),
        ];
        let h = history(&entries);
        let r = representative(&h, AppearanceMode::Max, 0.822, 0.7).unwrap();
        assert_eq!(&r, &entries[0].1);

        let tied = [
            (1u32, emb(&[1.0, 0.0]), 0.9),
            (2, emb(&[0.0, 1.0]), 0.9),
        ];
        let h = history(&tied);
        let r = representative(&h, AppearanceMode::Max, 0.822, 0.7).unwrap();
        assert_eq!(&r, &tied[0].1);
    }

    #[test]
    fn representative_median_uses_middle_of_frame_range() {
        // frames 2..=6: mid = 4
        let entries = [
            (2u32, emb(&[1.0, 0.0]), 0.9),
            (4, emb(&[0.0, 1.0]), 0.9),
            (6, emb(&[0.7, 0.7]), 0.9),
        ];
        let h = history(&entries);
        let r = representative(&h, AppearanceMode::Median, 0.822, 0.7).unwrap();
        assert_eq!(&r, &entries[1].1);

        // gap at the mid frame: 1..=5 has mid 3, nearest present are 2 and 4,
        // tie resolves to the earlier frame
        let gapped = [
            (1u32, emb(&[1.0, 0.0]), 0.9),
            (2, emb(&[0.0, 1.0]), 0.9),
            (4, emb(&[0.7, 0.7]), 0.9),
            (5, emb(&[-0.7, 0.7]), 0.9),
        ];
        let h = history(&gapped);
        let r = representative(&h, AppearanceMode::Median, 0.822, 0.7).unwrap();
        assert_eq!(&r, &gapped[1].1);
    }

    #[test]
    fn representative_mean_of_antipodal_is_an_error() {
        let entries = [
            (1u32, emb(&[1.0, 0.0]), 0.9),
            (2, emb(&[-1.0, 0.0]), 0.9),
        ];
        let h = history(&entries);
        assert!(matches!(
            representative(&h, AppearanceMode::Mean, 0.822, 0.7),
            Err(Error::ZeroNormEmbedding)
        ));
    }

    #[test]
    fn representative_empty_history_is_an_error() {
        assert!(matches!(
            representative(&[], AppearanceMode::Dynamic, 0.822, 0.7),
            Err(Error::EmptyHistory)
        ));
    }

    proptest! {
        #[test]
        fn adaptive_beta_monotone_and_bounded(
            beta_f in 0.0..1.0f64,
            sigma in 0.0..0.95f64,
            steps in 2usize..50,
        ) {
            let mut prev = f64::INFINITY;
            for k in 0..=steps {
                let s = sigma + (1.0 - sigma) * k as f64 / steps as f64;
                let beta = adaptive_beta(s, sigma, beta_f);
                prop_assert!(beta <= prev + 1e-12);
                prop_assert!(beta >= beta_f - 1e-12 && beta <= 1.0 + 1e-12);
                prev = beta;
            }
        }

        #[test]
        fn ema_output_is_unit_norm_and_converges(
            seed_a in proptest::collection::vec(-1.0..1.0f32, 8),
            seed_b in proptest::collection::vec(-1.0..1.0f32, 8),
        ) {
            prop_assume!(seed_a.iter().any(|v| v.abs() > 0.1));
            prop_assume!(seed_b.iter().any(|v| v.abs() > 0.1));
            let start = Embedding::unit(seed_a).unwrap();
            let target = Embedding::unit(seed_b).unwrap();
            prop_assume!(cosine_distance(&start, &target) < 1.9);

            let mut state = AppearanceState::new(AppearanceMode::Dynamic, start);
            let mut last = cosine_distance(state.current(), &target);
            for _ in 0..60 {
                state.ema_update(&target, 1.0, 0.822, 0.7).unwrap();
                let norm: f64 = state
                    .current()
                    .values()
                    .iter()
                    .map(|&v| (v as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                prop_assert!((norm - 1.0).abs() < 1e-6);
                let d = cosine_distance(state.current(), &target);
                prop_assert!(d <= last + 1e-6);
                last = d;
            }
            prop_assert!(last < 1e-3);
        }
    }
}
