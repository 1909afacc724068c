//! The two-stage association pipeline: short reliable tracklets ("lifted
//! frames") are formed inside sliding windows by appearance matching between
//! adjacent frames, then merged into full trajectories with average-linkage
//! (UPGMA) agglomerative clustering under a spatio-temporally modulated
//! appearance distance.

use std::collections::BTreeMap;

use crate::appearance::{cosine_distance, AppearanceState, Embedding, EmbeddingObservation};
use crate::assignment::min_cost_assignment;
use crate::config::TrackerConfig;
use crate::error::Result;
use crate::geometry::{spatial_modulation, BBox};
use crate::motion::MotionState;

/// One detector output: a frame-stamped box with confidence and appearance
/// embedding. `source_index` is the detection's rank within its frame in the
/// originating file, used for embedding joins and deterministic ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub frame: u32,
    pub bbox: BBox,
    pub confidence: f64,
    pub embedding: Embedding,
    pub source_index: u32,
}

/// A temporally ordered run of detections for one tentative identity,
/// carrying its appearance representation and motion summary. Frames are
/// strictly increasing; gaps are allowed after merges.
#[derive(Debug, Clone)]
pub struct Tracklet {
    id: u64,
    detections: Vec<Detection>,
    appearance: AppearanceState,
    motion: MotionState,
}

impl Tracklet {
    /// Builds a tracklet from frame-ordered detections, deriving the
    /// appearance representation and motion state from scratch. This is also
    /// the merge path: concatenating two detection histories and rebuilding
    /// makes the result independent of merge order.
    pub fn from_detections(
        id: u64,
        detections: Vec<Detection>,
        config: &TrackerConfig,
    ) -> Result<Self> {
        assert!(!detections.is_empty(), "tracklet needs at least one detection");
        debug_assert!(
            detections.windows(2).all(|w| w[0].frame < w[1].frame),
            "tracklet frames must be strictly increasing"
        );
        let history: Vec<EmbeddingObservation<'_>> = detections
            .iter()
            .map(|d| EmbeddingObservation {
                frame: d.frame,
                embedding: &d.embedding,
                confidence: d.confidence,
            })
            .collect();
        let appearance = AppearanceState::from_history(
            &history,
            config.appearance_mode,
            config.beta_f,
            config.ema_sigma(),
        )?;
        let motion = MotionState::from_observations(
            detections.iter().map(|d| (d.frame, d.bbox)),
            config.velocity_window,
            config.freeze_size,
        );
        Ok(Self {
            id,
            detections,
            appearance,
            motion,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn start_frame(&self) -> u32 {
        self.detections.first().unwrap().frame
    }

    pub fn end_frame(&self) -> u32 {
        self.detections.last().unwrap().frame
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn into_detections(self) -> Vec<Detection> {
        self.detections
    }

    pub fn representative(&self) -> &Embedding {
        self.appearance.current()
    }

    pub fn first_bbox(&self) -> &BBox {
        &self.detections.first().unwrap().bbox
    }

    pub fn last_bbox(&self) -> &BBox {
        &self.detections.last().unwrap().bbox
    }

    /// Extrapolates the tracklet's box `p` frames past its last detection.
    pub fn predict(&self, p: i64) -> BBox {
        self.motion.predict(p)
    }
}

/// Stage 1: forms short tracklets within one window by minimum-cost
/// one-to-one matching of adjacent-frame detections on cosine appearance
/// distance, gated by `stage1_gate`. Matching only ever links frame `f` to
/// frame `f + 1`; a missing detection (or an empty frame) always ends the
/// chain, and bridging gaps is left to stage 2. Unmatched detections open
/// singleton chains. Deterministic given input order.
pub fn form_lifted_frames(
    detections: Vec<Detection>,
    config: &TrackerConfig,
    next_id: &mut u64,
) -> Result<Vec<Tracklet>> {
    let mut by_frame: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for det in detections {
        by_frame.entry(det.frame).or_default().push(det);
    }

    let mut chains: Vec<Vec<Detection>> = Vec::new();
    let mut prev_frame: Option<u32> = None;
    for (frame, dets) in by_frame {
        let adjacent = prev_frame == Some(frame - 1);
        let mut dets: Vec<Option<Detection>> = dets.into_iter().map(Some).collect();
        if adjacent {
            let open: Vec<usize> = chains
                .iter()
                .enumerate()
                .filter(|(_, c)| c.last().unwrap().frame + 1 == frame)
                .map(|(i, _)| i)
                .collect();
            if !open.is_empty() {
                let cost: Vec<Vec<f64>> = open
                    .iter()
                    .map(|&ci| {
                        let tail = &chains[ci].last().unwrap().embedding;
                        dets.iter()
                            .map(|d| {
                                let d = cosine_distance(tail, &d.as_ref().unwrap().embedding);
                                if d <= config.stage1_gate {
                                    d
                                } else {
                                    f64::INFINITY
                                }
                            })
                            .collect()
                    })
                    .collect();
                for (ci, dj) in min_cost_assignment(&cost) {
                    chains[open[ci]].push(dets[dj].take().unwrap());
                }
            }
        }
        for det in dets.into_iter().flatten() {
            chains.push(vec![det]);
        }
        prev_frame = Some(frame);
    }

    let mut tracklets = Vec::with_capacity(chains.len());
    for chain in chains {
        let id = *next_id;
        *next_id += 1;
        tracklets.push(Tracklet::from_detections(id, chain, config)?);
    }
    Ok(tracklets)
}

/// Stage-2 pairwise distance. `None` marks an infeasible pair: tracklets
/// whose frame ranges overlap cannot belong to one identity. Otherwise the
/// earlier tracklet's box is predicted forward across the gap, the spatial
/// distance to the later tracklet's first box is turned into the modulation
/// factor, and that factor discounts the appearance distance between the two
/// representatives. Symmetric because the earlier tracklet always predicts
/// toward the later one.
pub fn tracklet_distance(a: &Tracklet, b: &Tracklet, config: &TrackerConfig) -> Option<f64> {
    let (earlier, later) = if a.end_frame() < b.start_frame() {
        (a, b)
    } else if b.end_frame() < a.start_frame() {
        (b, a)
    } else {
        return None;
    };
    let gap = (later.start_frame() - earlier.end_frame()) as i64;
    let predicted = earlier.predict(gap);
    let d_sp = config.spatial_metric.distance(&predicted, later.first_bbox());
    let lambda = spatial_modulation(d_sp, config.off);
    Some(lambda * cosine_distance(earlier.representative(), later.representative()))
}

/// Average-linkage agglomerative clustering of `n` leaves under a partial
/// distance (`None` = infeasible pair).
///
/// Repeatedly merges the pair of clusters with the smallest UPGMA distance
/// (the unweighted mean of all member-pair leaf distances) until no feasible
/// pair lies below `cutoff`. A cluster pair containing any infeasible member
/// pair is itself infeasible. Exact ties are broken toward the lowest leaf
/// index pair. Returns the final clusters as leaf index groups, ordered by
/// their smallest leaf.
pub fn upgma_cluster(
    n: usize,
    cutoff: f64,
    leaf_distance: impl Fn(usize, usize) -> Option<f64>,
) -> Vec<Vec<usize>> {
    let mut active: Vec<bool> = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut sizes: Vec<f64> = vec![1.0; n];
    // full symmetric matrix of current cluster distances
    let mut dist: Vec<Option<f64>> = vec![None; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = leaf_distance(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    loop {
        // pick the feasible pair with minimum distance; ties by lowest
        // (min leaf, max leaf) of the pair — cluster slots keep their
        // smallest leaf index, so slot order is leaf order
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let Some(d) = dist[i * n + j] else { continue };
                if d >= cutoff {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => d < bd || (d == bd && (i, j) < (bi, bj)),
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((d, i, j)) = best else { break };
        debug_assert!(d < cutoff);

        // merge slot j into slot i (i < j keeps the smaller leaf as anchor)
        let (si, sj) = (sizes[i], sizes[j]);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let merged = match (dist[i * n + k], dist[j * n + k]) {
                (Some(a), Some(b)) => Some((si * a + sj * b) / (si + sj)),
                _ => None,
            };
            dist[i * n + k] = merged;
            dist[k * n + i] = merged;
        }
        sizes[i] += sizes[j];
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        active[j] = false;
    }

    (0..n)
        .filter(|&i| active[i])
        .map(|i| {
            let mut group = std::mem::take(&mut members[i]);
            group.sort_unstable();
            group
        })
        .collect()
}

/// Stage 2: clusters tracklets with UPGMA under [`tracklet_distance`] and
/// rebuilds one tracklet per final cluster from the concatenated,
/// frame-ordered detections. Merged tracklets keep the smallest member id.
/// Expects the input sorted by ascending id so that tie-breaking follows
/// tracklet ids.
pub fn upgma_merge(tracklets: Vec<Tracklet>, config: &TrackerConfig) -> Result<Vec<Tracklet>> {
    if tracklets.len() <= 1 {
        return Ok(tracklets);
    }
    debug_assert!(tracklets.windows(2).all(|w| w[0].id < w[1].id));
    let n = tracklets.len();
    let mut leaf = vec![None; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = tracklet_distance(&tracklets[i], &tracklets[j], config);
            leaf[i * n + j] = d;
        }
    }
    let groups = upgma_cluster(n, config.merge_cutoff, |i, j| {
        leaf[i.min(j) * n + i.max(j)]
    });

    let mut slots: Vec<Option<Tracklet>> = tracklets.into_iter().map(Some).collect();
    let mut merged = Vec::with_capacity(groups.len());
    for group in groups {
        if group.len() == 1 {
            merged.push(slots[group[0]].take().unwrap());
            continue;
        }
        let id = group
            .iter()
            .map(|&i| slots[i].as_ref().unwrap().id())
            .min()
            .unwrap();
        let mut detections: Vec<Detection> = group
            .iter()
            .flat_map(|&i| slots[i].take().unwrap().into_detections())
            .collect();
        detections.sort_by_key(|d| d.frame);
        merged.push(Tracklet::from_detections(id, detections, config)?);
    }
    Ok(merged)
}

/// Full pipeline: splits the sequence into consecutive non-overlapping
/// windows of `window_len` frames (anchored at the first detection frame),
/// forms lifted frames per window, merges everything with UPGMA, and
/// relabels the surviving trajectories 1..K in order of first appearance.
///
/// Detections are expected frame-sorted with confidences already filtered at
/// ingest; every input detection appears in exactly one output trajectory.
pub fn track_sequence(
    mut detections: Vec<Detection>,
    config: &TrackerConfig,
) -> Result<Vec<Tracklet>> {
    config.validate()?;
    if detections.is_empty() {
        return Ok(Vec::new());
    }
    detections.sort_by_key(|d| d.frame);
    let anchor = detections.first().unwrap().frame;

    let mut windows: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for det in detections {
        let w = (det.frame - anchor) / config.window_len;
        windows.entry(w).or_default().push(det);
    }

    let mut next_id: u64 = 1;
    let mut tracklets = Vec::new();
    for (_, window) in windows {
        tracklets.extend(form_lifted_frames(window, config, &mut next_id)?);
    }

    let mut merged = upgma_merge(tracklets, config)?;
    merged.sort_by_key(|t| {
        let first = t.detections().first().unwrap();
        (first.frame, first.source_index, t.id())
    });
    for (k, tracklet) in merged.iter_mut().enumerate() {
        tracklet.id = k as u64 + 1;
    }
    Ok(merged)
}
