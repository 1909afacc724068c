//! CLEAR-MOT (MOTA, FP, FN, IDSW, Recall, Precision) and identity-based
//! (IDF1/IDP/IDR) evaluation of result files against ground truth.
//!
//! Matching uses plain IoU at the benchmark threshold; the association
//! metrics of the HOTA family are deliberately not computed here.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::assignment::min_cost_assignment;
use crate::geometry::iou;
use crate::mot_io::MotRow;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// Frame-level CLEAR counts for one sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClearCounts {
    /// Total ground-truth boxes.
    pub gt_count: u64,
    /// Matched ground-truth boxes (true positives).
    pub matches: u64,
    pub false_positives: u64,
    pub misses: u64,
    pub id_switches: u64,
}

/// Identity-measure counts for one sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdCounts {
    pub idtp: u64,
    pub idfp: u64,
    pub idfn: u64,
}

/// Evaluation of a single sequence (or of an aggregate over sequences).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEval {
    pub name: String,
    pub clear: ClearCounts,
    pub id: IdCounts,
}

impl SequenceEval {
    /// `1 - (FP + FN + IDSW) / GT`; may be negative. An empty ground truth
    /// scores 1 when nothing was predicted either, 0 otherwise.
    pub fn mota(&self) -> f64 {
        let c = &self.clear;
        if c.gt_count == 0 {
            return if c.false_positives + c.id_switches == 0 {
                1.0
            } else {
                0.0
            };
        }
        1.0 - (c.false_positives + c.misses + c.id_switches) as f64 / c.gt_count as f64
    }

    pub fn recall(&self) -> f64 {
        if self.clear.gt_count == 0 {
            1.0
        } else {
            self.clear.matches as f64 / self.clear.gt_count as f64
        }
    }

    pub fn precision(&self) -> f64 {
        let denom = self.clear.matches + self.clear.false_positives;
        if denom == 0 {
            0.0
        } else {
            self.clear.matches as f64 / denom as f64
        }
    }

    pub fn idf1(&self) -> f64 {
        let denom = 2 * self.id.idtp + self.id.idfp + self.id.idfn;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.id.idtp as f64 / denom as f64
        }
    }

    pub fn idp(&self) -> f64 {
        let denom = self.id.idtp + self.id.idfp;
        if denom == 0 {
            0.0
        } else {
            self.id.idtp as f64 / denom as f64
        }
    }

    pub fn idr(&self) -> f64 {
        let denom = self.id.idtp + self.id.idfn;
        if denom == 0 {
            0.0
        } else {
            self.id.idtp as f64 / denom as f64
        }
    }
}

/// Per-sequence evaluations plus the counts-summed aggregate.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub sequences: Vec<SequenceEval>,
}

impl EvalReport {
    pub fn new(sequences: Vec<SequenceEval>) -> Self {
        Self { sequences }
    }

    pub fn aggregate(&self) -> SequenceEval {
        let mut clear = ClearCounts::default();
        let mut id = IdCounts::default();
        for s in &self.sequences {
            clear.gt_count += s.clear.gt_count;
            clear.matches += s.clear.matches;
            clear.false_positives += s.clear.false_positives;
            clear.misses += s.clear.misses;
            clear.id_switches += s.clear.id_switches;
            id.idtp += s.id.idtp;
            id.idfp += s.id.idfp;
            id.idfn += s.id.idfn;
        }
        SequenceEval {
            name: "AGGREGATE".into(),
            clear,
            id,
        }
    }

    fn rows(&self) -> Vec<&SequenceEval> {
        self.sequences.iter().collect()
    }

    /// CSV with one row per sequence plus the AGGREGATE row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "sequence,mota,recall,precision,fp,fn,idsw,idf1,idp,idr,gt,matches\n",
        );
        let agg = self.aggregate();
        for s in self.rows().into_iter().chain([&agg]) {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{},{},{},{:.6},{:.6},{:.6},{},{}",
                s.name,
                s.mota(),
                s.recall(),
                s.precision(),
                s.clear.false_positives,
                s.clear.misses,
                s.clear.id_switches,
                s.idf1(),
                s.idp(),
                s.idr(),
                s.clear.gt_count,
                s.clear.matches,
            )
            .unwrap();
        }
        out
    }

    /// Aligned text table for terminal output.
    pub fn to_table(&self) -> String {
        let agg = self.aggregate();
        let mut out = format!(
            "{:<16} {:>7} {:>7} {:>7} {:>7} {:>7} {:>6} {:>7} {:>7} {:>7}\n",
            "sequence", "MOTA", "IDF1", "Recall", "Prcn", "FP", "FN", "IDSW", "GT", "TP"
        );
        for s in self.rows().into_iter().chain([&agg]) {
            writeln!(
                out,
                "{:<16} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7} {:>6} {:>7} {:>7} {:>7}",
                s.name,
                s.mota(),
                s.idf1(),
                s.recall(),
                s.precision(),
                s.clear.false_positives,
                s.clear.misses,
                s.clear.id_switches,
                s.clear.gt_count,
                s.clear.matches,
            )
            .unwrap();
        }
        out.push_str("HOTA/DetA/AssA are not computed here; run the official TrackEval toolkit for those.\n");
        out
    }
}

fn by_frame(rows: &[MotRow]) -> BTreeMap<u32, Vec<&MotRow>> {
    let mut map: BTreeMap<u32, Vec<&MotRow>> = BTreeMap::new();
    for row in rows {
        map.entry(row.frame).or_default().push(row);
    }
    map
}

/// CLEAR-MOT protocol: per frame, matches surviving from the previous frame
/// are carried over first (while still above the IoU threshold), then the
/// remaining boxes are matched by optimal assignment maximizing total IoU.
/// An identity switch is counted when a ground-truth target is matched to a
/// different prediction id than its most recent match.
pub fn clear_mot(gt: &[MotRow], results: &[MotRow], iou_threshold: f64) -> ClearCounts {
    let gt_frames = by_frame(gt);
    let res_frames = by_frame(results);
    let mut counts = ClearCounts {
        gt_count: gt.len() as u64,
        ..Default::default()
    };

    // gt id -> prediction id of the most recent match (for switch counting)
    let mut last_match: HashMap<i64, i64> = HashMap::new();
    // matches present in the previous frame (for carry-over)
    let mut prev_frame_match: HashMap<i64, i64> = HashMap::new();

    let frames: Vec<u32> = gt_frames
        .keys()
        .chain(res_frames.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    for frame in frames {
        let gts = gt_frames.get(&frame).map(Vec::as_slice).unwrap_or(&[]);
        let preds = res_frames.get(&frame).map(Vec::as_slice).unwrap_or(&[]);
        let pred_by_id: BTreeMap<i64, &MotRow> = preds.iter().map(|r| (r.id, *r)).collect();

        let mut frame_match: HashMap<i64, i64> = HashMap::new();
        let mut claimed_preds: std::collections::BTreeSet<i64> = Default::default();

        // carry-over pass, in gt id order for determinism
        let mut gts_sorted: Vec<&MotRow> = gts.to_vec();
        gts_sorted.sort_by_key(|g| g.id);
        for g in &gts_sorted {
            if let Some(&p_id) = prev_frame_match.get(&g.id) {
                if claimed_preds.contains(&p_id) {
                    continue;
                }
                if let Some(p) = pred_by_id.get(&p_id) {
                    if iou(&g.bbox(), &p.bbox()) >= iou_threshold {
                        frame_match.insert(g.id, p_id);
                        claimed_preds.insert(p_id);
                    }
                }
            }
        }

        // optimal assignment over what is left
        let rest_gt: Vec<&MotRow> = gts_sorted
            .iter()
            .filter(|g| !frame_match.contains_key(&g.id))
            .copied()
            .collect();
        let rest_pred: Vec<&MotRow> = pred_by_id
            .values()
            .filter(|p| !claimed_preds.contains(&p.id))
            .copied()
            .collect();
        if !rest_gt.is_empty() && !rest_pred.is_empty() {
            let cost: Vec<Vec<f64>> = rest_gt
                .iter()
                .map(|g| {
                    rest_pred
                        .iter()
                        .map(|p| {
                            let overlap = iou(&g.bbox(), &p.bbox());
                            if overlap >= iou_threshold {
                                1.0 - overlap
                            } else {
                                f64::INFINITY
                            }
                        })
                        .collect()
                })
                .collect();
            for (gi, pi) in min_cost_assignment(&cost) {
                frame_match.insert(rest_gt[gi].id, rest_pred[pi].id);
            }
        }

        for (&g_id, &p_id) in frame_match.iter() {
            counts.matches += 1;
            if let Some(&prev) = last_match.get(&g_id) {
                if prev != p_id {
                    counts.id_switches += 1;
                }
            }
            last_match.insert(g_id, p_id);
        }
        counts.misses += (gts.len() - frame_match.len()) as u64;
        counts.false_positives += (preds.len() - frame_match.len()) as u64;
        prev_frame_match = frame_match;
    }
    counts
}

/// Per-pair binary overlap: frames where both identities have a box with
/// IoU at or above the threshold.
fn identity_overlap_matrix(
    gt: &[MotRow],
    results: &[MotRow],
    iou_threshold: f64,
) -> (Vec<i64>, Vec<i64>, Vec<Vec<u64>>) {
    let mut gt_ids: Vec<i64> = gt.iter().map(|r| r.id).collect();
    gt_ids.sort_unstable();
    gt_ids.dedup();
    let mut pred_ids: Vec<i64> = results.iter().map(|r| r.id).collect();
    pred_ids.sort_unstable();
    pred_ids.dedup();

    let gt_pos: HashMap<i64, usize> = gt_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let pred_pos: HashMap<i64, usize> =
        pred_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut overlap = vec![vec![0u64; pred_ids.len()]; gt_ids.len()];
    let gt_frames = by_frame(gt);
    let res_frames = by_frame(results);
    for (frame, gts) in &gt_frames {
        let Some(preds) = res_frames.get(frame) else {
            continue;
        };
        for g in gts {
            for p in preds {
                if iou(&g.bbox(), &p.bbox()) >= iou_threshold {
                    overlap[gt_pos[&g.id]][pred_pos[&p.id]] += 1;
                }
            }
        }
    }
    (gt_ids, pred_ids, overlap)
}

/// Identity measures: a global one-to-one assignment between ground-truth and
/// predicted identities maximizing the total per-pair overlap. IDTP is that
/// maximum; IDFN and IDFP are the uncovered ground-truth and prediction
/// frames.
pub fn idf1(gt: &[MotRow], results: &[MotRow], iou_threshold: f64) -> IdCounts {
    let (gt_ids, pred_ids, overlap) = identity_overlap_matrix(gt, results, iou_threshold);
    let idtp = if gt_ids.is_empty() || pred_ids.is_empty() {
        0
    } else {
        let cost: Vec<Vec<f64>> = overlap
            .iter()
            .map(|row| row.iter().map(|&o| -(o as f64)).collect())
            .collect();
        min_cost_assignment(&cost)
            .into_iter()
            .map(|(i, j)| overlap[i][j])
            .sum()
    };
    IdCounts {
        idtp,
        idfp: results.len() as u64 - idtp,
        idfn: gt.len() as u64 - idtp,
    }
}

/// Full CLEAR + identity evaluation of one sequence.
pub fn evaluate_sequence(
    name: impl Into<String>,
    gt: &[MotRow],
    results: &[MotRow],
    iou_threshold: f64,
) -> SequenceEval {
    SequenceEval {
        name: name.into(),
        clear: clear_mot(gt, results, iou_threshold),
        id: idf1(gt, results, iou_threshold),
    }
}
