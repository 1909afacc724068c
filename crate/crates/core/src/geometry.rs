//! Bounding boxes and the spatial distance family used for tracklet
//! association: IoU, GIoU, the length-ratio modulated GIoU distances, and the
//! spatio-temporal modulation factor derived from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Axis-aligned box in continuous pixel coordinates, MOT convention:
/// `(left, top, width, height)` with non-negative sizes.
///
/// Zero-width or zero-height boxes occur in real detection files and are
/// accepted everywhere; each metric below has a documented value for them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl BBox {
    pub fn new(left: f64, top: f64, width: f64, height: f64) -> Self {
        debug_assert!(width >= 0.0 && height >= 0.0, "box sizes must be non-negative");
        Self {
            left,
            top,
            width,
            height,
        }
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.left + self.width / 2.0, self.top + self.height / 2.0)
    }

    pub fn from_center(cx: f64, cy: f64, width: f64, height: f64) -> Self {
        Self::new(cx - width / 2.0, cy - height / 2.0, width, height)
    }

    /// True when the box has zero width or height and therefore cannot
    /// support a meaningful length ratio.
    pub fn is_degenerate(&self) -> bool {
        self.width <= 0.0 || self.height <= 0.0
    }

    fn intersection_area(&self, other: &BBox) -> f64 {
        let w = (self.right().min(other.right()) - self.left.max(other.left)).max(0.0);
        let h = (self.bottom().min(other.bottom()) - self.top.max(other.top)).max(0.0);
        w * h
    }

    /// Smallest axis-aligned box containing both boxes.
    pub fn enclosing(&self, other: &BBox) -> BBox {
        let left = self.left.min(other.left);
        let top = self.top.min(other.top);
        BBox::new(
            left,
            top,
            self.right().max(other.right()) - left,
            self.bottom().max(other.bottom()) - top,
        )
    }
}

/// Intersection over union in `[0, 1]`. Returns 0 when the union has zero
/// area.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Generalized IoU in `[-1, 1]`: IoU minus the fraction of the enclosing box
/// not covered by the union. Equals IoU when the enclosing box is exactly the
/// union; tends to -1 as the boxes separate. Returns 0 when the enclosing box
/// itself has zero area (both boxes degenerate at one point).
pub fn giou(a: &BBox, b: &BBox) -> f64 {
    let c_area = a.enclosing(b).area();
    if c_area <= 0.0 {
        return 0.0;
    }
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    let iou_term = if union <= 0.0 { 0.0 } else { inter / union };
    iou_term - (c_area - union) / c_area
}

/// Which per-box length modulates the GIoU term in [`modulated_giou`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Diagonal,
    Width,
    Height,
    None,
}

fn box_length(b: &BBox, mode: Modulation) -> f64 {
    match mode {
        Modulation::Diagonal => b.diagonal(),
        Modulation::Width => b.width,
        Modulation::Height => b.height,
        Modulation::None => 1.0,
    }
}

/// Symmetric length ratio `min(la, lb) / max(la, lb)` in `(0, 1]` for the
/// given modulation mode. Falls back to 1 when the larger length is zero
/// (degenerate pair) and for `Modulation::None`.
pub fn length_ratio(a: &BBox, b: &BBox, mode: Modulation) -> f64 {
    if mode == Modulation::None {
        return 1.0;
    }
    let la = box_length(a, mode);
    let lb = box_length(b, mode);
    let max = la.max(lb);
    if max <= 0.0 {
        1.0
    } else {
        la.min(lb) / max
    }
}

/// Length-ratio modulated GIoU distance `1 - r * GIoU` in `[0, 2]`, where
/// `r` is [`length_ratio`] for the given mode. `Modulation::None` gives the
/// plain GIoU distance.
pub fn modulated_giou(a: &BBox, b: &BBox, mode: Modulation) -> f64 {
    1.0 - length_ratio(a, b, mode) * giou(a, b)
}

/// Spatio-temporal modulation factor `min(1, d/2 + off)`.
///
/// `d` is a spatial distance in `[0, 2]`; dividing by 2 normalizes it to
/// `[0, 1]` before the offset and clamp. Monotone non-decreasing in `d` and
/// saturating at 1.
pub fn spatial_modulation(d: f64, off: f64) -> f64 {
    (d / 2.0 + off).min(1.0)
}

/// The spatial distance used between a predicted box and a candidate box
/// during tracklet merging. `Iou` is the compatibility metric of the
/// pre-modulation pipeline; the remaining variants are the GIoU distance
/// family with different length modulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialMetric {
    Iou,
    Giou,
    Wgiou,
    Hgiou,
    Dgiou,
}

impl SpatialMetric {
    pub const ALL: [SpatialMetric; 5] = [
        SpatialMetric::Iou,
        SpatialMetric::Giou,
        SpatialMetric::Wgiou,
        SpatialMetric::Hgiou,
        SpatialMetric::Dgiou,
    ];

    /// Distance form of the metric: `1 - IoU` in `[0, 1]` for `Iou`, the
    /// modulated GIoU distance in `[0, 2]` otherwise.
    pub fn distance(&self, a: &BBox, b: &BBox) -> f64 {
        match self {
            SpatialMetric::Iou => 1.0 - iou(a, b),
            SpatialMetric::Giou => modulated_giou(a, b, Modulation::None),
            SpatialMetric::Wgiou => modulated_giou(a, b, Modulation::Width),
            SpatialMetric::Hgiou => modulated_giou(a, b, Modulation::Height),
            SpatialMetric::Dgiou => modulated_giou(a, b, Modulation::Diagonal),
        }
    }
}

impl fmt::Display for SpatialMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpatialMetric::Iou => "iou",
            SpatialMetric::Giou => "giou",
            SpatialMetric::Wgiou => "wgiou",
            SpatialMetric::Hgiou => "hgiou",
            SpatialMetric::Dgiou => "dgiou",
        };
        f.write_str(s)
    }
}

impl FromStr for SpatialMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "iou" => Ok(SpatialMetric::Iou),
            "giou" => Ok(SpatialMetric::Giou),
            "wgiou" => Ok(SpatialMetric::Wgiou),
            "hgiou" => Ok(SpatialMetric::Hgiou),
            "dgiou" => Ok(SpatialMetric::Dgiou),
            other => Err(format!(
                "unknown spatial metric '{other}' (expected iou, giou, wgiou, hgiou or dgiou)"
            )),
        }
    }
}
