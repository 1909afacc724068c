//! Average constant velocity motion model: velocity is estimated as the
//! displacement over the last `N` frames divided by the true frame gap, then
//! extrapolated linearly. `N = 2` reproduces the plain two-frame difference
//! baseline.

use crate::geometry::BBox;

/// Per-frame rates for the box center and size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub dx: f64,
    pub dy: f64,
    pub dw: f64,
    pub dh: f64,
}

impl Velocity {
    pub const ZERO: Velocity = Velocity {
        dx: 0.0,
        dy: 0.0,
        dw: 0.0,
        dh: 0.0,
    };
}

/// Frame-stamped box observations of one tracklet plus the averaging window.
#[derive(Debug, Clone)]
pub struct MotionState {
    observations: Vec<(u32, BBox)>,
    window: u32,
    freeze_size: bool,
}

impl MotionState {
    /// `window` is the averaging span N in frames and must be at least 2.
    /// With `freeze_size` the predicted box keeps the last observed size.
    pub fn new(window: u32, freeze_size: bool) -> Self {
        debug_assert!(window >= 2, "velocity window must be at least 2");
        Self {
            observations: Vec::new(),
            window,
            freeze_size,
        }
    }

    pub fn from_observations(
        obs: impl IntoIterator<Item = (u32, BBox)>,
        window: u32,
        freeze_size: bool,
    ) -> Self {
        let mut state = Self::new(window, freeze_size);
        for (frame, bbox) in obs {
            state.push(frame, bbox);
        }
        state
    }

    pub fn push(&mut self, frame: u32, bbox: BBox) {
        debug_assert!(
            self.observations.last().is_none_or(|(f, _)| *f < frame),
            "frames must be strictly increasing"
        );
        self.observations.push((frame, bbox));
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn last(&self) -> Option<&(u32, BBox)> {
        self.observations.last()
    }

    /// False while fewer than two observations exist; the velocity then
    /// defaults to zero and predictions are low-confidence.
    pub fn velocity_reliable(&self) -> bool {
        self.observations.len() >= 2
    }

    /// Average velocity over the window of the last `N` frames:
    /// `(x_t - x_ref) / (t - f_ref)` where the reference is the observation
    /// whose frame is closest to `t - (N - 1)` (ties go to the earlier
    /// frame). `N = 2` is therefore bit-identical to the two-frame baseline
    /// `x_t - x_{t-1}`. Trajectories shorter than the window degrade to the
    /// full-span average `(x_t - x_{t-(L-1)}) / (L - 1)`; for gapped
    /// trajectories the divisor is the true frame gap, keeping the per-frame
    /// rate. A single observation yields zero velocity.
    pub fn average_velocity(&self) -> Velocity {
        let Some(&(t, last)) = self.observations.last() else {
            return Velocity::ZERO;
        };
        if self.observations.len() < 2 {
            return Velocity::ZERO;
        }
        let target = t as i64 - (self.window as i64 - 1);
        let &(f_ref, ref_box) = self.observations[..self.observations.len() - 1]
            .iter()
            .min_by_key(|(f, _)| ((*f as i64 - target).abs(), *f))
            .unwrap();
        let gap = (t - f_ref) as f64;
        let (cx, cy) = last.center();
        let (rx, ry) = ref_box.center();
        Velocity {
            dx: (cx - rx) / gap,
            dy: (cy - ry) / gap,
            dw: (last.width - ref_box.width) / gap,
            dh: (last.height - ref_box.height) / gap,
        }
    }

    /// Extrapolates the box `p` frames past the last observation (negative
    /// `p` extrapolates backward). `p = 0` returns the last observed box
    /// exactly; sizes are floored at zero.
    ///
    /// Panics if no observation has been recorded.
    pub fn predict(&self, p: i64) -> BBox {
        let &(_, last) = self
            .observations
            .last()
            .expect("predict requires at least one observation");
        if p == 0 {
            return last;
        }
        let v = self.average_velocity();
        let (cx, cy) = last.center();
        let steps = p as f64;
        let width = if self.freeze_size {
            last.width
        } else {
            (last.width + v.dw * steps).max(0.0)
        };
        let height = if self.freeze_size {
            last.height
        } else {
            (last.height + v.dh * steps).max(0.0)
        };
        BBox::from_center(cx + v.dx * steps, cy + v.dy * steps, width, height)
    }
}
