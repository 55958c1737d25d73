pub const DEFAULT_COLLAPSE_EPSILON: f64 = 1e-3;

/// Outcome of scanning a trajectory for collapse onto an eigenstate of `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseReport {
    pub collapsed: bool,
    /// 0 for the eigenstate of the larger eigenvalue (`z = +1`), 1 otherwise.
    pub target_index: Option<usize>,
    /// Start of the final run of samples with `|z| >= 1 - ε`.
    pub collapse_time: Option<f64>,
}

impl CollapseReport {
    pub fn not_collapsed() -> Self {
        Self {
            collapsed: false,
            target_index: None,
            collapse_time: None,
        }
    }
}

/// A sampled trajectory that can be tested for collapse.
pub trait CollapseSeries {
    fn sample_times(&self) -> &[f64];
    /// Bloch `z` in the eigenbasis of `A`, one value per sample.
    fn collapse_coordinates(&self) -> Vec<f64>;
}

/// Collapsed iff `|z| >= 1 - ε` holds from some sample through the last one.
pub fn detect_collapse<S: CollapseSeries + ?Sized>(series: &S, epsilon: f64) -> CollapseReport {
    let mut tracker = CollapseTracker::new(epsilon);
    for (&t, z) in series.sample_times().iter().zip(series.collapse_coordinates()) {
        tracker.observe(t, z);
    }
    tracker.report()
}

/// Streaming form of [`detect_collapse`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct CollapseTracker {
    threshold: f64,
    run_start: Option<f64>,
    last_z: f64,
}

impl CollapseTracker {
    pub fn new(epsilon: f64) -> Self {
        Self {
            threshold: 1.0 - epsilon,
            run_start: None,
            last_z: 0.0,
        }
    }

    #[inline]
    pub fn observe(&mut self, t: f64, z: f64) {
        if z.abs() >= self.threshold {
            self.run_start.get_or_insert(t);
        } else {
            self.run_start = None;
        }
        self.last_z = z;
    }

    pub fn report(&self) -> CollapseReport {
        match self.run_start {
            Some(t) => CollapseReport {
                collapsed: true,
                target_index: Some(if self.last_z > 0.0 { 0 } else { 1 }),
                collapse_time: Some(t),
            },
            None => CollapseReport::not_collapsed(),
        }
    }
}
