//! Experiments behind each preset.

use cheshire_core::{Axis, CanonicalObservable, Coupling, Experiment, GaussianPointer, Result};

use crate::config::{ExperimentConfig, Preset, SWEEP_RATIOS};

/// Observable read out by each pointer axis.
pub fn observable_for(axis: Axis) -> CanonicalObservable {
    match axis {
        Axis::Vertical => CanonicalObservable::Pi1,
        Axis::Horizontal => CanonicalObservable::SigmaZ2,
    }
}

/// One simulated configuration. The sweep preset has several.
#[derive(Debug, Clone)]
pub struct Point {
    pub g_vertical: Option<f64>,
    pub g_horizontal: Option<f64>,
    pub s: f64,
    pub experiment: Experiment,
}

impl Point {
    pub fn new(g_vertical: Option<f64>, g_horizontal: Option<f64>, s: f64) -> Result<Self> {
        let mut couplings = Vec::new();
        for (axis, g) in [
            (Axis::Vertical, g_vertical),
            (Axis::Horizontal, g_horizontal),
        ] {
            if let Some(g) = g {
                let pointer = GaussianPointer::new(axis, s, g)?;
                couplings.push(Coupling::canonical(observable_for(axis), pointer));
            }
        }
        Ok(Point {
            g_vertical,
            g_horizontal,
            s,
            experiment: Experiment::cheshire(couplings),
        })
    }

    pub fn coupling(&self, axis: Axis) -> Option<f64> {
        match axis {
            Axis::Vertical => self.g_vertical,
            Axis::Horizontal => self.g_horizontal,
        }
    }
}

pub fn points(config: &ExperimentConfig) -> Result<Vec<Point>> {
    let (gv, gh, s) = (config.g_vertical, config.g_horizontal, config.s);
    match config.preset {
        Preset::WeakCheshire | Preset::JointStrong => Ok(vec![Point::new(Some(gv), Some(gh), s)?]),
        Preset::WhichPath => Ok(vec![Point::new(Some(gv), None, s)?]),
        Preset::SmileOnly => Ok(vec![Point::new(None, Some(gh), s)?]),
        Preset::Sweep => SWEEP_RATIOS
            .iter()
            .map(|r| Point::new(Some(r * s), Some(r * s), s))
            .collect(),
    }
}
