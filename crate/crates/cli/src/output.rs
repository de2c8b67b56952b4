//! `shots.csv` writer.
//!
//! Header `shot_id,detector,x,y`. `x` is the vertical pointer readout and
//! `y` the horizontal one; both are empty for non-D1 shots and for axes
//! without a pointer. Floats use Rust's shortest round-trip formatting, which
//! is locale independent.

use std::io::Write;

use cheshire_core::{Axis, ShotRecord};

use crate::error::RunError;

pub const SHOTS_HEADER: [&str; 4] = ["shot_id", "detector", "x", "y"];

/// Column index of each experiment axis, `x` for vertical and `y` for horizontal.
fn columns(axes: &[Axis]) -> Vec<usize> {
    axes.iter()
        .map(|a| match a {
            Axis::Vertical => 0,
            Axis::Horizontal => 1,
        })
        .collect()
}

pub struct ShotsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> ShotsWriter<W> {
    pub fn new(sink: W) -> Result<Self, RunError> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(SHOTS_HEADER)?;
        Ok(ShotsWriter { inner })
    }

    pub fn write(&mut self, axes: &[Axis], records: &[ShotRecord]) -> Result<(), RunError> {
        let columns = columns(axes);
        for r in records {
            let mut xy = [String::new(), String::new()];
            if let Some(readout) = &r.readout {
                for (&c, v) in columns.iter().zip(readout) {
                    xy[c] = v.to_string();
                }
            }
            self.inner.write_record([
                r.shot_id.to_string().as_str(),
                r.detector.name(),
                &xy[0],
                &xy[1],
            ])?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, RunError> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| RunError::Io(e.into_error()))
    }
}
