use std::fmt::Write as _;

use serde::Serialize;

use super::log::{TrajectoryLog, TrajectoryRecord};
use super::SimError;
use crate::vehicle::wrap_angle;

pub const COMPARE_CHANNELS: [&str; 10] = ["u", "v", "w", "p", "q", "r", "z", "psi", "theta", "phi"];

fn channels(r: &TrajectoryRecord) -> [f64; 10] {
    [
        r.nu.u,
        r.nu.v,
        r.nu.w,
        r.nu.p,
        r.nu.q,
        r.nu.r,
        r.pose.z,
        r.pose.psi,
        r.pose.theta,
        r.pose.phi,
    ]
}

fn is_angle(i: usize) -> bool {
    i >= 7
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelError {
    pub channel: &'static str,
    pub rms: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub channels: Vec<ChannelError>,
}

impl CompareReport {
    pub fn channel(&self, name: &str) -> Option<&ChannelError> {
        self.channels.iter().find(|c| c.channel == name)
    }

    /// Sum of the channel RMS values.
    pub fn total_rms(&self) -> f64 {
        self.channels.iter().map(|c| c.rms).sum()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} samples over [{:.3}, {:.3}] s\n{:<8}{:>14}{:>14}\n",
            self.samples, self.t_start, self.t_end, "channel", "rms", "max"
        );
        for c in &self.channels {
            let _ = writeln!(s, "{:<8}{:>14.6e}{:>14.6e}", c.channel, c.rms, c.max);
        }
        s
    }
}

/// Linear interpolation of `log` at `t`; angles are interpolated along the
/// short arc. `t` must lie within the log's time range.
fn interpolate(log: &[TrajectoryRecord], t: f64) -> [f64; 10] {
    let i = log.partition_point(|r| r.t <= t);
    if i == 0 {
        return channels(&log[0]);
    }
    if i >= log.len() {
        return channels(&log[log.len() - 1]);
    }
    let (a, b) = (&log[i - 1], &log[i]);
    let s = (t - a.t) / (b.t - a.t);
    let (ca, cb) = (channels(a), channels(b));
    std::array::from_fn(|k| {
        if is_angle(k) {
            wrap_angle(ca[k] + s * wrap_angle(cb[k] - ca[k]))
        } else {
            ca[k] + s * (cb[k] - ca[k])
        }
    })
}

/// Per-channel RMS and max error of `sim` against `measured`, evaluated at
/// the measured time stamps that fall inside the simulated time range.
pub fn compare(sim: &TrajectoryLog, measured: &TrajectoryLog) -> Result<CompareReport, SimError> {
    let (Some(first), Some(last)) = (sim.records.first(), sim.records.last()) else {
        return Err(SimError::NoOverlap);
    };
    let pts: Vec<&TrajectoryRecord> = measured
        .records
        .iter()
        .filter(|r| r.t >= first.t && r.t <= last.t)
        .collect();
    if pts.is_empty() {
        return Err(SimError::NoOverlap);
    }
    let mut sq = [0.0; 10];
    let mut max = [0.0f64; 10];
    for m in &pts {
        let s = interpolate(&sim.records, m.t);
        let c = channels(m);
        for k in 0..10 {
            let d = if is_angle(k) {
                wrap_angle(s[k] - c[k])
            } else {
                s[k] - c[k]
            };
            sq[k] += d * d;
            max[k] = max[k].max(d.abs());
        }
    }
    let n = pts.len() as f64;
    Ok(CompareReport {
        samples: pts.len(),
        t_start: pts[0].t,
        t_end: pts[pts.len() - 1].t,
        channels: (0..10)
            .map(|k| ChannelError {
                channel: COMPARE_CHANNELS[k],
                rms: (sq[k] / n).sqrt(),
                max: max[k],
            })
            .collect(),
    })
}
