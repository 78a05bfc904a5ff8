//! CSV trajectory and command logs, and the run summary.

use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::propulsion::THRUSTER_COUNT;
use crate::vehicle::{BodyVelocity, GeneralizedForce, Pose};

pub const TRAJECTORY_HEADER: [&str; 27] = [
    "t", "x", "y", "z", "phi", "theta", "psi", "u", "v", "w", "p", "q", "r", "X", "Y", "Z", "K", "M", "N", "f1", "f2",
    "f3", "f4", "f5", "mode", "e", "ev",
];

pub const RPM_HEADER: [&str; 6] = ["t", "n1", "n2", "n3", "n4", "n5"];

/// What produced the forces of a log row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogMode {
    Heading,
    Sway,
    OpenLoop,
}

impl LogMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LogMode::Heading => "heading",
            LogMode::Sway => "sway",
            LogMode::OpenLoop => "open_loop",
        }
    }
}

impl FromStr for LogMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heading" => Ok(LogMode::Heading),
            "sway" => Ok(LogMode::Sway),
            "open_loop" => Ok(LogMode::OpenLoop),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub pose: Pose,
    pub nu: BodyVelocity,
    /// Commanded generalized force in closed loop, delivered force in replay.
    pub tau: GeneralizedForce,
    /// Per-thruster force [N].
    pub f: [f64; THRUSTER_COUNT],
    pub mode: LogMode,
    pub e: f64,
    pub e_v: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub records: Vec<TrajectoryRecord>,
}

fn malformed(line: u64, message: impl Into<String>) -> SimError {
    SimError::MalformedLog {
        line,
        message: message.into(),
    }
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<(), SimError> {
    if headers.iter().ne(expected.iter().copied()) {
        return Err(malformed(
            1,
            format!(
                "expected header '{}', got '{}'",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn parse_field(rec: &csv::StringRecord, i: usize, line: u64, names: &[&str]) -> Result<f64, SimError> {
    rec[i]
        .trim()
        .parse::<f64>()
        .map_err(|_| malformed(line, format!("field '{}' is not a number: '{}'", names[i], &rec[i])))
}

/// Parses every field in `idx` after checking the field count.
fn parse_fields(
    rec: &csv::StringRecord,
    line: u64,
    idx: impl IntoIterator<Item = usize>,
    names: &[&str],
) -> Result<Vec<f64>, SimError> {
    if rec.len() != names.len() {
        return Err(malformed(
            line,
            format!("expected {} fields, got {}", names.len(), rec.len()),
        ));
    }
    idx.into_iter().map(|i| parse_field(rec, i, line, names)).collect()
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(r)
}

fn record_line(rec: &csv::StringRecord, fallback: u64) -> u64 {
    rec.position().map_or(fallback, |p| p.line())
}

fn csv_error(e: csv::Error) -> SimError {
    let line = e.position().map_or(0, |p| p.line());
    malformed(line, e.to_string())
}

/// Checks strictly increasing time stamps.
fn check_time(prev: Option<f64>, t: f64, line: u64) -> Result<(), SimError> {
    if !t.is_finite() {
        return Err(malformed(line, "time stamp must be finite"));
    }
    if prev.is_some_and(|p| t <= p) {
        return Err(malformed(line, format!("time stamp {t} is not after the previous one")));
    }
    Ok(())
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(TRAJECTORY_HEADER)?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(TRAJECTORY_HEADER.len());
            row.push(r.t.to_string());
            row.extend(r.pose.to_vector().iter().map(f64::to_string));
            row.extend(r.nu.to_vector().iter().map(f64::to_string));
            row.extend(r.tau.to_vector().iter().map(f64::to_string));
            row.extend(r.f.iter().map(f64::to_string));
            row.push(r.mode.as_str().to_string());
            row.push(r.e.to_string());
            row.push(r.e_v.to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let mut rd = reader(r);
        check_header(&rd.headers().map_err(csv_error)?.clone(), &TRAJECTORY_HEADER)?;
        let mut records = Vec::new();
        let mut prev = None;
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let line = record_line(&rec, i as u64 + 2);
            let v = parse_fields(&rec, line, (0..24).chain(25..27), &TRAJECTORY_HEADER)?;
            let mode: LogMode = rec[24].trim().parse().map_err(|m: String| malformed(line, m))?;
            check_time(prev, v[0], line)?;
            prev = Some(v[0]);
            records.push(TrajectoryRecord {
                t: v[0],
                pose: Pose::new(v[1], v[2], v[3], v[4], v[5], v[6]),
                nu: BodyVelocity::new(v[7], v[8], v[9], v[10], v[11], v[12]),
                tau: GeneralizedForce::new(v[13], v[14], v[15], v[16], v[17], v[18]),
                f: [v[19], v[20], v[21], v[22], v[23]],
                mode,
                e: v[24],
                e_v: v[25],
            });
        }
        Ok(Self { records })
    }
}

/// Timed thruster speed commands.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RpmLog {
    pub samples: Vec<(f64, [f64; THRUSTER_COUNT])>,
}

impl RpmLog {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Zero-order hold: the latest command at or before `t`, or zero before
    /// the first sample.
    pub fn command_at(&self, t: f64) -> [f64; THRUSTER_COUNT] {
        let idx = self.samples.partition_point(|(ts, _)| *ts <= t);
        if idx == 0 {
            [0.0; THRUSTER_COUNT]
        } else {
            self.samples[idx - 1].1
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(RPM_HEADER)?;
        for (t, n) in &self.samples {
            let row: Vec<String> = std::iter::once(*t)
                .chain(n.iter().copied())
                .map(|v| v.to_string())
                .collect();
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let mut rd = reader(r);
        check_header(&rd.headers().map_err(csv_error)?.clone(), &RPM_HEADER)?;
        let mut samples = Vec::new();
        let mut prev = None;
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let line = record_line(&rec, i as u64 + 2);
            let v = parse_fields(&rec, line, 0..RPM_HEADER.len(), &RPM_HEADER)?;
            check_time(prev, v[0], line)?;
            prev = Some(v[0]);
            samples.push((v[0], [v[1], v[2], v[3], v[4], v[5]]));
        }
        Ok(Self { samples })
    }
}

/// Run summary.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub rms_cross_track_m: f64,
    pub max_roll_deg: f64,
    pub duration_s: f64,
    pub distance_m: f64,
}

impl Metrics {
    pub fn from_log(log: &TrajectoryLog) -> Self {
        let r = &log.records;
        if r.is_empty() {
            return Self::default();
        }
        let rms = (r.iter().map(|x| x.e * x.e).sum::<f64>() / r.len() as f64).sqrt();
        let max_roll = r.iter().map(|x| x.pose.phi.abs()).fold(0.0, f64::max).to_degrees();
        let distance = r
            .windows(2)
            .map(|w| (w[1].pose.position() - w[0].pose.position()).norm())
            .sum();
        Self {
            rms_cross_track_m: rms,
            max_roll_deg: max_roll,
            duration_s: r[r.len() - 1].t - r[0].t,
            distance_m: distance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> TrajectoryRecord {
        TrajectoryRecord {
            t,
            pose: Pose::new(1.0 / 3.0, t, 2.0, 0.01, -0.02, 1.5),
            nu: BodyVelocity::new(0.2, -0.01, 0.0, 1e-17, 0.0, 0.003),
            tau: GeneralizedForce::new(1.0, 2.0, 3.0, 0.0, 0.0, -1.0),
            f: [0.1, 0.2, 0.3, 0.4, std::f64::consts::PI],
            mode: LogMode::Sway,
            e: 0.123456789012345,
            e_v: -0.1,
        }
    }

    #[test]
    fn trajectory_round_trip_is_bit_exact() {
        let log = TrajectoryLog {
            records: (0..5).map(|k| record(k as f64 * 0.01)).collect(),
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x,y,z,phi,theta,psi,u,v,w,p,q,r,X,Y,Z,K,M,N,f1,f2,f3,f4,f5,mode,e,ev\n"));
        assert!(!text.contains('\r'));
        assert_eq!(TrajectoryLog::read_csv(&buf[..]).unwrap(), log);
    }

    #[test]
    fn rpm_round_trip_and_hold() {
        let log = RpmLog {
            samples: vec![(0.0, [1.0; 5]), (0.5, [2.0, 0.0, 0.0, 0.0, -1.0])],
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("t,n1,n2,n3,n4,n5\n"));
        let back = RpmLog::read_csv(&buf[..]).unwrap();
        assert_eq!(back, log);
        assert_eq!(back.command_at(-1.0), [0.0; 5]);
        assert_eq!(back.command_at(0.49), [1.0; 5]);
        assert_eq!(back.command_at(0.5)[0], 2.0);
        assert_eq!(back.command_at(9.0)[4], -1.0);
    }

    #[test]
    fn out_of_order_rpm_rejected_with_line() {
        let text = "t,n1,n2,n3,n4,n5\n0,0,0,0,0,0\n1,0,0,0,0,0\n0.5,0,0,0,0,0\n";
        match RpmLog::read_csv(text.as_bytes()) {
            Err(SimError::MalformedLog { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_number_and_header_rejected() {
        let text = "t,n1,n2,n3,n4,n5\n0,0,x,0,0,0\n";
        assert!(matches!(
            RpmLog::read_csv(text.as_bytes()),
            Err(SimError::MalformedLog { line: 2, .. })
        ));
        let text = "t,n1,n2\n0,0,0\n";
        assert!(matches!(
            RpmLog::read_csv(text.as_bytes()),
            Err(SimError::MalformedLog { line: 1, .. })
        ));
        let text = "t,n1,n2,n3,n4,n5\n0,0,0\n";
        assert!(matches!(
            RpmLog::read_csv(text.as_bytes()),
            Err(SimError::MalformedLog { line: 2, .. })
        ));
    }

    #[test]
    fn metrics_of_simple_log() {
        let mut a = record(0.0);
        let mut b = record(2.0);
        a.pose = Pose::at(0.0, 0.0, 0.0, 0.0);
        b.pose = Pose::at(3.0, 4.0, 0.0, 0.0);
        b.pose.phi = -0.1;
        a.e = 1.0;
        b.e = -1.0;
        let m = Metrics::from_log(&TrajectoryLog { records: vec![a, b] });
        assert_eq!(m.rms_cross_track_m, 1.0);
        assert_eq!(m.distance_m, 5.0);
        assert_eq!(m.duration_s, 2.0);
        assert!((m.max_roll_deg - 0.1f64.to_degrees()).abs() < 1e-12);
        let json = serde_json::to_value(m).unwrap();
        for k in ["rms_cross_track_m", "max_roll_deg", "duration_s", "distance_m"] {
            assert!(json.get(k).is_some());
        }
        assert_eq!(Metrics::from_log(&TrajectoryLog::default()), Metrics::default());
    }
}
