//! Survey planning, imaging cadence and configuration files.

mod config;

pub use config::{
    CoefficientSource, Config, ConfigError, EnvironmentConfig, GainsConfig, MissionConfig, VehicleConfig,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::guidance::{VerticalReference, Waypoint};

/// Hardware frame-rate ceiling of the camera [fps].
pub const MAX_FRAME_RATE: f64 = 10.0;

const SQUARE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MissionError {
    #[error("region {short:.3} m wide cannot hold transects {spacing:.3} m apart")]
    RegionTooSmall { short: f64, spacing: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

/// Rectangle given by four corners in order around its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 4]", into = "[[f64; 2]; 4]")]
pub struct Region {
    corners: [[f64; 2]; 4],
}

impl TryFrom<[[f64; 2]; 4]> for Region {
    type Error = MissionError;

    fn try_from(c: [[f64; 2]; 4]) -> Result<Self, Self::Error> {
        Region::from_corners(c)
    }
}

impl From<Region> for [[f64; 2]; 4] {
    fn from(r: Region) -> Self {
        r.corners
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

impl Region {
    pub fn from_corners(corners: [[f64; 2]; 4]) -> Result<Self, MissionError> {
        if corners.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MissionError::InvalidRegion("corners must be finite".into()));
        }
        let a = sub(corners[1], corners[0]);
        let b = sub(corners[3], corners[0]);
        let scale = norm(a).max(norm(b)).max(1.0);
        let closing = sub(sub(corners[2], corners[1]), b);
        if norm(closing) > SQUARE_TOL * scale || (a[0] * b[0] + a[1] * b[1]).abs() > SQUARE_TOL * scale * scale {
            return Err(MissionError::InvalidRegion("corners do not form a rectangle".into()));
        }
        Ok(Self { corners })
    }

    /// Axis-aligned `length` (North) by `width` (East) rectangle at `origin`.
    pub fn axis_aligned(origin: [f64; 2], length: f64, width: f64) -> Result<Self, MissionError> {
        let [x, y] = origin;
        Self::from_corners([[x, y], [x + length, y], [x + length, y + width], [x, y + width]])
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        self.corners
    }

    /// Long side as `(corner, unit direction, length)` and the short side
    /// as `(unit direction, length)`.
    fn axes(&self) -> ([f64; 2], [f64; 2], f64, [f64; 2], f64) {
        let c = self.corners;
        let a = sub(c[1], c[0]);
        let b = sub(c[3], c[0]);
        let (la, lb) = (norm(a), norm(b));
        let unit = |v: [f64; 2], l: f64| [v[0] / l, v[1] / l];
        if la >= lb {
            (c[0], unit(a, la), la, unit(b, lb), lb)
        } else {
            (c[0], unit(b, lb), lb, unit(a, la), la)
        }
    }

    /// Direction of the long side.
    pub fn orientation(&self) -> f64 {
        let (_, l, _, _, _) = self.axes();
        l[1].atan2(l[0])
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        let (o, l, ll, s, ls) = self.axes();
        let d = sub(p, o);
        let along = d[0] * l[0] + d[1] * l[1];
        let across = d[0] * s[0] + d[1] * s[1];
        along >= -tol && along <= ll + tol && across >= -tol && across <= ls + tol
    }
}

/// Echo of the camera settings used for the survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraSettings {
    pub frame_rate: f64,
    pub exposure_ms: f64,
    /// f-number.
    pub aperture: f64,
    pub focus_distance: f64,
}

impl Default for CameraSettings {
    fn default() -> Self {
        Self {
            frame_rate: 0.25,
            exposure_ms: 2.0,
            aperture: 4.0,
            focus_distance: 2.0,
        }
    }
}

/// Image footprint on the seabed at the reference altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraFootprint {
    pub along_track: f64,
    pub cross_track: f64,
    /// Seabed resolution [mm/px].
    pub resolution: f64,
}

impl CameraFootprint {
    /// 12.5 mm lens at 2 m altitude.
    pub fn lens_12_5mm() -> Self {
        Self {
            along_track: 1.16,
            cross_track: 1.4,
            resolution: 0.57,
        }
    }
}

impl Default for CameraFootprint {
    fn default() -> Self {
        Self::lens_12_5mm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub waypoints: Vec<Waypoint>,
    pub speed: f64,
    pub spacing: f64,
    pub altitude: f64,
    pub vertical: VerticalReference,
    pub camera: CameraSettings,
}

impl MissionPlan {
    /// A plan with no waypoints; runs complete immediately.
    pub fn empty(speed: f64) -> Self {
        Self {
            waypoints: Vec::new(),
            speed,
            spacing: 1.0,
            altitude: 2.0,
            vertical: VerticalReference::Altitude(2.0),
            camera: CameraSettings::default(),
        }
    }

    /// Straight run between two points at a fixed depth.
    pub fn line(from: [f64; 2], to: [f64; 2], depth: f64, speed: f64) -> Self {
        Self {
            waypoints: vec![
                Waypoint::new(from[0], from[1], depth),
                Waypoint::new(to[0], to[1], depth),
            ],
            vertical: VerticalReference::Depth,
            ..Self::empty(speed)
        }
    }

    pub fn validate(&self) -> Result<(), MissionError> {
        let bad = |m: &str| Err(MissionError::InvalidPlan(m.into()));
        if self.waypoints.len() < 2 {
            return bad("a plan needs at least two waypoints");
        }
        if !(self.speed > 0.0) {
            return bad("speed must be positive");
        }
        if !(self.spacing > 0.0) {
            return bad("spacing must be positive");
        }
        Ok(())
    }

    /// Transect segments: every other segment starting with the first.
    pub fn transects(&self) -> impl Iterator<Item = (Waypoint, Waypoint)> + '_ {
        self.waypoints.windows(2).step_by(2).map(|w| (w[0], w[1]))
    }
}

/// Boustrophedon survey: transects parallel to the long side, `spacing`
/// apart, starting on the first corner's long edge and alternating
/// direction. Waypoint depths are zero; the vehicle holds `altitude`.
pub fn plan_lawnmower(region: &Region, spacing: f64, altitude: f64, speed: f64) -> Result<MissionPlan, MissionError> {
    if !(spacing > 0.0 && speed > 0.0 && altitude > 0.0) {
        return Err(MissionError::InvalidPlan(
            "spacing, speed and altitude must be positive".into(),
        ));
    }
    let (o, l, ll, s, ls) = region.axes();
    if !(ls > 0.0) || spacing > ls * (1.0 + SQUARE_TOL) {
        return Err(MissionError::RegionTooSmall { short: ls, spacing });
    }
    let count = (ls / spacing * (1.0 + SQUARE_TOL)).floor() as usize + 1;
    let mut waypoints = Vec::with_capacity(2 * count);
    for k in 0..count {
        let off = k as f64 * spacing;
        let a = [o[0] + off * s[0], o[1] + off * s[1]];
        let b = [a[0] + ll * l[0], a[1] + ll * l[1]];
        let (p, q) = if k % 2 == 0 { (a, b) } else { (b, a) };
        waypoints.push(Waypoint::new(p[0], p[1], 0.0));
        waypoints.push(Waypoint::new(q[0], q[1], 0.0));
    }
    Ok(MissionPlan {
        waypoints,
        speed,
        spacing,
        altitude,
        vertical: VerticalReference::Altitude(altitude),
        camera: CameraSettings {
            frame_rate: frame_rate(speed, altitude, DEFAULT_OVERLAP),
            focus_distance: altitude,
            ..CameraSettings::default()
        },
    })
}

/// Along-track overlap assumed when no other value is configured.
pub const DEFAULT_OVERLAP: f64 = 0.6;

/// Frame rate for the along-track overlap `overlap` at speed `u` and
/// altitude `h`: `u / (h (1 - overlap))`, clamped to [`MAX_FRAME_RATE`].
///
/// Requires `h > 0` and `0 <= overlap < 1`; otherwise the result is NaN.
pub fn frame_rate(u: f64, h: f64, overlap: f64) -> f64 {
    if !(h > 0.0 && (0.0..1.0).contains(&overlap)) {
        return f64::NAN;
    }
    let r = u / (h * (1.0 - overlap));
    if r > MAX_FRAME_RATE {
        log::warn!("frame rate {r:.2} fps exceeds the camera limit; clamped to {MAX_FRAME_RATE} fps");
        MAX_FRAME_RATE
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Percent of the footprint shared by consecutive frames.
    pub along_track_pct: f64,
    /// Percent of the footprint shared by adjacent transects.
    pub cross_track_pct: f64,
    /// Adjacent transects leave uncovered seabed.
    pub cross_track_gap: bool,
    /// Consecutive frames leave uncovered seabed.
    pub along_track_gap: bool,
}

/// Overlaps the plan actually achieves with the given footprint.
pub fn overlap_report(footprint: &CameraFootprint, plan: &MissionPlan) -> OverlapReport {
    let advance = plan.speed / plan.camera.frame_rate;
    let along = 1.0 - advance / footprint.along_track;
    let cross = 1.0 - plan.spacing / footprint.cross_track;
    let report = OverlapReport {
        along_track_pct: 100.0 * along.max(0.0),
        cross_track_pct: 100.0 * cross.max(0.0),
        cross_track_gap: cross < 0.0,
        along_track_gap: along < 0.0,
    };
    if report.cross_track_gap {
        log::warn!(
            "transect spacing {} m exceeds footprint width {} m",
            plan.spacing,
            footprint.cross_track
        );
    }
    if report.along_track_gap {
        log::warn!(
            "frames {advance:.3} m apart exceed footprint length {} m",
            footprint.along_track
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn survey_area_gets_sixteen_transects() {
        let r = Region::axis_aligned([0.0, 0.0], 17.0, 15.0).unwrap();
        let p = plan_lawnmower(&r, 1.0, 2.0, 0.2).unwrap();
        assert_eq!(p.transects().count(), 16);
        for (a, b) in p.transects() {
            assert_eq!((b.x - a.x).abs(), 17.0);
            assert_eq!(a.y, b.y);
        }
        assert!(p.waypoints.iter().all(|w| r.contains([w.x, w.y], 1e-9)));
        assert_eq!(p.camera.frame_rate, 0.25);
    }

    #[test]
    fn spacing_equal_width_gives_two() {
        let r = Region::axis_aligned([0.0, 0.0], 10.0, 3.0).unwrap();
        assert_eq!(plan_lawnmower(&r, 3.0, 2.0, 0.2).unwrap().transects().count(), 2);
        assert!(matches!(
            plan_lawnmower(&r, 3.5, 2.0, 0.2),
            Err(MissionError::RegionTooSmall { .. })
        ));
    }

    #[test]
    fn degenerate_region_too_small() {
        let r = Region::axis_aligned([0.0, 0.0], 10.0, 0.0).unwrap();
        assert!(matches!(
            plan_lawnmower(&r, 1.0, 2.0, 0.2),
            Err(MissionError::RegionTooSmall { .. })
        ));
    }

    #[test]
    fn skewed_corners_rejected() {
        assert!(Region::from_corners([[0.0, 0.0], [2.0, 0.0], [3.0, 1.0], [1.0, 1.0]]).is_err());
    }

    #[test]
    fn frame_rate_examples() {
        assert_eq!(frame_rate(0.2, 2.0, 0.60), 0.25);
        assert_eq!(frame_rate(0.2, 2.0, 0.0), 0.1);
        assert_eq!(frame_rate(5.0, 0.5, 0.5), MAX_FRAME_RATE);
        assert!(frame_rate(0.2, 0.0, 0.5).is_nan());
        assert!(frame_rate(0.2, 2.0, 1.0).is_nan());
    }

    #[test]
    fn overlap_examples() {
        let r = Region::axis_aligned([0.0, 0.0], 17.0, 15.0).unwrap();
        let p = plan_lawnmower(&r, 1.0, 2.0, 0.2).unwrap();
        let rep = overlap_report(&CameraFootprint::lens_12_5mm(), &p);
        assert!((rep.cross_track_pct - 100.0 * 0.4 / 1.4).abs() < 1e-9);
        assert!(!rep.cross_track_gap);
        // 0.8 m per frame against a 1.16 m footprint
        assert!((rep.along_track_pct - 100.0 * (1.0 - 0.8 / 1.16)).abs() < 1e-9);
        let wide = MissionPlan {
            spacing: 2.0,
            ..p.clone()
        };
        let rep = overlap_report(&CameraFootprint::lens_12_5mm(), &wide);
        assert_eq!(rep.cross_track_pct, 0.0);
        assert!(rep.cross_track_gap);
        let slow = MissionPlan {
            camera: CameraSettings {
                frame_rate: 0.1,
                ..p.camera
            },
            ..p
        };
        let rep = overlap_report(&CameraFootprint::lens_12_5mm(), &slow);
        assert_eq!(rep.along_track_pct, 0.0);
        assert!(rep.along_track_gap);
    }

    #[test]
    fn plan_validation() {
        assert!(MissionPlan::empty(0.2).validate().is_err());
        assert!(MissionPlan::line([0.0, 0.0], [1.0, 0.0], 2.0, 0.2).validate().is_ok());
        assert!(MissionPlan::line([0.0, 0.0], [1.0, 0.0], 2.0, 0.0).validate().is_err());
    }

    proptest! {
        #[test]
        fn rotated_region_transects_follow_orientation(theta in -PI..PI, len in 5.0f64..30.0, wid in 1.0f64..4.9, spacing in 0.3f64..1.0, ox in -50.0f64..50.0, oy in -50.0f64..50.0) {
            let (c, s) = (theta.cos(), theta.sin());
            let rot = |x: f64, y: f64| [ox + x * c - y * s, oy + x * s + y * c];
            let r = Region::from_corners([rot(0.0, 0.0), rot(len, 0.0), rot(len, wid), rot(0.0, wid)]).unwrap();
            let p = plan_lawnmower(&r, spacing, 2.0, 0.2).unwrap();
            for (a, b) in p.transects() {
                let h = (b.y - a.y).atan2(b.x - a.x);
                let d = crate::vehicle::wrap_angle(h - r.orientation());
                prop_assert!(d.abs() < 1e-9 || (d.abs() - PI).abs() < 1e-9);
            }
            prop_assert!(p.waypoints.iter().all(|w| r.contains([w.x, w.y], 1e-9)));
        }

        #[test]
        fn transect_spacing_is_exact(len in 5.0f64..40.0, wid in 1.0f64..20.0, spacing in 0.2f64..1.0) {
            let r = Region::axis_aligned([3.0, -7.0], len.max(wid), wid.min(len)).unwrap();
            let p = plan_lawnmower(&r, spacing, 2.0, 0.2).unwrap();
            for (k, (a, _)) in p.transects().enumerate() {
                prop_assert_eq!(a.y, -7.0 + k as f64 * spacing);
            }
        }

        #[test]
        fn frame_rate_homogeneous(u in 0.01f64..1.0, h in 0.5f64..10.0, o in 0.0f64..0.9, k in 0.1f64..10.0) {
            let a = frame_rate(u, h, o);
            let b = frame_rate(k * u, k * h, o);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
