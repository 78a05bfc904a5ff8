//! Path following along straight waypoint segments.
//!
//! The classic controller steers with a line-of-sight heading only. The
//! sway-augmented controller holds the path direction and closes the
//! cross-track error with a sway-velocity demand when the error is small,
//! falling back to line-of-sight steering when it is large.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vehicle::{wrap_angle, BodyVelocity, GeneralizedForce, Pose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuidanceError {
    #[error("segment start and end coincide at ({0}, {1})")]
    DegenerateSegment(f64, f64),
    #[error("invalid gains: {0}")]
    InvalidGains(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    /// North [m].
    pub x: f64,
    /// East [m].
    pub y: f64,
    /// Depth [m]; ignored under altitude control.
    #[serde(default)]
    pub z: f64,
}

impl Waypoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl PathSegment {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Result<Self, GuidanceError> {
        if start == end {
            return Err(GuidanceError::DegenerateSegment(start[0], start[1]));
        }
        Ok(Self { start, end })
    }

    /// Path direction.
    pub fn beta(&self) -> f64 {
        (self.end[1] - self.start[1]).atan2(self.end[0] - self.start[0])
    }

    pub fn length(&self) -> f64 {
        (self.end[1] - self.start[1]).hypot(self.end[0] - self.start[0])
    }

    /// Distance along the path from `start` of the orthogonal projection.
    pub fn along_track(&self, pos: [f64; 2]) -> f64 {
        let b = self.beta();
        (pos[0] - self.start[0]) * b.cos() + (pos[1] - self.start[1]) * b.sin()
    }
}

/// Heading toward the point `delta` beyond the projection of `pos`,
/// clamped to the segment end.
pub fn los_heading(pos: [f64; 2], seg: &PathSegment, delta: f64) -> f64 {
    let b = seg.beta();
    let s = (seg.along_track(pos) + delta).min(seg.length());
    let target = [seg.start[0] + s * b.cos(), seg.start[1] + s * b.sin()];
    wrap_angle((target[1] - pos[1]).atan2(target[0] - pos[0]))
}

/// Signed cross-track error (positive to starboard of the path direction)
/// and its component along the body sway axis.
pub fn cross_track(pos: [f64; 2], seg: &PathSegment, psi: f64) -> (f64, f64) {
    let b = seg.beta();
    let e = -(pos[0] - seg.start[0]) * b.sin() + (pos[1] - seg.start[1]) * b.cos();
    (e, e * (b - psi).cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the integral state.
    pub integral_limit: f64,
    /// Bound on the output.
    pub output_limit: f64,
}

impl PidGains {
    pub const fn new(kp: f64, ki: f64, kd: f64, integral_limit: f64, output_limit: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            integral_limit,
            output_limit,
        }
    }

    fn validate(&self, name: &str) -> Result<(), GuidanceError> {
        let vals = [self.kp, self.ki, self.kd, self.integral_limit, self.output_limit];
        if vals.iter().any(|v| !(*v >= 0.0)) {
            return Err(GuidanceError::InvalidGains(format!(
                "{name}: gains and limits must be non-negative"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PidState {
    pub integral: f64,
}

impl PidState {
    fn integrate(&mut self, error: f64, dt: f64, limit: f64) {
        self.integral = (self.integral + error * dt).clamp(-limit, limit);
    }
}

/// `k_P e_v + k_I ∫e_v dt + k_D v̇`, saturated to the output limit.
pub fn sway_pid(e_v: f64, vdot: f64, gains: &PidGains, state: &mut PidState, dt: f64) -> f64 {
    state.integrate(e_v, dt, gains.integral_limit);
    let out = gains.kp * e_v + gains.ki * state.integral + gains.kd * vdot;
    out.clamp(-gains.output_limit, gains.output_limit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceMode {
    HeadingLos,
    SwayLos,
}

impl GuidanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GuidanceMode::HeadingLos => "heading",
            GuidanceMode::SwayLos => "sway",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Line-of-sight heading only; no sway demand.
    Original,
    /// Sway-augmented line of sight with mode switching.
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum VerticalReference {
    /// Track each waypoint's depth.
    Depth,
    /// Hold this height above the seabed [m].
    Altitude(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerGains {
    /// Cross-track sway law; output limit is the largest sway demand [m/s].
    pub sway: PidGains,
    pub heading: PidGains,
    pub surge: PidGains,
    pub sway_velocity: PidGains,
    pub depth: PidGains,
    pub e_on: f64,
    pub e_off: f64,
    /// Look-ahead distance [m].
    pub lookahead: f64,
    /// Time constant of the sway-acceleration filter [s].
    pub vdot_filter: f64,
    /// Surge demand is scaled by `max(cos Δψ, 0)^turn_slowdown` so the
    /// vehicle pivots rather than overshoots at corners; 0 disables.
    pub turn_slowdown: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            sway: PidGains::new(1.0, 0.1, 0.5, 5.0, 0.3),
            heading: PidGains::new(8.0, 0.5, 15.0, 2.0, 10.0),
            surge: PidGains::new(60.0, 10.0, 0.0, 3.0, 40.0),
            sway_velocity: PidGains::new(80.0, 30.0, 0.0, 2.0, 40.0),
            depth: PidGains::new(40.0, 2.0, 60.0, 5.0, 30.0),
            e_on: 1.0,
            e_off: 0.5,
            lookahead: 3.2,
            vdot_filter: 0.5,
            turn_slowdown: 2.0,
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        self.sway.validate("sway")?;
        self.heading.validate("heading")?;
        self.surge.validate("surge")?;
        self.sway_velocity.validate("sway_velocity")?;
        self.depth.validate("depth")?;
        if !(self.e_off < self.e_on && self.e_off >= 0.0) {
            return Err(GuidanceError::InvalidGains(format!(
                "need 0 <= e_off < e_on, got e_off = {}, e_on = {}",
                self.e_off, self.e_on
            )));
        }
        if !(self.lookahead > 0.0) {
            return Err(GuidanceError::InvalidGains("look-ahead must be positive".into()));
        }
        if !(self.turn_slowdown >= 0.0) {
            return Err(GuidanceError::InvalidGains("turn slowdown must be non-negative".into()));
        }
        if !(self.vdot_filter >= 0.0) {
            return Err(GuidanceError::InvalidGains(
                "filter constant must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoints {
    pub psi: f64,
    pub v: f64,
    pub u: f64,
    /// Depth demand [m].
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceOutput {
    pub setpoints: Setpoints,
    pub mode: GuidanceMode,
    pub e: f64,
    pub e_v: f64,
    pub segment: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuidanceStatus {
    Active,
    MissionComplete,
}

/// Waypoint-following state machine.
#[derive(Debug, Clone)]
pub struct Guidance {
    pub kind: ControllerKind,
    pub gains: ControllerGains,
    pub speed: f64,
    pub vertical: VerticalReference,
    waypoints: Vec<Waypoint>,
    segment: usize,
    mode: GuidanceMode,
    sway_state: PidState,
    prev_v: Option<f64>,
    vdot: f64,
}

impl Guidance {
    /// Consecutive duplicate waypoints are dropped.
    pub fn new(
        waypoints: &[Waypoint],
        speed: f64,
        vertical: VerticalReference,
        kind: ControllerKind,
        gains: ControllerGains,
    ) -> Result<Self, GuidanceError> {
        gains.validate()?;
        let mut wps: Vec<Waypoint> = Vec::with_capacity(waypoints.len());
        for w in waypoints {
            if wps.last().is_none_or(|l| l.x != w.x || l.y != w.y) {
                wps.push(*w);
            }
        }
        Ok(Self {
            kind,
            gains,
            speed,
            vertical,
            waypoints: wps,
            segment: 0,
            mode: GuidanceMode::HeadingLos,
            sway_state: PidState::default(),
            prev_v: None,
            vdot: 0.0,
        })
    }

    pub fn mode(&self) -> GuidanceMode {
        self.mode
    }

    pub fn segment_index(&self) -> usize {
        self.segment
    }

    pub fn current_segment(&self) -> Option<PathSegment> {
        let a = self.waypoints.get(self.segment)?;
        let b = self.waypoints.get(self.segment + 1)?;
        PathSegment::new([a.x, a.y], [b.x, b.y]).ok()
    }

    pub fn is_complete(&self) -> bool {
        self.segment + 1 >= self.waypoints.len()
    }

    fn update_vdot(&mut self, v: f64, dt: f64) {
        if let Some(prev) = self.prev_v {
            let raw = (v - prev) / dt;
            let a = dt / (self.gains.vdot_filter + dt);
            self.vdot += a * (raw - self.vdot);
        }
        self.prev_v = Some(v);
    }

    /// Advance the guidance by one step. Returns `None` once the last
    /// waypoint has been passed.
    pub fn path_follow_step(
        &mut self,
        pose: &Pose,
        nu: &BodyVelocity,
        seabed_depth: f64,
        dt: f64,
    ) -> Option<GuidanceOutput> {
        self.update_vdot(nu.v, dt);
        let pos = [pose.x, pose.y];
        let seg = loop {
            let seg = self.current_segment()?;
            if seg.along_track(pos) >= seg.length() {
                self.segment += 1;
                continue;
            }
            break seg;
        };
        let (e, e_v) = cross_track(pos, &seg, pose.psi);
        let psi_los = los_heading(pos, &seg, self.gains.lookahead);

        let next_mode = match self.kind {
            ControllerKind::Original => GuidanceMode::HeadingLos,
            ControllerKind::Modified => {
                if e.abs() > self.gains.e_on {
                    GuidanceMode::HeadingLos
                } else if e.abs() < self.gains.e_off {
                    GuidanceMode::SwayLos
                } else {
                    self.mode
                }
            }
        };
        if next_mode != self.mode && next_mode == GuidanceMode::HeadingLos {
            self.sway_state = PidState::default();
        }
        self.mode = next_mode;

        let (psi, v) = match self.mode {
            GuidanceMode::HeadingLos => (psi_los, 0.0),
            GuidanceMode::SwayLos => (
                wrap_angle(seg.beta()),
                -sway_pid(e_v, self.vdot, &self.gains.sway, &mut self.sway_state, dt),
            ),
        };
        let z = match self.vertical {
            VerticalReference::Depth => self.waypoints[self.segment + 1].z,
            VerticalReference::Altitude(h) => seabed_depth - h,
        };
        let u = if self.gains.turn_slowdown > 0.0 {
            self.speed * wrap_angle(psi - pose.psi).cos().max(0.0).powf(self.gains.turn_slowdown)
        } else {
            self.speed
        };
        Some(GuidanceOutput {
            setpoints: Setpoints { psi, v, u, z },
            mode: self.mode,
            e,
            e_v,
            segment: self.segment,
        })
    }
}

/// Independent PID loops from setpoints to a generalized force demand.
#[derive(Debug, Clone, Default)]
pub struct InnerLoops {
    heading: PidState,
    surge: PidState,
    sway: PidState,
    depth: PidState,
}

impl InnerLoops {
    pub fn new() -> Self {
        Self::default()
    }

    /// Heading, surge, sway-velocity and depth loops. Derivative terms act
    /// on the measured rates. `sway_enabled = false` leaves `Y` at zero.
    pub fn step(
        &mut self,
        sp: &Setpoints,
        pose: &Pose,
        nu: &BodyVelocity,
        gains: &ControllerGains,
        sway_enabled: bool,
        dt: f64,
    ) -> GeneralizedForce {
        let loop_out = |g: &PidGains, st: &mut PidState, err: f64, rate: f64| {
            st.integrate(err, dt, g.integral_limit);
            (g.kp * err + g.ki * st.integral - g.kd * rate).clamp(-g.output_limit, g.output_limit)
        };
        let e_psi = wrap_angle(sp.psi - pose.psi);
        let n = loop_out(&gains.heading, &mut self.heading, e_psi, nu.r);
        let x = loop_out(&gains.surge, &mut self.surge, sp.u - nu.u, 0.0);
        let y = if sway_enabled {
            loop_out(&gains.sway_velocity, &mut self.sway, sp.v - nu.v, 0.0)
        } else {
            0.0
        };
        let z = loop_out(&gains.depth, &mut self.depth, sp.z - pose.z, nu.w);
        GeneralizedForce::new(x, y, z, 0.0, 0.0, n)
    }
}

/// Heading difference on the circle, in (-π, π].
pub fn heading_error(target: f64, current: f64) -> f64 {
    wrap_angle(target - current)
}
