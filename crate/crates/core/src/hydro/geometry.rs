//! Vehicle envelope dimensions and the hull radius profile.
//!
//! Body x points forward with its origin at the center of buoyancy, so the
//! nose station `x_n` is the largest coordinate and the tail end `x_3` the
//! smallest. The horizontal-thruster mount section spans `[x_2, x_1]`.

use serde::{Deserialize, Serialize};

use super::HydroError;

/// Piecewise-linear hull radius `r(x)` given as `(x, r)` knots sorted by `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HullProfile {
    knots: Vec<[f64; 2]>,
}

impl HullProfile {
    pub fn new(knots: Vec<[f64; 2]>) -> Result<Self, HydroError> {
        if knots.len() < 2 {
            return Err(HydroError::InvalidGeometry(
                "hull profile needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1][0] <= w[0][0] {
                return Err(HydroError::InvalidGeometry(format!(
                    "hull profile stations must increase (x = {} then {})",
                    w[0][0], w[1][0]
                )));
            }
        }
        if knots.iter().any(|k| k[1] < 0.0 || !k[1].is_finite()) {
            return Err(HydroError::InvalidGeometry(
                "hull profile radius must be non-negative".into(),
            ));
        }
        Ok(Self { knots })
    }

    /// Ellipsoidal nose, cylindrical midbody and conical tail.
    pub fn torpedo(
        length: f64,
        diameter: f64,
        x_nose: f64,
        nose_length: f64,
        tail_length: f64,
        tail_radius: f64,
    ) -> Self {
        let r = diameter / 2.0;
        let x_tail = x_nose - length;
        let mut knots = vec![[x_tail, tail_radius], [x_tail + tail_length, r]];
        const NOSE_SAMPLES: usize = 48;
        for i in 0..=NOSE_SAMPLES {
            // cosine spacing concentrates samples near the blunt tip
            let s = 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / NOSE_SAMPLES as f64).cos();
            let x = x_nose - nose_length + s * nose_length;
            let rad = r * (1.0 - s * s).max(0.0).sqrt();
            if x > knots.last().unwrap()[0] {
                knots.push([x, rad]);
            }
        }
        Self { knots }
    }

    /// A straight cylinder; used by tests and degenerate configs.
    pub fn cylinder(x_start: f64, x_end: f64, radius: f64) -> Self {
        Self {
            knots: vec![[x_start, radius], [x_end, radius]],
        }
    }

    pub fn knots(&self) -> &[[f64; 2]] {
        &self.knots
    }

    pub fn x_min(&self) -> f64 {
        self.knots[0][0]
    }

    pub fn x_max(&self) -> f64 {
        self.knots[self.knots.len() - 1][0]
    }

    pub fn max_radius(&self) -> f64 {
        self.knots.iter().map(|k| k[1]).fold(0.0, f64::max)
    }

    /// Local radius; zero outside the profile.
    pub fn radius(&self, x: f64) -> f64 {
        if x < self.x_min() || x > self.x_max() {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| k[0] <= x);
        if i == 0 {
            return self.knots[0][1];
        }
        if i >= self.knots.len() {
            return self.knots[self.knots.len() - 1][1];
        }
        let [x0, r0] = self.knots[i - 1];
        let [x1, r1] = self.knots[i];
        r0 + (r1 - r0) * (x - x0) / (x1 - x0)
    }
}

/// Drag inputs for appendages the empirical hull formulas do not cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AppendageDrag {
    /// Axial drag coefficient of the mast referred to `w_m * h_m`.
    pub mast_axial_cd: f64,
    /// Cross-flow drag coefficient of the mast referred to `c_m * h_m`.
    pub mast_cross_cd: f64,
    /// Thickness of each thruster mount plate [m].
    pub mount_thickness: f64,
    /// Drag coefficient of a mount plate, edge-on and broadside.
    pub mount_cd: f64,
    /// Additive axial damping from the tunnel openings [kg/m], negative.
    pub tunnel_opening_x_uu: f64,
}

impl Default for AppendageDrag {
    fn default() -> Self {
        Self {
            mast_axial_cd: 0.1,
            mast_cross_cd: 1.17,
            mount_thickness: 0.01,
            mount_cd: 1.17,
            tunnel_opening_x_uu: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleGeometry {
    /// Hull length and diameter [m].
    pub l_h: f64,
    pub d_h: f64,
    /// Horizontal-thruster body length and diameter [m].
    pub l_th: f64,
    pub d_th: f64,
    /// Mast width (axial thickness), height and chord [m].
    pub w_m: f64,
    pub h_m: f64,
    pub c_m: f64,
    /// Axial station of the mast [m].
    pub x_m: f64,
    /// Nose station [m].
    pub x_n: f64,
    /// Forward and aft ends of the mount section, and the tail end [m].
    pub x_1: f64,
    pub x_2: f64,
    pub x_3: f64,
    /// Mount span from the section center [m].
    pub b: f64,
    /// Moment arms of the horizontal pair and the two lateral thrusters [m].
    pub y_th: f64,
    pub x_th4: f64,
    pub x_th5: f64,
    /// Tunnel cross-section area [m^2].
    pub a_th: f64,
    pub profile: HullProfile,
    #[serde(default)]
    pub appendages: AppendageDrag,
}

impl VehicleGeometry {
    /// ALICE envelope: 1.6 m x 0.23 m hull. Station and appendage values
    /// are read from drawings, not reported numbers.
    pub fn alice() -> Self {
        let (l_h, d_h, x_n) = (1.6, 0.23, 0.826);
        Self {
            l_h,
            d_h,
            l_th: 0.45,
            d_th: 0.13,
            w_m: 0.03,
            h_m: 0.25,
            c_m: 0.20,
            x_m: -0.35,
            x_n,
            x_1: -0.20,
            x_2: -0.65,
            x_3: x_n - l_h,
            b: 0.16,
            y_th: 0.18,
            x_th4: 0.55,
            x_th5: -0.65,
            a_th: std::f64::consts::PI * 0.04 * 0.04,
            profile: HullProfile::torpedo(l_h, d_h, x_n, 0.18, 0.30, 0.04),
            appendages: AppendageDrag::default(),
        }
    }

    /// Hull-only variant: every appendage dimension zeroed.
    pub fn hull_only(&self) -> Self {
        Self {
            l_th: 0.0,
            d_th: 0.0,
            w_m: 0.0,
            h_m: 0.0,
            c_m: 0.0,
            // no fins at all; a zero span never exceeds the local radius
            b: 0.0,
            appendages: AppendageDrag {
                mount_thickness: 0.0,
                tunnel_opening_x_uu: 0.0,
                ..self.appendages.clone()
            },
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), HydroError> {
        let bad = |msg: String| Err(HydroError::InvalidGeometry(msg));
        if !(self.l_h > 0.0 && self.d_h > 0.0) {
            return bad("hull length and diameter must be positive".into());
        }
        for (name, v) in [
            ("l_th", self.l_th),
            ("d_th", self.d_th),
            ("w_m", self.w_m),
            ("h_m", self.h_m),
            ("c_m", self.c_m),
            ("a_th", self.a_th),
            ("b", self.b),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.x_3 < self.x_2 && self.x_2 < self.x_1 && self.x_1 < self.x_n) {
            return bad(format!(
                "stations must satisfy x_3 < x_2 < x_1 < x_n (got {}, {}, {}, {})",
                self.x_3, self.x_2, self.x_1, self.x_n
            ));
        }
        if self.profile.max_radius() > self.d_h / 2.0 + 1e-12 {
            return bad(format!(
                "hull profile radius {} exceeds d_h/2 = {}",
                self.profile.max_radius(),
                self.d_h / 2.0
            ));
        }
        if self.l_th > 0.0 && self.d_th > self.l_th {
            return bad("thruster body diameter exceeds its length".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alice_geometry_is_valid() {
        VehicleGeometry::alice().validate().unwrap();
    }

    #[test]
    fn torpedo_profile_envelope() {
        let g = VehicleGeometry::alice();
        let p = &g.profile;
        assert!((p.x_max() - g.x_n).abs() < 1e-12);
        assert!((p.x_min() - g.x_3).abs() < 1e-12);
        assert!((p.radius(0.0) - 0.115).abs() < 1e-12);
        assert!(p.radius(g.x_n) < 1e-9);
        assert!((p.radius(g.x_3) - 0.04).abs() < 1e-12);
        assert_eq!(p.radius(2.0), 0.0);
    }

    #[test]
    fn station_order_enforced() {
        let mut g = VehicleGeometry::alice();
        g.x_1 = g.x_2 - 0.1;
        assert!(g.validate().is_err());
    }

    #[test]
    fn oversize_profile_rejected() {
        let mut g = VehicleGeometry::alice();
        g.profile = HullProfile::cylinder(g.x_3, g.x_n, 0.2);
        assert!(g.validate().is_err());
    }

    #[test]
    fn non_monotone_knots_rejected() {
        assert!(HullProfile::new(vec![[0.0, 0.1], [0.0, 0.1]]).is_err());
    }
}
