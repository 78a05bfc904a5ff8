use std::f64::consts::PI;

use super::{converged_integral, HydroError, VehicleGeometry};

/// Lower end of the Reynolds range the empirical drag formulas cover.
pub const MIN_REYNOLDS: f64 = 1.0e4;

/// ITTC-57 skin-friction line, returned positive.
pub fn ittc57_friction(reynolds: f64) -> f64 {
    0.075 / (reynolds.log10() - 2.0).powi(2)
}

/// Axial drag coefficient of a streamlined body of revolution referred to
/// its frontal area.
pub fn ellipsoid_axial_drag_coefficient(l: f64, d: f64, cf: f64) -> f64 {
    0.44 * (d / l) + 4.0 * cf * (l / d) + 4.0 * cf * (d / l).sqrt()
}

fn reynolds(part: &'static str, speed: f64, length: f64, nu: f64) -> Result<f64, HydroError> {
    let re = speed.abs() * length / nu;
    if !(re >= MIN_REYNOLDS) {
        return Err(HydroError::ReynoldsOutOfRange { part, reynolds: re });
    }
    Ok(re)
}

fn body_axial(part: &'static str, l: f64, d: f64, rho: f64, speed: f64, nu: f64) -> Result<f64, HydroError> {
    if d <= 0.0 {
        return Ok(0.0);
    }
    let re = reynolds(part, speed, l, nu)?;
    let cd = ellipsoid_axial_drag_coefficient(l, d, ittc57_friction(re));
    Ok(-0.5 * rho * PI * d * d / 4.0 * cd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialDamping {
    pub hull: f64,
    /// One horizontal thruster body.
    pub thruster: f64,
    pub mast: f64,
    /// Both mount plates.
    pub mounts: f64,
    pub tunnels: f64,
    /// Pitch moment of the mast drag.
    pub m_uu: f64,
}

impl AxialDamping {
    pub fn total(&self) -> f64 {
        self.hull + 2.0 * self.thruster + self.mast + self.mounts + self.tunnels
    }
}

/// Quadratic surge damping per component at the reference speed.
pub fn axial_damping(
    geom: &VehicleGeometry,
    rho: f64,
    reference_speed: f64,
    viscosity: f64,
) -> Result<AxialDamping, HydroError> {
    let hull = body_axial("hull", geom.l_h, geom.d_h, rho, reference_speed, viscosity)?;
    let thruster = if geom.l_th > 0.0 && geom.d_th > 0.0 {
        body_axial("thruster", geom.l_th, geom.d_th, rho, reference_speed, viscosity)?
    } else {
        0.0
    };
    let ap = &geom.appendages;
    let mast = -0.5 * rho * ap.mast_axial_cd * geom.w_m * geom.h_m;
    let span = (geom.b - geom.d_h / 2.0).max(0.0);
    let mounts = -0.5 * rho * ap.mount_cd * 2.0 * span * ap.mount_thickness;
    Ok(AxialDamping {
        hull,
        thruster,
        mast,
        mounts,
        tunnels: ap.tunnel_opening_x_uu,
        m_uu: mast * (geom.d_h + geom.h_m) / 2.0,
    })
}

/// Cross-flow drag factor `k1` for a cylinder of slenderness `l/d`.
pub fn crossflow_k1(l_over_d: f64) -> f64 {
    let (short, long) = crossflow_k1_branches(l_over_d);
    if l_over_d <= 57.5 {
        short
    } else {
        long
    }
}

/// Both branches of `k1`, for checking continuity at the switch.
pub fn crossflow_k1_branches(l_over_d: f64) -> (f64, f64) {
    let lg = l_over_d.log10().max(0.0);
    (0.58 + 0.17 * lg.powf(1.6), 1.0)
}

/// Quadratic cross-flow damping split by component. Thruster entries are
/// per body; mounts are the pair of horizontal plates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrossflowDamping {
    pub hull_y_vv: f64,
    pub hull_z_ww: f64,
    pub hull_n_vv: f64,
    pub hull_m_ww: f64,
    pub hull_m_qq: f64,
    pub hull_n_rr: f64,
    pub thruster_y_vv: f64,
    pub thruster_n_vv: f64,
    pub thruster_m_ww: f64,
    pub thruster_m_qq: f64,
    /// Both bodies, roll with heave at `±y_th`.
    pub thrusters_k_pp: f64,
    pub mast_y_vv: f64,
    pub mast_n_vv: f64,
    pub mast_n_rr: f64,
    pub mast_k_vv: f64,
    pub mast_k_pp: f64,
    pub mast_k_rr: f64,
    pub mounts_z_ww: f64,
    pub mounts_m_ww: f64,
    pub mounts_m_qq: f64,
    pub mounts_k_pp: f64,
}

pub fn crossflow_damping(geom: &VehicleGeometry, rho: f64, strips: usize) -> Result<CrossflowDamping, HydroError> {
    let p = &geom.profile;
    let (a, b) = (geom.x_3, geom.x_n);
    let c_h = -0.5 * rho * 1.2 * crossflow_k1(geom.l_h / geom.d_h);
    let w = |x: f64| 2.0 * p.radius(x);
    let y_vv = c_h * converged_integral("Y_vv", w, a, b, strips)?;
    let x_mom = c_h * converged_integral("N_vv", |x| w(x) * x, a, b, strips)?;
    let cubic = c_h * converged_integral("N_rr", |x| w(x) * x.abs().powi(3), a, b, strips)?;

    let mut out = CrossflowDamping {
        hull_y_vv: y_vv,
        hull_z_ww: y_vv,
        hull_n_vv: x_mom,
        hull_m_ww: -x_mom,
        hull_m_qq: cubic,
        hull_n_rr: cubic,
        ..Default::default()
    };

    if geom.l_th > 0.0 && geom.d_th > 0.0 {
        let c_t = -0.5 * rho * 1.2 * crossflow_k1(geom.l_th / geom.d_th) * geom.d_th;
        let (x2, x1) = (geom.x_2, geom.x_1);
        out.thruster_y_vv = c_t * (x1 - x2);
        out.thruster_n_vv = c_t * (x1 * x1 - x2 * x2) / 2.0;
        out.thruster_m_ww = -out.thruster_n_vv;
        out.thruster_m_qq = c_t * converged_integral("N_rr_th", |x| x.abs().powi(3), x2, x1, strips)?;
        out.thrusters_k_pp = 2.0 * out.thruster_y_vv * geom.y_th.powi(3);
    }

    let ap = &geom.appendages;
    let r_h = geom.d_h / 2.0;
    let arm = r_h + geom.h_m / 2.0;
    out.mast_y_vv = -0.5 * rho * ap.mast_cross_cd * geom.c_m * geom.h_m;
    out.mast_n_vv = out.mast_y_vv * geom.x_m;
    out.mast_n_rr = out.mast_y_vv * geom.x_m * geom.x_m * geom.x_m.abs();
    out.mast_k_vv = out.mast_y_vv * arm;
    out.mast_k_rr = out.mast_y_vv * arm * geom.x_m * geom.x_m.abs();
    let mast_strip = -0.5 * rho * ap.mast_cross_cd * geom.c_m;
    out.mast_k_pp = converged_integral(
        "K_pp_mast",
        |z| mast_strip * z.abs().powi(3),
        r_h,
        r_h + geom.h_m,
        strips,
    )?;

    let plate = -0.5 * rho * ap.mount_cd * 2.0;
    let span = |x: f64| (geom.b - p.radius(x)).max(0.0);
    let (x2, x1) = (geom.x_2, geom.x_1);
    out.mounts_z_ww = plate * converged_integral("Z_ww_mount", span, x2, x1, strips)?;
    out.mounts_m_ww = -plate * converged_integral("M_ww_mount", |x| span(x) * x, x2, x1, strips)?;
    out.mounts_m_qq = plate * converged_integral("M_qq_mount", |x| span(x) * x.abs().powi(3), x2, x1, strips)?;
    out.mounts_k_pp = plate
        * converged_integral(
            "K_pp_mount",
            |x| {
                let r = p.radius(x).min(geom.b);
                (geom.b.powi(4) - r.powi(4)) / 4.0
            },
            x2,
            x1,
            strips,
        )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::HullProfile;

    const RHO: f64 = 1025.0;

    #[test]
    fn friction_line_values() {
        // direct evaluation at Re = 1e6: 0.075 / 16
        assert!((ittc57_friction(1e6) - 0.075 / 16.0).abs() < 1e-15);
        assert!(ittc57_friction(3.2e5) > 0.0);
    }

    #[test]
    fn low_reynolds_rejected() {
        let g = VehicleGeometry::alice();
        let err = axial_damping(&g, RHO, 0.001, 1e-6).unwrap_err();
        assert!(matches!(err, HydroError::ReynoldsOutOfRange { part: "hull", .. }));
    }

    #[test]
    fn hull_axial_damping_near_reference() {
        let g = VehicleGeometry::alice();
        let ax = axial_damping(&g, RHO, 0.2, 1e-6).unwrap();
        assert!((ax.hull / -5.309 - 1.0).abs() < 0.10, "{}", ax.hull);
        assert!(ax.total() < ax.hull);
    }

    #[test]
    fn zero_frontal_area_gives_zero() {
        let mut g = VehicleGeometry::alice().hull_only();
        g.d_h = 0.0;
        let ax = axial_damping(&g, RHO, 0.2, 1e-6).unwrap();
        assert_eq!(ax.total(), 0.0);
    }

    #[test]
    fn k1_continuity_at_switch() {
        let (a, b) = crossflow_k1_branches(57.5);
        assert!((a - b).abs() < 1e-3);
        assert_eq!(crossflow_k1(100.0), 1.0);
        assert!((crossflow_k1(1.0) - 0.58).abs() < 1e-12);
    }

    #[test]
    fn uniform_cylinder_crossflow() {
        let mut g = VehicleGeometry::alice().hull_only();
        g.profile = HullProfile::cylinder(g.x_3, g.x_n, g.d_h / 2.0);
        let cf = crossflow_damping(&g, RHO, 400).unwrap();
        let c = 1.2 * crossflow_k1(g.l_h / g.d_h);
        let closed = -0.5 * RHO * c * g.d_h * g.l_h;
        assert!((cf.hull_y_vv / closed - 1.0).abs() < 1e-9);
        assert_eq!(cf.hull_z_ww, cf.hull_y_vv);
        assert_eq!(cf.hull_m_ww, -cf.hull_n_vv);
        assert_eq!(cf.mounts_z_ww, 0.0);
        assert_eq!(cf.mast_y_vv, 0.0);
    }

    #[test]
    fn hull_crossflow_bounded_by_full_cylinder() {
        // A hull of diameter d_h everywhere is the widest the profile can be,
        // so |Y_vv,hull| can never exceed its closed form.
        let g = VehicleGeometry::alice();
        let cf = crossflow_damping(&g, RHO, 400).unwrap();
        let bound = 0.5 * RHO * 1.2 * crossflow_k1(g.l_h / g.d_h) * g.d_h * g.l_h;
        assert!(-cf.hull_y_vv <= bound, "{} vs {bound}", cf.hull_y_vv);
        // the reference -190.265 lies outside this bound even before tapering
        assert!(bound < 0.9 * 190.265);
    }

    #[test]
    #[ignore = "reference Y_vv,hull exceeds the full-cylinder bound; see hull_crossflow_bounded_by_full_cylinder"]
    fn hull_crossflow_near_reference() {
        let g = VehicleGeometry::alice();
        let cf = crossflow_damping(&g, RHO, 400).unwrap();
        assert!((cf.hull_y_vv / -190.265 - 1.0).abs() < 0.10, "{}", cf.hull_y_vv);
    }

    #[test]
    fn all_dissipative_terms_negative() {
        let g = VehicleGeometry::alice();
        let cf = crossflow_damping(&g, RHO, 400).unwrap();
        for v in [
            cf.hull_y_vv,
            cf.hull_m_qq,
            cf.thruster_y_vv,
            cf.thrusters_k_pp,
            cf.mast_y_vv,
            cf.mast_k_pp,
            cf.mounts_z_ww,
            cf.mounts_k_pp,
        ] {
            assert!(v <= 0.0);
        }
    }
}
