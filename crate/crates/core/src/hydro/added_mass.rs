use std::f64::consts::PI;

use super::{converged_integral, HydroError, VehicleGeometry};

/// Axial added mass of a prolate ellipsoid of length `l` and diameter `d`:
/// `-α0/(2-α0)·m_e`, with `m_e` the displaced fluid mass.
///
/// Uses the prolate-spheroid eccentricity `e² = 1 - (d/l)²`. A sphere
/// (`l == d`) gives `-m_e/2`.
pub fn ellipsoid_axial_added_mass(l: f64, d: f64, rho: f64) -> Result<f64, HydroError> {
    if !(d > 0.0 && l.is_finite()) {
        return Err(HydroError::InvalidGeometry(format!(
            "ellipsoid diameter must be positive, got {d}"
        )));
    }
    if d > l {
        return Err(HydroError::InvalidGeometry(format!(
            "ellipsoid diameter {d} exceeds length {l}"
        )));
    }
    let m_e = 4.0 / 3.0 * PI * rho * (l / 2.0) * (d / 2.0).powi(2);
    let alpha0 = alpha0(d / l);
    Ok(-alpha0 / (2.0 - alpha0) * m_e)
}

fn alpha0(aspect: f64) -> f64 {
    let e2 = 1.0 - aspect * aspect;
    let e = e2.sqrt();
    if e < 1e-3 {
        // 2(1-e²)(atanh(e) - e)/e³ expanded; the closed form cancels badly
        2.0 * (1.0 - e2) * (1.0 / 3.0 + e2 / 5.0 + e2 * e2 / 7.0)
    } else {
        2.0 * (1.0 - e2) / (e2 * e) * (0.5 * ((1.0 + e) / (1.0 - e)).ln() - e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MastAddedMass {
    pub x_udot: f64,
    pub m_udot: f64,
    pub y_vdot: f64,
}

/// Mast as a rod of elliptic section: axial term from the width, cross-flow
/// term from the chord. The pitch coupling uses the arm `(d_h + h_m)/2`.
pub fn mast_added_mass(geom: &VehicleGeometry, rho: f64) -> MastAddedMass {
    let x_udot = -0.25 * PI * rho * geom.w_m.powi(2) * geom.h_m;
    MastAddedMass {
        x_udot,
        m_udot: x_udot * (geom.d_h + geom.h_m) / 2.0,
        y_vdot: -0.25 * PI * rho * geom.c_m.powi(2) * geom.h_m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullCrossflowAddedMass {
    pub y_vdot: f64,
    pub n_vdot: f64,
    pub n_rdot: f64,
    pub z_wdot: f64,
    pub m_wdot: f64,
    pub m_qdot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossflowAddedMass {
    pub hull: HullCrossflowAddedMass,
    /// One horizontal thruster body; `Y_vdot == Z_wdot`.
    pub thruster: f64,
}

fn circle_strip(rho: f64, r: f64) -> f64 {
    -PI * rho * r * r
}

/// Circle of radius `r` with fins reaching `b` from the center. Equals the
/// plain circle at `b == r`.
fn finned_strip(rho: f64, r: f64, b: f64) -> f64 {
    if b <= r {
        return circle_strip(rho, r);
    }
    -PI * rho * (b * b - r * r + r.powi(4) / (b * b))
}

/// Strip-theory cross-flow added mass of the hull (finned section between
/// `x_2` and `x_1` for the vertical-plane terms) and of one thruster body.
pub fn crossflow_added_mass(geom: &VehicleGeometry, rho: f64, strips: usize) -> Result<CrossflowAddedMass, HydroError> {
    let p = &geom.profile;
    let (a, b) = (geom.x_3, geom.x_n);
    let circle = |x: f64| circle_strip(rho, p.radius(x));
    let vertical = |x: f64| {
        if x >= geom.x_2 && x <= geom.x_1 {
            finned_strip(rho, p.radius(x), geom.b)
        } else {
            circle(x)
        }
    };
    let hull = HullCrossflowAddedMass {
        y_vdot: converged_integral("Y_vdot", circle, a, b, strips)?,
        n_vdot: converged_integral("N_vdot", |x| circle(x) * x, a, b, strips)?,
        n_rdot: converged_integral("N_rdot", |x| circle(x) * x * x, a, b, strips)?,
        z_wdot: converged_integral("Z_wdot", vertical, a, b, strips)?,
        m_wdot: converged_integral("M_wdot", |x| vertical(x) * x, a, b, strips)?,
        m_qdot: converged_integral("M_qdot", |x| vertical(x) * x * x, a, b, strips)?,
    };
    let r_th = geom.d_th / 2.0;
    let thruster = converged_integral("Y_vdot_th", |_| circle_strip(rho, r_th), geom.x_2, geom.x_1, strips)?;
    Ok(CrossflowAddedMass { hull, thruster })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollAddedMass {
    pub k_pdot_mast: f64,
    pub k_pdot_fins: f64,
    /// Both thruster bodies.
    pub k_pdot_thrusters: f64,
    pub k_vdot: f64,
    pub n_pdot: f64,
}

/// Roll-related added mass: the mast strips weighted by height squared,
/// the fin section per `(2/π)ρb⁴`, and the thruster bodies moving in heave
/// at `±y_th`.
pub fn roll_added_mass(
    geom: &VehicleGeometry,
    rho: f64,
    strips: usize,
    thruster_z_wdot: f64,
) -> Result<RollAddedMass, HydroError> {
    let r_h = geom.d_h / 2.0;
    let mast_strip = -0.25 * PI * rho * geom.c_m.powi(2);
    let k_pdot_mast = converged_integral("K_pdot_mast", |z| mast_strip * z * z, r_h, r_h + geom.h_m, strips)?;
    let fin = |x: f64| {
        if geom.b > geom.profile.radius(x) {
            -2.0 / PI * rho * geom.b.powi(4)
        } else {
            0.0
        }
    };
    let k_pdot_fins = converged_integral("K_pdot_fins", fin, geom.x_2, geom.x_1, strips)?;
    let mast = mast_added_mass(geom, rho);
    let arm = (geom.d_h + geom.h_m) / 2.0;
    Ok(RollAddedMass {
        k_pdot_mast,
        k_pdot_fins,
        k_pdot_thrusters: 2.0 * thruster_z_wdot * geom.y_th * geom.y_th,
        k_vdot: mast.y_vdot * arm,
        n_pdot: mast.y_vdot * arm * geom.x_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::HullProfile;

    const RHO: f64 = 1025.0;

    fn ellipsoid_mass(l: f64, d: f64) -> f64 {
        4.0 / 3.0 * PI * RHO * (l / 2.0) * (d / 2.0).powi(2)
    }

    #[test]
    fn sphere_limit_is_half_displaced_mass() {
        let xa = ellipsoid_axial_added_mass(0.5, 0.5, RHO).unwrap();
        assert!((xa + 0.5 * ellipsoid_mass(0.5, 0.5)).abs() < 1e-9);
        // continuity just off the sphere
        let near = ellipsoid_axial_added_mass(0.5, 0.4999, RHO).unwrap();
        assert!((near / xa - 1.0).abs() < 1e-3);
    }

    #[test]
    fn diameter_larger_than_length_rejected() {
        assert!(matches!(
            ellipsoid_axial_added_mass(0.2, 0.3, RHO),
            Err(HydroError::InvalidGeometry(_))
        ));
    }

    #[test]
    fn slenderness_sweep_is_monotone() {
        // numeric sweep oracle: |X_udot|/m_e must decrease with l/d
        let d = 0.1;
        let mut prev = f64::INFINITY;
        for i in 0..=190 {
            let ratio = 1.0 + i as f64 * 0.1;
            let l = ratio * d;
            let frac = -ellipsoid_axial_added_mass(l, d, RHO).unwrap() / ellipsoid_mass(l, d);
            assert!(frac > 0.0 && frac <= 0.5 + 1e-12);
            assert!(frac < prev, "not decreasing at l/d = {ratio}");
            prev = frac;
        }
    }

    #[test]
    fn mast_terms() {
        let mut g = VehicleGeometry::alice();
        let m = mast_added_mass(&g, RHO);
        // direct evaluation
        let x = -0.25 * PI * RHO * 0.03 * 0.03 * 0.25;
        assert!((m.x_udot - x).abs() < 1e-12);
        assert!((m.m_udot - x * (0.23 + 0.25) / 2.0).abs() < 1e-12);
        assert!((m.y_vdot + 0.25 * PI * RHO * 0.04 * 0.25).abs() < 1e-12);

        g.w_m *= 2.0;
        assert!((mast_added_mass(&g, RHO).x_udot / m.x_udot - 4.0).abs() < 1e-12);

        g.h_m = 0.0;
        let z = mast_added_mass(&g, RHO);
        assert_eq!((z.x_udot, z.m_udot, z.y_vdot), (0.0, 0.0, 0.0));
    }

    #[test]
    fn uniform_cylinder_matches_closed_form() {
        let mut g = VehicleGeometry::alice();
        g.profile = HullProfile::cylinder(g.x_3, g.x_n, 0.1);
        g.b = 0.0;
        let cf = crossflow_added_mass(&g, RHO, 400).unwrap();
        let closed = -PI * RHO * 0.01 * g.l_h;
        assert!((cf.hull.y_vdot / closed - 1.0).abs() < 1e-3);
        assert!((cf.hull.z_wdot / closed - 1.0).abs() < 1e-3);
    }

    #[test]
    fn symmetric_profile_has_no_coupling() {
        let mut g = VehicleGeometry::alice();
        g.x_n = 0.8;
        g.x_3 = -0.8;
        g.x_1 = 0.2;
        g.x_2 = -0.2;
        g.b = 0.0;
        g.profile = HullProfile::new(vec![[-0.8, 0.0], [-0.5, 0.1], [0.5, 0.1], [0.8, 0.0]]).unwrap();
        let cf = crossflow_added_mass(&g, RHO, 400).unwrap();
        assert!(cf.hull.n_vdot.abs() < 1e-9);
        assert!(cf.hull.m_wdot.abs() < 1e-9);
    }

    #[test]
    fn fins_add_vertical_added_mass() {
        let g = VehicleGeometry::alice();
        let cf = crossflow_added_mass(&g, RHO, 400).unwrap();
        assert!(cf.hull.z_wdot < cf.hull.y_vdot);
        assert!(finned_strip(RHO, 0.1, 0.1) == circle_strip(RHO, 0.1));
    }

    #[test]
    fn roll_terms_are_negative() {
        let g = VehicleGeometry::alice();
        let cf = crossflow_added_mass(&g, RHO, 400).unwrap();
        let r = roll_added_mass(&g, RHO, 400, cf.thruster).unwrap();
        assert!(r.k_pdot_mast < 0.0 && r.k_pdot_fins < 0.0 && r.k_pdot_thrusters < 0.0);
        assert!(r.k_vdot < 0.0);
    }
}
