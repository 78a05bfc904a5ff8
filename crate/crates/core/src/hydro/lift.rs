use serde::{Deserialize, Serialize};

use super::VehicleGeometry;

/// Sign convention for the lift moments.
///
/// `MomentArm` takes the moment of the lift force about the origin, which
/// gives `M_uw = -x_cp Z_uw` and `N_uv = x_cp Y_uv`. `AsPrinted` keeps the
/// commonly tabulated `M_uw = x_cp Z_uw`, `N_uv = -x_cp Y_uv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftMomentConvention {
    #[default]
    MomentArm,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyLift {
    pub cl_alpha: f64,
    pub x_cp: f64,
    pub y_uv: f64,
    pub z_uw: f64,
    pub m_uw: f64,
    pub n_uv: f64,
}

/// Hull body lift from an empirical lift slope (0.003 per degree per unit
/// slenderness) with the center of pressure at `0.65 l_h` aft of the nose.
pub fn body_lift(geom: &VehicleGeometry, rho: f64, convention: LiftMomentConvention) -> BodyLift {
    let per_rad = 0.003 * 180.0 / std::f64::consts::PI;
    let cl_alpha = per_rad * geom.l_h / geom.d_h;
    // written as l·d so a vanishing diameter gives zero, not 0·inf
    let z_uw = -0.5 * rho * per_rad * geom.l_h * geom.d_h;
    let x_cp = geom.x_n - 0.65 * geom.l_h;
    let (m_uw, n_uv) = match convention {
        LiftMomentConvention::MomentArm => (-x_cp * z_uw, x_cp * z_uw),
        LiftMomentConvention::AsPrinted => (x_cp * z_uw, -x_cp * z_uw),
    };
    BodyLift {
        cl_alpha,
        x_cp,
        y_uv: z_uw,
        z_uw,
        m_uw,
        n_uv,
    }
}
