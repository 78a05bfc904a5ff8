use serde::{Deserialize, Serialize};

use super::{
    axial_damping, body_lift, crossflow_added_mass, crossflow_damping, ellipsoid_axial_added_mass, mast_added_mass,
    roll_added_mass, Coefficient, CoefficientSet, HydroError, LiftMomentConvention, Provenance, VehicleGeometry,
};
use Coefficient::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationOptions {
    /// Water density [kg/m^3].
    pub rho: f64,
    /// Speed at which the Reynolds number is evaluated [m/s].
    pub reference_speed: f64,
    /// Kinematic viscosity [m^2/s].
    pub viscosity: f64,
    /// Strip count for the axial integrals.
    pub strips: usize,
    pub lift_convention: LiftMomentConvention,
}

impl Default for EstimationOptions {
    fn default() -> Self {
        Self {
            rho: 1025.0,
            reference_speed: 0.2,
            viscosity: 1.0e-6,
            strips: 400,
            lift_convention: LiftMomentConvention::MomentArm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Hull,
    /// Both horizontal thruster bodies.
    Thrusters,
    Mast,
    Mounts,
    Tunnels,
}

impl Part {
    pub const ALL: [Part; 5] = [Part::Hull, Part::Thrusters, Part::Mast, Part::Mounts, Part::Tunnels];

    pub fn name(self) -> &'static str {
        match self {
            Part::Hull => "hull",
            Part::Thrusters => "thrusters",
            Part::Mast => "mast",
            Part::Mounts => "mounts",
            Part::Tunnels => "tunnels",
        }
    }
}

fn part_set(values: &[(Coefficient, f64)]) -> CoefficientSet {
    CoefficientSet::from_values(values, Provenance::Analytic)
}

/// Per-component contributions. Each set lists only the coefficients the
/// component affects.
pub fn estimate_components(
    geom: &VehicleGeometry,
    opts: &EstimationOptions,
) -> Result<Vec<(Part, CoefficientSet)>, HydroError> {
    geom.validate()?;
    if opts.strips == 0 {
        return Err(HydroError::InvalidGeometry("strip count must be positive".into()));
    }
    let rho = opts.rho;
    let n = opts.strips;

    let hull_xa = ellipsoid_axial_added_mass(geom.l_h, geom.d_h, rho).map_err(|e| e.in_part("hull"))?;
    let cfa = crossflow_added_mass(geom, rho, n)?;
    let roll = roll_added_mass(geom, rho, n, cfa.thruster)?;
    let mast_a = mast_added_mass(geom, rho);
    let axial = axial_damping(geom, rho, opts.reference_speed, opts.viscosity)?;
    let cfd = crossflow_damping(geom, rho, n)?;
    let lift = body_lift(geom, rho, opts.lift_convention);

    let h = cfa.hull;
    let hull = part_set(&[
        (XUdot, hull_xa),
        (YVdot, h.y_vdot),
        (YRdot, h.n_vdot),
        (NVdot, h.n_vdot),
        (NRdot, h.n_rdot),
        (ZWdot, h.z_wdot),
        (MWdot, h.m_wdot),
        (MQdot, h.m_qdot),
        (XUu, axial.hull),
        (YVv, cfd.hull_y_vv),
        (ZWw, cfd.hull_z_ww),
        (NVv, cfd.hull_n_vv),
        (MWw, cfd.hull_m_ww),
        (MQq, cfd.hull_m_qq),
        (NRr, cfd.hull_n_rr),
        (YUv, lift.y_uv),
        (ZUw, lift.z_uw),
        (MUw, lift.m_uw),
        (NUv, lift.n_uv),
    ]);

    let th_xa = if geom.l_th > 0.0 && geom.d_th > 0.0 {
        ellipsoid_axial_added_mass(geom.l_th, geom.d_th, rho).map_err(|e| e.in_part("thruster"))?
    } else {
        0.0
    };
    let thrusters = part_set(&[
        (XUdot, 2.0 * th_xa),
        (YVdot, 2.0 * cfa.thruster),
        (ZWdot, 2.0 * cfa.thruster),
        (KPdot, roll.k_pdot_thrusters),
        (XUu, 2.0 * axial.thruster),
        (YVv, 2.0 * cfd.thruster_y_vv),
        (ZWw, 2.0 * cfd.thruster_y_vv),
        (NVv, 2.0 * cfd.thruster_n_vv),
        (MWw, 2.0 * cfd.thruster_m_ww),
        (MQq, 2.0 * cfd.thruster_m_qq),
        (NRr, 2.0 * cfd.thruster_m_qq),
        (KPp, cfd.thrusters_k_pp),
    ]);

    let mast = part_set(&[
        (XUdot, mast_a.x_udot),
        (MUdot, mast_a.m_udot),
        (YVdot, mast_a.y_vdot),
        (KVdot, roll.k_vdot),
        (NPdot, roll.n_pdot),
        (KPdot, roll.k_pdot_mast),
        (XUu, axial.mast),
        (MUu, axial.m_uu),
        (YVv, cfd.mast_y_vv),
        (NVv, cfd.mast_n_vv),
        (NRr, cfd.mast_n_rr),
        (KVv, cfd.mast_k_vv),
        (KPp, cfd.mast_k_pp),
        (KRr, cfd.mast_k_rr),
    ]);

    let mounts = part_set(&[
        (KPdot, roll.k_pdot_fins),
        (XUu, axial.mounts),
        (ZWw, cfd.mounts_z_ww),
        (MWw, cfd.mounts_m_ww),
        (MQq, cfd.mounts_m_qq),
        (KPp, cfd.mounts_k_pp),
    ]);

    let tunnels = part_set(&[(XUu, axial.tunnels)]);

    Ok(vec![
        (Part::Hull, hull),
        (Part::Thrusters, thrusters),
        (Part::Mast, mast),
        (Part::Mounts, mounts),
        (Part::Tunnels, tunnels),
    ])
}

/// Full coefficient set: the component contributions summed in [`Part::ALL`]
/// order, with every coefficient present.
pub fn estimate_all(geom: &VehicleGeometry, opts: &EstimationOptions) -> Result<CoefficientSet, HydroError> {
    let parts = estimate_components(geom, opts)?;
    let mut out = CoefficientSet::new();
    for c in Coefficient::ALL {
        let v = parts
            .iter()
            .filter_map(|(_, set)| set.get(c).ok())
            .fold(0.0, |acc, v| acc + v);
        out.insert(c, v, Provenance::Analytic);
    }
    Ok(out)
}
