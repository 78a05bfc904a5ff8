//! Reference coefficient values for the ALICE vehicle (a SPARUS II hull
//! with two added lateral tunnel thrusters).
//!
//! Values are stored exactly as reported for ALICE, including entries whose sign
//! disagrees with the mechanics; see [`super::sign_anomalies`].

use super::coefficients::{apply_calibration, CalibrationFactors, Coefficient, CoefficientSet, Provenance};
use Coefficient::*;

/// Semi-analytic estimates. `K_pdot` is listed twice in the source table
/// with the same value and appears once here. The lift rows come from the
/// analytic column of the CFD comparison table.
pub const ESTIMATED: [(Coefficient, f64); 27] = [
    (XUdot, -2.806),
    (YVdot, -78.459),
    (YRdot, -8.529),
    (KVdot, 0.216),
    (KPdot, -0.042),
    (NPdot, -0.102),
    (ZWdot, -69.536),
    (MUdot, 0.0321),
    (NVdot, -8.529),
    (MWdot, -11.253),
    (MQdot, -20.963),
    (NRdot, -22.537),
    (XUu, -7.616),
    (YVv, -214.398),
    (ZWw, -214.398),
    (MWw, 26.634),
    (NVv, -26.17),
    (KPp, 0.192),
    (KVv, 3.397),
    (MQq, -180.682),
    (NRr, -180.381),
    (MUu, 0.144),
    (KRr, 0.753),
    (YUv, -39.71),
    (ZUw, -39.71),
    (MUw, -8.498),
    (NUv, 8.498),
];

/// CFD-computed coefficients (axial/cross flow at 0.2 m/s).
pub const CFD: [(Coefficient, f64); 15] = [
    (XUu, -8.375),
    (MUu, 0.9),
    (YVv, -146.95),
    (KVv, -6.5),
    (NVv, -12.675),
    (NRr, -26.377),
    (KRr, 0.558),
    (KPp, -0.287),
    (MQq, -34.551),
    (ZWw, -174.525),
    (MWw, 11.4),
    (YUv, -35.428),
    (ZUw, -35.428),
    (MUw, -3.37),
    (NUv, 3.37),
];

/// One row of the estimated-vs-calibrated comparison.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationRow {
    pub coefficient: Coefficient,
    pub model: f64,
    pub experiment: f64,
    /// The factor as printed (rounded).
    pub printed_factor: f64,
}

pub const CALIBRATION: [CalibrationRow; 14] = [
    row(XUdot, -2.806, -28.06, 10.0),
    row(YVdot, -78.459, -23.53, 0.3),
    row(YRdot, -8.529, -2.559, 0.3),
    row(ZWdot, -69.536, -27.812, 0.4),
    row(NVdot, -8.529, -2.558, 0.3),
    row(MWdot, -11.253, -5.626, 0.5),
    row(MQdot, -20.963, -10.481, 0.5),
    row(NRdot, -22.537, -11.268, 0.5),
    row(XUu, -8.375, -15.23, 1.8),
    row(YVv, -146.95, -321.597, 2.2),
    row(ZWw, -174.52, -326.169, 1.86),
    row(MWw, 11.4, 0.096, 0.008),
    row(NVv, -12.67, -1.954, 0.15),
    row(NRr, -26.377, -54.114, 2.05),
];

const fn row(coefficient: Coefficient, model: f64, experiment: f64, printed_factor: f64) -> CalibrationRow {
    CalibrationRow {
        coefficient,
        model,
        experiment,
        printed_factor,
    }
}

/// Analytic-column values for single components (hull only).
#[derive(Debug, Clone, Copy)]
pub struct ComponentReference {
    pub name: &'static str,
    pub analytic: f64,
    pub cfd: f64,
}

pub const HULL_REFERENCE: [ComponentReference; 5] = [
    ComponentReference {
        name: "X_uu_hull",
        analytic: -5.309,
        cfd: -5.008,
    },
    ComponentReference {
        name: "Y_vv_hull",
        analytic: -190.265,
        cfd: -120.834,
    },
    ComponentReference {
        name: "N_vv_hull",
        analytic: -42.515,
        cfd: -16.851,
    },
    ComponentReference {
        name: "Z_ww_hull",
        analytic: -190.265,
        cfd: -120.834,
    },
    ComponentReference {
        name: "M_ww_hull",
        analytic: 42.515,
        cfd: 16.851,
    },
];

pub fn estimated() -> CoefficientSet {
    CoefficientSet::from_values(&ESTIMATED, Provenance::Analytic)
}

pub fn cfd() -> CoefficientSet {
    CoefficientSet::from_values(&CFD, Provenance::Cfd)
}

/// Factors stored as `experiment / model` so that applying them to the
/// model column reproduces the experiment column to rounding.
pub fn calibration_factors() -> CalibrationFactors {
    CalibrationFactors::new(CALIBRATION.iter().map(|r| (r.coefficient, r.experiment / r.model)))
        .expect("reference factors are positive")
}

/// The factors exactly as printed.
pub fn printed_calibration_factors() -> CalibrationFactors {
    CalibrationFactors::new(CALIBRATION.iter().map(|r| (r.coefficient, r.printed_factor)))
        .expect("reference factors are positive")
}

/// The pre-calibration model: estimates overlaid with the CFD values and the
/// model column of the calibration table.
pub fn precalibration_model() -> CoefficientSet {
    let mut set = estimated().overlay(&cfd());
    for r in CALIBRATION {
        let prov = set
            .entry(r.coefficient)
            .map(|e| e.provenance)
            .unwrap_or(Provenance::Analytic);
        set.insert(r.coefficient, r.model, prov);
    }
    set
}

/// Coefficient set used by default for simulation: the calibrated model.
pub fn simulation_default() -> CoefficientSet {
    apply_calibration(&precalibration_model(), &calibration_factors())
        .expect("calibration rows name existing coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::sign_anomalies;

    #[test]
    fn estimated_set_is_complete() {
        let set = estimated();
        assert_eq!(set.len(), Coefficient::ALL.len());
    }

    #[test]
    fn ratio_factors_agree_with_printed_to_last_digit() {
        for r in CALIBRATION {
            let ratio = r.experiment / r.model;
            let printed = format!("{}", r.printed_factor);
            let decimals = printed.split('.').nth(1).map_or(0, |d| d.len()) as i32;
            let ulp = 10f64.powi(-decimals);
            // within one unit of the last printed digit (one row is truncated, not rounded)
            assert!(
                (ratio - r.printed_factor).abs() < ulp,
                "{}: ratio {ratio} vs printed {}",
                r.coefficient,
                r.printed_factor
            );
        }
    }

    #[test]
    fn simulation_default_matches_experiment_column() {
        let set = simulation_default();
        for r in CALIBRATION {
            let v = set.get(r.coefficient).unwrap();
            assert!((v - r.experiment).abs() <= 1e-12 * r.experiment.abs().max(1.0));
            assert_eq!(set.entry(r.coefficient).unwrap().provenance, Provenance::Calibrated);
        }
        // roll damping resolved by the CFD value
        assert_eq!(set.get(Coefficient::KPp).unwrap(), -0.287);
    }

    #[test]
    fn reference_sign_anomalies_are_flagged() {
        let flagged: Vec<_> = sign_anomalies(&estimated())
            .into_iter()
            .map(|a| a.coefficient)
            .collect();
        for c in [KPp, KVv, MUdot, MUu] {
            assert!(flagged.contains(&c), "{c} not flagged");
        }
        assert!(sign_anomalies(&simulation_default())
            .iter()
            .all(|a| a.coefficient == MUu || a.coefficient == MUdot));
    }
}
