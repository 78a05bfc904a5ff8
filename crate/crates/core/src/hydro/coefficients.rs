//! Named hydrodynamic derivatives with per-entry provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HydroError;

/// Every hydrodynamic derivative the vehicle model consumes.
///
/// Names follow SNAME notation: `X_udot` is the surge force per unit surge
/// acceleration, `Y_vv` the sway force per `v|v|`, `Y_uv` the sway lift per
/// `u*v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Coefficient {
    XUdot,
    YVdot,
    YRdot,
    ZWdot,
    KVdot,
    KPdot,
    NVdot,
    NPdot,
    MUdot,
    MWdot,
    MQdot,
    NRdot,
    XUu,
    YVv,
    ZWw,
    KPp,
    KVv,
    KRr,
    MWw,
    MQq,
    MUu,
    NVv,
    NRr,
    YUv,
    ZUw,
    MUw,
    NUv,
}

impl Coefficient {
    pub const ALL: [Coefficient; 27] = [
        Coefficient::XUdot,
        Coefficient::YVdot,
        Coefficient::YRdot,
        Coefficient::ZWdot,
        Coefficient::KVdot,
        Coefficient::KPdot,
        Coefficient::NVdot,
        Coefficient::NPdot,
        Coefficient::MUdot,
        Coefficient::MWdot,
        Coefficient::MQdot,
        Coefficient::NRdot,
        Coefficient::XUu,
        Coefficient::YVv,
        Coefficient::ZWw,
        Coefficient::KPp,
        Coefficient::KVv,
        Coefficient::KRr,
        Coefficient::MWw,
        Coefficient::MQq,
        Coefficient::MUu,
        Coefficient::NVv,
        Coefficient::NRr,
        Coefficient::YUv,
        Coefficient::ZUw,
        Coefficient::MUw,
        Coefficient::NUv,
    ];

    pub const ADDED_MASS: [Coefficient; 12] = [
        Coefficient::XUdot,
        Coefficient::YVdot,
        Coefficient::YRdot,
        Coefficient::ZWdot,
        Coefficient::KVdot,
        Coefficient::KPdot,
        Coefficient::NVdot,
        Coefficient::NPdot,
        Coefficient::MUdot,
        Coefficient::MWdot,
        Coefficient::MQdot,
        Coefficient::NRdot,
    ];

    pub fn name(self) -> &'static str {
        use Coefficient::*;
        match self {
            XUdot => "X_udot",
            YVdot => "Y_vdot",
            YRdot => "Y_rdot",
            ZWdot => "Z_wdot",
            KVdot => "K_vdot",
            KPdot => "K_pdot",
            NVdot => "N_vdot",
            NPdot => "N_pdot",
            MUdot => "M_udot",
            MWdot => "M_wdot",
            MQdot => "M_qdot",
            NRdot => "N_rdot",
            XUu => "X_uu",
            YVv => "Y_vv",
            ZWw => "Z_ww",
            KPp => "K_pp",
            KVv => "K_vv",
            KRr => "K_rr",
            MWw => "M_ww",
            MQq => "M_qq",
            MUu => "M_uu",
            NVv => "N_vv",
            NRr => "N_rr",
            YUv => "Y_uv",
            ZUw => "Z_uw",
            MUw => "M_uw",
            NUv => "N_uv",
        }
    }

    pub fn unit(self) -> &'static str {
        use Coefficient::*;
        match self {
            XUdot | YVdot | ZWdot => "kg",
            YRdot | KVdot | NVdot | MUdot | MWdot => "kg*m",
            KPdot | NPdot | MQdot | NRdot => "kg*m^2/rad",
            XUu | YVv | ZWw => "kg/m",
            KVv | MWw | MUu | NVv => "kg",
            KPp | KRr | MQq | NRr => "kg*m^2/rad^2",
            YUv | ZUw => "kg/m",
            MUw | NUv => "kg",
        }
    }

    pub fn is_added_mass(self) -> bool {
        Self::ADDED_MASS.contains(&self)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Coefficient {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Coefficient::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| HydroError::UnknownCoefficient(s.to_string()))
    }
}

impl TryFrom<String> for Coefficient {
    type Error = HydroError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Coefficient> for String {
    fn from(c: Coefficient) -> Self {
        c.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Cfd,
    Calibrated,
    /// Set explicitly in a configuration file.
    Configured,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Cfd => "cfd",
            Provenance::Calibrated => "calibrated",
            Provenance::Configured => "configured",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub value: f64,
    pub provenance: Provenance,
}

/// A (possibly partial) set of hydrodynamic derivatives.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientSet {
    entries: BTreeMap<Coefficient, CoefficientEntry>,
}

impl CoefficientSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(values: &[(Coefficient, f64)], provenance: Provenance) -> Self {
        let mut set = Self::new();
        for &(c, v) in values {
            set.insert(c, v, provenance);
        }
        set
    }

    pub fn insert(&mut self, coefficient: Coefficient, value: f64, provenance: Provenance) {
        self.entries.insert(coefficient, CoefficientEntry { value, provenance });
    }

    pub fn get(&self, coefficient: Coefficient) -> Result<f64, HydroError> {
        self.entries
            .get(&coefficient)
            .map(|e| e.value)
            .ok_or(HydroError::MissingCoefficient(coefficient))
    }

    pub fn entry(&self, coefficient: Coefficient) -> Option<&CoefficientEntry> {
        self.entries.get(&coefficient)
    }

    pub fn contains(&self, coefficient: Coefficient) -> bool {
        self.entries.contains_key(&coefficient)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coefficient, &CoefficientEntry)> {
        self.entries.iter().map(|(c, e)| (*c, e))
    }

    /// Entries of `other` replace entries of `self`.
    pub fn overlay(&self, other: &CoefficientSet) -> CoefficientSet {
        let mut out = self.clone();
        for (c, e) in other.iter() {
            out.entries.insert(c, *e);
        }
        out
    }

    /// Multiplies every value by `factor`, preserving provenance.
    pub fn scaled(&self, factor: f64) -> CoefficientSet {
        let mut out = self.clone();
        for e in out.entries.values_mut() {
            e.value *= factor;
        }
        out
    }

    /// Aligned-column text report.
    pub fn report(&self) -> String {
        let mut s = format!("{:<8} {:>14} {:<14} {}\n", "coeff", "value", "unit", "provenance");
        for (c, e) in self.iter() {
            s.push_str(&format!(
                "{:<8} {:>14.6} {:<14} {}\n",
                c.name(),
                e.value,
                c.unit(),
                e.provenance
            ));
        }
        s
    }

    /// Machine-readable table: `coefficient,value,unit,provenance`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("coefficient,value,unit,provenance\n");
        for (c, e) in self.iter() {
            s.push_str(&format!("{},{},{},{}\n", c.name(), e.value, c.unit(), e.provenance));
        }
        s
    }
}

/// Multiplicative correction factors fitted against sea-trial response.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct CalibrationFactors {
    factors: BTreeMap<Coefficient, f64>,
}

impl CalibrationFactors {
    pub fn new(factors: impl IntoIterator<Item = (Coefficient, f64)>) -> Result<Self, HydroError> {
        let mut map = BTreeMap::new();
        for (c, f) in factors {
            if !(f > 0.0 && f.is_finite()) {
                return Err(HydroError::InvalidFactor {
                    coefficient: c,
                    factor: f,
                });
            }
            map.insert(c, f);
        }
        Ok(Self { factors: map })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn get(&self, c: Coefficient) -> Option<f64> {
        self.factors.get(&c).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coefficient, f64)> + '_ {
        self.factors.iter().map(|(c, f)| (*c, *f))
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factor-wise product; applying the result equals applying `self` then `other`.
    pub fn compose(&self, other: &CalibrationFactors) -> CalibrationFactors {
        let mut out = self.factors.clone();
        for (c, f) in other.iter() {
            *out.entry(c).or_insert(1.0) *= f;
        }
        CalibrationFactors { factors: out }
    }
}

impl TryFrom<BTreeMap<String, f64>> for CalibrationFactors {
    type Error = HydroError;

    fn try_from(value: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        let parsed = value
            .into_iter()
            .map(|(k, v)| k.parse::<Coefficient>().map(|c| (c, v)))
            .collect::<Result<Vec<_>, _>>()?;
        CalibrationFactors::new(parsed)
    }
}

impl From<CalibrationFactors> for BTreeMap<String, f64> {
    fn from(value: CalibrationFactors) -> Self {
        value
            .factors
            .into_iter()
            .map(|(c, f)| (c.name().to_string(), f))
            .collect()
    }
}

/// Multiplies the named coefficients and marks them calibrated.
pub fn apply_calibration(coeffs: &CoefficientSet, factors: &CalibrationFactors) -> Result<CoefficientSet, HydroError> {
    let mut out = coeffs.clone();
    for (c, f) in factors.iter() {
        let entry = out
            .entries
            .get_mut(&c)
            .ok_or_else(|| HydroError::UnknownCoefficient(c.name().to_string()))?;
        entry.value *= f;
        entry.provenance = Provenance::Calibrated;
    }
    Ok(out)
}

/// A coefficient whose sign disagrees with what the mechanics predict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignAnomaly {
    pub coefficient: Coefficient,
    pub value: f64,
    pub expected: &'static str,
}

/// Expected signs: dissipative and inertial diagonals negative; the mast
/// terms follow the arm convention used by the estimator (`M_udot`, `M_uu`
/// carry the sign of their axial counterpart, `K_vv` is negative for a
/// mast above the hull axis).
pub fn sign_anomalies(coeffs: &CoefficientSet) -> Vec<SignAnomaly> {
    use Coefficient::*;
    let negative = [
        XUdot, YVdot, ZWdot, KPdot, MQdot, NRdot, XUu, YVv, ZWw, KPp, MQq, NRr, KVv, MUdot, MUu,
    ];
    coeffs
        .iter()
        .filter(|(c, e)| negative.contains(c) && e.value > 0.0)
        .map(|(c, e)| SignAnomaly {
            coefficient: c,
            value: e.value,
            expected: "negative",
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in Coefficient::ALL {
            assert_eq!(c.name().parse::<Coefficient>().unwrap(), c);
        }
        assert!(matches!(
            "X_foo".parse::<Coefficient>(),
            Err(HydroError::UnknownCoefficient(_))
        ));
    }

    #[test]
    fn missing_coefficient_is_named() {
        let set = CoefficientSet::new();
        let err = set.get(Coefficient::YVdot).unwrap_err();
        assert!(err.to_string().contains("Y_vdot"));
    }

    #[test]
    fn empty_factor_map_is_identity() {
        let set = CoefficientSet::from_values(
            &[(Coefficient::XUdot, -2.806), (Coefficient::ZWdot, -69.536)],
            Provenance::Analytic,
        );
        let out = apply_calibration(&set, &CalibrationFactors::identity()).unwrap();
        assert_eq!(out, set);
    }

    #[test]
    fn calibration_flips_provenance_only_on_named() {
        let set = CoefficientSet::from_values(
            &[(Coefficient::XUdot, -2.806), (Coefficient::ZWdot, -69.536)],
            Provenance::Analytic,
        );
        let f = CalibrationFactors::new([(Coefficient::XUdot, 10.0)]).unwrap();
        let out = apply_calibration(&set, &f).unwrap();
        assert_eq!(out.get(Coefficient::XUdot).unwrap(), -2.806 * 10.0);
        assert_eq!(
            out.entry(Coefficient::XUdot).unwrap().provenance,
            Provenance::Calibrated
        );
        assert_eq!(
            out.entry(Coefficient::ZWdot).unwrap(),
            set.entry(Coefficient::ZWdot).unwrap()
        );
    }

    #[test]
    fn unknown_factor_is_rejected() {
        let set = CoefficientSet::from_values(&[(Coefficient::XUdot, -2.806)], Provenance::Analytic);
        let f = CalibrationFactors::new([(Coefficient::NRr, 2.0)]).unwrap();
        assert!(matches!(
            apply_calibration(&set, &f),
            Err(HydroError::UnknownCoefficient(_))
        ));
    }

    #[test]
    fn non_positive_factor_rejected() {
        assert!(CalibrationFactors::new([(Coefficient::NRr, 0.0)]).is_err());
        assert!(CalibrationFactors::new([(Coefficient::NRr, -1.0)]).is_err());
    }

    #[test]
    fn factors_deserialize_from_names() {
        let f: CalibrationFactors = serde_json::from_str(r#"{"X_udot": 10.0}"#).unwrap();
        assert_eq!(f.get(Coefficient::XUdot), Some(10.0));
        let bad: Result<CalibrationFactors, _> = serde_json::from_str(r#"{"X_nope": 1.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn set_serde_round_trip() {
        let set = CoefficientSet::from_values(&[(Coefficient::YUv, -32.4)], Provenance::Cfd);
        let s = serde_json::to_string(&set).unwrap();
        assert!(s.contains("\"Y_uv\""));
        let back: CoefficientSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, set);
    }
}
