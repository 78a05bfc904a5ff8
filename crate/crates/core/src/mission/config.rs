//! The JSON configuration file: vehicle, gains, mission and environment.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{frame_rate, plan_lawnmower, CameraFootprint, CameraSettings, MissionPlan, Region};
use crate::guidance::{ControllerGains, ControllerKind};
use crate::hydro::{
    apply_calibration, estimate_all, fixtures, CalibrationFactors, Coefficient, CoefficientSet, EstimationOptions,
    Provenance, VehicleGeometry,
};
use crate::propulsion::{Propulsion, ThrusterArms};
use crate::simulator::{AllocatorConfig, Environment, MissionOptions, Seabed, Vehicle};
use crate::vehicle::MassProperties;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

/// Where the base hydrodynamic coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSource {
    /// Tabulated ALICE estimates with CFD values and trial calibration.
    #[default]
    Calibrated,
    /// Estimated from the configured geometry.
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleConfig {
    pub geometry: VehicleGeometry,
    pub mass: MassProperties,
    /// Defaults to the ALICE thrusters placed by the geometry's arms.
    pub thrusters: Option<Propulsion>,
    pub coefficients: CoefficientSource,
    pub estimation: EstimationOptions,
    /// Values replacing individual coefficients, by name (e.g. `"Y_vv"`).
    pub coefficient_overrides: BTreeMap<String, f64>,
    pub calibration: CalibrationFactors,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        Self {
            geometry: VehicleGeometry::alice(),
            mass: MassProperties::alice(),
            thrusters: None,
            coefficients: CoefficientSource::default(),
            estimation: EstimationOptions::default(),
            coefficient_overrides: BTreeMap::new(),
            calibration: CalibrationFactors::identity(),
        }
    }
}

impl VehicleConfig {
    pub fn propulsion(&self) -> Propulsion {
        self.thrusters
            .clone()
            .unwrap_or_else(|| Propulsion::alice(ThrusterArms::from_geometry(&self.geometry)))
    }

    /// Base set, then overrides, then calibration factors.
    pub fn coefficients(&self) -> Result<CoefficientSet, ConfigError> {
        let mut set = match self.coefficients {
            CoefficientSource::Calibrated => fixtures::simulation_default(),
            CoefficientSource::Estimated => {
                estimate_all(&self.geometry, &self.estimation).map_err(|e| invalid("vehicle.geometry", e))?
            }
        };
        for (name, value) in &self.coefficient_overrides {
            let c: Coefficient = name
                .parse()
                .map_err(|e| invalid(&format!("vehicle.coefficient_overrides.{name}"), e))?;
            if !value.is_finite() {
                return Err(invalid(
                    &format!("vehicle.coefficient_overrides.{name}"),
                    "value must be finite",
                ));
            }
            set.insert(c, *value, Provenance::Configured);
        }
        apply_calibration(&set, &self.calibration).map_err(|e| invalid("vehicle.calibration", e))
    }

    pub fn build(&self) -> Result<Vehicle, ConfigError> {
        self.geometry.validate().map_err(|e| invalid("vehicle.geometry", e))?;
        self.mass.validate().map_err(|e| invalid("vehicle.mass", e))?;
        self.propulsion()
            .validate()
            .map_err(|e| invalid("vehicle.thrusters", e))?;
        Vehicle::new(&self.coefficients()?, self.mass.clone(), self.propulsion()).map_err(|e| invalid("vehicle", e))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsConfig {
    pub controller: ControllerGains,
    pub allocator: AllocatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub region: Region,
    pub spacing: f64,
    pub altitude: f64,
    pub speed: f64,
    /// Along-track image overlap fraction.
    pub overlap: f64,
    pub camera: CameraSettings,
    pub footprint: CameraFootprint,
    pub controller: ControllerKind,
    pub dt: f64,
    pub max_time: f64,
    pub log_every: usize,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            region: Region::axis_aligned([0.0, 0.0], 17.0, 15.0).expect("static rectangle"),
            spacing: 1.0,
            altitude: 2.0,
            speed: 0.2,
            overlap: 0.6,
            camera: CameraSettings::default(),
            footprint: CameraFootprint::default(),
            controller: ControllerKind::Modified,
            dt: 0.01,
            max_time: 7200.0,
            log_every: 1,
        }
    }
}

impl MissionConfig {
    pub fn plan(&self) -> Result<MissionPlan, ConfigError> {
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(invalid("mission.overlap", "must lie in [0, 1)"));
        }
        let mut plan =
            plan_lawnmower(&self.region, self.spacing, self.altitude, self.speed).map_err(|e| invalid("mission", e))?;
        plan.camera = CameraSettings {
            frame_rate: frame_rate(self.speed, self.altitude, self.overlap),
            ..self.camera
        };
        Ok(plan)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub current: [f64; 3],
    pub rho: f64,
    pub seabed: Seabed,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        let e = Environment::default();
        Self {
            current: e.current,
            rho: e.rho,
            seabed: e.seabed,
        }
    }
}

impl EnvironmentConfig {
    pub fn environment(&self) -> Result<Environment, ConfigError> {
        let env = Environment {
            current: self.current,
            rho: self.rho,
            seabed: self.seabed.clone(),
        };
        env.validate().map_err(|e| invalid("environment", e))?;
        Ok(env)
    }
}

/// Whole configuration file. Every section and field is optional and
/// falls back to the ALICE defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub vehicle: VehicleConfig,
    pub gains: GainsConfig,
    pub mission: MissionConfig,
    pub environment: EnvironmentConfig,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gains
            .controller
            .validate()
            .map_err(|e| invalid("gains.controller", e))?;
        if !(self.gains.allocator.epsilon > 0.0) {
            return Err(invalid("gains.allocator.epsilon", "must be positive"));
        }
        let m = &self.mission;
        for (name, v) in [
            ("spacing", m.spacing),
            ("altitude", m.altitude),
            ("speed", m.speed),
            ("max_time", m.max_time),
        ] {
            if !(v > 0.0) {
                return Err(invalid(
                    &format!("mission.{name}"),
                    format!("must be positive, got {v}"),
                ));
            }
        }
        if !(m.dt > 0.0 && m.dt <= crate::simulator::MAX_DT) {
            return Err(invalid("mission.dt", format!("must lie in (0, 0.1], got {}", m.dt)));
        }
        self.environment.environment()?;
        Ok(())
    }

    pub fn mission_options(&self) -> MissionOptions {
        MissionOptions {
            controller: self.mission.controller,
            allocation: None,
            gains: self.gains.controller.clone(),
            allocator: self.gains.allocator.clone(),
            dt: self.mission.dt,
            max_time: self.mission.max_time,
            log_every: self.mission.log_every,
            initial: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_all_defaults() {
        let cfg = Config::from_json("{}").unwrap();
        assert_eq!(cfg, Config::default());
        assert!(cfg.vehicle.build().is_ok());
        assert_eq!(cfg.mission.plan().unwrap().transects().count(), 16);
    }

    #[test]
    fn round_trip_is_identical() {
        let mut cfg = Config::default();
        cfg.environment.current = [0.0, 0.1 + 0.2, 0.0];
        cfg.vehicle.coefficient_overrides.insert("Y_vv".into(), -1.0 / 3.0);
        cfg.mission.controller = ControllerKind::Original;
        let text = cfg.to_json();
        let back = Config::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(Config::from_json(&back.to_json()).unwrap(), back);
    }

    #[test]
    fn syntax_error_reports_line() {
        match Config::from_json("{\n  \"mission\": {\n    \"spacing\": ,\n  }\n}") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_field_is_named() {
        let err = Config::from_json(r#"{"mission": {"spacing": -1}}"#).unwrap_err();
        assert!(err.to_string().starts_with("mission.spacing"), "{err}");
        let err = Config::from_json(r#"{"environment": {"rho": 0}}"#).unwrap_err();
        assert!(err.to_string().starts_with("environment"), "{err}");
        assert!(matches!(
            Config::from_json(r#"{"mision": {}}"#),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn overrides_and_calibration_apply() {
        let mut v = VehicleConfig::default();
        v.coefficient_overrides.insert("X_uu".into(), -10.0);
        v.calibration = CalibrationFactors::new([(Coefficient::XUu, 2.0)]).unwrap();
        let set = v.coefficients().unwrap();
        assert_eq!(set.get(Coefficient::XUu).unwrap(), -20.0);
        v.coefficient_overrides.insert("bogus".into(), 1.0);
        assert!(v.coefficients().is_err());
    }

    #[test]
    fn estimated_source_builds() {
        let v = VehicleConfig {
            coefficients: CoefficientSource::Estimated,
            ..VehicleConfig::default()
        };
        assert!(v.build().is_ok());
    }
}
