use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::SimError;

/// Seabed depth below the surface [m], constant or on a regular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seabed {
    Flat(f64),
    Grid(SeabedGrid),
}

/// Depths sampled on a regular north/east grid, bilinearly interpolated
/// and held constant beyond the edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeabedGrid {
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    /// Row-major `depths[i][j]` at `origin + (i·dx, j·dy)`.
    pub depths: Vec<Vec<f64>>,
}

impl Seabed {
    pub fn depth_at(&self, x: f64, y: f64) -> f64 {
        match self {
            Seabed::Flat(d) => *d,
            Seabed::Grid(g) => g.depth_at(x, y),
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            Seabed::Flat(d) if d.is_finite() => Ok(()),
            Seabed::Flat(d) => Err(format!("seabed depth must be finite, got {d}")),
            Seabed::Grid(g) => g.validate(),
        }
    }
}

impl SeabedGrid {
    fn validate(&self) -> Result<(), String> {
        if !(self.spacing[0] > 0.0 && self.spacing[1] > 0.0) {
            return Err("seabed grid spacing must be positive".into());
        }
        let cols = self.depths.first().map_or(0, Vec::len);
        if cols == 0 || self.depths.iter().any(|r| r.len() != cols) {
            return Err("seabed grid must be a non-empty rectangle".into());
        }
        if self.depths.iter().flatten().any(|d| !d.is_finite()) {
            return Err("seabed grid depths must be finite".into());
        }
        Ok(())
    }

    fn depth_at(&self, x: f64, y: f64) -> f64 {
        let locate = |v: f64, o: f64, h: f64, n: usize| -> (usize, f64) {
            let s = ((v - o) / h).clamp(0.0, (n - 1) as f64);
            let i = (s.floor() as usize).min(n.saturating_sub(2));
            (i, if n > 1 { s - i as f64 } else { 0.0 })
        };
        let (ni, nj) = (self.depths.len(), self.depths[0].len());
        let (i, fx) = locate(x, self.origin[0], self.spacing[0], ni);
        let (j, fy) = locate(y, self.origin[1], self.spacing[1], nj);
        let at = |a: usize, b: usize| self.depths[a.min(ni - 1)][b.min(nj - 1)];
        let top = at(i, j) * (1.0 - fy) + at(i, j + 1) * fy;
        let bot = at(i + 1, j) * (1.0 - fy) + at(i + 1, j + 1) * fy;
        top * (1.0 - fx) + bot * fx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Environment {
    /// Steady Earth-frame current [m/s].
    pub current: [f64; 3],
    pub rho: f64,
    pub seabed: Seabed,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            current: [0.0; 3],
            rho: 1025.0,
            seabed: Seabed::Flat(10.0),
        }
    }
}

impl Environment {
    pub fn with_current(current: [f64; 3]) -> Self {
        Self {
            current,
            ..Self::default()
        }
    }

    pub fn current_vector(&self) -> Vector3<f64> {
        Vector3::from(self.current)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidEnvironment(m));
        if !(self.rho > 0.0) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        let c = self.current_vector().norm();
        if !(c < 2.0) {
            return bad(format!("current magnitude must be below 2 m/s, got {c}"));
        }
        self.seabed.validate().or_else(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_interpolates_and_holds_edges() {
        let g = Seabed::Grid(SeabedGrid {
            origin: [0.0, 0.0],
            spacing: [10.0, 10.0],
            depths: vec![vec![10.0, 20.0], vec![30.0, 40.0]],
        });
        assert_eq!(g.depth_at(0.0, 0.0), 10.0);
        assert_eq!(g.depth_at(5.0, 5.0), 25.0);
        assert_eq!(g.depth_at(100.0, -5.0), 30.0);
    }

    #[test]
    fn validation() {
        assert!(Environment::default().validate().is_ok());
        assert!(Environment::with_current([2.0, 0.0, 0.0]).validate().is_err());
        let e = Environment {
            rho: 0.0,
            ..Environment::default()
        };
        assert!(e.validate().is_err());
    }
}
