use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Vector3, Vector6};
use serde::{Deserialize, Serialize};

use super::wrap_angle;

/// Position in NED and roll/pitch/yaw Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, phi: f64, theta: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            z,
            phi,
            theta,
            psi,
        }
        .wrapped()
    }

    pub fn at(x: f64, y: f64, z: f64, psi: f64) -> Self {
        Self::new(x, y, z, 0.0, 0.0, psi)
    }

    /// Angles wrapped to (-π, π].
    pub fn wrapped(self) -> Self {
        Self {
            phi: wrap_angle(self.phi),
            theta: wrap_angle(self.theta),
            psi: wrap_angle(self.psi),
            ..self
        }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.x, self.y, self.z, self.phi, self.theta, self.psi)
    }

    /// Raw components; angles are not wrapped.
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
            phi: v[3],
            theta: v[4],
            psi: v[5],
        }
    }
}

/// Body-frame linear and angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyVelocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BodyVelocity {
    pub fn new(u: f64, v: f64, w: f64, p: f64, q: f64, r: f64) -> Self {
        Self { u, v, w, p, q, r }
    }

    pub fn surge(u: f64) -> Self {
        Self { u, ..Self::default() }
    }

    pub fn linear(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.w)
    }

    pub fn angular(&self) -> Vector3<f64> {
        Vector3::new(self.p, self.q, self.r)
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.u, self.v, self.w, self.p, self.q, self.r)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

/// Body-frame forces `X, Y, Z` and moments `K, M, N`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralizedForce {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl GeneralizedForce {
    pub const ZERO: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        k: 0.0,
        m: 0.0,
        n: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64, k: f64, m: f64, n: f64) -> Self {
        Self { x, y, z, k, m, n }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.x, self.y, self.z, self.k, self.m, self.n)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

impl Add for GeneralizedForce {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_vector(&(self.to_vector() + o.to_vector()))
    }
}

impl Sub for GeneralizedForce {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_vector(&(self.to_vector() - o.to_vector()))
    }
}

impl Neg for GeneralizedForce {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_vector(&-self.to_vector())
    }
}

impl Mul<f64> for GeneralizedForce {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_vector(&(self.to_vector() * s))
    }
}
