//! Hovering-AUV toolkit: hydrodynamic coefficient estimation, 6-DOF
//! dynamics, thruster modeling and allocation, path following, simulation
//! and survey planning.

pub mod allocator;
pub mod guidance;
pub mod hydro;
pub mod mission;
pub mod propulsion;
pub mod simulator;
pub mod vehicle;
