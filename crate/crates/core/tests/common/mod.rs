#![allow(dead_code)]

use auvkit::allocator::{AllocationProblem, ControlMatrix};
use auvkit::propulsion::{config_matrix, ThrusterArms};
use nalgebra::{DMatrix, DVector, Vector4};
use rand::Rng;

/// Random 5-thruster problem with ALICE-like structure.
pub fn random_problem(rng: &mut impl Rng) -> AllocationProblem {
    let arms = ThrusterArms {
        y_th: rng.gen_range(0.1..0.3),
        x_th4: rng.gen_range(0.3..0.8),
        x_th5: -rng.gen_range(0.3..0.8),
    };
    let b0 = AllocationProblem::control_matrix(&config_matrix(&arms));
    let f_max: [f64; 5] = std::array::from_fn(|_| rng.gen_range(5.0..40.0));
    let f_min: [f64; 5] = std::array::from_fn(|i| -f_max[i] * rng.gen_range(0.5..1.0));
    let weights: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.1..10.0));
    let scale = [60.0, 60.0, 40.0, 20.0];
    let tau = Vector4::from_fn(|i, _| rng.gen_range(-1.0..1.0) * scale[i]);
    AllocationProblem::new(tau, b0, weights, f_min, f_max, 1e-6).unwrap()
}

/// Box-constrained least squares by enumerating lower/upper/free for every
/// thruster. Returns the achieved force of the best feasible assignment.
pub fn brute_force_achieved(
    b: &ControlMatrix,
    tau: &Vector4<f64>,
    f_min: &[f64; 5],
    f_max: &[f64; 5],
) -> (Vector4<f64>, f64) {
    let mut best: Option<(f64, Vector4<f64>)> = None;
    for code in 0..3usize.pow(5) {
        let mut f = [0.0; 5];
        let mut free = Vec::new();
        let mut k = code;
        for i in 0..5 {
            match k % 3 {
                0 => f[i] = f_min[i],
                1 => f[i] = f_max[i],
                _ => free.push(i),
            }
            k /= 3;
        }
        let fixed_part = b * nalgebra::SVector::<f64, 5>::from(f);
        let r = tau - fixed_part;
        if !free.is_empty() {
            let bf = DMatrix::from_fn(4, free.len(), |row, c| b[(row, free[c])]);
            let x = bf
                .svd(true, true)
                .solve(&DVector::from_column_slice(r.as_slice()), 1e-12)
                .unwrap();
            if free
                .iter()
                .enumerate()
                .any(|(c, &i)| x[c] > f_max[i] + 1e-9 || x[c] < f_min[i] - 1e-9)
            {
                continue;
            }
            for (c, &i) in free.iter().enumerate() {
                f[i] = x[c];
            }
        }
        let achieved = b * nalgebra::SVector::<f64, 5>::from(f);
        let res = (achieved - tau).norm();
        if best.as_ref().is_none_or(|(r0, _)| res < r0 - 1e-12) {
            best = Some((res, achieved));
        }
    }
    let (res, achieved) = best.expect("all-clamped assignments are always feasible");
    (achieved, res)
}
