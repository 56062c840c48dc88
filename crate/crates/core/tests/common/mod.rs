//! Test-only oracles: random admissible states and central finite differences.
#![allow(dead_code)]

pub mod suite;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use urel_core::state::{prim_from_cons, PrimState, StateVector};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Pressure log-uniform in [1e-3, 1e3], velocity components uniform in [-10, 10].
pub fn random_prim<const D: usize>(rng: &mut StdRng) -> PrimState<f64, D> {
    let p = 10f64.powf(rng.gen_range(-3.0..3.0));
    let u = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
    PrimState::new(p, u).unwrap()
}

pub fn step_size<const D: usize>(w: &StateVector<f64, D>, rel: f64) -> f64 {
    rel * w.norm().max(1.0)
}

/// Fourth-order central difference along entry `j` of `w`.
fn central<const D: usize, R>(
    w: &StateVector<f64, D>,
    j: usize,
    h: f64,
    f: &impl Fn(&StateVector<f64, D>) -> R,
    combine: impl Fn([R; 4]) -> R,
) -> R {
    let shifted = |t: f64| {
        let mut x = *w;
        x[j] += t;
        f(&x)
    };
    combine([shifted(2.0 * h), shifted(h), shifted(-h), shifted(-2.0 * h)])
}

fn stencil(v: [f64; 4], h: f64) -> f64 {
    (-v[0] + 8.0 * v[1] - 8.0 * v[2] + v[3]) / (12.0 * h)
}

/// Central-difference gradient of a scalar function of the conserved vector.
pub fn fd_gradient<const D: usize>(
    w: &StateVector<f64, D>,
    h: f64,
    f: impl Fn(&StateVector<f64, D>) -> f64,
) -> Vec<f64> {
    (0..=D).map(|j| central(w, j, h, &f, |v| stencil(v, h))).collect()
}

/// Central-difference Jacobian (rows: outputs, columns: entries of `w`).
pub fn fd_jacobian<const D: usize>(
    w: &StateVector<f64, D>,
    h: f64,
    f: impl Fn(&StateVector<f64, D>) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..=D)
        .map(|j| {
            central(w, j, h, &f, |[a, b, c, d]| {
                (0..a.len()).map(|i| stencil([a[i], b[i], c[i], d[i]], h)).collect()
            })
        })
        .collect();
    let rows = cols[0].len();
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Fourth-order finite-difference Hessian of a scalar function.
pub fn fd_hessian<const D: usize>(
    w: &StateVector<f64, D>,
    h: f64,
    f: impl Fn(&StateVector<f64, D>) -> f64,
) -> Vec<Vec<f64>> {
    const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
    const FIRST: [f64; 4] = [1.0, -8.0, 8.0, -1.0];
    let n = D + 1;
    let eval = |i: usize, a: f64, j: usize, b: f64| {
        let mut x = *w;
        x[i] += a;
        x[j] += b;
        f(&x)
    };
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        let f0 = f(w);
        let e = |t: f64| eval(i, t * h, i, 0.0);
        hess[i][i] = (-e(2.0) + 16.0 * e(1.0) - 30.0 * f0 + 16.0 * e(-1.0) - e(-2.0)) / (12.0 * h * h);
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for (a, ca) in OFFSETS.iter().zip(FIRST) {
                for (b, cb) in OFFSETS.iter().zip(FIRST) {
                    acc += ca * cb * eval(i, a * h, j, b * h);
                }
            }
            hess[i][j] = acc / (144.0 * h * h);
            hess[j][i] = hess[i][j];
        }
    }
    hess
}

pub fn max_abs(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn pressure_of<const D: usize>(w: &StateVector<f64, D>) -> f64 {
    prim_from_cons(w).unwrap().pressure()
}
