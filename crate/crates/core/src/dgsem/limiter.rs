//! Zhang-Shu scaling limiter for the pressure.

use rayon::prelude::*;

use super::field::DgField;
use super::lgl::LglOperator;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::StateVector;

pub const PRESSURE_FLOOR: f64 = 1e-10;

/// Pressure of a raw conserved vector, `None` outside the admissible cone.
#[inline]
fn pressure<T: Real, const D: usize>(w: &StateVector<T, D>) -> Option<T> {
    let e = w.energy;
    let radicand = T::lit(4.0) * e * e - T::lit(3.0) * w.momentum_norm_sq();
    if !(e > T::zero()) || !(radicand > T::zero()) {
        return None;
    }
    let p = (radicand.sqrt() - e) / T::lit(3.0);
    p.is_finite().then_some(p)
}

#[inline]
fn admissible<T: Real, const D: usize>(w: &StateVector<T, D>, floor: T) -> bool {
    pressure(w).is_some_and(|p| p >= floor)
}

/// Largest `theta` in [0, 1] found by bisection with `mean + theta (w - mean)`
/// admissible. The admissible set is convex and contains `mean`.
fn scaling_factor<T: Real, const D: usize>(mean: &StateVector<T, D>, w: &StateVector<T, D>, floor: T) -> T {
    let delta = *w - *mean;
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if admissible(&(*mean + delta * mid), floor) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Scales each element toward its mean so that every nodal pressure is at
/// least `floor`. Element means are untouched. Returns the number of
/// elements that were modified.
pub fn positivity_limit<T: Real, const D: usize>(
    field: &mut DgField<T, D>,
    op: &LglOperator<T>,
    floor: T,
) -> Result<usize> {
    let npe = field.nodes_per_element();
    let means: Vec<StateVector<T, D>> = (0..field.num_elements()).map(|e| field.element_mean(op, e)).collect();
    let touched = field
        .data_mut()
        .par_chunks_mut(npe)
        .zip(means.par_iter())
        .enumerate()
        .map(|(e, (nodes, mean))| -> Result<usize> {
            if nodes.iter().all(|w| admissible(w, floor)) {
                return Ok(0);
            }
            match pressure(mean) {
                Some(p) if p > floor => {}
                other => {
                    return Err(Error::UnrecoverableVacuum {
                        element: e,
                        mean_pressure: other.map_or(f64::NAN, |p| p.to_f64_lossy()),
                    })
                }
            }
            let theta = nodes
                .iter()
                .filter(|w| !admissible(*w, floor))
                .map(|w| scaling_factor(mean, w, floor))
                .fold(T::one(), T::min);
            for w in nodes.iter_mut() {
                *w = *mean + (*w - *mean) * theta;
            }
            Ok(1)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(touched)
}
