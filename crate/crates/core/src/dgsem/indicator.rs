//! Modal smoothness indicator steering the DG / finite-volume blend.

use super::field::node_index;
use super::lgl::LglOperator;
use super::mesh::CartesianMesh;
use crate::real::Real;
use crate::state::PrimState;

/// Parameters of the logistic blending ramp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendingParams<T> {
    /// Values below are snapped to pure DG (and above `1 - alpha_min` to pure FV).
    pub alpha_min: T,
    pub alpha_max: T,
    /// Threshold multiplier `a` in `T = a * 10^(-c (N+1)^(1/4))`.
    pub threshold_scale: T,
    pub threshold_exponent: T,
    /// Share neighbor values: `alpha = max(alpha, alpha_neighbor / 2)`.
    pub smoothing: bool,
}

impl<T: Real> Default for BlendingParams<T> {
    fn default() -> Self {
        Self {
            alpha_min: T::lit(1e-3),
            alpha_max: T::one(),
            threshold_scale: T::lit(0.5),
            threshold_exponent: T::lit(1.8),
            smoothing: true,
        }
    }
}

impl<T: Real> BlendingParams<T> {
    pub fn threshold(&self, order: usize) -> T {
        let n1 = T::from_count(order + 1);
        self.threshold_scale * T::lit(10.0).powf(-self.threshold_exponent * n1.powf(T::lit(0.25)))
    }
}

/// Indicator variable `p sqrt(1 + |u|^2)`.
#[inline]
pub fn indicator_variable<T: Real, const D: usize>(s: &PrimState<T, D>) -> T {
    s.pressure() * s.lorentz_factor()
}

/// Share of the modal energy carried by the highest modes of `values`
/// (nodal values on one element).
pub fn modal_energy<T: Real, const D: usize>(op: &LglOperator<T>, values: &[T]) -> T {
    let n1 = op.len();
    let mut modes = values.to_vec();
    let mut line = vec![T::zero(); n1];
    for k in 0..D {
        let stride = n1.pow(k as u32);
        for l in 0..modes.len() {
            if !(l / stride).is_multiple_of(n1) {
                continue;
            }
            for (j, out) in line.iter_mut().enumerate() {
                *out = (0..n1).fold(T::zero(), |acc, i| acc + op.modal(j, i) * modes[l + i * stride]);
            }
            for (j, v) in line.iter().enumerate() {
                modes[l + j * stride] = *v;
            }
        }
    }
    let order = op.order();
    let (mut total, mut clip1, mut clip2) = (T::zero(), T::zero(), T::zero());
    for (l, m) in modes.iter().enumerate() {
        let sq = *m * *m;
        let top = node_index::<D>(l, n1).into_iter().max().unwrap_or(0);
        total = total + sq;
        if top < order {
            clip1 = clip1 + sq;
        }
        if top + 1 < order {
            clip2 = clip2 + sq;
        }
    }
    let frac1 = if total > T::zero() { (total - clip1) / total } else { T::zero() };
    // With N = 1 there is no second-highest mode to compare against.
    let frac2 = if order >= 2 && clip1 > T::zero() { (clip1 - clip2) / clip1 } else { T::zero() };
    frac1.max(frac2)
}

/// Blending coefficient of one element from its nodal primitive states,
/// before neighbor smoothing.
pub fn blending_coefficient<T: Real, const D: usize>(
    op: &LglOperator<T>,
    prims: &[PrimState<T, D>],
    params: &BlendingParams<T>,
) -> T {
    let values: Vec<T> = prims.iter().map(indicator_variable).collect();
    let energy = modal_energy::<T, D>(op, &values);
    let threshold = params.threshold(op.order());
    let sharpness = T::lit(9999.0f64.ln());
    let alpha = (T::one() + (-sharpness / threshold * (energy - threshold)).exp()).recip();
    let alpha = if alpha < params.alpha_min {
        T::zero()
    } else if alpha > T::one() - params.alpha_min {
        T::one()
    } else {
        alpha
    };
    alpha.min(params.alpha_max)
}

/// Raises each coefficient to at least half of its face neighbors' values.
pub fn smooth_blending<T: Real, const D: usize>(mesh: &CartesianMesh<T, D>, alpha: &[T]) -> Vec<T> {
    let half = T::lit(0.5);
    (0..alpha.len())
        .map(|e| {
            let mut a = alpha[e];
            for k in 0..D {
                for side in [-1, 1] {
                    if let Some(nb) = mesh.neighbor(e, k, side) {
                        a = a.max(half * alpha[nb]);
                    }
                }
            }
            a
        })
        .collect()
}
