//! Physical fluxes, their Jacobians, and two-point numerical fluxes.
//!
//! Directions are zero-based: `k` in `0..D` selects the flux `F_k` in the
//! `x_{k+1}` coordinate direction.

use nalgebra::DMatrix;

use crate::real::{mean, Real};
use crate::state::{cons_vector, PrimState, StateVector};

/// A flux vector tagged with the direction it was evaluated in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxVector<T, const D: usize> {
    pub direction: usize,
    pub values: StateVector<T, D>,
}

/// Physical flux `F_k`: momentum rows `p δ_ik + 4 p u_i u_k`, energy row
/// `4 p u_k sqrt(1 + |u|^2)`.
pub fn physical_flux<T: Real, const D: usize>(s: &PrimState<T, D>, k: usize) -> FluxVector<T, D> {
    FluxVector {
        direction: k,
        values: physical_flux_values(s, k),
    }
}

#[inline]
pub(crate) fn physical_flux_values<T: Real, const D: usize>(
    s: &PrimState<T, D>,
    k: usize,
) -> StateVector<T, D> {
    debug_assert!(k < D);
    let p = s.pressure();
    let u = s.velocity();
    let four_p_uk = T::lit(4.0) * p * u[k];
    let mut momentum = u.map(|ui| four_p_uk * ui);
    momentum[k] = momentum[k] + p;
    StateVector {
        momentum,
        energy: four_p_uk * s.lorentz_factor(),
    }
}

/// Jacobian `D_w F_k` of the physical flux with respect to the conserved
/// variables.
///
/// The momentum block is
/// `-2g/(3+2|u|^2) e_k u^T + (u_k/g) Id + u e_k^T / g + 2 u_k/(g(3+2|u|^2)) u u^T`
/// with `g = sqrt(1+|u|^2)`, the last column is
/// `(1+2|u|^2)/(3+2|u|^2) e_k - 4 u_k/(3+2|u|^2) u` and the last row is `e_k^T, 0`.
pub fn flux_jacobian<T: Real, const D: usize>(s: &PrimState<T, D>, k: usize) -> DMatrix<T> {
    debug_assert!(k < D);
    let two = T::lit(2.0);
    let u = s.velocity();
    let u2 = s.velocity_sq();
    let g = (T::one() + u2).sqrt();
    let kk = T::lit(3.0) + two * u2;
    let uk = u[k];

    let mut jac = DMatrix::from_element(D + 1, D + 1, T::zero());
    for i in 0..D {
        for j in 0..D {
            let mut entry = two * uk / (g * kk) * u[i] * u[j];
            if i == j {
                entry = entry + uk / g;
            }
            if i == k {
                entry = entry - two * g / kk * u[j];
            }
            if j == k {
                entry = entry + u[i] / g;
            }
            jac[(i, j)] = entry;
        }
        let ek = if i == k { (T::one() + two * u2) / kk } else { T::zero() };
        jac[(i, D)] = ek - T::lit(4.0) * uk / kk * u[i];
    }
    jac[(D, k)] = T::one();
    jac
}

/// Per-state quantities entering the entropy-conservative flux.
///
/// Precomputing these once per node keeps the fractional powers out of the
/// pairwise loops of flux differencing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcPoint<T, const D: usize> {
    pub p: T,
    pub sqrt_p: T,
    /// `u_i p^{-1/4}`
    pub scaled_velocity: [T; D],
    /// `p^{-1/4} sqrt(1 + |u|^2)`
    pub scaled_lorentz: T,
}

impl<T: Real, const D: usize> EcPoint<T, D> {
    pub fn new(s: &PrimState<T, D>) -> Self {
        let p = s.pressure();
        let pm14 = p.powf(-T::lit(0.25));
        Self {
            p,
            sqrt_p: p.sqrt(),
            scaled_velocity: s.velocity().map(|ui| ui * pm14),
            scaled_lorentz: pm14 * s.lorentz_factor(),
        }
    }
}

/// Entropy-conservative two-point flux from precomputed point data.
///
/// Every mean and product is commutative in its operands, so swapping `a`
/// and `b` reproduces the result bit for bit.
#[inline]
pub fn ec_flux_points<T: Real, const D: usize>(
    a: &EcPoint<T, D>,
    b: &EcPoint<T, D>,
    k: usize,
) -> StateVector<T, D> {
    debug_assert!(k < D);
    let two = T::lit(2.0);
    let weight = two * (a.p * b.sqrt_p + b.p * a.sqrt_p);
    let uk_mean = mean(a.scaled_velocity[k], b.scaled_velocity[k]);
    let wk = weight * uk_mean;
    let mut momentum: [T; D] =
        std::array::from_fn(|i| wk * mean(a.scaled_velocity[i], b.scaled_velocity[i]));
    momentum[k] = momentum[k] + mean(a.p, b.p);
    StateVector {
        momentum,
        energy: wk * mean(a.scaled_lorentz, b.scaled_lorentz),
    }
}

/// Symmetric, consistent, entropy-conservative two-point flux in direction `k`.
///
/// Momentum rows: `2(p_- sqrt(p_+) + p_+ sqrt(p_-)) {u_i p^{-1/4}} {u_k p^{-1/4}} + {p} δ_ik`;
/// energy row: `2(p_- sqrt(p_+) + p_+ sqrt(p_-)) {p^{-1/4} sqrt(1+|u|^2)} {u_k p^{-1/4}}`,
/// where `{a}` is the arithmetic mean of the two states.
pub fn ec_flux<T: Real, const D: usize>(
    left: &PrimState<T, D>,
    right: &PrimState<T, D>,
    k: usize,
) -> FluxVector<T, D> {
    FluxVector {
        direction: k,
        values: ec_flux_points(&EcPoint::new(left), &EcPoint::new(right), k),
    }
}

/// Upper bound on the characteristic speeds of any pair of states.
///
/// All signal speeds of the system are below the speed of light, so the
/// bound is the constant 1.
pub fn max_wave_speed<T: Real, const D: usize>(_left: &PrimState<T, D>, _right: &PrimState<T, D>) -> T {
    T::one()
}

/// Local Lax-Friedrichs (Rusanov) flux with dissipation speed [`max_wave_speed`].
pub fn rusanov_flux<T: Real, const D: usize>(
    left: &PrimState<T, D>,
    right: &PrimState<T, D>,
    k: usize,
) -> FluxVector<T, D> {
    FluxVector {
        direction: k,
        values: rusanov_flux_values(left, right, k),
    }
}

#[inline]
pub(crate) fn rusanov_flux_values<T: Real, const D: usize>(
    left: &PrimState<T, D>,
    right: &PrimState<T, D>,
    k: usize,
) -> StateVector<T, D> {
    let half = T::lit(0.5);
    let lambda = max_wave_speed(left, right);
    let central = physical_flux_values(left, k) + physical_flux_values(right, k);
    let jump = cons_vector(right) - cons_vector(left);
    central * half - jump * (half * lambda)
}

/// Interface flux choices shared by the DG and finite-volume solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericalFlux {
    EntropyConservative,
    Rusanov,
}

impl NumericalFlux {
    pub fn evaluate<T: Real, const D: usize>(
        self,
        left: &PrimState<T, D>,
        right: &PrimState<T, D>,
        k: usize,
    ) -> StateVector<T, D> {
        match self {
            NumericalFlux::EntropyConservative => ec_flux(left, right, k).values,
            NumericalFlux::Rusanov => rusanov_flux_values(left, right, k),
        }
    }
}
