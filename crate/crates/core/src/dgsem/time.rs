//! Four-stage, third-order strong-stability-preserving Runge-Kutta scheme.

use super::field::DgField;
use crate::error::Result;
use crate::real::Real;

/// Values that can be combined linearly by the time integrator.
pub trait LinearCombination<T>: Sized {
    /// `a * self + b * other`
    fn lincomb(&self, a: T, other: &Self, b: T) -> Self;
}

impl<T: Real, const D: usize> LinearCombination<T> for DgField<T, D> {
    fn lincomb(&self, a: T, other: &Self, b: T) -> Self {
        DgField::lincomb(self, a, other, b)
    }
}

impl<T: Real> LinearCombination<T> for Vec<T> {
    fn lincomb(&self, a: T, other: &Self, b: T) -> Self {
        self.iter().zip(other).map(|(&x, &y)| a * x + b * y).collect()
    }
}

/// Stage times of [`ssprk43_step`] as fractions of the step.
pub const SSPRK43_STAGE_TIMES: [f64; 4] = [0.0, 0.5, 1.0, 0.5];

/// One step of SSPRK(4,3):
///
/// ```text
/// u1 = u0 + dt/2 L(u0)
/// u2 = u1 + dt/2 L(u1)
/// u3 = 2/3 u0 + 1/3 (u2 + dt/2 L(u2))
/// u4 = u3 + dt/2 L(u3)
/// ```
///
/// `rhs` receives the stage index (see [`SSPRK43_STAGE_TIMES`]); `limit` runs
/// after every stage.
pub fn ssprk43_step<T, V, R, L>(u0: &V, dt: T, mut rhs: R, mut limit: L) -> Result<V>
where
    T: Real,
    V: LinearCombination<T>,
    R: FnMut(&V, usize) -> Result<V>,
    L: FnMut(&mut V) -> Result<()>,
{
    let half_dt = dt * T::lit(0.5);
    let mut u1 = u0.lincomb(T::one(), &rhs(u0, 0)?, half_dt);
    limit(&mut u1)?;
    let mut u2 = u1.lincomb(T::one(), &rhs(&u1, 1)?, half_dt);
    limit(&mut u2)?;
    let third = T::one() / T::lit(3.0);
    let mut u3 = u2
        .lincomb(T::one(), &rhs(&u2, 2)?, half_dt)
        .lincomb(third, u0, T::lit(2.0) * third);
    limit(&mut u3)?;
    let mut u4 = u3.lincomb(T::one(), &rhs(&u3, 3)?, half_dt);
    limit(&mut u4)?;
    Ok(u4)
}

/// Amplification factor of [`ssprk43_step`] for `y' = lambda y`, `z = lambda dt`.
pub fn ssprk43_stability<T: Real>(z: T) -> T {
    let z2 = z * z;
    T::one() + z + z2 * T::lit(0.5) + z2 * z / T::lit(6.0) + z2 * z2 / T::lit(48.0)
}
