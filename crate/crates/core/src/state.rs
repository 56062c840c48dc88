//! State algebra of the ultra-relativistic gas (equation of state `e = 3p`).
//!
//! Primitive states carry the pressure `p` and the spatial part `u` of the
//! four-velocity; conserved vectors are ordered `(w_1, ..., w_d, w_{d+1})`
//! with the momentum densities first and the energy density last:
//!
//! ```text
//! w_j     = 4 p u_j sqrt(1 + |u|^2)
//! w_{d+1} = p (3 + 4 |u|^2)
//! ```
//!
//! The spatial dimension `D` is a const parameter so 2D and 3D states can
//! never be mixed at a call site.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::real::Real;

/// A vector with `D + 1` entries laid out like the conserved variables.
///
/// Used for conserved vectors, entropy variables, fluxes and tendencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector<T, const D: usize> {
    pub momentum: [T; D],
    pub energy: T,
}

impl<T: Real, const D: usize> StateVector<T, D> {
    pub fn new(momentum: [T; D], energy: T) -> Self {
        Self { momentum, energy }
    }

    pub fn zero() -> Self {
        Self {
            momentum: [T::zero(); D],
            energy: T::zero(),
        }
    }

    /// Number of entries, `D + 1`.
    pub const LEN: usize = D + 1;

    pub fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        let momentum = std::array::from_fn(&mut f);
        let energy = f(D);
        Self { momentum, energy }
    }

    pub fn dot(&self, other: &Self) -> T {
        let mut acc = self.energy * other.energy;
        for i in 0..D {
            acc = acc + self.momentum[i] * other.momentum[i];
        }
        acc
    }

    pub fn momentum_norm_sq(&self) -> T {
        self.momentum.iter().fold(T::zero(), |acc, &m| acc + m * m)
    }

    /// Euclidean norm over all `D + 1` entries.
    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.momentum
            .iter()
            .fold(self.energy.abs(), |acc, &m| acc.max(m.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.energy.is_finite() && self.momentum.iter().all(|m| m.is_finite())
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        Self {
            momentum: self.momentum.map(&mut f),
            energy: f(self.energy),
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        (0..=D).map(|i| self[i]).collect()
    }
}

impl<T, const D: usize> Index<usize> for StateVector<T, D> {
    type Output = T;

    #[inline]
    fn index(&self, i: usize) -> &T {
        if i < D {
            &self.momentum[i]
        } else if i == D {
            &self.energy
        } else {
            panic!("state vector index {i} out of range for dimension {D}")
        }
    }
}

impl<T, const D: usize> IndexMut<usize> for StateVector<T, D> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        if i < D {
            &mut self.momentum[i]
        } else if i == D {
            &mut self.energy
        } else {
            panic!("state vector index {i} out of range for dimension {D}")
        }
    }
}

impl<T: Real, const D: usize> Add for StateVector<T, D> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out += rhs;
        out
    }
}

impl<T: Real, const D: usize> Sub for StateVector<T, D> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl<T: Real, const D: usize> AddAssign for StateVector<T, D> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..D {
            self.momentum[i] = self.momentum[i] + rhs.momentum[i];
        }
        self.energy = self.energy + rhs.energy;
    }
}

impl<T: Real, const D: usize> SubAssign for StateVector<T, D> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..D {
            self.momentum[i] = self.momentum[i] - rhs.momentum[i];
        }
        self.energy = self.energy - rhs.energy;
    }
}

impl<T: Real, const D: usize> Mul<T> for StateVector<T, D> {
    type Output = Self;

    #[inline]
    fn mul(self, a: T) -> Self {
        self.map(|x| x * a)
    }
}

impl<T: Real, const D: usize> Neg for StateVector<T, D> {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

/// Pressure and spatial four-velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimState<T, const D: usize> {
    p: T,
    u: [T; D],
}

impl<T: Real, const D: usize> PrimState<T, D> {
    /// Builds a state, rejecting non-positive or non-finite pressure and
    /// non-finite velocity components.
    pub fn new(p: T, u: [T; D]) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::degenerate(format!("pressure {p:e} is not positive")));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::degenerate("non-finite velocity"));
        }
        Ok(Self { p, u })
    }

    /// Fluid at rest with pressure `p`.
    pub fn at_rest(p: T) -> Result<Self> {
        Self::new(p, [T::zero(); D])
    }

    /// Builds a state from pressure and physical velocity `v = u / sqrt(1 + |u|^2)`.
    pub fn from_lorentz_velocity(p: T, v: [T; D]) -> Result<Self> {
        Self::new(p, four_velocity_from_lorentz(v)?)
    }

    #[inline]
    pub fn pressure(&self) -> T {
        self.p
    }

    #[inline]
    pub fn velocity(&self) -> &[T; D] {
        &self.u
    }

    #[inline]
    pub fn velocity_sq(&self) -> T {
        self.u.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// Time component of the four-velocity, `sqrt(1 + |u|^2)`.
    #[inline]
    pub fn lorentz_factor(&self) -> T {
        (T::one() + self.velocity_sq()).sqrt()
    }
}

/// Conserved vector known to satisfy `w_{d+1} > 0` and `3|w̄|^2 < 4 w_{d+1}^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsState<T, const D: usize>(StateVector<T, D>);

impl<T: Real, const D: usize> ConsState<T, D> {
    pub fn new(w: StateVector<T, D>) -> Result<Self> {
        prim_from_cons(&w)?;
        Ok(Self(w))
    }

    pub fn vector(&self) -> &StateVector<T, D> {
        &self.0
    }

    pub fn into_vector(self) -> StateVector<T, D> {
        self.0
    }

    /// Momentum part `w̄ = (w_1, ..., w_d)`.
    pub fn momentum(&self) -> &[T; D] {
        &self.0.momentum
    }

    pub fn energy(&self) -> T {
        self.0.energy
    }

    pub fn to_prim(&self) -> PrimState<T, D> {
        // Validated at construction.
        prim_from_cons(&self.0).expect("ConsState is valid by construction")
    }
}

/// Entropy, entropy variables and the associated potentials of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyState<T, const D: usize> {
    pub eta: T,
    pub omega: StateVector<T, D>,
    pub psi: [T; D],
    pub phi: T,
}

pub fn cons_from_prim<T: Real, const D: usize>(s: &PrimState<T, D>) -> ConsState<T, D> {
    ConsState(cons_vector(s))
}

#[inline]
pub(crate) fn cons_vector<T: Real, const D: usize>(s: &PrimState<T, D>) -> StateVector<T, D> {
    let four = T::lit(4.0);
    let u2 = s.velocity_sq();
    let g = (T::one() + u2).sqrt();
    let scale = four * s.p * g;
    StateVector {
        momentum: s.u.map(|uj| scale * uj),
        energy: s.p * (T::lit(3.0) + four * u2),
    }
}

/// Recovers `(p, u)` from a raw conserved vector.
///
/// Fails with [`Error::DegenerateState`] when the pressure root is not real
/// and positive, which is how unphysical solver states surface.
#[inline]
pub fn prim_from_cons<T: Real, const D: usize>(w: &StateVector<T, D>) -> Result<PrimState<T, D>> {
    let e = w.energy;
    let m2 = w.momentum_norm_sq();
    let radicand = T::lit(4.0) * e * e - T::lit(3.0) * m2;
    if !(e > T::zero()) || !(radicand > T::zero()) {
        return Err(Error::degenerate(format!(
            "conserved vector outside the admissible cone (energy {e:e}, radicand {radicand:e})"
        )));
    }
    let p = (radicand.sqrt() - e) / T::lit(3.0);
    if !(p > T::zero()) || !p.is_finite() {
        return Err(Error::degenerate(format!("recovered pressure {p:e}")));
    }
    let inv = (T::lit(4.0) * p * (e + p)).sqrt().recip();
    Ok(PrimState {
        p,
        u: w.momentum.map(|wj| wj * inv),
    })
}

/// Physical entropy `p^{3/4} sqrt(1 + |u|^2)` (concave in `w`).
pub fn entropy<T: Real, const D: usize>(s: &PrimState<T, D>) -> T {
    s.p.powf(T::lit(0.75)) * s.lorentz_factor()
}

/// Entropy flux `q = p^{3/4} u`.
pub fn entropy_flux<T: Real, const D: usize>(s: &PrimState<T, D>) -> [T; D] {
    let p34 = s.p.powf(T::lit(0.75));
    s.u.map(|uk| p34 * uk)
}

/// Gradient of the entropy with respect to `w`.
pub fn entropy_variables<T: Real, const D: usize>(s: &PrimState<T, D>) -> StateVector<T, D> {
    // eta / p = p^{-1/4} sqrt(1 + |u|^2), so the momentum entries reduce to -p^{-1/4} u_j / 4.
    let quarter = T::lit(0.25);
    let pm14 = s.p.powf(-quarter);
    StateVector {
        momentum: s.u.map(|uj| -quarter * pm14 * uj),
        energy: quarter * pm14 * s.lorentz_factor(),
    }
}

/// Flux potential `psi = -(1/4) eta u / sqrt(1 + |u|^2) = -(1/4) p^{3/4} u`.
pub fn flux_potential<T: Real, const D: usize>(s: &PrimState<T, D>) -> [T; D] {
    let c = -T::lit(0.25) * s.p.powf(T::lit(0.75));
    s.u.map(|uk| c * uk)
}

/// Entropy potential `phi = omega . w - eta = -eta / 4`.
pub fn entropy_potential<T: Real, const D: usize>(s: &PrimState<T, D>) -> T {
    -T::lit(0.25) * entropy(s)
}

pub fn entropy_state<T: Real, const D: usize>(s: &PrimState<T, D>) -> EntropyState<T, D> {
    let eta = entropy(s);
    EntropyState {
        eta,
        omega: entropy_variables(s),
        psi: flux_potential(s),
        phi: -T::lit(0.25) * eta,
    }
}

/// Derivatives of `p` (a row over `w`) and of each `u_i` (one row per
/// component) with respect to the conserved variables.
pub fn prim_gradients<T: Real, const D: usize>(
    s: &PrimState<T, D>,
) -> (StateVector<T, D>, [StateVector<T, D>; D]) {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let u2 = s.velocity_sq();
    let g = (T::one() + u2).sqrt();
    let k = T::lit(3.0) + two * u2;
    let p = s.p;

    let dp_dw = StateVector {
        momentum: s.u.map(|uj| -two * uj * g / k),
        energy: (T::one() + two * u2) / k,
    };
    let cross = (T::lit(5.0) + four * u2) / (four * p * g * k);
    let diag = (four * p * g).recip();
    let du_dw = std::array::from_fn(|i| {
        let ui = s.u[i];
        StateVector {
            momentum: std::array::from_fn(|j| {
                let d = if i == j { diag } else { T::zero() };
                d + ui * s.u[j] * cross
            }),
            energy: -ui / p * (T::one() + u2) / k,
        }
    });
    (dp_dw, du_dw)
}

/// Hessian of the entropy with respect to `w`; symmetric negative definite.
///
/// Written as `-(A1 + A2 + A3) / (16 p^{5/4} sqrt(1+|u|^2) (3 + 2|u|^2))` with
/// `A1 = (3+2|u|^2) Id` on the momentum block, `A2 = (7+6|u|^2) u u^T` on the
/// momentum block, and `A3` holding the energy row/column
/// `-(5+6|u|^2) sqrt(1+|u|^2) u_i` and corner `(1+|u|^2)(1+6|u|^2)`.
pub fn entropy_hessian<T: Real, const D: usize>(s: &PrimState<T, D>) -> DMatrix<T> {
    let u2 = s.velocity_sq();
    let g = (T::one() + u2).sqrt();
    let k = T::lit(3.0) + T::lit(2.0) * u2;
    let scale = -(T::lit(16.0) * s.p.powf(T::lit(1.25)) * g * k).recip();
    let a2 = T::lit(7.0) + T::lit(6.0) * u2;
    let a3 = -(T::lit(5.0) + T::lit(6.0) * u2) * g;

    let mut h = DMatrix::from_element(D + 1, D + 1, T::zero());
    for i in 0..D {
        for j in i..D {
            let id = if i == j { k } else { T::zero() };
            let entry = scale * (id + a2 * s.u[i] * s.u[j]);
            h[(i, j)] = entry;
            h[(j, i)] = entry;
        }
        let off = scale * a3 * s.u[i];
        h[(i, D)] = off;
        h[(D, i)] = off;
    }
    h[(D, D)] = scale * (T::one() + u2) * (T::one() + T::lit(6.0) * u2);
    h
}

/// Derivatives of the entropy flux components `q_i` with respect to `w`,
/// one row per component.
pub fn entropy_flux_gradients<T: Real, const D: usize>(
    s: &PrimState<T, D>,
) -> [StateVector<T, D>; D] {
    let two = T::lit(2.0);
    let u2 = s.velocity_sq();
    let g = (T::one() + u2).sqrt();
    let k = T::lit(3.0) + two * u2;
    let p14 = s.p.powf(T::lit(0.25));
    let denom = T::lit(4.0) * p14 * g * k;
    std::array::from_fn(|i| {
        let ui = s.u[i];
        StateVector {
            momentum: std::array::from_fn(|j| {
                let d = if i == j { k } else { T::zero() };
                (d - ui * s.u[j] * (T::one() + two * u2)) / denom
            }),
            energy: -ui / (T::lit(4.0) * p14) * (T::one() - two * u2) / k,
        }
    })
}

/// Physical velocity `v = u / sqrt(1 + |u|^2)`, `|v| < 1`.
pub fn lorentz_velocity<T: Real, const D: usize>(s: &PrimState<T, D>) -> [T; D] {
    let g = s.lorentz_factor();
    s.u.map(|uk| uk / g)
}

/// Inverse of [`lorentz_velocity`]: `u = v / sqrt(1 - |v|^2)`.
pub fn four_velocity_from_lorentz<T: Real, const D: usize>(v: [T; D]) -> Result<[T; D]> {
    let v2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
    if !(v2 < T::one()) {
        return Err(Error::degenerate(format!("|v|^2 = {v2:e} is not below 1")));
    }
    let g = (T::one() - v2).sqrt();
    Ok(v.map(|x| x / g))
}

/// Scalar form of [`lorentz_velocity`] used by the radial solvers.
#[inline]
pub fn speed_from_four_velocity<T: Real>(u: T) -> T {
    u / (T::one() + u * u).sqrt()
}

/// Scalar inverse `u = v / sqrt(1 - v^2)`.
#[inline]
pub fn four_velocity_from_speed<T: Real>(v: T) -> T {
    v / (T::one() - v * v).sqrt()
}
