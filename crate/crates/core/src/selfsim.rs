//! Self-similar radial solutions `p = P(theta)`, `v = V(theta)` with
//! `theta = t / x`, obtained from Lai's ODE system, and the shock states of
//! the compressive case.

use crate::error::{Error, Result};
use crate::real::Real;

/// Denominator magnitude treated as the sonic singularity.
pub const SONIC_TOLERANCE: f64 = 1e-10;
/// Tolerance on the shock criterion `V(theta) = 3/(2 theta) - theta/2`.
pub const SHOCK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaiOptions<T> {
    pub h: T,
    pub theta_cap: T,
    /// Store every `stride`-th step.
    pub stride: usize,
}

impl<T: Real> Default for LaiOptions<T> {
    fn default() -> Self {
        Self {
            h: T::lit(1e-6),
            theta_cap: T::lit(50.0),
            stride: 100,
        }
    }
}

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination<T> {
    ThetaCap,
    /// The ODE denominator vanished (or changed sign) after `theta`.
    Sonic { theta: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockData<T> {
    pub theta_tilde: T,
    pub s_tilde: T,
    pub p_plus: T,
    pub v_plus: T,
    pub p_minus: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Bracket<T> {
    theta: T,
    v: T,
    p: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfSimilarSolution<T> {
    pub d: usize,
    pub p0: T,
    pub v0: T,
    pub h: T,
    pub thetas: Vec<T>,
    pub v: Vec<T>,
    pub p: Vec<T>,
    pub shock: Option<ShockData<T>>,
    pub termination: Termination<T>,
    bracket: Option<Bracket<T>>,
}

#[inline]
fn denominator<T: Real>(theta: T, v: T) -> T {
    let a = theta * v - T::one();
    let b = v - theta;
    T::lit(3.0) * a * a - b * b
}

/// Right-hand side `(V', P')` of Lai's system.
///
/// `V = 0` is an exact fixed point, also where the denominator vanishes.
pub fn lai_rhs<T: Real>(d: usize, theta: T, v: T, p: T) -> (T, T) {
    if v == T::zero() {
        return (T::zero(), T::zero());
    }
    let dm1 = T::from_count(d - 1);
    let den = denominator(theta, v);
    let dv = dm1 * v * (v - theta) * (T::one() - v * v) / den;
    let dp = dm1 * T::lit(4.0) * p * v * (theta * v - T::one()) / den;
    (dv, dp)
}

fn rk4_step<T: Real>(d: usize, theta: T, v: T, p: T, h: T) -> (T, T) {
    let half = h * T::lit(0.5);
    let (k1v, k1p) = lai_rhs(d, theta, v, p);
    let (k2v, k2p) = lai_rhs(d, theta + half, v + half * k1v, p + half * k1p);
    let (k3v, k3p) = lai_rhs(d, theta + half, v + half * k2v, p + half * k2p);
    let (k4v, k4p) = lai_rhs(d, theta + h, v + h * k3v, p + h * k3p);
    let sixth = h / T::lit(6.0);
    (
        v + sixth * (k1v + T::lit(2.0) * (k2v + k3v) + k4v),
        p + sixth * (k1p + T::lit(2.0) * (k2p + k3p) + k4p),
    )
}

/// Shock criterion `g(theta) = V - (3/(2 theta) - theta/2)`.
#[inline]
fn shock_gap<T: Real>(theta: T, v: T) -> T {
    v - (T::lit(1.5) / theta - theta * T::lit(0.5))
}

/// Integrates Lai's system from `theta = 0` with classical RK4.
///
/// Stops at `theta_cap` or when the denominator gets within
/// [`SONIC_TOLERANCE`] of zero or changes sign; the reason is recorded in
/// [`SelfSimilarSolution::termination`]. The first step across which the
/// shock criterion changes sign (for `theta > sqrt 3`) is remembered for
/// [`find_theta_tilde`].
pub fn integrate_lai<T: Real>(d: usize, p0: T, v0: T, opts: &LaiOptions<T>) -> Result<SelfSimilarSolution<T>> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidArgument(format!("dimension {d} must be 2 or 3")));
    }
    if !(v0.abs() < T::one()) || !(p0 > T::zero()) || !(opts.h > T::zero()) || opts.stride == 0 {
        return Err(Error::InvalidArgument(
            "need |v0| < 1, p0 > 0, h > 0 and a positive stride".into(),
        ));
    }
    let sonic = T::lit(SONIC_TOLERANCE);
    let sqrt3 = T::lit(3.0).sqrt();
    let (mut theta, mut v, mut p) = (T::zero(), v0, p0);
    let mut sol = SelfSimilarSolution {
        d,
        p0,
        v0,
        h: opts.h,
        thetas: vec![theta],
        v: vec![v],
        p: vec![p],
        shock: None,
        termination: Termination::ThetaCap,
        bracket: None,
    };
    let mut den = denominator(theta, v);
    if v != T::zero() && den.abs() < sonic {
        return Err(Error::SonicDenominator { theta: 0.0 });
    }
    let mut step = 0usize;
    let mut stored_last = true;
    while theta < opts.theta_cap {
        let h = opts.h.min(opts.theta_cap - theta);
        let (vn, pn) = rk4_step(d, theta, v, p, h);
        let tn = T::from_count(step + 1) * opts.h;
        let tn = if h < opts.h { opts.theta_cap } else { tn };
        let den_n = denominator(tn, vn);
        let singular = den_n.abs() < sonic || den_n.signum() != den.signum();
        if !vn.is_finite() || !pn.is_finite() || (vn != T::zero() && singular) {
            sol.termination = Termination::Sonic { theta };
            break;
        }
        // The gap is negative just above sqrt(3), so the first step ending
        // with a non-negative gap brackets the crossing.
        if sol.bracket.is_none() && tn > sqrt3 && shock_gap(tn, vn) >= T::zero() {
            sol.bracket = Some(Bracket { theta, v, p });
        }
        theta = tn;
        v = vn;
        p = pn;
        den = den_n;
        step += 1;
        stored_last = step.is_multiple_of(opts.stride);
        if stored_last {
            sol.thetas.push(theta);
            sol.v.push(v);
            sol.p.push(p);
        }
    }
    if !stored_last {
        sol.thetas.push(theta);
        sol.v.push(v);
        sol.p.push(p);
    }
    Ok(sol)
}

/// Locates the shock `theta_tilde` by bisection on the length of a single
/// RK4 step from the left end of the bracketing step.
pub fn find_theta_tilde<T: Real>(sol: &SelfSimilarSolution<T>) -> Result<ShockData<T>> {
    let cap = sol.thetas.last().copied().unwrap_or(T::zero());
    let Some(br) = sol.bracket else {
        return Err(Error::NoShockFound {
            theta_cap: cap.to_f64_lossy(),
        });
    };
    let tol = T::lit(SHOCK_TOLERANCE);
    let gap_after = |tau: T| {
        let (v, p) = rk4_step(sol.d, br.theta, br.v, br.p, tau);
        (shock_gap(br.theta + tau, v), v, p)
    };
    // Left end of the bracket sits below sqrt(3) only on the first crossing step.
    let sqrt3 = T::lit(3.0).sqrt();
    let mut lo = if br.theta < sqrt3 { sqrt3 - br.theta } else { T::zero() };
    let mut hi = sol.h;
    let (mut g, mut v, mut p) = gap_after(hi);
    let mut tau = hi;
    for _ in 0..200 {
        tau = (lo + hi) * T::lit(0.5);
        (g, v, p) = gap_after(tau);
        if g.abs() <= tol && hi - lo <= T::epsilon() * T::lit(16.0) * (br.theta + tau) {
            break;
        }
        if g < T::zero() {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= T::epsilon() * (br.theta + tau) {
            break;
        }
    }
    if g.abs() > tol {
        return Err(Error::NoShockFound {
            theta_cap: cap.to_f64_lossy(),
        });
    }
    let theta_tilde = br.theta + tau;
    let s = theta_tilde.recip();
    let s2 = s * s;
    Ok(ShockData {
        theta_tilde,
        s_tilde: s,
        p_plus: p,
        v_plus: v,
        p_minus: p * T::lit(3.0) * (T::one() - s2) / (T::lit(9.0) * s2 - T::one()),
    })
}

/// Compressive case: integrates past the admissible shock range and
/// attaches the shock data.
pub fn solve_with_shock<T: Real>(d: usize, p0: T, v0: T, h: T) -> Result<SelfSimilarSolution<T>> {
    let theta_cap = (v0 * v0 + T::lit(3.0)).sqrt() - v0 + T::lit(0.01);
    let mut sol = integrate_lai(
        d,
        p0,
        v0,
        &LaiOptions {
            h,
            theta_cap,
            ..LaiOptions::default()
        },
    )?;
    sol.shock = Some(find_theta_tilde(&sol)?);
    Ok(sol)
}

impl<T: Real> SelfSimilarSolution<T> {
    /// `(P, V)` at `theta`, linearly interpolated; clamps to the table ends.
    pub fn at_theta(&self, theta: T) -> (T, T) {
        let n = self.thetas.len();
        if theta <= self.thetas[0] {
            return (self.p[0], self.v[0]);
        }
        if theta >= self.thetas[n - 1] {
            return (self.p[n - 1], self.v[n - 1]);
        }
        let i = self.thetas.partition_point(|&t| t <= theta) - 1;
        let (t0, t1) = (self.thetas[i], self.thetas[i + 1]);
        let w = (theta - t0) / (t1 - t0);
        (
            self.p[i] + w * (self.p[i + 1] - self.p[i]),
            self.v[i] + w * (self.v[i + 1] - self.v[i]),
        )
    }
}

/// Reference `(p, v)` at time `t > 0` and radius `x > 0`.
pub fn evaluate_reference<T: Real>(sol: &SelfSimilarSolution<T>, t: T, x: T) -> (T, T) {
    if let Some(shock) = &sol.shock {
        if x < shock.s_tilde * t {
            return (shock.p_minus, T::zero());
        }
    }
    if x.is_infinite() {
        return (sol.p0, sol.v0);
    }
    sol.at_theta(t / x)
}
