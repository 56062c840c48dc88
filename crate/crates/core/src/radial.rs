//! Finite-volume solver for radially symmetric flow in the `(a, b)`
//! variables
//!
//! ```text
//! (x^{d-1} a)_t + (x^{d-1} b)_x = 0
//! (x^{d-1} b)_t + (x^{d-1} c)_x = (d-1)/2 x^{d-2} (a - c)
//! ```
//!
//! with `a = p(3 + 4u^2)`, `b = 4pu sqrt(1 + u^2)` and `c = p + 4pu^2`.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::{four_velocity_from_speed, speed_from_four_velocity};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialState<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> RadialState<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        let s = Self { a, b };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if self.b.abs() < self.a && self.a.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidRadialState {
                a: self.a.to_f64_lossy(),
                b: self.b.to_f64_lossy(),
            })
        }
    }
}

/// `c = 5a/3 - (2/3) sqrt(4a^2 - 3b^2)`, the radial momentum flux `p + 4pu^2`.
pub fn c_of_ab<T: Real>(s: &RadialState<T>) -> Result<T> {
    s.check()?;
    let root = (T::lit(4.0) * s.a * s.a - T::lit(3.0) * s.b * s.b).sqrt();
    Ok((T::lit(5.0) * s.a - T::lit(2.0) * root) / T::lit(3.0))
}

/// `Θ(p, u) = (p(3 + 4u^2), 4pu sqrt(1 + u^2))` for the radial four-velocity `u`.
pub fn theta_map<T: Real>(p: T, u: T) -> RadialState<T> {
    let u2 = u * u;
    RadialState {
        a: p * (T::lit(3.0) + T::lit(4.0) * u2),
        b: T::lit(4.0) * p * u * (T::one() + u2).sqrt(),
    }
}

/// Inverse of [`theta_map`]: `p = (sqrt(4a^2 - 3b^2) - a) / 3`,
/// `u = b / sqrt(4p(a + p))`.
///
/// Evaluated as `p = (a^2 - b^2) / (sqrt(4a^2 - 3b^2) + a)` with
/// `a^2 - b^2 = (a - b)(a + b)` to avoid cancellation at large `|u|`.
pub fn theta_inv<T: Real>(s: &RadialState<T>) -> Result<(T, T)> {
    s.check()?;
    let q = (s.a - s.b) * (s.a + s.b);
    let p = q / ((s.a * s.a + T::lit(3.0) * q).sqrt() + s.a);
    if !(p > T::zero()) {
        return Err(Error::InvalidRadialState {
            a: s.a.to_f64_lossy(),
            b: s.b.to_f64_lossy(),
        });
    }
    let u = s.b / (T::lit(4.0) * p * (s.a + p)).sqrt();
    Ok((p, u))
}

/// Uniform cells on `[0, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid<T> {
    pub n: usize,
    pub x_max: T,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(n: usize, x_max: T) -> Result<Self> {
        if n < 2 || !(x_max > T::zero()) {
            return Err(Error::InvalidArgument("radial grid needs n >= 2 and x_max > 0".into()));
        }
        Ok(Self { n, x_max })
    }

    pub fn dx(&self) -> T {
        self.x_max / T::from_count(self.n)
    }

    pub fn center(&self, i: usize) -> T {
        (T::from_count(i) + T::lit(0.5)) * self.dx()
    }

    pub fn face(&self, i: usize) -> T {
        T::from_count(i) * self.dx()
    }

    pub fn centers(&self) -> Vec<T> {
        (0..self.n).map(|i| self.center(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    FirstOrder,
    /// Minmod-limited linear reconstruction of `(p, v)`.
    Muscl,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialConfig<T> {
    pub d: usize,
    pub cfl: T,
    pub t_end: T,
    pub reconstruction: Reconstruction,
    /// Profile times in `(0, t_end]`; `t_end` is always recorded.
    pub output_times: Vec<T>,
    pub max_retries: usize,
}

impl<T: Real> Default for RadialConfig<T> {
    fn default() -> Self {
        Self {
            d: 2,
            cfl: T::lit(0.4),
            t_end: T::one(),
            reconstruction: Reconstruction::Muscl,
            output_times: Vec::new(),
            max_retries: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile<T> {
    pub t: T,
    pub x: Vec<T>,
    pub p: Vec<T>,
    /// Radial speed `u / sqrt(1 + u^2)`.
    pub v: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialRun<T> {
    pub profiles: Vec<RadialProfile<T>>,
    /// `(t, p)` in the innermost cell after every step.
    pub center_history: Vec<(T, T)>,
    pub steps: usize,
    pub retries: usize,
}

impl<T: Real> RadialRun<T> {
    /// Time at which the innermost-cell pressure peaks.
    pub fn focusing_time(&self) -> Option<T> {
        self.center_history
            .iter()
            .copied()
            .fold(None, |best: Option<(T, T)>, (t, p)| match best {
                Some((_, pb)) if pb >= p => best,
                _ => Some((t, p)),
            })
            .map(|(t, _)| t)
    }
}

/// Semidiscrete operator of the weighted system on a fixed grid.
#[derive(Clone, Debug)]
pub struct RadialScheme<T> {
    pub grid: RadialGrid<T>,
    pub d: usize,
    pub reconstruction: Reconstruction,
    face_weight: Vec<T>,
    volume: Vec<T>,
    source_weight: Vec<T>,
}

#[inline]
fn minmod<T: Real>(a: T, b: T) -> T {
    if a * b <= T::zero() {
        T::zero()
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn llf<T: Real>(l: (T, T, T), r: (T, T, T)) -> (T, T) {
    // (a, b, c) on each side; dissipation speed 1.
    let half = T::lit(0.5);
    (
        half * (l.1 + r.1) - half * (r.0 - l.0),
        half * (l.2 + r.2) - half * (r.1 - l.1),
    )
}

#[inline]
fn abc<T: Real>(p: T, v: T) -> (T, T, T) {
    let u = four_velocity_from_speed(v);
    let s = theta_map(p, u);
    (s.a, s.b, p + T::lit(4.0) * p * u * u)
}

impl<T: Real> RadialScheme<T> {
    pub fn new(grid: RadialGrid<T>, d: usize, reconstruction: Reconstruction) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("dimension {d} must be 1, 2 or 3")));
        }
        let dd = d as i32;
        let face_weight = (0..=grid.n).map(|i| grid.face(i).powi(dd - 1)).collect();
        let volume = (0..grid.n)
            .map(|i| (grid.face(i + 1).powi(dd) - grid.face(i).powi(dd)) / T::from_count(d))
            .collect();
        let half_dm1 = T::from_count(d - 1) * T::lit(0.5);
        let source_weight = (0..grid.n)
            .map(|i| half_dm1 * grid.center(i).powi(dd - 2) * grid.dx())
            .collect();
        Ok(Self {
            grid,
            d,
            reconstruction,
            face_weight,
            volume,
            source_weight,
        })
    }

    /// Pressure and radial speed of every cell.
    pub fn primitives(&self, states: &[RadialState<T>]) -> Result<(Vec<T>, Vec<T>)> {
        let mut p = Vec::with_capacity(states.len());
        let mut v = Vec::with_capacity(states.len());
        for s in states {
            let (pi, ui) = theta_inv(s)?;
            p.push(pi);
            v.push(speed_from_four_velocity(ui));
        }
        Ok((p, v))
    }

    /// Time derivative of `(a, b)` in every cell.
    pub fn rhs(&self, states: &[RadialState<T>]) -> Result<Vec<RadialState<T>>> {
        let n = self.grid.n;
        let (p, v) = self.primitives(states)?;
        // Ghost cells: reflection at the origin, extrapolation outside.
        let pe = |i: isize| -> T {
            if i < 0 {
                p[(-i - 1) as usize]
            } else {
                p[(i as usize).min(n - 1)]
            }
        };
        let ve = |i: isize| -> T {
            if i < 0 {
                -v[(-i - 1) as usize]
            } else {
                v[(i as usize).min(n - 1)]
            }
        };
        let half = T::lit(0.5);
        let slope = |i: isize| -> (T, T) {
            match self.reconstruction {
                Reconstruction::FirstOrder => (T::zero(), T::zero()),
                Reconstruction::Muscl => (
                    minmod(pe(i) - pe(i - 1), pe(i + 1) - pe(i)),
                    minmod(ve(i) - ve(i - 1), ve(i + 1) - ve(i)),
                ),
            }
        };
        // Face k sits between cells k-1 and k.
        let mut flux = Vec::with_capacity(n + 1);
        let mut left_slope = slope(-1);
        for k in 0..=n as isize {
            let right_slope = slope(k);
            let l = abc(pe(k - 1) + half * left_slope.0, ve(k - 1) + half * left_slope.1);
            let r = abc(pe(k) - half * right_slope.0, ve(k) - half * right_slope.1);
            let (fa, fb) = llf(l, r);
            let w = self.face_weight[k as usize];
            flux.push((w * fa, w * fb));
            left_slope = right_slope;
        }
        Ok((0..n)
            .map(|i| {
                let u = four_velocity_from_speed(v[i]);
                let c = p[i] * (T::one() + T::lit(4.0) * u * u);
                let source = self.source_weight[i] * (states[i].a - c);
                RadialState {
                    a: -(flux[i + 1].0 - flux[i].0) / self.volume[i],
                    b: (source - (flux[i + 1].1 - flux[i].1)) / self.volume[i],
                }
            })
            .collect())
    }

    fn ssprk3_step(&self, u0: &[RadialState<T>], dt: T) -> Result<Vec<RadialState<T>>> {
        let axpy = |u: &[RadialState<T>], du: &[RadialState<T>], a: T, base: Option<(&[RadialState<T>], T)>| -> Result<Vec<RadialState<T>>> {
            u.iter()
                .zip(du)
                .enumerate()
                .map(|(i, (s, ds))| {
                    let mut a_new = s.a + a * ds.a;
                    let mut b_new = s.b + a * ds.b;
                    if let Some((b0, w)) = base {
                        a_new = w * b0[i].a + (T::one() - w) * a_new;
                        b_new = w * b0[i].b + (T::one() - w) * b_new;
                    }
                    RadialState::new(a_new, b_new)
                })
                .collect()
        };
        let u1 = axpy(u0, &self.rhs(u0)?, dt, None)?;
        let u2 = axpy(&u1, &self.rhs(&u1)?, dt, Some((u0, T::lit(0.75))))?;
        axpy(&u2, &self.rhs(&u2)?, dt, Some((u0, T::one() / T::lit(3.0))))
    }
}

/// Runs the radial solver from point values `init(x) -> (p, v)` at the
/// cell centers.
pub fn run_radial<T, F>(grid: RadialGrid<T>, config: &RadialConfig<T>, init: F) -> Result<RadialRun<T>>
where
    T: Real,
    F: Fn(T) -> (T, T),
{
    if !(config.cfl > T::zero() && config.cfl <= T::one()) || !(config.t_end > T::zero()) {
        return Err(Error::InvalidArgument("need cfl in (0, 1] and t_end > 0".into()));
    }
    let scheme = RadialScheme::new(grid, config.d, config.reconstruction)?;
    let mut states = grid
        .centers()
        .into_iter()
        .map(|x| {
            let (p, v) = init(x);
            let s = theta_map(p, four_velocity_from_speed(v));
            RadialState::new(s.a, s.b)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut times: Vec<T> = config
        .output_times
        .iter()
        .copied()
        .filter(|&t| t > T::zero() && t < config.t_end)
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite output times"));
    times.push(config.t_end);

    let profile = |t: T, states: &[RadialState<T>]| -> Result<RadialProfile<T>> {
        let (p, v) = scheme.primitives(states)?;
        Ok(RadialProfile {
            t,
            x: grid.centers(),
            p,
            v,
        })
    };

    let mut run = RadialRun {
        profiles: Vec::new(),
        center_history: vec![(T::zero(), init(grid.center(0)).0)],
        steps: 0,
        retries: 0,
    };
    let dt_cfl = config.cfl * grid.dx();
    let mut t = T::zero();
    for target in times {
        let tiny = target.abs().max(T::one()) * T::epsilon() * T::lit(16.0);
        while target - t > tiny {
            let mut dt = dt_cfl.min(target - t);
            let mut attempt = 0;
            let next = loop {
                match scheme.ssprk3_step(&states, dt) {
                    Ok(next) => break next,
                    Err(Error::InvalidRadialState { .. }) if attempt < config.max_retries => {
                        attempt += 1;
                        run.retries += 1;
                        dt = dt * T::lit(0.5);
                    }
                    Err(Error::InvalidRadialState { .. }) => {
                        return Err(Error::StepCollapse {
                            t: t.to_f64_lossy(),
                            dt: dt.to_f64_lossy(),
                        })
                    }
                    Err(other) => return Err(other),
                }
            };
            states = next;
            t = t + dt;
            run.steps += 1;
            let (p0, _) = theta_inv(&states[0])?;
            run.center_history.push((t, p0));
        }
        t = target.max(t);
        run.profiles.push(profile(t, &states)?);
    }
    Ok(run)
}
