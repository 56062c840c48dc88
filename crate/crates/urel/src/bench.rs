//! Initial conditions, run orchestration and comparison metrics for the
//! benchmark examples.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use urel_core::dgsem::{
    lgl_operator, node_coordinates, node_weight, Boundary, CartesianMesh, DgField, EntropyRecord, LglOperator,
    Simulation, SolverConfig, BlendingParams,
};
use urel_core::fluxes::NumericalFlux;
use urel_core::radial::{run_radial, RadialConfig, RadialGrid, RadialProfile, RadialRun};
use urel_core::selfsim::{evaluate_reference, integrate_lai, solve_with_shock, LaiOptions, SelfSimilarSolution};
use urel_core::state::{four_velocity_from_speed, lorentz_velocity, speed_from_four_velocity, PrimState};
use urel_core::Error;

use crate::error::{BenchError, Result};
use crate::io;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    EntropyTest,
}

impl FromStr for Example {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Example::Ex1),
            "2" => Ok(Example::Ex2),
            "3" => Ok(Example::Ex3),
            "4" => Ok(Example::Ex4),
            "5" => Ok(Example::Ex5),
            "entropy_test" | "entropy-test" => Ok(Example::EntropyTest),
            other => Err(BenchError::Invalid(format!("unknown example '{other}'"))),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::Ex1 => "1",
            Example::Ex2 => "2",
            Example::Ex3 => "3",
            Example::Ex4 => "4",
            Example::Ex5 => "5",
            Example::EntropyTest => "entropy_test",
        })
    }
}

impl Example {
    /// Examples with a self-similar reference solution.
    pub fn is_self_similar(self) -> bool {
        matches!(self, Example::Ex1 | Example::Ex2 | Example::EntropyTest)
    }

    /// Far-field radial speed of the self-similar examples.
    pub fn v0(self) -> Option<f64> {
        match self {
            Example::Ex1 => Some(-1.0 / SQRT_2),
            Example::Ex2 => Some(1.0 / 5f64.sqrt()),
            Example::EntropyTest => Some(-1.0 / 26f64.sqrt()),
            _ => None,
        }
    }

    /// Half-width `L` of the default domain `[-L, L]^d`.
    pub fn half_width(self) -> f64 {
        match self {
            Example::Ex1 | Example::Ex2 | Example::EntropyTest => 2.0,
            Example::Ex3 | Example::Ex4 => 6.0,
            Example::Ex5 => 5.0,
        }
    }

    pub fn default_t_end(self) -> f64 {
        match self {
            Example::Ex1 | Example::Ex2 | Example::EntropyTest => 1.0,
            _ => 6.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Dgsem,
    Radial,
    Selfsim,
}

impl FromStr for Solver {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dgsem" => Ok(Solver::Dgsem),
            "radial" => Ok(Solver::Radial),
            "selfsim" => Ok(Solver::Selfsim),
            other => Err(BenchError::Invalid(format!("unknown solver '{other}'"))),
        }
    }
}

/// Radial pressure and radial four-velocity at distance `r` from the origin.
pub fn radial_initial(example: Example, r: f64) -> std::result::Result<(f64, f64), Error> {
    match example {
        Example::Ex1 | Example::Ex2 | Example::EntropyTest => {
            if r == 0.0 {
                return Err(Error::OriginUndefined);
            }
            let v0 = example.v0().expect("self-similar example");
            Ok((1.0, four_velocity_from_speed(v0)))
        }
        Example::Ex3 => Ok((if r <= 1.0 { 1.0 } else { 0.1 }, 0.0)),
        Example::Ex4 => Ok((if r <= 1.0 { 0.1 } else { 1.0 }, 0.0)),
        Example::Ex5 => Ok((1.0, if r < 1.0 { (2.0 * PI * r).sin() } else { 0.0 })),
    }
}

fn radius<const D: usize>(x: &[f64; D]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn radial_state<const D: usize>(x: &[f64; D], p: f64, u: f64) -> std::result::Result<PrimState<f64, D>, Error> {
    let r = radius(x);
    if u == 0.0 || r == 0.0 {
        return PrimState::at_rest(p);
    }
    PrimState::new(p, x.map(|c| u * c / r))
}

/// Exact initial data at the point `x`.
pub fn initial_condition<const D: usize>(
    example: Example,
    x: &[f64; D],
) -> std::result::Result<PrimState<f64, D>, Error> {
    let (p, u) = radial_initial(example, radius(x))?;
    radial_state(x, p, u)
}

/// [`initial_condition`] with `u = 0` substituted at the origin.
pub fn initial_condition_or_rest<const D: usize>(
    example: Example,
    x: &[f64; D],
) -> std::result::Result<PrimState<f64, D>, Error> {
    match initial_condition(example, x) {
        Err(Error::OriginUndefined) => PrimState::at_rest(radial_initial(example, 1.0)?.0),
        other => other,
    }
}

/// Radius below which the entropy-test velocity is ramped down.
pub const MOLLIFIER_RADIUS: f64 = 0.1;

/// `10s^3 - 15s^4 + 6s^5`: zero at 0, one at 1, with vanishing first and
/// second derivatives at 1.
fn ramp(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
}

/// Entropy-test data with the radial speed ramped to zero over
/// `|x| < MOLLIFIER_RADIUS`.
pub fn mollified_entropy_test<const D: usize>(x: &[f64; D]) -> std::result::Result<PrimState<f64, D>, Error> {
    let r = radius(x);
    let u0 = four_velocity_from_speed(Example::EntropyTest.v0().expect("speed"));
    radial_state(x, 1.0, u0 * ramp(r / MOLLIFIER_RADIUS))
}

/// Self-similar reference for Examples 1, 2 and the entropy test.
pub fn selfsim_reference(example: Example, d: usize, h: f64) -> Result<SelfSimilarSolution<f64>> {
    let v0 = example
        .v0()
        .ok_or_else(|| BenchError::Invalid(format!("example {example} has no self-similar solution")))?;
    if v0 < 0.0 {
        Ok(solve_with_shock(d, 1.0, v0, h)?)
    } else {
        Ok(integrate_lai(d, 1.0, v0, &LaiOptions { h, ..LaiOptions::default() })?)
    }
}

/// Reference profile in the radial coordinate.
#[derive(Clone, Debug)]
pub enum Reference {
    SelfSimilar { solution: SelfSimilarSolution<f64>, t: f64 },
    Radial(RadialProfile<f64>),
}

impl Reference {
    /// `(p, v)` at radius `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            Reference::SelfSimilar { solution, t } => evaluate_reference(solution, *t, x),
            Reference::Radial(pr) => (interp(&pr.x, &pr.p, x), interp(&pr.x, &pr.v, x)),
        }
    }

    pub fn shock_position(&self, range: (f64, f64)) -> Option<f64> {
        match self {
            Reference::SelfSimilar { solution, t } => solution.shock.map(|s| s.s_tilde * t),
            Reference::Radial(pr) => {
                let (x, p): (Vec<f64>, Vec<f64>) = pr
                    .x
                    .iter()
                    .zip(&pr.p)
                    .filter(|(&x, _)| x >= range.0 && x <= range.1)
                    .map(|(&x, &p)| (x, p))
                    .unzip();
                steepest_gradient(&x, &p)
            }
        }
    }
}

/// Piecewise-linear interpolation, clamped at the ends.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&t| t <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

/// Midpoint of the interval with the largest pressure jump.
pub fn steepest_gradient(x: &[f64], p: &[f64]) -> Option<f64> {
    (0..p.len().saturating_sub(1))
        .max_by(|&i, &j| (p[i + 1] - p[i]).abs().total_cmp(&(p[j + 1] - p[j]).abs()))
        .map(|i| 0.5 * (x[i] + x[i + 1]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub range: (f64, f64),
    pub l1_p: f64,
    pub l1_v: f64,
    pub linf_p: f64,
    pub linf_v: f64,
    pub shock_computed: Option<f64>,
    pub shock_reference: Option<f64>,
    pub max_p_computed: f64,
    pub max_p_reference: f64,
}

impl ComparisonReport {
    pub fn shock_discrepancy(&self) -> Option<f64> {
        Some((self.shock_computed? - self.shock_reference?).abs())
    }

    pub fn to_lines(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("range_lo".to_string(), self.range.0),
            ("range_hi".into(), self.range.1),
            ("l1_p".into(), self.l1_p),
            ("l1_v".into(), self.l1_v),
            ("linf_p".into(), self.linf_p),
            ("linf_v".into(), self.linf_v),
            ("max_p_computed".into(), self.max_p_computed),
            ("max_p_reference".into(), self.max_p_reference),
        ];
        if let (Some(c), Some(r)) = (self.shock_computed, self.shock_reference) {
            out.push(("shock_computed".into(), c));
            out.push(("shock_reference".into(), r));
            out.push(("shock_discrepancy".into(), (c - r).abs()));
        }
        out
    }
}

/// Compares a radial profile against the reference on the points of `x`
/// inside `range`; L1 norms use the trapezoid rule on those points.
pub fn compare_profiles(x: &[f64], p: &[f64], v: &[f64], reference: &Reference, range: (f64, f64)) -> ComparisonReport {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= range.0 && x[i] <= range.1).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ps: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
    let refs: Vec<(f64, f64)> = xs.iter().map(|&x| reference.eval(x)).collect();
    let ep: Vec<f64> = idx.iter().zip(&refs).map(|(&i, r)| (p[i] - r.0).abs()).collect();
    let ev: Vec<f64> = idx.iter().zip(&refs).map(|(&i, r)| (v[i] - r.1).abs()).collect();
    let trapz = |e: &[f64]| -> f64 { (1..xs.len()).map(|k| 0.5 * (e[k] + e[k - 1]) * (xs[k] - xs[k - 1])).sum() };
    let max = |e: &[f64]| e.iter().copied().fold(0.0, f64::max);
    let shock_reference = reference.shock_position(range);
    ComparisonReport {
        range,
        l1_p: trapz(&ep),
        l1_v: trapz(&ev),
        linf_p: max(&ep),
        linf_v: max(&ev),
        shock_computed: shock_reference.and_then(|_| steepest_gradient(&xs, &ps)),
        shock_reference,
        max_p_computed: ps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_p_reference: refs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Unit ray directions: equispaced angles in 2D (the first is `(1, 0)`),
/// a Fibonacci lattice on the sphere in 3D.
pub fn ray_directions<const D: usize>(n: usize) -> Vec<[f64; D]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let mut dir = [0.0; D];
            match D {
                1 => dir[0] = 1.0,
                2 => {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    dir[0] = a.cos();
                    dir[1] = a.sin();
                }
                _ => {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    dir[0] = r * a.cos();
                    dir[1] = r * a.sin();
                    dir[2] = z;
                }
            }
            dir
        })
        .collect()
}

/// Pressure and physical velocity at `x`, by tensor-product Lagrange
/// interpolation of the nodal primitives of the containing element.
pub fn sample_point<const D: usize>(
    mesh: &CartesianMesh<f64, D>,
    op: &LglOperator<f64>,
    prims: &[PrimState<f64, D>],
    x: &[f64; D],
) -> Option<(f64, [f64; D])> {
    let (e, xi) = mesh.locate(x)?;
    let n1 = op.len();
    let w: Vec<Vec<f64>> = xi.iter().map(|&s| op.interpolation_weights(s)).collect();
    let npe = n1.pow(D as u32);
    let mut p = 0.0;
    let mut v = [0.0; D];
    for l in 0..npe {
        let idx = urel_core::dgsem::node_index::<D>(l, n1);
        let weight: f64 = (0..D).map(|k| w[k][idx[k]]).product();
        if weight == 0.0 {
            continue;
        }
        let s = &prims[e * npe + l];
        p += weight * s.pressure();
        for (vk, sk) in v.iter_mut().zip(lorentz_velocity(s)) {
            *vk += weight * sk;
        }
    }
    Some((p, v))
}

/// Radial profile of a DG solution averaged over ray directions. Radii
/// where no ray lands inside the mesh get NaN.
pub fn ray_profile<const D: usize>(
    mesh: &CartesianMesh<f64, D>,
    op: &LglOperator<f64>,
    prims: &[PrimState<f64, D>],
    radii: &[f64],
    rays: usize,
) -> (Vec<f64>, Vec<f64>) {
    let dirs = ray_directions::<D>(rays.max(1));
    radii
        .iter()
        .map(|&r| {
            let (mut p, mut v, mut n) = (0.0, 0.0, 0usize);
            for dir in &dirs {
                let x = dir.map(|c| r * c);
                if let Some((ps, vs)) = sample_point(mesh, op, prims, &x) {
                    p += ps;
                    v += vs.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>();
                    n += 1;
                }
            }
            if n == 0 {
                (f64::NAN, f64::NAN)
            } else {
                (p / n as f64, v / n as f64)
            }
        })
        .unzip()
}

/// Quadrature mean of the pressure over nodes with `|x| < radius`.
pub fn inner_mean_pressure<const D: usize>(
    mesh: &CartesianMesh<f64, D>,
    op: &LglOperator<f64>,
    prims: &[PrimState<f64, D>],
    radius_limit: f64,
) -> Option<f64> {
    let npe = op.len().pow(D as u32);
    let (mut sum, mut weight) = (0.0, 0.0);
    for (n, s) in prims.iter().enumerate() {
        let (e, l) = (n / npe, n % npe);
        if radius(&node_coordinates(mesh, op, e, l)) < radius_limit {
            let w = node_weight::<f64, D>(op, l);
            sum += w * s.pressure();
            weight += w;
        }
    }
    (weight > 0.0).then(|| sum / weight)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub example: Example,
    pub d: usize,
    pub solver: Solver,
    /// Domain `[-half_width, half_width]^d` of the DG solver.
    pub half_width: f64,
    pub elements: usize,
    pub order: usize,
    pub cfl: f64,
    pub interface_flux: NumericalFlux,
    pub blending: bool,
    pub positivity: bool,
    pub boundary: Boundary,
    /// Radial solver cells and right end.
    pub cells: usize,
    pub x_max: f64,
    pub t_end: f64,
    pub output_times: Vec<f64>,
    pub out_dir: Option<PathBuf>,
    pub rays: usize,
    /// Radial window of the comparison.
    pub compare_range: (f64, f64),
    /// Points of the comparison grid for DG runs.
    pub compare_points: usize,
    /// Radial cells of the reference for examples without a self-similar solution.
    pub reference_cells: usize,
    /// RK4 step of the self-similar reference.
    pub selfsim_h: f64,
}

impl BenchmarkSpec {
    pub fn new(example: Example, d: usize, solver: Solver) -> Self {
        let half_width = example.half_width();
        let compare_range = match example {
            Example::Ex2 => (0.1, 2.0),
            Example::Ex1 | Example::EntropyTest => (0.05, 2.0),
            _ => (0.05, half_width),
        };
        Self {
            example,
            d,
            solver,
            half_width,
            elements: if d == 3 { 16 } else { 64 },
            order: 3,
            cfl: 0.5,
            interface_flux: NumericalFlux::Rusanov,
            blending: true,
            positivity: true,
            boundary: Boundary::DirichletInitial,
            cells: 5000,
            x_max: half_width.max(3.0),
            t_end: example.default_t_end(),
            output_times: Vec::new(),
            out_dir: None,
            rays: 16,
            compare_range,
            compare_points: 2000,
            reference_cells: 5000,
            selfsim_h: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.d) {
            return Err(BenchError::Invalid(format!("dimension {} must be 2 or 3", self.d)));
        }
        if self.solver == Solver::Selfsim && !self.example.is_self_similar() {
            return Err(BenchError::Invalid(format!(
                "example {} has no self-similar solution",
                self.example
            )));
        }
        if !(self.compare_range.0 < self.compare_range.1) || self.compare_range.0 < 0.0 {
            return Err(BenchError::Invalid("comparison range must satisfy 0 <= lo < hi".into()));
        }
        Ok(())
    }

    pub fn radial_config(&self) -> RadialConfig<f64> {
        RadialConfig {
            d: self.d,
            t_end: self.t_end,
            output_times: self.output_times.clone(),
            ..RadialConfig::default()
        }
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        SolverConfig {
            order: self.order,
            cfl: self.cfl,
            t_end: self.t_end,
            interface_flux: self.interface_flux,
            blending: self.blending.then(BlendingParams::default),
            positivity_limit: self.positivity,
            boundary: self.boundary,
            output_times: self.output_times.clone(),
            ..SolverConfig::default()
        }
    }

    /// Uniform comparison grid over `compare_range`.
    pub fn compare_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.compare_range;
        let m = self.compare_points.max(2);
        (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
    }
}

/// Radial-solver run of an example.
pub fn run_radial_example(example: Example, d: usize, cells: usize, x_max: f64, config: &RadialConfig<f64>) -> Result<RadialRun<f64>> {
    let grid = RadialGrid::new(cells, x_max)?;
    let cfg = RadialConfig { d, ..config.clone() };
    let init = |r: f64| {
        let (p, u) = radial_initial(example, r).expect("cell centers are off the origin");
        (p, speed_from_four_velocity(u))
    };
    Ok(run_radial(grid, &cfg, init)?)
}

/// Reference profile at `t` for comparisons.
pub fn reference_for(spec: &BenchmarkSpec, t: f64) -> Result<Reference> {
    if spec.example.is_self_similar() {
        Ok(Reference::SelfSimilar {
            solution: selfsim_reference(spec.example, spec.d, spec.selfsim_h)?,
            t,
        })
    } else {
        let cfg = RadialConfig {
            d: spec.d,
            t_end: t,
            ..RadialConfig::default()
        };
        let run = run_radial_example(spec.example, spec.d, spec.reference_cells, spec.x_max, &cfg)?;
        Ok(Reference::Radial(run.profiles.into_iter().last().expect("final profile")))
    }
}

/// Finished DG run.
pub struct DgRun<const D: usize> {
    pub mesh: CartesianMesh<f64, D>,
    pub op: LglOperator<f64>,
    pub snapshots: Vec<(f64, DgField<f64, D>, Vec<f64>)>,
    pub entropy_log: Vec<EntropyRecord<f64>>,
    pub steps: usize,
    pub retries: usize,
}

impl<const D: usize> DgRun<D> {
    pub fn final_prims(&self) -> Result<Vec<PrimState<f64, D>>> {
        Ok(self.snapshots.last().expect("final snapshot").1.prims()?)
    }
}

pub fn run_dgsem<const D: usize>(spec: &BenchmarkSpec) -> Result<DgRun<D>> {
    let l = spec.half_width;
    let periodic = spec.boundary == Boundary::Periodic;
    let mesh = CartesianMesh::<f64, D>::cube(-l, l, spec.elements, periodic)?;
    let op = lgl_operator::<f64>(spec.order)?;
    let example = spec.example;
    let field = if example == Example::EntropyTest {
        DgField::from_prim_fn(&mesh, &op, mollified_entropy_test::<D>)?
    } else {
        DgField::from_prim_fn(&mesh, &op, |x: &[f64; D]| initial_condition_or_rest(example, x))?
    };
    let mut sim = Simulation::from_field(spec.solver_config(), mesh.clone(), op.clone(), field)?;
    let mut times: Vec<f64> = spec
        .output_times
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < spec.t_end)
        .collect();
    times.sort_by(f64::total_cmp);
    times.push(spec.t_end);
    let mut snapshots = Vec::with_capacity(times.len());
    for t in times {
        sim.advance_to(t)?;
        let snap = sim.snapshot()?;
        snapshots.push((snap.t, snap.field, snap.alpha));
    }
    let (s, rate) = sim.entropy_and_rate()?;
    sim.entropy_log.push(EntropyRecord {
        t: sim.time(),
        entropy: s,
        rate,
    });
    Ok(DgRun {
        mesh,
        op,
        snapshots,
        entropy_log: std::mem::take(&mut sim.entropy_log),
        steps: sim.steps(),
        retries: sim.retries(),
    })
}

/// Result of [`run_benchmark`].
#[derive(Clone, Debug, Default)]
pub struct BenchmarkOutcome {
    pub report: Option<ComparisonReport>,
    pub files: Vec<PathBuf>,
    /// Scalar diagnostics, e.g. step counts or the focusing time.
    pub summary: Vec<(String, f64)>,
}

fn out_path(dir: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    dir.as_ref().map(|d| d.join(name))
}

fn write_report(path: &Path, outcome: &BenchmarkOutcome) -> Result<()> {
    let mut text = String::new();
    for (k, v) in outcome
        .summary
        .iter()
        .chain(outcome.report.iter().flat_map(|r| r.to_lines()).collect::<Vec<_>>().iter())
    {
        text.push_str(&format!("{k} = {}\n", io::fmt(*v)));
    }
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

/// Runs the selected solver, writes its output and compares with the
/// reference when one exists.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutcome> {
    spec.validate()?;
    let mut outcome = match (spec.solver, spec.d) {
        (Solver::Dgsem, 2) => dgsem_benchmark::<2>(spec)?,
        (Solver::Dgsem, _) => dgsem_benchmark::<3>(spec)?,
        (Solver::Radial, _) => radial_benchmark(spec)?,
        (Solver::Selfsim, _) => selfsim_benchmark(spec)?,
    };
    if let Some(path) = out_path(&spec.out_dir, "report.txt") {
        write_report(&path, &outcome)?;
        outcome.files.push(path);
    }
    Ok(outcome)
}

fn dgsem_benchmark<const D: usize>(spec: &BenchmarkSpec) -> Result<BenchmarkOutcome> {
    let run = run_dgsem::<D>(spec)?;
    let mut outcome = BenchmarkOutcome::default();
    for (i, (t, field, alpha)) in run.snapshots.iter().enumerate() {
        if let Some(path) = out_path(&spec.out_dir, &format!("dgsem_{i:03}.csv")) {
            io::write_snapshot(&path, *t, &run.mesh, &run.op, field, alpha)?;
            outcome.files.push(path);
        }
    }
    if let Some(path) = out_path(&spec.out_dir, "entropy.csv") {
        io::write_entropy_log(&path, &run.entropy_log)?;
        outcome.files.push(path);
    }
    let prims = run.final_prims()?;
    let t = run.snapshots.last().expect("final snapshot").0;
    let grid = spec.compare_grid();
    let (p, v) = ray_profile(&run.mesh, &run.op, &prims, &grid, spec.rays);
    if let Some(path) = out_path(&spec.out_dir, "profile.csv") {
        let profile = RadialProfile {
            t,
            x: grid.clone(),
            p: p.clone(),
            v: v.clone(),
        };
        io::write_radial_profiles(&path, &[profile])?;
        outcome.files.push(path);
    }
    let max_p = prims.iter().map(|s| s.pressure()).fold(f64::NEG_INFINITY, f64::max);
    outcome.summary = vec![
        ("t".into(), t),
        ("steps".into(), run.steps as f64),
        ("retries".into(), run.retries as f64),
        ("max_pressure_nodes".into(), max_p),
    ];
    if let Some(first) = run.entropy_log.first() {
        let last = run.entropy_log.last().expect("non-empty");
        outcome.summary.push(("entropy_initial".into(), first.entropy));
        outcome.summary.push(("entropy_final".into(), last.entropy));
    }
    let reference = reference_for(spec, t)?;
    outcome.report = Some(compare_profiles(&grid, &p, &v, &reference, spec.compare_range));
    Ok(outcome)
}

fn radial_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutcome> {
    let run = run_radial_example(spec.example, spec.d, spec.cells, spec.x_max, &spec.radial_config())?;
    let mut outcome = BenchmarkOutcome::default();
    if let Some(path) = out_path(&spec.out_dir, "radial.csv") {
        io::write_radial_profiles(&path, &run.profiles)?;
        outcome.files.push(path);
    }
    if let Some(path) = out_path(&spec.out_dir, "center_pressure.csv") {
        io::write_history(&path, &run.center_history)?;
        outcome.files.push(path);
    }
    outcome.summary = vec![("steps".into(), run.steps as f64), ("retries".into(), run.retries as f64)];
    if !spec.example.is_self_similar() {
        if let Some(tf) = run.focusing_time() {
            outcome.summary.push(("focusing_time".into(), tf));
        }
    }
    let last = run.profiles.last().expect("final profile");
    if spec.example.is_self_similar() {
        let reference = reference_for(spec, last.t)?;
        outcome.report = Some(compare_profiles(&last.x, &last.p, &last.v, &reference, spec.compare_range));
    }
    Ok(outcome)
}

fn selfsim_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutcome> {
    let sol = selfsim_reference(spec.example, spec.d, spec.selfsim_h)?;
    let x = spec.compare_grid();
    let (p, v): (Vec<f64>, Vec<f64>) = x.iter().map(|&x| evaluate_reference(&sol, spec.t_end, x)).unzip();
    let mut outcome = BenchmarkOutcome::default();
    if let Some(path) = out_path(&spec.out_dir, "reference.csv") {
        io::write_reference(&path, &x, &p, &v)?;
        outcome.files.push(path);
    }
    if let Some(s) = sol.shock {
        outcome.summary = vec![
            ("s_tilde".into(), s.s_tilde),
            ("p_minus".into(), s.p_minus),
            ("p_plus".into(), s.p_plus),
            ("v_plus".into(), s.v_plus),
        ];
    }
    Ok(outcome)
}

/// Table 2 as printed in the literature: `(d, [s, p-, p+, v+])`.
pub const PAPER_TABLE2: [(usize, [f64; 4]); 2] = [
    (2, [0.45503, 15.75505, 5.71869, -0.41629]),
    (3, [0.52314, 25.56463, 17.16524, -0.17106]),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub d: usize,
    pub computed: [f64; 4],
    pub paper: [f64; 4],
}

impl Table2Row {
    pub fn max_abs_diff(&self) -> f64 {
        self.computed
            .iter()
            .zip(&self.paper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Shock data of Example 1 for `d = 2, 3`.
pub fn table2(h: f64) -> Result<Vec<Table2Row>> {
    PAPER_TABLE2
        .iter()
        .map(|&(d, paper)| {
            let s = selfsim_reference(Example::Ex1, d, h)?
                .shock
                .ok_or_else(|| BenchError::Invalid("no shock".into()))?;
            Ok(Table2Row {
                d,
                computed: [s.s_tilde, s.p_minus, s.p_plus, s.v_plus],
                paper,
            })
        })
        .collect()
}

/// Which data the entropy experiment starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyData {
    /// Entropy-test data with the velocity ramped near the origin.
    MollifiedEntropyTest,
    Example3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyExperiment {
    pub d: usize,
    pub elements: usize,
    pub order: usize,
    pub half_width: f64,
    pub cfl: f64,
    pub rhs_evaluations: usize,
    pub interface_flux: NumericalFlux,
    pub data: EntropyData,
    pub out: Option<PathBuf>,
}

impl EntropyExperiment {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            elements: if d == 3 { 6 } else { 16 },
            order: 3,
            half_width: 1.0,
            cfl: 0.5,
            rhs_evaluations: 200,
            interface_flux: NumericalFlux::EntropyConservative,
            data: EntropyData::MollifiedEntropyTest,
            out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyExperimentResult {
    pub log: Vec<EntropyRecord<f64>>,
    /// Extremes of `dS/dt / |S|` over the log.
    pub min_relative_rate: f64,
    pub max_relative_rate: f64,
}

impl EntropyExperimentResult {
    pub fn max_abs_relative_rate(&self) -> f64 {
        self.min_relative_rate.abs().max(self.max_relative_rate.abs())
    }
}

/// Periodic DG run without blending or limiting, logging `(S, dS/dt)` at
/// every right-hand-side evaluation.
pub fn entropy_experiment(exp: &EntropyExperiment) -> Result<EntropyExperimentResult> {
    match exp.d {
        2 => entropy_experiment_d::<2>(exp),
        3 => entropy_experiment_d::<3>(exp),
        d => Err(BenchError::Invalid(format!("dimension {d} must be 2 or 3"))),
    }
}

fn entropy_experiment_d<const D: usize>(exp: &EntropyExperiment) -> Result<EntropyExperimentResult> {
    let mesh = CartesianMesh::<f64, D>::cube(-exp.half_width, exp.half_width, exp.elements, true)?;
    let op = lgl_operator::<f64>(exp.order)?;
    let field = match exp.data {
        EntropyData::MollifiedEntropyTest => DgField::from_prim_fn(&mesh, &op, mollified_entropy_test::<D>)?,
        EntropyData::Example3 => {
            DgField::from_prim_fn(&mesh, &op, |x: &[f64; D]| initial_condition_or_rest(Example::Ex3, x))?
        }
    };
    let config = SolverConfig {
        order: exp.order,
        cfl: exp.cfl,
        t_end: f64::MAX,
        interface_flux: exp.interface_flux,
        blending: None,
        positivity_limit: false,
        boundary: Boundary::Periodic,
        log_every_rhs: true,
        ..SolverConfig::default()
    };
    let mut sim = Simulation::from_field(config, mesh, op, field)?;
    let dt = sim.cfl_dt();
    while sim.rhs_log.len() < exp.rhs_evaluations {
        sim.step(dt)?;
    }
    let log = std::mem::take(&mut sim.rhs_log);
    if let Some(path) = &exp.out {
        io::write_entropy_log(path, &log)?;
    }
    let rel: Vec<f64> = log.iter().map(|r| r.rate / r.entropy.abs()).collect();
    Ok(EntropyExperimentResult {
        min_relative_rate: rel.iter().copied().fold(f64::INFINITY, f64::min),
        max_relative_rate: rel.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        log,
    })
}
