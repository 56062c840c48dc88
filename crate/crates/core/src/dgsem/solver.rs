use super::field::DgField;
use super::indicator::BlendingParams;
use super::lgl::{lgl_operator, LglOperator};
use super::limiter::{positivity_limit, PRESSURE_FLOOR};
use super::mesh::CartesianMesh;
use super::rhs::{cfl_dt, total_entropy_and_rate, Boundary, EcVolumeFlux, Semidiscretization};
use super::time::{ssprk43_step, SSPRK43_STAGE_TIMES};
use crate::error::{Error, Result};
use crate::fluxes::NumericalFlux;
use crate::real::Real;
use crate::state::PrimState;

/// Run parameters of the DG solver. The volume flux is always the
/// entropy-conservative flux.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub order: usize,
    pub cfl: T,
    pub t_end: T,
    pub interface_flux: NumericalFlux,
    pub blending: Option<BlendingParams<T>>,
    pub positivity_limit: bool,
    pub boundary: Boundary,
    /// Snapshot times in `(0, t_end]`; `t_end` is always recorded.
    pub output_times: Vec<T>,
    /// Record `(t, S, dS/dt)` at every right-hand-side evaluation.
    pub log_every_rhs: bool,
    pub max_retries: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            order: 3,
            cfl: T::lit(0.5),
            t_end: T::one(),
            interface_flux: NumericalFlux::Rusanov,
            blending: Some(BlendingParams::default()),
            positivity_limit: true,
            boundary: Boundary::DirichletInitial,
            output_times: Vec::new(),
            log_every_rhs: false,
            max_retries: 10,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidArgument(format!("cfl {} outside (0, 1]", self.cfl)));
        }
        if !(self.t_end > T::zero()) {
            return Err(Error::InvalidArgument(format!("t_end {} must be positive", self.t_end)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyRecord<T> {
    pub t: T,
    pub entropy: T,
    pub rate: T,
}

#[derive(Clone, Debug)]
pub struct Snapshot<T, const D: usize> {
    pub t: T,
    pub field: DgField<T, D>,
    pub alpha: Vec<T>,
}

/// Time-dependent DG simulation on a fixed mesh.
pub struct Simulation<T, const D: usize> {
    pub config: SolverConfig<T>,
    pub semi: Semidiscretization<T, D, EcVolumeFlux>,
    field: DgField<T, D>,
    t: T,
    steps: usize,
    retries: usize,
    pub entropy_log: Vec<EntropyRecord<T>>,
    pub rhs_log: Vec<EntropyRecord<T>>,
}

impl<T: Real, const D: usize> Simulation<T, D> {
    pub fn new<F>(config: SolverConfig<T>, mesh: CartesianMesh<T, D>, initial: F) -> Result<Self>
    where
        F: Fn(&[T; D]) -> Result<PrimState<T, D>> + Sync,
    {
        config.validate()?;
        let op: LglOperator<T> = lgl_operator(config.order)?;
        let field = DgField::from_prim_fn(&mesh, &op, initial)?;
        Self::from_field(config, mesh, op, field)
    }

    pub fn from_field(
        config: SolverConfig<T>,
        mesh: CartesianMesh<T, D>,
        op: LglOperator<T>,
        field: DgField<T, D>,
    ) -> Result<Self> {
        config.validate()?;
        let semi = Semidiscretization::new(
            mesh,
            op,
            EcVolumeFlux,
            config.interface_flux,
            config.boundary,
            config.blending,
            Some(&field),
        )?;
        Ok(Self {
            config,
            semi,
            field,
            t: T::zero(),
            steps: 0,
            retries: 0,
            entropy_log: Vec::new(),
            rhs_log: Vec::new(),
        })
    }

    pub fn field(&self) -> &DgField<T, D> {
        &self.field
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of step attempts rejected with a degenerate state.
    pub fn retries(&self) -> usize {
        self.retries
    }

    pub fn cfl_dt(&self) -> T {
        cfl_dt(&self.semi.mesh, self.semi.op.order(), self.config.cfl)
    }

    /// Entropy and semidiscrete entropy rate of the current field.
    pub fn entropy_and_rate(&self) -> Result<(T, T)> {
        let out = self.semi.rhs(&self.field)?;
        Ok(total_entropy_and_rate(&self.semi.mesh, &self.semi.op, &out.prims, &out.tendency))
    }

    /// Blending coefficients of the current field.
    pub fn alpha(&self) -> Result<Vec<T>> {
        Ok(self.semi.blending_coefficients(&self.field.prims()?))
    }

    fn try_step(&mut self, dt: T) -> Result<DgField<T, D>> {
        let semi = &self.semi;
        let t0 = self.t;
        let log_all = self.config.log_every_rhs;
        let limit = self.config.positivity_limit;
        let mut records = Vec::new();
        let next = ssprk43_step(
            &self.field,
            dt,
            |u, stage| {
                let out = semi.rhs(u)?;
                if stage == 0 || log_all {
                    let (s, rate) = total_entropy_and_rate(&semi.mesh, &semi.op, &out.prims, &out.tendency);
                    let t = t0 + dt * T::lit(SSPRK43_STAGE_TIMES[stage]);
                    records.push(EntropyRecord { t, entropy: s, rate });
                }
                Ok(out.tendency)
            },
            |u| {
                if limit {
                    positivity_limit(u, &semi.op, T::lit(PRESSURE_FLOOR))?;
                }
                Ok(())
            },
        )?;
        if let Some(first) = records.first() {
            self.entropy_log.push(*first);
        }
        if log_all {
            self.rhs_log.extend(records);
        }
        Ok(next)
    }

    /// Advances by `dt`, halving on degenerate states up to `max_retries`
    /// times. Returns the step size actually taken.
    pub fn step(&mut self, dt: T) -> Result<T> {
        let mut dt = dt;
        for _ in 0..=self.config.max_retries {
            match self.try_step(dt) {
                Ok(next) => {
                    self.field = next;
                    self.t = self.t + dt;
                    self.steps += 1;
                    return Ok(dt);
                }
                Err(Error::DegenerateState { .. }) => {
                    self.retries += 1;
                    dt = dt * T::lit(0.5);
                }
                Err(other) => return Err(other),
            }
        }
        Err(Error::StepCollapse {
            t: self.t.to_f64_lossy(),
            dt: dt.to_f64_lossy(),
        })
    }

    /// Steps with the CFL time step until `t_target`, landing on it exactly.
    pub fn advance_to(&mut self, t_target: T) -> Result<()> {
        let tiny = t_target.abs().max(T::one()) * T::epsilon() * T::lit(16.0);
        while t_target - self.t > tiny {
            let dt = self.cfl_dt().min(t_target - self.t);
            self.step(dt)?;
        }
        self.t = t_target.max(self.t);
        Ok(())
    }

    pub fn snapshot(&self) -> Result<Snapshot<T, D>> {
        Ok(Snapshot {
            t: self.t,
            field: self.field.clone(),
            alpha: self.alpha()?,
        })
    }
}

/// Result of [`run_simulation`].
pub struct SimulationOutput<T, const D: usize> {
    pub snapshots: Vec<Snapshot<T, D>>,
    pub entropy_log: Vec<EntropyRecord<T>>,
    pub rhs_log: Vec<EntropyRecord<T>>,
    pub steps: usize,
    pub retries: usize,
    pub semi: Semidiscretization<T, D, EcVolumeFlux>,
}

/// Runs to `config.t_end`, recording snapshots at the output times and the
/// entropy history at every step.
pub fn run_simulation<T, const D: usize, F>(
    config: SolverConfig<T>,
    mesh: CartesianMesh<T, D>,
    initial: F,
) -> Result<SimulationOutput<T, D>>
where
    T: Real,
    F: Fn(&[T; D]) -> Result<PrimState<T, D>> + Sync,
{
    let mut sim = Simulation::new(config, mesh, initial)?;
    let t_end = sim.config.t_end;
    let mut times: Vec<T> = sim
        .config
        .output_times
        .iter()
        .copied()
        .filter(|&t| t > T::zero() && t < t_end)
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite output times"));
    times.push(t_end);

    let mut snapshots = Vec::with_capacity(times.len());
    for t in times {
        sim.advance_to(t)?;
        snapshots.push(sim.snapshot()?);
    }
    let (s, rate) = sim.entropy_and_rate()?;
    sim.entropy_log.push(EntropyRecord {
        t: sim.t,
        entropy: s,
        rate,
    });
    Ok(SimulationOutput {
        snapshots,
        entropy_log: sim.entropy_log,
        rhs_log: sim.rhs_log,
        steps: sim.steps,
        retries: sim.retries,
        semi: sim.semi,
    })
}
