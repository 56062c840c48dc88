//! Worst-case error sweeps shared by the unit suites and the acceptance run.

use nalgebra::SymmetricEigen;
use urel_core::fluxes::{ec_flux, flux_jacobian, physical_flux};
use urel_core::state::*;

use super::*;

/// `[[omega]] . F - [[psi_k]]` and the magnitude it is compared against.
pub fn tadmor_residual<const D: usize>(
    a: &PrimState<f64, D>,
    b: &PrimState<f64, D>,
    k: usize,
    flux: StateVector<f64, D>,
) -> (f64, f64) {
    let ea = entropy_state(a);
    let eb = entropy_state(b);
    let jump = eb.omega - ea.omega;
    let residual = jump.dot(&flux) - (eb.psi[k] - ea.psi[k]);
    let scale = (ea.omega.norm() + eb.omega.norm()) * flux.norm() + ea.psi[k].abs() + eb.psi[k].abs();
    (residual, scale)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EcWorst {
    /// max |residual| / scale
    pub tadmor: f64,
    /// max ||F~(s,s) - F(s)|| / ||F(s)||
    pub consistency: f64,
    pub symmetric: bool,
    pub evaluations: usize,
}

pub fn ec_sweep<const D: usize>(seed: u64, pairs: usize) -> EcWorst {
    let mut rng = rng(seed);
    let mut w = EcWorst {
        symmetric: true,
        ..EcWorst::default()
    };
    for _ in 0..pairs {
        let a = random_prim::<D>(&mut rng);
        let b = random_prim::<D>(&mut rng);
        for k in 0..D {
            let f = ec_flux(&a, &b, k);
            let (res, scale) = tadmor_residual(&a, &b, k, f.values);
            w.tadmor = w.tadmor.max(res.abs() / scale);
            w.symmetric &= f.values == ec_flux(&b, &a, k).values && f.direction == k;
            let phys = physical_flux(&a, k).values;
            let diag = ec_flux(&a, &a, k).values;
            w.consistency = w.consistency.max((phys - diag).norm() / phys.norm());
            w.evaluations += 1;
        }
    }
    w
}

/// Relative errors of the analytic derivatives against the oracles.
#[derive(Clone, Copy, Debug, Default)]
pub struct DerivativeWorst {
    pub entropy_variables: f64,
    pub prim_gradients: f64,
    pub flux_jacobian: f64,
    /// Against the difference Jacobian of the entropy variables.
    pub hessian: f64,
    /// Against second differences of the entropy on moderate states.
    pub hessian_direct: f64,
    pub negative_definite: bool,
    pub symmetric_hessian: bool,
    pub flux_relation: f64,
    pub states: usize,
}

fn rel_rows(an: &[Vec<f64>], fd: &[Vec<f64>]) -> f64 {
    max_abs_diff(an, fd) / max_abs(an)
}

pub fn derivative_sweep<const D: usize>(seed: u64, n: usize) -> DerivativeWorst {
    let mut rng = rng(seed);
    let mut w = DerivativeWorst {
        negative_definite: true,
        symmetric_hessian: true,
        states: n,
        ..DerivativeWorst::default()
    };
    for i in 0..n {
        let s = random_prim::<D>(&mut rng);
        let cons = *cons_from_prim(&s).vector();
        let h = step_size(&cons, 1e-6);

        let fd = fd_gradient(&cons, h, |x| entropy(&prim_from_cons(x).unwrap()));
        let an = entropy_variables(&s).to_vec();
        w.entropy_variables = w.entropy_variables.max(rel_rows(&[an], &[fd]));

        let fd = fd_jacobian(&cons, h, |x| {
            let q = prim_from_cons(x).unwrap();
            std::iter::once(q.pressure()).chain(q.velocity().iter().copied()).collect()
        });
        let (dp, du) = prim_gradients(&s);
        let mut an = vec![dp.to_vec()];
        an.extend(du.iter().map(|r| r.to_vec()));
        // Pressure and velocity rows have different units; compare row by row.
        for (a, f) in an.iter().zip(&fd) {
            w.prim_gradients = w.prim_gradients.max(rel_rows(std::slice::from_ref(a), std::slice::from_ref(f)));
        }

        for k in 0..D {
            let jac = flux_jacobian(&s, k);
            let an: Vec<Vec<f64>> = (0..=D).map(|i| (0..=D).map(|j| jac[(i, j)]).collect()).collect();
            let fd = fd_jacobian(&cons, h, |x| physical_flux(&prim_from_cons(x).unwrap(), k).values.to_vec());
            w.flux_jacobian = w.flux_jacobian.max(rel_rows(&an, &fd));
        }

        let hm = entropy_hessian(&s);
        w.symmetric_hessian &= hm == hm.transpose();
        let an: Vec<Vec<f64>> = (0..=D).map(|i| (0..=D).map(|j| hm[(i, j)]).collect()).collect();
        w.negative_definite &= SymmetricEigen::new(hm).eigenvalues.iter().all(|&l| l < 0.0);
        let fd = fd_jacobian(&cons, h, |x| entropy_variables(&prim_from_cons(x).unwrap()).to_vec());
        w.hessian = w.hessian.max(rel_rows(&an, &fd));

        // Second differences of the entropy lose about u^4 digits to
        // cancellation, so they run on moderate velocities.
        if i % 4 == 0 {
            let p = 10f64.powf(-1.0 + 2.0 * (i as f64 / n as f64));
            let m = PrimState::new(p, s.velocity().map(|x| x / 5.0)).unwrap();
            let wm = *cons_from_prim(&m).vector();
            let hm = entropy_hessian(&m);
            let an: Vec<Vec<f64>> = (0..=D).map(|i| (0..=D).map(|j| hm[(i, j)]).collect()).collect();
            let fd = fd_hessian(&wm, 3e-4 * wm.norm(), |x| entropy(&prim_from_cons(x).unwrap()));
            w.hessian_direct = w.hessian_direct.max(rel_rows(&an, &fd));
        }

        let omega = entropy_variables(&s);
        let dq = entropy_flux_gradients(&s);
        for k in 0..D {
            let jac = flux_jacobian(&s, k);
            let scale = dq[k].max_abs().max(omega.norm() * jac.abs().max());
            for j in 0..=D {
                let rhs: f64 = (0..=D).map(|i| omega[i] * jac[(i, j)]).sum();
                w.flux_relation = w.flux_relation.max((dq[k][j] - rhs).abs() / scale);
            }
        }
    }
    w
}
