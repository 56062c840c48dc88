//! Semidiscrete right-hand side: flux-differencing volume term, interface
//! terms, finite-volume subcells and their convex blend.

use rayon::prelude::*;

use super::field::{node_index, node_weight, DgField};
use super::indicator::{blending_coefficient, smooth_blending, BlendingParams};
use super::lgl::LglOperator;
use super::mesh::CartesianMesh;
use crate::error::{Error, Result};
use crate::fluxes::{ec_flux_points, rusanov_flux_values, EcPoint, NumericalFlux};
use crate::real::Real;
use crate::state::{entropy, entropy_variables, PrimState, StateVector};

/// Symmetric two-point flux used inside elements. `Point` caches whatever
/// per-node data the flux needs so it is computed once per node.
pub trait TwoPointFlux<T: Real, const D: usize>: Sync {
    type Point: Copy + Send + Sync;

    fn point(&self, s: &PrimState<T, D>) -> Self::Point;

    fn flux(&self, a: &Self::Point, b: &Self::Point, k: usize) -> StateVector<T, D>;
}

/// The entropy-conservative flux as a volume flux.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EcVolumeFlux;

impl<T: Real, const D: usize> TwoPointFlux<T, D> for EcVolumeFlux {
    type Point = EcPoint<T, D>;

    #[inline]
    fn point(&self, s: &PrimState<T, D>) -> Self::Point {
        EcPoint::new(s)
    }

    #[inline]
    fn flux(&self, a: &Self::Point, b: &Self::Point, k: usize) -> StateVector<T, D> {
        ec_flux_points(a, b, k)
    }
}

/// Treatment of non-periodic mesh boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Ghost state equals the initial condition at the boundary node.
    DirichletInitial,
    /// Ghost state equals the interior trace.
    Outflow,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "dirichlet_initial" | "dirichlet" => Ok(Boundary::DirichletInitial),
            "outflow" => Ok(Boundary::Outflow),
            other => Err(Error::InvalidArgument(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Per-node primitive states and volume-flux points of one field.
#[derive(Clone, Debug)]
pub struct NodeData<T, const D: usize, P> {
    pub prims: Vec<PrimState<T, D>>,
    pub points: Vec<P>,
}

/// Interface fluxes, one block of face nodes per face, per direction.
#[derive(Clone, Debug)]
pub struct FaceFluxes<T, const D: usize> {
    per_direction: [Vec<StateVector<T, D>>; D],
}

/// Tendency together with the blending coefficients and node states it was
/// computed from.
#[derive(Clone, Debug)]
pub struct RhsOutput<T, const D: usize> {
    pub tendency: DgField<T, D>,
    pub alpha: Vec<T>,
    pub prims: Vec<PrimState<T, D>>,
}

/// Everything needed to evaluate `dw/dt` for a field on a fixed mesh.
#[derive(Clone, Debug)]
pub struct Semidiscretization<T, const D: usize, V = EcVolumeFlux> {
    pub mesh: CartesianMesh<T, D>,
    pub op: LglOperator<T>,
    pub volume_flux: V,
    pub interface_flux: NumericalFlux,
    pub boundary: Boundary,
    pub blending: Option<BlendingParams<T>>,
    boundary_prims: Option<Vec<PrimState<T, D>>>,
    /// Node offsets with `i_k = 0` for every transverse index, per direction.
    line_bases: [Vec<usize>; D],
}

impl<T: Real, const D: usize, V: TwoPointFlux<T, D>> Semidiscretization<T, D, V> {
    /// `initial` supplies the ghost data for [`Boundary::DirichletInitial`].
    pub fn new(
        mesh: CartesianMesh<T, D>,
        op: LglOperator<T>,
        volume_flux: V,
        interface_flux: NumericalFlux,
        boundary: Boundary,
        blending: Option<BlendingParams<T>>,
        initial: Option<&DgField<T, D>>,
    ) -> Result<Self> {
        let all_periodic = mesh.periodic().iter().all(|&p| p);
        if boundary == Boundary::Periodic && !all_periodic {
            return Err(Error::InvalidArgument("periodic boundary needs a periodic mesh".into()));
        }
        let boundary_prims = match (boundary, all_periodic) {
            (Boundary::DirichletInitial, false) => {
                let init = initial.ok_or_else(|| {
                    Error::InvalidArgument("dirichlet_initial boundary needs the initial field".into())
                })?;
                Some(init.prims()?)
            }
            _ => None,
        };
        let n1 = op.len();
        let line_bases = std::array::from_fn(|k| {
            (0..n1.pow(D as u32))
                .filter(|&l| node_index::<D>(l, n1)[k] == 0)
                .collect()
        });
        Ok(Self {
            mesh,
            op,
            volume_flux,
            interface_flux,
            boundary,
            blending,
            boundary_prims,
            line_bases,
        })
    }

    pub fn nodes_per_element(&self) -> usize {
        self.op.len().pow(D as u32)
    }

    pub fn node_data(&self, field: &DgField<T, D>) -> Result<NodeData<T, D, V::Point>> {
        let prims = field.prims()?;
        let points = prims.par_iter().map(|s| self.volume_flux.point(s)).collect();
        Ok(NodeData { prims, points })
    }

    fn faces_per_axis(&self, k: usize) -> usize {
        let n = self.mesh.elements_per_axis();
        if self.mesh.periodic()[k] {
            n
        } else {
            n + 1
        }
    }

    /// Linear face index in direction `k` for a multi-index whose `k`-th
    /// entry is the face position along `k`.
    fn face_linear(&self, k: usize, idx: &[usize; D]) -> usize {
        let n = self.mesh.elements_per_axis();
        let mut lin = 0;
        for m in (0..D).rev() {
            let extent = if m == k { self.faces_per_axis(k) } else { n };
            lin = lin * extent + idx[m];
        }
        lin
    }

    fn face_index(&self, k: usize, f: usize) -> [usize; D] {
        let n = self.mesh.elements_per_axis();
        let mut rest = f;
        std::array::from_fn(|m| {
            let extent = if m == k { self.faces_per_axis(k) } else { n };
            let digit = rest % extent;
            rest /= extent;
            digit
        })
    }

    /// Interface flux at every face node, computed once per face.
    pub fn face_fluxes(&self, prims: &[PrimState<T, D>]) -> FaceFluxes<T, D> {
        let n = self.mesh.elements_per_axis();
        let n1 = self.op.len();
        let order = self.op.order();
        let npe = self.nodes_per_element();
        let nfn = n1.pow(D as u32 - 1);
        let per_direction = std::array::from_fn(|k| {
            let faces = self.faces_per_axis(k) * n.pow(D as u32 - 1);
            let stride = n1.pow(k as u32);
            let bases = &self.line_bases[k];
            let mut out = vec![StateVector::zero(); faces * nfn];
            out.par_chunks_mut(nfn).enumerate().for_each(|(f, chunk)| {
                let idx = self.face_index(k, f);
                let q = idx[k];
                let elem = |pos: usize| {
                    let mut e = idx;
                    e[k] = pos;
                    self.mesh.element_linear(&e)
                };
                let left = if q > 0 {
                    Some(elem(q - 1))
                } else if self.mesh.periodic()[k] {
                    Some(elem(n - 1))
                } else {
                    None
                };
                let right = (q < n).then(|| elem(q));
                for (t, slot) in chunk.iter_mut().enumerate() {
                    let base = bases[t];
                    let l_node = left.map(|e| e * npe + base + order * stride);
                    let r_node = right.map(|e| e * npe + base);
                    let (a, b) = match (l_node, r_node) {
                        (Some(a), Some(b)) => (prims[a], prims[b]),
                        (None, Some(b)) => (self.ghost(prims, b), prims[b]),
                        (Some(a), None) => (prims[a], self.ghost(prims, a)),
                        (None, None) => unreachable!("face without elements"),
                    };
                    *slot = self.interface_flux.evaluate(&a, &b, k);
                }
            });
            out
        });
        FaceFluxes { per_direction }
    }

    fn ghost(&self, prims: &[PrimState<T, D>], node: usize) -> PrimState<T, D> {
        match &self.boundary_prims {
            Some(init) => init[node],
            None => prims[node],
        }
    }

    /// Interface flux at face node `t` on side `side` (0 left, 1 right) of
    /// element `e` in direction `k`.
    #[inline]
    fn element_face_flux<'a>(&self, faces: &'a FaceFluxes<T, D>, e: usize, k: usize, side: usize) -> &'a [StateVector<T, D>] {
        let n = self.mesh.elements_per_axis();
        let nfn = self.op.len().pow(D as u32 - 1);
        let mut idx = self.mesh.element_index(e);
        idx[k] += side;
        if idx[k] == n && self.mesh.periodic()[k] {
            idx[k] = 0;
        }
        let f = self.face_linear(k, &idx);
        &faces.per_direction[k][f * nfn..(f + 1) * nfn]
    }

    /// Flux-differencing volume term of element `e`, added into `out`.
    fn volume_element(&self, points: &[V::Point], e: usize, out: &mut [StateVector<T, D>]) {
        let n1 = self.op.len();
        let npe = self.nodes_per_element();
        let pts = &points[e * npe..(e + 1) * npe];
        for k in 0..D {
            let scale = T::lit(4.0) / self.mesh.dx(k);
            let stride = n1.pow(k as u32);
            for &base in &self.line_bases[k] {
                for i in 0..n1 {
                    let a = base + i * stride;
                    let fii = self.volume_flux.flux(&pts[a], &pts[a], k);
                    out[a] -= fii * (scale * self.op.d(i, i));
                    for j in i + 1..n1 {
                        let b = base + j * stride;
                        let f = self.volume_flux.flux(&pts[a], &pts[b], k);
                        out[a] -= f * (scale * self.op.d(i, j));
                        out[b] -= f * (scale * self.op.d(j, i));
                    }
                }
            }
        }
    }

    fn surface_element(&self, points: &[V::Point], faces: &FaceFluxes<T, D>, e: usize, out: &mut [StateVector<T, D>]) {
        let n1 = self.op.len();
        let order = self.op.order();
        let npe = self.nodes_per_element();
        let pts = &points[e * npe..(e + 1) * npe];
        let w = self.op.weights();
        for k in 0..D {
            let two_dx = T::lit(2.0) / self.mesh.dx(k);
            let stride = n1.pow(k as u32);
            let left = self.element_face_flux(faces, e, k, 0);
            let right = self.element_face_flux(faces, e, k, 1);
            for (t, &base) in self.line_bases[k].iter().enumerate() {
                let a = base;
                let b = base + order * stride;
                let fa = self.volume_flux.flux(&pts[a], &pts[a], k);
                let fb = self.volume_flux.flux(&pts[b], &pts[b], k);
                out[b] -= (right[t] - fb) * (two_dx / w[order]);
                out[a] += (left[t] - fa) * (two_dx / w[0]);
            }
        }
    }

    fn dg_element(&self, nd: &NodeData<T, D, V::Point>, faces: &FaceFluxes<T, D>, e: usize, out: &mut [StateVector<T, D>]) {
        self.volume_element(&nd.points, e, out);
        self.surface_element(&nd.points, faces, e, out);
    }

    /// First-order finite volumes on the LGL subcells of element `e`.
    fn fv_element(&self, prims: &[PrimState<T, D>], faces: &FaceFluxes<T, D>, e: usize, out: &mut [StateVector<T, D>]) {
        let n1 = self.op.len();
        let order = self.op.order();
        let npe = self.nodes_per_element();
        let s = &prims[e * npe..(e + 1) * npe];
        let w = self.op.weights();
        for k in 0..D {
            let two_dx = T::lit(2.0) / self.mesh.dx(k);
            let stride = n1.pow(k as u32);
            let left = self.element_face_flux(faces, e, k, 0);
            let right = self.element_face_flux(faces, e, k, 1);
            for (t, &base) in self.line_bases[k].iter().enumerate() {
                let mut f_prev = left[t];
                for i in 0..n1 {
                    let a = base + i * stride;
                    let f_next = if i < order {
                        rusanov_flux_values(&s[a], &s[a + stride], k)
                    } else {
                        right[t]
                    };
                    out[a] -= (f_next - f_prev) * (two_dx / w[i]);
                    f_prev = f_next;
                }
            }
        }
    }

    /// Flux-differencing volume term alone.
    pub fn volume_rhs_fluxdiff(&self, nd: &NodeData<T, D, V::Point>) -> DgField<T, D> {
        let npe = self.nodes_per_element();
        let mut out = DgField::zeros(self.mesh.num_elements(), self.op.order());
        out.data_mut()
            .par_chunks_mut(npe)
            .enumerate()
            .for_each(|(e, chunk)| self.volume_element(&nd.points, e, chunk));
        out
    }

    /// Interface term alone.
    pub fn surface_rhs(&self, nd: &NodeData<T, D, V::Point>) -> DgField<T, D> {
        let faces = self.face_fluxes(&nd.prims);
        let npe = self.nodes_per_element();
        let mut out = DgField::zeros(self.mesh.num_elements(), self.op.order());
        out.data_mut()
            .par_chunks_mut(npe)
            .enumerate()
            .for_each(|(e, chunk)| self.surface_element(&nd.points, &faces, e, chunk));
        out
    }

    /// Finite-volume subcell tendency of every element.
    pub fn fv_subcell_rhs(&self, nd: &NodeData<T, D, V::Point>) -> DgField<T, D> {
        let alpha = vec![T::one(); self.mesh.num_elements()];
        self.blended_rhs(nd, &alpha)
    }

    /// Raw blending coefficients, smoothed across neighbors when configured.
    pub fn blending_coefficients(&self, prims: &[PrimState<T, D>]) -> Vec<T> {
        let Some(params) = &self.blending else {
            return vec![T::zero(); self.mesh.num_elements()];
        };
        let npe = self.nodes_per_element();
        let raw: Vec<T> = prims
            .par_chunks(npe)
            .map(|el| blending_coefficient::<T, D>(&self.op, el, params))
            .collect();
        if params.smoothing {
            smooth_blending(&self.mesh, &raw)
        } else {
            raw
        }
    }

    /// `(1 - alpha) DG + alpha FV` per element; `alpha = 0` and `alpha = 1`
    /// evaluate only the respective scheme.
    pub fn blended_rhs(&self, nd: &NodeData<T, D, V::Point>, alpha: &[T]) -> DgField<T, D> {
        let faces = self.face_fluxes(&nd.prims);
        let npe = self.nodes_per_element();
        let mut out = DgField::zeros(self.mesh.num_elements(), self.op.order());
        out.data_mut()
            .par_chunks_mut(npe)
            .enumerate()
            .for_each(|(e, chunk)| {
                let a = alpha[e];
                if a == T::zero() {
                    self.dg_element(nd, &faces, e, chunk);
                } else if a == T::one() {
                    self.fv_element(&nd.prims, &faces, e, chunk);
                } else {
                    let mut fv = vec![StateVector::zero(); npe];
                    self.dg_element(nd, &faces, e, chunk);
                    self.fv_element(&nd.prims, &faces, e, &mut fv);
                    for (c, f) in chunk.iter_mut().zip(&fv) {
                        *c = *c * (T::one() - a) + *f * a;
                    }
                }
            });
        out
    }

    /// Pure DG tendency (volume plus interface terms).
    pub fn dg_rhs(&self, nd: &NodeData<T, D, V::Point>) -> DgField<T, D> {
        let alpha = vec![T::zero(); self.mesh.num_elements()];
        self.blended_rhs(nd, &alpha)
    }

    /// Full tendency with the configured blending.
    pub fn rhs(&self, field: &DgField<T, D>) -> Result<RhsOutput<T, D>> {
        let nd = self.node_data(field)?;
        let alpha = self.blending_coefficients(&nd.prims);
        let tendency = self.blended_rhs(&nd, &alpha);
        Ok(RhsOutput {
            tendency,
            alpha,
            prims: nd.prims,
        })
    }
}

/// Total entropy `S = sum weight * eta * J` and its semidiscrete rate
/// `dS/dt = sum weight * omega . tendency * J`, with `J = prod dx_k / 2`.
pub fn total_entropy_and_rate<T: Real, const D: usize>(
    mesh: &CartesianMesh<T, D>,
    op: &LglOperator<T>,
    prims: &[PrimState<T, D>],
    tendency: &DgField<T, D>,
) -> (T, T) {
    let npe = tendency.nodes_per_element();
    let per_element: Vec<(T, T)> = prims
        .par_chunks(npe)
        .zip(tendency.data().par_chunks(npe))
        .map(|(s, dw)| {
            s.iter().zip(dw).enumerate().fold((T::zero(), T::zero()), |(a, b), (l, (s, dw))| {
                let wt = node_weight::<T, D>(op, l);
                (a + wt * entropy(s), b + wt * entropy_variables(s).dot(dw))
            })
        })
        .collect();
    let jac = mesh.jacobian();
    let (s, r) = per_element
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + *x, b + *y));
    (s * jac, r * jac)
}

/// Time step `cfl * dx_min / (2N + 1)` for the unit wave-speed bound.
pub fn cfl_dt<T: Real, const D: usize>(mesh: &CartesianMesh<T, D>, order: usize, cfl: T) -> T {
    cfl * mesh.dx_min() / T::from_count(2 * order + 1)
}
