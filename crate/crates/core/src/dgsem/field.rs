use rayon::prelude::*;

use super::lgl::LglOperator;
use super::mesh::CartesianMesh;
use crate::error::Result;
use crate::real::Real;
use crate::state::{cons_from_prim, prim_from_cons, PrimState, StateVector};

/// Multi-index of node `l` within an element with `n1` nodes per axis.
#[inline]
pub fn node_index<const D: usize>(l: usize, n1: usize) -> [usize; D] {
    let mut rest = l;
    std::array::from_fn(|_| {
        let digit = rest % n1;
        rest /= n1;
        digit
    })
}

#[inline]
pub fn node_linear<const D: usize>(idx: &[usize; D], n1: usize) -> usize {
    idx.iter().rev().fold(0, |acc, &i| acc * n1 + i)
}

/// Tensor-product quadrature weight of node `l`.
#[inline]
pub fn node_weight<T: Real, const D: usize>(op: &LglOperator<T>, l: usize) -> T {
    node_index::<D>(l, op.len())
        .iter()
        .fold(T::one(), |acc, &i| acc * op.weights()[i])
}

/// Nodal conserved values, element-major with `(N+1)^D` nodes per element.
#[derive(Clone, Debug, PartialEq)]
pub struct DgField<T, const D: usize> {
    nodes_per_element: usize,
    data: Vec<StateVector<T, D>>,
}

impl<T: Real, const D: usize> DgField<T, D> {
    pub fn zeros(num_elements: usize, order: usize) -> Self {
        let nodes_per_element = (order + 1).pow(D as u32);
        Self {
            nodes_per_element,
            data: vec![StateVector::zero(); num_elements * nodes_per_element],
        }
    }

    pub fn from_vec(nodes_per_element: usize, data: Vec<StateVector<T, D>>) -> Self {
        assert_eq!(data.len() % nodes_per_element, 0);
        Self { nodes_per_element, data }
    }

    /// Interpolates a primitive initial condition at the LGL nodes.
    pub fn from_prim_fn<F>(mesh: &CartesianMesh<T, D>, op: &LglOperator<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T; D]) -> Result<PrimState<T, D>> + Sync,
    {
        let mut field = Self::zeros(mesh.num_elements(), op.order());
        let npe = field.nodes_per_element;
        field
            .data
            .par_chunks_mut(npe)
            .enumerate()
            .try_for_each(|(e, chunk)| -> Result<()> {
                for (l, w) in chunk.iter_mut().enumerate() {
                    let x = node_coordinates(mesh, op, e, l);
                    *w = *cons_from_prim(&f(&x)?).vector();
                }
                Ok(())
            })?;
        Ok(field)
    }

    pub fn nodes_per_element(&self) -> usize {
        self.nodes_per_element
    }

    pub fn num_elements(&self) -> usize {
        self.data.len() / self.nodes_per_element
    }

    pub fn data(&self) -> &[StateVector<T, D>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [StateVector<T, D>] {
        &mut self.data
    }

    pub fn element(&self, e: usize) -> &[StateVector<T, D>] {
        &self.data[e * self.nodes_per_element..(e + 1) * self.nodes_per_element]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [StateVector<T, D>] {
        let npe = self.nodes_per_element;
        &mut self.data[e * npe..(e + 1) * npe]
    }

    /// Primitive state at every node.
    pub fn prims(&self) -> Result<Vec<PrimState<T, D>>> {
        self.data.par_iter().map(prim_from_cons).collect()
    }

    /// Quadrature mean of element `e` on the reference element.
    pub fn element_mean(&self, op: &LglOperator<T>, e: usize) -> StateVector<T, D> {
        let scale = T::lit(0.5).powi(D as i32);
        self.element(e)
            .iter()
            .enumerate()
            .fold(StateVector::zero(), |acc, (l, w)| acc + *w * node_weight::<T, D>(op, l))
            * scale
    }

    /// Integral of `w` over the mesh.
    pub fn total(&self, mesh: &CartesianMesh<T, D>, op: &LglOperator<T>) -> StateVector<T, D> {
        let jac = mesh.jacobian();
        let npe = self.nodes_per_element;
        self.data
            .iter()
            .enumerate()
            .fold(StateVector::zero(), |acc, (n, w)| acc + *w * node_weight::<T, D>(op, n % npe))
            * jac
    }

    /// `self + b * other`, nodewise.
    pub fn axpy(&self, b: T, other: &Self) -> Self {
        self.lincomb(T::one(), other, b)
    }

    /// `a * self + b * other`, nodewise.
    pub fn lincomb(&self, a: T, other: &Self, b: T) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(x, y)| *x * a + *y * b)
            .collect();
        Self {
            nodes_per_element: self.nodes_per_element,
            data,
        }
    }
}

/// Physical coordinates of node `l` of element `e`.
pub fn node_coordinates<T: Real, const D: usize>(
    mesh: &CartesianMesh<T, D>,
    op: &LglOperator<T>,
    e: usize,
    l: usize,
) -> [T; D] {
    let idx = node_index::<D>(l, op.len());
    let xi = idx.map(|i| op.nodes()[i]);
    mesh.map_point(e, &xi)
}
