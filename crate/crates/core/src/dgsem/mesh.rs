use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform Cartesian mesh of `elements_per_axis^D` square elements.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianMesh<T, const D: usize> {
    lower: [T; D],
    upper: [T; D],
    elements_per_axis: usize,
    periodic: [bool; D],
}

impl<T: Real, const D: usize> CartesianMesh<T, D> {
    pub fn new(lower: [T; D], upper: [T; D], elements_per_axis: usize, periodic: [bool; D]) -> Result<Self> {
        if elements_per_axis == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one element per axis".into()));
        }
        if (0..D).any(|k| !(upper[k] > lower[k])) {
            return Err(Error::InvalidArgument("mesh bounds must satisfy lower < upper".into()));
        }
        Ok(Self {
            lower,
            upper,
            elements_per_axis,
            periodic,
        })
    }

    /// The cube `[lo, hi]^D`.
    pub fn cube(lo: T, hi: T, elements_per_axis: usize, periodic: bool) -> Result<Self> {
        Self::new([lo; D], [hi; D], elements_per_axis, [periodic; D])
    }

    pub fn lower(&self) -> &[T; D] {
        &self.lower
    }

    pub fn upper(&self) -> &[T; D] {
        &self.upper
    }

    pub fn elements_per_axis(&self) -> usize {
        self.elements_per_axis
    }

    pub fn periodic(&self) -> &[bool; D] {
        &self.periodic
    }

    pub fn num_elements(&self) -> usize {
        self.elements_per_axis.pow(D as u32)
    }

    /// Element width along axis `k`.
    pub fn dx(&self, k: usize) -> T {
        (self.upper[k] - self.lower[k]) / T::from_count(self.elements_per_axis)
    }

    pub fn dx_min(&self) -> T {
        (0..D).map(|k| self.dx(k)).fold(T::infinity(), T::min)
    }

    /// Jacobian of the reference-to-physical map, `prod_k dx_k / 2`.
    pub fn jacobian(&self) -> T {
        (0..D).fold(T::one(), |acc, k| acc * self.dx(k) * T::lit(0.5))
    }

    /// Multi-index of element `e` (axis 0 fastest).
    pub fn element_index(&self, e: usize) -> [usize; D] {
        let n = self.elements_per_axis;
        let mut rest = e;
        std::array::from_fn(|_| {
            let digit = rest % n;
            rest /= n;
            digit
        })
    }

    pub fn element_linear(&self, idx: &[usize; D]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.elements_per_axis + i)
    }

    /// Neighbor of element `e` along axis `k` on side `side` (-1 or +1),
    /// wrapping on periodic axes.
    pub fn neighbor(&self, e: usize, k: usize, side: isize) -> Option<usize> {
        let n = self.elements_per_axis;
        let mut idx = self.element_index(e);
        let ik = idx[k] as isize + side;
        if ik < 0 || ik >= n as isize {
            if !self.periodic[k] {
                return None;
            }
            idx[k] = ik.rem_euclid(n as isize) as usize;
        } else {
            idx[k] = ik as usize;
        }
        Some(self.element_linear(&idx))
    }

    /// Physical coordinate of the reference point `xi` in element `e`.
    pub fn map_point(&self, e: usize, xi: &[T; D]) -> [T; D] {
        let idx = self.element_index(e);
        std::array::from_fn(|k| {
            let dx = self.dx(k);
            self.lower[k] + dx * T::from_count(idx[k]) + (xi[k] + T::one()) * T::lit(0.5) * dx
        })
    }

    /// Element containing `x` and the reference coordinates of `x` in it;
    /// `None` outside the mesh.
    pub fn locate(&self, x: &[T; D]) -> Option<(usize, [T; D])> {
        let n = self.elements_per_axis;
        let mut idx = [0usize; D];
        let mut xi = [T::zero(); D];
        for k in 0..D {
            if x[k] < self.lower[k] || x[k] > self.upper[k] {
                return None;
            }
            let s = (x[k] - self.lower[k]) / self.dx(k);
            let i = s.floor().to_usize().unwrap_or(0).min(n - 1);
            idx[k] = i;
            xi[k] = (s - T::from_count(i)) * T::lit(2.0) - T::one();
        }
        Some((self.element_linear(&idx), xi))
    }
}
