//! The constant node-update matrix `T ⊗ I₃` and its LDLᵀ factorization.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::model::{Discretization, PhysicalParams};

/// Symmetric tridiagonal `T` acting on the unknowns `Δr_1, …, Δr_N`, stored
/// with its LDLᵀ factors. Interior rows are `(m, 4m, m)/6h`; the body row
/// has diagonal `(M + m/3)/h`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMassMatrix {
    diag: Vec<f64>,
    off: Vec<f64>,
    pivots: Vec<f64>,
    multipliers: Vec<f64>,
}

impl NodeMassMatrix {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    /// Dimension of `T` (the number of free nodes, `N`).
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Builds a factored symmetric tridiagonal matrix from its diagonal and
    /// off-diagonal.
    pub fn from_bands(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        assert_eq!(off.len() + 1, diag.len(), "band lengths disagree");
        let mut pivots = Vec::with_capacity(diag.len());
        let mut multipliers = Vec::with_capacity(off.len());
        pivots.push(diag[0]);
        for i in 1..diag.len() {
            let l = off[i - 1] / pivots[i - 1];
            multipliers.push(l);
            pivots.push(diag[i] - l * off[i - 1]);
        }
        if !pivots.iter().all(|&d| d > 0.0 && d.is_finite()) {
            return Err(Error::MassMatrixNotPositiveDefinite);
        }
        Ok(NodeMassMatrix {
            diag,
            off,
            pivots,
            multipliers,
        })
    }

    /// `T · x`, applied to each Cartesian component.
    pub fn apply(&self, x: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = x[i] * self.diag[i];
                if i > 0 {
                    y += x[i - 1] * self.off[i - 1];
                }
                if i + 1 < n {
                    y += x[i + 1] * self.off[i];
                }
                y
            })
            .collect()
    }

    /// Solves `T · x = b` for three right-hand sides at once.
    pub fn solve(&self, b: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        let n = self.len();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= prev * self.multipliers[i - 1];
        }
        for (xi, d) in x.iter_mut().zip(&self.pivots) {
            *xi /= *d;
        }
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= next * self.multipliers[i];
        }
        x
    }
}

/// Assembles and factors the node-update matrix for `disc`.
pub fn assemble_and_factor_mass(params: &PhysicalParams, disc: &Discretization) -> Result<NodeMassMatrix> {
    let n = disc.n_elements();
    let h = disc.h();
    let m = disc.element_mass();
    let mut diag = vec![4.0 * m / (6.0 * h); n];
    diag[n - 1] = (params.body_mass + m / 3.0) / h;
    let off = vec![m / (6.0 * h); n - 1];
    NodeMassMatrix::from_bands(diag, off)
}
