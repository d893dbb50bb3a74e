//! The Hamiltonian restricted to `−L..=L` and its eigendecomposition.

use super::TransportError;
use crate::trace::SturmianPotential;
use serde::{Deserialize, Serialize};

/// `Hψ(n) = ψ(n+1) + ψ(n−1) + V(n)ψ(n)` on sites `−L..=L` with Dirichlet ends.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeHamiltonian {
    pub l: usize,
    /// `diag[n + L] = V(n)`.
    pub diag: Vec<f64>,
}

impl LatticeHamiltonian {
    pub fn new(l: usize, diag: Vec<f64>) -> Self {
        assert_eq!(diag.len(), 2 * l + 1, "diagonal must cover −L..=L");
        Self { l, diag }
    }

    pub fn free(l: usize) -> Self {
        Self::new(l, vec![0.0; 2 * l + 1])
    }

    pub fn from_potential(pot: &SturmianPotential, l: usize) -> Result<Self, TransportError> {
        let diag = pot.values(-(l as i64), l as i64)?;
        Ok(Self::new(l, diag))
    }

    pub fn sites(&self) -> usize {
        self.diag.len()
    }

    /// Position of site `n` in the diagonal.
    pub fn index(&self, n: i64) -> usize {
        (n + self.l as i64) as usize
    }

    pub fn site(&self, index: usize) -> i64 {
        index as i64 - self.l as i64
    }

    /// Gershgorin: the spectrum lies in `[−K + 1, K − 1]` for this `K`.
    pub fn spectral_radius_bound(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 3.0
    }

    pub fn eigen(&self) -> Result<Eigensystem, TransportError> {
        tridiagonal_eigen(&self.diag, &vec![1.0; self.sites() - 1])
    }
}

/// Eigenpairs of a real symmetric tridiagonal matrix, ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub n: usize,
    pub values: Vec<f64>,
    /// Column-major: eigenvector `j` occupies `vectors[j*n .. (j+1)*n]`.
    pub vectors: Vec<f64>,
}

impl Eigensystem {
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }
}

/// Divide-and-conquer tridiagonal eigensolver from LAPACK (`dstevd`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<Eigensystem, TransportError> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1), "off-diagonal must have n − 1 entries");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    let lwork = 1 + 4 * n + n * n;
    let liwork = 3 + 5 * n;
    let mut work = vec![0.0; lwork];
    let mut iwork = vec![0i32; liwork];
    let mut info = 0;
    let ni = i32::try_from(n).map_err(|_| TransportError::Eigensolver(format!("{n} sites is too many")))?;
    // SAFETY: buffers are sized as dstevd documents for JOBZ = 'V'.
    unsafe {
        lapack::dstevd(b'V', ni, &mut d, &mut e, &mut z, ni.max(1), &mut work, lwork as i32, &mut iwork, liwork as i32, &mut info);
    }
    if info != 0 {
        return Err(TransportError::Eigensolver(format!("dstevd returned info = {info}")));
    }
    Ok(Eigensystem { n, values: d, vectors: z })
}
