use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DynamicsError, SystemParams};

/// Top-Fock-level population above which the cutoff is reported as too small.
pub const CUTOFF_GUARD: f64 = 1e-4;

/// Operator stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (c, r, v.conj()))
                .collect(),
        }
    }

    fn scaled(mut self, s: f64) -> Self {
        for e in &mut self.entries {
            e.2 *= s;
        }
        self
    }

    /// Diagonal of `L†L`.
    fn diag_of_dag_self(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(_, c, v) in &self.entries {
            d[c] += v.norm_sqr();
        }
        d
    }
}

/// Transmon ⊗ dissipator operators, basis index `q·N + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    pub params: SystemParams,
    pub dim: usize,
    /// Transmon excitation number per basis state.
    pub(crate) number_b: Vec<f64>,
    /// Static diagonal of `H_eff = H − (i/2) Σ L†L` at Δ = 0.
    pub(crate) diag_static: Vec<Complex64>,
    /// Off-diagonal exchange terms `g(b†a + b a†)`.
    pub(crate) exchange: Vec<(usize, usize, f64)>,
    pub jumps: Vec<SparseOp>,
}

fn lowering(levels: usize, fock: usize, on_qubit: bool) -> SparseOp {
    let idx = |q: usize, n: usize| q * fock + n;
    let mut entries = Vec::new();
    for q in 0..levels {
        for n in 0..fock {
            if on_qubit && q > 0 {
                entries.push((
                    idx(q - 1, n),
                    idx(q, n),
                    Complex64::new((q as f64).sqrt(), 0.0),
                ));
            }
            if !on_qubit && n > 0 {
                entries.push((
                    idx(q, n - 1),
                    idx(q, n),
                    Complex64::new((n as f64).sqrt(), 0.0),
                ));
            }
        }
    }
    SparseOp {
        dim: levels * fock,
        entries,
    }
}

impl LindbladModel {
    pub fn new(params: SystemParams) -> Result<Self, DynamicsError> {
        params.validate()?;
        let (levels, fock) = (params.qubit_levels, params.fock_cutoff);
        let dim = levels * fock;
        let b = lowering(levels, fock, true);
        let a = lowering(levels, fock, false);
        let n_th = params.n_th();

        let mut jumps = vec![a.clone().scaled((params.kappa_d * (1.0 + n_th)).sqrt())];
        if n_th > 0.0 {
            jumps.push(a.adjoint().scaled((params.kappa_d * n_th).sqrt()));
        }
        if let Some(t1) = params.t1_int {
            jumps.push(b.clone().scaled((1.0 / t1).sqrt()));
        }

        let number_b: Vec<f64> = (0..dim).map(|i| (i / fock) as f64).collect();
        let mut diag_static: Vec<Complex64> = number_b
            .iter()
            .map(|&q| Complex64::new(0.5 * params.anharmonicity * q * (q - 1.0), 0.0))
            .collect();
        for l in &jumps {
            for (d, x) in diag_static.iter_mut().zip(l.diag_of_dag_self()) {
                *d -= Complex64::new(0.0, 0.5 * x);
            }
        }

        // b†a: |q, n⟩ → √(q+1)√n |q+1, n−1⟩, plus its adjoint
        let mut exchange = Vec::new();
        for q in 0..levels - 1 {
            for n in 1..fock {
                let v = params.g * ((q + 1) as f64).sqrt() * (n as f64).sqrt();
                let (lo, hi) = (q * fock + n, (q + 1) * fock + n - 1);
                exchange.push((hi, lo, v));
                exchange.push((lo, hi, v));
            }
        }

        Ok(Self {
            params,
            dim,
            number_b,
            diag_static,
            exchange,
            jumps,
        })
    }

    pub fn index(&self, qubit: usize, fock: usize) -> usize {
        qubit * self.params.fock_cutoff + fock
    }

    /// Hermitian Hamiltonian / ħ at detuning `delta` (dense, for inspection).
    pub fn hamiltonian(&self, delta: f64) -> DMatrix<Complex64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let q = self.number_b[i];
            h[(i, i)] = Complex64::new(
                delta * q + 0.5 * self.params.anharmonicity * q * (q - 1.0),
                0.0,
            );
        }
        for &(r, c, v) in &self.exchange {
            h[(r, c)] += v;
        }
        h
    }

    /// `dρ/dt` written into `out`; column-major `dim × dim` slices.
    pub(crate) fn rhs(&self, delta: f64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        // out = −i H_eff ρ
        for c in 0..d {
            for r in 0..d {
                let h = self.diag_static[r] + delta * self.number_b[r];
                out[r + c * d] = Complex64::new(h.im, -h.re) * rho[r + c * d];
            }
        }
        for &(r, k, v) in &self.exchange {
            for c in 0..d {
                out[r + c * d] += Complex64::new(0.0, -v) * rho[k + c * d];
            }
        }
        // add the adjoint: −iH_effρ + iρH_eff†
        for c in 0..d {
            for r in 0..=c {
                let x = out[r + c * d];
                let y = out[c + r * d];
                let s = x + y.conj();
                out[r + c * d] = s;
                out[c + r * d] = s.conj();
            }
        }
        for l in &self.jumps {
            for &(r, k, v) in &l.entries {
                for &(s, m, w) in &l.entries {
                    out[r + s * d] += v * w.conj() * rho[k + m * d];
                }
            }
        }
    }
}

/// Hamiltonian / ħ of `params` with the transmon at `omega_q`, in the frame rotating at ω_d.
pub fn build_hamiltonian(
    params: &SystemParams,
    omega_q: f64,
) -> Result<DMatrix<Complex64>, DynamicsError> {
    Ok(LindbladModel::new(*params)?.hamiltonian(omega_q - params.omega_d))
}

/// State over the transmon ⊗ dissipator product basis, index `q·N + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub rho: DMatrix<Complex64>,
    pub qubit_levels: usize,
    pub fock_cutoff: usize,
}

impl DensityMatrix {
    /// Diagonal transmon populations ⊗ truncated thermal dissipator state.
    pub fn product(qubit_pops: &[f64], params: &SystemParams) -> Result<Self, DynamicsError> {
        let (levels, fock) = (params.qubit_levels, params.fock_cutoff);
        if qubit_pops.len() > levels || qubit_pops.iter().any(|p| !(*p >= 0.0)) {
            return Err(DynamicsError::InvalidParameter(format!(
                "{qubit_pops:?} is not a population vector over {levels} levels"
            )));
        }
        let total: f64 = qubit_pops.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(DynamicsError::InvalidParameter(format!(
                "qubit populations sum to {total}"
            )));
        }
        let n_th = params.n_th();
        let ratio = n_th / (1.0 + n_th);
        let mut fock_pops: Vec<f64> = (0..fock).map(|n| ratio.powi(n as i32)).collect();
        let z: f64 = fock_pops.iter().sum();
        fock_pops.iter_mut().for_each(|p| *p /= z);

        let dim = levels * fock;
        let mut rho = DMatrix::zeros(dim, dim);
        for (q, pq) in qubit_pops.iter().enumerate() {
            for (n, pn) in fock_pops.iter().enumerate() {
                rho[(q * fock + n, q * fock + n)] = Complex64::new(pq * pn, 0.0);
            }
        }
        Ok(Self {
            rho,
            qubit_levels: levels,
            fock_cutoff: fock,
        })
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn qubit_populations(&self) -> Vec<f64> {
        let n = self.fock_cutoff;
        (0..self.qubit_levels)
            .map(|q| (0..n).map(|k| self.rho[(q * n + k, q * n + k)].re).sum())
            .collect()
    }

    pub fn fock_populations(&self) -> Vec<f64> {
        let n = self.fock_cutoff;
        (0..n)
            .map(|k| {
                (0..self.qubit_levels)
                    .map(|q| self.rho[(q * n + k, q * n + k)].re)
                    .sum()
            })
            .collect()
    }

    pub fn dissipator_occupation(&self) -> f64 {
        self.fock_populations()
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.rho.nrows();
        let mut e: f64 = 0.0;
        for c in 0..d {
            for r in 0..c {
                e = e.max((self.rho[(r, c)] - self.rho[(c, r)].conj()).norm());
            }
            e = e.max(self.rho[(c, c)].im.abs());
        }
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn with_data(&self, data: &[Complex64]) -> Self {
        let d = self.rho.nrows();
        Self {
            rho: DMatrix::from_column_slice(d, d, data),
            ..self.clone()
        }
    }
}
