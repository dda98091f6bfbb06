//! Purity and concurrence of the two-atom state.
//!
//! The general Wootters concurrence works on any two-qubit density matrix and
//! doubles as the oracle for the amplitude formulas, which hold only for the
//! sparse reduced states produced by sector dynamics.

use num_complex::Complex64;

use crate::dynamics::AmplitudeState;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance on trace, hermiticity and negative eigenvalues.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Pivots below this are treated as exact zeros when factoring `ρ`.
const RANK_TOLERANCE: f64 = 1e-13;

/// A 4×4 complex matrix in the basis `|−−⟩, |−+⟩, |+−⟩, |++⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 4]; 4]);

impl DensityMatrix {
    pub fn from_real(m: [[f64; 4]; 4]) -> Self {
        Self(m.map(|row| row.map(Complex64::from)))
    }

    /// `|ψ⟩⟨ψ|` (no normalization applied).
    pub fn pure(psi: &[Complex64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] = psi[a] * psi[b].conj();
            }
        }
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = Complex64::new(0.25, 0.0);
        }
        Self(m)
    }

    /// `w·a + (1 − w)·b`.
    pub fn mix(w: f64, a: &Self, b: &Self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = a.0[i][j] * w + b.0[i][j] * (1.0 - w);
            }
        }
        Self(m)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    /// Largest `|ρ_ij − ρ_ji*|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    /// `Tr ρ²`, which for a Hermitian matrix is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum()
    }
}

/// Point in the concurrence–purity plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CPPoint {
    pub purity: f64,
    pub concurrence: f64,
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Purity of the reduced state written through the sector amplitudes:
/// `|B1|⁴ + |B4|⁴ + (1 − |B1|² − |B4|²)²`.
pub fn purity_from_amplitudes(state: &AmplitudeState) -> f64 {
    let p1 = state.b[0].norm_sqr();
    let p4 = state.b[3].norm_sqr();
    p1 * p1 + p4 * p4 + (1.0 - p1 - p4).powi(2)
}

/// `2|B2||B3| − 2|B1||B4|`, the concurrence before clipping at zero.
pub fn concurrence_argument(state: &AmplitudeState) -> f64 {
    let b = &state.b;
    2.0 * b[1].norm() * b[2].norm() - 2.0 * b[0].norm() * b[3].norm()
}

pub fn concurrence_from_amplitudes(state: &AmplitudeState) -> f64 {
    concurrence_argument(state).max(0.0)
}

pub fn cp_point(state: &AmplitudeState) -> CPPoint {
    CPPoint { purity: purity_from_amplitudes(state), concurrence: concurrence_from_amplitudes(state) }
}

/// Wootters concurrence `max{0, λ1 − λ2 − λ3 − λ4}` of a two-qubit state.
///
/// The `λ_j` are the singular values of `τ = Wᵀ (σy⊗σy) W` for any factor
/// `ρ = W W†`. `W` comes from a pivoted Cholesky factorization that drops
/// pivots below `1e−13`, so structurally rank-deficient states keep their
/// exact zeros instead of picking up `√ε` noise.
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    let lambdas = wootters_lambdas(rho)?;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// The four `λ_j`, sorted in non-increasing order.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    check_state(rho)?;
    let factor = pivoted_cholesky(rho)?;
    let r = factor.len();

    // σy⊗σy in this basis is the anti-diagonal (−1, 1, 1, −1).
    let flip = |v: &[Complex64; 4]| [-v[3], v[2], v[1], -v[0]];
    let mut tau = vec![[ZERO; 4]; r];
    for (b, wb) in factor.iter().enumerate() {
        let yb = flip(wb);
        for (a, wa) in factor.iter().enumerate() {
            tau[b][a] = (0..4).map(|k| wa[k] * yb[k]).sum();
        }
    }

    let mut lambdas = [0.0; 4];
    let sv = singular_values(&mut tau, r);
    lambdas[..r].copy_from_slice(&sv);
    lambdas.sort_by(|x, y| y.total_cmp(x));
    Ok(lambdas)
}

fn check_state(rho: &DensityMatrix) -> Result<()> {
    if rho.0.iter().flatten().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::NotAState("non-finite entry".into()));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > STATE_TOLERANCE {
        return Err(Error::NotAState(format!("trace is {tr}")));
    }
    let herm = rho.hermiticity_error();
    if herm > STATE_TOLERANCE {
        return Err(Error::NotAState(format!("not Hermitian (error {herm:e})")));
    }
    Ok(())
}

/// Columns `w_k` with `ρ ≈ Σ w_k w_k†`, stopping once every remaining
/// pivot is below the rank tolerance. The leftover Schur complement must
/// itself be negligible, otherwise `ρ` is not positive semidefinite.
fn pivoted_cholesky(rho: &DensityMatrix) -> Result<Vec<[Complex64; 4]>> {
    let mut s = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            s[i][j] = (rho.0[i][j] + rho.0[j][i].conj()) * 0.5;
        }
    }
    let mut used = [false; 4];
    let mut cols = Vec::with_capacity(4);
    loop {
        let pivot = (0..4)
            .filter(|&i| !used[i])
            .max_by(|&a, &b| s[a][a].re.total_cmp(&s[b][b].re));
        let Some(p) = pivot else { break };
        let d = s[p][p].re;
        if d <= RANK_TOLERANCE {
            break;
        }
        let root = d.sqrt();
        let mut w = [ZERO; 4];
        for i in 0..4 {
            if !used[i] {
                w[i] = s[i][p] / root;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] -= w[i] * w[j].conj();
            }
        }
        used[p] = true;
        cols.push(w);
    }

    for i in (0..4).filter(|&i| !used[i]) {
        if s[i][i].re < -STATE_TOLERANCE {
            return Err(Error::NotAState(format!("negative eigenvalue direction ({:e})", s[i][i].re)));
        }
        for j in (0..4).filter(|&j| !used[j] && j != i) {
            if s[i][j].norm() > STATE_TOLERANCE {
                return Err(Error::NotAState("matrix is not positive semidefinite".into()));
            }
        }
    }
    Ok(cols)
}

/// One-sided complex Jacobi: orthogonalizes the columns of `m` in place and
/// returns their norms. `m[c]` is column `c`, of which `r` entries are used.
fn singular_values(m: &mut [[Complex64; 4]], r: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..r {
            for j in i + 1..r {
                let alpha: f64 = m[i][..r].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = m[j][..r].iter().map(|x| x.norm_sqr()).sum();
                let gamma: Complex64 = (0..r).map(|k| m[i][k].conj() * m[j][k]).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..r {
                    let a = m[i][k];
                    let b = m[j][k] * phase;
                    m[i][k] = a * c - b * s;
                    m[j][k] = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..r).map(|c| m[c][..r].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect()
}
