//! Physical parameters, excitation sectors and the block Hamiltonian.
//!
//! The total excitation number `I = a†a + (σz¹ + σz²)/2` commutes with the
//! Hamiltonian, so each eigenvalue `n` of `I` labels an invariant subspace
//! spanned by
//!
//! ```text
//! φ1 = |n+1⟩|−−⟩   φ2 = |n⟩|−+⟩   φ3 = |n⟩|+−⟩   φ4 = |n−1⟩|++⟩
//! ```
//!
//! Every index in this crate refers to that ordering. Sector `n = 0` drops
//! `φ4` and sector `n = −1` keeps only `|0⟩|−−⟩`.

use crate::error::{ensure_finite, Error, Result};

/// Couplings of the two-atom cavity Hamiltonian in the interaction picture
/// (ħ = 1, all quantities dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelParams {
    /// Detuning of atom 1 from the cavity mode.
    pub delta1: f64,
    /// Detuning of atom 2 from the cavity mode.
    pub delta2: f64,
    /// Atom 1 to cavity coupling.
    pub g1: f64,
    /// Atom 2 to cavity coupling.
    pub g2: f64,
    /// Dipole-dipole (excitation exchange) strength.
    pub kappa: f64,
    /// Ising `σz ⊗ σz` strength.
    pub ising: f64,
}

impl ModelParams {
    pub fn new(delta1: f64, delta2: f64, g1: f64, g2: f64, kappa: f64, ising: f64) -> Self {
        Self { delta1, delta2, g1, g2, kappa, ising }
    }

    /// Equal unit couplings and zero detunings.
    pub fn symmetric(kappa: f64, ising: f64) -> Self {
        Self { delta1: 0.0, delta2: 0.0, g1: 1.0, g2: 1.0, kappa, ising }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("delta1", self.delta1)?;
        ensure_finite("delta2", self.delta2)?;
        ensure_finite("g1", self.g1)?;
        ensure_finite("g2", self.g2)?;
        ensure_finite("kappa", self.kappa)?;
        ensure_finite("ising", self.ising)
    }

    /// Whether these are the equal-coupling, zero-detuning parameters the
    /// time-domain closed forms apply to.
    pub fn is_symmetric(&self) -> bool {
        self.delta1 == 0.0 && self.delta2 == 0.0 && self.g1 == 1.0 && self.g2 == 1.0
    }
}

/// Excitation number `n ≥ −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sector(i64);

impl Sector {
    pub fn new(n: i64) -> Result<Self> {
        if n < -1 {
            Err(Error::InvalidSector(n))
        } else {
            Ok(Self(n))
        }
    }

    pub fn n(self) -> i64 {
        self.0
    }

    /// Number of basis states in this sector: 4, or 3 for `n = 0`, or 1 for `n = −1`.
    pub fn dim(self) -> usize {
        match self.0 {
            -1 => 1,
            0 => 3,
            _ => 4,
        }
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The real symmetric Hamiltonian restricted to one sector.
///
/// Stored as a 4×4 array; only the leading `dim × dim` corner is meaningful
/// and the remainder is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBlock {
    pub sector: Sector,
    pub matrix: [[f64; 4]; 4],
}

impl SectorBlock {
    /// Wraps an arbitrary symmetric matrix of the given dimension.
    pub fn from_matrix(sector: Sector, matrix: [[f64; 4]; 4]) -> Self {
        Self { sector, matrix }
    }

    pub fn dim(&self) -> usize {
        self.sector.dim()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.matrix[j][k]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0_f64;
        for row in &self.matrix[..d] {
            for x in &row[..d] {
                m = m.max(x.abs());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d = self.dim();
        self.matrix[..d]
            .iter()
            .flat_map(|row| row[..d].iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.matrix[j][j]).sum()
    }

    /// `H · v` on the leading `dim` components.
    pub fn apply(&self, v: &[f64; 4]) -> [f64; 4] {
        let d = self.dim();
        let mut out = [0.0; 4];
        for j in 0..d {
            out[j] = (0..d).map(|k| self.matrix[j][k] * v[k]).sum();
        }
        out
    }
}

/// Builds the sector block of the Hamiltonian in the `φ1..φ4` basis.
pub fn build_block(params: &ModelParams, sector: Sector) -> Result<SectorBlock> {
    params.validate()?;
    let ModelParams { delta1: d1, delta2: d2, g1, g2, kappa, ising: j } = *params;
    let n = sector.n();

    let mut m = [[0.0; 4]; 4];
    if n == -1 {
        m[0][0] = j - d1 - d2;
        return Ok(SectorBlock { sector, matrix: m });
    }

    let up = ((n + 1) as f64).sqrt();
    let down = (n as f64).sqrt();
    m[0][0] = j - d1 - d2;
    m[1][1] = d2 - d1 - j;
    m[2][2] = d1 - d2 - j;
    m[0][1] = g2 * up;
    m[0][2] = g1 * up;
    m[1][2] = 2.0 * kappa;
    m[1][3] = g1 * down;
    m[2][3] = g2 * down;
    for a in 0..4 {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }

    if n == 0 {
        // |−1⟩|++⟩ does not exist; √n = 0 already decouples it.
        m[3] = [0.0; 4];
    } else {
        m[3][3] = j + d1 + d2;
    }
    Ok(SectorBlock { sector, matrix: m })
}
