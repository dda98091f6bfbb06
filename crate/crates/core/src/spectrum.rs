//! Diagonalization of the sector blocks.
//!
//! Each four-level block is traceless, so its characteristic polynomial is a
//! depressed quartic. The closed-form route solves it with a Ferrari-type
//! resolvent and builds eigenvectors from cofactor polynomials in the
//! eigenvalue. A cyclic Jacobi solver serves as the independent check and as
//! the fallback whenever the closed form is degenerate or ill-conditioned.

use crate::error::{Error, Result};
use crate::model::{build_block, ModelParams, Sector, SectorBlock};

/// Coefficients of the resolvent construction for one four-level block.
///
/// `p` is the determinant of the block and `q` twice the linear coefficient
/// of `det(x − H)`; `r` is a third of `tr H²`. `u` is the real root of
/// `u³ − 3tu − 2s = 0` selected by the cube-root formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticInvariants {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

impl QuarticInvariants {
    /// Residual of the cubic `u` solves.
    pub fn cubic_residual(&self) -> f64 {
        self.u.powi(3) - 3.0 * self.t * self.u - 2.0 * self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    IterativeFallback,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::IterativeFallback => "iterative_fallback",
        }
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of one block.
///
/// `vectors[k][j]` is component `k` of eigenvector `j`. Only the leading
/// `dim` entries are populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomposition {
    pub sector: Sector,
    pub energies: [f64; 4],
    pub vectors: [[f64; 4]; 4],
    pub method: Method,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.sector.dim()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies[..self.dim()]
    }

    pub fn column(&self, j: usize) -> [f64; 4] {
        let mut c = [0.0; 4];
        for (k, x) in c.iter_mut().enumerate() {
            *x = self.vectors[k][j];
        }
        c
    }

    /// `max_j ‖H v_j − E_j v_j‖`.
    pub fn max_residual(&self, block: &SectorBlock) -> f64 {
        (0..self.dim())
            .map(|j| {
                let v = self.column(j);
                let hv = block.apply(&v);
                norm(&sub_scaled(&hv, &v, self.energies[j]))
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `VᵀV − I`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                let dot: f64 = (0..d).map(|k| self.vectors[k][a] * self.vectors[k][b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Rank-one projector `v_j v_jᵀ`.
    pub fn projector(&self, j: usize) -> [[f64; 4]; 4] {
        let v = self.column(j);
        let mut p = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                p[a][b] = v[a] * v[b];
            }
        }
        p
    }
}

/// Invariants of the depressed quartic for a four-level sector (`n ≥ 1`).
pub fn quartic_invariants(params: &ModelParams, sector: Sector) -> Result<QuarticInvariants> {
    params.validate()?;
    if sector.n() < 1 {
        return Err(Error::Domain(format!(
            "quartic invariants need a four-level sector, got n = {sector}"
        )));
    }
    let ModelParams { delta1: d1, delta2: d2, g1, g2, kappa: k, ising: j } = *params;
    let n = sector.n() as f64;
    let (g1s, g2s) = (g1 * g1, g2 * g2);
    let m = 2.0 * n + 1.0;

    let p = (d1 * d1 - d2 * d2 + (n + 1.0) * (g1s - g2s)) * (d1 * d1 - d2 * d2 + n * (g1s - g2s))
        + j * j * (m * (g1s + g2s) - 2.0 * (d1 * d1 + d2 * d2) + j * j - 4.0 * k * k)
        + 2.0 * j * (g1s * d1 + g2s * d2 + 2.0 * m * k * g1 * g2)
        + 4.0 * k * (d1 + d2) * (g1 * g2 + k * (d1 + d2));
    let q = 4.0 * (g1s * d2 + g2s * d1 + 4.0 * j * (k * k - d2 * d1) - 2.0 * m * k * g1 * g2);
    let r = 2.0 / 3.0 * (m * (g1s + g2s) + 2.0 * (d1 * d1 + d2 * d2 + j * j) + 4.0 * k * k);
    let s = 2.0 * p * r + (q * q - r * r * r) / 8.0;
    let t = 4.0 * p / 3.0 + r * r / 4.0;

    // A symmetric block has a resolvent with three real roots, so a positive
    // discriminant within rounding is really zero. Sending it to the real
    // cube-root branch would pick the smallest root of a double pair.
    let disc = s * s - t * t * t;
    let noise = 1e-14 * (s * s).max(t.abs().powi(3));
    let disc = if disc.abs() <= noise { 0.0 } else { disc };
    let u = if disc > 0.0 {
        let w = disc.sqrt();
        (s + w).cbrt() + (s - w).cbrt()
    } else {
        // Conjugate cube roots: their sum is 2√t cos(θ/3).
        let theta = (-disc).max(0.0).sqrt().atan2(s);
        2.0 * t.max(0.0).sqrt() * (theta / 3.0).cos()
    };
    let u = polish_resolvent_root(u, s, t);
    Ok(QuarticInvariants { p, q, r, s, t, u })
}

/// One Newton step on `u³ − 3tu − 2s`, skipped near a double root where the
/// derivative vanishes.
fn polish_resolvent_root(u: f64, s: f64, t: f64) -> f64 {
    let f = u * u * u - 3.0 * t * u - 2.0 * s;
    let df = 3.0 * (u * u - t);
    if df.abs() > 1e-6 * (u * u + t.abs()) {
        let next = u - f / df;
        let f_next = next * next * next - 3.0 * t * next - 2.0 * s;
        if f_next.abs() < f.abs() {
            return next;
        }
    }
    u
}

/// The four eigenvalues of a four-level block from the quartic invariants,
/// sorted ascending.
pub fn closed_form_eigenvalues(params: &ModelParams, sector: Sector) -> Result<[f64; 4]> {
    let QuarticInvariants { q, r, u, .. } = quartic_invariants(params, sector)?;
    if r == 0.0 {
        // r is a sum of squares of every coupling, so the block is zero.
        return Ok([0.0; 4]);
    }
    let m = r + u;
    if m.abs() < 1e-10 * (1.0 + r) {
        return Err(Error::Conditioning(format!("|r + u| = {:e} is below threshold", m.abs())));
    }
    let root_m = m.sqrt();
    let tol = 1e-12 * (1.0 + r);
    let lower = clamp_radicand(2.0 * r - u + q / root_m, tol)?.sqrt();
    let upper = clamp_radicand(2.0 * r - u - q / root_m, tol)?.sqrt();

    let mut e = [
        -0.5 * root_m - 0.5 * lower,
        -0.5 * root_m + 0.5 * lower,
        0.5 * root_m - 0.5 * upper,
        0.5 * root_m + 0.5 * upper,
    ];
    e.sort_by(f64::total_cmp);
    Ok(e)
}

fn clamp_radicand(x: f64, tol: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -tol {
        Ok(0.0)
    } else {
        Err(Error::Conditioning(format!("negative radicand {x:e}")))
    }
}

/// Unnormalized eigenvector of a four-level block for eigenvalue `e`.
fn raw_eigenvector(params: &ModelParams, n: f64, e: f64) -> [f64; 4] {
    let ModelParams { delta1: d1, delta2: d2, g1, g2, kappa: k, ising: j } = *params;
    let (g1s, g2s) = (g1 * g1, g2 * g2);
    let shifted = e - d1 - d2 - j;
    let v1 = shifted * ((e + j).powi(2) - n * (g1s + g2s) - (d1 - d2).powi(2) - 4.0 * k * k)
        - 2.0 * n * ((d1 + j) * g2s + (d2 + j) * g1s + 2.0 * k * g1 * g2);
    let v2 = (n + 1.0).sqrt()
        * (2.0 * k * g1 * shifted + g2 * ((e - d1).powi(2) + n * (g1s - g2s) - (d2 + j).powi(2)));
    let v3 = (n + 1.0).sqrt()
        * (2.0 * k * g2 * shifted + g1 * ((e - d2).powi(2) + n * (g2s - g1s) - (d1 + j).powi(2)));
    let v4 = (n * (n + 1.0)).sqrt() * (2.0 * g1 * g2 * (e + j) + 2.0 * k * (g1s + g2s));
    [v1, v2, v3, v4]
}

/// Normalized eigenvectors (as columns) for closed-form eigenvalues.
pub fn closed_form_eigenvectors(
    params: &ModelParams,
    sector: Sector,
    energies: &[f64; 4],
) -> Result<[[f64; 4]; 4]> {
    let block = build_block(params, sector)?;
    if sector.n() < 1 {
        return Err(Error::Domain(format!(
            "closed-form eigenvectors need a four-level sector, got n = {sector}"
        )));
    }
    let scale = 1.0 + block.max_abs();
    for w in energies.windows(2) {
        if (w[1] - w[0]).abs() < 1e-8 * scale {
            return Err(Error::Degenerate(format!(
                "eigenvalues {} and {} coincide",
                w[0], w[1]
            )));
        }
    }

    let n = sector.n() as f64;
    let mut vectors = [[0.0; 4]; 4];
    for (j, &e) in energies.iter().enumerate() {
        let v = raw_eigenvector(params, n, e);
        let len = norm(&v);
        if len < 1e-10 * scale.powi(3) {
            return Err(Error::Degenerate(format!(
                "eigenvector for E = {e} vanishes (norm {len:e})"
            )));
        }
        let mut v = v.map(|x| x / len);
        fix_sign(&mut v, 4);
        for k in 0..4 {
            vectors[k][j] = v[k];
        }
    }
    Ok(vectors)
}

/// Cyclic Jacobi diagonalization of a symmetric block of dimension ≤ 4.
pub fn oracle_eigensolve(block: &SectorBlock) -> Result<SpectralDecomposition> {
    const MAX_SWEEPS: usize = 64;
    let d = block.dim();
    let mut a = block.matrix;
    let mut v = identity();
    let frob = block.frobenius_norm();
    let target = 1e-13 * frob;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, d);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut a, &mut v, d, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    let mut energies = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (j, &src) in order.iter().enumerate() {
        energies[j] = a[src][src];
        let mut col = [0.0; 4];
        for k in 0..d {
            col[k] = v[k][src];
        }
        fix_sign(&mut col, d);
        for k in 0..d {
            vectors[k][j] = col[k];
        }
    }
    Ok(SpectralDecomposition { sector: block.sector, energies, vectors, method: Method::IterativeFallback })
}

fn rotate(a: &mut [[f64; 4]; 4], v: &mut [[f64; 4]; 4], d: usize, p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..d {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..d {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for row in v.iter_mut().take(d) {
        let vkp = row[p];
        let vkq = row[q];
        row[p] = c * vkp - s * vkq;
        row[q] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(a: &[[f64; 4]; 4], d: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p != q {
                s += a[p][q] * a[p][q];
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes one sector, preferring the closed form.
///
/// The closed form is accepted only if its residual and orthogonality pass;
/// otherwise the Jacobi result is returned. Sectors `n ≤ 0` always use Jacobi.
pub fn spectral_decompose(params: &ModelParams, sector: Sector) -> Result<SpectralDecomposition> {
    let block = build_block(params, sector)?;
    if sector.n() >= 1 {
        if let Ok(decomp) = try_closed_form(params, sector, &block) {
            return Ok(decomp);
        }
    }
    oracle_eigensolve(&block)
}

fn try_closed_form(
    params: &ModelParams,
    sector: Sector,
    block: &SectorBlock,
) -> Result<SpectralDecomposition> {
    let energies = closed_form_eigenvalues(params, sector)?;
    let vectors = closed_form_eigenvectors(params, sector, &energies)?;
    let decomp = SpectralDecomposition { sector, energies, vectors, method: Method::ClosedForm };
    let scale = 1.0 + block.max_abs();
    let residual = decomp.max_residual(block);
    if residual > 1e-9 * scale {
        return Err(Error::Degenerate(format!("eigenpair residual {residual:e}")));
    }
    let ortho = decomp.orthogonality_error();
    if ortho > 1e-10 {
        return Err(Error::Degenerate(format!("eigenvectors not orthonormal ({ortho:e})")));
    }
    Ok(decomp)
}

/// Coefficients `[c0, c1, c2, c3, c4]` of `det(x − H) = Σ c_k x^k` for a
/// four-level block, from principal minors of `H`.
pub fn characteristic_polynomial(block: &SectorBlock) -> [f64; 5] {
    let h = &block.matrix;
    let e1: f64 = (0..4).map(|i| h[i][i]).sum();
    let mut e2 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            e2 += h[i][i] * h[j][j] - h[i][j] * h[j][i];
        }
    }
    let mut e3 = 0.0;
    for skip in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&x| x != skip).collect();
        let m = |a: usize, b: usize| h[idx[a]][idx[b]];
        e3 += m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
    let e4 = det4(h);
    [e4, -e3, e2, -e1, 1.0]
}

/// Horner evaluation of a polynomial given lowest-order coefficient first.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn det4(h: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for col in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&x| x != col).collect();
        let m = |a: usize, b: usize| h[a + 1][idx[b]];
        let minor = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * h[0][col] * minor;
    }
    det
}

/// Makes the largest-magnitude component positive (lowest index wins ties).
fn fix_sign(v: &mut [f64; 4], d: usize) {
    let max = v[..d].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v[..d].iter().position(|x| x.abs() >= max * (1.0 - 1e-12)) {
        if v[lead] < 0.0 {
            for x in v[..d].iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn identity() -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub_scaled(a: &[f64; 4], b: &[f64; 4], s: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = a[k] - s * b[k];
    }
    out
}
