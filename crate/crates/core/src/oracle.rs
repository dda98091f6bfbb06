//! Brute-force reference computations.
//!
//! Nothing here uses the sector structure: operators are built on a truncated
//! Fock space tensored with the two spins, states are embedded in that full
//! space, and the MEMS frontier is found by direct numerical maximization.
//! These routines exist to check the structured code paths.

use num_complex::Complex64;

use crate::dynamics::AmplitudeState;
use crate::entanglement::DensityMatrix;
use crate::model::{ModelParams, Sector};

type Dense = Vec<Vec<f64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn zeros(n: usize) -> Dense {
    vec![vec![0.0; n]; n]
}

fn eye(n: usize) -> Dense {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn kron(a: &Dense, b: &Dense) -> Dense {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            if a[i][j] == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn transpose(a: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[j][i] = a[i][j];
        }
    }
    out
}

fn add_scaled(acc: &mut Dense, m: &Dense, s: f64) {
    for (ra, rm) in acc.iter_mut().zip(m) {
        for (x, y) in ra.iter_mut().zip(rm) {
            *x += s * y;
        }
    }
}

/// Full Hamiltonian on Fock states `0..fock_dim` ⊗ atom 1 ⊗ atom 2.
///
/// Single-atom basis is (`|−⟩`, `|+⟩`); the full index is
/// `4·photons + 2·s1 + s2`.
pub fn full_hamiltonian(params: &ModelParams, fock_dim: usize) -> Dense {
    let mut a = zeros(fock_dim);
    for m in 1..fock_dim {
        a[m - 1][m] = (m as f64).sqrt();
    }
    let adag = transpose(&a);
    let id_f = eye(fock_dim);
    let id_s = eye(2);
    let sz: Dense = vec![vec![-1.0, 0.0], vec![0.0, 1.0]];
    let sp: Dense = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
    let sm = transpose(&sp);

    let atom1 = |op: &Dense| kron(&id_f, &kron(op, &id_s));
    let atom2 = |op: &Dense| kron(&id_f, &kron(&id_s, op));
    let field = |op: &Dense| kron(op, &eye(4));

    let (a_full, adag_full) = (field(&a), field(&adag));
    let mut h = zeros(4 * fock_dim);
    add_scaled(&mut h, &atom1(&sz), params.delta1);
    add_scaled(&mut h, &atom2(&sz), params.delta2);

    let jc = |sp_j: &Dense, sm_j: &Dense| {
        let mut t = matmul(&a_full, sp_j);
        add_scaled(&mut t, &matmul(&adag_full, sm_j), 1.0);
        t
    };
    add_scaled(&mut h, &jc(&atom1(&sp), &atom1(&sm)), params.g1);
    add_scaled(&mut h, &jc(&atom2(&sp), &atom2(&sm)), params.g2);

    let mut exchange = matmul(&atom1(&sm), &atom2(&sp));
    add_scaled(&mut exchange, &matmul(&atom1(&sp), &atom2(&sm)), 1.0);
    add_scaled(&mut h, &exchange, 2.0 * params.kappa);
    add_scaled(&mut h, &matmul(&atom1(&sz), &atom2(&sz)), params.ising);
    h
}

/// Full-space indices of the sector basis states that exist.
pub fn sector_indices(sector: Sector) -> Vec<usize> {
    let n = sector.n();
    let candidates = [(n + 1, 0usize), (n, 1), (n, 2), (n - 1, 3)];
    candidates
        .iter()
        .take(sector.dim())
        .map(|&(photons, spin)| 4 * photons as usize + spin)
        .collect()
}

/// Sector block assembled from matrix elements `⟨φ_j|H|φ_k⟩` of the full
/// Hamiltonian truncated at `n + 2` Fock states.
pub fn fock_block(params: &ModelParams, sector: Sector) -> [[f64; 4]; 4] {
    let fock_dim = (sector.n() + 2) as usize;
    let h = full_hamiltonian(params, fock_dim);
    let idx = sector_indices(sector);
    let mut m = [[0.0; 4]; 4];
    for (j, &a) in idx.iter().enumerate() {
        for (k, &b) in idx.iter().enumerate() {
            m[j][k] = h[a][b];
        }
    }
    m
}

/// Embeds sector amplitudes into the full space with `fock_dim` Fock states.
pub fn embed(state: &AmplitudeState, fock_dim: usize) -> Vec<Complex64> {
    let mut psi = vec![ZERO; 4 * fock_dim];
    for (k, &i) in sector_indices(state.sector).iter().enumerate() {
        psi[i] = state.b[k];
    }
    psi
}

/// Two-atom state from `Tr_cavity |Ψ⟩⟨Ψ|` on the full space.
pub fn partial_trace(psi: &[Complex64]) -> DensityMatrix {
    let fock_dim = psi.len() / 4;
    let mut rho = [[ZERO; 4]; 4];
    for f in 0..fock_dim {
        for s in 0..4 {
            for r in 0..4 {
                rho[s][r] += psi[4 * f + s] * psi[4 * f + r].conj();
            }
        }
    }
    DensityMatrix(rho)
}

/// Classical RK4 on the full truncated space with `steps` equal steps.
pub fn full_space_evolve(h: &Dense, psi0: &[Complex64], t: f64, steps: usize) -> Vec<Complex64> {
    let dim = psi0.len();
    let rhs = |y: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|i| {
                let hy: Complex64 = (0..dim).filter(|&k| h[i][k] != 0.0).map(|k| y[k] * h[i][k]).sum();
                Complex64::new(hy.im, -hy.re)
            })
            .collect()
    };
    let dt = t / steps as f64;
    let mut y = psi0.to_vec();
    let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, dt / 2.0));
        let k3 = rhs(&axpy(&y, &k2, dt / 2.0));
        let k4 = rhs(&axpy(&y, &k3, dt));
        for i in 0..dim {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    y
}

/// Largest concurrence over X-states with purity `purity`.
///
/// Diagonal `(a, b, c, d)` and one outer coherence `|z| ≤ √(ad)`, whose size
/// is fixed by the purity constraint `Σ diag² + 2|z|² = P`. Concurrence is
/// `2(|z| − √(bc))`. The simplex is scanned on a coarse grid and the best
/// candidates refined by successively finer local grids.
pub fn mems_oracle(purity: f64) -> f64 {
    let objective = |a: f64, b: f64, c: f64| -> Option<f64> {
        let d = 1.0 - a - b - c;
        if a < 0.0 || b < 0.0 || c < 0.0 || d < -1e-15 {
            return None;
        }
        let d = d.max(0.0);
        let z2 = 0.5 * (purity - a * a - b * b - c * c - d * d);
        if z2 < 0.0 || z2 > a * d {
            return None;
        }
        Some(2.0 * (z2.sqrt() - (b * c).sqrt()))
    };

    const COARSE: usize = 48;
    let h0 = 1.0 / COARSE as f64;
    let mut seeds: Vec<(f64, [f64; 3])> = Vec::new();
    for i in 0..=COARSE {
        for j in 0..=COARSE - i {
            for k in 0..=COARSE - i - j {
                let x = [i as f64 * h0, j as f64 * h0, k as f64 * h0];
                if let Some(v) = objective(x[0], x[1], x[2]) {
                    seeds.push((v, x));
                }
            }
        }
    }
    if seeds.is_empty() {
        return 0.0;
    }
    seeds.sort_by(|x, y| y.0.total_cmp(&x.0));
    seeds.truncate(6);

    let mut best = 0.0_f64;
    for (mut value, mut x) in seeds {
        let mut h = h0;
        while h > 1e-11 {
            let mut improved = false;
            for di in -4..=4 {
                for dj in -4..=4 {
                    for dk in -4..=4 {
                        let cand = [
                            x[0] + di as f64 * h / 2.0,
                            x[1] + dj as f64 * h / 2.0,
                            x[2] + dk as f64 * h / 2.0,
                        ]
                        .map(|v: f64| v.clamp(0.0, 1.0));
                        if let Some(v) = objective(cand[0], cand[1], cand[2]) {
                            if v > value {
                                value = v;
                                x = cand;
                                improved = true;
                            }
                        }
                    }
                }
            }
            if !improved {
                h /= 4.0;
            }
        }
        best = best.max(value);
    }
    best.max(0.0)
}
