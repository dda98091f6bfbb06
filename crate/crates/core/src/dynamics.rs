//! Time evolution inside one excitation sector and the two-atom reduced state.

use num_complex::Complex64;

use crate::entanglement::DensityMatrix;
use crate::error::{ensure_finite, Error, Result};
use crate::model::{build_block, ModelParams, Sector, SectorBlock};
use crate::spectrum::{spectral_decompose, SpectralDecomposition};

pub type Amplitudes = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized sector amplitudes at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub sector: Sector,
    pub amplitudes: Amplitudes,
}

impl InitialState {
    /// Validates normalization and that no amplitude sits on a state the
    /// sector does not contain.
    pub fn new(sector: Sector, amplitudes: Amplitudes) -> Result<Self> {
        for a in &amplitudes {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidState("non-finite amplitude".into()));
            }
        }
        if let Some(k) = (sector.dim()..4).find(|&k| amplitudes[k] != ZERO) {
            return Err(Error::InvalidState(format!(
                "component {} is outside sector n = {sector}",
                k + 1
            )));
        }
        let norm2 = norm_sqr(&amplitudes);
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("squared norm is {norm2}, expected 1")));
        }
        Ok(Self { sector, amplitudes })
    }

    /// `|n⟩(cos α |−+⟩ + sin α |+−⟩)`.
    pub fn alpha_family(sector: Sector, alpha: f64) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        let (s, c) = alpha.sin_cos();
        Self::new(sector, [ZERO, c.into(), s.into(), ZERO])
    }

    /// `|n+1⟩|−−⟩`.
    pub fn ground_photon(sector: Sector) -> Result<Self> {
        Self::new(sector, [ONE, ZERO, ZERO, ZERO])
    }

    /// `|n−1⟩|++⟩`.
    pub fn excited_pair(sector: Sector) -> Result<Self> {
        Self::new(sector, [ZERO, ZERO, ZERO, ONE])
    }

    pub fn at_zero(&self) -> AmplitudeState {
        AmplitudeState { sector: self.sector, t: 0.0, b: self.amplitudes }
    }
}

/// Sector amplitudes `B_k(t)` at a given time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub sector: Sector,
    pub t: f64,
    pub b: Amplitudes,
}

impl AmplitudeState {
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.b)
    }

    /// Reinterprets this state as an initial condition (used for chaining).
    pub fn as_initial(&self) -> InitialState {
        InitialState { sector: self.sector, amplitudes: self.b }
    }
}

/// Two-atom density matrix obtained by tracing out the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub rho: DensityMatrix,
}

/// Spectral propagator for one sector, reusable across many times.
#[derive(Debug, Clone)]
pub struct Propagator {
    decomposition: SpectralDecomposition,
}

impl Propagator {
    pub fn new(params: &ModelParams, sector: Sector) -> Result<Self> {
        Ok(Self { decomposition: spectral_decompose(params, sector)? })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    /// `b(t) = V diag(e^{−iE_j t}) Vᵀ b(0)`.
    pub fn evolve(&self, init: &InitialState, t: f64) -> Result<AmplitudeState> {
        ensure_finite("t", t)?;
        let dec = &self.decomposition;
        if init.sector != dec.sector {
            return Err(Error::InvalidState(format!(
                "initial state is in sector {}, propagator in sector {}",
                init.sector, dec.sector
            )));
        }
        let d = dec.dim();
        let mut b = [ZERO; 4];
        for j in 0..d {
            let overlap: Complex64 =
                (0..d).map(|k| init.amplitudes[k] * dec.vectors[k][j]).sum();
            let phase = Complex64::from_polar(1.0, -dec.energies[j] * t);
            let coeff = overlap * phase;
            for (l, bl) in b.iter_mut().enumerate().take(d) {
                *bl += coeff * dec.vectors[l][j];
            }
        }
        Ok(AmplitudeState { sector: init.sector, t, b })
    }
}

/// Evolves `init` to time `t` through the spectral decomposition of its sector.
pub fn evolve(params: &ModelParams, init: &InitialState, t: f64) -> Result<AmplitudeState> {
    Propagator::new(params, init.sector)?.evolve(init, t)
}

/// Tolerances for the Dormand–Prince oracle integrator.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rtol: 1e-13, atol: 1e-14 }
    }
}

/// Integrates `i db/dt = H b` from 0 to `t` with adaptive Dormand–Prince 5(4).
pub fn evolve_oracle(params: &ModelParams, init: &InitialState, t: f64) -> Result<AmplitudeState> {
    let states = evolve_oracle_series(params, init, &[t], IntegratorOptions::default())?;
    Ok(states[0])
}

/// Integrates through a nondecreasing sequence of output times, landing on
/// each exactly.
pub fn evolve_oracle_series(
    params: &ModelParams,
    init: &InitialState,
    times: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<AmplitudeState>> {
    let block = build_block(params, init.sector)?;
    let mut integrator = DormandPrince::new(&block, opts);
    let mut y = init.amplitudes;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        ensure_finite("t", target)?;
        y = integrator.advance(y, now, target)?;
        now = target;
        out.push(AmplitudeState { sector: init.sector, t: target, b: y });
    }
    Ok(out)
}

struct DormandPrince<'a> {
    block: &'a SectorBlock,
    opts: IntegratorOptions,
    h: f64,
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl<'a> DormandPrince<'a> {
    fn new(block: &'a SectorBlock, opts: IntegratorOptions) -> Self {
        let scale = 1.0 + block.max_abs();
        Self { block, opts, h: 0.01 / scale }
    }

    fn rhs(&self, y: &Amplitudes) -> Amplitudes {
        let d = self.block.dim();
        let mut out = [ZERO; 4];
        for (j, o) in out.iter_mut().enumerate().take(d) {
            let hy: Complex64 = (0..d).map(|k| y[k] * self.block.matrix[j][k]).sum();
            *o = Complex64::new(hy.im, -hy.re); // −i · (H y)
        }
        out
    }

    fn advance(&mut self, mut y: Amplitudes, from: f64, to: f64) -> Result<Amplitudes> {
        let span = to - from;
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        let mut t = from;
        let min_step = 1e-14 * (1.0 + from.abs().max(to.abs()));
        loop {
            let remaining = (to - t) * dir;
            if remaining <= 0.0 {
                return Ok(y);
            }
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < min_step && !last {
                return Err(Error::StepUnderflow { t, h });
            }
            let (y_new, err) = self.step(&y, h * dir);
            if err <= 1.0 {
                y = y_new;
                t = if last { to } else { t + h * dir };
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // keep the proposed step if we only shortened it to land on `to`
            if !(last && err <= 1.0) {
                self.h = h * factor;
            }
        }
    }

    fn step(&self, y: &Amplitudes, h: f64) -> (Amplitudes, f64) {
        let mut k = [[ZERO; 4]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (r, kr) in k.iter().enumerate().take(s) {
                let a = A[s][r];
                if a != 0.0 {
                    for i in 0..4 {
                        ys[i] += kr[i] * (h * a);
                    }
                }
            }
            k[s] = self.rhs(&ys);
        }
        let mut y5 = *y;
        let mut err = 0.0_f64;
        for i in 0..4 {
            let mut d5 = ZERO;
            let mut d4 = ZERO;
            for s in 0..7 {
                d5 += k[s][i] * B5[s];
                d4 += k[s][i] * B4[s];
            }
            y5[i] += d5 * h;
            let e = ((d5 - d4) * h).norm();
            let sc = self.opts.atol + self.opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e / sc);
        }
        (y5, err)
    }
}

/// Partial trace over the cavity: populations on the diagonal plus the
/// single `|−+⟩⟨+−|` coherence.
pub fn reduced_density(state: &AmplitudeState) -> ReducedDensity {
    let b = &state.b;
    let mut rho = [[ZERO; 4]; 4];
    for k in 0..4 {
        rho[k][k] = Complex64::new(b[k].norm_sqr(), 0.0);
    }
    rho[1][2] = b[1] * b[2].conj();
    rho[2][1] = b[2] * b[1].conj();
    ReducedDensity { rho: DensityMatrix(rho) }
}

fn norm_sqr(b: &Amplitudes) -> f64 {
    b.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn sector(n: i64) -> Sector {
        Sector::new(n).unwrap()
    }

    fn generic() -> ModelParams {
        ModelParams::new(0.3, -0.1, 1.0, 0.7, 0.2, 0.1)
    }

    fn max_diff(a: &Amplitudes, b: &Amplitudes) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn initial_state_constructors() {
        let s = InitialState::alpha_family(sector(2), FRAC_PI_4).unwrap();
        assert!((s.amplitudes[1].re - FRAC_1_SQRT_2).abs() < 1e-16);
        assert!(InitialState::excited_pair(sector(0)).is_err());
        assert!(InitialState::alpha_family(sector(-1), 0.3).is_err());
        assert!(InitialState::ground_photon(sector(-1)).is_ok());
        assert!(InitialState::new(sector(1), [ONE, ONE, ZERO, ZERO]).is_err());
    }

    #[test]
    fn evolution_at_zero_is_identity() {
        let init = InitialState::alpha_family(sector(3), 0.4).unwrap();
        let s = evolve(&generic(), &init, 0.0).unwrap();
        assert!(max_diff(&s.b, &init.amplitudes) < 1e-15);
    }

    #[test]
    fn bell_state_fully_transfers_to_photon() {
        let init = InitialState::alpha_family(sector(0), FRAC_PI_4).unwrap();
        let t = std::f64::consts::PI / (2.0 * 2f64.sqrt());
        let s = evolve(&ModelParams::symmetric(0.0, 0.0), &init, t).unwrap();
        assert!((s.b[0].norm() - 1.0).abs() < 1e-14);
        assert!(s.b[1].norm() < 1e-14 && s.b[2].norm() < 1e-14);
    }

    #[test]
    fn evolution_is_unitary() {
        let init = InitialState::alpha_family(sector(4), -0.9).unwrap();
        for t in [0.1, 3.0, 17.5, 250.0] {
            let s = evolve(&generic(), &init, t).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_trivial_hamiltonian() {
        let init = InitialState::alpha_family(sector(2), 0.7).unwrap();
        let s = evolve_oracle(&ModelParams::default(), &init, 5.0).unwrap();
        assert!(max_diff(&s.b, &init.amplitudes) < 1e-15);
    }

    #[test]
    fn oracle_matches_spectral_evolution() {
        let init = InitialState::alpha_family(sector(3), 0.4).unwrap();
        let a = evolve(&generic(), &init, 10.0).unwrap();
        let b = evolve_oracle(&generic(), &init, 10.0).unwrap();
        assert!(max_diff(&a.b, &b.b) < 1e-8, "{}", max_diff(&a.b, &b.b));
    }

    #[test]
    fn oracle_norm_drift_is_small() {
        let init = InitialState::ground_photon(sector(2)).unwrap();
        let times: Vec<f64> = (0..=100).map(f64::from).collect();
        let out = evolve_oracle_series(&generic(), &init, &times, IntegratorOptions::default()).unwrap();
        for s in out {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn oracle_backward_in_time() {
        let init = InitialState::alpha_family(sector(1), 0.2).unwrap();
        let a = evolve(&generic(), &init, -3.0).unwrap();
        let b = evolve_oracle(&generic(), &init, -3.0).unwrap();
        assert!(max_diff(&a.b, &b.b) < 1e-9);
    }

    #[test]
    fn reduced_density_examples() {
        let s = |b: Amplitudes| AmplitudeState { sector: sector(1), t: 0.0, b };
        let r = reduced_density(&s([ZERO, ONE, ZERO, ZERO])).rho;
        assert_eq!(r.0[1][1], ONE);
        assert_eq!(r.0[1][2], ZERO);

        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let r = reduced_density(&s([ZERO, h, h, ZERO])).rho;
        assert!((r.0[1][2].re - 0.5).abs() < 1e-15);
        assert!((r.purity() - 1.0).abs() < 1e-15);

        let q = Complex64::new(0.5, 0.0);
        let r = reduced_density(&s([q; 4])).rho;
        for k in 0..4 {
            assert!((r.0[k][k].re - 0.25).abs() < 1e-16);
        }
        assert!((r.0[1][2].re - 0.25).abs() < 1e-16);
        assert_eq!(r.0[0][3], ZERO);
    }
}
