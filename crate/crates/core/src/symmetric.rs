//! Equal couplings (`g1 = g2 = 1`) and zero detunings.
//!
//! In this case the dynamics of the `α`-family reduce to two frequencies and
//! the purity and concurrence have closed forms in time. For `κ = J = 0` they
//! invert into explicit concurrence-versus-purity curves.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::InitialState;
use crate::entanglement::CPPoint;
use crate::error::{ensure_finite, Error, Result};
use crate::model::{ModelParams, Sector};

/// Slack on validity-interval endpoints.
const ENDPOINT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricParams {
    pub n: u32,
    /// Initial-state angle in `[−π/2, π/2]`.
    pub alpha: f64,
    pub kappa: f64,
    pub ising: f64,
}

impl SymmetricParams {
    pub fn new(n: u32, alpha: f64, kappa: f64, ising: f64) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        ensure_finite("kappa", kappa)?;
        ensure_finite("ising", ising)?;
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} is outside [−π/2, π/2]")));
        }
        Ok(Self { n, alpha, kappa, ising })
    }

    pub fn sector(&self) -> Sector {
        Sector::new(i64::from(self.n)).expect("n ≥ 0 is always a valid sector")
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams::symmetric(self.kappa, self.ising)
    }

    pub fn initial_state(&self) -> InitialState {
        InitialState::alpha_family(self.sector(), self.alpha).expect("α-family state is valid for n ≥ 0")
    }

    /// Same `n` and `α` without atom–atom interactions.
    pub fn non_interacting(&self) -> Self {
        Self { kappa: 0.0, ising: 0.0, ..*self }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    fn sin2a(&self) -> f64 {
        (2.0 * self.alpha).sin()
    }

    /// Frequency `J + 3κ` carried by `G`.
    pub fn interaction_frequency(&self) -> f64 {
        self.ising + 3.0 * self.kappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricConstants {
    pub omega: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn constants(p: &SymmetricParams) -> SymmetricConstants {
    let n = f64::from(p.n);
    let nn = 4.0 * n * n + 4.0 * n;
    SymmetricConstants {
        omega: (4.0 * n + 2.0 + (p.kappa - p.ising).powi(2)).sqrt(),
        beta: (nn / (nn + 1.0)).sqrt(),
        gamma: (6.0 * n * n + 6.0 * n + 2.0) / (nn + 1.0),
    }
}

/// `(F(t), G(t))`.
pub fn f_g(p: &SymmetricParams, t: f64) -> (f64, f64) {
    let SymmetricConstants { omega, .. } = constants(p);
    let n = f64::from(p.n);
    let (sw, cw) = (omega * t).sin_cos();
    let (sv, cv) = (p.interaction_frequency() * t).sin_cos();
    let f = (2.0 * n + 1.0) / (omega * omega) * (1.0 + p.sin2a()) * sw * sw;
    let g = (p.kappa - p.ising) * cv * sw / omega + sv * cw;
    (f, g)
}

/// Concurrence before clipping at zero.
pub fn closed_concurrence_argument(p: &SymmetricParams, t: f64) -> f64 {
    let (f, g) = f_g(p, t);
    let s = p.sin2a();
    let c2a = (2.0 * p.alpha).cos();
    ((s - f).powi(2) + c2a * c2a * g * g).sqrt() - constants(p).beta * f
}

/// Concurrence and purity at time `t` from the closed forms.
pub fn closed_cp_of_t(p: &SymmetricParams, t: f64) -> CPPoint {
    let (f, _) = f_g(p, t);
    let gamma = constants(p).gamma;
    CPPoint {
        purity: 1.0 - 2.0 * f + gamma * f * f,
        concurrence: closed_concurrence_argument(p, t).max(0.0),
    }
}

/// The two inversions `F = f±(P)` of `P = 1 − 2F + γF²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        }
    }
}

/// Closed interval `[lo, hi]` in purity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - ENDPOINT_SLACK && x <= self.hi + ENDPOINT_SLACK
    }
}

/// Largest value `F` reaches, `(2n+1)(1 + sin 2α)/ω²`.
fn f_max(p: &SymmetricParams) -> f64 {
    let SymmetricConstants { omega, .. } = constants(p);
    (2.0 * f64::from(p.n) + 1.0) * (1.0 + p.sin2a()) / (omega * omega)
}

/// Whether `F` passes the purity minimum at `1/γ` during the evolution.
///
/// For `κ = J = 0` this is `sin 2α > (n² + n)/(3n² + 3n + 1)`.
fn reaches_purity_floor(p: &SymmetricParams) -> bool {
    f_max(p) * constants(p).gamma >= 1.0 - ENDPOINT_SLACK
}

/// Purity interval on which a branch of the non-interacting curve is
/// traversed, if the branch appears at all.
pub fn branch_interval(p: &SymmetricParams, branch: Branch) -> Option<Interval> {
    let q = p.non_interacting();
    let gamma = constants(&q).gamma;
    let s = q.sin2a();
    let at_fmax = gamma * (1.0 + s).powi(2) / 4.0 - s;
    let floor = 1.0 - 1.0 / gamma;
    match (reaches_purity_floor(&q), branch) {
        (true, Branch::Minus) => Some(Interval { lo: floor, hi: 1.0 }),
        (true, Branch::Plus) => Some(Interval { lo: floor, hi: at_fmax }),
        (false, Branch::Minus) => Some(Interval { lo: at_fmax, hi: 1.0 }),
        (false, Branch::Plus) => None,
    }
}

/// `C±(P; α) = max{0, |sin 2α − f±(P)| − β f±(P)}` for `κ = J = 0`.
///
/// Only `n` and `α` of `p` are used. Fails outside `[1 − 1/γ, 1]`, where
/// `f±` is not real.
pub fn c_branch(p: &SymmetricParams, branch: Branch, purity: f64) -> Result<f64> {
    let SymmetricConstants { beta, gamma, .. } = constants(&p.non_interacting());
    let lo = 1.0 - 1.0 / gamma;
    if !(purity >= lo - ENDPOINT_SLACK && purity <= 1.0 + ENDPOINT_SLACK) {
        return Err(Error::Domain(format!("purity {purity} outside [{lo}, 1]")));
    }
    let root = (1.0 + gamma * (purity - 1.0)).max(0.0).sqrt();
    let f = match branch {
        Branch::Minus => (1.0 - root) / gamma,
        Branch::Plus => (1.0 + root) / gamma,
    };
    Ok(((p.sin2a() - f).abs() - beta * f).max(0.0))
}

/// A sampled curve in the CP-plane. `param` is whatever the curve is
/// parametrized by (purity, time, or the Werner weight).
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub interval: Interval,
    pub param: Vec<f64>,
    pub points: Vec<CPPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CPCurveSet {
    pub c_minus: Curve,
    pub c_plus: Option<Curve>,
    pub mems: Curve,
    pub werner: Curve,
    pub limit_minus: Curve,
    pub limit_plus: Curve,
}

impl CPCurveSet {
    pub fn curves(&self) -> impl Iterator<Item = &Curve> {
        [Some(&self.c_minus), self.c_plus.as_ref(), Some(&self.mems), Some(&self.werner)]
            .into_iter()
            .flatten()
            .chain([&self.limit_minus, &self.limit_plus])
    }
}

fn linspace(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let steps = samples.max(2) - 1;
    (0..=steps).map(move |k| {
        if k == steps {
            hi
        } else {
            lo + (hi - lo) * k as f64 / steps as f64
        }
    })
}

fn sample_curve(
    name: &str,
    interval: Interval,
    samples: usize,
    point: impl Fn(f64) -> Result<CPPoint>,
) -> Result<Curve> {
    let mut param = Vec::with_capacity(samples);
    let mut points = Vec::with_capacity(samples);
    for x in linspace(interval.lo, interval.hi, samples) {
        param.push(x);
        points.push(point(x)?);
    }
    Ok(Curve { name: name.to_owned(), interval, param, points })
}

/// Samples the non-interacting curves for `p` together with the MEMS
/// frontier, the Werner line and the large-`n` limit curves.
pub fn cp_curves(p: &SymmetricParams, samples: usize) -> Result<CPCurveSet> {
    if p.kappa != 0.0 || p.ising != 0.0 {
        return Err(Error::Domain("CP-plane curves exist only for κ = J = 0".into()));
    }
    let branch_curve = |branch: Branch, name: &str| -> Result<Option<Curve>> {
        branch_interval(p, branch)
            .map(|iv| {
                sample_curve(name, iv, samples, |purity| {
                    Ok(CPPoint { purity, concurrence: c_branch(p, branch, purity)? })
                })
            })
            .transpose()
    };
    let c_minus = branch_curve(Branch::Minus, "c_minus")?.expect("minus branch always exists");
    let c_plus = branch_curve(Branch::Plus, "c_plus")?;

    let mems = sample_curve("mems", Interval { lo: 0.25, hi: 1.0 }, samples, |purity| {
        Ok(CPPoint { purity, concurrence: mems_frontier(purity)? })
    })?;
    let werner = sample_curve("werner", Interval { lo: 0.0, hi: 1.0 }, samples, werner_line)?;
    let limit_minus = sample_curve("limit_minus", Interval { lo: 1.0 / 3.0, hi: 1.0 }, samples, |purity| {
        Ok(CPPoint { purity, concurrence: limit_curve_inf(purity)?.0 })
    })?;
    let limit_plus = sample_curve("limit_plus", Interval { lo: 1.0 / 3.0, hi: 0.5 }, samples, |purity| {
        let (_, plus) = limit_curve_inf(purity)?;
        Ok(CPPoint { purity, concurrence: plus.unwrap_or(0.0) })
    })?;
    Ok(CPCurveSet { c_minus, c_plus, mems, werner, limit_minus, limit_plus })
}

/// Minimum purity reached during the evolution.
///
/// `P(F)` is a parabola with vertex `1 − 1/γ` at `F = 1/γ`; if `F` reaches the
/// vertex the minimum is the floor, otherwise it is attained at the largest
/// `F`, i.e. at `t = π/(2ω)`.
pub fn p_min(p: &SymmetricParams) -> f64 {
    let SymmetricConstants { omega, gamma, .. } = constants(p);
    if reaches_purity_floor(p) {
        1.0 - 1.0 / gamma
    } else {
        closed_cp_of_t(p, PI / (2.0 * omega)).purity
    }
}

/// Concurrence of the maximally entangled mixed states at purity `P`.
pub fn mems_frontier(purity: f64) -> Result<f64> {
    if !(0.25 - ENDPOINT_SLACK..=1.0 + ENDPOINT_SLACK).contains(&purity) {
        return Err(Error::Domain(format!("purity {purity} outside [1/4, 1]")));
    }
    let c = if purity >= 5.0 / 9.0 {
        0.5 * (1.0 + (2.0 * purity - 1.0).sqrt())
    } else if purity >= 1.0 / 3.0 {
        (2.0 * (purity - 1.0 / 3.0)).sqrt()
    } else {
        0.0
    };
    Ok(c)
}

/// Werner state `ξ·I/4 + (1 − ξ)|Bell⟩⟨Bell|` in the CP-plane.
pub fn werner_line(xi: f64) -> Result<CPPoint> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("Werner weight {xi} outside [0, 1]")));
    }
    Ok(CPPoint {
        purity: 3.0 * xi * xi / 16.0 + (1.0 - 0.75 * xi).powi(2),
        concurrence: (1.0 - 1.5 * xi).max(0.0),
    })
}

/// Large-`n` limit of `C±(P; π/4)`. The plus branch only exists for
/// `P ≤ 1/2`.
pub fn limit_curve_inf(purity: f64) -> Result<(f64, Option<f64>)> {
    if !(1.0 / 3.0 - ENDPOINT_SLACK..=1.0 + ENDPOINT_SLACK).contains(&purity) {
        return Err(Error::Domain(format!("purity {purity} outside [1/3, 1]")));
    }
    let minus = (((24.0 * purity - 8.0).max(0.0).sqrt() - 1.0) / 3.0).max(0.0);
    let plus = (purity <= 0.5 + ENDPOINT_SLACK).then_some(0.0);
    Ok((minus, plus))
}

/// Smallest `T > 0` after which the CP trajectory repeats, when `ω` and
/// `J + 3κ` are commensurate with a ratio whose denominator is at most
/// `max_denominator`.
///
/// `F` has period `π/ω`; `G²` repeats once both `ωT` and `(J + 3κ)T` are
/// multiples of `π`.
pub fn revival_time(p: &SymmetricParams, max_denominator: u64) -> Option<f64> {
    let omega = constants(p).omega;
    let nu = p.interaction_frequency().abs();
    let ratio = nu / omega;
    let (_, den) = rational_approximation(ratio, max_denominator)?;
    Some(den as f64 * PI / omega)
}

/// Continued-fraction convergent `num/den` matching `x` to 1e−12 relative.
fn rational_approximation(x: f64, max_denominator: u64) -> Option<(u64, u64)> {
    if x == 0.0 {
        return Some((0, 1));
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a > u64::MAX as f64 / 2.0 {
            return None;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_denominator {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-12 * x.max(1.0) {
            return Some((h1, k1));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn sp(n: u32, alpha: f64, kappa: f64, ising: f64) -> SymmetricParams {
        SymmetricParams::new(n, alpha, kappa, ising).unwrap()
    }

    #[test]
    fn constants_examples() {
        let c = constants(&sp(0, 0.3, 0.0, 0.0));
        assert_eq!(c, SymmetricConstants { omega: 2f64.sqrt(), beta: 0.0, gamma: 2.0 });
        let c = constants(&sp(5, 0.3, 1.7, 1.7));
        assert_eq!(c.omega, 22f64.sqrt());
        assert!((c.beta - (120.0f64 / 121.0).sqrt()).abs() < 1e-15);
        assert!((c.gamma - 182.0 / 121.0).abs() < 1e-15);
    }

    #[test]
    fn f_g_examples() {
        assert_eq!(f_g(&sp(3, 0.2, 0.5, 1.0), 0.0), (0.0, 0.0));
        let t = PI / (2.0 * 2f64.sqrt());
        let (f, g) = f_g(&sp(0, FRAC_PI_4, 0.0, 0.0), t);
        assert!((f - 1.0).abs() < 1e-15);
        assert_eq!(g, 0.0);
        let p = sp(2, 0.4, 0.8, 0.8);
        let omega = constants(&p).omega;
        let t = 1.3;
        let (_, g) = f_g(&p, t);
        assert!((g - (3.2 * t).sin() * (omega * t).cos()).abs() < 1e-15);
    }

    #[test]
    fn closed_cp_at_zero() {
        let p = sp(4, -0.3, 1.0, 0.2);
        let pt = closed_cp_of_t(&p, 0.0);
        assert_eq!(pt.purity, 1.0);
        assert!((pt.concurrence - (0.6f64).sin().abs()).abs() < 1e-15);
    }

    #[test]
    fn bell_n0_closed_forms() {
        let p = sp(0, FRAC_PI_4, 0.0, 0.0);
        for k in 0..200 {
            let t = k as f64 * 0.037;
            let s2 = (2f64.sqrt() * t).sin().powi(2);
            let pt = closed_cp_of_t(&p, t);
            assert!((pt.concurrence - (2f64.sqrt() * t).cos().powi(2)).abs() < 1e-14);
            assert!((pt.purity - (1.0 - 2.0 * s2 + 2.0 * s2 * s2)).abs() < 1e-14);
        }
        assert_eq!(p_min(&p), 0.5);
    }

    #[test]
    fn bell_n0_curves() {
        let p = sp(0, FRAC_PI_4, 0.0, 0.0);
        assert_eq!(branch_interval(&p, Branch::Minus), Some(Interval { lo: 0.5, hi: 1.0 }));
        assert_eq!(branch_interval(&p, Branch::Plus), Some(Interval { lo: 0.5, hi: 1.0 }));
        for k in 0..=50 {
            let purity = 0.5 + k as f64 / 100.0;
            let root = (2.0 * purity - 1.0).sqrt();
            assert!((c_branch(&p, Branch::Minus, purity).unwrap() - 0.5 * (1.0 + root)).abs() < 1e-15);
            assert!((c_branch(&p, Branch::Plus, purity).unwrap() - 0.5 * (1.0 - root)).abs() < 1e-15);
        }
        assert_eq!(c_branch(&p, Branch::Minus, 1.0).unwrap(), 1.0);
        assert!(matches!(c_branch(&p, Branch::Minus, 0.4), Err(Error::Domain(_))));
    }

    #[test]
    fn small_alpha_has_single_branch_for_n5() {
        // (1/2) arcsin(30/91) ≈ 0.168 > π/20
        let p = sp(5, PI / 20.0, 0.0, 0.0);
        assert!(branch_interval(&p, Branch::Plus).is_none());
        let iv = branch_interval(&p, Branch::Minus).unwrap();
        let s = (PI / 10.0).sin();
        let gamma = constants(&p).gamma;
        assert!((iv.lo - (gamma * (1.0 + s).powi(2) / 4.0 - s)).abs() < 1e-15);
        let q = sp(0, PI / 20.0, 0.0, 0.0);
        assert!(branch_interval(&q, Branch::Plus).is_some());
    }

    #[test]
    fn cp_curves_requires_no_interaction() {
        assert!(matches!(cp_curves(&sp(0, 0.3, 1.5, 0.0), 10), Err(Error::Domain(_))));
        let set = cp_curves(&sp(0, FRAC_PI_4, 0.0, 0.0), 11).unwrap();
        assert_eq!(set.curves().count(), 6);
        assert_eq!(set.c_minus.points.len(), 11);
        assert_eq!(set.c_minus.points[10].concurrence, 1.0);
    }

    #[test]
    fn p_min_regimes() {
        let p = sp(0, PI / 20.0, 1.5, 0.0);
        let omega2: f64 = 2.0 + 2.25;
        assert_eq!(constants(&p).omega, omega2.sqrt());
        let expect = closed_cp_of_t(&p, PI / (2.0 * omega2.sqrt())).purity;
        assert_eq!(p_min(&p), expect);
        assert!(expect > 0.5);

        let p = sp(0, PI / 10.0, 1.5, 0.87);
        assert_eq!(p_min(&p), 0.5);
    }

    #[test]
    fn mems_examples() {
        assert_eq!(mems_frontier(1.0).unwrap(), 1.0);
        assert!((mems_frontier(5.0 / 9.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(mems_frontier(1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(mems_frontier(0.3).unwrap(), 0.0);
        assert!(mems_frontier(0.2).is_err());
        assert!(mems_frontier(1.1).is_err());
    }

    #[test]
    fn werner_examples() {
        assert_eq!(werner_line(0.0).unwrap(), CPPoint { purity: 1.0, concurrence: 1.0 });
        assert_eq!(werner_line(1.0).unwrap(), CPPoint { purity: 0.25, concurrence: 0.0 });
        let w = werner_line(2.0 / 3.0).unwrap();
        assert!((w.purity - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(w.concurrence, 0.0);
        assert!(werner_line(-0.1).is_err());
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_curve_inf(1.0).unwrap(), (1.0, None));
        assert_eq!(limit_curve_inf(0.375).unwrap(), (0.0, Some(0.0)));
        assert!(limit_curve_inf(0.3).is_err());
    }

    #[test]
    fn revival_of_commensurate_case() {
        let k = 5.0 * 22f64.sqrt();
        let p = sp(5, -PI / 20.0, k, k);
        let t = revival_time(&p, 1000).unwrap();
        assert!((t - PI / 22f64.sqrt()).abs() < 1e-15);
        assert!(revival_time(&sp(0, 0.1, 1.5, 0.0), 1000).is_none());
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        assert!(SymmetricParams::new(0, 2.0, 0.0, 0.0).is_err());
    }
}
