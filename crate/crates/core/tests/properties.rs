//! Randomized structural properties.

use std::f64::consts::FRAC_PI_2;

use cavity_duo::entanglement::{concurrence_wootters, cp_point};
use cavity_duo::model::{build_block, ModelParams, Sector};
use cavity_duo::symmetric::{closed_cp_of_t, mems_frontier, SymmetricParams};
use cavity_duo::{evolve, reduced_density, InitialState};
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    prop::array::uniform6(-2.0..2.0_f64).prop_map(|[a, b, c, d, e, f]| ModelParams::new(a, b, c, d, e, f))
}

fn state(n: i64) -> impl Strategy<Value = InitialState> {
    prop::array::uniform8(-1.0..1.0_f64)
        .prop_filter("nonzero", |x| x.iter().any(|v| v.abs() > 1e-3))
        .prop_map(move |x| {
            let sector = Sector::new(n).unwrap();
            let mut b = [Complex64::new(0.0, 0.0); 4];
            for k in 0..sector.dim() {
                b[k] = Complex64::new(x[2 * k], x[2 * k + 1]);
            }
            let norm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            InitialState::new(sector, b.map(|z| z / norm)).unwrap()
        })
}

fn any_sector_state() -> impl Strategy<Value = InitialState> {
    (-1_i64..8).prop_flat_map(state)
}

proptest! {
    #[test]
    fn blocks_are_symmetric_and_traceless(p in params(), n in -1_i64..30) {
        let b = build_block(&p, Sector::new(n).unwrap()).unwrap();
        for j in 0..b.dim() {
            for k in 0..b.dim() {
                prop_assert_eq!(b.get(j, k), b.get(k, j));
            }
        }
        // Only the full 4×4 blocks have cancelling diagonals.
        if n >= 1 {
            prop_assert!(b.trace().abs() < 1e-12 * (1.0 + b.max_abs()));
        }
    }

    #[test]
    fn evolution_is_unitary_and_composes(
        p in params(),
        init in any_sector_state(),
        t1 in -5.0..5.0_f64,
        t2 in -5.0..5.0_f64,
    ) {
        let a = evolve(&p, &init, t1).unwrap();
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        let two_step = evolve(&p, &a.as_initial(), t2).unwrap();
        let direct = evolve(&p, &init, t1 + t2).unwrap();
        for k in 0..4 {
            prop_assert!((two_step.b[k] - direct.b[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn entanglement_measures_are_bounded(p in params(), init in any_sector_state(), t in 0.0..20.0_f64) {
        let s = evolve(&p, &init, t).unwrap();
        let cp = cp_point(&s);
        prop_assert!(cp.purity >= 0.25 - 1e-12 && cp.purity <= 1.0 + 1e-12);
        prop_assert!(cp.concurrence >= 0.0 && cp.concurrence <= 1.0 + 1e-12);
        prop_assert!(cp.concurrence <= mems_frontier(cp.purity.max(0.25)).unwrap() + 1e-9);
        let general = concurrence_wootters(&reduced_density(&s).rho).unwrap();
        prop_assert!((general - cp.concurrence).abs() < 1e-10);
    }

    #[test]
    fn closed_form_respects_the_frontier(
        n in 0_u32..20,
        alpha in -FRAC_PI_2..FRAC_PI_2,
        kappa in -2.0..2.0_f64,
        ising in -2.0..2.0_f64,
        t in 0.0..20.0_f64,
    ) {
        let p = SymmetricParams::new(n, alpha, kappa, ising).unwrap();
        let cp = closed_cp_of_t(&p, t);
        prop_assert!(cp.concurrence <= mems_frontier(cp.purity.max(0.25)).unwrap() + 1e-9);
    }
}
