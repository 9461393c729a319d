mod common;

use cirsolve::classify::{classify, Problem};
use cirsolve::engine::{self, SolveOptions, Solver};
use cirsolve::model::AttrSet;
use cirsolve::oracle_enumerate;
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64) -> common::Instance {
    let mut rng = common::rng(seed);
    let class = common::FdClass::ALL[rng.gen_range(0..common::FdClass::ALL.len())];
    common::random_instance(&mut rng, class)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn closure_laws(seed in any::<u64>(), x in 0u64..16, y in 0u64..16) {
        let f = instance(seed).fds;
        let n = f.schema().len() as u32;
        let (x, y) = (AttrSet::from_bits(x % (1 << n)), AttrSet::from_bits(y % (1 << n)));
        let cx = f.closure(x);
        prop_assert!(x.is_subset(cx));
        prop_assert_eq!(f.closure(cx), cx);
        prop_assert!(cx.is_subset(f.closure(x.union(y))));
        // A smaller FD set derives less.
        let fewer = f.subset(f.fds().iter().skip(1).copied());
        prop_assert!(fewer.closure(x).is_subset(cx));
    }

    #[test]
    fn normalize_and_decompose_preserve_satisfaction(seed in any::<u64>()) {
        let inst = instance(seed);
        let normal = inst.fds.normalize();
        let parts = inst.fds.decompose();
        for (r, _) in common::all_worlds(&inst.cir).into_iter().take(256) {
            let sat = common::naive_satisfies(&r, &inst.fds);
            prop_assert_eq!(inst.fds.satisfied_by(&r).unwrap(), sat);
            prop_assert_eq!(normal.satisfied_by(&r).unwrap(), sat);
            let by_parts = parts.components.iter().all(|c| c.satisfied_by(&r).unwrap());
            prop_assert_eq!(by_parts, sat);
        }
        let uncertain = inst.fds.schema().uncertain();
        for (i, a) in parts.components.iter().enumerate() {
            for b in &parts.components[i + 1..] {
                prop_assert!(a.attrs().intersection(b.attrs()).intersection(uncertain).is_empty());
            }
        }
    }

    #[test]
    fn poly_verdicts_agree_with_the_oracle(seed in any::<u64>()) {
        let inst = instance(seed);
        let c = classify(&inst.fds);
        let oracle = oracle_enumerate(&inst.cir, &inst.fds).unwrap();
        let poly = SolveOptions::with_solver(Solver::Poly);
        for p in [Problem::Possibility, Problem::Mpd] {
            if c.verdict(p).plan.is_poly() {
                let m = engine::most_probable(&inst.cir, &inst.fds, &poly).unwrap().value;
                prop_assert_eq!(m.map(|m| m.probability), oracle.max.as_ref().map(|m| m.probability.clone()));
            }
        }
        if c.probability.plan.is_poly() {
            prop_assert_eq!(engine::probability(&inst.cir, &inst.fds, &poly).unwrap().value, oracle.total.clone());
        }
        // Every verdict carries a plan that runs.
        let auto = SolveOptions::default();
        prop_assert_eq!(engine::probability(&inst.cir, &inst.fds, &auto).unwrap().value, oracle.total);
    }
}
