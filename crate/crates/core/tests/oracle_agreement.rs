//! Cross-checks between the optimization over the efficient set and
//! brute-force enumeration.

use omega_core::oes::{omega_parallel, variable_bounds, OmegaProblem};
use omega_core::oracle::{minimals_of_z, minimals_of_z_with_margin};
use omega_core::{omega, omega_j, BoundMode, NumericalSemigroup, OmegaOptions};
use proptest::prelude::*;

fn semigroup(max_gen: u64) -> impl Strategy<Value = NumericalSemigroup> {
    prop::collection::vec(2u64..=max_gen, 2..=4).prop_filter_map("not a minimal system", |g| {
        NumericalSemigroup::new(&g).ok().filter(|s| s.embedding_dimension() == g.len())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    /// No minimal element lies outside the tight box: enlarging every
    /// coordinate up to the loose cap finds nothing new.
    #[test]
    fn tight_box_contains_every_minimal_element(s in semigroup(40), j in 0usize..4) {
        let j = j % s.embedding_dimension();
        let cap = variable_bounds(&s).into_iter().max().unwrap();
        prop_assert_eq!(minimals_of_z(&s, j).unwrap(), minimals_of_z_with_margin(&s, j, cap).unwrap());
    }

    #[test]
    fn algorithm_run_invariants(s in semigroup(50), j in 0usize..4, loose in any::<bool>()) {
        let j = j % s.embedding_dimension();
        let bound_mode = if loose { BoundMode::Loose } else { BoundMode::Tight };
        let options = OmegaOptions { bound_mode, ..OmegaOptions::default() };
        let r = omega_j(&s, j, &options).unwrap();
        let minimals = minimals_of_z(&s, j).unwrap();

        prop_assert_eq!(r.omega, minimals.iter().map(|x| x.length()).max().unwrap());
        prop_assert_eq!(r.witness.length(), r.omega);
        prop_assert!(r.minimals_found.contains(&r.witness));
        prop_assert!(r.minimals_found.iter().all(|x| minimals.contains(x)));
        prop_assert!(r.ek_solves <= minimals.len());
        prop_assert_eq!(r.ek_solves, r.minimals_found.len());
        prop_assert_eq!(r.iterations, r.trace.len());

        let problem = OmegaProblem::new(&s, j, &options).unwrap();
        for (k, rec) in r.trace.iter().enumerate() {
            prop_assert_eq!(rec.iteration, k + 1);
            prop_assert!(rec.ek_point.le_componentwise(&rec.start_point));
            prop_assert!(problem.is_feasible(&rec.start_point));
            prop_assert!(rec.lower <= rec.upper || rec.nw_point.is_none());
            if k > 0 {
                prop_assert!(r.trace[k - 1].lower <= rec.lower);
                prop_assert_eq!(r.trace[k - 1].nw_point.as_ref(), Some(&rec.start_point));
            }
        }
    }

    #[test]
    fn parallel_and_sequential_agree(s in semigroup(50), jobs in 2usize..5) {
        let options = OmegaOptions::default();
        prop_assert_eq!(omega(&s, &options).unwrap(), omega_parallel(&s, &options, jobs).unwrap());
    }
}

#[test]
fn worked_example_end_to_end() {
    let s = NumericalSemigroup::new(&[6, 13, 14]).unwrap();
    let (best, per) = omega(&s, &OmegaOptions::default()).unwrap();
    assert_eq!(best, 9);
    assert_eq!(per.iter().map(|r| r.omega).collect::<Vec<_>>(), vec![3, 9, 7]);
    for r in &per {
        assert_eq!(r.omega, minimals_of_z(&s, r.index).unwrap().iter().map(|x| x.length()).max().unwrap());
    }
}
