use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::sample::select;
use serde_json::json;

use stargroup::checks::{morphism_adjunction_report, presheaf_adjunction_report};
use stargroup::gen::random_presheaves;
use stargroup::io::{parse_semigroup, to_pretty, SemigroupDoc};
use stargroup::oracle::naive::{naive_check, NAIVE_STATEMENTS};
use stargroup::oracle::{all_star_semigroups, standard_family};
use stargroup::report::{Report, Row};
use stargroup::site::as_inverse;
use stargroup::statements::main_verdict;
use stargroup::topos::{gamma, lambda, GammaOptions, Strategy as GammaStrategy};
use stargroup::{classify, StarSemigroup};

fn population() -> &'static [StarSemigroup] {
    static ALL: OnceLock<Vec<StarSemigroup>> = OnceLock::new();
    ALL.get_or_init(|| (1..=4).flat_map(|n| all_star_semigroups(n).unwrap()).collect())
}

fn relabel(x: &StarSemigroup, p: &[usize]) -> StarSemigroup {
    let n = x.order();
    let mut mul = vec![vec![0; n]; n];
    let mut star = vec![0; n];
    for a in 0..n {
        star[p[a]] = p[x.star(a)];
        for b in 0..n {
            mul[p[a]][p[b]] = p[x.mul(a, b)];
        }
    }
    StarSemigroup::new(None, mul, star).unwrap()
}

fn relabeled() -> impl Strategy<Value = StarSemigroup> {
    (0..population().len())
        .prop_flat_map(|i| {
            let n = population()[i].order();
            (Just(i), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(i, p)| relabel(&population()[i], &p))
}

fn flags(x: &StarSemigroup) -> Vec<bool> {
    classify(x).flags().iter().map(|(_, f)| f.holds).collect()
}

fn bases() -> Vec<Arc<StarSemigroup>> {
    vec![
        Arc::new(standard_family("semilattice_chain", 2).unwrap()),
        Arc::new(standard_family("semilattice_chain", 3).unwrap()),
        Arc::new(standard_family("symmetric_inverse", 2).unwrap()),
        Arc::new(standard_family("brandt", 2).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_invariant_under_relabeling(i in 0..population().len(), seed in any::<u64>()) {
        let x = &population()[i];
        let mut p: Vec<usize> = (0..x.order()).collect();
        let k = p.len();
        p.rotate_left((seed as usize) % k);
        prop_assert_eq!(flags(x), flags(&relabel(x, &p)));
    }

    #[test]
    fn opposite_swaps_sides(x in relabeled()) {
        let (c, o) = (classify(&x), classify(&x.opposite()));
        prop_assert_eq!(c.restrictive.holds, o.corestrictive.holds);
        prop_assert_eq!(c.left_involutive.holds, o.right_involutive.holds);
        prop_assert_eq!(c.involutive.holds, o.involutive.holds);
        prop_assert_eq!(c.inverse.holds, o.inverse.holds);
    }

    #[test]
    fn naive_agrees_off_canonical_labels(x in relabeled(), k in 0..NAIVE_STATEMENTS.len()) {
        let id = NAIVE_STATEMENTS[k];
        let n = x.order();
        let mul = x.mul_table();
        prop_assert_eq!(main_verdict(id, &x).unwrap(), naive_check(id, n, mul, x.star_table()).unwrap());
        prop_assert!(main_verdict(id, &x).unwrap(), "{} fails", id);
    }

    #[test]
    fn semigroup_text_round_trip(x in relabeled()) {
        let text = to_pretty(&SemigroupDoc::from(&x)).unwrap();
        let back = parse_semigroup(&text).unwrap();
        prop_assert_eq!(back.mul_table(), x.mul_table());
        prop_assert_eq!(back.star_table(), x.star_table());
        prop_assert_eq!(to_pretty(&SemigroupDoc::from(&back)).unwrap(), text);
    }

    #[test]
    fn random_presheaves_satisfy_the_adjunction(b in 0..4usize, seed in any::<u64>()) {
        let base = as_inverse(&bases()[b]).unwrap();
        let p = random_presheaves(&base, 1, 3, seed).unwrap().pop().unwrap();
        let r = presheaf_adjunction_report("p", &p, GammaOptions::default()).unwrap();
        prop_assert!(r.passed(), "{}", r.to_text());
        let lam = lambda(&p).unwrap();
        let m = morphism_adjunction_report("Λ(P)", &lam.structure, GammaOptions::default()).unwrap();
        prop_assert!(m.passed(), "{}", m.to_text());
        let both = gamma(&lam.structure, &base, GammaOptions { strategy: GammaStrategy::Both, ..Default::default() });
        prop_assert!(both.is_ok());
    }

    #[test]
    fn report_json_round_trip(rows in prop::collection::vec(("[a-z-]{1,12}", "[a-z0-9 ]{0,8}", any::<bool>(), prop::option::of(select(vec![json!([1, 2]), json!("w"), json!({"k": 0})]))), 0..6)) {
        let r = Report { rows: rows.into_iter().map(|(check, instance, pass, witness)| Row { check, instance, pass, witness }).collect() };
        let text = r.to_json().unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }
}
