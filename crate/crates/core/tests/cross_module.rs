use num_traits::{One, Zero};
use proptest::prelude::*;

use selfsim_core::automaton::catalog;
use selfsim_core::dynamics::{
    cesaro_average, indicator, markov_stationarity, LabelSource, LazyWreathElement, LetterDistribution,
};
use selfsim_core::haar::{cone_measure, preimage_count, singleton_cones};
use selfsim_core::nucleus::{classify_element, cyclicity_certificate, Verdict};
use selfsim_core::quotients::{closure_of_word, is_fractal_at_depth, AutomatonGroup, WreathGroup, DEFAULT_CAP};
use selfsim_core::{ConeSpec, Group, PermGroup, Portrait, Rational, Vertex};

fn grigorchuk() -> Group {
    Group::new(
        AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap(),
        DEFAULT_CAP,
    )
}

#[test]
fn certified_non_finitary_words_are_cyclic_on_slices() {
    let aut = catalog("grigorchuk").unwrap();
    assert_eq!(
        cyclicity_certificate(&aut, 512, 64).unwrap().verdict,
        Verdict::Certified
    );
    let group = grigorchuk();
    for word in ["b", "c", "d", "ab", "bada"] {
        let w = aut.parse_word(word).unwrap();
        let class = classify_element(&aut, &w, 512, 64).unwrap();
        let closure = closure_of_word(&aut, &w, 3, DEFAULT_CAP).unwrap();
        let slice = group.slice(3).unwrap();
        if class.finitary {
            assert!(closure.order() <= slice.order(), "{word}");
        } else {
            assert_eq!(closure.order(), slice.order(), "{word}");
        }
    }
}

#[test]
fn stationarity_follows_fractality() {
    let dist = LetterDistribution::uniform(2);
    for group in [
        grigorchuk(),
        Group::new(WreathGroup::new(PermGroup::symmetric(2).unwrap()).unwrap(), DEFAULT_CAP),
    ] {
        for n in 1..=2 {
            assert!(is_fractal_at_depth(&group, 0, n + 1).unwrap().holds);
            let slice = group.slice(n + 1).unwrap();
            for cone in singleton_cones(group.slice(n).unwrap().elements().cloned()) {
                assert!(markov_stationarity(&indicator(&cone), n, &slice, &dist).unwrap().holds);
            }
        }
    }
}

#[test]
fn preimage_counts_partition_the_slice() {
    let group = grigorchuk();
    let slice = group.slice(3).unwrap();
    let cones = singleton_cones(group.slice(2).unwrap().elements().cloned());
    for v in Vertex::level(2, 1) {
        let total: usize = cones.iter().map(|b| preimage_count(&slice, &v, b).unwrap()).sum();
        assert_eq!(total, slice.order());
    }
    let measures: Rational = cones
        .iter()
        .map(|c| cone_measure(c, &group.slice(2).unwrap()).unwrap())
        .sum();
    assert!(measures.is_one());
}

/// Direct sum over every vertex up to level `k`, reading sections from a
/// materialised portrait.
fn brute_cesaro(g: &Portrait, cone: &ConeSpec, k: usize) -> Rational {
    let m = g.arity();
    let mut total = Rational::zero();
    for v in Vertex::up_to(m, k) {
        if cone.contains(&g.section_truncated(&v, cone.depth()).unwrap()) {
            total += Rational::new(1.into(), (m.pow(v.len() as u32)).into());
        }
    }
    total / Rational::from_integer(k.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cesaro_matches_direct_sum(seed in any::<u64>(), trial in 0u64..8, n_max in 1usize..6) {
        let h = PermGroup::symmetric(2).unwrap();
        let lazy = LazyWreathElement::new(h, seed, trial);
        let cone = ConeSpec::stabilizer(2, 1);
        let report = cesaro_average(&lazy, &cone, n_max, &LetterDistribution::uniform(2)).unwrap();
        let g = lazy.portrait(n_max + 1).unwrap();
        for k in 1..=n_max {
            prop_assert_eq!(&report.exact[k - 1], &brute_cesaro(&g, &cone, k));
        }
        let fixed = cesaro_average(&g, &cone, n_max, &LetterDistribution::uniform(2)).unwrap();
        prop_assert_eq!(fixed.exact, report.exact);
        prop_assert_eq!(lazy.available_depth(), None);
    }
}
