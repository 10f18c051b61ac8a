//! Haar measure on congruence quotients: uniform sampling, cone measures
//! and exact counting checks of the fiber and mixing identities.

use std::collections::HashSet;
use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::quotients::{ConeSpec, GroupSlice};
use crate::tree::{vertex_count, Portrait, Vertex};
use crate::Rational;

/// Name of the generator behind every sampler, for report metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64 + stream";

#[derive(Clone, Debug)]
pub enum SamplerSource {
    /// Independent uniform labels from `H` at every vertex.
    WreathPortrait(PermGroup),
    /// Uniform over an enumerated quotient.
    SliceUniform(Arc<GroupSlice>),
}

/// Draws portraits distributed as the pushforward of Haar measure.
#[derive(Clone, Debug)]
pub struct HaarSampler {
    source: SamplerSource,
    seed: u64,
    rng: ChaCha8Rng,
}

impl HaarSampler {
    pub fn new(source: SamplerSource, seed: u64) -> HaarSampler {
        HaarSampler::with_stream(source, seed, 0)
    }

    /// Independent sampler for worker `stream` under the same seed.
    pub fn with_stream(source: SamplerSource, seed: u64, stream: u64) -> HaarSampler {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        HaarSampler { source, seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn arity(&self) -> usize {
        match &self.source {
            SamplerSource::WreathPortrait(h) => h.degree(),
            SamplerSource::SliceUniform(s) => s.arity(),
        }
    }

    fn random_labels(&mut self, h: &PermGroup, count: usize) -> Vec<u8> {
        let elements = h.elements();
        let mut out = Vec::with_capacity(count * h.degree());
        for _ in 0..count {
            out.extend_from_slice(elements[self.rng.random_range(0..elements.len())].images());
        }
        out
    }

    /// A uniform element of `G_n`.
    pub fn sample(&mut self, depth: usize) -> Result<Portrait> {
        match self.source.clone() {
            SamplerSource::WreathPortrait(h) => {
                let labels = self.random_labels(&h, vertex_count(h.degree(), depth));
                Ok(Portrait::from_raw(h.degree(), depth, labels.into_boxed_slice()))
            }
            SamplerSource::SliceUniform(s) => {
                if depth > s.depth() {
                    return Err(Error::DepthTooLarge {
                        requested: depth,
                        available: s.depth(),
                    });
                }
                let i = self.rng.random_range(0..s.order());
                s.element(i).truncate(depth)
            }
        }
    }

    /// A uniform element of the fiber over `g` in `G_depth`: the same Haar
    /// draw observed at a deeper level.
    pub fn refine(&mut self, g: &Portrait, depth: usize) -> Result<Portrait> {
        if depth < g.depth() {
            return g.truncate(depth);
        }
        match self.source.clone() {
            SamplerSource::WreathPortrait(h) => {
                let extra = vertex_count(h.degree(), depth) - vertex_count(h.degree(), g.depth());
                let mut labels = g.raw_labels().to_vec();
                labels.extend(self.random_labels(&h, extra));
                Ok(Portrait::from_raw(h.degree(), depth, labels.into_boxed_slice()))
            }
            SamplerSource::SliceUniform(s) => {
                if depth > s.depth() {
                    return Err(Error::DepthTooLarge {
                        requested: depth,
                        available: s.depth(),
                    });
                }
                let fiber: Vec<&Portrait> = s
                    .elements()
                    .filter(|x| x.truncate(g.depth()).map(|t| &t == g).unwrap_or(false))
                    .collect();
                if fiber.is_empty() {
                    return Err(Error::PatternOutsideSlice(g.depth()));
                }
                let i = self.rng.random_range(0..fiber.len());
                fiber[i].truncate(depth)
            }
        }
    }
}

/// `μ(C_A) = #A / |G_n|`.
pub fn cone_measure(cone: &ConeSpec, slice: &GroupSlice) -> Result<Rational> {
    cone.check_in(slice)?;
    Ok(Rational::new(cone.len().into(), slice.order().into()))
}

/// The depth-`k` quotient as a set, obtained from a deeper slice.
fn quotient_at(slice: &GroupSlice, k: usize) -> Result<HashSet<Portrait>> {
    slice.truncation(k)
}

fn check_patterns(cone: &ConeSpec, quotient: &HashSet<Portrait>) -> Result<()> {
    if cone.patterns().iter().any(|p| !quotient.contains(p)) {
        return Err(Error::PatternOutsideSlice(cone.depth()));
    }
    Ok(())
}

/// `#{g ∈ G_{n+m} : g|_v^m ∈ B}` where `n = |v|` and `m` is the depth of `B`.
pub fn preimage_count(slice: &GroupSlice, v: &Vertex, b: &ConeSpec) -> Result<usize> {
    let m = b.depth();
    if v.len() + m > slice.depth() {
        return Err(Error::DepthTooLarge {
            requested: v.len() + m,
            available: slice.depth(),
        });
    }
    let counts: Vec<bool> = (0..slice.order())
        .into_par_iter()
        .map(|i| Ok(b.contains(&slice.element(i).section_truncated(v, m)?)))
        .collect::<Result<_>>()?;
    Ok(counts.into_iter().filter(|&x| x).count())
}

/// `|G : st_G(v)| · |ker φ_v^m : St_G(n+m)|`, computed from the stabilizer
/// subgroups of the `(n+m)`-slice.
pub fn fiber_lemma_rhs(slice: &GroupSlice, v: &Vertex, m: usize) -> Result<usize> {
    let stab = slice.vertex_stabilizer(v)?;
    let identity = Portrait::identity(slice.arity(), m);
    let mut kernel = 0;
    for &i in &stab {
        if slice.element(i).section_truncated(v, m)? == identity {
            kernel += 1;
        }
    }
    Ok(slice.order() / stab.len() * kernel)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check {
    Holds { value: String },
    Fails { lhs: String, rhs: String },
}

impl Check {
    fn compare(lhs: &Rational, rhs: &Rational) -> Check {
        if lhs == rhs {
            Check::Holds { value: lhs.to_string() }
        } else {
            Check::Fails {
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingReport {
    pub vertex: String,
    pub count: usize,
    pub order: usize,
    pub lhs: String,
    pub mu_a: String,
    pub mu_b: String,
    pub check: Check,
}

/// Compares `μ(C_A ∩ T_v⁻¹(C_B))` with `μ(C_A) μ(C_B)` on the slice of depth
/// `n + m`, where `A` has depth `n = |v|` and `B` depth `m`.
pub fn exact_mixing_check(slice: &GroupSlice, a: &ConeSpec, b: &ConeSpec, v: &Vertex) -> Result<MixingReport> {
    let (n, m) = (a.depth(), b.depth());
    if v.len() != n {
        return Err(Error::Invalid(format!("vertex {v} is not on level {n}")));
    }
    if slice.depth() != n + m {
        return Err(Error::DepthTooLarge {
            requested: n + m,
            available: slice.depth(),
        });
    }
    let gn = quotient_at(slice, n)?;
    let gm = quotient_at(slice, m)?;
    check_patterns(a, &gn)?;
    check_patterns(b, &gm)?;
    let hits: Vec<bool> = (0..slice.order())
        .into_par_iter()
        .map(|i| {
            let g = slice.element(i);
            Ok(a.contains(&g.truncate(n)?) && b.contains(&g.section_truncated(v, m)?))
        })
        .collect::<Result<_>>()?;
    let count = hits.into_iter().filter(|&x| x).count();
    let lhs = Rational::new(count.into(), slice.order().into());
    let mu_a = Rational::new(a.len().into(), gn.len().into());
    let mu_b = Rational::new(b.len().into(), gm.len().into());
    let rhs = &mu_a * &mu_b;
    Ok(MixingReport {
        vertex: v.to_string_for(slice.arity()),
        count,
        order: slice.order(),
        lhs: lhs.to_string(),
        mu_a: mu_a.to_string(),
        mu_b: mu_b.to_string(),
        check: Check::compare(&lhs, &rhs),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub vertex: String,
    pub m: usize,
    /// `#{g : g|_v^m = 1}` in the slice.
    pub count: usize,
    /// The same number from stabilizer indices.
    pub lemma_rhs: usize,
    pub order: usize,
    pub quotient_order: usize,
    pub check: Check,
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.check.holds() && self.count == self.lemma_rhs
    }
}

/// `μ(T_v⁻¹(St(m))) = μ(St(m))`, i.e. `count / |G_{n+m}| = 1 / |G_m|`.
pub fn measure_preservation_check(slice: &GroupSlice, v: &Vertex, m: usize) -> Result<PreservationReport> {
    let stab = ConeSpec::stabilizer(slice.arity(), m);
    let count = preimage_count(slice, v, &stab)?;
    let lemma_rhs = fiber_lemma_rhs(slice, v, m)?;
    let quotient_order = quotient_at(slice, m)?.len();
    let lhs = Rational::new(count.into(), slice.order().into());
    let rhs = Rational::one() / Rational::from_integer(quotient_order.into());
    Ok(PreservationReport {
        vertex: v.to_string_for(slice.arity()),
        m,
        count,
        lemma_rhs,
        order: slice.order(),
        quotient_order,
        check: Check::compare(&lhs, &rhs),
    })
}

/// Singleton cones over every element of a quotient.
pub fn singleton_cones(quotient: impl IntoIterator<Item = Portrait>) -> Vec<ConeSpec> {
    let mut ps: Vec<Portrait> = quotient.into_iter().collect();
    ps.sort();
    ps.into_iter().map(ConeSpec::singleton).collect()
}

/// The rooted permutation `σ` as a one-element cone at depth `depth`.
pub fn rooted_cone(perm: &Perm, depth: usize) -> ConeSpec {
    ConeSpec::singleton(Portrait::rooted(perm, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::catalog;
    use crate::quotients::{enumerate_quotient, rooted_generators, AutomatonGroup, Group, WreathGroup, DEFAULT_CAP};
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn w2() -> Group {
        Group::new(WreathGroup::new(PermGroup::symmetric(2).unwrap()).unwrap(), DEFAULT_CAP)
    }

    fn grig() -> Group {
        Group::new(
            AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap(),
            DEFAULT_CAP,
        )
    }

    fn chi_square_uniform(counts: &HashMap<Portrait, usize>, cells: usize, draws: usize) -> (f64, f64) {
        let expected = draws as f64 / cells as f64;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum::<f64>()
            + (cells - counts.len()) as f64 * expected;
        let critical = ChiSquared::new((cells - 1) as f64).unwrap().inverse_cdf(0.99);
        (stat, critical)
    }

    #[test]
    fn wreath_sampler_uniform() {
        let mut s = HaarSampler::new(SamplerSource::WreathPortrait(PermGroup::symmetric(2).unwrap()), 11);
        let ones = (0..10_000).filter(|_| !s.sample(1).unwrap().is_identity()).count();
        assert!((4_700..5_300).contains(&ones));
        let mut counts = HashMap::new();
        let draws = 100_000;
        for _ in 0..draws {
            *counts.entry(s.sample(2).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 8);
        let (stat, critical) = chi_square_uniform(&counts, 8, draws);
        assert!(stat < critical, "{stat} >= {critical}");
    }

    #[test]
    fn slice_sampler_uniform() {
        let slice = grig().slice(3).unwrap();
        let mut s = HaarSampler::new(SamplerSource::SliceUniform(slice), 5);
        let mut counts = HashMap::new();
        let draws = 1_000_000;
        for _ in 0..draws {
            *counts.entry(s.sample(3).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 128);
        let (stat, critical) = chi_square_uniform(&counts, 128, draws);
        assert!(stat < critical, "{stat} >= {critical}");
        assert!(s.sample(4).is_err());
    }

    #[test]
    fn sampler_reproducible_and_compatible() {
        let src = SamplerSource::WreathPortrait(PermGroup::symmetric(3).unwrap());
        let mut a = HaarSampler::new(src.clone(), 99);
        let mut b = HaarSampler::new(src.clone(), 99);
        for _ in 0..20 {
            assert_eq!(a.sample(3).unwrap(), b.sample(3).unwrap());
        }
        let mut c = HaarSampler::with_stream(src, 99, 1);
        assert_ne!(
            (0..5).map(|_| a.sample(3).unwrap()).collect::<Vec<_>>(),
            (0..5).map(|_| c.sample(3).unwrap()).collect::<Vec<_>>()
        );
        let g = a.sample(2).unwrap();
        let deep = a.refine(&g, 4).unwrap();
        assert_eq!(deep.truncate(2).unwrap(), g);
        let slice = grig().slice(3).unwrap();
        let mut s = HaarSampler::new(SamplerSource::SliceUniform(slice.clone()), 3);
        let g = s.sample(1).unwrap();
        let deep = s.refine(&g, 3).unwrap();
        assert!(slice.contains(&deep));
        assert_eq!(deep.truncate(1).unwrap(), g);
    }

    #[test]
    fn cone_measures() {
        let w = w2();
        let s1 = w.slice(1).unwrap();
        let s2 = w.slice(2).unwrap();
        assert_eq!(cone_measure(&ConeSpec::full(&s2), &s2).unwrap(), Rational::one());
        assert_eq!(
            cone_measure(&ConeSpec::stabilizer(2, 1), &s1).unwrap(),
            Rational::new(1.into(), 2.into())
        );
        let g2 = grig().slice(2).unwrap();
        assert_eq!(
            cone_measure(&ConeSpec::stabilizer(2, 2), &g2).unwrap(),
            Rational::new(1.into(), 8.into())
        );
        let refined = ConeSpec::stabilizer(2, 1).refine(&s2).unwrap();
        assert_eq!(
            cone_measure(&refined, &s2).unwrap(),
            cone_measure(&ConeSpec::stabilizer(2, 1), &s1).unwrap()
        );
        assert!(cone_measure(&rooted_cone(&Perm::cycle(2), 2), &s1).is_err());
        // additivity over a partition into singletons
        let total: Rational = singleton_cones(s2.elements().cloned())
            .iter()
            .map(|c| cone_measure(c, &s2).unwrap())
            .sum();
        assert_eq!(total, Rational::one());
    }

    #[test]
    fn preimage_counts() {
        let w = w2().slice(2).unwrap();
        let v1 = Vertex::parse(2, "1").unwrap();
        let w1 = w2().slice(1).unwrap();
        assert_eq!(preimage_count(&w, &v1, &ConeSpec::full(&w1)).unwrap(), 8);
        assert_eq!(preimage_count(&w, &v1, &ConeSpec::stabilizer(2, 1)).unwrap(), 4);
        assert_eq!(fiber_lemma_rhs(&w, &v1, 1).unwrap(), 4);
        let g = grig().slice(2).unwrap();
        assert_eq!(
            preimage_count(&g, &v1, &ConeSpec::stabilizer(2, 1)).unwrap(),
            fiber_lemma_rhs(&g, &v1, 1).unwrap()
        );
        // counts over a partition of G_m sum to |G_{n+m}|
        let g3 = grig().slice(3).unwrap();
        let sum: usize = singleton_cones(grig().slice(2).unwrap().elements().cloned())
            .iter()
            .map(|c| preimage_count(&g3, &v1, c).unwrap())
            .sum();
        assert_eq!(sum, g3.order());
    }

    #[test]
    fn mixing() {
        for group in [w2(), grig()] {
            let s2 = group.slice(2).unwrap();
            let s1 = group.slice(1).unwrap();
            let full = ConeSpec::full(&s1);
            for a in singleton_cones(s1.elements().cloned()) {
                for b in singleton_cones(s1.elements().cloned()) {
                    for v in Vertex::level(2, 1) {
                        let r = exact_mixing_check(&s2, &a, &b, &v).unwrap();
                        assert!(r.check.holds(), "{r:?}");
                        assert_eq!(r.lhs, "1/4");
                    }
                }
                let r = exact_mixing_check(&s2, &a, &full, &Vertex::parse(2, "2").unwrap()).unwrap();
                assert!(r.check.holds());
            }
        }
        // a non-fractal group breaks the identity
        let rooted = enumerate_quotient(2, 2, rooted_generators(&Perm::cycle(2), 2), 10).unwrap();
        let id1 = ConeSpec::stabilizer(2, 1);
        let sigma1 = rooted_cone(&Perm::cycle(2), 1);
        let r = exact_mixing_check(&rooted, &sigma1, &id1, &Vertex::parse(2, "1").unwrap()).unwrap();
        assert!(!r.check.holds());
    }

    #[test]
    fn preservation() {
        let g = grig();
        for m in 1..=2 {
            let slice = g.slice(1 + m).unwrap();
            for v in Vertex::level(2, 1) {
                assert!(measure_preservation_check(&slice, &v, m).unwrap().holds());
            }
        }
        let s = g.slice(2).unwrap();
        assert!(measure_preservation_check(&s, &Vertex::root(), 2).unwrap().holds());
        let rooted = enumerate_quotient(2, 2, rooted_generators(&Perm::cycle(2), 2), 10).unwrap();
        let r = measure_preservation_check(&rooted, &Vertex::parse(2, "1").unwrap(), 1).unwrap();
        assert_eq!(
            r.check,
            Check::Fails {
                lhs: "1".into(),
                rhs: "1/2".into()
            }
        );
    }
}
