//! Sections as a dynamical system: Cesàro averages, Birkhoff experiments,
//! hypercyclicity coverage and the Markov operator.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::{HaarSampler, SamplerSource};
use crate::perm::PermGroup;
use crate::quotients::{ConeSpec, GroupSlice, WreathGroup, DEFAULT_CAP};
use crate::tree::{vertex_count, Portrait, Vertex};
use crate::Rational;

/// A probability distribution on the letters, with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterDistribution {
    probs: Vec<Rational>,
    /// Common denominator and the numerators over it.
    denominator: u128,
    numerators: Vec<u128>,
}

impl LetterDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<LetterDistribution> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two letters".into()));
        }
        if probs.iter().any(|p| *p < Rational::zero()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::from_integer(1.into()) {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let lcm = probs.iter().fold(num_bigint::BigInt::from(1), |acc, p| {
            num_integer::lcm(acc, p.denom().clone())
        });
        let denominator = lcm.to_u128().ok_or(Error::Overflow("distribution denominator"))?;
        let numerators = probs
            .iter()
            .map(|p| {
                (p.numer() * (&lcm / p.denom()))
                    .to_u128()
                    .ok_or(Error::Overflow("distribution numerator"))
            })
            .collect::<Result<_>>()?;
        Ok(LetterDistribution {
            probs,
            denominator,
            numerators,
        })
    }

    pub fn uniform(m: usize) -> LetterDistribution {
        LetterDistribution::new(vec![Rational::new(1.into(), m.into()); m]).expect("uniform is a distribution")
    }

    /// Parses comma-separated rationals such as `1/2,1/4,1/4`.
    pub fn parse(s: &str) -> Result<LetterDistribution> {
        let probs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Rational>()
                    .map_err(|_| Error::InvalidDistribution(format!("`{t}` is not a rational")))
            })
            .collect::<Result<_>>()?;
        LetterDistribution::new(probs)
    }

    pub fn arity(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    fn is_uniform(&self) -> bool {
        self.numerators.iter().all(|&a| a == self.numerators[0])
    }
}

/// Source of the labels of a (possibly very deep) automorphism, one level
/// at a time. Level `l` holds `m^l` labels of `m` bytes each, in
/// lexicographic vertex order.
pub trait LabelSource: Sync {
    fn arity(&self) -> usize;

    /// `None` if every level is available.
    fn available_depth(&self) -> Option<usize>;

    fn level(&self, l: usize) -> Result<Arc<[u8]>>;
}

impl LabelSource for Portrait {
    fn arity(&self) -> usize {
        Portrait::arity(self)
    }

    fn available_depth(&self) -> Option<usize> {
        Some(self.depth())
    }

    fn level(&self, l: usize) -> Result<Arc<[u8]>> {
        if l >= self.depth() {
            return Err(Error::DepthTooLarge {
                requested: l + 1,
                available: self.depth(),
            });
        }
        let m = Portrait::arity(self);
        let start = vertex_count(m, l) * m;
        let end = vertex_count(m, l + 1) * m;
        Ok(Arc::from(&self.raw_labels()[start..end]))
    }
}

/// An element of `W_H` with independent uniform labels, generated level by
/// level on demand. Each level uses its own ChaCha stream, so any level can
/// be produced without the ones above it.
#[derive(Debug)]
pub struct LazyWreathElement {
    h: PermGroup,
    seed: u64,
    trial: u64,
    levels: Mutex<HashMap<usize, Arc<[u8]>>>,
}

impl LazyWreathElement {
    pub fn new(h: PermGroup, seed: u64, trial: u64) -> LazyWreathElement {
        LazyWreathElement {
            h,
            seed,
            trial,
            levels: Mutex::new(HashMap::new()),
        }
    }

    /// The first `depth` levels as a portrait.
    pub fn portrait(&self, depth: usize) -> Result<Portrait> {
        let mut labels = Vec::new();
        for l in 0..depth {
            labels.extend_from_slice(&self.level(l)?);
        }
        Ok(Portrait::from_raw(self.h.degree(), depth, labels.into_boxed_slice()))
    }
}

impl LabelSource for LazyWreathElement {
    fn arity(&self) -> usize {
        self.h.degree()
    }

    fn available_depth(&self) -> Option<usize> {
        None
    }

    fn level(&self, l: usize) -> Result<Arc<[u8]>> {
        if let Some(x) = self.levels.lock().expect("level cache").get(&l) {
            return Ok(x.clone());
        }
        let m = self.h.degree();
        let count = m
            .checked_pow(u32::try_from(l).map_err(|_| Error::Overflow("level"))?)
            .ok_or(Error::Overflow("level size"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.trial << 24) | l as u64);
        let elements = self.h.elements();
        let mut labels = Vec::with_capacity(count * m);
        for _ in 0..count {
            labels.extend_from_slice(elements[rng.random_range(0..elements.len())].images());
        }
        let labels: Arc<[u8]> = labels.into();
        self.levels.lock().expect("level cache").insert(l, labels.clone());
        Ok(labels)
    }
}

fn ensure_depth(g: &dyn LabelSource, needed: usize) -> Result<()> {
    match g.available_depth() {
        Some(d) if d < needed => Err(Error::DepthTooLarge {
            requested: needed,
            available: d,
        }),
        _ => Ok(()),
    }
}

/// Depth-`n` patterns of all sections at vertices of level `l`: one flat
/// buffer holding the raw labels of each pattern consecutively, in vertex
/// order.
fn section_patterns(g: &dyn LabelSource, l: usize, n: usize) -> Result<(Vec<u8>, usize)> {
    let m = g.arity();
    let count = m.pow(l as u32);
    let stride = vertex_count(m, n) * m;
    let mut out = vec![0u8; count * stride];
    let mut offset = 0;
    for j in 0..n {
        let level = g.level(l + j)?;
        let block = m.pow(j as u32) * m;
        for q in 0..count {
            let dst = q * stride + offset;
            out[dst..dst + block].copy_from_slice(&level[q * block..(q + 1) * block]);
        }
        offset += block;
    }
    Ok((out, stride))
}

fn chunks(buf: &[u8], stride: usize, count: usize) -> impl Iterator<Item = &[u8]> {
    (0..count).map(move |q| &buf[q * stride..(q + 1) * stride])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroReport {
    pub pattern_depth: usize,
    /// `C_1, …, C_N` as exact fractions.
    pub values: Vec<String>,
    pub values_f64: Vec<f64>,
    /// `μ(C_A)` when known.
    pub beta: Option<String>,
    pub provenance: String,
    #[serde(skip)]
    pub exact: Vec<Rational>,
}

/// `C_k = (1/k) Σ_{|v| ≤ k} p_v χ_{C_A}(g|_v)` for `k = 1..=n_max`, summing
/// over the root as well.
pub fn cesaro_average(
    g: &dyn LabelSource,
    cone: &ConeSpec,
    n_max: usize,
    dist: &LetterDistribution,
) -> Result<CesaroReport> {
    let m = g.arity();
    if dist.arity() != m {
        return Err(Error::ArityMismatch(m, dist.arity()));
    }
    let n = cone.depth();
    ensure_depth(g, n_max + n)?;
    let targets: HashSet<&[u8]> = cone.patterns().iter().map(|p| p.raw_labels()).collect();
    let uniform = dist.is_uniform();
    let mut weights: Vec<u128> = vec![1];
    let mut level_sums = Vec::with_capacity(n_max + 1);
    for l in 0..=n_max {
        if l > 0 && !uniform {
            weights = weights
                .iter()
                .flat_map(|&w| dist.numerators.iter().map(move |&a| w.checked_mul(a)))
                .collect::<Option<_>>()
                .ok_or(Error::Overflow("Cesàro weights"))?;
        }
        let (patterns, stride) = section_patterns(g, l, n)?;
        let mut numer: u128 = 0;
        for (q, pat) in chunks(&patterns, stride, m.pow(l as u32)).enumerate() {
            if targets.contains(pat) {
                let w = if uniform { 1 } else { weights[q] };
                numer = numer.checked_add(w).ok_or(Error::Overflow("Cesàro sum"))?;
            }
        }
        let denom: u128 = if uniform { m as u128 } else { dist.denominator }
            .checked_pow(l as u32)
            .ok_or(Error::Overflow("Cesàro denominator"))?;
        level_sums.push(Rational::new(numer.into(), denom.into()));
    }
    let mut exact = Vec::with_capacity(n_max);
    let mut running = level_sums[0].clone();
    for (k, s) in level_sums.iter().enumerate().skip(1) {
        running += s;
        exact.push(&running / Rational::from_integer(k.into()));
    }
    Ok(CesaroReport {
        pattern_depth: n,
        values: exact.iter().map(ToString::to_string).collect(),
        values_f64: exact.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        beta: None,
        provenance: String::new(),
        exact,
    })
}

/// The groups Birkhoff experiments can draw Haar-random elements from.
#[derive(Clone, Debug)]
pub enum BirkhoffGroup {
    /// `W_H`, with lazily generated elements of unbounded depth.
    Wreath(PermGroup),
    /// Uniform elements of an enumerated quotient (depth-limited).
    Slice(Arc<GroupSlice>),
}

impl BirkhoffGroup {
    pub fn arity(&self) -> usize {
        match self {
            BirkhoffGroup::Wreath(h) => h.degree(),
            BirkhoffGroup::Slice(s) => s.arity(),
        }
    }

    /// `|G_n|`.
    pub fn quotient_order(&self, n: usize) -> Result<usize> {
        match self {
            BirkhoffGroup::Wreath(h) => WreathGroup { h: h.clone() }
                .quotient_order(n)
                .and_then(|x| usize::try_from(x).ok())
                .ok_or(Error::Overflow("quotient order")),
            BirkhoffGroup::Slice(s) => Ok(s.truncation(n)?.len()),
        }
    }

    /// The depth-`n` quotient, for choosing patterns.
    pub fn quotient(&self, n: usize) -> Result<Vec<Portrait>> {
        match self {
            BirkhoffGroup::Wreath(h) => {
                let w = WreathGroup { h: h.clone() };
                let gens = crate::quotients::GroupSource::generators(&w, n)?;
                let slice = crate::quotients::enumerate_quotient(h.degree(), n, gens, DEFAULT_CAP)?;
                Ok(slice.elements().cloned().collect())
            }
            BirkhoffGroup::Slice(s) => {
                let mut q: Vec<Portrait> = s.truncation(n)?.into_iter().collect();
                q.sort();
                // keep the slice's enumeration order where possible
                let order: HashMap<Portrait, usize> = s
                    .elements()
                    .enumerate()
                    .map(|(i, g)| (g.truncate(n).expect("n ≤ depth"), i))
                    .fold(HashMap::new(), |mut acc, (p, i)| {
                        acc.entry(p).or_insert(i);
                        acc
                    });
                q.sort_by_key(|p| order[p]);
                Ok(q)
            }
        }
    }

    fn element(&self, seed: u64, trial: u64, depth: usize) -> Result<Box<dyn LabelSource + Send>> {
        match self {
            BirkhoffGroup::Wreath(h) => Ok(Box::new(LazyWreathElement::new(h.clone(), seed, trial))),
            BirkhoffGroup::Slice(s) => {
                let mut sampler = HaarSampler::with_stream(SamplerSource::SliceUniform(s.clone()), seed, trial);
                Ok(Box::new(sampler.sample(depth)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub values: Vec<String>,
    pub values_f64: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffTable {
    pub n: usize,
    pub pattern_depth: usize,
    pub beta: String,
    pub beta_f64: f64,
    pub trials: Vec<TrialRow>,
    /// Exact mean of `C_N` over trials.
    pub mean: String,
    pub mean_f64: f64,
    pub mean_deviation: f64,
    pub seed: u64,
}

impl BirkhoffTable {
    /// `C_N` of every trial.
    pub fn final_values(&self) -> Vec<f64> {
        self.trials
            .iter()
            .map(|t| *t.values_f64.last().unwrap_or(&f64::NAN))
            .collect()
    }
}

/// Runs `trials` independent Cesàro computations on Haar-random elements.
pub fn birkhoff_experiment(
    group: &BirkhoffGroup,
    cone: &ConeSpec,
    n: usize,
    trials: u64,
    seed: u64,
    dist: &LetterDistribution,
) -> Result<BirkhoffTable> {
    let depth = n + cone.depth();
    let rows: Vec<(TrialRow, Rational)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = group.element(seed, t, depth)?;
            let r = cesaro_average(g.as_ref(), cone, n, dist)?;
            let last = r.exact.last().cloned().unwrap_or_else(Rational::zero);
            Ok((
                TrialRow {
                    trial: t,
                    values: r.values,
                    values_f64: r.values_f64,
                },
                last,
            ))
        })
        .collect::<Result<_>>()?;
    let beta = Rational::new(cone.len().into(), group.quotient_order(cone.depth())?.into());
    let total: Rational = rows.iter().map(|(_, x)| x.clone()).sum();
    let mean = if trials == 0 {
        Rational::zero()
    } else {
        total / Rational::from_integer(trials.into())
    };
    let mean_f64 = mean.to_f64().unwrap_or(f64::NAN);
    let beta_f64 = beta.to_f64().unwrap_or(f64::NAN);
    Ok(BirkhoffTable {
        n,
        pattern_depth: cone.depth(),
        beta: beta.to_string(),
        beta_f64,
        trials: rows.into_iter().map(|(r, _)| r).collect(),
        mean: mean.to_string(),
        mean_f64,
        mean_deviation: (mean_f64 - beta_f64).abs(),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub pattern_depth: usize,
    pub search_depth: usize,
    /// Witness count per reference pattern, in reference order.
    pub counts: Vec<u64>,
    pub hit: usize,
    pub total: usize,
    pub coverage: String,
    pub vertices: u64,
}

impl CoverageReport {
    pub fn is_full(&self) -> bool {
        self.hit == self.total
    }

    pub fn min_count(&self) -> u64 {
        self.counts.iter().copied().min().unwrap_or(0)
    }
}

/// Counts, for every depth-`n` pattern of `reference`, the vertices
/// `|v| ≤ search_depth` where `g|_v` has that pattern.
pub fn hypercyclicity_coverage(
    g: &dyn LabelSource,
    reference: &[Portrait],
    n: usize,
    search_depth: usize,
) -> Result<CoverageReport> {
    ensure_depth(g, search_depth + n)?;
    let index: HashMap<&[u8], usize> = reference.iter().enumerate().map(|(i, p)| (p.raw_labels(), i)).collect();
    let mut counts = vec![0u64; reference.len()];
    let mut vertices = 0u64;
    let m = g.arity();
    for l in 0..=search_depth {
        let (patterns, stride) = section_patterns(g, l, n)?;
        for pat in chunks(&patterns, stride, m.pow(l as u32)) {
            vertices += 1;
            if let Some(&i) = index.get(pat) {
                counts[i] += 1;
            }
        }
    }
    let hit = counts.iter().filter(|&&c| c > 0).count();
    Ok(CoverageReport {
        pattern_depth: n,
        search_depth,
        hit,
        total: reference.len(),
        coverage: Rational::new(hit.into(), reference.len().max(1).into()).to_string(),
        counts,
        vertices,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    /// 1-based position `i` of `s_i`.
    pub index: usize,
    pub vertex: String,
    pub pattern_depth: usize,
    /// Labels of `s_i` as `[vertex, images]` pairs.
    pub pattern: Vec<(String, Vec<usize>)>,
    #[serde(skip)]
    pub vertex_word: Vertex,
    #[serde(skip)]
    pub portrait: Portrait,
}

#[derive(Clone, Debug)]
pub struct HypercyclicBuild {
    pub portrait: Portrait,
    pub manifest: Vec<ManifestEntry>,
}

/// The `j`-th spine vertex `2^j 1` (0-based `j`, letters written 1-based).
pub fn spine_vertex(j: usize) -> Vertex {
    let mut letters = vec![1u8; j];
    letters.push(0);
    Vertex::from_letters(letters)
}

/// Depth-`depth` truncation of `∏ s_i * v_i` with `v_i` the spine vertices
/// and `s_1, s_2, …` the patterns of `W_H` of depth 1, then 2, …, each depth
/// in enumeration order. Stops at the first pattern that no longer fits.
pub fn build_hypercyclic_wreath(h: &PermGroup, depth: usize) -> Result<HypercyclicBuild> {
    let m = h.degree();
    let w = WreathGroup::new(h.clone())?;
    let mut g = Portrait::identity(m, depth);
    let mut manifest = Vec::new();
    let mut j = 0;
    'depths: for k in 1.. {
        if j + 1 + k > depth {
            break;
        }
        let gens = crate::quotients::GroupSource::generators(&w, k)?;
        let slice = crate::quotients::enumerate_quotient(m, k, gens, DEFAULT_CAP)?;
        for p in slice.elements() {
            let v = spine_vertex(j);
            if v.len() + k > depth {
                break 'depths;
            }
            g = g.compose(&p.graft(&v, depth)?)?;
            manifest.push(ManifestEntry {
                index: j + 1,
                vertex: v.to_string_for(m),
                pattern_depth: k,
                pattern: p.to_json().labels,
                vertex_word: v,
                portrait: p.clone(),
            });
            j += 1;
        }
    }
    if manifest.is_empty() {
        return Err(Error::Invalid(format!(
            "depth {depth} is too small to place any pattern"
        )));
    }
    Ok(HypercyclicBuild { portrait: g, manifest })
}

impl HypercyclicBuild {
    /// Every manifest section equals its pattern.
    pub fn verify(&self) -> Result<bool> {
        for e in &self.manifest {
            if self.portrait.section_truncated(&e.vertex_word, e.pattern_depth)? != e.portrait {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest search depth whose sections still have depth `n`.
    pub fn search_depth(&self, n: usize) -> usize {
        self.portrait.depth().saturating_sub(n)
    }
}

/// `(Mf)(x) = Σ_k p_k f(x|_k)` for every `x` of a depth-`n+1` slice, where
/// `f` is a function on depth-`n` patterns (absent patterns map to 0).
pub fn markov_apply(
    f: &HashMap<Portrait, Rational>,
    n: usize,
    slice: &GroupSlice,
    dist: &LetterDistribution,
) -> Result<Vec<(Portrait, Rational)>> {
    if slice.depth() != n + 1 {
        return Err(Error::DepthTooLarge {
            requested: n + 1,
            available: slice.depth(),
        });
    }
    let m = slice.arity();
    if dist.arity() != m {
        return Err(Error::ArityMismatch(m, dist.arity()));
    }
    slice
        .elements()
        .map(|x| {
            let mut total = Rational::zero();
            for k in 0..m {
                let sec = x.section(&Vertex::from_letters(vec![k as u8]))?;
                if let Some(v) = f.get(&sec) {
                    total += &dist.probs()[k] * v;
                }
            }
            Ok((x.clone(), total))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StationarityReport {
    pub mean_mf: String,
    pub mean_f: String,
    pub holds: bool,
}

/// Compares the mean of `Mf` over `G_{n+1}` with the mean of `f` over `G_n`.
pub fn markov_stationarity(
    f: &HashMap<Portrait, Rational>,
    n: usize,
    slice: &GroupSlice,
    dist: &LetterDistribution,
) -> Result<StationarityReport> {
    let mf = markov_apply(f, n, slice, dist)?;
    let mean_mf: Rational =
        mf.iter().map(|(_, v)| v.clone()).sum::<Rational>() / Rational::from_integer(slice.order().into());
    let gn = slice.truncation(n)?;
    let mean_f: Rational =
        gn.iter().filter_map(|p| f.get(p).cloned()).sum::<Rational>() / Rational::from_integer(gn.len().into());
    Ok(StationarityReport {
        holds: mean_mf == mean_f,
        mean_mf: mean_mf.to_string(),
        mean_f: mean_f.to_string(),
    })
}

/// Indicator of a cone as a pattern function.
pub fn indicator(cone: &ConeSpec) -> HashMap<Portrait, Rational> {
    cone.patterns()
        .iter()
        .map(|p| (p.clone(), Rational::from_integer(1.into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::catalog;
    use crate::quotients::{AutomatonGroup, Group};
    use num_traits::One;
    use proptest::prelude::*;

    fn half() -> Rational {
        Rational::new(1.into(), 2.into())
    }

    /// Direct evaluation of the defining sum over `Vertex::up_to`.
    fn brute_cesaro(g: &Portrait, cone: &ConeSpec, k: usize, dist: &LetterDistribution) -> Rational {
        let mut total = Rational::zero();
        for v in Vertex::up_to(g.arity(), k) {
            let p: Rational = v.letters().iter().map(|&x| dist.probs()[x as usize].clone()).product();
            if cone.contains(&g.section_truncated(&v, cone.depth()).unwrap()) {
                total += p;
            }
        }
        total / Rational::from_integer(k.into())
    }

    #[test]
    fn distributions() {
        assert!(LetterDistribution::parse("1/2,1/2").unwrap().is_uniform());
        assert!(LetterDistribution::parse("1/2,1/3").is_err());
        assert!(LetterDistribution::parse("3/2,-1/2").is_err());
        let d = LetterDistribution::parse("1/2, 1/4, 1/4").unwrap();
        assert_eq!((d.denominator, d.numerators.clone()), (4, vec![2, 1, 1]));
    }

    #[test]
    fn identity_cesaro() {
        let id = Portrait::identity(2, 9);
        let r = cesaro_average(&id, &ConeSpec::stabilizer(2, 1), 8, &LetterDistribution::uniform(2)).unwrap();
        for (k, c) in r.exact.iter().enumerate() {
            let k = k + 1;
            assert_eq!(*c, Rational::new((k + 1).into(), k.into()));
        }
        let sigma = crate::haar::rooted_cone(&crate::perm::Perm::cycle(2), 1);
        let r = cesaro_average(&id, &sigma, 8, &LetterDistribution::uniform(2)).unwrap();
        assert!(r.exact.iter().all(Zero::is_zero));
        assert!(cesaro_average(&id, &sigma, 9, &LetterDistribution::uniform(2)).is_err());
    }

    #[test]
    fn random_wreath_cesaro_near_beta() {
        let g = LazyWreathElement::new(PermGroup::symmetric(2).unwrap(), 2024, 0);
        let r = cesaro_average(&g, &ConeSpec::stabilizer(2, 1), 20, &LetterDistribution::uniform(2)).unwrap();
        assert!((r.values_f64[19] - 0.5).abs() < 0.05, "{}", r.values_f64[19]);
    }

    #[test]
    fn lazy_elements_are_deterministic() {
        let h = PermGroup::symmetric(3).unwrap();
        let a = LazyWreathElement::new(h.clone(), 5, 3);
        let b = LazyWreathElement::new(h.clone(), 5, 3);
        // generate levels in a different order
        let _ = b.level(4).unwrap();
        assert_eq!(a.portrait(5).unwrap(), b.portrait(5).unwrap());
        let c = LazyWreathElement::new(h, 5, 4);
        assert_ne!(a.portrait(5).unwrap(), c.portrait(5).unwrap());
        let p = a.portrait(4).unwrap();
        assert_eq!(&*LabelSource::level(&p, 2).unwrap(), &*a.level(2).unwrap());
    }

    proptest! {
        #[test]
        fn cesaro_matches_brute_force(
            g in crate::tree::tests::arb_portrait(2, 7),
            pick in 0usize..8,
            weights in prop::sample::select(vec!["1/2,1/2", "1/3,2/3", "3/4,1/4"]),
        ) {
            let dist = LetterDistribution::parse(weights).unwrap();
            let w = Group::new(WreathGroup::new(PermGroup::symmetric(2).unwrap()).unwrap(), DEFAULT_CAP).slice(2).unwrap();
            let cone = ConeSpec::new(2, [g.truncate(2).unwrap(), w.element(pick).clone()]).unwrap();
            let r = cesaro_average(&g, &cone, 5, &dist).unwrap();
            for k in 1..=5 {
                prop_assert_eq!(&r.exact[k - 1], &brute_cesaro(&g, &cone, k, &dist));
            }
        }
    }

    #[test]
    fn birkhoff_tables() {
        let h = PermGroup::symmetric(2).unwrap();
        let group = BirkhoffGroup::Wreath(h);
        let full = ConeSpec::new(1, group.quotient(1).unwrap()).unwrap();
        let t = birkhoff_experiment(&group, &full, 10, 5, 1, &LetterDistribution::uniform(2)).unwrap();
        assert!(t.final_values().iter().all(|&x| (x - 1.1).abs() < 1e-12));
        assert_eq!(t.beta, "1");
        let again = birkhoff_experiment(&group, &full, 10, 5, 1, &LetterDistribution::uniform(2)).unwrap();
        assert_eq!(t, again);
        let slice = Group::new(
            AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap(),
            DEFAULT_CAP,
        )
        .slice(4)
        .unwrap();
        let sg = BirkhoffGroup::Slice(slice);
        let t = birkhoff_experiment(
            &sg,
            &ConeSpec::stabilizer(2, 1),
            3,
            4,
            9,
            &LetterDistribution::uniform(2),
        )
        .unwrap();
        assert_eq!(t.beta, "1/2");
        assert!(birkhoff_experiment(
            &sg,
            &ConeSpec::stabilizer(2, 1),
            4,
            1,
            9,
            &LetterDistribution::uniform(2)
        )
        .is_err());
    }

    #[test]
    fn coverage() {
        let reference = BirkhoffGroup::Wreath(PermGroup::symmetric(2).unwrap())
            .quotient(2)
            .unwrap();
        let id = Portrait::identity(2, 6);
        let r = hypercyclicity_coverage(&id, &reference, 2, 4).unwrap();
        assert_eq!((r.hit, r.total), (1, 8));
        let g = LazyWreathElement::new(PermGroup::symmetric(2).unwrap(), 3, 0);
        let mut last = 0;
        for d in [2, 6, 10] {
            let r = hypercyclicity_coverage(&g, &reference, 2, d).unwrap();
            assert!(r.hit >= last);
            last = r.hit;
        }
        assert_eq!(last, 8);
    }

    #[test]
    fn hypercyclic_builder() {
        let h = PermGroup::symmetric(2).unwrap();
        let small = build_hypercyclic_wreath(&h, 2).unwrap();
        assert_eq!(small.manifest.len(), 1);
        assert_eq!(small.manifest[0].vertex, "1");
        assert!(small.verify().unwrap());
        let b = build_hypercyclic_wreath(&h, 12).unwrap();
        assert!(b.verify().unwrap());
        assert_eq!(b.manifest.iter().filter(|e| e.pattern_depth == 2).count(), 8);
        for (i, x) in b.manifest.iter().enumerate() {
            for y in &b.manifest[i + 1..] {
                assert!(!x.vertex_word.is_prefix_of(&y.vertex_word) && !y.vertex_word.is_prefix_of(&x.vertex_word));
            }
        }
        let reference = BirkhoffGroup::Wreath(h.clone()).quotient(2).unwrap();
        let r = hypercyclicity_coverage(&b.portrait, &reference, 2, b.search_depth(2)).unwrap();
        assert!(r.is_full());
        assert!(build_hypercyclic_wreath(&h, 1).is_err());
        let b3 = build_hypercyclic_wreath(&PermGroup::symmetric(3).unwrap(), 4).unwrap();
        assert!(b3.verify().unwrap());
    }

    #[test]
    fn markov_operator() {
        let w = Group::new(WreathGroup::new(PermGroup::symmetric(2).unwrap()).unwrap(), DEFAULT_CAP);
        let s2 = w.slice(2).unwrap();
        let dist = LetterDistribution::uniform(2);
        let one = indicator(&ConeSpec::full(&w.slice(1).unwrap()));
        assert!(markov_apply(&one, 1, &s2, &dist)
            .unwrap()
            .iter()
            .all(|(_, v)| v.is_one()));
        let st = indicator(&ConeSpec::stabilizer(2, 1));
        let r = markov_stationarity(&st, 1, &s2, &dist).unwrap();
        assert!(r.holds);
        assert_eq!(r.mean_f, half().to_string());
        let g = Group::new(
            AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap(),
            DEFAULT_CAP,
        );
        let g2 = g.slice(2).unwrap();
        for p in g.slice(1).unwrap().elements() {
            for d in ["1/2,1/2", "1/3,2/3"] {
                let f = indicator(&ConeSpec::singleton(p.clone()));
                assert!(
                    markov_stationarity(&f, 1, &g2, &LetterDistribution::parse(d).unwrap())
                        .unwrap()
                        .holds
                );
            }
        }
    }
}
