//! Congruence quotients `G_n` as explicitly enumerated finite groups.
//!
//! A [`GroupSource`] produces generator portraits at any requested depth; a
//! [`Group`] enumerates and caches the quotients of one source. Fractality
//! and self-similar closure tests are all finite-depth statements about
//! these slices.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{MealyAutomaton, StateId};
use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::tree::{Portrait, Vertex};

/// Default element cap for enumeration (`2^22`).
pub const DEFAULT_CAP: usize = 1 << 22;

/// Something that can produce generators of a group of tree automorphisms
/// truncated to any depth.
pub trait GroupSource: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;

    /// Named generator portraits of depth `depth`.
    fn generators(&self, depth: usize) -> Result<Vec<(String, Portrait)>>;

    fn describe(&self) -> String;
}

/// The group generated by some states of an automaton.
#[derive(Clone, Debug)]
pub struct AutomatonGroup {
    pub automaton: MealyAutomaton,
    pub states: Vec<StateId>,
}

impl AutomatonGroup {
    /// All states as generators.
    pub fn new(automaton: MealyAutomaton) -> Result<AutomatonGroup> {
        automaton.ensure_invertible()?;
        let states = automaton.states().collect();
        Ok(AutomatonGroup { automaton, states })
    }

    pub fn with_states(automaton: MealyAutomaton, states: Vec<StateId>) -> Result<AutomatonGroup> {
        automaton.ensure_invertible()?;
        if let Some(s) = states.iter().find(|s| s.0 >= automaton.len()) {
            return Err(Error::UnknownState(s.to_string()));
        }
        Ok(AutomatonGroup { automaton, states })
    }
}

impl GroupSource for AutomatonGroup {
    fn arity(&self) -> usize {
        self.automaton.arity()
    }

    fn generators(&self, depth: usize) -> Result<Vec<(String, Portrait)>> {
        self.states
            .iter()
            .map(|&s| {
                Ok((
                    self.automaton.name(s).to_string(),
                    self.automaton.state_portrait(s, depth)?,
                ))
            })
            .collect()
    }

    fn describe(&self) -> String {
        let names: Vec<&str> = self.states.iter().map(|&s| self.automaton.name(s)).collect();
        format!("automaton group <{}>", names.join(", "))
    }
}

/// The iterated wreath product `W_H`: all automorphisms whose labels lie in
/// `H`. Its depth-`n` quotient is generated by the grafts of `H`'s
/// generators at every vertex of length `< n`.
#[derive(Clone, Debug)]
pub struct WreathGroup {
    pub h: PermGroup,
}

impl WreathGroup {
    pub fn new(h: PermGroup) -> Result<WreathGroup> {
        if !h.is_transitive() {
            return Err(Error::Invalid("W_H requires a transitive H".into()));
        }
        Ok(WreathGroup { h })
    }

    /// Order of the depth-`n` quotient, `|H|^((m^n − 1)/(m − 1))`, if it fits.
    pub fn quotient_order(&self, n: usize) -> Option<u128> {
        let exp = crate::tree::vertex_count(self.h.degree(), n);
        (self.h.order() as u128).checked_pow(u32::try_from(exp).ok()?)
    }
}

impl GroupSource for WreathGroup {
    fn arity(&self) -> usize {
        self.h.degree()
    }

    fn generators(&self, depth: usize) -> Result<Vec<(String, Portrait)>> {
        let m = self.h.degree();
        let mut out = Vec::new();
        for v in Vertex::up_to(m, depth).filter(|v| v.len() < depth) {
            for (j, g) in self.h.generators().iter().enumerate() {
                let rooted = Portrait::rooted(g, 1);
                out.push((format!("h{}@{}", j + 1, v.to_string_for(m)), rooted.graft(&v, depth)?));
            }
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("iterated wreath product W_H, |H| = {}", self.h.order())
    }
}

/// A fixed list of generator portraits; only depths up to theirs are
/// available.
#[derive(Clone, Debug)]
pub struct PortraitGroup {
    pub m: usize,
    pub generators: Vec<(String, Portrait)>,
}

impl PortraitGroup {
    pub fn max_depth(&self) -> usize {
        self.generators
            .iter()
            .map(|(_, p)| p.depth())
            .min()
            .unwrap_or(usize::MAX)
    }
}

impl GroupSource for PortraitGroup {
    fn arity(&self) -> usize {
        self.m
    }

    fn generators(&self, depth: usize) -> Result<Vec<(String, Portrait)>> {
        self.generators
            .iter()
            .map(|(n, p)| Ok((n.clone(), p.truncate(depth)?)))
            .collect()
    }

    fn describe(&self) -> String {
        format!("group generated by {} portraits", self.generators.len())
    }
}

/// An enumerated congruence quotient: every element of the image of the
/// group in `Aut T_n`, in breadth-first (shortlex) order of generator words.
#[derive(Clone)]
pub struct GroupSlice {
    m: usize,
    depth: usize,
    elements: IndexSet<Portrait>,
    generators: Vec<(String, Portrait)>,
    /// `(parent element, generator)` with `element = parent · generator`.
    parent: Vec<Option<(u32, u32)>>,
}

impl fmt::Debug for GroupSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupSlice(m={}, depth={}, order={}, generators={})",
            self.m,
            self.depth,
            self.order(),
            self.generators.len()
        )
    }
}

/// Breadth-first closure of `generators` inside `Aut T_depth`.
///
/// Fails with [`Error::CapExceeded`] as soon as the group would have more
/// than `cap` elements.
pub fn enumerate_quotient(
    m: usize,
    depth: usize,
    generators: Vec<(String, Portrait)>,
    cap: usize,
) -> Result<GroupSlice> {
    for (_, g) in &generators {
        if g.arity() != m {
            return Err(Error::ArityMismatch(m, g.arity()));
        }
        if g.depth() != depth {
            return Err(Error::DepthTooLarge {
                requested: depth,
                available: g.depth(),
            });
        }
    }
    let mut elements = IndexSet::new();
    elements.insert(Portrait::identity(m, depth));
    let mut parent = vec![None];
    let mut i = 0;
    while i < elements.len() {
        for (j, (_, g)) in generators.iter().enumerate() {
            let y = elements[i].compose(g)?;
            if !elements.contains(&y) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded {
                        cap,
                        partial: elements.len(),
                    });
                }
                elements.insert(y);
                parent.push(Some((i as u32, j as u32)));
            }
        }
        i += 1;
    }
    Ok(GroupSlice {
        m,
        depth,
        elements,
        generators,
        parent,
    })
}

impl GroupSlice {
    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &Portrait> + '_ {
        self.elements.iter()
    }

    pub fn element(&self, i: usize) -> &Portrait {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Portrait) -> Option<usize> {
        self.elements.get_index_of(g)
    }

    pub fn contains(&self, g: &Portrait) -> bool {
        self.elements.contains(g)
    }

    pub fn generators(&self) -> &[(String, Portrait)] {
        &self.generators
    }

    /// Shortest generator word (by generator index) producing element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while let Some((p, g)) = self.parent[i] {
            w.push(g as usize);
            i = p as usize;
        }
        w.reverse();
        w
    }

    pub fn word_string(&self, i: usize) -> String {
        let w = self.word(i);
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&g| self.generators[g].0.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Indices of elements acting trivially on the first `k` levels.
    pub fn level_stabilizer(&self, k: usize) -> Result<Vec<usize>> {
        if k > self.depth {
            return Err(Error::DepthTooLarge {
                requested: k,
                available: self.depth,
            });
        }
        Ok((0..self.order())
            .filter(|&i| self.elements[i].truncate(k).map(|t| t.is_identity()).unwrap_or(false))
            .collect())
    }

    /// Indices of elements fixing `v`.
    pub fn vertex_stabilizer(&self, v: &Vertex) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, g) in self.elements.iter().enumerate() {
            if &g.apply(v)? == v {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn orbit(&self, v: &Vertex) -> Result<BTreeSet<Vertex>> {
        self.elements.iter().map(|g| g.apply(v)).collect()
    }

    /// The image of the slice in `Aut T_k`, i.e. the depth-`k` quotient.
    pub fn truncation(&self, k: usize) -> Result<HashSet<Portrait>> {
        self.elements.iter().map(|g| g.truncate(k)).collect()
    }

    /// `true` iff the given elements form a subgroup.
    pub fn is_subgroup(&self, indices: &[usize]) -> bool {
        let set: HashSet<&Portrait> = indices.iter().map(|&i| &self.elements[i]).collect();
        set.contains(&Portrait::identity(self.m, self.depth))
            && set
                .iter()
                .all(|g| set.contains(&g.inverse()) && set.iter().all(|h| set.contains(&g.compose(h).unwrap())))
    }

    /// `true` iff the given subgroup is normal in the slice.
    pub fn is_normal(&self, indices: &[usize]) -> bool {
        let set: HashSet<&Portrait> = indices.iter().map(|&i| &self.elements[i]).collect();
        self.generators.iter().all(|(_, x)| {
            let xi = x.inverse();
            set.iter()
                .all(|h| set.contains(&xi.compose(h).unwrap().compose(x).unwrap()))
        })
    }
}

/// `{ section(g, v) truncated to depth k : g ∈ elements }`.
///
/// Every element must fix `v`.
pub fn section_image<'a>(
    elements: impl IntoIterator<Item = &'a Portrait>,
    v: &Vertex,
    k: usize,
) -> Result<HashSet<Portrait>> {
    let mut out = HashSet::new();
    for g in elements {
        if &g.apply(v)? != v {
            return Err(Error::DoesNotStabilize(v.to_string()));
        }
        out.insert(g.section_truncated(v, k)?);
    }
    Ok(out)
}

/// A group together with a cache of its enumerated quotients.
#[derive(Debug)]
pub struct Group {
    source: Arc<dyn GroupSource>,
    cap: usize,
    cache: Mutex<HashMap<usize, Arc<GroupSlice>>>,
}

impl Group {
    pub fn new(source: impl GroupSource + 'static, cap: usize) -> Group {
        Group {
            source: Arc::new(source),
            cap,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn arity(&self) -> usize {
        self.source.arity()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn source(&self) -> &dyn GroupSource {
        self.source.as_ref()
    }

    /// The depth-`n` quotient, enumerated on first use.
    pub fn slice(&self, n: usize) -> Result<Arc<GroupSlice>> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(s.clone());
        }
        let gens = self.source.generators(n)?;
        let slice = Arc::new(enumerate_quotient(self.arity(), n, gens, self.cap)?);
        self.cache.lock().expect("cache lock").insert(n, slice.clone());
        Ok(slice)
    }
}

/// Per-vertex outcome of a fractality test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub vertex: String,
    /// Size of the section image.
    pub image: usize,
    /// `|G_m|`.
    pub target: usize,
    pub onto: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractalityReport {
    pub n: usize,
    pub m: usize,
    pub holds: bool,
    pub vertices: Vec<VertexCheck>,
}

fn fractality(
    group: &Group,
    n: usize,
    m: usize,
    vertices: Vec<Vertex>,
    stabilizer: impl Fn(&GroupSlice, &Vertex) -> Result<Vec<usize>> + Sync,
    slice_depth: impl Fn(&Vertex) -> usize + Sync,
) -> Result<FractalityReport> {
    let target = group.slice(m)?;
    let target_set: HashSet<&Portrait> = target.elements().collect();
    // enumerate sequentially so that cap errors surface deterministically
    for v in &vertices {
        group.slice(slice_depth(v))?;
    }
    let checks: Vec<VertexCheck> = vertices
        .par_iter()
        .map(|v| {
            let slice = group.slice(slice_depth(v))?;
            let stab = stabilizer(&slice, v)?;
            let image = section_image(stab.iter().map(|&i| slice.element(i)), v, m)?;
            let onto = image.len() == target_set.len() && image.iter().all(|p| target_set.contains(p));
            Ok(VertexCheck {
                vertex: v.to_string_for(group.arity()),
                image: image.len(),
                target: target_set.len(),
                onto,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FractalityReport {
        n,
        m,
        holds: checks.iter().all(|c| c.onto),
        vertices: checks,
    })
}

/// For every `v` with `|v| ≤ n`: sections of `st(v)` at `v`, truncated to
/// depth `m`, exhaust `G_m`.
pub fn is_fractal_at_depth(group: &Group, n: usize, m: usize) -> Result<FractalityReport> {
    let vertices = Vertex::up_to(group.arity(), n).collect();
    fractality(
        group,
        n,
        m,
        vertices,
        |slice, v| slice.vertex_stabilizer(v),
        |v| v.len() + m,
    )
}

/// For every `v` at level exactly `n`: sections of `St(n)` at `v`,
/// truncated to depth `m`, exhaust `G_m`.
pub fn is_super_strongly_fractal_at_depth(group: &Group, n: usize, m: usize) -> Result<FractalityReport> {
    let vertices = Vertex::level(group.arity(), n).collect();
    fractality(group, n, m, vertices, |slice, _| slice.level_stabilizer(n), |_| n + m)
}

/// An element whose self-similar closure is being tested.
#[derive(Clone, Debug)]
pub enum ElementSpec {
    /// A finite portrait; only sections that retain depth `k` are used.
    Portrait(Portrait),
    /// A product of automaton states; all sections are available exactly.
    Word(MealyAutomaton, Vec<StateId>),
}

/// Depth-`k` quotient of the group generated by the sections of `g` at all
/// vertices `v` with `|v| ≤ g.depth − k`.
pub fn closure_of_portrait(g: &Portrait, k: usize, cap: usize) -> Result<GroupSlice> {
    if k > g.depth() {
        return Err(Error::DepthTooLarge {
            requested: k,
            available: g.depth(),
        });
    }
    let m = g.arity();
    let mut gens: IndexSet<Portrait> = IndexSet::new();
    for v in Vertex::up_to(m, g.depth() - k) {
        gens.insert(g.section_truncated(&v, k)?);
    }
    let gens = gens
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("s{}", i + 1), p))
        .collect();
    enumerate_quotient(m, k, gens, cap)
}

/// Depth-`k` quotient of the self-similar closure of an automaton element:
/// generated by the automorphisms of all its section words.
pub fn closure_of_word(aut: &MealyAutomaton, word: &[StateId], k: usize, cap: usize) -> Result<GroupSlice> {
    let (wa, _) = aut.word_automaton(word)?;
    let mut gens: IndexSet<Portrait> = IndexSet::new();
    let mut names = Vec::new();
    for s in wa.states() {
        if gens.insert(wa.state_portrait(s, k)?) {
            names.push(wa.name(s).to_string());
        }
    }
    let gens = names.into_iter().zip(gens).collect();
    enumerate_quotient(aut.arity(), k, gens, cap)
}

pub fn self_similar_closure_slice(element: &ElementSpec, k: usize, cap: usize) -> Result<GroupSlice> {
    match element {
        ElementSpec::Portrait(g) => closure_of_portrait(g, k, cap),
        ElementSpec::Word(aut, w) => closure_of_word(aut, w, k, cap),
    }
}

/// Finite-depth comparison of `⟨g⟩^SS` with `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CyclicityAtDepth {
    /// The closure's quotient is all of `G_k`: consistent with cyclicity.
    Equal { order: usize },
    /// The closure's quotient is a proper subgroup: `g` is not cyclic.
    Proper { closure_order: usize, group_order: usize },
    /// Enumeration did not finish.
    Undecided { reason: String },
}

pub fn cyclic_at_depth(element: &ElementSpec, group: &Group, k: usize) -> CyclicityAtDepth {
    let undecided = |e: Error| CyclicityAtDepth::Undecided { reason: e.to_string() };
    let full = match group.slice(k) {
        Ok(s) => s,
        Err(e) => return undecided(e),
    };
    let closure = match self_similar_closure_slice(element, k, group.cap()) {
        Ok(s) => s,
        Err(e) => return undecided(e),
    };
    if closure.order() == full.order() && closure.elements().all(|g| full.contains(g)) {
        CyclicityAtDepth::Equal { order: full.order() }
    } else {
        CyclicityAtDepth::Proper {
            closure_order: closure.order(),
            group_order: full.order(),
        }
    }
}

/// A cone `C_A`: the group elements whose depth-`n` pattern lies in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    depth: usize,
    patterns: BTreeSet<Portrait>,
}

impl ConeSpec {
    pub fn new(depth: usize, patterns: impl IntoIterator<Item = Portrait>) -> Result<ConeSpec> {
        let patterns: BTreeSet<Portrait> = patterns.into_iter().collect();
        if let Some(p) = patterns.iter().find(|p| p.depth() != depth) {
            return Err(Error::DepthTooLarge {
                requested: depth,
                available: p.depth(),
            });
        }
        Ok(ConeSpec { depth, patterns })
    }

    pub fn empty(depth: usize) -> ConeSpec {
        ConeSpec {
            depth,
            patterns: BTreeSet::new(),
        }
    }

    pub fn full(slice: &GroupSlice) -> ConeSpec {
        ConeSpec {
            depth: slice.depth(),
            patterns: slice.elements().cloned().collect(),
        }
    }

    pub fn singleton(p: Portrait) -> ConeSpec {
        ConeSpec {
            depth: p.depth(),
            patterns: BTreeSet::from([p]),
        }
    }

    /// The cone over the trivial pattern, i.e. the level stabilizer.
    pub fn stabilizer(m: usize, depth: usize) -> ConeSpec {
        ConeSpec::singleton(Portrait::identity(m, depth))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn patterns(&self) -> &BTreeSet<Portrait> {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, p: &Portrait) -> bool {
        self.patterns.contains(p)
    }

    /// Checks that every pattern is an element of `slice`.
    pub fn check_in(&self, slice: &GroupSlice) -> Result<()> {
        if slice.depth() != self.depth || self.patterns.iter().any(|p| !slice.contains(p)) {
            return Err(Error::PatternOutsideSlice(self.depth));
        }
        Ok(())
    }

    /// The same cone described at a deeper level `k`: all elements of the
    /// depth-`k` slice whose truncation lies in `A`.
    pub fn refine(&self, deeper: &GroupSlice) -> Result<ConeSpec> {
        let mut out = BTreeSet::new();
        for g in deeper.elements() {
            if self.patterns.contains(&g.truncate(self.depth)?) {
                out.insert(g.clone());
            }
        }
        Ok(ConeSpec {
            depth: deeper.depth(),
            patterns: out,
        })
    }
}

/// Rooted permutation `σ` as a generator list for quick experiments.
pub fn rooted_generators(perm: &Perm, depth: usize) -> Vec<(String, Portrait)> {
    vec![("s".into(), Portrait::rooted(perm, depth))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::catalog;

    fn grig() -> Group {
        Group::new(
            AutomatonGroup::new(catalog("grigorchuk").unwrap()).unwrap(),
            DEFAULT_CAP,
        )
    }

    fn w2() -> Group {
        Group::new(WreathGroup::new(PermGroup::symmetric(2).unwrap()).unwrap(), DEFAULT_CAP)
    }

    fn rooted() -> Group {
        Group::new(AutomatonGroup::new(catalog("rooted2").unwrap()).unwrap(), DEFAULT_CAP)
    }

    /// Closure inside a fully enumerated `Aut T_n`: repeatedly multiply a
    /// boolean membership table by the generators until nothing changes.
    fn brute_force_order(gens: &[Portrait], n: usize) -> usize {
        let all = enumerate_quotient(
            2,
            n,
            WreathGroup::new(PermGroup::symmetric(2).unwrap())
                .unwrap()
                .generators(n)
                .unwrap(),
            DEFAULT_CAP,
        )
        .unwrap();
        let mut member = vec![false; all.order()];
        member[all.index_of(&Portrait::identity(2, n)).unwrap()] = true;
        loop {
            let mut changed = false;
            for i in 0..all.order() {
                if !member[i] {
                    continue;
                }
                for g in gens {
                    let j = all.index_of(&all.element(i).compose(g).unwrap()).unwrap();
                    if !member[j] {
                        member[j] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return member.iter().filter(|&&b| b).count();
            }
        }
    }

    #[test]
    fn quotient_orders() {
        let r = enumerate_quotient(2, 1, rooted_generators(&Perm::cycle(2), 1), 10).unwrap();
        assert_eq!(r.order(), 2);
        let g = grig();
        let orders: Vec<usize> = (1..=3).map(|n| g.slice(n).unwrap().order()).collect();
        assert_eq!(orders, vec![2, 8, 128]);
        for n in 1..=3 {
            let gens: Vec<Portrait> = g.source().generators(n).unwrap().into_iter().map(|x| x.1).collect();
            assert_eq!(brute_force_order(&gens, n), orders[n - 1]);
        }
        let w = w2();
        let worders: Vec<usize> = (1..=3).map(|n| w.slice(n).unwrap().order()).collect();
        assert_eq!(worders, vec![2, 8, 128]);
        for n in 1..=3 {
            assert_eq!(
                WreathGroup::new(PermGroup::symmetric(2).unwrap())
                    .unwrap()
                    .quotient_order(n),
                Some(worders[n - 1] as u128)
            );
        }
    }

    #[test]
    fn cap_exceeded_reports_partial() {
        let g = grig();
        let gens = g.source().generators(3).unwrap();
        match enumerate_quotient(2, 3, gens, 50) {
            Err(Error::CapExceeded { cap: 50, partial }) => assert_eq!(partial, 50),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn enumeration_is_shortlex() {
        let g = grig();
        let s = g.slice(3).unwrap();
        let mut last = 0;
        for i in 0..s.order() {
            let w = s.word(i);
            assert!(w.len() >= last);
            last = w.len();
            let product = w.iter().fold(Portrait::identity(2, 3), |acc, &j| {
                acc.compose(&s.generators()[j].1).unwrap()
            });
            assert_eq!(&product, s.element(i));
        }
        assert_eq!(s.word_string(0), "1");
    }

    #[test]
    fn stabilizers() {
        let g = grig();
        let s2 = g.slice(2).unwrap();
        assert_eq!(s2.level_stabilizer(0).unwrap().len(), s2.order());
        assert_eq!(s2.level_stabilizer(1).unwrap().len() * 2, s2.order());
        assert_eq!(s2.vertex_stabilizer(&Vertex::root()).unwrap().len(), s2.order());
        let v12 = Vertex::parse(2, "12").unwrap();
        assert_eq!(s2.orbit(&v12).unwrap().len(), 4);
        assert_eq!(s2.vertex_stabilizer(&v12).unwrap().len() * 4, s2.order());
        let w = w2().slice(2).unwrap();
        assert_eq!(w.order(), 8);
        assert_eq!(w.level_stabilizer(1).unwrap().len(), 4);
        assert_eq!(
            w.vertex_stabilizer(&Vertex::parse(2, "1").unwrap()).unwrap().len() * 2,
            8
        );
    }

    #[test]
    fn stabilizer_subgroups_and_orbit_stabilizer() {
        for group in [grig(), w2()] {
            let s = group.slice(3).unwrap();
            for k in 0..=3 {
                let st = s.level_stabilizer(k).unwrap();
                assert!(s.is_subgroup(&st));
                assert!(s.is_normal(&st));
            }
            for v in Vertex::up_to(2, 3) {
                let st = s.vertex_stabilizer(&v).unwrap();
                assert!(s.is_subgroup(&st));
                assert_eq!(s.orbit(&v).unwrap().len() * st.len(), s.order());
            }
            for n in 1..3 {
                let lower = group.slice(n).unwrap().order();
                let upper = group.slice(n + 1).unwrap();
                assert_eq!(upper.order(), lower * upper.level_stabilizer(n).unwrap().len());
            }
        }
    }

    #[test]
    fn section_images() {
        let id = Portrait::identity(2, 3);
        let img = section_image([&id], &Vertex::parse(2, "1").unwrap(), 2).unwrap();
        assert_eq!(img.len(), 1);
        let g = grig();
        let s2 = g.slice(2).unwrap();
        let v1 = Vertex::parse(2, "1").unwrap();
        let st = s2.vertex_stabilizer(&v1).unwrap();
        let img = section_image(st.iter().map(|&i| s2.element(i)), &v1, 1).unwrap();
        assert_eq!(img.len(), 2);
        let a = Portrait::rooted(&Perm::cycle(2), 2);
        assert!(matches!(section_image([&a], &v1, 1), Err(Error::DoesNotStabilize(_))));
        let w = w2();
        let s3 = w.slice(3).unwrap();
        let st = s3.level_stabilizer(1).unwrap();
        let img = section_image(st.iter().map(|&i| s3.element(i)), &v1, 2).unwrap();
        assert_eq!(img.len(), w.slice(2).unwrap().order());
    }

    #[test]
    fn fractality() {
        assert!(is_fractal_at_depth(&w2(), 2, 2).unwrap().holds);
        assert!(is_fractal_at_depth(&grig(), 2, 2).unwrap().holds);
        let neg = is_fractal_at_depth(&rooted(), 1, 1).unwrap();
        assert!(!neg.holds);
        for n in 1..=2 {
            for m in 1..=2 {
                assert!(is_super_strongly_fractal_at_depth(&grig(), n, m).unwrap().holds);
            }
        }
        for n in 0..=2 {
            for m in 1..=(4 - n) {
                let r = is_super_strongly_fractal_at_depth(&w2(), n, m);
                assert!(r.as_ref().map(|r| r.holds).unwrap_or(false), "n={n} m={m} {r:?}");
            }
        }
    }

    #[test]
    fn closures() {
        let id = Portrait::identity(2, 4);
        assert_eq!(closure_of_portrait(&id, 2, 100).unwrap().order(), 1);
        let g = grig();
        let aut = catalog("grigorchuk").unwrap();
        let b = aut.state_portrait(aut.state("b").unwrap(), 6).unwrap();
        for k in 1..=3 {
            let c = closure_of_portrait(&b, k, DEFAULT_CAP).unwrap();
            assert_eq!(c.order(), g.slice(k).unwrap().order());
        }
        let word = aut.parse_word("d").unwrap();
        assert_eq!(
            cyclic_at_depth(&ElementSpec::Word(aut.clone(), word), &g, 3),
            CyclicityAtDepth::Equal { order: 128 }
        );
        assert!(matches!(
            cyclic_at_depth(&ElementSpec::Word(aut.clone(), vec![]), &g, 2),
            CyclicityAtDepth::Proper { closure_order: 1, .. }
        ));
        let a = aut.parse_word("a").unwrap();
        assert!(matches!(
            cyclic_at_depth(&ElementSpec::Word(aut, a), &g, 2),
            CyclicityAtDepth::Proper { .. }
        ));
    }

    #[test]
    fn bsv_closures() {
        let aut = catalog("bsv").unwrap();
        let group = Group::new(AutomatonGroup::new(aut.clone()).unwrap(), DEFAULT_CAP);
        for k in 1..=3 {
            let ab = aut.parse_word("ab").unwrap();
            let by_word = closure_of_word(&aut, &ab, k, DEFAULT_CAP).unwrap();
            let portrait = aut
                .state_portrait(ab[0], k + 3)
                .unwrap()
                .compose(&aut.state_portrait(ab[1], k + 3).unwrap())
                .unwrap();
            let by_portrait = closure_of_portrait(&portrait, k, DEFAULT_CAP).unwrap();
            let full = group.slice(k).unwrap();
            assert_eq!(by_word.order(), full.order());
            assert_eq!(by_portrait.order(), full.order());
        }
        let a = aut.parse_word("a").unwrap();
        assert!(matches!(
            cyclic_at_depth(&ElementSpec::Word(aut.clone(), a), &group, 3),
            CyclicityAtDepth::Proper { .. }
        ));
        let b = aut.parse_word("b").unwrap();
        assert!(matches!(
            cyclic_at_depth(&ElementSpec::Word(aut, b), &group, 3),
            CyclicityAtDepth::Proper { .. }
        ));
    }

    #[test]
    fn cones() {
        let w = w2();
        let s1 = w.slice(1).unwrap();
        let s2 = w.slice(2).unwrap();
        let st1 = ConeSpec::stabilizer(2, 1);
        st1.check_in(&s1).unwrap();
        let refined = st1.refine(&s2).unwrap();
        assert_eq!(refined.len(), 4);
        let outside = ConeSpec::singleton(Portrait::rooted(&Perm::cycle(2), 2));
        assert!(outside.check_in(&s1).is_err());
        assert_eq!(ConeSpec::full(&s2).len(), 8);
    }
}
