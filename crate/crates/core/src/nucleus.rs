//! Contracting nuclei and the cyclicity certificate for automaton groups.
//!
//! Group elements are compared through [`CanonicalElement`], the minimal
//! automaton of an element renumbered breadth-first from its initial state.
//! Two finite-state automorphisms are equal iff their canonical elements
//! are, so no depth bound is involved anywhere in this module.

use std::collections::{HashMap, VecDeque};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{refine_partition, MealyAutomaton, StateId};
use crate::error::{Error, Result};
use crate::tree::{Portrait, Vertex};

pub const DEFAULT_MAX_SIZE: usize = 512;
pub const DEFAULT_MAX_ITER: usize = 64;

/// Minimal automaton of an automorphism; state 0 is the element itself,
/// the other states are its sections in breadth-first order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalElement {
    outputs: Vec<Vec<u8>>,
    transitions: Vec<Vec<u32>>,
}

/// Canonical forms for every state of an arbitrary automaton.
struct Canon {
    class_of: Vec<usize>,
    /// Per class: the canonical element and, per canonical state, one
    /// original state realising it.
    forms: Vec<Option<(CanonicalElement, Vec<usize>)>>,
    outputs: Vec<Vec<u8>>,
    transitions: Vec<Vec<usize>>,
    /// Representative original state of each class.
    rep: Vec<usize>,
}

impl Canon {
    fn new(outputs: &[Vec<u8>], transitions: &[Vec<usize>], prefer: impl Fn(usize) -> usize) -> Canon {
        let (class_of, _) = refine_partition(outputs, transitions);
        let classes = class_of.iter().max().map_or(0, |&c| c + 1);
        let mut rep = vec![usize::MAX; classes];
        for (s, &c) in class_of.iter().enumerate() {
            if rep[c] == usize::MAX || prefer(s) < prefer(rep[c]) {
                rep[c] = s;
            }
        }
        let q_out = rep.iter().map(|&s| outputs[s].clone()).collect();
        let q_tr = rep
            .iter()
            .map(|&s| transitions[s].iter().map(|&t| class_of[t]).collect())
            .collect();
        Canon {
            class_of,
            forms: vec![None; classes],
            outputs: q_out,
            transitions: q_tr,
            rep,
        }
    }

    fn form(&mut self, s: usize) -> &(CanonicalElement, Vec<usize>) {
        let c = self.class_of[s];
        if self.forms[c].is_none() {
            let (e, order) = bfs_renumber(&self.outputs, &self.transitions, c);
            let reps = order.iter().map(|&k| self.rep[k]).collect();
            self.forms[c] = Some((e, reps));
        }
        self.forms[c].as_ref().expect("just filled")
    }
}

/// Renumbers the part of a (minimal) automaton reachable from `start`.
fn bfs_renumber(outputs: &[Vec<u8>], transitions: &[Vec<usize>], start: usize) -> (CanonicalElement, Vec<usize>) {
    let mut index = HashMap::from([(start, 0u32)]);
    let mut order = vec![start];
    let mut i = 0;
    while i < order.len() {
        for &t in &transitions[order[i]] {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                e.insert(order.len() as u32);
                order.push(t);
            }
        }
        i += 1;
    }
    let e = CanonicalElement {
        outputs: order.iter().map(|&s| outputs[s].clone()).collect(),
        transitions: order
            .iter()
            .map(|&s| transitions[s].iter().map(|t| index[t]).collect())
            .collect(),
    };
    (e, order)
}

/// Per-state outputs and transitions.
type RawParts = (Vec<Vec<u8>>, Vec<Vec<usize>>);

fn raw_parts(aut: &MealyAutomaton) -> Result<RawParts> {
    let outputs = aut
        .states()
        .map(|s| aut.output(s).map(|p| p.images().to_vec()))
        .collect::<Result<_>>()?;
    let transitions = aut
        .states()
        .map(|s| (0..aut.arity()).map(|x| aut.next(s, x).0).collect())
        .collect();
    Ok((outputs, transitions))
}

impl CanonicalElement {
    pub fn identity(m: usize) -> CanonicalElement {
        CanonicalElement {
            outputs: vec![(0..m as u8).collect()],
            transitions: vec![vec![0; m]],
        }
    }

    /// Canonical form of `o_s`.
    pub fn of_state(aut: &MealyAutomaton, s: StateId) -> Result<CanonicalElement> {
        aut.ensure_invertible()?;
        let (outputs, transitions) = raw_parts(aut)?;
        let mut canon = Canon::new(&outputs, &transitions, |_| 0);
        Ok(canon.form(s.0).0.clone())
    }

    /// Canonical forms of all states of `aut`.
    pub fn of_all_states(aut: &MealyAutomaton) -> Result<Vec<CanonicalElement>> {
        aut.ensure_invertible()?;
        let (outputs, transitions) = raw_parts(aut)?;
        let mut canon = Canon::new(&outputs, &transitions, |_| 0);
        Ok(aut.states().map(|s| canon.form(s.0).0.clone()).collect())
    }

    /// Canonical form of the product of a word of states.
    pub fn of_word(aut: &MealyAutomaton, word: &[StateId]) -> Result<CanonicalElement> {
        let (wa, _) = aut.word_automaton(word)?;
        CanonicalElement::of_state(&wa, StateId(0))
    }

    pub fn arity(&self) -> usize {
        self.outputs[0].len()
    }

    /// Number of distinct sections, the element included.
    pub fn states(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_identity(&self) -> bool {
        self.outputs.len() == 1 && self.outputs[0].iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    /// The section at state `s` of this element's automaton.
    fn rooted_at(&self, s: usize) -> CanonicalElement {
        if s == 0 {
            return self.clone();
        }
        let tr: Vec<Vec<usize>> = self
            .transitions
            .iter()
            .map(|r| r.iter().map(|&t| t as usize).collect())
            .collect();
        bfs_renumber(&self.outputs, &tr, s).0
    }

    /// The section at the letter `x` (0-based).
    pub fn section(&self, x: usize) -> CanonicalElement {
        self.rooted_at(self.transitions[0][x] as usize)
    }

    pub fn section_at(&self, v: &Vertex) -> CanonicalElement {
        let s = v
            .letters()
            .iter()
            .fold(0usize, |s, &x| self.transitions[s][x as usize] as usize);
        self.rooted_at(s)
    }

    /// Automaton with the states of this element, named `prefix0, prefix1, …`
    /// (state 0 named `prefix`).
    pub fn to_automaton(&self, prefix: &str) -> MealyAutomaton {
        let names = (0..self.states())
            .map(|i| {
                if i == 0 {
                    prefix.to_string()
                } else {
                    format!("{prefix}{i}")
                }
            })
            .collect();
        let tr = self
            .transitions
            .iter()
            .map(|r| r.iter().map(|&t| t as usize).collect())
            .collect();
        MealyAutomaton::new(self.arity(), names, tr, self.outputs.clone()).expect("canonical elements are well formed")
    }

    pub fn portrait(&self, depth: usize) -> Portrait {
        self.to_automaton("g")
            .state_portrait(StateId(0), depth)
            .expect("canonical elements are invertible")
    }

    pub fn is_finitary(&self) -> bool {
        self.to_automaton("g").is_finitary_state(StateId(0))
    }

    /// Pair automaton of `self · other`; state 0 is the product.
    fn product_raw(&self, other: &CanonicalElement) -> (RawParts, Vec<(u32, u32)>) {
        let m = self.arity();
        let mut index = HashMap::from([((0u32, 0u32), 0usize)]);
        let mut pairs = vec![(0u32, 0u32)];
        let mut outputs = Vec::new();
        let mut transitions = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let (op, oq) = (&self.outputs[p as usize], &other.outputs[q as usize]);
            outputs.push((0..m).map(|x| oq[op[x] as usize]).collect());
            let row = (0..m)
                .map(|x| {
                    let next = (
                        self.transitions[p as usize][x],
                        other.transitions[q as usize][op[x] as usize],
                    );
                    let n = pairs.len();
                    *index.entry(next).or_insert_with(|| {
                        pairs.push(next);
                        n
                    })
                })
                .collect();
            transitions.push(row);
            i += 1;
        }
        ((outputs, transitions), pairs)
    }

    pub fn product(&self, other: &CanonicalElement) -> CanonicalElement {
        let ((o, t), _) = self.product_raw(other);
        let mut canon = Canon::new(&o, &t, |_| 0);
        canon.form(0).0.clone()
    }
}

/// A group element with a representative word for each of its states.
#[derive(Clone, Debug)]
struct Tracked {
    element: CanonicalElement,
    words: Vec<Vec<StateId>>,
}

/// States lying on a directed cycle or reachable from one.
fn recurrent_states(transitions: &[Vec<usize>]) -> Vec<bool> {
    let n = transitions.len();
    let reach = |from: usize| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = transitions[from].clone();
        while let Some(i) = stack.pop() {
            if !std::mem::replace(&mut seen[i], true) {
                stack.extend(&transitions[i]);
            }
        }
        seen
    };
    let mut out = vec![false; n];
    for i in 0..n {
        if out[i] {
            continue;
        }
        let r = reach(i);
        if r[i] {
            for (j, &b) in r.iter().enumerate() {
                out[j] |= b;
            }
        }
    }
    out
}

/// The sections of `g · h` that recur at arbitrarily deep levels, with
/// words.
fn recurrent_sections(g: &Tracked, h: &Tracked, ident: &[bool]) -> Vec<Tracked> {
    let ((outputs, transitions), pairs) = g.element.product_raw(&h.element);
    let words: Vec<Vec<StateId>> = pairs
        .iter()
        .map(|&(p, q)| {
            g.words[p as usize]
                .iter()
                .chain(&h.words[q as usize])
                .copied()
                .filter(|s| !ident[s.0])
                .collect()
        })
        .collect();
    let recurrent = recurrent_states(&transitions);
    let mut canon = Canon::new(&outputs, &transitions, |s| words[s].len());
    let mut classes = vec![false; canon.rep.len()];
    let mut out = Vec::new();
    for s in (0..outputs.len()).filter(|&s| recurrent[s]) {
        if std::mem::replace(&mut classes[canon.class_of[s]], true) {
            continue;
        }
        let (element, reps) = canon.form(s).clone();
        out.push(Tracked {
            element,
            words: reps.iter().map(|&r| words[r].clone()).collect(),
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NucleusStatus {
    Certified,
    CapExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NucleusMember {
    /// A word over the generating states (and their inverses) equal to it.
    pub word: String,
    /// Name of a state of the inverse-closed automaton equal to it.
    pub state: Option<String>,
    pub finitary: bool,
    /// Lies in the nucleus proper (reachable from a cycle of sections).
    pub core: bool,
}

#[derive(Clone, Debug)]
pub struct NucleusResult {
    pub status: NucleusStatus,
    /// The fixed point started from `S ∪ S⁻¹ ∪ {1}`.
    pub members: Vec<NucleusMember>,
    pub iterations: usize,
    /// The inverse-closed automaton whose states spell the member words.
    pub generators: MealyAutomaton,
    elements: Vec<CanonicalElement>,
}

impl NucleusResult {
    pub fn is_certified(&self) -> bool {
        self.status == NucleusStatus::Certified
    }

    pub fn elements(&self) -> &[CanonicalElement] {
        &self.elements
    }

    /// Indices of the members forming the nucleus proper.
    pub fn core(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i].core).collect()
    }

    pub fn core_elements(&self) -> Vec<&CanonicalElement> {
        self.core().into_iter().map(|i| &self.elements[i]).collect()
    }

    /// The automaton whose states are the nucleus proper, named by their
    /// words.
    pub fn nucleus_automaton(&self) -> Result<MealyAutomaton> {
        if !self.is_certified() {
            return Err(Error::NucleusNotCertified("cap exceeded".into()));
        }
        let core = self.core();
        let pos: HashMap<&CanonicalElement, usize> =
            core.iter().enumerate().map(|(k, &i)| (&self.elements[i], k)).collect();
        let m = self.generators.arity();
        let mut transitions = Vec::new();
        let mut outputs = Vec::new();
        for &i in &core {
            let e = &self.elements[i];
            outputs.push(e.outputs[0].clone());
            transitions.push((0..m).map(|x| pos[&e.section(x)]).collect());
        }
        let names = core.iter().map(|&i| self.members[i].word.clone()).collect();
        MealyAutomaton::new(m, names, transitions, outputs)
    }
}

fn word_string(aut: &MealyAutomaton, w: &[StateId]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(|&s| aut.name(s)).collect::<Vec<_>>().join(" ")
    }
}

/// Members reachable from a cycle of the single-letter section graph.
fn core_mask(elements: &[CanonicalElement]) -> Vec<bool> {
    let pos: HashMap<&CanonicalElement, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let m = elements.first().map_or(0, CanonicalElement::arity);
    let succ: Vec<Vec<usize>> = elements
        .iter()
        .map(|e| (0..m).filter_map(|x| pos.get(&e.section(x)).copied()).collect())
        .collect();
    recurrent_states(&succ)
}

/// Pairs multiplied between cap checks.
const PAIR_CHUNK: usize = 1024;

/// Fixed point of `N ← N ∪ {(gh)|_v : g, h ∈ N, (gh)|_v recurrent}` from
/// `S ∪ S⁻¹ ∪ {1}`, where a section is recurrent if it lies on or below a
/// cycle of the automaton of `gh`, i.e. it occurs at arbitrarily deep
/// vertices. For a contracting group this terminates and the members
/// reachable from cycles of their own section graph form the nucleus.
pub fn compute_nucleus(aut: &MealyAutomaton, max_size: usize, max_iter: usize) -> Result<NucleusResult> {
    aut.ensure_invertible()?;
    let gens = aut.inverse_closure()?;
    let ident = gens.identity_states();
    let (outputs, transitions) = raw_parts(&gens)?;
    let mut canon = Canon::new(&outputs, &transitions, |_| 0);
    let m = aut.arity();

    let mut members: IndexMap<CanonicalElement, Vec<Vec<StateId>>> = IndexMap::new();
    members.insert(CanonicalElement::identity(m), vec![vec![]]);
    for s in gens.states() {
        let (e, reps) = canon.form(s.0).clone();
        let words = reps
            .iter()
            .map(|&r| if ident[r] { vec![] } else { vec![StateId(r)] })
            .collect();
        members.entry(e).or_insert(words);
    }

    let mut status = NucleusStatus::CapExceeded;
    let mut iterations = 0;
    let mut fresh_from = 0;
    while iterations < max_iter && members.len() <= max_size {
        iterations += 1;
        let n = members.len();
        let tracked: Vec<Tracked> = members
            .iter()
            .map(|(e, w)| Tracked {
                element: e.clone(),
                words: w.clone(),
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i >= fresh_from || j >= fresh_from)
            .collect();
        for chunk in pairs.chunks(PAIR_CHUNK) {
            let found: Vec<Vec<Tracked>> = chunk
                .par_iter()
                .map(|&(i, j)| recurrent_sections(&tracked[i], &tracked[j], &ident))
                .collect();
            for t in found.into_iter().flatten() {
                members.entry(t.element).or_insert(t.words);
            }
            if members.len() > max_size {
                break;
            }
        }
        if members.len() == n {
            status = NucleusStatus::Certified;
            break;
        }
        fresh_from = n;
    }

    let elements: Vec<CanonicalElement> = members.keys().cloned().collect();
    let core = core_mask(&elements);
    let state_ids: Vec<StateId> = gens.states().collect();
    let state_of: HashMap<CanonicalElement, String> = state_ids
        .into_iter()
        .rev()
        .map(|s| (canon.form(s.0).0.clone(), gens.name(s).to_string()))
        .collect();
    let members = members
        .iter()
        .enumerate()
        .map(|(i, (e, w))| NucleusMember {
            word: word_string(&gens, &w[0]),
            state: state_of.get(e).cloned(),
            finitary: e.is_finitary(),
            core: core[i],
        })
        .collect();
    Ok(NucleusResult {
        status,
        members,
        iterations,
        generators: gens,
        elements,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateCondition {
    pub state: String,
    pub finitary: bool,
    pub fully_connected: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NucleusCondition {
    pub word: String,
    /// A state of the presentation with the same automorphism.
    pub matching_state: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    FailedI,
    FailedIi,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicityCertificate {
    pub condition_i: Vec<StateCondition>,
    pub condition_i_holds: bool,
    pub condition_ii: Vec<NucleusCondition>,
    pub condition_ii_holds: Option<bool>,
    pub verdict: Verdict,
    pub nucleus_iterations: usize,
    pub suggestion: Option<String>,
}

/// Checks, for the given presentation, that (i) every non-finitary state
/// is fully connected and (ii) the nucleus consists of state automorphisms.
pub fn cyclicity_certificate(aut: &MealyAutomaton, max_size: usize, max_iter: usize) -> Result<CyclicityCertificate> {
    aut.ensure_invertible()?;
    let condition_i: Vec<StateCondition> = aut
        .states()
        .map(|s| {
            let finitary = aut.is_finitary_state(s);
            let fully_connected = aut.is_fully_connected(s);
            StateCondition {
                state: aut.name(s).to_string(),
                finitary,
                fully_connected,
                ok: finitary || fully_connected,
            }
        })
        .collect();
    let condition_i_holds = condition_i.iter().all(|c| c.ok);
    let nucleus = compute_nucleus(aut, max_size, max_iter)?;
    let states = CanonicalElement::of_all_states(aut)?;
    let (condition_ii, condition_ii_holds) = if nucleus.is_certified() {
        let rows: Vec<NucleusCondition> = nucleus
            .core()
            .into_iter()
            .map(|i| NucleusCondition {
                word: nucleus.members[i].word.clone(),
                matching_state: states
                    .iter()
                    .position(|e| *e == nucleus.elements[i])
                    .map(|s| aut.name(StateId(s)).to_string()),
            })
            .collect();
        let holds = rows.iter().all(|r| r.matching_state.is_some());
        (rows, Some(holds))
    } else {
        (Vec::new(), None)
    };
    let verdict = match (condition_i_holds, condition_ii_holds) {
        (_, None) => Verdict::Unknown,
        (false, _) => Verdict::FailedI,
        (true, Some(false)) => Verdict::FailedIi,
        (true, Some(true)) => Verdict::Certified,
    };
    let suggestion = match verdict {
        Verdict::FailedIi => Some("condition (ii) is presentation-relative: retry with the inverse closure or with the nucleus as the state set".into()),
        Verdict::Unknown => Some("nucleus iteration hit its caps; raise them or the group may not be contracting".into()),
        _ => None,
    };
    Ok(CyclicityCertificate {
        condition_i,
        condition_i_holds,
        condition_ii,
        condition_ii_holds,
        verdict,
        nucleus_iterations: nucleus.iterations,
        suggestion,
    })
}

/// The state set, its inverse closure, and the nucleus as a state set.
pub fn presentations(aut: &MealyAutomaton, max_size: usize, max_iter: usize) -> Result<Vec<(String, MealyAutomaton)>> {
    let mut out = vec![
        ("states".to_string(), aut.clone()),
        ("inverse-closure".to_string(), aut.inverse_closure()?),
    ];
    let nucleus = compute_nucleus(aut, max_size, max_iter)?;
    if nucleus.is_certified() {
        out.push(("nucleus".to_string(), nucleus.nucleus_automaton()?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementClass {
    pub finitary: bool,
    /// For non-finitary elements: a vertex (letters 1..m) where the section
    /// is a non-finitary nucleus element, and that element's word.
    pub witness: Option<(String, String)>,
}

/// Finitary/non-finitary, tracking sections of the word into the nucleus.
pub fn classify_element(
    aut: &MealyAutomaton,
    word: &[StateId],
    max_size: usize,
    max_iter: usize,
) -> Result<ElementClass> {
    let nucleus = compute_nucleus(aut, max_size, max_iter)?;
    if !nucleus.is_certified() {
        return Err(Error::NucleusNotCertified(format!(
            "after {} iterations",
            nucleus.iterations
        )));
    }
    let (wa, _) = aut.word_automaton(word)?;
    let finitary = wa.is_finitary_state(StateId(0));
    if finitary {
        return Ok(ElementClass {
            finitary,
            witness: None,
        });
    }
    let core: HashMap<&CanonicalElement, usize> = nucleus
        .core()
        .into_iter()
        .filter(|&i| !nucleus.members[i].finitary)
        .map(|i| (&nucleus.elements[i], i))
        .collect();
    let forms = CanonicalElement::of_all_states(&wa)?;
    // breadth-first over vertices, visiting each section state once
    let mut seen = vec![false; wa.len()];
    let mut queue = VecDeque::from([(StateId(0), Vertex::root())]);
    while let Some((s, v)) = queue.pop_front() {
        if std::mem::replace(&mut seen[s.0], true) {
            continue;
        }
        if let Some(&i) = core.get(&forms[s.0]) {
            return Ok(ElementClass {
                finitary,
                witness: Some((v.to_string_for(aut.arity()), nucleus.members[i].word.clone())),
            });
        }
        for x in 0..aut.arity() {
            queue.push_back((wa.next(s, x), v.child(x)));
        }
    }
    Err(Error::Invalid(
        "no non-finitary nucleus section found; nucleus is inconsistent".into(),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionRow {
    pub length: usize,
    pub level: usize,
    /// `max l_n(g)` over elements of this length; `None` if some section
    /// falls outside the enumerated ball.
    pub max_section_length: Option<usize>,
    pub elements: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub max_len: usize,
    pub depth: usize,
    pub ball_sizes: Vec<usize>,
    pub rows: Vec<ContractionRow>,
    /// Least-squares slope of `max l_depth` against `|g|`.
    pub lambda: Option<f64>,
}

/// Empirical `l_n(g) = max_{|v| = n} |g|_v|` over the ball of radius
/// `max_len` in the generators `S ∪ S⁻¹`. Diagnostic only.
pub fn contraction_data(aut: &MealyAutomaton, depth: usize, max_len: usize) -> Result<ContractionReport> {
    aut.ensure_invertible()?;
    let gens_aut = aut.inverse_closure()?;
    let mut gens: Vec<CanonicalElement> = CanonicalElement::of_all_states(&gens_aut)?
        .into_iter()
        .filter(|e| !e.is_identity())
        .collect();
    gens.dedup();
    let m = aut.arity();
    let mut length: HashMap<CanonicalElement, usize> = HashMap::from([(CanonicalElement::identity(m), 0)]);
    let mut by_len = vec![vec![CanonicalElement::identity(m)]];
    for l in 1..=max_len {
        let next: Vec<CanonicalElement> = by_len[l - 1]
            .par_iter()
            .flat_map_iter(|g| gens.iter().map(move |s| g.product(s)))
            .collect();
        let mut layer = Vec::new();
        for e in next {
            if !length.contains_key(&e) {
                length.insert(e.clone(), l);
                layer.push(e);
            }
        }
        by_len.push(layer);
    }
    let mut rows = Vec::new();
    for (l, layer) in by_len.iter().enumerate() {
        let per_element: Vec<Vec<Option<usize>>> = layer
            .par_iter()
            .map(|g| {
                let mut level = vec![0usize];
                (0..=depth)
                    .map(|n| {
                        if n > 0 {
                            let mut next: Vec<usize> = level
                                .iter()
                                .flat_map(|&s| g.transitions[s].iter().map(|&t| t as usize))
                                .collect();
                            next.sort_unstable();
                            next.dedup();
                            level = next;
                        }
                        level
                            .iter()
                            .map(|&s| length.get(&g.rooted_at(s)).copied())
                            .try_fold(0, |acc, x| x.map(|x| acc.max(x)))
                    })
                    .collect()
            })
            .collect();
        for n in 0..=depth {
            let max = per_element
                .iter()
                .map(|r| r[n])
                .try_fold(0, |acc, x| x.map(|x| acc.max(x)));
            rows.push(ContractionRow {
                length: l,
                level: n,
                max_section_length: max,
                elements: layer.len(),
            });
        }
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.level == depth && r.length > 0 && r.elements > 0)
        .filter_map(|r| r.max_section_length.map(|y| (r.length as f64, y as f64)))
        .collect();
    let lambda = (points.len() >= 2).then(|| {
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(ContractionReport {
        max_len,
        depth,
        ball_sizes: by_len.iter().map(Vec::len).collect(),
        rows,
        lambda,
    })
}
