//! Finite-depth automorphisms of the `m`-adic rooted tree.
//!
//! A [`Portrait`] of depth `n` stores one permutation label for every vertex
//! of length `< n`, in breadth-first lexicographic order. The vertex with
//! breadth-first index `i` has children `m·i + 1 + x` for `x in 0..m`, and the
//! descendants of `i` at relative level `k` occupy the contiguous range
//! starting at `m^k·i + (m^k − 1)/(m − 1)`.
//!
//! Actions are on the right: `(xu)^g = x^{g|_∅} u^{g|_x}`, and
//! `(gh)|_v = g|_v · h|_{v^g}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{check_arity, is_bijection, Perm};

/// Number of vertices of length `< depth`.
pub fn vertex_count(m: usize, depth: usize) -> usize {
    (0..depth).map(|k| m.pow(k as u32)).sum()
}

/// Breadth-first index of the first descendant of `index` at relative level `k`.
#[inline]
pub(crate) fn first_descendant(m: usize, index: usize, k: usize) -> usize {
    m.pow(k as u32) * index + vertex_count(m, k)
}

/// A vertex of the tree: a finite word over `{1, …, m}`.
///
/// Letters are stored 0-based. `Display` and `FromStr` use the 1-based digit
/// string (`""` is the root); for `m > 9` letters are separated by dots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Vertex {
        Vertex(Vec::new())
    }

    /// From 0-based letters.
    pub fn from_letters(letters: Vec<u8>) -> Vertex {
        Vertex(letters)
    }

    /// From 1-based letters, validated against `m`.
    pub fn from_one_based(m: usize, letters: &[usize]) -> Result<Vertex> {
        letters
            .iter()
            .map(|&x| {
                if (1..=m).contains(&x) {
                    Ok((x - 1) as u8)
                } else {
                    Err(Error::LetterOutOfRange { letter: x, m })
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Vertex)
    }

    pub fn parse(m: usize, s: &str) -> Result<Vertex> {
        let s = s.trim();
        let letters: Vec<usize> = if s.contains('.') {
            s.split('.')
                .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad vertex `{s}`"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Invalid(format!("bad vertex `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        Vertex::from_one_based(m, &letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, x: usize) -> Vertex {
        let mut w = self.0.clone();
        w.push(x as u8);
        Vertex(w)
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Vertex(w)
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Breadth-first index in an `m`-ary tree.
    pub fn index(&self, m: usize) -> usize {
        self.0.iter().fold(0, |i, &x| m * i + 1 + x as usize)
    }

    /// Rank among the vertices of the same level (lexicographic).
    pub fn position(&self, m: usize) -> usize {
        self.0.iter().fold(0, |i, &x| m * i + x as usize)
    }

    /// The vertex of length `level` with lexicographic rank `pos`.
    pub fn from_position(m: usize, level: usize, mut pos: usize) -> Vertex {
        let mut w = vec![0u8; level];
        for slot in w.iter_mut().rev() {
            *slot = (pos % m) as u8;
            pos /= m;
        }
        Vertex(w)
    }

    /// All vertices of length exactly `level`, lexicographically.
    pub fn level(m: usize, level: usize) -> impl Iterator<Item = Vertex> {
        (0..m.pow(level as u32)).map(move |p| Vertex::from_position(m, level, p))
    }

    /// All vertices of length `<= depth`, breadth-first.
    pub fn up_to(m: usize, depth: usize) -> impl Iterator<Item = Vertex> {
        (0..=depth).flat_map(move |k| Vertex::level(m, k))
    }

    pub fn to_string_for(&self, m: usize) -> String {
        if m > 9 {
            self.0
                .iter()
                .map(|&x| (x as usize + 1).to_string())
                .collect::<Vec<_>>()
                .join(".")
        } else {
            self.0.iter().map(|&x| char::from(b'1' + x)).collect()
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({:?})", self.to_string_for(9))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().any(|&x| x >= 9) {
            f.write_str(&self.to_string_for(10))
        } else {
            f.write_str(&self.to_string_for(9))
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    /// Parses without an arity bound other than the digit range.
    fn from_str(s: &str) -> Result<Vertex> {
        Vertex::parse(255, s)
    }
}

/// An automorphism of the depth-`n` truncated `m`-adic tree.
///
/// Equality and hashing are structural; since storage is canonical this is
/// equality in `Aut T_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    m: usize,
    depth: usize,
    /// `m` bytes per vertex, vertices in breadth-first order.
    labels: Box<[u8]>,
}

impl Portrait {
    pub fn identity(m: usize, depth: usize) -> Portrait {
        let labels = (0..vertex_count(m, depth)).flat_map(|_| 0..m as u8).collect();
        Portrait { m, depth, labels }
    }

    /// The rooted automorphism with label `perm` at the root.
    pub fn rooted(perm: &Perm, depth: usize) -> Portrait {
        let mut p = Portrait::identity(perm.degree(), depth);
        if depth > 0 {
            p.labels[..perm.degree()].copy_from_slice(perm.images());
        }
        p
    }

    /// Builds a portrait from labels listed in breadth-first order.
    pub fn from_labels(m: usize, depth: usize, labels: &[Perm]) -> Result<Portrait> {
        check_arity(m)?;
        if labels.len() != vertex_count(m, depth) {
            return Err(Error::MalformedPortrait(format!(
                "expected {} labels, got {}",
                vertex_count(m, depth),
                labels.len()
            )));
        }
        let mut flat = Vec::with_capacity(labels.len() * m);
        for p in labels {
            if p.degree() != m {
                return Err(Error::ArityMismatch(m, p.degree()));
            }
            flat.extend_from_slice(p.images());
        }
        Ok(Portrait {
            m,
            depth,
            labels: flat.into_boxed_slice(),
        })
    }

    /// Builds a portrait by evaluating `f` at every vertex of length `< depth`.
    pub fn from_fn(m: usize, depth: usize, mut f: impl FnMut(&Vertex) -> Perm) -> Result<Portrait> {
        let labels: Vec<Perm> = Vertex::up_to(m, depth.saturating_sub(1))
            .take(vertex_count(m, depth))
            .map(|v| f(&v))
            .collect();
        Portrait::from_labels(m, depth, &labels)
    }

    /// Wraps raw breadth-first label bytes; used by hot paths that already
    /// know the bytes are valid.
    pub(crate) fn from_raw(m: usize, depth: usize, labels: Box<[u8]>) -> Portrait {
        debug_assert_eq!(labels.len(), vertex_count(m, depth) * m);
        Portrait { m, depth, labels }
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn raw_labels(&self) -> &[u8] {
        &self.labels
    }

    #[inline]
    pub(crate) fn label_at(&self, index: usize) -> &[u8] {
        &self.labels[index * self.m..(index + 1) * self.m]
    }

    pub fn is_identity(&self) -> bool {
        self.labels
            .chunks(self.m)
            .all(|c| c.iter().enumerate().all(|(x, &y)| x == y as usize))
    }

    fn check_vertex(&self, v: &Vertex, max_len: usize) -> Result<()> {
        if let Some(&x) = v.letters().iter().find(|&&x| x as usize >= self.m) {
            return Err(Error::LetterOutOfRange {
                letter: x as usize + 1,
                m: self.m,
            });
        }
        if v.len() > max_len {
            return Err(Error::VertexTooDeep {
                len: v.len(),
                depth: max_len,
            });
        }
        Ok(())
    }

    /// The label `g|_v^1`.
    pub fn label(&self, v: &Vertex) -> Result<Perm> {
        if v.len() >= self.depth {
            self.check_vertex(v, self.depth.saturating_sub(1))?;
            return Err(Error::VertexTooDeep {
                len: v.len(),
                depth: self.depth,
            });
        }
        self.check_vertex(v, self.depth)?;
        Perm::from_images(self.label_at(v.index(self.m)).to_vec())
    }

    /// The image `v^g`.
    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        self.check_vertex(v, self.depth)?;
        let mut index = 0;
        let image = v
            .letters()
            .iter()
            .map(|&x| {
                let y = self.label_at(index)[x as usize];
                index = self.m * index + 1 + x as usize;
                y
            })
            .collect();
        Ok(Vertex::from_letters(image))
    }

    /// Left-to-right product `g·h`; the deeper factor is truncated to the
    /// common depth.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        if self.m != other.m {
            return Err(Error::ArityMismatch(self.m, other.m));
        }
        let m = self.m;
        let depth = self.depth.min(other.depth);
        let mut out = vec![0u8; vertex_count(m, depth) * m];
        // (source index, index of its image under g)
        let mut stack = Vec::new();
        if depth > 0 {
            stack.push((0usize, 0usize, 0usize));
        }
        while let Some((i, j, level)) = stack.pop() {
            let g = self.label_at(i);
            let h = other.label_at(j);
            for (x, &gx) in g.iter().enumerate() {
                let gx = gx as usize;
                out[i * m + x] = h[gx];
                if level + 1 < depth {
                    stack.push((m * i + 1 + x, m * j + 1 + gx, level + 1));
                }
            }
        }
        Ok(Portrait::from_raw(m, depth, out.into_boxed_slice()))
    }

    pub fn inverse(&self) -> Portrait {
        let m = self.m;
        let mut out = vec![0u8; self.labels.len()];
        let mut stack = Vec::new();
        if self.depth > 0 {
            stack.push((0usize, 0usize, 0usize));
        }
        while let Some((i, j, level)) = stack.pop() {
            let g = self.label_at(i);
            for (x, &gx) in g.iter().enumerate() {
                let gx = gx as usize;
                out[j * m + gx] = x as u8;
                if level + 1 < self.depth {
                    stack.push((m * i + 1 + x, m * j + 1 + gx, level + 1));
                }
            }
        }
        Portrait::from_raw(m, self.depth, out.into_boxed_slice())
    }

    /// The section `g|_v` of depth `depth − |v|`.
    pub fn section(&self, v: &Vertex) -> Result<Portrait> {
        self.check_vertex(v, self.depth)?;
        Ok(self.section_at(v.index(self.m), self.depth - v.len()))
    }

    /// Section at breadth-first `index`, truncated to `depth` (which must fit).
    pub(crate) fn section_at(&self, index: usize, depth: usize) -> Portrait {
        let m = self.m;
        let mut out = Vec::with_capacity(vertex_count(m, depth) * m);
        for k in 0..depth {
            let start = first_descendant(m, index, k);
            let len = m.pow(k as u32);
            out.extend_from_slice(&self.labels[start * m..(start + len) * m]);
        }
        Portrait::from_raw(m, depth, out.into_boxed_slice())
    }

    /// `g|_v` truncated to depth `k`.
    pub fn section_truncated(&self, v: &Vertex, k: usize) -> Result<Portrait> {
        self.check_vertex(v, self.depth)?;
        if v.len() + k > self.depth {
            return Err(Error::DepthTooLarge {
                requested: v.len() + k,
                available: self.depth,
            });
        }
        Ok(self.section_at(v.index(self.m), k))
    }

    /// Forgets all labels at depth `>= k`.
    pub fn truncate(&self, k: usize) -> Result<Portrait> {
        if k > self.depth {
            return Err(Error::DepthTooLarge {
                requested: k,
                available: self.depth,
            });
        }
        Ok(Portrait::from_raw(
            self.m,
            k,
            self.labels[..vertex_count(self.m, k) * self.m].into(),
        ))
    }

    /// Extends with identity labels down to depth `k` (the finitary
    /// automorphism with this pattern). Truncates if `k` is smaller.
    pub fn extend(&self, k: usize) -> Portrait {
        if k <= self.depth {
            return self.truncate(k).expect("k <= depth");
        }
        let mut out = self.labels.to_vec();
        for _ in vertex_count(self.m, self.depth)..vertex_count(self.m, k) {
            out.extend(0..self.m as u8);
        }
        Portrait::from_raw(self.m, k, out.into_boxed_slice())
    }

    /// `g * v`: the automorphism of depth `total_depth` that acts as `g`
    /// below `v` and trivially everywhere else. `g` is truncated, or extended
    /// by identity labels, to depth `total_depth − |v|`.
    pub fn graft(&self, v: &Vertex, total_depth: usize) -> Result<Portrait> {
        self.check_vertex(v, total_depth)?;
        let m = self.m;
        let inner = self.extend(total_depth - v.len());
        let mut out = Portrait::identity(m, total_depth).labels.into_vec();
        let index = v.index(m);
        for k in 0..inner.depth {
            let start = first_descendant(m, index, k);
            let len = m.pow(k as u32);
            let src = vertex_count(m, k);
            out[start * m..(start + len) * m].copy_from_slice(&inner.labels[src * m..(src + len) * m]);
        }
        Ok(Portrait::from_raw(m, total_depth, out.into_boxed_slice()))
    }

    /// Labels in canonical order as `(vertex, perm)` pairs.
    pub fn labels(&self) -> impl Iterator<Item = (Vertex, Perm)> + '_ {
        (0..vertex_count(self.m, self.depth)).map(move |i| {
            let level = (0..).find(|&k| i < vertex_count(self.m, k + 1)).unwrap();
            let v = Vertex::from_position(self.m, level, i - vertex_count(self.m, level));
            (
                v,
                Perm::from_images(self.label_at(i).to_vec()).expect("stored labels are bijections"),
            )
        })
    }

    pub fn to_json(&self) -> PortraitJson {
        PortraitJson {
            m: self.m,
            depth: self.depth,
            labels: self
                .labels()
                .map(|(v, p)| (v.to_string_for(self.m), p.one_based()))
                .collect(),
        }
    }

    pub fn from_json(json: &PortraitJson) -> Result<Portrait> {
        check_arity(json.m)?;
        let expected = vertex_count(json.m, json.depth);
        if json.labels.len() != expected {
            return Err(Error::MalformedPortrait(format!(
                "expected {expected} labels, got {}",
                json.labels.len()
            )));
        }
        let mut flat = vec![0u8; expected * json.m];
        let mut seen = vec![false; expected];
        for (v, images) in &json.labels {
            let v = Vertex::parse(json.m, v)?;
            if v.len() >= json.depth {
                return Err(Error::MalformedPortrait(format!("vertex {v} too deep")));
            }
            let i = v.index(json.m);
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::MalformedPortrait(format!("duplicate vertex {v}")));
            }
            if images.len() != json.m {
                return Err(Error::ArityMismatch(json.m, images.len()));
            }
            let p = Perm::from_one_based(images)?;
            flat[i * json.m..(i + 1) * json.m].copy_from_slice(p.images());
        }
        debug_assert!(flat.chunks(json.m).all(is_bijection));
        Ok(Portrait::from_raw(json.m, json.depth, flat.into_boxed_slice()))
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait(m={}, depth={}; ", self.m, self.depth)?;
        for (i, (v, p)) in self.labels().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if v.is_empty() {
                write!(f, "∅:{p}")?;
            } else {
                write!(f, "{}:{p}", v.to_string_for(self.m))?;
            }
        }
        write!(f, ")")
    }
}

/// Serialized form: `{"m", "depth", "labels": [[vertex, images], …]}` with
/// 1-based letters and the root written as `""`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitJson {
    pub m: usize,
    pub depth: usize,
    pub labels: Vec<(String, Vec<usize>)>,
}

impl Serialize for Portrait {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Portrait {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Portrait, D::Error> {
        let json = PortraitJson::deserialize(d)?;
        Portrait::from_json(&json).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigma() -> Perm {
        Perm::cycle(2)
    }

    fn v(s: &str) -> Vertex {
        Vertex::parse(3, s).unwrap()
    }

    /// Portrait built from the recursion ψ(g) = (g_1, …, g_m)π, independent of
    /// the automaton module.
    pub(crate) fn recursive(m: usize, depth: usize, defs: &[(Perm, Vec<usize>)], state: usize) -> Portrait {
        Portrait::from_fn(m, depth, |w| {
            let s = w.letters().iter().fold(state, |s, &x| defs[s].1[x as usize]);
            defs[s].0.clone()
        })
        .unwrap()
    }

    /// Grigorchuk states in the order a, b, c, d, 1.
    pub(crate) fn grigorchuk(depth: usize) -> Vec<Portrait> {
        let s = sigma();
        let id = Perm::identity(2);
        let defs = vec![
            (s, vec![4, 4]),
            (id.clone(), vec![0, 2]),
            (id.clone(), vec![0, 3]),
            (id.clone(), vec![4, 1]),
            (id, vec![4, 4]),
        ];
        (0..5).map(|i| recursive(2, depth, &defs, i)).collect()
    }

    #[test]
    fn vertex_indexing() {
        let m = 3;
        for (i, w) in Vertex::up_to(m, 3).enumerate() {
            assert_eq!(w.index(m), i);
        }
        assert_eq!(v("").index(3), 0);
        assert_eq!(v("12").to_string(), "12");
        assert!(Vertex::parse(2, "13").is_err());
    }

    #[test]
    fn apply_examples() {
        let id = Portrait::identity(2, 3);
        assert_eq!(id.apply(&v("121")).unwrap(), v("121"));
        let rooted = Portrait::rooted(&sigma(), 3);
        assert_eq!(rooted.apply(&v("112")).unwrap(), v("212"));
        // b|_2 = c has a trivial root label, so b fixes 21; b|_1 = a swaps below 1.
        let g = grigorchuk(4);
        assert_eq!(g[1].apply(&v("21")).unwrap(), v("21"));
        assert_eq!(g[1].apply(&v("12")).unwrap(), v("11"));
        assert_eq!(g[3].apply(&v("212")).unwrap(), v("211"));
        assert!(matches!(id.apply(&v("1111")), Err(Error::VertexTooDeep { .. })));
    }

    #[test]
    fn compose_and_inverse_examples() {
        let g = grigorchuk(4);
        let id = Portrait::identity(2, 4);
        assert_eq!(g[1].compose(&id).unwrap(), g[1]);
        for x in &g {
            assert_eq!(x.compose(&x.inverse()).unwrap(), id);
        }
        assert_eq!(g[1].compose(&g[2]).unwrap(), g[3]);
        assert_eq!(id.inverse(), id);
        let c3 = Perm::cycle(3);
        assert_eq!(Portrait::rooted(&c3, 2).inverse(), Portrait::rooted(&c3.inverse(), 2));
    }

    /// Relation bc = d checked by acting on every depth-4 word.
    #[test]
    fn bc_equals_d_on_all_words() {
        let g = grigorchuk(4);
        let bc = g[1].compose(&g[2]).unwrap();
        for w in Vertex::level(2, 4) {
            let via_factors = g[2].apply(&g[1].apply(&w).unwrap()).unwrap();
            assert_eq!(bc.apply(&w).unwrap(), via_factors);
            assert_eq!(g[3].apply(&w).unwrap(), via_factors);
        }
    }

    #[test]
    fn involutions_at_depth_five() {
        for x in grigorchuk(5) {
            assert!(x.compose(&x).unwrap().is_identity());
            assert_eq!(x.inverse(), x);
        }
    }

    #[test]
    fn sections_and_labels() {
        let g = grigorchuk(5);
        let tv = |s: &str| Vertex::parse(2, s).unwrap();
        assert_eq!(g[1].section(&Vertex::root()).unwrap(), g[1]);
        assert_eq!(g[1].section(&tv("1")).unwrap(), g[0].truncate(4).unwrap());
        assert_eq!(g[1].section(&tv("2")).unwrap(), g[2].truncate(4).unwrap());
        assert!(g[3].label(&Vertex::root()).unwrap().is_identity());
        assert!(g[3].label(&tv("2")).unwrap().is_identity());
        assert_eq!(g[3].label(&tv("21")).unwrap(), sigma());
        assert!(g[3].label(&tv("11111")).is_err());
        let rooted = Portrait::rooted(&sigma(), 2);
        assert_eq!(rooted.label(&Vertex::root()).unwrap(), sigma());
        assert!(g[1].truncate(1).unwrap().is_identity());
    }

    #[test]
    fn basilica_sections() {
        let id = Perm::identity(2);
        let defs = vec![(sigma(), vec![2, 1]), (id.clone(), vec![2, 0]), (id, vec![2, 2])];
        let a = recursive(2, 4, &defs, 0);
        let b = recursive(2, 3, &defs, 1);
        assert_eq!(a.section(&Vertex::parse(2, "2").unwrap()).unwrap(), b);
        assert!(a.section(&Vertex::parse(2, "1").unwrap()).unwrap().is_identity());
    }

    #[test]
    fn graft_examples() {
        let tv = |s: &str| Vertex::parse(2, s).unwrap();
        assert!(Portrait::identity(2, 2).graft(&tv("1"), 4).unwrap().is_identity());
        let g = Portrait::rooted(&sigma(), 1).graft(&tv("21"), 3).unwrap();
        assert_eq!(g.apply(&tv("211")).unwrap(), tv("212"));
        assert_eq!(g.apply(&tv("111")).unwrap(), tv("111"));
        assert!(Portrait::identity(2, 1).graft(&tv("1111"), 3).is_err());
    }

    #[test]
    fn truncate_examples() {
        let g = grigorchuk(4);
        assert_eq!(g[1].truncate(4).unwrap(), g[1]);
        assert!(g[1].truncate(5).is_err());
        assert_eq!(Portrait::identity(2, 0).depth(), 0);
        assert!(Portrait::identity(2, 0)
            .compose(&Portrait::identity(2, 0))
            .unwrap()
            .is_identity());
    }

    #[test]
    fn json_roundtrip_and_format() {
        let g = grigorchuk(2);
        let json = serde_json::to_value(&g[1]).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"m": 2, "depth": 2, "labels": [["", [1, 2]], ["1", [2, 1]], ["2", [1, 2]]]})
        );
        let back: Portrait = serde_json::from_value(json).unwrap();
        assert_eq!(back, g[1]);
        let bad = serde_json::json!({"m": 2, "depth": 1, "labels": [["", [1, 1]]]});
        assert!(serde_json::from_value::<Portrait>(bad).is_err());
    }

    pub(crate) fn arb_portrait(m: usize, depth: usize) -> impl Strategy<Value = Portrait> {
        let n = vertex_count(m, depth);
        proptest::collection::vec(Just((0..m as u8).collect::<Vec<_>>()).prop_shuffle(), n).prop_map(move |labels| {
            let flat: Vec<u8> = labels.into_iter().flatten().collect();
            Portrait::from_raw(m, depth, flat.into_boxed_slice())
        })
    }

    fn arb_pair() -> impl Strategy<Value = (Portrait, Portrait)> {
        (2usize..=3, 0usize..=4).prop_flat_map(|(m, d)| (arb_portrait(m, d), arb_portrait(m, d)))
    }

    proptest! {
        #[test]
        fn section_of_product((g, h) in arb_pair()) {
            let gh = g.compose(&h).unwrap();
            for v in Vertex::up_to(g.arity(), g.depth()) {
                let lhs = gh.section(&v).unwrap();
                let rhs = g.section(&v).unwrap().compose(&h.section(&g.apply(&v).unwrap()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn right_action((g, h) in arb_pair()) {
            let gh = g.compose(&h).unwrap();
            for v in Vertex::up_to(g.arity(), g.depth()) {
                prop_assert_eq!(gh.apply(&v).unwrap(), h.apply(&g.apply(&v).unwrap()).unwrap());
            }
        }

        #[test]
        fn action_is_level_bijection_preserving_prefixes((g, _h) in arb_pair()) {
            let m = g.arity();
            for k in 0..=g.depth() {
                let images: std::collections::HashSet<_> =
                    Vertex::level(m, k).map(|v| g.apply(&v).unwrap()).collect();
                prop_assert_eq!(images.len(), m.pow(k as u32));
            }
            for v in Vertex::up_to(m, g.depth()).filter(|v| v.len() < g.depth()) {
                for x in 0..m {
                    let c = v.child(x);
                    prop_assert!(g.apply(&v).unwrap().is_prefix_of(&g.apply(&c).unwrap()));
                }
            }
        }

        #[test]
        fn truncation_is_homomorphism((g, h) in arb_pair(), k in 0usize..=4) {
            let k = k.min(g.depth());
            prop_assert_eq!(
                g.compose(&h).unwrap().truncate(k).unwrap(),
                g.truncate(k).unwrap().compose(&h.truncate(k).unwrap()).unwrap()
            );
            prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
        }

        #[test]
        fn graft_roundtrip(g in arb_portrait(2, 3), letters in proptest::collection::vec(0u8..2, 0..=3), n in 3usize..=5) {
            let v = Vertex::from_letters(letters);
            prop_assume!(v.len() <= n);
            let grafted = g.graft(&v, n).unwrap();
            prop_assert_eq!(grafted.section(&v).unwrap(), g.extend(n - v.len()));
            for w in Vertex::up_to(2, n - 1) {
                if !v.is_prefix_of(&w) {
                    prop_assert!(grafted.label(&w).unwrap().is_identity());
                }
            }
        }

        #[test]
        fn json_roundtrip(g in arb_portrait(3, 2)) {
            let s = serde_json::to_string(&g).unwrap();
            prop_assert_eq!(serde_json::from_str::<Portrait>(&s).unwrap(), g);
        }
    }
}
