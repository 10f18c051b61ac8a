//! Permutations of `{1, …, m}` and finite permutation groups.
//!
//! Internally letters are `0..m`; the public text forms (`Display`, JSON)
//! use `1..=m`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A bijection of the alphabet, stored as the image of each letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u8]>);

pub(crate) fn check_arity(m: usize) -> Result<()> {
    if (2..=255).contains(&m) {
        Ok(())
    } else {
        Err(Error::InvalidArity(m))
    }
}

pub(crate) fn is_bijection(images: &[u8]) -> bool {
    let mut seen = vec![false; images.len()];
    images.iter().all(|&y| {
        let y = y as usize;
        y < seen.len() && !std::mem::replace(&mut seen[y], true)
    })
}

impl Perm {
    pub fn identity(m: usize) -> Perm {
        Perm((0..m as u8).collect())
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<u8>) -> Result<Perm> {
        if !is_bijection(&images) {
            return Err(Error::NotAPermutation {
                m: images.len(),
                images: images.iter().map(|&y| y as usize + 1).collect(),
            });
        }
        Ok(Perm(images.into_boxed_slice()))
    }

    /// Builds a permutation from 1-based images, as written in files.
    pub fn from_one_based(images: &[usize]) -> Result<Perm> {
        let m = images.len();
        let bad = || Error::NotAPermutation {
            m,
            images: images.to_vec(),
        };
        let zero: Vec<u8> = images
            .iter()
            .map(|&y| {
                if (1..=m).contains(&y) {
                    Ok((y - 1) as u8)
                } else {
                    Err(bad())
                }
            })
            .collect::<Result<_>>()?;
        Perm::from_images(zero).map_err(|_| bad())
    }

    /// The cycle `(1 2 … m)`, i.e. `x ↦ x + 1 mod m`.
    pub fn cycle(m: usize) -> Perm {
        Perm((0..m).map(|x| ((x + 1) % m) as u8).collect())
    }

    /// The transposition of two 0-based letters.
    pub fn transposition(m: usize, a: usize, b: usize) -> Perm {
        let mut images: Vec<u8> = (0..m as u8).collect();
        images.swap(a, b);
        Perm(images.into_boxed_slice())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&y| y as usize + 1).collect()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    /// Left-to-right product: `x^(self·other) = (x^self)^other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&y| other.0[y as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Perm(inv.into_boxed_slice())
    }

    pub fn pow(&self, e: usize) -> Perm {
        (0..e).fold(Perm::identity(self.degree()), |acc, _| acc.then(self))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.one_based())
    }
}

/// Cycle notation with 1-based letters, `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut wrote = false;
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// A finite subgroup of `Sym(m)`, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    m: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Closure of `generators` under products.
    pub fn generated(m: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        check_arity(m)?;
        if let Some(g) = generators.iter().find(|g| g.degree() != m) {
            return Err(Error::ArityMismatch(m, g.degree()));
        }
        let mut set = BTreeSet::new();
        let id = Perm::identity(m);
        set.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.then(g);
                if set.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(PermGroup {
            m,
            generators,
            elements: set.into_iter().collect(),
        })
    }

    pub fn symmetric(m: usize) -> Result<PermGroup> {
        check_arity(m)?;
        let mut gens = vec![Perm::cycle(m)];
        if m > 2 {
            gens.push(Perm::transposition(m, 0, 1));
        }
        PermGroup::generated(m, gens)
    }

    pub fn cyclic(m: usize) -> Result<PermGroup> {
        PermGroup::generated(m, vec![Perm::cycle(m)])
    }

    /// Parses `sym<m>`, `cyc<m>` or `alt<m>`.
    pub fn parse(spec: &str) -> Result<PermGroup> {
        let spec = spec.trim().to_ascii_lowercase();
        let bad = || Error::Invalid(format!("unknown permutation group `{spec}`"));
        let (kind, digits) = spec.split_at(spec.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        let m: usize = digits.parse().map_err(|_| bad())?;
        match kind {
            "sym" | "s" => PermGroup::symmetric(m),
            "cyc" | "c" => PermGroup::cyclic(m),
            "alt" | "a" => {
                check_arity(m)?;
                let gens = (0..m.saturating_sub(2))
                    .map(|i| {
                        let mut images: Vec<u8> = (0..m as u8).collect();
                        images[i] = (i + 1) as u8;
                        images[i + 1] = (i + 2) as u8;
                        images[i + 2] = i as u8;
                        Perm(images.into_boxed_slice())
                    })
                    .collect();
                PermGroup::generated(m, gens)
            }
            _ => Err(bad()),
        }
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.m];
        seen[0] = true;
        for g in &self.elements {
            seen[g.apply(0)] = true;
        }
        seen.into_iter().all(|s| s)
    }
}
