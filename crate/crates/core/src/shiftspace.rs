//! The elementary abelian group `A ≤ Aut T` over `F_p` and the sequence
//! space it is isomorphic to.
//!
//! `A` consists of the automorphisms whose labels are constant powers of
//! `σ = (1 2 … p)` along each level. Such an element is the exponent
//! sequence `(e_0, e_1, …)`, and taking a section at any vertex is the
//! left shift of that sequence.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{is_prime, row_reduce, EchelonBasis};
use crate::perm::Perm;
use crate::tree::{Portrait, Vertex};

/// Largest prime accepted by default.
pub const MAX_PRIME: u8 = 13;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeqRepr {
    /// A finite prefix of an arbitrary sequence.
    Truncated(Vec<u8>),
    /// `pre` followed by `period` repeated forever.
    EventuallyPeriodic { pre: Vec<u8>, period: Vec<u8> },
}

/// A sequence over `F_p`. Eventually periodic sequences are always kept in
/// canonical form: shortest period, then shortest preperiod.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpSeq {
    p: u8,
    repr: SeqRepr,
}

fn check_prime(p: u8) -> Result<()> {
    if p > MAX_PRIME || !is_prime(p as u64) {
        return Err(Error::InvalidSequence(format!("p = {p} must be a prime ≤ {MAX_PRIME}")));
    }
    Ok(())
}

fn check_entries(p: u8, xs: &[u8]) -> Result<()> {
    match xs.iter().find(|&&x| x >= p) {
        Some(&x) => Err(Error::InvalidSequence(format!("entry {x} is not in 0..{p}"))),
        None => Ok(()),
    }
}

fn minimal_period(period: &[u8]) -> usize {
    let n = period.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d]))
        .unwrap_or(n)
}

impl FpSeq {
    pub fn truncated(p: u8, coeffs: Vec<u8>) -> Result<FpSeq> {
        check_prime(p)?;
        check_entries(p, &coeffs)?;
        Ok(FpSeq {
            p,
            repr: SeqRepr::Truncated(coeffs),
        })
    }

    pub fn periodic(p: u8, pre: Vec<u8>, period: Vec<u8>) -> Result<FpSeq> {
        check_prime(p)?;
        check_entries(p, &pre)?;
        check_entries(p, &period)?;
        if period.is_empty() {
            return Err(Error::InvalidSequence("empty period".into()));
        }
        Ok(FpSeq::canonical(p, pre, period))
    }

    pub fn zero(p: u8) -> Result<FpSeq> {
        FpSeq::periodic(p, vec![], vec![0])
    }

    pub fn constant(p: u8, c: u8) -> Result<FpSeq> {
        FpSeq::periodic(p, vec![], vec![c])
    }

    /// Parses digit strings, e.g. `pre = "1"`, `period = "01"`.
    pub fn parse_periodic(p: u8, pre: &str, period: &str) -> Result<FpSeq> {
        let digits = |s: &str| -> Result<Vec<u8>> {
            s.chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| {
                    c.to_digit(p as u32)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::InvalidSequence(format!("`{c}` is not a digit mod {p}")))
                })
                .collect()
        };
        FpSeq::periodic(p, digits(pre)?, digits(period)?)
    }

    fn canonical(p: u8, mut pre: Vec<u8>, mut period: Vec<u8>) -> FpSeq {
        period.truncate(minimal_period(&period));
        while let (Some(&x), Some(&y)) = (pre.last(), period.last()) {
            if x != y {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        FpSeq {
            p,
            repr: SeqRepr::EventuallyPeriodic { pre, period },
        }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn repr(&self) -> &SeqRepr {
        &self.repr
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, SeqRepr::EventuallyPeriodic { .. })
    }

    /// Number of known coordinates (`None` when infinite).
    pub fn known_len(&self) -> Option<usize> {
        match &self.repr {
            SeqRepr::Truncated(c) => Some(c.len()),
            SeqRepr::EventuallyPeriodic { .. } => None,
        }
    }

    /// `pre.len() + period.len()` for exact sequences.
    pub fn period_bound(&self) -> Option<usize> {
        match &self.repr {
            SeqRepr::Truncated(_) => None,
            SeqRepr::EventuallyPeriodic { pre, period } => Some(pre.len() + period.len()),
        }
    }

    pub fn coeff(&self, n: usize) -> Option<u8> {
        match &self.repr {
            SeqRepr::Truncated(c) => c.get(n).copied(),
            SeqRepr::EventuallyPeriodic { pre, period } => Some(if n < pre.len() {
                pre[n]
            } else {
                period[(n - pre.len()) % period.len()]
            }),
        }
    }

    /// The first `k` coordinates.
    pub fn prefix(&self, k: usize) -> Result<Vec<u8>> {
        (0..k)
            .map(|n| {
                self.coeff(n).ok_or(Error::DepthTooLarge {
                    requested: k,
                    available: n,
                })
            })
            .collect()
    }

    /// The left shift `τ`.
    pub fn shift(&self) -> Result<FpSeq> {
        match &self.repr {
            SeqRepr::Truncated(c) if c.is_empty() => Err(Error::InvalidSequence("shift of an empty truncation".into())),
            SeqRepr::Truncated(c) => Ok(FpSeq {
                p: self.p,
                repr: SeqRepr::Truncated(c[1..].to_vec()),
            }),
            SeqRepr::EventuallyPeriodic { pre, period } => {
                let (pre, period) = if pre.is_empty() {
                    let mut q = period.clone();
                    q.rotate_left(1);
                    (vec![], q)
                } else {
                    (pre[1..].to_vec(), period.clone())
                };
                Ok(FpSeq::canonical(self.p, pre, period))
            }
        }
    }

    /// The distinct sequences `s, τs, τ²s, …` of an exact sequence.
    pub fn orbit(&self) -> Result<Vec<FpSeq>> {
        if !self.is_exact() {
            return Err(Error::InvalidSequence(
                "orbit of a truncated sequence is not finite data".into(),
            ));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut s = self.clone();
        while seen.insert(s.clone()) {
            out.push(s.clone());
            s = s.shift()?;
        }
        Ok(out)
    }
}

impl fmt::Display for FpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.p > 10 { "," } else { "" };
        let join = |xs: &[u8]| xs.iter().map(u8::to_string).collect::<Vec<_>>().join(sep);
        match &self.repr {
            SeqRepr::Truncated(c) => write!(f, "{}…", join(c)),
            SeqRepr::EventuallyPeriodic { pre, period } => write!(f, "{}({})", join(pre), join(period)),
        }
    }
}

/// The depth-`k` portrait of `f⁻¹(s) = ∏ g_n^{e_n}`: label `σ^{e_n}` at every
/// vertex of level `n`.
pub fn seq_to_group(s: &FpSeq, k: usize) -> Result<Portrait> {
    let e = s.prefix(k)?;
    let p = s.p() as usize;
    let sigma = Perm::cycle(p);
    let powers: Vec<Perm> = (0..p).map(|i| sigma.pow(i)).collect();
    Portrait::from_fn(p, k, |v| powers[e[v.len()] as usize].clone())
}

/// The exponent sequence of a portrait in `A`.
pub fn group_to_seq(g: &Portrait) -> Result<FpSeq> {
    let p = g.arity();
    let sigma = Perm::cycle(p);
    let powers: Vec<Perm> = (0..p).map(|i| sigma.pow(i)).collect();
    let mut e = vec![None; g.depth()];
    for (v, label) in g.labels() {
        let Some(x) = powers.iter().position(|q| *q == label) else {
            return Err(Error::NotInShiftGroup(format!(
                "label {label} at {v} is not a power of σ"
            )));
        };
        match e[v.len()] {
            None => e[v.len()] = Some(x as u8),
            Some(y) if y as usize != x => {
                return Err(Error::NotInShiftGroup(format!("labels differ on level {}", v.len())));
            }
            _ => {}
        }
    }
    FpSeq::truncated(
        u8::try_from(p).map_err(|_| Error::InvalidArity(p))?,
        e.into_iter().map(|x| x.unwrap_or(0)).collect(),
    )
}

/// Checks `f(g|_x) = τ(f(g))` on the first `k − 1` coordinates, for every
/// letter `x`, where `g = f⁻¹(s)` truncated to depth `k`.
pub fn commute_check(s: &FpSeq, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Invalid("commute_check needs depth ≥ 1".into()));
    }
    let g = seq_to_group(s, k)?;
    let shifted = s.shift()?.prefix(k - 1)?;
    for x in 0..g.arity() {
        let section = g.section(&Vertex::from_letters(vec![x as u8]))?;
        match &group_to_seq(&section)?.repr {
            SeqRepr::Truncated(c) if *c == shifted => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// The `τ`-orbit of an exact sequence and the span of its projection to the
/// first `window` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSpan {
    pub orbit: Vec<String>,
    pub window: usize,
    pub basis: EchelonBasis,
    pub dimension: usize,
    /// The window covers `pre + period` coordinates, so the projection is
    /// injective on the span and `dimension` is the span's true dimension.
    pub exact: bool,
}

pub fn orbit_span(s: &FpSeq, window: usize) -> Result<OrbitSpan> {
    let orbit = s.orbit()?;
    let vectors = orbit.iter().map(|t| t.prefix(window)).collect::<Result<Vec<_>>>()?;
    let basis = row_reduce(s.p(), window, &vectors)?;
    Ok(OrbitSpan {
        orbit: orbit.iter().map(ToString::to_string).collect(),
        window,
        dimension: basis.dimension(),
        basis,
        exact: window >= s.period_bound().unwrap_or(usize::MAX),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NonCyclicity {
    /// The orbit span projects onto a proper subspace of `F_p^window`, so
    /// `s` is not cyclic and `f⁻¹` of the span is a finite self-similar
    /// subgroup containing `f⁻¹(s)`.
    Certified {
        window: usize,
        dimension: usize,
        orbit_size: usize,
        subgroup_order: String,
    },
    Inconclusive {
        reason: String,
    },
}

/// Default window: one more than `pre + period`.
pub fn non_cyclicity_certificate(s: &FpSeq, window: Option<usize>) -> Result<NonCyclicity> {
    let Some(bound) = s.period_bound() else {
        return Ok(NonCyclicity::Inconclusive {
            reason: "truncated input carries no periodicity information".into(),
        });
    };
    let window = window.unwrap_or(bound + 1);
    let span = orbit_span(s, window)?;
    if span.dimension < window {
        let order = num_bigint::BigUint::from(s.p()).pow(span.dimension as u32);
        Ok(NonCyclicity::Certified {
            window,
            dimension: span.dimension,
            orbit_size: span.orbit.len(),
            subgroup_order: order.to_string(),
        })
    } else {
        Ok(NonCyclicity::Inconclusive {
            reason: format!("projection to {window} coordinates is onto; use a window larger than {bound}"),
        })
    }
}
