//! Dense linear algebra over a prime field `F_p`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Row-reduced echelon basis of a subspace of `F_p^len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EchelonBasis {
    pub p: u8,
    pub len: usize,
    pub rows: Vec<Vec<u8>>,
    pub pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// `true` iff `v` lies in the span.
    pub fn contains(&self, v: &[u8]) -> bool {
        let p = self.p as u32;
        let mut r: Vec<u32> = v.iter().map(|&x| x as u32 % p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = r[c];
            if f != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = (*x + (p - f) * y as u32) % p;
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inverse_mod(a: u32, p: u32) -> u32 {
    // p is prime and small: Fermat
    let mut r = 1u32;
    for _ in 0..p - 2 {
        r = r * a % p;
    }
    r
}

/// Reduced row echelon form of the given vectors over `F_p`. Pivots are
/// chosen left to right, so the result depends only on the span.
pub fn row_reduce(p: u8, len: usize, vectors: &[Vec<u8>]) -> Result<EchelonBasis> {
    if !is_prime(p as u64) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    let q = p as u32;
    let mut m: Vec<Vec<u32>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != len {
            return Err(Error::Invalid(format!("vector of length {} in window {len}", v.len())));
        }
        if let Some(&x) = v.iter().find(|&&x| x >= p) {
            return Err(Error::LetterOutOfRange {
                letter: x as usize,
                m: p as usize,
            });
        }
        m.push(v.iter().map(|&x| x as u32).collect());
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..len {
        let Some(k) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        let inv = inverse_mod(m[r][c], q);
        for x in m[r].iter_mut() {
            *x = *x * inv % q;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[r].clone();
                for (a, b) in m[i].iter_mut().zip(&pivot) {
                    *a = (*a + (q - f) * b) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Ok(EchelonBasis {
        p,
        len,
        rows: m
            .into_iter()
            .map(|row| row.into_iter().map(|x| x as u8).collect())
            .collect(),
        pivots,
    })
}

pub fn rank(p: u8, len: usize, vectors: &[Vec<u8>]) -> Result<usize> {
    Ok(row_reduce(p, len, vectors)?.dimension())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Span by exhaustive linear combinations.
    fn span_size(p: u8, len: usize, vectors: &[Vec<u8>]) -> usize {
        let mut span: HashSet<Vec<u8>> = HashSet::from([vec![0; len]]);
        for v in vectors {
            let mut next = HashSet::new();
            for s in &span {
                for c in 0..p {
                    next.insert(s.iter().zip(v).map(|(&a, &b)| (a + c * b) % p).collect::<Vec<u8>>());
                }
            }
            span = next;
        }
        span.len()
    }

    #[test]
    fn small_cases() {
        assert_eq!(rank(2, 3, &[]).unwrap(), 0);
        assert_eq!(rank(2, 3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap(), 2);
        assert_eq!(rank(3, 3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap(), 3);
        let b = row_reduce(3, 2, &[vec![2, 1]]).unwrap();
        assert_eq!(b.rows, vec![vec![1, 2]]);
        assert!(b.contains(&[2, 1]));
        assert!(!b.contains(&[1, 1]));
        assert!(row_reduce(4, 1, &[]).is_err());
        assert!(row_reduce(2, 1, &[vec![2]]).is_err());
    }

    proptest! {
        #[test]
        fn rank_matches_span(p in prop::sample::select(vec![2u8, 3, 5]), rows in 0usize..5, seed in prop::collection::vec(0u8..255, 20)) {
            let len = 4;
            let vectors: Vec<Vec<u8>> = (0..rows).map(|i| (0..len).map(|j| seed[(i * len + j) % 20] % p).collect()).collect();
            let b = row_reduce(p, len, &vectors).unwrap();
            prop_assert_eq!((p as usize).pow(b.dimension() as u32), span_size(p, len, &vectors));
            for v in &vectors {
                prop_assert!(b.contains(v));
            }
            let again = row_reduce(p, len, &b.rows).unwrap();
            prop_assert_eq!(again, b);
        }
    }
}
