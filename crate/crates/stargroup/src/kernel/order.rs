use super::classify::locally_involutive_witness;
use super::semigroup::StarSemigroup;
use crate::error::{Error, Result};

/// A materialized binary relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                bits[x * n + y] = f(x, y);
            }
        }
        Relation { n, bits }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.n + y]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if self.contains(x, y) {
                    v.push((x, y));
                }
            }
        }
        v
    }

    pub fn is_partial_order(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| self.contains(x, x))
            && (0..n).all(|x| (0..n).all(|y| x == y || !(self.contains(x, y) && self.contains(y, x))))
            && (0..n).all(|x| {
                (0..n).all(|y| !self.contains(x, y) || (0..n).all(|z| !self.contains(y, z) || self.contains(x, z)))
            })
    }
}

/// x ≤_l y iff d(x) ≤ d(y) and x = y·d(x).
pub fn leq_left(s: &StarSemigroup, x: usize, y: usize) -> bool {
    let dx = s.dom(x);
    s.leq_idem(dx, s.dom(y)) && x == s.mul(y, dx)
}

/// x ≤_r y iff c(x) ≤ c(y) and x = c(x)·y.
pub fn leq_right(s: &StarSemigroup, x: usize, y: usize) -> bool {
    let cx = s.cod(x);
    s.leq_idem(cx, s.cod(y)) && x == s.mul(cx, y)
}

pub fn left_order(s: &StarSemigroup) -> Relation {
    Relation::from_fn(s.order(), |x, y| leq_left(s, x, y))
}

pub fn right_order(s: &StarSemigroup) -> Relation {
    Relation::from_fn(s.order(), |x, y| leq_right(s, x, y))
}

/// The common left/right order of a locally involutive semigroup.
pub fn natural_order(s: &StarSemigroup) -> Result<Relation> {
    if let Some(w) = locally_involutive_witness(s) {
        return Err(Error::NotLocallyInvolutive(w));
    }
    let left = left_order(s);
    let right = right_order(s);
    for x in s.elements() {
        for y in s.elements() {
            if left.contains(x, y) != right.contains(x, y) {
                return Err(Error::OrderMismatch(x, y));
            }
        }
    }
    Ok(left)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> StarSemigroup {
        StarSemigroup::new(None, vec![vec![0, 0], vec![0, 1]], vec![0, 1]).unwrap()
    }

    #[test]
    fn chain_order() {
        let r = natural_order(&sl2()).unwrap();
        assert_eq!(r.pairs(), vec![(0, 0), (0, 1), (1, 1)]);
        assert!(r.is_partial_order());
    }

    #[test]
    fn group_order_is_discrete() {
        let c2 = StarSemigroup::new(None, vec![vec![0, 1], vec![1, 0]], vec![0, 1]).unwrap();
        assert!(!leq_left(&c2, 0, 1));
        assert_eq!(natural_order(&c2).unwrap().pairs(), vec![(0, 0), (1, 1)]);
    }
}
