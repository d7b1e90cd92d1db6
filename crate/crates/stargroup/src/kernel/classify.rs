use serde::Serialize;

use super::semigroup::StarSemigroup;

/// Outcome of one defining identity, with the lexicographically least
/// violating tuple when it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Flag {
    fn from_witness(w: Option<Vec<usize>>) -> Self {
        Flag {
            holds: w.is_none(),
            witness: w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub restrictive: Flag,
    pub corestrictive: Flag,
    pub birestrictive: Flag,
    pub involutive: Flag,
    pub left_involutive: Flag,
    pub right_involutive: Flag,
    pub locally_involutive: Flag,
    pub quasi_involutive: Flag,
    /// Every element has a unique quasi-inverse.
    pub inverse: Flag,
    pub commuting_projections: Flag,
    /// Inverse computed as quasi-involutive with commuting projections.
    pub inverse_via_projections: bool,
}

impl ClassificationReport {
    pub fn flags(&self) -> [(&'static str, &Flag); 10] {
        [
            ("restrictive", &self.restrictive),
            ("corestrictive", &self.corestrictive),
            ("birestrictive", &self.birestrictive),
            ("involutive", &self.involutive),
            ("left_involutive", &self.left_involutive),
            ("right_involutive", &self.right_involutive),
            ("locally_involutive", &self.locally_involutive),
            ("quasi_involutive", &self.quasi_involutive),
            ("inverse", &self.inverse),
            ("commuting_projections", &self.commuting_projections),
        ]
    }

    /// Names of the implications between flags that fail. Empty on a
    /// consistent report.
    pub fn implication_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut need = |cond: bool, name: &'static str| {
            if !cond {
                out.push(name)
            }
        };
        let inv = self.involutive.holds;
        let left = self.left_involutive.holds;
        let right = self.right_involutive.holds;
        need(!inv || (left && right), "involutive => left and right involutive");
        need(!(left || right) || self.locally_involutive.holds, "left or right involutive => locally involutive");
        need(!left || self.corestrictive.holds, "left involutive => corestrictive");
        need(!right || self.restrictive.holds, "right involutive => restrictive");
        need(!inv || self.birestrictive.holds, "involutive => birestrictive");
        need(!self.inverse.holds || inv, "inverse => involutive");
        need(
            self.inverse.holds == self.inverse_via_projections,
            "inverse <=> quasi-involutive with commuting projections",
        );
        out
    }
}

/// Computes every flag by exhaustive search of its defining identity.
pub fn classify(x: &StarSemigroup) -> ClassificationReport {
    let restrictive = Flag::from_witness(restrictive_witness(x));
    let corestrictive = Flag::from_witness(corestrictive_witness(x));
    let birestrictive = Flag::from_witness(
        restrictive
            .witness
            .clone()
            .or_else(|| corestrictive.witness.clone()),
    );
    let locally_involutive = Flag::from_witness(locally_involutive_witness(x));
    let quasi_involutive = Flag::from_witness(
        birestrictive
            .witness
            .clone()
            .or_else(|| locally_involutive.witness.clone()),
    );
    let commuting_projections = Flag::from_witness(commuting_projections_witness(x));
    let inverse_via_projections = quasi_involutive.holds && commuting_projections.holds;
    ClassificationReport {
        involutive: Flag::from_witness(involutive_witness(x)),
        left_involutive: Flag::from_witness(left_involutive_witness(x)),
        right_involutive: Flag::from_witness(right_involutive_witness(x)),
        inverse: Flag::from_witness(inverse_witness(x)),
        restrictive,
        corestrictive,
        birestrictive,
        locally_involutive,
        quasi_involutive,
        commuting_projections,
        inverse_via_projections,
    }
}

fn first_pair(n: usize, mut bad: impl FnMut(usize, usize) -> bool) -> Option<Vec<usize>> {
    for x in 0..n {
        for y in 0..n {
            if bad(x, y) {
                return Some(vec![x, y]);
            }
        }
    }
    None
}

pub(crate) fn restrictive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| !s.leq_idem(s.dom(s.mul(x, y)), s.dom(y)))
}

pub(crate) fn corestrictive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| !s.leq_idem(s.cod(s.mul(x, y)), s.cod(x)))
}

pub(crate) fn involutive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| {
        s.star(s.mul(x, y)) != s.mul(s.star(y), s.star(x))
    })
}

pub(crate) fn left_involutive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| {
        let dxy = s.mul(s.dom(x), y);
        s.star(s.mul(x, y)) != s.mul(s.star(dxy), s.star(x))
    })
}

pub(crate) fn right_involutive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| {
        let xcy = s.mul(x, s.cod(y));
        s.star(s.mul(x, y)) != s.mul(s.star(y), s.star(xcy))
    })
}

/// Tests (xy)* = y*x* only on the three guarded pair types.
pub(crate) fn locally_involutive_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| {
        let guarded = s.dom(x) == s.cod(y)
            || (s.is_projection(x) && s.leq_idem(x, s.cod(y)))
            || (s.is_projection(y) && s.leq_idem(y, s.dom(x)));
        guarded && s.star(s.mul(x, y)) != s.mul(s.star(y), s.star(x))
    })
}

pub(crate) fn commuting_projections_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    let ps = s.projections();
    for &p in &ps {
        for &q in &ps {
            if s.mul(p, q) != s.mul(q, p) {
                return Some(vec![p, q]);
            }
        }
    }
    None
}

/// Least (x, y) where y is a quasi-inverse of x other than x*.
pub(crate) fn inverse_witness(s: &StarSemigroup) -> Option<Vec<usize>> {
    first_pair(s.order(), |x, y| {
        y != s.star(x) && s.mul3(x, y, x) == x && s.mul3(y, x, y) == y
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lz2() -> StarSemigroup {
        StarSemigroup::new(None, vec![vec![0, 0], vec![1, 1]], vec![0, 1]).unwrap()
    }

    #[test]
    fn left_zero_flags() {
        let r = classify(&lz2());
        assert!(r.left_involutive.holds);
        assert!(!r.right_involutive.holds);
        assert!(r.locally_involutive.holds);
        assert!(r.corestrictive.holds);
        assert!(!r.restrictive.holds);
        assert!(!r.involutive.holds);
        assert!(!r.quasi_involutive.holds);
        assert!(!r.inverse.holds);
        assert!(!r.commuting_projections.holds);
        // d(0·1) = 0 is not below d(1) = 1
        assert_eq!(r.restrictive.witness, Some(vec![0, 1]));
        assert_eq!(r.involutive.witness, Some(vec![0, 1]));
        assert_eq!(r.commuting_projections.witness, Some(vec![0, 1]));
        assert!(r.implication_failures().is_empty());
    }

    #[test]
    fn trivial_all_true() {
        let t = StarSemigroup::new(None, vec![vec![0]], vec![0]).unwrap();
        let r = classify(&t);
        assert!(r.flags().iter().all(|(_, f)| f.holds && f.witness.is_none()));
    }

    #[test]
    fn opposite_swaps_left_and_right() {
        let r = classify(&lz2().opposite());
        assert!(!r.left_involutive.holds);
        assert!(r.right_involutive.holds);
        assert!(r.restrictive.holds);
        assert!(!r.corestrictive.holds);
    }
}
