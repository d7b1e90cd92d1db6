//! Involutive S-sets: an involutive set over S with a right action of S.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, StarMorphism, StarSemigroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSetStructure {
    star: Vec<usize>,
    base: Arc<StarSemigroup>,
    map: Vec<usize>,
    /// Row-major |X| × |S|.
    action: Vec<usize>,
}

impl SSetStructure {
    pub fn new(star: Vec<usize>, base: Arc<StarSemigroup>, map: Vec<usize>, action: Vec<usize>) -> Result<Self> {
        let a = Self::new_unchecked(star, base, map, action)?;
        if let Some(v) = a.violation() {
            return Err(Error::InvalidSSet(v));
        }
        Ok(a)
    }

    /// Checks only table shapes, not the S-set axioms.
    pub fn new_unchecked(star: Vec<usize>, base: Arc<StarSemigroup>, map: Vec<usize>, action: Vec<usize>) -> Result<Self> {
        let n = star.len();
        let m = base.order();
        if n == 0 || map.len() != n || action.len() != n * m {
            return Err(Error::Shape("S-set tables have inconsistent sizes".into()));
        }
        if star.iter().chain(&action).any(|&x| x >= n) || map.iter().any(|&s| s >= m) {
            return Err(Error::Shape("S-set table entry out of range".into()));
        }
        Ok(SSetStructure { star, base, map, action })
    }

    /// First violated axiom, if any.
    pub fn violation(&self) -> Option<String> {
        let s = &*self.base;
        for x in self.elements() {
            if self.star(self.star(x)) != x {
                return Some(format!("x** != x at {x}"));
            }
            if self.apply(self.star(x)) != s.star(self.apply(x)) {
                return Some(format!("f(x*) != f(x)* at {x}"));
            }
            if self.act(x, s.dom(self.apply(x))) != x {
                return Some(format!("unit law fails at {x}"));
            }
            for t in s.elements() {
                if self.apply(self.act(x, t)) != s.mul(self.apply(x), t) {
                    return Some(format!("equivariance fails at ({x},{t})"));
                }
                for u in s.elements() {
                    if self.act(self.act(x, t), u) != self.act(x, s.mul(t, u)) {
                        return Some(format!("action not associative at ({x},{t},{u})"));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.star.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn base(&self) -> &Arc<StarSemigroup> {
        &self.base
    }

    pub fn star(&self, x: usize) -> usize {
        self.star[x]
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn act(&self, x: usize, s: usize) -> usize {
        self.action[x * self.base.order() + s]
    }

    pub fn star_table(&self) -> &[usize] {
        &self.star
    }

    pub fn map_table(&self) -> &[usize] {
        &self.map
    }

    pub fn action_table(&self) -> &[usize] {
        &self.action
    }

    /// Left action rx = (x*r*)*.
    pub fn left_action(&self, r: usize, x: usize) -> usize {
        self.star(self.act(self.star(x), self.base.star(r)))
    }

    /// Witness (x, s) where (xs)* = (x*f(x)s)*f(x)* = (x*f(xs))*f(x*) fails.
    pub fn left_identity_witness(&self) -> Option<Vec<usize>> {
        let s = &*self.base;
        for x in self.elements() {
            let fx = self.apply(x);
            let xs = self.star(x);
            for t in s.elements() {
                let lhs = self.star(self.act(x, t));
                let a = self.act(self.star(self.act(xs, s.mul(fx, t))), s.star(fx));
                let b = self.act(self.star(self.act(xs, self.apply(self.act(x, t)))), self.apply(xs));
                if lhs != a || lhs != b {
                    return Some(vec![x, t]);
                }
            }
        }
        None
    }

    /// Witness (x, r, s) of (x*r*)*s = ((xs)*r*)* failing.
    pub fn balanced_first_witness(&self) -> Option<Vec<usize>> {
        let s = &*self.base;
        for x in self.elements() {
            for r in s.elements() {
                for t in s.elements() {
                    if self.act(self.left_action(r, x), t) != self.left_action(r, self.act(x, t)) {
                        return Some(vec![x, r, t]);
                    }
                }
            }
        }
        None
    }

    /// Witness x of xf(x*) not being self-adjoint.
    pub fn balanced_second_witness(&self) -> Option<usize> {
        self.elements().find(|&x| {
            let y = self.act(x, self.apply(self.star(x)));
            self.star(y) != y
        })
    }

    /// Checks (rx)s = r(xs) and f(rx) = rf(x); meaningful for balanced
    /// S-sets over an involutive base.
    pub fn left_action_witness(&self) -> Option<Vec<usize>> {
        let s = &*self.base;
        for x in self.elements() {
            for r in s.elements() {
                if self.apply(self.left_action(r, x)) != s.mul(r, self.apply(x)) {
                    return Some(vec![x, r]);
                }
                for t in s.elements() {
                    if self.act(self.left_action(r, x), t) != self.left_action(r, self.act(x, t)) {
                        return Some(vec![x, r, t]);
                    }
                }
            }
        }
        None
    }
}

/// The action xs = the unique y with c(x)y = y and f(y) = f(x)s.
pub fn canonical_action(f: &StarMorphism) -> Result<SSetStructure> {
    let r = f.is_etale()?;
    if !r.etale {
        return Err(Error::NotEtale(r.witness.unwrap_or(0)));
    }
    let x = f.source();
    let s = f.target();
    let mut action = Vec::with_capacity(x.order() * s.order());
    for a in x.elements() {
        for t in s.elements() {
            action.push(f.lift_unchecked(x.cod(a), s.mul(f.apply(a), t))?);
        }
    }
    let out = SSetStructure::new(x.star_table().to_vec(), s.clone(), f.map().to_vec(), action)
        .map_err(|e| Error::Invariant(format!("canonical action: {e}")))?;
    if classify(x).left_involutive.holds && classify(s).left_involutive.holds {
        if let Some(w) = out.left_identity_witness() {
            return Err(Error::Invariant(format!("left identity fails at {w:?}")));
        }
    }
    Ok(out)
}

/// The product xy = x·f(y), with f an étale *-homomorphism.
pub fn sset_to_semigroup(a: &SSetStructure) -> Result<(Arc<StarSemigroup>, StarMorphism)> {
    if let Some(v) = a.violation() {
        return Err(Error::InvalidSSet(v));
    }
    let n = a.len();
    let mul = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| a.act(x, a.apply(y))).collect();
    let x = Arc::new(
        StarSemigroup::from_flat(None, n, mul, a.star_table().to_vec())
            .map_err(|e| Error::Invariant(format!("induced product: {e}")))?,
    );
    let f = StarMorphism::new(x.clone(), a.base().clone(), a.map_table().to_vec())?;
    if !f.is_star_hom() || !f.is_etale()?.etale {
        return Err(Error::Invariant("induced map is not an étale *-homomorphism".into()));
    }
    if canonical_action(&f)?.action_table() != a.action_table() {
        return Err(Error::Invariant("canonical action of the induced product differs".into()));
    }
    Ok((x, f))
}

/// A map between S-sets over S that preserves star and the action.
pub fn is_sset_morphism(a: &SSetStructure, b: &SSetStructure, g: &[usize]) -> bool {
    g.len() == a.len()
        && a.base() == b.base()
        && a.elements().all(|x| {
            g[x] < b.len()
                && b.apply(g[x]) == a.apply(x)
                && g[a.star(x)] == b.star(g[x])
                && a.base().elements().all(|t| g[a.act(x, t)] == b.act(g[x], t))
        })
}

#[derive(Debug, Clone)]
pub struct Retwist {
    /// (X, ×) with x × y = x f(y).
    pub semigroup: Arc<StarSemigroup>,
    /// f on (X, ×).
    pub map: StarMorphism,
    pub equivalence: RetwistEquivalence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RetwistEquivalence {
    pub identity_left_iso: bool,
    pub inverse_left_hom: bool,
    pub star_hom: bool,
    pub identity_star_iso: bool,
}

impl RetwistEquivalence {
    pub fn all(&self) -> [bool; 4] {
        [self.identity_left_iso, self.inverse_left_hom, self.star_hom, self.identity_star_iso]
    }
}

pub fn retwist(f: &StarMorphism) -> Result<Retwist> {
    let a = canonical_action(f)?;
    let (semigroup, map) = sset_to_semigroup(&a)?;
    let x = f.source();
    let id: Vec<usize> = x.elements().collect();
    let forward = StarMorphism::new(x.clone(), semigroup.clone(), id.clone())?;
    let back = StarMorphism::new(semigroup.clone(), x.clone(), id)?;
    if !forward.is_left_star_hom() || !forward.is_etale()?.etale {
        return Err(Error::Invariant("X → (X,×) is not an étale left *-homomorphism".into()));
    }
    let equivalence = RetwistEquivalence {
        identity_left_iso: forward.is_left_star_hom() && back.is_left_star_hom(),
        inverse_left_hom: back.is_left_star_hom(),
        star_hom: f.is_star_hom(),
        identity_star_iso: forward.is_star_hom() && back.is_star_hom(),
    };
    let v = equivalence.all();
    if v.iter().any(|&b| b != v[0]) {
        return Err(Error::EquivalenceBroken(format!("retwist: {equivalence:?}")));
    }
    Ok(Retwist { semigroup, map, equivalence })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedReport {
    pub balanced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition1: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition2: Option<usize>,
    pub left_involutive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_identity: Option<Vec<usize>>,
    /// Whether the base is inverse, so that the two notions must agree.
    pub equivalence_checked: bool,
}

pub fn balanced_check(a: &SSetStructure) -> Result<BalancedReport> {
    let condition1 = a.balanced_first_witness();
    let condition2 = a.balanced_second_witness();
    let left_identity = a.left_identity_witness();
    let balanced = condition1.is_none() && condition2.is_none();
    let left_involutive = left_identity.is_none();
    let equivalence_checked = classify(a.base()).inverse.holds;
    if equivalence_checked && balanced != left_involutive {
        return Err(Error::EquivalenceBroken(format!(
            "balanced {balanced}, left involutive {left_involutive}"
        )));
    }
    Ok(BalancedReport { balanced, condition1, condition2, left_involutive, left_identity, equivalence_checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;

    #[test]
    fn identity_action_is_the_product() {
        let i2 = Arc::new(standard_family("symmetric_inverse", 2).unwrap());
        let a = canonical_action(&StarMorphism::identity(&i2)).unwrap();
        for x in i2.elements() {
            for t in i2.elements() {
                assert_eq!(a.act(x, t), i2.mul(x, t));
                assert_eq!(a.left_action(t, x), i2.mul(t, x));
            }
        }
        let r = balanced_check(&a).unwrap();
        assert!(r.balanced && r.left_involutive && r.equivalence_checked);
        let (x, _) = sset_to_semigroup(&a).unwrap();
        assert_eq!(*x, *i2);
    }

    #[test]
    fn corrupted_entry_breaks_balance() {
        let i2 = Arc::new(standard_family("symmetric_inverse", 2).unwrap());
        let a = canonical_action(&StarMorphism::identity(&i2)).unwrap();
        let mut action = a.action_table().to_vec();
        // id·swap := id
        action[5 * 7 + 6] = 5;
        let bad = SSetStructure::new_unchecked(a.star_table().to_vec(), i2.clone(), a.map_table().to_vec(), action)
            .unwrap();
        assert!(bad.violation().is_some());
        assert!(SSetStructure::new(bad.star_table().to_vec(), i2, bad.map_table().to_vec(), bad.action_table().to_vec()).is_err());
        let r = balanced_check(&bad).unwrap();
        assert!(!r.balanced);
        let w = r.condition1.unwrap();
        let (x, rr, t) = (w[0], w[1], w[2]);
        assert_ne!(bad.act(bad.left_action(rr, x), t), bad.left_action(rr, bad.act(x, t)));
    }

    #[test]
    fn constant_map_has_no_canonical_action() {
        let c2 = Arc::new(standard_family("cyclic_group", 2).unwrap());
        let t1 = Arc::new(standard_family("cyclic_group", 1).unwrap());
        let f = StarMorphism::new(c2, t1, vec![0, 0]).unwrap();
        assert!(matches!(canonical_action(&f), Err(Error::NotEtale(0))));
    }

    #[test]
    fn star_hom_retwist_is_trivial() {
        let lz2 = Arc::new(standard_family("left_zero", 2).unwrap());
        let t1 = Arc::new(standard_family("cyclic_group", 1).unwrap());
        // xX = {x} maps onto the one-element ideal of T1
        let f = StarMorphism::new(lz2.clone(), t1, vec![0, 0]).unwrap();
        assert!(f.etale());
        let r = retwist(&f).unwrap();
        assert_eq!(*r.semigroup, *lz2);
        assert_eq!(r.equivalence.all(), [true; 4]);
    }
}
