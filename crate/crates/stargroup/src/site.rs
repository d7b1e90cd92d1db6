//! Inverse semigroups, the left cancellative category L(S), presheaves on
//! it, and the representable semigroups S(e).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, StarMorphism, StarSemigroup};

/// A morphism s: d → e of L(S), where d = s*s and es = s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LSMorphism {
    pub s: usize,
    pub e: usize,
}

/// A *-semigroup known to be inverse, with L(S) materialized.
#[derive(Debug)]
pub struct InverseSemigroup {
    semigroup: Arc<StarSemigroup>,
    idempotents: Vec<usize>,
    object_of: Vec<Option<usize>>,
    morphisms: Vec<LSMorphism>,
    morphism_index: HashMap<LSMorphism, usize>,
    representables: OnceLock<Vec<RepresentableSemigroup>>,
}

/// Validates that X is inverse and wraps it.
pub fn as_inverse(x: &StarSemigroup) -> Result<Arc<InverseSemigroup>> {
    let r = classify(x);
    if !r.inverse.holds {
        return Err(Error::NotInverse(r.inverse.witness.unwrap_or_default()));
    }
    if !r.inverse_via_projections {
        return Err(Error::Invariant("inverse semigroup without commuting projections".into()));
    }
    let semigroup = Arc::new(x.clone());
    let idempotents = x.idempotents();
    let mut object_of = vec![None; x.order()];
    for (i, &e) in idempotents.iter().enumerate() {
        object_of[e] = Some(i);
    }
    let mut morphisms = Vec::new();
    for &e in &idempotents {
        for s in x.elements() {
            if x.mul(e, s) == s {
                morphisms.push(LSMorphism { s, e });
            }
        }
    }
    let morphism_index = morphisms.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    Ok(Arc::new(InverseSemigroup {
        semigroup,
        idempotents,
        object_of,
        morphisms,
        morphism_index,
        representables: OnceLock::new(),
    }))
}

impl InverseSemigroup {
    pub fn semigroup(&self) -> &Arc<StarSemigroup> {
        &self.semigroup
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    /// Position of an idempotent among the objects of L(S).
    pub fn object_of(&self, e: usize) -> Option<usize> {
        self.object_of.get(e).copied().flatten()
    }

    pub fn morphisms(&self) -> &[LSMorphism] {
        &self.morphisms
    }

    pub fn morphism_index(&self, m: LSMorphism) -> Option<usize> {
        self.morphism_index.get(&m).copied()
    }

    pub fn dom(&self, m: LSMorphism) -> usize {
        self.semigroup.dom(m.s)
    }

    /// s ∘ t for s: d → e and t: c → d.
    pub fn compose(&self, s: LSMorphism, t: LSMorphism) -> LSMorphism {
        debug_assert_eq!(self.dom(s), t.e);
        LSMorphism { s: self.semigroup.mul(s.s, t.s), e: s.e }
    }

    /// All s: d → e.
    pub fn ls_morphisms(&self, d: usize, e: usize) -> Result<Vec<LSMorphism>> {
        for x in [d, e] {
            if self.object_of(x).is_none() {
                return Err(Error::NotIdempotent(x));
            }
        }
        let x = &self.semigroup;
        Ok(x.elements()
            .filter(|&s| x.dom(s) == d && x.mul(e, s) == s)
            .map(|s| LSMorphism { s, e })
            .collect())
    }

    fn check_morphism(&self, m: LSMorphism) -> Result<()> {
        match self.morphism_index(m) {
            Some(_) => Ok(()),
            None => Err(Error::Shape(format!("({},{}) is not a morphism of L(S)", m.s, m.e))),
        }
    }

    /// The chosen pullback of s: d → e and t: c → e.
    pub fn pullback(&self, s: LSMorphism, t: LSMorphism) -> Result<PullbackSquare> {
        self.check_morphism(s)?;
        self.check_morphism(t)?;
        if s.e != t.e {
            return Err(Error::Shape("pullback legs need a common codomain".into()));
        }
        let x = &self.semigroup;
        let (cs, ct) = (x.cod(s.s), x.cod(t.s));
        let apex = x.mul(cs, ct);
        let to_c = LSMorphism { s: x.mul(x.star(t.s), cs), e: x.dom(t.s) };
        let to_d = LSMorphism { s: x.mul(x.star(s.s), ct), e: x.dom(s.s) };
        let commutes = self.dom(to_c) == apex
            && self.dom(to_d) == apex
            && self.compose(s, to_d) == self.compose(t, to_c);
        let universal = commutes && self.pullback_is_universal(s, t, to_d, to_c, apex);
        Ok(PullbackSquare { apex, to_d, to_c, commutes, universal })
    }

    fn pullback_is_universal(
        &self,
        s: LSMorphism,
        t: LSMorphism,
        to_d: LSMorphism,
        to_c: LSMorphism,
        apex: usize,
    ) -> bool {
        let (d, c) = (self.dom(s), self.dom(t));
        for &b in &self.idempotents {
            let us = self.ls_morphisms(b, d).unwrap();
            let vs = self.ls_morphisms(b, c).unwrap();
            let ws = self.ls_morphisms(b, apex).unwrap();
            for &u in &us {
                for &v in &vs {
                    if self.compose(s, u) != self.compose(t, v) {
                        continue;
                    }
                    let factorizations = ws
                        .iter()
                        .filter(|&&w| self.compose(to_d, w) == u && self.compose(to_c, w) == v)
                        .count();
                    if factorizations != 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// S(e) for every idempotent, in object order.
    pub fn representables(self: &Arc<Self>) -> &[RepresentableSemigroup] {
        self.representables.get_or_init(|| {
            self.idempotents
                .iter()
                .map(|&e| build_representable(self, e))
                .collect()
        })
    }

    pub fn representable(self: &Arc<Self>, e: usize) -> Result<&RepresentableSemigroup> {
        let i = self.object_of(e).ok_or(Error::NotIdempotent(e))?;
        Ok(&self.representables()[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackSquare {
    pub apex: usize,
    /// s*·c(t): apex → d.
    pub to_d: LSMorphism,
    /// t*·c(s): apex → c.
    pub to_c: LSMorphism,
    pub commutes: bool,
    pub universal: bool,
}

/// A presheaf on L(S) with finite fibers. Fibers are indexed by object
/// position; transitions are stored for every morphism of L(S).
#[derive(Debug, Clone)]
pub struct Presheaf {
    base: Arc<InverseSemigroup>,
    labels: Vec<Vec<String>>,
    transitions: Vec<Vec<usize>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        *self.base.semigroup == *other.base.semigroup
            && self.labels == other.labels
            && self.transitions == other.transitions
    }
}

impl Presheaf {
    /// Validates functoriality. `labels[i]` is the fiber over the i-th
    /// idempotent; `transitions[j]` maps fiber(e) to fiber(d) for the j-th
    /// morphism d → e.
    pub fn new(
        base: Arc<InverseSemigroup>,
        labels: Vec<Vec<String>>,
        transitions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = Presheaf { base, labels, transitions };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let b = &self.base;
        if self.labels.len() != b.idempotents.len() || self.transitions.len() != b.morphisms.len() {
            return Err(Error::InvalidPresheaf("fiber or transition count mismatch".into()));
        }
        for (j, m) in b.morphisms.iter().enumerate() {
            let src = self.fiber_size(m.e);
            let tgt = self.fiber_size(b.dom(*m));
            let t = &self.transitions[j];
            if t.len() != src || t.iter().any(|&v| v >= tgt) {
                return Err(Error::InvalidPresheaf(format!("transition along ({},{}) malformed", m.s, m.e)));
            }
        }
        for &e in &b.idempotents {
            let id = LSMorphism { s: e, e };
            let t = &self.transitions[b.morphism_index(id).unwrap()];
            if t.iter().enumerate().any(|(i, &v)| i != v) {
                return Err(Error::IdentityViolation(e));
            }
        }
        for &s in &b.morphisms {
            for &t in &b.morphisms {
                if t.e != b.dom(s) {
                    continue;
                }
                let st = b.compose(s, t);
                for x in 0..self.fiber_size(s.e) {
                    if self.act(x, st) != self.act(self.act(x, s), t) {
                        return Err(Error::CompositionViolation { s: s.s, t: t.s });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<InverseSemigroup> {
        &self.base
    }

    /// Fiber size over an idempotent element.
    pub fn fiber_size(&self, e: usize) -> usize {
        self.labels[self.base.object_of(e).expect("idempotent")].len()
    }

    pub fn labels(&self, e: usize) -> &[String] {
        &self.labels[self.base.object_of(e).expect("idempotent")]
    }

    pub fn all_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    /// x·s for x in P(e) and s: d → e.
    #[inline]
    pub fn act(&self, x: usize, m: LSMorphism) -> usize {
        let j = self.base.morphism_index(m).expect("morphism of L(S)");
        self.transitions[j][x]
    }

    /// The presheaf with every fiber a singleton.
    pub fn terminal(base: &Arc<InverseSemigroup>) -> Presheaf {
        let labels = base.idempotents.iter().map(|_| vec!["*".to_string()]).collect();
        let transitions = base.morphisms.iter().map(|_| vec![0]).collect();
        Presheaf::new(base.clone(), labels, transitions).expect("terminal presheaf")
    }

    /// Whether every fiber has at most one element.
    pub fn is_subterminal(&self) -> bool {
        self.labels.iter().all(|f| f.len() <= 1)
    }
}

/// ê(d) = L(S)(d, e), labelled by the elements s; transitions by composition.
pub fn representable_presheaf(base: &Arc<InverseSemigroup>, e: usize) -> Result<Presheaf> {
    if base.object_of(e).is_none() {
        return Err(Error::NotIdempotent(e));
    }
    let homs: Vec<Vec<LSMorphism>> = base
        .idempotents
        .iter()
        .map(|&d| base.ls_morphisms(d, e).unwrap())
        .collect();
    let labels = homs.iter().map(|h| h.iter().map(|m| m.s.to_string()).collect()).collect();
    let transitions = base
        .morphisms
        .iter()
        .map(|&t| {
            let d = base.dom(t);
            let into = &homs[base.object_of(d).unwrap()];
            homs[base.object_of(t.e).unwrap()]
                .iter()
                .map(|&s| {
                    let st = base.compose(s, t);
                    into.iter().position(|&m| m == st).expect("composite lies in the hom-set")
                })
                .collect()
        })
        .collect();
    Presheaf::new(base.clone(), labels, transitions)
}

/// S(e): pairs (r, s) with s*s = rr* and es = s.
#[derive(Debug, Clone)]
pub struct RepresentableSemigroup {
    pub e: usize,
    pub pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    pub semigroup: Arc<StarSemigroup>,
    /// ψ_e(r, s) = r.
    pub psi: StarMorphism,
}

impl RepresentableSemigroup {
    pub fn index(&self, pair: (usize, usize)) -> Option<usize> {
        self.index.get(&pair).copied()
    }

    /// The element (e, e).
    pub fn unit(&self) -> usize {
        self.index[&(self.e, self.e)]
    }
}

fn build_representable(base: &Arc<InverseSemigroup>, e: usize) -> RepresentableSemigroup {
    let x = &base.semigroup;
    let mut pairs = Vec::new();
    for r in x.elements() {
        for s in x.elements() {
            if x.dom(s) == x.cod(r) && x.mul(e, s) == s {
                pairs.push((r, s));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = pairs.len();
    let mut mul = Vec::with_capacity(n * n);
    for &(p, q) in &pairs {
        for &(r, _) in &pairs {
            let pr = x.mul(p, r);
            mul.push(index[&(pr, x.mul(q, x.cod(pr)))]);
        }
    }
    let star = pairs.iter().map(|&(r, s)| index[&(x.star(r), x.mul(s, r))]).collect();
    let semigroup = Arc::new(StarSemigroup::from_flat_unchecked(
        Some(format!("S({e})")),
        n,
        mul,
        star,
    ));
    let psi = StarMorphism::new(semigroup.clone(), x.clone(), pairs.iter().map(|p| p.0).collect()).unwrap();
    RepresentableSemigroup { e, pairs, index, semigroup, psi }
}

/// S(e) with its structural claims verified: a valid left involutive
/// *-semigroup, ψ_e an étale *-homomorphism, and equal to Λ(ê).
pub fn representable_semigroup(base: &Arc<InverseSemigroup>, e: usize) -> Result<&RepresentableSemigroup> {
    let rep = base.representable(e)?;
    StarSemigroup::from_flat(None, rep.semigroup.order(), rep.semigroup.mul_table().to_vec(), rep.semigroup.star_table().to_vec())?;
    let r = classify(&rep.semigroup);
    if !r.left_involutive.holds {
        return Err(Error::Invariant(format!("S({e}) is not left involutive")));
    }
    if !rep.psi.is_star_hom() || !rep.psi.is_etale()?.etale {
        return Err(Error::Invariant(format!("ψ_{e} is not an étale *-homomorphism")));
    }
    let lam = crate::topos::lambda(&representable_presheaf(base, e)?)?;
    if *lam.semigroup != *rep.semigroup || lam.structure.map() != rep.psi.map() {
        return Err(Error::Invariant(format!("S({e}) differs from the Λ of the representable")));
    }
    Ok(rep)
}

/// S(s): S(d) → S(e), (u, v) ↦ (u, sv), for s: d → e.
pub fn representable_action(base: &Arc<InverseSemigroup>, m: LSMorphism) -> Result<StarMorphism> {
    base.check_morphism(m)?;
    let x = &base.semigroup;
    let d = base.dom(m);
    let src = base.representable(d)?;
    let tgt = base.representable(m.e)?;
    let map = src
        .pairs
        .iter()
        .map(|&(u, v)| tgt.index((u, x.mul(m.s, v))).expect("image pair lies in S(e)"))
        .collect();
    let f = StarMorphism::new(src.semigroup.clone(), tgt.semigroup.clone(), map)?;
    if !f.is_star_hom() || f.then(&tgt.psi)?.map() != src.psi.map() {
        return Err(Error::Invariant(format!("S({},{}) is not a *-homomorphism over S", m.s, m.e)));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;

    fn inv(name: &str, n: usize) -> Arc<InverseSemigroup> {
        as_inverse(&standard_family(name, n).unwrap()).unwrap()
    }

    #[test]
    fn left_zero_is_not_inverse() {
        let lz2 = standard_family("left_zero", 2).unwrap();
        assert!(matches!(as_inverse(&lz2), Err(Error::NotInverse(_))));
    }

    #[test]
    fn hom_sets() {
        let sl2 = inv("semilattice_chain", 2);
        assert_eq!(sl2.ls_morphisms(0, 1).unwrap(), vec![LSMorphism { s: 0, e: 1 }]);
        assert!(sl2.ls_morphisms(1, 1).unwrap().contains(&LSMorphism { s: 1, e: 1 }));
        let i2 = inv("symmetric_inverse", 2);
        let homs: Vec<usize> = i2.ls_morphisms(1, 5).unwrap().iter().map(|m| m.s).collect();
        assert_eq!(homs, vec![1, 2]);
        let c2 = inv("cyclic_group", 2);
        assert!(matches!(c2.ls_morphisms(1, 0), Err(Error::NotIdempotent(1))));
    }

    #[test]
    fn pullbacks() {
        let sl2 = inv("semilattice_chain", 2);
        let sq = sl2.pullback(LSMorphism { s: 0, e: 1 }, LSMorphism { s: 1, e: 1 }).unwrap();
        assert_eq!(sq.apex, 0);
        assert!(sq.universal);
        let i2 = inv("symmetric_inverse", 2);
        let s = LSMorphism { s: 1, e: 5 };
        let t = LSMorphism { s: 2, e: 5 };
        let sq = i2.pullback(s, t).unwrap();
        // images {1} and {2} are disjoint
        assert_eq!(sq.apex, 0);
        assert!(sq.universal);
        let same = i2.pullback(t, t).unwrap();
        assert_eq!(same.apex, i2.semigroup().cod(2));
        assert_eq!(same.to_c, same.to_d);
    }

    #[test]
    fn corrupted_identity_transition() {
        let sl2 = inv("semilattice_chain", 2);
        let p = Presheaf::terminal(&sl2);
        let labels = vec![vec!["w".to_string()], vec!["u".to_string(), "v".to_string()]];
        let mut transitions = vec![vec![]; sl2.morphisms().len()];
        for (j, m) in sl2.morphisms().iter().enumerate() {
            transitions[j] = match (m.s, m.e) {
                (0, 0) => vec![0],
                (0, 1) => vec![0, 0],
                (1, 1) => vec![0, 1],
                _ => unreachable!(),
            };
        }
        assert!(Presheaf::new(sl2.clone(), labels.clone(), transitions.clone()).is_ok());
        let id = sl2.morphism_index(LSMorphism { s: 1, e: 1 }).unwrap();
        transitions[id] = vec![1, 0];
        assert!(matches!(Presheaf::new(sl2.clone(), labels, transitions), Err(Error::IdentityViolation(1))));
        assert!(p.is_subterminal());
    }

    #[test]
    fn chain_representables() {
        let sl2 = inv("semilattice_chain", 2);
        let top = representable_presheaf(&sl2, 1).unwrap();
        assert_eq!(top.labels(1), ["1".to_string()]);
        assert_eq!(top.labels(0), ["0".to_string()]);
        let s1 = representable_semigroup(&sl2, 1).unwrap();
        assert_eq!(s1.pairs, vec![(0, 0), (1, 1)]);
        let s0 = representable_semigroup(&sl2, 0).unwrap();
        assert_eq!(s0.pairs, vec![(0, 0)]);
        let inc = representable_action(&sl2, LSMorphism { s: 0, e: 1 }).unwrap();
        assert_eq!(inc.map(), &[0]);
    }
}
