//! Ordered groupoids, mediators, and the passage between them and
//! quasi-involutive semigroups.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, natural_order, Relation, StarMorphism, StarSemigroup};

/// A finite ordered groupoid. Composition `x∘y` is defined iff
/// `dom(x) = cod(y)`; the object order is read off the identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedGroupoid {
    objects: usize,
    dom: Vec<usize>,
    cod: Vec<usize>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
    compose: Vec<Option<usize>>,
    order: Relation,
}

/// An ordered groupoid with a mediator table `m[p][q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedGroupoidWithMediator {
    groupoid: OrderedGroupoid,
    mediator: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MediatorKind {
    Trivial,
    Symmetric,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MediatorViolation {
    /// d(m_pq) ≤ q or c(m_pq) ≤ p fails.
    Bound { p: usize, q: usize },
    /// p ≤ p', q ≤ q' but m_pq ≰ m_p'q'.
    OrderPreservation { p: usize, q: usize, p2: usize, q2: usize },
    /// (ᵖx)^q ≠ ᵖ(x^q).
    Commutation { p: usize, x: usize, q: usize },
}

impl OrderedGroupoid {
    /// Builds and validates. `compose[x][y]` must be `Some` exactly when
    /// `dom(x) = cod(y)`.
    pub fn new(
        objects: usize,
        dom: Vec<usize>,
        cod: Vec<usize>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        compose: Vec<Vec<Option<usize>>>,
        order: Relation,
    ) -> Result<Self> {
        let k = dom.len();
        let shape_ok = cod.len() == k
            && inverse.len() == k
            && identity.len() == objects
            && compose.len() == k
            && compose.iter().all(|r| r.len() == k)
            && order.size() == k
            && dom.iter().chain(&cod).all(|&p| p < objects)
            && identity.iter().chain(&inverse).all(|&x| x < k)
            && compose.iter().flatten().flatten().all(|&x| x < k);
        if !shape_ok {
            return Err(Error::InvalidGroupoid("tables have inconsistent shapes".into()));
        }
        let g = OrderedGroupoid {
            objects,
            dom,
            cod,
            identity,
            inverse,
            compose: compose.into_iter().flatten().collect(),
            order,
        };
        if let Some(v) = g.violations().into_iter().next() {
            return Err(Error::InvalidGroupoid(v));
        }
        Ok(g)
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn morphism_count(&self) -> usize {
        self.dom.len()
    }

    pub fn dom(&self, x: usize) -> usize {
        self.dom[x]
    }

    pub fn cod(&self, x: usize) -> usize {
        self.cod[x]
    }

    pub fn identity(&self, p: usize) -> usize {
        self.identity[p]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn order(&self) -> &Relation {
        &self.order
    }

    /// `x∘y` when `dom(x) = cod(y)`.
    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        self.compose[x * self.morphism_count() + y]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.order.contains(x, y)
    }

    pub fn object_leq(&self, p: usize, q: usize) -> bool {
        self.order.contains(self.identity[p], self.identity[q])
    }

    /// Greatest lower bound of two objects, when it exists.
    pub fn meet(&self, p: usize, q: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.objects)
            .filter(|&r| self.object_leq(r, p) && self.object_leq(r, q))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&r| lower.iter().all(|&s| self.object_leq(s, r)))
    }

    /// The unique y ≤ x with dom(y) = p.
    pub fn restrict(&self, x: usize, p: usize) -> Result<usize> {
        if !self.object_leq(p, self.dom[x]) {
            return Err(Error::NotBounded { p, bound: self.dom[x] });
        }
        self.unique_below(x, p, |y| self.dom[y])
    }

    /// The unique y ≤ x with cod(y) = q.
    pub fn corestrict(&self, x: usize, q: usize) -> Result<usize> {
        if !self.object_leq(q, self.cod[x]) {
            return Err(Error::NotBounded { p: q, bound: self.cod[x] });
        }
        self.unique_below(x, q, |y| self.cod[y])
    }

    fn unique_below(&self, x: usize, p: usize, end: impl Fn(usize) -> usize) -> Result<usize> {
        let mut it = (0..self.morphism_count()).filter(|&y| self.leq(y, x) && end(y) == p);
        match (it.next(), it.next()) {
            (Some(y), None) => Ok(y),
            _ => Err(Error::NonUnique { x, p }),
        }
    }

    /// x ⊗ y: restrict x when c(y) ≤ d(x), corestrict y when d(x) ≤ c(y).
    pub fn extended_compose(&self, x: usize, y: usize) -> Result<usize> {
        let (dx, cy) = (self.dom[x], self.cod[y]);
        let composed = if self.object_leq(cy, dx) {
            self.compose(self.restrict(x, cy)?, y)
        } else if self.object_leq(dx, cy) {
            self.compose(x, self.corestrict(y, dx)?)
        } else {
            return Err(Error::NotComparable(x, y));
        };
        composed.ok_or_else(|| Error::InvalidGroupoid(format!("extended composite of {x},{y} undefined")))
    }

    /// All violated ordered-groupoid axioms, described with witnesses.
    pub fn violations(&self) -> Vec<String> {
        let k = self.morphism_count();
        let mut out = Vec::new();
        for p in 0..self.objects {
            let i = self.identity[p];
            if self.dom[i] != p || self.cod[i] != p {
                out.push(format!("identity of object {p} has wrong ends"));
            }
        }
        for x in 0..k {
            for y in 0..k {
                match (self.dom[x] == self.cod[y], self.compose(x, y)) {
                    (true, None) => out.push(format!("composite {x}∘{y} missing")),
                    (false, Some(_)) => out.push(format!("composite {x}∘{y} defined off-diagonal")),
                    (true, Some(xy)) => {
                        if self.dom[xy] != self.dom[y] || self.cod[xy] != self.cod[x] {
                            out.push(format!("composite {x}∘{y} has wrong ends"));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for x in 0..k {
            if self.compose(self.identity[self.cod[x]], x) != Some(x)
                || self.compose(x, self.identity[self.dom[x]]) != Some(x)
            {
                out.push(format!("identity law fails at {x}"));
            }
            let inv = self.inverse[x];
            if self.compose(x, inv) != Some(self.identity[self.cod[x]])
                || self.compose(inv, x) != Some(self.identity[self.dom[x]])
            {
                out.push(format!("inverse law fails at {x}"));
            }
        }
        for x in 0..k {
            for y in 0..k {
                let Some(xy) = self.compose(x, y) else { continue };
                for z in 0..k {
                    if let Some(yz) = self.compose(y, z) {
                        if self.compose(xy, z) != self.compose(x, yz) {
                            out.push(format!("associativity fails at ({x},{y},{z})"));
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        if !self.order.is_partial_order() {
            out.push("order is not a partial order".into());
            return out;
        }
        for (x, y) in self.order.pairs() {
            if !self.leq(self.inverse[x], self.inverse[y]) {
                out.push(format!("order not preserved by inversion at ({x},{y})"));
            }
            if !self.object_leq(self.dom[x], self.dom[y]) || !self.object_leq(self.cod[x], self.cod[y]) {
                out.push(format!("order not compatible with ends at ({x},{y})"));
            }
        }
        for (x, x2) in self.order.pairs() {
            for (y, y2) in self.order.pairs() {
                if let (Some(a), Some(b)) = (self.compose(x, y), self.compose(x2, y2)) {
                    if !self.leq(a, b) {
                        out.push(format!("order not compatible with composition at ({x},{x2},{y},{y2})"));
                    }
                }
            }
        }
        for x in 0..k {
            for p in 0..self.objects {
                if self.object_leq(p, self.dom[x]) {
                    if let Err(e) = self.restrict(x, p) {
                        out.push(format!("restriction: {e}"));
                    }
                }
                if self.object_leq(p, self.cod[x]) {
                    match self.corestrict(x, p) {
                        Err(e) => out.push(format!("corestriction: {e}")),
                        Ok(c) => {
                            let via = self.restrict(self.inverse[x], p).map(|r| self.inverse[r]);
                            if via.ok() != Some(c) {
                                out.push(format!("corestriction of {x} to {p} is not the inverse restriction"));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl OrderedGroupoidWithMediator {
    /// Builds and validates both the groupoid and the mediator.
    pub fn new(groupoid: OrderedGroupoid, mediator: Vec<Vec<usize>>) -> Result<Self> {
        let m = groupoid.objects;
        if mediator.len() != m || mediator.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidGroupoid("mediator table has wrong shape".into()));
        }
        if mediator.iter().flatten().any(|&x| x >= groupoid.morphism_count()) {
            return Err(Error::InvalidGroupoid("mediator entry out of range".into()));
        }
        let g = OrderedGroupoidWithMediator {
            groupoid,
            mediator: mediator.into_iter().flatten().collect(),
        };
        if let Some(v) = g.validate_mediator().into_iter().next() {
            return Err(Error::InvalidGroupoid(format!("{v:?}")));
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked(groupoid: OrderedGroupoid, mediator: Vec<usize>) -> Self {
        OrderedGroupoidWithMediator { groupoid, mediator }
    }

    pub fn groupoid(&self) -> &OrderedGroupoid {
        &self.groupoid
    }

    pub fn mediator(&self, p: usize, q: usize) -> usize {
        self.mediator[p * self.groupoid.objects + q]
    }

    pub fn mediator_rows(&self) -> Vec<Vec<usize>> {
        self.mediator.chunks(self.groupoid.objects.max(1)).map(|r| r.to_vec()).collect()
    }

    /// ᵖx = m_{p,c(x)} ⊗ x.
    pub fn left_act(&self, p: usize, x: usize) -> Result<usize> {
        let g = &self.groupoid;
        g.extended_compose(self.mediator(p, g.cod[x]), x)
    }

    /// x^q = x ⊗ m_{d(x),q}.
    pub fn right_act(&self, x: usize, q: usize) -> Result<usize> {
        let g = &self.groupoid;
        g.extended_compose(x, self.mediator(g.dom[x], q))
    }

    /// Every violated mediator condition, in lexicographic order of witnesses.
    pub fn validate_mediator(&self) -> Vec<MediatorViolation> {
        let g = &self.groupoid;
        let m = g.objects;
        let mut out = Vec::new();
        for p in 0..m {
            for q in 0..m {
                let x = self.mediator(p, q);
                if !g.object_leq(g.dom[x], q) || !g.object_leq(g.cod[x], p) {
                    out.push(MediatorViolation::Bound { p, q });
                }
            }
        }
        for p in 0..m {
            for q in 0..m {
                for p2 in 0..m {
                    for q2 in 0..m {
                        if g.object_leq(p, p2)
                            && g.object_leq(q, q2)
                            && !g.leq(self.mediator(p, q), self.mediator(p2, q2))
                        {
                            out.push(MediatorViolation::OrderPreservation { p, q, p2, q2 });
                        }
                    }
                }
            }
        }
        for p in 0..m {
            for x in 0..g.morphism_count() {
                for q in 0..m {
                    let a = self.left_act(p, x).and_then(|y| self.right_act(y, q));
                    let b = self.right_act(x, q).and_then(|y| self.left_act(p, y));
                    match (a, b) {
                        (Ok(a), Ok(b)) if a == b => {}
                        _ => out.push(MediatorViolation::Commutation { p, x, q }),
                    }
                }
            }
        }
        out
    }

    /// The product x ⊗ m_{d(x)c(y)} ⊗ y.
    pub fn product(&self, x: usize, y: usize) -> Result<usize> {
        let g = &self.groupoid;
        let m = self.mediator(g.dom[x], g.cod[y]);
        let left = g.extended_compose(g.extended_compose(x, m)?, y)?;
        let right = g.extended_compose(x, g.extended_compose(m, y)?)?;
        if left != right {
            return Err(Error::Invariant(format!("extended composition not associative at ({x},{y})")));
        }
        Ok(left)
    }
}

fn groupoid_from_semigroup(x: &StarSemigroup) -> Result<(OrderedGroupoid, Vec<usize>)> {
    let order = natural_order(x)?;
    let projections = x.projections();
    let mut object_of = vec![usize::MAX; x.order()];
    for (i, &p) in projections.iter().enumerate() {
        object_of[p] = i;
    }
    let end = |e: usize| -> Result<usize> {
        match object_of[e] {
            usize::MAX => Err(Error::InvalidGroupoid(format!("domain {e} is not a projection"))),
            i => Ok(i),
        }
    };
    let dom = x.elements().map(|a| end(x.dom(a))).collect::<Result<Vec<_>>>()?;
    let cod = x.elements().map(|a| end(x.cod(a))).collect::<Result<Vec<_>>>()?;
    let n = x.order();
    let mut compose = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            if dom[a] == cod[b] {
                compose[a * n + b] = Some(x.mul(a, b));
            }
        }
    }
    let g = OrderedGroupoid {
        objects: projections.len(),
        dom,
        cod,
        identity: projections.clone(),
        inverse: x.star_table().to_vec(),
        compose,
        order,
    };
    Ok((g, projections))
}

/// The ordered groupoid of a locally involutive semigroup, without mediator.
pub fn esn_ordered_groupoid(x: &StarSemigroup) -> Result<OrderedGroupoid> {
    let (g, _) = groupoid_from_semigroup(x)?;
    if let Some(v) = g.violations().into_iter().next() {
        return Err(Error::Invariant(format!("groupoid of a locally involutive semigroup: {v}")));
    }
    Ok(g)
}

/// The ordered groupoid with mediator m_pq = pq of a quasi-involutive semigroup.
pub fn esn_groupoid(x: &StarSemigroup) -> Result<OrderedGroupoidWithMediator> {
    let report = classify(x);
    if !report.quasi_involutive.holds {
        return Err(Error::NotQuasiInvolutive(report.quasi_involutive.witness.unwrap_or_default()));
    }
    let g = esn_ordered_groupoid(x)?;
    let ps = g.identity.clone();
    let mediator = ps.iter().flat_map(|&p| ps.iter().map(move |&q| x.mul(p, q))).collect();
    let gm = OrderedGroupoidWithMediator::new_unchecked(g, mediator);
    if let Some(v) = gm.validate_mediator().into_iter().next() {
        return Err(Error::Invariant(format!("canonical mediator invalid: {v:?}")));
    }
    Ok(gm)
}

/// The quasi-involutive semigroup on the morphisms of G.
pub fn esn_semigroup(gm: &OrderedGroupoidWithMediator) -> Result<StarSemigroup> {
    let g = &gm.groupoid;
    let k = g.morphism_count();
    let mut mul = Vec::with_capacity(k * k);
    for x in 0..k {
        for y in 0..k {
            mul.push(gm.product(x, y)?);
        }
    }
    let s = StarSemigroup::from_flat(None, k, mul, g.inverse.clone())
        .map_err(|e| Error::InvalidGroupoid(format!("induced product: {e}")))?;
    let mut identities = g.identity.clone();
    identities.sort_unstable();
    if s.projections() != identities {
        let stray = s.projections().into_iter().find(|p| !identities.contains(p));
        return Err(Error::InvalidGroupoid(format!(
            "projection {stray:?} of the induced semigroup is not an identity"
        )));
    }
    if !classify(&s).quasi_involutive.holds {
        return Err(Error::InvalidGroupoid("induced semigroup is not quasi-involutive".into()));
    }
    Ok(s)
}

fn kind_of(gm: &OrderedGroupoidWithMediator) -> MediatorKind {
    let g = &gm.groupoid;
    let m = g.objects;
    let pairs = || (0..m).flat_map(|p| (0..m).map(move |q| (p, q)));
    if pairs().all(|(p, q)| g.meet(p, q).map(|r| g.identity[r]) == Some(gm.mediator(p, q))) {
        MediatorKind::Trivial
    } else if pairs().all(|(p, q)| g.inverse[gm.mediator(p, q)] == gm.mediator(q, p)) {
        MediatorKind::Symmetric
    } else {
        MediatorKind::General
    }
}

/// Trivial, symmetric or general; checked against the classification of the
/// induced semigroup.
pub fn mediator_kind(gm: &OrderedGroupoidWithMediator) -> Result<MediatorKind> {
    let kind = kind_of(gm);
    let r = classify(&esn_semigroup(gm)?);
    let symmetric = kind != MediatorKind::General;
    if (kind == MediatorKind::Trivial) != r.inverse.holds || symmetric != r.involutive.holds {
        return Err(Error::EquivalenceBroken(format!(
            "mediator {kind:?} but inverse={} involutive={}",
            r.inverse.holds, r.involutive.holds
        )));
    }
    Ok(kind)
}

/// Whether two mediated groupoids agree once objects are matched through
/// their identity morphisms.
pub fn same_up_to_objects(a: &OrderedGroupoidWithMediator, b: &OrderedGroupoidWithMediator) -> bool {
    let (g, h) = (&a.groupoid, &b.groupoid);
    if g.objects != h.objects || g.morphism_count() != h.morphism_count() {
        return false;
    }
    let mut obj = vec![usize::MAX; g.objects];
    for p in 0..g.objects {
        match (0..h.objects).find(|&q| h.identity[q] == g.identity[p]) {
            Some(q) => obj[p] = q,
            None => return false,
        }
    }
    let k = g.morphism_count();
    (0..k).all(|x| obj[g.dom[x]] == h.dom[x] && obj[g.cod[x]] == h.cod[x])
        && g.compose == h.compose
        && g.inverse == h.inverse
        && g.order == h.order
        && (0..g.objects).all(|p| (0..g.objects).all(|q| a.mediator(p, q) == b.mediator(obj[p], obj[q])))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorReport {
    /// Projections go to projections and composable pairs to composable pairs.
    pub functor: bool,
    pub order_preserving: bool,
    pub mediator_preserving: bool,
}

/// How a map between quasi-involutive semigroups acts on their groupoids.
pub fn induced_functor(f: &StarMorphism) -> Result<FunctorReport> {
    let g = esn_groupoid(f.source())?;
    let h = esn_groupoid(f.target())?;
    let (x, s) = (f.source(), f.target());
    let gg = &g.groupoid;
    let obj_image: Vec<Option<usize>> = gg
        .identity
        .iter()
        .map(|&p| h.groupoid.identity.iter().position(|&q| q == f.apply(p)))
        .collect();
    let mut functor = obj_image.iter().all(Option::is_some);
    if functor {
        for a in x.elements() {
            if obj_image[gg.dom[a]] != Some(h.groupoid.dom[f.apply(a)])
                || obj_image[gg.cod[a]] != Some(h.groupoid.cod[f.apply(a)])
                || f.apply(x.star(a)) != s.star(f.apply(a))
            {
                functor = false;
            }
            for b in x.elements() {
                if let Some(ab) = gg.compose(a, b) {
                    if h.groupoid.compose(f.apply(a), f.apply(b)) != Some(f.apply(ab)) {
                        functor = false;
                    }
                }
            }
        }
    }
    let order_preserving = gg
        .order
        .pairs()
        .into_iter()
        .all(|(a, b)| h.groupoid.leq(f.apply(a), f.apply(b)));
    let mediator_preserving = functor
        && (0..gg.objects).all(|p| {
            (0..gg.objects).all(|q| {
                let (fp, fq) = (obj_image[p].unwrap(), obj_image[q].unwrap());
                f.apply(g.mediator(p, q)) == h.mediator(fp, fq)
            })
        });
    Ok(FunctorReport {
        functor,
        order_preserving,
        mediator_preserving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;

    #[test]
    fn chain_groupoid() {
        let sl2 = standard_family("semilattice_chain", 2).unwrap();
        let gm = esn_groupoid(&sl2).unwrap();
        let g = gm.groupoid();
        assert_eq!(g.object_count(), 2);
        assert_eq!(g.restrict(1, 0).unwrap(), 0);
        assert_eq!(g.extended_compose(1, 0).unwrap(), 0);
        assert_eq!(mediator_kind(&gm).unwrap(), MediatorKind::Trivial);
        assert_eq!(esn_semigroup(&gm).unwrap(), sl2);
    }

    #[test]
    fn i2_groupoid() {
        let i2 = standard_family("symmetric_inverse", 2).unwrap();
        let gm = esn_groupoid(&i2).unwrap();
        let g = gm.groupoid();
        assert_eq!((g.object_count(), g.morphism_count()), (4, 7));
        // swap restricted to the first point is the map 1 ↦ 2 (index 2)
        let first = g.identity.iter().position(|&p| p == 1).unwrap();
        assert_eq!(g.restrict(6, first).unwrap(), 2);
        assert_eq!(g.extended_compose(6, 1).unwrap(), 2);
        assert_eq!(mediator_kind(&gm).unwrap(), MediatorKind::Trivial);
        assert_eq!(esn_semigroup(&gm).unwrap(), i2);
        assert!(matches!(g.restrict(1, 2), Err(Error::NotBounded { .. })));
    }

    #[test]
    fn cyclic_groupoid() {
        let c2 = standard_family("cyclic_group", 2).unwrap();
        let gm = esn_groupoid(&c2).unwrap();
        assert_eq!(gm.groupoid().object_count(), 1);
        assert_eq!(gm.mediator(0, 0), 0);
        assert_eq!(mediator_kind(&gm).unwrap(), MediatorKind::Trivial);
    }

    #[test]
    fn corrupted_mediator_entry_is_reported() {
        let i2 = standard_family("symmetric_inverse", 2).unwrap();
        let gm = esn_groupoid(&i2).unwrap();
        let mut bad = gm.mediator_rows();
        // m at (full identity, full identity) replaced by the swap
        bad[3][3] = 6;
        let err = OrderedGroupoidWithMediator::new(gm.groupoid().clone(), bad);
        assert!(matches!(err, Err(Error::InvalidGroupoid(_))));
        let raw = OrderedGroupoidWithMediator::new_unchecked(gm.groupoid().clone(), {
            let mut m = gm.mediator.clone();
            m[15] = 6;
            m
        });
        assert!(raw
            .validate_mediator()
            .iter()
            .any(|v| matches!(v, MediatorViolation::Commutation { .. })));
    }

    #[test]
    fn rejects_left_zero() {
        let lz2 = standard_family("left_zero", 2).unwrap();
        assert!(matches!(esn_groupoid(&lz2), Err(Error::NotQuasiInvolutive(_))));
        assert!(esn_ordered_groupoid(&lz2).is_ok());
    }

    #[test]
    fn group_with_non_identity_mediator_is_flagged() {
        // one object, morphisms {1, g}, m = g: the induced semigroup has g as
        // a projection, so projections are not the identities
        let c2 = standard_family("cyclic_group", 2).unwrap();
        let g = esn_groupoid(&c2).unwrap().groupoid().clone();
        let gm = OrderedGroupoidWithMediator::new(g, vec![vec![1]]).unwrap();
        assert!(matches!(esn_semigroup(&gm), Err(Error::InvalidGroupoid(_))));
    }
}
