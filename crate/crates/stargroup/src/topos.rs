//! The adjunction between presheaves on L(S) and *-semigroups over S.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, StarMorphism, StarSemigroup};
use crate::site::{InverseSemigroup, LSMorphism, Presheaf, RepresentableSemigroup};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Λ(P): pairs (r, x) with x ∈ P(c(r)), structure map (r, x) ↦ r.
#[derive(Debug, Clone)]
pub struct LambdaObject {
    pub presheaf: Presheaf,
    pub pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    pub semigroup: Arc<StarSemigroup>,
    pub structure: StarMorphism,
    /// Row-major |Λ| × |S| table of (r, x)s = (rs, x·c(rs)).
    pub action: Vec<usize>,
}

impl LambdaObject {
    pub fn index(&self, pair: (usize, usize)) -> Option<usize> {
        self.index.get(&pair).copied()
    }

    pub fn act(&self, a: usize, s: usize) -> usize {
        self.action[a * self.structure.target().order() + s]
    }
}

fn cod_morphism(x: &StarSemigroup, r: usize) -> LSMorphism {
    LSMorphism { s: r, e: x.cod(r) }
}

pub fn lambda(p: &Presheaf) -> Result<LambdaObject> {
    let base = p.base();
    let s = base.semigroup();
    let mut pairs = Vec::new();
    for r in s.elements() {
        for x in 0..p.fiber_size(s.cod(r)) {
            pairs.push((r, x));
        }
    }
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let n = pairs.len();
    if n == 0 {
        return Err(Error::InvalidPresheaf("Λ of the empty presheaf has no elements".into()));
    }
    let restrict = |r: usize, x: usize, t: usize| -> (usize, usize) {
        // (t, x·c(t)) where c(t) ≤ c(r)
        let ct = s.cod(t);
        (t, p.act(x, LSMorphism { s: ct, e: s.cod(r) }))
    };
    let mut mul = Vec::with_capacity(n * n);
    for &(a, y) in &pairs {
        for &(r, _) in &pairs {
            mul.push(index[&restrict(a, y, s.mul(a, r))]);
        }
    }
    let star = pairs
        .iter()
        .map(|&(r, x)| index[&(s.star(r), p.act(x, cod_morphism(s, r)))])
        .collect();
    let mut action = Vec::with_capacity(n * s.order());
    for &(r, x) in &pairs {
        for t in s.elements() {
            action.push(index[&restrict(r, x, s.mul(r, t))]);
        }
    }
    let semigroup = Arc::new(StarSemigroup::from_flat(Some("Λ(P)".into()), n, mul, star)?);
    let structure = StarMorphism::new(semigroup.clone(), s.clone(), pairs.iter().map(|q| q.0).collect())?;
    let lam = LambdaObject { presheaf: p.clone(), pairs, index, semigroup, structure, action };
    lam.check()?;
    Ok(lam)
}

impl LambdaObject {
    fn check(&self) -> Result<()> {
        let x = &self.semigroup;
        let s = self.structure.target();
        if let Some(w) = classify(x).left_involutive.witness {
            return Err(Error::Invariant(format!("Λ(P) not left involutive at {w:?}")));
        }
        if !self.structure.is_star_hom() || !self.structure.is_etale()?.etale {
            return Err(Error::Invariant("structure map of Λ(P) is not an étale *-homomorphism".into()));
        }
        for a in x.elements() {
            let fa = self.structure.apply(a);
            for t in s.elements() {
                let lhs = x.star(self.act(a, t));
                let inner = x.star(self.act(x.star(a), s.mul(fa, t)));
                if lhs != self.act(inner, s.star(fa)) {
                    return Err(Error::Invariant(format!("left identity fails at ({a},{t})")));
                }
            }
        }
        let projections: Vec<usize> = x.projections();
        let expected: Vec<usize> = (0..self.pairs.len())
            .filter(|&i| s.is_idempotent(self.pairs[i].0))
            .collect();
        if projections != expected {
            return Err(Error::Invariant("projections of Λ(P) are not the pairs over idempotents".into()));
        }
        Ok(())
    }
}

/// A morphism of presheaves, one component per object of L(S).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafMap {
    pub components: Vec<Vec<usize>>,
}

impl PresheafMap {
    pub fn identity(p: &Presheaf) -> Self {
        PresheafMap {
            components: p.all_labels().iter().map(|f| (0..f.len()).collect()).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PresheafMap) -> PresheafMap {
        PresheafMap {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        }
    }

    pub fn component(&self, base: &InverseSemigroup, e: usize) -> &[usize] {
        &self.components[base.object_of(e).expect("idempotent")]
    }

    pub fn is_iso(&self, q: &Presheaf) -> bool {
        self.components.iter().zip(q.all_labels()).all(|(c, f)| {
            let mut v = c.clone();
            v.sort_unstable();
            v == (0..f.len()).collect::<Vec<_>>()
        })
    }
}

/// Checks shapes and the naturality squares γ_d(x·s) = γ_e(x)·s.
pub fn check_natural(p: &Presheaf, q: &Presheaf, g: &PresheafMap) -> Result<()> {
    let base = p.base();
    if g.components.len() != base.idempotents().len() {
        return Err(Error::Shape("presheaf map has the wrong number of components".into()));
    }
    for &e in base.idempotents() {
        let c = g.component(base, e);
        if c.len() != p.fiber_size(e) || c.iter().any(|&y| y >= q.fiber_size(e)) {
            return Err(Error::Shape(format!("component at {e} malformed")));
        }
    }
    for &m in base.morphisms() {
        let d = base.dom(m);
        for x in 0..p.fiber_size(m.e) {
            if g.component(base, d)[p.act(x, m)] != q.act(g.component(base, m.e)[x], m) {
                return Err(Error::NotNatural { s: m.s, e: m.e, x });
            }
        }
    }
    Ok(())
}

/// Λ(γ)(r, x) = (r, γ_{c(r)}(x)).
pub fn lambda_morphism(lp: &LambdaObject, lq: &LambdaObject, g: &PresheafMap) -> Result<StarMorphism> {
    check_natural(&lp.presheaf, &lq.presheaf, g)?;
    let base = lp.presheaf.base();
    let s = base.semigroup();
    let map = lp
        .pairs
        .iter()
        .map(|&(r, x)| lq.index((r, g.component(base, s.cod(r))[x])).unwrap())
        .collect();
    let h = StarMorphism::new(lp.semigroup.clone(), lq.semigroup.clone(), map)?;
    if !h.is_star_hom() || h.then(&lq.structure)?.map() != lp.structure.map() {
        return Err(Error::Invariant("Λ(γ) is not a *-homomorphism over S".into()));
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Fast path when applicable, generic otherwise.
    Auto,
    Generic,
    Fast,
    /// Run both where the fast path applies and require equal results.
    Both,
}

#[derive(Debug, Clone, Copy)]
pub struct GammaOptions {
    pub budget: u64,
    pub strategy: Strategy,
}

impl Default for GammaOptions {
    fn default() -> Self {
        GammaOptions { budget: DEFAULT_BUDGET, strategy: Strategy::Auto }
    }
}

/// Γ(f): left *-homomorphisms S(e) → X over S, stored as value tables in
/// S(e) carrier order and sorted.
#[derive(Debug, Clone)]
pub struct GammaPresheaf {
    pub presheaf: Presheaf,
    pub sections: Vec<Vec<Vec<usize>>>,
    pub fast_path: bool,
}

impl GammaPresheaf {
    pub fn sections_at(&self, e: usize) -> &[Vec<usize>] {
        &self.sections[self.presheaf.base().object_of(e).expect("idempotent")]
    }

    pub fn position(&self, e: usize, table: &[usize]) -> Option<usize> {
        self.sections_at(e).binary_search_by(|t| t.as_slice().cmp(table)).ok()
    }
}

fn check_over(f: &StarMorphism, base: &InverseSemigroup) -> Result<()> {
    if **f.target() != **base.semigroup() {
        return Err(Error::CarrierMismatch("map does not land in the base semigroup".into()));
    }
    Ok(())
}

/// Whether the fast path applies: f étale and X left involutive.
pub fn fast_path_applies(f: &StarMorphism) -> bool {
    f.etale() && classify(f.source()).left_involutive.holds
}

pub fn gamma(f: &StarMorphism, base: &Arc<InverseSemigroup>, opts: GammaOptions) -> Result<GammaPresheaf> {
    check_over(f, base)?;
    if !f.is_star_hom() {
        return Err(Error::NotStarHom(f.flags().multiplicative.witness.clone().unwrap_or_default()));
    }
    let fast_ok = fast_path_applies(f);
    let reps = base.representables();
    let mut budget = opts.budget;
    let sections: Vec<Vec<Vec<usize>>> = match gamma_sections(f, &reps, opts, fast_ok, &mut budget) {
        Err(Error::SearchBudgetExceeded(_)) => return Err(Error::SearchBudgetExceeded(opts.budget)),
        other => other?,
    };
    let presheaf = sections_presheaf(base, &sections)?;
    Ok(GammaPresheaf { presheaf, sections, fast_path: fast_ok && opts.strategy != Strategy::Generic })
}

fn gamma_sections(
    f: &StarMorphism,
    reps: &[RepresentableSemigroup],
    opts: GammaOptions,
    fast_ok: bool,
    budget: &mut u64,
) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(match (opts.strategy, fast_ok) {
        (Strategy::Fast, false) => return Err(Error::NotEtale(f.is_etale()?.witness.unwrap_or(0))),
        (Strategy::Fast, true) | (Strategy::Auto, true) => reps.iter().map(|r| fast_sections(f, r)).collect::<Result<_>>()?,
        (Strategy::Generic, _) | (Strategy::Auto, false) | (Strategy::Both, false) => reps
            .iter()
            .map(|r| left_homs_over(r, f, budget))
            .collect::<Result<_>>()?,
        (Strategy::Both, true) => {
            let fast: Vec<Vec<Vec<usize>>> = reps.iter().map(|r| fast_sections(f, r)).collect::<Result<_>>()?;
            let generic: Vec<Vec<Vec<usize>>> = reps
                .iter()
                .map(|r| left_homs_over(r, f, budget))
                .collect::<Result<_>>()?;
            if fast != generic {
                return Err(Error::Invariant("fast and generic Γ disagree".into()));
            }
            fast
        }
    })
}

fn sections_presheaf(base: &Arc<InverseSemigroup>, sections: &[Vec<Vec<usize>>]) -> Result<Presheaf> {
    let s = base.semigroup();
    let reps = base.representables();
    let labels = sections
        .iter()
        .map(|f| {
            f.iter()
                .map(|t| format!("[{}]", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                .collect()
        })
        .collect();
    let mut transitions = Vec::new();
    for &m in base.morphisms() {
        let d = base.dom(m);
        let (src, tgt) = (&reps[base.object_of(m.e).unwrap()], &reps[base.object_of(d).unwrap()]);
        let into = &sections[base.object_of(d).unwrap()];
        let mut t = Vec::new();
        for alpha in &sections[base.object_of(m.e).unwrap()] {
            let restricted: Vec<usize> = tgt
                .pairs
                .iter()
                .map(|&(p, q)| alpha[src.index((p, s.mul(m.s, q))).unwrap()])
                .collect();
            let pos = into
                .binary_search(&restricted)
                .map_err(|_| Error::Invariant(format!("restriction along ({},{}) left Γ", m.s, m.e)))?;
            t.push(pos);
        }
        transitions.push(t);
    }
    Presheaf::new(base.clone(), labels, transitions)
}

/// Generic enumeration of left *-homomorphisms S(e) → X over S.
///
/// The unit (e, e) is tried first among projections of its fiber, then
/// pairs over codomain idempotents, then projections of S(e), then the rest,
/// so each identity is checked as soon as its elements are assigned.
pub fn left_homs_over(rep: &RepresentableSemigroup, f: &StarMorphism, budget: &mut u64) -> Result<Vec<Vec<usize>>> {
    let t = &rep.semigroup;
    let x = f.source();
    let s = f.target();
    let n = t.order();
    let unit = rep.unit();
    let rank = |u: usize| -> usize {
        let (r, q) = rep.pairs[u];
        if u == unit {
            0
        } else if q == s.cod(r) {
            1
        } else if s.is_idempotent(r) {
            2
        } else {
            3
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (rank(u), u));
    let mut pos = vec![0; n];
    for (i, &u) in order.iter().enumerate() {
        pos[u] = i;
    }
    // constraints bucketed by the position at which they become checkable
    let mut stars: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        stars[pos[u].max(pos[t.star(u)])].push(u);
    }
    let mut homs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in 0..n {
            let w = t.mul(t.dom(u), v);
            let last = pos[u].max(pos[w]).max(pos[t.mul(u, v)]);
            homs[last].push((u, v));
        }
    }
    let candidates: Vec<Vec<usize>> = order
        .iter()
        .map(|&u| {
            let fib = f.fiber(rep.pairs[u].0);
            if u == unit {
                fib.into_iter().filter(|&a| x.is_projection(a)).collect()
            } else {
                fib
            }
        })
        .collect();
    let mut alpha = vec![usize::MAX; n];
    let mut out = Vec::new();
    fn go(
        i: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        stars: &[Vec<usize>],
        homs: &[Vec<(usize, usize)>],
        t: &StarSemigroup,
        x: &StarSemigroup,
        alpha: &mut Vec<usize>,
        budget: &mut u64,
        limit: u64,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if i == order.len() {
            out.push(alpha.clone());
            return Ok(());
        }
        let u = order[i];
        for &a in &candidates[i] {
            if *budget == 0 {
                return Err(Error::SearchBudgetExceeded(limit));
            }
            *budget -= 1;
            alpha[u] = a;
            let ok = stars[i].iter().all(|&w| alpha[t.star(w)] == x.star(alpha[w]))
                && homs[i].iter().all(|&(p, q)| {
                    alpha[t.mul(p, q)] == x.mul(alpha[p], alpha[t.mul(t.dom(p), q)])
                });
            if ok {
                go(i + 1, order, candidates, stars, homs, t, x, alpha, budget, limit, out)?;
            }
        }
        alpha[u] = usize::MAX;
        Ok(())
    }
    let limit = *budget;
    go(0, &order, &candidates, &stars, &homs, t, x, &mut alpha, budget, limit, &mut out)?;
    out.sort();
    Ok(out)
}

/// Sections from the fiber over e: for a projection u over e,
/// ξ(p, q) lifts q at u to y and then p at d(y).
fn fast_sections(f: &StarMorphism, rep: &RepresentableSemigroup) -> Result<Vec<Vec<usize>>> {
    let x = f.source();
    let mut out = Vec::new();
    for u in f.fiber(rep.e) {
        if !x.is_projection(u) {
            return Err(Error::Invariant(format!("fiber element {u} over {} is not a projection", rep.e)));
        }
        let table = rep
            .pairs
            .iter()
            .map(|&(p, q)| {
                let y = f.lift_unchecked(u, q)?;
                f.lift_unchecked(x.dom(y), p)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(table);
    }
    out.sort();
    Ok(out)
}

/// The unit η(P): P → ΓΛ(P), with the objects it was computed through.
#[derive(Debug, Clone)]
pub struct UnitData {
    pub lambda: LambdaObject,
    pub gamma: GammaPresheaf,
    pub map: PresheafMap,
}

/// η_d(a)(r, s) = (r, a·s).
pub fn unit(p: &Presheaf, opts: GammaOptions) -> Result<UnitData> {
    let base = p.base();
    let lam = lambda(p)?;
    let g = gamma(&lam.structure, base, opts)?;
    let reps = base.representables();
    let mut components = Vec::new();
    for (i, &d) in base.idempotents().iter().enumerate() {
        let rep = &reps[i];
        let mut comp = Vec::new();
        for a in 0..p.fiber_size(d) {
            let table: Vec<usize> = rep
                .pairs
                .iter()
                .map(|&(r, s)| lam.index((r, p.act(a, LSMorphism { s, e: d }))).unwrap())
                .collect();
            comp.push(g.position(d, &table).ok_or(Error::UnitNotIso(d))?);
        }
        let mut sorted = comp.clone();
        sorted.sort_unstable();
        if sorted != (0..g.sections[i].len()).collect::<Vec<_>>() {
            return Err(Error::UnitNotIso(d));
        }
        components.push(comp);
    }
    let map = PresheafMap { components };
    check_natural(p, &g.presheaf, &map).map_err(|e| Error::Invariant(format!("unit not natural: {e}")))?;
    Ok(UnitData { lambda: lam, gamma: g, map })
}

/// ε_f: ΛΓ(f) → X, (r, ξ) ↦ ξ(r, c(r)).
#[derive(Debug, Clone)]
pub struct CounitData {
    pub lambda_gamma: LambdaObject,
    pub map: StarMorphism,
    pub bijective: bool,
    /// Bijective with inverse again a left *-homomorphism; bijectivity
    /// alone does not give this.
    pub iso: bool,
}

pub fn counit(f: &StarMorphism, g: &GammaPresheaf) -> Result<CounitData> {
    let base = g.presheaf.base();
    let s = base.semigroup();
    let lam = lambda(&g.presheaf)?;
    let map = lam
        .pairs
        .iter()
        .map(|&(r, k)| {
            let c = s.cod(r);
            let rep = base.representable(c).unwrap();
            g.sections_at(c)[k][rep.index((r, c)).unwrap()]
        })
        .collect();
    let eps = StarMorphism::new(lam.semigroup.clone(), f.source().clone(), map)?;
    if !eps.is_left_star_hom() {
        return Err(Error::Invariant("counit is not a left *-homomorphism".into()));
    }
    if eps.then(f)?.map() != lam.structure.map() {
        return Err(Error::Invariant("counit is not over S".into()));
    }
    let bijective = eps.is_bijective();
    let iso = eps.inverse().is_some_and(|inv| inv.is_left_star_hom());
    Ok(CounitData { lambda_gamma: lam, map: eps, bijective, iso })
}

/// Γ(m): Γ(f) → Γ(g), α ↦ m∘α.
pub fn gamma_map(m: &StarMorphism, gf: &GammaPresheaf, gg: &GammaPresheaf) -> Result<PresheafMap> {
    let base = gf.presheaf.base();
    let mut components = Vec::new();
    for &e in base.idempotents() {
        let comp = gf
            .sections_at(e)
            .iter()
            .map(|alpha| {
                let img: Vec<usize> = alpha.iter().map(|&a| m.apply(a)).collect();
                gg.position(e, &img)
                    .ok_or_else(|| Error::Invariant("composite section is not a left *-homomorphism".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        components.push(comp);
    }
    Ok(PresheafMap { components })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

/// ε_{ΛP} ∘ Λ(η(P)) = id on Λ(P).
pub fn triangle_check(p: &Presheaf, opts: GammaOptions) -> Result<TriangleReport> {
    let u = unit(p, opts)?;
    let lg = lambda(&u.gamma.presheaf)?;
    let lam_eta = lambda_morphism(&u.lambda, &lg, &u.map)?;
    let eps = counit(&u.lambda.structure, &u.gamma)?;
    let comp = lam_eta.then(&eps.map)?;
    let witness = comp.map().iter().enumerate().find(|&(i, &v)| i != v).map(|(i, _)| vec![i]);
    Ok(TriangleReport { holds: witness.is_none(), witness })
}

/// Γ(ε_f) ∘ η(Γ f) = id on Γ(f).
pub fn triangle_check2(f: &StarMorphism, base: &Arc<InverseSemigroup>, opts: GammaOptions) -> Result<TriangleReport> {
    let g = gamma(f, base, opts)?;
    let eps = counit(f, &g)?;
    let u = unit(&g.presheaf, opts)?;
    let back = gamma_map(&eps.map, &u.gamma, &g)?;
    let comp = u.map.then(&back);
    for (i, c) in comp.components.iter().enumerate() {
        if let Some(k) = c.iter().enumerate().position(|(k, &v)| k != v) {
            return Ok(TriangleReport { holds: false, witness: Some(vec![base.idempotents()[i], k]) });
        }
    }
    Ok(TriangleReport { holds: true, witness: None })
}

/// P_f(e) = f⁻¹(e), u·s = d(lift of s at u).
#[derive(Debug, Clone)]
pub struct FiberPresheaf {
    pub presheaf: Presheaf,
    /// Elements of X in each fiber, per object.
    pub fibers: Vec<Vec<usize>>,
}

fn require_etale_left_involutive(f: &StarMorphism) -> Result<()> {
    if let Some(w) = classify(f.source()).left_involutive.witness {
        return Err(Error::NotLeftInvolutive(w));
    }
    let r = f.is_etale()?;
    if !r.etale {
        return Err(Error::NotEtale(r.witness.unwrap_or(0)));
    }
    if !f.is_star_hom() {
        return Err(Error::NotStarHom(f.flags().multiplicative.witness.clone().unwrap_or_default()));
    }
    Ok(())
}

pub fn fiber_presheaf(f: &StarMorphism, base: &Arc<InverseSemigroup>) -> Result<FiberPresheaf> {
    check_over(f, base)?;
    require_etale_left_involutive(f)?;
    let x = f.source();
    let fibers: Vec<Vec<usize>> = base.idempotents().iter().map(|&e| f.fiber(e)).collect();
    if let Some(&u) = fibers.iter().flatten().find(|&&u| !x.is_projection(u)) {
        return Err(Error::Invariant(format!("fiber element {u} is not a projection")));
    }
    let labels = fibers.iter().map(|fib| fib.iter().map(|u| u.to_string()).collect()).collect();
    let mut transitions = Vec::new();
    for &m in base.morphisms() {
        let into = &fibers[base.object_of(base.dom(m)).unwrap()];
        let t = fibers[base.object_of(m.e).unwrap()]
            .iter()
            .map(|&u| {
                let y = f.lift_unchecked(u, m.s)?;
                Ok(into.iter().position(|&v| v == x.dom(y)).expect("domain of a lift lies in the fiber"))
            })
            .collect::<Result<Vec<_>>>()?;
        transitions.push(t);
    }
    let presheaf = Presheaf::new(base.clone(), labels, transitions)?;
    let s = base.semigroup();
    for (i, &e) in base.idempotents().iter().enumerate() {
        for (k, &u) in fibers[i].iter().enumerate() {
            for &d in base.idempotents() {
                if !s.leq_idem(d, e) {
                    continue;
                }
                let ud = fibers[base.object_of(d).unwrap()][presheaf.act(k, LSMorphism { s: d, e })];
                if x.mul(u, ud) != ud {
                    return Err(Error::Invariant(format!("u·d = u(u·d) fails at u={u}, d={d}")));
                }
            }
        }
    }
    Ok(FiberPresheaf { presheaf, fibers })
}

#[derive(Debug, Clone)]
pub struct MIso {
    pub fiber: FiberPresheaf,
    pub lambda: LambdaObject,
    /// m: Λ(P_f) → X.
    pub map: StarMorphism,
}

/// m(r, u) = lift of r at u; a *-isomorphism over S whose mate inverts
/// α ↦ α(e, e).
pub fn m_iso(f: &StarMorphism, base: &Arc<InverseSemigroup>, opts: GammaOptions) -> Result<MIso> {
    let fp = fiber_presheaf(f, base)?;
    let lam = lambda(&fp.presheaf)?;
    let s = base.semigroup();
    let map = lam
        .pairs
        .iter()
        .map(|&(r, k)| f.lift_unchecked(fp.fibers[base.object_of(s.cod(r)).unwrap()][k], r))
        .collect::<Result<Vec<_>>>()?;
    let m = StarMorphism::new(lam.semigroup.clone(), f.source().clone(), map)?;
    if !m.is_bijective() || !m.is_star_hom() || m.then(f)?.map() != lam.structure.map() {
        return Err(Error::Invariant("m is not a bijective *-homomorphism over S".into()));
    }
    let u = unit(&fp.presheaf, opts)?;
    let gf = gamma(f, base, opts)?;
    let hat = u.map.then(&gamma_map(&m, &u.gamma, &gf)?);
    for (i, &e) in base.idempotents().iter().enumerate() {
        let rep = base.representable(e)?;
        for (k, &uu) in fp.fibers[i].iter().enumerate() {
            let alpha = &gf.sections[i][hat.components[i][k]];
            if alpha[rep.unit()] != uu {
                return Err(Error::Invariant(format!("m̂ does not invert evaluation at ({e},{e})")));
            }
        }
    }
    Ok(MIso { fiber: fp, lambda: lam, map: m })
}

/// The five conditions on Λ(P), computed independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropInvReport {
    pub commuting_projections: bool,
    pub inverse: bool,
    pub involutive: bool,
    pub subterminal: bool,
    pub injective: bool,
}

impl PropInvReport {
    pub fn agree(&self) -> bool {
        let v = [self.commuting_projections, self.inverse, self.involutive, self.subterminal, self.injective];
        v.iter().all(|&b| b == v[0])
    }
}

pub fn prop_inv_check(p: &Presheaf) -> Result<PropInvReport> {
    let lam = lambda(p)?;
    let r = classify(&lam.semigroup);
    let report = PropInvReport {
        commuting_projections: r.commuting_projections.holds,
        inverse: r.inverse.holds,
        involutive: r.involutive.holds,
        subterminal: p.is_subterminal(),
        injective: lam.structure.is_injective(),
    };
    if !report.agree() {
        return Err(Error::EquivalenceBroken(format!("{report:?}")));
    }
    Ok(report)
}

/// st*t = ts*s, cross-checked against st* being idempotent.
pub fn left_compatible(s: &StarSemigroup, a: usize, b: usize) -> Result<bool> {
    let by_def = s.mul3(a, s.star(b), b) == s.mul3(b, s.star(a), a);
    let by_idem = s.is_idempotent(s.mul(a, s.star(b)));
    if by_def != by_idem {
        return Err(Error::EquivalenceBroken(format!("left compatibility of {a},{b}")));
    }
    Ok(by_def)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymReport {
    pub e: usize,
    pub pairs_checked: usize,
    pub star_reversing: usize,
    /// Pairs where star reversal and left compatibility disagree.
    pub mismatches: Vec<(usize, usize)>,
    pub representable_inverse: bool,
    pub pairwise_compatible: bool,
    /// Pairs of projections whose commuting disagrees with compatibility.
    pub projection_mismatches: Vec<(usize, usize)>,
}

impl SymReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
            && self.projection_mismatches.is_empty()
            && self.representable_inverse == self.pairwise_compatible
    }
}

/// Star reversal in S(e) against left compatibility.
pub fn prop_sym_check(base: &Arc<InverseSemigroup>, e: usize) -> Result<SymReport> {
    let rep = base.representable(e)?;
    let s = base.semigroup();
    let t = &rep.semigroup;
    let mut mismatches = Vec::new();
    let mut star_reversing = 0;
    for u in t.elements() {
        let (p, q) = rep.pairs[u];
        for v in t.elements() {
            let (_, sv) = rep.pairs[v];
            let reverses = t.star(t.mul(u, v)) == t.mul(t.star(v), t.star(u));
            star_reversing += reverses as usize;
            if reverses != left_compatible(s, sv, s.mul(q, p))? {
                mismatches.push((u, v));
            }
        }
    }
    let ideal: Vec<usize> = s.elements().filter(|&a| s.mul(e, a) == a).collect();
    let mut pairwise_compatible = true;
    let mut projection_mismatches = Vec::new();
    for &a in &ideal {
        for &b in &ideal {
            let compatible = left_compatible(s, a, b)?;
            pairwise_compatible &= compatible;
            let pa = rep.index((s.dom(a), a)).unwrap();
            let pb = rep.index((s.dom(b), b)).unwrap();
            if (t.mul(pa, pb) == t.mul(pb, pa)) != compatible {
                projection_mismatches.push((a, b));
            }
        }
    }
    Ok(SymReport {
        e,
        pairs_checked: t.order() * t.order(),
        star_reversing,
        mismatches,
        representable_inverse: classify(t).inverse.holds,
        pairwise_compatible,
        projection_mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealReport {
    pub normal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<usize>>,
}

/// A set D of idempotents closed under conjugation and its ideal
/// T = {s : s*s ∈ D}.
pub fn ideal_correspondence(s: &StarSemigroup, d: &[usize]) -> Result<IdealReport> {
    if let Some(&bad) = d.iter().find(|&&x| !s.is_idempotent(x)) {
        return Err(Error::NotIdempotent(bad));
    }
    let in_d = |x: usize| d.contains(&x);
    let normal = s.elements().all(|a| d.iter().all(|&x| in_d(s.mul3(s.star(a), x, a))));
    if !normal {
        return Ok(IdealReport { normal, ideal: None });
    }
    let t: Vec<usize> = s.elements().filter(|&a| in_d(s.dom(a))).collect();
    let in_t = |x: usize| t.contains(&x);
    let two_sided = t.iter().all(|&a| s.elements().all(|b| in_t(s.mul(a, b)) && in_t(s.mul(b, a))));
    let starred = t.iter().all(|&a| in_t(s.star(a)));
    let mut back: Vec<usize> = t.iter().copied().filter(|&a| s.is_idempotent(a)).collect();
    back.sort_unstable();
    let mut dd = d.to_vec();
    dd.sort_unstable();
    dd.dedup();
    if !two_sided || !starred || back != dd {
        return Err(Error::Invariant("normal set of idempotents without matching ideal".into()));
    }
    Ok(IdealReport { normal, ideal: Some(t) })
}

/// The factorization identities of (rs, c(rs)) in S(rr*), for all r, s.
pub fn rsrs_check(base: &Arc<InverseSemigroup>) -> Result<bool> {
    let x = base.semigroup();
    for r in x.elements() {
        let rep = base.representable(x.cod(r))?;
        let t = &rep.semigroup;
        for s in x.elements() {
            let rs = x.mul(r, s);
            let a = rep.index((rs, x.cod(rs)));
            let b = rep.index((x.mul(x.star(r), rs), x.mul(rs, x.star(s))));
            let c = rep.index((r, x.cod(r)));
            let (Some(a), Some(b), Some(c)) = (a, b, c) else { return Ok(false) };
            if a != t.mul(c, b) || b != t.mul3(t.star(c), c, b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// S(e) inverse ⟺ ê subterminal ⟺ ψ_e injective.
pub fn representable_inverse_agreement(base: &Arc<InverseSemigroup>, e: usize) -> Result<[bool; 3]> {
    let rep = base.representable(e)?;
    let flags = [
        classify(&rep.semigroup).inverse.holds,
        crate::site::representable_presheaf(base, e)?.is_subterminal(),
        rep.psi.is_injective(),
    ];
    if flags.iter().any(|&b| b != flags[0]) {
        return Err(Error::EquivalenceBroken(format!("S({e}): {flags:?}")));
    }
    Ok(flags)
}
