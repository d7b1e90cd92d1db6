//! Involutive S-modules and S-algebras, the free module F(f) and its
//! idempotent quotient F̂(f).

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, StarMorphism, StarSemigroup};
use crate::site::InverseSemigroup;
use crate::ssets::{balanced_check, SSetStructure};
use crate::topos::{gamma, GammaOptions, GammaPresheaf};

pub const DEFAULT_CARRIER_CAP: usize = 1 << 16;
pub const DEFAULT_MULTISET_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Involution,
    StarMorphism,
    Unit,
    Equivariance,
    ActionAssociativity,
    ZeroSection,
    ZeroStar,
    ZeroEquivariance,
    AdditionFiber,
    AdditionCommutativity,
    AdditionAssociativity,
    ZeroLaw,
    Distributivity,
    StarAdditivity,
    Balanced1,
    Balanced2,
    LeftEquivariance,
    ZeroLeftEquivariance,
    LeftActionAssociativity,
    LeftDistributivity,
    ProductAssociativity,
    ProductStar,
    PartialIsometry,
    PsiHomomorphism,
    ZeroHomomorphism,
    ProductDistributivity,
    OtherDistributivity,
    MixedAssociativity,
    ActionStar,
    ZeroProduct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at {}", self.axiom, self.witness)
    }
}

/// Element-level operations of an involutive S-module ψ: 𝒜 → S.
pub trait InvolutiveModule {
    type Elem: Clone + Eq + Debug;

    fn base(&self) -> &StarSemigroup;
    fn psi(&self, a: &Self::Elem) -> usize;
    fn zero(&self, r: usize) -> Self::Elem;
    /// Fiberwise addition; FiberMismatch across fibers.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn star(&self, a: &Self::Elem) -> Self::Elem;
    fn act(&self, a: &Self::Elem, s: usize) -> Self::Elem;

    /// ra = (a*r*)*.
    fn left_act(&self, r: usize, a: &Self::Elem) -> Self::Elem {
        self.star(&self.act(&self.star(a), self.base().star(r)))
    }

    /// ab = aψ(b) + ψ(a)b, without checking that the module is balanced.
    fn product_unchecked(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let l = self.act(a, self.psi(b));
        let r = self.left_act(self.psi(a), b);
        self.add(&l, &r)
    }
}

pub trait InvolutiveAlgebra: InvolutiveModule {
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, ok: bool, axiom: Axiom, witness: impl FnOnce() -> String) {
        if !ok && !self.0.iter().any(|v| v.axiom == axiom) {
            self.0.push(Violation { axiom, witness: witness() });
        }
    }
}

/// The S-set and module axioms over the given elements, one violation per axiom.
pub fn module_violations<M: InvolutiveModule>(m: &M, elems: &[M::Elem]) -> Vec<Violation> {
    let s = m.base();
    let mut c = Collector(Vec::new());
    for a in elems {
        let pa = m.psi(a);
        c.check(m.star(&m.star(a)) == *a, Axiom::Involution, || format!("{a:?}"));
        c.check(m.psi(&m.star(a)) == s.star(pa), Axiom::StarMorphism, || format!("{a:?}"));
        c.check(m.act(a, s.dom(pa)) == *a, Axiom::Unit, || format!("{a:?}"));
        c.check(m.add(a, &m.zero(pa)).ok().as_ref() == Some(a), Axiom::ZeroLaw, || format!("{a:?}"));
        for t in s.elements() {
            let at = m.act(a, t);
            c.check(m.psi(&at) == s.mul(pa, t), Axiom::Equivariance, || format!("({a:?}, {t})"));
            for u in s.elements() {
                c.check(m.act(&at, u) == m.act(a, s.mul(t, u)), Axiom::ActionAssociativity, || {
                    format!("({a:?}, {t}, {u})")
                });
            }
        }
    }
    for r in s.elements() {
        let z = m.zero(r);
        c.check(m.psi(&z) == r, Axiom::ZeroSection, || format!("{r}"));
        c.check(m.zero(s.star(r)) == m.star(&z), Axiom::ZeroStar, || format!("{r}"));
        for t in s.elements() {
            c.check(m.zero(s.mul(r, t)) == m.act(&z, t), Axiom::ZeroEquivariance, || format!("({r}, {t})"));
        }
    }
    for a in elems {
        for b in elems {
            let sum = m.add(a, b);
            if m.psi(a) != m.psi(b) {
                c.check(matches!(sum, Err(Error::FiberMismatch(..))), Axiom::AdditionFiber, || {
                    format!("({a:?}, {b:?})")
                });
                continue;
            }
            let Ok(sum) = sum else {
                c.check(false, Axiom::AdditionFiber, || format!("({a:?}, {b:?})"));
                continue;
            };
            c.check(m.psi(&sum) == m.psi(a), Axiom::AdditionFiber, || format!("({a:?}, {b:?})"));
            c.check(m.add(b, a).ok() == Some(sum.clone()), Axiom::AdditionCommutativity, || {
                format!("({a:?}, {b:?})")
            });
            c.check(
                m.add(&m.star(a), &m.star(b)).ok() == Some(m.star(&sum)),
                Axiom::StarAdditivity,
                || format!("({a:?}, {b:?})"),
            );
            for t in s.elements() {
                let rhs = m.add(&m.act(a, t), &m.act(b, t)).ok();
                c.check(rhs == Some(m.act(&sum, t)), Axiom::Distributivity, || format!("({a:?}, {b:?}, {t})"));
            }
        }
    }
    c.0
}

/// Addition associativity over triples in one fiber; cubic, so kept apart.
pub fn addition_associativity<M: InvolutiveModule>(m: &M, elems: &[M::Elem]) -> Vec<Violation> {
    let mut c = Collector(Vec::new());
    for a in elems {
        for b in elems.iter().filter(|b| m.psi(b) == m.psi(a)) {
            for d in elems.iter().filter(|d| m.psi(d) == m.psi(a)) {
                let l = m.add(a, b).and_then(|ab| m.add(&ab, d)).ok();
                let r = m.add(b, d).and_then(|bd| m.add(a, &bd)).ok();
                c.check(l == r, Axiom::AdditionAssociativity, || format!("({a:?}, {b:?}, {d:?})"));
            }
        }
    }
    c.0
}

/// The balanced conditions and the bimodule laws.
pub fn bimodule_violations<M: InvolutiveModule>(m: &M, elems: &[M::Elem]) -> Vec<Violation> {
    let s = m.base();
    let mut c = Collector(Vec::new());
    for a in elems {
        let x = m.act(a, m.psi(&m.star(a)));
        c.check(m.star(&x) == x, Axiom::Balanced2, || format!("{a:?}"));
        for r in s.elements() {
            let ra = m.left_act(r, a);
            c.check(m.psi(&ra) == s.mul(r, m.psi(a)), Axiom::LeftEquivariance, || format!("({r}, {a:?})"));
            for t in s.elements() {
                c.check(m.act(&ra, t) == m.left_act(r, &m.act(a, t)), Axiom::Balanced1, || {
                    format!("({a:?}, {r}, {t})")
                });
                c.check(m.left_act(t, &ra) == m.left_act(s.mul(t, r), a), Axiom::LeftActionAssociativity, || {
                    format!("({t}, {r}, {a:?})")
                });
                c.check(
                    m.star(&m.act(a, t)) == m.left_act(s.star(t), &m.star(a)),
                    Axiom::ActionStar,
                    || format!("({a:?}, {t})"),
                );
            }
        }
        for b in elems.iter().filter(|b| m.psi(b) == m.psi(a)) {
            let sum = m.add(a, b).expect("same fiber");
            for r in s.elements() {
                let rhs = m.add(&m.left_act(r, a), &m.left_act(r, b)).ok();
                c.check(rhs == Some(m.left_act(r, &sum)), Axiom::LeftDistributivity, || {
                    format!("({r}, {a:?}, {b:?})")
                });
            }
        }
    }
    for r in s.elements() {
        for t in s.elements() {
            c.check(m.left_act(r, &m.zero(t)) == m.zero(s.mul(r, t)), Axiom::ZeroLeftEquivariance, || {
                format!("({r}, {t})")
            });
        }
    }
    c.0
}

/// The algebra axioms over the given elements.
pub fn algebra_violations<A: InvolutiveAlgebra>(m: &A, elems: &[A::Elem]) -> Vec<Violation> {
    let s = m.base();
    let mut c = Collector(Vec::new());
    for a in elems {
        let aa = m.star(a);
        c.check(m.mul(&m.mul(a, &aa), a) == *a, Axiom::PartialIsometry, || format!("{a:?}"));
        for r in s.elements() {
            c.check(m.mul(a, &m.zero(r)) == m.act(a, r), Axiom::ZeroProduct, || format!("({a:?}, {r})"));
        }
        for b in elems {
            let ab = m.mul(a, b);
            c.check(m.star(&ab) == m.mul(&m.star(b), &aa), Axiom::ProductStar, || format!("({a:?}, {b:?})"));
            c.check(m.psi(&ab) == s.mul(m.psi(a), m.psi(b)), Axiom::PsiHomomorphism, || {
                format!("({a:?}, {b:?})")
            });
            for r in s.elements() {
                c.check(m.act(&ab, r) == m.mul(a, &m.act(b, r)), Axiom::MixedAssociativity, || {
                    format!("({a:?}, {b:?}, {r})")
                });
                let lhs = m.mul(a, &m.star(&m.act(b, r)));
                let rhs = m.mul(&m.act(a, s.star(r)), &m.star(b));
                c.check(lhs == rhs, Axiom::MixedAssociativity, || format!("({a:?}, {b:?}, {r})*"));
            }
            for d in elems {
                c.check(m.mul(&ab, d) == m.mul(a, &m.mul(b, d)), Axiom::ProductAssociativity, || {
                    format!("({a:?}, {b:?}, {d:?})")
                });
                if m.psi(a) == m.psi(b) {
                    let sum = m.add(a, b).expect("same fiber");
                    let rhs = m.add(&m.mul(a, d), &m.mul(b, d)).ok();
                    c.check(rhs == Some(m.mul(&sum, d)), Axiom::ProductDistributivity, || {
                        format!("({a:?}, {b:?}, {d:?})")
                    });
                }
                if m.psi(b) == m.psi(d) {
                    let sum = m.add(b, d).expect("same fiber");
                    let rhs = m.add(&ab, &m.mul(a, d)).ok();
                    c.check(rhs == Some(m.mul(a, &sum)), Axiom::OtherDistributivity, || {
                        format!("({a:?}, {b:?}, {d:?})")
                    });
                }
            }
        }
    }
    for r in s.elements() {
        for t in s.elements() {
            c.check(m.mul(&m.zero(r), &m.zero(t)) == m.zero(s.mul(r, t)), Axiom::ZeroHomomorphism, || {
                format!("({r}, {t})")
            });
        }
    }
    c.0
}

fn require_clean(v: Vec<Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::ModuleAxioms(v.iter().map(|x| x.to_string()).collect()))
    }
}

/// Checks a + a = a on the given elements.
pub fn require_idempotent_addition<M: InvolutiveModule>(m: &M, elems: &[M::Elem]) -> Result<()> {
    for a in elems {
        if m.add(a, a)? != *a {
            return Err(Error::AdditionNotIdempotent(format!("{a:?}")));
        }
    }
    Ok(())
}

/// A module given by tables over a finite carrier.
#[derive(Debug, Clone)]
pub struct SModule {
    pub sset: SSetStructure,
    zero: Vec<usize>,
    /// n × n, None across fibers.
    addition: Vec<Option<usize>>,
    balanced: OnceLock<bool>,
}

impl SModule {
    /// Checks table shapes only; axioms are left to [`validate_module`].
    pub fn new(sset: SSetStructure, zero: Vec<usize>, addition: Vec<Option<usize>>) -> Result<Self> {
        let n = sset.len();
        if zero.len() != sset.base().order() || addition.len() != n * n {
            return Err(Error::Shape("module tables have inconsistent sizes".into()));
        }
        if zero.iter().chain(addition.iter().flatten()).any(|&x| x >= n) {
            return Err(Error::Shape("module table entry out of range".into()));
        }
        Ok(SModule { sset, zero, addition, balanced: OnceLock::new() })
    }

    pub fn len(&self) -> usize {
        self.sset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sset.is_empty()
    }

    pub fn elements(&self) -> Vec<usize> {
        self.sset.elements().collect()
    }

    pub fn zero_table(&self) -> &[usize] {
        &self.zero
    }

    pub fn addition_table(&self) -> &[Option<usize>] {
        &self.addition
    }

    pub fn is_balanced(&self) -> bool {
        *self.balanced.get_or_init(|| {
            self.sset.balanced_first_witness().is_none() && self.sset.balanced_second_witness().is_none()
        })
    }

    /// ab = aψ(b) + ψ(a)b.
    pub fn derived_product(&self, a: usize, b: usize) -> Result<usize> {
        if !self.is_balanced() {
            return Err(Error::NotBalanced(format!("product of {a} and {b}")));
        }
        self.product_unchecked(&a, &b)
    }

    /// Associativity, (ab)* = b*a* and a·0(r) = ar for the derived product,
    /// plus 0 being multiplicative.
    pub fn derived_product_violations(&self) -> Result<Vec<Violation>> {
        let n = self.len();
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(self.derived_product(a, b)?);
            }
        }
        let s = self.sset.base();
        let p = |a: usize, b: usize| table[a * n + b];
        let mut c = Collector(Vec::new());
        for a in 0..n {
            for r in s.elements() {
                c.check(p(a, self.zero[r]) == self.sset.act(a, r), Axiom::ZeroProduct, || format!("({a}, {r})"));
            }
            for b in 0..n {
                let ab = p(a, b);
                c.check(self.sset.star(ab) == p(self.sset.star(b), self.sset.star(a)), Axiom::ProductStar, || {
                    format!("({a}, {b})")
                });
                for d in 0..n {
                    c.check(p(ab, d) == p(a, p(b, d)), Axiom::ProductAssociativity, || format!("({a}, {b}, {d})"));
                }
            }
        }
        for r in s.elements() {
            for t in s.elements() {
                c.check(p(self.zero[r], self.zero[t]) == self.zero[s.mul(r, t)], Axiom::ZeroHomomorphism, || {
                    format!("({r}, {t})")
                });
            }
        }
        Ok(c.0)
    }
}

impl InvolutiveModule for SModule {
    type Elem = usize;

    fn base(&self) -> &StarSemigroup {
        self.sset.base()
    }

    fn psi(&self, a: &usize) -> usize {
        self.sset.apply(*a)
    }

    fn zero(&self, r: usize) -> usize {
        self.zero[r]
    }

    fn add(&self, a: &usize, b: &usize) -> Result<usize> {
        match self.addition[a * self.len() + b] {
            Some(c) => Ok(c),
            None if self.psi(a) != self.psi(b) => Err(Error::FiberMismatch(self.psi(a), self.psi(b))),
            None => Err(Error::Shape(format!("missing sum {a} + {b}"))),
        }
    }

    fn star(&self, a: &usize) -> usize {
        self.sset.star(*a)
    }

    fn act(&self, a: &usize, s: usize) -> usize {
        self.sset.act(*a, s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub balanced: bool,
    pub violations: Vec<Violation>,
}

impl ModuleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every module axiom, and the bimodule laws when the S-set is balanced.
pub fn validate_module(m: &SModule) -> ModuleReport {
    let elems = m.elements();
    let mut violations = module_violations(m, &elems);
    violations.extend(addition_associativity(m, &elems));
    let balanced = m.is_balanced();
    if balanced {
        violations.extend(bimodule_violations(m, &elems));
    }
    ModuleReport { balanced, violations }
}

/// A module with a product table.
#[derive(Debug, Clone)]
pub struct SAlgebra {
    pub module: SModule,
    mul: Vec<usize>,
}

impl SAlgebra {
    pub fn new(module: SModule, mul: Vec<usize>) -> Result<Self> {
        let n = module.len();
        if mul.len() != n * n || mul.iter().any(|&x| x >= n) {
            return Err(Error::Shape("product table malformed".into()));
        }
        Ok(SAlgebra { module, mul })
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    /// The multiplicative *-semigroup.
    pub fn semigroup(&self) -> Result<StarSemigroup> {
        StarSemigroup::from_flat(None, self.module.len(), self.mul.clone(), self.module.sset.star_table().to_vec())
    }
}

impl InvolutiveModule for SAlgebra {
    type Elem = usize;

    fn base(&self) -> &StarSemigroup {
        self.module.base()
    }

    fn psi(&self, a: &usize) -> usize {
        self.module.psi(a)
    }

    fn zero(&self, r: usize) -> usize {
        self.module.zero(r)
    }

    fn add(&self, a: &usize, b: &usize) -> Result<usize> {
        self.module.add(a, b)
    }

    fn star(&self, a: &usize) -> usize {
        self.module.star(a)
    }

    fn act(&self, a: &usize, s: usize) -> usize {
        self.module.act(a, s)
    }
}

impl InvolutiveAlgebra for SAlgebra {
    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.mul[a * self.module.len() + b]
    }
}

pub fn validate_algebra(a: &SAlgebra) -> ModuleReport {
    let mut report = validate_module(&a.module);
    report.violations.extend(algebra_violations(a, &a.module.elements()));
    report
}

/// A balanced module with idempotent addition, made into an algebra by the
/// derived product.
pub fn idem_to_algebra(m: &SModule) -> Result<SAlgebra> {
    let elems = m.elements();
    require_idempotent_addition(m, &elems)?;
    let b = balanced_check(&m.sset)?;
    if !b.balanced {
        return Err(Error::NotBalanced(format!("{:?} / {:?}", b.condition1, b.condition2)));
    }
    let report = validate_module(m);
    require_clean(report.violations)?;
    require_clean(m.derived_product_violations()?)?;
    let mut mul = Vec::with_capacity(elems.len() * elems.len());
    for &a in &elems {
        for &c in &elems {
            mul.push(m.derived_product(a, c)?);
        }
    }
    let alg = SAlgebra::new(m.clone(), mul)?;
    require_clean(algebra_violations(&alg, &elems))?;
    let s = m.base();
    for &a in &elems {
        let aa = alg.mul(&a, &m.star(&a));
        if aa != m.act(&a, s.star(m.psi(&a))) {
            return Err(Error::Invariant(format!("aa* != aψ(a*) at {a}")));
        }
    }
    Ok(alg)
}

fn require_etale_object(f: &StarMorphism) -> Result<()> {
    if let Some(w) = classify(f.target()).inverse.witness {
        return Err(Error::NotInverse(w));
    }
    if let Some(w) = classify(f.source()).left_involutive.witness {
        return Err(Error::NotLeftInvolutive(w));
    }
    if !f.is_star_hom() {
        return Err(Error::NotStarHom(f.flags().multiplicative.witness.clone().unwrap_or_default()));
    }
    let r = f.is_etale()?;
    if !r.etale {
        return Err(Error::NotEtale(r.witness.unwrap_or(0)));
    }
    Ok(())
}

/// An element of F(f): a finite multiset over f⁻¹(r), tagged with r.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FreeElem {
    pub r: usize,
    pub terms: Vec<usize>,
}

/// The free balanced module F(f), available element by element only.
#[derive(Debug, Clone)]
pub struct FreeModule {
    f: StarMorphism,
}

impl FreeModule {
    pub fn new(f: &StarMorphism) -> Result<Self> {
        require_etale_object(f)?;
        Ok(FreeModule { f: f.clone() })
    }

    pub fn map(&self) -> &StarMorphism {
        &self.f
    }

    pub fn singleton(&self, x: usize) -> FreeElem {
        FreeElem { r: self.f.apply(x), terms: vec![x] }
    }

    /// Zeros, singletons and `count` random multisets of size ≤ `cap`.
    pub fn sample(&self, seed: u64, count: usize, cap: usize) -> Vec<FreeElem> {
        let s = self.f.target();
        let mut out: Vec<FreeElem> = s.elements().map(|r| self.zero(r)).collect();
        out.extend(self.f.source().elements().map(|x| self.singleton(x)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fibers: Vec<Vec<usize>> = s.elements().map(|r| self.f.fiber(r)).collect();
        for _ in 0..count {
            let r = rng.gen_range(0..s.order());
            if fibers[r].is_empty() {
                continue;
            }
            let k = rng.gen_range(0..=cap);
            let mut terms: Vec<usize> = (0..k).map(|_| fibers[r][rng.gen_range(0..fibers[r].len())]).collect();
            terms.sort_unstable();
            out.push(FreeElem { r, terms });
        }
        out.sort();
        out.dedup();
        out
    }

    /// The quotient F(f) → F̂(f) taking a multiset to its support.
    pub fn support(&self, a: &FreeElem, fh: &FHatAlgebra) -> usize {
        let mut terms = a.terms.clone();
        terms.dedup();
        fh.index(a.r, &terms).expect("support lies in F̂")
    }
}

impl InvolutiveModule for FreeModule {
    type Elem = FreeElem;

    fn base(&self) -> &StarSemigroup {
        self.f.target()
    }

    fn psi(&self, a: &FreeElem) -> usize {
        a.r
    }

    fn zero(&self, r: usize) -> FreeElem {
        FreeElem { r, terms: Vec::new() }
    }

    fn add(&self, a: &FreeElem, b: &FreeElem) -> Result<FreeElem> {
        if a.r != b.r {
            return Err(Error::FiberMismatch(a.r, b.r));
        }
        let mut terms = [a.terms.as_slice(), b.terms.as_slice()].concat();
        terms.sort_unstable();
        Ok(FreeElem { r: a.r, terms })
    }

    fn star(&self, a: &FreeElem) -> FreeElem {
        let x = self.f.source();
        let mut terms: Vec<usize> = a.terms.iter().map(|&t| x.star(t)).collect();
        terms.sort_unstable();
        FreeElem { r: self.f.target().star(a.r), terms }
    }

    fn act(&self, a: &FreeElem, s: usize) -> FreeElem {
        let x = self.f.source();
        let rs = self.f.target().mul(a.r, s);
        let mut terms: Vec<usize> = a
            .terms
            .iter()
            .map(|&t| self.f.lift_unchecked(x.cod(t), rs).expect("étale"))
            .collect();
        terms.sort_unstable();
        FreeElem { r: rs, terms }
    }
}

/// Checks that the support map F(f) → F̂(f) preserves the module operations
/// on the sample and hits every element of F̂(f).
pub fn quotient_violations(fm: &FreeModule, fh: &FHatAlgebra, sample: &[FreeElem]) -> Vec<String> {
    let mut out = Vec::new();
    let q = |a: &FreeElem| fm.support(a, fh);
    let m = &fh.algebra;
    let s = fm.base();
    for a in sample {
        let qa = q(a);
        if m.psi(&qa) != a.r || q(&fm.star(a)) != m.star(&qa) {
            out.push(format!("star or ψ at {a:?}"));
        }
        for t in s.elements() {
            if q(&fm.act(a, t)) != m.act(&qa, t) {
                out.push(format!("action at ({a:?}, {t})"));
            }
        }
        for b in sample.iter().filter(|b| b.r == a.r) {
            if q(&fm.add(a, b).unwrap()) != m.add(&qa, &q(b)).unwrap() {
                out.push(format!("addition at ({a:?}, {b:?})"));
            }
        }
    }
    for (i, (r, set)) in fh.elements.iter().enumerate() {
        if q(&FreeElem { r: *r, terms: set.clone() }) != i {
            out.push(format!("element {i} not hit"));
        }
    }
    out
}

/// F̂(f): pairs (r, A) with A ⊆ f⁻¹(r), union as addition.
#[derive(Debug, Clone)]
pub struct FHatAlgebra {
    pub f: StarMorphism,
    /// (r, A) with A sorted, in sorted order.
    pub elements: Vec<(usize, Vec<usize>)>,
    index: HashMap<(usize, Vec<usize>), usize>,
    pub algebra: SAlgebra,
    pub semigroup: Arc<StarSemigroup>,
    /// f̂ as a map of *-semigroups.
    pub psi: StarMorphism,
}

impl FHatAlgebra {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index(&self, r: usize, set: &[usize]) -> Option<usize> {
        self.index.get(&(r, set.to_vec())).copied()
    }

    pub fn singleton(&self, x: usize) -> usize {
        self.index(self.f.apply(x), &[x]).expect("singleton")
    }

    pub fn zero(&self, r: usize) -> usize {
        self.index(r, &[]).expect("zero")
    }
}

pub fn carrier_size(f: &StarMorphism) -> u128 {
    f.target()
        .elements()
        .map(|r| 1u128.checked_shl(f.fiber(r).len() as u32).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b))
}

pub fn fhat(f: &StarMorphism, cap: usize) -> Result<FHatAlgebra> {
    require_etale_object(f)?;
    let size = carrier_size(f);
    if size > cap as u128 {
        return Err(Error::CarrierTooLarge { size, cap });
    }
    let x = f.source();
    let s = f.target();
    let mut elements = Vec::new();
    for r in s.elements() {
        let fib = f.fiber(r);
        for mask in 0u64..(1 << fib.len()) {
            let set: Vec<usize> = (0..fib.len()).filter(|i| mask >> i & 1 == 1).map(|i| fib[i]).collect();
            elements.push((r, set));
        }
    }
    elements.sort();
    let index: HashMap<(usize, Vec<usize>), usize> =
        elements.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let lookup = |r: usize, mut set: Vec<usize>| -> usize {
        set.sort_unstable();
        set.dedup();
        index[&(r, set)]
    };
    let n = elements.len();
    let star: Vec<usize> = elements
        .iter()
        .map(|(r, a)| lookup(s.star(*r), a.iter().map(|&t| x.star(t)).collect()))
        .collect();
    let map: Vec<usize> = elements.iter().map(|e| e.0).collect();
    let mut action = Vec::with_capacity(n * s.order());
    for (r, a) in &elements {
        for t in s.elements() {
            let rt = s.mul(*r, t);
            let lifted = a.iter().map(|&y| f.lift_unchecked(x.cod(y), rt)).collect::<Result<Vec<_>>>()?;
            action.push(lookup(rt, lifted));
        }
    }
    let zero: Vec<usize> = s.elements().map(|r| lookup(r, Vec::new())).collect();
    let mut addition = Vec::with_capacity(n * n);
    for (r, a) in &elements {
        for (q, b) in &elements {
            addition.push((r == q).then(|| lookup(*r, [a.as_slice(), b.as_slice()].concat())));
        }
    }
    let sset = SSetStructure::new(star, s.clone(), map.clone(), action)
        .map_err(|e| Error::Invariant(format!("F̂ is not an S-set: {e}")))?;
    let module = SModule::new(sset, zero, addition)?;
    let algebra = idem_to_algebra(&module)?;
    let semigroup = Arc::new(algebra.semigroup()?);
    let psi = StarMorphism::new(semigroup.clone(), s.clone(), map)?;
    if !psi.is_star_hom() {
        return Err(Error::Invariant("f̂ is not a *-homomorphism".into()));
    }
    let fh = FHatAlgebra { f: f.clone(), elements, index, algebra, semigroup, psi };
    fhat_identities(&fh)?;
    Ok(fh)
}

/// The identities of F̂ relating the element sets to the base: Ar*r = A =
/// rr*A, Ar* = {aa*}, r*A = {a*a}, As = A·0(s), A*A = A*r = r*A, AA*A = A,
/// and the nonempty projections are exactly the subsets of projections.
fn fhat_identities(fh: &FHatAlgebra) -> Result<()> {
    let x = fh.f.source();
    let s = fh.f.target();
    let m = &fh.algebra;
    let fail = |what: &str, i: usize| Err(Error::Invariant(format!("{what} fails at {:?}", fh.elements[i])));
    for (i, (r, a)) in fh.elements.iter().enumerate() {
        let (r, rs) = (*r, s.star(*r));
        if m.act(&m.act(&i, rs), r) != i || m.left_act(r, &m.left_act(rs, &i)) != i {
            return fail("Ar*r = A = rr*A", i);
        }
        let codomains: Vec<usize> = a.iter().map(|&y| x.cod(y)).collect();
        if m.act(&i, rs) != fh.index(s.cod(r), &sorted(codomains)).unwrap() {
            return fail("Ar* = {aa*}", i);
        }
        let domains: Vec<usize> = a.iter().map(|&y| x.dom(y)).collect();
        let dom_set = fh.index(s.dom(r), &sorted(domains)).unwrap();
        if m.left_act(rs, &i) != dom_set {
            return fail("r*A = {a*a}", i);
        }
        let astar = m.star(&i);
        if m.mul(&astar, &i) != m.act(&astar, r) || m.mul(&astar, &i) != dom_set {
            return fail("A*A = A*r = r*A", i);
        }
        if m.mul(&m.mul(&i, &astar), &i) != i {
            return fail("AA*A = A", i);
        }
        for t in s.elements() {
            if m.act(&i, t) != m.mul(&i, &fh.zero(t)) {
                return fail("As = A0(s)", i);
            }
        }
        // 0(r) is a projection exactly when r is
        let expected = if a.is_empty() { s.is_projection(r) } else { a.iter().all(|&y| x.is_projection(y)) };
        if fh.semigroup.is_projection(i) != expected {
            return fail("projections are subsets of projections", i);
        }
    }
    Ok(())
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone)]
pub struct RhoReport {
    pub map: StarMorphism,
    pub left_star_hom: bool,
    pub star_hom: bool,
    pub source_involutive: bool,
}

/// ρ: X → F̂(f), x ↦ {x}.
pub fn rho(fh: &FHatAlgebra) -> Result<RhoReport> {
    let x = fh.f.source();
    let f = &fh.f;
    let map = StarMorphism::new(x.clone(), fh.semigroup.clone(), x.elements().map(|a| fh.singleton(a)).collect())?;
    if !map.is_injective() || map.then(&fh.psi)?.map() != f.map() {
        return Err(Error::Invariant("ρ is not an injective map over S".into()));
    }
    let s = f.target();
    for a in x.elements() {
        for t in s.elements() {
            let at = f.lift_unchecked(x.cod(a), s.mul(f.apply(a), t))?;
            if map.apply(at) != fh.algebra.act(&map.apply(a), t) {
                return Err(Error::Invariant(format!("ρ not equivariant at ({a},{t})")));
            }
        }
        for b in x.elements() {
            // xy = x f(x*xy) + f(x) x*xy
            let xy = x.mul(a, b);
            let y = x.mul3(x.star(a), a, b);
            let left = f.lift_unchecked(x.cod(a), s.mul(f.apply(a), f.apply(y)))?;
            let ystar = x.star(y);
            let right = x.star(f.lift_unchecked(x.cod(ystar), s.mul(f.apply(ystar), s.star(f.apply(a))))?);
            if left != xy || right != xy {
                return Err(Error::Invariant(format!("xy = xf(x*xy) + f(x)x*xy fails at ({a},{b})")));
            }
        }
    }
    let left_star_hom = map.is_left_star_hom();
    if !left_star_hom {
        return Err(Error::NotLeftStarHom(map.flags().left_star_hom.witness.clone().unwrap_or_default()));
    }
    let star_hom = map.is_star_hom();
    let source_involutive = classify(x).involutive.holds;
    if star_hom != source_involutive {
        return Err(Error::EquivalenceBroken(format!(
            "ρ multiplicative {star_hom}, X involutive {source_involutive}"
        )));
    }
    Ok(RhoReport { map, left_star_hom, star_hom, source_involutive })
}

/// φ̂: F̂(f) → F̂(g), A ↦ φ(A), for φ: X → Y over S.
pub fn lift_morphism(phi: &StarMorphism, from: &FHatAlgebra, to: &FHatAlgebra) -> Result<StarMorphism> {
    if **phi.source() != **from.f.source() || **phi.target() != **to.f.source() {
        return Err(Error::CarrierMismatch("φ does not connect the two bases".into()));
    }
    if phi.then(&to.f)?.map() != from.f.map() {
        return Err(Error::CarrierMismatch("φ is not over S".into()));
    }
    if !phi.is_left_star_hom() {
        return Err(Error::NotLeftStarHom(phi.flags().left_star_hom.witness.clone().unwrap_or_default()));
    }
    let map: Vec<usize> = from
        .elements
        .iter()
        .map(|(r, a)| to.index(*r, &sorted(a.iter().map(|&y| phi.apply(y)).collect())).unwrap())
        .collect();
    let hat = StarMorphism::new(from.semigroup.clone(), to.semigroup.clone(), map)?;
    let (ma, mb) = (&from.algebra, &to.algebra);
    let s = from.f.target();
    let h = |i: usize| hat.apply(i);
    for i in 0..from.len() {
        for t in s.elements() {
            if h(ma.act(&i, t)) != mb.act(&h(i), t) {
                return Err(Error::Invariant(format!("φ̂ not equivariant at ({i},{t})")));
            }
        }
        for j in 0..from.len() {
            if h(ma.mul(&i, &j)) != mb.mul(&h(i), &h(j)) {
                return Err(Error::Invariant(format!("φ̂ not multiplicative at ({i},{j})")));
            }
            if let Ok(sum) = ma.add(&i, &j) {
                if h(sum) != mb.add(&h(i), &h(j))? {
                    return Err(Error::Invariant(format!("φ̂ not additive at ({i},{j})")));
                }
            }
        }
    }
    if hat.then(&to.psi)?.map() != from.psi.map() {
        return Err(Error::Invariant("φ̂ is not over S".into()));
    }
    for y in phi.source().elements() {
        if h(from.singleton(y)) != to.singleton(phi.apply(y)) {
            return Err(Error::Invariant(format!("φ̂ρ != ρφ at {y}")));
        }
    }
    Ok(hat)
}

/// Γ of an algebra: left *-homomorphisms S(e) → 𝒜 over S.
pub fn gamma_algebra(alg: &SAlgebra, base: &Arc<InverseSemigroup>, opts: GammaOptions) -> Result<GammaPresheaf> {
    let sg = Arc::new(alg.semigroup()?);
    let psi = StarMorphism::new(sg, base.semigroup().clone(), alg.module.sset.map_table().to_vec())?;
    gamma(&psi, base, opts)
}

/// The module with every fiber {0(r)}: carrier S, action and star of S.
pub fn trivial_module(s: &Arc<StarSemigroup>) -> Result<SModule> {
    let n = s.order();
    let action = s.mul_table().to_vec();
    let sset = SSetStructure::new(s.star_table().to_vec(), s.clone(), s.elements().collect(), action)?;
    let addition = (0..n).flat_map(|a| (0..n).map(move |b| (a == b).then_some(a))).collect();
    SModule::new(sset, s.elements().collect(), addition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;

    fn id(name: &str, n: usize) -> StarMorphism {
        StarMorphism::identity(&Arc::new(standard_family(name, n).unwrap()))
    }

    #[test]
    fn fhat_of_sl2() {
        let fh = fhat(&id("semilattice_chain", 2), DEFAULT_CARRIER_CAP).unwrap();
        assert_eq!(fh.elements, vec![(0, vec![]), (0, vec![0]), (1, vec![]), (1, vec![1])]);
        let one = fh.index(1, &[1]).unwrap();
        assert_eq!(fh.algebra.mul(&one, &one), one);
        assert!(validate_algebra(&fh.algebra).passed());
        let r = rho(&fh).unwrap();
        assert!(r.star_hom && r.source_involutive);
    }

    #[test]
    fn corrupted_zero_breaks_zero_law() {
        let fh = fhat(&id("semilattice_chain", 2), DEFAULT_CARRIER_CAP).unwrap();
        let m = &fh.algebra.module;
        let mut zero = m.zero_table().to_vec();
        zero[1] = fh.index(1, &[1]).unwrap();
        let bad = SModule::new(m.sset.clone(), zero, m.addition_table().to_vec()).unwrap();
        let report = validate_module(&bad);
        assert!(report.violations.iter().any(|v| v.axiom == Axiom::ZeroLaw));
    }

    #[test]
    fn fibers_are_commutative_monoids() {
        let fh = fhat(&id("symmetric_inverse", 2), DEFAULT_CARRIER_CAP).unwrap();
        let m = &fh.algebra;
        for r in 0..7 {
            let z = m.zero(r);
            assert_eq!(m.add(&z, &z).unwrap(), z);
        }
        assert!(matches!(m.add(&m.zero(0), &m.zero(1)), Err(Error::FiberMismatch(0, 1))));
    }

    #[test]
    fn trivial_module_is_s() {
        let s = Arc::new(standard_family("symmetric_inverse", 2).unwrap());
        let alg = idem_to_algebra(&trivial_module(&s).unwrap()).unwrap();
        assert_eq!(alg.semigroup().unwrap(), *s);
    }

    #[test]
    fn free_module_is_not_idempotent() {
        let fm = FreeModule::new(&id("semilattice_chain", 2)).unwrap();
        let sample = fm.sample(7, 40, DEFAULT_MULTISET_CAP);
        assert!(module_violations(&fm, &sample).is_empty());
        assert!(bimodule_violations(&fm, &sample).is_empty());
        assert!(matches!(require_idempotent_addition(&fm, &sample), Err(Error::AdditionNotIdempotent(_))));
        let x = fm.singleton(1);
        assert_eq!(fm.add(&x, &fm.zero(1)).unwrap(), x);
    }

    #[test]
    fn carrier_cap() {
        let f = id("symmetric_inverse", 2);
        assert_eq!(carrier_size(&f), 14);
        assert!(matches!(fhat(&f, 10), Err(Error::CarrierTooLarge { size: 14, cap: 10 })));
    }
}
