//! Populations of small instances for the sweeps: presheaves on L(S),
//! involutive S-sets, maps between semigroups, and two exploratory searches.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, StarMorphism, StarSemigroup};
use crate::modalg::{validate_module, SModule, Violation};
use crate::oracle::all_star_semigroups;
use crate::site::{InverseSemigroup, LSMorphism, Presheaf};
use crate::ssets::SSetStructure;

/// Functoriality constraints of a presheaf, bucketed by the last
/// non-identity morphism they mention.
struct PresheafShape {
    morphisms: Vec<LSMorphism>,
    identity: Vec<bool>,
    /// (s, t, st) as morphism indices.
    buckets: Vec<Vec<(usize, usize, usize)>>,
}

fn shape(base: &InverseSemigroup) -> PresheafShape {
    let morphisms = base.morphisms().to_vec();
    let identity: Vec<bool> = morphisms.iter().map(|m| m.s == m.e).collect();
    let idx = |m: LSMorphism| base.morphism_index(m).expect("morphism of L(S)");
    let mut buckets = vec![Vec::new(); morphisms.len()];
    for (i, &s) in morphisms.iter().enumerate() {
        for (j, &t) in morphisms.iter().enumerate() {
            if t.e != base.dom(s) {
                continue;
            }
            let k = idx(base.compose(s, t));
            let last = [i, j, k].into_iter().filter(|&u| !identity[u]).max();
            if let Some(last) = last {
                buckets[last].push((i, j, k));
            }
        }
    }
    PresheafShape { morphisms, identity, buckets }
}

/// All functions [0, src) → [0, tgt) as tables.
fn functions(src: usize, tgt: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..src {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..tgt).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

fn labels(sizes: &[usize]) -> Vec<Vec<String>> {
    sizes.iter().map(|&k| (0..k).map(|i| format!("x{i}")).collect()).collect()
}

/// Backtracking over transition tables for fixed fiber sizes. `pick`
/// reorders candidates; `limit` stops after that many solutions.
fn presheaves_with_sizes(
    base: &Arc<InverseSemigroup>,
    sh: &PresheafShape,
    sizes: &[usize],
    mut pick: impl FnMut(&mut Vec<Vec<usize>>),
    limit: usize,
) -> Result<Vec<Presheaf>> {
    let size_of = |e: usize| sizes[base.object_of(e).expect("idempotent")];
    let m = sh.morphisms.len();
    let mut candidates = Vec::with_capacity(m);
    for (j, mor) in sh.morphisms.iter().enumerate() {
        let src = size_of(mor.e);
        let mut c = if sh.identity[j] {
            vec![(0..src).collect()]
        } else {
            functions(src, size_of(base.dom(*mor)))
        };
        pick(&mut c);
        candidates.push(c);
    }
    let mut trans: Vec<Vec<usize>> = vec![Vec::new(); m];
    for j in 0..m {
        if sh.identity[j] {
            trans[j] = candidates[j][0].clone();
        }
    }
    let order: Vec<usize> = (0..m).filter(|&j| !sh.identity[j]).collect();
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        order: &[usize],
        candidates: &[Vec<Vec<usize>>],
        sh: &PresheafShape,
        trans: &mut Vec<Vec<usize>>,
        base: &Arc<InverseSemigroup>,
        labels: &[Vec<String>],
        out: &mut Vec<Presheaf>,
        limit: usize,
    ) -> Result<()> {
        if out.len() >= limit {
            return Ok(());
        }
        if i == order.len() {
            out.push(Presheaf::new(base.clone(), labels.to_vec(), trans.clone())?);
            return Ok(());
        }
        let j = order[i];
        for c in &candidates[j] {
            trans[j] = c.clone();
            let ok = sh.buckets[j].iter().all(|&(s, t, st)| {
                (0..trans[st].len()).all(|x| trans[st][x] == trans[t][trans[s][x]])
            });
            if ok {
                go(i + 1, order, candidates, sh, trans, base, labels, out, limit)?;
            }
        }
        Ok(())
    }
    go(0, &order, &candidates, sh, &mut trans, base, &labels(sizes), &mut out, limit)?;
    Ok(out)
}

/// Every presheaf on L(S) with fibers of size at most `max_fiber`,
/// fiber sizes in lexicographic order.
pub fn enumerate_presheaves(base: &Arc<InverseSemigroup>, max_fiber: usize) -> Result<Vec<Presheaf>> {
    let sh = shape(base);
    let k = base.idempotents().len();
    let mut out = Vec::new();
    let mut sizes = vec![0; k];
    loop {
        out.extend(presheaves_with_sizes(base, &sh, &sizes, |_| {}, usize::MAX)?);
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if sizes[i] < max_fiber {
                sizes[i] += 1;
                break;
            }
            sizes[i] = 0;
        }
    }
}

/// `count` presheaves with random nonempty fibers of size at most
/// `max_fiber` and randomly chosen transitions. Deterministic in `seed`.
pub fn random_presheaves(
    base: &Arc<InverseSemigroup>,
    count: usize,
    max_fiber: usize,
    seed: u64,
) -> Result<Vec<Presheaf>> {
    let sh = shape(base);
    let k = base.idempotents().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_fiber)).collect();
        let mut found = presheaves_with_sizes(base, &sh, &sizes, |c| c.shuffle(&mut rng), 1)?;
        out.append(&mut found);
    }
    Ok(out)
}

/// Every involutive S-set with carrier size in 1..=max_carrier.
pub fn enumerate_ssets(base: &Arc<StarSemigroup>, max_carrier: usize) -> Result<Vec<SSetStructure>> {
    let mut out = Vec::new();
    for n in 1..=max_carrier {
        for star in involutions(n) {
            for map in functions(n, base.order()) {
                if (0..n).any(|x| map[star[x]] != base.star(map[x])) {
                    continue;
                }
                ssets_with(base, &star, &map, &mut out)?;
            }
        }
    }
    Ok(out)
}

fn involutions(n: usize) -> Vec<Vec<usize>> {
    functions(n, n)
        .into_iter()
        .filter(|s| (0..n).all(|x| s[s[x]] == x))
        .collect()
}

fn ssets_with(base: &Arc<StarSemigroup>, star: &[usize], map: &[usize], out: &mut Vec<SSetStructure>) -> Result<()> {
    let n = star.len();
    let m = base.order();
    // candidates for x·t: the fiber over f(x)t, pinned by the unit law
    let candidates: Vec<Vec<usize>> = (0..n * m)
        .map(|i| {
            let (x, t) = (i / m, i % m);
            if t == base.dom(map[x]) {
                return if base.mul(map[x], t) == map[x] { vec![x] } else { vec![] };
            }
            (0..n).filter(|&y| map[y] == base.mul(map[x], t)).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(());
    }
    let mut act = vec![usize::MAX; n * m];
    fn go(
        i: usize,
        n: usize,
        m: usize,
        base: &StarSemigroup,
        candidates: &[Vec<usize>],
        act: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        if i == n * m {
            found.push(act.clone());
            return;
        }
        for &y in &candidates[i] {
            act[i] = y;
            let consistent = (0..=i).all(|j| {
                let (x, t) = (j / m, j % m);
                let xt = act[j];
                base.elements().all(|u| {
                    let lhs = act[xt * m + u];
                    let rhs = act[x * m + base.mul(t, u)];
                    lhs == usize::MAX || rhs == usize::MAX || lhs == rhs
                })
            });
            if consistent {
                go(i + 1, n, m, base, candidates, act, found);
            }
        }
        act[i] = usize::MAX;
    }
    let mut found = Vec::new();
    go(0, n, m, base, &candidates, &mut act, &mut found);
    for action in found {
        out.push(SSetStructure::new(star.to_vec(), base.clone(), map.to_vec(), action)?);
    }
    Ok(())
}

/// Every map X → S passing `keep`.
pub fn maps_where(
    x: &Arc<StarSemigroup>,
    s: &Arc<StarSemigroup>,
    mut keep: impl FnMut(&StarMorphism) -> bool,
) -> Vec<StarMorphism> {
    functions(x.order(), s.order())
        .into_iter()
        .map(|map| StarMorphism::new(x.clone(), s.clone(), map).expect("in range"))
        .filter(|f| keep(f))
        .collect()
}

/// Every *-homomorphism X → S.
pub fn star_homs(x: &Arc<StarSemigroup>, s: &Arc<StarSemigroup>) -> Vec<StarMorphism> {
    maps_where(x, s, |f| f.is_star_hom())
}

/// Left *-homomorphisms φ: X → Y with g∘φ = f.
pub fn left_homs_between(f: &StarMorphism, g: &StarMorphism) -> Result<Vec<StarMorphism>> {
    if **f.target() != **g.target() {
        return Err(Error::CarrierMismatch("different bases".into()));
    }
    let x = f.source();
    let fibers: Vec<Vec<usize>> = x.elements().map(|a| g.fiber(f.apply(a))).collect();
    let mut tables = vec![Vec::new()];
    for fib in &fibers {
        tables = tables
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                fib.iter().map(move |&b| {
                    let mut w = v.clone();
                    w.push(b);
                    w
                })
            })
            .collect();
    }
    Ok(tables
        .into_iter()
        .map(|t| StarMorphism::new(x.clone(), g.source().clone(), t).expect("in range"))
        .filter(|phi| phi.is_left_star_hom())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BijectionFinding {
    pub order: usize,
    pub source_mul: Vec<usize>,
    pub source_star: Vec<usize>,
    pub target_mul: Vec<usize>,
    pub target_star: Vec<usize>,
    pub map: Vec<usize>,
    /// Both source and target are left involutive.
    pub left_involutive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BijectionSearch {
    pub max_order: usize,
    pub pairs_examined: u64,
    pub bijections: u64,
    /// Bijective left *-homomorphisms whose inverse is not one.
    pub counterexamples: Vec<BijectionFinding>,
    /// Left *-isomorphisms (inverse also a left *-homomorphism) that are
    /// not multiplicative.
    pub non_multiplicative_isos: Vec<BijectionFinding>,
}

/// Bijective left *-homomorphisms between *-semigroups of equal order up to
/// `max_order`, testing whether the inverse is again a left *-homomorphism.
pub fn bijective_left_hom_search(max_order: usize) -> Result<BijectionSearch> {
    let mut report = BijectionSearch {
        max_order,
        pairs_examined: 0,
        bijections: 0,
        counterexamples: Vec::new(),
        non_multiplicative_isos: Vec::new(),
    };
    for n in 1..=max_order {
        let all: Vec<Arc<StarSemigroup>> = all_star_semigroups(n)?.into_iter().map(Arc::new).collect();
        let left: Vec<bool> = all.iter().map(|x| classify(x).left_involutive.holds).collect();
        let perms = crate::oracle::enumerate::permutations(n);
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                report.pairs_examined += 1;
                for p in &perms {
                    let f = StarMorphism::new(x.clone(), y.clone(), p.clone())?;
                    if !f.is_left_star_hom() {
                        continue;
                    }
                    report.bijections += 1;
                    let inv = f.inverse().expect("bijective");
                    let finding = || BijectionFinding {
                        order: n,
                        source_mul: x.mul_table().to_vec(),
                        source_star: x.star_table().to_vec(),
                        target_mul: y.mul_table().to_vec(),
                        target_star: y.star_table().to_vec(),
                        map: p.clone(),
                        left_involutive: left[i] && left[j],
                    };
                    if !inv.is_left_star_hom() {
                        report.counterexamples.push(finding());
                    } else if !f.is_star_hom() {
                        report.non_multiplicative_isos.push(finding());
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleFinding {
    pub carrier: usize,
    pub star: Vec<usize>,
    pub map: Vec<usize>,
    pub action: Vec<usize>,
    pub zero: Vec<usize>,
    pub addition: Vec<Option<usize>>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleHunt {
    pub ssets: usize,
    pub balanced_ssets: usize,
    pub modules: usize,
    pub idempotent_modules: usize,
    /// Balanced modules whose derived product fails an algebra law.
    pub failing: Vec<ModuleFinding>,
}

/// Searches valid balanced modules over small S-sets for one whose derived
/// product is not an algebra.
pub fn module_hunt(base: &Arc<StarSemigroup>, max_carrier: usize) -> Result<ModuleHunt> {
    let ssets = enumerate_ssets(base, max_carrier)?;
    let mut hunt = ModuleHunt { ssets: ssets.len(), balanced_ssets: 0, modules: 0, idempotent_modules: 0, failing: Vec::new() };
    for a in ssets {
        let n = a.len();
        let fibers: Vec<Vec<usize>> = base.elements().map(|r| a.elements().filter(|&x| a.apply(x) == r).collect()).collect();
        if fibers.iter().any(|f| f.is_empty()) {
            continue;
        }
        let probe = SModule::new(a.clone(), fibers.iter().map(|f| f[0]).collect(), vec![None; n * n])?;
        if !probe.is_balanced() {
            continue;
        }
        hunt.balanced_ssets += 1;
        for zero in zero_sections(&a, &fibers) {
            for addition in additions(n, &fibers, &zero) {
                let m = SModule::new(a.clone(), zero.clone(), addition.clone())?;
                if !validate_module(&m).passed() {
                    continue;
                }
                hunt.modules += 1;
                if (0..n).all(|x| addition[x * n + x] == Some(x)) {
                    hunt.idempotent_modules += 1;
                }
                let violations = m.derived_product_violations()?;
                if !violations.is_empty() {
                    hunt.failing.push(ModuleFinding {
                        carrier: n,
                        star: a.star_table().to_vec(),
                        map: a.map_table().to_vec(),
                        action: a.action_table().to_vec(),
                        zero: zero.clone(),
                        addition,
                        violations,
                    });
                }
            }
        }
    }
    Ok(hunt)
}

/// Equivariant *-sections of f.
fn zero_sections(a: &SSetStructure, fibers: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let s = a.base();
    let mut out = vec![Vec::new()];
    for fib in fibers {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                fib.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|z| {
        s.elements().all(|r| {
            a.star(z[r]) == z[s.star(r)] && s.elements().all(|t| a.act(z[r], t) == z[s.mul(r, t)])
        })
    });
    out
}

/// Commutative fiberwise additions with the zero as neutral element.
fn additions(n: usize, fibers: &[Vec<usize>], zero: &[usize]) -> Vec<Vec<Option<usize>>> {
    let mut free: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut base_table = vec![None; n * n];
    for (r, fib) in fibers.iter().enumerate() {
        let z = zero[r];
        for &x in fib {
            base_table[x * n + z] = Some(x);
            base_table[z * n + x] = Some(x);
        }
        for (i, &x) in fib.iter().enumerate() {
            for &y in &fib[i..] {
                if x != z && y != z {
                    free.push((x, y, fib.clone()));
                }
            }
        }
    }
    let mut out = vec![base_table];
    for (x, y, fib) in free {
        out = out
            .into_iter()
            .flat_map(|t| {
                fib.iter()
                    .map(|&v| {
                        let mut w = t.clone();
                        w[x * n + y] = Some(v);
                        w[y * n + x] = Some(v);
                        w
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;
    use crate::site::as_inverse;

    fn base(name: &str, n: usize) -> Arc<InverseSemigroup> {
        as_inverse(&standard_family(name, n).unwrap()).unwrap()
    }

    #[test]
    fn presheaves_on_a_point() {
        // L(T1) is one object with only its identity: a presheaf is a set
        let ps = enumerate_presheaves(&base("semilattice_chain", 1), 2).unwrap();
        assert_eq!(ps.len(), 3);
    }

    #[test]
    fn presheaves_on_c2_are_involutions() {
        // fiber sizes 0, 1, 2 carry 1, 1, 2 involutions
        let ps = enumerate_presheaves(&base("cyclic_group", 2), 2).unwrap();
        assert_eq!(ps.len(), 4);
    }

    #[test]
    fn random_presheaves_are_reproducible() {
        let b = base("symmetric_inverse", 2);
        let a = random_presheaves(&b, 5, 3, 7).unwrap();
        let c = random_presheaves(&b, 5, 3, 7).unwrap();
        assert_eq!(a, c);
        assert!(a.iter().all(|p| b.idempotents().iter().all(|&e| (1..=3).contains(&p.fiber_size(e)))));
    }

    #[test]
    fn ssets_over_trivial_group() {
        // over T1: an involution on the carrier, the action is forced
        let t1 = Arc::new(standard_family("cyclic_group", 1).unwrap());
        let s = enumerate_ssets(&t1, 3).unwrap();
        assert_eq!(s.len(), 1 + 2 + 4);
    }

    #[test]
    fn identity_is_among_star_homs() {
        let sl2 = Arc::new(standard_family("semilattice_chain", 2).unwrap());
        let homs = star_homs(&sl2, &sl2);
        // maps preserving min on {0, 1}: constants and the identity
        assert_eq!(homs.len(), 3);
    }

    #[test]
    fn between_identity_and_itself() {
        let i2 = Arc::new(standard_family("symmetric_inverse", 2).unwrap());
        let id = StarMorphism::identity(&i2);
        let homs = left_homs_between(&id, &id).unwrap();
        assert_eq!(homs.len(), 1);
    }
}
