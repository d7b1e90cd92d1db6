//! Registry of checkable statements about finite *-semigroups.
//!
//! Each statement has a verdict computed through the library
//! ([`main_verdict`]) and an independent one over raw tables
//! ([`crate::oracle::naive::naive_check`]). Statements about maps quantify
//! over all self-maps X → X; statements about S(e) are vacuous unless X is
//! inverse.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{classify, leq_left, leq_right, StarMorphism, StarSemigroup};
use crate::site::as_inverse;
use crate::ssets::canonical_action;
use crate::topos::{left_homs_over, prop_sym_check, rsrs_check};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Statement {
    pub id: &'static str,
    pub summary: &'static str,
}

pub const STATEMENTS: &[Statement] = &[
    Statement { id: "class-reduct", summary: "involutive ⟹ left and right involutive; left or right ⟹ locally involutive" },
    Statement { id: "class-birestrictive", summary: "left ⟹ corestrictive, right ⟹ restrictive, involutive ⟹ quasi-involutive; projection products" },
    Statement { id: "projection-bounds", summary: "c(y) ≤ p ⟺ py = y ∧ y*p = y* and its variants" },
    Statement { id: "left-three-conditions", summary: "left involutive: c(y) ≤ d(x) ⟺ d(x)y = y; d(x) ≤ c(y) ⟺ c(y)x* = x*" },
    Statement { id: "order-left-identities", summary: "x ≤_l y ⟺ x d(y) = x, y*x = d(x), yx* = c(x)" },
    Statement { id: "order-right-identities", summary: "x ≤_r y ⟺ c(y)x = x, x*y = d(x), xy* = c(x)" },
    Statement { id: "order-left-involutive-form", summary: "left involutive: x ≤_l y ⟺ y*x = d(x) ∧ yx* = c(x)" },
    Statement { id: "order-right-involutive-form", summary: "right involutive: x ≤_r y ⟺ x*y = d(x) ∧ xy* = c(x)" },
    Statement { id: "order-left-to-right", summary: "x ≤_l y ∧ xy* = c(x) ⟹ x ≤_r y" },
    Statement { id: "order-right-to-left", summary: "x ≤_r y ∧ y*x = d(x) ⟹ x ≤_l y" },
    Statement { id: "order-coincide", summary: "locally involutive: ≤_l = ≤_r" },
    Statement { id: "order-star-duality", summary: "locally involutive: x ≤_l y ⟺ x* ≤_r y*" },
    Statement { id: "hom-projection-multiplicative", summary: "left *-hom of left involutive semigroups is multiplicative iff f(px) = f(p)f(x)" },
    Statement { id: "etale-reflects-projections", summary: "étale left *-hom: f(x) = c(f(x)) ⟹ x = c(x)" },
    Statement { id: "etale-cancellation", summary: "h and h∘ψ étale ⟹ ψ étale" },
    Statement { id: "etale-forces-multiplicative", summary: "h étale *-hom, h∘ψ a *-hom ⟹ ψ a *-hom, étale when h∘ψ is" },
    Statement { id: "action-absorbs-domain", summary: "canonical action: x·f(d(x)y) = xy; multiplicative iff x·f(y) = xy" },
    Statement { id: "inverse-commuting-projections", summary: "inverse ⟺ quasi-involutive with commuting projections" },
    Statement { id: "representable-factorization", summary: "(rs, c(rs)) = (r, rr*)(r*rs, rss*) in S(rr*)" },
    Statement { id: "representable-rigidity", summary: "left *-homs S(e) → X over S agreeing at (e, e) are equal" },
    Statement { id: "representable-star-reversal", summary: "star reverses (p,q)(r,s) in S(e) ⟺ s, qp left compatible" },
    Statement { id: "representable-inverse-compatible", summary: "S(e) inverse ⟺ involutive ⟺ eS pairwise left compatible" },
];

pub fn lookup(id: &str) -> Result<&'static Statement> {
    STATEMENTS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownStatement(id.to_string()))
}

fn implies(a: bool, b: bool) -> bool {
    !a || b
}

fn pairs(x: &StarSemigroup) -> impl Iterator<Item = (usize, usize)> + '_ {
    x.elements().flat_map(move |a| x.elements().map(move |b| (a, b)))
}

/// Every self-map of X that is a left *-homomorphism.
fn left_self_homs(x: &Arc<StarSemigroup>) -> Vec<StarMorphism> {
    let n = x.order();
    let mut map = vec![0; n];
    let mut out = Vec::new();
    loop {
        let f = StarMorphism::new(x.clone(), x.clone(), map.clone()).expect("in range");
        if f.is_left_star_hom() {
            out.push(f);
        }
        let mut i = 0;
        while i < n && map[i] + 1 == n {
            map[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        map[i] += 1;
    }
}

fn compose(a: &StarMorphism, b: &StarMorphism) -> StarMorphism {
    a.then(b).expect("composable self-maps")
}

/// Verdict of a registered statement on X, computed through the library.
pub fn main_verdict(id: &str, x: &StarSemigroup) -> Result<bool> {
    lookup(id)?;
    let xa = Arc::new(x.clone());
    let r = classify(x);
    let (left, right, inv) = (r.left_involutive.holds, r.right_involutive.holds, r.involutive.holds);
    let le = |e: usize, f: usize| x.leq_idem(e, f);
    let verdict = match id {
        "class-reduct" => {
            implies(inv, left && right) && implies(left || right, r.locally_involutive.holds)
        }
        "class-birestrictive" => {
            let p = x.projections();
            implies(left, r.corestrictive.holds)
                && implies(right, r.restrictive.holds)
                && implies(inv, r.birestrictive.holds && r.quasi_involutive.holds)
                && p.iter().all(|&a| {
                    p.iter().all(|&b| {
                        let ab = x.mul(a, b);
                        !x.is_projection(ab)
                            || (implies(left, x.mul(ab, a) == ab)
                                && implies(right, x.mul(ab, a) == x.mul(b, a))
                                && implies(inv, ab == x.mul(b, a)))
                    })
                })
        }
        "projection-bounds" => {
            let p = x.projections();
            pairs(x).all(|(a, b)| {
                let (da, cb, sa, sb) = (x.dom(a), x.cod(b), x.star(a), x.star(b));
                p.iter().all(|&q| {
                    le(cb, q) == (x.mul(q, b) == b && x.mul(sb, q) == sb)
                        && le(da, q) == (x.mul(a, q) == a && x.mul(q, sa) == sa)
                        && implies(left && x.mul(q, b) == b, x.mul(sb, q) == sb)
                        && implies(right && x.mul(a, q) == a, x.mul(q, sa) == sa)
                }) && le(cb, da) == (x.mul(da, b) == b && x.mul(sb, da) == sb)
                    && le(da, cb) == (x.mul(a, cb) == a && x.mul(cb, sa) == sa)
            })
        }
        "left-three-conditions" => implies(
            left,
            pairs(x).all(|(a, b)| {
                le(x.cod(b), x.dom(a)) == (x.mul(x.dom(a), b) == b)
                    && le(x.dom(a), x.cod(b)) == (x.mul(x.cod(b), x.star(a)) == x.star(a))
            }),
        ),
        "order-left-identities" => pairs(x).all(|(a, b)| {
            leq_left(x, a, b)
                == (x.mul(a, x.dom(b)) == a && x.mul(x.star(b), a) == x.dom(a) && x.mul(b, x.star(a)) == x.cod(a))
        }),
        "order-right-identities" => pairs(x).all(|(a, b)| {
            leq_right(x, a, b)
                == (x.mul(x.cod(b), a) == a && x.mul(x.star(a), b) == x.dom(a) && x.mul(a, x.star(b)) == x.cod(a))
        }),
        "order-left-involutive-form" => implies(
            left,
            pairs(x).all(|(a, b)| {
                leq_left(x, a, b) == (x.mul(x.star(b), a) == x.dom(a) && x.mul(b, x.star(a)) == x.cod(a))
            }),
        ),
        "order-right-involutive-form" => implies(
            right,
            pairs(x).all(|(a, b)| {
                leq_right(x, a, b) == (x.mul(x.star(a), b) == x.dom(a) && x.mul(a, x.star(b)) == x.cod(a))
            }),
        ),
        "order-left-to-right" => pairs(x)
            .all(|(a, b)| implies(leq_left(x, a, b) && x.mul(a, x.star(b)) == x.cod(a), leq_right(x, a, b))),
        "order-right-to-left" => pairs(x)
            .all(|(a, b)| implies(leq_right(x, a, b) && x.mul(x.star(b), a) == x.dom(a), leq_left(x, a, b))),
        "order-coincide" => implies(
            r.locally_involutive.holds,
            pairs(x).all(|(a, b)| leq_left(x, a, b) == leq_right(x, a, b)),
        ),
        "order-star-duality" => implies(
            r.locally_involutive.holds,
            pairs(x).all(|(a, b)| leq_left(x, a, b) == leq_right(x, x.star(a), x.star(b))),
        ),
        "hom-projection-multiplicative" => {
            !left
                || left_self_homs(&xa).iter().all(|f| {
                    let by_proj = x
                        .projections()
                        .into_iter()
                        .all(|p| x.elements().all(|a| f.apply(x.mul(p, a)) == x.mul(f.apply(p), f.apply(a))));
                    f.is_star_hom() == by_proj
                })
        }
        "etale-reflects-projections" => left_self_homs(&xa).iter().filter(|f| f.etale()).all(|f| {
            x.elements().all(|a| {
                let fa = f.apply(a);
                implies(fa == x.cod(fa), a == x.cod(a))
            })
        }),
        "etale-cancellation" => {
            let homs = left_self_homs(&xa);
            let etale: Vec<&StarMorphism> = homs.iter().filter(|h| h.etale()).collect();
            homs.iter().all(|psi| etale.iter().all(|h| implies(compose(psi, h).etale(), psi.etale())))
        }
        "etale-forces-multiplicative" => {
            let homs = left_self_homs(&xa);
            let etale: Vec<&StarMorphism> = homs.iter().filter(|h| h.is_star_hom() && h.etale()).collect();
            homs.iter().all(|psi| {
                etale.iter().all(|h| {
                    let f = compose(psi, h);
                    implies(f.is_star_hom(), psi.is_star_hom() && implies(f.etale(), psi.etale()))
                })
            })
        }
        "action-absorbs-domain" => {
            let mut ok = true;
            for f in left_self_homs(&xa).iter().filter(|f| f.etale()) {
                let a = canonical_action(f)?;
                let absorbs = pairs(x).all(|(u, v)| a.act(u, f.apply(x.mul(x.dom(u), v))) == x.mul(u, v))
                    && x.elements().all(|u| a.act(u, f.apply(x.dom(u))) == u);
                let through = pairs(x).all(|(u, v)| a.act(u, f.apply(v)) == x.mul(u, v));
                let mixed = pairs(x)
                    .all(|(u, v)| x.elements().all(|s| a.act(x.mul(u, v), s) == x.mul(u, a.act(v, s))));
                ok &= absorbs && f.is_star_hom() == through && implies(f.is_star_hom(), mixed);
            }
            ok
        }
        "inverse-commuting-projections" => {
            let comm = r.commuting_projections.holds;
            r.inverse.holds == (r.quasi_involutive.holds && comm)
                && implies((left || right) && comm, r.inverse.holds)
        }
        "representable-factorization" | "representable-rigidity" | "representable-star-reversal"
        | "representable-inverse-compatible" => {
            if !r.inverse.holds {
                return Ok(true);
            }
            let base = as_inverse(x)?;
            match id {
                "representable-factorization" => rsrs_check(&base)?,
                "representable-rigidity" => {
                    let mut ok = true;
                    for f in left_self_homs(&xa).iter().filter(|f| f.is_star_hom() && f.etale()) {
                        let f = StarMorphism::new(xa.clone(), base.semigroup().clone(), f.map().to_vec())?;
                        for rep in base.representables() {
                            let mut budget = u64::MAX;
                            let homs = left_homs_over(rep, &f, &mut budget)?;
                            let unit = rep.unit();
                            let mut at_unit: Vec<usize> = homs.iter().map(|h| h[unit]).collect();
                            at_unit.sort_unstable();
                            at_unit.dedup();
                            ok &= at_unit.len() == homs.len();
                        }
                    }
                    ok
                }
                _ => {
                    let mut ok = true;
                    for &e in base.idempotents() {
                        let sym = prop_sym_check(&base, e)?;
                        let t = &base.representable(e)?.semigroup;
                        let tr = classify(t);
                        ok &= if id == "representable-star-reversal" {
                            sym.mismatches.is_empty()
                        } else {
                            sym.holds() && tr.inverse.holds == tr.involutive.holds
                        };
                    }
                    ok
                }
            }
        }
        _ => unreachable!("registered statement without verdict"),
    };
    Ok(verdict)
}

#[derive(Debug, Clone, Serialize)]
pub struct Agreement {
    pub id: &'static str,
    pub main: bool,
    pub naive: bool,
}

/// Both verdicts for every statement on X.
pub fn verify_all(x: &StarSemigroup) -> Result<Vec<Agreement>> {
    STATEMENTS
        .iter()
        .map(|s| {
            Ok(Agreement {
                id: s.id,
                main: main_verdict(s.id, x)?,
                naive: crate::oracle::naive::naive_check(s.id, x.order(), x.mul_table(), x.star_table())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{all_star_semigroups, naive::NAIVE_STATEMENTS, standard_family};

    #[test]
    fn registry_matches_oracle() {
        let ids: Vec<&str> = STATEMENTS.iter().map(|s| s.id).collect();
        assert_eq!(ids, NAIVE_STATEMENTS);
    }

    #[test]
    fn all_hold_up_to_order_three() {
        for n in 1..=3 {
            for x in all_star_semigroups(n).unwrap() {
                for a in verify_all(&x).unwrap() {
                    assert!(a.main && a.naive, "{} on {:?}: {a:?}", a.id, x.mul_table());
                }
            }
        }
    }

    #[test]
    fn all_hold_on_families() {
        for (name, n) in [("symmetric_inverse", 2), ("semilattice_chain", 3), ("brandt", 2), ("left_zero", 3), ("cyclic_group", 4)] {
            let x = standard_family(name, n).unwrap();
            for a in verify_all(&x).unwrap() {
                assert!(a.main && a.naive, "{} on {name}{n}", a.id);
            }
        }
    }

    #[test]
    fn unknown_id() {
        let x = standard_family("semilattice_chain", 1).unwrap();
        assert!(matches!(main_verdict("nope", &x), Err(Error::UnknownStatement(_))));
    }
}
