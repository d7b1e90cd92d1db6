//! Direct translations of the registered statements over raw tables.
//!
//! Nothing here calls into the kernel or the constructions built on it;
//! every predicate is spelled out on `mul` and `star` arrays.

use crate::error::{Error, Result};

/// Identifiers accepted by [`naive_check`], in registry order.
pub const NAIVE_STATEMENTS: [&str; 22] = [
    "class-reduct",
    "class-birestrictive",
    "projection-bounds",
    "left-three-conditions",
    "order-left-identities",
    "order-right-identities",
    "order-left-involutive-form",
    "order-right-involutive-form",
    "order-left-to-right",
    "order-right-to-left",
    "order-coincide",
    "order-star-duality",
    "hom-projection-multiplicative",
    "etale-reflects-projections",
    "etale-cancellation",
    "etale-forces-multiplicative",
    "action-absorbs-domain",
    "inverse-commuting-projections",
    "representable-factorization",
    "representable-rigidity",
    "representable-star-reversal",
    "representable-inverse-compatible",
];

#[derive(Clone)]
struct T {
    n: usize,
    m: Vec<usize>,
    s: Vec<usize>,
}

impl T {
    fn all(&self) -> std::ops::Range<usize> {
        0..self.n
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.m[a * self.n + b]
    }
    fn st(&self, a: usize) -> usize {
        self.s[a]
    }
    fn d(&self, a: usize) -> usize {
        self.mul(self.st(a), a)
    }
    fn c(&self, a: usize) -> usize {
        self.mul(a, self.st(a))
    }
    fn le(&self, e: usize, f: usize) -> bool {
        self.mul(e, f) == e && self.mul(f, e) == e
    }
    fn idem(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }
    fn proj(&self, a: usize) -> bool {
        self.idem(a) && self.st(a) == a
    }
    fn projections(&self) -> Vec<usize> {
        self.all().filter(|&p| self.proj(p)).collect()
    }
    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.all().flat_map(move |x| self.all().map(move |y| (x, y)))
    }

    fn involutive(&self) -> bool {
        self.pairs().all(|(x, y)| self.st(self.mul(x, y)) == self.mul(self.st(y), self.st(x)))
    }
    fn left(&self) -> bool {
        self.pairs()
            .all(|(x, y)| self.st(self.mul(x, y)) == self.mul(self.st(self.mul(self.d(x), y)), self.st(x)))
    }
    fn right(&self) -> bool {
        self.pairs()
            .all(|(x, y)| self.st(self.mul(x, y)) == self.mul(self.st(y), self.st(self.mul(x, self.c(y)))))
    }
    fn locally(&self) -> bool {
        self.pairs().all(|(x, y)| {
            let guard = self.d(x) == self.c(y)
                || (self.proj(x) && self.le(x, self.c(y)))
                || (self.proj(y) && self.le(y, self.d(x)));
            !guard || self.st(self.mul(x, y)) == self.mul(self.st(y), self.st(x))
        })
    }
    fn restrictive(&self) -> bool {
        self.pairs().all(|(x, y)| self.le(self.d(self.mul(x, y)), self.d(y)))
    }
    fn corestrictive(&self) -> bool {
        self.pairs().all(|(x, y)| self.le(self.c(self.mul(x, y)), self.c(x)))
    }
    fn quasi(&self) -> bool {
        self.restrictive() && self.corestrictive() && self.locally()
    }
    fn commuting(&self) -> bool {
        let p = self.projections();
        p.iter().all(|&a| p.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }
    /// No element has an inverse y (xyx = x, yxy = y) other than x*.
    fn inverse(&self) -> bool {
        self.pairs().all(|(x, y)| {
            !(self.mul(self.mul(x, y), x) == x && self.mul(self.mul(y, x), y) == y) || y == self.st(x)
        })
    }
    fn leq_l(&self, x: usize, y: usize) -> bool {
        self.le(self.d(x), self.d(y)) && x == self.mul(y, self.d(x))
    }
    fn leq_r(&self, x: usize, y: usize) -> bool {
        self.le(self.c(x), self.c(y)) && x == self.mul(self.c(x), y)
    }

    // maps X → X
    fn star_map(&self, g: &[usize]) -> bool {
        self.all().all(|x| g[self.st(x)] == self.st(g[x]))
    }
    fn left_hom(&self, g: &[usize]) -> bool {
        self.star_map(g)
            && self.pairs().all(|(x, y)| g[self.mul(x, y)] == self.mul(g[x], g[self.mul(self.d(x), y)]))
    }
    fn mult(&self, g: &[usize]) -> bool {
        self.pairs().all(|(x, y)| g[self.mul(x, y)] == self.mul(g[x], g[y]))
    }
    fn ideal(&self, x: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.all().map(|y| self.mul(x, y)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
    fn etale(&self, g: &[usize]) -> bool {
        self.left_hom(g)
            && self.all().all(|x| {
                let dom = self.ideal(x);
                let mut img: Vec<usize> = dom.iter().map(|&y| g[y]).collect();
                img.sort_unstable();
                img.dedup();
                img.len() == dom.len() && img == self.ideal(g[x])
            })
    }
    fn self_maps(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    self.all().map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }
    fn left_homs(&self) -> Vec<Vec<usize>> {
        self.self_maps().into_iter().filter(|g| self.left_hom(g)).collect()
    }
    /// xs for the canonical action of étale g.
    fn act(&self, g: &[usize], x: usize, s: usize) -> usize {
        let target = self.mul(g[x], s);
        let found: Vec<usize> = self
            .all()
            .filter(|&y| self.mul(self.c(x), y) == y && g[y] == target)
            .collect();
        assert_eq!(found.len(), 1, "étale map has unique lifts");
        found[0]
    }

    fn compatible(&self, a: usize, b: usize) -> bool {
        self.mul(self.mul(a, self.st(b)), b) == self.mul(self.mul(b, self.st(a)), a)
    }
}

/// S(e): pairs (r, s) with d(s) = c(r), es = s.
struct Rep {
    pairs: Vec<(usize, usize)>,
    t: T,
}

fn rep(x: &T, e: usize) -> Rep {
    let mut pairs = Vec::new();
    for r in x.all() {
        for s in x.all() {
            if x.d(s) == x.c(r) && x.mul(e, s) == s {
                pairs.push((r, s));
            }
        }
    }
    let idx = |p: (usize, usize)| pairs.iter().position(|&q| q == p).expect("closed");
    let n = pairs.len();
    let mut m = Vec::with_capacity(n * n);
    for &(u, v) in &pairs {
        for &(p, _) in &pairs {
            let up = x.mul(u, p);
            m.push(idx((up, x.mul(v, x.c(up)))));
        }
    }
    let s = pairs.iter().map(|&(u, v)| idx((x.st(u), x.mul(v, u)))).collect();
    let t = T { n, m, s };
    Rep { pairs, t }
}

fn implies(a: bool, b: bool) -> bool {
    !a || b
}

/// Evaluates a registered statement on a raw *-semigroup table.
pub fn naive_check(id: &str, n: usize, mul: &[usize], star: &[usize]) -> Result<bool> {
    if mul.len() != n * n || star.len() != n {
        return Err(Error::Shape("table sizes".into()));
    }
    let x = T { n, m: mul.to_vec(), s: star.to_vec() };
    let verdict = match id {
        "class-reduct" => {
            let (l, r) = (x.left(), x.right());
            implies(x.involutive(), l && r) && implies(l || r, x.locally())
        }
        "class-birestrictive" => {
            let (l, r, i) = (x.left(), x.right(), x.involutive());
            let p = x.projections();
            implies(l, x.corestrictive())
                && implies(r, x.restrictive())
                && implies(i, x.restrictive() && x.corestrictive() && x.quasi())
                && p.iter().all(|&a| {
                    p.iter().all(|&b| {
                        let ab = x.mul(a, b);
                        let aba = x.mul(ab, a);
                        implies(x.proj(ab), implies(l, aba == ab) && implies(r, aba == x.mul(b, a)) && implies(i, ab == x.mul(b, a)))
                    })
                })
        }
        "projection-bounds" => {
            let p = x.projections();
            let (l, r) = (x.left(), x.right());
            x.pairs().all(|(a, b)| {
                p.iter().all(|&q| {
                    x.le(x.c(b), q) == (x.mul(q, b) == b && x.mul(x.st(b), q) == x.st(b))
                        && x.le(x.d(a), q) == (x.mul(a, q) == a && x.mul(q, x.st(a)) == x.st(a))
                        && implies(l && x.mul(q, b) == b, x.mul(x.st(b), q) == x.st(b))
                        && implies(r && x.mul(a, q) == a, x.mul(q, x.st(a)) == x.st(a))
                }) && x.le(x.c(b), x.d(a)) == (x.mul(x.d(a), b) == b && x.mul(x.st(b), x.d(a)) == x.st(b))
                    && x.le(x.d(a), x.c(b)) == (x.mul(a, x.c(b)) == a && x.mul(x.c(b), x.st(a)) == x.st(a))
            })
        }
        "left-three-conditions" => implies(
            x.left(),
            x.pairs().all(|(a, b)| {
                x.le(x.c(b), x.d(a)) == (x.mul(x.d(a), b) == b)
                    && x.le(x.d(a), x.c(b)) == (x.mul(x.c(b), x.st(a)) == x.st(a))
            }),
        ),
        "order-left-identities" => x.pairs().all(|(a, b)| {
            x.leq_l(a, b)
                == (x.mul(a, x.d(b)) == a && x.mul(x.st(b), a) == x.d(a) && x.mul(b, x.st(a)) == x.c(a))
        }),
        "order-right-identities" => x.pairs().all(|(a, b)| {
            x.leq_r(a, b)
                == (x.mul(x.c(b), a) == a && x.mul(x.st(a), b) == x.d(a) && x.mul(a, x.st(b)) == x.c(a))
        }),
        "order-left-involutive-form" => implies(
            x.left(),
            x.pairs()
                .all(|(a, b)| x.leq_l(a, b) == (x.mul(x.st(b), a) == x.d(a) && x.mul(b, x.st(a)) == x.c(a))),
        ),
        "order-right-involutive-form" => implies(
            x.right(),
            x.pairs()
                .all(|(a, b)| x.leq_r(a, b) == (x.mul(x.st(a), b) == x.d(a) && x.mul(a, x.st(b)) == x.c(a))),
        ),
        "order-left-to-right" => x
            .pairs()
            .all(|(a, b)| implies(x.leq_l(a, b) && x.mul(a, x.st(b)) == x.c(a), x.leq_r(a, b))),
        "order-right-to-left" => x
            .pairs()
            .all(|(a, b)| implies(x.leq_r(a, b) && x.mul(x.st(b), a) == x.d(a), x.leq_l(a, b))),
        "order-coincide" => implies(x.locally(), x.pairs().all(|(a, b)| x.leq_l(a, b) == x.leq_r(a, b))),
        "order-star-duality" => implies(
            x.locally(),
            x.pairs().all(|(a, b)| x.leq_l(a, b) == x.leq_r(x.st(a), x.st(b))),
        ),
        "hom-projection-multiplicative" => implies(
            x.left(),
            x.left_homs().iter().all(|g| {
                let p = x.projections();
                let by_proj = p.iter().all(|&q| x.all().all(|a| g[x.mul(q, a)] == x.mul(g[q], g[a])));
                x.mult(g) == by_proj
            }),
        ),
        "etale-reflects-projections" => x.left_homs().iter().filter(|g| x.etale(g)).all(|g| {
            x.all().all(|a| implies(g[a] == x.c(g[a]), a == x.c(a)))
        }),
        "etale-cancellation" => {
            let homs = x.left_homs();
            let etale: Vec<&Vec<usize>> = homs.iter().filter(|g| x.etale(g)).collect();
            homs.iter().all(|a| {
                etale.iter().all(|b| {
                    let ba: Vec<usize> = a.iter().map(|&v| b[v]).collect();
                    implies(x.etale(&ba), x.etale(a))
                })
            })
        }
        "etale-forces-multiplicative" => {
            let homs = x.left_homs();
            let etale_homs: Vec<&Vec<usize>> = homs.iter().filter(|h| x.mult(h) && x.etale(h)).collect();
            homs.iter().all(|psi| {
                etale_homs.iter().all(|h| {
                    let f: Vec<usize> = psi.iter().map(|&v| h[v]).collect();
                    implies(x.mult(&f), x.mult(psi) && implies(x.etale(&f), x.etale(psi)))
                })
            })
        }
        "action-absorbs-domain" => x.left_homs().iter().filter(|g| x.etale(g)).all(|g| {
            let absorbs = x.pairs().all(|(a, b)| x.act(g, a, g[x.mul(x.d(a), b)]) == x.mul(a, b))
                && x.all().all(|a| x.act(g, a, g[x.d(a)]) == a);
            let through = x.pairs().all(|(a, b)| x.act(g, a, g[b]) == x.mul(a, b));
            let mixed = x.pairs().all(|(a, b)| x.all().all(|s| x.act(g, x.mul(a, b), s) == x.mul(a, x.act(g, b, s))));
            absorbs && x.mult(g) == through && implies(x.mult(g), mixed)
        }),
        "inverse-commuting-projections" => {
            let inv = x.inverse();
            let comm = x.commuting();
            inv == (x.quasi() && comm) && implies((x.left() || x.right()) && comm, inv)
        }
        "representable-factorization" => {
            !x.inverse()
                || x.pairs().all(|(r, s)| {
                let e = x.c(r);
                let rp = rep(&x, e);
                let idx = |p: (usize, usize)| rp.pairs.iter().position(|&q| q == p);
                let rs = x.mul(r, s);
                let a = idx((rs, x.c(rs)));
                let b = idx((x.mul(x.st(r), rs), x.mul(rs, x.st(s))));
                let c = idx((r, e));
                match (a, b, c) {
                    (Some(a), Some(b), Some(c)) => {
                        let t = &rp.t;
                        a == t.mul(c, b) && b == t.mul(t.mul(t.st(c), c), b)
                    }
                    _ => false,
                }
            })
        }
        "representable-rigidity" => {
            if !x.inverse() {
                true
            } else {
                let etale_homs: Vec<Vec<usize>> =
                    x.left_homs().into_iter().filter(|h| x.mult(h) && x.etale(h)).collect();
                let idems: Vec<usize> = x.all().filter(|&e| x.idem(e)).collect();
                etale_homs.iter().all(|g| idems.iter().all(|&e| rigid(&x, g, e)))
            }
        }
        "representable-star-reversal" => {
            if !x.inverse() {
                true
            } else {
                x.all().filter(|&e| x.idem(e)).all(|e| {
                    let rp = rep(&x, e);
                    let t = &rp.t;
                    let ok = t.pairs().all(|(u, v)| {
                        let (p, q) = rp.pairs[u];
                        let s = rp.pairs[v].1;
                        let reverses = t.st(t.mul(u, v)) == t.mul(t.st(v), t.st(u));
                        reverses == x.compatible(s, x.mul(q, p))
                    });
                    ok
                })
            }
        }
        "representable-inverse-compatible" => {
            if !x.inverse() {
                true
            } else {
                x.all().filter(|&e| x.idem(e)).all(|e| {
                    let rp = rep(&x, e);
                    let t = &rp.t;
                    let ideal: Vec<usize> = x.all().filter(|&a| x.mul(e, a) == a).collect();
                    let idx = |p: (usize, usize)| rp.pairs.iter().position(|&q| q == p).unwrap();
                    let mut all_compatible = true;
                    let projections_ok = ideal.iter().all(|&a| {
                        ideal.iter().all(|&b| {
                            let comp = x.compatible(a, b);
                            all_compatible &= comp;
                            let (pa, pb) = (idx((x.d(a), a)), idx((x.d(b), b)));
                            (t.mul(pa, pb) == t.mul(pb, pa)) == comp
                        })
                    });
                    projections_ok && t.inverse() == t.involutive() && t.inverse() == all_compatible
                })
            }
        }
        _ => return Err(Error::UnknownStatement(id.to_string())),
    };
    Ok(verdict)
}

/// Left *-homomorphisms S(e) → X over g agree when they agree at (e, e).
fn rigid(x: &T, g: &[usize], e: usize) -> bool {
    let rp = rep(x, e);
    let t = &rp.t;
    let fibers: Vec<Vec<usize>> =
        rp.pairs.iter().map(|&(r, _)| x.all().filter(|&a| g[a] == r).collect()).collect();
    let mut homs: Vec<Vec<usize>> = vec![Vec::new()];
    for fib in &fibers {
        homs = homs
            .into_iter()
            .flat_map(|v| {
                fib.iter().map(move |&a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    let unit = rp.pairs.iter().position(|&p| p == (e, e)).unwrap();
    let good: Vec<Vec<usize>> = homs
        .into_iter()
        .filter(|alpha| {
            t.all().all(|u| alpha[t.st(u)] == x.st(alpha[u]))
                && t.pairs().all(|(u, v)| alpha[t.mul(u, v)] == x.mul(alpha[u], alpha[t.mul(t.d(u), v)]))
        })
        .collect();
    let mut at_unit: Vec<usize> = good.iter().map(|a| a[unit]).collect();
    at_unit.sort_unstable();
    at_unit.dedup();
    at_unit.len() == good.len()
}
