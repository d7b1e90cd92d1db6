//! Bijective left *-homomorphisms need not have left *-homomorphism inverses.

use std::sync::Arc;

use stargroup::gen::bijective_left_hom_search;
use stargroup::oracle::all_star_semigroups;
use stargroup::{classify, StarMorphism, StarSemigroup};

struct Raw {
    n: usize,
    m: Vec<usize>,
    s: Vec<usize>,
}

impl Raw {
    fn of(x: &StarSemigroup) -> Self {
        Raw { n: x.order(), m: x.mul_table().to_vec(), s: x.star_table().to_vec() }
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.m[a * self.n + b]
    }
}

/// f(x*) = f(x)* and f(xy) = f(x) f(x*x y), straight from the tables.
fn left_hom(x: &Raw, y: &Raw, f: &[usize]) -> bool {
    (0..x.n).all(|a| {
        f[x.s[a]] == y.s[f[a]]
            && (0..x.n).all(|b| f[x.mul(a, b)] == y.mul(f[a], f[x.mul(x.mul(x.s[a], a), b)]))
    })
}

fn hom(x: &Raw, y: &Raw, f: &[usize]) -> bool {
    (0..x.n).all(|a| (0..x.n).all(|b| f[x.mul(a, b)] == y.mul(f[a], f[b])))
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        q[j] = i;
    }
    q
}

#[test]
fn search_matches_brute_force() {
    let (mut bij, mut bad, mut nonmult) = (0u64, 0usize, 0usize);
    for n in 1..=3 {
        let all: Vec<Raw> = all_star_semigroups(n).unwrap().iter().map(Raw::of).collect();
        for x in &all {
            for y in &all {
                for p in perms(n) {
                    if !left_hom(x, y, &p) {
                        continue;
                    }
                    bij += 1;
                    if !left_hom(y, x, &invert(&p)) {
                        bad += 1;
                    } else if !hom(x, y, &p) {
                        nonmult += 1;
                    }
                }
            }
        }
    }
    let search = bijective_left_hom_search(3).unwrap();
    assert_eq!((search.bijections, search.counterexamples.len(), search.non_multiplicative_isos.len()), (bij, bad, nonmult));
    assert_eq!((bij, bad, nonmult), (307, 207, 14));
}

#[test]
fn left_zero_onto_chain() {
    // identity map LZ2 → SL2; both sides left involutive
    let lz2 = Arc::new(StarSemigroup::new(None, vec![vec![0, 0], vec![1, 1]], vec![0, 1]).unwrap());
    let sl2 = Arc::new(StarSemigroup::new(None, vec![vec![0, 0], vec![0, 1]], vec![0, 1]).unwrap());
    assert!(classify(&lz2).left_involutive.holds && classify(&sl2).left_involutive.holds);
    let f = StarMorphism::new(lz2, sl2, vec![0, 1]).unwrap();
    assert!(f.is_bijective() && f.is_left_star_hom());
    let g = f.inverse().unwrap();
    assert!(!g.is_left_star_hom());
    // g(1·0) = 0 but g(1) g(d(1)·0) = 1 in LZ2
    assert_eq!(g.flags().left_star_hom.witness.as_deref(), Some(&[1, 0][..]));
}

#[test]
fn left_iso_not_multiplicative() {
    let x = Arc::new(StarSemigroup::new(None, vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]], vec![0, 1, 2]).unwrap());
    let y = Arc::new(StarSemigroup::new(None, vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 2, 2]], vec![0, 1, 2]).unwrap());
    let f = StarMorphism::new(x, y, vec![0, 1, 2]).unwrap();
    assert!(f.is_left_star_hom());
    assert!(f.inverse().unwrap().is_left_star_hom());
    assert!(!f.is_star_hom());
}
