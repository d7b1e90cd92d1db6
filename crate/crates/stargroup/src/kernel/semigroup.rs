use crate::error::{AxiomViolation, Error, Result};

/// A finite *-semigroup on the elements `0..order`.
///
/// Equality compares the tables only; the name is a label.
#[derive(Debug, Clone)]
pub struct StarSemigroup {
    name: Option<String>,
    order: usize,
    mul: Vec<usize>,
    star: Vec<usize>,
}

impl PartialEq for StarSemigroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul && self.star == other.star
    }
}

impl Eq for StarSemigroup {}

impl StarSemigroup {
    /// Validates the tables and builds the structure.
    pub fn new(name: Option<String>, mul: Vec<Vec<usize>>, star: Vec<usize>) -> Result<Self> {
        let order = mul.len();
        if order == 0 {
            return Err(Error::Shape("empty carrier".into()));
        }
        if star.len() != order {
            return Err(Error::Shape(format!(
                "star has {} entries, expected {order}",
                star.len()
            )));
        }
        let mut flat = Vec::with_capacity(order * order);
        for (i, row) in mul.iter().enumerate() {
            if row.len() != order {
                return Err(Error::Shape(format!("row {i} has {} entries", row.len())));
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(name, order, flat, star)
    }

    /// Like [`StarSemigroup::new`] with a row-major flat table.
    pub fn from_flat(
        name: Option<String>,
        order: usize,
        mul: Vec<usize>,
        star: Vec<usize>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Shape("empty carrier".into()));
        }
        if mul.len() != order * order || star.len() != order {
            return Err(Error::Shape("table sizes do not match the order".into()));
        }
        if let Some(bad) = mul.iter().chain(star.iter()).find(|&&v| v >= order) {
            return Err(Error::Shape(format!("entry {bad} out of range")));
        }
        let s = StarSemigroup {
            name,
            order,
            mul,
            star,
        };
        let violations = s.violations();
        if violations.is_empty() {
            Ok(s)
        } else {
            Err(Error::Axioms(violations))
        }
    }

    /// Builds without checking the axioms. Callers must guarantee them.
    pub(crate) fn from_flat_unchecked(
        name: Option<String>,
        order: usize,
        mul: Vec<usize>,
        star: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(mul.len(), order * order);
        StarSemigroup {
            name,
            order,
            mul,
            star,
        }
    }

    /// The least witness of each violated axiom.
    fn violations(&self) -> Vec<AxiomViolation> {
        let n = self.order;
        let mut out = Vec::new();
        'assoc: for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        out.push(AxiomViolation::Associativity(x, y, z));
                        break 'assoc;
                    }
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| self.star(self.star(x)) != x) {
            out.push(AxiomViolation::Involution(x));
        }
        if let Some(x) = (0..n).find(|&x| self.mul(self.mul(x, self.star(x)), x) != x) {
            out.push(AxiomViolation::PartialIsometry(x));
        }
        out
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y]
    }

    #[inline]
    pub fn star(&self, x: usize) -> usize {
        self.star[x]
    }

    pub fn mul3(&self, x: usize, y: usize, z: usize) -> usize {
        self.mul(self.mul(x, y), z)
    }

    /// d(x) = x*x.
    #[inline]
    pub fn dom(&self, x: usize) -> usize {
        self.mul(self.star(x), x)
    }

    /// c(x) = xx*.
    #[inline]
    pub fn cod(&self, x: usize) -> usize {
        self.mul(x, self.star(x))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn is_projection(&self, x: usize) -> bool {
        self.is_idempotent(x) && self.star(x) == x
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.is_idempotent(x)).collect()
    }

    pub fn projections(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.is_projection(x)).collect()
    }

    /// e ≤ f iff e = ef = fe. Both arguments must be idempotent.
    pub fn idempotent_leq(&self, e: usize, f: usize) -> Result<bool> {
        for x in [e, f] {
            if !self.is_idempotent(x) {
                return Err(Error::NotIdempotent(x));
            }
        }
        Ok(self.leq_idem(e, f))
    }

    /// Unchecked idempotent order.
    #[inline]
    pub(crate) fn leq_idem(&self, e: usize, f: usize) -> bool {
        self.mul(e, f) == e && self.mul(f, e) == e
    }

    /// Row-major multiplication table.
    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn star_table(&self) -> &[usize] {
        &self.star
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// The right ideal xX.
    pub fn right_ideal(&self, x: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements().map(|y| self.mul(x, y)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The opposite semigroup: same star, product reversed.
    pub fn opposite(&self) -> StarSemigroup {
        let n = self.order;
        let mut mul = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = self.mul(y, x);
            }
        }
        StarSemigroup::from_flat_unchecked(self.name.clone(), n, mul, self.star.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lz2() -> StarSemigroup {
        StarSemigroup::new(None, vec![vec![0, 0], vec![1, 1]], vec![0, 1]).unwrap()
    }

    #[test]
    fn trivial_semigroup_is_valid() {
        let t = StarSemigroup::new(None, vec![vec![0]], vec![0]).unwrap();
        assert_eq!(t.projections(), vec![0]);
    }

    #[test]
    fn cyclic_two_domains() {
        let c2 = StarSemigroup::new(None, vec![vec![0, 1], vec![1, 0]], vec![0, 1]).unwrap();
        assert_eq!(c2.dom(1), 0);
        assert_eq!(c2.projections(), vec![0]);
    }

    #[test]
    fn left_zero_basics() {
        let s = lz2();
        assert_eq!(s.dom(0), 0);
        assert_eq!(s.dom(1), 1);
        assert_eq!(s.projections(), vec![0, 1]);
        assert!(!s.idempotent_leq(0, 1).unwrap());
        assert!(s.idempotent_leq(1, 1).unwrap());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            StarSemigroup::new(None, vec![], vec![]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            StarSemigroup::new(None, vec![vec![0, 2], vec![0, 0]], vec![0, 1]),
            Err(Error::Shape(_))
        ));
        // null semigroup of order 2 is associative but 1·1*·1 = 0
        match StarSemigroup::new(None, vec![vec![0, 0], vec![0, 0]], vec![0, 1]) {
            Err(Error::Axioms(v)) => assert_eq!(v, vec![AxiomViolation::PartialIsometry(1)]),
            other => panic!("{other:?}"),
        }
        match StarSemigroup::new(None, vec![vec![0, 0], vec![1, 1]], vec![1, 1]) {
            Err(Error::Axioms(v)) => assert!(v.contains(&AxiomViolation::Involution(0))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn idempotent_leq_rejects_non_idempotents() {
        let c2 = StarSemigroup::new(None, vec![vec![0, 1], vec![1, 0]], vec![0, 1]).unwrap();
        assert!(matches!(c2.idempotent_leq(1, 0), Err(Error::NotIdempotent(1))));
    }
}
