use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::classify::{left_involutive_witness, Flag};
use super::semigroup::StarSemigroup;
use crate::error::{Error, Result};

/// Flags of a map between *-semigroups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismFlags {
    pub star_morphism: Flag,
    pub left_star_hom: Flag,
    pub multiplicative: Flag,
    pub star_hom: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaleReport {
    pub etale: bool,
    /// Least x at which f: xX → f(x)S is not a bijection.
    pub witness: Option<usize>,
}

/// A map between finite *-semigroups.
#[derive(Debug, Clone)]
pub struct StarMorphism {
    source: Arc<StarSemigroup>,
    target: Arc<StarSemigroup>,
    map: Vec<usize>,
    flags: OnceLock<MorphismFlags>,
}

impl PartialEq for StarMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && *self.source == *other.source && *self.target == *other.target
    }
}

impl StarMorphism {
    pub fn new(
        source: Arc<StarSemigroup>,
        target: Arc<StarSemigroup>,
        map: Vec<usize>,
    ) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::Shape(format!(
                "map has {} entries, source has {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.order()) {
            return Err(Error::Shape(format!("map value {bad} out of range")));
        }
        Ok(StarMorphism {
            source,
            target,
            map,
            flags: OnceLock::new(),
        })
    }

    pub fn identity(x: &Arc<StarSemigroup>) -> Self {
        StarMorphism::new(x.clone(), x.clone(), x.elements().collect()).unwrap()
    }

    pub fn source(&self) -> &Arc<StarSemigroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StarSemigroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &StarMorphism) -> Result<StarMorphism> {
        if *self.target != *g.source {
            return Err(Error::CarrierMismatch("composite of non-composable maps".into()));
        }
        StarMorphism::new(
            self.source.clone(),
            g.target.clone(),
            self.map.iter().map(|&x| g.apply(x)).collect(),
        )
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    /// The inverse map of a bijection.
    pub fn inverse(&self) -> Option<StarMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        StarMorphism::new(self.target.clone(), self.source.clone(), inv).ok()
    }

    pub fn flags(&self) -> &MorphismFlags {
        self.flags.get_or_init(|| self.compute_flags())
    }

    fn compute_flags(&self) -> MorphismFlags {
        let (x, s) = (&*self.source, &*self.target);
        let f = |a: usize| self.map[a];
        let star_w = x.elements().find(|&a| f(x.star(a)) != s.star(f(a))).map(|a| vec![a]);
        let mut left_w = None;
        let mut mult_w = None;
        for a in x.elements() {
            for b in x.elements() {
                let fab = f(x.mul(a, b));
                if left_w.is_none() && fab != s.mul(f(a), f(x.mul(x.dom(a), b))) {
                    left_w = Some(vec![a, b]);
                }
                if mult_w.is_none() && fab != s.mul(f(a), f(b)) {
                    mult_w = Some(vec![a, b]);
                }
            }
        }
        let star_morphism = Flag { holds: star_w.is_none(), witness: star_w.clone() };
        let left_star_hom = Flag {
            holds: star_w.is_none() && left_w.is_none(),
            witness: star_w.clone().or(left_w),
        };
        let multiplicative = Flag { holds: mult_w.is_none(), witness: mult_w };
        let star_hom = star_morphism.holds && multiplicative.holds;
        assert!(!star_hom || left_star_hom.holds, "a *-homomorphism must be a left *-homomorphism");
        MorphismFlags {
            star_morphism,
            left_star_hom,
            multiplicative,
            star_hom,
        }
    }

    pub fn is_star_morphism(&self) -> bool {
        self.flags().star_morphism.holds
    }

    pub fn is_left_star_hom(&self) -> bool {
        self.flags().left_star_hom.holds
    }

    pub fn is_star_hom(&self) -> bool {
        self.flags().star_hom
    }

    /// Whether f: xX → f(x)S is a bijection for every x. For left involutive
    /// source and target the two lifting characterizations are evaluated too
    /// and must agree.
    pub fn is_etale(&self) -> Result<EtaleReport> {
        let flags = self.flags();
        if !flags.left_star_hom.holds {
            return Err(Error::NotLeftStarHom(flags.left_star_hom.witness.clone().unwrap_or_default()));
        }
        let witness = self.source.elements().find(|&x| !self.bijective_on_ideal(x));
        let report = EtaleReport { etale: witness.is_none(), witness };
        if left_involutive_witness(&self.source).is_none()
            && left_involutive_witness(&self.target).is_none()
        {
            let by_cones = self.projection_cones_bijective();
            let by_lifts = self.equations_lift_uniquely();
            if by_cones != report.etale || by_lifts != report.etale {
                return Err(Error::Invariant(format!(
                    "etale characterizations disagree: ideals {}, cones {by_cones}, lifts {by_lifts}",
                    report.etale
                )));
            }
        }
        Ok(report)
    }

    /// Shorthand for `is_etale().map(|r| r.etale)`, false when not a left *-hom.
    pub fn etale(&self) -> bool {
        self.is_etale().map(|r| r.etale).unwrap_or(false)
    }

    fn bijective_on_ideal(&self, x: usize) -> bool {
        let (xs, s) = (&*self.source, &*self.target);
        let ideal = xs.right_ideal(x);
        let fx = self.map[x];
        let image_ideal = s.right_ideal(fx);
        let mut images: Vec<usize> = ideal.iter().map(|&y| self.map[y]).collect();
        images.sort_unstable();
        let len = images.len();
        images.dedup();
        len == images.len() && images == image_ideal
    }

    /// For each projection p, f maps {x : c(x) ≤ p} bijectively onto {s : c(s) ≤ f(p)}.
    fn projection_cones_bijective(&self) -> bool {
        let (x, s) = (&*self.source, &*self.target);
        x.projections().into_iter().all(|p| {
            let fp = self.map[p];
            let mut images: Vec<usize> = x
                .elements()
                .filter(|&a| x.leq_idem(x.cod(a), p))
                .map(|a| self.map[a])
                .collect();
            images.sort_unstable();
            let len = images.len();
            images.dedup();
            let cone: Vec<usize> = s.elements().filter(|&t| s.leq_idem(s.cod(t), fp)).collect();
            len == images.len() && images == cone
        })
    }

    /// For each projection p and each s = f(p)s there is exactly one x = px over s.
    fn equations_lift_uniquely(&self) -> bool {
        let (x, s) = (&*self.source, &*self.target);
        x.projections().into_iter().all(|p| {
            let fp = self.map[p];
            s.elements().filter(|&t| s.mul(fp, t) == t).all(|t| {
                x.elements()
                    .filter(|&a| x.mul(p, a) == a && self.map[a] == t)
                    .count()
                    == 1
            })
        })
    }

    /// The unique x with x = px and f(x) = s.
    pub fn etale_lift(&self, p: usize, s: usize) -> Result<usize> {
        if !self.is_etale()?.etale {
            return Err(Error::NotEtale(self.is_etale()?.witness.unwrap_or(0)));
        }
        self.lift_unchecked(p, s)
    }

    /// Lift without re-checking étaleness.
    pub(crate) fn lift_unchecked(&self, p: usize, s: usize) -> Result<usize> {
        let x = &*self.source;
        let t = &*self.target;
        if t.mul(self.map[p], s) != s {
            return Err(Error::NoLift { p, s });
        }
        let mut found = x.elements().filter(|&a| x.mul(p, a) == a && self.map[a] == s);
        match (found.next(), found.next()) {
            (Some(a), None) => Ok(a),
            _ => Err(Error::NotEtale(p)),
        }
    }

    /// The fiber f⁻¹(s).
    pub fn fiber(&self, s: usize) -> Vec<usize> {
        self.source.elements().filter(|&x| self.map[x] == s).collect()
    }
}
