//! JSON file formats and a pretty printer that keeps scalar arrays on one
//! line. Every loader re-validates the structure it builds; writing a loaded
//! document back produces the same bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::groupoid::{OrderedGroupoid, OrderedGroupoidWithMediator};
use crate::kernel::{Relation, StarMorphism, StarSemigroup};
use crate::modalg::FHatAlgebra;
use crate::site::{as_inverse, InverseSemigroup, LSMorphism, Presheaf};
use crate::ssets::SSetStructure;

/// Serializes with two-space indentation; arrays of scalars stay inline.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

pub fn write_file<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_pretty(value)?)?;
    Ok(())
}

fn read_doc<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    pub star: Vec<usize>,
}

impl SemigroupDoc {
    pub fn build(&self) -> Result<StarSemigroup> {
        if self.mul.len() != self.order || self.star.len() != self.order {
            return Err(Error::Shape(format!("declared order {} does not match the tables", self.order)));
        }
        StarSemigroup::new(self.name.clone(), self.mul.clone(), self.star.clone())
    }
}

impl From<&StarSemigroup> for SemigroupDoc {
    fn from(s: &StarSemigroup) -> Self {
        SemigroupDoc {
            name: s.name().map(str::to_string),
            order: s.order(),
            mul: s.rows(),
            star: s.star_table().to_vec(),
        }
    }
}

/// A semigroup given inline or by a path relative to the referring file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SemigroupRef {
    Path(String),
    Inline(SemigroupDoc),
}

impl SemigroupRef {
    pub fn resolve(&self, dir: &Path) -> Result<StarSemigroup> {
        match self {
            SemigroupRef::Path(p) => load_semigroup(dir.join(p)),
            SemigroupRef::Inline(doc) => doc.build(),
        }
    }
}

pub fn load_semigroup(path: impl AsRef<Path>) -> Result<StarSemigroup> {
    read_doc::<SemigroupDoc>(path.as_ref())?.build()
}

pub fn parse_semigroup(text: &str) -> Result<StarSemigroup> {
    serde_json::from_str::<SemigroupDoc>(text)?.build()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub source: SemigroupRef,
    pub target: SemigroupRef,
    pub map: Vec<usize>,
}

impl MorphismDoc {
    pub fn build(&self, dir: &Path) -> Result<StarMorphism> {
        let source = Arc::new(self.source.resolve(dir)?);
        let target = Arc::new(self.target.resolve(dir)?);
        let f = StarMorphism::new(source, target, self.map.clone())?;
        if !f.is_star_morphism() {
            return Err(Error::NotStarMorphism(f.flags().star_morphism.witness.clone().unwrap_or_default()));
        }
        Ok(f)
    }

    pub fn inline(f: &StarMorphism) -> Self {
        MorphismDoc {
            source: SemigroupRef::Inline(f.source().as_ref().into()),
            target: SemigroupRef::Inline(f.target().as_ref().into()),
            map: f.map().to_vec(),
        }
    }
}

/// Loads a map and checks that it is a *-morphism.
pub fn load_morphism(path: impl AsRef<Path>) -> Result<StarMorphism> {
    let path = path.as_ref();
    read_doc::<MorphismDoc>(path)?.build(&dir_of(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub base: SemigroupRef,
    /// Idempotent index → labels of the fiber.
    pub fibers: IndexMap<String, Vec<String>>,
    /// "s,e" → image in P(s*s) of each element of P(e).
    pub transitions: IndexMap<String, Vec<usize>>,
}

impl PresheafDoc {
    pub fn build(&self, dir: &Path) -> Result<Presheaf> {
        let base = as_inverse(&self.base.resolve(dir)?)?;
        self.build_over(&base)
    }

    pub fn build_over(&self, base: &Arc<InverseSemigroup>) -> Result<Presheaf> {
        let mut labels = Vec::new();
        for &e in base.idempotents() {
            let fiber = self
                .fibers
                .get(&e.to_string())
                .ok_or_else(|| Error::InvalidPresheaf(format!("no fiber for idempotent {e}")))?;
            labels.push(fiber.clone());
        }
        if self.fibers.len() != labels.len() {
            return Err(Error::InvalidPresheaf("fiber keyed by a non-idempotent".into()));
        }
        let mut transitions = Vec::new();
        for m in base.morphisms() {
            let t = self
                .transitions
                .get(&format!("{},{}", m.s, m.e))
                .ok_or_else(|| Error::InvalidPresheaf(format!("no transition for {},{}", m.s, m.e)))?;
            transitions.push(t.clone());
        }
        if self.transitions.len() != transitions.len() {
            return Err(Error::InvalidPresheaf("transition keyed by a non-morphism".into()));
        }
        Presheaf::new(base.clone(), labels, transitions)
    }

    pub fn from_presheaf(p: &Presheaf, base: SemigroupRef) -> Self {
        let b = p.base();
        let fibers = b.idempotents().iter().map(|&e| (e.to_string(), p.labels(e).to_vec())).collect();
        let transitions = b
            .morphisms()
            .iter()
            .zip(p.transitions())
            .map(|(m, t): (&LSMorphism, &Vec<usize>)| (format!("{},{}", m.s, m.e), t.clone()))
            .collect();
        PresheafDoc { base, fibers, transitions }
    }
}

pub fn load_presheaf(path: impl AsRef<Path>) -> Result<Presheaf> {
    let path = path.as_ref();
    read_doc::<PresheafDoc>(path)?.build(&dir_of(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidDoc {
    pub objects: usize,
    pub morphisms: usize,
    pub dom: Vec<usize>,
    pub cod: Vec<usize>,
    pub identity: Vec<usize>,
    pub inverse: Vec<usize>,
    /// compose[x][y] = x∘y, null when dom(x) ≠ cod(y).
    pub compose: Vec<Vec<Option<usize>>>,
    /// Pairs (x, y) with x ≤ y.
    pub order: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mediator: Option<Vec<Vec<usize>>>,
}

impl GroupoidDoc {
    pub fn build_groupoid(&self) -> Result<OrderedGroupoid> {
        if self.dom.len() != self.morphisms {
            return Err(Error::InvalidGroupoid("morphism count does not match dom".into()));
        }
        if self.order.iter().flatten().any(|&x| x >= self.morphisms) {
            return Err(Error::InvalidGroupoid("order pair out of range".into()));
        }
        let order = Relation::from_fn(self.morphisms, |x, y| self.order.contains(&[x, y]));
        OrderedGroupoid::new(
            self.objects,
            self.dom.clone(),
            self.cod.clone(),
            self.identity.clone(),
            self.inverse.clone(),
            self.compose.clone(),
            order,
        )
    }

    pub fn build(&self) -> Result<OrderedGroupoidWithMediator> {
        let g = self.build_groupoid()?;
        let m = self.mediator.clone().ok_or_else(|| Error::InvalidGroupoid("no mediator".into()))?;
        OrderedGroupoidWithMediator::new(g, m)
    }

    pub fn from_groupoid(g: &OrderedGroupoid, mediator: Option<Vec<Vec<usize>>>) -> Self {
        let k = g.morphism_count();
        GroupoidDoc {
            objects: g.object_count(),
            morphisms: k,
            dom: (0..k).map(|x| g.dom(x)).collect(),
            cod: (0..k).map(|x| g.cod(x)).collect(),
            identity: (0..g.object_count()).map(|p| g.identity(p)).collect(),
            inverse: (0..k).map(|x| g.inverse(x)).collect(),
            compose: (0..k).map(|x| (0..k).map(|y| g.compose(x, y)).collect()).collect(),
            order: g.order().pairs().into_iter().map(|(x, y)| [x, y]).collect(),
            mediator,
        }
    }

    pub fn from_mediated(g: &OrderedGroupoidWithMediator) -> Self {
        Self::from_groupoid(g.groupoid(), Some(g.mediator_rows()))
    }
}

pub fn load_groupoid(path: impl AsRef<Path>) -> Result<OrderedGroupoidWithMediator> {
    read_doc::<GroupoidDoc>(path.as_ref())?.build()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSetDoc {
    pub carrier: usize,
    pub base: SemigroupRef,
    pub star: Vec<usize>,
    pub map: Vec<usize>,
    /// action[x][s] = xs.
    pub action: Vec<Vec<usize>>,
}

impl SSetDoc {
    pub fn build(&self, dir: &Path) -> Result<SSetStructure> {
        let base = Arc::new(self.base.resolve(dir)?);
        if self.star.len() != self.carrier || self.action.len() != self.carrier {
            return Err(Error::Shape(format!("declared carrier {} does not match the tables", self.carrier)));
        }
        if self.action.iter().any(|r| r.len() != base.order()) {
            return Err(Error::Shape("action rows must have one entry per element of S".into()));
        }
        SSetStructure::new(self.star.clone(), base, self.map.clone(), self.action.concat())
    }

    pub fn from_sset(a: &SSetStructure, base: SemigroupRef) -> Self {
        let m = a.base().order();
        SSetDoc {
            carrier: a.len(),
            base,
            star: a.star_table().to_vec(),
            map: a.map_table().to_vec(),
            action: a.action_table().chunks(m).map(|r| r.to_vec()).collect(),
        }
    }
}

pub fn load_sset(path: impl AsRef<Path>) -> Result<SSetStructure> {
    let path = path.as_ref();
    read_doc::<SSetDoc>(path)?.build(&dir_of(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FHatElementDoc {
    pub r: usize,
    pub set: Vec<usize>,
}

/// Contents of F̂(f): fibers of f, the subset carriers and the structure
/// tables, with the product table only on request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FHatDoc {
    pub fibers: Vec<Vec<usize>>,
    pub elements: Vec<FHatElementDoc>,
    pub star: Vec<usize>,
    pub psi: Vec<usize>,
    pub action: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<Vec<usize>>>,
}

impl FHatDoc {
    pub fn from_fhat(fh: &FHatAlgebra, with_product: bool) -> Self {
        let s = fh.f.target();
        let n = fh.len();
        let sg = &fh.semigroup;
        FHatDoc {
            fibers: s.elements().map(|r| fh.f.fiber(r)).collect(),
            elements: fh.elements.iter().map(|(r, set)| FHatElementDoc { r: *r, set: set.clone() }).collect(),
            star: sg.star_table().to_vec(),
            psi: fh.psi.map().to_vec(),
            action: (0..n)
                .map(|i| s.elements().map(|t| crate::modalg::InvolutiveModule::act(&fh.algebra, &i, t)).collect())
                .collect(),
            product: with_product.then(|| sg.rows()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::standard_family;

    #[test]
    fn scalar_arrays_stay_inline() {
        let doc = SemigroupDoc::from(&standard_family("semilattice_chain", 2).unwrap());
        let text = to_pretty(&doc).unwrap();
        assert_eq!(
            text,
            "{\n  \"name\": \"chain2\",\n  \"order\": 2,\n  \"mul\": [\n    [0, 0],\n    [0, 1]\n  ],\n  \"star\": [0, 1]\n}\n"
        );
        assert_eq!(parse_semigroup(&text).unwrap(), standard_family("semilattice_chain", 2).unwrap());
    }

    #[test]
    fn loader_revalidates() {
        let text = r#"{"order": 2, "mul": [[0, 0], [0, 1]], "star": [1, 0]}"#;
        assert!(parse_semigroup(text).is_err());
        let text = r#"{"order": 3, "mul": [[0]], "star": [0]}"#;
        assert!(matches!(parse_semigroup(text), Err(Error::Shape(_))));
    }

    #[test]
    fn presheaf_doc_round_trip() {
        let base = as_inverse(&standard_family("symmetric_inverse", 2).unwrap()).unwrap();
        let p = crate::site::representable_presheaf(&base, 1).unwrap();
        let doc = PresheafDoc::from_presheaf(&p, SemigroupRef::Path("i2.json".into()));
        let text = to_pretty(&doc).unwrap();
        let back: PresheafDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.build_over(&base).unwrap(), p);
        assert_eq!(to_pretty(&back).unwrap(), text);
    }

    #[test]
    fn groupoid_doc_round_trip() {
        let x = standard_family("symmetric_inverse", 2).unwrap();
        let g = crate::groupoid::esn_groupoid(&x).unwrap();
        let doc = GroupoidDoc::from_mediated(&g);
        let back: GroupoidDoc = serde_json::from_str(&to_pretty(&doc).unwrap()).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }
}
