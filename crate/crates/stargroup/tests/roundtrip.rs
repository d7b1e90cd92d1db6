use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use stargroup::groupoid::esn_groupoid;
use stargroup::io::{
    load_groupoid, load_morphism, load_presheaf, load_semigroup, load_sset, to_pretty, FHatDoc, GroupoidDoc,
    MorphismDoc, PresheafDoc, SSetDoc, SemigroupDoc, SemigroupRef,
};
use stargroup::modalg::{fhat, DEFAULT_CARRIER_CAP};
use stargroup::report::Report;
use stargroup::topos::lambda;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Parses the file into `T` and prints it again, byte for byte.
fn bit_exact<T: Serialize + DeserializeOwned>(name: &str) {
    let path = fixtures().join(name);
    let text = read(&path);
    let doc: T = serde_json::from_str(&text).unwrap();
    assert_eq!(to_pretty(&doc).unwrap(), text, "{name}");
}

#[test]
fn semigroup_files() {
    for n in ["t1", "c2", "sl2", "lz2", "i2"] {
        bit_exact::<SemigroupDoc>(&format!("{n}.json"));
        let path = fixtures().join(format!("{n}.json"));
        let x = load_semigroup(&path).unwrap();
        assert_eq!(to_pretty(&SemigroupDoc::from(&x)).unwrap(), read(&path));
    }
}

#[test]
fn morphism_files() {
    for n in ["const_c2_t1", "id_i2", "id_sl2"] {
        bit_exact::<MorphismDoc>(&format!("{n}.json"));
        load_morphism(fixtures().join(format!("{n}.json"))).unwrap();
    }
    bit_exact::<MorphismDoc>("golden/p21_lambda.json");
}

#[test]
fn presheaf_file() {
    bit_exact::<PresheafDoc>("p21.json");
    let path = fixtures().join("p21.json");
    let p = load_presheaf(&path).unwrap();
    let doc = PresheafDoc::from_presheaf(&p, SemigroupRef::Path("sl2.json".into()));
    assert_eq!(to_pretty(&doc).unwrap(), read(&path));
}

#[test]
fn sset_file() {
    bit_exact::<SSetDoc>("p21_sset.json");
    let path = fixtures().join("p21_sset.json");
    let a = load_sset(&path).unwrap();
    let doc = SSetDoc::from_sset(&a, SemigroupRef::Path("sl2.json".into()));
    assert_eq!(to_pretty(&doc).unwrap(), read(&path));
}

#[test]
fn groupoid_file() {
    bit_exact::<GroupoidDoc>("golden/i2_groupoid.json");
    let path = fixtures().join("golden/i2_groupoid.json");
    let g = load_groupoid(&path).unwrap();
    assert_eq!(to_pretty(&GroupoidDoc::from_mediated(&g)).unwrap(), read(&path));
    let fresh = esn_groupoid(&load_semigroup(fixtures().join("i2.json")).unwrap()).unwrap();
    assert_eq!(to_pretty(&GroupoidDoc::from_mediated(&fresh)).unwrap(), read(&path));
}

#[test]
fn lambda_golden() {
    let p = load_presheaf(fixtures().join("p21.json")).unwrap();
    let lam = lambda(&p).unwrap();
    assert_eq!(to_pretty(&MorphismDoc::inline(&lam.structure)).unwrap(), read(&fixtures().join("golden/p21_lambda.json")));
}

#[test]
fn fhat_golden() {
    bit_exact::<FHatDoc>("golden/fhat_id_sl2.json");
    let f = load_morphism(fixtures().join("id_sl2.json")).unwrap();
    let fh = fhat(&f, DEFAULT_CARRIER_CAP).unwrap();
    assert_eq!(to_pretty(&FHatDoc::from_fhat(&fh, true)).unwrap(), read(&fixtures().join("golden/fhat_id_sl2.json")));
    // (0,∅), (0,{0}), (1,∅), (1,{1}); {1}·{1} = {1}
    let doc = FHatDoc::from_fhat(&fh, true);
    assert_eq!(doc.elements.len(), 4);
    assert_eq!(doc.product.unwrap()[3][3], 3);
}

#[test]
fn report_golden() {
    bit_exact::<Report>("golden/classify_lz2.json");
    let x = load_semigroup(fixtures().join("lz2.json")).unwrap();
    let r = stargroup::checks::classify_report("lz2", &x);
    assert_eq!(r.to_json().unwrap(), read(&fixtures().join("golden/classify_lz2.json")));
    assert_eq!(r.to_text(), read(&fixtures().join("golden/classify_lz2.txt")));
}
