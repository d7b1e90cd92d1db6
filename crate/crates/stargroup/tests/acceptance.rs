//! End-to-end acceptance sweep. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use stargroup::checks::{
    compat_report, esn_report, fhat_report, morphism_adjunction_report, presheaf_adjunction_report, sset_report,
    verify_report,
};
use stargroup::gen::{enumerate_presheaves, enumerate_ssets, left_homs_between, random_presheaves, star_homs};
use stargroup::io::{load_morphism, load_semigroup};
use stargroup::modalg::{lift_morphism, DEFAULT_CARRIER_CAP};
use stargroup::oracle::{all_star_semigroups, enumerate_semigroups, standard_family, Dedup, EnumerationTask};
use stargroup::report::Report;
use stargroup::site::{as_inverse, Presheaf};
use stargroup::statements::main_verdict;
use stargroup::topos::{lambda, GammaOptions};
use stargroup::{classify, StarMorphism, StarSemigroup};

const ORDER_STATEMENTS: [&str; 8] = [
    "order-left-identities",
    "order-right-identities",
    "order-left-involutive-form",
    "order-right-involutive-form",
    "order-left-to-right",
    "order-right-to-left",
    "order-coincide",
    "order-star-duality",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(report: &Report, extra: String) -> Outcome {
    let failed: Vec<_> = report.failures().take(3).map(|r| format!("{} {} {:?}", r.check, r.instance, r.witness)).collect();
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() { extra } else { format!("{extra}; first failures: {}", failed.join(" | ")) },
    }
}

fn count(report: &Report, check: &str) -> usize {
    report.rows.iter().filter(|r| r.check == check).count()
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn sweep() -> Vec<StarSemigroup> {
    (1..=4).flat_map(|n| all_star_semigroups(n).unwrap()).collect()
}

fn bases() -> Vec<(String, Arc<StarSemigroup>)> {
    ["sl2", "i2"]
        .iter()
        .map(|n| (n.to_string(), Arc::new(load_semigroup(fixtures().join(format!("{n}.json"))).unwrap())))
        .chain(std::iter::once(("chain3".to_string(), Arc::new(standard_family("semilattice_chain", 3).unwrap()))))
        .collect()
}

fn presheaf_population() -> Vec<(String, Presheaf)> {
    let mut out = Vec::new();
    for (name, s) in bases() {
        let base = as_inverse(&s).unwrap();
        for (i, p) in enumerate_presheaves(&base, 2).unwrap().into_iter().enumerate() {
            out.push((format!("{name}/p{i}"), p));
        }
        for (i, p) in random_presheaves(&base, 100, 3, 7).unwrap().into_iter().enumerate() {
            out.push((format!("{name}/r{i}"), p));
        }
    }
    out
}

/// *-morphisms from every *-semigroup of order ≤ 3 into each base, plus
/// Λ of every presheaf in the population and the constant map C2 → T1.
fn morphism_population(presheaves: &[(String, Presheaf)]) -> Vec<(String, StarMorphism)> {
    let small: Vec<Arc<StarSemigroup>> = (1..=3).flat_map(|n| all_star_semigroups(n).unwrap()).map(Arc::new).collect();
    let mut out = Vec::new();
    for (name, s) in bases() {
        for (i, x) in small.iter().enumerate() {
            for (j, f) in star_homs(x, &s).into_iter().enumerate() {
                out.push((format!("{name}/x{i}/f{j}"), f));
            }
        }
    }
    for (name, p) in presheaves {
        if p.all_labels().iter().any(|l| !l.is_empty()) {
            out.push((format!("lambda {name}"), lambda(p).unwrap().structure));
        }
    }
    out.push(("const_c2_t1".into(), load_morphism(fixtures().join("const_c2_t1.json")).unwrap()));
    out
}

fn criterion1(all: &[StarSemigroup]) -> Outcome {
    let bad: Vec<String> = all
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, x)| {
            let mut bad: Vec<String> = classify(x).implication_failures().iter().map(|f| format!("#{i} {f}")).collect();
            for id in ["class-reduct", "class-birestrictive"].iter().chain(ORDER_STATEMENTS.iter()) {
                if !main_verdict(id, x).unwrap() {
                    bad.push(format!("#{i} {id}"));
                }
            }
            bad
        })
        .collect();
    Outcome { pass: bad.is_empty(), detail: format!("{} structures, violations {:?}", all.len(), bad) }
}

fn criterion2(all: &[StarSemigroup]) -> Outcome {
    let quasi: Vec<&StarSemigroup> = all.iter().filter(|x| classify(x).quasi_involutive.holds).collect();
    let mut r = Report::new();
    for p in quasi.par_iter().enumerate().map(|(i, x)| esn_report(&format!("#{i}"), x)).collect::<Vec<_>>() {
        r.extend(p);
    }
    let kinds = ["mediator-trivial", "mediator-symmetric", "mediator-general"].map(|k| count(&r, k));
    outcome(&r, format!("{} quasi-involutive structures, mediator kinds {:?}", quasi.len(), kinds))
}

fn presheaf_reports(presheaves: &[(String, Presheaf)]) -> Report {
    let mut r = Report::new();
    for p in presheaves
        .par_iter()
        .map(|(name, p)| presheaf_adjunction_report(name, p, GammaOptions::default()).unwrap())
        .collect::<Vec<_>>()
    {
        r.extend(p);
    }
    r
}

fn morphism_reports(morphisms: &[(String, StarMorphism)]) -> Report {
    let mut r = Report::new();
    for p in morphisms
        .par_iter()
        .map(|(name, f)| morphism_adjunction_report(name, f, GammaOptions::default()).unwrap())
        .collect::<Vec<_>>()
    {
        r.extend(p);
    }
    r
}

fn criterion3(pre: &Report, mor: &Report) -> Outcome {
    let mut r = Report::new();
    for check in ["unit-iso", "triangle-lambda", "triangle-gamma"] {
        r.rows.extend(pre.rows.iter().filter(|row| row.check == check).cloned());
    }
    r.rows.extend(mor.rows.iter().filter(|row| row.check != "fiber-presheaf-m" && row.check != "gamma-fast-generic").cloned());
    let flag = |row: &stargroup::report::Row, k: &str| row.witness.as_ref().and_then(|w| w[k].as_bool()) == Some(true);
    let counits: Vec<_> = mor.rows.iter().filter(|row| row.check == "counit-biconditional").collect();
    let iso = counits.iter().filter(|row| flag(row, "iso")).count();
    let bijective_only = counits.iter().filter(|row| flag(row, "bijective") && !flag(row, "iso")).count();
    let constant = mor.rows.iter().any(|row| row.instance == "const_c2_t1" && row.check == "counit-biconditional" && row.pass);
    let mut o = outcome(
        &r,
        format!(
            "{} presheaves, {} counits ({iso} invertible, {bijective_only} bijective but not invertible), constant-map counterexample {}",
            count(pre, "unit-iso"),
            counits.len(),
            if constant { "holds" } else { "missing" }
        ),
    );
    o.pass &= constant;
    o
}

fn criterion4(pre: &Report) -> Outcome {
    let mut r = Report::new();
    r.rows.extend(pre.rows.iter().filter(|row| row.check == "five-way").cloned());
    outcome(&r, format!("{} presheaves", r.rows.len()))
}

fn criterion5(mor: &Report) -> Outcome {
    let mut r = Report::new();
    r.rows.extend(mor.rows.iter().filter(|row| row.check == "fiber-presheaf-m" || row.check == "gamma-fast-generic").cloned());
    let m = count(&r, "fiber-presheaf-m");
    let fast = count(&r, "gamma-fast-generic");
    let mut o = outcome(&r, format!("{m} étale left-involutive maps, {fast} fast/generic comparisons"));
    o.pass &= m > 0 && fast > 0;
    o
}

fn criterion6(pre: &Report) -> Outcome {
    let mut r = Report::new();
    let mut bases = bases();
    bases.push(("c2".into(), Arc::new(load_semigroup(fixtures().join("c2.json")).unwrap())));
    let mut total = 0;
    for (name, s) in &bases {
        let ssets = enumerate_ssets(s, 3).unwrap();
        total += ssets.len();
        for p in ssets
            .par_iter()
            .enumerate()
            .map(|(i, a)| sset_report(&format!("{name}/a{i}"), a).unwrap())
            .collect::<Vec<_>>()
        {
            r.extend(p);
        }
    }
    r.rows.extend(pre.rows.iter().filter(|row| row.check == "lambda-balanced").cloned());
    outcome(&r, format!("{total} S-sets, {} Λ(P)", count(pre, "lambda-balanced")))
}

fn criterion7(presheaves: &[(String, Presheaf)]) -> Outcome {
    let dir = fixtures();
    let mut maps: Vec<(String, StarMorphism)> = Vec::new();
    for n in ["t1", "c2", "sl2", "lz2", "i2"] {
        let x = Arc::new(load_semigroup(dir.join(format!("{n}.json"))).unwrap());
        maps.push((format!("id_{n}"), StarMorphism::identity(&x)));
    }
    for n in ["id_i2", "const_c2_t1"] {
        maps.push((n.into(), load_morphism(dir.join(format!("{n}.json"))).unwrap()));
    }
    for (name, p) in presheaves.iter().filter(|(n, _)| n.starts_with("sl2/p")) {
        if p.all_labels().iter().any(|l| !l.is_empty()) {
            maps.push((format!("lambda {name}"), lambda(p).unwrap().structure));
        }
    }
    let mut r = Report::new();
    let mut built = Vec::new();
    for (name, f) in &maps {
        let (rep, fh) = fhat_report(name, f, DEFAULT_CARRIER_CAP).unwrap();
        match fh {
            Some(fh) => {
                r.extend(rep);
                built.push((name.clone(), fh));
            }
            // F̂ needs an étale *-hom from a left involutive X to an inverse S
            None => {
                let admissible = classify(f.target()).inverse.holds
                    && f.etale()
                    && f.is_star_hom()
                    && classify(f.source()).left_involutive.holds;
                r.check("fhat-refusal", name, !admissible, ());
            }
        }
    }
    let mut lifts = 0;
    for (a, fa) in &built {
        for (b, fb) in &built {
            if **fa.f.target() != **fb.f.target() {
                continue;
            }
            for phi in left_homs_between(&fa.f, &fb.f).unwrap() {
                lifts += 1;
                let res = lift_morphism(&phi, fa, fb);
                r.check("lift-morphism", format!("{a} → {b} {:?}", phi.map()), res.is_ok(), res.err().map(|e| e.to_string()));
            }
        }
    }
    let mut o = outcome(&r, format!("{} algebras, {lifts} lifted morphisms", built.len()));
    o.pass &= lifts > 0;
    o
}

fn criterion8() -> Outcome {
    let counts: Vec<usize> = (1..=4)
        .map(|n| enumerate_semigroups(&EnumerationTask::new(n, Dedup::IsoAnti)).unwrap().len())
        .collect();
    // the full n = 4 population is small enough to check exhaustively
    let mut instances: Vec<(String, StarSemigroup)> = Vec::new();
    for n in 1..=4 {
        for (i, x) in all_star_semigroups(n).unwrap().into_iter().enumerate() {
            instances.push((format!("n{n}#{i}"), x));
        }
    }
    let r = verify_report(&instances, 0).unwrap();
    let mut o = outcome(&r, format!("counts {counts:?}, {} instances up to n = 4, {} verdicts", instances.len(), r.rows.len()));
    o.pass &= counts == [1, 4, 18, 126];
    o
}

fn criterion9() -> Outcome {
    let mut r = Report::new();
    for (name, s) in bases().into_iter().filter(|(n, _)| n != "chain3") {
        r.extend(compat_report(&name, &s).unwrap());
    }
    outcome(&r, format!("{} idempotents", count(&r, "star-reversal-compatibility")))
}

fn main() {
    let all = sweep();
    let presheaves = presheaf_population();
    let morphisms = morphism_population(&presheaves);
    let t = Instant::now();
    let pre = presheaf_reports(&presheaves);
    let mor = morphism_reports(&morphisms);
    let shared = t.elapsed();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("axiom and implication sweep", Box::new(|| criterion1(&all))),
        ("groupoid round trip", Box::new(|| criterion2(&all))),
        ("adjunction", Box::new(|| criterion3(&pre, &mor))),
        ("five-way agreement", Box::new(|| criterion4(&pre))),
        ("fiber presheaf", Box::new(|| criterion5(&mor))),
        ("balanced S-sets", Box::new(|| criterion6(&pre))),
        ("F̂ algebras", Box::new(|| criterion7(&presheaves))),
        ("oracle agreement", Box::new(criterion8)),
        ("star reversal and compatibility", Box::new(criterion9)),
    ];
    println!("adjunction batteries over {} presheaves and {} maps: {:.1?}", presheaves.len(), morphisms.len(), shared);
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}. {title}: {} [{:.1?}]", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail, t.elapsed());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
