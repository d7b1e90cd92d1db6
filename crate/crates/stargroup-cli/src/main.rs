use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stargroup::checks::{
    classify_report, compat_report, esn_report, fhat_report, lambda_report, morphism_adjunction_report,
    order_report, presheaf_adjunction_report, site_report, statement_list, verify_report,
};
use stargroup::groupoid::esn_groupoid;
use stargroup::io::{
    load_groupoid, load_morphism, load_presheaf, load_semigroup, load_sset, to_pretty, write_file, FHatDoc,
    GroupoidDoc, MorphismDoc, SemigroupDoc,
};
use stargroup::modalg::{quotient_violations, FreeModule, DEFAULT_CARRIER_CAP, DEFAULT_MULTISET_CAP};
use stargroup::oracle::{all_star_semigroups, enumerate_semigroups, enumerate_star_structures, standard_family, Dedup, EnumerationTask};
use stargroup::report::Report;
use stargroup::site::as_inverse;
use stargroup::topos::{gamma, lambda, GammaOptions, Strategy, DEFAULT_BUDGET};
use stargroup::{Error, StarSemigroup};

#[derive(Parser)]
#[command(name = "stargroup", version, about = "Checks on finite *-semigroups and the structures built over them")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Cap on candidate extensions in section searches.
    #[arg(long, env = "STARGROUP_BUDGET", default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u64,
    /// Worker threads for sweeps; 0 uses all cores.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Seed for sampling elements of free modules.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Auto,
    Semigroup,
    Morphism,
    Presheaf,
    Groupoid,
    Sset,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Generic,
    Fast,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    None,
    Iso,
    IsoAnti,
}

#[derive(Subcommand)]
enum Command {
    /// Load a file and re-validate it.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Auto)]
        kind: Kind,
    },
    /// Classification flags with witnesses.
    Classify { file: PathBuf },
    /// Left and right partial orders.
    Order { file: PathBuf },
    /// Ordered groupoid with mediator of a quasi-involutive semigroup.
    Groupoid {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Semigroup → groupoid → semigroup round trip.
    EsnCheck { file: PathBuf },
    /// Pullbacks and representables of L(S) for an inverse semigroup.
    Site { file: PathBuf },
    /// Λ of a presheaf.
    Lambda {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Γ of a morphism into an inverse semigroup.
    Gamma {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Unit, counit and triangle identities.
    Adjunction(AdjunctionArgs),
    /// Star reversal in S(e) against left compatibility.
    Compat { file: PathBuf },
    /// The algebra of fiber subsets of a morphism.
    Fhat {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CARRIER_CAP)]
        cap: usize,
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        with_product: bool,
    },
    /// Registered statements, main against naive verdicts.
    Verify(VerifyArgs),
    /// Stream semigroup tables as JSON lines.
    Enumerate {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = DedupArg::IsoAnti)]
        dedup: DedupArg,
        /// Emit every valid star structure instead of bare tables.
        #[arg(long)]
        stars: bool,
    },
    /// A member of a standard family.
    Family {
        name: String,
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AdjunctionArgs {
    #[arg(long)]
    presheaf: Option<PathBuf>,
    #[arg(long)]
    morphism: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Every enumerated *-semigroup up to --max-order.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 3)]
    max_order: usize,
    /// List registered statements and exit.
    #[arg(long)]
    list: bool,
    /// Semigroup files to check.
    files: Vec<PathBuf>,
}

enum Outcome {
    Report(Report),
    Text(String),
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn options(cli: &Cli, strategy: Strategy) -> GammaOptions {
    GammaOptions { budget: cli.budget, strategy }
}

fn validate(file: &Path, kind: Kind) -> stargroup::Result<Report> {
    let kind = match kind {
        Kind::Auto => {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(file)?)?;
            let has = |k: &str| v.get(k).is_some();
            if has("mul") {
                Kind::Semigroup
            } else if has("fibers") {
                Kind::Presheaf
            } else if has("action") {
                Kind::Sset
            } else if has("compose") {
                Kind::Groupoid
            } else if has("map") {
                Kind::Morphism
            } else {
                return Err(Error::Shape("cannot tell the kind of this file; pass --kind".into()));
            }
        }
        k => k,
    };
    let name = instance_name(file);
    let (check, res): (&str, stargroup::Result<()>) = match kind {
        Kind::Semigroup => ("semigroup", load_semigroup(file).map(drop)),
        Kind::Morphism => ("morphism", load_morphism(file).map(drop)),
        Kind::Presheaf => ("presheaf", load_presheaf(file).map(drop)),
        Kind::Groupoid => ("groupoid", load_groupoid(file).map(drop)),
        Kind::Sset => ("sset", load_sset(file).map(drop)),
        Kind::Auto => unreachable!(),
    };
    let mut r = Report::new();
    match res {
        Ok(()) => r.push(check, name, true, None),
        Err(e @ (Error::Io(_) | Error::Json(_))) => return Err(e),
        Err(e) => r.push(check, name, false, Some(json!(e.to_string()))),
    }
    Ok(r)
}

fn run(cli: &Cli) -> stargroup::Result<Outcome> {
    let report = match &cli.command {
        Command::Validate { file, kind } => validate(file, *kind)?,
        Command::Classify { file } => classify_report(&instance_name(file), &load_semigroup(file)?),
        Command::Order { file } => order_report(&instance_name(file), &load_semigroup(file)?),
        Command::Groupoid { file, out } => {
            let x = load_semigroup(file)?;
            let r = esn_report(&instance_name(file), &x);
            if let (Some(out), Ok(g)) = (out, esn_groupoid(&x)) {
                write_file(out, &GroupoidDoc::from_mediated(&g))?;
            }
            r
        }
        Command::EsnCheck { file } => esn_report(&instance_name(file), &load_semigroup(file)?),
        Command::Site { file } => site_report(&instance_name(file), &load_semigroup(file)?)?,
        Command::Lambda { file, out } => {
            let p = load_presheaf(file)?;
            let r = lambda_report(&instance_name(file), &p)?;
            if let (Some(out), Ok(lam)) = (out, lambda(&p)) {
                write_file(out, &MorphismDoc::inline(&lam.structure))?;
            }
            r
        }
        Command::Gamma { file, strategy } => {
            let f = load_morphism(file)?;
            let strategy = match strategy {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Generic => Strategy::Generic,
                StrategyArg::Fast => Strategy::Fast,
                StrategyArg::Both => Strategy::Both,
            };
            let base = as_inverse(f.target())?;
            let g = gamma(&f, &base, options(cli, strategy))?;
            let sizes: Vec<usize> = base.idempotents().iter().map(|&e| g.sections_at(e).len()).collect();
            let mut r = Report::new();
            let inst = format!("{} sections {:?}{}", instance_name(file), sizes, if g.fast_path { " (fast)" } else { "" });
            r.push("gamma", inst, true, None);
            r
        }
        Command::Adjunction(a) => {
            let opts = options(cli, Strategy::Auto);
            if let Some(p) = &a.presheaf {
                presheaf_adjunction_report(&instance_name(p), &load_presheaf(p)?, opts)?
            } else {
                let f = a.morphism.as_ref().expect("one of the group");
                morphism_adjunction_report(&instance_name(f), &load_morphism(f)?, opts)?
            }
        }
        Command::Compat { file } => compat_report(&instance_name(file), &load_semigroup(file)?)?,
        Command::Fhat { file, cap, dump, with_product } => {
            let f = load_morphism(file)?;
            let name = instance_name(file);
            let (mut r, fh) = fhat_report(&name, &f, *cap)?;
            if let Some(fh) = fh {
                if let Ok(fm) = FreeModule::new(&f) {
                    let sample = fm.sample(cli.seed, 32, DEFAULT_MULTISET_CAP);
                    let bad = quotient_violations(&fm, &fh, &sample);
                    r.check("free-quotient", &name, bad.is_empty(), &bad);
                }
                if let Some(path) = dump {
                    write_file(path, &FHatDoc::from_fhat(&fh, *with_product))?;
                }
            }
            r
        }
        Command::Verify(v) => {
            if v.list {
                let list = statement_list();
                return Ok(Outcome::Text(match cli.format {
                    Format::Json => to_pretty(
                        &list.iter().map(|(id, s)| json!({"id": id, "summary": s})).collect::<Vec<_>>(),
                    )?,
                    Format::Text => list.iter().map(|(id, s)| format!("{id:34} {s}\n")).collect(),
                }));
            }
            let mut instances: Vec<(String, StarSemigroup)> = Vec::new();
            if v.all {
                for n in 1..=v.max_order {
                    for (i, x) in all_star_semigroups(n)?.into_iter().enumerate() {
                        instances.push((format!("n{n}#{i}"), x));
                    }
                }
            }
            for f in &v.files {
                instances.push((instance_name(f), load_semigroup(f)?));
            }
            if instances.is_empty() {
                return Err(Error::Shape("nothing to verify: pass --all or files".into()));
            }
            verify_report(&instances, cli.jobs)?
        }
        Command::Enumerate { order, dedup, stars } => {
            let dedup = match dedup {
                DedupArg::None => Dedup::None,
                DedupArg::Iso => Dedup::Iso,
                DedupArg::IsoAnti => Dedup::IsoAnti,
            };
            let mut out = String::new();
            for t in enumerate_semigroups(&EnumerationTask::new(*order, dedup))? {
                if *stars {
                    for x in enumerate_star_structures(&t, *order)? {
                        out.push_str(&serde_json::to_string(&SemigroupDoc::from(&x))?);
                        out.push('\n');
                    }
                } else {
                    out.push_str(&serde_json::to_string(&json!({"order": order, "mul": t.chunks(*order).collect::<Vec<_>>()}))?);
                    out.push('\n');
                }
            }
            return Ok(Outcome::Text(out));
        }
        Command::Family { name, n, out } => {
            let doc = SemigroupDoc::from(&standard_family(name, *n)?);
            return match out {
                Some(path) => {
                    write_file(path, &doc)?;
                    Ok(Outcome::Text(String::new()))
                }
                None => Ok(Outcome::Text(to_pretty(&doc)?)),
            };
        }
    };
    Ok(Outcome::Report(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Text(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Report(r)) => {
            match cli.format {
                Format::Json => print!("{}", r.to_json().expect("report serializes")),
                Format::Text => print!("{}", r.to_text()),
            }
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::SearchBudgetExceeded(_) | Error::BudgetExceeded(_) => 3,
                Error::Io(_) | Error::Json(_) | Error::UnknownFamily(_) | Error::UnknownStatement(_) => 2,
                _ => 1,
            })
        }
    }
}
