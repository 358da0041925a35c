//! `hnl`: checks, twists, finite-field enumeration and demos for Novikov and
//! Hom-Novikov algebras.
//!
//! Exit status is 0 when every check passes (SKIP counts as passing), 1 when
//! at least one check fails, and 2 for usage, input and configuration errors.

mod report;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hom_novikov::algebra::{Algebra, EndoMatrix, Meta};
use hom_novikov::axioms::{check_hom_novikov, check_novikov, Checker};
use hom_novikov::catalog::{bundled, parse_catalog, parse_scalar, render_catalog, CatalogDocument};
use hom_novikov::constructions::{
    cor13_product, dorfman_gelfand_product, euler_derivation, exp_nilpotent_derivation, truncated_polynomial,
    x2_derivation, yau_twist,
};
use hom_novikov::constructions::lie::SampleField;
use hom_novikov::constructions::thm14::thm14_suite;
use hom_novikov::free_examples::{
    check_hom_novikov_polys, check_hom_novikov_sampled, check_sampled_variant, check_shift_commutes, ShiftEndo,
    StarVariant,
};
use hom_novikov::morphisms::{
    completeness, enumerate_fp, expand_branches, format_matrix, observation_suite, verify_branch, CompletenessOutcome,
    MorphismFamily, SPOT_ROWS,
};
use hom_novikov::par::Execution;
use hom_novikov::scalars::{FieldSpec, Rational, Scalar};

use report::{Format, Report, Status};

#[derive(Parser)]
#[command(name = "hnl", version, about = "Novikov and Hom-Novikov algebra toolkit")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized path.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Run single-threaded even when built with parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Bundled {
    Dim2,
    Dim3,
}

impl Bundled {
    fn key(self) -> &'static str {
        match self {
            Bundled::Dim2 => "dim2",
            Bundled::Dim3 => "dim3",
        }
    }
}

#[derive(Args, Clone)]
struct Source {
    /// A `.hnov` catalog file.
    file: Option<PathBuf>,
    /// Use a bundled catalog instead of a file.
    #[arg(long, value_enum, conflicts_with = "file")]
    bundled: Option<Bundled>,
}

#[derive(Subcommand)]
enum Command {
    /// Novikov identities for each algebra and Hom-Novikov identities for each twist.
    Check {
        #[command(flatten)]
        source: Source,
        /// Restrict to one algebra.
        #[arg(long)]
        name: Option<String>,
    },
    /// Branch-wise verification of every morphism family.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        name: Option<String>,
    },
    /// Print the twisted algebra of a family as catalog text.
    Twist {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        morphism: String,
        /// Parameter values, `name=expr`, comma separated.
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
    },
    /// Enumerate all morphisms over a prime field.
    EnumFp {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 5)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        i_residue: u64,
        /// Residues for algebra parameters, `name=value`, comma separated.
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
        /// Compare with the union of the family images instead of listing.
        #[arg(long = "match")]
        match_families: bool,
    },
    /// The remarks on the two-dimensional table, as checks.
    Observations {
        #[command(flatten)]
        source: Source,
    },
    /// Infinite-dimensional and truncated-polynomial examples.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Equivalence of the Hom-Lie products with their conditions on a sample grid.
    Thm14 {
        /// Samples per grid cell over F_7.
        #[arg(long, default_value_t = 25)]
        fp_per_cell: usize,
        /// Samples per grid cell over the rationals.
        #[arg(long, default_value_t = 3)]
        q_per_cell: usize,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// `Q[x1..xn]` with a shift and a partial derivative.
    Poly {
        #[arg(long, default_value_t = 1)]
        vars: usize,
        /// Shift offsets, comma separated rationals.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
        shift: Vec<String>,
        /// Variable to differentiate, 1-based.
        #[arg(long, default_value_t = 1)]
        dvar: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// `Q[x]/(x^m)` with the exponential of `x^2 d/dx`.
    Nilpotent {
        #[arg(long, default_value_t = 4)]
        truncation: usize,
    },
}

/// Output that precedes the result lines, plus the lines themselves.
#[derive(Default)]
struct Outcome {
    text: String,
    report: Option<Report>,
}

fn exec(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn load(src: &Source) -> Result<(CatalogDocument, Option<Bundled>), String> {
    match (&src.file, src.bundled) {
        (_, Some(b)) => Ok((bundled(b.key()).expect("known catalog"), Some(b))),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let doc = parse_catalog(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok((doc, None))
        }
        (None, None) => Err("no input: give a catalog file or --bundled".into()),
    }
}

fn selected<'a>(doc: &'a CatalogDocument, name: &Option<String>) -> Result<Vec<&'a Algebra>, String> {
    match name {
        None => Ok(doc.algebras.iter().collect()),
        Some(n) => doc.algebra(n).map(|a| vec![a]).ok_or_else(|| format!("no algebra named `{n}`")),
    }
}

fn transcription_skip(report: &mut Report, a: &Algebra) {
    if let Some(reason) = &a.meta.skip {
        report.push(format!("{}/transcription", a.name), Status::Skip, reason);
    }
}

fn branch_id(a: &Algebra, f: &MorphismFamily, k: usize, check: &str) -> String {
    format!("{}/{}/b{:02}/{}", a.name, f.name, k + 1, check)
}

fn run_check(doc: &CatalogDocument, name: &Option<String>) -> Result<Outcome, String> {
    let mut report = Report::default();
    for a in selected(doc, name)? {
        transcription_skip(&mut report, a);
        match check_novikov(a) {
            Ok(r) => report.check(format!("{}/novikov", a.name), &r),
            Err(e) => report.push(format!("{}/novikov", a.name), Status::Fail, e.to_string()),
        }
        for f in doc.families_of(&a.name) {
            let branches = match expand_branches(a, f) {
                Ok(b) => b,
                Err(e) => {
                    report.push(format!("{}/{}/branches", a.name, f.name), Status::Fail, e.to_string());
                    continue;
                }
            };
            for (k, b) in branches.iter().enumerate() {
                let id = branch_id(a, f, k, "hom-novikov");
                let r = b
                    .algebra(a, f)
                    .map_err(|e| e.to_string())
                    .and_then(|base| Ok((base, b.matrix(f).map_err(|e| e.to_string())?)))
                    .and_then(|(base, m)| yau_twist(&base, &m).map_err(|e| e.to_string()))
                    .and_then(|h| check_hom_novikov(&h.base, &h.twist).map_err(|e| e.to_string()));
                match r {
                    Ok(r) => report.check(id, &r.with_note(b.label())),
                    Err(e) => report.push(id, Status::Fail, e),
                }
            }
        }
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn run_verify(doc: &CatalogDocument, name: &Option<String>) -> Result<Outcome, String> {
    let mut report = Report::default();
    for a in selected(doc, name)? {
        transcription_skip(&mut report, a);
        for f in doc.families_of(&a.name) {
            let branches = match expand_branches(a, f) {
                Ok(b) => b,
                Err(e) => {
                    report.push(format!("{}/{}/branches", a.name, f.name), Status::Fail, e.to_string());
                    continue;
                }
            };
            for (k, b) in branches.iter().enumerate() {
                match verify_branch(a, f, b) {
                    Ok(checks) => {
                        for r in checks {
                            let id = branch_id(a, f, k, &r.check_id);
                            match (&f.meta.skip, r.check_id.as_str()) {
                                (Some(reason), "product") => report.push(id, Status::Skip, reason),
                                _ => report.check(id, &r.with_note(b.label())),
                            }
                        }
                    }
                    Err(e) => report.push(branch_id(a, f, k, "evaluation"), Status::Fail, e.to_string()),
                }
            }
        }
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn split_assignment(s: &str) -> Result<(&str, &str), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| format!("expected name=value, got `{s}`"))
}

fn run_twist(doc: &CatalogDocument, algebra: &str, morphism: &str, assign: &[String]) -> Result<Outcome, String> {
    let a = doc.algebra(algebra).ok_or_else(|| format!("no algebra named `{algebra}`"))?;
    let f = doc.family(morphism).ok_or_else(|| format!("no morphism family named `{morphism}`"))?;
    if f.algebra != a.name {
        return Err(format!("`{morphism}` is a family on `{}`, not `{algebra}`", f.algebra));
    }
    let mut point = BTreeMap::new();
    for item in assign {
        let (k, v) = split_assignment(item)?;
        if f.ring.symbol_index(k).is_none() {
            return Err(format!("`{k}` is not a parameter of `{morphism}`"));
        }
        let value = parse_scalar(&f.ring, v).map_err(|e| format!("value for `{k}`: {e}"))?;
        point.insert(k.to_string(), value);
    }
    let branches = expand_branches(a, f).map_err(|e| e.to_string())?;
    if branches.len() == 1 {
        for (k, v) in &branches[0].substitution {
            point.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
    let base = a.lift(&f.ring).and_then(|b| b.substitute(&point)).map_err(|e| e.to_string())?;
    let m = f.matrix.substitute(&point).map_err(|e| e.to_string())?;
    let mut report = Report::default();
    let h = match yau_twist(&base, &m) {
        Ok(h) => h,
        Err(e) => {
            let hint = if branches.len() > 1 {
                format!("{e}; the family has {} branches, pick one with --assign", branches.len())
            } else {
                e.to_string()
            };
            report.push(format!("{}/twist", f.name), Status::Fail, hint);
            return Ok(Outcome { text: String::new(), report: Some(report) });
        }
    };
    let name = format!("{}.twisted", f.name);
    let mut twisted = h.base.renamed(&name);
    twisted.meta = Meta { label: None, notes: vec![format!("product alpha o mu for {} on {}", f.name, a.name)], skip: None };
    let alpha = MorphismFamily {
        name: format!("{name}.alpha"),
        algebra: name.clone(),
        params: Vec::new(),
        ring: twisted.ring().clone(),
        matrix: h.twist.clone(),
        constraints: Vec::new(),
        expected: None,
        meta: Meta::default(),
    };
    let out = CatalogDocument { algebras: vec![twisted], families: vec![alpha] };
    let r = check_hom_novikov(&h.base, &h.twist).map_err(|e| e.to_string())?;
    report.check(format!("{}/twist", f.name), &r);
    Ok(Outcome { text: render_catalog(&out), report: Some(report) })
}

fn field_spec(a: &Algebra, prime: u64, i_residue: u64, assign: &[String]) -> Result<FieldSpec, String> {
    let mut spec = FieldSpec::new(prime).with_i(i_residue);
    for item in assign {
        let (k, v) = split_assignment(item)?;
        let v = u64::from_str(v).map_err(|_| format!("residue for `{k}` must be a nonnegative integer"))?;
        if !a.ring().params().iter().any(|p| p == k) {
            return Err(format!("`{k}` is not a parameter of `{}`", a.name));
        }
        spec = spec.assign(k, v);
    }
    if let Some(p) = a.ring().params().iter().find(|p| !spec.assignment.contains_key(*p)) {
        return Err(format!("parameter `{p}` needs a residue (--assign {p}=...)"));
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn run_enum(
    doc: &CatalogDocument,
    algebra: &str,
    spec_args: (u64, u64, &[String]),
    match_families: bool,
    exec: Execution,
) -> Result<Outcome, String> {
    let a = doc.algebra(algebra).ok_or_else(|| format!("no algebra named `{algebra}`"))?;
    let spec = field_spec(a, spec_args.0, spec_args.1, spec_args.2)?;
    let mut text = String::new();
    if !match_families {
        let found = enumerate_fp(a, &spec, exec).map_err(|e| e.to_string())?;
        for m in &found {
            text.push_str(&format_matrix(m));
            text.push('\n');
        }
        return Ok(Outcome { text, report: None });
    }
    let fams: Vec<&MorphismFamily> = doc.families_of(algebra).collect();
    let r = completeness(a, &fams, &spec, exec).map_err(|e| e.to_string())?;
    for m in &r.unmatched {
        text.push_str(&format!("unmatched {}\n", format_matrix(m)));
    }
    for m in &r.spurious {
        text.push_str(&format!("spurious {}\n", format_matrix(m)));
    }
    text.push_str(&format!("summary: {}\n", r.summary()));
    let mut report = Report::default();
    let id = format!("{}/completeness-F{}", a.name, spec.prime);
    let hard = a.dim() <= 2 || SPOT_ROWS.contains(&a.name.as_str());
    match (&a.meta.skip, r.outcome(hard)) {
        (Some(reason), _) => report.push(id, Status::Skip, reason),
        (None, CompletenessOutcome::Pass) => report.push(id, Status::Pass, r.summary()),
        (None, CompletenessOutcome::Fail(d)) => report.push(id, Status::Fail, d),
        (None, CompletenessOutcome::Skip(d)) => report.push(id, Status::Skip, d),
    }
    Ok(Outcome { text, report: Some(report) })
}

fn run_observations(doc: &CatalogDocument, exec: Execution) -> Result<Outcome, String> {
    if doc.algebra("N1").is_none() {
        return Err("observations need the two-dimensional catalog (--bundled dim2)".into());
    }
    let mut report = Report::default();
    for r in observation_suite(doc, exec) {
        report.check(r.check_id.clone(), &r);
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn run_poly(vars: usize, shift: &[String], dvar: usize, samples: usize, seed: u64) -> Result<Outcome, String> {
    if !(1..=2).contains(&vars) {
        return Err("--vars must be 1 or 2".into());
    }
    if shift.len() != vars {
        return Err(format!("--shift needs {vars} offsets, got {}", shift.len()));
    }
    if dvar == 0 || dvar > vars {
        return Err(format!("--dvar must be between 1 and {vars}"));
    }
    if samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    let offsets = shift
        .iter()
        .map(|s| Rational::from_str(s.trim()).map_err(|_| format!("bad shift offset `{s}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let endo = ShiftEndo::new(offsets);
    let i = dvar - 1;
    let mut report = Report::default();
    report.check("poly/hom-novikov", &check_hom_novikov_sampled(&endo, i, samples, seed));
    report.check("poly/general-triples", &check_hom_novikov_polys(&endo, i, 20, seed));
    report.check("poly/shift-commutes", &check_shift_commutes(&endo, i, 12));
    let control = check_sampled_variant(StarVariant::MisplacedTwist, &endo, i, samples, seed);
    let zero_shift = endo.offsets.iter().all(|c| *c == Rational::from_integer(0.into()));
    match (control.passed, zero_shift) {
        (false, _) => report.push("poly/negative-control", Status::Pass, format!("misplaced twist caught in {} of {samples} triples", control.failures)),
        // With no shift the two products coincide.
        (true, true) => report.push("poly/negative-control", Status::Skip, "zero shift, both products agree"),
        (true, false) => report.push("poly/negative-control", Status::Fail, "misplaced twist was not detected"),
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn run_nilpotent(m: usize) -> Result<Outcome, String> {
    if !(2..=8).contains(&m) {
        return Err("--truncation must be between 2 and 8".into());
    }
    let a = truncated_polynomial(m);
    let d = x2_derivation(m);
    let mut report = Report::default();
    let c = Checker::exact();
    let e = match exp_nilpotent_derivation(&a, &d) {
        Ok(e) => e,
        Err(err) => {
            report.push("nilpotent/exp", Status::Fail, err.to_string());
            return Ok(Outcome { text: String::new(), report: Some(report) });
        }
    };
    let fmt = |r: Result<hom_novikov::axioms::CheckReport, hom_novikov::axioms::CheckError>| {
        r.unwrap_or_else(|e| {
            hom_novikov::axioms::CheckReport::fail(
                "error",
                hom_novikov::axioms::Witness {
                    identity: "evaluation".into(),
                    indices: vec![],
                    defect: hom_novikov::axioms::Defect::Message(e.to_string()),
                },
            )
        })
    };
    report.check("nilpotent/exp-morphism", &fmt(c.multiplicative(&a, &e)).with_note(format!("E = {e}")));
    match e.determinant() {
        Ok(det) if !det.is_zero() => report.push("nilpotent/exp-invertible", Status::Pass, format!("det = {det}")),
        Ok(_) => report.push("nilpotent/exp-invertible", Status::Fail, "det = 0"),
        Err(err) => report.push("nilpotent/exp-invertible", Status::Fail, err.to_string()),
    }
    report.check("nilpotent/exp-commutes", &fmt(c.commuting(&e, &d)));
    match cor13_product(&a, &e, &d) {
        Ok(h) => report.check("nilpotent/cor13-hom-novikov", &fmt(c.hom_novikov(&h.base, &h.twist))),
        Err(err) => report.push("nilpotent/cor13-hom-novikov", Status::Fail, err.to_string()),
    }
    let euler = euler_derivation(m);
    let id = EndoMatrix::identity(a.ring(), m);
    match dorfman_gelfand_product(&a, &id, &euler) {
        Ok(h) => report.check("nilpotent/euler/identity", &fmt(c.hom_novikov(&h.base, &h.twist))),
        Err(err) => report.push("nilpotent/euler/identity", Status::Fail, err.to_string()),
    }
    // Graded scalings x^k -> t^k x^k and the augmentation onto constants all commute with x d/dx.
    let mut twists = Vec::new();
    for (num, den) in [(2, 1), (-1, 1), (1, 2), (0, 1)] {
        let t = Rational::new(num.into(), den.into());
        let mut alpha = EndoMatrix::zero(a.ring(), m);
        let mut power = Rational::from_integer(1.into());
        for k in 0..m {
            alpha.set(k, k, Scalar::from_rational(a.ring(), power.clone()));
            power *= &t;
        }
        let label = if num == 0 { "augmentation".to_string() } else { format!("scale({t})") };
        twists.push((label, alpha));
    }
    for (label, alpha) in twists {
        let id = format!("nilpotent/euler/{label}");
        match cor13_product(&a, &alpha, &euler) {
            Ok(h) => report.check(id, &fmt(c.hom_novikov(&h.base, &h.twist))),
            Err(err) => report.push(id, Status::Fail, err.to_string()),
        }
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn run_thm14(seed: u64, fp: usize, q: usize, exec: Execution) -> Result<Outcome, String> {
    let suite = thm14_suite(seed, fp, q, exec).map_err(|e| e.to_string())?;
    let mut report = Report::default();
    for o in &suite.outcomes {
        let field = match o.field {
            SampleField::Rationals => "Q".to_string(),
            SampleField::Prime(p) => format!("F{p}"),
        };
        let detail = format!(
            "left: product {} conditions {}; right: product {} conditions {}",
            o.left_product, o.left_conditions, o.right_product, o.right_conditions
        );
        let status = if o.consistent() { Status::Pass } else { Status::Fail };
        report.push(format!("thm14/{field}/{}", o.label), status, detail);
    }
    Ok(Outcome { text: String::new(), report: Some(report) })
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    let exec = exec(cli);
    match &cli.command {
        Command::Check { source, name } => run_check(&load(source)?.0, name),
        Command::Verify { source, name } => run_verify(&load(source)?.0, name),
        Command::Twist { source, algebra, morphism, assign } => run_twist(&load(source)?.0, algebra, morphism, assign),
        Command::EnumFp { source, algebra, prime, i_residue, assign, match_families } => {
            run_enum(&load(source)?.0, algebra, (*prime, *i_residue, assign), *match_families, exec)
        }
        Command::Observations { source } => run_observations(&load(source)?.0, exec),
        Command::Demo { demo: Demo::Poly { vars, shift, dvar, samples } } => {
            run_poly(*vars, shift, *dvar, *samples, cli.seed)
        }
        Command::Demo { demo: Demo::Nilpotent { truncation } } => run_nilpotent(*truncation),
        Command::Thm14 { fp_per_cell, q_per_cell } => run_thm14(cli.seed, *fp_per_cell, *q_per_cell, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let failed = outcome.report.as_ref().is_some_and(|r| r.failed());
    let written = out
        .write_all(outcome.text.as_bytes())
        .and_then(|_| match &mut outcome.report {
            Some(r) => r.write(&mut out, cli.format),
            None => Ok(()),
        })
        .and_then(|_| out.flush());
    if let Err(e) = written {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
