//! End-to-end acceptance run. Every criterion prints one line; the test fails
//! afterwards if any criterion failed, so all lines are always produced.

use std::collections::BTreeSet;
use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use hom_novikov::catalog::{bundled, parse_catalog, render_catalog};
use hom_novikov::morphisms::expand_branches;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM2: [&str; 9] = ["T1", "T2", "T3", "N1", "N2", "N3", "N4", "N5", "N6"];

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    elapsed: Duration,
}

fn hnl(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hnl")).args(args).output().expect("spawn hnl");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed: start.elapsed(),
    }
}

struct Line {
    id: String,
    status: String,
    detail: String,
}

fn results(stdout: &str) -> Vec<Line> {
    stdout
        .lines()
        .filter_map(|l| l.strip_prefix("RESULT\t"))
        .map(|l| {
            let mut parts = l.splitn(3, '\t');
            Line {
                id: parts.next().unwrap_or_default().into(),
                status: parts.next().unwrap_or_default().into(),
                detail: parts.next().unwrap_or_default().into(),
            }
        })
        .collect()
}

fn tsv(args: &[&str]) -> (Run, Vec<Line>) {
    let mut full = args.to_vec();
    full.extend(["--format", "tsv"]);
    let run = hnl(&full);
    let lines = results(&run.stdout);
    (run, lines)
}

type Outcome = Result<String, String>;

fn first_failure(lines: &[Line]) -> Option<String> {
    lines.iter().find(|l| l.status == "FAIL").map(|l| format!("{}: {}", l.id, l.detail))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut names = BTreeSet::new();
    for cat in ["dim2", "dim3"] {
        let (run, lines) = tsv(&["check", "--bundled", cat]);
        if run.code != 0 {
            return Err(format!("check {cat} exited {}", run.code));
        }
        for l in lines.iter().filter(|l| l.id.ends_with("/novikov")) {
            if l.status != "PASS" {
                return Err(format!("{}: {}", l.id, l.detail));
            }
            names.insert(l.id.trim_end_matches("/novikov").to_string());
        }
    }
    let mut expected: BTreeSet<String> = DIM2.iter().map(|s| s.to_string()).collect();
    for (prefix, lo, hi) in [("A", 1, 13), ("B", 0, 5), ("C", 1, 19), ("D", 1, 6), ("E", 1, 1)] {
        expected.extend((lo..=hi).map(|k| format!("{prefix}{k}")));
    }
    if names != expected {
        let missing: Vec<_> = expected.difference(&names).collect();
        return Err(format!("algebras missing from the check run: {missing:?}"));
    }
    let t = start.elapsed();
    if t > Duration::from_secs(10) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{} algebras Novikov, exact, {:.2?}", names.len(), t))
}

fn branch_prefixes(lines: &[Line], algebra: &str) -> BTreeSet<String> {
    lines
        .iter()
        .filter(|l| l.id.starts_with(&format!("{algebra}/")))
        .filter_map(|l| l.id.rsplit_once('/').map(|(p, _)| p.to_string()))
        .filter(|p| p.matches('/').count() == 2)
        .collect()
}

fn criterion_2() -> Outcome {
    let (run, lines) = tsv(&["verify", "--bundled", "dim2"]);
    if let Some(f) = first_failure(&lines) {
        return Err(f);
    }
    if run.code != 0 || lines.iter().any(|l| l.status != "PASS") {
        return Err(format!("exit {} or non-PASS line", run.code));
    }
    let doc = bundled("dim2").unwrap();
    for f in &doc.families {
        for check in ["multiplicative", "product", "lemma21"] {
            if !lines.iter().any(|l| l.id.starts_with(&format!("{}/{}/", f.algebra, f.name)) && l.id.ends_with(check)) {
                return Err(format!("{} has no {check} line", f.name));
            }
        }
    }
    let n1 = branch_prefixes(&lines, "N1").len();
    if n1 != 9 {
        return Err(format!("N1 expands to {n1} branches"));
    }
    Ok(format!("{} checks PASS, N1 has 9 branches", lines.len()))
}

fn criterion_3() -> Outcome {
    let (run, lines) = tsv(&["verify", "--bundled", "dim3"]);
    if let Some(f) = first_failure(&lines) {
        return Err(f);
    }
    if run.code != 0 {
        return Err(format!("exit {}", run.code));
    }
    let skips: Vec<&Line> = lines.iter().filter(|l| l.status == "SKIP").collect();
    if let Some(s) = skips.iter().find(|l| l.detail.trim().is_empty()) {
        return Err(format!("{} is skipped without a reason", s.id));
    }
    let pass = lines.iter().filter(|l| l.status == "PASS").count();
    Ok(format!("{pass} PASS, 0 FAIL, {} annotated SKIP", skips.len()))
}

fn criterion_4() -> Outcome {
    let mut problems = Vec::new();
    let mut n1 = None;
    let mut slowest = Duration::ZERO;
    for a in DIM2 {
        let lambdas: &[&str] = if a == "N6" { &["lambda=2", "lambda=3"] } else { &[""] };
        for assign in lambdas {
            let mut args = vec!["enum-fp", "--bundled", "dim2", "--algebra", a, "--prime", "5", "--i-residue", "2", "--match"];
            if !assign.is_empty() {
                args.extend(["--assign", assign]);
            }
            let (run, lines) = tsv(&args);
            slowest = slowest.max(run.elapsed);
            if run.elapsed > Duration::from_secs(5) {
                problems.push(format!("{a} took {:?}", run.elapsed));
            }
            match lines.first() {
                Some(l) if l.status == "PASS" && run.code == 0 => {
                    if a == "N1" {
                        n1 = Some(l.detail.clone());
                    }
                }
                Some(l) => problems.push(format!("{a} {assign}: {}", l.detail).trim_end().to_string()),
                None => problems.push(format!("{a}: no result (exit {}, {})", run.code, run.stderr.trim())),
            }
        }
    }
    match n1.as_deref() {
        Some(d) if d.starts_with("9 morphisms, 9 matched, 0 unmatched") => {}
        other => problems.push(format!("N1 summary {other:?}")),
    }
    if problems.is_empty() {
        Ok(format!("9 algebras agree over F_5, N1 = 9, slowest {slowest:.2?}"))
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_5() -> Outcome {
    let (run, lines) = tsv(&["observations", "--bundled", "dim2"]);
    let ids: Vec<&str> = lines.iter().map(|l| l.id.as_str()).collect();
    let expected: Vec<String> = (1..=6).map(|k| format!("observation-{k}")).collect();
    if ids != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(format!("observation ids {ids:?}"));
    }
    match first_failure(&lines) {
        Some(f) => Err(f),
        None if run.code == 0 => Ok("observations 1-6 PASS".into()),
        None => Err(format!("exit {}", run.code)),
    }
}

fn criterion_6() -> Outcome {
    let mut twists = 0;
    for cat in ["dim2", "dim3"] {
        let (_, lines) = tsv(&["check", "--bundled", cat]);
        let doc = bundled(cat).unwrap();
        let mut expected = 0;
        for f in &doc.families {
            expected += expand_branches(doc.algebra(&f.algebra).unwrap(), f).map_err(|e| e.to_string())?.len();
        }
        let hn: Vec<&Line> = lines.iter().filter(|l| l.id.ends_with("/hom-novikov")).collect();
        if let Some(l) = hn.iter().find(|l| l.status != "PASS") {
            return Err(format!("{}: {}", l.id, l.detail));
        }
        if hn.len() != expected {
            return Err(format!("{cat}: {} twist checks for {expected} branches", hn.len()));
        }
        twists += hn.len();
    }
    Ok(format!("{twists} (algebra, branch) twists Hom-Novikov"))
}

fn criterion_7() -> Outcome {
    let wanted = [
        "nilpotent/exp-morphism",
        "nilpotent/exp-invertible",
        "nilpotent/exp-commutes",
        "nilpotent/cor13-hom-novikov",
        "nilpotent/euler/identity",
    ];
    let mut total = 0;
    for m in ["5", "4"] {
        let (run, lines) = tsv(&["demo", "nilpotent", "--truncation", m]);
        if let Some(f) = first_failure(&lines) {
            return Err(format!("x^{m}: {f}"));
        }
        for w in wanted {
            if !lines.iter().any(|l| l.id == w && l.status == "PASS") {
                return Err(format!("x^{m}: {w} missing"));
            }
        }
        if run.code != 0 {
            return Err(format!("x^{m}: exit {}", run.code));
        }
        total += lines.len();
    }
    Ok(format!("{total} checks on Q[x]/(x^5) and Q[x]/(x^4) PASS"))
}

fn criterion_8() -> Outcome {
    let (run, lines) = tsv(&["thm14", "--seed", "0"]);
    let fp = lines.iter().filter(|l| l.id.starts_with("thm14/F7/")).count();
    let q = lines.iter().filter(|l| l.id.starts_with("thm14/Q/")).count();
    if fp < 200 || q < 20 {
        return Err(format!("only {fp} F_7 and {q} Q samples"));
    }
    if let Some(f) = first_failure(&lines) {
        return Err(format!("mismatch {f}"));
    }
    let sl2 = lines.iter().find(|l| l.id == "thm14/Q/sl2/id/f=id").ok_or("sl2 with f = id missing")?;
    if sl2.detail != "left: product false conditions false; right: product false conditions false" {
        return Err(format!("sl2 f = id: {}", sl2.detail));
    }
    if run.code != 0 {
        return Err(format!("exit {}", run.code));
    }
    Ok(format!("{fp} F_7 + {q} Q samples, 0 mismatches, sl2/f=id fails both sides"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cases: [&[&str]; 2] = [
        &["demo", "poly", "--vars", "1", "--shift", "1", "--dvar", "1", "--samples", "100"],
        &["demo", "poly", "--vars", "2", "--shift", "1,-1", "--dvar", "2", "--samples", "100"],
    ];
    for args in cases {
        let (run, lines) = tsv(args);
        if let Some(f) = first_failure(&lines) {
            return Err(f);
        }
        if run.code != 0 || !lines.iter().any(|l| l.id == "poly/hom-novikov" && l.detail.starts_with("100 ")) {
            return Err(format!("{args:?}: exit {}", run.code));
        }
    }
    for c in ["-1", "1", "2"] {
        let (_, lines) = tsv(&["demo", "poly", "--vars", "1", "--shift", c, "--samples", "1"]);
        if !lines.iter().any(|l| l.id == "poly/shift-commutes" && l.status == "PASS") {
            return Err(format!("D alpha = alpha D fails for c = {c}"));
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(5) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("100 samples for n=1 and n=2 PASS, D alpha = alpha D to degree 12, {t:.2?}"))
}

const MALFORMED: [&str; 20] = [
    "algebra A dim=2 {\n  e1*e1 = e1;\n",
    "algebra A dim=0 {\n}\n",
    "algebra A dim=2 {\n  e1*e3 = e1;\n}\n",
    "algebra A dim=2 {\n  e1*e1 = e1\n}\n",
    "algebra A dim=2 {\n  e1*e1 = 2*e1 + ;\n}\n",
    "algebra A dim=2 {\n  e1*e1 = e1;\n  e1*e1 = e2;\n}\n",
    "algebra A dim=2 params=(lambda, lambda) {\n}\n",
    "algebra A dim=2 {\n  e1*e1 = mu*e1;\n}\n",
    "algebra A dim=2 {\n}\nalgebra A dim=2 {\n}\n",
    "morphism f on B {\n  alpha(e1) = e1;\n}\n",
    "algebra A dim=2 {\n}\nmorphism f on A {\n  alpha(e3) = e1;\n}\n",
    "algebra A dim=2 {\n}\nmorphism f on A {\n  alpha(e1) = e1;\n  alpha(e1) = e2;\n}\n",
    "algebra A dim=2 {\n  e1*e1 = 1/0*e1;\n}\n",
    "algebra A dim=2 label=\"open {\n}\n",
    "algebra A dim=x {\n}\n",
    "algebra A dim=2 forbid=(mu = 0) {\n}\n",
    "algebra A dim=2 {\n}\nmorphism f on A roots=(s^2 = t) {\n}\n",
    "algebra A dim=2 {\n  e1 @ e1 = e1;\n}\n",
    "algebra A {\n}\n",
    "algebra A dim=2 params=(i) {\n}\n",
];

const FUZZ_ALPHABET: &[char] = &[
    'e', '1', '2', '3', '9', '*', '+', '-', '/', '^', '(', ')', '{', '}', ';', '=', ' ', '\n', '"', '\\', 'i', 'a',
    'l', 'm', 'b', 'd', '0', ',', '.', '#', 'λ', '\u{0}', '\t',
];

const FUZZ_TOKENS: &[&str] = &[
    "algebra ", "morphism ", " on ", "dim=", "params=(", "roots=(", "require=(", "forbid=(", " in {", "expect {",
    "alpha(e1) = ", "e1*e2 = ", "lambda", "^-1", "^99999999999999999999", "1/0", "((((((((((((((((", "label=\"",
    "note=\"", "skip=\"",
];

fn mutate(rng: &mut ChaCha8Rng, seeds: &[Vec<char>]) -> String {
    let base = &seeds[rng.gen_range(0..seeds.len())];
    let (start, len, edits) = if rng.gen_bool(0.5) {
        // Whole algebra blocks with their families, lightly edited, so that
        // many cases get past the first few tokens.
        let starts: Vec<usize> = (0..base.len())
            .filter(|&k| (k == 0 || base[k - 1] == '\n') && base[k..].starts_with(&['a', 'l', 'g', 'e', 'b', 'r', 'a']))
            .chain([base.len()])
            .collect();
        let b = rng.gen_range(0..starts.len() - 1);
        let e = (b + rng.gen_range(1..=3)).min(starts.len() - 1);
        (starts[b], starts[e] - starts[b], rng.gen_range(0..3))
    } else {
        let start = rng.gen_range(0..base.len());
        (start, rng.gen_range(0..=1500.min(base.len() - start)), rng.gen_range(0..12))
    };
    let mut text: Vec<char> = base[start..start + len].to_vec();
    for _ in 0..edits {
        let at = rng.gen_range(0..=text.len());
        match rng.gen_range(0..5) {
            0 if !text.is_empty() => {
                let k = rng.gen_range(0..text.len());
                text[k] = FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())];
            }
            1 if at < text.len() => {
                let end = (at + rng.gen_range(1..20)).min(text.len());
                text.drain(at..end);
            }
            2 => {
                let tok = FUZZ_TOKENS[rng.gen_range(0..FUZZ_TOKENS.len())];
                text.splice(at..at, tok.chars());
            }
            3 => {
                let c = char::from_u32(rng.gen_range(0..0x3000)).unwrap_or('?');
                text.insert(at, c);
            }
            _ => {
                let n = rng.gen_range(1..200);
                let c = ['(', '{', '-', '^'][rng.gen_range(0..4)];
                text.splice(at..at, std::iter::repeat_n(c, n));
            }
        }
    }
    let mut s: String = text.into_iter().collect();
    while s.len() > 4096 {
        s.pop();
    }
    s
}

fn criterion_10() -> Outcome {
    for cat in ["dim2", "dim3"] {
        let doc = bundled(cat).unwrap();
        let text = render_catalog(&doc);
        let again = parse_catalog(&text).map_err(|e| format!("{cat} re-parse: {e}"))?;
        if again != doc || render_catalog(&again) != text {
            return Err(format!("{cat} does not round-trip"));
        }
    }
    let twisted = hnl(&["twist", "--bundled", "dim2", "--algebra", "T2", "--morphism", "T2.f1", "--assign", "a1=2,a2=3"]);
    let body = twisted.stdout.lines().take_while(|l| !l.starts_with("PASS") && !l.starts_with("FAIL")).collect::<Vec<_>>();
    parse_catalog(&body.join("\n")).map_err(|e| format!("twist output does not parse: {e}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (k, text) in MALFORMED.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.hnov"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let run = hnl(&["check", path.to_str().unwrap()]);
        let positioned = run.stderr.contains(", column ") && run.stderr.contains("line ");
        if run.code != 2 || !positioned {
            return Err(format!("malformed input {k}: exit {}, stderr {:?}", run.code, run.stderr.trim()));
        }
    }

    let seeds: Vec<Vec<char>> = ["dim2", "dim3"].iter().map(|c| render_catalog(&bundled(c).unwrap()).chars().collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let inputs: Vec<String> = (0..10_000).map(|_| mutate(&mut rng, &seeds)).collect();
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut panics = Vec::new();
    let mut accepted = 0;
    for (k, text) in inputs.iter().enumerate() {
        match panic::catch_unwind(|| parse_catalog(text).is_ok()) {
            Ok(ok) => accepted += ok as usize,
            Err(_) => panics.push(k),
        }
    }
    panic::set_hook(hook);
    if !panics.is_empty() {
        return Err(format!("{} fuzz inputs panicked, first case {}: {:?}", panics.len(), panics[0], inputs[panics[0]]));
    }
    Ok(format!("round trip stable, 20 malformed inputs exit 2 with positions, 10000 fuzz cases without panic ({accepted} parsed)"))
}

/// Every report-producing command of the suite, as tsv.
fn full_suite(extra: &[&str]) -> String {
    let mut commands: Vec<Vec<&str>> = vec![
        vec!["check", "--bundled", "dim2"],
        vec!["check", "--bundled", "dim3"],
        vec!["verify", "--bundled", "dim2"],
        vec!["verify", "--bundled", "dim3"],
        vec!["observations", "--bundled", "dim2"],
        vec!["demo", "poly", "--vars", "1", "--shift", "1", "--samples", "100"],
        vec!["demo", "poly", "--vars", "2", "--shift", "1,-1", "--dvar", "2", "--samples", "100"],
        vec!["demo", "nilpotent", "--truncation", "5"],
        vec!["demo", "nilpotent", "--truncation", "4"],
        vec!["thm14"],
    ];
    for a in DIM2 {
        let mut c = vec!["enum-fp", "--bundled", "dim2", "--algebra", a, "--match"];
        if a == "N6" {
            c.extend(["--assign", "lambda=2"]);
        }
        commands.push(c);
    }
    let dim3 = bundled("dim3").unwrap();
    let assigns: Vec<(&str, String)> = ["A2", "A4", "A8", "C3", "D1", "E1"]
        .iter()
        .map(|a| (*a, dim3.algebra(a).unwrap().ring().params().iter().map(|p| format!("{p}=2")).collect::<Vec<_>>().join(",")))
        .collect();
    for (a, assign) in &assigns {
        let mut c = vec!["enum-fp", "--bundled", "dim3", "--algebra", a, "--match"];
        if !assign.is_empty() {
            c.extend(["--assign", assign.as_str()]);
        }
        commands.push(c);
    }
    let mut out = String::new();
    for mut c in commands {
        c.extend(["--seed", "0"]);
        c.extend(extra);
        let (run, _) = tsv(&c);
        out.push_str(&format!("# {} -> {}\n", c.join(" "), run.code));
        out.push_str(&run.stdout);
    }
    out
}

fn criterion_11() -> Outcome {
    let first = full_suite(&[]);
    let second = full_suite(&[]);
    if first != second {
        return Err("two runs differ".into());
    }
    let sequential = full_suite(&["--sequential"]).replace(" --sequential", "");
    if sequential != first {
        return Err("sequential and parallel runs differ".into());
    }
    Ok(format!("{} report bytes identical across runs and execution modes", first.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = Vec::new();
    for (n, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {n}: PASS  {detail}"),
            Err(detail) => {
                println!("criterion {n}: FAIL  {detail}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
