//! The acceptance criteria, run exactly and in order. Prints one PASS/FAIL
//! line per criterion and exits nonzero if any criterion fails, including by
//! exceeding its time budget.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use forcelab::{Record, Report};
use forcelab_core::order::Preorder;
use forcelab_core::suite::{
    approachability, atomic_equivalence, boolean_values, collapse_instances, completion_iso,
    fo_exhaustive, fo_sampled, friedman_iso, nu_mu_contract, preorder_suite, quotient_transfer,
    truth_lemma, two_step_generics, varphi_star, SuiteOutcome,
};

const SEED: u64 = 0;
const SUITE_SIZE: usize = 200;
const NAME_RANK: u32 = 2;
const FORMULAS_PER_POSET: usize = 3;

struct Criterion {
    number: usize,
    title: &'static str,
    budget: Duration,
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl From<SuiteOutcome> for Outcome {
    fn from(o: SuiteOutcome) -> Outcome {
        match o.failure {
            None => Outcome {
                passed: true,
                detail: format!("{} comparisons", o.checked),
            },
            Some(f) => Outcome {
                passed: false,
                detail: format!("after {} comparisons: {f}", o.checked),
            },
        }
    }
}

fn combine(parts: Vec<(&str, SuiteOutcome)>) -> Outcome {
    let mut details = Vec::new();
    for (label, o) in parts {
        if let Some(f) = o.failure {
            return Outcome {
                passed: false,
                detail: format!("{label}: {f}"),
            };
        }
        details.push(format!("{label} {} comparisons", o.checked));
    }
    Outcome {
        passed: true,
        detail: details.join(", "),
    }
}

fn two_step_all_pairs(posets: &[Preorder]) -> SuiteOutcome {
    let per_base: Vec<SuiteOutcome> = posets
        .par_iter()
        .map(|base| two_step_generics(std::slice::from_ref(base), posets))
        .collect();
    let mut total = SuiteOutcome {
        suite: "two-step",
        checked: 0,
        failure: None,
    };
    for o in per_base {
        total.checked += o.checked;
        if o.failure.is_some() {
            total.failure = o.failure;
            break;
        }
    }
    total
}

fn scenario_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("bundled scenarios")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "forcelab"))
        .collect();
    files.sort();
    files
}

fn forcelab(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_forcelab"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

fn corpus_determinism() -> Outcome {
    let files = scenario_files();
    let mut records = 0;
    for file in &files {
        let path = file.to_str().expect("utf-8 path");
        let seed = SEED.to_string();
        let (first, code) = forcelab(&["run", "--scenario", path, "--seed", &seed]);
        let (second, code2) = forcelab(&["run", "--scenario", path, "--seed", &seed]);
        let fail = |msg: String| Outcome {
            passed: false,
            detail: format!("{}: {msg}", file.display()),
        };
        if !matches!(code, Some(0 | 1)) || code != code2 {
            return fail(format!("exit codes {code:?} and {code2:?}"));
        }
        if first != second {
            return fail("text reports differ between runs".into());
        }
        let (jsonl, _) = forcelab(&[
            "run",
            "--scenario",
            path,
            "--seed",
            &seed,
            "--format",
            "jsonl",
        ]);
        let text = String::from_utf8(first).expect("utf-8 report");
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        let parsed: Result<Vec<Record>, _> = String::from_utf8(jsonl)
            .expect("utf-8 report")
            .lines()
            .map(serde_json::from_str)
            .collect();
        let parsed = match parsed {
            Ok(p) => p,
            Err(e) => return fail(format!("bad jsonl: {e}")),
        };
        if parsed.len() != lines.len() {
            return fail(format!(
                "{} jsonl records against {} text lines",
                parsed.len(),
                lines.len()
            ));
        }
        if let Some((r, l)) = parsed
            .iter()
            .zip(&lines)
            .find(|(r, l)| r.text_line() != **l)
        {
            return fail(format!(
                "jsonl {} renders as {:?}, text has {l:?}",
                r.id,
                r.text_line()
            ));
        }
        records += lines.len();
    }
    // the library agrees with the binary
    let flags = forcelab::Flags {
        seed: SEED,
        ..Default::default()
    };
    for file in &files {
        let report: Report =
            forcelab::run(&forcelab::load_file(file, &flags).expect("bundled scenario loads"));
        let (text, _) = forcelab(&["run", "--scenario", file.to_str().expect("utf-8 path")]);
        if report.to_text().as_bytes() != text {
            return Outcome {
                passed: false,
                detail: format!("{}: library and binary reports differ", file.display()),
            };
        }
    }
    Outcome {
        passed: true,
        detail: format!("{} scenarios, {records} records", files.len()),
    }
}

fn main() {
    let posets = preorder_suite(SUITE_SIZE, SEED);
    let small = posets.iter().filter(|p| p.len() <= 3).count();
    println!(
        "acceptance: {} preorders ({small} on at most three conditions), name rank {NAME_RANK}",
        posets.len()
    );

    let criteria: Vec<(Criterion, Box<dyn Fn() -> Outcome>)> = vec![
        (
            Criterion {
                number: 1,
                title: "atomic forcing equivalence",
                budget: Duration::from_secs(60),
            },
            Box::new(|| atomic_equivalence(&posets, NAME_RANK, SEED).into()),
        ),
        (
            Criterion {
                number: 2,
                title: "finite truth lemma",
                budget: Duration::from_secs(30),
            },
            Box::new(|| truth_lemma(&posets, NAME_RANK, SEED).into()),
        ),
        (
            Criterion {
                number: 3,
                title: "nu/mu contract",
                budget: Duration::from_secs(60),
            },
            Box::new(|| {
                let mut o: Outcome =
                    nu_mu_contract(&posets, FORMULAS_PER_POSET, NAME_RANK, SEED).into();
                o.detail = format!(
                    "{} formulas, {}",
                    posets.len() * FORMULAS_PER_POSET,
                    o.detail
                );
                o
            }),
        ),
        (
            Criterion {
                number: 4,
                title: "Boolean values",
                budget: Duration::from_secs(30),
            },
            Box::new(|| boolean_values(&posets, NAME_RANK, SEED).into()),
        ),
        (
            Criterion {
                number: 5,
                title: "completions",
                budget: Duration::from_secs(30),
            },
            Box::new(|| completion_iso(&posets).into()),
        ),
        (
            Criterion {
                number: 6,
                title: "approachability of collapses",
                budget: Duration::from_secs(60),
            },
            Box::new(|| approachability(&collapse_instances()).into()),
        ),
        (
            Criterion {
                number: 7,
                title: "graph-coding decoding over 20 seeds",
                budget: Duration::from_secs(30),
            },
            Box::new(|| friedman_iso(3, 4, 0..20).into()),
        ),
        (
            Criterion {
                number: 8,
                title: "translated formulas",
                budget: Duration::from_secs(120),
            },
            Box::new(|| {
                let exhaustive = fo_exhaustive();
                let sampled = fo_sampled(20, SEED);
                let mut o = combine(vec![
                    ("exhaustive on stage 2", varphi_star(2, &exhaustive)),
                    ("sampled on stage 3", varphi_star(3, &sampled)),
                ]);
                o.detail = format!(
                    "{} + {} formulas, {}",
                    exhaustive.len(),
                    sampled.len(),
                    o.detail
                );
                if sampled.len() < 50 {
                    o.passed = false;
                }
                o
            }),
        ),
        (
            Criterion {
                number: 9,
                title: "two-step iteration over all pairs",
                budget: Duration::from_secs(30),
            },
            Box::new(|| two_step_all_pairs(&posets).into()),
        ),
        (
            Criterion {
                number: 10,
                title: "quotient transfer",
                budget: Duration::from_secs(30),
            },
            Box::new(|| quotient_transfer(&posets, NAME_RANK, SEED).into()),
        ),
        (
            Criterion {
                number: 11,
                title: "report determinism",
                budget: Duration::from_secs(10),
            },
            Box::new(corpus_determinism),
        ),
    ];

    let mut failed = 0;
    for (c, check) in &criteria {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if elapsed > c.budget {
            outcome.passed = false;
            outcome.detail = format!("over budget; {}", outcome.detail);
        }
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:>2} {}: {} [{:.2} s of {} s]",
            c.number,
            c.title,
            outcome.detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        failed += usize::from(!outcome.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
