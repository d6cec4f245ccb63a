//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use levelring::verify::{run_check, CheckConfig, CheckReport, Status};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    hypothesis: usize,
    budget: usize,
}

impl Tally {
    fn of(reports: &[CheckReport]) -> Self {
        let mut t = Tally::default();
        for r in reports {
            match &r.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Skipped { reason } if reason == "budget" => t.budget += 1,
                Status::Skipped { .. } => t.hypothesis += 1,
            }
        }
        t
    }

    fn add(&mut self, other: Tally) {
        self.pass += other.pass;
        self.fail += other.fail;
        self.hypothesis += other.hypothesis;
        self.budget += other.budget;
    }

    fn describe(&self) -> String {
        format!(
            "{} pass, {} fail, {} skipped(hypothesis), {} skipped(budget)",
            self.pass, self.fail, self.hypothesis, self.budget
        )
    }
}

fn first_failure(reports: &[CheckReport]) -> Option<String> {
    reports.iter().find(|r| r.is_fail()).map(|r| {
        format!(
            " first failure: {} {} lhs={} rhs={} witness={}",
            r.name,
            serde_json::to_string(&r.params).unwrap(),
            r.lhs,
            r.rhs,
            r.witness.as_ref().map_or("-".into(), |w| w.to_string())
        )
    })
}

fn sweep(names: &[&str], cfg: &CheckConfig, min_pass: usize, allow_budget: bool) -> Outcome {
    let mut tally = Tally::default();
    let mut failure = None;
    for name in names {
        match run_check(name, cfg) {
            Ok(reports) => {
                failure = failure.or_else(|| first_failure(&reports));
                tally.add(Tally::of(&reports));
            }
            Err(e) => {
                return Outcome { pass: false, detail: format!("{name}: error {e}") };
            }
        }
    }
    let pass = tally.fail == 0 && tally.pass >= min_pass && (allow_budget || tally.budget == 0);
    let mut detail = tally.describe();
    if let Some(f) = failure {
        detail.push_str(&f);
    }
    Outcome { pass, detail }
}

fn defaults() -> CheckConfig {
    CheckConfig::default()
}

fn ac1() -> Outcome {
    sweep(&["f2"], &defaults(), 1, false)
}

fn ac2() -> Outcome {
    // p in {2,3}, k in 1..=3
    sweep(&["cyclic"], &CheckConfig { max_order: 27, ..defaults() }, 6, false)
}

fn ac3() -> Outcome {
    sweep(&["fiber-rank"], &CheckConfig { max_order: 64, ..defaults() }, 1, true)
}

fn ac4() -> Outcome {
    sweep(&["bijection"], &CheckConfig { max_order: 16, ..defaults() }, 1, false)
}

fn ac5() -> Outcome {
    sweep(&["fdecomp"], &CheckConfig { max_order: 64, ..defaults() }, 1, false)
}

fn ac6() -> Outcome {
    sweep(&["localize", "vandermonde"], &CheckConfig { max_order: 32, ..defaults() }, 3, false)
}

fn ac7() -> Outcome {
    sweep(&["honda", "fiber-dim"], &defaults(), 4, false)
}

fn ac8() -> Outcome {
    sweep(&["oracle"], &CheckConfig { max_order: 16, ..defaults() }, 1, false)
}

fn ac9() -> Outcome {
    sweep(&["square"], &CheckConfig { max_order: 32, ..defaults() }, 1, false)
}

fn main() {
    let criteria: [(&str, &str, Duration, fn() -> Outcome); 9] = [
        ("AC1", "F2 example: quotient order 2, factors [2], (x+2,y+2,xy+x+y+2)=(2,x,y)", Duration::from_secs(1), ac1),
        ("AC2", "cyclic ideals (<p^k>(x)), free rank p^(k-1)(p-1), p in {2,3}, k<=3", Duration::from_secs(5), ac2),
        ("AC3", "height-one rank identity per f and in total, |A|<=64, h in {1,2}", Duration::from_secs(600), ac3),
        ("AC4", "explicit bijection of surviving pairs with injective duals, |A|<=16, n+h<=3", Duration::from_secs(60), ac4),
        ("AC5", "invariant-factor multiplicativity over split (A,f), |A|<=64", Duration::from_secs(600), ac5),
        ("AC6", "rational dimension = localization dimension, |A|<=32; vandermonde vanishing", Duration::from_secs(600), ac6),
        ("AC7", "Honda law axioms and [p^k], fiber dimension |A|^n", Duration::from_secs(120), ac7),
        ("AC8", "transfer ideals agree with the induction oracle, |A|<=16", Duration::from_secs(600), ac8),
        ("AC9", "monotypicity and im into constrained subgroup points, |A|<=32", Duration::from_secs(600), ac9),
    ];
    let mut failed = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let ok = out.pass && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "{id} {} {title} [{}] ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", 9 - failed, 9);
    if failed > 0 {
        std::process::exit(1);
    }
}
