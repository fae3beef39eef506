//! One line per acceptance criterion. Runs as a plain binary so every line
//! shows up in `cargo test` output; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use nodal::suite::{
    coherence_checks, gamma_checks, identity_checks, invariant_checks, lattice_checks, ll_checks, primitive_checks,
    pullback_checks, Check, SuiteConfig,
};

struct Outcome {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    time_limit: Option<Duration>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.time_limit.is_none_or(|t| self.elapsed <= t)
    }

    fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "criterion {} [{}]: {} ({} checks, {:.1} s",
            self.id,
            self.title,
            status,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        );
        if let Some(t) = self.time_limit {
            s.push_str(&format!(" of {} s allowed", t.as_secs()));
        }
        s.push(')');
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:.3e} vs {:.0e}", c.name, c.residual, c.threshold))
            .collect();
        if !failed.is_empty() {
            s.push_str(&format!("; failing: {}", failed.join(", ")));
        }
        s
    }
}

fn timed(id: u32, title: &'static str, limit: Option<u64>, f: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let checks = f();
    Outcome { id, title, checks, elapsed: start.elapsed(), time_limit: limit.map(Duration::from_secs) }
}

fn with_samples(n: usize) -> SuiteConfig {
    SuiteConfig { samples: n, seed: 2024, ..SuiteConfig::default() }
}

fn main() {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let outcomes = vec![
        timed(1, "identity suite", Some(60), || single.install(|| identity_checks(&with_samples(100)))),
        timed(2, "primitive-form decompositions", None, || primitive_checks(&with_samples(50))),
        timed(3, "Frobenius coherence", None, || {
            let cfg = with_samples(50);
            let mut c = coherence_checks(&cfg);
            c.extend(pullback_checks(&cfg));
            c
        }),
        timed(4, "exact lattice suite", None, || lattice_checks().expect("lattice checks evaluate")),
        timed(5, "Chevalley and invariance", None, || invariant_checks(&with_samples(100))),
        timed(6, "Lyashko-Looijenga round trip", None, || ll_checks(&with_samples(20))),
        timed(7, "Gamma suite", Some(120), || match gamma_checks(&with_samples(1)) {
            Ok((c, _)) => c,
            Err(e) => vec![Check::below(format!("gamma/error: {e}"), f64::INFINITY, 0.0, "")],
        }),
    ];
    let mut all = true;
    for o in &outcomes {
        println!("{}", o.line());
        all &= o.passed();
    }
    if !all {
        std::process::exit(1);
    }
}
