use std::io::Write;
use std::time::{Duration, Instant};

use genlag_core::suites::{run_suite, CheckRow, Suite, SuiteOptions};

struct Criterion {
    number: u32,
    name: &'static str,
    suites: &'static [Suite],
    time_limit: Option<Duration>,
}

const CRITERIA: [Criterion; 12] = [
    Criterion {
        number: 1,
        name: "eigen-equation",
        suites: &[Suite::Eigen],
        time_limit: Some(Duration::from_secs(10)),
    },
    Criterion {
        number: 2,
        name: "closed-forms",
        suites: &[Suite::Closed],
        time_limit: None,
    },
    Criterion {
        number: 3,
        name: "norms-orthogonality",
        suites: &[Suite::Norms, Suite::Gram],
        time_limit: Some(Duration::from_secs(60)),
    },
    Criterion {
        number: 4,
        name: "recurrences",
        suites: &[Suite::Recurrences],
        time_limit: None,
    },
    Criterion {
        number: 5,
        name: "moments",
        suites: &[Suite::Moments],
        time_limit: None,
    },
    Criterion {
        number: 6,
        name: "asymptotics",
        suites: &[Suite::Asymptotics],
        time_limit: None,
    },
    Criterion {
        number: 7,
        name: "g-transform",
        suites: &[Suite::Transform],
        time_limit: Some(Duration::from_secs(120)),
    },
    Criterion {
        number: 8,
        name: "involution",
        suites: &[Suite::Involution],
        time_limit: None,
    },
    Criterion {
        number: 9,
        name: "registry",
        suites: &[Suite::Registry],
        time_limit: None,
    },
    Criterion {
        number: 10,
        name: "rank-2",
        suites: &[Suite::Rank2],
        time_limit: None,
    },
    Criterion {
        number: 11,
        name: "monodromy",
        suites: &[Suite::Monodromy],
        time_limit: None,
    },
    Criterion {
        number: 12,
        name: "special-functions",
        suites: &[Suite::Substrate],
        time_limit: None,
    },
];

fn worst(rows: &[CheckRow]) -> Option<&CheckRow> {
    rows.iter().max_by(|a, b| {
        (a.residual / a.tol.max(f64::MIN_POSITIVE))
            .total_cmp(&(b.residual / b.tol.max(f64::MIN_POSITIVE)))
    })
}

#[test]
fn acceptance_criteria() {
    let opts = SuiteOptions::default();
    let mut log = std::io::stderr().lock();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let mut rows = Vec::new();
        let mut error = None;
        for s in c.suites {
            match run_suite(*s, &opts) {
                Ok(r) => rows.extend(r),
                Err(e) => error = Some(format!("{s}: {e}")),
            }
        }
        let elapsed = start.elapsed();
        let bad: Vec<&CheckRow> = rows.iter().filter(|r| !r.pass).collect();
        let in_time = c.time_limit.map_or(true, |t| elapsed <= t);
        let pass = error.is_none() && bad.is_empty() && !rows.is_empty() && in_time;
        let detail = match (&error, worst(&rows)) {
            (Some(e), _) => format!("error {e}"),
            (None, Some(w)) => format!(
                "worst {} [{}] residual {:.3e} tol {:.0e}",
                w.id, w.params, w.residual, w.tol
            ),
            (None, None) => "no rows".to_string(),
        };
        let limit = c
            .time_limit
            .map_or(String::new(), |t| format!(" limit {}s", t.as_secs()));
        writeln!(
            log,
            "criterion {:>2} {:<20} {}  rows {:>5} failed {:>3}  {:.2}s{}  {}",
            c.number,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            rows.len(),
            bad.len(),
            elapsed.as_secs_f64(),
            limit,
            detail
        )
        .expect("stderr is writable");
        for b in bad.iter().take(5) {
            writeln!(
                log,
                "    failing {} [{}] residual {:.3e} tol {:.0e}",
                b.id, b.params, b.residual, b.tol
            )
            .expect("stderr is writable");
        }
        if !pass {
            failed.push(c.number);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
