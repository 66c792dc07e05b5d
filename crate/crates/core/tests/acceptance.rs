//! Acceptance gate: runs every criterion at full scale and prints one
//! PASS/FAIL line each. Numeric arguments select a subset, e.g.
//! `cargo test --test acceptance -- 3 7`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rough_chaos::experiments::{constants, fclt, lift, moment, rde_demo, third_order, young_check, Report};
use rough_chaos::Result;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Result<Report>,
}

fn golden() -> young_check::TowghiGolden {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/towghi_golden.json");
    let text = std::fs::read_to_string(path).expect("golden fixture");
    serde_json::from_str(&text).expect("golden fixture format")
}

fn fclt_part(part: fclt::Part) -> Result<Report> {
    fclt::run(&fclt::Params {
        parts: vec![part],
        ..fclt::Params::default()
    })
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            title: "Brownian anchor of the limit constants",
            limit: secs(1),
            run: || {
                constants::run(&constants::Params {
                    hs: vec![0.5],
                    ..constants::Params::default()
                })
            },
        },
        Criterion {
            id: 2,
            title: "identity C^2 = sigma_tilde^2 - sigma^2/4",
            limit: secs(30),
            run: || {
                constants::run(&constants::Params {
                    hs: vec![0.35, 0.4, 0.45],
                    ..constants::Params::default()
                })
            },
        },
        Criterion {
            id: 3,
            title: "Lévy-area second moment against the iterated covariance",
            limit: secs(120),
            run: || lift::run(&lift::Params::default()),
        },
        Criterion {
            id: 4,
            title: "bounded moment ratios of weighted area sums",
            limit: secs(600),
            run: || moment::run(&moment::Params::default()),
        },
        Criterion {
            id: 5,
            title: "limit theorem marginal: variance and normality",
            limit: secs(600),
            run: || fclt_part(fclt::Part::Marginal),
        },
        Criterion {
            id: 6,
            title: "closed-form covariances against the pairing oracle",
            limit: secs(120),
            run: || fclt_part(fclt::Part::Covariance),
        },
        Criterion {
            id: 7,
            title: "third-order scaling and covariance bound",
            limit: secs(300),
            run: || third_order::run(&third_order::Params::default()),
        },
        Criterion {
            id: 8,
            title: "multidimensional Young suites",
            limit: secs(300),
            run: || {
                young_check::run(&young_check::Params {
                    golden: Some(golden()),
                    ..young_check::Params::default()
                })
            },
        },
        Criterion {
            id: 9,
            title: "exhaustive multiple correlation sum bound",
            limit: secs(120),
            run: || fclt_part(fclt::Part::RhoBound),
        },
        Criterion {
            id: 10,
            title: "rough differential equation self-convergence",
            limit: secs(60),
            run: || rde_demo::run(&rde_demo::Params::default()),
        },
    ]
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all_pass = true;
    for c in criteria() {
        if !selected.is_empty() && !selected.contains(&c.id) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = (c.run)();
        let elapsed = t0.elapsed();
        let in_time = elapsed <= c.limit;
        let (pass, detail) = match &outcome {
            Ok(rep) => {
                let fails: Vec<String> = rep.failures().iter().map(|r| r.name.clone()).collect();
                let mut detail = format!("{} checked rows", rep.rows.iter().filter(|r| r.pass.is_some()).count());
                if !fails.is_empty() {
                    detail = format!("failed rows: {}", fails.join("; "));
                }
                (rep.pass(), detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !in_time {
            all_pass = false;
        }
        all_pass &= pass;
        let verdict = if pass && in_time { "PASS" } else { "FAIL" };
        let time_note = if in_time {
            String::new()
        } else {
            format!(", over the {}s limit", c.limit.as_secs())
        };
        println!(
            "criterion {:>2}: {verdict} {} ({:.2}s{time_note}; {detail})",
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
        if let Ok(rep) = &outcome {
            if !pass {
                print!("{}", rep.summary());
            }
        }
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
