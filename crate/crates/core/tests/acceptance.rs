//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use frac_ch::checks::{self, CheckError, SuiteReport};
use frac_ch::potentials::Potential;

const SEED: u64 = 20_240_601;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Vec<SuiteReport>, String>,
}

fn lift(r: Result<SuiteReport, CheckError>) -> Result<SuiteReport, String> {
    r.map_err(|e| e.to_string())
}

fn identities() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![
        checks::interpolant_identities(SEED, 200),
        checks::summation_by_parts(SEED + 1, 1000),
        checks::elementary_identity_suite(SEED + 2, 1000),
        checks::riesz_identity(SEED + 3, 200),
        checks::dual_norm_representation(SEED + 4, 200),
    ])
}

fn mass() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![
        lift(checks::mass_invariant(0.0, 64, 200))?,
        lift(checks::mass_invariant(1.0, 64, 200))?,
    ])
}

fn energy() -> Result<Vec<SuiteReport>, String> {
    let log = Potential::logarithmic(1.5).expect("valid parameter");
    Ok(vec![
        lift(checks::energy_dissipation("regular", Potential::regular(), 0.0))?,
        lift(checks::energy_dissipation("regular", Potential::regular(), 1.0))?,
        lift(checks::energy_dissipation("logarithmic", log.clone(), 0.0))?,
        lift(checks::energy_dissipation("logarithmic", log, 1.0))?,
    ])
}

fn yosida() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![
        checks::yosida_suite("regular", &Potential::regular(), SEED, 1000),
        checks::yosida_suite("logarithmic", &Potential::logarithmic(1.5).expect("valid parameter"), SEED + 1, 1000),
        checks::yosida_suite(
            "double_obstacle",
            &Potential::double_obstacle(1.0).expect("valid parameter"),
            SEED + 2,
            1000,
        ),
    ])
}

fn oracle() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![lift(checks::oracle_equivalence(SEED, 20))?])
}

fn norms() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![checks::norm_equivalence(SEED, 1000, &[0.25, 0.5, 1.0])])
}

fn convergence() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![lift(checks::self_convergence())?])
}

fn contdep() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![lift(checks::continuous_dependence_suite(0.1))?])
}

fn ledgers() -> Result<Vec<SuiteReport>, String> {
    Ok(vec![
        lift(checks::ledger_boundedness(1.0, 0.2))?,
        lift(checks::ledger_boundedness(0.0, 0.2))?,
    ])
}

fn determinism() -> Result<Vec<SuiteReport>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut summaries = Vec::new();
    for out in ["a", "b"] {
        let status = Command::new(env!("CARGO_BIN_EXE_frac-ch"))
            .args(["check", "--seed", "11", "--out", out])
            .current_dir(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
        }
        summaries.push(std::fs::read(dir.path().join(out).join("check_summary.json")).map_err(|e| e.to_string())?);
    }
    let mut rep = SuiteReport::new("determinism", 0.0);
    rep.record(if summaries[0] == summaries[1] { 0.0 } else { 1.0 }, || {
        "summaries differ between identical runs".into()
    });
    Ok(vec![rep])
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "exact identities", budget: Some(Duration::from_secs(5)), run: identities },
        Criterion { name: "discrete mass invariant", budget: Some(Duration::from_secs(10)), run: mass },
        Criterion { name: "energy dissipation", budget: Some(Duration::from_secs(30)), run: energy },
        Criterion { name: "yosida suite", budget: Some(Duration::from_secs(5)), run: yosida },
        Criterion { name: "oracle equivalence", budget: Some(Duration::from_secs(10)), run: oracle },
        Criterion { name: "norm equivalence and interpolation", budget: Some(Duration::from_secs(5)), run: norms },
        Criterion { name: "self-convergence", budget: Some(Duration::from_secs(60)), run: convergence },
        Criterion { name: "continuous dependence", budget: Some(Duration::from_secs(30)), run: contdep },
        Criterion { name: "uniform ledger boundedness", budget: Some(Duration::from_secs(60)), run: ledgers },
        Criterion { name: "check determinism", budget: None, run: determinism },
    ];
    let mut failures = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let over_budget = c.budget.is_some_and(|b| elapsed > b);
        let verdict = match &result {
            Err(e) => Err(e.clone()),
            Ok(reports) => match reports.iter().find(|r| !r.pass()) {
                Some(r) => Err(format!(
                    "{}: {}",
                    r.name,
                    r.counterexample.clone().unwrap_or_else(|| "no cases ran".into())
                )),
                None if over_budget => Err(format!("over budget {:?}", c.budget.unwrap())),
                None => Ok(reports.iter().map(|r| r.cases).sum::<usize>()),
            },
        };
        match verdict {
            Ok(cases) => println!("PASS {:2} {} ({cases} cases, {:.2}s)", k + 1, c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("FAIL {:2} {} ({:.2}s): {why}", k + 1, c.name, elapsed.as_secs_f64());
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
