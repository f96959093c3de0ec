//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use polysu11::coherent::{
    build_state, lowering_eigendefect, normalization_closed_form, normalization_series, numeric_radius,
};
use polysu11::rep::{build_rep, commutator_defect, structure_defects};
use polysu11::susy::{grid_spectrum, Partner, DEFAULT_POINTS, DEFAULT_R_MAX};
use polysu11::unity::{moment_target, moments_quadrature, unity_defect};
use polysu11::{AlgebraSpec, Family, OscillatorParams, Result, StructureSequence, WeightFunction};

const KS: [f64; 3] = [0.6, 0.875, 1.5];
const GAMMAS: [f64; 3] = [0.1, 0.25, 0.4];

type Criterion = (&'static str, fn() -> Result<f64>, f64, Option<Duration>);

struct Outcome {
    value: f64,
    tolerance: f64,
    budget: Option<Duration>,
}

fn algebra_specs() -> Vec<AlgebraSpec> {
    let alphas = [vec![1.0], vec![1.0, 0.5], vec![1.0, 0.5, 0.25]];
    alphas
        .iter()
        .flat_map(|a| KS.iter().map(move |&k| AlgebraSpec::new(a.clone(), k).unwrap()))
        .collect()
}

fn cubic(gamma: f64) -> AlgebraSpec {
    OscillatorParams::at_cubic_point(gamma).unwrap().cubic_algebra_spec().unwrap()
}

fn zetas() -> Vec<Complex64> {
    [0.25, 1.0, 2.0, 3.5, 5.0]
        .iter()
        .enumerate()
        .map(|(i, &r)| Complex64::from_polar(r, 0.9 * i as f64 - 1.3))
        .collect()
}

fn algebra_fidelity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for spec in algebra_specs() {
        let rep = build_rep(&spec, 64)?;
        worst = worst.max(commutator_defect(&rep)).max(structure_defects(&rep).casimir_defect);
    }
    Ok(worst)
}

fn bg_eigenrelation() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for spec in algebra_specs() {
        for z in zetas() {
            let state = build_state(&spec, Family::Bg, z, 1e-14)?;
            let rep = build_rep(&spec, state.order() + 2)?;
            worst = worst.max(lowering_eigendefect(&rep, &state)?.minus_defect);
        }
    }
    Ok(worst)
}

fn closed_forms() -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut specs = algebra_specs();
    specs.push(cubic(0.25));
    for spec in &specs {
        for i in 1..=20 {
            let bg = 0.25 * i as f64;
            let p = if spec.p() == 1 { i as f64 / 21.0 } else { bg };
            for (fam, r) in [(Family::Bg, bg), (Family::P, p)] {
                let closed = normalization_closed_form(spec, &fam, r)?;
                let series = normalization_series(spec, &fam, r)?;
                worst = worst.max((closed / series - 1.0).abs());
            }
        }
    }
    Ok(worst)
}

fn linear_limits() -> Result<f64> {
    let near = AlgebraSpec::new(vec![1.0, 1e-8], 0.875)?;
    let lin = AlgebraSpec::new(vec![1.0], 0.875)?;
    let mut worst: f64 = 0.0;
    for (fam, z) in [
        (Family::Bg, Complex64::new(1.5, -2.0)),
        (Family::P, Complex64::new(0.4, 0.5)),
    ] {
        let a = build_state(&near, fam.clone(), z, 1e-14)?;
        let b = build_state(&lin, fam, z, 1e-14)?;
        for n in 0..=a.order().max(b.order()) {
            let x = a.coeffs().get(n).copied().unwrap_or_default();
            let y = b.coeffs().get(n).copied().unwrap_or_default();
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

fn moment_cases() -> Vec<(AlgebraSpec, Family)> {
    let mut cases = Vec::new();
    for k in KS {
        let lin = AlgebraSpec::new(vec![1.0], k).unwrap();
        cases.push((lin.clone(), Family::Bg));
        cases.push((lin, Family::P));
    }
    for g in GAMMAS {
        cases.push((cubic(g), Family::Bg));
        cases.push((cubic(g), Family::P));
    }
    cases
}

fn moment_law() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (spec, fam) in moment_cases() {
        let ws = WeightFunction::new(&spec, &fam)?;
        let m = moments_quadrature(&ws, 6)?;
        for n in 0..=6 {
            worst = worst.max((m.log_values[n] - moment_target(&spec, &fam, n)?).exp_m1().abs());
        }
    }
    Ok(worst)
}

fn unity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (spec, fam) in moment_cases() {
        worst = worst.max(unity_defect(&spec, &fam, 5)?);
    }
    Ok(worst)
}

/// Normalized so that values <= 1 pass.
fn radius() -> Result<f64> {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    for k in KS {
        let lin = AlgebraSpec::new(vec![1.0], k)?;
        let p = numeric_radius(&lin, &Family::P, n)?;
        worst = worst.max((p - 1.0).abs() / 0.01);
        worst = worst.max(1e6 / numeric_radius(&lin, &Family::Bg, n)?);
    }
    for g in GAMMAS {
        let spec = cubic(g);
        worst = worst.max(1e6 / numeric_radius(&spec, &Family::Bg, n)?);
        worst = worst.max(1e6 / numeric_radius(&spec, &Family::P, n)?);
    }
    Ok(worst)
}

fn spectra() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in GAMMAS {
        let params = OscillatorParams::at_cubic_point(g)?;
        for which in [Partner::Plus, Partner::Minus] {
            let s = grid_spectrum(&params, which, DEFAULT_R_MAX, DEFAULT_POINTS, 6)?;
            for (n, e) in s.levels.iter().enumerate() {
                worst = worst.max((e - (2.0 * n as f64 + g + 1.5)).abs());
            }
        }
    }
    Ok(worst)
}

fn ladder() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in GAMMAS {
        let params = OscillatorParams::at_cubic_point(g)?;
        let seq = StructureSequence::new(params.cubic_algebra_spec()?)?;
        for n in 0..=20 {
            let up = params.ladder_coefficients(n)?.up;
            worst = worst.max((up * up / seq.phi(n + 1) - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Counts negative densities and non-decreasing steps in the last quarter of
/// each γ block, read back from the `weights` CSV.
fn figure_tables() -> Result<f64> {
    let dir = std::env::temp_dir().join(format!("polysu11-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gammas = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45";
    let mut violations = 0usize;
    for family in ["bg", "p"] {
        let out = dir.join(format!("{family}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_polysu11"))
            .args(["weights", "--family", family, "--gamma", gammas, "--tmax", "20", "--steps", "400", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        if !status.success() {
            violations += 1;
            continue;
        }
        let text = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<(f64, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
                (f[0], f[2])
            })
            .collect();
        violations += usize::from(rows.len() != 9 * 400);
        for block in rows.chunks(400) {
            violations += block.iter().filter(|r| !(r.1 >= 0.0)).count();
            violations += block[300..].windows(2).filter(|w| !(w[1].1 < w[0].1)).count();
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(violations as f64)
}

fn run(f: fn() -> Result<f64>, tolerance: f64, budget: Option<Duration>) -> (Outcome, Duration) {
    let start = Instant::now();
    let value = f().unwrap_or_else(|e| {
        eprintln!("  error: {e}");
        f64::INFINITY
    });
    (
        Outcome {
            value,
            tolerance,
            budget,
        },
        start.elapsed(),
    )
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: [Criterion; 10] = [
        ("algebra fidelity", algebra_fidelity, 1e-10, secs(1)),
        ("BG eigenrelation", bg_eigenrelation, 1e-8, secs(1)),
        ("closed-form normalizations", closed_forms, 1e-10, None),
        ("linear limits", linear_limits, 1e-6, None),
        ("moment law", moment_law, 1e-5, secs(30)),
        ("unity defect", unity, 1e-4, None),
        ("radius of convergence", radius, 1.0, None),
        ("SUSY spectra", spectra, 1e-3, secs(20)),
        ("ladder identity", ladder, 1e-12, None),
        ("weight tables", figure_tables, 0.0, None),
    ];
    let mut failures = 0;
    for (i, (name, f, tol, budget)) in criteria.into_iter().enumerate() {
        let (o, elapsed) = run(f, tol, budget);
        let in_time = o.budget.is_none_or(|b| elapsed <= b);
        let pass = o.value <= o.tolerance && in_time;
        if !pass {
            failures += 1;
        }
        let limit = o.budget.map(|b| format!(" (limit {}s)", b.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2}: {} {name}: value {:.3e} tol {:.1e} time {:.2}s{limit}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.value,
            o.tolerance,
            elapsed.as_secs_f64(),
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
