//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gpscat::compare::{
    conventional_ps_success, curve, gps_success, homodyne_method_success, interior_maxima,
    is_unimodal, sweep, Axis, Method, SweepSpec,
};
use gpscat::gauss_core::{
    build_sigma, db_to_r, output_squeezing, output_squeezing_from_inputs, reflectance_for_sigma11,
    solve_reflectance, SqueezerPair,
};
use gpscat::herald::{herald, norm_squared, prob_closed, OSCILLATION_THRESHOLD};
use gpscat::oracle::{gaussian_output_fock, herald_fock, FockWavefunction};
use gpscat::targets::{fidelity, ApproxTarget, CatTarget};
use gpscat::Result;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn gps_sigma(db: f64) -> Result<gpscat::gauss_core::SigmaMatrix> {
    let sq = SqueezerPair::opposed_db(db)?;
    Ok(build_sigma(sq, solve_reflectance(sq)?))
}

fn p10_anchor() -> Result<Verdict> {
    let sq = SqueezerPair::new(1.727, -1.727)?;
    let p = prob_closed(&build_sigma(sq, solve_reflectance(sq)?), 10)?;
    verdict(
        (p - 0.023).abs() <= 0.001,
        format!("P(10) at 15 dB = {p:.6} (0.023 +/- 0.001)"),
    )
}

fn reflectance_values() -> Result<Verdict> {
    let sq = SqueezerPair::opposed_db(5.0)?;
    let mut pass = true;
    let mut found = Vec::new();
    for (s11, expected) in [(0.6, 0.10), (1.0, 0.24), (1.4, 0.38)] {
        let refl = reflectance_for_sigma11(sq, s11)?.reflectance();
        pass &= (refl - expected).abs() <= 0.005;
        found.push(format!("s11={s11}: R={refl:.4}"));
    }
    verdict(pass, format!("{} (each +/- 0.005)", found.join(", ")))
}

fn fidelity_anchor() -> Result<Verdict> {
    let sigma = gps_sigma(5.0)?;
    let out = herald(&sigma, 10)?;
    let r_c = out.r_c().expect("closed-form outcome");
    let f10 = fidelity(&out, &CatTarget::for_photons(10, r_c)?)?;
    let mut pass = (f10 - 0.997).abs() <= 0.002;
    let mut rule = Vec::new();
    let s = r_c.exp();
    for n in [4usize, 6, 10, 16, 20] {
        let f = fidelity(
            &ApproxTarget::new(n, s)?,
            &CatTarget::for_photons(n, s.ln())?,
        )?;
        let gap = (f - (1.0 - 0.03 / n as f64)).abs();
        pass &= gap < 0.01;
        rule.push(format!("F{n}={f:.5}"));
    }
    verdict(
        pass,
        format!("F10 = {f10:.5} (0.997 +/- 0.002); {}", rule.join(" ")),
    )
}

fn output_squeezing_identity() -> Result<Verdict> {
    let mut rng = StdRng::seed_from_u64(20260416);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r1 = rng.gen_range(0.05..2.5);
        let r2 = -rng.gen_range(0.05..2.5);
        let sq = SqueezerPair::new(r1, r2)?;
        let a = output_squeezing(&build_sigma(sq, solve_reflectance(sq)?));
        let b = output_squeezing_from_inputs(sq);
        worst = worst.max(((a - b) / b).abs());
    }
    verdict(
        worst <= 1e-12,
        format!("max relative gap {worst:.2e} over 1000 draws (<= 1e-12)"),
    )
}

fn oracle_equivalence() -> Result<Verdict> {
    let mut worst_p: f64 = 0.0;
    let mut worst_f: f64 = 1.0;
    for db in [5.0, 10.0] {
        let sq = SqueezerPair::opposed_db(db)?;
        let bs = solve_reflectance(sq)?;
        let sigma = build_sigma(sq, bs);
        let state = gaussian_output_fock(sq, bs.reflectance(), 60)?;
        for n in 0..=12 {
            let (p, heralded) = herald_fock(&state, n)?;
            worst_p = worst_p.max((p - prob_closed(&sigma, n)?).abs());
            let f = fidelity(&herald(&sigma, n)?, &FockWavefunction::new(heralded)?)?;
            worst_f = worst_f.min(f);
        }
    }
    verdict(
        worst_p < 1e-5 && worst_f >= 1.0 - 1e-6,
        format!(
            "max |dP| = {worst_p:.2e} (< 1e-5), min fidelity = 1 - {:.2e} (>= 1 - 1e-6)",
            1.0 - worst_f
        ),
    )
}

fn method_ordering() -> Result<Verdict> {
    let mut violations = Vec::new();
    for db in [5.0, 10.0] {
        let r = db_to_r(db);
        for n in 2..=10 {
            let g = gps_success(r, n)?.probability;
            let h = homodyne_method_success(r, n)?.probability;
            let c = conventional_ps_success(r, n)?.probability;
            if !(g >= h && h >= c) {
                violations.push(format!(
                    "{db} dB n={n}: gps {g:.3e} hom {h:.3e} conv {c:.3e}"
                ));
            }
        }
    }
    let r = db_to_r(10.0);
    let ratio = gps_success(r, 10)?.probability / conventional_ps_success(r, 10)?.probability;
    let in_range = (1e3..=1e6).contains(&ratio);
    let mut detail = format!("gps/conv at 10 dB, n=10 = {ratio:.3e} (in [1e3, 1e6]: {in_range})");
    if !violations.is_empty() {
        detail.push_str(&format!("; ordering violated at {}", violations.join("; ")));
    }
    verdict(violations.is_empty() && in_range, detail)
}

fn unimodality() -> Result<Verdict> {
    let spec = SweepSpec::new(
        vec![Method::Gps],
        Axis::Decibel,
        (0.1, 22.0, 0.1),
        vec![5, 10, 20],
        1e8,
    )?;
    let points = sweep(&spec);
    let mut pass = true;
    let mut peaks = Vec::new();
    for n in [5, 10, 20] {
        let c = curve(&points, Method::Gps, n);
        let values: Vec<f64> = c.iter().map(|p| p.1).collect();
        let maxima = interior_maxima(&values);
        pass &= maxima.len() == 1 && is_unimodal(&values);
        let at: Vec<String> = maxima
            .iter()
            .map(|&i| format!("{:.1} dB", c[i].0))
            .collect();
        peaks.push(format!("P({n}) peaks at [{}]", at.join(", ")));
    }
    verdict(pass, peaks.join("; "))
}

fn rate_estimate() -> Result<Verdict> {
    let rate = gps_success(db_to_r(15.0), 10)?.at_rep_rate(1e8).rate;
    verdict(
        (rate - 2.3e6).abs() <= 0.1e6,
        format!("rate = {rate:.4e} counts/s (2.3e6 +/- 0.1e6)"),
    )
}

fn normalization() -> Result<Verdict> {
    let sigma = gps_sigma(10.0)?;
    let total: f64 = (0..=80)
        .map(|n| prob_closed(&sigma, n))
        .sum::<Result<f64>>()?;
    let deficit = (1.0 - total).abs();
    let mut worst_norm: f64 = 0.0;
    for n in 0..=80 {
        worst_norm = worst_norm.max((norm_squared(&herald(&sigma, n)?)? - 1.0).abs());
    }
    let sq5 = SqueezerPair::opposed_db(5.0)?;
    for s11 in [0.6, 1.4] {
        let sigma = build_sigma(sq5, reflectance_for_sigma11(sq5, s11)?);
        for n in [1, 5, 10] {
            worst_norm = worst_norm.max((norm_squared(&herald(&sigma, n)?)? - 1.0).abs());
        }
    }
    verdict(
        deficit < 1e-6 && worst_norm <= 1e-8,
        format!("|1 - sum P(n<=80)| = {deficit:.2e} (< 1e-6); max |norm - 1| = {worst_norm:.2e} (<= 1e-8)"),
    )
}

fn oscillation_regimes() -> Result<Verdict> {
    let sq = SqueezerPair::opposed_db(5.0)?;
    let mut pass = true;
    let mut found = Vec::new();
    for (s11, oscillates) in [(0.6, false), (1.0, false), (1.4, true)] {
        let out = herald(&build_sigma(sq, reflectance_for_sigma11(sq, s11)?), 10)?;
        let half_width = gpscat::wavefunction::Wavefunction::envelope(&out).half_width();
        let shape = out.waveform_shape(half_width, 4001)?;
        pass &= (shape.oscillation > OSCILLATION_THRESHOLD) == oscillates;
        found.push(format!("s11={s11}: {:.2}%", 100.0 * shape.oscillation));
    }
    verdict(pass, format!("{} (threshold 5%)", found.join(", ")))
}

type Criterion = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("P(10) anchor at 15 dB", p10_anchor),
        ("reflectances for s11 = 0.6, 1, 1.4", reflectance_values),
        ("fidelity anchor and 1 - 0.03/n rule", fidelity_anchor),
        ("output squeezing identity", output_squeezing_identity),
        ("Fock oracle equivalence", oracle_equivalence),
        (
            "method ordering and GPS/conventional ratio",
            method_ordering,
        ),
        ("unimodal P(5), P(10), P(20) curves", unimodality),
        ("rate at 15 dB, n = 10, 100 MHz", rate_estimate),
        ("normalization and completeness", normalization),
        ("oscillation regimes in s11", oscillation_regimes),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2}: {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
