//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line, then asserts.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

#![allow(clippy::excessive_precision)]

use std::f64::consts::LN_2;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use harq_scaling::analytic::{self, evaluate, fbl_rate};
use harq_scaling::linklevel::{
    analytic_sinr, make_equicorrelated_signatures, simulate_cc_noma_sinr, MonteCarlo,
};
use harq_scaling::sweep::{find_crossing, log_grid, se_curve};
use harq_scaling::{Regime, Scheme, SchemeParams};

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_time = elapsed <= budget;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] criterion {id:>2}: {name} ({:.3}s of {:.0}s) {detail}",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time budget");
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

#[test]
fn c01_formula_spot_checks() {
    let start = Instant::now();
    let base = SchemeParams::new(1.0, 2, 10.0);
    // (label, scheme, regime, params, se, ebn0) from tests/oracle/rederive.py
    let rows = [
        (
            "classical sum",
            Scheme::Classical,
            Regime::SumOptimal,
            base,
            1.2924812503605781,
            7.7370561446908317,
        ),
        (
            "classical tin",
            Scheme::Classical,
            Regime::Tin,
            base,
            0.65758601458448458,
            7.6035680338478605,
        ),
        (
            "cc-noma sum",
            Scheme::CcNoma,
            Regime::SumOptimal,
            base,
            2.5646415084724832,
            1.9495902189378631,
        ),
        (
            "cc-noma tin J=T",
            Scheme::CcNoma,
            Regime::Tin,
            SchemeParams::new(1.0, 2, 2.0).with_eta(0.3),
            0.79248125036057809,
            1.2618595071429149,
        ),
        (
            "cc-noma tin",
            Scheme::CcNoma,
            Regime::Tin,
            base,
            0.21222224396628254,
            23.560207010130334,
        ),
        (
            "cc-oma sum",
            Scheme::CcOma,
            Regime::SumOptimal,
            base,
            1.4036774610288021,
            3.5620718710802218,
        ),
        (
            "cc-oma tin",
            Scheme::CcOma,
            Regime::Tin,
            base,
            1.2135670679256044,
            4.1200854342122905,
        ),
        (
            "ir-oma sum",
            Scheme::IrOma,
            Regime::SumOptimal,
            base.with_c_buf(2.0),
            1.5546058797833756,
            3.2162492532812999,
        ),
        (
            "ir-oma tin",
            Scheme::IrOma,
            Regime::Tin,
            base.with_c_buf(0.1),
            0.51018801707131575,
            9.8003085778102148,
        ),
    ];
    let mut bad = Vec::new();
    for (label, scheme, regime, p, se, ebn0) in rows {
        let m = evaluate(scheme, regime, &p).unwrap();
        if sig6(m.se) != sig6(se) || sig6(m.ebn0_linear) != sig6(ebn0) {
            bad.push(format!("{label}: got ({}, {})", m.se, m.ebn0_linear));
        }
    }
    report(
        1,
        "closed forms vs independent re-derivation, 6 s.f.",
        bad.is_empty(),
        start.elapsed(),
        Duration::from_secs(1),
        &format!("{} of 9 mismatched {bad:?}", bad.len()),
    );
}

#[test]
fn c02_tin_floors() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for sigma2 in [0.5, 1.0, 2.0] {
        let p = SchemeParams::new(1e-6, 2, 10.0)
            .with_eta(1.0)
            .with_sigma2(sigma2);
        let target = -1.59 + 10.0 * sigma2.log10();
        for scheme in [Scheme::CcNoma, Scheme::CcOma] {
            let m = evaluate(scheme, Regime::Tin, &p).unwrap();
            worst = worst.max((m.ebn0_db - target).abs());
        }
    }
    report(
        2,
        "TIN Eb/N0 floors at rho=1e-6",
        worst < 0.05,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("max deviation {worst:.4} dB (tol 0.05)"),
    );
}

#[test]
fn c03_fixed_total_power_limit() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for p_tot in [1.0, 10.0] {
        let target = LN_2 * p_tot;
        let mut errs = Vec::new();
        for rho in [1e-6, 5e-7, 2.5e-7] {
            let users = p_tot / rho;
            let p = SchemeParams::new(rho, 2, users).with_eta(1.0);
            let m = evaluate(Scheme::CcNoma, Regime::SumOptimal, &p).unwrap();
            errs.push(rel(m.ebn0_linear, target));
            detail.push_str(&format!("P={p_tot} rho={rho:e} ebn0={:.6} ", m.ebn0_linear));
        }
        ok &= errs[0] < 0.01 && errs[1] < errs[0] && errs[2] < errs[1];
    }
    report(
        3,
        "CC-NOMA sum Eb/N0 -> ln2*P_tot at fixed total power",
        ok,
        start.elapsed(),
        Duration::from_secs(1),
        &detail,
    );
}

#[test]
fn c04_ir_buffer_limits() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for slots in [2, 3] {
        let p = SchemeParams::new(1.0, slots, 10.0).with_c_buf(1e4);
        let ir = evaluate(Scheme::IrOma, Regime::Tin, &p).unwrap();
        let classical = evaluate(Scheme::Classical, Regime::Tin, &p).unwrap();
        worst = worst.max(rel(ir.ebn0_linear, classical.ebn0_linear));

        let ir = evaluate(Scheme::IrOma, Regime::SumOptimal, &p).unwrap();
        let (j, s2, rho) = (p.users, p.sigma2, p.rho);
        worst = worst.max(rel(ir.ebn0_linear, j * s2 * rho / (1.0 + rho * j).log2()));
    }
    report(
        4,
        "IR-OMA with a huge buffer matches the unconstrained limits",
        worst < 1e-6,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("max relative error {worst:.3e} (tol 1e-6)"),
    );
}

#[test]
fn c05_buffer_round_trip() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for rho in [0.01, 0.1, 1.0, 10.0, 100.0] {
        for c_buf in [0.1, 0.5, 2.0, 10.0, 50.0] {
            let p = SchemeParams::new(rho, 3, 10.0).with_c_buf(c_buf);
            for horizon in [2, 3] {
                let q = analytic::ir_quant_noise(&p, Regime::SumOptimal, 1, horizon).unwrap();
                let back = analytic::ir_buffer_rate(&p, Regime::SumOptimal, horizon, q.value);
                worst = worst.max(rel(back, c_buf / horizon as f64));
            }
        }
    }
    report(
        5,
        "quantization noise -> buffer rate round trip",
        worst < 1e-12,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("max relative error {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn c06_monte_carlo_oracle() {
    let start = Instant::now();
    let mc = MonteCarlo {
        trials: 2000,
        seed: 2024,
        workers: 4,
    };
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for eta in [0.0, 0.05, 0.1, 0.3] {
        for slots in [1usize, 2, 4] {
            for per_slot in [2usize, 5, 10] {
                let sigs = make_equicorrelated_signatures(64, per_slot, eta).unwrap();
                let active = vec![(0..per_slot).collect::<Vec<_>>(); slots];
                let est = simulate_cc_noma_sinr(&sigs, 1.0, 1.0, &active, 0, &mc).unwrap();
                let want = analytic_sinr(Scheme::CcNoma, 1.0, &vec![per_slot; slots], eta).unwrap();
                let e = rel(est.mean, want);
                if e > worst {
                    worst = e;
                    at = format!("eta={eta} T={slots} J_t={per_slot}");
                }
            }
        }
    }
    report(
        6,
        "simulated CC-NOMA SINR vs closed form (36 cells)",
        worst < 0.05,
        start.elapsed(),
        Duration::from_secs(30),
        &format!("max relative error {worst:.4} at {at} (tol 0.05)"),
    );
}

#[test]
fn c07_single_slot_coincidence() {
    let start = Instant::now();
    let mut mismatches = 0;
    for rho in log_grid(1e-3, 1e3, 20).unwrap() {
        let p = SchemeParams::new(rho, 1, 10.0).with_c_buf(3.0);
        for regime in Regime::ALL {
            let c = evaluate(Scheme::Classical, regime, &p).unwrap();
            let o = evaluate(Scheme::CcOma, regime, &p).unwrap();
            let i = evaluate(Scheme::IrOma, regime, &p).unwrap();
            if c != o || c != i {
                mismatches += 1;
            }
        }
    }
    report(
        7,
        "classical = CC-OMA = IR-OMA at T=1",
        mismatches == 0,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("{mismatches} of 40 points differ"),
    );
}

#[test]
fn c08_trends() {
    let start = Instant::now();
    let se_at = |scheme, regime, slots: u32| {
        let p = SchemeParams::new(1.0, slots, 10.0)
            .with_eta(1.0)
            .with_c_buf(10.0 * slots as f64);
        evaluate(scheme, regime, &p).unwrap().se
    };
    let series = |scheme, regime| [1, 2, 3].map(|t| se_at(scheme, regime, t));
    let noma_sum = series(Scheme::CcNoma, Regime::SumOptimal);
    let noma_tin = series(Scheme::CcNoma, Regime::Tin);
    let oma_tin = series(Scheme::CcOma, Regime::Tin);
    let decreasing = noma_sum[0] > noma_sum[1] && noma_sum[1] > noma_sum[2];
    let increasing = |s: [f64; 3]| s[0] < s[1] && s[1] < s[2];

    let p = SchemeParams::new(1.0, 2, 10.0)
        .with_eta(1.0)
        .with_c_buf(20.0);
    let grid = log_grid(1e-3, 1e2, 120).unwrap();
    let sum = se_curve(Scheme::CcOma, Regime::SumOptimal, &p, &grid).unwrap();
    let tin = se_curve(Scheme::CcOma, Regime::Tin, &p, &grid).unwrap();
    let crossing = find_crossing(&sum, &tin).unwrap();

    let ok = decreasing && increasing(noma_tin) && increasing(oma_tin) && crossing.is_some();
    report(
        8,
        "SE trends in T and CC-OMA sum/TIN crossing",
        ok,
        start.elapsed(),
        Duration::from_secs(2),
        &format!(
            "noma sum {noma_sum:.4?} noma tin {noma_tin:.4?} oma tin {oma_tin:.4?} crossing {crossing:?} dB"
        ),
    );
}

#[test]
fn c09_finite_blocklength() {
    let start = Instant::now();
    let mut ok = true;
    let mut worst_gap: f64 = 0.0;
    for sinr in [0.01f64, 1.0, 100.0] {
        let c = 0.5 * (1.0 + sinr).log2();
        for n in [100.0, 1000.0, 10000.0] {
            for eps in [1e-3, 1e-5] {
                ok &= fbl_rate(sinr, n, eps).unwrap() < c;
            }
        }
        for eps in [1e-3, 1e-5] {
            worst_gap = worst_gap.max((fbl_rate(sinr, 1e8, eps).unwrap() - c).abs());
        }
    }
    report(
        9,
        "finite-blocklength rate below capacity and converging",
        ok && worst_gap < 1e-3,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("strictly below: {ok}, max gap at n=1e8 {worst_gap:.3e} (tol 1e-3)"),
    );
}

fn run_cli(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_harq-scaling"))
        .args(args)
        .arg("--output")
        .arg(&out)
        .env_remove("HARQ_SCALING_OUTPUT_DIR")
        .status()
        .unwrap();
    assert!(
        status.code().is_some_and(|c| c <= 1),
        "{args:?} exited with {status}"
    );
    std::fs::read(out).unwrap()
}

#[test]
fn c10_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let validate = [
        "validate",
        "--eta",
        "0.1",
        "--T",
        "2",
        "--users-per-slot",
        "5",
        "--m",
        "64",
        "--trials",
        "2000",
        "--seed",
        "7",
    ];
    let curve = [
        "curve", "--scheme", "ir-oma", "--regime", "tin", "--T", "3", "--J", "10", "--c-buf", "2",
        "--points", "40",
    ];
    let mut same = true;
    let mut files = 0;
    for (tag, base) in [("validate", &validate[..]), ("curve", &curve[..])] {
        let mut outputs = Vec::new();
        for workers in ["1", "4"] {
            for run in 0..2 {
                let mut args = base.to_vec();
                args.extend(["--workers", workers]);
                outputs.push(run_cli(
                    dir.path(),
                    &format!("{tag}-{workers}-{run}.csv"),
                    &args,
                ));
                files += 1;
            }
        }
        same &= !outputs[0].is_empty() && outputs.iter().all(|o| *o == outputs[0]);
    }
    report(
        10,
        "byte-identical validate/curve output across runs and workers",
        same,
        start.elapsed(),
        Duration::from_secs(35),
        &format!("{files} files compared"),
    );
}
