//! Acceptance criteria. Each test prints one PASS/FAIL line with the measured
//! values, then asserts. Runtime limits are part of each criterion.
//!
//! cargo test --test acceptance -- --nocapture --test-threads=1

use std::time::{Duration, Instant};

use dyncool::certify::{
    descent_sweep, dyson_bound_sweep, gqsp_sweep, first_order_sweep, perturbation_sweep, query_scaling, shift_sweep, sign_sweep,
    statistics_sweep, success_sweep, summarize, CertificationRecord,
};

const SEED: u64 = 20_240_601;

fn report(id: u32, title: &str, records: &[CertificationRecord], elapsed: Duration, limit: Duration) -> bool {
    let within_time = elapsed <= limit;
    let summary = summarize(records);
    let pass = !summary.is_empty() && summary.iter().all(|r| r.pass) && within_time;
    println!(
        "[{}] criterion {id}: {title} ({:.1} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for r in &summary {
        println!(
            "       {} {:<28} measured {:.4e} bound {:.4e} slack {:.1e} [{}]",
            if r.pass { "ok  " } else { "FAIL" },
            r.claim,
            r.measured,
            r.bound,
            r.slack,
            r.instance
        );
    }
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[test]
fn criterion_01_sign_function() {
    let (records, t) = timed(|| sign_sweep(&[0.3, 0.1], &[0.1, 0.01]).unwrap());
    assert!(report(1, "sign approximation certified with degree envelope", &records, t, Duration::from_secs(10)));
}

#[test]
fn criterion_02_gqsp_reconstruction() {
    let (records, t) = timed(|| gqsp_sweep(50, 16, 8, SEED).unwrap());
    assert_eq!(records.iter().filter(|r| r.claim == "gqsp.reconstruction").count(), 50);
    assert!(report(2, "GQSP reconstruction and query count", &records, t, Duration::from_secs(60)));
}

#[test]
fn criterion_03_shift_factorization() {
    let (records, t) = timed(|| shift_sweep(4, 4, SEED).unwrap());
    assert!(report(3, "factored register evolution", &records, t, Duration::from_secs(5)));
}

#[test]
fn criterion_04_leakage_sweep() {
    let (records, t) = timed(|| perturbation_sweep(&[2, 4, 8, 16], 20, &[0.25, 0.04, 0.01], SEED).unwrap());
    let records: Vec<_> = records.into_iter().filter(|r| r.claim.starts_with("leakage.")).collect();
    assert_eq!(records.iter().filter(|r| r.claim == "leakage.bound").count(), 240);
    assert!(report(4, "leakage <= delta, bound not tight", &records, t, Duration::from_secs(60)));
}

#[test]
fn criterion_05_effective_evolution_sweep() {
    let (records, t) = timed(|| perturbation_sweep(&[2, 4, 8, 16], 20, &[0.25, 0.04, 0.01], SEED).unwrap());
    let records: Vec<_> = records.into_iter().filter(|r| r.claim.starts_with("effective_evolution.")).collect();
    assert_eq!(records.len(), 240);
    assert!(report(5, "effective-evolution error <= delta", &records, t, Duration::from_secs(60)));
}

#[test]
fn criterion_06_dyson_terms() {
    let (records, t) = timed(|| {
        let mut r = dyson_bound_sweep(4, 30, 3, 0.04, SEED).unwrap();
        r.extend(first_order_sweep(4, 10, 0.04, SEED).unwrap());
        r
    });
    assert!(records.iter().any(|r| r.instance.ends_with("t=3pi")));
    assert!(report(6, "Dyson term norm, leakage and first-order exactness", &records, t, Duration::from_secs(120)));
}

#[test]
fn criterion_07_query_scaling() {
    let ds = [4, 16, 64, 256];
    let ((eih, ua), t) = timed(|| query_scaling(0.1, &ds).unwrap());
    let id = format!("eps=0.1 d={ds:?}");
    let records = vec![
        CertificationRecord::within("queries.eih_slope", id.clone(), eih, 1.5, 0.1),
        CertificationRecord::within("queries.ua_slope", id, ua, 1.5, 0.1),
    ];
    assert!(report(7, "total query counts scale as d^1.5", &records, t, Duration::from_secs(5)));
}

#[test]
fn criterion_08_success_probability() {
    let (records, t) = timed(|| success_sweep(16, 0.1, &[2, 8, 32], 1000, SEED).unwrap());
    assert!(report(8, "leak-free trajectory fraction >= 1/4", &records, t, Duration::from_secs(600)));
}

#[test]
fn criterion_09_random_matrix_statistics() {
    let (records, t) = timed(|| statistics_sweep(8, 10_000, SEED).unwrap());
    assert!(report(9, "transition remainder, cooling probability, GUE moments", &records, t, Duration::from_secs(120)));
}

#[test]
fn criterion_10_end_to_end_cooling() {
    let (records, t) = timed(|| descent_sweep(16, 0.1, 32, 500, SEED).unwrap());
    assert_eq!(records.iter().filter(|r| r.claim == "cooling.energy_descent").count(), 32);
    assert!(report(10, "mean energy non-increasing, ground overlap grows", &records, t, Duration::from_secs(900)));
}
