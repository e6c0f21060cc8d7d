//! End-to-end acceptance checks at full size. Runs without the test
//! harness so every criterion prints one `PASS`/`FAIL` line with the
//! measured numbers; the process fails if any criterion does.

use std::time::{Duration, Instant};

use lightcone::oracle::{self, OracleConfig, OracleReport, BAND_TOL, MASSGAP_TOL};
use lightcone::spectral::{massgap_contradiction, SpectrumHypothesis};
use lightcone::RealPoint2;

fn report(id: u32, name: &str, ok: bool, detail: String) -> bool {
    println!("{} criterion {id} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn cfg(n: Option<usize>, grid: Option<usize>) -> OracleConfig {
    OracleConfig { seed: 7, n, grid }
}

fn summary(r: &OracleReport, dt: Duration) -> String {
    format!(
        "checks={} failures={} max_dev={:.3e} metrics={:?} time={:.2}s",
        r.checks,
        r.failures,
        r.max_deviation,
        r.metrics,
        dt.as_secs_f64()
    )
}

fn criterion_1_inversion() -> bool {
    let (r, dt) = timed(|| oracle::inversion(&cfg(Some(100_000), None)));
    let ok = r.passed && r.max_deviation <= 1e-9 && dt < Duration::from_secs(5);
    report(1, "inversion properties, 1e5 samples", ok, summary(&r, dt))
}

fn criterion_2_mu_cone_oracle() -> bool {
    let (r, dt) = timed(|| oracle::mu_cone(&cfg(Some(1000), None)).unwrap());
    let ok = r.passed
        && r.metrics["agreement"] >= 0.999
        && r.metrics["excluded"] > 100.0
        && r.metrics["excluded"] < 900.0
        && dt < Duration::from_secs(30);
    report(2, "mu-cone closed form vs plane witness", ok, summary(&r, dt))
}

fn criterion_3_band_boundary() -> bool {
    let (r, dt) = timed(|| oracle::band_boundary(&cfg(None, Some(50))).unwrap());
    let ok = r.passed && r.checks == 2500 && r.max_deviation <= BAND_TOL && dt < Duration::from_secs(60);
    report(3, "band bounds vs constrained minimization, 50x50", ok, summary(&r, dt))
}

fn criterion_4_shell_complement() -> bool {
    let (r, dt) = timed(|| oracle::shell_complement(&cfg(Some(10_000), Some(200))).unwrap());
    let ok = r.passed && r.metrics["inclusion_checked"] > 1000.0 && r.metrics["inversion_checked"] > 5000.0;
    report(4, "shell-complement consistency", ok, summary(&r, dt))
}

fn criterion_5_cauchy() -> bool {
    let (r, dt) = timed(|| oracle::cauchy().unwrap());
    let ok = r.passed && r.max_deviation <= 1e-6 && r.metrics["doubling_ratio"] >= 4.0 && dt < Duration::from_secs(10);
    report(5, "Cauchy continuation, 256 nodes", ok, summary(&r, dt))
}

fn criterion_6_max_principle() -> bool {
    let (r, dt) = timed(|| oracle::max_principle(&cfg(Some(50), None)).unwrap());
    let ok = r.passed && r.checks == 1000 && r.metrics["patches"] == 20.0;
    report(6, "maximum principle, 50 functions x 20 patches", ok, summary(&r, dt))
}

fn criterion_7_pflug() -> bool {
    let (r, dt) = timed(|| oracle::pflug(&cfg(Some(10_000), None)).unwrap());
    let ok = r.passed && r.failures == 0;
    report(7, "growth inequality, 1e4 samples", ok, summary(&r, dt))
}

fn criterion_8_spacelike_complement() -> bool {
    let (r, dt) = timed(|| oracle::spacelike_complement(&cfg(Some(10_000), None)).unwrap());
    let ok = r.passed && r.metrics["interior_samples"] >= 1000.0;
    report(8, "spacelike complement vs sampling, 1e4 points", ok, summary(&r, dt))
}

fn criterion_9_massgap() -> bool {
    let ((r, canon), dt) = timed(|| {
        let r = oracle::massgap(&cfg(Some(20), None)).unwrap();
        let h = SpectrumHypothesis::new(1.0, 2.0, RealPoint2::new(1.0, 0.0), 0.1).unwrap();
        let w = massgap_contradiction(&h).unwrap().unwrap();
        let closed = 5.0 - 4.0 * w.theta.cosh();
        (r, (w.q_square - closed).abs())
    });
    let ok = r.passed && canon <= MASSGAP_TOL && dt < Duration::from_secs(1);
    report(9, "mass-gap detector", ok, format!("{} closed_form_dev={canon:.3e}", summary(&r, dt)))
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_inversion,
        criterion_2_mu_cone_oracle,
        criterion_3_band_boundary,
        criterion_4_shell_complement,
        criterion_5_cauchy,
        criterion_6_max_principle,
        criterion_7_pflug,
        criterion_8_spacelike_complement,
        criterion_9_massgap,
    ];
    let passed = criteria.iter().filter(|c| c()).count();
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
