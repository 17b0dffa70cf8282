//! Acceptance criteria, one test per criterion. Every check prints a
//! `PASS`/`FAIL` line; a test fails if any of its checks fails.

use std::cell::Cell;
use std::io::Write;
use std::process::Command;

use num_complex::Complex64;
use proptest::test_runner::{Config, TestRunner};

use eit_faraday::doppler::{self, DopplerConfig};
use eit_faraday::figures::{self, Figure};
use eit_faraday::params::{ModelParams, Polarization, ShiftMode, VelocityClass};
use eit_faraday::response::{self, resonant_closed_form, susceptibility, transfer_pair};
use eit_faraday::search::{self, Extremum};
use eit_faraday::sensitivity::{self, MultiphotonInputs, PhysicalConstants};
use eit_faraday::stats;
use eit_faraday::sweep::{self, Axis, Observable};

struct Criterion {
    id: u32,
    failed: Vec<String>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Criterion { id, failed: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        emit(&format!("{} criterion {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, self.id));
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn note(&self, name: &str, detail: String) {
        emit(&format!("INFO criterion {:>2} {name}: {detail}", self.id));
    }

    fn finish(self) {
        let verdict = if self.failed.is_empty() { "PASS" } else { "FAIL" };
        emit(&format!("{verdict} criterion {:>2}", self.id));
        assert!(self.failed.is_empty(), "criterion {} failed: {:?}", self.id, self.failed);
    }
}

/// Writes past the test harness's output capture so passing criteria show too.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn consts() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn column_max(t: &sweep::SweepTable, name: &str) -> (f64, f64) {
    let col = t.column(name).unwrap();
    let i = (0..col.len()).fold(0, |b, i| if col[i] > col[b] { i } else { b });
    (t.axis[i], col[i])
}

#[test]
fn criterion_01_empty_cavity_identity() {
    let mut c = Criterion::new(1);
    let p = ModelParams::bare_cavity().with_delta(0.0);
    let r = response::response(&p).unwrap();
    let o = stats::outcome_probabilities(&p, VelocityClass::AT_REST).unwrap();
    c.check(
        "t+ = t- = 1",
        within(r.t_plus, 1.0, 1e-12) && within(r.t_minus, 1.0, 1e-12),
        format!("t+ = {}, t- = {}", r.t_plus, r.t_minus),
    );
    c.check(
        "phi+ = phi- = 0",
        r.phi_plus.abs() <= 1e-12 && r.phi_minus.abs() <= 1e-12,
        format!("phi+ = {}, phi- = {}", r.phi_plus, r.phi_minus),
    );
    c.check("p_V = 1", within(o.p_v, 1.0, 1e-12), format!("p_V = {}", o.p_v));
    c.finish();
}

#[test]
fn criterion_02_fig2_transmission_peak() {
    let mut c = Criterion::new(2);
    let tables = figures::figure_tables(Figure::Fig2, &ModelParams::fig2(), &DopplerConfig::default(), &consts()).unwrap();
    let t = &tables[0].1;
    let (xp, plus) = column_max(t, "t2_plus");
    let (xm, minus) = column_max(t, "t2_minus");
    c.check(
        "peak t+^2 = 0.896 +- 0.010",
        within(plus, 0.896, 0.010),
        format!("max t+^2 = {plus:.6} at delta_p = {xp}"),
    );
    c.check(
        "peak t-^2 = 0.896 +- 0.010",
        within(minus, 0.896, 0.010),
        format!("max t-^2 = {minus:.6} at delta_p = {xm}"),
    );
    let mid = t.column("t2_plus").unwrap()[1000];
    c.note("t+^2 = t-^2 at delta_p = 0", format!("{mid:.6}"));
    c.finish();
}

#[test]
fn criterion_03_transparency_width() {
    let mut c = Criterion::new(3);
    for (label, p, measured_target, analytic_target) in [
        ("fig2", ModelParams::fig2(), 0.04, 0.041),
        ("improved", ModelParams::improved(), 5e-3, 5.5e-3),
    ] {
        let analytic = response::transparency_width_analytic(&p).unwrap();
        for pol in Polarization::BOTH {
            let w = response::transparency_width_measured(&p, pol).unwrap();
            c.check(
                &format!("{label} measured HWHM {pol:?} within 20% of {measured_target}"),
                rel(w, measured_target) <= 0.20,
                format!("{w:.6e} ({:+.1}%)", 100.0 * (w / measured_target - 1.0)),
            );
        }
        c.check(
            &format!("{label} analytic width = {analytic_target}"),
            rel(analytic, analytic_target) <= 1e-12,
            format!("{analytic:.6e}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_04_faraday_angle() {
    let mut c = Criterion::new(4);
    let base = response::response(&ModelParams::fig2()).unwrap().faraday;
    let improved = response::response(&ModelParams::improved()).unwrap().faraday;
    c.check("fig2 |phi| in [0.24, 0.28]", (0.24..=0.28).contains(&base.abs()), format!("{:.6}", base.abs()));
    c.check(
        "improved |phi| at delta = 1e-3 in [0.16, 0.21]",
        (0.16..=0.21).contains(&improved.abs()),
        format!("{:.6}", improved.abs()),
    );
    let sb = response::small_field_faraday(&ModelParams::fig2()).unwrap();
    let si = response::small_field_faraday(&ModelParams::improved()).unwrap();
    c.check("small-field fig2 = 0.25", within(sb, 0.25, 1e-12), format!("{sb}"));
    c.check("small-field improved = 0.20", within(si, 0.20, 1e-12), format!("{si}"));
    c.finish();
}

#[test]
fn criterion_05_closed_form_equivalence() {
    let mut c = Criterion::new(5);
    for (label, base) in [("fig2", ModelParams::fig2()), ("improved", ModelParams::improved())] {
        let base = base.with_gamma_prime(0.0);
        let (mut dt, mut dphi) = (0.0f64, 0.0f64);
        for d in search::logspace(1e-4, 0.5, 200) {
            let p = base.with_delta(d);
            let full = response::response(&p).unwrap();
            let closed = resonant_closed_form(&p).unwrap();
            dt = dt.max((full.t_plus - closed.t_plus).abs()).max((full.t_minus - closed.t_minus).abs());
            dphi = dphi
                .max((full.phi_plus - closed.phi_plus).abs())
                .max((full.phi_minus - closed.phi_minus).abs());
        }
        c.check(
            &format!("{label}: max |dt|, |dphi| <= 1e-10 over 200 log points"),
            dt <= 1e-10 && dphi <= 1e-10,
            format!("|dt| = {dt:.3e}, |dphi| = {dphi:.3e}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_06_outcome_statistics() {
    let mut c = Criterion::new(6);
    let p = ModelParams::fig2();
    let k = consts();
    let zero = stats::outcome_probabilities(&p.with_delta(0.0), VelocityClass::AT_REST).unwrap();
    c.check("p_H(0) = 0", zero.p_h.abs() <= 1e-12, format!("{:e}", zero.p_h));
    for (side, lo, hi) in [("+", 0.0, 0.2), ("-", -0.2, 0.0)] {
        let m = sweep::observable_extremum(&p, Axis::Delta, Observable::PH, lo, hi, Extremum::Max, None, &k).unwrap();
        c.check(
            &format!("max p_H ({side}) = 0.272 +- 0.010"),
            within(m.value, 0.272, 0.010),
            format!("{:.6}", m.value),
        );
        c.check(
            &format!("argmax |delta| ({side}) = 0.0425 +- 0.003"),
            within(m.x.abs(), 0.0425, 0.003),
            format!("{:.6}", m.x),
        );
    }
    c.finish();
}

#[test]
fn criterion_07_fisher_expansion() {
    let mut c = Criterion::new(7);
    for (label, p, target) in [
        ("fig3", ModelParams::fig2(), 5000.0),
        ("improved", ModelParams::improved(), 320_000.0),
    ] {
        let p = p.with_gamma_prime(0.0).with_delta(1e-4);
        let expansion = stats::fisher_small_field_expansion(&p).unwrap();
        let f = stats::fisher_information(&p, VelocityClass::AT_REST).unwrap().f_total;
        c.note(&format!("{label} expansion value"), format!("{expansion}"));
        c.check(
            &format!("{label}: F(1e-4, gamma'=0) within 1% of {target}"),
            rel(f, target) <= 0.01,
            format!("{f:.4} ({:+.2}%)", 100.0 * (f / target - 1.0)),
        );
    }
    c.finish();
}

fn trapezoid_average(f: impl Fn(f64) -> f64, width: f64, points: usize) -> f64 {
    let xs = search::linspace(-6.0 * width, 6.0 * width, points);
    let h = xs[1] - xs[0];
    let vals: Vec<f64> = xs.iter().map(|&x| f(x) * (-(x / width).powi(2)).exp()).collect();
    let inner: f64 = vals[1..points - 1].iter().sum();
    (inner + 0.5 * (vals[0] + vals[points - 1])) * h / (std::f64::consts::PI.sqrt() * width)
}

#[test]
fn criterion_08_doppler_machinery() {
    let mut c = Criterion::new(8);
    let k = consts();
    let cfg = DopplerConfig::default();
    let width = cfg.width_in_gamma(k.gamma_si).unwrap();
    c.note("Doppler width", format!("{width:.6} gamma"));

    let constant = doppler::doppler_average(|_| Ok(3.25), &cfg, k.gamma_si).unwrap();
    c.check("average of a constant", within(constant, 3.25, 1e-12), format!("{constant}"));

    let second = doppler::doppler_average(|kv| Ok(kv * kv), &cfg, k.gamma_si).unwrap();
    c.check(
        "second moment = width^2/2",
        rel(second, width * width / 2.0) <= 1e-10,
        format!("rel err {:.3e}", rel(second, width * width / 2.0)),
    );

    let base = ModelParams::fig2();
    for d in [0.005, 0.02, 0.05] {
        let p = base.with_delta(d);
        let f64_ = doppler::averaged_fisher(&p, &cfg, k.gamma_si).unwrap().f_total;
        let f128 = doppler::averaged_fisher(&p, &cfg.with_order(128), k.gamma_si).unwrap().f_total;
        c.check(
            &format!("order 64 vs 128 at delta = {d}"),
            rel(f64_, f128) < 1e-8,
            format!("rel {:.3e}", rel(f64_, f128)),
        );
        let oracle = trapezoid_average(
            |kv| {
                stats::fisher_information(&p, VelocityClass::new(kv, ShiftMode::Copropagating))
                    .unwrap()
                    .f_total
            },
            width,
            100_000,
        );
        c.check(
            &format!("Gauss-Hermite vs trapezoid at delta = {d}"),
            rel(f64_, oracle) < 1e-6,
            format!("GH {f64_:.8} trapezoid {oracle:.8} rel {:.3e}", rel(f64_, oracle)),
        );
    }
    c.finish();
}

#[test]
fn criterion_09_horizontal_fisher() {
    let mut c = Criterion::new(9);
    let k = consts();
    let tables = figures::figure_tables(Figure::Fig4, &ModelParams::fig2(), &DopplerConfig::default(), &k).unwrap();
    let t = &tables[0].1;
    let (x, peak) = column_max(t, "fisher_h_doppler");
    c.check(
        "Doppler-averaged F_H peak within 15% of 2000 (copropagating)",
        rel(peak, 2000.0) <= 0.15,
        format!("{peak:.3} at delta = {x} ({:+.1}%)", 100.0 * (peak / 2000.0 - 1.0)),
    );

    let p = ModelParams::fig2().with_delta(1e-4);
    let plateau = stats::fisher_h(&p, VelocityClass::AT_REST).unwrap();
    let r = response::response(&p).unwrap();
    // p_H ~ t^2 sin^2(25 delta)  =>  (dp_H/d delta)^2 / p_H -> 4 * 25^2 * t^2
    let oracle = 4.0 * 625.0 * r.t_plus * r.t_plus;
    c.check(
        "Doppler-free plateau within 10% of the small-angle oracle",
        rel(plateau, oracle) <= 0.10,
        format!("F_H(1e-4) = {plateau:.4}, oracle {oracle:.4} ({:+.2}%)", 100.0 * (plateau / oracle - 1.0)),
    );
    c.check(
        "Doppler-free plateau ~ 2250 (within 10%)",
        rel(plateau, 2250.0) <= 0.10,
        format!("{plateau:.4}"),
    );
    c.finish();
}

fn detected(p: &ModelParams, x: f64) -> [f64; 2] {
    let d = stats::outcome_probabilities(&p.with_delta(x), VelocityClass::AT_REST).unwrap();
    [d.p_h, d.p_v]
}

/// Romberg table over central differences with steps h, h/2, h/4, h/8.
fn richardson(p: &ModelParams, x: f64, h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    let central = |h: f64| {
        let (u, d) = (detected(p, x + h), detected(p, x - h));
        let dh = (u[0] - d[0]) / (2.0 * h);
        let dv = (u[1] - d[1]) / (2.0 * h);
        [dh, dv, -(dh + dv)]
    };
    for (k, slot) in out.iter_mut().enumerate() {
        let mut row: Vec<f64> = (0..4).map(|j| central(h / f64::from(1 << j))[k]).collect();
        let mut factor = 4.0;
        while row.len() > 1 {
            row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
            factor *= 4.0;
        }
        *slot = row[0];
    }
    out
}

#[test]
fn criterion_10_derivative_validation() {
    let mut c = Criterion::new(10);
    let p = ModelParams::fig2();
    let mut worst = (0.0f64, 0.0, 0usize);
    for x in search::linspace(-0.2, 0.2, 100) {
        let s = stats::d_prob_d_delta(&p.with_delta(x), VelocityClass::AT_REST).unwrap();
        let reference = richardson(&p, x, 1e-3);
        for (k, (a, b)) in s.as_array().iter().zip(reference).enumerate() {
            let e = (a - b).abs() / b.abs().max(1e-12);
            if e > worst.0 {
                worst = (e, x, k);
            }
        }
    }
    c.check(
        "central differences within 1e-6 relative of Richardson",
        worst.0 <= 1e-6,
        format!("worst rel {:.3e} at delta = {} (outcome {})", worst.0, worst.1, ["H", "V", "0"][worst.2]),
    );
    c.finish();
}

#[test]
fn criterion_11_property_suite() {
    let mut c = Criterion::new(11);
    let draws = 10_000u32;
    let counts: [Cell<u32>; 7] = Default::default();
    let worst_im = Cell::new(f64::MIN);
    let strategy = (
        0.0f64..400.0,
        0.05f64..3.0,
        0.2f64..10.0,
        0.0f64..0.1,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -0.5f64..0.5,
    );
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: draws,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner
        .run(&strategy, |(g2n, omega, kappa, gp, dp, dd, dc, delta)| {
            let p = ModelParams {
                g2n,
                omega,
                kappa,
                gamma_prime: gp,
                delta_p: dp,
                delta_d: dd,
                delta_c: dc,
                delta,
                ..ModelParams::fig2()
            };
            let bump = |i: usize| counts[i].set(counts[i].get() + 1);
            let (tp, tm) = transfer_pair(&p, VelocityClass::AT_REST).unwrap();
            if tp.norm() > 1.0 + 1e-12 || tm.norm() > 1.0 + 1e-12 {
                bump(0);
            }
            let chis: Vec<Complex64> = Polarization::BOTH
                .iter()
                .map(|&pol| susceptibility(&p, pol, VelocityClass::AT_REST).unwrap())
                .collect();
            for chi in &chis {
                worst_im.set(worst_im.get().max(chi.im));
            }
            if chis.iter().any(|chi| chi.im > 1e-12) {
                bump(1);
            }
            if chis.iter().any(|chi| chi.im < -1e-12) {
                bump(2);
            }
            let o = stats::outcome_probabilities(&p, VelocityClass::AT_REST).unwrap();
            if o.p_h + o.p_v > 1.0 + 1e-15 {
                bump(3);
            }
            let f = stats::fisher_information(&p, VelocityClass::AT_REST).unwrap();
            if f.f_h > f.f_total + 1e-9 {
                bump(4);
            }
            let res = ModelParams {
                delta_p: 0.0,
                delta_d: 0.0,
                delta_c: 0.0,
                ..p
            };
            let a = stats::outcome_probabilities(&res, VelocityClass::AT_REST).unwrap();
            let b = stats::outcome_probabilities(&res.with_delta(-delta), VelocityClass::AT_REST).unwrap();
            if a.as_array().iter().zip(b.as_array()).any(|(x, y)| (x - y).abs() > 1e-12) {
                bump(5);
            }
            let fa = stats::fisher_information(&res, VelocityClass::AT_REST).unwrap();
            let fb = stats::fisher_information(&res.with_delta(-delta), VelocityClass::AT_REST).unwrap();
            let even = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(y.abs()) + 1e-9;
            if !even(fa.f_total, fb.f_total) || !even(fa.f_h, fb.f_h) {
                bump(6);
            }
            Ok(())
        })
        .unwrap();
    let n = |i: usize| counts[i].get();
    c.check("|T+-| <= 1 + 1e-12", n(0) == 0, format!("{} of {draws} violate", n(0)));
    c.check(
        "Im chi <= 1e-12 (as stated)",
        n(1) == 0,
        format!("{} of {draws} draws have Im chi > 1e-12 (max Im chi = {:.3e})", n(1), worst_im.get()),
    );
    c.note(
        "Im chi >= -1e-12 (passive-medium sign)",
        format!("{} of {draws} violate", n(2)),
    );
    c.check("p_H + p_V <= 1", n(3) == 0, format!("{} of {draws} violate", n(3)));
    c.check("F_H <= F + 1e-9", n(4) == 0, format!("{} of {draws} violate", n(4)));
    c.check("outcome probabilities even in delta", n(5) == 0, format!("{} of {draws} violate", n(5)));
    c.check("Fisher information even in delta", n(6) == 0, format!("{} of {draws} violate", n(6)));
    c.finish();
}

#[test]
fn criterion_12_multiphoton_sensitivity() {
    let mut c = Criterion::new(12);
    let k = consts();
    let cfg = k.doppler_config();
    let inputs = MultiphotonInputs::new(1e-3, 1e-3);
    let base = sensitivity::multiphoton_sensitivity(&ModelParams::fig2(), Some(&cfg), &k, &inputs).unwrap();
    let improved = sensitivity::multiphoton_sensitivity(&ModelParams::improved(), Some(&cfg), &k, &inputs).unwrap();
    let fmt = |r: &sensitivity::SensitivityReport| {
        format!(
            "S = {:.3} fT/rtHz at delta = {:.4e} (t^2 = {:.4}, phi = {:.4}, F_H = {:.1})",
            r.multiphoton_s * 1e15,
            r.operating_delta,
            r.transmissions[0],
            r.faraday,
            r.fisher_h
        )
    };
    let factor2 = |s: f64, target: f64| s / target <= 2.0 && target / s <= 2.0;
    c.check("base within 2x of 16.78 fT/rtHz", factor2(base.multiphoton_s, 16.78e-15), fmt(&base));
    c.check("improved within 2x of 4.79 fT/rtHz", factor2(improved.multiphoton_s, 4.79e-15), fmt(&improved));
    let ratio = improved.multiphoton_s / base.multiphoton_s;
    c.check(
        "S_improved / S_base = 0.285 +- 30%",
        rel(ratio, 0.285) <= 0.30,
        format!("{ratio:.4}"),
    );
    c.note(
        "small-delta values",
        format!(
            "base {:.4} fT/rtHz, improved {:.4} fT/rtHz",
            base.small_delta_multiphoton_s * 1e15,
            improved.small_delta_multiphoton_s * 1e15
        ),
    );
    c.finish();
}

#[test]
fn criterion_13_single_photon_sensitivity() {
    let mut c = Criterion::new(13);
    let k = consts();
    let f_phys = sensitivity::fisher_to_physical(2256.0, &k);
    let invariant: Vec<f64> = [1.0, 37.0, 1e3, 1e6]
        .iter()
        .map(|&r| sensitivity::single_photon_sensitivity(f_phys, r).unwrap() * r.sqrt())
        .collect();
    let spread = invariant.iter().map(|v| rel(*v, invariant[0])).fold(0.0, f64::max);
    c.check("S * sqrt(rate) invariant", spread <= 1e-12, format!("max rel spread {spread:.3e}"));

    // S = 1/sqrt(rate F) on the small-delta path; F ~ (2/kappa^2)(g2n/Omega^2)^2
    let s_at = |g2n: f64, omega: f64| {
        let p = ModelParams {
            g2n,
            omega,
            gamma_prime: 0.0,
            delta: 1e-5,
            ..ModelParams::fig2()
        };
        let f = stats::fisher_information(&p, VelocityClass::AT_REST).unwrap().f_total;
        sensitivity::single_photon_sensitivity(sensitivity::fisher_to_physical(f, &k), 1.0).unwrap()
    };
    let reference = s_at(100.0, 1.0);
    let mut worst = 0.0f64;
    for (g2n, omega) in [(200.0, 1.0), (400.0, 1.0), (100.0, 0.5), (200.0, 0.5), (400.0, 2.0)] {
        let predicted = reference * (omega * omega / 1.0) * (100.0 / g2n);
        worst = worst.max(rel(s_at(g2n, omega), predicted));
    }
    c.check(
        "S proportional to Omega^2/g2N on the expansion path (10%)",
        worst <= 0.10,
        format!("worst deviation {:.2}%", 100.0 * worst),
    );

    let calibrate = || {
        let cfg = k.doppler_config();
        let t = figures::figure_tables(Figure::Fig3, &ModelParams::fig2(), &cfg, &k).unwrap();
        let (x, peak) = column_max(&t[1].1, "fisher_doppler");
        let rate = sensitivity::calibrate_repetition_rate(2.3e-9, sensitivity::fisher_to_physical(peak, &k)).unwrap();
        (x, peak, rate)
    };
    let (x, peak, first) = calibrate();
    let (_, _, second) = calibrate();
    c.note(
        "calibrated repetition rate for 2.3 nT/rtHz",
        format!("{first:.6e} /s (Doppler-averaged F peak {peak:.3} at delta = {x})"),
    );
    c.check("calibration identical across runs", rel(second, first) <= 1e-6, format!("{second:.6e}"));
    c.finish();
}

fn reproduce(fig: &str, workers: usize) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_eit-faraday"))
        .args(["reproduce", fig, "--workers", &workers.to_string(), "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_14_determinism() {
    let mut c = Criterion::new(14);
    for fig in ["fig2", "fig3", "fig4"] {
        let a = reproduce(fig, 4);
        let b = reproduce(fig, 4);
        let one = reproduce(fig, 1);
        let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
        c.check(&format!("{fig}: two runs byte-identical"), a == b, format!("{names:?}"));
        c.check(&format!("{fig}: 1 vs 4 workers byte-identical"), a == one, format!("{names:?}"));
    }
    c.finish();
}
