//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines print in order; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use hyperhs::identities::*;
use hyperhs::korbital::*;
use hyperhs::linalg::vandermonde;
use hyperhs::quadrature::{DampingSchedule, McConfig};
use hyperhs::sampling::{RngStream, VarianceProfile};
use hyperhs::{Execution, Result, C64};

const SEED: u64 = 20240601;
const EXEC: Execution = Execution::Parallel;

const PO_REL_ERR: f64 = 1e-6;
const PO_TRIPLES: usize = 20;
const PO_BUDGET: Duration = Duration::from_secs(10);
const MODULUS_SPREAD: f64 = 0.1;
const IZ_REL_ERR: f64 = 1e-10;
const IZ_SPECTRA: usize = 50;
const IZ_BUDGET: Duration = Duration::from_secs(1);
const HS_REL_ERR: f64 = 2e-2;
const HS_EPS: f64 = 0.5;
const HS_BUDGET: Duration = Duration::from_secs(300);
const DH_REL_ERR: f64 = 1e-3;
const CHIRAL_REL_ERR: f64 = 1e-6;
const WEBER_REL_ERR: f64 = 1e-9;
const CHIRAL_SPECTRA: usize = 10;
const GW_SAMPLES: u64 = 1_000_000;
const GW_BUDGET: Duration = Duration::from_secs(120);
const MAC_K0_REL_ERR: f64 = 1e-8;
const MAC_SAMPLES: u64 = 1_000_000;
const RADIAL_RESIDUAL: f64 = 1e-3;
const RADIAL_H: f64 = 1e-3;
const RADIAL_BAND: (f64, f64) = (3.5, 4.5);
const KORB_SAMPLES: u64 = 1_000_000;
const KORB_BUDGET: Duration = Duration::from_secs(600);
const IS_REL_ERR: f64 = 1e-2;
const SADDLE_RESIDUAL: f64 = 1e-12;

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

fn c1_pseudoorthogonal() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = RngStream::new(SEED, 1);
    let mut worst: f64 = 0.0;
    let mut worst_real: f64 = 0.0;
    for _ in 0..PO_TRIPLES {
        let a1 = uniform(&mut rng, 0.2, 3.0);
        let a2 = uniform(&mut rng, 0.2, 3.0);
        let a = uniform(&mut rng, -0.95, 0.95) * (a1 * a2).sqrt();
        let r = verify_pseudoorthogonal_2x2(a1, a2, a)?;
        let want = PO_EXACT_CONSTANT * (-0.5 * (a1 * a1 + a2 * a2 - 2.0 * a * a)).exp();
        worst = worst.max((r.lhs - want).norm() / want.norm());
        worst_real = worst_real.max(r.lhs.re.abs() / r.lhs.norm());
    }
    let t = start.elapsed();
    outcome(
        worst < PO_REL_ERR && t < PO_BUDGET,
        format!("max rel err {worst:.2e} (< {PO_REL_ERR:.0e}), max |Re|/|value| {worst_real:.1e}, {PO_TRIPLES} triples in {:.2}s", t.as_secs_f64()),
    )
}

fn c2_modulus_control() -> Result<Outcome> {
    let triples = [
        (1.0, 1.0, 0.0),
        (2.0, 1.0, 0.5),
        (0.5, 1.5, 0.2),
        (1.2, 0.8, -0.6),
        (3.0, 2.0, 1.0),
    ];
    let r = negative_control_modulus_measure(&triples)?;
    let spread = r.diagnostics["ratio_spread"];
    let imag = r.diagnostics["max_imag_fraction"];
    outcome(
        spread > MODULUS_SPREAD && imag < 1e-10,
        format!(
            "ratio spread {:.1}% (> {:.0}%), max imag fraction {imag:.1e}",
            100.0 * spread,
            100.0 * MODULUS_SPREAD
        ),
    )
}

fn c3_iz_moment() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = RngStream::new(SEED, 3);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < IZ_SPECTRA {
        let n = 1 + done % 4;
        let lambda: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -2.5, 2.5)).collect();
        let reference: Vec<f64> = (0..n).map(|i| 1.0 - 0.7 * i as f64).collect();
        if vandermonde(&lambda).abs() < 1e-6 {
            continue;
        }
        let r = verify_iz_moment_identity(&lambda, &reference)?;
        worst = worst.max(r.deviation());
        done += 1;
    }
    let t = start.elapsed();
    outcome(
        worst < IZ_REL_ERR && t < IZ_BUDGET,
        format!(
            "max |ratio - 1| {worst:.2e} (< {IZ_REL_ERR:.0e}) over {IZ_SPECTRA} spectra n <= 4 in {:.3}s",
            t.as_secs_f64()
        ),
    )
}

fn c4_hs_epsilon() -> Result<Outcome> {
    let start = Instant::now();
    let sched = DampingSchedule::default();
    let opts = HsU11Options::default();
    let generic = [
        (2.0, 1.0, 0.5, 0.0),
        (1.5, 0.8, 0.3, 0.6),
        (1.0, 2.0, -0.4, 0.2),
        (0.7, 0.9, 0.1, -0.3),
        (2.5, 1.5, 0.0, 1.0),
    ];
    let mut worst: f64 = 0.0;
    for (a11, a22, re, im) in generic {
        let r = verify_pseudounitary_hs_11(&a_plus_matrix(a11, a22, C64::new(re, im)), HS_EPS, &sched, &opts)?;
        worst = worst.max(r.deviation());
    }
    // A_+ = [[1,1],[1,1]]: A = A_+ L squares to zero and Tr LA = 2
    let nil = verify_pseudounitary_hs_11(&a_plus_matrix(1.0, 1.0, C64::new(1.0, 0.0)), HS_EPS, &sched, &opts)?;
    let rhs_ok = (nil.rhs.re - (-2.0 * HS_EPS).exp()).abs() < 1e-14;
    let t = start.elapsed();
    outcome(
        worst < HS_REL_ERR && nil.deviation() < HS_REL_ERR && rhs_ok && t < HS_BUDGET,
        format!(
            "generic max |ratio - 1| {worst:.2e}, nilpotent {:.2e} (< {HS_REL_ERR:.0e}, rhs e^-1), {:.1}s",
            nil.deviation(),
            t.as_secs_f64()
        ),
    )
}

fn c5_dh() -> Result<Outcome> {
    let sched = DampingSchedule::default();
    let reference = ([1.0, -1.0], [1.0, -1.0]);
    let points = [
        ([2.0, -0.5], [1.5, -0.8]),
        ([1.4, -0.6], [1.1, -0.7]),
        ([0.5, 1.7], [0.9, -1.3]),
        ([-1.2, 0.3], [2.0, -0.4]),
        ([3.0, 1.0], [0.6, -0.6]),
    ];
    let anchor = verify_dh_coset_u11(reference.0, reference.1, reference, &sched, EXEC)?;
    let mut worst: f64 = 0.0;
    for (p, l) in points {
        let r = verify_dh_coset_u11(p, l, reference, &sched, EXEC)?;
        worst = worst.max(((r.lhs / r.rhs) / anchor.const_fit - 1.0).norm());
    }
    outcome(
        worst < DH_REL_ERR,
        format!("max const-fit drift {worst:.2e} (< {DH_REL_ERR:.0e}) over 5 points"),
    )
}

fn c6_chiral() -> Result<Outcome> {
    let mut rng = RngStream::new(SEED, 6);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < CHIRAL_SPECTRA {
        let n = 1 + done % 3;
        let a: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.2, 2.0)).collect();
        let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
        if n > 1 && vandermonde(&sq).abs() < 1e-3 {
            continue;
        }
        let reference = &[1.3, 0.4, 0.8][..n];
        worst = worst.max(verify_chiral_hs(&a, reference)?.deviation());
        done += 1;
    }
    let mut weber: f64 = 0.0;
    for a in [0.3, 0.9, 1.6, 2.4] {
        let v = chiral_moment(0, a)?;
        weber = weber.max((v / (0.5 * (-a * a).exp()) - 1.0).abs());
    }
    outcome(
        worst < CHIRAL_REL_ERR && weber < WEBER_REL_ERR,
        format!("max |ratio - 1| {worst:.2e} (< {CHIRAL_REL_ERR:.0e}) over {CHIRAL_SPECTRA} spectra; n=1 vs ½e^(-a²) {weber:.1e}"),
    )
}

fn c7_guhr_wettig() -> Result<Outcome> {
    let start = Instant::now();
    let cfg = McConfig::new(GW_SAMPLES, SEED);
    let r = verify_guhr_wettig(&[1.2, 0.5], &[1.0, 0.4], (&[1.0, 0.3], &[0.8, 0.2]), &cfg, EXEC)?;
    let t = start.elapsed();
    let sigma = r.stderr / (r.const_fit * r.rhs).norm();
    outcome(
        r.pass && t < GW_BUDGET,
        format!(
            "ratio {:.5} ± {sigma:.1e} (tol 5% + 3σ) at {GW_SAMPLES} samples, {:.1}s",
            r.ratio.re,
            t.as_secs_f64()
        ),
    )
}

fn c8_macdonald() -> Result<Outcome> {
    let grid = [0.5, 1.0, 1.5, 2.5];
    let one = McConfig::new(1, SEED);
    let mut worst: f64 = 0.0;
    let mut all = true;
    for x in grid {
        for y in grid {
            let r = verify_matrix_macdonald(&[x], &[y], (&[1.0], &[1.0]), 0.7, &one, EXEC)?;
            worst = worst.max(r.diagnostics["k0_deviation"]);
            all &= r.pass;
        }
    }
    let cfg = McConfig::new(MAC_SAMPLES, SEED);
    let two = verify_matrix_macdonald(&[1.0, 0.4], &[0.9, 0.3], (&[1.2, 0.7], &[1.0, 0.5]), 0.7, &cfg, EXEC)?;
    outcome(
        worst < MAC_K0_REL_ERR && all && two.pass,
        format!(
            "n=1 max rel err vs K0(xy) {worst:.1e} (< {MAC_K0_REL_ERR:.0e}) on 4x4 grid; n=2 ratio {:.4} (ESS {:.0}%)",
            two.ratio.re,
            100.0 * two.diagnostics["ess_fraction"]
        ),
    )
}

fn c9_radial() -> Result<Outcome> {
    let r = verify_radial_pde(&[1.0, 1.6], &[0.8, 0.3], RADIAL_H)?;
    let res = r.diagnostics["residual"];
    let conv = r.diagnostics["convergence_ratio"];
    outcome(
        res < RADIAL_RESIDUAL && (RADIAL_BAND.0..=RADIAL_BAND.1).contains(&conv),
        format!("residual {res:.2e} (< {RADIAL_RESIDUAL:.0e}) at h={RADIAL_H}, halving ratio {conv:.3}"),
    )
}

fn c10_korbital() -> Result<Outcome> {
    let start = Instant::now();
    let cfg = McConfig::new(KORB_SAMPLES, SEED);
    let held_out = [
        (0.0, 2.0, 0.0, 1usize, "eta=2"),
        (0.5, 1.0, 0.0, 1, "E=0.5"),
        (0.0, 1.0, 0.5, 2, "r=2 V=0.5"),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, eta, v, r, label) in held_out {
        let model = ModelParams::new(1, e, eta)?;
        let profile = VarianceProfile::new(1.0, v, 4, r)?;
        let rep = verify_korbital(&model, &profile, &cfg, EXEC)?;
        let sigma = rep.stderr / (rep.const_fit * rep.rhs).norm();
        ok &= rep.pass;
        parts.push(format!("{label}: {:.4}±{sigma:.1e}", rep.ratio.re));
    }
    let is = ingham_siegel_check([2.0, 0.5], [1.0, 1.0], 3, 0.0, 1.0, EXEC)?;
    let neg = ingham_siegel_check([1.0, -0.5], [1.0, 1.0], 3, 0.0, 1.0, EXEC)?;
    let t = start.elapsed();
    let is_ok = is.deviation() < IS_REL_ERR && neg.ratio.norm() < IS_REL_ERR;
    outcome(
        ok && is_ok && t < KORB_BUDGET,
        format!(
            "{} (3σ); IS ratio {:.4}, q=diag(1,-0.5) relative {:.1e} (< {IS_REL_ERR:.0e}); {:.1}s",
            parts.join(", "),
            is.ratio.re,
            neg.ratio.norm(),
            t.as_secs_f64()
        ),
    )
}

fn c11_saddle() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let j = 0.2 + 0.4 * i as f64;
        let edge = 2.0 * j.sqrt();
        for m in 0..10 {
            let e = edge * (-0.95 + 1.9 * m as f64 / 9.0);
            worst = worst.max(stationarity_residual(j, e)?);
        }
    }
    let p = saddle_point(1.0, 0.0)?;
    let l = hyperhs::linalg::from_real_diagonal(&[1.0, -1.0]);
    let anchor = hyperhs::linalg::max_abs(&(p - l)) < 1e-15;
    outcome(
        anchor && worst < SADDLE_RESIDUAL,
        format!("max residual {worst:.1e} (< {SADDLE_RESIDUAL:.0e}) on 10x10 (J, E) grid"),
    )
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("pseudoorthogonal exact constant", c1_pseudoorthogonal),
        ("modulus-measure negative control", c2_modulus_control),
        ("moment identity, exact", c3_iz_moment),
        ("epsilon-modified pseudounitary HS", c4_hs_epsilon),
        ("U(1,1) coset determinant formula", c5_dh),
        ("chiral identity", c6_chiral),
        ("unitary double integral", c7_guhr_wettig),
        ("matrix Macdonald", c8_macdonald),
        ("radial equation", c9_radial),
        ("k-orbital representation", c10_korbital),
        ("saddle point", c11_saddle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
