//! Regenerates tests/data/korbital_reference.toml.
//!
//!     cargo run --release -p hyperhs-core --example korbital_fixture > crates/core/tests/data/korbital_reference.toml

use hyperhs::korbital::{z_moment_mc, ModelParams};
use hyperhs::quadrature::McConfig;
use hyperhs::sampling::VarianceProfile;
use hyperhs::Execution;

const SAMPLES: u64 = 10_000_000;
const SEED: u64 = 20240601;

fn main() -> hyperhs::Result<()> {
    let (j, v, k, r, e, eta) = (1.0, 0.0, 4, 1, 0.0, 1.0);
    let model = ModelParams::new(1, e, eta)?;
    let profile = VarianceProfile::new(j, v, k, r)?;
    let cfg = McConfig::new(SAMPLES, SEED);
    let est = z_moment_mc(&model, &profile, &cfg, Execution::Parallel)?;
    println!("# Reference value of <|det(E + i eta/k - H)|^-2> for the k-orbital ensemble.");
    println!("# Generated by `cargo run --release -p hyperhs-core --example korbital_fixture`");
    println!(
        "# with hyperhs-core {}: z_moment_mc, seed {SEED}, chunk {}, streams 0..{}.",
        env!("CARGO_PKG_VERSION"),
        cfg.chunk,
        cfg.chunks().len()
    );
    println!("# Regression tests rerun a smaller budget on disjoint streams and compare within");
    println!("# the combined standard error.");
    println!();
    println!("[params]");
    println!("J = {j:?}\nV = {v:?}\nk = {k}\nr = {r}\nE = {e:?}\neta = {eta:?}\nn = 1");
    println!();
    println!("[sampling]");
    println!("samples = {SAMPLES}\nseed = {SEED}\nchunk = {}", cfg.chunk);
    println!();
    println!("[result]");
    println!("value = {:?}", est.estimate.value.re);
    println!("stderr = {:?}", est.estimate.stderr);
    println!("tail_share = {:?}", est.tail_share);
    Ok(())
}
