//! Seeded channel simulation: random error patterns of fixed weights
//! against the compiled decoders, with exact-correction rates.

use std::io::Write;

use anyhow::{bail, Context, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::json;

use rm_mld_core::code::{encode, restrict};
use rm_mld_core::decoder::{compile_full, compile_info};
use rm_mld_core::families::Scope;
use rm_mld_core::gf2::Word;

use crate::cli::{CodeArgs, FormatArg};
use crate::commands::{build_spec, resolve_family, resolve_info_set};
use crate::report::{Format, TextTable};
use crate::EXIT_OK;

/// 95% score interval for a binomial rate.
fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn parse_weight_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("expected A..B, got {s:?}"))?;
    let lo: usize = a.trim().parse()?;
    let hi: usize = b.trim().parse()?;
    if lo > hi {
        bail!("empty weight range {s:?}");
    }
    Ok((lo, hi))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    code: &CodeArgs,
    family_selector: &str,
    info_selector: &str,
    weights: &str,
    trials: u64,
    seed: u64,
    budget: u64,
    format: FormatArg,
    out: &mut dyn Write,
) -> Result<i32> {
    let format = Format::from(format);
    let spec = build_spec(code)?;
    let (lo, hi) = parse_weight_range(weights)?;
    if hi > spec.n() {
        bail!("weight {hi} exceeds the code length {}", spec.n());
    }

    let full_sys = compile_full(&spec)?;
    let (info_sys, info_set) = if family_selector == "full" {
        (None, resolve_info_set(&spec, info_selector)?)
    } else {
        let fam = resolve_family(&spec, family_selector, info_selector, seed, budget, out)?;
        match fam.scope().clone() {
            Scope::Info(j) => (Some(compile_info(&spec, &fam)?), j),
            Scope::AllPositions => bail!("simulation family must cover information positions"),
        }
    };
    let gen = spec.systematic_form(&info_set)?;

    writeln!(out, "# simulate r={} m={} trials={trials} seed={seed}", spec.r(), spec.m())?;
    let full_gates = full_sys.gate_count();
    writeln!(
        out,
        "# all-positions gates: {} + {} = {}",
        full_gates.step1,
        full_gates.step2,
        full_gates.total()
    )?;
    if let Some(sys) = &info_sys {
        let g = sys.gate_count();
        writeln!(out, "# info-positions gates: {} + {} = {}", g.step1, g.step2, g.total())?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = TextTable::new(vec![
        "weight",
        "full rate",
        "full 95% ci",
        "info rate",
        "info 95% ci",
    ]);
    for w in lo..=hi {
        let mut full_ok = 0u64;
        let mut info_ok = 0u64;
        for _ in 0..trials {
            let mut info = Word::zero(spec.k());
            for i in 0..spec.k() {
                info.set(i, rng.next_u32() & 1 == 1);
            }
            let codeword = encode(&gen, &info)?;
            let mut received = codeword.clone();
            // Uniform weight-w pattern by partial shuffle.
            let mut positions: Vec<usize> = (0..spec.n()).collect();
            for i in 0..w {
                let pick = i + (rng.next_u64() as usize) % (spec.n() - i);
                positions.swap(i, pick);
                received.flip(positions[i]);
            }
            if full_sys.decode(&received).corrected == codeword {
                full_ok += 1;
            }
            if let Some(sys) = &info_sys {
                if sys.decode(&received).info_bits(&info_set) == info {
                    info_ok += 1;
                }
            } else if restrict(&full_sys.decode(&received).corrected, &info_set) == info {
                info_ok += 1;
            }
        }
        let rate = |ok: u64| ok as f64 / trials.max(1) as f64;
        let (flo, fhi) = wilson_interval(full_ok, trials);
        let (ilo, ihi) = wilson_interval(info_ok, trials);
        match format {
            Format::Text => table.row(vec![
                w.to_string(),
                format!("{:.4}", rate(full_ok)),
                format!("[{flo:.4}, {fhi:.4}]"),
                format!("{:.4}", rate(info_ok)),
                format!("[{ilo:.4}, {ihi:.4}]"),
            ]),
            Format::Records => writeln!(
                out,
                "{}",
                json!({
                    "record": "simulate",
                    "r": spec.r(), "m": spec.m(),
                    "seed": seed, "trials": trials, "weight": w,
                    "full_exact": full_ok, "info_exact": info_ok,
                    "full_rate": rate(full_ok), "info_rate": rate(info_ok),
                    "full_ci": [flo, fhi], "info_ci": [ilo, ihi],
                })
            )?,
        }
    }
    if format == Format::Text {
        write!(out, "{}", table.render())?;
    }
    Ok(EXIT_OK)
}
