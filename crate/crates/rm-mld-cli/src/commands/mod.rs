//! Subcommand implementations. Each returns the process exit code; usage
//! and input problems surface as errors (exit 2 at the top level).

mod simulate;
pub mod tables;
mod verify;

pub use simulate::cmd_simulate;
pub use tables::cmd_tables;
pub use verify::cmd_verify;

use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use rm_mld_core::analysis::REPRESENTATIVE_INFO_SETS;
use rm_mld_core::bounds::{bound_closed_forms, solve_ilp};
use rm_mld_core::code::{encode, CodeSpec, InformationSet};
use rm_mld_core::decoder::{
    compile_full, compile_info, compile_punctured, decode_info_checked, punctured_position,
    CheckSystem,
};
use rm_mld_core::families::{
    construct_full_cover, construct_naive, construct_rm1, construct_upper_a, construct_upper_b,
    load_witnesses, search_family, AdmissibleFamily, Scope,
};
use rm_mld_core::gf2::{lex_ordering, power_ordering, Word};

use crate::cli::{CodeArgs, FormatArg, OrderingArg};
use crate::formats::{family_from_str, family_to_string, parse_positions, word_from_str};
use crate::report::Format;
use crate::{EXIT_MISMATCH, EXIT_OK};

pub fn build_spec(args: &CodeArgs) -> Result<CodeSpec> {
    let modulus = match &args.modulus {
        None => None,
        Some(hex) => Some(u32::from_str_radix(hex, 16).context("bad --modulus hex value")?),
    };
    let spec = match (args.ordering, modulus) {
        (OrderingArg::Auto, None) => CodeSpec::with_default_ordering(args.r, args.m)?,
        (OrderingArg::Auto | OrderingArg::Power, Some(modulus)) => CodeSpec::new(
            args.r,
            args.m,
            power_ordering(args.m, modulus)?,
        )?,
        (OrderingArg::Power, None) => CodeSpec::new(
            args.r,
            args.m,
            power_ordering(args.m, rm_mld_core::gf2::default_modulus(args.m)?)?,
        )?,
        (OrderingArg::Lex, None) => CodeSpec::new(args.r, args.m, lex_ordering(args.m)?)?,
        (OrderingArg::Lex, Some(_)) => bail!("--modulus only applies to the power ordering"),
    };
    Ok(spec)
}

/// Resolves `canonical`, `type1`..`type7`, `@file` or a literal set.
pub fn resolve_info_set(spec: &CodeSpec, selector: &str) -> Result<InformationSet> {
    if selector == "canonical" {
        let basis: Vec<u16> = (0..spec.m()).map(|b| 1 << b).collect();
        return Ok(spec.canonical_information_set(&basis)?);
    }
    if let Some(n) = selector.strip_prefix("type") {
        let idx: usize = n.parse().context("bad representative number")?;
        if !(1..=7).contains(&idx) {
            bail!("representatives are type1..type7");
        }
        if spec.r() != 2 || spec.m() != 5 {
            bail!("type1..type7 are 16-position representatives for r = 2, m = 5");
        }
        return Ok(spec.information_set(&REPRESENTATIVE_INFO_SETS[idx - 1])?);
    }
    let literal = if let Some(path) = selector.strip_prefix('@') {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    } else {
        selector.to_string()
    };
    let positions = parse_positions(literal.trim())?;
    Ok(spec.information_set(&positions)?)
}

/// Resolves a family selector against a spec and information set.
pub fn resolve_family(
    spec: &CodeSpec,
    selector: &str,
    info_selector: &str,
    seed: u64,
    budget: u64,
    out: &mut dyn Write,
) -> Result<AdmissibleFamily> {
    if let Some(name) = selector.strip_prefix("witness:") {
        let witnesses = load_witnesses()?;
        let fam = witnesses
            .get(name)
            .ok_or_else(|| anyhow!("unknown witness {name:?}"))?;
        if fam.spec() != spec {
            bail!("witness {name} is for r = {}, m = {} under its own ordering; pass matching --r/--m/--ordering",
                fam.spec().r(), fam.spec().m());
        }
        return Ok(fam.clone());
    }
    if let Some(kind) = selector.strip_prefix("construct:") {
        return Ok(match kind {
            "full" => construct_full_cover(spec)?,
            "naive" => {
                let j = resolve_info_set(spec, info_selector)?;
                construct_naive(spec, &j)?
            }
            "shared" => construct_upper_a(spec)?,
            "pruned" => construct_upper_b(spec)?,
            "rm1" => construct_rm1(spec.m())?,
            other => bail!("unknown construction {other:?} (full, naive, shared, pruned, rm1)"),
        });
    }
    if selector == "search" {
        let j = resolve_info_set(spec, info_selector)?;
        let outcome = search_family(spec, &j, budget, seed)?;
        writeln!(
            out,
            "# search: size {} after {} placements (seed {seed}){}",
            outcome.family.len(),
            outcome.iterations_used,
            if outcome.found_by_search {
                ""
            } else {
                ", constructive fallback"
            }
        )?;
        return Ok(outcome.family);
    }
    if let Some(path) = selector.strip_prefix('@') {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let fam = family_from_str(&text)?;
        if fam.spec() != spec {
            bail!("family file {path} is for different code parameters or ordering");
        }
        return Ok(fam);
    }
    bail!("unknown family selector {selector:?}");
}

/// Reads `-` (stdin), `@file`, or a literal bit string.
pub fn read_bits_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else if let Some(path) = input.strip_prefix('@') {
        Ok(std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?)
    } else {
        Ok(input.to_string())
    }
}

pub fn cmd_encode(
    code: &CodeArgs,
    info_selector: &str,
    input: &str,
    format: FormatArg,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = build_spec(code)?;
    let info_set = resolve_info_set(&spec, info_selector)?;
    let gen = spec.systematic_form(&info_set)?;
    let bits = read_bits_input(input)?;
    let info = word_from_str(&bits, spec.k())?;
    let codeword = encode(&gen, &info)?;
    match Format::from(format) {
        Format::Text => writeln!(out, "{codeword}")?,
        Format::Records => writeln!(
            out,
            "{}",
            json!({
                "record": "encode",
                "r": spec.r(),
                "m": spec.m(),
                "info": info.to_string(),
                "codeword": codeword.to_string(),
            })
        )?,
    }
    Ok(EXIT_OK)
}

/// Builds the requested check system plus, when the scope allows it, the
/// systematic generator used for the consistency flag.
#[allow(clippy::too_many_arguments)]
fn build_system(
    spec: &CodeSpec,
    family_selector: &str,
    info_selector: &str,
    punctured: bool,
    seed: u64,
    budget: u64,
    out: &mut dyn Write,
) -> Result<CheckSystem> {
    if punctured {
        let fam = if family_selector == "full" {
            bail!("punctured decoding needs an information-position family whose flats avoid the zero point (try witness:rm25-type1-30)");
        } else {
            resolve_family(spec, family_selector, info_selector, seed, budget, out)?
        };
        Ok(compile_punctured(&fam)?)
    } else if family_selector == "full" {
        Ok(compile_full(spec)?)
    } else {
        let fam = resolve_family(spec, family_selector, info_selector, seed, budget, out)?;
        match fam.scope() {
            Scope::AllPositions => Ok(compile_full(spec)?),
            Scope::Info(_) => Ok(compile_info(spec, &fam)?),
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_decode(
    code: &CodeArgs,
    family_selector: &str,
    info_selector: &str,
    punctured: bool,
    input: &str,
    seed: u64,
    budget: u64,
    format: FormatArg,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = build_spec(code)?;
    let sys = build_system(
        &spec,
        family_selector,
        info_selector,
        punctured,
        seed,
        budget,
        out,
    )?;
    let bits = read_bits_input(input)?;
    let received = if punctured {
        // 2^m - 1 symbols; the punctured coordinate re-enters as zero and
        // is never consulted by the checks.
        let short = word_from_str(&bits, spec.n() - 1)?;
        let zero_pos = punctured_position(&spec) as usize;
        let mut full = Word::zero(spec.n());
        let mut src = 0;
        for pos in 0..spec.n() {
            if pos == zero_pos {
                continue;
            }
            if short.get(src) {
                full.set(pos, true);
            }
            src += 1;
        }
        full
    } else {
        word_from_str(&bits, spec.n())?
    };

    let outcome = sys.decode(&received);
    let (info_bits, consistent) = match sys.scope() {
        Scope::Info(info_set) => {
            let gen = spec.systematic_form(info_set)?;
            let (info, ok) = decode_info_checked(&received, &sys, &gen)?;
            (Some(info), ok)
        }
        Scope::AllPositions => {
            // All-position decode: consistent when the corrected word is a
            // codeword within distance t (checked against the dual code).
            let dual = rm_mld_core::code::generator_of_order(
                spec.m() - spec.r() - 1,
                spec.m(),
                spec.ordering(),
            );
            let is_codeword = dual.rows().iter().all(|h| !outcome.corrected.dot(h));
            let ok = is_codeword && outcome.corrected.distance(&received) <= spec.t();
            (None, ok)
        }
    };

    let flips: Vec<u16> = outcome.flips.clone();
    match Format::from(format) {
        Format::Text => {
            match &info_bits {
                Some(info) => writeln!(out, "info: {info}")?,
                None => writeln!(out, "corrected: {}", outcome.corrected)?,
            }
            writeln!(out, "flips: {}", crate::formats::format_positions(&flips))?;
            writeln!(out, "consistent: {consistent}")?;
        }
        Format::Records => {
            let record = json!({
                "record": "decode",
                "r": spec.r(),
                "m": spec.m(),
                "punctured": punctured,
                "scope": match sys.scope() { Scope::AllPositions => "all", Scope::Info(_) => "info" },
                "corrected": outcome.corrected.to_string(),
                "info": info_bits.map(|w| w.to_string()),
                "flips": flips,
                "consistent": consistent,
            });
            writeln!(out, "{record}")?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_bounds(code: &CodeArgs, format: FormatArg, out: &mut dyn Write) -> Result<i32> {
    let bounds = bound_closed_forms(code.r, code.m)?;
    let ilp = solve_ilp(code.r, code.m)?;
    match Format::from(format) {
        Format::Text => {
            let mut table = crate::report::TextTable::new(vec!["bound", "value"]);
            table.row(vec!["lower_trivial".to_string(), bounds.lower_trivial.to_string()]);
            table.row(vec!["lower_program".to_string(), ilp.objective.to_string()]);
            table.row(vec!["upper_cover".to_string(), bounds.upper_cover.to_string()]);
            table.row(vec![
                "upper_per_position".to_string(),
                bounds.upper_per_position.to_string(),
            ]);
            table.row(vec!["upper_shared".to_string(), bounds.upper_shared.to_string()]);
            table.row(vec!["upper_pruned".to_string(), bounds.upper_pruned.to_string()]);
            writeln!(out, "bounds for r={}, m={}:", code.r, code.m)?;
            write!(out, "{}", table.render())?;
            writeln!(out, "program solution x (usage 1..2^r): {:?}", ilp.x)?;
        }
        Format::Records => {
            writeln!(
                out,
                "{}",
                json!({
                    "record": "bounds",
                    "r": code.r,
                    "m": code.m,
                    "lower_trivial": bounds.lower_trivial,
                    "ilp": ilp.objective,
                    "ilp_x": ilp.x,
                    "upper_cover": bounds.upper_cover,
                    "upper_per_position": bounds.upper_per_position,
                    "upper_shared": bounds.upper_shared,
                    "upper_pruned": bounds.upper_pruned,
                })
            )?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_family(
    code: &CodeArgs,
    family_selector: &str,
    info_selector: &str,
    seed: u64,
    budget: u64,
    out_path: Option<&std::path::Path>,
    format: FormatArg,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = build_spec(code)?;
    let fam = resolve_family(&spec, family_selector, info_selector, seed, budget, out)?;
    let profile = match fam.validate() {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "INVALID family: {e}")?;
            return Ok(EXIT_MISMATCH);
        }
    };
    let gates = match fam.scope() {
        Scope::AllPositions => compile_full(&spec)?.gate_count(),
        Scope::Info(_) => compile_info(&spec, &fam)?.gate_count(),
    };
    match Format::from(format) {
        Format::Text => {
            writeln!(out, "family: {} flats, valid", fam.len())?;
            let xs: Vec<String> = (1..=profile.max_usage())
                .map(|i| format!("x{i}={}", profile.x(i)))
                .collect();
            writeln!(out, "usage profile: {}", xs.join(" "))?;
            writeln!(
                out,
                "gates: step1 {} + step2 {} = {}",
                gates.step1,
                gates.step2,
                gates.total()
            )?;
        }
        Format::Records => {
            let xs: Vec<u64> = (1..=profile.max_usage()).map(|i| profile.x(i)).collect();
            writeln!(
                out,
                "{}",
                json!({
                    "record": "family",
                    "r": spec.r(),
                    "m": spec.m(),
                    "size": fam.len(),
                    "profile": xs,
                    "gates_step1": gates.step1,
                    "gates_step2": gates.step2,
                    "gates_total": gates.total(),
                })
            )?;
        }
    }
    if let Some(path) = out_path {
        std::fs::write(path, family_to_string(&fam))
            .with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "# wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}
