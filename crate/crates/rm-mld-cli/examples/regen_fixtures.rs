//! Regenerates the derived fixtures (witness family files, the systematic
//! generator, and the checksum manifest) from the core constructions.
//! The generator fixture is additionally diffed against an independent
//! hand transcription before being written.
//!
//! Run from the crate directory: `cargo run --example regen_fixtures`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use rm_mld_cli::formats::{family_to_string, matrix_to_string};
use rm_mld_core::code::CodeSpec;
use rm_mld_core::families::{
    load_witnesses, WITNESS_RM24_6, WITNESS_RM24_7, WITNESS_RM25_TYPE1_30,
};

/// Hand transcription of the systematic generator for the first orbit
/// representative, kept independent of the computation it validates.
const TRANSCRIBED_GENERATOR: [&str; 16] = [
    "10000000000000001111010111110001",
    "01000000000000000111101011111001",
    "00100000000000000011110101111101",
    "00010000000000000001111010111111",
    "00001000000000001111101010101110",
    "00000100000000001000100010100111",
    "00000010000000001011000110100010",
    "00000001000000001010110100100001",
    "00000000100000000101011010010001",
    "00000000010000000010101101001001",
    "00000000001000000001010110100101",
    "00000000000100000000101011010011",
    "00000000000010001111000010011000",
    "00000000000001000111100001001100",
    "00000000000000100011110000100110",
    "00000000000000011110101111100011",
];

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    // Systematic generator for the first orbit representative.
    let spec = CodeSpec::with_default_ordering(2, 5).unwrap();
    let j = spec
        .information_set(&rm_mld_core::analysis::REPRESENTATIVE_INFO_SETS[0])
        .unwrap();
    let gen = spec.systematic_form(&j).unwrap();
    let computed = matrix_to_string(&gen);
    let transcribed: String = TRANSCRIBED_GENERATOR
        .iter()
        .map(|r| format!("{r}\n"))
        .collect();
    assert_eq!(
        computed, transcribed,
        "computed systematic form disagrees with the hand transcription"
    );
    fs::write(dir.join("rm25_generator_type1.txt"), &computed).unwrap();

    // Witness family files.
    let witnesses = load_witnesses().unwrap();
    fs::write(
        dir.join("rm25_type1_30.fam"),
        family_to_string(&witnesses[WITNESS_RM25_TYPE1_30]),
    )
    .unwrap();
    fs::write(
        dir.join("rm24_7.fam"),
        family_to_string(&witnesses[WITNESS_RM24_7]),
    )
    .unwrap();
    fs::write(
        dir.join("rm24_6.fam"),
        family_to_string(&witnesses[WITNESS_RM24_6]),
    )
    .unwrap();

    // Checksum manifest over every fixture file.
    let mut names: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "checksums.txt")
        .collect();
    names.sort();
    let mut manifest = String::new();
    for name in names {
        let bytes = fs::read(dir.join(&name)).unwrap();
        let digest = Sha256::digest(&bytes);
        let mut hex = String::new();
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        let _ = writeln!(manifest, "{hex}  {name}");
    }
    fs::write(dir.join("checksums.txt"), manifest).unwrap();
    println!("fixtures regenerated");
}
