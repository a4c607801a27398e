use clap::Parser;

use rm_mld_cli::cli::{Command, RmMld};
use rm_mld_cli::commands;
use rm_mld_cli::EXIT_USAGE;

fn main() {
    let args = RmMld::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match &args.command {
        Command::Encode {
            code,
            info_set,
            input,
            format,
        } => commands::cmd_encode(code, info_set, input, *format, &mut stdout),
        Command::Decode {
            code,
            family,
            info_set,
            punctured,
            input,
            seed,
            budget,
            format,
        } => commands::cmd_decode(
            code,
            family,
            info_set,
            *punctured,
            input,
            *seed,
            *budget,
            *format,
            &mut stdout,
        ),
        Command::Simulate {
            code,
            family,
            info_set,
            weights,
            trials,
            seed,
            budget,
            format,
        } => commands::cmd_simulate(
            code,
            family,
            info_set,
            weights,
            *trials,
            *seed,
            *budget,
            *format,
            &mut stdout,
        ),
        Command::Bounds { code, format } => commands::cmd_bounds(code, *format, &mut stdout),
        Command::Tables {
            which,
            fast,
            format,
        } => commands::cmd_tables(which, *fast, *format, &mut stdout),
        Command::Family {
            code,
            family,
            info_set,
            seed,
            budget,
            out,
            format,
        } => commands::cmd_family(
            code,
            family,
            info_set,
            *seed,
            *budget,
            out.as_deref(),
            *format,
            &mut stdout,
        ),
        Command::Verify { long, budget, seed } => {
            commands::cmd_verify(*long, *budget, *seed, &mut stdout)
        }
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
