use std::process::ExitCode;

use clap::{error::ErrorKind, Arg, ArgAction, ArgMatches};
use plate_semigroup_cli::commands::{run_command, Command};
use plate_semigroup_cli::config::{build_config, entry, parse_entries, Origin, KEYS};

fn cli() -> clap::Command {
    let mut flags = vec![Arg::new("config")
        .short('c')
        .long("config")
        .value_name("FILE")
        .help("key=value configuration file; flags given here override it")];
    for key in KEYS {
        let mut arg = Arg::new(*key)
            .long(*key)
            .value_name("VALUE")
            .action(ArgAction::Set)
            .allow_negative_numbers(true);
        if key.contains('_') {
            arg = arg.visible_alias(key.replace('_', "-"));
        }
        flags.push(arg);
    }
    let mut root = clap::Command::new("plate-sg")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Per-mode resolvent, witness and decay analysis of a damped plate/network system")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .args_override_self(true);
    for cmd in Command::ALL {
        root = root.subcommand(
            clap::Command::new(cmd.name())
                .about(cmd.about())
                .args(flags.clone()),
        );
    }
    root
}

fn config_from(m: &ArgMatches) -> Result<plate_semigroup_cli::RunConfig, String> {
    let mut entries = match m.get_one::<String>("config") {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            parse_entries(&text).map_err(|e| format!("{path}: {e}"))?
        }
        None => vec![],
    };
    for key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            entries.push(entry(key, v, Origin::Flag).map_err(|e| e.to_string())?);
        }
    }
    build_config(&entries).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            // clap exits with 2 on usage errors; 2 is reserved for numerical failures here.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd: Command = name.parse().expect("clap only accepts known subcommands");
    let cfg = match config_from(sub) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    ExitCode::from(run_command(cmd, &cfg) as u8)
}
