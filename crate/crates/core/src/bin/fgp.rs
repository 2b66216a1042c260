use std::path::PathBuf;
use std::process::ExitCode;

use fgp::runner::{list_profiles, run_config_file, EXIT_OK, EXIT_VALIDATION};

const USAGE: &str = "usage: fgp [--seed N] run <config>\n       fgp profiles\n\nFGP_THREADS caps the worker count.";

enum Command {
    Run { config: PathBuf, seed: Option<u64> },
    Profiles,
}

fn parse(args: &[String]) -> Result<Command, String> {
    let mut seed = None;
    let mut rest = vec![];
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--seed" => {
                let v = it.next().ok_or("--seed needs a value")?;
                seed = Some(v.parse::<u64>().map_err(|_| format!("bad seed '{v}'"))?);
            }
            "-h" | "--help" => return Err(String::new()),
            _ => rest.push(a.as_str()),
        }
    }
    match rest.as_slice() {
        ["run", config] => Ok(Command::Run { config: PathBuf::from(config), seed }),
        ["profiles"] if seed.is_none() => Ok(Command::Profiles),
        _ => Err("unrecognised arguments".into()),
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("FGP_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or(format!("FGP_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cmd = match parse(&args).and_then(|c| init_threads().map(|_| c)) {
        Ok(c) => c,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("fgp: {msg}");
            }
            eprintln!("{USAGE}");
            return ExitCode::from(if msg.is_empty() { EXIT_OK } else { EXIT_VALIDATION } as u8);
        }
    };
    match cmd {
        Command::Profiles => {
            print!("{}", list_profiles());
            ExitCode::SUCCESS
        }
        Command::Run { config, seed } => {
            let (code, res) = run_config_file(&config, seed);
            match res {
                Ok(s) => {
                    for r in &s.rows {
                        println!("{:<20} {:>12.6} ± {:<10.3e} {} {}", r.quantity, r.value, r.stderr, r.aux1, r.aux2);
                    }
                    println!("wrote {}", s.output.display());
                }
                Err(e) => eprintln!("fgp: {e}"),
            }
            ExitCode::from(code as u8)
        }
    }
}
