use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stargraph_cli::{config, run, RawConfig, RunError};

/// Spectra, bond measures and fractal exponents of quantum star graphs.
#[derive(Parser, Debug)]
#[command(name = "stargraph", version)]
struct Cli {
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Command to run (overrides `command`).
    #[arg(long)]
    command: Option<String>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn load(cli: &Cli) -> Result<stargraph_cli::RunConfig, RunError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut raw = RawConfig::parse(&text)?;
    if let Some(c) = &cli.command {
        raw.set(&format!("command={c}"))?;
    }
    if let Some(o) = &cli.out {
        raw.set(&format!("out={}", o.display()))?;
    }
    for s in &cli.set {
        raw.set(s)?;
    }
    Ok(config::build(&raw)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(manifest) => {
            for f in &manifest.files {
                println!("{} ({} rows)", cfg_path(&manifest, &f.name), f.rows);
            }
            for (k, v) in &manifest.summary {
                println!("{k} = {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("stargraph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cfg_path(manifest: &stargraph_cli::RunManifest, name: &str) -> String {
    let out = manifest
        .config
        .iter()
        .find(|(k, _)| k == "out")
        .map(|(_, v)| v.as_str())
        .unwrap_or(".");
    PathBuf::from(out).join(name).display().to_string()
}
