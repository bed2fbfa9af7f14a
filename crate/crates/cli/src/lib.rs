//! Experiment driver: manifests in, deterministic CSV/JSON artifacts out.

pub mod cache;
pub mod commands;
pub mod manifest;
pub mod verify;

use std::path::PathBuf;

use clap::Parser;

use crate::cache::{write_atomic, Cache};
use crate::manifest::{CommandId, RunManifest};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Numerical(#[from] pllab_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl CliError {
    /// 2 for manifest problems, 3 for everything that fails at run time.
    pub fn status(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pllab", version, about = "Run a pluripotential-theory experiment from a JSON manifest")]
pub struct Args {
    /// Subcommand; must agree with the manifest's `command` when both are given.
    #[arg(value_enum)]
    pub command: Option<CommandId>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory; overrides the manifest's `output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cache root; the PLLAB_CACHE environment variable takes precedence.
    #[arg(long, default_value = "cache")]
    pub cache: PathBuf,
    /// Worker threads, 0 = one per core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long)]
    pub no_cache: bool,
}

pub fn load_manifest(args: &Args) -> Result<RunManifest, CliError> {
    let m = match (&args.manifest, args.command) {
        (Some(path), _) => RunManifest::load(path)?,
        (None, Some(CommandId::Verify)) => {
            let mut m = RunManifest::verify_default();
            m.hash = Some(m.content_hash());
            m
        }
        (None, _) => return Err(CliError::Schema("--manifest is required".into())),
    };
    if let Some(cmd) = args.command {
        if cmd != m.command {
            return Err(CliError::Schema(format!(
                "command: manifest says `{}` but `{}` was requested",
                m.command.as_str(),
                cmd.as_str()
            )));
        }
    }
    Ok(m)
}

fn cache_root(args: &Args) -> Option<PathBuf> {
    if args.no_cache {
        return None;
    }
    match std::env::var_os("PLLAB_CACHE") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => Some(args.cache.clone()),
    }
}

/// Executes one manifest and writes its artifacts; returns the output dir.
pub fn run(args: &Args) -> Result<PathBuf, CliError> {
    let m = load_manifest(args)?;
    let hash = m.hash.clone().expect("parsed manifests carry a hash");
    let out = args
        .out
        .clone()
        .or_else(|| m.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("pllab-out").join(format!("{}-{}", m.command.as_str(), &hash[..12])));
    let cache = Cache::new(cache_root(args));
    log::info!("running `{}` (manifest {})", m.command.as_str(), &hash[..12]);
    let (files, failures) = commands::dispatch(&m, &cache)?;
    std::fs::create_dir_all(&out)?;
    let mut stored = m.clone();
    stored.output = None;
    let mut manifest_text = pllab_core::io::canonical_json(&stored).expect("manifest serializes");
    manifest_text.push('\n');
    write_atomic(&out.join("manifest.json"), manifest_text.as_bytes())?;
    write_atomic(&out.join("version.txt"), format!("pllab {VERSION}\n").as_bytes())?;
    for (name, body) in &files {
        write_atomic(&out.join(name), body.as_bytes())?;
    }
    if failures > 0 {
        return Err(CliError::Checks(failures));
    }
    Ok(out)
}

/// Process entry: parses flags, configures logging and threads, maps errors
/// to exit codes.
pub fn main_with(args: Args) -> u8 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match run(&args) {
        Ok(out) => {
            log::info!("artifacts in {}", out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}
