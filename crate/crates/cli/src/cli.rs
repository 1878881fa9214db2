use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ihpair_core::pairing::{EvalOptions, Target};

use crate::cache::Cache;
use crate::error::{CliError, Result};
use crate::request::{parse_batch, Request};
use crate::run::{render, Evaluator, Format};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "ihpair", version, about = "Exact intersection pairings on moduli of bundles over a curve")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Hamiltonian family index n (bases with sigma(1) = n); defaults to r.
    #[arg(long, global = true, value_name = "N")]
    pub hamiltonian_index: Option<usize>,
    /// Invert the Hessian series instead of cancelling it against the measure.
    #[arg(long, global = true)]
    pub debug_no_cancel: bool,
    /// Extra precision on every truncation window.
    #[arg(long, global = true, default_value_t = 0, value_name = "K")]
    pub window_bump: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Skip the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one pairing.
    Pair(PairArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Evaluate a JSON array of requests.
    Batch(BatchArgs),
    /// Inspect or clear the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, value_parser = parse_target)]
    pub target: Target,
    #[arg(short = 'r')]
    pub r: usize,
    #[arg(short = 'g')]
    pub g: usize,
    /// Exponent of a_k, as k=m (repeatable).
    #[arg(long = "a", value_name = "K=M", value_parser = parse_power)]
    pub a: Vec<(usize, u32)>,
    /// Exponent of f_k, as k=n (repeatable).
    #[arg(long = "f", value_name = "K=N", value_parser = parse_power)]
    pub f: Vec<(usize, u32)>,
    /// Odd class b_k^j, as k,j (repeatable, multiplied in the given order).
    #[arg(long = "b", value_name = "K,J", value_parser = parse_odd)]
    pub b: Vec<(usize, usize)>,
    /// Exponent of z (parabolic target only).
    #[arg(long = "z", default_value_t = 0)]
    pub z: u32,
    /// Power of the rank-two class gamma.
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(short = 'r')]
    pub r: Option<usize>,
    #[arg(short = 'g')]
    pub g: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    pub file: PathBuf,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    Stats,
    Clear,
}

fn parse_target(s: &str) -> std::result::Result<Target, String> {
    s.parse().map_err(|e: ihpair_core::Error| e.to_string())
}

fn parse_power(s: &str) -> std::result::Result<(usize, u32), String> {
    let (k, e) = s.split_once('=').ok_or_else(|| format!("expected k=exponent, got {s:?}"))?;
    Ok((k.trim().parse().map_err(|e| format!("{e}"))?, e.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_odd(s: &str) -> std::result::Result<(usize, usize), String> {
    let (k, j) = s.split_once(',').ok_or_else(|| format!("expected k,j, got {s:?}"))?;
    Ok((k.trim().parse().map_err(|e| format!("{e}"))?, j.trim().parse().map_err(|e| format!("{e}"))?))
}

impl GlobalArgs {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            family_index: self.hamiltonian_index,
            keep_hessian: self.debug_no_cancel,
            window_bump: self.window_bump,
            ..EvalOptions::default()
        }
    }

    fn evaluator(&self) -> Evaluator {
        Evaluator::new(self.options(), (!self.no_cache).then(Cache::from_env))
    }
}

impl PairArgs {
    fn request(&self) -> Request {
        let mut req = Request::new(self.target, self.r, self.g);
        for &(k, m) in &self.a {
            *req.a.entry(k).or_insert(0) += m;
        }
        for &(k, n) in &self.f {
            *req.f.entry(k).or_insert(0) += n;
        }
        req.b = self.b.clone();
        req.z = self.z;
        req.gamma = self.gamma;
        req.label = self.label.clone();
        req
    }
}

fn write_out(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<u8> {
    let global = &cli.global;
    match &cli.command {
        Command::Pair(args) => {
            let req = args.request();
            if let Some(family) = global.hamiltonian_index {
                if family == 0 || family > req.r {
                    return Err(CliError::Usage(format!("--hamiltonian-index must lie in 1..={}", req.r)));
                }
            }
            let results = global.evaluator().run(std::slice::from_ref(&req))?;
            if !results[0].degree_ok {
                eprintln!("degree mismatch: the monomial is not of top degree, the pairing is 0");
            }
            write_out(&render(&results, global.format, true)?, None)?;
            Ok(0)
        }
        Command::Batch(args) => {
            let text = fs::read_to_string(&args.file)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.file.display())))?;
            let requests = parse_batch(&text)?;
            let results = global.evaluator().run(&requests)?;
            write_out(&render(&results, global.format, false)?, args.output.as_ref())?;
            Ok(0)
        }
        Command::Verify(args) => {
            let reports = verify::run(args.suite, args.r, args.g, &global.options());
            write_out(&verify::render_table(&reports), None)?;
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Cache { action } => {
            let cache = Cache::from_env();
            match action {
                CacheAction::Stats => {
                    let s = cache.stats()?;
                    write_out(&format!("{}\t{} entries\t{} bytes\n", cache.dir().display(), s.entries, s.bytes), None)?;
                }
                CacheAction::Clear => {
                    let n = cache.clear()?;
                    write_out(&format!("removed {n} entries\n"), None)?;
                }
            }
            Ok(0)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_grammar() {
        let cli = Cli::try_parse_from([
            "ihpair", "pair", "--target", "ih", "-r", "2", "-g", "3", "--a", "2=1", "--f", "2=4", "--b", "2,1", "--b",
            "2,4",
        ])
        .unwrap();
        let Command::Pair(p) = cli.command else { panic!("pair") };
        let req = p.request();
        assert_eq!(req.a[&2], 1);
        assert_eq!(req.f[&2], 4);
        assert_eq!(req.b, vec![(2, 1), (2, 4)]);
        assert!(Cli::try_parse_from(["ihpair", "pair", "--target", "ih", "-r", "2", "-g", "2", "--f", "2:3"]).is_err());
        assert!(Cli::try_parse_from(["ihpair", "pair", "--target", "xx", "-r", "2", "-g", "2"]).is_err());
    }
}
