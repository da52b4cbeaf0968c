//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_count, parse_interval, parse_reals, Format, Reals, RunConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "fpl",
    version,
    about = "Prime exponential sums in fractional-part windows: experiments and checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Parameter flags accepted by every subcommand. Each overrides the key of
/// the same name in `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Flat TOML file with run parameters.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Fractional-part window `c,d`.
    #[arg(long = "I", global = true, value_parser = parse_interval, value_name = "C,D")]
    pub interval: Option<[f64; 2]>,
    #[arg(long = "X", global = true, value_parser = parse_count)]
    pub x: Option<u64>,
    #[arg(long = "Y", global = true, value_parser = parse_count)]
    pub y: Option<u64>,
    #[arg(long = "Q", global = true, value_parser = parse_count)]
    pub q_max: Option<u64>,
    #[arg(long, global = true, value_parser = parse_count)]
    pub q: Option<u64>,
    #[arg(long, global = true, value_parser = parse_count)]
    pub a: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<i64>,
    #[arg(long = "C", global = true)]
    pub c_exp: Option<f64>,
    #[arg(long = "A0", global = true)]
    pub a0: Option<f64>,
    #[arg(long = "B0", global = true)]
    pub b0: Option<f64>,
    #[arg(long = "D0", global = true)]
    pub d0: Option<f64>,
    #[arg(long = "F0", global = true)]
    pub f0: Option<f64>,
    #[arg(long = "A_I", global = true)]
    pub a_i: Option<f64>,
    #[arg(long, global = true)]
    pub vdc_constant: Option<f64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Prime cache directory; defaults to $FPL_CACHE_DIR, then ./.fpl-cache.
    #[arg(long = "cache-dir", global = true, value_name = "DIR")]
    pub cache_path: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write plot-ready CSV files into this directory.
    #[arg(long = "plot-dir", global = true, value_name = "DIR")]
    pub plot_dir: Option<PathBuf>,
    /// Record elapsed_ms as 0 so artifacts compare byte for byte.
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
}

impl GlobalArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        take!(
            alpha,
            interval,
            x,
            q_max,
            q,
            a,
            h,
            c_exp,
            a0,
            b0,
            d0,
            f0,
            a_i,
            vdc_constant,
            threads,
            seed
        );
        if self.y.is_some() {
            c.y = self.y;
        }
        if self.cache_path.is_some() {
            c.cache_path = self.cache_path.clone();
        }
        if self.output.is_some() {
            c.output = self.output;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Count the primes in [lo, hi).
    Sieve {
        #[arg(long, value_parser = parse_count, default_value = "2")]
        lo: u64,
        /// Defaults to X + 1.
        #[arg(long, value_parser = parse_count)]
        hi: Option<u64>,
        /// Emit the primes themselves as CSV.
        #[arg(long)]
        list: bool,
    },
    /// Build or list prime cache files.
    Cache {
        /// Sieve [2, N] and store it.
        #[arg(long, value_parser = parse_count, value_name = "N")]
        build: Option<u64>,
    },
    /// π_I(X; q, a) against |I|·π(X; q, a).
    Count,
    /// T = Σ_{X <= p < Y, p ≡ a (q)} e(h p^α).
    Expsum {
        /// Also evaluate |T|·q/X for every q up to this bound (a = 1).
        #[arg(long = "sweep-q", value_parser = parse_count)]
        sweep_q: Option<u64>,
    },
    /// Σ_{q<=Q} max_a |π_I(X;q,a) - π_I(X)/φ(q)| with a row per q.
    Bv,
    /// Heath-Brown identity residuals |Σ terms - Λ(n)|.
    DecomposeCheck {
        #[arg(long, value_parser = parse_count)]
        nmax: u64,
        #[arg(long, value_parser = parse_count, default_value = "2")]
        nmin: u64,
        #[arg(long, default_value_t = 5)]
        k: u32,
        /// Fixed cap V; defaults to ⌈n^(1/k)⌉ + 1 for each n.
        #[arg(long, value_parser = parse_count)]
        v: Option<u64>,
    },
    /// Type I/II/III witnesses for an exponent tuple, or a random batch.
    Classify {
        /// Exponents t_1,...,t_r summing to 1.
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
        t: Option<Reals>,
        #[arg(long, default_value_t = 0.15)]
        sigma: f64,
        /// Classify this many random tuples (seeded) instead.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Kloosterman sums with their Weil bounds.
    Kloosterman {
        #[arg(long, value_parser = parse_count)]
        qmax: u64,
        #[arg(long, value_parser = parse_count, default_value = "2")]
        qmin: u64,
        #[arg(long = "primes-only")]
        primes_only: bool,
    },
    /// Characters mod q with their Gauss sums.
    Gauss,
    /// Oscillatory integral ∫ w(t) e(g(t)) dt.
    Oscint(OscArgs),
    /// Level of distribution θ = 2/5 - 3α/5.
    Level,
    /// Quick end-to-end self checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    First,
    Second,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Lemma2,
    Lemma3,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct OscArgs {
    #[arg(long, value_enum)]
    pub phase: PhaseArg,
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    /// Curvature scale of the Gaussian phase -Y(t - t0)²/2.
    #[arg(long, default_value_t = 50.0)]
    pub scale: f64,
    /// Intended stationary point; also fixes s (first) or σ (second) when
    /// those are not given.
    #[arg(long, default_value_t = 1.2)]
    pub t0: f64,
    /// Centre of the bump window; defaults to t0.
    #[arg(long)]
    pub center: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    #[arg(long, default_value_t = 3.0)]
    pub n: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Expansion terms for the stationary-phase method (1 to 3).
    #[arg(long = "terms", default_value_t = 1)]
    pub n_terms: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Gaussian scales for the expansion-error plot.
    #[arg(long, value_parser = parse_reals)]
    pub sweep: Option<Reals>,
}
