//! Subcommand implementations.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fpl_core::arith::{self, SieveTable};
use fpl_core::charkloost::{CharacterTable, WEIL_SLACK};
use fpl_core::decomp::{self, TypeWitness};
use fpl_core::expsums::{self, ExpSumSpec, FracWindow, MonomialPhase};
use fpl_core::oscillatory::{
    self, CompactBump, FirstPhase, OscIntegralResult, PhaseModel, SecondPhase, WindowModel,
};
use fpl_core::smoothing::DyadicPartition;

use crate::cache;
use crate::cli::{Command, GlobalArgs, MethodArg, OscArgs, PhaseArg};
use crate::config::{Format, RunConfig};
use crate::drivers;
use crate::error::{Context, FplError, Result};
use crate::output::{Csv, PlotSeries};
use crate::record::{Quantity, ResultRecord};

/// Heath-Brown residuals above this count as violations.
pub const HB_TOLERANCE: f64 = 1e-9;

/// What a finished command hands back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub record: ResultRecord,
    /// Tabular artifact, when the command has one.
    pub table: Option<Csv>,
    pub plots: Vec<(String, PlotSeries)>,
    /// Plain-text answer for commands that print a single value.
    pub plain: Option<String>,
}

impl Outcome {
    fn new(record: ResultRecord) -> Self {
        Outcome {
            record,
            table: None,
            plots: Vec::new(),
            plain: None,
        }
    }

    /// The artifact in the requested format.
    pub fn render(&self, format: Format) -> String {
        match (format, &self.table, &self.plain) {
            (Format::Csv, Some(t), _) => t.render(&self.record),
            (Format::Csv, None, Some(p)) => format!("{p}\n"),
            _ => self.record.to_json(),
        }
    }

    /// Default format when none was requested.
    pub fn default_format(&self) -> Format {
        if self.table.is_some() || self.plain.is_some() {
            Format::Csv
        } else {
            Format::Json
        }
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub global: &'a GlobalArgs,
}

impl Ctx<'_> {
    fn record(&self, command: &str) -> ResultRecord {
        ResultRecord::new(command, self.cfg.echo())
    }

    fn window(&self) -> Result<FracWindow> {
        FracWindow::new(self.cfg.alpha, self.cfg.interval[0], self.cfg.interval[1])
            .field("interval")
    }

    fn cache_dir(&self) -> PathBuf {
        cache::cache_dir(self.cfg.cache_path.as_deref())
    }

    /// A table covering `[2, hi)`, from the cache when one is there.
    fn table(&self, hi: u64) -> Result<SieveTable> {
        if let Some(path) = cache::find_covering(&self.cache_dir(), 2, hi) {
            eprintln!("fpl: using prime cache {}", path.display());
            return cache::load(&path);
        }
        drivers::sieve(2, hi)
    }
}

pub fn run(command: &Command, ctx: &Ctx) -> Result<Outcome> {
    let start = Instant::now();
    let mut out = match command {
        Command::Sieve { lo, hi, list } => sieve(ctx, *lo, hi.unwrap_or(ctx.cfg.x + 1), *list),
        Command::Cache { build } => cache_cmd(ctx, *build),
        Command::Count => count(ctx),
        Command::Expsum { sweep_q } => expsum(ctx, *sweep_q),
        Command::Bv => bv(ctx),
        Command::DecomposeCheck { nmax, nmin, k, v } => decompose_check(ctx, *nmin, *nmax, *k, *v),
        Command::Classify { t, sigma, samples } => {
            classify(ctx, t.as_ref().map(|r| r.0.as_slice()), *sigma, *samples)
        }
        Command::Kloosterman {
            qmax,
            qmin,
            primes_only,
        } => kloosterman(ctx, *qmin, *qmax, *primes_only),
        Command::Gauss => gauss(ctx),
        Command::Oscint(args) => oscint(ctx, args),
        Command::Level => level(ctx),
        Command::Selftest => selftest(ctx),
    }?;
    if !ctx.global.no_timing {
        out.record.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    Ok(out)
}

fn sieve(ctx: &Ctx, lo: u64, hi: u64, list: bool) -> Result<Outcome> {
    let t = drivers::sieve(lo, hi)?;
    let mut rec = ctx.record("sieve");
    rec.params.insert("lo".into(), lo.into());
    rec.params.insert("hi".into(), hi.into());
    rec.value("count", t.count());
    let mut out = Outcome::new(rec);
    if list {
        let mut csv = Csv::new(&["p"]);
        for p in t.primes() {
            csv.row(&[p.to_string()]);
        }
        out.table = Some(csv);
    }
    Ok(out)
}

fn cache_cmd(ctx: &Ctx, build: Option<u64>) -> Result<Outcome> {
    let dir = ctx.cache_dir();
    let mut rec = ctx.record("cache");
    if let Some(n) = build {
        let t = drivers::sieve(2, n + 1)?;
        let path = cache::save(&dir, &t)?;
        eprintln!("fpl: wrote {}", path.display());
        rec.params.insert("build".into(), n.into());
        rec.value("count", t.count())
            .value("file", path.file_name().unwrap().to_string_lossy().as_ref());
    }
    let mut csv = Csv::new(&["lo", "hi", "file"]);
    for (lo, hi, path) in cache::entries(&dir) {
        csv.row(&[
            lo.to_string(),
            hi.to_string(),
            path.file_name().unwrap().to_string_lossy().into_owned(),
        ]);
    }
    rec.value("entries", csv.len() as u64);
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

fn relative_deviation(inside: u64, all: u64, length: f64) -> f64 {
    if all == 0 {
        0.0
    } else {
        (inside as f64 - length * all as f64).abs() / all as f64
    }
}

fn count(ctx: &Ctx) -> Result<Outcome> {
    let c = ctx.cfg;
    c.check_progression()?;
    let win = ctx.window()?;
    let table = ctx.table(c.x + 1)?;
    let (inside, all) = drivers::residue_counts(c.x, c.q, &win, &table)?;
    let (n_in, n_all) = (inside[c.a as usize], all[c.a as usize]);
    let mut rec = ctx.record("count");
    rec.value("count", n_in)
        .value("value_re", n_in as f64)
        .value("value_im", 0.0)
        .value("pi", n_all)
        .value("expected", win.length() * n_all as f64)
        .value(
            "relative_deviation",
            relative_deviation(n_in, n_all, win.length()),
        );
    rec.flag("count_at_most_pi", n_in <= n_all);
    Ok(Outcome::new(rec))
}

fn spec_of(c: &RunConfig) -> ExpSumSpec {
    ExpSumSpec {
        x: c.x,
        y: c.y_or_default(),
        h: c.h,
        alpha: c.alpha,
        q: c.q,
        a: c.a,
    }
}

fn expsum(ctx: &Ctx, sweep_q: Option<u64>) -> Result<Outcome> {
    let c = ctx.cfg;
    c.check_progression()?;
    let spec = spec_of(c);
    spec.validate().field("X")?;
    let table = ctx.table(spec.y)?;
    let t = drivers::exp_sum(&spec, &table)?;
    let mut rec = ctx.record("expsum");
    rec.value("value_re", t.value.re)
        .value("value_im", t.value.im)
        .value("count", t.count)
        .value("abs", t.value.norm())
        .value("ratio", t.value.norm() * c.q as f64 / c.x as f64);
    rec.flag("trivial_bound", t.value.norm() <= t.count as f64 + 1e-9);
    rec.value(
        "h_in_range",
        Quantity::Text(spec.h_in_range(c.c_exp).to_string()),
    );
    let mut out = Outcome::new(rec);
    if let Some(qm) = sweep_q {
        let series = format!("X={},h={},alpha={}", c.x, c.h, c.alpha);
        let mut plot = PlotSeries::default();
        for (q, v, _) in drivers::ratio_sweep(&spec, qm, &table)? {
            plot.push(q as f64, v.norm() * q as f64 / c.x as f64, &series);
        }
        out.plots.push(("ratio_vs_q.csv".into(), plot));
    }
    Ok(out)
}

fn bv(ctx: &Ctx) -> Result<Outcome> {
    let c = ctx.cfg;
    let win = ctx.window()?;
    let table = ctx.table(c.x + 1)?;
    let r = drivers::bv(c.x, c.q_max, &win, &table)?;
    let mut csv = Csv::new(&["q", "worst_a", "deviation"]);
    let mut plot = PlotSeries::default();
    let series = format!("X={},alpha={}", c.x, c.alpha);
    let mut running = 0.0;
    for d in &r.per_q {
        csv.row(&[
            d.q.to_string(),
            d.worst_a.to_string(),
            d.deviation.to_string(),
        ]);
        running += d.deviation;
        plot.push(d.q as f64, running, &series);
    }
    csv.row(&["total".into(), String::new(), r.total.to_string()]);
    let mut rec = ctx.record("bv");
    rec.value("total", r.total)
        .value("pi_i", r.pi_i)
        .value("rows", r.per_q.len() as u64);
    rec.flag(
        "worst_a_coprime",
        r.per_q
            .iter()
            .all(|d| d.q == 1 || arith::gcd(d.worst_a, d.q) == 1),
    );
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    out.plots.push(("discrepancy_vs_q.csv".into(), plot));
    Ok(out)
}

fn decompose_check(ctx: &Ctx, nmin: u64, nmax: u64, k: u32, v: Option<u64>) -> Result<Outcome> {
    if nmin < 2 || nmin > nmax {
        return Err(FplError::config("nmax", "need 2 <= nmin <= nmax"));
    }
    let rows = drivers::heath_brown_rows(nmin, nmax, k, v)?;
    let mut csv = Csv::new(&[
        "n",
        "v",
        "lambda",
        "sum",
        "residual",
        "terms",
        "within_validity",
    ]);
    let mut worst = 0.0f64;
    let mut ok = true;
    for r in &rows {
        csv.row(&[
            r.n.to_string(),
            r.v.to_string(),
            r.lambda.to_string(),
            r.total.to_string(),
            r.residual().to_string(),
            r.terms.to_string(),
            r.within_validity.to_string(),
        ]);
        // Outside n <= V^k the identity is not claimed; those rows are
        // reported but not judged.
        if r.within_validity {
            worst = worst.max(r.residual());
            ok &= r.residual() <= HB_TOLERANCE;
        }
    }
    let mut rec = ctx.record("decompose-check");
    for (key, val) in [("nmin", nmin), ("nmax", nmax), ("k", k as u64)] {
        rec.params.insert(key.into(), val.into());
    }
    if let Some(v) = v {
        rec.params.insert("v".into(), v.into());
    }
    rec.value("max_residual", worst)
        .value("rows", rows.len() as u64)
        .value(
            "outside_validity",
            rows.iter().filter(|r| !r.within_validity).count() as u64,
        );
    rec.flag("identity_exact", ok);
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

fn describe(w: &TypeWitness) -> String {
    let list = |v: &[usize]| {
        v.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    match w {
        TypeWitness::I { index } => format!("I:{index}"),
        TypeWitness::II { s, t } => format!("II:{}|{}", list(s), list(t)),
        TypeWitness::III { triple } => format!("III:{}", list(triple)),
    }
}

/// A uniform point of the simplex with `len` coordinates.
pub fn random_simplex(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

fn classify(ctx: &Ctx, t: Option<&[f64]>, sigma: f64, samples: Option<usize>) -> Result<Outcome> {
    let mut rec = ctx.record("classify");
    rec.params.insert("sigma".into(), sigma.into());
    let mut csv = Csv::new(&["sample", "tuple", "kind", "witness"]);
    let tuples: Vec<Vec<f64>> = match (t, samples) {
        (Some(t), None) => vec![t.to_vec()],
        (None, Some(n)) => {
            rec.params.insert("samples".into(), n.into());
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
            (0..n)
                .map(|_| {
                    let len = rng.random_range(1..=8);
                    random_simplex(&mut rng, len)
                })
                .collect()
        }
        _ => {
            return Err(FplError::config(
                "t",
                "give exactly one of --t and --samples",
            ))
        }
    };
    let (mut empty, mut type3_above, mut counts) = (0u64, 0u64, [0u64; 3]);
    for (i, tup) in tuples.iter().enumerate() {
        let ws = decomp::classify_exponents(tup, sigma).field("t")?;
        empty += ws.is_empty() as u64;
        let text = tup
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        for w in &ws {
            counts[(w.kind() - 1) as usize] += 1;
            type3_above += (w.kind() == 3 && sigma > 1.0 / 6.0) as u64;
            csv.row(&[
                i.to_string(),
                text.clone(),
                w.kind().to_string(),
                describe(w),
            ]);
        }
    }
    rec.value("tuples", tuples.len() as u64)
        .value("type_i", counts[0])
        .value("type_ii", counts[1])
        .value("type_iii", counts[2]);
    rec.flag("never_empty", empty == 0);
    rec.flag("no_type_iii_above_one_sixth", type3_above == 0);
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

fn kloosterman(ctx: &Ctx, qmin: u64, qmax: u64, primes_only: bool) -> Result<Outcome> {
    if qmin < 2 || qmin > qmax {
        return Err(FplError::config("qmax", "need 2 <= qmin <= qmax"));
    }
    let moduli: Vec<u64> = (qmin..=qmax)
        .filter(|&q| !primes_only || arith::is_prime_u64(q))
        .collect();
    let values = drivers::kloosterman_table(&moduli)?;
    let mut csv = Csv::new(&["q", "u", "v", "value", "bound", "margin"]);
    let mut min_margin = f64::INFINITY;
    for k in &values {
        min_margin = min_margin.min(k.margin());
        csv.row(&[
            k.q.to_string(),
            k.u.to_string(),
            k.v.to_string(),
            k.value.to_string(),
            k.weil_bound.to_string(),
            k.margin().to_string(),
        ]);
    }
    let mut rec = ctx.record("kloosterman");
    for (key, val) in [("qmin", qmin), ("qmax", qmax)] {
        rec.params.insert(key.into(), val.into());
    }
    rec.params.insert("primes_only".into(), primes_only.into());
    rec.value("rows", values.len() as u64)
        .value("min_margin", min_margin);
    rec.flag(
        "weil_bound",
        values.iter().all(|k| k.margin() >= -WEIL_SLACK),
    );
    rec.flag(
        "real_valued",
        values.iter().all(|k| k.imag_residual <= 1e-9),
    );
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

fn gauss(ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.cfg.q;
    let t = CharacterTable::new(q).field("q")?;
    let defect = drivers::orthogonality_defect(q)?;
    let mut csv = Csv::new(&[
        "index",
        "principal",
        "primitive",
        "tau_re",
        "tau_im",
        "tau_abs",
    ]);
    let mut modulus_ok = true;
    for i in 0..t.len() {
        let c = t.character(i);
        let tau = c.gauss_sum(1);
        if c.is_primitive() {
            modulus_ok &= (tau.norm() - (q as f64).sqrt()).abs() <= 1e-9;
        }
        csv.row(&[
            i.to_string(),
            c.is_principal().to_string(),
            c.is_primitive().to_string(),
            tau.re.to_string(),
            tau.im.to_string(),
            tau.norm().to_string(),
        ]);
    }
    let mut rec = ctx.record("gauss");
    rec.value("characters", t.len() as u64)
        .value("orthogonality_defect", defect);
    rec.flag("orthogonality", defect <= 1e-10);
    rec.flag("primitive_modulus_sqrt_q", modulus_ok);
    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

fn osc_model(ctx: &Ctx, a: &OscArgs) -> Result<(CompactBump, PhaseModel)> {
    let c = ctx.cfg;
    if a.radius.is_nan() || a.radius <= 0.0 {
        return Err(FplError::config("radius", "must be positive"));
    }
    if a.phase != PhaseArg::Gaussian && (a.t0.is_nan() || a.t0 <= 0.0) {
        return Err(FplError::config("t0", "must be positive"));
    }
    let (h, x, alpha, q) = (c.h as f64, c.x as f64, c.alpha, c.q as f64);
    let g = match a.phase {
        PhaseArg::Gaussian => PhaseModel::gaussian(a.scale, a.t0),
        PhaseArg::First => {
            let qumn = q * a.u * a.m * a.n;
            let s =
                a.s.unwrap_or(alpha * h * qumn / (x * a.t0).powf(1.0 - alpha));
            PhaseModel::FirstPoisson(FirstPhase {
                h,
                x,
                alpha,
                q,
                u: a.u,
                m: a.m,
                n: a.n,
                s,
            })
        }
        PhaseArg::Second => {
            let s = a.s.unwrap_or(1.0);
            let gamma = alpha / (1.0 - alpha);
            let sigma = a.sigma.unwrap_or_else(|| {
                let ahq = alpha * h * q;
                ahq * ahq * a.u * a.m * x.powf(alpha) * a.t0.powf(gamma - 1.0)
                    / (x.powf(1.0 - alpha) * s)
            });
            PhaseModel::SecondPoisson(SecondPhase {
                h,
                x,
                alpha,
                q,
                u: a.u,
                m: a.m,
                s,
                sigma,
            })
        }
    };
    Ok((
        CompactBump {
            center: a.center.unwrap_or(a.t0),
            radius: a.radius,
        },
        g,
    ))
}

fn put_result(rec: &mut ResultRecord, prefix: &str, r: &OscIntegralResult) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}_{k}")
        }
    };
    rec.value(&key("value"), Quantity::complex(r.value))
        .value(&key("error_estimate"), r.error_estimate)
        .value(&key("method"), r.method.name())
        .value(&key("terms_used"), r.terms_used as u64);
}

fn oscint(ctx: &Ctx, a: &OscArgs) -> Result<Outcome> {
    let (w, g) = osc_model(ctx, a)?;
    let interval = w.support();
    let mut rec = ctx.record("oscint");
    for (k, v) in [
        ("t0", a.t0),
        ("radius", a.radius),
        ("center", w.center),
        ("tol", a.tol),
    ] {
        rec.params.insert(k.into(), v.into());
    }
    rec.params.insert(
        "phase".into(),
        format!("{:?}", a.phase).to_lowercase().into(),
    );
    rec.params.insert(
        "method".into(),
        format!("{:?}", a.method).to_lowercase().into(),
    );
    rec.params.insert("terms".into(), a.n_terms.into());
    match a.phase {
        PhaseArg::Gaussian => rec.params.insert("scale".into(), a.scale.into()),
        PhaseArg::First => rec.params.insert("s".into(), phase_s(&g).into()),
        PhaseArg::Second => rec.params.insert("sigma".into(), phase_sigma(&g).into()),
    };
    let quad = || oscillatory::quad_osc(&w, &g, interval, a.tol).field("tol");
    let lemma3 = || oscillatory::stationary_expand(&w, &g, interval, a.n_terms).field("t0");
    match a.method {
        MethodArg::Quad => put_result(&mut rec, "", &quad()?),
        MethodArg::Lemma2 => put_result(
            &mut rec,
            "",
            &oscillatory::lemma2_estimate(&w, &g, ctx.cfg.a_i).field("t0")?,
        ),
        MethodArg::Lemma3 => put_result(&mut rec, "", &lemma3()?),
        MethodArg::Both => {
            let (qr, sr) = (quad()?, lemma3()?);
            put_result(&mut rec, "", &sr);
            put_result(&mut rec, "quad", &qr);
            let gap = (sr.value - qr.value).norm();
            rec.value("gap", gap)
                .value("relative_gap", gap / qr.value.norm());
            rec.value(
                "within_error_estimate",
                Quantity::Text((gap <= sr.error_estimate + qr.error_estimate).to_string()),
            );
        }
    }
    let t0 = oscillatory::stationary_point(&g, interval).ok();
    if let Some(t0) = t0 {
        rec.value("stationary_point", t0)
            .value("curvature", g.derivative(2, t0));
        rec.flag(
            "stationary_residual",
            oscillatory::stationary_residual(&g, t0) <= 1e-10,
        );
    }
    let mut out = Outcome::new(rec);
    if let Some(scales) = &a.sweep {
        out.plots.push((
            "expansion_error_vs_curvature.csv".into(),
            expansion_sweep(&scales.0, a)?,
        ));
    }
    Ok(out)
}

fn phase_s(g: &PhaseModel) -> f64 {
    match g {
        PhaseModel::FirstPoisson(f) => f.s,
        _ => f64::NAN,
    }
}

fn phase_sigma(g: &PhaseModel) -> f64 {
    match g {
        PhaseModel::SecondPoisson(s) => s.sigma,
        _ => f64::NAN,
    }
}

/// Relative error of the 1-, 2- and 3-term expansions against quadrature
/// on the Gaussian family, one point per scale.
pub fn expansion_sweep(scales: &[f64], a: &OscArgs) -> Result<PlotSeries> {
    let w = CompactBump {
        center: a.t0,
        radius: a.radius,
    };
    let mut plot = PlotSeries::default();
    for &y in scales {
        let g = PhaseModel::gaussian(y, a.t0);
        let quad = oscillatory::quad_osc(&w, &g, w.support(), a.tol).field("tol")?;
        for n in 1..=oscillatory::MAX_EXPANSION_TERMS {
            let e = oscillatory::stationary_expand(&w, &g, w.support(), n).field("scale")?;
            plot.push(
                y,
                (e.value - quad.value).norm() / quad.value.norm(),
                &format!("terms={n}"),
            );
        }
    }
    Ok(plot)
}

/// `θ` rounded to 12 decimals, trailing zeros dropped.
pub fn format_level(theta: f64) -> String {
    let s = format!("{theta:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn level(ctx: &Ctx) -> Result<Outcome> {
    let r = expsums::level_of_distribution(ctx.cfg.alpha);
    if !r.in_scope {
        eprintln!(
            "fpl: warning: alpha = {} is outside (0, 1/9)",
            ctx.cfg.alpha
        );
    }
    let mut rec = ctx.record("level");
    rec.value("theta", r.theta)
        .value("in_scope", Quantity::Text(r.in_scope.to_string()));
    let mut out = Outcome::new(rec);
    out.plain = Some(format_level(r.theta));
    Ok(out)
}

/// Scaled-down versions of the acceptance checks, a few seconds in total.
fn selftest(ctx: &Ctx) -> Result<Outcome> {
    let mut rec = ctx.record("selftest");
    let mut csv = Csv::new(&["check", "result", "detail"]);
    let mut note = |rec: &mut ResultRecord, name: &str, ok: bool, detail: String| {
        csv.row(&[name.into(), if ok { "PASS" } else { "FAIL" }.into(), detail]);
        rec.flag(name, ok);
    };

    let t = arith::sieve_primes(2, 1_000_001).field("hi")?;
    note(
        &mut rec,
        "sieve_count",
        t.count() == 78_498,
        format!("pi(10^6) = {}", t.count()),
    );

    let rows = drivers::heath_brown_rows(2, 400, 5, None)?;
    let worst = rows
        .iter()
        .filter(|r| r.within_validity)
        .map(|r| r.residual())
        .fold(0.0, f64::max);
    note(
        &mut rec,
        "heath_brown",
        worst <= HB_TOLERANCE,
        format!("max residual {worst:e}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut ok = true;
    for _ in 0..500 {
        let len = rng.random_range(1..=8);
        let tup = random_simplex(&mut rng, len);
        let sigma = rng.random_range(0.1000001..0.4999999);
        let ws = decomp::classify_exponents(&tup, sigma).field("t")?;
        ok &= !ws.is_empty() && (sigma <= 1.0 / 6.0 || ws.iter().all(|w| w.kind() != 3));
    }
    note(&mut rec, "classifier", ok, "500 random tuples".into());

    let p = DyadicPartition::new(1.01, 1.0, 700).field("theta")?;
    let top = p.grid().get(699).unwrap().ln();
    let worst = (0..500)
        .map(|_| (p.partition_sum((rng.random::<f64>() * top).exp()) - 1.0).abs())
        .fold(0.0, f64::max);
    note(
        &mut rec,
        "partition_of_unity",
        worst <= 1e-12,
        format!("max defect {worst:e}"),
    );

    let primes: Vec<u64> = (2..=61).filter(|&q| arith::is_prime_u64(q)).collect();
    let ks = drivers::kloosterman_table(&primes)?;
    let s3 = fpl_core::charkloost::kloosterman(3, 1, 1).field("q")?.value;
    let ok = ks.iter().all(|k| k.margin() >= -WEIL_SLACK) && (s3 + 1.0).abs() <= 1e-12;
    note(
        &mut rec,
        "weil_bound",
        ok,
        format!("{} sums, S_3(1,1) = {s3}", ks.len()),
    );

    let worst = (3..=30)
        .map(drivers::orthogonality_defect)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    note(
        &mut rec,
        "orthogonality",
        worst <= 1e-10,
        format!("max defect {worst:e}"),
    );

    let case = oscillatory::verification_grid()[0];
    let f = oscillatory::poisson_verify_first(&case.first().field("grid")?).field("grid")?;
    let s = oscillatory::poisson_verify_second(&case.second().field("grid")?).field("grid")?;
    note(
        &mut rec,
        "poisson",
        f.diff <= 1e-5 && s.diff <= 1e-5,
        format!("diffs {:e} {:e}", f.diff, s.diff),
    );

    let w = CompactBump {
        center: 0.0,
        radius: 1.0,
    };
    let g = PhaseModel::gaussian(50.0, 0.0);
    let quad = oscillatory::quad_osc(&w, &g, (-1.0, 1.0), 1e-12).field("tol")?;
    let lead = oscillatory::stationary_expand(&w, &g, (-1.0, 1.0), 1).field("t0")?;
    let rel = (lead.value - quad.value).norm() / quad.value.norm();
    note(
        &mut rec,
        "stationary_phase",
        rel <= 0.05,
        format!("relative error {rel:e} at Y = 50"),
    );

    let ph = MonomialPhase::type_one(1.0, 10.0, 7.0, 0.1, 0.0, 1000.0, 2000.0);
    let sum = expsums::phase_sum(&ph).field("vdc")?.norm();
    let bound = expsums::vdc_bound(&ph, ctx.cfg.vdc_constant)
        .field("vdc_constant")?
        .bound;
    note(
        &mut rec,
        "van_der_corput",
        sum <= bound,
        format!("|sum| {sum} <= {bound}"),
    );

    let theta = format_level(expsums::level_of_distribution(0.1).theta);
    note(
        &mut rec,
        "level",
        theta == "0.34",
        format!("theta(0.1) = {theta}"),
    );

    let mut out = Outcome::new(rec);
    out.table = Some(csv);
    Ok(out)
}

/// Writes the artifact and any plot files; returns the rendered artifact.
pub fn emit(out: &Outcome, cfg: &RunConfig, global: &GlobalArgs) -> Result<String> {
    let text = out.render(cfg.output.unwrap_or_else(|| out.default_format()));
    if let Some(path) = &global.out {
        cache::write_atomic(path, text.as_bytes())?;
    }
    if let Some(dir) = &global.plot_dir {
        for (name, plot) in &out.plots {
            cache::write_atomic(&dir.join(name), plot.render(&out.record).as_bytes())?;
        }
    }
    Ok(text)
}
