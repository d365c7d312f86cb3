#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod parse;
mod record;

use std::io;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use truncmoments::asymptotics::{
    clt_params_boundary, clt_params_origin, strong_approx_detail, weak_approx, weak_point, CLTParams, Regime,
};
use truncmoments::engine::{engine, EngineOptions};
use truncmoments::quadrature::{duality_moment_general, odd_moment_real, QuadratureRule, QuadratureSpec};
use truncmoments::special::{boundary_moment, haar_group_moment, logdet_cumulants, HaarGroup};
use truncmoments::validation::{run_criterion, ValidationConfig, CRITERIA};
use truncmoments::{Beta, EnsembleSpec, Error, MomentOrder, MomentQuery};

use parse::parse_complex;
use record::{Format, QueryRecord, Sink};

#[derive(Parser)]
#[command(name = "truncmoments", version, about = "Moments of characteristic polynomials of truncated Haar matrices")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Report wall-clock time per record (otherwise runtime_ms is 0).
    #[arg(long, global = true)]
    timing: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "TRUNCMOMENTS_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Ensemble {
    #[arg(long)]
    beta: u32,
    /// Size N of the Haar matrix.
    #[arg(long)]
    n: usize,
    /// Size M of the truncation.
    #[arg(long)]
    m: usize,
}

#[derive(Args, Clone)]
struct Point {
    /// Evaluation points `a+bi`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "x_mod")]
    x: Vec<String>,
    #[arg(long)]
    x_mod: Option<f64>,
    #[arg(long, requires = "x_mod", allow_hyphen_values = true)]
    x_arg: Option<f64>,
}

#[derive(Args, Clone)]
struct Order {
    /// Even moment indices k (moment 2k).
    #[arg(short = 'k', long = "k", value_delimiter = ',', conflicts_with = "gamma")]
    k: Vec<u32>,
    /// Real exponents gamma.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Vec<f64>,
}

#[derive(Args, Clone)]
struct Quad {
    /// Nodes per dimension; automatic when absent.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value = "gauss_jacobi")]
    rule: String,
    /// Samples for the Monte Carlo fallback rule.
    #[arg(long, default_value_t = 200_000)]
    quad_samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Haar,
    Bhny,
    BetaProduct,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RegimeArg {
    Weak,
    Strong,
    Origin,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Location {
    Boundary,
    Origin,
}

#[derive(Subcommand)]
enum Command {
    /// Exact moments from the partition series.
    Exact {
        #[command(flatten)]
        ens: Ensemble,
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        order: Order,
    },
    /// Moments from the k-fold duality integral.
    Duality {
        #[command(flatten)]
        ens: Ensemble,
        #[command(flatten)]
        point: Point,
        #[arg(short = 'k', long = "k", value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Eigenvalues of Sigma (default: all ones).
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<f64>>,
        /// Odd moments E det(x - A)^(2k+1), beta 1 only.
        #[arg(long)]
        odd: bool,
        #[command(flatten)]
        quad: Quad,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte Carlo estimates.
    Mc {
        #[command(flatten)]
        ens: Ensemble,
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        order: Order,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "haar")]
        sampler: SamplerArg,
    },
    /// Closed-form moments on the unit circle.
    Boundary {
        #[arg(long)]
        beta: Option<u32>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gamma: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Full compact group instead of a truncation: U, SO, Sp or O.
        #[arg(long, conflicts_with_all = ["beta", "m"])]
        group: Option<String>,
    },
    /// Leading-order asymptotics.
    Asympt {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long)]
        beta: u32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: usize,
        /// N - M for the weak regime.
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(short = 'k', long = "k", value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Weak regime: |x|^2 = 1 - 2u/M.
        #[arg(long)]
        u: Option<f64>,
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        quad: Quad,
    },
    /// Limit-theorem parameters and exact cumulant sweeps.
    Clt {
        /// Omit for all three classes.
        #[arg(long)]
        beta: Option<u32>,
        #[arg(long, value_enum, default_value = "weak")]
        regime: RegimeArg,
        #[arg(long)]
        mu_tilde: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Sweep exact cumulants over these M.
        #[arg(long, value_delimiter = ',')]
        m_values: Vec<usize>,
        /// Sweep with N = M + kappa.
        #[arg(long, conflicts_with = "mu")]
        kappa: Option<usize>,
        /// Sweep with N = round(M / mu).
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, value_enum, default_value = "boundary")]
        at: Location,
        #[arg(long, default_value_t = 3)]
        max_order: u32,
    },
    /// Runs the acceptance suite; exit 0 iff every criterion passes.
    Validate {
        /// Subset of criteria, e.g. 1,3.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        #[arg(long)]
        grid_samples: Option<u64>,
        #[arg(long)]
        product_samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Degenerate(_)) { 1 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Out<'a> = Sink<io::StdoutLock<'a>>;

struct Ctx<'a> {
    sink: Out<'a>,
    timing: bool,
    clock: Instant,
}

impl Ctx<'_> {
    fn start(&mut self) {
        self.clock = Instant::now();
    }

    fn emit(&mut self, mut r: QueryRecord) -> Result<(), Failure> {
        if self.timing {
            r.runtime_ms = self.clock.elapsed().as_millis() as u64;
        }
        self.sink.emit(&r)?;
        Ok(())
    }
}

fn beta_of(b: u32) -> Result<Beta, Failure> {
    Ok(Beta::from_index(b)?)
}

fn ensemble(e: &Ensemble) -> Result<EnsembleSpec, Failure> {
    Ok(EnsembleSpec::new(beta_of(e.beta)?, e.n, e.m)?)
}

fn points(p: &Point) -> Result<Vec<Complex64>, Failure> {
    if let Some(r) = p.x_mod {
        let a = p.x_arg.unwrap_or(0.0);
        if !(r >= 0.0) || !r.is_finite() || !a.is_finite() {
            return Err(usage(format!("--x-mod must be finite and nonnegative, got {r}")));
        }
        return Ok(vec![Complex64::from_polar(r, a)]);
    }
    if p.x.is_empty() {
        return Err(usage("an evaluation point is required (--x or --x-mod)"));
    }
    p.x.iter().map(|s| parse_complex(s).map_err(usage)).collect()
}

fn orders(o: &Order) -> Result<Vec<MomentOrder>, Failure> {
    if !o.k.is_empty() {
        return Ok(o.k.iter().map(|&k| MomentOrder::Integer(k)).collect());
    }
    if o.gamma.is_empty() {
        return Err(usage("a moment order is required (-k or --gamma)"));
    }
    Ok(o.gamma.iter().map(|&g| MomentOrder::Real(g)).collect())
}

fn quadrature(q: &Quad, seed: u64) -> Result<QuadratureSpec, Failure> {
    if q.nodes == Some(0) {
        return Err(usage("--nodes must be positive"));
    }
    let mut spec = QuadratureSpec::default().with_rule(q.rule.parse::<QuadratureRule>()?);
    spec.nodes_per_dim = q.nodes;
    spec.mc_samples = q.quad_samples;
    spec.seed = seed;
    Ok(spec)
}

fn base(cmd: &str, spec: &EnsembleSpec, order: String, x: Option<Complex64>, value: f64, method: &str) -> QueryRecord {
    let mut r = QueryRecord::new(cmd, order, value, method);
    r.beta = Some(spec.beta().index());
    r.n = Some(spec.n_total());
    r.m = Some(spec.m_trunc());
    if let Some(x) = x {
        r.x_re = Some(x.re);
        r.x_im = Some(x.im);
    }
    r
}

/// Builds and validates every query before any is computed.
fn queries(spec: &EnsembleSpec, orders: &[MomentOrder], xs: &[Complex64]) -> Result<Vec<MomentQuery>, Failure> {
    let mut out = Vec::new();
    for &o in orders {
        for &x in xs {
            let q = MomentQuery::new(o, x);
            q.validate(spec.beta())?;
            out.push(q);
        }
    }
    Ok(out)
}

fn run_moments(ctx: &mut Ctx, cmd: &str, engine_name: &str, spec: &EnsembleSpec, qs: &[MomentQuery], opts: &EngineOptions) -> Result<(), Failure> {
    let eng = engine(engine_name)?;
    for q in qs {
        ctx.start();
        let e = eng.estimate(spec, q, opts)?;
        let mut r = base(cmd, spec, q.order.to_string(), Some(q.x), e.value, &e.method);
        r.stderr = e.stderr;
        if let Some(n) = e.n_samples {
            r = r.param("samples", n).param("seed", opts.seed);
        }
        ctx.emit(r)?;
    }
    Ok(())
}

fn clt_record(beta: Beta, p: &CLTParams, spec: Option<&EnsembleSpec>) -> QueryRecord {
    let mut r = QueryRecord::new("clt", "log|det|", p.variance, format!("clt/{}", p.regime));
    r.beta = Some(beta.index());
    if let Some(s) = spec {
        r.n = Some(s.n_total());
        r.m = Some(s.m_trunc());
    }
    r.param("e_beta", p.e_beta).param("v_beta", p.v_beta).param("mean", p.mean).param("variance", p.variance)
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<u8, Failure> {
    match cli.cmd {
        Command::Exact { ens, point, order } => {
            let spec = ensemble(&ens)?;
            let qs = queries(&spec, &orders(&order)?, &points(&point)?)?;
            run_moments(ctx, "exact", "exact", &spec, &qs, &EngineOptions::default())?;
        }
        Command::Mc { ens, point, order, samples, seed, sampler } => {
            let spec = ensemble(&ens)?;
            let qs = queries(&spec, &orders(&order)?, &points(&point)?)?;
            if samples < 2 {
                return Err(usage("--samples must be at least 2"));
            }
            let name = match sampler {
                SamplerArg::Haar => "haar",
                SamplerArg::Bhny => "bhny",
                SamplerArg::BetaProduct => "beta_product",
            };
            let opts = EngineOptions { mc_samples: samples, seed, sampler: name.into(), ..Default::default() };
            run_moments(ctx, "mc", "mc", &spec, &qs, &opts)?;
        }
        Command::Duality { ens, point, k, sigma, odd, quad, seed } => {
            let spec = ensemble(&ens)?;
            let q = quadrature(&quad, seed)?;
            let xs = points(&point)?;
            let sigma = sigma.unwrap_or_else(|| vec![1.0; spec.m_trunc()]);
            if odd && spec.beta() != Beta::Orthogonal {
                return Err(usage("--odd requires --beta 1"));
            }
            for &x in &xs {
                MomentQuery::even(0, x).validate(spec.beta())?;
            }
            for &kk in &k {
                for &x in &xs {
                    ctx.start();
                    let (order, e) = if odd {
                        (format!("odd k={kk}"), odd_moment_real(&spec, kk, x.re, &sigma, &q)?)
                    } else {
                        (format!("k={kk}"), duality_moment_general(&spec, kk, x, &sigma, &q)?)
                    };
                    let mut r = base("duality", &spec, order, Some(x), e.value, &e.method);
                    r.stderr = e.stderr;
                    ctx.emit(r.param("sigma", sigma.clone()))?;
                }
            }
        }
        Command::Boundary { beta, n, m, gamma, theta, group } => {
            for &g in &gamma {
                if !g.is_finite() {
                    return Err(usage("--gamma must be finite"));
                }
            }
            if let Some(name) = group {
                let grp = HaarGroup::parse(&name)?;
                for &g in &gamma {
                    ctx.start();
                    let v = haar_group_moment(grp, n, g)?.value();
                    let mut r = QueryRecord::new("boundary", format!("gamma={g}"), v, "closed-form/group");
                    r.n = Some(n);
                    ctx.emit(r.param("group", name.clone()))?;
                }
            } else {
                let beta = beta.ok_or_else(|| usage("--beta is required unless --group is given"))?;
                let m = m.ok_or_else(|| usage("--m is required unless --group is given"))?;
                let spec = ensemble(&Ensemble { beta, n, m })?;
                for &g in &gamma {
                    ctx.start();
                    let v = boundary_moment(&spec, g, theta)?.value();
                    let x = Complex64::from_polar(1.0, theta);
                    let r = base("boundary", &spec, format!("gamma={g}"), Some(x), v, "closed-form/boundary");
                    ctx.emit(r.param("theta", theta))?;
                }
            }
        }
        Command::Asympt { regime, beta, n, m, kappa, k, u, point, quad } => {
            let b = beta_of(beta)?;
            let q = quadrature(&quad, 1)?;
            match regime {
                RegimeArg::Weak => {
                    let kappa = match (kappa, n) {
                        (Some(kp), _) => kp,
                        (None, Some(n)) if n >= m => n - m,
                        _ => return Err(usage("weak regime needs --kappa or --n >= --m")),
                    };
                    let u = u.ok_or_else(|| usage("weak regime needs --u"))?;
                    let spec = EnsembleSpec::new(b, m + kappa, m)?;
                    let x = Complex64::new(weak_point(u, m)?, 0.0);
                    for &kk in &k {
                        ctx.start();
                        let v = weak_approx(b, kappa, kk, u, m, &q)?;
                        let r = base("asympt", &spec, format!("k={kk}"), Some(x), v, "asympt/weak");
                        ctx.emit(r.param("u", u).param("kappa", kappa))?;
                    }
                }
                RegimeArg::Strong => {
                    let n = n.ok_or_else(|| usage("strong regime needs --n"))?;
                    let spec = EnsembleSpec::new(b, n, m)?;
                    let xs = points(&point)?;
                    for &kk in &k {
                        for &x in &xs {
                            ctx.start();
                            let d = strong_approx_detail(&spec, kk, x, &q)?;
                            let r = base("asympt", &spec, format!("k={kk}"), Some(x), d.value, "asympt/strong");
                            ctx.emit(r.param("mu", d.mu).param("cdf_factor", d.cdf_factor).param("cdf_argument", d.cdf_argument))?;
                        }
                    }
                }
                RegimeArg::Origin => return Err(usage("asympt supports --regime weak or strong")),
            }
        }
        Command::Clt { beta, regime, mu_tilde, n, m, m_values, kappa, mu, at, max_order } => {
            let betas = match beta {
                Some(b) => vec![beta_of(b)?],
                None => Beta::ALL.to_vec(),
            };
            if !m_values.is_empty() {
                if !(1..=3).contains(&max_order) {
                    return Err(usage("--max-order must be 1, 2 or 3"));
                }
                if let Some(mu) = mu {
                    if !(mu > 0.0 && mu <= 1.0) {
                        return Err(usage(format!("--mu must lie in (0, 1], got {mu}")));
                    }
                }
                let kappa_default = kappa.unwrap_or(1);
                let mut specs = Vec::new();
                for &b in &betas {
                    for &mm in &m_values {
                        let nn = match mu {
                            Some(mu) => (mm as f64 / mu).round() as usize,
                            None => mm + kappa_default,
                        };
                        specs.push(EnsembleSpec::new(b, nn, mm)?);
                    }
                }
                for spec in &specs {
                    let mut cum = Vec::new();
                    for ord in 1..=max_order {
                        ctx.start();
                        let c = logdet_cumulants(spec, ord, at == Location::Boundary)?;
                        cum.push(c);
                        let loc = if at == Location::Boundary { "boundary" } else { "origin" };
                        let mut r = base("clt", spec, format!("cumulant={ord}"), None, c, &format!("cumulants/{loc}"));
                        r = r.param("log_m", (spec.m_trunc() as f64).ln());
                        if ord == 3 && cum[1] > 0.0 {
                            r = r.param("standardized", c / cum[1].powf(1.5));
                        }
                        ctx.emit(r)?;
                    }
                }
            } else {
                match regime {
                    RegimeArg::Weak | RegimeArg::Strong => {
                        let rg = if regime == RegimeArg::Weak { Regime::Weak } else { Regime::Strong };
                        for &b in &betas {
                            ctx.start();
                            let p = clt_params_boundary(b, rg, mu_tilde)?;
                            ctx.emit(clt_record(b, &p, None))?;
                        }
                    }
                    RegimeArg::Origin => {
                        let (n, m) = n.zip(m).ok_or_else(|| usage("origin regime needs --n and --m"))?;
                        for &b in &betas {
                            ctx.start();
                            let spec = EnsembleSpec::new(b, n, m)?;
                            let p = clt_params_origin(&spec)?;
                            ctx.emit(clt_record(b, &p, Some(&spec)))?;
                        }
                    }
                }
            }
        }
        Command::Validate { criteria, grid_samples, product_samples, seed } => {
            let mut cfg = ValidationConfig::default();
            cfg.grid_samples = grid_samples.unwrap_or(cfg.grid_samples);
            cfg.product_samples = product_samples.unwrap_or(cfg.product_samples);
            cfg.seed = seed.unwrap_or(cfg.seed);
            if cfg.grid_samples < 2 || cfg.product_samples < 2 {
                return Err(usage("sample counts must be at least 2"));
            }
            let ids: Vec<u8> = if criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { criteria };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=9).contains(&i)) {
                return Err(usage(format!("criteria are numbered 1 to 9, got {bad}")));
            }
            let mut all_pass = true;
            for id in ids {
                ctx.start();
                let rep = run_criterion(id, &cfg);
                eprintln!("{rep}");
                all_pass &= rep.passed;
                let v = if rep.passed { 1.0 } else { 0.0 };
                let r = QueryRecord::new("validate", format!("criterion={id}"), v, rep.name)
                    .param("passed", rep.passed)
                    .param("detail", rep.detail.clone());
                ctx.emit(r)?;
            }
            ctx.sink.flush()?;
            return Ok(if all_pass { 0 } else { 1 });
        }
    }
    ctx.sink.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let stdout = io::stdout();
    let mut ctx = Ctx { sink: Sink::new(stdout.lock(), cli.format), timing: cli.timing, clock: Instant::now() };
    match run(cli, &mut ctx) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = ctx.sink.flush();
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
