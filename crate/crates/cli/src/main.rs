//! `critorbit`: command-line experiments on orbits of `z^d + c`.

mod config;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use critorbit::density::{density_curve, geometric_checkpoints, ResidueClass, SieveConfig, DEFAULT_CHUNK};
use critorbit::dynamics::{orbit, orbit_divides_mod_q, verify_rds, zero_set, DEFAULT_BIT_CAP};
use critorbit::exactnum::{parse_rational, FactorEffort};
use critorbit::galoisprocess::{
    conditional_check, exact_yn_distribution, expected_fixed_points, extinction_curve, monte_carlo, psi_image,
    psi_image_explicit, BaseGroup, KernelSpec, Perm, TowerSpec,
};
use critorbit::localfields::{kummer_ram_degree, newton_polygon, ram_tower};
use critorbit::poly::{compose_with_iterate, factor_over_q_with, FactorOptions};
use critorbit::stability::{
    eventual_stability_verdict, factor_count_track, firststab_certify, maximality_witness, splitting_shape_verify,
    zcase_suite,
};
use critorbit::{Error, MapSpec, RatPoly};

use output::{render, Format, Meta, Rendered};

/// Environment variable holding the default worker count.
const THREADS_ENV: &str = "CRITORBIT_THREADS";

#[derive(Parser, Serialize)]
#[command(name = "critorbit", version, about = "Exact arithmetic experiments on orbits of z^d + c")]
#[command(args_override_self = true)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: $CRITORBIT_THREADS, else all cores). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    threads: Option<usize>,
    /// JSON object of flag values; flags on the command line take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct MapArgs {
    /// Degree of f(z) = z^d + c.
    #[arg(long)]
    d: u32,
    /// The constant c, as "a" or "a/b".
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    /// Starting point of the orbit (default 0).
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
}

impl MapArgs {
    fn spec(&self) -> Result<MapSpec, Error> {
        MapSpec::parse(self.d, &self.c, self.a0.as_deref())
    }
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Exact orbit values, the set of exact zeros, and divisibility mod q.
    Orbit {
        #[command(flatten)]
        #[serde(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Also decide whether q divides some orbit element.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Rigid-divisibility check of the critical orbit.
    RdsCheck {
        #[command(flatten)]
        #[serde(flatten)]
        map: MapArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Irreducibility and eventual-stability certificates.
    Stability {
        #[arg(long, value_enum)]
        mode: StabilityMode,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Odd prime exponent for the integer-c checks.
        #[arg(long)]
        p: Option<u64>,
        /// Polynomial g, e.g. "z" or "z^2 + 1".
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
    /// Factor g(f^n(z)) over Q.
    Factor {
        #[command(flatten)]
        #[serde(flatten)]
        map: MapArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        g: String,
        /// Check the splitting shape of the factors (d = 2).
        #[arg(long)]
        shape: bool,
        /// Also count factors of f^k for k = 1..=n.
        #[arg(long)]
        track: bool,
        #[arg(long, default_value_t = 64)]
        degree_cap: usize,
    },
    /// Newton polygon of a polynomial, or of f^n, at p.
    Newton {
        #[arg(long)]
        p: u64,
        /// Polynomial text or JSON coefficient list (constant first).
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Ramification of Kummer steps and of preimage towers.
    Ramify {
        #[arg(long, value_enum)]
        mode: RamifyMode,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Denominator of the starting valuation (default 1, i.e. deg g = 1).
        #[arg(long)]
        d0: Option<u64>,
    },
    /// The fixed-point process on an iterated wreath product.
    GaloisSim(GaloisArgs),
    /// Fraction of primes dividing some orbit element.
    Density {
        #[command(flatten)]
        #[serde(flatten)]
        map: MapArgs,
        #[arg(long = "X")]
        #[serde(rename = "X")]
        x: u64,
        /// Residue classes "r%m" sharing one modulus; primes outside them are skipped.
        #[arg(long, value_delimiter = ',')]
        classes: Vec<String>,
        /// Cumulative checkpoints (default 10^3, 10^4, ... and X).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_CHUNK)]
        chunk: u64,
    },
    /// Search for a prime certifying a maximal Kummer step at level n.
    Witness {
        #[command(flatten)]
        #[serde(flatten)]
        map: MapArgs,
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        trial_bound: u64,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StabilityMode {
    Firststab,
    Eventual,
    Zcase,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum RamifyMode {
    Kummer,
    Tower,
}

#[derive(Args, Serialize)]
struct GaloisArgs {
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = 1)]
    t0: usize,
    /// Kernel per level: "full" or "sum_in:R".
    #[arg(long, value_delimiter = ',')]
    kernels: Vec<String>,
    /// trivial, cyclic or symmetric.
    #[arg(long, default_value = "trivial")]
    base: String,
    /// Tower as a JSON file; replaces --d/--t0/--kernels/--base.
    #[arg(long)]
    tower: Option<PathBuf>,
    /// Exact law of Y_n (the default when nothing else is requested).
    #[arg(long)]
    exact: bool,
    /// Monte Carlo with this many samples.
    #[arg(long)]
    samples: Option<u64>,
    /// Extinction curve up to this level.
    #[arg(long)]
    extinction: Option<usize>,
    /// One-step law checks for t up to this bound.
    #[arg(long)]
    conditional: Option<u64>,
    /// Image of psi at this level.
    #[arg(long)]
    psi_level: Option<usize>,
    /// JSON file {"d", "sigma_s", "elements"} listing a permutation group.
    #[arg(long)]
    psi_explicit: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ExplicitGroup {
    d: u32,
    sigma_s: Perm,
    elements: Vec<Perm>,
}

fn arg_error(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| arg_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| arg_error(format!("bad JSON in {}: {e}", path.display())))
}

fn galois(a: &GaloisArgs, seed: u64) -> Result<Rendered, Error> {
    let spec = match &a.tower {
        Some(path) => read_json::<TowerSpec>(path)?,
        None => TowerSpec {
            d: a.d.ok_or_else(|| arg_error("--d or --tower is required"))?,
            t0: a.t0,
            base: a.base.parse::<BaseGroup>()?,
            kernels: a.kernels.iter().map(|k| k.parse::<KernelSpec>()).collect::<Result<_, _>>()?,
        },
    };
    spec.validate()?;
    let mut result = serde_json::Map::new();
    result.insert("tower".into(), json!(spec));
    let mut csv = None;
    let nothing_else = a.samples.is_none()
        && a.extinction.is_none()
        && a.conditional.is_none()
        && a.psi_level.is_none()
        && a.psi_explicit.is_none();
    if a.exact || nothing_else {
        let dist = exact_yn_distribution(&spec)?;
        let means = expected_fixed_points(&spec)?;
        let levels: Vec<_> = dist
            .iter()
            .zip(&means)
            .enumerate()
            .map(|(n, (p, e))| {
                json!({
                    "n": n,
                    "distribution": p,
                    "p_positive": critorbit::exactnum::format_rational(&p.prob_positive()),
                    "expectation": critorbit::exactnum::format_rational(e),
                })
            })
            .collect();
        let mut table = String::from("n,y,probability\n");
        for (n, p) in dist.iter().enumerate() {
            for (y, q) in &p.0 {
                let _ = writeln!(table, "{n},{y},{}", critorbit::exactnum::format_rational(q));
            }
        }
        csv = Some(table);
        result.insert("exact".into(), json!(levels));
    }
    if let Some(samples) = a.samples {
        result.insert("monte_carlo".into(), json!(monte_carlo(&spec, samples, seed)?));
    }
    if let Some(n_max) = a.extinction {
        let curve = extinction_curve(spec.d, spec.t0 as u64, n_max)?;
        let mut table = String::from("n,q_exact,survival_exact,survival_lower,survival_upper\n");
        for p in &curve {
            let fmt = |x: &Option<critorbit::Rational>| {
                x.as_ref().map(critorbit::exactnum::format_rational).unwrap_or_default()
            };
            let _ = writeln!(
                table,
                "{},{},{},{:e},{:e}",
                p.n,
                fmt(&p.q_exact),
                fmt(&p.survival_exact),
                p.survival_lower,
                p.survival_upper
            );
        }
        csv = Some(table);
        result.insert("extinction".into(), json!(curve));
    }
    if let Some(max_t) = a.conditional {
        result.insert("conditional".into(), json!(conditional_check(&spec, max_t)?));
    }
    if let Some(level) = a.psi_level {
        result.insert("psi_image".into(), json!(psi_image(&spec, level)?));
    }
    if let Some(path) = &a.psi_explicit {
        let g: ExplicitGroup = read_json(path)?;
        result.insert("psi_image_explicit".into(), json!(psi_image_explicit(g.d, &g.sigma_s, &g.elements)?));
    }
    let mut r = Rendered::json(result);
    r.csv = csv;
    Ok(r)
}

fn run(cli: &Cli) -> Result<Rendered, Error> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Orbit { map, n, q } => {
            let m = map.spec()?;
            let orb = orbit(&m, *n, DEFAULT_BIT_CAP)?;
            let mut table = String::from("n,value\n");
            let _ = writeln!(table, "0,{}", critorbit::exactnum::format_rational(&m.a0));
            for (i, v) in orb.values.iter().enumerate() {
                let _ = writeln!(table, "{},{}", i + 1, critorbit::exactnum::format_rational(v));
            }
            let modq = q.map(|q| orbit_divides_mod_q(&m, q)).transpose()?;
            Rendered::json(json!({"map": m, "orbit": orb, "zeros": zero_set(&m)?, "mod_q": modq})).with_csv(table)
        }
        Command::RdsCheck { map, primes, n } => {
            let m = map.spec()?;
            let report = verify_rds(&m, primes, *n)?;
            Rendered::json(json!({"map": m, "holds": report.holds(), "report": report}))
        }
        Command::Stability { mode, d, c, p, g, levels } => match mode {
            StabilityMode::Firststab => {
                let m = MapSpec::parse(d.ok_or_else(|| arg_error("--d is required"))?, c, None)?;
                let g = RatPoly::parse_any(g)?;
                let cert = firststab_certify(&g, &m, *levels)?;
                Rendered::json(json!({"map": m, "g": g.to_string(), "certificate": cert}))
            }
            StabilityMode::Eventual => {
                let m = MapSpec::parse(d.ok_or_else(|| arg_error("--d is required"))?, c, None)?;
                Rendered::json(json!({"map": m, "certificate": eventual_stability_verdict(&m)?}))
            }
            StabilityMode::Zcase => {
                let p = p.or(d.map(u64::from)).ok_or_else(|| arg_error("--p is required"))?;
                let c = parse_rational(c)?;
                if !c.is_integer() {
                    return Err(arg_error("zcase needs an integer c"));
                }
                let report = zcase_suite(p, c.numer(), *levels)?;
                Rendered::json(json!({"all_certified": report.all_certified(), "report": report}))
            }
        },
        Command::Factor { map, n, g, shape, track, degree_cap } => {
            let m = map.spec()?;
            let gp = RatPoly::parse_any(g)?;
            let f = compose_with_iterate(&gp, &m, *n)?;
            let opts = FactorOptions { degree_cap: *degree_cap, seed, ..FactorOptions::default() };
            let factors = factor_over_q_with(&f, &opts)?;
            let shape = if *shape { Some(splitting_shape_verify(&gp, &m, *n, &factors)?) } else { None };
            let track = if *track { Some(factor_count_track(&m, *n)?) } else { None };
            let mut table = String::from("factor,multiplicity,degree\n");
            for (h, e) in &factors.factors {
                let _ = writeln!(table, "\"{h}\",{e},{}", h.deg());
            }
            Rendered::json(json!({
                "map": m,
                "polynomial": f.to_string(),
                "degree": f.deg(),
                "count": factors.count_with_multiplicity(),
                "degrees": factors.degrees(),
                "factors_text": factors.factors.iter().map(|(h, _)| h.to_string()).collect::<Vec<_>>(),
                "factors": factors,
                "shape": shape,
                "track": track,
            }))
            .with_csv(table)
        }
        Command::Newton { p, poly, d, c, n } => {
            let (f, source) = match (poly, d, c) {
                (Some(text), None, None) => (RatPoly::parse_any(text)?, json!(text)),
                (None, Some(d), Some(c)) => {
                    let m = MapSpec::parse(*d, c, None)?;
                    (compose_with_iterate(&RatPoly::z(), &m, *n)?, json!({"map": m, "n": n}))
                }
                _ => return Err(arg_error("give either --poly or both --d and --c")),
            };
            let np = newton_polygon(&f, *p)?;
            let mut table = String::from("slope,length\n");
            for s in &np.segments {
                let _ = writeln!(table, "{},{}", critorbit::exactnum::format_rational(&s.slope), s.length);
            }
            Rendered::json(json!({"source": source, "slopes": np.slopes().iter().map(critorbit::exactnum::format_rational).collect::<Vec<_>>(), "polygon": np}))
                .with_csv(table)
        }
        Command::Ramify { mode, d, r, levels, d0 } => match mode {
            RamifyMode::Kummer => Rendered::json(json!({"d": d, "r": r, "e": kummer_ram_degree(*d, *r)?})),
            RamifyMode::Tower => {
                let t = ram_tower(*d, *r, *levels, d0.unwrap_or(1))?;
                let mut table = String::from("n,e,k\n");
                for (i, (e, k)) in t.e.iter().zip(&t.k).enumerate() {
                    let _ = writeln!(table, "{i},{e},{k}");
                }
                Rendered::json(&t).with_csv(table)
            }
        },
        Command::GaloisSim(a) => galois(a, seed)?,
        Command::Density { map, x, classes, checkpoints, chunk } => {
            let m = map.spec()?;
            let classes = classes.iter().map(|c| c.parse::<ResidueClass>()).collect::<Result<Vec<_>, _>>()?;
            let mut cfg = SieveConfig::new(*x).with_classes(classes);
            cfg.chunk = *chunk;
            let cps = if checkpoints.is_empty() { geometric_checkpoints(*x) } else { checkpoints.clone() };
            let report = density_curve(&m, &cfg, &cps)?;
            let table = report.to_csv();
            Rendered::json(&report).with_csv(table)
        }
        Command::Witness { map, g, n, trial_bound } => {
            let m = map.spec()?;
            let gp = RatPoly::parse_any(g)?;
            let effort = FactorEffort { trial_bound: *trial_bound, seed, ..FactorEffort::default() };
            Rendered::json(
                json!({"map": m, "g": gp.to_string(), "n": n, "outcome": maximality_witness(&gp, &m, *n, effort)?}),
            )
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) => 2,
        Error::Capability(_) => 3,
        Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let threads = cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads.filter(|&t| t > 0) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let rendered = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let config = serde_json::to_value(&cli).expect("config serializes");
    let command = config["command"]["name"].as_str().unwrap_or("").to_string();
    let meta = Meta { command: &command, seed: cli.seed, config };
    let text = render(&meta, &rendered, cli.format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
