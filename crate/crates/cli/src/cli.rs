//! Argument parsing and dispatch for the `orbits` binary.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbit_spaces::checks;
use orbit_spaces::metrics::{Exponent, MetricSpec};
use orbit_spaces::witnesses::{
    cauchy_circle_witness, completeness_probe, orbit_sphere_obstruction, sphere_degree,
    unbounded_components_witness, Space, TestMap, DEGREE_TOLERANCE,
};
use orbit_spaces::Vec3;

use crate::catalog::{self, Catalog, FileFormat, LoadOptions};
use crate::config::{MetricKind, RunConfig, Threads};
use crate::error::{CatalogError, Result};
use crate::matrix::{dist, distance_matrix, nearest};
use crate::output::{neighbors_csv, neighbors_json, report_json, round_sig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "orbits",
    version,
    about = "Distances, charts and topological witnesses for Keplerian orbits"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Gravitational parameter.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub kappa2: f64,
    /// Metric exponent, a number >= 1 or "inf".
    #[arg(long, global = true, default_value = "2")]
    pub p: Exponent,
    #[arg(long, global = true, value_enum, default_value_t = MetricKind::Rho)]
    pub metric: MetricKind,
    /// Initial quadrature nodes (power of two).
    #[arg(long = "n-u", global = true, default_value_t = 512)]
    pub n_u: usize,
    /// Coarse phase-shift grid size.
    #[arg(long = "n-s", global = true, default_value_t = 256)]
    pub n_s: usize,
    #[arg(long = "refine-tol", global = true, default_value_t = 1e-10)]
    pub refine_tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads, a count or "auto"; falls back to ORBITS_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<Threads>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format: JSON by default, the input format for `convert`;
    /// reports are always JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FileFormat>,
    /// Catalog file; read from stdin when absent.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Catalog format; guessed from the extension, CSV for stdin.
    #[arg(long = "catalog-format", global = true, value_enum)]
    pub catalog_format: Option<FileFormat>,
    /// Drop malformed catalog rows instead of failing.
    #[arg(long = "skip-bad", global = true)]
    pub skip_bad: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a catalog between elements and (c, e, h) vectors.
    Convert {
        #[arg(long, value_enum, default_value_t = ConvertTarget::Vectors)]
        to: ConvertTarget,
    },
    /// Distance between two catalog records.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Pairwise distance matrix of the catalog.
    Matrix,
    /// Nearest records to a query.
    Nearest {
        #[arg(long)]
        id: String,
        #[arg(short = 'k', long = "k")]
        k: usize,
    },
    /// Seeded self-checks.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Topological witnesses.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Propagator checks.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Defaults to one period.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        ecc: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Vectors,
    Elements,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Roundtrip,
    Axioms,
    Constraints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Conservation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    /// H(b) with the floor given by --floor.
    H,
    /// Elliptic orbits with marked pericenter.
    Estar,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Degree of a test map of the sphere.
    Degree {
        #[arg(long, default_value = "identity")]
        map: String,
        /// Winding number of the `winding` map.
        #[arg(long, default_value_t = 2)]
        k: i32,
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Degree of the sphere of orbits |c| = radius mapped back to S².
    Obstruction {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0)]
        floor: f64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Add a tangent Laplace vector field.
        #[arg(long)]
        perturb: bool,
    },
    /// Shrinking concentric circles under the configured exponent.
    Cauchy {
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: usize,
    },
    /// Escape points on both sides of the h = -1 stratum.
    Unbounded {
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Cauchy sequence leaving the space through its excluded boundary.
    Completeness {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long, default_value_t = 0.0)]
        floor: f64,
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: usize,
    },
}

/// Text to emit and whether the command's check passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

impl GlobalArgs {
    fn config(&self) -> Result<RunConfig> {
        let threads = match self.threads {
            Some(t) => t,
            None => Threads::from_env()?.unwrap_or_default(),
        };
        let config = RunConfig {
            kappa2: self.kappa2,
            metric: self.metric,
            p: self.p,
            n_u: self.n_u,
            n_s: self.n_s,
            refine_tol: self.refine_tol,
            seed: self.seed,
            threads,
        };
        config.validate()?;
        Ok(config)
    }

    fn input(&self, stdin: &mut dyn Read) -> Result<(String, FileFormat)> {
        let format = self
            .catalog_format
            .or_else(|| self.catalog.as_deref().and_then(FileFormat::from_path))
            .unwrap_or(FileFormat::Csv);
        let text = match &self.catalog {
            Some(path) => fs::read_to_string(path).map_err(|source| CatalogError::Io {
                path: path.clone(),
                source,
            })?,
            None => {
                let mut s = String::new();
                stdin.read_to_string(&mut s)?;
                s
            }
        };
        Ok((text, format))
    }

    fn load(&self, stdin: &mut dyn Read, err: &mut dyn Write) -> Result<Catalog> {
        let (text, format) = self.input(stdin)?;
        let opts = LoadOptions {
            format,
            kappa2: self.kappa2,
            skip_bad: self.skip_bad,
        };
        let cat = catalog::parse_catalog(&text, &opts)?;
        for e in &cat.skipped {
            writeln!(err, "skipped {e}")?;
        }
        Ok(cat)
    }

    fn require_json(&self, what: &str) -> Result<()> {
        if self.format.is_some_and(|f| f != FileFormat::Json) {
            return Err(CatalogError::Config(format!(
                "{what} reports are JSON only"
            )));
        }
        Ok(())
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read, err: &mut dyn Write) -> Result<Outcome> {
    let g = &cli.global;
    let config = g.config()?;
    let spec = config.metric_spec();
    match &cli.command {
        Command::Convert { to } => {
            let (text, in_format) = g.input(stdin)?;
            let opts = LoadOptions {
                format: in_format,
                kappa2: g.kappa2,
                skip_bad: g.skip_bad,
            };
            let out_format = g.format.unwrap_or(in_format);
            let mut buf = Vec::new();
            let skipped = match to {
                ConvertTarget::Vectors => {
                    let cat = catalog::parse_catalog(&text, &opts)?;
                    catalog::write_vectors(
                        &catalog::to_vectors(&cat.records)?,
                        &mut buf,
                        out_format,
                    )?;
                    cat.skipped
                }
                ConvertTarget::Elements => {
                    let cat = catalog::parse_vectors(&text, &opts)?;
                    catalog::write_catalog(&cat.records, &mut buf, out_format)?;
                    cat.skipped
                }
            };
            for e in &skipped {
                writeln!(err, "skipped {e}")?;
            }
            Ok(Outcome::ok(
                String::from_utf8(buf).expect("serializers emit UTF-8"),
            ))
        }
        Command::Dist { a, b } => {
            let cat = g.load(stdin, err)?;
            let (ra, rb) = (cat.find(a)?, cat.find(b)?);
            let oa = ra.orbit().map_err(|source| CatalogError::Record {
                id: a.clone(),
                source,
            })?;
            let ob = rb.orbit().map_err(|source| CatalogError::Record {
                id: b.clone(),
                source,
            })?;
            let d = dist(&oa, &ob, &config).map_err(|source| CatalogError::Pair {
                a: a.clone(),
                b: b.clone(),
                source,
            })?;
            Ok(Outcome::ok(format!(
                "{}\n",
                serde_json::to_string(&round_sig(d))?
            )))
        }
        Command::Matrix => {
            let cat = g.load(stdin, err)?;
            let m = distance_matrix(&cat.records, &config)?;
            let text = match g.format.unwrap_or(FileFormat::Json) {
                FileFormat::Json => m.to_json()?,
                FileFormat::Csv => m.to_csv()?,
            };
            Ok(Outcome::ok(text))
        }
        Command::Nearest { id, k } => {
            let cat = g.load(stdin, err)?;
            let ranked = nearest(&cat.records, id, *k, &config)?;
            let text = match g.format.unwrap_or(FileFormat::Json) {
                FileFormat::Json => neighbors_json(
                    id,
                    &config.metric.to_string(),
                    &config.p.to_string(),
                    &ranked,
                )?,
                FileFormat::Csv => neighbors_csv(&ranked)?,
            };
            Ok(Outcome::ok(text))
        }
        Command::Check { kind, samples } => {
            g.require_json("check")?;
            let seed = g.seed;
            match kind {
                CheckKind::Roundtrip => {
                    let r = checks::roundtrip_check(*samples, seed)?;
                    report("check roundtrip", seed, &r, r.passed)
                }
                CheckKind::Axioms => {
                    let r = checks::axiom_check(*samples, seed, g.kappa2, &spec)?;
                    report("check axioms", seed, &r, r.passed)
                }
                CheckKind::Constraints => {
                    let r = checks::constraint_check(*samples, seed)?;
                    report("check constraints", seed, &r, r.passed)
                }
            }
        }
        Command::Verify {
            kind: VerifyKind::Conservation,
            dt,
            steps,
            ecc,
        } => {
            g.require_json("verify")?;
            let r = checks::conservation_check(*ecc, *dt, *steps)?;
            report("verify conservation", g.seed, &r, r.passed)
        }
        Command::Witness(w) => {
            g.require_json("witness")?;
            witness(w, g, &spec)
        }
    }
}

fn report(command: &str, seed: u64, r: &impl serde::Serialize, passed: bool) -> Result<Outcome> {
    Ok(Outcome {
        text: report_json(command, seed, r, passed)?,
        passed,
    })
}

fn witness(w: &WitnessCommand, g: &GlobalArgs, spec: &MetricSpec) -> Result<Outcome> {
    let seed = g.seed;
    match *w {
        WitnessCommand::Degree { ref map, k, depth } => {
            let m = TestMap::parse(map, k).ok_or_else(|| {
                CatalogError::Config(format!(
                    "unknown map {map:?}; use identity, antipodal, constant or winding"
                ))
            })?;
            let r = sphere_degree(|x| m.apply(x), depth)?;
            let passed = r.degree == m.expected_degree()
                && (r.raw_sum - r.degree as f64).abs() <= DEGREE_TOLERANCE;
            report("witness degree", seed, &r, passed)
        }
        WitnessCommand::Obstruction {
            radius,
            floor,
            depth,
            perturb,
        } => {
            let field = perturb.then(|| Vec3::new(0.3, -0.7, 0.4));
            let r = orbit_sphere_obstruction(radius, floor, depth, field)?;
            let passed = r.degree.degree == 1 && r.min_radius_margin > 0.0;
            report("witness obstruction", seed, &r, passed)
        }
        WitnessCommand::Cauchy { n_max } => {
            let r = cauchy_circle_witness(n_max, spec.p, spec)?;
            report("witness cauchy", seed, &r, r.passed())
        }
        WitnessCommand::Unbounded { radius, samples } => {
            let r = unbounded_components_witness(radius, g.kappa2, samples, seed)?;
            report("witness unbounded", seed, &r, r.passed())
        }
        WitnessCommand::Completeness {
            space,
            floor,
            n_max,
        } => {
            let space = match space {
                SpaceArg::H => Space::HFloor(floor),
                SpaceArg::Estar => Space::EStar,
            };
            let r = completeness_probe(space, n_max, spec)?;
            report("witness completeness", seed, &r, r.passed())
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CatalogError::Io {
            path: path.clone(),
            source,
        }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code:
/// 0 on success, 1 when a check or witness fails, 2 on usage or I/O errors.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = execute(&cli, stdin, err).and_then(|o| {
        emit(&o.text, cli.global.output.as_ref(), out)?;
        Ok(o.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
