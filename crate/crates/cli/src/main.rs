use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use g2sew::graphs::cycles_csv;
use g2sew::partition::{z2, Family};
use g2sew::sewing::{period_matrix_with_order, PeriodMatrix, Sewing, SewingPoint};
use g2sew::theta::{riemann_theta2, riemann_theta2_auto, siegel_theta2, siegel_theta2_auto, Characteristics, EvenLattice};
use g2sew::verify::{self, Fault, Options, Suite};
use g2sew::{Error, C64};
use g2sew_cli::output::{self, PartitionOut, PeriodOut, ThetaOut, VerifyOut};
use g2sew_cli::{exit, exit_code, parse_complex, parse_gram, parse_pair, Format, Overrides, RunConfig};

/// Genus-two sewing for free-boson vertex algebras.
#[derive(Parser)]
#[command(name = "g2sew", version)]
struct Cli {
    /// flat key=value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// A-matrix truncation
    #[arg(long = "K", short = 'K', global = true)]
    k: Option<usize>,
    /// q-expansion order
    #[arg(long = "N", short = 'N', global = true)]
    n: Option<usize>,
    /// graph degree cap
    #[arg(long = "D", short = 'D', global = true)]
    d: Option<u32>,
    /// Fock-space order
    #[arg(long = "N-max", global = true)]
    n_max: Option<u32>,
    /// theta cutoff (automatic when absent)
    #[arg(long = "R", short = 'R', global = true)]
    r: Option<f64>,
    #[arg(long, global = true)]
    tol_series: Option<f64>,
    #[arg(long, global = true)]
    tol_geometry: Option<f64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct PointArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau1: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau2: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    eps: C64,
}

impl PointArgs {
    fn point(&self) -> g2sew::Result<SewingPoint> {
        SewingPoint::new(self.tau1, self.tau2, self.eps)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Boson,
    Module,
    Lattice,
    Orbifold,
}

#[derive(Args)]
struct FamilyArgs {
    /// rank of the Heisenberg algebra (boson)
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// module charges "a1,a2" (module)
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    alpha: Option<[f64; 2]>,
    /// Gram matrix, rows split by ';' (lattice), e.g. "2" or "2,-1;-1,2"
    #[arg(long, value_parser = |s: &str| parse_gram(s).map(Gram), allow_hyphen_values = true)]
    gram: Option<Gram>,
    /// characteristic λ as "l1,l2" (orbifold)
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    lambda: Option<[f64; 2]>,
    /// characteristic μ as "m1,m2" (orbifold)
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    mu: Option<[f64; 2]>,
}

#[derive(Clone)]
struct Gram(Vec<Vec<i64>>);

#[derive(Subcommand)]
enum Cmd {
    /// period matrix Ω at (τ1, τ2, ε)
    Period(PointArgs),
    /// genus-two partition function of a family
    Partition {
        #[arg(value_enum)]
        family: FamilyKind,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        params: FamilyArgs,
    },
    /// Siegel (--gram) or Riemann (--lambda/--mu) theta at Ω
    Theta {
        #[command(flatten)]
        params: FamilyArgs,
        /// explicit Ω as "o11,o12,o22" with complex entries
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau1: Option<C64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau2: Option<C64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        eps: C64,
    },
    /// rotationless chequered cycles up to degree D with weights, as CSV
    Cycles(PointArgs),
    /// run the numerical check suites
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

fn family(kind: FamilyKind, p: &FamilyArgs) -> Result<(Family, String), Failure> {
    let need = |what: &str| Failure::Usage(format!("missing --{what}"));
    Ok(match kind {
        FamilyKind::Boson => {
            if p.rank == 0 {
                return Err(Failure::Usage("--rank must be positive".into()));
            }
            (Family::Boson(p.rank), "boson".into())
        }
        FamilyKind::Module => (Family::Module(p.alpha.ok_or_else(|| need("alpha"))?), "module".into()),
        FamilyKind::Lattice => (Family::Lattice(EvenLattice::new(p.gram.clone().ok_or_else(|| need("gram"))?.0)?), "lattice".into()),
        FamilyKind::Orbifold => (
            Family::Orbifold(Characteristics { lambda: p.lambda.ok_or_else(|| need("lambda"))?, mu: p.mu.ok_or_else(|| need("mu"))? }),
            "orbifold".into(),
        ),
    })
}

fn parse_omega(s: &str) -> Result<PeriodMatrix, Failure> {
    let v: Vec<C64> = s.split(',').map(parse_complex).collect::<Result<_, _>>().map_err(Failure::Usage)?;
    let [a, b, c] = v[..] else {
        return Err(Failure::Usage("--omega needs three entries o11,o12,o22".into()));
    };
    let mut o = PeriodMatrix::diag(a, c);
    o.omega12 = b;
    Ok(o)
}

fn omega_rows(o: &PeriodMatrix) -> [(&'static str, C64); 3] {
    [("omega11", o.omega11), ("omega12", o.omega12), ("omega22", o.omega22)]
}

fn run(cli: Cli) -> Result<String, Failure> {
    let flags = Overrides {
        k: cli.k,
        n: cli.n,
        d: cli.d,
        n_max: cli.n_max,
        r: cli.r,
        tol_series: cli.tol_series,
        tol_geometry: cli.tol_geometry,
        format: cli.format,
        seed: cli.seed,
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &flags).map_err(Failure::Usage)?;
    let csv = cfg.format == Format::Csv;
    match cli.cmd {
        Cmd::Period(pa) => {
            let p = pa.point()?;
            let o = period_matrix_with_order(&p, cfg.k, cfg.n)?;
            if csv {
                let mut s = output::complex_csv(&omega_rows(&o));
                s += &format!("est_error,{},0\ndomain_margin,{},0\n", output::fmt17(o.est_error), output::fmt17(1.0 - p.margin));
                return Ok(s);
            }
            Ok(output::to_json(&PeriodOut::new(&o, 1.0 - p.margin, cfg.tol_geometry)))
        }
        Cmd::Partition { family: kind, point, params } => {
            let (fam, name) = family(kind, &params)?;
            let r = z2(&fam, &point.point()?, cfg.k, cfg.n, cfg.r)?;
            if csv {
                let b = &r.breakdown;
                return Ok(output::complex_csv(&[
                    ("value", r.value),
                    ("z1_left", b.z1_left),
                    ("z1_right", b.z1_right),
                    ("det_factor", b.det_factor),
                    ("theta_factor", b.theta_factor),
                    ("phase", b.phase),
                ]));
            }
            Ok(output::to_json(&PartitionOut::new(&name, &r, cfg.tol_series)))
        }
        Cmd::Theta { params, omega, tau1, tau2, eps } => {
            let o = match (omega, tau1, tau2) {
                (Some(s), None, None) => parse_omega(&s)?,
                (None, Some(t1), Some(t2)) => period_matrix_with_order(&SewingPoint::new(t1, t2, eps)?, cfg.k, cfg.n)?,
                _ => return Err(Failure::Usage("give either --omega or both --tau1 and --tau2".into())),
            };
            let t = match (&params.gram, params.lambda, params.mu) {
                (Some(g), None, None) => {
                    let lat = EvenLattice::new(g.0.clone())?;
                    match cfg.r {
                        Some(r) => siegel_theta2(&lat, &o, r)?,
                        None => siegel_theta2_auto(&lat, &o)?,
                    }
                }
                (None, Some(lambda), Some(mu)) => {
                    let ch = Characteristics { lambda, mu };
                    match cfg.r {
                        Some(r) => riemann_theta2(&ch, &o, r)?,
                        None => riemann_theta2_auto(&ch, &o)?,
                    }
                }
                _ => return Err(Failure::Usage("give either --gram or both --lambda and --mu".into())),
            };
            if csv {
                let mut rows = vec![("value", t.value)];
                rows.extend(omega_rows(&o));
                return Ok(output::complex_csv(&rows));
            }
            Ok(output::to_json(&ThetaOut::new(&t, &o)))
        }
        Cmd::Cycles(pa) => {
            let s = Sewing::with_order(&pa.point()?, cfg.k.max(cfg.d as usize), cfg.n)?;
            Ok(cycles_csv(&s, cfg.d))
        }
        Cmd::Verify { suite, inject_fault } => {
            let suites = Suite::parse_list(&suite).map_err(|e| Failure::Usage(e.to_string()))?;
            let fault = inject_fault.as_deref().map(Fault::parse).transpose().map_err(|e| Failure::Usage(e.to_string()))?;
            let opts = Options { seed: cfg.seed, fault, k: cfg.k, n_max: cfg.n_max, d: cfg.d };
            let report = verify::run(&suites, opts);
            let text = if csv { report.to_csv() } else { output::to_json(&VerifyOut::new(&suite, cfg.seed, &report)) };
            if report.all_passed() {
                Ok(text)
            } else {
                Err(Failure::Verify(text))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(text) => {
            println!("{}", text.trim_end());
            exit::OK
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            exit::DOMAIN
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::Verify(text)) => {
            println!("{}", text.trim_end());
            exit::VERIFY_FAILED
        }
    };
    ExitCode::from(code as u8)
}
