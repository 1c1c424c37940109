use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use nearcurve::counting::{count_gamma, CountQuery};
use nearcurve::detmethod::{run_pipeline, PipelineConfig};
use nearcurve::experiments::{fit_and_report, ExperimentConfig, ReportOutputs};
use nearcurve::forms::{IntegerForm, ScanBudget, SingularityVerdict};
use nearcurve::geometry::{flex_report, FlexOptions, FlexReport};
use nearcurve::lattice::gamma_minima;
use nearcurve::thue::height::height;
use nearcurve::thue::{count_thue_lattice, factor_binary, Sublattice2};
use nearcurve::{Error, Result};

#[derive(Parser)]
#[command(name = "nearcurve", version, about = "Primitive integer points near plane curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Starting precision of the flex computation.
    #[arg(long = "precision-bits", global = true)]
    precision_bits: Option<u32>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// SVG plot (experiments only).
    #[arg(long, global = true)]
    plot: Option<PathBuf>,

    /// Count even when the singularity scan is inconclusive or finds a singular point.
    #[arg(long = "allow-unverified", global = true)]
    allow_unverified: bool,
}

#[derive(Subcommand)]
enum Cmd {
    Forms {
        #[command(subcommand)]
        cmd: FormsCmd,
    },
    Geometry {
        #[command(subcommand)]
        cmd: GeometryCmd,
    },
    Count {
        #[command(subcommand)]
        cmd: CountCmd,
    },
    Detmethod {
        #[command(subcommand)]
        cmd: DetCmd,
    },
    Thue {
        #[command(subcommand)]
        cmd: ThueCmd,
    },
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum FormsCmd {
    /// Parse a form and report its basic invariants.
    Check {
        file: PathBuf,
        /// Variable count for plain-text forms.
        #[arg(long, default_value_t = 3)]
        nvars: usize,
    },
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Flexes and tangent lines of a ternary form.
    Flexes { file: PathBuf },
}

#[derive(Subcommand)]
enum CountCmd {
    /// Count primitive solutions of |F| <= B^gamma in the cube of side B.
    Scan {
        file: PathBuf,
        #[arg(long = "B")]
        b: u64,
        #[arg(long)]
        gamma: String,
        #[arg(long = "exclude-tangents")]
        exclude_tangents: bool,
    },
}

#[derive(Subcommand)]
enum DetCmd {
    /// Box cover and auxiliary forms for |F| <= B^(k - tau).
    Run {
        file: PathBuf,
        #[arg(long = "B")]
        b: u64,
        #[arg(long)]
        tau: String,
        #[arg(long = "Dmax", default_value_t = 6)]
        d_max: u32,
    },
}

#[derive(Subcommand)]
enum ThueCmd {
    /// Count primitive x in a sublattice with |x| <= B and 1 <= |F(x)| <= P.
    Count {
        file: PathBuf,
        #[arg(long = "B")]
        b: u64,
        #[arg(long = "P")]
        p: u64,
        #[arg(long, requires_all = ["s0", "t0"])]
        eta: Option<i64>,
        #[arg(long)]
        s0: Option<i64>,
        #[arg(long)]
        t0: Option<i64>,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Successive minima of the box lattice at offset (r/M, s/M).
    Minima {
        #[arg(long = "M")]
        m: i64,
        #[arg(long = "B")]
        b: i64,
        #[arg(long, default_value_t = 0)]
        r: i64,
        #[arg(long, default_value_t = 0)]
        s: i64,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Count over several B, fit log2 N_star against log2 B and compare with the bound.
    Scaling {
        file: PathBuf,
        #[arg(long)]
        gamma: String,
        #[arg(long = "B-list", value_delimiter = ',', required = true)]
        b_list: Vec<u64>,
        #[arg(long, default_value_t = 0.2)]
        slack: f64,
    },
}

fn read_form(path: &Path, nvars: usize) -> Result<IntegerForm> {
    let text = std::fs::read_to_string(path)?;
    let f = if text.trim_start().starts_with('{') {
        IntegerForm::from_json(&text)?
    } else {
        IntegerForm::parse(nvars, text.trim())?
    };
    if f.nvars() != nvars {
        return Err(Error::Arity { expected: nvars, got: f.nvars() });
    }
    Ok(f)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|e| Error::Parse(format!("bad rational {s}: {e}")))
}

fn flex_options(cli: &Cli) -> FlexOptions {
    let mut o = FlexOptions::default();
    if let Some(p) = cli.precision_bits {
        o.precision_bits = p;
    }
    if let Some(s) = cli.seed {
        o.seed = s;
    }
    o
}

fn flexes(cli: &Cli, f: &IntegerForm) -> Result<FlexReport> {
    flex_report(f, &flex_options(cli))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

fn forms_check(cli: &Cli, file: &Path, nvars: usize) -> Result<()> {
    let text = std::fs::read_to_string(file)?;
    let f = if text.trim_start().starts_with('{') {
        IntegerForm::from_json(&text)?
    } else {
        IntegerForm::parse(nvars, text.trim())?
    };
    let mut v = json!({
        "form": f.to_string(),
        "nvars": f.nvars(),
        "degree": f.degree(),
        "terms": f.num_terms(),
        "content": f.content().to_string(),
        "height": f.height().to_string(),
    });
    match f.nvars() {
        3 => {
            let verdict = match f.singularity_scan(&ScanBudget::default())? {
                SingularityVerdict::NonsingularCertified => json!("nonsingular"),
                SingularityVerdict::SingularWithWitness(w) => {
                    json!({"singular_at": [w.x.to_string(), w.y.to_string(), w.z.to_string()]})
                }
                SingularityVerdict::Inconclusive => json!("inconclusive"),
            };
            v["singularity"] = verdict;
        }
        2 => {
            let fac = factor_binary(&f)?;
            v["a"] = json!(fac.a);
            v["H"] = json!(height(&f)?);
        }
        _ => {}
    }
    emit(cli, &pretty(&v))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Forms { cmd: FormsCmd::Check { file, nvars } } => forms_check(cli, file, *nvars),
        Cmd::Geometry { cmd: GeometryCmd::Flexes { file } } => {
            let f = read_form(file, 3)?;
            emit(cli, &pretty(&flexes(cli, &f)?.to_json()))
        }
        Cmd::Count { cmd: CountCmd::Scan { file, b, gamma, exclude_tangents } } => {
            let f = read_form(file, 3)?;
            let mut q = CountQuery::new(f, *b, parse_rational(gamma)?)?;
            q.allow_unverified = cli.allow_unverified;
            let fl = if *exclude_tangents { Some(flexes(cli, &q.form)?) } else { None };
            let r = count_gamma(&q, fl.as_ref())?;
            emit(cli, &serde_json::to_string_pretty(&r).expect("json"))
        }
        Cmd::Detmethod { cmd: DetCmd::Run { file, b, tau, d_max } } => {
            let f = read_form(file, 3)?;
            let gamma = BigRational::from_integer(BigInt::from(f.degree())) - parse_rational(tau)?;
            let mut q = CountQuery::new(f, *b, gamma)?;
            q.allow_unverified = cli.allow_unverified;
            let cfg = PipelineConfig { d_max: *d_max, ..PipelineConfig::default() };
            let r = run_pipeline(&q, &cfg)?;
            emit(cli, &r.to_json())?;
            r.check_complete()
        }
        Cmd::Thue { cmd: ThueCmd::Count { file, b, p, eta, s0, t0 } } => {
            let f = read_form(file, 2)?;
            let lat = match eta {
                Some(e) => Sublattice2::new(*e, s0.unwrap_or(1), t0.unwrap_or(0))?,
                None => Sublattice2::full(),
            };
            let n = count_thue_lattice(&f, Some(&lat), *b, *p)?;
            let v = json!({
                "form": f.to_string(),
                "B": b,
                "P": p,
                "eta": lat.eta,
                "s0": lat.s0,
                "t0": lat.t0,
                "det": lat.det(),
                "count": n,
            });
            emit(cli, &pretty(&v))
        }
        Cmd::Lattice { cmd: LatticeCmd::Minima { m, b, r, s } } => {
            let (l, res) = gamma_minima(*m, *b, *r, *s)?;
            let strs = |v: &Vec<BigRational>| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
            let v = json!({
                "M": m,
                "B": b,
                "r": r,
                "s": s,
                "det": l.det().to_string(),
                "minima": strs(&res.minima),
                "vectors": res.vectors.iter().map(strs).collect::<Vec<_>>(),
                "basis": res.basis.as_ref().map(|bs| bs.iter().map(strs).collect::<Vec<_>>()),
            });
            emit(cli, &pretty(&v))
        }
        Cmd::Experiment { cmd: ExperimentCmd::Scaling { file, gamma, b_list, slack } } => {
            let f = read_form(file, 3)?;
            let gamma = parse_rational(gamma)?;
            let fl = flexes(cli, &f)?;
            let plan = b_list
                .iter()
                .map(|&b| {
                    CountQuery::new(f.clone(), b, gamma.clone()).map(|mut q| {
                        q.allow_unverified = cli.allow_unverified;
                        q
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let outputs = ReportOutputs { csv: cli.out.clone(), svg: cli.plot.clone() };
            let r = fit_and_report(&plan, Some(&fl), &outputs, &ExperimentConfig { slack: *slack })?;
            let v = json!({
                "form_id": r.form_id,
                "gamma": r.gamma,
                "tau": r.tau,
                "samples": r.fit.samples,
                "slope": r.fit.slope,
                "intercept": r.fit.intercept,
                "residual": r.fit.residual,
                "bound": r.bound,
                "slack": r.slack,
                "within_bound": r.within_bound,
            });
            // the CSV went to --out, the summary to stdout
            println!("{}", pretty(&v));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
