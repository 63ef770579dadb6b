use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use holocirc::circulant::{self, Circulant, CirculantError, Shard, HARD_MAX_DEGREE, MAX_DEGREE_ENV};
use holocirc::holomorph::{HolElem2, MAX_HOL_EXPONENT};
use holocirc::regular_classify::{check_representatives, enumerate_regular_subgroups, ClassifyError, FULL_ENUMERATION_MAX, STRUCTURED_MAX};
use holocirc::verify::{self, Bounds, Params, Status, VerifyError, CLAIMS};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BOUND: u8 = 3;

#[derive(Parser)]
#[command(name = "holocirc", version, about = "Regular subgroups of Hol(Z_2^n) and normality of circulant graphs")]
struct Cli {
    /// TOML file with `max_exponent` and `max_degree` bounds.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ignore the configured bounds (hard limits still apply).
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Ndjson,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered claims.
    Claims,
    /// Run a verification routine (`all` runs every claim with its defaults).
    Verify {
        claim: String,
        /// Exponent range, `A..B` or `N`.
        #[arg(long)]
        n: Option<String>,
        /// Comma-separated moduli.
        #[arg(long)]
        modulus: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "ndjson")]
        format: Format,
    },
    /// Representatives of the regular subgroups of Hol(Z_2^n), plus the full
    /// matched enumeration for small n.
    Classify {
        #[arg(long)]
        n: u32,
    },
    /// Scan every inverse-closed connection set of Z_n.
    Scan {
        #[arg(long)]
        modulus: usize,
        /// Contiguous slice `A/B` of the pair-orbit masks.
        #[arg(long, default_value = "0/1")]
        shard: String,
        #[arg(long)]
        connected_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ndjson")]
        format: Format,
    },
    /// Inspect an element of Hol(Z_2^n) such as `a^3*x*y^2`.
    Element {
        #[arg(long)]
        n: u32,
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        power: Option<i64>,
        #[arg(long)]
        conjugate_by: Option<String>,
    },
    /// Automorphism data for one circulant.
    Graph {
        #[arg(long)]
        modulus: usize,
        /// Connection set, e.g. "1,3,13,15".
        #[arg(long, default_value = "")]
        set: String,
        /// Print the edge list instead.
        #[arg(long)]
        edges: bool,
    },
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Config {
    max_exponent: Option<u32>,
    max_degree: Option<usize>,
}

fn bounds(cli: &Cli) -> Result<Bounds> {
    let config: Config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Config::default(),
    };
    let mut b = Bounds::default();
    if let Some(e) = config.max_exponent {
        b.max_exponent = e;
    }
    if let Some(d) = config.max_degree {
        b.max_degree = d.min(HARD_MAX_DEGREE);
    }
    if cli.force {
        b.max_exponent = MAX_HOL_EXPONENT;
        b.max_degree = HARD_MAX_DEGREE;
    }
    Ok(b)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(v) = e.downcast_ref::<VerifyError>() {
        return if v.is_bound() { EXIT_BOUND } else { EXIT_USAGE };
    }
    if let Some(CirculantError::TooLarge { .. }) = e.downcast_ref::<CirculantError>() {
        return EXIT_BOUND;
    }
    if e.downcast_ref::<io::Error>().is_some() {
        return EXIT_FAIL;
    }
    EXIT_USAGE
}

fn run(cli: &Cli) -> Result<u8> {
    let b = bounds(cli)?;
    // the graph routines read their bound from the environment
    std::env::set_var(MAX_DEGREE_ENV, b.max_degree.to_string());
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Claims => {
            for c in CLAIMS {
                writeln!(out, "{:<28} {}", c.id, c.summary)?;
            }
            Ok(0)
        }
        Command::Verify {
            claim,
            n,
            modulus,
            samples,
            seed,
            format,
        } => {
            let params = Params {
                n: n.as_deref().map(Params::parse_range).transpose()?,
                moduli: modulus.as_deref().map(Params::parse_moduli).transpose()?,
                samples: *samples,
                seed: *seed,
            };
            let ids: Vec<&str> = if claim == "all" {
                CLAIMS.iter().map(|c| c.id).collect()
            } else {
                vec![claim.as_str()]
            };
            let mut code = 0;
            for id in ids {
                let report = verify::run_bounded(id, &params, &b)?;
                if report.status == Status::Fail {
                    code = EXIT_FAIL;
                }
                match format {
                    Format::Text => writeln!(
                        out,
                        "{:<28} {:<7} {:>8.2}s  {}",
                        report.claim_id,
                        format!("{:?}", report.status).to_lowercase(),
                        report.runtime,
                        report.replay
                    )?,
                    Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
                    Format::Ndjson => writeln!(out, "{}", serde_json::to_string(&report)?)?,
                }
            }
            Ok(code)
        }
        Command::Classify { n } => {
            if !(3..=STRUCTURED_MAX).contains(n) {
                bail!(ClassifyError::ExponentOutOfRange {
                    n: *n,
                    min: 3,
                    max: STRUCTURED_MAX
                });
            }
            if *n > b.max_exponent {
                bail!(VerifyError::Bound {
                    what: "exponent",
                    value: *n as u64,
                    bound: b.max_exponent as u64
                });
            }
            let representatives = check_representatives(*n)?;
            let enumeration = if *n <= FULL_ENUMERATION_MAX { Some(enumerate_regular_subgroups(*n)?) } else { None };
            let doc = json!({"n": n, "representatives": representatives, "enumeration": enumeration});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(0)
        }
        Command::Scan {
            modulus,
            shard,
            connected_only,
            out: path,
            format,
        } => {
            let shard = Shard::parse(shard)?;
            let start = Instant::now();
            let records = circulant::scan(*modulus, shard, *connected_only)?;
            let mut sink: Box<dyn Write> = match path {
                Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            match format {
                Format::Ndjson => {
                    for r in &records {
                        writeln!(sink, "{}", serde_json::to_string(r)?)?;
                    }
                }
                Format::Json => writeln!(sink, "{}", serde_json::to_string_pretty(&records)?)?,
                Format::Text => {
                    for r in &records {
                        let set: Vec<String> = r.connection_set.iter().map(|s| s.to_string()).collect();
                        writeln!(
                            sink,
                            "{{{}}} aut={} normal={} nnn={} w={:?}{}",
                            set.join(","),
                            r.aut_order,
                            r.normal,
                            r.nnn,
                            r.w_subgroups,
                            if r.degenerate { " degenerate" } else { "" }
                        )?;
                    }
                }
            }
            sink.flush()?;
            let summary = circulant::summarise(&records);
            eprintln!("{} runtime={:.3}s", serde_json::to_string(&summary)?, start.elapsed().as_secs_f64());
            Ok(if summary["nnn"] > 0 { EXIT_FAIL } else { 0 })
        }
        Command::Element {
            n,
            expr,
            power,
            conjugate_by,
        } => {
            let h = HolElem2::parse(expr, *n)?;
            let (nf, rho) = h.conj_normal_form();
            let mut doc = json!({
                "n": n,
                "element": h,
                "order": h.order(),
                "semiregular": holocirc::regular_classify::is_semiregular_closed_form(&h),
                "normal_form": nf,
                "rho": rho,
                "affine": h.to_affine().to_string(),
            });
            if let Some(r) = power {
                doc["power"] = json!({"r": r, "value": h.power(*r)});
            }
            if let Some(w) = conjugate_by {
                let w = HolElem2::parse(w, *n)?;
                doc["conjugate"] = json!({"by": w, "value": h.conjugate_by(&w)?});
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(0)
        }
        Command::Graph { modulus, set, edges } => {
            let g = Circulant::new(*modulus, Circulant::parse_set(set)?)?;
            if *edges {
                write!(out, "{}", g.edge_list())?;
                return Ok(0);
            }
            let record = circulant::scan_record(&g)?;
            let verdict = g.nnn_verdict()?;
            let doc = json!({
                "record": record,
                "aut_g_s": g.aut_g_s(),
                "regular_cyclic_subgroups": verdict.regular_cyclic_subgroups,
                "distinct_copy": verdict.distinct_copy,
                "nonconjugate_copy": verdict.nonconjugate_copy,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(0)
        }
    }
}
