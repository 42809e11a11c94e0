use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rainbow_core::blowup::{self, BlowupSpec};
use rainbow_core::coloring::{self, EdgeColoring};
use rainbow_core::graph::Graph;
use rainbow_core::graphon::{self, DEFAULT_DENSITY_BUDGET};
use rainbow_core::scalar::{format_fraction, minimal_beating_integer, parse_fraction};
use rainbow_core::stochastic::{self, SearchConfig};
use rainbow_core::witness::{self, CertifyOptions};
use rainbow_core::{ExactGraphon, Rational};
use serde_json::{json, Value};

use crate::output::{frac, Output, UsageError};

#[derive(Parser, Debug)]
#[command(name = "rainbow-lab", version, about = "Rainbow copies, coloring graphons and uncommonness certificates")]
pub struct Cli {
    /// Machine-readable output; fractions are `p/q` strings.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads.
    #[arg(long, global = true, env = "RAINBOW_LAB_THREADS")]
    pub threads: Option<usize>,

    /// Budget on `(r)_e * q^v` for graphon densities.
    #[arg(long, global = true, default_value_t = DEFAULT_DENSITY_BUDGET)]
    pub density_budget: u128,

    /// Largest blowup host size.
    #[arg(long, global = true, default_value_t = blowup::DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,

    /// Largest coloring space enumerated exactly.
    #[arg(long, global = true, default_value_t = coloring::DEFAULT_COLORING_ENUMERATION_CAP)]
    pub enumeration_cap: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count rainbow copies of a pattern in a coloring.
    Count {
        #[arg(long)]
        pattern: String,
        /// Coloring file or `fixture:K5` / `fixture:K8`.
        #[arg(long)]
        coloring: String,
    },
    /// Exact rainbow density of a pattern in a step coloring graphon.
    Density {
        #[arg(long)]
        pattern: String,
        /// Graphon file or `uniform:<r>`.
        #[arg(long)]
        graphon: String,
    },
    /// Rainbow density of the uniform r-coloring.
    Baseline {
        #[arg(long)]
        pattern: String,
        #[arg(short = 'r')]
        r: usize,
    },
    /// Certify r-rainbow uncommonness with a perturbation witness.
    Witness {
        #[arg(long)]
        pattern: String,
        #[arg(short = 'r')]
        r: usize,
        /// Fixed epsilon `p/q` instead of the ladder search.
        #[arg(long)]
        epsilon: Option<String>,
        /// Fixed color split instead of the scan.
        #[arg(long)]
        k: Option<usize>,
        /// Write the witness graphon here.
        #[arg(long)]
        emit_graphon: Option<PathBuf>,
    },
    /// Iterated blowup of a seed coloring.
    Blowup {
        /// Coloring file or `fixture:K5` / `fixture:K8`.
        #[arg(long)]
        seed: String,
        #[arg(short = 'd')]
        depth: usize,
        #[arg(long, requires = "pattern")]
        verify: bool,
        #[arg(long)]
        pattern: Option<String>,
        /// Allow verification at depth 3 or more.
        #[arg(long)]
        deep: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rainbow count a K_m coloring must beat for its blowup to win.
    Threshold {
        #[arg(long)]
        pattern: String,
        #[arg(short = 'r')]
        r: usize,
        #[arg(short = 'm')]
        m: usize,
    },
    /// Expected rainbow copies under the uniform random coloring.
    UniformExpect {
        #[arg(long)]
        pattern: String,
        #[arg(short = 'r')]
        r: usize,
        #[arg(short = 'n')]
        n: usize,
        /// Also average over every coloring exactly.
        #[arg(long)]
        enumerate: bool,
    },
    /// Monte Carlo rainbow density of colorings sampled from a graphon.
    Sample {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        graphon: String,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Local search for a coloring of K_m with many rainbow copies.
    Search {
        #[arg(long)]
        pattern: String,
        #[arg(short = 'm')]
        m: usize,
        #[arg(short = 'r')]
        r: usize,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_SEED)]
        seed: u64,
        /// Proposals per restart.
        #[arg(long, default_value_t = SearchConfig::DEFAULT_MAX_STEPS)]
        budget: u64,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_RESTARTS)]
        restarts: u64,
        /// Write the best coloring here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_pattern(source: &str) -> Result<Graph> {
    Ok(Graph::load(source)?)
}

pub fn load_coloring(source: &str) -> Result<EdgeColoring> {
    if let Some(name) = source.strip_prefix("fixture:") {
        return blowup::fixture(name)
            .ok_or_else(|| UsageError(format!("unknown fixture {name:?}; expected K5 or K8")).into());
    }
    Ok(EdgeColoring::load(source)?)
}

fn load_graphon(source: &str) -> Result<ExactGraphon> {
    if let Some(r) = source.strip_prefix("uniform:") {
        let r: usize = r.parse().map_err(|_| UsageError(format!("bad color count in {source:?}")))?;
        return Ok(ExactGraphon::uniform(r)?);
    }
    Ok(ExactGraphon::load(source)?)
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn graph_json(h: &Graph) -> Value {
    json!({ "n_vertices": h.n_vertices(), "edges": h.edges() })
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Count { pattern, coloring } => {
            let h = load_pattern(&pattern)?;
            let c = load_coloring(&coloring)?;
            let rc = coloring::count_rainbow(&h, &c)?;
            Ok(Output {
                text: format!("{}\n", rc.copies),
                json: json!({
                    "copies": rc.copies,
                    "total": rc.total,
                    "density_per_copy": frac(&rc.density_per_copy),
                    "n": c.n(),
                    "r": c.r(),
                }),
            })
        }
        Command::Density { pattern, graphon: source } => {
            let h = load_pattern(&pattern)?;
            let w = load_graphon(&source)?;
            let d = graphon::rainbow_density(&h, &w, cli.density_budget)?;
            Ok(Output {
                text: format!("{}\n", format_fraction(&d.value)),
                json: json!({
                    "density": frac(&d.value),
                    "injection_count": d.injection_count.to_string(),
                    "r": w.r(),
                    "q": w.q(),
                }),
            })
        }
        Command::Baseline { pattern, r } => {
            let h = load_pattern(&pattern)?;
            let b = graphon::baseline_density(&h, r);
            Ok(Output {
                text: format!("{}\n", format_fraction(&b)),
                json: json!({ "baseline": frac(&b), "r": r, "edges": h.n_edges() }),
            })
        }
        Command::Witness {
            pattern,
            r,
            epsilon,
            k,
            emit_graphon,
        } => {
            let h = load_pattern(&pattern)?;
            let epsilon = epsilon
                .map(|e| parse_fraction(&e).map_err(|err| UsageError(format!("--epsilon: {err}"))))
                .transpose()?;
            let opts = CertifyOptions {
                k,
                epsilon,
                density_budget: Some(cli.density_budget),
                injection_budget: None,
            };
            let cert = witness::certify_uncommon(&h, r, &opts)?;
            if let Some(path) = &emit_graphon {
                let w = witness::build_witness_graphon::<Rational>(r, cert.k, &cert.epsilon)?;
                write_file(path, &w.to_text())?;
            }
            Ok(certificate_output(&cert))
        }
        Command::Blowup {
            seed,
            depth,
            verify,
            pattern,
            deep,
            out,
        } => {
            let seed_coloring = load_coloring(&seed)?;
            let spec = BlowupSpec::new(seed_coloring, depth)?;
            let blown = blowup::blowup_coloring(&spec, cli.vertex_cap)?;
            if let Some(path) = &out {
                write_file(path, &blown.to_text())?;
            }
            let mut text = format!("blowup of K_{} to depth {}: K_{}, {} colors\n", spec.m(), depth, blown.n(), blown.r());
            let mut doc = json!({ "m": spec.m(), "depth": depth, "n": blown.n(), "r": blown.r() });
            if verify {
                if depth >= 3 && !deep {
                    return Err(UsageError("verification at depth >= 3 needs --deep".into()).into());
                }
                let h = load_pattern(pattern.as_deref().expect("clap enforces --pattern"))?;
                let report = blowup::verify_blowup(&h, &spec, cli.vertex_cap)?;
                writeln!(text, "seed rainbow copies: {}", report.seed_count)?;
                writeln!(text, "blowup rainbow copies: {} of {}", report.actual, report.total)?;
                writeln!(text, "lower bound: {}", report.lower_bound)?;
                writeln!(text, "bound holds: {}", report.holds())?;
                doc["seed_count"] = json!(report.seed_count);
                doc["actual"] = json!(report.actual);
                doc["total"] = json!(report.total);
                doc["lower_bound"] = json!(report.lower_bound.to_string());
                doc["holds"] = json!(report.holds());
            }
            Ok(Output { text, json: doc })
        }
        Command::Threshold { pattern, r, m } => {
            let h = load_pattern(&pattern)?;
            let t = coloring::blowup_threshold(&h, r, m)?;
            let beat = minimal_beating_integer(&t);
            Ok(Output {
                text: format!("threshold: {}\nminimal beating count: {}\n", format_fraction(&t), beat),
                json: json!({ "threshold": frac(&t), "minimal_beating_count": beat.to_string() }),
            })
        }
        Command::UniformExpect { pattern, r, n, enumerate } => {
            let h = load_pattern(&pattern)?;
            let expected = coloring::expected_uniform_count(&h, r, n)?;
            let mut text = format!("{}\n", format_fraction(&expected));
            let mut doc = json!({ "expected": frac(&expected) });
            if enumerate {
                let mean = coloring::empirical_uniform_mean(&h, r, n, cli.enumeration_cap)?;
                writeln!(text, "enumerated mean: {}", format_fraction(&mean))?;
                doc["enumerated_mean"] = frac(&mean);
                doc["agree"] = json!(mean == expected);
            }
            Ok(Output { text, json: doc })
        }
        Command::Sample {
            pattern,
            graphon: source,
            n,
            trials,
            seed,
        } => {
            let h = load_pattern(&pattern)?;
            let w = load_graphon(&source)?;
            let rep = stochastic::estimate_density(&h, &w, n, trials, seed, cli.density_budget)?;
            let text = format!(
                "rainbow samples: {} of {}\nempirical mean: {}\nexact target: {}\nstandard error <= {}\nbias allowance: {}\nwithin 3 SE + bias: {}\n",
                rep.rainbow,
                rep.trials,
                format_fraction(&rep.empirical_mean),
                format_fraction(&rep.exact_target),
                format_fraction(&rep.standard_error_bound),
                format_fraction(&rep.bias_allowance),
                rep.within(3),
            );
            Ok(Output {
                text,
                json: json!({
                    "n": rep.n,
                    "trials": rep.trials,
                    "batches": rep.batches,
                    "rainbow": rep.rainbow,
                    "empirical_mean": frac(&rep.empirical_mean),
                    "exact_target": frac(&rep.exact_target),
                    "standard_error_bound": frac(&rep.standard_error_bound),
                    "bias_allowance": frac(&rep.bias_allowance),
                    "within_3_se": rep.within(3),
                }),
            })
        }
        Command::Search {
            pattern,
            m,
            r,
            seed,
            budget,
            restarts,
            out,
        } => {
            let h = load_pattern(&pattern)?;
            let cfg = SearchConfig {
                max_steps: budget,
                restarts,
                seed,
                ..SearchConfig::new(h, m, r)
            };
            let res = stochastic::local_search(&cfg)?;
            if let Some(path) = &out {
                write_file(path, &res.best.to_text())?;
            }
            let summary = json!({
                "count": res.count.copies,
                "threshold": frac(&res.threshold),
                "beat": res.beats_threshold,
            });
            let text = format!("{}{}\n", res.best.to_text(), summary);
            Ok(Output {
                text,
                json: json!({
                    "count": res.count.copies,
                    "threshold": frac(&res.threshold),
                    "beat": res.beats_threshold,
                    "coloring": res.best.to_text(),
                }),
            })
        }
    }
}

fn certificate_output(cert: &rainbow_core::WitnessCertificate) -> Output {
    let mut text = String::new();
    let _ = writeln!(text, "pattern: {}", cert.h);
    let _ = writeln!(text, "r = {}, girth s = {}, split k = {}", cert.r, cert.s, cert.k);
    let _ = writeln!(text, "epsilon = {}", format_fraction(&cert.epsilon));
    let _ = writeln!(text, "baseline density = {}", format_fraction(&cert.baseline));
    let _ = writeln!(text, "witness density  = {}", format_fraction(&cert.density));
    let _ = writeln!(text, "gap = {}", format_fraction(&cert.gap));
    let _ = writeln!(
        text,
        "{} cycle(s) of length {}, each weighted {}",
        cert.cycle_count,
        cert.s,
        format_fraction(&cert.cycle_weight)
    );
    let _ = writeln!(text, "expansion (degree: coefficient):");
    for (d, c) in cert.expansion.coefficients.iter().enumerate().skip(1) {
        let _ = writeln!(text, "  eps^{d}: {}", format_fraction(c));
    }
    let _ = writeln!(text, "terms:");
    for t in &cert.expansion.terms {
        let _ = writeln!(
            text,
            "  {} edges {:?}: {}",
            t.descriptor,
            t.edges,
            format_fraction(&t.coefficient)
        );
    }
    let json = json!({
        "pattern": graph_json(&cert.h),
        "r": cert.r,
        "s": cert.s,
        "k": cert.k,
        "epsilon": frac(&cert.epsilon),
        "baseline": frac(&cert.baseline),
        "density": frac(&cert.density),
        "gap": frac(&cert.gap),
        "cycle_count": cert.cycle_count,
        "cycle_weight": frac(&cert.cycle_weight),
        "expansion": cert.expansion.coefficients.iter().enumerate().skip(1)
            .map(|(d, c)| json!({ "degree": d, "coefficient": frac(c) }))
            .collect::<Vec<_>>(),
        "terms": cert.expansion.terms.iter()
            .map(|t| json!({ "descriptor": t.descriptor, "edges": t.edges, "degree": t.degree, "coefficient": frac(&t.coefficient) }))
            .collect::<Vec<_>>(),
    });
    Output { text, json }
}
