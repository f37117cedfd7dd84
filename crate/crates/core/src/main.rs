use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use embgraph::cache::{self, Cache};
use embgraph::complex_e::EhSlice;
use embgraph::complex_hh::HHSlice;
use embgraph::emb;
use embgraph::genfunc;
use embgraph::symfunc::euler_table_via_pairing;
use embgraph::tables::{EulerTable, Format, TableKind};
use embgraph::verify::{self, Suite};

#[derive(Parser)]
#[command(name = "embgraph", version, about = "Graph-complex computations for spaces of long embeddings")]
struct Cli {
    /// Output format: csv, json or md.
    #[arg(long, global = true, default_value = "csv")]
    output: Format,
    /// Cache directory; falls back to $EMBGRAPH_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Genfunc,
    Pairing,
    ComplexE,
    ComplexHh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ComplexKind {
    E,
    Hh,
}

#[derive(Subcommand)]
enum Command {
    /// Table of Euler characteristics by complexity t and Hodge degree s.
    Euler {
        /// `odd`, `even` or an integer.
        #[arg(long, default_value = "odd", value_parser = parse_dim_m)]
        m: i64,
        #[arg(long, default_value = "odd", value_parser = parse_dim_n)]
        n: i64,
        #[arg(long)]
        max_t: usize,
        /// Defaults to t+1 for homotopy and 2t for homology.
        #[arg(long)]
        max_s: Option<usize>,
        #[arg(long, value_enum, default_value = "genfunc")]
        method: Method,
        /// Connected graphs (homotopy) instead of all graphs (homology).
        #[arg(long)]
        homotopy: bool,
    },
    /// Homology ranks of one (s, t) slice.
    Homology {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "e")]
        complex: ComplexKind,
        /// All graphs instead of connected ones.
        #[arg(long)]
        full: bool,
    },
    /// Run a self-check suite; exit code 0 iff every check passes.
    Verify {
        /// appendix, small-complexity, cross-method or d-squared.
        suite: Suite,
        #[arg(long)]
        max_t: Option<usize>,
    },
    /// Homotopy ranks of the embedding space from the graph complex.
    EmbAdjust {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        /// Highest total degree; defaults to 3n-m-7.
        #[arg(long)]
        max_degree: Option<i64>,
    },
    /// Rational homotopy degrees of the Stiefel manifold Inj(R^m, R^n).
    Stiefel {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
}

fn parse_dim(s: &str, odd: i64, even: i64) -> Result<i64, String> {
    match s {
        "odd" => Ok(odd),
        "even" => Ok(even),
        _ => s.parse::<i64>().map_err(|e| e.to_string()).and_then(|v| if v >= 1 { Ok(v) } else { Err("must be positive".into()) }),
    }
}

fn parse_dim_m(s: &str) -> Result<i64, String> {
    parse_dim(s, 3, 2)
}

fn parse_dim_n(s: &str) -> Result<i64, String> {
    parse_dim(s, 9, 8)
}

fn euler_table(m: i64, n: i64, max_s: usize, max_t: usize, method: Method, homotopy: bool, cache: Option<&Cache>) -> Result<EulerTable, String> {
    let kind = if homotopy { TableKind::Homotopy } else { TableKind::Homology };
    if max_t == 0 {
        let mut t = EulerTable::new(kind, "unit", 0, 0);
        t.set(0, 0, 1);
        return Ok(t);
    }
    let slices: Vec<(usize, usize)> = (1..=max_t)
        .flat_map(|t| (1..=max_s).map(move |s| (s, t)))
        .filter(|&(s, t)| s <= if homotopy { t + 1 } else { 2 * t })
        .collect();
    let name = match method {
        Method::Genfunc => "genfunc",
        Method::Pairing => "pairing",
        Method::ComplexE => "complex-e",
        Method::ComplexHh => "complex-hh",
    };
    let mut table = EulerTable::new(kind, name, max_s, max_t);
    match method {
        Method::Genfunc => {
            let (pi, h) = genfunc::tables(m, n, max_s, max_t).map_err(|e| e.to_string())?;
            return Ok(if homotopy { pi } else { h });
        }
        Method::Pairing => {
            if homotopy {
                return Err("the pairing computes homology tables only".into());
            }
            return Ok(euler_table_via_pairing(m, n, max_s, max_t));
        }
        Method::ComplexE => {
            let pi_keys: Vec<(usize, usize)> = (1..=max_t).flat_map(|t| (1..=max_s.min(t + 1)).map(move |s| (s, t))).collect();
            let pis: BTreeMap<_, _> = pi_keys.par_iter().map(|&(s, t)| ((s, t), cache::epi_slice(cache, m, n, s, t).0)).collect();
            let values: Vec<_> = slices
                .par_iter()
                .map(|&(s, t)| (s, t, if homotopy { pis[&(s, t)].euler() } else { EhSlice::from_pi(m, n, s, t, &pis).euler() }))
                .collect();
            for (s, t, v) in values {
                table.set(s, t, v);
            }
        }
        Method::ComplexHh => {
            let values: Vec<_> = slices.par_iter().map(|&(s, t)| (s, t, cache::hh_slice(cache, m, n, s, t, homotopy).0.euler())).collect();
            for (s, t, v) in values {
                table.set(s, t, v);
            }
        }
    }
    Ok(table)
}

#[derive(Serialize)]
struct RankRow {
    degree: i64,
    dim: usize,
    /// Rank of the differential leaving this degree.
    rank: usize,
    homology: usize,
}

#[derive(Serialize)]
struct RankReport {
    m: i64,
    n: i64,
    s: usize,
    t: usize,
    complex: &'static str,
    connected: bool,
    #[serde(skip)]
    cache_hit: bool,
    /// m = 1 results rest on the parity dependence only.
    extrapolated: bool,
    rows: Vec<RankRow>,
}

fn rank_report(m: i64, n: i64, s: usize, t: usize, kind: ComplexKind, full: bool, cache: Option<&Cache>) -> RankReport {
    let (rows, hit): (Vec<RankRow>, bool) = match (kind, full) {
        (ComplexKind::E, false) => {
            let (sl, hit) = cache::epi_slice(cache, m, n, s, t);
            let ranks = sl.differential_ranks();
            let h = sl.homology();
            let rows = sl
                .bases
                .iter()
                .map(|(&d, b)| RankRow { degree: d, dim: b.len(), rank: ranks.get(&d).copied().unwrap_or(0), homology: h.get(&d).copied().unwrap_or(0) })
                .collect();
            (rows, hit)
        }
        (ComplexKind::E, true) => {
            let sl = EhSlice::build(m, n, s, t);
            let h = sl.homology();
            let rows = sl
                .bases
                .iter()
                .map(|(&d, b)| RankRow {
                    degree: d,
                    dim: b.len(),
                    rank: sl.differentials.get(&d).map_or(0, embgraph::exactq::rank),
                    homology: h.get(&d).copied().unwrap_or(0),
                })
                .collect();
            (rows, false)
        }
        (ComplexKind::Hh, _) => {
            let (sl, hit): (HHSlice, bool) = cache::hh_slice(cache, m, n, s, t, !full);
            let h = sl.homology();
            let rows = sl
                .dims()
                .into_iter()
                .map(|(d, dim)| RankRow { degree: d, dim, rank: sl.induced_rank(d), homology: h.get(&d).copied().unwrap_or(0) })
                .collect();
            (rows, hit)
        }
    };
    RankReport {
        m,
        n,
        s,
        t,
        complex: if kind == ComplexKind::E { "e" } else { "hh" },
        connected: !full,
        cache_hit: hit,
        extrapolated: m == 1,
        rows,
    }
}

fn render_ranks(r: &RankReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("serializable") + "\n",
        Format::Csv => {
            let mut out = String::from("degree,dim,rank,homology\n");
            for row in &r.rows {
                let _ = writeln!(out, "{},{},{},{}", row.degree, row.dim, row.rank, row.homology);
            }
            out
        }
        Format::Markdown => {
            let mut out = String::from("| degree | dim | rank | homology |\n|---|---|---|---|\n");
            for row in &r.rows {
                let _ = writeln!(out, "| {} | {} | {} | {} |", row.degree, row.dim, row.rank, row.homology);
            }
            out
        }
    }
}

/// Degree -> rank pairs in the chosen format.
fn render_degrees(title: &str, ranks: &BTreeMap<i64, usize>, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({ title: ranks })).expect("serializable") + "\n",
        Format::Csv => {
            let mut out = String::from("degree,rank\n");
            for (d, r) in ranks {
                let _ = writeln!(out, "{d},{r}");
            }
            out
        }
        Format::Markdown => {
            let mut out = format!("| degree | {title} |\n|---|---|\n");
            for (d, r) in ranks {
                let _ = writeln!(out, "| {d} | {r} |");
            }
            out
        }
    }
}

/// Ranks of the embedding space modulo immersions up to `bound`, from all
/// slices that can reach that degree.
fn bar_ranks(m: i64, n: i64, bound: i64, cache: Option<&Cache>) -> BTreeMap<i64, usize> {
    // The lowest degree in slice (s, t) is at least (n-3)t - (m-1)s with s <= t+1.
    let max_t = (1..).take_while(|&t: &usize| (n - 3) * t as i64 - (m - 1) * (t as i64 + 1) <= bound).last().unwrap_or(0);
    let keys: Vec<(usize, usize)> = (1..=max_t)
        .flat_map(|t| (1..=t + 1).map(move |s| (s, t)))
        .filter(|&(s, t)| (n - 3) * t as i64 - (m - 1) * s as i64 <= bound)
        .collect();
    let mut out = BTreeMap::new();
    for h in keys.par_iter().map(|&(s, t)| cache::epi_slice(cache, m, n, s, t).0.homology()).collect::<Vec<_>>() {
        for (d, r) in h {
            if d <= bound {
                *out.entry(d).or_insert(0) += r;
            }
        }
    }
    out
}

fn run(cli: Cli) -> Result<bool, String> {
    let cache = Cache::resolve(cli.cache_dir.as_deref());
    let cache = cache.as_ref();
    match cli.command {
        Command::Euler { m, n, max_t, max_s, method, homotopy } => {
            let max_s = max_s.unwrap_or(if homotopy { max_t + 1 } else { 2 * max_t });
            print!("{}", euler_table(m, n, max_s, max_t, method, homotopy, cache)?.render(cli.output));
        }
        Command::Homology { m, n, s, t, complex, full } => {
            if s == 0 || t == 0 {
                return Err("s and t must be positive".into());
            }
            let report = rank_report(m, n, s, t, complex, full, cache);
            // Kept off stdout so warm and cold runs print the same bytes.
            if cache.is_some() {
                eprintln!("cache: {}", if report.cache_hit { "hit" } else { "miss" });
            }
            print!("{}", render_ranks(&report, cli.output));
        }
        Command::Verify { suite, max_t } => {
            let report = verify::run(suite, max_t, cache);
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            return Ok(report.pass);
        }
        Command::EmbAdjust { m, n, max_degree } => {
            let bound = max_degree.unwrap_or(3 * n - m - 7);
            let bar = bar_ranks(m, n, bound, cache);
            let mut adjusted = emb::emb_rank_adjust(m, n, &bar).map_err(|e| e.to_string())?;
            adjusted.retain(|&d, _| d <= bound);
            print!("{}", render_degrees("rank", &adjusted, cli.output));
        }
        Command::Stiefel { m, n } => {
            let list = emb::stiefel_homotopy(m, n).map_err(|e| e.to_string())?;
            let mut ranks = BTreeMap::new();
            for d in list.degrees() {
                *ranks.entry(d).or_insert(0) += 1;
            }
            print!("{}", render_degrees("rank", &ranks, cli.output));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
