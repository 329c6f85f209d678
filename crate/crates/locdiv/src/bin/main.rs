//! Command-line front end.
//!
//! Exit codes: 0 success, 2 inconsistency detected, 3 inconclusive,
//! 4 input error.

use clap::{Parser, Subcommand};
use serde_json::json;

use locdiv::cohomology::{h1, h1_loc, matrix_group, p_sylow_cyclic, GModule, ModMatrix};
use locdiv::divisibility::{
    global_divide, local_divide_test, GlobalOutcome, LocalMethod,
};
use locdiv::elliptic::{parse_curve, parse_point};
use locdiv::frobenius::{
    chebotarev_filter, enumerate_set, estimate_density, frobenius_coordinate, ChebotarevPredicate,
    PersistentSetSpec,
};
use locdiv::padic::{Membership, SetSpec};
use locdiv::pipeline::{run_check, soundness_sweep, DivisibilityReport};

const EXIT_OK: i32 = 0;
const EXIT_INCONSISTENT: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;
const EXIT_INPUT: i32 = 4;

#[derive(Parser)]
#[command(
    name = "locdiv",
    about = "Local-global divisibility of rational points on elliptic curves, \
             tested along explicit small-density persistent prime sets."
)]
struct Cli {
    /// Bound for prime enumeration.
    #[arg(long, global = true, default_value_t = 10_000)]
    limit: u64,

    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the members of a persistent prime set up to the limit.
    BuildSet {
        /// Set record, e.g. "p=5 rule=const:1 depth=8".
        #[arg(long)]
        set: String,
    },
    /// Empirical density of the set among primes up to the limit.
    Density {
        #[arg(long)]
        set: String,
        /// Congruence filter on primes, e.g. "1mod7" or "1,2mod7".
        #[arg(long)]
        filter: Option<String>,
    },
    /// Frobenius coordinate of a prime along the set's tower.
    Frobenius {
        #[arg(long)]
        set: String,
        #[arg(long)]
        q: u64,
    },
    /// Local p^n-divisibility of a point in E(F_l).
    LocalTest {
        /// Curve, e.g. "a=0 b=1".
        #[arg(long)]
        curve: String,
        /// Point, e.g. "x=2 y=3" or "inf".
        #[arg(long)]
        point: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        ell: u64,
        /// "structural" or "brute_force".
        #[arg(long, default_value = "structural")]
        method: String,
    },
    /// Exact global p^n-divisibility over the rationals.
    GlobalTest {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Full local-global check along a persistent set, with report.
    Check {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
        /// Number of local tests to run (default 50).
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Group cohomology of matrix groups.
    Cohomology {
        #[command(subcommand)]
        op: CohomologyOp,
    },
    /// Randomized soundness sweep over constructed divisible points.
    Sweep {
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Local tests per instance.
        #[arg(long, default_value_t = 5)]
        locals: usize,
    },
}

#[derive(Subcommand)]
enum CohomologyOp {
    /// H¹ and H¹_loc of the group generated by the given matrices acting
    /// naturally on (Z/p^n)^r.
    H1loc {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        /// Semicolon-separated matrices, e.g. "[[1,1],[0,1]];[[2,0],[0,1]]".
        #[arg(long)]
        generators: String,
    },
}

fn parse_set(s: &str) -> locdiv::Result<PersistentSetSpec> {
    Ok(PersistentSetSpec::new(SetSpec::parse_record(s)?))
}

fn parse_filter(s: &str) -> locdiv::Result<ChebotarevPredicate> {
    let (res, m) = s
        .split_once("mod")
        .ok_or_else(|| locdiv::Error::parse(format!("filter '{s}' is not '<r1,r2,..>mod<m>'")))?;
    let m: u64 = m
        .trim()
        .parse()
        .map_err(|_| locdiv::Error::parse(format!("bad filter modulus in '{s}'")))?;
    let residues: Vec<u64> = res
        .split(',')
        .map(|r| {
            r.trim()
                .parse()
                .map_err(|_| locdiv::Error::parse(format!("bad residue '{r}' in filter")))
        })
        .collect::<locdiv::Result<_>>()?;
    chebotarev_filter(m, &residues)
}

fn membership_label(m: Membership) -> &'static str {
    match m {
        Membership::In => "in",
        Membership::Out => "out",
        Membership::Unknown => "unknown",
    }
}

fn parse_generators(s: &str, q: u64) -> locdiv::Result<Vec<ModMatrix>> {
    s.split(';')
        .map(|part| {
            let rows: Vec<Vec<u64>> = serde_json::from_str(part.trim())
                .map_err(|e| locdiv::Error::parse(format!("bad matrix '{part}': {e}")))?;
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err(locdiv::Error::parse(format!("matrix '{part}' is not square")));
            }
            ModMatrix::new(dim, q, rows.into_iter().flatten().collect())
        })
        .collect()
}

fn run(cli: &Cli) -> locdiv::Result<i32> {
    match &cli.cmd {
        Cmd::BuildSet { set } => {
            let spec = parse_set(set)?;
            let members = enumerate_set(&spec, cli.limit);
            if cli.json {
                let rows: Vec<_> = members
                    .iter()
                    .map(|m| {
                        json!({
                            "q": m.q,
                            "verdict": membership_label(m.verdict),
                            "coordinate": m.coordinate.as_ref().map(|c| c.to_string()),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({"set": spec.set_spec().to_record(), "limit": cli.limit, "members": rows})
                );
            } else {
                println!("set {}  limit {}", spec.set_spec().to_record(), cli.limit);
                for m in &members {
                    println!(
                        "q={:<8} {:<8} coordinate={}",
                        m.q,
                        membership_label(m.verdict),
                        m.coordinate
                            .as_ref()
                            .map(|c| c.to_string())
                            .unwrap_or_else(|| "-".into())
                    );
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Density { set, filter } => {
            let spec = parse_set(set)?;
            let filter = filter.as_deref().map(parse_filter).transpose()?;
            let d = estimate_density(&spec, cli.limit, filter.as_ref());
            if cli.json {
                println!("{}", d.to_json());
            } else {
                println!(
                    "density {}/{} = {:.6} (unknown {}, limit {})",
                    d.numerator,
                    d.denominator,
                    d.ratio_f64(),
                    d.unknown,
                    d.bound
                );
            }
            Ok(EXIT_OK)
        }
        Cmd::Frobenius { set, q } => {
            let spec = parse_set(set)?;
            let coord = frobenius_coordinate(*q, &spec)?;
            let member = locdiv::frobenius::in_persistent_set(*q, &spec);
            if cli.json {
                println!(
                    "{}",
                    json!({"q": q, "coordinate": coord.to_string(), "verdict": membership_label(member)})
                );
            } else {
                println!(
                    "q={q} coordinate={coord} verdict={}",
                    membership_label(member)
                );
            }
            Ok(EXIT_OK)
        }
        Cmd::LocalTest {
            curve,
            point,
            p,
            n,
            ell,
            method,
        } => {
            let curve = parse_curve(curve)?;
            let point = parse_point(point)?;
            let method = match method.as_str() {
                "structural" => LocalMethod::Structural,
                "brute_force" => LocalMethod::BruteForce,
                other => {
                    return Err(locdiv::Error::parse(format!(
                        "unknown method '{other}' (use structural or brute_force)"
                    )))
                }
            };
            let v = local_divide_test(&curve, &point, *p, *n, *ell, method)?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "divisible": v.divisible,
                        "method": v.method.name(),
                        "witness": v.witness.map(|w| w.to_string()),
                    })
                );
            } else {
                println!(
                    "l={} divisible={} method={}{}",
                    v.ell,
                    v.divisible,
                    v.method.name(),
                    v.witness
                        .map(|w| format!(" witness: {w}"))
                        .unwrap_or_default()
                );
            }
            Ok(EXIT_OK)
        }
        Cmd::GlobalTest { curve, point, p, n } => {
            let curve = parse_curve(curve)?;
            let point = parse_point(point)?;
            let outcome = global_divide(&curve, &point, *p, *n)?;
            let label = DivisibilityReport::global_outcome_label(&outcome);
            let witness = match &outcome {
                GlobalOutcome::Divisible(q) => Some(q.to_string()),
                _ => None,
            };
            if cli.json {
                println!("{}", json!({"outcome": label, "witness": witness}));
            } else {
                println!(
                    "global: {label}{}",
                    witness.map(|w| format!(" witness: {w}")).unwrap_or_default()
                );
            }
            Ok(if matches!(outcome, GlobalOutcome::Inconclusive) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            })
        }
        Cmd::Check {
            curve,
            point,
            p,
            n,
            set,
            sample,
        } => {
            let curve = parse_curve(curve)?;
            let point = parse_point(point)?;
            let spec = parse_set(set)?;
            let report = run_check(&curve, &point, *p, *n, &spec, cli.limit, *sample)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report.to_text());
            }
            Ok(if !report.consistent {
                EXIT_INCONSISTENT
            } else if report.global == "inconclusive" {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            })
        }
        Cmd::Cohomology {
            op: CohomologyOp::H1loc { p, n, generators },
        } => {
            let q = p
                .checked_pow(*n)
                .ok_or_else(|| locdiv::Error::domain("p^n overflows"))?;
            let gens = parse_generators(generators, q)?;
            let (group, mats) = matrix_group(&gens)?;
            let module = GModule::new(&group, *p, *n, mats)?;
            let h = h1(&group, &module);
            let loc = h1_loc(&group, &module, false);
            let cyclic = p_sylow_cyclic(&group, *p);
            let out = json!({
                "order": group.order(),
                "h1": h.divisors,
                "h1loc": loc.divisors,
                "p_sylow_cyclic": cyclic,
            });
            if cli.json {
                println!("{out}");
            } else {
                println!(
                    "group order {}  h1 {:?}  h1loc {:?}  p-Sylow cyclic: {cyclic}",
                    group.order(),
                    h.divisors,
                    loc.divisors
                );
            }
            Ok(EXIT_OK)
        }
        Cmd::Sweep { count, locals } => {
            let summary = soundness_sweep(*count, cli.seed, *locals)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            } else {
                print!("{}", summary.to_text());
            }
            Ok(if summary.failures > 0 {
                EXIT_INCONSISTENT
            } else {
                EXIT_OK
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_INPUT);
        }
    }
}
