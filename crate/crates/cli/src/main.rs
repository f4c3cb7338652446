use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use entropy_core::adjoint::{adjoint_entropy_at, dichotomy_probe};
use entropy_core::exact_poly::{IntPolynomial, RatPolynomial};
use entropy_core::growth::{
    bass_guivarch, growth_exponent, growth_rate, growth_table, GeneratorChoice, GroupFamily,
};
use entropy_core::linalg::{char_poly, Lattice, RatMatrix};
use entropy_core::linear_entropy::{
    algebraic_entropy_tol, classify_growth, eigenvalue_lower_bound, pinsker_subspace,
    topological_entropy_tol, DomainTag, LinearFlow,
};
use entropy_core::mahler::{mahler_measure_rat, mahler_report};
use entropy_core::numeric::{format_rational, parse_rational};
use entropy_core::root_solver::DEFAULT_TOL;
use entropy_core::set_entropy::{MapSpec, Point, SymbolicSelfMap};
use entropy_core::shift_entropy::{
    adjoint_entropy_of_shift, shift_algebraic_entropy, shift_bruteforce_oracle,
    shift_cotrajectory_exponents, shift_topological_entropy, GeneralizedShiftSpec, ShiftVariant,
};
use entropy_core::spectrum::{espectrum_sample, lehmer_search, SearchSpec};
use entropy_core::Error;

const TOL_ENV: &str = "ENTROPY_TOL";

#[derive(Parser)]
#[command(
    name = "entropy",
    version,
    about = "Exact and certified entropy computations"
)]
struct Cli {
    /// Root-enclosure tolerance (default from ENTROPY_TOL, else 1e-12).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Element or enumeration budget for brute-force oracles.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mahler measure of an integer or rational polynomial.
    Mahler {
        /// JSON file or inline ascending coefficients, e.g. "1,1,0,-1".
        #[arg(long)]
        poly: String,
    },
    /// Algebraic entropy of a linear map.
    Yuzvinski {
        /// JSON file or inline rows, e.g. "0,1;1,1".
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "qn")]
        domain: String,
    },
    /// Topological entropy on ℝⁿ or on the dual torus.
    Topological {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "tn")]
        domain: String,
    },
    /// Algebraic entropy of multiplication by ξ on ℚ_p.
    Padic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        xi: String,
    },
    /// Covariant and contravariant entropy of a self-map.
    SetEntropy {
        #[arg(long)]
        map: String,
        /// Report the entropies of the k-th power as well.
        #[arg(long)]
        power: Option<usize>,
    },
    /// Trajectory or cotrajectory profile of a finite set of points.
    Cotrajectory {
        #[arg(long)]
        map: String,
        /// JSON list of point names or comma-separated names.
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Direction::Backward)]
        direction: Direction,
    },
    /// Entropies of the generalized shift over a group of the given order.
    Shift {
        #[arg(long)]
        map: String,
        #[arg(long)]
        order: u64,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Points F for the brute-force oracle (JSON list or names).
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
    },
    /// Cotrajectory indices of a lattice under an integer matrix.
    Adjoint {
        #[arg(long)]
        matrix: String,
        /// JSON file or inline generator columns, e.g. "1,0;0,2".
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
    },
    /// Adjoint entropy over every lattice of bounded index.
    AdjointProbe {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        max_index: u64,
    },
    /// Ball sizes in a finitely generated group.
    Growth {
        /// free:k, abelian:d, heisenberg, or products joined by x.
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "standard")]
        gens: String,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Torsion-free ranks of the lower central quotients.
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<u64>>,
    },
    /// Smallest positive Mahler measures among bounded polynomials.
    Lehmer {
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        height: i64,
        #[arg(long, default_value_t = 5)]
        top: usize,
        #[arg(long)]
        non_monic: bool,
        #[arg(long)]
        skip_cyclotomic: bool,
    },
    /// Entropy values of all integer matrices in a box.
    Espectrum {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        bound: i64,
    },
    /// Brute-force sumset trajectory of a finite set under an integer matrix.
    #[command(alias = "trajectory")]
    Oracle {
        #[arg(long)]
        matrix: String,
        /// JSON list of integer vectors or inline "1,0;0,1".
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Backward,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Sum,
    Prod,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_certification_failure() => 3,
            Failure::Core(Error::Incomparable) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(s) => write!(f, "{s}"),
        }
    }
}

type Outcome = std::result::Result<(Value, Value), Failure>;

#[derive(Serialize)]
struct Report {
    subcommand: &'static str,
    inputs: Value,
    result: Value,
    timing_ms: f64,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Reads `arg` as a file when such a path exists, else returns it verbatim.
fn file_or_inline(arg: &str) -> std::result::Result<(String, bool), Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path)
            .map(|s| (s, true))
            .map_err(|e| Failure::Input(format!("cannot read {arg}: {e}")))
    } else if arg.ends_with(".json")
        || path
            .parent()
            .is_some_and(|d| d.is_dir() && d != Path::new(""))
    {
        Err(Failure::Input(format!("cannot read {arg}: no such file")))
    } else {
        Ok((arg.to_string(), false))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(
    text: &str,
    what: &str,
) -> std::result::Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("invalid {what} JSON: {e}")))
}

fn inline_rows(text: &str) -> std::result::Result<Vec<Vec<String>>, Failure> {
    let rows: Vec<Vec<String>> = text
        .split(';')
        .map(|r| r.split(',').map(|x| x.trim().to_string()).collect())
        .collect();
    if rows.iter().flatten().any(String::is_empty) {
        return Err(Failure::Input(format!("malformed inline data {text:?}")));
    }
    Ok(rows)
}

fn read_poly(arg: &str) -> std::result::Result<RatPolynomial, Failure> {
    let (text, from_file) = file_or_inline(arg)?;
    if from_file || text.trim_start().starts_with('{') {
        return parse_json(&text, "polynomial");
    }
    let coeffs = inline_rows(&text)?
        .concat()
        .iter()
        .map(|s| parse_rational(s))
        .collect::<entropy_core::Result<Vec<_>>>()?;
    Ok(RatPolynomial::new(coeffs))
}

fn read_matrix(arg: &str) -> std::result::Result<RatMatrix, Failure> {
    let (text, from_file) = file_or_inline(arg)?;
    if from_file || text.trim_start().starts_with('{') {
        return parse_json(&text, "matrix");
    }
    let rows = inline_rows(&text)?
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect::<entropy_core::Result<Vec<_>>>()?;
    Ok(RatMatrix::new(rows)?)
}

fn read_int_vectors(arg: &str) -> std::result::Result<Vec<Vec<i64>>, Failure> {
    let (text, from_file) = file_or_inline(arg)?;
    if from_file || text.trim_start().starts_with('[') {
        return parse_json(&text, "vector list");
    }
    inline_rows(&text)?
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| {
                    s.parse::<i64>()
                        .map_err(|_| Failure::Input(format!("not an integer: {s:?}")))
                })
                .collect()
        })
        .collect()
}

fn read_lattice(arg: &str) -> std::result::Result<Lattice, Failure> {
    let (text, from_file) = file_or_inline(arg)?;
    if from_file || text.trim_start().starts_with('{') {
        return parse_json(&text, "lattice");
    }
    let cols = read_int_vectors(&text)?;
    Ok(Lattice::from_i64_columns(&cols)?)
}

fn read_map(arg: &str) -> std::result::Result<SymbolicSelfMap, Failure> {
    let (text, _) = file_or_inline(arg)?;
    let spec: MapSpec = parse_json(&text, "map")?;
    Ok(SymbolicSelfMap::from_spec(&spec)?)
}

fn read_points(map: &SymbolicSelfMap, arg: &str) -> std::result::Result<Vec<Point>, Failure> {
    let (text, from_file) = file_or_inline(arg)?;
    let names: Vec<String> = if from_file || text.trim_start().starts_with('[') {
        parse_json(&text, "point list")?
    } else {
        split_point_names(&text)
    };
    if names.is_empty() {
        return Err(Failure::Input("point list is empty".into()));
    }
    Ok(names
        .iter()
        .map(|n| map.parse_point(n))
        .collect::<entropy_core::Result<Vec<_>>>()?)
}

/// Splits on commas outside brackets, so `T0[2,1]` stays one name.
fn split_point_names(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn resolve_tol(flag: Option<f64>) -> std::result::Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Input(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Failure::Input(format!(
            "tolerance {tol} must lie in (0, 1e-3]"
        )));
    }
    Ok(tol)
}

fn point_names(map: &SymbolicSelfMap, pts: &[Point]) -> Vec<String> {
    pts.iter().map(|p| map.point_name(p)).collect()
}

fn run(cli: &Cli, tol: f64) -> Outcome {
    match &cli.command {
        Command::Mahler { poly } => {
            let f = read_poly(poly)?;
            let inputs = json!({ "poly": to_value(&f), "tol": tol });
            let int = entropy_core::exact_poly::to_int_polynomial(&f).ok();
            let result = match int {
                Some(g) => {
                    let r = mahler_report(&g, tol)?;
                    json!({
                        "value": to_value(&r.value),
                        "approx": r.value.value(),
                        "primitive": to_value(&r.primitive),
                        "classification": r.classification.as_ref().map(to_value),
                    })
                }
                None => {
                    let v = mahler_measure_rat(&f, tol)?;
                    json!({ "value": to_value(&v), "approx": v.value() })
                }
            };
            Ok((inputs, result))
        }
        Command::Yuzvinski { matrix, domain } => {
            let a = read_matrix(matrix)?;
            let domain: DomainTag = domain.parse()?;
            let flow = LinearFlow::new(domain, a.clone())?;
            let h = algebraic_entropy_tol(&flow, tol)?;
            let mut result = json!({
                "value": to_value(&h),
                "approx": h.value(),
                "char_poly": to_value(&char_poly(&a)),
            });
            if matches!(domain, DomainTag::Zn | DomainTag::Qn) {
                result["eigenvalue_lower_bound"] = to_value(&eigenvalue_lower_bound(&flow)?);
                result["pinsker_dimension"] = json!(pinsker_subspace(&a)?.len());
            }
            Ok((
                json!({ "matrix": to_value(&a), "domain": domain, "tol": tol }),
                result,
            ))
        }
        Command::Topological { matrix, domain } => {
            let a = read_matrix(matrix)?;
            let domain: DomainTag = domain.parse()?;
            let h = topological_entropy_tol(&LinearFlow::new(domain, a.clone())?, tol)?;
            Ok((
                json!({ "matrix": to_value(&a), "domain": domain, "tol": tol }),
                json!({ "value": to_value(&h), "approx": h.value() }),
            ))
        }
        Command::Padic { p, xi } => {
            let x = parse_rational(xi)?;
            let h = algebraic_entropy_tol(&LinearFlow::qp_scalar(*p, x.clone())?, tol)?;
            Ok((
                json!({ "p": p, "xi": format_rational(&x) }),
                json!({ "value": to_value(&h), "approx": h.value() }),
            ))
        }
        Command::SetEntropy { map, power } => {
            let m = read_map(map)?;
            let part = m.qper_wan_partition();
            let core = m.surjective_core();
            let mut result = json!({
                "h": to_value(&m.covariant_entropy()),
                "h_star": to_value(&m.contravariant_entropy()),
                "qper_components": part.qper.len(),
                "wan_components": part.wan.len(),
                "surjective_core": {
                    "core_nodes": core.map.core_len(),
                    "out_rays": core.map.out_rays().len(),
                    "in_strings": core.map.in_strings().len(),
                    "in_trees": core.map.in_trees().len(),
                    "empty": core.empty,
                },
            });
            if let Some(k) = power {
                let pk = m.power_map(*k)?;
                result["power"] = json!({
                    "k": k,
                    "h": to_value(&pk.covariant_entropy()),
                    "h_star": to_value(&pk.contravariant_entropy()),
                });
            }
            Ok((json!({ "map": to_value(&m.to_spec()) }), result))
        }
        Command::Cotrajectory {
            map,
            points,
            horizon,
            direction,
        } => {
            let m = read_map(map)?;
            let pts = read_points(&m, points)?;
            let inputs = json!({ "map": to_value(&m.to_spec()), "points": point_names(&m, &pts), "horizon": horizon });
            let result = match direction {
                Direction::Forward => {
                    let p = m.covariant_trajectory_profile(&pts, *horizon)?;
                    json!({ "direction": "forward", "sizes": p.sizes, "value": p.value, "stabilized_at": p.stabilized_at })
                }
                Direction::Backward => {
                    let p = m.cotrajectory_profile(&pts, *horizon, cli.budget)?;
                    json!({ "direction": "backward", "sizes": p.sizes, "value": to_value(&p.value) })
                }
                Direction::Full => {
                    let sizes = m.full_cotrajectory_sizes(&pts, *horizon, cli.budget)?;
                    json!({ "direction": "full", "sizes": sizes })
                }
            };
            Ok((inputs, result))
        }
        Command::Shift {
            map,
            order,
            variant,
            oracle,
            horizon,
        } => {
            let m = read_map(map)?;
            let variant = match variant {
                VariantArg::Sum => ShiftVariant::DirectSum,
                VariantArg::Prod => ShiftVariant::Product,
            };
            let spec = GeneralizedShiftSpec::new(m.clone(), *order, variant)?;
            let value = match variant {
                ShiftVariant::DirectSum => shift_algebraic_entropy(&spec)?,
                ShiftVariant::Product => shift_topological_entropy(&spec)?,
            };
            let mut inputs =
                json!({ "map": to_value(&m.to_spec()), "order": order, "variant": variant });
            let mut result = json!({ "value": to_value(&value), "approx": value.value() });
            if let Some(points) = oracle {
                let pts = read_points(&m, points)?;
                inputs["oracle_points"] = json!(point_names(&m, &pts));
                inputs["horizon"] = json!(horizon);
                let report = shift_bruteforce_oracle(&spec, &pts, *horizon, cli.budget)?;
                let adjoint = adjoint_entropy_of_shift(&spec, &pts)?;
                result["oracle"] = json!({
                    "dims": report.dims,
                    "sizes": report.sizes().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "slope": report.slope(),
                });
                result["adjoint"] = json!({
                    "value": to_value(&adjoint),
                    "index_exponents": shift_cotrajectory_exponents(&spec, &pts, *horizon)?,
                });
            }
            Ok((inputs, result))
        }
        Command::Adjoint {
            matrix,
            lattice,
            horizon,
        } => {
            let a = read_matrix(matrix)?;
            let n = read_lattice(lattice)?;
            let r = adjoint_entropy_at(&a, &n, *horizon)?;
            let mut result = to_value(&r);
            result["alphas_divide"] = json!(r.alphas_divide());
            Ok((
                json!({ "matrix": to_value(&a), "lattice": to_value(&n), "horizon": horizon }),
                result,
            ))
        }
        Command::AdjointProbe { matrix, max_index } => {
            let a = read_matrix(matrix)?;
            let r = dichotomy_probe(&a, *max_index, cli.budget)?;
            Ok((
                json!({ "matrix": to_value(&a), "max_index": max_index }),
                to_value(&r),
            ))
        }
        Command::Growth {
            family,
            gens,
            horizon,
            ranks,
        } => {
            let fam: GroupFamily = family.parse()?;
            let choice: GeneratorChoice = gens.parse()?;
            let table = growth_table(&fam, choice, *horizon, cli.budget)?;
            let mut result =
                json!({ "gamma": table.gamma, "submultiplicative": table.is_submultiplicative() });
            if *horizon >= 4 {
                result["rate"] = to_value(&growth_rate(&table)?);
            }
            if *horizon >= 8 {
                result["exponent"] = to_value(&growth_exponent(&table)?);
            }
            if let Some(r) = ranks {
                result["bass_guivarch"] = json!(bass_guivarch(r)?);
            }
            Ok((
                json!({ "family": fam.to_string(), "gens": choice, "horizon": horizon }),
                result,
            ))
        }
        Command::Lehmer {
            max_degree,
            height,
            top,
            non_monic,
            skip_cyclotomic,
        } => {
            let spec = SearchSpec {
                max_degree: *max_degree,
                max_height: *height,
                monic_only: !non_monic,
                skip_cyclotomic: *skip_cyclotomic,
                top: *top,
                budget: cli.budget.map(|b| b as u64),
            };
            let r = lehmer_search(&spec)?;
            let mut result = to_value(&r);
            let polys: Vec<String> = r
                .leaderboard
                .iter()
                .map(|e| IntPolynomial::from_i64(&e.coeffs).to_string())
                .collect();
            result["polynomials"] = json!(polys);
            Ok((to_value(&spec), result))
        }
        Command::Espectrum { dim, bound } => {
            let s = espectrum_sample(*dim, *bound, cli.budget.map(|b| b as u64))?;
            Ok((json!({ "dim": dim, "bound": bound }), to_value(&s)))
        }
        Command::Oracle {
            matrix,
            set,
            horizon,
        } => {
            let a = read_matrix(matrix)?;
            let f = read_int_vectors(set)?;
            let c = classify_growth(&a, &f, *horizon, cli.budget)?;
            if c.profile.is_none() {
                return Err(Failure::Core(Error::BudgetExceeded {
                    cap: cli.budget.unwrap_or(5_000_000),
                }));
            }
            let mut result = to_value(&c);
            if let Some(p) = &c.profile {
                result["subadditive"] = json!(p.is_subadditive());
                result["last_increment"] = json!(p.last_increment());
            }
            Ok((
                json!({ "matrix": to_value(&a), "set": f, "horizon": horizon }),
                result,
            ))
        }
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Mahler { .. } => "mahler",
        Command::Yuzvinski { .. } => "yuzvinski",
        Command::Topological { .. } => "topological",
        Command::Padic { .. } => "padic",
        Command::SetEntropy { .. } => "set-entropy",
        Command::Cotrajectory { .. } => "cotrajectory",
        Command::Shift { .. } => "shift",
        Command::Adjoint { .. } => "adjoint",
        Command::AdjointProbe { .. } => "adjoint-probe",
        Command::Growth { .. } => "growth",
        Command::Lehmer { .. } => "lehmer",
        Command::Espectrum { .. } => "espectrum",
        Command::Oracle { .. } => "oracle",
    }
}

/// `path = value` lines for every leaf of a JSON value.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn print_table(report: &Report) {
    println!("{}", report.subcommand);
    let mut rows = Vec::new();
    flatten("", &report.result, &mut rows);
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in rows {
        println!("  {k:<width$}  {v}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = resolve_tol(cli.tol).and_then(|tol| run(&cli, tol));
    match outcome {
        Ok((inputs, result)) => {
            let report = Report {
                subcommand: name(&cli.command),
                inputs,
                result,
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("reports serialize")
                );
            } else {
                print_table(&report);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
