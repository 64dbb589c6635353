use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};
use treefn::analytic::{decompose_polynomial_seeded, reduced_check};
use treefn::discrete::enumeration_limit;
use treefn::{
    burnside_classes, constraint_check, decompose, distance, distance_matrix, enumerate_space,
    enumerate_tree_shapes, expand_tenn, gamma, is_member, is_representable, nn_capacity_bound,
    parse_tree, reconstruct_tree, reduced_constraints, space_size, universal_threshold,
    variety_dims, Error, FunctionSpace, Gf2Poly, LayeredNetwork, RatPoly, Tree,
};

#[derive(Parser)]
#[command(name = "treefn", version, about = "Function spaces of rooted trees")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,

    /// Seed for randomized steps.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Gf2,
    Rat,
}

#[derive(Subcommand)]
enum Command {
    /// List the bit-valued functions of a binary tree.
    Enumerate {
        #[arg(long)]
        tree: String,
        /// Print only the size.
        #[arg(long)]
        count_only: bool,
    },
    /// Test a polynomial against the constraints of a tree.
    Check {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Use the reduced identity set (rational mode).
        #[arg(long)]
        reduced: bool,
    },
    /// Write a polynomial as a superposition on a tree.
    Decompose {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Distance between two trees.
    Distance {
        #[arg(long, num_args = 1, required = true)]
        tree: Vec<String>,
    },
    /// Distances between all trees with `n` leaves.
    DistanceMatrix {
        #[arg(long)]
        n: usize,
    },
    /// Recover a tree from a file of hex truth tables.
    Reconstruct {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Expand a layered network and bound its capacity.
    Tenn {
        #[arg(long)]
        network: PathBuf,
    },
    /// Counting formulas.
    Bounds {
        #[arg(long, value_name = "M")]
        burnside: Option<u32>,
        #[arg(long, value_name = "C")]
        gamma: Option<u32>,
        #[arg(long, num_args = 2, value_names = ["P", "C"])]
        threshold: Option<Vec<u32>>,
        #[arg(long, num_args = 2, value_names = ["N", "K"])]
        variety: Option<Vec<u64>>,
    },
}

/// Result of a command: its payload, a text rendering, and whether the
/// answer is affirmative.
struct Report {
    json: Value,
    text: String,
    affirmative: bool,
}

impl Report {
    fn yes(json: Value, text: impl Into<String>) -> Self {
        Report {
            json,
            text: text.into(),
            affirmative: true,
        }
    }
}

enum Failure {
    /// A well-formed question with a negative answer.
    Negative(Error),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn big(b: &BigUint) -> Value {
    json!(b.to_string())
}

/// Tree in the parenthesised text form or the JSON form.
fn tree_arg(text: &str) -> Result<Tree, Failure> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("tree JSON: {e}")))?;
        return Ok(Tree::from_json(&v)?);
    }
    Ok(parse_tree(text)?)
}

fn gf2_arg(text: &str, t: &Tree) -> Result<Gf2Poly, Failure> {
    Ok(Gf2Poly::parse(text, t.var_count())?)
}

fn rat_arg(text: &str, t: &Tree) -> Result<RatPoly, Failure> {
    Ok(RatPoly::parse(text, t.var_count())?)
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(Error::InvalidArgument(format!("{}: {e}", path.display()))))
}

fn enumerate(tree: &str, count_only: bool) -> Result<Report, Failure> {
    let t = tree_arg(tree)?;
    if count_only {
        if !t.is_binary() {
            return Err(Error::NotBinary.into());
        }
        if !t.has_distinct_labels() {
            return Err(Error::RepeatedLabels.into());
        }
        let size = space_size(t.var_count() as u32);
        return Ok(Report::yes(
            json!({"tree": t.to_string(), "size": big(&size)}),
            size.to_string(),
        ));
    }
    let space = enumerate_space(&t)?;
    let lines = space.hex_lines();
    Ok(Report::yes(
        json!({"tree": t.to_string(), "variables": t.vars(), "size": lines.len(), "members": lines}),
        space.export().trim_end().to_string(),
    ))
}

fn check(tree: &str, poly: &str, mode: Mode, reduced: bool) -> Result<Report, Failure> {
    let t = tree_arg(tree)?;
    match mode {
        Mode::Gf2 => {
            let p = gf2_arg(poly, &t)?;
            let constraints = is_member(&t, &p)?;
            let member = constraints && is_representable(&t, &p)?;
            let verdict = if member { "member" } else { "not a member" };
            Ok(Report {
                json: json!({
                    "tree": t.to_string(),
                    "member": member,
                    "constraints_hold": constraints,
                    "result": verdict,
                }),
                text: verdict.to_string(),
                affirmative: member,
            })
        }
        Mode::Rat => {
            let f = rat_arg(poly, &t)?;
            if reduced {
                let holds = reduced_check(&f, &t)?;
                let ids: Vec<String> = reduced_constraints(&t)?
                    .iter()
                    .map(|i| i.display_with(t.vars()))
                    .collect();
                return Ok(Report {
                    text: format!(
                        "{}\n{}",
                        if holds { "holds" } else { "violated" },
                        ids.join("\n")
                    ),
                    json: json!({"holds": holds, "identities": ids}),
                    affirmative: holds,
                });
            }
            let report = constraint_check(&f, &t)?;
            let text = report
                .entries
                .iter()
                .map(|e| {
                    let n = t.vars();
                    format!(
                        "({}, {}; {}) {}: {}",
                        n[e.triple.i],
                        n[e.triple.j],
                        n[e.triple.l],
                        if e.holds { "holds" } else { "violated" },
                        e.residual.display_with(n)
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report {
                affirmative: report.holds(),
                json: report.to_json(t.vars()),
                text,
            })
        }
    }
}

fn decompose_cmd(tree: &str, poly: &str, mode: Mode, seed: u64) -> Result<Report, Failure> {
    let t = tree_arg(tree)?;
    let negative = |e: Error| match e {
        Error::NotRepresentable
        | Error::ConstraintViolated { .. }
        | Error::NonVanishingFailed
        | Error::DecompositionFailed { .. } => Failure::Negative(e),
        other => Failure::Input(other),
    };
    match mode {
        Mode::Gf2 => {
            let p = gf2_arg(poly, &t)?;
            let a = decompose(&t, &p).map_err(negative)?;
            let text = a
                .nodes
                .iter()
                .map(|(k, v)| format!("{:<6} {v:04b}", if k.is_empty() { "root" } else { k }))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::yes(a.to_json(), text))
        }
        Mode::Rat => {
            let f = rat_arg(poly, &t)?;
            let d = decompose_polynomial_seeded(&f, &t, seed).map_err(negative)?;
            let uv = ["u".to_string(), "v".to_string()];
            let text = d
                .nodes
                .iter()
                .map(|(k, p)| {
                    format!(
                        "{:<6} {}",
                        if k.is_empty() { "root" } else { k },
                        p.display_with(&uv[..p.arity()])
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::yes(d.to_json(), text))
        }
    }
}

fn distance_cmd(trees: &[String]) -> Result<Report, Failure> {
    let [a, b] = trees else {
        return Err(
            Error::InvalidArgument("distance needs exactly two --tree arguments".into()).into(),
        );
    };
    let d = distance(&tree_arg(a)?, &tree_arg(b)?)?;
    Ok(Report::yes(
        d.to_json(),
        format!("{} {:.4}", d.fraction(), d.decimal()),
    ))
}

fn distance_matrix_cmd(n: usize) -> Result<Report, Failure> {
    let limit = enumeration_limit();
    if n > limit {
        return Err(Error::LimitExceeded { n, limit }.into());
    }
    let trees = enumerate_tree_shapes(n)?;
    let m = distance_matrix(&trees)?;
    let total = space_size(n as u32);
    let cells: Vec<Vec<String>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| {
                    let num = d * num_bigint::BigInt::from(total.clone());
                    format!("{}/{total}", num.to_integer())
                })
                .collect()
        })
        .collect();
    let names: Vec<String> = trees.iter().map(Tree::to_string).collect();
    let text = names
        .iter()
        .zip(&cells)
        .map(|(name, row)| format!("{name}\t{}", row.join("\t")))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report::yes(
        json!({"trees": names, "total": big(&total), "matrix": cells}),
        text,
    ))
}

fn reconstruct_cmd(path: &PathBuf, n: usize) -> Result<Report, Failure> {
    let members = FunctionSpace::parse_members(&read(path)?, n)?;
    match reconstruct_tree(&members, n) {
        Ok(t) => Ok(Report::yes(json!({"tree": t.to_string()}), t.to_string())),
        Err(e @ Error::InconsistentSpace(_)) => Err(Failure::Negative(e)),
        Err(e) => Err(e.into()),
    }
}

fn tenn_cmd(path: &PathBuf) -> Result<Report, Failure> {
    let net = LayeredNetwork::parse(&read(path)?)?;
    let r = expand_tenn(&net)?;
    let b = nn_capacity_bound(&net)?;
    let text = format!(
        "tree {}\nleaves {}\nmax children {}\ngamma witness {}\nestimate bound {}\ncertified bound {}",
        r.tree, r.leaf_count, r.max_children, b.gamma_witness, b.estimate_bound, b.certified_bound
    );
    let mut json = r.to_json();
    json["bounds"] = b.to_json();
    Ok(Report::yes(json, text))
}

fn bounds_cmd(
    burnside: Option<u32>,
    gamma_c: Option<u32>,
    threshold: Option<Vec<u32>>,
    variety: Option<Vec<u64>>,
) -> Result<Report, Failure> {
    let mut json = serde_json::Map::new();
    let mut text = Vec::new();
    if let Some(m) = burnside {
        if m == 0 {
            return Err(Error::InvalidArgument("burnside needs m >= 1".into()).into());
        }
        let v = burnside_classes(m);
        text.push(v.to_string());
        json.insert("burnside".into(), big(&v));
    }
    if let Some(c) = gamma_c {
        let v = gamma(c)?;
        text.push(v.to_string());
        json.insert("gamma".into(), big(&v));
    }
    if let Some(pc) = threshold {
        let n = universal_threshold(pc[0], pc[1])?;
        text.push(n.to_string());
        json.insert("threshold".into(), json!(n));
    }
    if let Some(nk) = variety {
        let (bound, ambient) = variety_dims(nk[0], nk[1]);
        text.push(format!("{bound} {ambient}"));
        json.insert(
            "variety".into(),
            json!({"bound": big(&bound), "ambient": big(&ambient)}),
        );
    }
    if json.is_empty() {
        return Err(Error::InvalidArgument(
            "one of --burnside, --gamma, --threshold, --variety is required".into(),
        )
        .into());
    }
    Ok(Report::yes(Value::Object(json), text.join("\n")))
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Enumerate { tree, count_only } => enumerate(&tree, count_only),
        Command::Check {
            tree,
            poly,
            mode,
            reduced,
        } => check(&tree, &poly, mode, reduced),
        Command::Decompose { tree, poly, mode } => decompose_cmd(&tree, &poly, mode, cli.seed),
        Command::Distance { tree } => distance_cmd(&tree),
        Command::DistanceMatrix { n } => distance_matrix_cmd(n),
        Command::Reconstruct { space, n } => reconstruct_cmd(&space, n),
        Command::Tenn { network } => tenn_cmd(&network),
        Command::Bounds {
            burnside,
            gamma,
            threshold,
            variety,
        } => bounds_cmd(burnside, gamma, threshold, variety),
    }
}

fn error_json(e: &Error) -> Value {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}})
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.output;
    match run(cli) {
        Ok(report) => {
            match format {
                Format::Json => emit(&report.json.to_string()),
                Format::Text => emit(&report.text),
            }
            ExitCode::from(if report.affirmative { 0 } else { 1 })
        }
        Err(Failure::Negative(e)) => {
            match format {
                Format::Json => emit(&error_json(&e).to_string()),
                Format::Text => emit(&e.to_string()),
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(2)
        }
    }
}
