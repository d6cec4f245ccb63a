//! Command line front end.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage errors and 3
//! when a computation is refused for exceeding the enumeration budget.

use crate::ering::{localize, quotient, transfer_ideal, EAlgebra, EulerSet, Field};
use crate::error::Error;
use crate::groups::{
    count_level_points, dual_hom, family_of, hom_set, image_subgroup, level_points, sub_points,
    AbelianPGroup, Subgroup, SubgroupFamily,
};
use crate::verify::{
    dual_image, fiber_rows, group_spec, reports_to_csv, reports_to_markdown, run_check, CheckConfig, Suite,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "levelring", version, about = "Transfer ideals, level structures and their identities")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Height one over the integers.
    Exact1,
    /// The Honda special fiber over F_p at height n.
    Fiber,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// The prime; inferred from --group when omitted.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Height n.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of loops h.
    #[arg(long, global = true)]
    loops: Option<usize>,
    /// Group as a comma separated list of cyclic orders, e.g. 4,2.
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, value_enum, default_value = "exact1", global = true)]
    mode: Mode,
    /// Truncation degree of the Honda law.
    #[arg(long, global = true)]
    trunc: Option<u32>,
    /// Largest enumeration attempted.
    #[arg(long, default_value_t = crate::DEFAULT_BUDGET, global = true)]
    budget: u128,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order, pairing convention, maximal subgroups and |Hom(Z_p^h, A)|.
    GroupInfo,
    /// One row per f: family, ideal, quotient and level count.
    Fibers,
    /// Number of level structures A* -> (Q_p/Z_p)^{n+h}.
    LevelCount,
    /// Subgroup points over each f, with the images of the level points.
    SubCount,
    /// Localization at S_f against the rational quotient, per f.
    Localize,
    /// Runs named checks or a suite manifest.
    Verify {
        /// Check names (f2, cyclic, fiber-rank, ..., all).
        names: Vec<String>,
        /// Largest group order in sweeps.
        #[arg(long, default_value_t = 64)]
        max_order: u64,
        /// A TOML manifest with [[check]] entries.
        #[arg(long)]
        suite: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), Failure> {
        if self.mode == Mode::Exact1 && self.n.is_some_and(|n| n != 1) {
            return Err(usage("mode exact1 requires n = 1"));
        }
        if self.budget == 0 {
            return Err(usage("budget must be positive"));
        }
        Ok(())
    }

    fn height(&self) -> usize {
        self.n.unwrap_or(1)
    }

    fn loops(&self) -> usize {
        self.loops.unwrap_or(1)
    }

    fn group(&self) -> Result<AbelianPGroup, Failure> {
        let spec = self.group.as_deref().ok_or_else(|| usage("--group is required"))?;
        Ok(AbelianPGroup::parse(spec, self.p)?)
    }

    fn algebra(&self, a: &AbelianPGroup) -> Result<EAlgebra, Failure> {
        Ok(match self.mode {
            Mode::Exact1 => EAlgebra::integer(a)?,
            Mode::Fiber => EAlgebra::fiber(a, self.height() as u32, self.trunc)?,
        })
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let cfg = cli.run;
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let (value, table, code) = match &cli.command {
        Command::GroupInfo => with_table(group_info(&cfg)?),
        Command::Fibers => with_table(fibers(&cfg)?),
        Command::LevelCount => with_table(level_count(&cfg)?),
        Command::SubCount => with_table(sub_count(&cfg)?),
        Command::Localize => with_table(localize_rows(&cfg)?),
        Command::Verify { names, max_order, suite } => verify(&cfg, names, *max_order, suite.as_ref())?,
    };
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("json") + "\n",
        Format::Md => table.markdown,
        Format::Csv => table.csv,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(code)
}

struct Rendered {
    markdown: String,
    csv: String,
}

/// Renders a JSON object, or an object holding a `rows` array, as a table.
fn render(value: &Value) -> Rendered {
    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(xs) if xs.iter().all(Value::is_string) => xs.iter().map(cell).collect::<Vec<_>>().join(", "),
            other => other.to_string(),
        }
    }
    let (header, rows): (Vec<String>, Vec<Vec<String>>) = match value.get("rows").and_then(Value::as_array) {
        Some(rows) if !rows.is_empty() => {
            let keys: Vec<String> = rows[0].as_object().map(|m| m.keys().cloned().collect()).unwrap_or_default();
            let body = rows.iter().map(|r| keys.iter().map(|k| cell(&r[k])).collect()).collect();
            (keys, body)
        }
        _ => {
            let m = value.as_object().cloned().unwrap_or_default();
            (vec!["key".into(), "value".into()], m.iter().map(|(k, v)| vec![k.clone(), cell(v)]).collect())
        }
    };
    let mut markdown = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    let esc = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
    let mut csv = header.iter().map(|h| esc(h)).collect::<Vec<_>>().join(",") + "\n";
    for r in rows {
        markdown += &format!("| {} |\n", r.join(" | "));
        csv += &(r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(",") + "\n");
    }
    Rendered { markdown, csv }
}

fn with_table(value: Value) -> (Value, Rendered, i32) {
    let table = render(&value);
    (value, table, 0)
}

fn group_info(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = cfg.group()?;
    let maximal = SubgroupFamily::all_proper(&a);
    let h = cfg.loops();
    Ok(json!({
        "group": a.to_string(),
        "spec": group_spec(&a),
        "p": a.p(),
        "order": a.order(),
        "exponents": a.exponents(),
        "pairing": "<c, a> = sum_i c_i a_i / p^k_i in Q_p/Z_p (self-dual presentation)",
        "maximal_subgroups": maximal.maximal_members().iter().map(Subgroup::to_string).collect::<Vec<_>>(),
        "maximal_subgroup_count": maximal.maximal_members().len(),
        "loops": h,
        "hom_count": (a.order() as u128).pow(h as u32).to_string(),
    }))
}

fn fibers(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = cfg.group()?;
    let r = cfg.algebra(&a)?;
    let h = cfg.loops();
    let rows = fiber_rows(&r, h, cfg.budget)?;
    let rows: Vec<Value> = rows
        .into_iter()
        .map(|x| {
            let matches = match cfg.mode {
                Mode::Exact1 => x.matches,
                // on the fiber only I = 0 pins the dimension; otherwise it bounds the count
                Mode::Fiber => {
                    if x.family.is_empty() {
                        x.rank as u64 == x.level_count
                    } else {
                        x.rank as u64 >= x.level_count
                    }
                }
            };
            json!({
                "f": x.f,
                "family": x.family,
                "generators": x.generators,
                "rank": x.rank,
                "invariant_factors": x.invariant_factors,
                "level_count": x.level_count,
                "match": matches,
            })
        })
        .collect();
    Ok(json!({
        "group": group_spec(&a),
        "coordinate": r.fgl().coordinate_convention(),
        "loops": h,
        "rows": rows,
    }))
}

fn level_count(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = cfg.group()?;
    let (n, h) = (cfg.height(), cfg.loops.unwrap_or(0));
    let count = count_level_points(&a, n, h, None, cfg.budget)?;
    Ok(json!({ "group": group_spec(&a), "n": n, "h": h, "count": count }))
}

fn sub_count(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = cfg.group()?;
    let (n, h) = (cfg.height(), cfg.loops());
    let k = a.log_order();
    let mut rows = Vec::new();
    for f in hom_set(&a, h) {
        let fd = dual_hom(&f);
        let points = level_points(&a, n, h, Some(&fd), cfg.budget)?;
        let images: BTreeSet<Subgroup> =
            points.points.iter().map(image_subgroup).collect::<crate::Result<_>>()?;
        let required = dual_image(&fd)?;
        let subs = sub_points(n, h, k, &required, cfg.budget)?;
        rows.push(json!({
            "f": f.encode(),
            "level_points": points.points.len(),
            "distinct_images": images.len(),
            "sub_points": subs.points.len(),
        }));
    }
    Ok(json!({ "group": group_spec(&a), "n": n, "h": h, "k": k, "rows": rows }))
}

fn localize_rows(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = cfg.group()?;
    let r = cfg.algebra(&a)?;
    let field = match cfg.mode {
        Mode::Exact1 => Field::Rationals,
        Mode::Fiber => Field::Fp,
    };
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for f in hom_set(&a, cfg.loops()) {
        let image = f.image();
        if !seen.insert(image.clone()) {
            continue;
        }
        let family = family_of(&f);
        let s = EulerSet::of_family(&r, &family);
        let loc = localize(&r, &s, field)?;
        let q = quotient(&r, &transfer_ideal(&r, &family)?);
        rows.push(json!({
            "image": image.to_string(),
            "f": f.encode(),
            "euler_set": s.len(),
            "localized_dimension": loc.dimension(),
            "quotient_rank": q.free_rank,
        }));
    }
    Ok(json!({ "group": group_spec(&a), "field": format!("{field:?}"), "rows": rows }))
}

fn verify(
    cfg: &RunConfig,
    names: &[String],
    max_order: u64,
    suite: Option<&PathBuf>,
) -> Result<(Value, Rendered, i32), Failure> {
    let group = cfg.group.as_deref().map(|g| AbelianPGroup::parse(g, cfg.p)).transpose()?;
    let check_cfg = CheckConfig {
        p: cfg.p,
        n: cfg.n,
        h: cfg.loops,
        group,
        max_order,
        trunc: cfg.trunc,
        budget: cfg.budget,
    };
    let mut reports = Vec::new();
    if let Some(path) = suite {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        reports.extend(Suite::parse(&text)?.run(&check_cfg)?);
    }
    if names.is_empty() && suite.is_none() {
        return Err(usage("name at least one check or pass --suite"));
    }
    for name in names {
        reports.extend(run_check(name, &check_cfg)?);
    }
    let code = if reports.iter().any(|r| r.is_fail()) { 1 } else { 0 };
    let rendered = Rendered { markdown: reports_to_markdown(&reports), csv: reports_to_csv(&reports) };
    Ok((serde_json::to_value(&reports).expect("reports serialise"), rendered, code))
}
