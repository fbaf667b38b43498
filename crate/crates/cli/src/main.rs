use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffalg::conditional::{
    build_covariate_matrix, exact_p_value, markov_basis, mh_sample, parse_counts, recode_integer, ChainConfig,
    Contrast, CovariateMatrix, FiberCaps, IntegerMatrix, MarkovBasis, Model, StatisticKind, TestResult,
};
use ffalg::groebner::{buchberger, eliminate_basis, reduce_basis, BuchbergerOptions, IdealPresentation};
use ffalg::ideal::{design_ideal, est_monomials, ConfoundingAnalysis, Confounding};
use ffalg::indicator::{
    add_factors_to_design, classify_design, design_from_indicator, indicator_add_factors, indicator_from_design,
    word_text, FactorRelation, IndicatorFunction,
};
use ffalg::monomial::default_names;
use ffalg::order::{Block, OrderKind};
use ffalg::search::{d_optimal_search, SearchMode, SearchSpec};
use ffalg::{Cyclotomic, Design, Error, Field, Polynomial, Rational, TermOrder};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ffalg", version, about = "Algebraic tools for fractional factorial designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced Gröbner basis of a design ideal.
    Gb(OrderedDesign),
    /// Reduced Gröbner basis of an ideal given by generators.
    Ideal(IdealArgs),
    /// Standard monomials of a design ideal.
    Est(OrderedDesign),
    /// Alias classes, or a single confounding query, as JSON.
    Alias(AliasArgs),
    /// Indicator function of a design, or the design of an indicator.
    Indicator(IndicatorArgs),
    /// Regularity class of a two-level design, as JSON.
    Classify(DesignArg),
    /// Append factors defined by sign relations.
    Addfactors(AddFactorsArgs),
    /// Covariate matrix of a model on a design.
    Model(ModelArgs),
    /// Markov basis of the recoded covariate matrix.
    Basis(ModelArgs),
    /// Monte Carlo conditional test, as JSON.
    Mctest(McArgs),
    /// Exact conditional test by fiber enumeration, as JSON.
    Exact(TestArgs),
    /// D-optimal main-effect designs, as JSON.
    Doptimal(DoptArgs),
}

#[derive(Args)]
struct DesignArg {
    /// Design file.
    #[arg(long)]
    design: PathBuf,
}

#[derive(Args)]
struct OrderedDesign {
    #[arg(long)]
    design: PathBuf,
    /// lex | grlex | grevlex | block:<kind>(vars)><kind>(vars)...
    #[arg(long, default_value = "grevlex")]
    order: String,
    /// Variable precedence for single-block orders, e.g. x3,x1,x2.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
}

#[derive(Args)]
struct IdealArgs {
    /// Generators, one polynomial per line.
    #[arg(long)]
    input: PathBuf,
    /// Variable names, highest precedence first.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<String>,
    #[arg(long, default_value = "grevlex")]
    order: String,
    /// Variables to eliminate; the order must eliminate them.
    #[arg(long, value_delimiter = ',')]
    eliminate: Option<Vec<String>>,
    /// Enable the chain criterion.
    #[arg(long)]
    chain_criterion: bool,
}

#[derive(Args)]
struct AliasArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_degree: u32,
    /// Two monomials `a,b`: report whether they are confounded.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    query: Option<Vec<String>>,
}

#[derive(Args)]
struct IndicatorArgs {
    #[arg(long, conflicts_with = "indicator", required_unless_present = "indicator")]
    design: Option<PathBuf>,
    /// Indicator file: convert back to a design.
    #[arg(long)]
    indicator: Option<PathBuf>,
}

#[derive(Args)]
struct AddFactorsArgs {
    #[arg(long)]
    design: PathBuf,
    /// Relation such as `x4=-x1*x2`; new factors numbered consecutively.
    #[arg(long = "relation", required = true)]
    relations: Vec<String>,
    /// Print the composed indicator function instead of the design.
    #[arg(long)]
    indicator: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    design: PathBuf,
    /// Model file: one term per line, optional `contrast=<tag>`.
    #[arg(long)]
    model: PathBuf,
    /// Print the nonnegative integer recoding.
    #[arg(long)]
    integer: bool,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Counts file, in design run order.
    #[arg(long)]
    y: PathBuf,
    /// deviance | pearson
    #[arg(long, default_value = "pearson")]
    stat: String,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    test: TestArgs,
    #[arg(long, required = true)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    thinning: usize,
    /// Independent chains, run in parallel and pooled.
    #[arg(long, default_value_t = 1)]
    chains: usize,
}

#[derive(Args)]
struct DoptArgs {
    #[arg(long)]
    m: usize,
    /// Run count; defaults to m + 1.
    #[arg(long)]
    n: Option<usize>,
    /// Use seeded greedy exchange instead of exhaustive search.
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include the optimal designs in the report.
    #[arg(long)]
    list: bool,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { 3 } else if matches!(e, Error::Convergence(_)) { 1 } else { 2 };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches the flag and file to an error from reading or parsing it.
fn at<T>(flag: &str, path: &Path, r: ffalg::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut c = CliError::from(e);
        c.message = format!("--{flag} {}: {}", path.display(), c.message);
        c
    })
}

fn read(flag: &str, path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("--{flag} {}: {e}", path.display())))
}

fn load_design(path: &Path) -> CliResult<Design> {
    let text = read("design", path)?;
    at("design", path, Design::parse(&text))
}

fn parse_order(spec: &str, names: &[String], vars: Option<&[String]>) -> CliResult<TermOrder> {
    let index = |v: &str| {
        names
            .iter()
            .position(|n| n == v.trim())
            .ok_or_else(|| CliError::input(format!("--order/--vars: unknown variable {v:?}")))
    };
    let kind = |k: &str| match k {
        "lex" => Ok(OrderKind::Lex),
        "grlex" => Ok(OrderKind::GrLex),
        "grevlex" => Ok(OrderKind::GrevLex),
        _ => Err(CliError::input(format!("--order: unknown order {k:?}"))),
    };
    if let Some(body) = spec.strip_prefix("block:") {
        if vars.is_some() {
            return Err(CliError::input("--vars cannot be combined with a block order"));
        }
        let mut blocks = Vec::new();
        for part in body.split('>') {
            let (k, rest) = part
                .split_once('(')
                .ok_or_else(|| CliError::input(format!("--order: block {part:?} is not <kind>(vars)")))?;
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| CliError::input(format!("--order: block {part:?} lacks ')'")))?;
            let vs = inner.split(',').map(index).collect::<CliResult<Vec<_>>>()?;
            blocks.push(Block { kind: kind(k)?, vars: vs });
        }
        return Ok(TermOrder::block(names.len(), blocks)?);
    }
    let k = kind(spec)?;
    let precedence = match vars {
        Some(v) => v.iter().map(|s| index(s)).collect::<CliResult<Vec<_>>>()?,
        None => (0..names.len()).collect(),
    };
    Ok(TermOrder::single(k, precedence).map_err(|e| CliError::input(format!("--vars: {e}")))?)
}

fn order_header(order: &TermOrder, names: &[String]) -> String {
    match order.simple_kind() {
        Some(k) => {
            let vars: Vec<&str> = order.precedence().iter().map(|&v| names[v].as_str()).collect();
            format!("# order={} vars={}", k.name(), vars.join(">"))
        }
        None => {
            let blocks: Vec<String> = order
                .blocks()
                .iter()
                .map(|b| {
                    let vs: Vec<&str> = b.vars.iter().map(|&v| names[v].as_str()).collect();
                    format!("{}({})", b.kind.name(), vs.join(","))
                })
                .collect();
            format!("# order=block vars={}", blocks.join(">"))
        }
    }
}

fn design_names(d: &Design) -> Vec<String> {
    default_names("x", d.m())
}

fn parse_monomial(text: &str, names: &[String]) -> CliResult<ffalg::Monomial> {
    let p = Polynomial::<Rational>::parse(text, names).map_err(|e| CliError::input(format!("{text:?}: {e}")))?;
    let terms: Vec<_> = p.terms().collect();
    match terms[..] {
        [(m, c)] if c.is_one() => Ok(m.clone()),
        _ => Err(CliError::input(format!("{text:?} is not a monomial"))),
    }
}

fn cmd_gb(a: &OrderedDesign) -> CliResult<String> {
    let d = load_design(&a.design)?;
    let names = design_names(&d);
    let order = parse_order(&a.order, &names, a.vars.as_deref())?;
    let gb = design_ideal::<Rational>(&d, &order)?;
    let mut out = order_header(&order, &names);
    out.push('\n');
    for line in gb.to_lines(&names) {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_ideal(a: &IdealArgs) -> CliResult<String> {
    let text = read("input", &a.input)?;
    let mut gens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = Polynomial::<Rational>::parse(line, &a.vars)
            .map_err(|e| CliError::input(format!("--input {}: line {}: {e}", a.input.display(), i + 1)))?;
        gens.push(p);
    }
    let order = parse_order(&a.order, &a.vars, None)?;
    let opts = BuchbergerOptions { chain_criterion: a.chain_criterion, ..Default::default() };
    let gb = reduce_basis(&buchberger(&IdealPresentation::new(gens, a.vars.clone())?, &order, &opts)?);
    let (gb, names) = match &a.eliminate {
        Some(drop) => {
            let idx = drop
                .iter()
                .map(|v| {
                    a.vars
                        .iter()
                        .position(|n| n == v)
                        .ok_or_else(|| CliError::input(format!("--eliminate: unknown variable {v:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let (pres, basis) = eliminate_basis(&gb, &idx, &a.vars)?;
            (reduce_basis(&basis), pres.names)
        }
        None => (gb, a.vars.clone()),
    };
    let mut out = order_header(&gb.order, &names);
    out.push('\n');
    for line in gb.to_lines(&names) {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_est(a: &OrderedDesign) -> CliResult<String> {
    let d = load_design(&a.design)?;
    let names = design_names(&d);
    let order = parse_order(&a.order, &names, a.vars.as_deref())?;
    let mut est = est_monomials::<Rational>(&d, &order)?;
    est.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.exps().cmp(a.exps())));
    Ok(est.iter().map(|m| m.format_with(&names) + "\n").collect())
}

fn cmd_alias(a: &AliasArgs) -> CliResult<Value> {
    let d = load_design(&a.design)?;
    let names = design_names(&d);
    let analysis = ConfoundingAnalysis::new(&d)?;
    if let Some(q) = &a.query {
        let [x, y] = &q[..] else {
            return Err(CliError::input("--query expects two monomials separated by a comma"));
        };
        let (m1, m2) = (parse_monomial(x, &names)?, parse_monomial(y, &names)?);
        let c = analysis.is_confounded(&m1, &m2)?;
        let certificate = match c {
            Confounding::NotConfounded => Value::Null,
            _ => {
                let mem = analysis.membership(&m1, &m2, c.sign().unwrap_or(1))?;
                let order = &analysis.basis().order;
                json!(mem
                    .certificate
                    .unwrap_or_default()
                    .iter()
                    .map(|p| p.to_text(&names, order))
                    .collect::<Vec<_>>())
            }
        };
        return Ok(json!({
            "schema": 1,
            "a1": x,
            "a2": y,
            "confounded": c.sign(),
            "basis": analysis.basis().to_lines(&names),
            "certificate": certificate,
        }));
    }
    let table = analysis.alias_table(a.max_degree)?;
    let mut v = serde_json::to_value(&table).map_err(|e| CliError::input(e.to_string()))?;
    v["schema"] = json!(1);
    Ok(v)
}

fn cmd_indicator(a: &IndicatorArgs) -> CliResult<String> {
    if let Some(p) = &a.indicator {
        let text = read("indicator", p)?;
        let f = at("indicator", p, IndicatorFunction::parse(&text))?;
        return Ok(design_from_indicator(&f)?.to_text());
    }
    let d = load_design(a.design.as_ref().expect("clap enforces one source"))?;
    Ok(indicator_from_design(&d)?.to_text())
}

fn cmd_classify(a: &DesignArg) -> CliResult<Value> {
    let d = load_design(&a.design)?;
    let c = classify_design(&d)?;
    let words: Vec<Value> = c
        .words
        .iter()
        .map(|w| json!({"word": word_text(d.m(), w.word), "sign": w.sign}))
        .collect();
    Ok(json!({
        "schema": 1,
        "m": d.m(),
        "n": d.n(),
        "class": c.tag.name(),
        "words": words,
        "containing": c.containing.as_ref().map(|e| e.signs().unwrap_or_default()),
        "max_ratio": c.max_ratio.to_string(),
        "diagnostic": c.diagnostic,
    }))
}

fn parse_relation(text: &str, m: usize, k: usize) -> CliResult<FactorRelation> {
    let bad = |why: &str| CliError::input(format!("--relation {text:?}: {why}"));
    let (lhs, rhs) = text.split_once('=').ok_or_else(|| bad("expected <new factor>=<signed monomial>"))?;
    let expected = format!("x{}", m + k + 1);
    if lhs.trim() != expected {
        return Err(bad(&format!("new factor must be named {expected}")));
    }
    let rhs = rhs.trim();
    let (sign, body) = match rhs.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, rhs.strip_prefix('+').unwrap_or(rhs)),
    };
    let mono = parse_monomial(body, &default_names("x", m)).map_err(|e| bad(&e.message))?;
    if !mono.is_square_free() || mono.is_one() {
        return Err(bad("right side must be a nonconstant square-free monomial in the original factors"));
    }
    FactorRelation::new(k, sign, mono.support_mask()).map_err(|e| bad(&e.to_string()))
}

fn cmd_addfactors(a: &AddFactorsArgs) -> CliResult<String> {
    let d = load_design(&a.design)?;
    let rels = a
        .relations
        .iter()
        .enumerate()
        .map(|(k, r)| parse_relation(r, d.m(), k))
        .collect::<CliResult<Vec<_>>>()?;
    if a.indicator {
        let f = indicator_from_design(&d)?;
        return Ok(indicator_add_factors(&f, &rels)?.to_text());
    }
    Ok(add_factors_to_design(&d, &rels)?.to_text())
}

fn load_model(path: &Path, m: usize) -> CliResult<Model> {
    let text = read("model", path)?;
    at("model", path, Model::parse(&text, m))
}

fn matrix_text<C: Field>(a: &CovariateMatrix<C>) -> String {
    let mut out = format!("# {}\n", a.labels().join(" "));
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| a.entry(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn integer_text(a: &IntegerMatrix) -> String {
    let mut out = format!("# {}\n", a.labels().join(" "));
    for i in 0..a.nrows() {
        let row: Vec<String> = a.row(i).iter().map(i64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Runs `body` with the coefficient field the design and contrast need.
macro_rules! with_field {
    ($d:expr, $model:expr, $body:ident) => {{
        let complex = $d.s() > 2 && $model.contrast() == Contrast::Complex;
        match (complex, $d.s()) {
            (false, _) | (true, 2) => $body::<Rational>($d, $model),
            (true, 3) => $body::<Cyclotomic<3>>($d, $model),
            (true, 5) => $body::<Cyclotomic<5>>($d, $model),
            (true, 7) => $body::<Cyclotomic<7>>($d, $model),
            (true, s) => Err(CliError::input(format!("complex contrasts support s in {{3, 5, 7}}, not {s}"))),
        }
    }};
}

fn model_matrix_text<C: Field>(d: &Design, model: &Model) -> CliResult<String> {
    Ok(matrix_text(&build_covariate_matrix::<C>(d, model)?))
}

fn model_integer<C: Field>(d: &Design, model: &Model) -> CliResult<IntegerMatrix> {
    Ok(recode_integer(&build_covariate_matrix::<C>(d, model)?)?)
}

fn cmd_model(a: &ModelArgs) -> CliResult<String> {
    let d = load_design(&a.design)?;
    let model = load_model(&a.model, d.m())?;
    if a.integer {
        return Ok(integer_text(&with_field!(&d, &model, model_integer)?));
    }
    with_field!(&d, &model, model_matrix_text)
}

fn basis_of(a: &IntegerMatrix) -> CliResult<MarkovBasis> {
    Ok(markov_basis(a, &BuchbergerOptions::default())?)
}

fn cmd_basis(a: &ModelArgs) -> CliResult<String> {
    let d = load_design(&a.design)?;
    let model = load_model(&a.model, d.m())?;
    let int = with_field!(&d, &model, model_integer)?;
    let mb = basis_of(&int)?;
    let mut out = format!("# moves={} n={}\n", mb.len(), mb.n);
    for z in &mb.moves {
        let row: Vec<String> = z.iter().map(i64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

struct TestInput {
    matrix: IntegerMatrix,
    y0: Vec<u64>,
    kind: StatisticKind,
}

fn load_test(a: &TestArgs) -> CliResult<TestInput> {
    let d = load_design(&a.design)?;
    let model = load_model(&a.model, d.m())?;
    let text = read("y", &a.y)?;
    let y0 = at("y", &a.y, parse_counts(&text, d.n()))?;
    let kind: StatisticKind = a.stat.parse().map_err(|e: Error| CliError::input(format!("--stat: {e}")))?;
    let matrix = with_field!(&d, &model, model_integer)?;
    Ok(TestInput { matrix, y0, kind })
}

fn report(r: &TestResult, extra: Value) -> Value {
    let mut v = json!({
        "schema": 1,
        "method": r.method.name(),
        "statistic_kind": r.kind.name(),
        "statistic": r.statistic,
        "p": r.p_value,
        "se": r.std_error,
        "samples": r.samples,
        "acceptance_rate": r.acceptance_rate,
        "p_exact": r.p_exact.as_ref().map(|p| p.to_string()),
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn cmd_mctest(a: &McArgs) -> CliResult<Value> {
    let t = load_test(&a.test)?;
    let mb = basis_of(&t.matrix)?;
    let cfg = ChainConfig {
        seed: a.seed,
        burn_in: a.burn_in,
        samples: a.samples,
        thinning: a.thinning,
        chains: a.chains,
    };
    let r = mh_sample(&t.matrix, &t.y0, &mb, t.kind, &cfg)?;
    Ok(report(&r, json!({"chain": cfg, "basis_size": mb.len()})))
}

fn cmd_exact(a: &TestArgs) -> CliResult<Value> {
    let t = load_test(a)?;
    let r = exact_p_value(&t.matrix, &t.y0, t.kind, &FiberCaps::default())?;
    Ok(report(&r, json!({"fiber_size": r.samples})))
}

fn cmd_doptimal(a: &DoptArgs) -> CliResult<Value> {
    let mode = if a.greedy {
        SearchMode::GreedyExchange { restarts: a.restarts, seed: a.seed }
    } else {
        SearchMode::Exhaustive
    };
    let spec = SearchSpec { m: a.m, n: a.n.unwrap_or(a.m + 1), mode };
    let r = d_optimal_search(&spec)?;
    let optimum = match u64::try_from(&r.optimum) {
        Ok(v) => json!(v),
        Err(_) => json!(r.optimum.to_string()),
    };
    let histogram: BTreeMap<&str, usize> = r.histogram();
    let mut v = json!({
        "schema": 1,
        "m": spec.m,
        "n": spec.n,
        "mode": if a.greedy { "greedy-exchange" } else { "exhaustive" },
        "optimum": optimum,
        "count": r.designs.len(),
        "histogram": histogram,
        "evaluated": r.evaluated,
    });
    if a.list {
        v["designs"] = json!(r
            .designs
            .iter()
            .zip(&r.classes)
            .map(|(d, c)| json!({"runs": d.signs().unwrap_or_default(), "class": c.tag.name()}))
            .collect::<Vec<_>>());
    }
    Ok(v)
}

fn json_text(v: CliResult<Value>) -> CliResult<String> {
    v.map(|v| serde_json::to_string_pretty(&v).expect("values serialize") + "\n")
}

fn run(cli: Cli) -> CliResult<String> {
    match &cli.command {
        Command::Gb(a) => cmd_gb(a),
        Command::Ideal(a) => cmd_ideal(a),
        Command::Est(a) => cmd_est(a),
        Command::Alias(a) => json_text(cmd_alias(a)),
        Command::Indicator(a) => cmd_indicator(a),
        Command::Classify(a) => json_text(cmd_classify(a)),
        Command::Addfactors(a) => cmd_addfactors(a),
        Command::Model(a) => cmd_model(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Mctest(a) => json_text(cmd_mctest(a)),
        Command::Exact(a) => json_text(cmd_exact(a)),
        Command::Doptimal(a) => json_text(cmd_doptimal(a)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
