//! Command-line front end: `forcing-lab <subcommand> ...`.
//!
//! Exit codes: 0 on success, 1 when the input violates a precondition of the
//! requested operation, 2 on usage errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::{BooleanAlgebra, Ultrafilter};
use crate::forcing::{
    cohen_poset_finite, forces, hit_dense_sets, hit_dense_sets_lazy, Condition, Density, LazyCohenPoset, LazyDense,
};
use crate::lang::corpus::sentence_corpus;
use crate::lang::{ast_string, parse, parse_open, Formula};
use crate::names::{load_names, universe_up_to_rank, HfSet, NameId, NameUniverse};
use crate::oracle::{self, FiniteStructure};
use crate::order::{complete, Completion, DenseSet, Filter, Genericity, Poset, Subset};
use crate::quotient::{build_quotient, QuotientModel};
use crate::valuation::{Environment, ValuationContext};

#[derive(Parser, Debug)]
#[command(name = "forcing-lab", version, about = "Finite Boolean-valued models, quotients and forcing")]
struct Cli {
    /// Output mode: readable text or one `key<TAB>value` record per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula; print its canonical form and syntax tree.
    Parse(ParseArgs),
    /// Boolean value of formulas over a names file.
    Eval(EvalArgs),
    /// Regular open completion of a finite poset.
    Complete(CompleteArgs),
    /// Ultrafilters of an algebra.
    Ultra(UltraArgs),
    /// Quotient of a names file by an ultrafilter, with collapse.
    Quotient(QuotientArgs),
    /// Decide `p ||- phi` over a completed poset.
    Force(ForceArgs),
    /// Build a generic-looking Cohen function by hitting dense sets.
    Cohen(CohenArgs),
    /// Oracle agreement checks at reduced sizes.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Debug)]
#[group(id = "algebra", required = true, multiple = false)]
struct AlgebraArgs {
    /// Powerset algebra on N atoms.
    #[arg(long, value_name = "N")]
    atoms: Option<usize>,
    /// Completion of the poset in FILE.
    #[arg(long, value_name = "FILE")]
    complete_poset: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula text; may be repeated.
    #[arg(long, value_name = "STR")]
    formula: Vec<String>,
    /// File with one formula per line (`#` comments).
    #[arg(long, value_name = "FILE")]
    formula_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// Formula text (alternative to --formula).
    text: Option<String>,
    #[command(flatten)]
    formulas: FormulaArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, value_name = "FILE")]
    names: PathBuf,
    #[command(flatten)]
    formulas: FormulaArgs,
    /// Binds a free variable: `x=name`. May be repeated.
    #[arg(long, value_name = "VAR=NAME")]
    env: Vec<String>,
    /// List every memoized `(op, x, y) -> value` computation.
    #[arg(long)]
    trace: bool,
    /// Compare against classical evaluation in every quotient.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    #[arg(long, alias = "complete-poset", value_name = "FILE")]
    poset: PathBuf,
    /// Compare against brute-force regular open enumeration.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct UltraArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Compare against brute-force search (at most 4 atoms).
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long, value_name = "FILE")]
    names: PathBuf,
    /// Generating atom of the ultrafilter (`aK` or a label); all when absent.
    #[arg(long, value_name = "ATOM")]
    uf: Option<String>,
    #[command(flatten)]
    formulas: FormulaArgs,
    /// Compare truth in the quotient with classical evaluation on the
    /// collapsed sets.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct ForceArgs {
    #[arg(long, alias = "complete-poset", value_name = "FILE")]
    poset: PathBuf,
    #[arg(long, value_name = "FILE")]
    names: PathBuf,
    /// Condition id; every condition when absent.
    #[arg(long, value_name = "ID")]
    p: Option<String>,
    #[command(flatten)]
    formulas: FormulaArgs,
    /// Compare the completion against brute-force regular open enumeration.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct CohenArgs {
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// Unbounded columns instead of the finite `rows x cols` truncation.
    #[arg(long)]
    lazy: bool,
    /// `+`-separated items: `points`, `distinct`, `point:R:C`, `distinct:R1:R2`.
    #[arg(long, default_value = "points+distinct")]
    hit: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-check density of the finite family from the definition.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
}

fn domain(e: impl Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Output lines; `Field`s print as `key: value` in text mode, `Text` lines
/// print their value only. Records mode always prints `key<TAB>value`.
#[derive(Default)]
struct Report {
    lines: Vec<(bool, String, String)>,
}

impl Report {
    fn field(&mut self, key: &str, value: impl Display) {
        self.lines.push((true, key.to_string(), value.to_string()));
    }

    fn text(&mut self, key: &str, value: impl Display) {
        self.lines.push((false, key.to_string(), value.to_string()));
    }

    fn render(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        for (field, key, value) in &self.lines {
            match format {
                Format::Records => writeln!(out, "{key}\t{}", value.replace(['\t', '\n'], " "))?,
                Format::Text if *field => writeln!(out, "{key}: {value}")?,
                Format::Text => writeln!(out, "{value}")?,
            }
        }
        Ok(())
    }
}

/// Runs one command line. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut report = Report::default();
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a, &mut report),
        Command::Eval(a) => cmd_eval(a, &mut report),
        Command::Complete(a) => cmd_complete(a, &mut report),
        Command::Ultra(a) => cmd_ultra(a, &mut report),
        Command::Quotient(a) => cmd_quotient(a, &mut report),
        Command::Force(a) => cmd_force(a, &mut report),
        Command::Cohen(a) => cmd_cohen(a, &mut report),
        Command::Selfcheck(a) => cmd_selfcheck(a, &mut report),
    };
    // partial reports are still useful when a later step fails
    let _ = report.render(cli.format, out);
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            2
        }
        Err(CliError::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))
}

fn formula_texts(args: &FormulaArgs, extra: Option<&String>) -> Result<Vec<String>, CliError> {
    let mut texts: Vec<String> = extra.into_iter().cloned().collect();
    texts.extend(args.formula.iter().cloned());
    if let Some(path) = &args.formula_file {
        for line in read_file(path)?.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                texts.push(line.to_string());
            }
        }
    }
    Ok(texts)
}

fn require_formulas(args: &FormulaArgs, extra: Option<&String>) -> Result<Vec<String>, CliError> {
    let texts = formula_texts(args, extra)?;
    if texts.is_empty() {
        return Err(CliError::Usage("no formula given (use --formula or --formula-file)".into()));
    }
    Ok(texts)
}

struct AlgebraSource {
    algebra: BooleanAlgebra,
    completion: Option<Completion>,
}

fn load_poset(path: &Path) -> Result<Poset, CliError> {
    Poset::load(&read_file(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn load_algebra(args: &AlgebraArgs) -> Result<AlgebraSource, CliError> {
    match (&args.atoms, &args.complete_poset) {
        (Some(n), None) => Ok(AlgebraSource { algebra: BooleanAlgebra::new(*n).map_err(domain)?, completion: None }),
        (None, Some(path)) => {
            let completion = complete(&load_poset(path)?).map_err(domain)?;
            Ok(AlgebraSource { algebra: completion.target().clone(), completion: Some(completion) })
        }
        _ => Err(CliError::Usage("give exactly one of --atoms and --complete-poset".into())),
    }
}

/// In names files read against a completion, `[p]` stands for `embed(p)`.
fn expand_embeddings(text: &str, completion: &Completion) -> Result<String, CliError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('[') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find(']').ok_or_else(|| CliError::Domain("unclosed '[' in names file".into()))?;
        let id = rest[open + 1..open + close].trim();
        let p = completion.source().index_of(id).map_err(domain)?;
        out.push_str(&completion.target().format(completion.embed(p)));
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn load_universe(path: &Path, source: &AlgebraSource) -> Result<NameUniverse, CliError> {
    let mut text = read_file(path)?;
    if let Some(c) = &source.completion {
        text = expand_embeddings(&text, c)?;
    }
    load_names(&text, &source.algebra).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn relativization_note(report: &mut Report, universe: &NameUniverse) {
    report.field(
        "note",
        format!(
            "quantifiers range over the {} names of this universe only; values are relative to it",
            universe.len()
        ),
    );
}

fn parse_ultrafilter(text: &str, algebra: &BooleanAlgebra) -> Result<Ultrafilter, CliError> {
    let atom = algebra
        .atom_labels()
        .iter()
        .position(|l| l == text)
        .or_else(|| text.strip_prefix('a').and_then(|k| k.parse::<usize>().ok()))
        .ok_or_else(|| CliError::Usage(format!("--uf expects an atom such as a0, got {text:?}")))?;
    Ultrafilter::principal(algebra, atom)
        .ok_or_else(|| CliError::Domain(format!("atom a{atom} does not exist in a {}-atom algebra", algebra.atom_count())))
}

fn uf_label(uf: &Ultrafilter, algebra: &BooleanAlgebra) -> String {
    format!("U({})", algebra.atom_labels()[uf.generator_atom()])
}

fn cmd_parse(args: &ParseArgs, report: &mut Report) -> Result<(), CliError> {
    for text in require_formulas(&args.formulas, args.text.as_ref())? {
        let f = parse(&text).map_err(domain)?;
        report.field("formula", &f);
        report.field("ast", ast_string(&f));
        report.field("depth", f.depth());
        let consts: Vec<String> = f.constants().into_iter().collect();
        report.field("constants", if consts.is_empty() { "(none)".to_string() } else { consts.join(" ") });
    }
    Ok(())
}

fn parse_env(bindings: &[String], universe: &NameUniverse) -> Result<Environment, CliError> {
    bindings
        .iter()
        .map(|b| {
            let (v, n) = b
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--env expects VAR=NAME, got {b:?}")))?;
            let id = universe.lookup(n.trim()).map_err(domain)?;
            Ok((v.trim().to_string(), id))
        })
        .collect()
}

/// A classical structure whose points are the quotient's classes, built
/// from the collapsed sets; every name label denotes its class.
fn collapsed_structure(q: &QuotientModel, universe: &NameUniverse) -> Result<FiniteStructure, CliError> {
    let sets = q.mostowski_collapse().map_err(domain)?;
    let labelled: Vec<(String, HfSet)> = sets.into_iter().enumerate().map(|(c, s)| (format!("#class{c}"), s)).collect();
    let mut s = FiniteStructure::from_hf_sets(&labelled);
    for x in universe.ids() {
        s = s.with_constant(universe.label(x), q.class_of(x));
    }
    Ok(s)
}

fn cmd_eval(args: &EvalArgs, report: &mut Report) -> Result<(), CliError> {
    let source = load_algebra(&args.algebra)?;
    let universe = load_universe(&args.names, &source)?;
    let texts = require_formulas(&args.formulas, None)?;
    let env = parse_env(&args.env, &universe)?;
    let free: BTreeSet<String> = env.iter().map(|(v, _)| v.clone()).collect();
    relativization_note(report, &universe);
    report.field(
        "universe",
        format!("{} ({} names, {} atoms)", args.names.display(), universe.len(), universe.algebra().atom_count()),
    );
    let env_text: Vec<String> = env.iter().map(|(v, x)| format!("{v}={}", universe.label(*x))).collect();
    report.field("environment", if env_text.is_empty() { "(empty)".to_string() } else { env_text.join(" ") });
    let alg = universe.algebra();
    for text in texts {
        let f = parse_open(&text, &free).map_err(domain)?;
        let mut ctx = ValuationContext::new(&universe);
        if args.trace {
            ctx.enable_trace();
        }
        report.field("formula", &f);
        let value = ctx.val_formula(&f, &env).map_err(domain)?;
        report.field("value", alg.format(value));
        for e in ctx.trace() {
            report.field("trace", ctx.format_trace_entry(e));
        }
        if args.oracle_check {
            for uf in alg.ultrafilters() {
                let q = build_quotient(&universe, &uf).map_err(domain)?;
                let s = collapsed_structure(&q, &universe)?;
                let classical_env: Vec<(String, usize)> = env.iter().map(|(v, x)| (v.clone(), q.class_of(*x))).collect();
                let classical = oracle::tarski_eval(&s, &f, &classical_env).map_err(domain)?;
                if classical != uf.contains(value) {
                    report.field("oracle", format!("MISMATCH at {}", uf_label(&uf, alg)));
                    return Err(CliError::Domain("oracle disagreement".into()));
                }
            }
            report.field("oracle", format!("agrees in all {} quotients", alg.atom_count()));
        }
    }
    Ok(())
}

fn check_completion_against_oracle(c: &Completion, report: &mut Report) -> Result<(), CliError> {
    let opens = oracle::enumerate_regular_opens(c.source()).map_err(domain)?;
    let expected = 1usize << c.target().atom_count();
    let mut images: Vec<Vec<usize>> =
        c.target().elements().map(|x| c.regular_open_of(x).iter().collect()).collect();
    images.sort();
    let mut sorted = opens.clone();
    sorted.sort();
    if opens.len() != expected || images != sorted {
        report.field("oracle", format!("MISMATCH: {} regular opens, algebra has {expected} elements", opens.len()));
        return Err(CliError::Domain("oracle disagreement".into()));
    }
    report.field("oracle", format!("{} regular opens, matching the algebra", opens.len()));
    Ok(())
}

fn cmd_complete(args: &CompleteArgs, report: &mut Report) -> Result<(), CliError> {
    let poset = load_poset(&args.poset)?;
    let c = complete(&poset).map_err(domain)?;
    let alg = c.target();
    report.field("conditions", poset.len());
    report.field("atoms", alg.atom_count());
    for i in 0..alg.atom_count() {
        let ids: Vec<&str> = c.atom_open(i).iter().map(|p| poset.id(p)).collect();
        report.field("atom", format!("a{i} = {{{}}}", ids.join(",")));
    }
    for p in 0..poset.len() {
        report.field("embed", format!("{} -> {}", poset.id(p), alg.format(c.embed(p))));
    }
    if args.oracle_check {
        check_completion_against_oracle(&c, report)?;
    }
    Ok(())
}

fn cmd_ultra(args: &UltraArgs, report: &mut Report) -> Result<(), CliError> {
    let source = load_algebra(&args.algebra)?;
    let alg = &source.algebra;
    report.field("atoms", alg.atom_count());
    let ufs = alg.ultrafilters();
    for uf in &ufs {
        let status = match uf.check_properties(alg) {
            Ok(()) => "properties 1-5 hold".to_string(),
            Err(k) => format!("property {k} FAILS"),
        };
        report.field("ultrafilter", format!("{} = up-set of {}; {status}", uf_label(uf, alg), alg.format(alg.atom(uf.generator_atom()).expect("atom"))));
    }
    if args.oracle_check {
        let brute = oracle::enumerate_ultrafilters_bruteforce(alg.atom_count()).map_err(domain)?;
        let mut ours: Vec<Vec<u32>> = ufs
            .iter()
            .map(|uf| alg.elements().filter(|&x| uf.contains(x)).map(|x| x.bits()).collect())
            .collect();
        ours.sort();
        let mut brute_sorted = brute.clone();
        brute_sorted.sort();
        if ours != brute_sorted {
            report.field("oracle", format!("MISMATCH: brute force finds {}", brute.len()));
            return Err(CliError::Domain("oracle disagreement".into()));
        }
        report.field("oracle", format!("brute force finds the same {} ultrafilters", brute.len()));
    }
    Ok(())
}

fn cmd_quotient(args: &QuotientArgs, report: &mut Report) -> Result<(), CliError> {
    let source = load_algebra(&args.algebra)?;
    let universe = load_universe(&args.names, &source)?;
    let alg = universe.algebra();
    let ufs = match &args.uf {
        Some(text) => vec![parse_ultrafilter(text, alg)?],
        None => alg.ultrafilters(),
    };
    let formulas = formula_texts(&args.formulas, None)?
        .iter()
        .map(|t| parse(t).map_err(domain))
        .collect::<Result<Vec<Formula>, _>>()?;
    relativization_note(report, &universe);
    for uf in &ufs {
        let q = build_quotient(&universe, uf).map_err(domain)?;
        let sets = q.mostowski_collapse().map_err(domain)?;
        report.field("ultrafilter", uf_label(uf, alg));
        report.field("classes", q.class_count());
        for (c, set) in sets.iter().enumerate() {
            let members: Vec<&str> = q.class_members(c).iter().map(|&x| q.label(x)).collect();
            report.field(
                "class",
                format!("{} members={} collapse={set}", q.label(q.representative(c)), members.join(",")),
            );
        }
        for (d, c) in q.edges() {
            report.field("edge", format!("{} in {}", q.label(q.representative(d)), q.label(q.representative(c))));
        }
        let structure = if args.oracle_check { Some(collapsed_structure(&q, &universe)?) } else { None };
        for f in &formulas {
            let t = q.truth(f).map_err(domain)?;
            report.field("truth", format!("{f} = {t}"));
            if let Some(s) = &structure {
                let classical = oracle::tarski_eval(s, f, &[]).map_err(domain)?;
                if classical != t {
                    report.field("oracle", format!("MISMATCH on {f}"));
                    return Err(CliError::Domain("oracle disagreement".into()));
                }
            }
        }
        if structure.is_some() {
            report.field("oracle", "classical evaluation on the collapse agrees");
        }
    }
    Ok(())
}

fn cmd_force(args: &ForceArgs, report: &mut Report) -> Result<(), CliError> {
    let poset = load_poset(&args.poset)?;
    let c = complete(&poset).map_err(domain)?;
    let source = AlgebraSource { algebra: c.target().clone(), completion: Some(c) };
    let universe = load_universe(&args.names, &source)?;
    let c = source.completion.as_ref().expect("just set");
    let texts = require_formulas(&args.formulas, None)?;
    let conditions: Vec<usize> = match &args.p {
        Some(id) => vec![poset.index_of(id).map_err(domain)?],
        None => (0..poset.len()).collect(),
    };
    relativization_note(report, &universe);
    let alg = c.target();
    let mut ctx = ValuationContext::new(&universe);
    for text in texts {
        let f = parse(&text).map_err(domain)?;
        report.field("formula", &f);
        report.field("value", alg.format(ctx.val_sentence(&f).map_err(domain)?));
        for &p in &conditions {
            let verdict = if forces(c, p, &f, &mut ctx).map_err(domain)? { "FORCES" } else { "DOES NOT FORCE" };
            report.field("embed", format!("{} -> {}", poset.id(p), alg.format(c.embed(p))));
            report.field("result", format!("{} {verdict}", poset.id(p)));
        }
    }
    if args.oracle_check {
        check_completion_against_oracle(c, report)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyItem {
    Point(usize, usize),
    Distinct(usize, usize),
}

fn parse_family(spec: &str, rows: usize, cols: usize) -> Result<Vec<FamilyItem>, CliError> {
    let bad = |item: &str| CliError::Usage(format!("bad --hit item {item:?}"));
    let mut out = Vec::new();
    for item in spec.split('+').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| s.trim_start_matches('r').parse::<usize>().map_err(|_| bad(item));
        match parts.as_slice() {
            ["points"] => out.extend((0..rows).flat_map(|r| (0..cols).map(move |c| FamilyItem::Point(r, c)))),
            ["distinct"] => {
                for a in 0..rows {
                    for b in a + 1..rows {
                        out.push(FamilyItem::Distinct(a, b));
                    }
                }
            }
            ["point", r, c] => out.push(FamilyItem::Point(num(r)?, num(c)?)),
            ["distinct", a, b] => out.push(FamilyItem::Distinct(num(a)?, num(b)?)),
            _ => return Err(bad(item)),
        }
    }
    Ok(out)
}

fn distinctness_report(report: &mut Report, f: &Condition, rows: usize, cols: usize) {
    report.field("total", format!("{} on the {rows}x{cols} grid", if f.is_total_on(rows, cols) { "yes" } else { "no" }));
    for a in 0..rows {
        for b in a + 1..rows {
            let text = match f.distinguishing_column(a, b) {
                Some(c) => format!("r{a} r{b} differ at column {c}"),
                None => format!("r{a} r{b} NOT distinguished"),
            };
            report.field("distinct", text);
        }
    }
}

fn cmd_cohen(args: &CohenArgs, report: &mut Report) -> Result<(), CliError> {
    let family = parse_family(&args.hit, args.rows, args.cols)?;
    if args.lazy {
        let poset = LazyCohenPoset::new(args.rows);
        let lazy: Vec<LazyDense> = family
            .iter()
            .map(|item| match *item {
                FamilyItem::Point(r, c) => poset.dense_point(r, c),
                FamilyItem::Distinct(a, b) => poset.dense_distinct(a, b),
            })
            .collect::<Result<_, _>>()
            .map_err(domain)?;
        report.field("poset", format!("lazy: rows r0..r{}, unbounded columns", args.rows.saturating_sub(1)));
        report.field("seed", args.seed);
        let chain = hit_dense_sets_lazy(&poset, &lazy, args.seed).map_err(domain)?;
        report.field("step", format!("start {}", chain.chain[0]));
        for (d, p) in lazy.iter().zip(&chain.chain[1..]) {
            report.field("step", format!("{d} {p}"));
        }
        let f = chain.union().map_err(domain)?;
        report.field("F", &f);
        let shown = args.cols.max(f.max_col().map_or(0, |c| c + 1));
        for line in f.table(args.rows, shown) {
            report.text("table", line);
        }
        distinctness_report(report, &f, args.rows, args.cols);
        return Ok(());
    }
    let cohen = cohen_poset_finite(args.rows, args.cols).map_err(domain)?;
    report.field("poset", format!("finite: {}x{} grid, {} conditions", args.rows, args.cols, cohen.poset().len()));
    report.field("seed", args.seed);
    let mut sets: Vec<(String, DenseSet)> = Vec::new();
    for item in &family {
        match *item {
            FamilyItem::Point(r, c) => sets.push((format!("point(r{r},{c})"), cohen.dense_point(r, c).map_err(domain)?)),
            FamilyItem::Distinct(a, b) => match cohen.dense_distinct(a, b).map_err(domain)? {
                Density::Dense(d) => sets.push((format!("distinct(r{a},r{b})"), d)),
                Density::NotDense { counterexample } => {
                    report.field(
                        "distinct",
                        format!("distinct(r{a},r{b}) NOT-DENSE: no extension of {counterexample} separates the rows; skipped"),
                    );
                }
            },
        }
    }
    if args.oracle_check {
        if cohen.poset().len() > 729 {
            return Err(CliError::Domain("--oracle-check needs at most 6 grid cells".into()));
        }
        for (name, d) in &sets {
            let members: Vec<usize> = d.members().iter().collect();
            if !oracle::is_dense_naive(cohen.poset(), &members) {
                return Err(CliError::Domain(format!("oracle: {name} is not dense")));
            }
        }
        report.field("oracle", format!("all {} hit sets dense by definition", sets.len()));
    }
    let dense: Vec<DenseSet> = sets.iter().map(|(_, d)| d.clone()).collect();
    let chain = hit_dense_sets(cohen.poset(), &dense, args.seed).map_err(domain)?;
    report.field("step", format!("start {}", cohen.condition(chain.chain[0])));
    for ((name, _), &p) in sets.iter().zip(&chain.chain[1..]) {
        report.field("step", format!("{name} {}", cohen.condition(p)));
    }
    let f = cohen.union_of_filter(&chain.filter(cohen.poset())).map_err(domain)?;
    report.field("F", &f);
    for line in f.table(args.rows, args.cols) {
        report.text("table", line);
    }
    distinctness_report(report, &f, args.rows, args.cols);
    Ok(())
}

type Check = fn(u64) -> Result<(), String>;

fn cmd_selfcheck(args: &SelfcheckArgs, report: &mut Report) -> Result<(), CliError> {
    let checks: [(&str, Check); 8] = [
        ("classical-agreement", check_classical),
        ("truth-lemma", check_truth_lemma),
        ("equality-laws", check_equality_laws),
        ("ultrafilters", check_ultrafilters),
        ("completion", check_completion),
        ("genericity", check_genericity),
        ("cohen", check_cohen),
        ("collapse", check_collapse),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check(args.seed) {
            Ok(()) => report.field("check", format!("PASS {name}")),
            Err(m) => {
                failed += 1;
                report.field("check", format!("FAIL {name}: {m}"));
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Domain(format!("{failed} selfcheck(s) failed")));
    }
    Ok(())
}

fn check_classical(seed: u64) -> Result<(), String> {
    let sets = HfSet::all_up_to_rank(2);
    let alg = BooleanAlgebra::new(1).map_err(|e| e.to_string())?;
    let (universe, ids) = NameUniverse::of_check_names(alg, &sets).map_err(|e| e.to_string())?;
    let labelled: Vec<(String, HfSet)> =
        ids.iter().zip(&sets).map(|(&x, s)| (universe.label(x).to_string(), s.clone())).collect();
    let structure = FiniteStructure::from_hf_sets(&labelled);
    let labels: Vec<String> = labelled.iter().map(|(l, _)| l.clone()).collect();
    let mut ctx = ValuationContext::new(&universe);
    for f in sentence_corpus(&labels, 3, 300, seed) {
        let value = ctx.val_sentence(&f).map_err(|e| e.to_string())?;
        let classical = oracle::tarski_eval(&structure, &f, &[]).map_err(|e| e.to_string())?;
        if value.is_one() != classical {
            return Err(format!("disagreement on {f}"));
        }
    }
    Ok(())
}

fn check_truth_lemma(seed: u64) -> Result<(), String> {
    for atoms in 1..=2 {
        let alg = BooleanAlgebra::new(atoms).map_err(|e| e.to_string())?;
        let universe = universe_up_to_rank(&alg, 1).map_err(|e| e.to_string())?;
        let labels: Vec<String> = universe.ids().map(|x| universe.label(x).to_string()).collect();
        let corpus = sentence_corpus(&labels, 3, 150, seed);
        let mut ctx = ValuationContext::new(&universe);
        let values = corpus.iter().map(|f| ctx.val_sentence(f)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        for uf in alg.ultrafilters() {
            let q = build_quotient(&universe, &uf).map_err(|e| e.to_string())?;
            for (f, v) in corpus.iter().zip(&values) {
                if q.truth(f).map_err(|e| e.to_string())? != uf.contains(*v) {
                    return Err(format!("{f} at a{}", uf.generator_atom()));
                }
            }
        }
    }
    Ok(())
}

fn check_equality_laws(_seed: u64) -> Result<(), String> {
    for atoms in 1..=2 {
        let alg = BooleanAlgebra::new(atoms).map_err(|e| e.to_string())?;
        let universe = universe_up_to_rank(&alg, 1).map_err(|e| e.to_string())?;
        if let Some(v) = equality_law_violation(&universe) {
            return Err(v);
        }
    }
    Ok(())
}

/// The first violated equality law over all triples of the universe.
fn equality_law_violation(universe: &NameUniverse) -> Option<String> {
    let mut ctx = ValuationContext::new(universe);
    let n = universe.len();
    let eq: Vec<Vec<_>> = (0..n).map(|x| (0..n).map(|y| ctx.val_eq(NameId(x), NameId(y)).expect("ids")).collect()).collect();
    let mem: Vec<Vec<_>> = (0..n).map(|x| (0..n).map(|y| ctx.val_mem(NameId(x), NameId(y)).expect("ids")).collect()).collect();
    let l = |i: usize| universe.label(NameId(i)).to_string();
    for x in 0..n {
        if !eq[x][x].is_one() {
            return Some(format!("reflexivity at {}", l(x)));
        }
        for y in 0..n {
            if eq[x][y] != eq[y][x] {
                return Some(format!("symmetry at {}, {}", l(x), l(y)));
            }
            for z in 0..n {
                if !(eq[x][y] & eq[y][z]).leq(eq[x][z]) {
                    return Some(format!("transitivity at {}, {}, {}", l(x), l(y), l(z)));
                }
                if !(eq[x][y] & mem[x][z]).leq(mem[y][z]) {
                    return Some(format!("left congruence at {}, {}, {}", l(x), l(y), l(z)));
                }
                if !(eq[x][y] & mem[z][x]).leq(mem[z][y]) {
                    return Some(format!("right congruence at {}, {}, {}", l(x), l(y), l(z)));
                }
            }
        }
    }
    None
}

fn check_ultrafilters(_seed: u64) -> Result<(), String> {
    for atoms in 1..=3 {
        let alg = BooleanAlgebra::new(atoms).map_err(|e| e.to_string())?;
        let mut ours: Vec<Vec<u32>> = alg
            .ultrafilters()
            .iter()
            .map(|uf| alg.elements().filter(|&x| uf.contains(x)).map(|x| x.bits()).collect())
            .collect();
        ours.sort();
        let mut brute = oracle::enumerate_ultrafilters_bruteforce(atoms).map_err(|e| e.to_string())?;
        brute.sort();
        if ours != brute {
            return Err(format!("{atoms} atoms"));
        }
    }
    Ok(())
}

/// Order preservation, incompatibility preservation and density of the
/// image, plus agreement with brute-force regular opens.
fn completion_contract_violation(c: &Completion) -> Option<String> {
    let poset = c.source();
    let n = poset.len();
    for p in 0..n {
        let ep = c.embed(p);
        if ep.is_zero() {
            return Some(format!("embed({}) = 0", poset.id(p)));
        }
        for q in 0..n {
            let eq = c.embed(q);
            if poset.le(q, p) && !eq.leq(ep) {
                return Some(format!("order not preserved at {} <= {}", poset.id(q), poset.id(p)));
            }
            if !poset.compatible(p, q) && !(ep & eq).is_zero() {
                return Some(format!("incompatibility lost at {}, {}", poset.id(p), poset.id(q)));
            }
        }
    }
    for x in c.target().elements().filter(|x| !x.is_zero()) {
        if !(0..n).any(|p| c.embed(p).leq(x)) {
            return Some(format!("image not dense below {}", c.target().format(x)));
        }
    }
    match oracle::enumerate_regular_opens(poset) {
        Ok(opens) if opens.len() == 1 << c.target().atom_count() => None,
        Ok(opens) => Some(format!("{} regular opens but {} atoms", opens.len(), c.target().atom_count())),
        Err(e) => Some(e.to_string()),
    }
}

fn check_completion(_seed: u64) -> Result<(), String> {
    for poset in oracle::poset_catalog(4) {
        let c = complete(&poset).map_err(|e| e.to_string())?;
        if let Some(v) = completion_contract_violation(&c) {
            return Err(v);
        }
    }
    Ok(())
}

fn check_genericity(_seed: u64) -> Result<(), String> {
    for poset in oracle::poset_catalog(4) {
        for members in oracle::enumerate_filters(&poset).map_err(|e| e.to_string())? {
            let meets = oracle::meets_every_dense(&poset, &members).map_err(|e| e.to_string())?;
            let has_minimal = members.iter().any(|&p| poset.is_minimal(p));
            let filter = Filter::new(&poset, Subset::from_indices(poset.len(), members.iter().copied()))
                .map_err(|e| e.to_string())?;
            let generic = poset.is_generic(&filter, Genericity::All).map_err(|e| e.to_string())?;
            if meets != has_minimal || generic != meets {
                return Err(format!("filter {members:?} of a {}-element poset", poset.len()));
            }
        }
    }
    Ok(())
}

fn check_cohen(_seed: u64) -> Result<(), String> {
    let poset = LazyCohenPoset::new(3);
    let family = poset.standard_family(4);
    for seed in 0..10 {
        let f = hit_dense_sets_lazy(&poset, &family, seed).and_then(|c| c.union()).map_err(|e| e.to_string())?;
        let distinct = (0..3).all(|a| (a + 1..3).all(|b| f.distinguishing_column(a, b).is_some()));
        if !f.is_total_on(3, 4) || !distinct {
            return Err(format!("seed {seed}: {f}"));
        }
    }
    let finite = cohen_poset_finite(2, 1).map_err(|e| e.to_string())?;
    match finite.dense_distinct(0, 1).map_err(|e| e.to_string())? {
        Density::NotDense { .. } => Ok(()),
        Density::Dense(_) => Err("distinctness reported dense in the 2x1 truncation".into()),
    }
}

fn check_collapse(_seed: u64) -> Result<(), String> {
    let sets = HfSet::all_up_to_rank(2);
    let alg = BooleanAlgebra::new(1).map_err(|e| e.to_string())?;
    let (universe, ids) = NameUniverse::of_check_names(alg.clone(), &sets).map_err(|e| e.to_string())?;
    let uf = Ultrafilter::principal(&alg, 0).expect("one atom");
    let q = build_quotient(&universe, &uf).map_err(|e| e.to_string())?;
    let collapsed = q.mostowski_collapse().map_err(|e| e.to_string())?;
    for (x, s) in ids.iter().zip(&sets) {
        if &collapsed[q.class_of(*x)] != s {
            return Err(format!("{} collapses to {}", s, collapsed[q.class_of(*x)]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("forcing-lab").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_prints_canonical_form() {
        let (code, out, _) = run_str(&["parse", "forall x . x = x"]);
        assert_eq!(code, 0);
        assert!(out.contains("formula: forall x . x = x"));
        assert!(out.contains("ast: (forall x (eq (var x) (var x)))"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["parse", "x in"]).0, 1);
        assert_eq!(run_str(&["nonsense"]).0, 2);
        assert_eq!(run_str(&["parse"]).0, 2);
        assert_eq!(run_str(&["ultra"]).0, 2);
        assert_eq!(run_str(&["ultra", "--atoms", "2", "--complete-poset", "x"]).0, 2);
        assert_eq!(run_str(&["ultra", "--atoms", "0"]).0, 1);
    }

    #[test]
    fn family_spec() {
        assert_eq!(parse_family("points", 1, 2).unwrap(), vec![FamilyItem::Point(0, 0), FamilyItem::Point(0, 1)]);
        assert_eq!(
            parse_family("distinct+point:r1:3", 3, 1).unwrap(),
            vec![
                FamilyItem::Distinct(0, 1),
                FamilyItem::Distinct(0, 2),
                FamilyItem::Distinct(1, 2),
                FamilyItem::Point(1, 3)
            ]
        );
        assert!(parse_family("dense", 1, 1).is_err());
    }

    #[test]
    fn records_mode() {
        let (code, out, _) = run_str(&["--format", "records", "ultra", "--atoms", "2", "--oracle-check"]);
        assert_eq!(code, 0);
        assert!(out.lines().all(|l| l.split('\t').count() == 2));
        assert!(out.contains("atoms\t2"));
    }

    #[test]
    fn selfcheck_passes() {
        let (code, out, err) = run_str(&["selfcheck"]);
        assert_eq!(code, 0, "{out}{err}");
        assert_eq!(out.matches("PASS").count(), 8);
    }
}
