use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde_json::{json, Map, Value};

use tautodensity::asympt::{self, AsymptError, YSeries};
use tautodensity::count::{self, CountError};
use tautodensity::exact::{self, ExactError};
use tautodensity::logic::{self, Cat, CategoryClassifier, Strength};
use tautodensity::numeric::{decimal_trunc, digits_for};
use tautodensity::quad::{self, QuadError};
use tautodensity::systems;
use tautodensity::verify::{self, Level};

/// Limit densities of tautologies in implicational logic with negation.
#[derive(Parser, Debug)]
#[command(name = "tautodensity", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, default_value_t = 256, env = "TAUTODENSITY_PRECISION")]
    precision: u32,
    /// Stopping tolerance for iterations.
    #[arg(long, global = true, default_value = "1e-30", env = "TAUTODENSITY_TOLERANCE")]
    tolerance: String,
    #[arg(long, global = true, default_value_t = 1_000_000, env = "TAUTODENSITY_MAX_ITERATIONS")]
    max_iterations: usize,
    /// Directory holding coefficient tables, one file per variable count.
    #[arg(long, global = true, env = "TAUTODENSITY_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table, env = "TAUTODENSITY_FORMAT")]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    S1,
    S12,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact limit densities of every falsity class.
    Density {
        #[arg(long)]
        vars: u32,
        /// Report every class, not only tautologies and antilogies.
        #[arg(long)]
        all_classes: bool,
    },
    /// Exact per-class counts of formulae by length.
    Count {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        max_len: usize,
        /// Falsity-set bitmask of a single class to report.
        #[arg(long)]
        class: Option<u64>,
    },
    /// Cut approximation of depth s.
    Scut {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        s: usize,
        /// `falsity`, or one of the category systems (sc, s1, strong, weak, combined).
        #[arg(long, default_value = "falsity")]
        system: String,
        #[arg(long)]
        all_classes: bool,
    },
    /// Asymptotic expansions in m^(-1/2).
    Asympt {
        /// A system (strong, weak, combined), a member such as combined-T, s1, sc, or bounds.
        #[arg(long)]
        target: String,
        /// Highest power of m^(-1/2) kept.
        #[arg(long, default_value_t = 4)]
        order: i32,
        /// Instantiate at these variable counts.
        #[arg(long, value_delimiter = ',')]
        at: Vec<u32>,
        /// Values at the singularity instead of ratios (systems only).
        #[arg(long)]
        values: bool,
    },
    /// Falsity class, simple kinds and categories of one formula.
    Classify {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        vars: u32,
        #[arg(long, value_enum, default_value_t = Basis::S1)]
        basis: Basis,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(value_enum)]
        level: VerifyLevel,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Resource(String),
    Verify(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Resource(_) => 2,
            Failure::Verify(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(s) | Failure::Resource(s) | Failure::Verify(s) | Failure::Numeric(s) => s,
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Resource(_) | CountError::Io(_) | CountError::CacheFormat(_) => Failure::Resource(e.to_string()),
            CountError::Unsupported(_) | CountError::OutOfRange { .. } | CountError::ZeroDenominator(_) => {
                Failure::Usage(e.to_string())
            }
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::VarsOutOfRange(m) if m > exact::MAX_EXACT_VARS => Failure::Resource(e.to_string()),
            ExactError::VarsOutOfRange(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Count(_) => Failure::Resource(e.to_string()),
            QuadError::Depth { .. } | QuadError::Dimension { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<AsymptError> for Failure {
    fn from(e: AsymptError) -> Self {
        match e {
            AsymptError::UnknownTarget(_) | AsymptError::Order { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// One result in three shapes; CSV rows are `m,class,n_or_s,method,value`.
#[derive(Default)]
struct Report {
    text: String,
    json: Value,
    rows: Vec<[String; 5]>,
}

impl Report {
    fn row(&mut self, m: impl ToString, class: impl ToString, n_or_s: impl ToString, method: &str, value: impl ToString) {
        self.rows.push([m.to_string(), class.to_string(), n_or_s.to_string(), method.to_string(), value.to_string()]);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.text.clone(),
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).unwrap()),
            Format::Csv => {
                let mut out = String::from("m,class,n_or_s,method,value\n");
                for r in &self.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                out
            }
        }
    }
}

struct Ctx {
    prec: u32,
    digits: usize,
    tol: Float,
    max_it: usize,
    cache: Option<PathBuf>,
}

impl Ctx {
    fn new(g: &Global) -> Result<Ctx, Failure> {
        if g.precision < 64 {
            return Err(Failure::Usage(format!("precision {} below 64 bits", g.precision)));
        }
        let tol = Float::parse(&g.tolerance)
            .map(|p| Float::with_val(g.precision, p))
            .map_err(|e| Failure::Usage(format!("tolerance {:?}: {e}", g.tolerance)))?;
        if !(tol > 0) {
            return Err(Failure::Usage("tolerance must be positive".into()));
        }
        if g.max_iterations == 0 {
            return Err(Failure::Usage("max-iterations must be positive".into()));
        }
        if let Some(dir) = &g.cache {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Resource(format!("cache {}: {e}", dir.display())))?;
        }
        Ok(Ctx { prec: g.precision, digits: digits_for(g.precision), tol, max_it: g.max_iterations, cache: g.cache.clone() })
    }

    fn dec(&self, x: &Float) -> String {
        decimal_trunc(x, self.digits)
    }

    fn cache_file(&self, m: u32) -> Option<PathBuf> {
        self.cache.as_deref().map(|d| count::cache_path(d, m))
    }

    fn table(&self, m: u32, n: usize) -> Result<count::CoeffTable, Failure> {
        let path = self.cache_file(m);
        Ok(count::class_coefficients_cached(m, n, path.as_deref())?)
    }
}

fn check_vars(m: u32) -> Result<(), Failure> {
    if m == 0 {
        return Err(Failure::Usage("--vars must be at least 1".into()));
    }
    Ok(())
}

fn class_keys(m: u32, all: bool) -> Vec<u64> {
    let full = logic::full_mask(m);
    if all {
        (0..=full).collect()
    } else {
        vec![0, full]
    }
}

fn class_name(c: u64, m: u32) -> String {
    if c == 0 {
        "taut".into()
    } else if c == logic::full_mask(m) {
        "anti".into()
    } else {
        format!("{c:#x}")
    }
}

fn cmd_density(ctx: &Ctx, m: u32, all: bool) -> Result<Report, Failure> {
    check_vars(m)?;
    let t = exact::solve_alpha_beta(m, ctx.prec)?;
    let dens = t.all_densities();
    let mut r = Report { json: t.to_json(all), ..Default::default() };
    writeln!(r.text, "m = {m}, {} bits", ctx.prec).unwrap();
    for c in class_keys(m, all) {
        let v = ctx.dec(&dens[c as usize]);
        writeln!(r.text, "  {:>6}  {v}", class_name(c, m)).unwrap();
        r.row(m, c, "", "exact", v);
    }
    for f in &t.flags {
        writeln!(r.text, "  note: {f}").unwrap();
    }
    Ok(r)
}

fn cmd_count(ctx: &Ctx, m: u32, n_max: usize, class: Option<u64>) -> Result<Report, Failure> {
    check_vars(m)?;
    if n_max == 0 {
        return Err(Failure::Usage("--max-len must be at least 1".into()));
    }
    if let Some(c) = class {
        if c > logic::full_mask(m) {
            return Err(Failure::Usage(format!("class {c:#x} outside 0..={:#x}", logic::full_mask(m))));
        }
    }
    let t = ctx.table(m, n_max)?;
    let totals = t.totals();
    let keys = match class {
        Some(c) => vec![c],
        None => class_keys(m, false),
    };
    let mut r = Report::default();
    write!(r.text, "{:>5}  {:>24}", "n", "all").unwrap();
    for &c in &keys {
        write!(r.text, "  {:>24}  {:>14}", class_name(c, m), "ratio").unwrap();
    }
    r.text.push('\n');
    let mut jrows = Vec::new();
    for n in 1..=n_max {
        write!(r.text, "{n:>5}  {:>24}", totals[n].to_string()).unwrap();
        r.row(m, "all", n, "count", &totals[n]);
        let mut jc = Map::new();
        for &c in &keys {
            let cnt = &t.counts[c as usize][n];
            let ratio = ctx.dec(&count::ratio_at(&t, c, n, ctx.prec)?);
            write!(r.text, "  {:>24}  {:>14}", cnt.to_string(), &ratio[..ratio.len().min(14)]).unwrap();
            r.row(m, c, n, "count", cnt);
            r.row(m, c, n, "ratio", &ratio);
            jc.insert(c.to_string(), json!({ "count": cnt.to_string(), "ratio": ratio }));
        }
        r.text.push('\n');
        jrows.push(json!({ "n": n, "total": totals[n].to_string(), "classes": jc }));
    }
    r.json = json!({ "m": m, "max_len": n_max, "rows": jrows });
    Ok(r)
}

fn cmd_scut(ctx: &Ctx, m: u32, s: usize, system: &str, all: bool) -> Result<Report, Failure> {
    check_vars(m)?;
    if s == 0 {
        return Err(Failure::Usage("--s must be at least 1".into()));
    }
    let (sys, cfg, keys): (quad::QuadSystem, quad::CutConfig, Vec<usize>) = if system == "falsity" {
        let t = ctx.table(m, s)?;
        let sys = quad::build_falsity_system(m, &t, ctx.prec)?;
        let start = logic::var_mask(0, m).0 as usize;
        let cfg = quad::default_config(&sys, s, start, ctx.tol.clone(), ctx.max_it);
        let keys = class_keys(m, all).into_iter().map(|c| c as usize).collect();
        (sys, cfg, keys)
    } else {
        let spec = systems::system_by_name(system).ok_or_else(|| {
            Failure::Usage(format!("unknown system {system:?}; expected falsity or one of {:?}", systems::SYSTEM_NAMES))
        })?;
        let sys = quad::build_category_system(m, &spec, s, ctx.prec)?;
        let cfg = quad::category_config(&sys, s, ctx.tol.clone(), ctx.max_it).expect("category systems carry W");
        let keys = (0..sys.len()).collect();
        (sys, cfg, keys)
    };
    let res = quad::shifted_iterate(&sys, &cfg)?;
    // Coefficient ratios at length s, against all formulae of that length.
    let total_s: Float = match sys.base_member {
        Some(w) => sys.trunc[w][s].clone(),
        None => Float::with_val(ctx.prec, Float::sum(sys.trunc.iter().map(|row| &row[s]))),
    };
    let mut r = Report::default();
    let mut j = quad::report_json(&sys, s, &res);
    let mut ratios = Map::new();
    writeln!(r.text, "system {}, m = {m}, s = {s}", sys.name).unwrap();
    writeln!(
        r.text,
        "  iterations {}  converged {}  residual {:e}  zeta_s {}",
        res.iterations,
        res.converged,
        res.residual.to_f64(),
        decimal_trunc(&res.zeta, 12)
    )
    .unwrap();
    writeln!(r.text, "  {:>8}  {:>24}  {:>24}", "member", "cut", "ratio at s").unwrap();
    for i in keys {
        let name = if system == "falsity" { class_name(i as u64, m) } else { sys.names[i].clone() };
        let cut = ctx.dec(&res.x[i]);
        let ratio = if total_s.is_zero() { "NaN".into() } else { ctx.dec(&Float::with_val(ctx.prec, &sys.trunc[i][s] / &total_s)) };
        writeln!(r.text, "  {name:>8}  {:>24}  {:>24}", &cut[..cut.len().min(24)], &ratio[..ratio.len().min(24)]).unwrap();
        let class = if system == "falsity" { i.to_string() } else { sys.names[i].clone() };
        r.row(m, &class, s, "cut", &cut);
        r.row(m, &class, s, "ratio", &ratio);
        ratios.insert(sys.names[i].clone(), json!(ratio));
    }
    j["ratio_at_s"] = Value::Object(ratios);
    j["m"] = json!(m);
    r.json = j;
    if !res.converged {
        print!("{}", r.render(Format::Table));
        return Err(Failure::Numeric(format!("no convergence within {} iterations", ctx.max_it)));
    }
    Ok(r)
}

fn series_block(r: &mut Report, ctx: &Ctx, name: &str, order: i32, s: &YSeries, at: &[u32]) -> Value {
    writeln!(r.text, "  {name:>10} = {}", s.render_m()).unwrap();
    r.row("", name, order, "series", s.render_m());
    let mut inst = Vec::new();
    for &m in at {
        let v = s.eval_at_m(&Float::with_val(ctx.prec, m));
        let d = ctx.dec(&v);
        writeln!(r.text, "  {:>10}   at m = {m}: {}", "", &d[..d.len().min(30)]).unwrap();
        r.row(m, name, order, "series", &d);
        inst.push(json!({ "m": m, "value": d }));
    }
    let mut j = s.to_json();
    j["text"] = json!(s.render_m());
    j["at"] = Value::Array(inst);
    j
}

fn cmd_asympt(ctx: &Ctx, target: &str, order: i32, at: &[u32], values: bool) -> Result<Report, Failure> {
    if order < 0 {
        return Err(Failure::Usage("--order must be non-negative".into()));
    }
    if at.contains(&0) {
        return Err(Failure::Usage("--at values must be at least 1".into()));
    }
    let mut r = Report::default();
    if target == "bounds" {
        let b = asympt::bounds_report(order)?;
        writeln!(r.text, "tautology density bounds through m^-{order}/2").unwrap();
        let lo = series_block(&mut r, ctx, "lower", order, &b.lower, at);
        let up = series_block(&mut r, ctx, "upper", order, &b.upper, at);
        r.json = json!({ "target": target, "order": order, "lower": lo, "upper": up });
        return Ok(r);
    }
    let kind = if values { "values" } else { "ratios" };
    let series = match systems::system_by_name(target) {
        Some(spec) if values => asympt::system_values(&spec, order)?,
        Some(spec) => asympt::system_ratios(&spec, order)?,
        None if values => return Err(Failure::Usage("--values needs a system target".into())),
        None => std::iter::once((target.to_string(), asympt::ratio_series(target, order)?)).collect(),
    };
    writeln!(r.text, "{target} {kind} through m^-{order}/2").unwrap();
    let mut j = Map::new();
    for (name, s) in &series {
        j.insert(name.clone(), series_block(&mut r, ctx, name, order, s, at));
    }
    r.json = json!({ "target": target, "order": order, "kind": kind, "series": j });
    Ok(r)
}

fn cat_str(c: Cat) -> &'static str {
    match c {
        Cat::T => "T",
        Cat::U => "U",
        Cat::A => "A",
    }
}

fn cmd_classify(m: u32, text: &str, basis: Basis) -> Result<Report, Failure> {
    check_vars(m)?;
    let f = logic::parse_formula(text, m).map_err(|e| Failure::Usage(e.to_string()))?;
    let mask = f.falsity_mask(m).0;
    let kinds = logic::classify_simple(&f);
    let stats = logic::norm_stats(&f);
    let ty = logic::type_of(&f);
    let family: fn(&logic::Formula) -> bool = match basis {
        Basis::S1 => logic::is_simple_first,
        Basis::S12 => logic::is_simple,
    };
    let mut cats = Map::new();
    let mut r = Report::default();
    writeln!(r.text, "formula     {}", logic::render_formula(&f)).unwrap();
    writeln!(r.text, "falsity     {mask:#x}  (tautology {}, antilogy {})", mask == 0, mask == logic::full_mask(m)).unwrap();
    writeln!(
        r.text,
        "simple      first {}  strict first {}  second {}",
        kinds.first, kinds.strict_first, kinds.second
    )
    .unwrap();
    for (label, strength) in [("strong", Strength::Strong), ("weak", Strength::Weak)] {
        let mut c = CategoryClassifier::new(family, strength);
        let cat = c.classify(&f);
        let basic = c.is_basic(&f);
        writeln!(r.text, "{label:<11} {}  (basic {basic})", cat_str(cat)).unwrap();
        cats.insert(label.into(), json!({ "category": cat_str(cat), "basic": basic }));
        r.row(m, mask, stats.length, label, cat_str(cat));
    }
    writeln!(r.text, "type        {}", logic::render_formula(&ty)).unwrap();
    writeln!(
        r.text,
        "|phi|       {}  (length {}, distinct vars {}, repeats {}, negations {})",
        stats.norm, stats.length, stats.distinct_vars, stats.repeats, stats.negations
    )
    .unwrap();
    r.row(m, mask, stats.length, "falsity", mask);
    r.json = json!({
        "formula": logic::render_formula(&f),
        "m": m,
        "falsity_mask": mask,
        "tautology": mask == 0,
        "antilogy": mask == logic::full_mask(m),
        "simple": { "first": kinds.first, "strict_first": kinds.strict_first, "second": kinds.second },
        "basis": format!("{basis:?}").to_lowercase(),
        "categories": cats,
        "type": logic::render_formula(&ty),
        "norm": stats.norm.to_string(),
        "length": stats.length,
        "distinct_vars": stats.distinct_vars,
        "repeats": stats.repeats,
        "negations": stats.negations,
    });
    Ok(r)
}

/// Exits 3 on any failure other than the documented discrepancies, which are still
/// reported as FAIL.
fn cmd_verify(level: VerifyLevel, cache: Option<&Path>) -> Result<Report, Failure> {
    let level = match level {
        VerifyLevel::Quick => Level::Quick,
        VerifyLevel::Full => Level::Full,
    };
    let checks = verify::run_all(level, cache);
    let mut r = Report::default();
    for c in &checks {
        writeln!(r.text, "{}", c.line()).unwrap();
        for item in c.items.iter().filter(|i| !i.pass) {
            let tag = if item.known_discrepancy { " [documented]" } else { "" };
            writeln!(r.text, "    - {}{tag}: {}", item.name, item.detail).unwrap();
        }
        r.row("", c.id, "", "verify", if c.pass() { "PASS" } else { "FAIL" });
    }
    let passed = checks.iter().filter(|c| c.pass()).count();
    writeln!(r.text, "{passed}/{} criteria passed", checks.len()).unwrap();
    r.json = json!({ "passed": passed, "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>() });
    let bad: Vec<u32> = checks.iter().filter(|c| !c.only_known_failures()).map(|c| c.id).collect();
    if !bad.is_empty() {
        return Err(Failure::Verify(format!("{}criteria failed: {bad:?}", r.render(Format::Table))));
    }
    Ok(r)
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let ctx = Ctx::new(&cli.global)?;
    match cli.cmd {
        Cmd::Density { vars, all_classes } => cmd_density(&ctx, vars, all_classes),
        Cmd::Count { vars, max_len, class } => cmd_count(&ctx, vars, max_len, class),
        Cmd::Scut { vars, s, system, all_classes } => cmd_scut(&ctx, vars, s, &system, all_classes),
        Cmd::Asympt { target, order, at, values } => cmd_asympt(&ctx, &target, order, &at, values),
        Cmd::Classify { formula, vars, basis } => cmd_classify(vars, &formula, basis),
        Cmd::Verify { level } => cmd_verify(level, ctx.cache.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let format = cli.global.format;
    match run(cli) {
        Ok(r) => {
            print!("{}", r.render(format));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
