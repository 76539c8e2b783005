use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levin_core::discrepancy::{
    extreme_discrepancy_scaled, growth_csv, growth_table, star_discrepancy_scaled, DiscrepancyError,
    DEFAULT_POINT_BUDGET,
};
use levin_core::levin::{champernowne_points, van_der_corput_points, LevinError, MAX_PRECISION};
use levin_core::lowerbound::{
    closed_form_accounting, construct, default_params, reduced_params, total_surplus_bound, ChainPolicy,
    ConstructOptions, ConstructionError, ConstructionParams, GammaRoute,
};
use levin_core::pascal::{PascalError, D_MATRIX_MAX_M};
use levin_core::verify::{self, SweepSummary};
use levin_core::{LevinNumber, PointSet, Rational};
use num_traits::ToPrimitive;

#[derive(Parser, Debug)]
#[command(name = "levin", version, about = "Digits, discrepancy and interval constructions for Levin's normal number")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Largest number of points any step may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_BUDGET)]
    budget_points: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    /// JSON
    #[value(alias = "structured")]
    Json,
    /// Indented key-value text
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Levin,
    VanDerCorput,
    Champernowne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Strict,
    FirstRegularCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Solve,
    Xi,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma7,
    Corollary1,
    Prop1,
    Schmidt,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Raw digit dump: 8-byte little-endian count, then bits packed 8 per byte.
    Digits {
        /// First digit position (1-based).
        #[arg(long, default_value_t = 1)]
        start: u128,
        #[arg(long)]
        count: u64,
    },
    /// Truncations of {2^n α}.
    Point {
        #[arg(long)]
        n: u128,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 16)]
        precision: u32,
    },
    /// Exact star and extreme discrepancy of the first N points.
    Discrepancy {
        #[arg(long)]
        n_max: u64,
        /// Defaults to ⌈log2 N⌉ + 4.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = Source::Levin)]
        source: Source,
    },
    /// N·D_N for N = 2^j, n_min <= N <= n_max, with certified enclosures.
    Growth {
        #[arg(long, default_value_t = 1 << 20)]
        n_max: u64,
        #[arg(long, default_value_t = 1 << 10)]
        n_min: u64,
    },
    /// Exhaustive identity sweeps; defaults cover the full acceptance domains.
    Verify {
        #[arg(value_enum)]
        identity: Identity,
        #[command(flatten)]
        domain: Domain,
    },
    /// Interval-chain construction report.
    Construct {
        #[arg(long)]
        m: u32,
        /// Last level; with --w0 and --step selects reduced widths.
        #[arg(long = "M")]
        last_level: Option<u32>,
        #[arg(long)]
        w0: Option<u32>,
        #[arg(long, default_value_t = 8)]
        step: u32,
        #[arg(long, value_enum, default_value_t = Policy::Strict)]
        policy: Policy,
        #[arg(long, value_enum, default_value_t = Route::Solve)]
        route: Route,
    },
    /// Surplus bound and closed-form ledger at default widths.
    Surplus {
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = Route::Xi)]
        route: Route,
    },
}

#[derive(Args, Debug)]
struct Domain {
    /// Largest block or scale (default depends on the identity).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 32)]
    max_t: u64,
    #[arg(long, default_value_t = 64)]
    max_kl: u64,
    #[arg(long, default_value_t = 256)]
    max_i: u64,
    #[arg(long, default_value_t = 256)]
    max_u: u64,
    #[arg(long, default_value_t = 4096)]
    rows: u64,
    #[arg(long, default_value_t = 16)]
    groups: usize,
    /// γ = c / 2^resolution for the block-count sweep.
    #[arg(long, default_value_t = 10)]
    gamma_resolution: u32,
    /// M for the pigeonhole search.
    #[arg(long, default_value_t = 1 << 16)]
    n_max: u64,
    #[arg(long, default_value_t = 20)]
    precision: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<DiscrepancyError> for CliError {
    fn from(e: DiscrepancyError) -> Self {
        match e {
            DiscrepancyError::BudgetExceeded { needed, budget } => budget_error(needed.to_string(), budget),
            DiscrepancyError::Precondition(msg) => CliError::Usage(msg),
            DiscrepancyError::ResolutionExceedsPrecision { .. } | DiscrepancyError::Levin(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<LevinError> for CliError {
    fn from(e: LevinError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PascalError> for CliError {
    fn from(e: PascalError) -> Self {
        match e {
            PascalError::InvalidCoords { .. } | PascalError::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::BudgetExceeded { needed, budget } => budget_error(needed.to_string(), budget),
            ConstructionError::InvalidParams(msg) => CliError::Usage(msg),
            ConstructionError::Discrepancy(d) => d.into(),
            ConstructionError::Levin(l) => l.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn budget_error(needed: String, budget: u64) -> CliError {
    CliError::Usage(format!("--budget-points: needs {needed} points, limit is {budget}"))
}

fn range_check<T: PartialOrd + std::fmt::Display>(flag: &str, value: T, lo: T, hi: T) -> Result<T, CliError> {
    if value < lo || value > hi {
        return Err(CliError::Usage(format!("--{flag} must lie in {lo}..={hi}, got {value}")));
    }
    Ok(value)
}

fn within_budget(needed: u128, budget: u64) -> Result<(), CliError> {
    if needed > budget as u128 {
        return Err(budget_error(needed.to_string(), budget));
    }
    Ok(())
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(bytes)?;
                f.flush()?;
            }
            None => io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let Common {
        out,
        format,
        budget_points: budget,
    } = cli.common;
    if budget == 0 {
        return Err(CliError::Usage("--budget-points must be positive".into()));
    }
    let out = Output { path: out };
    match cli.command {
        Command::Digits { start, count } => digits(&out, start, count, budget),
        Command::Point { n, count, precision } => point(&out, n, count, precision, format, budget),
        Command::Discrepancy {
            n_max,
            precision,
            source,
        } => discrepancy(&out, n_max, precision, source, format, budget),
        Command::Growth { n_max, n_min } => growth(&out, n_min, n_max, format, budget),
        Command::Verify { identity, domain } => verify_cmd(&out, identity, &domain, format, budget),
        Command::Construct {
            m,
            last_level,
            w0,
            step,
            policy,
            route,
        } => construct_cmd(&out, m, last_level, w0, step, policy, route, format, budget),
        Command::Surplus { m, route } => surplus(&out, m, route, format),
    }
}

fn digits(out: &Output, start: u128, count: u64, budget: u64) -> Result<(), CliError> {
    if start == 0 {
        return Err(CliError::Usage("--start must be at least 1".into()));
    }
    within_budget(count as u128, budget)?;
    let levin = LevinNumber::new();
    if count > 0 && start + count as u128 - 1 > levin.digit_limit() {
        return Err(CliError::Usage(format!(
            "--count: digits end at {}, past the last generated position {}",
            start + count as u128 - 1,
            levin.digit_limit()
        )));
    }
    let mut bytes = Vec::with_capacity(8 + count.div_ceil(8) as usize);
    bytes.extend_from_slice(&count.to_le_bytes());
    levin.write_packed_digits(&mut bytes, start, count)?;
    out.write(&bytes)
}

fn point(out: &Output, n: u128, count: u64, precision: u32, format: Option<Format>, budget: u64) -> Result<(), CliError> {
    range_check("precision", precision, 1, MAX_PRECISION)?;
    within_budget(count as u128, budget)?;
    let levin = LevinNumber::new();
    let mut rows = Vec::with_capacity(count as usize);
    levin.for_each_point(n, count, precision, |i, x| rows.push((n + i as u128, x)))?;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => {
            let mut s = String::from("n,numerator,precision\n");
            for (i, x) in rows {
                s.push_str(&format!("{i},{x},{precision}\n"));
            }
            s
        }
        Format::Json => {
            let points: Vec<_> = rows
                .into_iter()
                .map(|(i, x)| serde_json::json!({ "n": i.to_string(), "numerator": x }))
                .collect();
            json_doc(serde_json::json!({ "command": "point", "precision": precision, "points": points }))
        }
    };
    out.write(text.as_bytes())
}

fn rational_json(r: &Rational) -> serde_json::Value {
    serde_json::json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

fn json_doc(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json serializes");
    s.push('\n');
    s
}

fn discrepancy(
    out: &Output,
    n: u64,
    precision: Option<u32>,
    source: Source,
    format: Option<Format>,
    budget: u64,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n-max must be positive".into()));
    }
    within_budget(n as u128, budget)?;
    let precision = range_check(
        "precision",
        precision.unwrap_or_else(|| levin_core::discrepancy::growth_precision(n)),
        1,
        62,
    )?;
    let set: PointSet = match source {
        Source::Levin => LevinNumber::new().points(0, n, precision)?,
        Source::VanDerCorput => van_der_corput_points(n, precision)?,
        Source::Champernowne => champernowne_points(1, n, precision)?,
    };
    let star: Rational = star_discrepancy_scaled(&set)?.value();
    let extreme: Rational = extreme_discrepancy_scaled(&set)?.value();
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => format!(
            "N,precision,star_num,star_den,extreme_num,extreme_den,star,extreme\n{n},{precision},{},{},{},{},{:.9},{:.9}\n",
            star.numer(),
            star.denom(),
            extreme.numer(),
            extreme.denom(),
            star.to_f64().unwrap_or(f64::NAN),
            extreme.to_f64().unwrap_or(f64::NAN)
        ),
        Format::Json => json_doc(serde_json::json!({
            "command": "discrepancy",
            "source": format!("{source:?}"),
            "N": n,
            "precision": precision,
            "star": rational_json(&star),
            "extreme": rational_json(&extreme),
        })),
    };
    out.write(text.as_bytes())
}

fn growth(out: &Output, n_min: u64, n_max: u64, format: Option<Format>, budget: u64) -> Result<(), CliError> {
    if n_min < 2 || n_min > n_max {
        return Err(CliError::Usage(format!(
            "--n-min must lie in 2..=n-max ({n_max}), got {n_min}"
        )));
    }
    within_budget(n_max as u128, budget)?;
    let mut ns = Vec::new();
    let mut n = n_min.next_power_of_two();
    while n <= n_max {
        ns.push(n);
        n *= 2;
    }
    let levin = LevinNumber::new();
    let rows = growth_table::<Rational>(&levin, &ns)?;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => growth_csv(&rows, true),
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "N": r.n,
                        "precision": r.precision,
                        "ND_N": rational_json(&r.nd),
                        "ND_N_lower": rational_json(&r.nd_lower),
                        "ND_N_upper": rational_json(&r.nd_upper),
                        "log2N_sq": r.log2_n_sq,
                        "ratio": r.ratio,
                    })
                })
                .collect();
            json_doc(serde_json::json!({ "command": "growth", "n_min": n_min, "n_max": n_max, "rows": rows }))
        }
    };
    out.write(text.as_bytes())
}

fn verify_cmd(out: &Output, identity: Identity, d: &Domain, format: Option<Format>, budget: u64) -> Result<(), CliError> {
    let summary: SweepSummary = match identity {
        Identity::Lemma1 => {
            let m = range_check("m", d.m.unwrap_or(4), 1, 5)?;
            range_check("gamma-resolution", d.gamma_resolution, 1, 24)?;
            within_budget(levin_core::levin::block_len(m).try_into().unwrap_or(u128::MAX), budget)?;
            verify::lemma1(&LevinNumber::new(), m, d.gamma_resolution, budget)?
        }
        Identity::Lemma2 => {
            let m = range_check("m", d.m.unwrap_or(4), 1, 5)?;
            let needed: u128 = levin_core::levin::block_len(m).try_into().unwrap_or(u128::MAX);
            within_budget(needed << m, budget)?;
            verify::lemma2(&LevinNumber::new(), m, budget)?
        }
        Identity::Lemma3 => verify::lemma3(d.max_i, d.max_u),
        Identity::Lemma4 => {
            let m = range_check("m", d.m.unwrap_or(D_MATRIX_MAX_M), 8, D_MATRIX_MAX_M)?;
            verify::lemma4(8..=m)?
        }
        Identity::Lemma5 => {
            range_check("groups", d.groups, 1, 64)?;
            verify::lemma5(d.rows, d.groups)
        }
        Identity::Lemma6 => {
            let m = range_check("m", d.m.unwrap_or(6), 1, 8)?;
            let rank = verify::regularity(m)?;
            let identities = verify::lemma6(m)?;
            SweepSummary {
                name: "lemma6".into(),
                checked: rank.checked + identities.checked,
                failures: rank.failures + identities.failures,
                first_failure: rank.first_failure.or(identities.first_failure),
            }
        }
        Identity::Lemma7 => verify::lemma7(d.max_t, d.max_kl),
        Identity::Corollary1 => verify::corollary1(d.max_t, d.max_kl)?,
        Identity::Prop1 => {
            let m = range_check("m", d.m.unwrap_or(6), 1, 8)?;
            verify::prop1(m)?
        }
        Identity::Schmidt => {
            let precision = range_check("precision", d.precision, 1, 62)?;
            range_check("n-max", d.n_max, 16, 1 << 24)?;
            within_budget((d.n_max as u128) * 2, budget)?;
            verify::schmidt(&LevinNumber::new(), d.n_max, precision)?.0
        }
    };
    let line = format!("identities checked: {}, failures: {}\n", summary.checked, summary.failures);
    match (&out.path, format) {
        (Some(_), Some(Format::Json)) | (Some(_), None) => out.write(json_doc(serde_json::to_value(&summary).expect("serializes")).as_bytes())?,
        (Some(_), Some(_)) => out.write(line.as_bytes())?,
        (None, Some(Format::Json)) => out.write(json_doc(serde_json::to_value(&summary).expect("serializes")).as_bytes())?,
        (None, _) => {}
    }
    print!("{line}");
    match summary.first_failure {
        None => Ok(()),
        Some(first) => Err(CliError::Failed(format!(
            "{} of {} checks failed, first: {first}",
            summary.failures, summary.checked
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn construct_cmd(
    out: &Output,
    m: u32,
    last_level: Option<u32>,
    w0: Option<u32>,
    step: u32,
    policy: Policy,
    route: Route,
    format: Option<Format>,
    budget: u64,
) -> Result<(), CliError> {
    let params: ConstructionParams = match (last_level, w0) {
        (Some(l), Some(w0)) => reduced_params(m, l, w0, step)?,
        (None, None) => default_params(m)?,
        _ => return Err(CliError::Usage("--M and --w0 go together".into())),
    };
    let max_block = LevinNumber::new().max_block();
    if !params.is_default_scale() {
        range_check("m", m, 1, max_block)?;
        within_budget(params.total_points().try_into().unwrap_or(u128::MAX), budget)?;
    } else if m > 20 {
        return Err(CliError::Usage(format!("--m must lie in 7..=20 at default widths, got {m}")));
    }
    let options = ConstructOptions {
        policy: match policy {
            Policy::Strict => ChainPolicy::Strict,
            Policy::FirstRegularCell => ChainPolicy::FirstRegularCell,
        },
        budget,
        route: core_route(route),
    };
    let levin = LevinNumber::new();
    let report = construct(&levin, &params, options)?;
    let text = match format.unwrap_or(Format::Text) {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
        Format::Csv => return Err(CliError::Usage("--format csv is not available for construct".into())),
    };
    out.write(text.as_bytes())?;

    let mut failed = Vec::new();
    if let Some(why) = &report.strict_chain_error {
        failed.push(format!("strict anchor: {why}"));
    }
    if let Some(chain) = &report.chain {
        let c = &chain.checks;
        for (name, ok) in [
            ("piece lengths", c.piece_lengths),
            ("boundary matching", c.boundaries_match),
            ("even U", c.all_u_even),
            ("J inside Z", c.contained_in_z),
            ("J avoids exceptional cells", c.avoids_exceptional),
            ("length bound", c.length_bound),
            ("γ confirmed by digits", c.gamma_confirmed),
        ] {
            if !ok {
                failed.push(name.to_string());
            }
        }
    }
    for b in report.block_inequalities.iter().filter(|b| !b.holds) {
        failed.push(format!("block inequality at level {}", b.level));
    }
    if let Some(false) = report.accounting.as_ref().and_then(|a| a.consistent) {
        failed.push("count below the guaranteed surplus".into());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("construction checks failed: {}", failed.join("; "))))
    }
}

fn core_route(route: Route) -> GammaRoute {
    match route {
        Route::Solve => GammaRoute::Solve,
        Route::Xi => GammaRoute::Xi,
        Route::ClosedForm => GammaRoute::ClosedForm,
    }
}

fn surplus(out: &Output, m: u32, route: Route, format: Option<Format>) -> Result<(), CliError> {
    range_check("m", m, 8, 30)?;
    let params = default_params(m)?;
    let enumerate = (m <= 12).then_some(core_route(route));
    let bound = total_surplus_bound(&params, enumerate)?;
    let ledger = closed_form_accounting(&params)?;
    let doc = serde_json::json!({
        "command": "surplus",
        "params": params,
        "N": params.total_points().to_string(),
        "surplus_bound": bound,
        "accounting": ledger,
    });
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => json_doc(doc),
        Format::Text | Format::Csv => {
            let mut s = String::new();
            let links = [
                ("a_sum", bound.a_sum.map(|v| v.to_string()).unwrap_or_else(|| "not enumerated".into())),
                ("eight_ones", bound.eight_ones.to_string()),
                ("target", bound.target.to_string()),
                ("proviso", bound.proviso.to_string()),
                (
                    "a_sum_covers_ones",
                    bound.a_sum_covers_ones.map(|b| b.to_string()).unwrap_or_else(|| "not enumerated".into()),
                ),
                ("ones_cover_target", bound.ones_cover_target.to_string()),
            ];
            for (k, v) in links {
                s.push_str(&format!("{k}: {v}\n"));
            }
            s
        }
    };
    out.write(text.as_bytes())?;
    if bound.a_sum_covers_ones == Some(false) {
        return Err(CliError::Failed("Σ𝒜(l) < 8·ones(D_m)".into()));
    }
    if bound.proviso && !bound.ones_cover_target {
        return Err(CliError::Failed("8·ones(D_m) below 2^{2m}·217/2^15 although the proviso holds".into()));
    }
    Ok(())
}
