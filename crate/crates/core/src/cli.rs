//! Command line front end.
//!
//! Commands:
//!
//! * `shift --c P/Q --f N`: translate a cone scaling parameter into a
//!   weight shift, echoing both the derived shift and the published closed
//!   form (they can differ; the difference is reported, never hidden).
//! * `ih-table --input FILE [--k N | --c P/Q]`: truncation tables with
//!   labeled summands for a bundle document, cross-checked against the
//!   mechanical page walk before printing.
//! * `signature --input FILE [--k N | --c P/Q]`: global signature of a
//!   space assembled from a simplicial interior and a bundle end.
//! * `verify SUITE [--seed N]`: run one of the verification suites
//!   (duality, oracle, parity, novikov, hodge-consistency), one report
//!   line per case.
//!
//! Output is deterministic: identical documents, flags, and seeds produce
//! byte-identical reports. `--format machine` emits one record per line
//! with a stable field order (documented in the README); the text format
//! is a readable rendering of the same records. Exit codes: 0 success,
//! 1 verification or cross-check failure, 2 input error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::Signed;
use serde::Deserialize;

use crate::assemble::{
    global_signature, novikov_check, verify_duality, verify_hodge_consistency, AssembleError,
};
use crate::cone_end::{
    block_matrix_assembly, einf_closed_form, end_signature, middle_image, tau, truncated_run,
    ConeError, EndTable, Variant,
};
use crate::corpus::sample_models;
use crate::exactlin::{parse_rat, rat, ratio, show_rat, Mat, Rat};
use crate::perversity::{hodge_shift, standard_c_grid, ShiftReport};
use crate::simplicial::{cp2_pair, product_facets, sphere_facets, SimplicialPair};
use crate::ssq::{run_to_limit, GradedRing, LimitRecord, Page, Schedule, Slot};

macro_rules! w {
    ($dst:expr, $($arg:tt)*) => {{
        use std::fmt::Write;
        let _ = writeln!($dst, $($arg)*);
    }};
}

// ---------------------------------------------------------------------------
// Document schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDocument {
    simplicial: Option<SimplicialSection>,
    bundle: Option<BundleSection>,
    parameters: Option<ParamSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplicialSection {
    /// Optional vertex count; facets are checked against it when present.
    vertices: Option<usize>,
    facets: Vec<Vec<u32>>,
    /// Optional fundamental coefficients, one per facet.
    orientation: Option<Vec<i64>>,
    /// Optional expected top boundary simplices, verified when present.
    boundary: Option<Vec<Vec<u32>>>,
}

/// Bundle data in one of two forms: named rings (`base`/`fiber`, e.g.
/// `"sphere 2"` or `"sphere 1 x proj 2"`) or a raw starting page (`b`, `f`,
/// `dims`, `product` entries, `volume`). Differentials are shared by both
/// forms.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleSection {
    base: Option<String>,
    fiber: Option<String>,
    b: Option<usize>,
    f: Option<usize>,
    /// `dims[i][j]` for base degree `i`, fiber degree `j`.
    dims: Option<Vec<Vec<usize>>>,
    /// Coordinates of the volume class in the corner slot.
    volume: Option<Vec<String>>,
    #[serde(default)]
    product: Vec<ProductEntry>,
    #[serde(default)]
    diff: Vec<DiffEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductEntry {
    p: [usize; 2],
    q: [usize; 2],
    /// Shape `dim(p+q) x dim(p)*dim(q)`, pair column index `u*dim(q)+v`.
    matrix: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffEntry {
    page: usize,
    source: [usize; 2],
    /// In page coordinates (the engine's deterministic bases).
    matrix: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamSection {
    c: Option<String>,
    k: Option<i64>,
}

// ---------------------------------------------------------------------------
// Flags
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "conesig",
    version,
    about = "Truncation tables and perverse signatures for coned boundary fibrations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate a cone scaling parameter into a weight shift.
    Shift {
        /// Scaling parameter, a rational in (0, 1], written p or p/q.
        #[arg(long)]
        c: String,
        /// Fiber dimension.
        #[arg(long)]
        f: usize,
    },
    /// Print the truncation tables of a bundle document.
    IhTable {
        #[arg(long)]
        input: PathBuf,
        /// Weight shift (mutually exclusive with --c).
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        /// Scaling parameter; the shift is derived from it.
        #[arg(long)]
        c: Option<String>,
    },
    /// Global signature of an assembled space document.
    Signature {
        #[arg(long)]
        input: PathBuf,
        /// Weight shift (mutually exclusive with --c).
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        /// Scaling parameter; the shift is derived from it.
        #[arg(long)]
        c: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Duality,
    Oracle,
    Parity,
    Novikov,
    HodgeConsistency,
}

impl Suite {
    fn name(&self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::Oracle => "oracle",
            Suite::Parity => "parity",
            Suite::Novikov => "novikov",
            Suite::HodgeConsistency => "hodge-consistency",
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

enum Failure {
    /// Exit 2: the input could not be used.
    Input(String),
    /// Exit 1: a mathematical cross-check failed on otherwise valid input.
    Check(String),
}

fn input<T: std::fmt::Display>(e: T) -> Failure {
    Failure::Input(e.to_string())
}

pub fn run() -> i32 {
    match Cli::try_parse() {
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
        Ok(cli) => {
            let (code, out, err) = execute(cli);
            print!("{out}");
            eprint!("{err}");
            code
        }
    }
}

/// Test entry point: parse `args` (without the binary name) and capture
/// (exit code, stdout, stderr) instead of printing.
pub fn run_slice(args: &[&str]) -> (i32, String, String) {
    match Cli::try_parse_from(std::iter::once("conesig").chain(args.iter().copied())) {
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                (e.exit_code(), String::new(), rendered)
            } else {
                (e.exit_code(), rendered, String::new())
            }
        }
        Ok(cli) => execute(cli),
    }
}

fn execute(cli: Cli) -> (i32, String, String) {
    let fmt = cli.format;
    let result = match cli.cmd {
        Cmd::Shift { c, f } => cmd_shift(&c, f, fmt),
        Cmd::IhTable { input, k, c } => cmd_ih_table(&input, k, c.as_deref(), fmt),
        Cmd::Signature { input, k, c } => cmd_signature(&input, k, c.as_deref(), fmt),
        Cmd::Verify { suite, seed } => return cmd_verify(suite, seed, fmt),
    };
    match result {
        Ok(out) => (0, out, String::new()),
        Err(Failure::Input(m)) => (2, String::new(), format!("error: {m}\n")),
        Err(Failure::Check(m)) => (1, String::new(), format!("check failed: {m}\n")),
    }
}

// ---------------------------------------------------------------------------
// Document construction
// ---------------------------------------------------------------------------

fn read_document(path: &Path) -> Result<InputDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_matrix(rows: &[Vec<String>], what: &str) -> Result<Mat, Failure> {
    let cols = rows.first().map(|row| row.len()).unwrap_or(0);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Failure::Input(format!(
                "{what}: row {i} has {} entries, row 0 has {cols}",
                row.len()
            )));
        }
    }
    let mut m = Mat::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            let v = parse_rat(s)
                .map_err(|e| Failure::Input(format!("{what}: row {i} col {j}: {e}")))?;
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Parses a named ring expression: factors `point`, `sphere N`, `proj N`,
/// joined by `x`.
fn parse_ring(text: &str) -> Result<GradedRing, Failure> {
    let mut ring = GradedRing::point();
    for part in text.split('x') {
        let tokens: Vec<&str> = part.split_whitespace().collect();
        let factor = match tokens.as_slice() {
            ["point"] => GradedRing::point(),
            ["sphere", n] => {
                let n: usize = n.parse().map_err(|_| bad_ring(part))?;
                if n == 0 {
                    return Err(Failure::Input(format!(
                        "ring factor {:?}: sphere dimension must be positive",
                        part.trim()
                    )));
                }
                if n > 32 {
                    return Err(ring_too_big(part));
                }
                GradedRing::sphere(n)
            }
            ["proj", m] => {
                let m: usize = m.parse().map_err(|_| bad_ring(part))?;
                if m == 0 {
                    return Err(Failure::Input(format!(
                        "ring factor {:?}: proj needs a positive exponent",
                        part.trim()
                    )));
                }
                if m > 16 {
                    return Err(ring_too_big(part));
                }
                GradedRing::proj_space(m)
            }
            _ => return Err(bad_ring(part)),
        };
        ring = GradedRing::tensor(&ring, &factor);
        if ring.top() > 32 {
            return Err(Failure::Input(
                "ring is too large: the top degree is capped at 32".into(),
            ));
        }
    }
    Ok(ring)
}

fn ring_too_big(part: &str) -> Failure {
    Failure::Input(format!(
        "ring factor {:?} is too large: the top degree is capped at 32",
        part.trim()
    ))
}

fn bad_ring(part: &str) -> Failure {
    Failure::Input(format!(
        "unknown ring factor {:?}: expected point, sphere N, or proj N, joined by x",
        part.trim()
    ))
}

fn build_record(bundle: &BundleSection) -> Result<LimitRecord, Failure> {
    let named = bundle.base.is_some() || bundle.fiber.is_some();
    let raw = bundle.b.is_some()
        || bundle.f.is_some()
        || bundle.dims.is_some()
        || bundle.volume.is_some()
        || !bundle.product.is_empty();
    let start = if named {
        if raw {
            return Err(Failure::Input(
                "bundle section mixes the named form (base/fiber) with raw grid fields".into(),
            ));
        }
        let base = parse_ring(
            bundle.base.as_deref().ok_or(Failure::Input("bundle.base is missing".into()))?,
        )?;
        let fiber = parse_ring(
            bundle.fiber.as_deref().ok_or(Failure::Input("bundle.fiber is missing".into()))?,
        )?;
        Page::product_bundle_page(&base, &fiber).map_err(input)?
    } else {
        let miss = |field: &str| Failure::Input(format!("bundle.{field} is missing"));
        let b = bundle.b.ok_or_else(|| miss("b"))?;
        let f = bundle.f.ok_or_else(|| miss("f"))?;
        let dims = bundle.dims.clone().ok_or_else(|| miss("dims"))?;
        let volume = bundle.volume.as_ref().ok_or_else(|| miss("volume"))?;
        let mut vol = Mat::zeros(volume.len(), 1);
        for (i, s) in volume.iter().enumerate() {
            let v = parse_rat(s)
                .map_err(|e| Failure::Input(format!("bundle.volume[{i}]: {e}")))?;
            vol.set(i, 0, v);
        }
        let mut mult: BTreeMap<(Slot, Slot), Mat> = BTreeMap::new();
        for (idx, p) in bundle.product.iter().enumerate() {
            let m = parse_matrix(&p.matrix, &format!("bundle.product[{idx}]"))?;
            let key = ((p.p[0], p.p[1]), (p.q[0], p.q[1]));
            if mult.insert(key, m).is_some() {
                return Err(Failure::Input(format!(
                    "bundle.product[{idx}]: duplicate entry for ({},{}) * ({},{})",
                    p.p[0], p.p[1], p.q[0], p.q[1]
                )));
            }
        }
        Page::from_raw(2, b, f, dims, mult, vol, BTreeMap::new()).map_err(input)?
    };
    let mut schedule: Schedule = BTreeMap::new();
    for (idx, d) in bundle.diff.iter().enumerate() {
        let m = parse_matrix(&d.matrix, &format!("bundle.diff[{idx}]"))?;
        let slot = (d.source[0], d.source[1]);
        if schedule.entry(d.page).or_default().insert(slot, m).is_some() {
            return Err(Failure::Input(format!(
                "bundle.diff[{idx}]: duplicate differential for page {} out of ({},{})",
                d.page, d.source[0], d.source[1]
            )));
        }
    }
    run_to_limit(&start, &schedule).map_err(input)
}

fn build_pair(s: &SimplicialSection) -> Result<SimplicialPair, Failure> {
    if let Some(n) = s.vertices {
        for (i, facet) in s.facets.iter().enumerate() {
            if let Some(&v) = facet.iter().find(|&&v| v as usize >= n) {
                return Err(Failure::Input(format!(
                    "simplicial.facets[{i}]: vertex {v} outside 0..{n}"
                )));
            }
        }
    }
    let pair = match &s.orientation {
        Some(o) => SimplicialPair::from_oriented_facets(&s.facets, o),
        None => SimplicialPair::from_facets(&s.facets),
    }
    .map_err(input)?;
    if let Some(listed) = &s.boundary {
        let mut want: Vec<Vec<u32>> = listed
            .iter()
            .map(|f| {
                let mut v = f.clone();
                v.sort_unstable();
                v
            })
            .collect();
        want.sort();
        want.dedup();
        let top = pair.dimension().saturating_sub(1);
        if want != pair.boundary_simplices(top) {
            return Err(Failure::Input(format!(
                "simplicial.boundary: listed {} top boundary simplices, derived {}",
                want.len(),
                pair.boundary_simplices(top).len()
            )));
        }
    }
    Ok(pair)
}

fn parse_c(text: &str) -> Result<Rat, Failure> {
    let c = parse_rat(text).map_err(input)?;
    if !c.is_positive() || c > rat(1) {
        return Err(Failure::Input(format!(
            "c = {} out of range: need 0 < c <= 1",
            show_rat(&c)
        )));
    }
    // Keeps the derived shift within sane bounds.
    if c < ratio(1, 1_000_000_000) {
        return Err(Failure::Input(format!(
            "c = {} is too small: need c >= 1/1000000000",
            show_rat(&c)
        )));
    }
    Ok(c)
}

struct WeightChoice {
    k: i64,
    /// Present when the weight was derived from a scaling parameter.
    report: Option<ShiftReport>,
}

fn resolve_weight(
    flag_k: Option<i64>,
    flag_c: Option<&str>,
    doc: Option<&ParamSection>,
    f: usize,
) -> Result<WeightChoice, Failure> {
    let k_opt = flag_k.or(doc.and_then(|p| p.k));
    let c_opt: Option<String> =
        flag_c.map(str::to_string).or_else(|| doc.and_then(|p| p.c.clone()));
    match (k_opt, c_opt) {
        (Some(_), Some(_)) => {
            Err(Failure::Input("both k and c were given; pick one".into()))
        }
        (Some(k), None) => Ok(WeightChoice { k, report: None }),
        (None, Some(c)) => {
            let c = parse_c(&c)?;
            let report = hodge_shift(&c, f);
            Ok(WeightChoice { k: report.normative, report: Some(report) })
        }
        (None, None) => Ok(WeightChoice { k: 0, report: None }),
    }
}

// ---------------------------------------------------------------------------
// Untrusted input entry
// ---------------------------------------------------------------------------

/// Parses and fully validates a document from text, then runs the deepest
/// computation the document supports, under size caps suitable for untrusted
/// input. Returns a one-line summary of what was built. This is the entry
/// point the fuzz targets drive: any panic reachable from here is a bug.
pub fn check_document(text: &str) -> Result<String, String> {
    if text.len() > 1 << 16 {
        return Err("document over 64 KiB".into());
    }
    let doc: InputDocument = match toml::from_str(text) {
        Ok(doc) => doc,
        Err(e) => return Err(format!("parse: {e}")),
    };
    match check_parsed(&doc) {
        Ok(s) => Ok(s),
        Err(Failure::Input(m)) => Err(format!("input: {m}")),
        Err(Failure::Check(m)) => Err(format!("check: {m}")),
    }
}

fn cone_failure(e: ConeError) -> Failure {
    match e {
        ConeError::PairingSymmetry { .. } | ConeError::CrossTerm { .. } => {
            Failure::Check(e.to_string())
        }
        other => Failure::Input(other.to_string()),
    }
}

fn check_parsed(doc: &InputDocument) -> Result<String, Failure> {
    let cap = |what: &str| Failure::Input(format!("{what} exceeds the untrusted-input cap"));
    let mut summary: Vec<String> = Vec::new();
    let pair = match &doc.simplicial {
        Some(s) => {
            if s.facets.len() > 64 {
                return Err(cap("facet count"));
            }
            if s.facets.iter().any(|f| f.len() > 8) {
                return Err(cap("facet size"));
            }
            let pair = build_pair(s)?;
            summary.push(format!(
                "complex of dimension {} with {} facets",
                pair.dimension(),
                pair.facets().len()
            ));
            Some(pair)
        }
        None => None,
    };
    let rec = match &doc.bundle {
        Some(bundle) => {
            for ring in [&bundle.base, &bundle.fiber].into_iter().flatten() {
                if ring.len() > 64 {
                    return Err(cap("ring expression"));
                }
                if parse_ring(ring)?.top() > 12 {
                    return Err(cap("named ring"));
                }
            }
            if bundle.b.unwrap_or(0) > 8 || bundle.f.unwrap_or(0) > 8 {
                return Err(cap("grid size"));
            }
            if bundle.volume.as_ref().map_or(0, Vec::len) > 16 {
                return Err(cap("volume vector"));
            }
            if bundle.product.len() > 128 || bundle.diff.len() > 64 {
                return Err(cap("bundle entry count"));
            }
            if let Some(dims) = &bundle.dims {
                let total = dims.iter().flatten().fold(0usize, |a, &d| a.saturating_add(d));
                if total > 64 {
                    return Err(cap("total dimension"));
                }
            }
            let rec = build_record(bundle)?;
            let classes: usize = rec.einf_dims.iter().flatten().sum();
            summary.push(format!(
                "bundle on a {}x{} grid with {} limit classes",
                rec.b + 1,
                rec.f + 1,
                classes
            ));
            Some(rec)
        }
        None => None,
    };
    let k = match &doc.parameters {
        Some(p) => {
            if p.c.is_some() && p.k.is_some() {
                return Err(Failure::Input("both k and c were given; pick one".into()));
            }
            if let Some(c) = &p.c {
                if c.len() > 64 {
                    return Err(cap("parameter c"));
                }
                let f = rec.as_ref().map_or(0, |r| r.f);
                let rep = hodge_shift(&parse_c(c)?, f);
                summary.push(format!("weight shift {} from c", rep.normative));
                rep.normative
            } else if let Some(k) = p.k {
                if !(-16..=16).contains(&k) {
                    return Err(cap("weight shift"));
                }
                k
            } else {
                0
            }
        }
        None => 0,
    };
    if let Some(rec) = &rec {
        for variant in [Variant::AbsQ, Variant::RelQ, Variant::RelP] {
            let table = einf_closed_form(rec, variant, k);
            if table.dims_map() != truncated_run(rec, variant, k) {
                return Err(Failure::Check(format!(
                    "table {variant} disagrees with the page-walk recount"
                )));
            }
        }
        if (rec.b + rec.f + 1) % 2 == 0 {
            middle_image(rec, k).map_err(cone_failure)?;
            let end = end_signature(rec, k).map_err(cone_failure)?;
            summary.push(format!("end correction {end}"));
        }
    }
    if let (Some(pair), Some(rec)) = (&pair, &rec) {
        let report = global_signature(pair, rec, k).map_err(assemble_failure)?;
        summary.push(format!("global signature {}", report.global));
    }
    if summary.is_empty() {
        summary.push("empty document".into());
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_shift(c: &str, f: usize, fmt: Format) -> Result<String, Failure> {
    let c = parse_c(c)?;
    let rep = hodge_shift(&c, f);
    let mut out = String::new();
    match fmt {
        Format::Machine => {
            w!(
                out,
                "shift f={} c={} cutoff_value={} kept={} normative={} literal={} discrepancy={} weight_index={}",
                rep.f,
                show_rat(&rep.c),
                show_rat(&rep.cutoff_value),
                rep.kept_degrees,
                rep.normative,
                rep.literal,
                rep.discrepancy,
                rep.weight_index
            );
        }
        Format::Text => {
            w!(out, "shift: f = {}, c = {}", rep.f, show_rat(&rep.c));
            w!(out, "  survival threshold  {}", show_rat(&rep.cutoff_value));
            w!(out, "  kept fiber degrees  {}", rep.kept_degrees);
            w!(out, "  derived shift k     {}", rep.normative);
            w!(out, "  published shift k   {}", rep.literal);
            if rep.discrepancy != 0 {
                w!(
                    out,
                    "  note: published formula is off by {} here; the derived value matches the cutoff",
                    rep.discrepancy
                );
            }
            w!(out, "  weight index        {}", rep.weight_index);
        }
    }
    Ok(out)
}

/// Dimension totals of a table per total degree `0..=max_deg`.
fn degree_totals(table: &EndTable, max_deg: usize) -> Vec<usize> {
    (0..=max_deg).map(|m| table.total(m)).collect()
}

fn summand_text(table: &EndTable, i: usize, j: usize) -> String {
    let parts: Vec<String> = table.entries[&(i, j)]
        .iter()
        .map(|s| format!("{}:{}", s.label, s.dim))
        .collect();
    parts.join(" + ")
}

fn summand_machine(parts: &str) -> String {
    parts.replace(" + ", "+").replace(' ', "_")
}

fn weight_echo(choice: &WeightChoice) -> String {
    match &choice.report {
        Some(rep) => format!(" (derived from c = {})", show_rat(&rep.c)),
        None => String::new(),
    }
}

fn machine_weight_echo(choice: &WeightChoice) -> String {
    match &choice.report {
        Some(rep) => format!(" c={}", show_rat(&rep.c)),
        None => String::new(),
    }
}

fn cmd_ih_table(
    path: &Path,
    flag_k: Option<i64>,
    flag_c: Option<&str>,
    fmt: Format,
) -> Result<String, Failure> {
    let doc = read_document(path)?;
    let bundle = doc
        .bundle
        .as_ref()
        .ok_or(Failure::Input("document has no bundle section".into()))?;
    let rec = build_record(bundle)?;
    let choice = resolve_weight(flag_k, flag_c, doc.parameters.as_ref(), rec.f)?;
    let k = choice.k;
    let (b, f) = (rec.b, rec.f);
    let n = b + f + 1;
    let mut out = String::new();
    match fmt {
        Format::Machine => {
            w!(out, "command name=ih-table b={b} f={f} n={n} k={k}{}", machine_weight_echo(&choice));
        }
        Format::Text => {
            w!(out, "ih-table (b = {b}, f = {f}, n = {n}), weight k = {k}{}", weight_echo(&choice));
        }
    }
    for variant in [Variant::AbsQ, Variant::RelQ, Variant::RelP] {
        let table = einf_closed_form(&rec, variant, k);
        if table.dims_map() != truncated_run(&rec, variant, k) {
            return Err(Failure::Check(format!(
                "table {variant} disagrees with the page-walk recount"
            )));
        }
        let max_deg = if variant == Variant::AbsQ { b + f } else { b + f + 1 };
        let totals = degree_totals(&table, max_deg);
        match fmt {
            Format::Machine => {
                for (m, d) in totals.iter().enumerate() {
                    w!(out, "total variant={variant} degree={m} dim={d}");
                }
                for (&(i, j), summands) in &table.entries {
                    if summands.is_empty() {
                        continue;
                    }
                    w!(
                        out,
                        "slot variant={variant} i={i} j={j} dim={} summands={}",
                        table.dim(i, j),
                        summand_machine(&summand_text(&table, i, j))
                    );
                }
            }
            Format::Text => {
                w!(out, "variant {variant}");
                let shown: Vec<String> = totals.iter().map(|d| d.to_string()).collect();
                w!(out, "  degree totals: {}", shown.join(" "));
                for (&(i, j), summands) in &table.entries {
                    if summands.is_empty() {
                        continue;
                    }
                    w!(out, "  ({i},{j}) = {}  [{}]", table.dim(i, j), summand_text(&table, i, j));
                }
            }
        }
    }
    if n % 2 == 0 {
        let table = middle_image(&rec, k).map_err(input)?;
        match fmt {
            Format::Machine => {
                w!(out, "middle-total k={k} dim={}", table.total_dim());
                for (&(i, j), summands) in &table.entries {
                    let dim: usize = summands.iter().map(|s| s.dim).sum();
                    let text: Vec<String> =
                        summands.iter().map(|s| format!("{}:{}", s.label, s.dim)).collect();
                    w!(
                        out,
                        "middle i={i} j={j} dim={dim} summands={}",
                        summand_machine(&text.join(" + "))
                    );
                }
            }
            Format::Text => {
                w!(out, "middle image (degree {}): total {}", n / 2, table.total_dim());
                for (&(i, j), summands) in &table.entries {
                    let dim: usize = summands.iter().map(|s| s.dim).sum();
                    let text: Vec<String> =
                        summands.iter().map(|s| format!("{}:{}", s.label, s.dim)).collect();
                    w!(out, "  ({i},{j}) = {dim}  [{}]", text.join(" + "));
                }
            }
        }
    }
    Ok(out)
}

fn assemble_failure(e: AssembleError) -> Failure {
    match e {
        AssembleError::BlockMismatch { .. }
        | AssembleError::DualitySlot { .. }
        | AssembleError::DualityRank { .. }
        | AssembleError::Cone(ConeError::PairingSymmetry { .. })
        | AssembleError::Cone(ConeError::CrossTerm { .. }) => Failure::Check(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn cmd_signature(
    path: &Path,
    flag_k: Option<i64>,
    flag_c: Option<&str>,
    fmt: Format,
) -> Result<String, Failure> {
    let doc = read_document(path)?;
    let bundle = doc
        .bundle
        .as_ref()
        .ok_or(Failure::Input("document has no bundle section".into()))?;
    let simp = doc
        .simplicial
        .as_ref()
        .ok_or(Failure::Input("document has no simplicial section".into()))?;
    let rec = build_record(bundle)?;
    let pair = build_pair(simp)?;
    let choice = resolve_weight(flag_k, flag_c, doc.parameters.as_ref(), rec.f)?;
    let k = choice.k;
    let report = global_signature(&pair, &rec, k).map_err(assemble_failure)?;
    let (b, f) = (rec.b, rec.f);
    let n = b + f + 1;
    let mut out = String::new();
    match fmt {
        Format::Machine => {
            w!(out, "command name=signature b={b} f={f} n={n} k={k}{}", machine_weight_echo(&choice));
            w!(
                out,
                "interior pos={} neg={} zero={} value={} rank={}",
                report.interior.pos,
                report.interior.neg,
                report.interior.zero,
                report.interior.value(),
                report.interior_rank
            );
            for (s, v) in &report.taus {
                w!(out, "tau s={s} value={v}");
            }
            w!(
                out,
                "signature k={k} tau_sum={} end_correction={} global={}",
                report.tau_sum,
                report.end_correction,
                report.global
            );
        }
        Format::Text => {
            w!(out, "signature (b = {b}, f = {f}, n = {n}), weight k = {k}{}", weight_echo(&choice));
            w!(
                out,
                "  interior        {}  [pairing rank {}]",
                report.interior,
                report.interior_rank
            );
            for (s, v) in &report.taus {
                w!(out, "  tau page {s:<2}     {v}");
            }
            w!(out, "  tau sum         {}", report.tau_sum);
            w!(out, "  end correction  {}", report.end_correction);
            w!(out, "  global          {}", report.global);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct Case {
    label: String,
    pass: bool,
    detail: String,
}

impl Case {
    fn pass(label: String) -> Case {
        Case { label, pass: true, detail: String::new() }
    }

    fn fail(label: String, detail: String) -> Case {
        Case { label, pass: false, detail }
    }

    fn of(label: String, outcome: Result<(), String>) -> Case {
        match outcome {
            Ok(()) => Case::pass(label),
            Err(d) => Case::fail(label, d),
        }
    }
}

fn cmd_verify(suite: Suite, seed: u64, fmt: Format) -> (i32, String, String) {
    let cases = match suite {
        Suite::Oracle => oracle_cases(seed),
        Suite::Duality => duality_cases(seed),
        Suite::Parity => parity_cases(seed),
        Suite::Novikov => novikov_cases(),
        Suite::HodgeConsistency => hodge_cases(),
    };
    let name = suite.name();
    let total = cases.len();
    let failed = cases.iter().filter(|c| !c.pass).count();
    let mut out = String::new();
    match fmt {
        Format::Machine => {
            w!(out, "command name=verify suite={name} seed={seed}");
            for (i, case) in cases.iter().enumerate() {
                let label = case.label.replace(' ', "_");
                if case.pass {
                    w!(out, "case suite={name} index={i} label={label} result=pass");
                } else {
                    w!(
                        out,
                        "case suite={name} index={i} label={label} result=fail detail={}",
                        case.detail.replace(' ', "_")
                    );
                }
            }
            w!(out, "summary suite={name} pass={} fail={failed} total={total}", total - failed);
        }
        Format::Text => {
            w!(out, "verify {name} (seed {seed})");
            for (i, case) in cases.iter().enumerate() {
                if case.pass {
                    w!(out, "  case {i:3}  {:<44} pass", case.label);
                } else {
                    w!(out, "  case {i:3}  {:<44} FAIL  {}", case.label, case.detail);
                }
            }
            w!(out, "{name}: {}/{total} pass", total - failed);
        }
    }
    (if failed > 0 { 1 } else { 0 }, out, String::new())
}

const SWEEP_WEIGHTS: [i64; 4] = [-1, 0, 1, 2];

fn oracle_cases(seed: u64) -> Vec<Case> {
    let mut cases = Vec::new();
    for model in sample_models(seed, 25) {
        for k in SWEEP_WEIGHTS {
            let label = format!("{} k={k}", model.name);
            let mut outcome = Ok(());
            for variant in [Variant::AbsQ, Variant::RelQ, Variant::RelP] {
                let closed = einf_closed_form(&model.record, variant, k).dims_map();
                let walked = truncated_run(&model.record, variant, k);
                if closed != walked {
                    outcome = Err(format!("variant {variant} disagrees with the page walk"));
                    break;
                }
            }
            cases.push(Case::of(label, outcome));
        }
    }
    cases
}

fn duality_cases(seed: u64) -> Vec<Case> {
    let mut cases = Vec::new();
    for model in sample_models(seed, 25) {
        for k in SWEEP_WEIGHTS {
            let label = format!("{} k={k}", model.name);
            let outcome = verify_duality(&model.record, k).map(|_| ()).map_err(|e| e.to_string());
            cases.push(Case::of(label, outcome));
        }
    }
    cases
}

fn parity_cases(seed: u64) -> Vec<Case> {
    let mut cases = Vec::new();
    for model in sample_models(seed, 25) {
        let rec = &model.record;
        let n = rec.b + rec.f + 1;
        if n % 2 == 1 {
            continue;
        }
        let label = model.name.clone();
        let outcome = (|| -> Result<(), String> {
            for s in 2..=rec.structural_stop() {
                let sig = tau(rec, s).map_err(|e| e.to_string())?;
                let parity_mismatch = (rec.b + s) % 2 == 1;
                if (parity_mismatch || (n / 2) % 2 == 1) && sig.value() != 0 {
                    return Err(format!("tau on page {s} should vanish, got {}", sig.value()));
                }
            }
            for k in 0..=2 {
                let block = block_matrix_assembly(rec, k).map_err(|e| e.to_string())?;
                let end = end_signature(rec, k).map_err(|e| e.to_string())?;
                if block.total != end {
                    return Err(format!("block total {} vs end correction {end} at k={k}", block.total));
                }
                for c in &block.cancellations {
                    if c.signature != 0 {
                        return Err(format!(
                            "pair ({},{})/({},{}) on page {} fails to cancel",
                            c.p.0, c.p.1, c.q.0, c.q.1, c.s
                        ));
                    }
                }
            }
            Ok(())
        })();
        cases.push(Case::of(label, outcome));
    }
    cases
}

fn novikov_cases() -> Vec<Case> {
    let fixtures: Vec<(String, SimplicialPair, u32, i64)> = vec![
        (
            "sphere-4 at 0".into(),
            SimplicialPair::from_facets(&sphere_facets(4)).expect("sphere"),
            0,
            0,
        ),
        ("proj-plane at 1".into(), cp2_pair(), 1, 1),
        ("proj-plane at 5".into(), cp2_pair(), 5, 1),
        (
            "sphere-2x2 at 0".into(),
            SimplicialPair::from_facets(&product_facets(&sphere_facets(2), &sphere_facets(2)))
                .expect("product"),
            0,
            0,
        ),
    ];
    fixtures
        .into_iter()
        .map(|(label, pair, v, want)| {
            let outcome = (|| -> Result<(), String> {
                let report = novikov_check(&pair, v).map_err(|e| e.to_string())?;
                if report.whole.value() != want {
                    return Err(format!("whole signature {} != {want}", report.whole.value()));
                }
                if !report.additive() {
                    return Err(format!(
                        "split not additive: {} != {} + {}",
                        report.whole.value(),
                        report.star.value(),
                        report.rest.value()
                    ));
                }
                Ok(())
            })();
            Case::of(label, outcome)
        })
        .collect()
}

fn hodge_cases() -> Vec<Case> {
    let grid = standard_c_grid();
    (0..=9usize)
        .map(|f| {
            let label = format!("f{f}");
            let check = verify_hodge_consistency(&grid, &[f]);
            let expected = if f % 2 == 0 { 1 } else { 0 };
            let mut outcome = Ok(());
            for case in &check.cases {
                if !case.dictionary_matches || !case.rows_match {
                    outcome = Err(format!("cutoff mismatch at c = {}", show_rat(&case.report.c)));
                    break;
                }
                if case.report.discrepancy != expected {
                    outcome = Err(format!(
                        "published-formula discrepancy {} at c = {}, expected {expected}",
                        case.report.discrepancy,
                        show_rat(&case.report.c)
                    ));
                    break;
                }
            }
            Case::of(label, outcome)
        })
        .collect()
}
