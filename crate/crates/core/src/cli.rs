//! Batch front end: job files in, JSON certificates and CSV curves out.
//!
//! A job file looks like
//!
//! ```json
//! {
//!   "schema": 1,
//!   "command": "analyze",
//!   "vectors": [[1, 0], [0, 1], [1, 1]],
//!   "interval": [1, "inf"],
//!   "grid": 24,
//!   "window": {"re": [-1, 1], "im": [0.5, 40]},
//!   "tolerances": {"equiv": 1e-9, "quad": 1e-3, "gap": 1e6, "angle": 1e-6, "match": 1e-6},
//!   "monodromy": {"base_p": [2, 2.7, 4], "loop_radius": 0.25, "max_zeros": 2},
//!   "compare_zeros": false
//! }
//! ```
//!
//! Every field but `vectors` is optional. Numbers may be JSON literals or
//! decimal strings; `"inf"` is accepted for the upper end of `interval`.

use std::fmt;
use std::fs;
use std::path::Path as FsPath;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::continuation::{loop_monodromy, pnorm_at};
use crate::dependence::{
    analyze, make_grid, AnalyzeOptions, Classification, DependenceReport, DEFAULT_ANGLE_TOL,
    DEFAULT_GAP_THRESHOLD,
};
use crate::error::Error;
use crate::exppoly::{find_zeros, ExpPoly, Rectangle, Term, ZeroSearchOptions, DEFAULT_MERGE_TOL, DEFAULT_QUAD_TOL};
use crate::json::{extended_f64, extended_f64_seq};
use crate::vectors::{canonicalize, equivalent, partition, CanonicalForm, EquivalencePartition, RealVector, DEFAULT_EQUIV_TOL};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_BASE_POINTS: [f64; 3] = [2.0, 2.7, 4.0];
/// Relative tolerance a measured monodromy factor must meet.
pub const MONODROMY_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNEXPECTED: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Zeros,
    Norms,
    Monodromy,
    Equiv,
    Analyze,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Zeros => "zeros",
            Command::Norms => "norms",
            Command::Monodromy => "monodromy",
            Command::Equiv => "equiv",
            Command::Analyze => "analyze",
        };
        f.write_str(s)
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zeros" => Ok(Command::Zeros),
            "norms" => Ok(Command::Norms),
            "monodromy" => Ok(Command::Monodromy),
            "equiv" => Ok(Command::Equiv),
            "analyze" => Ok(Command::Analyze),
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub equiv: f64,
    pub quad: f64,
    pub gap: f64,
    pub angle: f64,
    pub zero_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equiv: DEFAULT_EQUIV_TOL,
            quad: DEFAULT_QUAD_TOL,
            gap: DEFAULT_GAP_THRESHOLD,
            angle: DEFAULT_ANGLE_TOL,
            zero_match: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromySpec {
    pub base_points: Vec<f64>,
    /// `None` picks a radius from the zero spacing.
    pub loop_radius: Option<f64>,
    pub max_zeros: usize,
}

impl Default for MonodromySpec {
    fn default() -> Self {
        Self {
            base_points: DEFAULT_BASE_POINTS.to_vec(),
            loop_radius: None,
            max_zeros: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub vectors: Vec<RealVector>,
    pub interval: (f64, f64),
    /// `None` means 16 samples, or `max(16, 4 n)` for `analyze`.
    pub grid: Option<usize>,
    pub window: Rectangle,
    pub tolerances: Tolerances,
    pub monodromy: MonodromySpec,
    pub compare_zeros: bool,
}

impl JobSpec {
    pub fn grid_count(&self) -> usize {
        match (self.grid, self.command) {
            (Some(g), _) => g,
            (None, Command::Analyze) => (4 * self.vectors.len()).max(DEFAULT_GRID),
            (None, _) => DEFAULT_GRID,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Literal(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    re: Option<[Num; 2]>,
    im: Option<[Num; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    equiv: Option<Num>,
    quad: Option<Num>,
    gap: Option<Num>,
    angle: Option<Num>,
    #[serde(rename = "match")]
    zero_match: Option<Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonodromy {
    base_p: Option<Vec<Num>>,
    loop_radius: Option<Num>,
    max_zeros: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    schema: Option<u32>,
    command: Option<String>,
    vectors: Vec<Vec<Num>>,
    interval: Option<[Num; 2]>,
    grid: Option<usize>,
    window: Option<RawWindow>,
    tolerances: Option<RawTolerances>,
    monodromy: Option<RawMonodromy>,
    compare_zeros: Option<bool>,
}

fn num(n: &Num, field: &str, allow_inf: bool) -> Result<f64, ParseError> {
    let x = match n {
        Num::Literal(x) => *x,
        Num::Text(s) => match s.trim() {
            "inf" | "+inf" | "infinity" | "Infinity" if allow_inf => f64::INFINITY,
            t => t
                .parse::<f64>()
                .map_err(|_| ParseError(format!("{field}: `{s}` is not a number")))?,
        },
    };
    if x.is_nan() || (x.is_infinite() && !allow_inf) {
        return Err(ParseError(format!("{field}: value must be finite")));
    }
    Ok(x)
}

fn positive(n: &Option<Num>, field: &str, default: f64) -> Result<f64, ParseError> {
    match n {
        None => Ok(default),
        Some(n) => {
            let x = num(n, field, false)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(ParseError(format!("{field}: tolerance must be positive")))
            }
        }
    }
}

/// Parses and validates a job file. `command` (from the command line)
/// takes precedence; a `command` field in the file must agree with it.
pub fn parse_jobspec(text: &str, command: Option<Command>) -> Result<JobSpec, ParseError> {
    let raw: RawJob =
        serde_json::from_str(text).map_err(|e| ParseError(format!("invalid job file: {e}")))?;

    if let Some(s) = raw.schema {
        if s != SCHEMA_VERSION {
            return Err(ParseError(format!(
                "schema: unsupported version {s} (expected {SCHEMA_VERSION})"
            )));
        }
    }
    let file_command = raw
        .command
        .as_deref()
        .map(|c| c.parse::<Command>().map_err(|e| ParseError(format!("command: {e}"))))
        .transpose()?;
    let command = match (command, file_command) {
        (Some(a), Some(b)) if a != b => {
            return Err(ParseError(format!(
                "command: job file says `{b}` but `{a}` was requested"
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(ParseError("command: missing".into())),
    };

    if raw.vectors.is_empty() {
        return Err(ParseError("vectors: at least one vector is required".into()));
    }
    let mut vectors = Vec::with_capacity(raw.vectors.len());
    for (i, v) in raw.vectors.iter().enumerate() {
        let coords = v
            .iter()
            .enumerate()
            .map(|(j, x)| num(x, &format!("vectors[{i}][{j}]"), false))
            .collect::<Result<Vec<f64>, _>>()?;
        if coords.is_empty() {
            return Err(ParseError(format!("vectors[{i}]: empty vector at index {i}")));
        }
        if coords.iter().all(|x| *x == 0.0) {
            return Err(ParseError(format!("vectors[{i}]: zero vector at index {i}")));
        }
        vectors.push(RealVector::new(coords).map_err(|e| ParseError(format!("vectors[{i}]: {e}")))?);
    }

    let interval = match &raw.interval {
        None => (1.0, 4.0),
        Some([a, b]) => {
            let a = num(a, "interval[0]", false)?;
            let b = num(b, "interval[1]", true)?;
            if !(a >= 1.0 && b > a) {
                return Err(ParseError(format!("interval: need 1 <= a < b, got [{a}, {b}]")));
            }
            (a, b)
        }
    };

    if let Some(g) = raw.grid {
        if g < 2 {
            return Err(ParseError("grid: need at least 2 samples".into()));
        }
    }

    let default = Rectangle::default_window();
    let window = match &raw.window {
        None => default,
        Some(w) => {
            let (re_min, re_max) = match &w.re {
                Some([a, b]) => (num(a, "window.re[0]", false)?, num(b, "window.re[1]", false)?),
                None => (default.re_min, default.re_max),
            };
            let (im_min, im_max) = match &w.im {
                Some([a, b]) => (num(a, "window.im[0]", false)?, num(b, "window.im[1]", false)?),
                None => (default.im_min, default.im_max),
            };
            Rectangle::new(re_min, re_max, im_min, im_max)
                .map_err(|e| ParseError(format!("window: {e}")))?
        }
    };

    let d = Tolerances::default();
    let tolerances = match &raw.tolerances {
        None => d,
        Some(t) => {
            let quad = positive(&t.quad, "tolerances.quad", d.quad)?;
            if quad >= 0.5 {
                return Err(ParseError("tolerances.quad: must be below 0.5".into()));
            }
            Tolerances {
                equiv: positive(&t.equiv, "tolerances.equiv", d.equiv)?,
                quad,
                gap: positive(&t.gap, "tolerances.gap", d.gap)?,
                angle: positive(&t.angle, "tolerances.angle", d.angle)?,
                zero_match: positive(&t.zero_match, "tolerances.match", d.zero_match)?,
            }
        }
    };

    let mut monodromy = MonodromySpec::default();
    if let Some(m) = &raw.monodromy {
        if let Some(ps) = &m.base_p {
            if ps.is_empty() {
                return Err(ParseError("monodromy.base_p: must not be empty".into()));
            }
            monodromy.base_points = ps
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let x = num(p, &format!("monodromy.base_p[{i}]"), false)?;
                    if x > 0.0 {
                        Ok(x)
                    } else {
                        Err(ParseError(format!("monodromy.base_p[{i}]: must be positive")))
                    }
                })
                .collect::<Result<_, _>>()?;
        }
        if m.loop_radius.is_some() {
            monodromy.loop_radius = Some(positive(&m.loop_radius, "monodromy.loop_radius", 0.0)?);
        }
        if let Some(k) = m.max_zeros {
            monodromy.max_zeros = k;
        }
    }

    Ok(JobSpec {
        command,
        vectors,
        interval,
        grid: raw.grid,
        window,
        tolerances,
        monodromy,
        compare_zeros: raw.compare_zeros.unwrap_or(false),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEntry {
    pub z: ComplexValue,
    pub multiplicity: u32,
    pub refined: bool,
    /// `|f(z)|` relative to the term scale at `z`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorZeros {
    pub index: usize,
    pub terms: Vec<Term>,
    pub requested_window: Rectangle,
    pub window: Rectangle,
    pub inflations: u32,
    pub total: usize,
    pub zeros: Vec<ZeroEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormTable {
    #[serde(serialize_with = "extended_f64_seq")]
    pub exponents: Vec<f64>,
    /// `norms[i][k] = ||v_k||_{p_i}`.
    pub norms: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyRow {
    pub vector: usize,
    pub zero: ComplexValue,
    pub multiplicity: u32,
    pub base_p: f64,
    pub loop_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<ComplexValue>,
    pub predicted: ComplexValue,
    /// `exp(2 pi i m / z)`, listed for comparison and not checked.
    pub zero_quotient: ComplexValue,
    #[serde(serialize_with = "extended_f64")]
    pub relative_error: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEquivalence {
    pub i: usize,
    pub j: usize,
    pub equivalent: bool,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivPayload {
    pub canonical: Vec<CanonicalForm>,
    pub partition: EquivalencePartition,
    pub pairs: Vec<PairEquivalence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Zeros(Vec<VectorZeros>),
    Norms(NormTable),
    Monodromy(Vec<MonodromyRow>),
    Equiv(EquivPayload),
    Analyze(Box<DependenceReport>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub payload: Payload,
    pub exit_code: i32,
}

/// Exit code for a library error raised while running a valid job.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::InvalidInterval { .. } | Error::DegenerateShape { .. } => {
            EXIT_INPUT
        }
        _ => EXIT_NUMERICAL,
    }
}

pub fn run(job: &JobSpec) -> Result<Outcome, Error> {
    match job.command {
        Command::Zeros => run_zeros(job),
        Command::Norms => run_norms(job),
        Command::Monodromy => run_monodromy(job),
        Command::Equiv => run_equiv(job),
        Command::Analyze => run_analyze(job),
    }
}

fn polys(job: &JobSpec) -> Result<Vec<ExpPoly>, Error> {
    job.vectors
        .iter()
        .map(|v| ExpPoly::from_vector(v, DEFAULT_MERGE_TOL))
        .collect()
}

fn zero_options(job: &JobSpec) -> ZeroSearchOptions {
    ZeroSearchOptions {
        quad_tol: job.tolerances.quad,
        ..ZeroSearchOptions::default()
    }
}

fn run_zeros(job: &JobSpec) -> Result<Outcome, Error> {
    let opts = zero_options(job);
    let mut out = Vec::new();
    let mut all_refined = true;
    for (index, f) in polys(job)?.iter().enumerate() {
        let set = find_zeros(f, &job.window, &opts)?;
        all_refined &= set.zeros.iter().all(|z| z.refined);
        out.push(VectorZeros {
            index,
            terms: f.terms().to_vec(),
            requested_window: job.window,
            window: set.window,
            inflations: set.inflations,
            total: set.total,
            zeros: set
                .zeros
                .iter()
                .map(|z| ZeroEntry {
                    z: z.z.into(),
                    multiplicity: z.multiplicity,
                    refined: z.refined,
                    residual: f.relative_magnitude(z.z),
                })
                .collect(),
        });
    }
    Ok(Outcome {
        payload: Payload::Zeros(out),
        exit_code: if all_refined { EXIT_OK } else { EXIT_NUMERICAL },
    })
}

fn norm_table(vs: &[RealVector], exponents: &[f64]) -> Result<NormTable, Error> {
    let norms = exponents
        .iter()
        .map(|&p| vs.iter().map(|v| pnorm_at(v, p)).collect())
        .collect::<Result<_, _>>()?;
    Ok(NormTable {
        exponents: exponents.to_vec(),
        norms,
    })
}

fn run_norms(job: &JobSpec) -> Result<Outcome, Error> {
    let grid = make_grid(job.interval.0, job.interval.1, job.grid_count())?;
    Ok(Outcome {
        payload: Payload::Norms(norm_table(&job.vectors, &grid.exponents())?),
        exit_code: EXIT_OK,
    })
}

fn run_monodromy(job: &JobSpec) -> Result<Outcome, Error> {
    let opts = zero_options(job);
    let mut rows = Vec::new();
    for (vector, f) in polys(job)?.iter().enumerate() {
        let set = find_zeros(f, &job.window, &opts)?;
        let mut zeros = set.zeros.clone();
        zeros.sort_by(|a, b| a.z.im.abs().total_cmp(&b.z.im.abs()).then(a.z.re.total_cmp(&b.z.re)));
        for (k, zero) in zeros.iter().take(job.monodromy.max_zeros).enumerate() {
            let nearest_other = zeros
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, w)| (w.z - zero.z).norm())
                .fold(f64::INFINITY, f64::min);
            let auto = 0.4 * zero.z.im.abs().min(nearest_other).min(1.25);
            let radius = job.monodromy.loop_radius.unwrap_or(auto);
            for &base_p in &job.monodromy.base_points {
                let two_pi_i_m = Complex64::new(0.0, 2.0 * std::f64::consts::PI * f64::from(zero.multiplicity));
                let predicted = (two_pi_i_m / base_p).exp();
                let zero_quotient = (two_pi_i_m / zero.z).exp();
                let row = match loop_monodromy(f, (zero.z, zero.multiplicity), base_p, radius) {
                    Ok(m) => MonodromyRow {
                        vector,
                        zero: zero.z.into(),
                        multiplicity: zero.multiplicity,
                        base_p,
                        loop_radius: radius,
                        measured: Some(m.measured.into()),
                        predicted: m.predicted.into(),
                        zero_quotient: m.zero_quotient.into(),
                        relative_error: m.relative_error,
                        passed: m.relative_error <= MONODROMY_TOL,
                        error: None,
                    },
                    Err(e) => MonodromyRow {
                        vector,
                        zero: zero.z.into(),
                        multiplicity: zero.multiplicity,
                        base_p,
                        loop_radius: radius,
                        measured: None,
                        predicted: predicted.into(),
                        zero_quotient: zero_quotient.into(),
                        relative_error: f64::NAN,
                        passed: false,
                        error: Some(e.to_string()),
                    },
                };
                rows.push(row);
            }
        }
    }
    let exit_code = if rows.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    };
    Ok(Outcome {
        payload: Payload::Monodromy(rows),
        exit_code,
    })
}

fn run_equiv(job: &JobSpec) -> Result<Outcome, Error> {
    let vs = &job.vectors;
    let tol = job.tolerances.equiv;
    let mut pairs = Vec::new();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            let e = equivalent(&vs[i], &vs[j], tol);
            pairs.push(PairEquivalence {
                i,
                j,
                equivalent: e.equivalent,
                ratio: e.ratio,
            });
        }
    }
    Ok(Outcome {
        payload: Payload::Equiv(EquivPayload {
            canonical: vs.iter().map(canonicalize).collect(),
            partition: partition(vs, tol)?,
            pairs,
        }),
        exit_code: EXIT_OK,
    })
}

fn run_analyze(job: &JobSpec) -> Result<Outcome, Error> {
    let opts = AnalyzeOptions {
        grid_count: Some(job.grid_count()),
        gap_threshold: job.tolerances.gap,
        equiv_tol: job.tolerances.equiv,
        angle_tol: job.tolerances.angle,
        compare_zeros: job.compare_zeros,
        zero_window: job.window,
        zero_match_tol: job.tolerances.zero_match,
    };
    let report = analyze(&job.vectors, job.interval.0, job.interval.1, &opts)?;
    let exit_code = match report.classification {
        Classification::ConsistentWithTheorem => EXIT_OK,
        Classification::UnexpectedDependence => EXIT_UNEXPECTED,
        Classification::IllConditioned => EXIT_NUMERICAL,
    };
    Ok(Outcome {
        payload: Payload::Analyze(Box::new(report)),
        exit_code,
    })
}

#[derive(Serialize)]
struct Certificate<'a> {
    version: &'static str,
    schema: u32,
    command: Command,
    input: &'a RawValue,
    payload: &'a Payload,
    timing_ms: u64,
}

/// Serialized payload alone; identical jobs give identical bytes.
pub fn payload_json(payload: &Payload) -> String {
    serde_json::to_string(payload).expect("payload serializes")
}

/// Full certificate. `raw_input` is echoed verbatim.
pub fn certificate_json(
    raw_input: &str,
    command: Command,
    payload: &Payload,
    timing_ms: u64,
) -> Result<String, ParseError> {
    let input: Box<RawValue> = serde_json::from_str(raw_input.trim())
        .map_err(|e| ParseError(format!("invalid job file: {e}")))?;
    let cert = Certificate {
        version: env!("CARGO_PKG_VERSION"),
        schema: SCHEMA_VERSION,
        command,
        input: &input,
        payload,
        timing_ms,
    };
    Ok(serde_json::to_string_pretty(&cert).expect("certificate serializes"))
}

/// Formats `x` with 17 significant digits, trailing zeros removed.
pub fn format_sig17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mut digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else if digits.len() == 1 {
        format!("{sign}{digits}e{exp}")
    } else {
        format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..])
    }
}

/// CSV of norm curves: header `p,norm_1,...,norm_n`, one row per exponent.
pub fn curves_csv(vs: &[RealVector], exponents: &[f64]) -> Result<String, Error> {
    if vs.is_empty() {
        return Err(Error::InvalidInput("no vectors to tabulate".into()));
    }
    let table = norm_table(vs, exponents)?;
    let mut out = String::from("p");
    for k in 1..=vs.len() {
        out.push_str(&format!(",norm_{k}"));
    }
    out.push('\n');
    for (p, row) in table.exponents.iter().zip(&table.norms) {
        out.push_str(&format_sig17(*p));
        for x in row {
            out.push(',');
            out.push_str(&format_sig17(*x));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_curves(vs: &[RealVector], exponents: &[f64], path: &FsPath) -> Result<(), Error> {
    let csv = curves_csv(vs, exponents)?;
    fs::write(path, csv)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}
