//! `greenbound` command-line front end.
//!
//! Exit codes: 0 ok, 1 parse/usage error, 2 ill-posed spectrum,
//! 3 invalid gap override, 4 bound violation (`check`).

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use crate::bounds::{
    entrywise_bound_for, qtds18_bound, triangular_bound, van_loan_bound, BoundParams, QtdsParams,
};
use crate::error::GreenError;
use crate::green::{spectral_gaps, GreenKernel, SpectralGaps};
use crate::matrix::{hard_upper, induced_norm, split_triangular, ComplexMatrix, NormKind};
use crate::schur::schur_decompose;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_ILL_POSED: i32 = 2;
pub const EXIT_BAD_OVERRIDE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Relative slack allowed when checking `exact ≤ bound`.
pub const CHECK_RTOL: f64 = 1e-9;

pub const CSV_HEADER: [&str; 7] = [
    "t",
    "exact_norm",
    "bound_triangular",
    "bound_entrywise_norm",
    "bound_vanloan",
    "bound_qtds18",
    "ratio_triangular",
];

#[derive(Debug, Parser)]
#[command(
    name = "greenbound",
    version,
    about = "Green's function norms of x' = Ax + f and their upper bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the eigenvalues, the maximal gaps, alpha and the counts m, l.
    Gaps {
        /// JSON matrix file.
        matrix: PathBuf,
    },
    /// Tabulate the exact norm of the Green's function.
    Exact(GridArgs),
    /// Tabulate the selected bounds.
    Bound(GridArgs),
    /// Tabulate the exact norm next to every applicable bound.
    Compare(GridArgs),
    /// Exit 0 iff every applicable bound dominates the exact norm on the grid.
    Check(GridArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// JSON matrix file.
    matrix: PathBuf,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 40)]
    steps: usize,
    /// Induced norm: 1, 2 or inf. Non-triangular input always uses 2.
    #[arg(long, value_parser = parse_norm)]
    norm: Option<NormKind>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_minus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_plus: Option<f64>,
    #[arg(long, value_enum, default_value_t = BoundChoice::All)]
    bound: BoundChoice,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Multiplies every bound; test hook for negative controls.
    #[arg(
        long,
        hide = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    bound_scale: f64,
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    Triangular,
    Entrywise,
    Vanloan,
    Qtds18,
    All,
}

impl BoundChoice {
    fn includes(self, other: BoundChoice) -> bool {
        self == BoundChoice::All || self == other
    }
}

/// On-disk matrix: `{"n": 2, "data": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.n == 0 {
            return Err("n must be at least 1".into());
        }
        if self.data.len() != self.n {
            return Err(format!(
                "expected {} rows, found {}",
                self.n,
                self.data.len()
            ));
        }
        let mut rows = Vec::with_capacity(self.n);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.n
                ));
            }
            rows.push(row.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        }
        ComplexMatrix::from_rows(rows).map_err(|e| e.to_string())
    }

    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        Self {
            n: a.n(),
            data: (0..a.n())
                .map(|i| a.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .data
            .iter()
            .map(|row| {
                let cells: Vec<String> = row
                    .iter()
                    .map(|[re, im]| format!("[{re:?},{im:?}]"))
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("{{\"n\":{},\"data\":[{}]}}", self.n, rows.join(","))
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: MatrixFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.to_matrix()
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// Time grid without `t = 0`.
///
/// A range straddling 0 is split into two logarithmic half-grids, `steps/2`
/// negative points and the rest positive, each reaching down to
/// `0.01·max(|t_min|, t_max)`. A range touching 0 at one end uses one
/// logarithmic half-grid; any other range is uniform.
pub fn time_grid(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(t_min.is_finite() && t_max.is_finite()) {
        return Err("grid limits must be finite".into());
    }
    if t_min > t_max {
        return Err(format!("t-min {t_min} exceeds t-max {t_max}"));
    }
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    if t_min == 0.0 && t_max == 0.0 {
        return Err("grid range is the single point t = 0".into());
    }
    let floor = 0.01 * t_min.abs().max(t_max.abs());
    if steps == 1 {
        return Ok(vec![if t_min != 0.0 { t_min } else { t_max }]);
    }
    if t_min < 0.0 && t_max > 0.0 {
        let neg = steps / 2;
        let pos = steps - neg;
        let mut grid: Vec<f64> = logspace(floor.min(-t_min), -t_min, neg)
            .into_iter()
            .rev()
            .map(|x| -x)
            .collect();
        grid.extend(logspace(floor.min(t_max), t_max, pos));
        return Ok(grid);
    }
    if t_min == 0.0 {
        return Ok(logspace(floor, t_max, steps));
    }
    if t_max == 0.0 {
        return Ok(logspace(floor, -t_min, steps)
            .into_iter()
            .rev()
            .map(|x| -x)
            .collect());
    }
    let h = (t_max - t_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                t_max
            } else {
                t_min + i as f64 * h
            }
        })
        .collect())
}

/// `count` points from `lo` to `hi` (both positive), geometrically spaced.
fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let h = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == count => hi,
                    _ => (a + i as f64 * h).exp(),
                })
                .collect()
        }
    }
}

/// One grid row; `None` marks an inapplicable bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub t: f64,
    pub exact: f64,
    pub triangular: Option<f64>,
    pub entrywise: Option<f64>,
    pub vanloan: Option<f64>,
    pub qtds18: Option<f64>,
}

impl GridRow {
    pub fn ratio_triangular(&self) -> Option<f64> {
        match self.triangular {
            Some(b) if self.exact > 0.0 => Some(b / self.exact),
            _ => None,
        }
    }

    fn bounds(&self) -> [(&'static str, Option<f64>); 4] {
        [
            ("bound_triangular", self.triangular),
            ("bound_entrywise_norm", self.entrywise),
            ("bound_vanloan", self.vanloan),
            ("bound_qtds18", self.qtds18),
        ]
    }
}

/// Everything computed once per input matrix.
pub struct Analysis {
    pub norm: NormKind,
    pub triangular_input: bool,
    /// Upper triangular form used by the bounds (the input itself, or its Schur factor).
    pub tri: ComplexMatrix,
    /// Gaps after user overrides.
    pub gaps: SpectralGaps,
    kernel: GreenKernel,
    params: BoundParams,
    qtds: Option<QtdsParams>,
    norm_n: f64,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    IllPosed(String),
    BadOverride(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::IllPosed(_) => EXIT_ILL_POSED,
            CliError::BadOverride(_) => EXIT_BAD_OVERRIDE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::IllPosed(m) => write!(f, "ill-posed: {m}"),
            CliError::BadOverride(m) => write!(f, "invalid gap override: {m}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn ill_posed(e: GreenError) -> CliError {
    CliError::IllPosed(e.to_string())
}

impl Analysis {
    /// Non-triangular input is reduced to Schur form and the norm forced to 2;
    /// `notes` collects the messages meant for standard error.
    pub fn new(
        a: &ComplexMatrix,
        norm: Option<NormKind>,
        gamma_minus: Option<f64>,
        gamma_plus: Option<f64>,
        notes: &mut Vec<String>,
    ) -> Result<Self, CliError> {
        let triangular_input = a.is_upper_triangular(a.triangular_tolerance());
        let (tri, norm) = if triangular_input {
            (hard_upper(a), norm.unwrap_or(NormKind::Two))
        } else {
            let schur = schur_decompose(a).map_err(ill_posed)?;
            match norm {
                Some(p) if p != NormKind::Two => notes.push(format!(
                    "note: input is not upper triangular; using its Schur form and the 2-norm instead of the {p}-norm"
                )),
                _ => notes.push("note: input is not upper triangular; using its Schur form and the 2-norm".into()),
            }
            (hard_upper(&schur.t), NormKind::Two)
        };
        let maximal = spectral_gaps(&tri).map_err(ill_posed)?;
        let gaps = maximal
            .with_overrides(gamma_minus, gamma_plus)
            .map_err(|e| CliError::BadOverride(e.to_string()))?;
        let kernel = GreenKernel::new(a).map_err(ill_posed)?;
        let params = BoundParams::from_triangular(&tri, &gaps, norm).map_err(ill_posed)?;
        let (_, nil) = split_triangular(&tri).map_err(ill_posed)?;
        let norm_n = induced_norm(&nil, norm).map_err(ill_posed)?;
        let qtds = if gaps.m >= 1 && gaps.l >= 1 {
            Some(QtdsParams {
                norm_a: induced_norm(a, norm).map_err(ill_posed)?,
                m: gaps.m,
                l: gaps.l,
                gamma_minus: gaps.gamma_minus,
                gamma_plus: gaps.gamma_plus,
            })
        } else {
            None
        };
        Ok(Self {
            norm,
            triangular_input,
            tri,
            gaps,
            kernel,
            params,
            qtds,
            norm_n,
        })
    }

    pub fn exact(&self, t: f64) -> Result<f64, CliError> {
        let g = self.kernel.evaluate(t).map_err(ill_posed)?;
        induced_norm(&g, self.norm).map_err(ill_posed)
    }

    /// Van Loan's bound applies where `𝒢` is a plain exponential:
    /// `t > 0` with no right spectrum, or `t < 0` with no left spectrum
    /// (then `𝒢(t) = −e^{(−B)|t|}`, whose abscissa is `−min Re λ`).
    fn vanloan(&self, t: f64) -> Result<Option<f64>, CliError> {
        let n = self.tri.n();
        let eig = &self.gaps.eigenvalues;
        if t > 0.0 && self.gaps.l == 0 {
            van_loan_bound(self.gaps.alpha, self.norm_n, n, t)
                .map(Some)
                .map_err(ill_posed)
        } else if t < 0.0 && self.gaps.m == 0 {
            let alpha = eig.iter().map(|z| -z.re).fold(f64::NEG_INFINITY, f64::max);
            van_loan_bound(alpha, self.norm_n, n, -t)
                .map(Some)
                .map_err(ill_posed)
        } else {
            Ok(None)
        }
    }

    pub fn row(&self, t: f64, choice: BoundChoice, scale: f64) -> Result<GridRow, CliError> {
        let exact = self.exact(t)?;
        let triangular = if choice.includes(BoundChoice::Triangular) {
            Some(triangular_bound(&self.params, t).map_err(ill_posed)? * scale)
        } else {
            None
        };
        // ‖·‖_p is monotone on nonnegative matrices for p ∈ {1, 2, ∞}, and the
        // Schur factor leaves the 2-norm unchanged.
        let entrywise = if choice.includes(BoundChoice::Entrywise) {
            let e = entrywise_bound_for(&self.tri, &self.gaps, t).map_err(ill_posed)?;
            Some(induced_norm(&e, self.norm).map_err(ill_posed)? * scale)
        } else {
            None
        };
        let vanloan = if choice.includes(BoundChoice::Vanloan) {
            self.vanloan(t)?.map(|b| b * scale)
        } else {
            None
        };
        let qtds18 = match (&self.qtds, choice.includes(BoundChoice::Qtds18)) {
            (Some(q), true) => Some(qtds18_bound(q, t).map_err(ill_posed)? * scale),
            _ => None,
        };
        Ok(GridRow {
            t,
            exact,
            triangular,
            entrywise,
            vanloan,
            qtds18,
        })
    }
}

fn fmt_num(x: f64) -> String {
    // Debug formatting is the shortest string that parses back to `x`.
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Parses the arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut notes = Vec::new();
    let result = dispatch(cli.command, stdout, &mut notes);
    for note in &notes {
        let _ = writeln!(stderr, "{note}");
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    notes: &mut Vec<String>,
) -> Result<i32, CliError> {
    match command {
        Command::Gaps { matrix } => {
            let a = read_matrix(&matrix).map_err(CliError::Parse)?;
            cmd_gaps(&a, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Exact(args) => with_table(args, notes, stdout, Table::Exact),
        Command::Bound(args) => with_table(args, notes, stdout, Table::Bound),
        Command::Compare(args) => with_table(args, notes, stdout, Table::Compare),
        Command::Check(args) => cmd_check(args, notes, stdout),
    }
}

/// Writes the eigenvalue line and the gap summary.
pub fn cmd_gaps(a: &ComplexMatrix, out: &mut dyn Write) -> Result<(), CliError> {
    let eig = if a.is_upper_triangular(a.triangular_tolerance()) {
        a.diagonal()
    } else {
        schur_decompose(a).map_err(ill_posed)?.eigenvalues()
    };
    let scale = induced_norm(a, NormKind::Infinity).map_err(ill_posed)?;
    let gaps = SpectralGaps::from_eigenvalues(eig, scale).map_err(ill_posed)?;
    let listed: Vec<String> = gaps.eigenvalues.iter().map(|z| z.to_string()).collect();
    writeln!(out, "eigenvalues: {}", listed.join(" "))?;
    writeln!(
        out,
        "gamma_minus={} gamma_plus={} m={} l={} gamma={} alpha={}",
        gaps.gamma_minus,
        gaps.gamma_plus,
        gaps.m,
        gaps.l,
        gaps.gamma(),
        gaps.alpha
    )?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Table {
    Exact,
    Bound,
    Compare,
}

fn prepare(args: &GridArgs, notes: &mut Vec<String>) -> Result<(Analysis, Vec<f64>), CliError> {
    let a = read_matrix(&args.matrix).map_err(CliError::Parse)?;
    let grid = time_grid(args.t_min, args.t_max, args.steps).map_err(CliError::Parse)?;
    if !args.bound_scale.is_finite() || args.bound_scale <= 0.0 {
        return Err(CliError::Parse("bound-scale must be positive".into()));
    }
    let analysis = Analysis::new(&a, args.norm, args.gamma_minus, args.gamma_plus, notes)?;
    Ok((analysis, grid))
}

fn open_output<'a>(
    path: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn with_table(
    args: GridArgs,
    notes: &mut Vec<String>,
    stdout: &mut dyn Write,
    table: Table,
) -> Result<i32, CliError> {
    let (analysis, grid) = prepare(&args, notes)?;
    let choice = match table {
        Table::Exact => None,
        _ => Some(args.bound),
    };
    let rows = grid
        .iter()
        .map(|&t| analysis.row(t, choice.unwrap_or(BoundChoice::All), args.bound_scale))
        .collect::<Result<Vec<_>, _>>()?;

    let sink = open_output(&args.output, stdout)?;
    let mut w = csv::Writer::from_writer(sink);
    match table {
        Table::Exact => {
            w.write_record(["t", "exact_norm"])?;
            for r in &rows {
                w.write_record([fmt_num(r.t), fmt_num(r.exact)])?;
            }
        }
        Table::Bound => {
            let names: Vec<&str> = selected_bounds(args.bound);
            let mut header = vec!["t"];
            header.extend(&names);
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![fmt_num(r.t)];
                for (name, v) in r.bounds() {
                    if names.contains(&name) {
                        rec.push(fmt_opt(v));
                    }
                }
                w.write_record(&rec)?;
            }
        }
        Table::Compare => {
            w.write_record(CSV_HEADER)?;
            for r in &rows {
                w.write_record([
                    fmt_num(r.t),
                    fmt_num(r.exact),
                    fmt_opt(r.triangular),
                    fmt_opt(r.entrywise),
                    fmt_opt(r.vanloan),
                    fmt_opt(r.qtds18),
                    fmt_opt(r.ratio_triangular()),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn selected_bounds(choice: BoundChoice) -> Vec<&'static str> {
    [
        (BoundChoice::Triangular, "bound_triangular"),
        (BoundChoice::Entrywise, "bound_entrywise_norm"),
        (BoundChoice::Vanloan, "bound_vanloan"),
        (BoundChoice::Qtds18, "bound_qtds18"),
    ]
    .into_iter()
    .filter(|(c, _)| choice.includes(*c))
    .map(|(_, name)| name)
    .collect()
}

fn cmd_check(
    args: GridArgs,
    notes: &mut Vec<String>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let (analysis, grid) = prepare(&args, notes)?;
    let mut out = open_output(&args.output, stdout)?;
    let mut comparisons = 0usize;
    for &t in &grid {
        let row = analysis.row(t, args.bound, args.bound_scale)?;
        for (name, bound) in row.bounds() {
            let Some(b) = bound else { continue };
            comparisons += 1;
            if !(row.exact <= b * (1.0 + CHECK_RTOL)) {
                writeln!(
                    out,
                    "violation: t={} exact={} {name}={}",
                    fmt_num(t),
                    fmt_num(row.exact),
                    fmt_num(b)
                )?;
                out.flush()?;
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    writeln!(
        out,
        "ok: {} grid points, {comparisons} comparisons",
        grid.len()
    )?;
    out.flush()?;
    Ok(EXIT_OK)
}
