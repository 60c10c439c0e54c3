//! Command-line front end and its JSON file formats.
//!
//! Matrices are encoded row-major as nested arrays of `[re, im]` pairs.
//! Floats are written in the shortest form that parses back to the same
//! value, and struct fields serialize in declaration order, so identical
//! inputs give byte-identical output.
//!
//! Exit codes: 0 success, 2 bad input or flags, 3 mode/matrix mismatch,
//! 4 input is not a PSD Hermitian matrix.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dense::{BipartiteDims, ComplexMatrix, RealMatrix, DEFAULT_RANK_TOL};
use crate::error::Error;
use crate::herm_decomp::{decompose_herm, HermTerm};
use crate::multipartite::{decompose_multi_ordered, MultiDims};
use crate::separability::{analyze, NormalizedDecomposition, SearchConfig, Verdict};
use crate::states::{check_dims, Family, StateSpec};
use crate::sym_decomp::{decompose_sym, DecomposeOptions};

/// Caps the number of threads used for search restarts.
pub const THREADS_ENV: &str = "SCHMIDT_HERM_THREADS";

pub type EncodedMatrix = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(a: &ComplexMatrix) -> EncodedMatrix {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    let (re, im) = a.get(i, j);
                    [re, im]
                })
                .collect()
        })
        .collect()
}

pub fn decode_matrix(rows: &EncodedMatrix) -> Result<ComplexMatrix, Error> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    let mut re = Vec::with_capacity(n * cols);
    let mut im = Vec::with_capacity(n * cols);
    for row in rows {
        for [a, b] in row {
            re.push(*a);
            im.push(*b);
        }
    }
    ComplexMatrix::new(RealMatrix::new(n, cols, re)?, RealMatrix::new(n, cols, im)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub matrix: EncodedMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, serde_json::Value>>,
}

impl MatrixFile {
    pub fn new(a: &ComplexMatrix, dims: Vec<usize>) -> Self {
        Self {
            dims,
            matrix: encode_matrix(a),
            metadata: None,
        }
    }

    /// Decodes the matrix and checks it against `dims`.
    pub fn decode(&self) -> Result<ComplexMatrix, Error> {
        let a = decode_matrix(&self.matrix)?;
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("invalid dims {:?}", self.dims)));
        }
        check_dims(&a, &self.dims)?;
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symmetric,
    Hermitian,
    Multipartite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub mode: Mode,
    pub dims: Vec<usize>,
    /// One list of factors per term, in subsystem order.
    pub terms: Vec<Vec<EncodedMatrix>>,
    pub singular_values: Vec<f64>,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_norms: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma2_residuals: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_mode: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_multi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<bool>,
}

impl DecompositionFile {
    /// Bipartite terms as complex factor pairs.
    pub fn pairs(&self) -> Result<Vec<HermTerm>, Error> {
        self.terms
            .iter()
            .map(|t| match t.as_slice() {
                [b, c] => Ok((decode_matrix(b)?, decode_matrix(c)?)),
                _ => Err(Error::DimensionMismatch("bipartite term must have two factors".into())),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub terms: Vec<[EncodedMatrix; 2]>,
    pub b_bar: EncodedMatrix,
    pub c_bar: EncodedMatrix,
    pub q: f64,
}

impl From<&NormalizedDecomposition> for WitnessFile {
    fn from(nd: &NormalizedDecomposition) -> Self {
        Self {
            terms: nd.terms.iter().map(|(b, c)| [encode_matrix(b), encode_matrix(c)]).collect(),
            b_bar: encode_matrix(&nd.b_bar),
            c_bar: encode_matrix(&nd.c_bar),
            q: nd.q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub step: f64,
    pub best_restart: usize,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub dims: Vec<usize>,
    pub q: f64,
    pub q_best: f64,
    pub upper: f64,
    pub lower_b: f64,
    pub lower_c: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    pub tol: f64,
    pub search: SearchSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
}

#[derive(Debug, Parser)]
#[command(name = "schmidt-herm", version, about = "Hermitian tensor-product decompositions and separability analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a state as a matrix file
    Gen {
        #[arg(long)]
        family: String,
        /// Family parameter as NAME=VALUE; repeatable
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Subsystem dimensions, e.g. 2,3
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decompose a bipartite matrix into symmetric or Hermitian factor pairs
    Decompose {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "hermitian")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long)]
        max_terms: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Separability analysis of a bipartite state
    Analyze {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use the terms of an existing hermitian decomposition file
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        step: Option<f64>,
        /// Verdict tolerance; defaults to 1e-9·‖A‖_F
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recursive decomposition of a multipartite matrix
    Multi {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Subsystem dimensions (at least three); defaults to the file's dims
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Recursion order as a permutation of subsystem indices
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn mode(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    fn psd(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn read_source(path: Option<&PathBuf>, stdin: &mut dyn Read) -> Result<String, CliError> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::input(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed {what}: {e}")))
}

fn emit<T: Serialize>(value: &T, path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).map_err(|e| CliError::input(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write stdout: {e}"))),
    }
}

fn input_error(e: Error) -> CliError {
    CliError::input(e.to_string())
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    params
        .iter()
        .map(|p| {
            let (name, value) = p
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("invalid --param `{p}`: expected NAME=VALUE")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("invalid --param {name}: `{value}` is not a number")))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

fn bipartite(file: &MatrixFile) -> Result<(ComplexMatrix, BipartiteDims), CliError> {
    let a = file.decode().map_err(input_error)?;
    match file.dims.as_slice() {
        [m, n] => Ok((a, BipartiteDims::new(*m, *n).map_err(input_error)?)),
        other => Err(CliError::input(format!("expected two subsystem dims, got {other:?}"))),
    }
}

fn search_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0)
}

fn cmd_gen(
    family: &str,
    params: &[String],
    dims: Option<Vec<usize>>,
    seed: Option<u64>,
) -> Result<MatrixFile, CliError> {
    let family: Family = family
        .parse()
        .map_err(|e: Error| CliError::input(format!("invalid --family: {e}")))?;
    let spec = StateSpec {
        family,
        params: parse_params(params)?,
        dims: dims.clone(),
        seed,
    };
    let (a, generated_dims) = spec.generate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } if name == "dims" => CliError::input(format!("invalid --dims: {reason}")),
        Error::InvalidParameter { name, reason } => CliError::input(format!("invalid --param {name}: {reason}")),
        other => input_error(other),
    })?;
    if let Some(d) = dims {
        if d != generated_dims {
            return Err(CliError::input(format!(
                "invalid --dims: family produces dims {generated_dims:?}, got {d:?}"
            )));
        }
    }
    let mut file = MatrixFile::new(&a, generated_dims);
    let mut meta = BTreeMap::new();
    meta.insert("family".to_string(), serde_json::Value::from(family_name(family)));
    for (k, v) in &spec.params {
        meta.insert(format!("param.{k}"), serde_json::Value::from(*v));
    }
    if let Some(s) = seed {
        meta.insert("seed".to_string(), serde_json::Value::from(s));
    }
    file.metadata = Some(meta);
    Ok(file)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Werner => "werner",
        Family::Horodecki2x4 => "horodecki2x4",
        Family::RandomDensity => "random_density",
        Family::RandomSeparable => "random_separable",
    }
}

pub fn cmd_decompose(file: &MatrixFile, mode: Mode, opts: &DecomposeOptions) -> Result<DecompositionFile, CliError> {
    let (a, dims) = bipartite(file)?;
    match mode {
        Mode::Symmetric => {
            if !a.is_real() {
                return Err(CliError::mode("symmetric mode requires a matrix with zero imaginary part"));
            }
            let d = decompose_sym(a.re(), dims, opts).map_err(input_error)?;
            Ok(DecompositionFile {
                mode,
                dims: vec![dims.m, dims.n],
                terms: d
                    .terms
                    .iter()
                    .map(|(b, c)| {
                        vec![
                            encode_matrix(&ComplexMatrix::from_real(b.clone())),
                            encode_matrix(&ComplexMatrix::from_real(c.clone())),
                        ]
                    })
                    .collect(),
                singular_values: d.singular_values,
                residual: d.residual,
                block_norms: Some(d.block_norms.to_vec()),
                lemma2_residuals: None,
                exact_mode: None,
                level_ranks: None,
                q_multi: None,
                canonical: None,
            })
        }
        Mode::Hermitian => {
            let d = decompose_herm(&a, dims, opts).map_err(input_error)?;
            Ok(DecompositionFile {
                mode,
                dims: vec![dims.m, dims.n],
                terms: d.terms.iter().map(|(b, c)| vec![encode_matrix(b), encode_matrix(c)]).collect(),
                singular_values: d.singular_values,
                residual: d.residual,
                block_norms: Some(d.block_norms.to_vec()),
                lemma2_residuals: Some(d.lemma2_residuals),
                exact_mode: Some(d.exact_mode),
                level_ranks: None,
                q_multi: None,
                canonical: None,
            })
        }
        Mode::Multipartite => Err(CliError::input("use the `multi` subcommand for multipartite decompositions")),
    }
}

pub fn cmd_analyze(
    file: &MatrixFile,
    decomposition: Option<&DecompositionFile>,
    cfg: &SearchConfig,
    tol: Option<f64>,
    rank_tol: f64,
) -> Result<ReportFile, CliError> {
    let (a, dims) = bipartite(file)?;
    let deviation = a.hermitian_deviation();
    if deviation > crate::dense::HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(CliError::psd(format!("input is not Hermitian (max deviation {deviation:e})")));
    }
    let terms = match decomposition {
        Some(d) => {
            if d.dims != [dims.m, dims.n] {
                return Err(CliError::input(format!(
                    "decomposition dims {:?} do not match matrix dims {:?}",
                    d.dims, file.dims
                )));
            }
            d.pairs().map_err(input_error)?
        }
        None => decompose_herm(&a, dims, &DecomposeOptions::with_rank_tol(rank_tol))
            .map_err(input_error)?
            .terms,
    };
    if terms.is_empty() {
        return Err(CliError::input("decomposition has no terms (zero matrix?)"));
    }
    let report = analyze(&a, &terms, dims, cfg, tol).map_err(|e| match e {
        Error::NotPositiveSemidefinite { .. } | Error::NotHermitian { .. } => CliError::psd(e.to_string()),
        other => input_error(other),
    })?;
    Ok(ReportFile {
        dims: vec![dims.m, dims.n],
        q: report.q,
        q_best: report.q_best,
        upper: report.bounds.upper,
        lower_b: report.bounds.lower_b,
        lower_c: report.bounds.lower_c,
        verdict: report.verdict,
        caveat: report.caveat.map(str::to_string),
        tol: report.tol,
        search: SearchSummary {
            restarts: cfg.restarts,
            iters: cfg.iters,
            seed: cfg.seed,
            step: cfg.step,
            best_restart: report.search.best_restart,
            terms: terms.len(),
        },
        witness: report.witness.as_ref().map(WitnessFile::from),
    })
}

pub fn cmd_multi(
    file: &MatrixFile,
    dims: Option<Vec<usize>>,
    order: Option<Vec<usize>>,
    opts: &DecomposeOptions,
) -> Result<DecompositionFile, CliError> {
    let dims = dims.unwrap_or_else(|| file.dims.clone());
    if dims.len() < 3 {
        return Err(CliError::input(format!("invalid --dims: need at least three subsystems, got {dims:?}")));
    }
    let a = decode_matrix(&file.matrix).map_err(input_error)?;
    check_dims(&a, &dims).map_err(|e| CliError::input(format!("invalid --dims: {e}")))?;
    let multi_dims = MultiDims::new(dims.clone()).map_err(input_error)?;
    let order = order.unwrap_or_else(|| (0..dims.len()).collect());
    let d = decompose_multi_ordered(&a, &multi_dims, &order, opts).map_err(|e| match e {
        Error::NotHermitian { .. } => CliError::psd(e.to_string()),
        other => input_error(other),
    })?;
    Ok(DecompositionFile {
        mode: Mode::Multipartite,
        dims,
        terms: d.terms.iter().map(|t| t.iter().map(encode_matrix).collect()).collect(),
        singular_values: Vec::new(),
        residual: d.residual,
        block_norms: None,
        lemma2_residuals: None,
        exact_mode: None,
        level_ranks: Some(d.level_ranks),
        q_multi: d.q_multi,
        canonical: Some(d.canonical),
    })
}

/// Runs a parsed command against the given stdin/stdout.
pub fn run(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            family,
            params,
            dims,
            seed,
            output,
        } => emit(&cmd_gen(&family, &params, dims, seed)?, output.as_ref(), stdout),
        Command::Decompose {
            input,
            mode,
            rank_tol,
            max_terms,
            output,
        } => {
            let file: MatrixFile = parse_json(&read_source(input.as_ref(), stdin)?, "matrix file")?;
            let opts = DecomposeOptions { rank_tol, max_terms };
            emit(&cmd_decompose(&file, mode, &opts)?, output.as_ref(), stdout)
        }
        Command::Analyze {
            input,
            decomposition,
            restarts,
            iters,
            seed,
            step,
            tol,
            rank_tol,
            output,
        } => {
            let file: MatrixFile = parse_json(&read_source(input.as_ref(), stdin)?, "matrix file")?;
            let decomposition: Option<DecompositionFile> = match decomposition {
                Some(p) => Some(parse_json(&read_source(Some(&p), stdin)?, "decomposition file")?),
                None => None,
            };
            let defaults = SearchConfig::default();
            let cfg = SearchConfig {
                restarts,
                iters,
                seed,
                step: step.unwrap_or(defaults.step),
                threads: search_threads(),
                ..defaults
            };
            emit(
                &cmd_analyze(&file, decomposition.as_ref(), &cfg, tol, rank_tol)?,
                output.as_ref(),
                stdout,
            )
        }
        Command::Multi {
            input,
            dims,
            order,
            rank_tol,
            output,
        } => {
            let file: MatrixFile = parse_json(&read_source(input.as_ref(), stdin)?, "matrix file")?;
            emit(
                &cmd_multi(&file, dims, order, &DecomposeOptions::with_rank_tol(rank_tol))?,
                output.as_ref(),
                stdout,
            )
        }
    }
}
