//! File formats, datasets and run reports.
//!
//! * Graph text: first line `p`, then one whitespace-separated 1-based pair
//!   `i j` per line. Blank lines and lines starting with `#` are ignored.
//! * Matrix CSV: `p` rows of `p` comma-separated decimals, no header.
//! * Dataset CSV: `n` rows of `p` decimals with an optional header row,
//!   detected by a non-numeric first row.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{chol_upper, Matrix, SpdMatrix};

const IRIS_VIRGINICA: &str = include_str!("../data/iris_virginica.csv");

/// Parses the graph text format.
pub fn parse_graph(text: &str, source: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(source, "empty graph file"))?;
    let p: usize = first
        .parse()
        .map_err(|_| Error::parse(format!("{source}:{line_no}"), format!("expected node count, got {first:?}")))?;
    let mut pairs = Vec::new();
    for (line_no, line) in lines {
        let loc = || format!("{source}:{line_no}");
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(loc(), format!("expected two node labels, got {line:?}")));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(loc(), format!("bad node label {s:?}")))
        };
        pairs.push((parse(fields[0])?, parse(fields[1])?));
    }
    Graph::from_edge_list(p, &pairs).map_err(|e| Error::parse(source, e.to_string()))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    fs::write(path, g.to_string())?;
    Ok(())
}

fn parse_row(line: &str) -> std::result::Result<Vec<f64>, String> {
    line.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>().map_err(|_| f.to_string())
        })
        .collect()
}

/// Parses a square matrix in CSV form. The result is only checked for
/// symmetry; callers needing definiteness go through [`SpdMatrix::new`].
pub fn parse_matrix(text: &str, source: &str) -> Result<SpdMatrix> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line)
            .map_err(|f| Error::parse(format!("{source}:{}", i + 1), format!("non-numeric field {f:?}")))?;
        rows.push(row);
    }
    let p = rows.len();
    if p == 0 {
        return Err(Error::parse(source, "empty matrix file"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != p) {
        return Err(Error::parse(
            format!("{source}:{}", bad + 1),
            format!("expected {p} fields, got {}", rows[bad].len()),
        ));
    }
    SpdMatrix::semidefinite(Matrix::from_fn(p, p, |i, j| rows[i][j]))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SpdMatrix> {
    let path = path.as_ref();
    parse_matrix(&fs::read_to_string(path)?, &path.display().to_string())
}

/// Formats a matrix as CSV using the shortest round-tripping decimal form.
pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

/// Observations `Z^{(1)}, …, Z^{(n)}` as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub rows: Matrix,
    pub variable_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn p(&self) -> usize {
        self.rows.ncols()
    }
}

/// Parses a dataset CSV. A header-only file yields `n = 0`, which is how an
/// empty sample is expressed; a file with no lines at all is an error.
pub fn parse_dataset(text: &str, source: &str) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let (_, first) = *lines
        .peek()
        .ok_or_else(|| Error::parse(source, "empty dataset file"))?;
    let variable_names = match parse_row(first) {
        Ok(_) => None,
        Err(_) => {
            lines.next();
            Some(first.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>())
        }
    };
    let mut values = Vec::new();
    let mut width = variable_names.as_ref().map(Vec::len);
    let mut n = 0;
    for (i, line) in lines {
        let loc = format!("{source}:{}", i + 1);
        let row = parse_row(line).map_err(|f| Error::parse(&loc, format!("non-numeric field {f:?}")))?;
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::parse(loc, format!("expected {w} fields, got {}", row.len())));
            }
            None => width = Some(row.len()),
            _ => {}
        }
        values.extend(row);
        n += 1;
    }
    let p = width.unwrap_or(0);
    Ok(Dataset {
        rows: Matrix::from_row_slice(n, p, &values),
        variable_names,
    })
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    parse_dataset(&fs::read_to_string(path)?, &path.display().to_string())
}

/// Fisher's Iris virginica measurements (50 plants; SL, SW, PL, PW in cm).
pub fn iris_virginica() -> Dataset {
    parse_dataset(IRIS_VIRGINICA, "iris_virginica.csv").expect("bundled fixture parses")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterResult {
    pub u: SpdMatrix,
    pub n: usize,
    pub centered: bool,
}

/// `U = Σ z z'`, or `Σ (z - z̄)(z - z̄)'` when `center` is set.
pub fn compute_scatter(d: &Dataset, center: bool) -> ScatterResult {
    let mut z = d.rows.clone();
    if center && d.n() > 0 {
        let mean = z.row_mean();
        for mut row in z.row_iter_mut() {
            row -= &mean;
        }
    }
    let u = crate::linalg::symmetrize(z.tr_mul(&z));
    ScatterResult {
        u: SpdMatrix::trusted(u),
        n: d.n(),
        centered: center,
    }
}

/// `n` independent rows from `N_p(0, K^{-1})`: with `K = Φ'Φ`, each row is
/// `Φ^{-1} ε`.
pub fn generate_dataset<R: Rng + ?Sized>(k_true: &Matrix, n: usize, rng: &mut R) -> Result<Dataset> {
    let phi = chol_upper(k_true)?.into_inner();
    let p = phi.nrows();
    let mut rows = Matrix::zeros(n, p);
    for r in 0..n {
        let eps: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        for i in (0..p).rev() {
            let mut s = eps[i];
            for l in i + 1..p {
                s -= phi[(i, l)] * rows[(r, l)];
            }
            rows[(r, i)] = s / phi[(i, i)];
        }
    }
    Ok(Dataset {
        rows,
        variable_names: None,
    })
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(n, m, |i, j| rows[i][j])
}

/// A graph with an attached probability or frequency. Edges are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphWeight {
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl GraphWeight {
    pub fn from_pairs(list: &[(Graph, f64)]) -> Vec<GraphWeight> {
        list.iter()
            .map(|(g, w)| GraphWeight {
                edges: g.edge_list(),
                weight: *w,
            })
            .collect()
    }
}

/// Per-chain DRJ output embedded in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub stream: u64,
    pub edge_prob: Vec<Vec<f64>>,
    pub accept_rate: f64,
    pub n_recorded: u64,
}

/// JSON report written by every CLI command. Inputs are echoed so a run can
/// be repeated; `elapsed_seconds` is the only field that varies between
/// identical runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub data_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dmat_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub burnin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chains: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha_variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub engine: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub centered: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge_prob: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accept_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_k: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub var_k: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_freq: Option<Vec<GraphWeight>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_posterior: Option<Vec<GraphWeight>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_chain: Option<Vec<ChainReport>>,
    pub elapsed_seconds: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
