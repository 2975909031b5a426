//! Column files: UTF-8 CSV with a mandatory header row, `,` separator and
//! `#` comment lines allowed before the header. Floats are written with the
//! shortest representation that parses back to the same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::schema::{GridDims, Role, Schema};
use super::{FlowFieldSnapshot, StressField};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, GradientField, FEATURE_COUNT, FEATURE_NAMES};
use crate::tensor::{Mat3, SymTensor3};

/// A fully numeric CSV file held column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    source: String,
}

impl Table {
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn column(&self, header: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == header)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn require(&self, header: &str, what: &str) -> Result<&[f64]> {
        self.column(header).ok_or_else(|| {
            Error::Schema(format!(
                "{what} column not found (expected header '{header}' in {})",
                self.source
            ))
        })
    }

    /// Grid dimensions from a `# dims NX NY` comment, if present.
    pub fn dims_comment(&self) -> Option<GridDims> {
        self.comments.iter().find_map(|c| {
            let mut it = c.split_whitespace();
            (it.next()? == "dims").then_some(())?;
            let nx = it.next()?.parse().ok()?;
            let ny = it.next()?.parse().ok()?;
            Some(GridDims { nx, ny })
        })
    }

    /// Value of a `# key: value` comment.
    pub fn comment_value(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once(':')?;
            (k.trim() == key).then(|| v.trim())
        })
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let comments: Vec<String> = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#') || l.trim().is_empty())
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::Schema(format!("{source}: missing header row")));
    }
    let mut columns = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                file: source.clone(),
                row: line,
                column: headers[c].clone(),
                message: format!("'{cell}' is not a number"),
            })?;
            columns[c].push(value);
        }
    }
    Ok(Table {
        comments,
        headers,
        columns,
        source,
    })
}

/// Writes comment lines, a header and the given columns.
pub fn write_table(
    path: &Path,
    comments: &[String],
    headers: &[&str],
    columns: &[&[f64]],
) -> Result<()> {
    debug_assert_eq!(headers.len(), columns.len());
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Internal(
            "ragged columns passed to write_table".into(),
        ));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for c in comments {
        writeln!(out, "# {c}").map_err(io)?;
    }
    writeln!(out, "{}", headers.join(",")).map_err(io)?;
    let mut line = String::new();
    for r in 0..n {
        line.clear();
        for (i, col) in columns.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            push_float(&mut line, col[r]);
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Shortest round-trip decimal; integral values print without a fraction.
pub fn push_float(buf: &mut String, v: f64) {
    use std::fmt::Write as _;
    if v == 0.0 && v.is_sign_negative() {
        buf.push_str("-0");
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        let _ = write!(buf, "{}", v as i64);
    } else {
        let _ = write!(buf, "{v:?}");
    }
}

fn optional_group<'a>(table: &'a Table, schema: &Schema, roles: &[Role]) -> Option<Vec<&'a [f64]>> {
    roles
        .iter()
        .map(|r| table.column(schema.header(*r)))
        .collect()
}

/// Loads a RANS-style snapshot. Mean-flow columns are required; gradient and
/// Reynolds stress columns are picked up when present.
pub fn load_flow_csv(path: &Path, schema: &Schema) -> Result<FlowFieldSnapshot> {
    let table = read_table(path)?;
    let col = |role: Role| -> Result<Vec<f64>> {
        table
            .require(schema.header(role), role.description())
            .map(<[f64]>::to_vec)
    };
    let x = col(Role::X)?;
    let y = col(Role::Y)?;
    let u = col(Role::U)?;
    let v = col(Role::V)?;
    let p = col(Role::P)?;
    let k = col(Role::K)?;
    let epsilon = col(Role::Epsilon)?;
    let nu_t = col(Role::NuT)?;
    let d = col(Role::WallDistance)?;
    let w = table.column(schema.header(Role::W)).map(<[f64]>::to_vec);

    let dk = optional_group(&table, schema, &[Role::DkDx, Role::DkDy]);
    let file_grad_k = dk.is_some();
    let gradients = optional_group(&table, schema, &Role::MEAN_GRADIENTS).map(|g| {
        let n = x.len();
        let dw = optional_group(&table, schema, &[Role::DwDx, Role::DwDy]);
        let grad_u = (0..n)
            .map(|i| {
                let (dwdx, dwdy) = dw.as_ref().map_or((0.0, 0.0), |c| (c[0][i], c[1][i]));
                Mat3([
                    [g[0][i], g[1][i], 0.0],
                    [g[2][i], g[3][i], 0.0],
                    [dwdx, dwdy, 0.0],
                ])
            })
            .collect();
        let grad_p = (0..n).map(|i| [g[4][i], g[5][i], 0.0]).collect();
        let grad_k = match &dk {
            Some(c) => (0..n).map(|i| [c[0][i], c[1][i], 0.0]).collect(),
            None => vec![[0.0; 3]; n],
        };
        GradientField {
            grad_u,
            grad_p,
            grad_k,
        }
    });

    let stresses = optional_group(&table, schema, &Role::STRESSES).map(stress_tensors);

    let snapshot = FlowFieldSnapshot {
        tag: schema.tag.clone(),
        dims: schema.grid.or_else(|| table.dims_comment()),
        x,
        y,
        u,
        v,
        w,
        p,
        k,
        epsilon,
        nu_t,
        d,
        constants: schema.constants()?,
        gradients,
        file_grad_k,
        stresses,
    };
    snapshot.validate()?;
    Ok(snapshot)
}

fn stress_tensors(c: Vec<&[f64]>) -> Vec<SymTensor3> {
    (0..c[0].len())
        .map(|i| SymTensor3::new(c[0][i], c[1][i], c[2][i], c[3][i], c[4][i], c[5][i]))
        .collect()
}

/// Loads a high-fidelity file: coordinates plus the six Reynolds stresses.
pub fn load_stress_csv(path: &Path, schema: &Schema) -> Result<StressField> {
    let table = read_table(path)?;
    let x = table
        .require(schema.header(Role::X), Role::X.description())?
        .to_vec();
    let y = table
        .require(schema.header(Role::Y), Role::Y.description())?
        .to_vec();
    let mut cols = Vec::with_capacity(6);
    for role in Role::STRESSES {
        cols.push(table.require(
            schema.header(role),
            &format!("Reynolds stress {}", role.key()),
        )?);
    }
    let field = StressField {
        tag: schema.tag.clone(),
        x,
        y,
        stresses: stress_tensors(cols),
    };
    field.validate()?;
    Ok(field)
}

/// Writes a snapshot with canonical headers; reloading with the same
/// constants reproduces every value bit for bit.
pub fn write_flow_csv(
    snapshot: &FlowFieldSnapshot,
    path: &Path,
    comments: &[String],
) -> Result<()> {
    let mut comments = comments.to_vec();
    if let Some(d) = snapshot.dims {
        comments.push(format!("dims {} {}", d.nx, d.ny));
    }
    let mut headers: Vec<&str> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut push = |role: Role, data: Vec<f64>| {
        headers.push(role.key());
        columns.push(data);
    };
    push(Role::X, snapshot.x.clone());
    push(Role::Y, snapshot.y.clone());
    push(Role::U, snapshot.u.clone());
    push(Role::V, snapshot.v.clone());
    if let Some(w) = &snapshot.w {
        push(Role::W, w.clone());
    }
    push(Role::P, snapshot.p.clone());
    push(Role::K, snapshot.k.clone());
    push(Role::Epsilon, snapshot.epsilon.clone());
    push(Role::NuT, snapshot.nu_t.clone());
    push(Role::WallDistance, snapshot.d.clone());
    if let Some(g) = &snapshot.gradients {
        let gu = |i: usize, j: usize| g.grad_u.iter().map(|m| m.0[i][j]).collect::<Vec<_>>();
        push(Role::DuDx, gu(0, 0));
        push(Role::DuDy, gu(0, 1));
        push(Role::DvDx, gu(1, 0));
        push(Role::DvDy, gu(1, 1));
        push(Role::DwDx, gu(2, 0));
        push(Role::DwDy, gu(2, 1));
        push(Role::DpDx, g.grad_p.iter().map(|v| v[0]).collect());
        push(Role::DpDy, g.grad_p.iter().map(|v| v[1]).collect());
        if snapshot.file_grad_k {
            push(Role::DkDx, g.grad_k.iter().map(|v| v[0]).collect());
            push(Role::DkDy, g.grad_k.iter().map(|v| v[1]).collect());
        }
    }
    if let Some(s) = &snapshot.stresses {
        for (c, role) in Role::STRESSES.into_iter().enumerate() {
            push(role, s.iter().map(|t| t.components()[c]).collect());
        }
    }
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    write_table(path, &comments, &headers, &refs)
}

/// Per-point feature rows with their coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub index: Vec<usize>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub features: Vec<FeatureVector>,
    pub dims: Option<GridDims>,
}

pub fn write_features_csv(table: &FeatureTable, path: &Path, comments: &[String]) -> Result<()> {
    let mut comments = comments.to_vec();
    if let Some(d) = table.dims {
        comments.push(format!("dims {} {}", d.nx, d.ny));
    }
    let index: Vec<f64> = table.index.iter().map(|&i| i as f64).collect();
    let q: Vec<Vec<f64>> = (0..FEATURE_COUNT)
        .map(|j| table.features.iter().map(|f| f.0[j]).collect())
        .collect();
    let mut headers = vec!["index", "x", "y"];
    headers.extend(FEATURE_NAMES);
    let mut cols: Vec<&[f64]> = vec![&index, &table.x, &table.y];
    cols.extend(q.iter().map(Vec::as_slice));
    write_table(path, &comments, &headers, &cols)
}

pub fn read_features_csv(path: &Path) -> Result<FeatureTable> {
    let t = read_table(path)?;
    let index = t.require("index", "point index")?;
    let x = t.require("x", "x coordinate")?.to_vec();
    let y = t.require("y", "y coordinate")?.to_vec();
    let mut q = Vec::with_capacity(FEATURE_COUNT);
    for name in FEATURE_NAMES {
        q.push(t.require(name, &format!("feature {name}"))?);
    }
    let features = (0..t.len())
        .map(|r| FeatureVector(std::array::from_fn(|j| q[j][r])))
        .collect();
    Ok(FeatureTable {
        index: to_indices(index, &t)?,
        x,
        y,
        features,
        dims: t.dims_comment(),
    })
}

fn to_indices(col: &[f64], t: &Table) -> Result<Vec<usize>> {
    col.iter()
        .enumerate()
        .map(|(r, &v)| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parse {
                    file: t.source().to_string(),
                    row: r + 1,
                    column: "index".into(),
                    message: format!("'{v}' is not a point index"),
                })
            }
        })
        .collect()
}

/// One row of the targets file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetRecord {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub x_bary_rans: f64,
    pub y_bary_rans: f64,
    pub x_bary_hifi: f64,
    pub y_bary_hifi: f64,
    pub delta_b: f64,
}

const TARGET_HEADERS: [&str; 8] = [
    "index",
    "x",
    "y",
    "x_bary_rans",
    "y_bary_rans",
    "x_bary_hifi",
    "y_bary_hifi",
    "delta_b",
];

pub fn write_targets_csv(
    records: &[TargetRecord],
    dims: Option<GridDims>,
    path: &Path,
    comments: &[String],
) -> Result<()> {
    let mut comments = comments.to_vec();
    if let Some(d) = dims {
        comments.push(format!("dims {} {}", d.nx, d.ny));
    }
    let cols: Vec<Vec<f64>> = vec![
        records.iter().map(|r| r.index as f64).collect(),
        records.iter().map(|r| r.x).collect(),
        records.iter().map(|r| r.y).collect(),
        records.iter().map(|r| r.x_bary_rans).collect(),
        records.iter().map(|r| r.y_bary_rans).collect(),
        records.iter().map(|r| r.x_bary_hifi).collect(),
        records.iter().map(|r| r.y_bary_hifi).collect(),
        records.iter().map(|r| r.delta_b).collect(),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    write_table(path, &comments, &TARGET_HEADERS, &refs)
}

pub fn read_targets_csv(path: &Path) -> Result<Vec<TargetRecord>> {
    let t = read_table(path)?;
    let mut cols = Vec::with_capacity(TARGET_HEADERS.len());
    for h in TARGET_HEADERS {
        cols.push(t.require(h, h)?);
    }
    let index = to_indices(cols[0], &t)?;
    Ok((0..t.len())
        .map(|r| TargetRecord {
            index: index[r],
            x: cols[1][r],
            y: cols[2][r],
            x_bary_rans: cols[3][r],
            y_bary_rans: cols[4][r],
            x_bary_hifi: cols[5][r],
            y_bary_hifi: cols[6][r],
            delta_b: cols[7][r],
        })
        .collect())
}
