//! CSV output with 17 significant digits, and profile input for `compare`.

use std::fs::File;
use std::path::Path;

use urel_core::dgsem::{node_coordinates, CartesianMesh, DgField, EntropyRecord, LglOperator};
use urel_core::radial::RadialProfile;
use urel_core::state::lorentz_velocity;

use crate::error::{BenchError, Result};

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| BenchError::csv(path, e))
}

fn write_rows<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| BenchError::csv(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt))
            .map_err(|e| BenchError::csv(path, e))?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

/// One row per node: `t,x1,x2[,x3],p,v1,v2[,v3],alpha`.
pub fn write_snapshot<const D: usize>(
    path: &Path,
    t: f64,
    mesh: &CartesianMesh<f64, D>,
    op: &LglOperator<f64>,
    field: &DgField<f64, D>,
    alpha: &[f64],
) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=D).map(|k| format!("x{k}")));
    header.push("p".into());
    header.extend((1..=D).map(|k| format!("v{k}")));
    header.push("alpha".into());
    let prims = field.prims()?;
    let npe = field.nodes_per_element();
    let rows = prims.iter().enumerate().map(|(n, s)| {
        let (e, l) = (n / npe, n % npe);
        let mut row = vec![t];
        row.extend(node_coordinates(mesh, op, e, l));
        row.push(s.pressure());
        row.extend(lorentz_velocity(s));
        row.push(alpha[e]);
        row
    });
    write_rows(path, &header, rows)
}

/// `t,S,dSdt`.
pub fn write_entropy_log(path: &Path, log: &[EntropyRecord<f64>]) -> Result<()> {
    let header = ["t", "S", "dSdt"].map(String::from);
    write_rows(path, &header, log.iter().map(|r| vec![r.t, r.entropy, r.rate]))
}

/// `t,x,p,v`, one row per (profile, cell).
pub fn write_radial_profiles(path: &Path, profiles: &[RadialProfile<f64>]) -> Result<()> {
    let header = ["t", "x", "p", "v"].map(String::from);
    let rows = profiles.iter().flat_map(|pr| {
        (0..pr.x.len()).map(move |i| vec![pr.t, pr.x[i], pr.p[i], pr.v[i]])
    });
    write_rows(path, &header, rows)
}

/// `x,p,v`.
pub fn write_reference(path: &Path, x: &[f64], p: &[f64], v: &[f64]) -> Result<()> {
    let header = ["x", "p", "v"].map(String::from);
    write_rows(path, &header, (0..x.len()).map(|i| vec![x[i], p[i], v[i]]))
}

/// `t,p` history.
pub fn write_history(path: &Path, history: &[(f64, f64)]) -> Result<()> {
    let header = ["t", "p"].map(String::from);
    write_rows(path, &header, history.iter().map(|&(t, p)| vec![t, p]))
}

/// Radial profile read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
}

/// Reads `x,p,v` columns from a profile or reference CSV. When a `t` column
/// is present only the rows of the last time are kept.
pub fn read_profile(path: &Path) -> Result<Profile> {
    let mut r = csv::Reader::from_path(path).map_err(|e| BenchError::csv(path, e))?;
    let headers = r.headers().map_err(|e| BenchError::csv(path, e))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(ix), Some(ip), Some(iv)) = (col("x"), col("p"), col("v")) else {
        return Err(BenchError::Invalid(format!(
            "{}: need columns x, p and v",
            path.display()
        )));
    };
    let it = col("t");
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| BenchError::csv(path, e))?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| BenchError::Invalid(format!("{}: bad number in row {:?}", path.display(), rec)))
        };
        let t = match it {
            Some(i) => get(i)?,
            None => 0.0,
        };
        rows.push((t, get(ix)?, get(ip)?, get(iv)?));
    }
    let t_last = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Profile {
        x: Vec::new(),
        p: Vec::new(),
        v: Vec::new(),
    };
    for (t, x, p, v) in rows {
        if t == t_last {
            out.x.push(x);
            out.p.push(p);
            out.v.push(v);
        }
    }
    Ok(out)
}
