use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use tempfile::NamedTempFile;

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
/// A failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// Parses `k=v,k=v` into named parameters.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((k, v)) = item.split_once('=') else {
            bail!("parameter `{item}` is not of the form name=value");
        };
        let v: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("parameter `{}` has non-numeric value `{v}`", k.trim()))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            bail!("parameter `{}` given twice", k.trim());
        }
    }
    Ok(out)
}

/// Parses a grid override `name=v1,v2,...`.
pub fn parse_grid_axis(text: &str) -> Result<(String, Vec<f64>)> {
    let Some((k, vs)) = text.split_once('=') else {
        bail!("grid override `{text}` is not of the form name=v1,v2,...");
    };
    let values = vs
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("grid value `{v}` for `{k}` is not a number")))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("grid override for `{k}` lists no values");
    }
    Ok((k.trim().to_string(), values))
}

/// Reads numeric columns from a CSV file with a header row; lines starting with
/// `#` are ignored.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let index = names
        .iter()
        .map(|name| {
            headers.iter().position(|h| h == *name).with_context(|| {
                format!(
                    "{} has no column `{name}` (columns: {})",
                    path.display(),
                    headers.iter().collect::<Vec<_>>().join(", ")
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        for (col, &i) in cols.iter_mut().zip(&index) {
            let field = record.get(i).unwrap_or("");
            let v: f64 = field
                .parse()
                .with_context(|| format!("{} row {}: `{field}` is not a number", path.display(), line + 1))?;
            col.push(v);
        }
    }
    Ok(cols)
}

/// First header of a CSV file (skipping `#` comments).
pub fn first_column(path: &Path) -> Result<String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    match reader.headers()?.get(0) {
        Some(h) if !h.is_empty() => Ok(h.to_string()),
        _ => bail!("{} has no header row", path.display()),
    }
}
