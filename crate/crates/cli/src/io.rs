use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use secacc_core::sim::Workload;
use secacc_core::tiling::parse_topology;
use secacc_core::workloads;

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("staging in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A built-in workload name or a topology CSV path.
pub fn load_workload(spec: &str) -> Result<Workload> {
    let path = PathBuf::from(spec);
    if !path.exists() {
        if let Some(csv) = workloads::builtin_csv(spec) {
            return Ok(Workload::new(spec, parse_topology(csv)?)?);
        }
    }
    let text = read(&path)?;
    let layers = parse_topology(&text).with_context(|| format!("in {}", path.display()))?;
    let name = path.file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Workload::new(&name, layers)?)
}

/// Keeps file names portable.
pub fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}
