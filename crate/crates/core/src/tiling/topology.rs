//! Layer topology CSV in the systolic-simulator format:
//!
//! ```text
//! name, ifmap_h, ifmap_w, filter_h, filter_w, channels, num_filters, stride
//! ```
//!
//! A header row is optional and recognised by a non-numeric second column.
//! A trailing comma on each row is accepted. Shapes are normalized on load.

use super::shape::LayerShape;
use crate::error::{Error, Result};

pub const TOPOLOGY_COLUMNS: [&str; 8] = [
    "name",
    "ifmap_h",
    "ifmap_w",
    "filter_h",
    "filter_w",
    "channels",
    "num_filters",
    "stride",
];

pub fn parse_topology(text: &str) -> Result<Vec<LayerShape>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut layers = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(row + 1, e.to_string()))?;
        let line = record.position().map_or(row + 1, |p| p.line() as usize);
        let fields: Vec<&str> = record.iter().collect();
        let fields = match fields.split_last() {
            Some((&"", rest)) => rest,
            _ => &fields[..],
        };
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if layers.is_empty() && fields.get(1).is_some_and(|f| f.parse::<u64>().is_err()) {
            continue;
        }
        if fields.len() != TOPOLOGY_COLUMNS.len() {
            return Err(Error::parse(
                line,
                format!("expected {} columns, found {}", TOPOLOGY_COLUMNS.len(), fields.len()),
            ));
        }
        let mut nums = [0u64; 7];
        for (i, f) in fields[1..].iter().enumerate() {
            nums[i] = f.parse().map_err(|_| {
                Error::parse(line, format!("column `{}`: `{f}` is not a count", TOPOLOGY_COLUMNS[i + 1]))
            })?;
        }
        let [h, w, r, s, c, k, stride] = nums;
        let layer = LayerShape::conv(fields[0], h, w, r, s, c, k, stride)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        layers.push(layer.normalized());
    }
    if layers.is_empty() {
        return Err(Error::invalid("topology has no layers"));
    }
    Ok(layers)
}

pub fn format_topology(layers: &[LayerShape]) -> String {
    let mut out = TOPOLOGY_COLUMNS.join(",");
    out.push('\n');
    for l in layers {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            l.name, l.h, l.w, l.r, l.s, l.c, l.k, l.stride
        ));
    }
    out
}
