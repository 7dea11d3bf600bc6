//! Built-in layer topologies. Padded layers list the padded ifmap extent;
//! depthwise layers are lowered to one input channel and one filter per
//! channel; fully connected layers are 1x1 convolutions.

use crate::error::{Error, Result};
use crate::sim::Workload;
use crate::tiling::parse_topology;

const BUILTIN: [(&str, &str); 5] = [
    ("lenet", include_str!("../data/topologies/lenet.csv")),
    ("alexnet", include_str!("../data/topologies/alexnet.csv")),
    ("resnet18", include_str!("../data/topologies/resnet18.csv")),
    ("mobilenet", include_str!("../data/topologies/mobilenet.csv")),
    ("yolo_tiny", include_str!("../data/topologies/yolo_tiny.csv")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_csv(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, csv)| *csv)
}

pub fn builtin(name: &str) -> Result<Workload> {
    let csv = builtin_csv(name).ok_or_else(|| {
        Error::invalid(format!(
            "no built-in workload `{name}`; available: {}",
            builtin_names().join(", ")
        ))
    })?;
    Workload::new(name, parse_topology(csv)?)
}

pub fn all_builtin() -> Result<Vec<Workload>> {
    builtin_names().into_iter().map(builtin).collect()
}
