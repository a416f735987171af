//! Bundled example data, compiled into the binary.

use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::io;
use crate::seed::{FixedData, Seed};

const FILES: &[(&str, &str)] = &[
    (
        "running-example",
        include_str!("../fixtures/running-example.json"),
    ),
    ("a2", include_str!("../fixtures/a2.json")),
    ("kronecker", include_str!("../fixtures/kronecker.json")),
    (
        "gr36-valuations",
        include_str!("../fixtures/gr36-valuations.json"),
    ),
    (
        "gt-tableau-n13",
        include_str!("../fixtures/gt-tableau-n13.json"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Result<Value> {
    let (_, text) = FILES.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        Error::BadParams(format!(
            "unknown fixture {name:?}; known: {}",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    io::parse_json(text)
}

/// The seed stored in a seed fixture.
pub fn seed(name: &str) -> Result<Seed> {
    io::seed_from_json(&get(name)?)
}

pub fn fixed_data(name: &str) -> Result<Arc<FixedData>> {
    Ok(seed(name)?.fixed_arc().clone())
}
