//! Data files shipped with the crate.
//!
//! Files are embedded at compile time. Setting `QLEGO_FIXTURES` to a
//! directory makes every lookup read from that directory instead.

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "QLEGO_FIXTURES";

macro_rules! embed {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name)))),*]
    };
}

/// `(relative path, contents)` of every embedded fixture.
pub const EMBEDDED: &[(&str, &str)] = embed!(
    "appendix/DM13.txt",
    "appendix/BN13A.txt",
    "appendix/BN13B.txt",
    "appendix/BN17.txt",
    "scripts/t422.jsonl",
    "scripts/t512.jsonl",
    "scripts/t642.jsonl",
    "scripts/steane_7.jsonl",
    "scripts/concat_21.jsonl",
    "reference_values.json",
);

pub fn read(name: &str) -> Result<String> {
    if let Some(dir) = std::env::var_os(ENV_VAR) {
        let path = std::path::Path::new(&dir).join(name);
        return std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())));
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| Error::Io(format!("no fixture named {name}")))
}
