//! Presentations shipped with the tool. Inputs that do not exist on disk
//! are looked up here by file stem, so `corpus/sl2_z0.strat` works from any
//! directory.

use std::path::Path;

use crate::error::CliError;

const CORPUS: &[(&str, &str)] = &[
    ("sl2_z0", include_str!("../../../corpus/sl2_z0.strat")),
    ("sl2_z1", include_str!("../../../corpus/sl2_z1.strat")),
    ("sl2_reversed", include_str!("../../../corpus/sl2_reversed.strat")),
    ("a2_quiver", include_str!("../../../corpus/a2_quiver.strat")),
    ("semisimple_pair", include_str!("../../../corpus/semisimple_pair.strat")),
    ("loop_dualnumbers", include_str!("../../../corpus/loop_dualnumbers.strat")),
];

/// `(name, file contents)` for every bundled presentation.
pub fn corpus() -> &'static [(&'static str, &'static str)] {
    CORPUS
}

pub fn lookup(name: &str) -> Option<&'static str> {
    let stem = Path::new(name).file_stem()?.to_str()?;
    CORPUS.iter().find(|(n, _)| *n == stem).map(|(_, text)| *text)
}

/// Reads `path` from disk, falling back to the bundled file of the same
/// stem.
pub fn read_input(path: &str) -> Result<String, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(source) => lookup(path).map(str::to_owned).ok_or(CliError::Io {
            path: path.to_owned(),
            source,
        }),
    }
}
