//! CSV conventions shared by all commands.
//!
//! The first header field is `schema=1` and every data row carries `1` in
//! that column. Floats are written as the shortest decimal that round-trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA_FIELD: &str = "schema=1";
pub const SCHEMA_VALUE: &str = "1";

pub fn float(x: f64) -> String {
    format!("{x:?}")
}

pub type Sink = csv::Writer<Box<dyn Write + Send>>;

/// CSV writer on `path`, or on stdout when `path` is `None`.
pub fn open(path: Option<&Path>) -> io::Result<Sink> {
    let inner: Box<dyn Write + Send> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout()),
    };
    Ok(csv::WriterBuilder::new().flexible(false).from_writer(inner))
}

/// `runs/out.csv` with seed 7 becomes `runs/out-seed7.csv`.
pub fn with_seed_suffix(path: &Path, seed: u64) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-seed{seed}"),
    };
    path.with_file_name(name)
}
