//! Text and binary formats: MatrixMarket, sign stacks, PGM, trace CSV and
//! the small key=value files used by the drivers.
//!
//! Every parser rejects malformed input with an error and never allocates
//! more than [`MAX_ELEMENTS`] values.

mod mm;
mod pgm;
mod signs;
mod text;

pub use mm::{read_matrix_market, write_matrix_market_array, write_matrix_market_coordinate, MmFormat};
pub use pgm::{read_pgm, write_pgm, GrayImage, PgmEncoding};
pub use signs::{read_hadamard_stack, write_hadamard_stack};
pub use text::{
    parse_instance_header, parse_partition, parse_schedule, parse_trace_csv, write_instance_header, write_partition,
    InstanceHeader, Schedule,
};

/// Cap on the number of values any parser will allocate.
pub const MAX_ELEMENTS: usize = 1 << 24;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Reads a whole file, naming the path on failure.
pub fn read_file(path: &std::path::Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// Writes a whole file, naming the path on failure.
pub fn write_file(path: &std::path::Path, data: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, data).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

fn checked_size(rows: usize, cols: usize, line: usize) -> Result<usize, IoError> {
    // a zero dimension must not let the other one run unbounded
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_ELEMENTS && rows <= MAX_ELEMENTS && cols <= MAX_ELEMENTS => Ok(n),
        _ => Err(parse_err(line, format!("size {rows}x{cols} exceeds the element cap"))),
    }
}
