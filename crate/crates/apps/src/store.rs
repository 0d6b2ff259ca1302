//! On-disk instances: MatrixMarket matrices next to a `key=value` header.

use std::path::Path;

use rsplit::io::{self, InstanceHeader};
use rsplit::Matrix;

use crate::Result;

pub const HEADER_FILE: &str = "instance.txt";

/// Writes `header` and each named matrix as `<name>.mtx` under `dir`.
pub fn save_instance(dir: &Path, header: &InstanceHeader, matrices: &[(&str, &Matrix)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io::IoError::File { path: dir.display().to_string(), source: e })?;
    io::write_file(&dir.join(HEADER_FILE), io::write_instance_header(header).as_bytes())?;
    for (name, m) in matrices {
        io::write_file(&dir.join(format!("{name}.mtx")), io::write_matrix_market_array(m).as_bytes())?;
    }
    Ok(())
}

pub fn load_header(dir: &Path) -> Result<InstanceHeader> {
    let text = read_text(&dir.join(HEADER_FILE))?;
    Ok(io::parse_instance_header(&text)?)
}

pub fn load_matrix(path: &Path) -> Result<Matrix> {
    Ok(io::read_matrix_market(&read_text(path)?)?.0)
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = io::read_file(path)?;
    String::from_utf8(bytes).map_err(|_| crate::AppError::Invalid(format!("{} is not UTF-8", path.display())))
}
