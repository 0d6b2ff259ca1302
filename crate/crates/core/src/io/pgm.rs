use super::{checked_size, IoError};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// `P2`
    Ascii,
    /// `P5`
    Binary,
}

/// Grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl GrayImage {
    /// Intensities scaled to `[0, 1]`, one row per image row.
    pub fn to_matrix(&self) -> Matrix {
        let s = f64::from(self.maxval);
        Matrix::from_fn(self.height, self.width, |i, j| f64::from(self.pixels[i * self.width + j]) / s)
    }

    /// Clamps to `[0, 1]` and quantizes to `maxval` levels.
    pub fn from_matrix(m: &Matrix, maxval: u16) -> Self {
        let maxval = maxval.max(1);
        let s = f64::from(maxval);
        let mut pixels = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
                pixels.push((v * s).round() as u16);
            }
        }
        GrayImage { width: m.ncols(), height: m.nrows(), maxval, pixels }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let c = self.data[self.pos];
            if c == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, IoError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos || self.pos - start > 9 {
            return Err(IoError::Format(format!("PGM: bad {what} at byte {start}")));
        }
        Ok(std::str::from_utf8(&self.data[start..self.pos]).unwrap().parse().unwrap())
    }
}

/// Parses a binary (`P5`) or ASCII (`P2`) PGM image.
pub fn read_pgm(data: &[u8]) -> Result<(GrayImage, PgmEncoding), IoError> {
    let encoding = match data.get(..2) {
        Some(b"P2") => PgmEncoding::Ascii,
        Some(b"P5") => PgmEncoding::Binary,
        _ => return Err(IoError::Format("PGM: missing P2/P5 magic".into())),
    };
    let mut c = Cursor { data, pos: 2 };
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(IoError::Format("PGM: empty image".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(IoError::Format(format!("PGM: maxval {maxval} outside 1..=65535")));
    }
    let count = checked_size(width, height, 0)?;
    let mut pixels = Vec::with_capacity(count);
    match encoding {
        PgmEncoding::Ascii => {
            for _ in 0..count {
                let v = c.number("pixel")?;
                if v > maxval {
                    return Err(IoError::Format(format!("PGM: pixel {v} above maxval {maxval}")));
                }
                pixels.push(v as u16);
            }
            c.skip_space_and_comments();
            if c.pos != data.len() {
                return Err(IoError::Format("PGM: trailing data".into()));
            }
        }
        PgmEncoding::Binary => {
            // exactly one whitespace byte separates the header from the raster
            match data.get(c.pos) {
                Some(b) if b.is_ascii_whitespace() => c.pos += 1,
                _ => return Err(IoError::Format("PGM: missing raster separator".into())),
            }
            let bytes = if maxval < 256 { 1 } else { 2 };
            let raster = &data[c.pos..];
            if raster.len() != count * bytes {
                return Err(IoError::Format(format!(
                    "PGM: raster has {} bytes, expected {}",
                    raster.len(),
                    count * bytes
                )));
            }
            for chunk in raster.chunks_exact(bytes) {
                let v = if bytes == 1 { u16::from(chunk[0]) } else { u16::from_be_bytes([chunk[0], chunk[1]]) };
                if usize::from(v) > maxval {
                    return Err(IoError::Format(format!("PGM: pixel {v} above maxval {maxval}")));
                }
                pixels.push(v);
            }
        }
    }
    Ok((GrayImage { width, height, maxval: maxval as u16, pixels }, encoding))
}

pub fn write_pgm(img: &GrayImage, encoding: PgmEncoding) -> Vec<u8> {
    let magic = if encoding == PgmEncoding::Ascii { "P2" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    match encoding {
        PgmEncoding::Ascii => {
            for row in img.pixels.chunks(img.width.max(1)) {
                let line: Vec<String> = row.iter().map(u16::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Binary => {
            for &p in &img.pixels {
                if img.maxval < 256 {
                    out.push(p as u8);
                } else {
                    out.extend_from_slice(&p.to_be_bytes());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(maxval: u16) -> GrayImage {
        GrayImage { width: 3, height: 2, maxval, pixels: vec![0, 1, 2, maxval, maxval / 2, 7] }
    }

    #[test]
    fn roundtrips() {
        for maxval in [255, 1000] {
            for enc in [PgmEncoding::Ascii, PgmEncoding::Binary] {
                let img = sample(maxval);
                assert_eq!(read_pgm(&write_pgm(&img, enc)).unwrap(), (img, enc));
            }
        }
    }

    #[test]
    fn header_comments() {
        let data = b"P2\n# made by hand\n2 1 # inline\n9\n3 9\n";
        let (img, _) = read_pgm(data).unwrap();
        assert_eq!(img.pixels, vec![3, 9]);
    }

    #[test]
    fn rejects_malformed() {
        for data in [&b"P3\n1 1\n1\n0\n"[..], b"P2\n1 1\n5\n6\n", b"P5\n2 1\n255\n\x01", b"P2\n0 1\n1\n", b"P2\n1 1\n70000\n1\n"] {
            assert!(read_pgm(data).is_err());
        }
    }

    #[test]
    fn matrix_conversion() {
        let img = sample(255);
        let back = GrayImage::from_matrix(&img.to_matrix(), 255);
        assert_eq!(back, img);
    }
}
