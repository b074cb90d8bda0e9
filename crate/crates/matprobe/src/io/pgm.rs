//! PGM (P2 ASCII / P5 binary) grayscale images, maxval 255 or 65535. Pixel
//! values map to [0,1] grid functions; writing clamps and rounds.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major samples in [0, 1].
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Image> {
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "image data length {} != {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Image { width, height, pixels })
    }
}

fn read_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut tok = String::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        match r.read_exact(&mut byte) {
            Ok(()) => {}
            Err(e) => {
                if tok.is_empty() {
                    return Err(Error::Io(e));
                }
                return Ok(tok);
            }
        }
        let c = byte[0] as char;
        if in_comment {
            if c == '\n' {
                in_comment = false;
            }
            continue;
        }
        if c == '#' {
            in_comment = true;
            continue;
        }
        if c.is_whitespace() {
            if tok.is_empty() {
                continue;
            }
            return Ok(tok);
        }
        tok.push(c);
    }
}

pub fn read_pgm(path: &Path) -> Result<Image> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let magic = read_token(&mut r)?;
    if magic != "P2" && magic != "P5" {
        return Err(Error::Parse(format!("not a PGM file (magic {magic:?})")));
    }
    let width: usize =
        read_token(&mut r)?.parse().map_err(|_| Error::Parse("bad PGM width".into()))?;
    let height: usize =
        read_token(&mut r)?.parse().map_err(|_| Error::Parse("bad PGM height".into()))?;
    let maxval: u32 =
        read_token(&mut r)?.parse().map_err(|_| Error::Parse("bad PGM maxval".into()))?;
    if width == 0 || height == 0 {
        return Err(Error::Parse("empty PGM image".into()));
    }
    if maxval != 255 && maxval != 65535 {
        return Err(Error::Parse(format!("unsupported PGM maxval {maxval}")));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if magic == "P2" {
        for _ in 0..count {
            let v: u32 = read_token(&mut r)?
                .parse()
                .map_err(|_| Error::Parse("bad PGM sample".into()))?;
            pixels.push(v.min(maxval) as f64 / maxval as f64);
        }
    } else if maxval == 255 {
        let mut buf = vec![0u8; count];
        r.read_exact(&mut buf)?;
        pixels.extend(buf.iter().map(|&b| b as f64 / 255.0));
    } else {
        let mut buf = vec![0u8; count * 2];
        r.read_exact(&mut buf)?;
        // big-endian per the format
        pixels.extend(
            buf.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0),
        );
    }
    Image::new(width, height, pixels)
}

/// Deterministic grayscale test pattern (smooth waves over hard diagonal
/// edges) used by the foveation demo and tests when no photograph is at
/// hand.
pub fn synthetic_image(side: usize) -> Image {
    let mut pixels = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let x = i as f64 / side as f64;
            let y = j as f64 / side as f64;
            let wave = 0.25
                * (14.0 * std::f64::consts::PI * x).sin()
                * (10.0 * std::f64::consts::PI * y).cos();
            let edges = 0.25 * (6.0 * std::f64::consts::PI * (x + y)).sin().signum();
            pixels.push((0.5 + wave + edges).clamp(0.0, 1.0));
        }
    }
    Image { width: side, height: side, pixels }
}

/// Write binary (P5) PGM with maxval 255; values are clamped to [0,1].
pub fn write_pgm(path: &Path, image: &Image) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "P5")?;
    writeln!(f, "{} {}", image.width, image.height)?;
    writeln!(f, "255")?;
    let bytes: Vec<u8> = image
        .pixels
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    f.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        let img = Image::new(3, 2, vec![0.0, 0.5, 1.0, 0.25, 0.75, 0.1]).unwrap();
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(back.width, 3);
        assert_eq!(back.height, 2);
        for (a, b) in back.pixels.iter().zip(&img.pixels) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn p2_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        std::fs::write(&path, "P2 # comment\n2 2\n255\n0 128\n# mid comment\n255 64\n").unwrap();
        let img = read_pgm(&path).unwrap();
        assert_eq!(img.width, 2);
        assert!((img.pixels[1] - 128.0 / 255.0).abs() < 1e-12);
        assert!((img.pixels[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p5_16bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.pgm");
        let mut data: Vec<u8> = b"P5\n2 1\n65535\n".to_vec();
        data.extend_from_slice(&[0x80, 0x00, 0xFF, 0xFF]);
        std::fs::write(&path, data).unwrap();
        let img = read_pgm(&path).unwrap();
        assert!((img.pixels[0] - 0x8000 as f64 / 65535.0).abs() < 1e-12);
        assert!((img.pixels[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");
        std::fs::write(&path, "P7\n1 1\n255\n0").unwrap();
        assert!(read_pgm(&path).is_err());
    }
}
