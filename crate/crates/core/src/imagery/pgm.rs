//! Binary PGM (`P5`) with maxval up to 255.

use super::{GrayImage, ImageError};

pub(super) fn encode(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Reads the next header token, skipping whitespace and `#` comments.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8], ImageError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(ImageError::Decode("truncated PGM header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Ok(&bytes[start..*pos])
}

fn number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize, ImageError> {
    let tok = token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ImageError::Decode(format!("bad PGM {what}")))
}

pub(super) fn decode(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut pos = 0;
    if token(bytes, &mut pos)? != b"P5" {
        return Err(ImageError::UnsupportedFormat("not a binary PGM".into()));
    }
    let cols = number(bytes, &mut pos, "width")?;
    let rows = number(bytes, &mut pos, "height")?;
    let maxval = number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedFormat(format!(
            "PGM maxval {maxval} (only 8-bit supported)"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let n = rows * cols;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| ImageError::Decode(format!("PGM raster shorter than {n} bytes")))?;
    Ok(GrayImage::from_u8(rows, cols, raster, maxval as u16))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_is_one() {
        let img = decode(&encode(2, 3, &[255; 6])).unwrap();
        assert_eq!((img.rows(), img.cols()), (2, 3));
        assert!(img.data().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn level_51_is_one_fifth() {
        let img = decode(&encode(1, 1, &[51])).unwrap();
        assert_eq!(img.data()[0], 0.2);
    }

    #[test]
    fn header_comments_and_maxval() {
        let mut bytes = b"P5 # comment\n# another\n2 1\n# c\n15\n".to_vec();
        bytes.extend_from_slice(&[0, 15]);
        let img = decode(&bytes).unwrap();
        assert_eq!(img.data(), [0.0, 1.0]);
    }

    #[test]
    fn rejects_truncated_and_wide() {
        assert!(matches!(
            decode(b"P5\n4 4\n255\n\x00\x01"),
            Err(ImageError::Decode(_))
        ));
        assert!(matches!(
            decode(b"P5\n1 1\n65535\n\x00\x01"),
            Err(ImageError::UnsupportedFormat(_))
        ));
    }
}
