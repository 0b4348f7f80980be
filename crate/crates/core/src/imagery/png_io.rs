//! 8-bit PNG via the `png` crate. Color input is reduced to luma
//! (`0.299 R + 0.587 G + 0.114 B`); alpha is ignored.

use png::{BitDepth, ColorType, Transformations};

use super::{GrayImage, ImageError};

pub(super) const SIGNATURE: &[u8] = &[0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

fn decode_err(e: png::DecodingError) -> ImageError {
    ImageError::Decode(e.to_string())
}

pub(super) fn decode(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(Transformations::EXPAND | Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::Decode("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(decode_err)?;
    if info.bit_depth != BitDepth::Eight {
        return Err(ImageError::UnsupportedFormat(format!(
            "PNG bit depth {:?}",
            info.bit_depth
        )));
    }
    let (rows, cols) = (info.height as usize, info.width as usize);
    let channels = match info.color_type {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        other => {
            return Err(ImageError::UnsupportedFormat(format!("PNG color type {other:?}")));
        }
    };
    let data = buf[..info.buffer_size()]
        .chunks_exact(info.line_size)
        .flat_map(|line| line[..cols * channels].chunks_exact(channels))
        .map(|px| match channels {
            1 | 2 => px[0] as f64 / 255.0,
            _ => (0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64) / 255.0,
        })
        .collect();
    GrayImage::new(rows, cols, data)
}

pub(super) fn encode(rows: usize, cols: usize, pixels: &[u8]) -> Result<Vec<u8>, ImageError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, cols as u32, rows as u32);
        encoder.set_color(ColorType::Grayscale);
        encoder.set_depth(BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| ImageError::Io(std::io::Error::other(e)))?;
        writer
            .write_image_data(pixels)
            .map_err(|e| ImageError::Io(std::io::Error::other(e)))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb_png(rows: u32, cols: u32, px: [u8; 3]) -> Vec<u8> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, cols, rows);
        enc.set_color(ColorType::Rgb);
        enc.set_depth(BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        let data: Vec<u8> = (0..rows * cols).flat_map(|_| px).collect();
        w.write_image_data(&data).unwrap();
        drop(w);
        out
    }

    #[test]
    fn gray_round_trip() {
        let pixels: Vec<u8> = (0..=255).collect();
        let img = decode(&encode(16, 16, &pixels).unwrap()).unwrap();
        for (k, &x) in img.data().iter().enumerate() {
            assert_eq!(x, k as f64 / 255.0);
        }
    }

    #[test]
    fn rgb_reduced_by_luma() {
        let img = decode(&rgb_png(2, 3, [255, 255, 255])).unwrap();
        assert!(img.data().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let img = decode(&rgb_png(1, 1, [255, 0, 0])).unwrap();
        assert!((img.data()[0] - 0.299).abs() < 1e-12);
    }
}
