//! 8x8 bitmap text for image annotations.

use font8x8::legacy::BASIC_LEGACY;

/// Glyph cell size in pixels.
pub const GLYPH: usize = 8;

pub fn text_width(text: &str) -> usize {
    text.chars().count() * GLYPH
}

/// Draws `text` with its top-left corner at `(x, y)` into a row-major 8-bit
/// raster of the given width, clipping at the raster edges. Characters
/// outside basic ASCII render as `?`.
pub fn draw_text(pixels: &mut [u8], width: usize, x: usize, y: usize, text: &str, level: u8) {
    let height = pixels.len() / width;
    for (k, ch) in text.chars().enumerate() {
        let code = if ch.is_ascii() { ch as usize } else { b'?' as usize };
        let glyph = BASIC_LEGACY[code];
        for (dy, bits) in glyph.iter().enumerate() {
            for dx in 0..GLYPH {
                if bits & (1 << dx) == 0 {
                    continue;
                }
                let (px, py) = (x + k * GLYPH + dx, y + dy);
                if px < width && py < height {
                    pixels[py * width + px] = level;
                }
            }
        }
    }
}
