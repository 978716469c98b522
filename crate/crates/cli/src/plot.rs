//! Static PNG renderings of spectra and TF maps.

use std::path::Path;

use image::{ImageBuffer, Luma, Rgb, RgbImage};
use satharm::analysis::{SpectrumFrame, TFMap};
use satharm::Error;

const WIDTH: u32 = 900;
const HEIGHT: u32 = 400;
const DYNAMIC_RANGE_DB: f64 = 100.0;

fn save_err(e: image::ImageError) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Line plot of `psd_db` over frequency, top 100 dB.
pub fn spectrum_png(s: &SpectrumFrame, path: &Path) -> Result<(), Error> {
    let mut img: RgbImage = ImageBuffer::from_pixel(WIDTH, HEIGHT, Rgb([255, 255, 255]));
    let top = s.psd_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let row_of = |v: f64| {
        let frac = ((top - v) / DYNAMIC_RANGE_DB).clamp(0.0, 1.0);
        (frac * (HEIGHT - 1) as f64).round() as u32
    };
    let n = s.psd_db.len();
    for col in 0..WIDTH {
        let lo = col as usize * n / WIDTH as usize;
        let hi = ((col as usize + 1) * n / WIDTH as usize).max(lo + 1).min(n);
        let bins = &s.psd_db[lo..hi];
        let max = bins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = bins.iter().copied().fold(f64::INFINITY, f64::min);
        for y in row_of(max)..=row_of(min) {
            img.put_pixel(col, y, Rgb([20, 40, 160]));
        }
    }
    img.save(path).map_err(save_err)
}

/// Grey-scale magnitude map, time along x and frequency up the y axis.
pub fn tf_png(tf: &TFMap, path: &Path) -> Result<(), Error> {
    let (rows, cols) = (tf.rows() as u32, tf.cols() as u32);
    if rows == 0 || cols == 0 {
        return Ok(());
    }
    let top = tf
        .magnitude_db
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let img = ImageBuffer::from_fn(rows, cols, |x, y| {
        let v = tf.magnitude_db[x as usize][(cols - 1 - y) as usize];
        let level = (1.0 - (top - v) / DYNAMIC_RANGE_DB).clamp(0.0, 1.0);
        Luma([(255.0 * level) as u8])
    });
    img.save(path).map_err(save_err)
}
