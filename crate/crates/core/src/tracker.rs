//! Frame-based pointing measurement pipeline: grayscale frame ingestion,
//! laser-footprint centroiding, pixel-to-meter calibration against a
//! vibration-free reference footprint, and displacement series extraction.
//!
//! Frames are 8-bit binary portable graymaps (P5); lexicographic filename
//! order defines frame order. Image coordinates follow the usual raster
//! convention: x along columns, y along rows (downward).

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::pointing::{PointingSample, PointingSeries};

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("bad frame {path}: {reason}")]
    BadFrame { path: PathBuf, reason: String },
    #[error("calibration failed: {0}")]
    CalibrationFailure(String),
    #[error("insufficient data: need at least {needed} detections, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// One grayscale frame.
#[derive(Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Row-major 8-bit intensities, length = width·height.
    pub pixels: Vec<u8>,
    /// Position in the sequence.
    pub index: usize,
    /// Sequence frame rate, Hz.
    pub fps: f64,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("index", &self.index)
            .field("fps", &self.fps)
            .finish()
    }
}

impl Frame {
    pub fn new(
        width: usize,
        height: usize,
        pixels: Vec<u8>,
        index: usize,
        fps: f64,
    ) -> Result<Self, TrackerError> {
        if pixels.len() != width * height {
            return Err(TrackerError::InvalidParameter {
                name: "pixels",
                value: pixels.len() as f64,
            });
        }
        if !(fps > 0.0) {
            return Err(TrackerError::InvalidParameter {
                name: "fps",
                value: fps,
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
            index,
            fps,
        })
    }

    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Pixel-to-meter conversion derived from a reference footprint of known
/// physical diameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub meters_per_pixel: f64,
    pub ref_diameter_px: f64,
    pub ref_diameter_m: f64,
}

impl Calibration {
    /// Direct construction when the scale is already known.
    pub fn from_scale(meters_per_pixel: f64) -> Result<Self, TrackerError> {
        if !(meters_per_pixel > 0.0) {
            return Err(TrackerError::InvalidParameter {
                name: "meters_per_pixel",
                value: meters_per_pixel,
            });
        }
        Ok(Self {
            meters_per_pixel,
            ref_diameter_px: 1.0,
            ref_diameter_m: meters_per_pixel,
        })
    }
}

/// Intensity-weighted centroid over pixels at or above `threshold`, or
/// `None` when no pixel passes. Coordinates are fractional pixels.
pub fn detect_centroid(frame: &Frame, threshold: u8) -> Option<(f64, f64)> {
    let mut weight = 0.0;
    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    for y in 0..frame.height {
        for x in 0..frame.width {
            let v = frame.pixel(x, y);
            if v >= threshold {
                let w = v as f64;
                weight += w;
                sum_x += w * x as f64;
                sum_y += w * y as f64;
            }
        }
    }
    if weight == 0.0 {
        None
    } else {
        Some((sum_x / weight, sum_y / weight))
    }
}

/// Measures the reference footprint's diameter as the inclusive pixel extent
/// of above-threshold pixels along x, averaged with the y extent, and builds
/// the conversion from its known physical diameter.
pub fn calibrate(
    ref_frame: &Frame,
    threshold: u8,
    ref_diameter_m: f64,
) -> Result<Calibration, TrackerError> {
    if !(ref_diameter_m > 0.0) {
        return Err(TrackerError::InvalidParameter {
            name: "ref_diameter_m",
            value: ref_diameter_m,
        });
    }
    let mut min_x = usize::MAX;
    let mut max_x = 0_usize;
    let mut min_y = usize::MAX;
    let mut max_y = 0_usize;
    let mut any = false;
    for y in 0..ref_frame.height {
        for x in 0..ref_frame.width {
            if ref_frame.pixel(x, y) >= threshold {
                any = true;
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
        }
    }
    if !any {
        return Err(TrackerError::CalibrationFailure(
            "no pixel above threshold in the reference frame".into(),
        ));
    }
    let extent_x = (max_x - min_x + 1) as f64;
    let extent_y = (max_y - min_y + 1) as f64;
    let ref_diameter_px = (extent_x + extent_y) / 2.0;
    Ok(Calibration {
        meters_per_pixel: ref_diameter_m / ref_diameter_px,
        ref_diameter_px,
        ref_diameter_m,
    })
}

/// Zero-displacement reference on the receiver plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boresight {
    /// The first detected centroid.
    FirstFrame,
    /// The mean of all detected centroids (removes the series bias).
    #[default]
    Mean,
}

impl std::str::FromStr for Boresight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first-frame" => Ok(Boresight::FirstFrame),
            "mean" => Ok(Boresight::Mean),
            other => Err(format!("unknown boresight rule {other:?}")),
        }
    }
}

/// One extracted lateral displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisplacementSample {
    pub frame_index: usize,
    pub t_s: f64,
    pub dx_m: f64,
    pub dy_m: f64,
}

/// Lateral displacements at the receiver, in meters. Angles require an
/// explicit transmitter-to-receiver distance; see
/// [`displacement_to_pointing`].
#[derive(Clone, Debug)]
pub struct DisplacementSeries {
    pub samples: Vec<DisplacementSample>,
    /// Frame indices where no footprint was detected.
    pub gaps: Vec<usize>,
    pub meters_per_pixel: f64,
    pub fps: f64,
}

/// Per-frame lateral displacement (centroid − boresight)·meters_per_pixel,
/// with t = index / fps. Frames without a detection are recorded as gaps and
/// excluded.
pub fn extract_series(
    frames: &[Frame],
    cal: &Calibration,
    threshold: u8,
    boresight: Boresight,
) -> Result<DisplacementSeries, TrackerError> {
    let fps = frames
        .first()
        .map(|f| f.fps)
        .ok_or(TrackerError::InsufficientData { needed: 2, got: 0 })?;
    let detections: Vec<(usize, (f64, f64))> = frames
        .iter()
        .filter_map(|f| detect_centroid(f, threshold).map(|c| (f.index, c)))
        .collect();
    if detections.len() < 2 {
        return Err(TrackerError::InsufficientData {
            needed: 2,
            got: detections.len(),
        });
    }
    let gaps = frames
        .iter()
        .filter(|f| detect_centroid(f, threshold).is_none())
        .map(|f| f.index)
        .collect();
    let (ref_x, ref_y) = match boresight {
        Boresight::FirstFrame => detections[0].1,
        Boresight::Mean => {
            let n = detections.len() as f64;
            (
                detections.iter().map(|(_, c)| c.0).sum::<f64>() / n,
                detections.iter().map(|(_, c)| c.1).sum::<f64>() / n,
            )
        }
    };
    let samples = detections
        .into_iter()
        .map(|(frame_index, (cx, cy))| DisplacementSample {
            frame_index,
            t_s: frame_index as f64 / fps,
            dx_m: (cx - ref_x) * cal.meters_per_pixel,
            dy_m: (cy - ref_y) * cal.meters_per_pixel,
        })
        .collect();
    Ok(DisplacementSeries {
        samples,
        gaps,
        meters_per_pixel: cal.meters_per_pixel,
        fps,
    })
}

/// Small-angle conversion: 1000 · lateral / distance, in mrad.
pub fn angular_from_lateral(lateral_m: f64, distance_m: f64) -> Result<f64, TrackerError> {
    if !(distance_m > 0.0) {
        return Err(TrackerError::InvalidParameter {
            name: "distance_m",
            value: distance_m,
        });
    }
    Ok(1e3 * lateral_m / distance_m)
}

/// Converts lateral displacements to a full pointing series at the given
/// transmitter-to-receiver distance.
pub fn displacement_to_pointing(
    series: &DisplacementSeries,
    distance_m: f64,
) -> Result<PointingSeries, TrackerError> {
    let samples = series
        .samples
        .iter()
        .map(|s| {
            let theta_x_mrad = angular_from_lateral(s.dx_m, distance_m)?;
            let theta_y_mrad = angular_from_lateral(s.dy_m, distance_m)?;
            Ok(PointingSample {
                t_s: s.t_s,
                theta_x_mrad,
                theta_y_mrad,
                rho_mrad: theta_x_mrad.hypot(theta_y_mrad),
                lateral_x_m: s.dx_m,
                lateral_y_m: s.dy_m,
            })
        })
        .collect::<Result<Vec<_>, TrackerError>>()?;
    Ok(PointingSeries {
        link_range_m: distance_m,
        samples,
    })
}

// ---------------------------------------------------------------------------
// Portable graymap I/O and synthetic rendering
// ---------------------------------------------------------------------------

/// Reads a binary 8-bit PGM (magic `P5`, maxval ≤ 255).
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>), TrackerError> {
    let data = std::fs::read(path).map_err(|source| TrackerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |reason: &str| TrackerError::BadFrame {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    // Header: magic, width, height, maxval — tokens separated by whitespace,
    // with '#' comments running to end of line.
    let mut pos = 0_usize;
    let mut next_token = || -> Option<String> {
        while pos < data.len() {
            let b = data[pos];
            if b == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos > start {
            // Single whitespace byte after the token belongs to the header.
            let token = String::from_utf8_lossy(&data[start..pos]).into_owned();
            pos += 1;
            Some(token)
        } else {
            None
        }
    };

    let magic = next_token().ok_or_else(|| bad("missing PGM header"))?;
    if magic != "P5" {
        return Err(bad(&format!("expected binary graymap magic P5, got {magic:?}")));
    }
    let parse_dim = |tok: Option<String>, what: &str| -> Result<usize, TrackerError> {
        tok.and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| bad(&format!("invalid {what}")))
    };
    let width = parse_dim(next_token(), "width")?;
    let height = parse_dim(next_token(), "height")?;
    let maxval = parse_dim(next_token(), "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must be in 1..=255"));
    }
    let expected = width * height;
    let body = &data[pos..];
    if body.len() < expected {
        return Err(bad(&format!(
            "pixel data truncated: expected {expected} bytes, got {}",
            body.len()
        )));
    }
    Ok((width, height, body[..expected].to_vec()))
}

/// Writes a binary 8-bit PGM.
pub fn write_pgm(
    path: &Path,
    width: usize,
    height: usize,
    pixels: &[u8],
) -> Result<(), TrackerError> {
    assert_eq!(pixels.len(), width * height, "pixel buffer size mismatch");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    std::fs::write(path, out).map_err(|source| TrackerError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads every `.pgm` in a directory in lexicographic filename order.
pub fn load_frames(dir: &Path, fps: f64) -> Result<Vec<Frame>, TrackerError> {
    if !(fps > 0.0) {
        return Err(TrackerError::InvalidParameter {
            name: "fps",
            value: fps,
        });
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| TrackerError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "pgm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .enumerate()
        .map(|(index, path)| {
            let (width, height, pixels) = read_pgm(&path)?;
            Frame::new(width, height, pixels, index, fps)
        })
        .collect()
}

/// Renders a quantized Gaussian spot over a uniform background; the staple
/// synthetic frame for round-trip tests and fixtures.
pub fn render_gaussian_spot(
    width: usize,
    height: usize,
    center: (f64, f64),
    sigma_px: f64,
    peak: u8,
    background: u8,
) -> Vec<u8> {
    let two_sigma_sq = 2.0 * sigma_px * sigma_px;
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let dx = x as f64 - center.0;
            let dy = y as f64 - center.1;
            let value = background as f64
                + (peak as f64 - background as f64) * (-(dx * dx + dy * dy) / two_sigma_sq).exp();
            pixels.push(value.round().clamp(0.0, 255.0) as u8);
        }
    }
    pixels
}

/// Renders a hard-edged disc (the vibration-free reference footprint).
pub fn render_disc(
    width: usize,
    height: usize,
    center: (f64, f64),
    radius_px: f64,
    value: u8,
    background: u8,
) -> Vec<u8> {
    let r_sq = radius_px * radius_px;
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let dx = x as f64 - center.0;
            let dy = y as f64 - center.1;
            pixels.push(if dx * dx + dy * dy <= r_sq {
                value
            } else {
                background
            });
        }
    }
    pixels
}
