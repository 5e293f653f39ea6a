//! Raster and CSV export of phase-space fields.

use crate::field::PhaseSpaceField;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Colormap {
    Gray,
    Viridis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterFormat {
    /// 16-bit binary portable graymap.
    Pgm,
    Png,
}

/// Contents of the JSON sidecar written next to every raster.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RenderInfo {
    pub min: f64,
    pub max: f64,
    #[serde(rename = "G")]
    pub g: usize,
    pub colormap: Colormap,
    pub format: RasterFormat,
    pub normalization: crate::field::Normalization,
    pub params: serde_json::Value,
    pub run_id: Option<String>,
}

// Samples of the viridis colormap at 0, 1/8, ..., 1.
const VIRIDIS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

fn viridis(t: f64) -> [u8; 3] {
    let x = t.clamp(0.0, 1.0) * 8.0;
    let i = (x.floor() as usize).min(7);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (VIRIDIS[i][c] * (1.0 - f) + VIRIDIS[i + 1][c] * f).round() as u8;
    }
    out
}

/// Min-max scaled values in `[0, 1]`, top row = largest p.
fn scaled(field: &PhaseSpaceField) -> Result<(Vec<f64>, f64, f64)> {
    if field.values.len() != field.g * field.g {
        return Err(Error::Format("field has the wrong number of values".into()));
    }
    if let Some(k) = field.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format(format!("field value {k} is not finite")));
    }
    let (lo, hi) = (field.min(), field.max());
    // Rounding noise in a constant field must not be stretched to full range.
    let span = if hi - lo <= 1e-12 * lo.abs().max(hi.abs()) { 0.0 } else { hi - lo };
    let g = field.g;
    let mut out = Vec::with_capacity(g * g);
    for row in (0..g).rev() {
        for i in 0..g {
            let v = field.at(i, row);
            out.push(if span > 0.0 { (v - lo) / span } else { 0.0 });
        }
    }
    Ok((out, lo, hi))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a failed write never leaves a partial file behind.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::invalid("output path has no file name"))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn pgm_bytes(g: usize, t: &[f64]) -> Vec<u8> {
    let mut out = format!("P5\n{g} {g}\n65535\n").into_bytes();
    for v in t {
        out.extend_from_slice(&((v * 65535.0).round() as u16).to_be_bytes());
    }
    out
}

fn png_bytes(g: usize, t: &[f64], cmap: Colormap) -> Result<Vec<u8>> {
    use image::{ImageBuffer, ImageFormat, Luma, Rgb};
    let mut buf = std::io::Cursor::new(Vec::new());
    let gg = g as u32;
    let res = match cmap {
        Colormap::Gray => ImageBuffer::<Luma<u16>, _>::from_fn(gg, gg, |x, y| {
            Luma([(t[y as usize * g + x as usize] * 65535.0).round() as u16])
        })
        .write_to(&mut buf, ImageFormat::Png),
        Colormap::Viridis => {
            ImageBuffer::<Rgb<u8>, _>::from_fn(gg, gg, |x, y| Rgb(viridis(t[y as usize * g + x as usize])))
                .write_to(&mut buf, ImageFormat::Png)
        }
    };
    res.map_err(|e| Error::Format(format!("PNG encoding: {e}")))?;
    Ok(buf.into_inner())
}

/// Renders `field` min-max scaled to `path` and writes `<path>.json` with the
/// scaling bounds. PGM output is always grayscale.
pub fn render_field(
    field: &PhaseSpaceField,
    path: &Path,
    format: RasterFormat,
    colormap: Colormap,
    run_id: Option<&str>,
) -> Result<RenderInfo> {
    let (t, min, max) = scaled(field)?;
    let (bytes, colormap) = match format {
        RasterFormat::Pgm => (pgm_bytes(field.g, &t), Colormap::Gray),
        RasterFormat::Png => (png_bytes(field.g, &t, colormap)?, colormap),
    };
    let info = RenderInfo {
        min,
        max,
        g: field.g,
        colormap,
        format,
        normalization: field.normalization,
        params: field.params.clone(),
        run_id: run_id.map(str::to_owned),
    };
    write_atomic(path, &bytes)?;
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    write_atomic(Path::new(&side), serde_json::to_string_pretty(&info)?.as_bytes())?;
    Ok(info)
}

/// `q,p,value` rows at the cell centres.
pub fn write_field_csv(field: &PhaseSpaceField, path: &Path) -> Result<()> {
    scaled(field)?;
    let mut s = String::from("q,p,value\n");
    for j in 0..field.g {
        for i in 0..field.g {
            s.push_str(&format!(
                "{},{},{:e}\n",
                PhaseSpaceField::center(field.g, i),
                PhaseSpaceField::center(field.g, j),
                field.at(i, j)
            ));
        }
    }
    write_atomic(path, s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_renders_uniform() {
        let dir = tempfile::tempdir().unwrap();
        let f = PhaseSpaceField::from_fn(5, |_, _| 2.5);
        let p = dir.path().join("c.pgm");
        let info = render_field(&f, &p, RasterFormat::Pgm, Colormap::Gray, Some("r1")).unwrap();
        assert_eq!((info.min, info.max), (2.5, 2.5));
        let bytes = std::fs::read(&p).unwrap();
        let header = b"P5\n5 5\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(bytes[header.len()..].iter().all(|&b| b == 0));
        let side: RenderInfo = serde_json::from_slice(&std::fs::read(dir.path().join("c.pgm.json")).unwrap()).unwrap();
        assert_eq!(side, info);
    }

    #[test]
    fn rendering_is_deterministic_and_oriented() {
        let dir = tempfile::tempdir().unwrap();
        let f = PhaseSpaceField::from_fn(8, |q, p| q + 3.0 * p);
        for fmt in [RasterFormat::Pgm, RasterFormat::Png] {
            let a = dir.path().join("a.img");
            let b = dir.path().join("b.img");
            render_field(&f, &a, fmt, Colormap::Viridis, None).unwrap();
            render_field(&f, &b, fmt, Colormap::Viridis, None).unwrap();
            assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        }
        let p = dir.path().join("o.pgm");
        render_field(&f, &p, RasterFormat::Pgm, Colormap::Gray, None).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let body = &bytes[b"P5\n8 8\n65535\n".len()..];
        // first pixel is the top-left corner: smallest q, largest p
        let first = u16::from_be_bytes([body[0], body[1]]);
        let last_row_first = u16::from_be_bytes([body[2 * 56], body[2 * 56 + 1]]);
        assert!(first > last_row_first);
    }

    #[test]
    fn nan_is_refused_without_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = PhaseSpaceField::from_fn(4, |q, _| q);
        f.values[5] = f64::NAN;
        let p = dir.path().join("bad.png");
        assert!(render_field(&f, &p, RasterFormat::Png, Colormap::Gray, None).is_err());
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
        assert!(write_field_csv(&f, &dir.path().join("bad.csv")).is_err());
    }

    #[test]
    fn csv_rows() {
        let dir = tempfile::tempdir().unwrap();
        let f = PhaseSpaceField::from_fn(3, |q, p| q * p);
        let p = dir.path().join("f.csv");
        write_field_csv(&f, &p).unwrap();
        let s = std::fs::read_to_string(&p).unwrap();
        assert_eq!(s.lines().count(), 10);
        assert!(s.starts_with("q,p,value\n"));
    }
}
