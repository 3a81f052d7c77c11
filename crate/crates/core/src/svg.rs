//! Static scatter plots of point clouds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PointCloud;
use crate::linalg::C64;

pub const COLOR_W: &str = "#1f77b4";
pub const COLOR_W_TILDE: &str = "#d62728";
/// Marker radius as a fraction of the larger plotted extent.
pub const MARKER_RADIUS: f64 = 0.002;
pub const MARGIN: f64 = 0.05;
/// Width in pixels of the longer side.
pub const SIZE: f64 = 800.0;

/// Render `W` and `W~` as circles in two colors, equal aspect ratio,
/// imaginary axis pointing up.
pub fn write_svg<W: Write>(cloud: &PointCloud, mut out: W) -> std::io::Result<()> {
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in cloud.all_points() {
        re_lo = re_lo.min(z.re);
        re_hi = re_hi.max(z.re);
        im_lo = im_lo.min(z.im);
        im_hi = im_hi.max(z.im);
    }
    let extent = (re_hi - re_lo).max(im_hi - im_lo);
    let extent = if extent > 0.0 { extent } else { 1.0 };
    // pad a flat cloud to a square so it stays visible
    let (mut w, mut h) = (re_hi - re_lo, im_hi - im_lo);
    if w == 0.0 {
        w = extent;
        re_lo -= extent / 2.0;
    }
    if h == 0.0 {
        h = extent;
        im_lo -= extent / 2.0;
    }
    let pad = MARGIN * extent;
    let (vx, vy, vw, vh) = (re_lo - pad, -(im_lo + h) - pad, w + 2.0 * pad, h + 2.0 * pad);
    let scale = SIZE / vw.max(vh);
    let r = MARKER_RADIUS * extent;

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{vx} {vy} {vw} {vh}">"#,
        vw * scale,
        vh * scale
    )?;
    writeln!(out, r#"<rect x="{vx}" y="{vy}" width="{vw}" height="{vh}" fill="white"/>"#)?;
    for (points, color, id) in [(&cloud.w, COLOR_W, "W"), (&cloud.w_tilde, COLOR_W_TILDE, "W-tilde")] {
        writeln!(out, r#"<g id="{id}" fill="{color}" stroke="none">"#)?;
        for z in points.iter() {
            writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, z.re, -z.im)?;
        }
        writeln!(out, "</g>")?;
    }
    writeln!(out, "</svg>")
}

fn check(cloud: &PointCloud) -> Result<()> {
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    if cloud.all_points().any(|z: C64| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidConfig("cannot plot non-finite points".into()));
    }
    Ok(())
}

pub fn render_svg(cloud: &PointCloud) -> Result<String> {
    check(cloud)?;
    let mut buf = Vec::new();
    write_svg(cloud, &mut buf).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("ascii output"))
}

pub fn save_svg(cloud: &PointCloud, path: &Path) -> Result<()> {
    check(cloud)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_svg(cloud, &mut out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(w: &[(f64, f64)], wt: &[(f64, f64)]) -> PointCloud {
        let pts = |v: &[(f64, f64)]| v.iter().map(|(a, b)| C64::new(*a, *b)).collect();
        PointCloud { w: pts(w), w_tilde: pts(wt), pairs: None }
    }

    fn circles(doc: &roxmltree::Document, group: &str) -> usize {
        doc.descendants()
            .find(|n| n.attribute("id") == Some(group))
            .unwrap()
            .children()
            .filter(|n| n.has_tag_name("circle"))
            .count()
    }

    #[test]
    fn well_formed_with_all_points() {
        let c = cloud(&[(2.0, 0.0), (1.0, 1.0), (0.5, -0.25)], &[(-2.0, 0.0), (-1.0, -1.0), (-0.5, 0.3)]);
        let text = render_svg(&c).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(circles(&doc, "W"), 3);
        assert_eq!(circles(&doc, "W-tilde"), 3);
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 6);
    }

    #[test]
    fn equal_aspect_and_margin() {
        let c = cloud(&[(0.0, 0.0)], &[(4.0, 2.0)]);
        let text = render_svg(&c).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        let root = doc.root_element();
        let vb: Vec<f64> = root.attribute("viewBox").unwrap().split(' ').map(|v| v.parse().unwrap()).collect();
        // 5% of the larger extent (4) on every side
        assert!((vb[2] - 4.4).abs() < 1e-12 && (vb[3] - 2.4).abs() < 1e-12);
        let w: f64 = root.attribute("width").unwrap().parse().unwrap();
        let h: f64 = root.attribute("height").unwrap().parse().unwrap();
        assert!((w / h - vb[2] / vb[3]).abs() < 0.01);
    }

    #[test]
    fn degenerate_and_empty() {
        assert!(matches!(render_svg(&PointCloud::points_only()), Err(Error::EmptySet)));
        let text = render_svg(&cloud(&[(1.0, 1.0)], &[(1.0, 1.0)])).unwrap();
        roxmltree::Document::parse(&text).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"));
    }
}
