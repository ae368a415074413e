//! Deterministic SVG overlays of planar meshes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::geom::Point;
use crate::mesh::Mesh;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("layer `{layer}` has non-planar vertex {vertex} (z = {z})")]
    NonPlanar {
        layer: String,
        vertex: usize,
        z: f64,
    },
    #[error("nothing to draw")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub name: String,
    pub stroke: String,
    pub width: f64,
}

impl Style {
    pub fn new(name: &str, stroke: &str, width: f64) -> Self {
        Style {
            name: name.to_string(),
            stroke: stroke.to_string(),
            width,
        }
    }

    pub fn initial() -> Self {
        Style::new("initial", "black", 1.0)
    }

    pub fn nash() -> Self {
        Style::new("nash", "blue", 1.5)
    }

    pub fn best() -> Self {
        Style::new("best", "red", 1.5)
    }

    pub fn uniform() -> Self {
        Style::new("uniform", "green", 1.0)
    }
}

pub struct Layer<'a> {
    pub mesh: &'a Mesh,
    pub coords: &'a [Point],
    pub style: Style,
}

impl<'a> Layer<'a> {
    pub fn new(mesh: &'a Mesh, coords: &'a [Point], style: Style) -> Self {
        Layer {
            mesh,
            coords,
            style,
        }
    }
}

fn edges(mesh: &Mesh) -> BTreeSet<(usize, usize)> {
    mesh.elements()
        .iter()
        .flat_map(|e| {
            let [a, b, c] = e.indices();
            [(a, b), (b, c), (c, a)]
        })
        .map(|(x, y)| (x.min(y), x.max(y)))
        .collect()
}

/// Renders the layers in order, one `<g>` per layer with one `<line>` per
/// unique edge. The view box is the joint bounding box plus a 5% margin;
/// y points up.
pub fn render_svg(layers: &[Layer<'_>]) -> Result<String, SvgError> {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for layer in layers {
        for (v, p) in layer.coords.iter().enumerate() {
            if p.z != 0.0 {
                return Err(SvgError::NonPlanar {
                    layer: layer.style.name.clone(),
                    vertex: v,
                    z: p.z,
                });
            }
            min = [min[0].min(p.x), min[1].min(p.y)];
            max = [max[0].max(p.x), max[1].max(p.y)];
        }
    }
    if !min[0].is_finite() {
        return Err(SvgError::Empty);
    }
    let (w, h) = (max[0] - min[0], max[1] - min[1]);
    let span = w.max(h);
    let margin = if span > 0.0 { 0.05 * span } else { 1.0 };
    let (vx, vy) = (min[0] - margin, -max[1] - margin);
    let (vw, vh) = (w + 2.0 * margin, h + 2.0 * margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}" width="600" height="{:.0}">"#,
        600.0 * vh / vw
    );
    for layer in layers {
        let s = &layer.style;
        let _ = writeln!(
            out,
            r#"  <g id="{}" stroke="{}" stroke-width="{}" fill="none" vector-effect="non-scaling-stroke">"#,
            s.name, s.stroke, s.width
        );
        for (a, b) in edges(layer.mesh) {
            let (p, q) = (layer.coords[a], layer.coords[b]);
            let _ = writeln!(
                out,
                r#"    <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" vector-effect="non-scaling-stroke"/>"#,
                p.x, -p.y, q.x, -q.y
            );
        }
        let _ = writeln!(out, "  </g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(layers: &[Layer<'_>], path: &Path) -> Result<(), SvgError> {
    std::fs::write(path, render_svg(layers)?)?;
    Ok(())
}
