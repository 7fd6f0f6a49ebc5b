//! Two-dimensional slices of T(G)³: exact wall segments, polytope regions, rasters and SVG output.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::isometry::{AnglePair, ClassTriple, Layer};
use crate::polytopes::PolytopeId;
use crate::walls::{wall_catalog, Bound, Constraint, Form, Wall};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SliceKind {
    /// All three classes equal to the free pair.
    Symmetric,
    /// Free α, fixed β and γ.
    Fixed { beta: AnglePair, gamma: AnglePair },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceSpec {
    pub kind: SliceKind,
    pub resolution: usize,
    pub tol: f64,
}

impl SliceSpec {
    pub const DEFAULT_RESOLUTION: usize = 600;

    pub fn symmetric() -> SliceSpec {
        SliceSpec { kind: SliceKind::Symmetric, resolution: Self::DEFAULT_RESOLUTION, tol: 1e-9 }
    }

    pub fn fixed(beta: AnglePair, gamma: AnglePair) -> SliceSpec {
        SliceSpec { kind: SliceKind::Fixed { beta, gamma }, resolution: Self::DEFAULT_RESOLUTION, tol: 1e-9 }
    }

    pub fn with_resolution(mut self, resolution: usize) -> SliceSpec {
        self.resolution = resolution.max(16);
        self
    }

    /// The six angles of the triple at slice coordinates `(x, y) = (a1, a2)`, unreduced.
    pub fn coords(&self, x: f64, y: f64) -> [f64; 6] {
        match self.kind {
            SliceKind::Symmetric => [x, y, x, y, x, y],
            SliceKind::Fixed { beta, gamma } => {
                let (b1, b2) = beta.radians();
                let (g1, g2) = gamma.radians();
                [x, y, b1, b2, g1, g2]
            }
        }
    }

    pub fn triple(&self, x: f64, y: f64) -> ClassTriple {
        let p = AnglePair::from_radians(x, y);
        match self.kind {
            SliceKind::Symmetric => ClassTriple::uniform(p),
            SliceKind::Fixed { beta, gamma } => ClassTriple::new(p, beta, gamma),
        }
    }

    /// A form restricted to the slice: `cx·x + cy·y + c0`.
    pub fn restrict(&self, form: Form) -> Affine {
        let c0 = form.eval_radians(&self.coords(0.0, 0.0));
        let cx = form.eval_radians(&self.coords(1.0, 0.0)) - c0;
        let cy = form.eval_radians(&self.coords(0.0, 1.0)) - c0;
        Affine { cx, cy, c0 }
    }

    /// `constraint` as a half-plane `value(x, y) ≥ 0` (holds strictly when positive).
    pub fn half_plane(&self, c: &Constraint) -> Affine {
        let a = self.restrict(c.form);
        let level = c.level_over_pi as f64 * PI;
        match c.bound {
            Bound::Below => Affine { cx: -a.cx, cy: -a.cy, c0: level - a.c0 },
            Bound::Above => Affine { cx: a.cx, cy: a.cy, c0: a.c0 - level },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub cx: f64,
    pub cy: f64,
    pub c0: f64,
}

impl Affine {
    pub fn at(&self, x: f64, y: f64) -> f64 {
        self.cx * x + self.cy * y + self.c0
    }

    pub fn grad_norm(&self) -> f64 {
        self.cx.hypot(self.cy)
    }
}

/// The chamber `{0 ≤ y ≤ x ≤ 2π}` as half-planes `≥ 0`.
fn domain() -> [Affine; 3] {
    [
        Affine { cx: 0.0, cy: 1.0, c0: 0.0 },
        Affine { cx: -1.0, cy: 0.0, c0: TWO_PI },
        Affine { cx: 1.0, cy: -1.0, c0: 0.0 },
    ]
}

/// A wall clipped to the slice.
#[derive(Clone, Debug, Serialize)]
pub struct WallSegment {
    pub wall: String,
    pub layer: Layer,
    pub interior: bool,
    pub start: (f64, f64),
    pub end: (f64, f64),
    /// The wall equation restricted to the slice, as `value = 0`.
    pub line: Affine,
    #[serde(skip)]
    pub source: &'static Wall,
}

impl WallSegment {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = self.start;
        let (dx, dy) = (self.end.0 - x0, self.end.1 - y0);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 { (((x - x0) * dx + (y - y0) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
        (x - x0 - t * dx).hypot(y - y0 - t * dy)
    }
}

/// Clips `{line = 0} ∩ {h ≥ 0 for h in halves}`; `None` when empty or when the line is not a line in the slice.
fn clip_line(line: &Affine, halves: &[Affine]) -> Option<((f64, f64), (f64, f64))> {
    let n2 = line.cx * line.cx + line.cy * line.cy;
    if n2 < 1e-24 {
        return None;
    }
    let p0 = (-line.c0 * line.cx / n2, -line.c0 * line.cy / n2);
    let d = (-line.cy, line.cx);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in halves {
        let a = h.cx * d.0 + h.cy * d.1;
        let b = h.at(p0.0, p0.1);
        if a.abs() < 1e-15 {
            if b < -1e-12 {
                return None;
            }
        } else if a > 0.0 {
            lo = lo.max(-b / a);
        } else {
            hi = hi.min(-b / a);
        }
    }
    if lo > hi + 1e-12 {
        return None;
    }
    let hi = hi.max(lo);
    Some(((p0.0 + lo * d.0, p0.1 + lo * d.1), (p0.0 + hi * d.0, p0.1 + hi * d.1)))
}

pub fn wall_segments(spec: &SliceSpec) -> Vec<WallSegment> {
    let mut out = Vec::new();
    for w in wall_catalog() {
        let eq = spec.restrict(w.form());
        let line = Affine { c0: eq.c0 - w.level_over_pi as f64 * PI, ..eq };
        let mut halves: Vec<Affine> = domain().to_vec();
        halves.extend(w.truncation.iter().map(|c| spec.half_plane(c)));
        if let Some((start, end)) = clip_line(&line, &halves) {
            out.push(WallSegment { wall: w.name(), layer: w.layer, interior: w.interior, start, end, line, source: w });
        }
    }
    out
}

/// Clips a convex polygon to `{h ≥ 0}`.
fn clip_polygon(poly: &[(f64, f64)], h: &Affine) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (vp, vq) = (h.at(p.0, p.1), h.at(q.0, q.1));
        if vp >= 0.0 {
            out.push(p);
        }
        if (vp >= 0.0) != (vq >= 0.0) {
            let t = vp / (vp - vq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

/// Closed region of a polytope in the slice (convex; empty when the polytope misses the slice).
pub fn polytope_region(spec: &SliceSpec, p: PolytopeId) -> Vec<(f64, f64)> {
    let mut poly = vec![(0.0, 0.0), (TWO_PI, 0.0), (TWO_PI, TWO_PI)];
    for c in p.system() {
        poly = clip_polygon(&poly, &spec.half_plane(&c));
        if poly.is_empty() {
            break;
        }
    }
    let area = polygon_area(&poly);
    if area < 1e-12 {
        Vec::new()
    } else {
        poly
    }
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].0 * poly[(i + 1) % n].1 - poly[(i + 1) % n].0 * poly[i].1).sum::<f64>().abs() / 2.0
}

/// Per-pixel membership and wall bands.
#[derive(Clone, Debug)]
pub struct SliceRaster {
    pub resolution: usize,
    /// Pixel inside the chamber.
    pub inside: Vec<bool>,
    /// Strict membership bits: bit 0 = P4, bit 1 = P6, bit 2 = P8.
    pub membership: Vec<u8>,
    /// Within the wall band of the layer, indexed by `Layer::ALL` order.
    pub on_wall: [Vec<bool>; 3],
    pub segments: Vec<WallSegment>,
}

pub const WALL_BAND_PX: f64 = 1.5;
/// Components smaller than this are slivers cut off by a wall band near a corner.
pub const MIN_COMPONENT_PX: usize = 10;

fn layer_index(l: Layer) -> usize {
    Layer::ALL.iter().position(|&m| m == l).unwrap()
}

pub fn polytope_bit(p: PolytopeId) -> u8 {
    match p.layer() {
        Layer::Omega => 1,
        Layer::One => 2,
        Layer::OmegaSq => 4,
    }
}

impl SliceRaster {
    pub fn pixel_center(&self, px: usize, py: usize) -> (f64, f64) {
        pixel_center(self.resolution, px, py)
    }

    /// 4-connected components of chamber pixels off the layer's wall band.
    pub fn component_sizes(&self, layer: Layer) -> Vec<usize> {
        let n = self.resolution;
        let band = &self.on_wall[layer_index(layer)];
        let free = |i: usize| self.inside[i] && !band[i];
        let mut seen = vec![false; n * n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n * n {
            if seen[start] || !free(start) {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut size = 0;
            while let Some(i) = stack.pop() {
                size += 1;
                let (px, py) = (i % n, i / n);
                let mut nb = [None; 4];
                if px > 0 {
                    nb[0] = Some(i - 1);
                }
                if px + 1 < n {
                    nb[1] = Some(i + 1);
                }
                if py > 0 {
                    nb[2] = Some(i - n);
                }
                if py + 1 < n {
                    nb[3] = Some(i + n);
                }
                for j in nb.into_iter().flatten() {
                    if !seen[j] && free(j) {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    /// Number of cells of the layer seen in the slice.
    pub fn component_count(&self, layer: Layer) -> usize {
        self.component_sizes(layer).into_iter().filter(|&s| s >= MIN_COMPONENT_PX).count()
    }

    pub fn has_polytope(&self, bit: u8) -> bool {
        self.membership.iter().any(|m| m & bit != 0)
    }

    pub fn overlap(&self, bits: u8) -> bool {
        self.membership.iter().any(|m| m & bits == bits)
    }
}

fn pixel_center(n: usize, px: usize, py: usize) -> (f64, f64) {
    let s = TWO_PI / n as f64;
    ((px as f64 + 0.5) * s, TWO_PI - (py as f64 + 0.5) * s)
}

pub fn rasterize(spec: &SliceSpec) -> SliceRaster {
    let n = spec.resolution.max(16);
    let segments = wall_segments(spec);
    let band = WALL_BAND_PX * TWO_PI / n as f64;
    let systems: Vec<(u8, Vec<Affine>)> = PolytopeId::ALL
        .iter()
        .map(|&p| (polytope_bit(p), p.system().iter().map(|c| spec.half_plane(c)).collect()))
        .collect();
    let mut inside = vec![false; n * n];
    let mut membership = vec![0u8; n * n];
    let mut on_wall = [vec![false; n * n], vec![false; n * n], vec![false; n * n]];
    for py in 0..n {
        for px in 0..n {
            let i = py * n + px;
            let (x, y) = pixel_center(n, px, py);
            if y >= x {
                continue;
            }
            inside[i] = true;
            for (bit, hs) in &systems {
                if hs.iter().all(|h| h.at(x, y) > 0.0) {
                    membership[i] |= bit;
                }
            }
            for s in &segments {
                if s.distance(x, y) <= band {
                    on_wall[layer_index(s.layer)][i] = true;
                }
            }
        }
    }
    SliceRaster { resolution: n, inside, membership, on_wall, segments }
}

fn layer_color(l: Layer) -> &'static str {
    match l {
        Layer::Omega => "#ff0000",
        Layer::One => "#0000ff",
        Layer::OmegaSq => "#00ff00",
    }
}

/// SVG 1.1 picture of the slice: filled polytope regions and styled wall segments.
pub fn render_slice(spec: &SliceSpec) -> String {
    let n = spec.resolution.max(16) as f64;
    let map = |(x, y): (f64, f64)| (x / TWO_PI * n, n - y / TWO_PI * n);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{n}" height="{n}" viewBox="0 0 {n} {n}">"#
    );
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{n}" height="{n}" fill="#ffffff"/>"##);
    let tri = [(0.0, 0.0), (TWO_PI, 0.0), (TWO_PI, TWO_PI)];
    let path = |poly: &[(f64, f64)]| {
        poly.iter()
            .map(|&p| {
                let (a, b) = map(p);
                format!("{a:.3},{b:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(svg, r##"<polygon points="{}" fill="none" stroke="#000000" stroke-width="1"/>"##, path(&tri));
    for p in PolytopeId::ALL {
        let region = polytope_region(spec, p);
        if region.is_empty() {
            continue;
        }
        let _ = writeln!(
            svg,
            r#"<polygon id="{p}" points="{}" fill="{}" fill-opacity="0.3" stroke="none"/>"#,
            path(&region),
            layer_color(p.layer())
        );
    }
    for s in wall_segments(spec) {
        let (x1, y1) = map(s.start);
        let (x2, y2) = map(s.end);
        let style = if s.interior { r#"stroke-width="1.5" stroke-dasharray="4,3""# } else { r#"stroke-width="3""# };
        let _ = writeln!(
            svg,
            r#"<line class="{}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{}" stroke-linecap="round" {style}><title>{}</title></line>"#,
            if s.interior { "interior" } else { "exterior" },
            layer_color(s.layer),
            s.wall
        );
    }
    svg.push_str("</svg>\n");
    svg
}
