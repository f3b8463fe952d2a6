//! Deterministic SVG figures: front slices with cusp markers, the
//! region diagram of the patch construction in the (u, x₂) parameter
//! plane, and nested-wrinkle loci. Identical inputs produce identical
//! bytes, so figures can be diffed in tests.

use crate::error::{Result, WclError};
use crate::patch::PatchParams;
use crate::wrinkle::{front_family, singular_locus, NestedConfig, WrinkleChart};

const VIEW_W: f64 = 640.0;
const VIEW_H: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Projection plane of a front figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionPlane {
    /// (x₁, z) slice at fixed x₂.
    X1Z,
    /// (x₂, z) slice at fixed u.
    X2Z,
    /// The (u, x₂) parameter plane (cusp curve and singular locus).
    UX2,
}

impl ProjectionPlane {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProjectionPlane::X1Z => "x1z",
            ProjectionPlane::X2Z => "x2z",
            ProjectionPlane::UX2 => "ux2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x1z" => Ok(ProjectionPlane::X1Z),
            "x2z" => Ok(ProjectionPlane::X2Z),
            "ux2" => Ok(ProjectionPlane::UX2),
            other => Err(WclError::Config(format!("unknown projection {other}"))),
        }
    }
}

/// Overlay toggles.
#[derive(Debug, Clone, Copy)]
pub struct Overlays {
    pub singular_locus: bool,
    pub region_boundaries: bool,
    pub core_disc: bool,
}

impl Default for Overlays {
    fn default() -> Self {
        Self {
            singular_locus: true,
            region_boundaries: false,
            core_disc: false,
        }
    }
}

/// What to draw.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub plane: ProjectionPlane,
    pub ts: Vec<f64>,
    /// Samples per curve.
    pub resolution: usize,
    /// Slice coordinate (x₂ for X1Z, u for X2Z; unused in UX2).
    pub slice: f64,
    pub overlays: Overlays,
    /// Isotopy half-width; t values must lie in [−3T, 3T].
    pub t_half: f64,
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 16 {
            return Err(WclError::Config(format!(
                "render resolution must be >= 16, got {}",
                self.resolution
            )));
        }
        for &t in &self.ts {
            if t.abs() > 3.0 * self.t_half {
                return Err(WclError::Config(format!(
                    "render time {t} outside [-3T, 3T]"
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic file name: front_t{value}_{projection}.svg.
pub fn front_filename(t: f64, plane: ProjectionPlane) -> String {
    format!("front_t{}_{}.svg", fmt_coord(t), plane.as_str())
}

fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.3}");
    s.replace('-', "m")
}

struct Canvas {
    min: [f64; 2],
    max: [f64; 2],
}

impl Canvas {
    fn new() -> Self {
        Self {
            min: [f64::INFINITY; 2],
            max: [f64::NEG_INFINITY; 2],
        }
    }

    fn include(&mut self, p: [f64; 2]) {
        for (a, v) in p.iter().enumerate() {
            self.min[a] = self.min[a].min(*v);
            self.max[a] = self.max[a].max(*v);
        }
    }

    fn to_px(&self, p: [f64; 2]) -> [f64; 2] {
        let spanx = (self.max[0] - self.min[0]).max(1e-9);
        let spany = (self.max[1] - self.min[1]).max(1e-9);
        let sx = (VIEW_W - 2.0 * MARGIN) / spanx;
        let sy = (VIEW_H - 2.0 * MARGIN) / spany;
        let s = sx.min(sy);
        let cx = 0.5 * (self.min[0] + self.max[0]);
        let cy = 0.5 * (self.min[1] + self.max[1]);
        [
            VIEW_W / 2.0 + (p[0] - cx) * s,
            VIEW_H / 2.0 - (p[1] - cy) * s,
        ]
    }

    fn scale(&self) -> f64 {
        let spanx = (self.max[0] - self.min[0]).max(1e-9);
        let spany = (self.max[1] - self.min[1]).max(1e-9);
        ((VIEW_W - 2.0 * MARGIN) / spanx).min((VIEW_H - 2.0 * MARGIN) / spany)
    }
}

fn px(v: f64) -> String {
    format!("{v:.3}")
}

fn polyline(canvas: &Canvas, pts: &[[f64; 2]], stroke: &str) -> String {
    let mut d = String::new();
    for (k, p) in pts.iter().enumerate() {
        let q = canvas.to_px(*p);
        d.push_str(if k == 0 { "M" } else { " L" });
        d.push_str(&format!("{} {}", px(q[0]), px(q[1])));
    }
    format!("  <path d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n")
}

fn circle_marker(canvas: &Canvas, p: [f64; 2], r: f64, fill: &str) -> String {
    let q = canvas.to_px(p);
    format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>\n",
        px(q[0]),
        px(q[1]),
        px(r)
    )
}

fn document(body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n{}</svg>\n",
        VIEW_W as u32, VIEW_H as u32, VIEW_W as u32, VIEW_H as u32, body
    )
}

const CURVE_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Cusp parameters of a slice: solutions of ∂x₁/∂u = 0, u² = t − x₂².
fn slice_cusps(t: f64, x2: f64) -> Vec<f64> {
    let w = t - x2 * x2;
    if w > 0.0 {
        let r = w.sqrt();
        vec![-r, r]
    } else if w == 0.0 {
        vec![0.0]
    } else {
        Vec::new()
    }
}

/// Pixel coordinates of the cusp markers of the given slice; exposed so
/// tests can compare them against singular-locus images.
pub fn cusp_pixels(chart: &WrinkleChart, spec: &RenderSpec, t: f64) -> Vec<[f64; 2]> {
    let canvas = front_canvas(chart, spec);
    cusp_world(spec, t)
        .into_iter()
        .map(|p| canvas.to_px(p))
        .collect()
}

fn cusp_world(spec: &RenderSpec, t: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    match spec.plane {
        ProjectionPlane::X1Z => {
            for u in slice_cusps(t, spec.slice) {
                let [z, x1, _] = front_family(u, spec.slice, t);
                out.push([x1, z]);
            }
        }
        ProjectionPlane::X2Z => {
            // Cusps along the x₂ slice at fixed u: x₂² = t − u².
            let w = t - spec.slice * spec.slice;
            if w >= 0.0 {
                for s in [-1.0, 1.0] {
                    let x2 = s * w.sqrt();
                    let [z, _, _] = front_family(spec.slice, x2, t);
                    out.push([x2, z]);
                    if w == 0.0 {
                        break;
                    }
                }
            }
        }
        ProjectionPlane::UX2 => {
            for q in singular_locus(t, 2) {
                out.push([q.u, q.v[0]]);
            }
        }
    }
    out
}

fn front_canvas(chart: &WrinkleChart, spec: &RenderSpec) -> Canvas {
    let mut canvas = Canvas::new();
    let span = 1.0_f64.max(chart.t_half).sqrt() * 1.8;
    for &t in &spec.ts {
        match spec.plane {
            ProjectionPlane::X1Z => {
                for k in 0..spec.resolution {
                    let u = -span + 2.0 * span * k as f64 / (spec.resolution - 1) as f64;
                    let [z, x1, _] = front_family(u, spec.slice, t);
                    canvas.include([x1, z]);
                }
            }
            ProjectionPlane::X2Z => {
                for k in 0..spec.resolution {
                    let x2 = -span + 2.0 * span * k as f64 / (spec.resolution - 1) as f64;
                    let [z, _, _] = front_family(spec.slice, x2, t);
                    canvas.include([x2, z]);
                }
            }
            ProjectionPlane::UX2 => {
                canvas.include([-span, -span]);
                canvas.include([span, span]);
            }
        }
    }
    if spec.ts.is_empty() {
        canvas.include([-1.0, -1.0]);
        canvas.include([1.0, 1.0]);
    }
    canvas
}

/// Front slices with cusp markers; one polyline per t value.
pub fn render_front(chart: &WrinkleChart, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    let canvas = front_canvas(chart, spec);
    let mut body = String::new();
    let span = 1.0_f64.max(chart.t_half).sqrt() * 1.8;
    for (ti, &t) in spec.ts.iter().enumerate() {
        let color = CURVE_COLORS[ti % CURVE_COLORS.len()];
        let mut pts = Vec::with_capacity(spec.resolution);
        match spec.plane {
            ProjectionPlane::X1Z => {
                for k in 0..spec.resolution {
                    let u = -span + 2.0 * span * k as f64 / (spec.resolution - 1) as f64;
                    let [z, x1, _] = front_family(u, spec.slice, t);
                    pts.push([x1, z]);
                }
            }
            ProjectionPlane::X2Z => {
                for k in 0..spec.resolution {
                    let x2 = -span + 2.0 * span * k as f64 / (spec.resolution - 1) as f64;
                    let [z, _, _] = front_family(spec.slice, x2, t);
                    pts.push([x2, z]);
                }
            }
            ProjectionPlane::UX2 => {
                // Cusp curve u² + x₂² = t (closed oval) when alive.
                if t > 0.0 {
                    let r = t.sqrt();
                    for k in 0..=spec.resolution {
                        let a = 2.0 * std::f64::consts::PI * k as f64 / spec.resolution as f64;
                        pts.push([r * a.cos(), r * a.sin()]);
                    }
                }
            }
        }
        if !pts.is_empty() {
            body.push_str(&polyline(&canvas, &pts, color));
        }
        if spec.overlays.singular_locus {
            for p in cusp_world(spec, t) {
                body.push_str(&circle_marker(&canvas, p, 4.0, color));
            }
        }
    }
    Ok(document(&body))
}

/// The (u, x₂) region diagram of the patch construction: shaded branch
/// regions |u| ≥ δ, striped outer strips {|x₂| ≥ ε} ∩ {|u| ≤ δ/2},
/// homotopy strips between, and the core disc u² + x₂² < ε. An optional
/// nested configuration adds the concentric loci.
pub fn render_regions(
    params: &PatchParams,
    nested: Option<&NestedConfig>,
    t: f64,
) -> Result<String> {
    let eps = params.eps;
    let delta = params.delta;
    let disc_r = eps.sqrt();
    let span_u = (2.0 * delta).max(1.4 * disc_r);
    let span_x = (3.0 * eps)
        .max(1.4 * disc_r)
        .max(if t > 0.0 { 1.3 * t.sqrt() } else { 0.0 });
    let mut canvas = Canvas::new();
    canvas.include([-span_u, -span_x]);
    canvas.include([span_u, span_x]);
    let rect = |canvas: &Canvas, a: [f64; 2], b: [f64; 2], fill: &str, extra: &str| -> String {
        let pa = canvas.to_px([a[0], b[1]]);
        let pb = canvas.to_px([b[0], a[1]]);
        format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"{extra}/>\n",
            px(pa[0]),
            px(pa[1]),
            px(pb[0] - pa[0]),
            px(pb[1] - pa[1])
        )
    };
    let mut body = String::new();
    body.push_str(
        "  <defs>\n    <pattern id=\"hatch\" width=\"6\" height=\"6\" \
         patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n      \
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#666666\" stroke-width=\"1\"/>\n    \
         </pattern>\n  </defs>\n",
    );
    // Branch regions |u| >= delta.
    body.push_str(&rect(
        &canvas,
        [-span_u, -span_x],
        [-delta, span_x],
        "#c8c8c8",
        "",
    ));
    body.push_str(&rect(
        &canvas,
        [delta, -span_x],
        [span_u, span_x],
        "#c8c8c8",
        "",
    ));
    // Homotopy strips delta/2 < |u| < delta.
    body.push_str(&rect(
        &canvas,
        [-delta, -span_x],
        [-0.5 * delta, span_x],
        "#ececec",
        "",
    ));
    body.push_str(&rect(
        &canvas,
        [0.5 * delta, -span_x],
        [delta, span_x],
        "#ececec",
        "",
    ));
    // Striped outer strips {|x2| >= eps} ∩ {|u| <= delta/2}.
    body.push_str(&rect(
        &canvas,
        [-0.5 * delta, eps],
        [0.5 * delta, span_x],
        "url(#hatch)",
        "",
    ));
    body.push_str(&rect(
        &canvas,
        [-0.5 * delta, -span_x],
        [0.5 * delta, -eps],
        "url(#hatch)",
        "",
    ));
    // Core disc u² + x₂² < eps.
    {
        let c = canvas.to_px([0.0, 0.0]);
        let r = disc_r * canvas.scale();
        body.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
            px(c[0]),
            px(c[1]),
            px(r)
        ));
    }
    // Cusp oval and singular locus of the time-t wrinkle.
    if t > 0.0 {
        let r = t.sqrt() * canvas.scale();
        let c = canvas.to_px([0.0, 0.0]);
        body.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
            px(c[0]),
            px(c[1]),
            px(r)
        ));
        for q in singular_locus(t, 2) {
            body.push_str(&circle_marker(&canvas, [q.u, q.v[0]], 4.0, "#d62728"));
        }
    }
    // Nested configuration: concentric core discs and their loci.
    if let Some(cfg) = nested {
        for chart in &cfg.charts {
            let c = canvas.to_px(chart.center);
            let r = chart.eps_core * canvas.scale();
            body.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.2\" stroke-dasharray=\"4 3\"/>\n",
                px(c[0]),
                px(c[1]),
                px(r)
            ));
        }
    }
    Ok(document(&body))
}
