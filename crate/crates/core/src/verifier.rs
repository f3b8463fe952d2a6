//! Certification of the cobordism conditions and construction identities
//! on sampled data: Legendrian/Lagrangian residuals, discrete exactness
//! (quad loop integrals, grid-path primitives, end-band constancy),
//! cylindrical ends, convergence orders, and negative controls. Produces
//! deterministic machine-readable reports.
//!
//! Report schema (plain text, line oriented):
//!   # wcl verification report v1
//!   meta <key> <value>
//!   check <name> residual=<f> tol=<f> samples=<n> order=<ord> pass=<b> truncated=<n> degenerate=<b>
//!   summary pass=<b> checks=<n> failures=<n>
//! where <ord> is `na`, `exact-zero`, `floor`, or a float. Every check
//! satisfies pass ⇔ residual ≤ tolerance; order-bracket checks encode
//! the slope deviation as their residual and carry the measured slope in
//! the order field.

use crate::contact::{alpha_eval, ContactPoint, SympTangent, TangentVector};
use crate::error::{Result, WclError};
use crate::symplectization::MeshedLagrangian;
use crate::util::{fmt_f64, loglog_slope, SplitMix64};
use crate::wrinkle::{jacobian, lift_family, project_to_family};

/// Convergence-order classification attached to a check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    NotApplicable,
    /// Residuals vanish to machine precision at every resolution.
    ExactZero,
    /// Residuals sit on a roundoff floor; no slope is meaningful.
    Floor,
    Measured(f64),
}

impl OrderEstimate {
    fn to_token(self) -> String {
        match self {
            OrderEstimate::NotApplicable => "na".to_string(),
            OrderEstimate::ExactZero => "exact-zero".to_string(),
            OrderEstimate::Floor => "floor".to_string(),
            OrderEstimate::Measured(v) => fmt_f64(v),
        }
    }

    fn from_token(tok: &str) -> Result<Self> {
        Ok(match tok {
            "na" => OrderEstimate::NotApplicable,
            "exact-zero" => OrderEstimate::ExactZero,
            "floor" => OrderEstimate::Floor,
            other => OrderEstimate::Measured(
                other
                    .parse::<f64>()
                    .map_err(|_| WclError::Config(format!("bad order token {other}")))?,
            ),
        })
    }
}

/// Classify a residual sequence over decreasing resolutions.
pub fn estimate_order(hs: &[f64], residuals: &[f64]) -> OrderEstimate {
    if residuals.iter().all(|r| r.abs() < 1e-13) {
        return OrderEstimate::ExactZero;
    }
    match loglog_slope(hs, residuals) {
        None => OrderEstimate::NotApplicable,
        Some(slope) => {
            let min = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < 1e-12 && slope < 0.5 {
                OrderEstimate::Floor
            } else {
                OrderEstimate::Measured(slope)
            }
        }
    }
}

/// One certified condition.
#[derive(Debug, Clone)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub order: OrderEstimate,
    pub pass: bool,
    pub truncated: usize,
    pub degenerate: bool,
}

impl CheckEntry {
    pub fn residual_entry(
        name: &str,
        residual: f64,
        tolerance: f64,
        samples: usize,
        truncated: usize,
    ) -> Self {
        Self {
            name: name.replace(' ', "-"),
            residual,
            tolerance,
            samples,
            order: OrderEstimate::NotApplicable,
            pass: residual <= tolerance,
            truncated,
            degenerate: false,
        }
    }

    /// Convergence-bracket entry: the residual stores the distance of the
    /// measured slope from [lo, hi] (zero inside the bracket).
    pub fn order_bracket(name: &str, hs: &[f64], residuals: &[f64], lo: f64, hi: f64) -> Self {
        let order = estimate_order(hs, residuals);
        let (dev, pass) = match order {
            // An identically-zero (or floored) residual sequence is
            // better than any slope the bracket asks for.
            OrderEstimate::ExactZero => (0.0, true),
            OrderEstimate::Floor => (0.0, true),
            OrderEstimate::Measured(s) => {
                let dev = if s < lo {
                    lo - s
                } else if s > hi {
                    s - hi
                } else {
                    0.0
                };
                (dev, dev == 0.0)
            }
            OrderEstimate::NotApplicable => (f64::INFINITY, false),
        };
        Self {
            name: name.replace(' ', "-"),
            residual: dev,
            tolerance: 0.0,
            samples: hs.len(),
            order,
            pass,
            truncated: 0,
            degenerate: false,
        }
    }

    /// Minimum-order entry: pass iff slope >= lo (or residuals exactly
    /// zero / at floor).
    pub fn order_at_least(name: &str, hs: &[f64], residuals: &[f64], lo: f64) -> Self {
        Self::order_bracket(name, hs, residuals, lo, f64::INFINITY)
    }
}

/// Machine-readable verification report.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub meta: Vec<(String, String)>,
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_meta(&mut self, key: &str, value: &str) {
        self.meta.push((key.replace(' ', "-"), value.to_string()));
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.pass).count()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("# wcl verification report v1\n");
        for (k, v) in &self.meta {
            out.push_str(&format!("meta {k} {v}\n"));
        }
        for e in &self.entries {
            out.push_str(&format!(
                "check {} residual={} tol={} samples={} order={} pass={} truncated={} degenerate={}\n",
                e.name,
                fmt_f64(e.residual),
                fmt_f64(e.tolerance),
                e.samples,
                e.order.to_token(),
                e.pass,
                e.truncated,
                e.degenerate
            ));
        }
        out.push_str(&format!(
            "summary pass={} checks={} failures={}\n",
            self.all_pass(),
            self.entries.len(),
            self.failures()
        ));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rep = Self::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("summary") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("meta ") {
                let mut it = rest.splitn(2, ' ');
                let k = it.next().unwrap_or_default().to_string();
                let v = it.next().unwrap_or_default().to_string();
                rep.meta.push((k, v));
                continue;
            }
            if let Some(rest) = line.strip_prefix("check ") {
                let mut parts = rest.split_whitespace();
                let name = parts
                    .next()
                    .ok_or_else(|| WclError::Config("check line without name".into()))?
                    .to_string();
                let mut entry = CheckEntry {
                    name,
                    residual: f64::NAN,
                    tolerance: f64::NAN,
                    samples: 0,
                    order: OrderEstimate::NotApplicable,
                    pass: false,
                    truncated: 0,
                    degenerate: false,
                };
                for field in parts {
                    let (key, value) = field
                        .split_once('=')
                        .ok_or_else(|| WclError::Config(format!("bad report field {field}")))?;
                    match key {
                        "residual" => entry.residual = value.parse().map_err(bad_num)?,
                        "tol" => entry.tolerance = value.parse().map_err(bad_num)?,
                        "samples" => entry.samples = value.parse().map_err(bad_num)?,
                        "order" => entry.order = OrderEstimate::from_token(value)?,
                        "pass" => entry.pass = value == "true",
                        "truncated" => entry.truncated = value.parse().map_err(bad_num)?,
                        "degenerate" => entry.degenerate = value == "true",
                        other => {
                            return Err(WclError::Config(format!("unknown report field {other}")))
                        }
                    }
                }
                rep.entries.push(entry);
                continue;
            }
            return Err(WclError::Config(format!("unparseable report line: {line}")));
        }
        Ok(rep)
    }
}

fn bad_num<E: std::fmt::Display>(e: E) -> WclError {
    WclError::Config(format!("bad numeric field: {e}"))
}

/// A sample point with tangent frame for the Legendrian check.
#[derive(Debug, Clone)]
pub struct FramedSample {
    pub point: ContactPoint,
    pub frame: Vec<TangentVector>,
}

/// max |α(frame vector)| over the samples. A sample set whose frames are
/// all numerically zero certifies nothing and is flagged degenerate.
pub fn check_legendrian(name: &str, samples: &[FramedSample], tol: f64) -> CheckEntry {
    let mut worst: f64 = 0.0;
    let mut max_frame_norm: f64 = 0.0;
    for s in samples {
        for w in &s.frame {
            max_frame_norm = max_frame_norm.max(w.norm());
            let a = alpha_eval(&s.point, w).unwrap_or(f64::INFINITY).abs();
            worst = worst.max(a);
        }
    }
    let mut entry = CheckEntry::residual_entry(name, worst, tol, samples.len(), 0);
    if max_frame_norm < 1e-14 {
        entry.degenerate = true;
    }
    entry
}

/// Grid tangents of a mesh (per node, per grid direction); entries are
/// None where a stencil is unavailable or touches flagged nodes.
pub struct MeshTangents {
    pub t_u: Vec<Option<SympTangent>>,
    pub t_x: Vec<Option<SympTangent>>,
    pub t_v: Vec<Option<SympTangent>>,
}

fn diff_tangent(
    a: &crate::contact::SymplectizationPoint,
    b: &crate::contact::SymplectizationPoint,
    den: f64,
) -> SympTangent {
    let sa = a.to_state();
    let sb = b.to_state();
    let d: Vec<f64> = sb.iter().zip(&sa).map(|(x, y)| (x - y) / den).collect();
    SympTangent::from_state(&d)
}

/// Second-order one-sided stencil: (−3P₀ + 4P₁ − P₂) / (2h).
fn one_sided_tangent(
    p0: &crate::contact::SymplectizationPoint,
    p1: &crate::contact::SymplectizationPoint,
    p2: &crate::contact::SymplectizationPoint,
    h: f64,
) -> SympTangent {
    let s0 = p0.to_state();
    let s1 = p1.to_state();
    let s2 = p2.to_state();
    let d: Vec<f64> = s0
        .iter()
        .zip(s1.iter().zip(&s2))
        .map(|(a, (b, c))| (-3.0 * a + 4.0 * b - c) / (2.0 * h))
        .collect();
    SympTangent::from_state(&d)
}

/// Finite-difference tangents: central on interior stencils, one-sided
/// second order at grid boundaries. Stencils touching core/truncated
/// nodes yield None.
pub fn mesh_fd_tangents(mesh: &MeshedLagrangian) -> MeshTangents {
    let (nu, nx, nv) = (mesh.nu(), mesh.nx(), mesh.nv());
    let total = nu * nx * nv;
    let mut t_u = vec![None; total];
    let mut t_x = vec![None; total];
    let mut t_v = vec![None; total];
    let clean = |i: usize, j: usize, k: usize| -> bool {
        let f = mesh.flag(i, j, k);
        !f.core && !f.truncated
    };
    let hu = if nu > 1 { mesh.us[1] - mesh.us[0] } else { 1.0 };
    let hx = if nx > 1 {
        mesh.x2s[1] - mesh.x2s[0]
    } else {
        1.0
    };
    let hv = if nv > 1 { mesh.vs[1] - mesh.vs[0] } else { 1.0 };
    // Per-direction stencil: central inside, one-sided at the ends.
    let line_tangent =
        |at: usize, len: usize, h: f64, node_of: &dyn Fn(usize) -> usize| -> Option<SympTangent> {
            let ok = |p: usize| {
                let idx = node_of(p);
                let f = mesh.flags[idx];
                !f.core && !f.truncated
            };
            if at > 0 && at + 1 < len {
                if ok(at - 1) && ok(at + 1) {
                    return Some(diff_tangent(
                        &mesh.nodes[node_of(at - 1)],
                        &mesh.nodes[node_of(at + 1)],
                        2.0 * h,
                    ));
                }
                return None;
            }
            if len < 3 {
                return None;
            }
            if at == 0 {
                if ok(0) && ok(1) && ok(2) {
                    return Some(one_sided_tangent(
                        &mesh.nodes[node_of(0)],
                        &mesh.nodes[node_of(1)],
                        &mesh.nodes[node_of(2)],
                        h,
                    ));
                }
                return None;
            }
            // at == len − 1: mirrored one-sided stencil.
            if ok(len - 1) && ok(len - 2) && ok(len - 3) {
                let t = one_sided_tangent(
                    &mesh.nodes[node_of(len - 1)],
                    &mesh.nodes[node_of(len - 2)],
                    &mesh.nodes[node_of(len - 3)],
                    -h,
                );
                return Some(t);
            }
            None
        };
    for i in 0..nu {
        for j in 0..nx {
            for k in 0..nv {
                let idx = mesh.idx(i, j, k);
                if !clean(i, j, k) {
                    continue;
                }
                t_u[idx] = line_tangent(i, nu, hu, &|p| mesh.idx(p, j, k));
                t_x[idx] = line_tangent(j, nx, hx, &|p| mesh.idx(i, p, k));
                t_v[idx] = line_tangent(k, nv, hv, &|p| mesh.idx(i, j, p));
            }
        }
    }
    MeshTangents { t_u, t_x, t_v }
}

/// Analytic tangents for a cylinder mesh over L_t (oracle path for the
/// exactness and Lagrangian checks; traced meshes use `mesh_fd_tangents`).
pub fn cylinder_analytic_tangents(mesh: &MeshedLagrangian, t: f64) -> MeshTangents {
    let (nu, nx, nv) = (mesh.nu(), mesh.nx(), mesh.nv());
    let total = nu * nx * nv;
    let mut t_u = vec![None; total];
    let mut t_x = vec![None; total];
    let mut t_v = vec![None; total];
    for i in 0..nu {
        for j in 0..nx {
            let [ru, rx] = jacobian(mesh.us[i], mesh.x2s[j], t, mesh.n);
            for k in 0..nv {
                let idx = mesh.idx(i, j, k);
                t_u[idx] = Some(SympTangent {
                    w: ru.clone(),
                    dv: 0.0,
                });
                t_x[idx] = Some(SympTangent {
                    w: rx.clone(),
                    dv: 0.0,
                });
                t_v[idx] = Some(SympTangent {
                    w: TangentVector::zero(mesh.n),
                    dv: 1.0,
                });
            }
        }
    }
    MeshTangents { t_u, t_x, t_v }
}

/// max |ω(e_a, e_b)| over nodes and tangent pairs.
pub fn check_lagrangian(
    name: &str,
    mesh: &MeshedLagrangian,
    tangents: &MeshTangents,
    tol: f64,
) -> CheckEntry {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for idx in 0..mesh.nodes.len() {
        let node = &mesh.nodes[idx];
        let pairs = [
            (&tangents.t_u[idx], &tangents.t_x[idx]),
            (&tangents.t_u[idx], &tangents.t_v[idx]),
            (&tangents.t_x[idx], &tangents.t_v[idx]),
        ];
        for (a, b) in pairs {
            if let (Some(a), Some(b)) = (a, b) {
                if let Ok(w) = crate::contact::symp_form_eval(node, a, b) {
                    worst = worst.max(w.abs());
                    samples += 1;
                }
            }
        }
    }
    let mut entry = CheckEntry::residual_entry(name, worst, tol, samples, mesh.truncated_count());
    if samples == 0 {
        entry.pass = false;
        entry.degenerate = true;
        entry.residual = f64::INFINITY;
    }
    entry
}

/// θ = e^v α evaluated on a mesh tangent at a node.
fn theta(node: &crate::contact::SymplectizationPoint, w: &SympTangent) -> f64 {
    node.v.exp() * alpha_eval(&node.p, &w.w).unwrap_or(f64::NAN)
}

/// max |∮ θ| over all grid quads (three orientations), trapezoid rule on
/// the pullback components. Quads touching missing tangents are skipped.
pub fn check_exact_quads(
    name: &str,
    mesh: &MeshedLagrangian,
    tangents: &MeshTangents,
    tol: f64,
) -> CheckEntry {
    let (nu, nx, nv) = (mesh.nu(), mesh.nx(), mesh.nv());
    let hu = if nu > 1 { mesh.us[1] - mesh.us[0] } else { 1.0 };
    let hx = if nx > 1 {
        mesh.x2s[1] - mesh.x2s[0]
    } else {
        1.0
    };
    let hv = if nv > 1 { mesh.vs[1] - mesh.vs[0] } else { 1.0 };
    let comp = |idx: usize, dir: usize| -> Option<f64> {
        let t = match dir {
            0 => &tangents.t_u[idx],
            1 => &tangents.t_x[idx],
            _ => &tangents.t_v[idx],
        };
        t.as_ref().map(|w| theta(&mesh.nodes[idx], w))
    };
    // Trapezoid edge integral of the pullback component between two nodes.
    let edge = |a: usize, b: usize, dir: usize, h: f64| -> Option<f64> {
        Some(0.5 * h * (comp(a, dir)? + comp(b, dir)?))
    };
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for i in 0..nu {
        for j in 0..nx {
            for k in 0..nv {
                // (u, x2) quad.
                if i + 1 < nu && j + 1 < nx {
                    let q = [
                        mesh.idx(i, j, k),
                        mesh.idx(i + 1, j, k),
                        mesh.idx(i + 1, j + 1, k),
                        mesh.idx(i, j + 1, k),
                    ];
                    if let (Some(e0), Some(e1), Some(e2), Some(e3)) = (
                        edge(q[0], q[1], 0, hu),
                        edge(q[1], q[2], 1, hx),
                        edge(q[3], q[2], 0, hu),
                        edge(q[0], q[3], 1, hx),
                    ) {
                        worst = worst.max((e0 + e1 - e2 - e3).abs());
                        samples += 1;
                    }
                }
                // (u, v) quad.
                if i + 1 < nu && k + 1 < nv {
                    let q = [
                        mesh.idx(i, j, k),
                        mesh.idx(i + 1, j, k),
                        mesh.idx(i + 1, j, k + 1),
                        mesh.idx(i, j, k + 1),
                    ];
                    if let (Some(e0), Some(e1), Some(e2), Some(e3)) = (
                        edge(q[0], q[1], 0, hu),
                        edge(q[1], q[2], 2, hv),
                        edge(q[3], q[2], 0, hu),
                        edge(q[0], q[3], 2, hv),
                    ) {
                        worst = worst.max((e0 + e1 - e2 - e3).abs());
                        samples += 1;
                    }
                }
                // (x2, v) quad.
                if j + 1 < nx && k + 1 < nv {
                    let q = [
                        mesh.idx(i, j, k),
                        mesh.idx(i, j + 1, k),
                        mesh.idx(i, j + 1, k + 1),
                        mesh.idx(i, j, k + 1),
                    ];
                    if let (Some(e0), Some(e1), Some(e2), Some(e3)) = (
                        edge(q[0], q[1], 1, hx),
                        edge(q[1], q[2], 2, hv),
                        edge(q[3], q[2], 1, hx),
                        edge(q[0], q[3], 2, hv),
                    ) {
                        worst = worst.max((e0 + e1 - e2 - e3).abs());
                        samples += 1;
                    }
                }
            }
        }
    }
    CheckEntry::residual_entry(name, worst, tol, samples, mesh.truncated_count())
}

/// Path layouts of the discrete primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// v-column first, then u rows, then x₂.
    RowFirst,
    /// v-column first, then x₂ columns, then u.
    ColumnFirst,
}

/// Discrete primitive of θ by trapezoid path integration along grid
/// edges from node (0,0,0). Nodes with missing tangents on the way get
/// NaN (reported, not asserted).
pub fn mesh_primitive(
    mesh: &MeshedLagrangian,
    tangents: &MeshTangents,
    order: PathOrder,
) -> Vec<f64> {
    let (nu, nx, nv) = (mesh.nu(), mesh.nx(), mesh.nv());
    let hu = if nu > 1 { mesh.us[1] - mesh.us[0] } else { 1.0 };
    let hx = if nx > 1 {
        mesh.x2s[1] - mesh.x2s[0]
    } else {
        1.0
    };
    let hv = if nv > 1 { mesh.vs[1] - mesh.vs[0] } else { 1.0 };
    let comp = |idx: usize, dir: usize| -> f64 {
        let t = match dir {
            0 => &tangents.t_u[idx],
            1 => &tangents.t_x[idx],
            _ => &tangents.t_v[idx],
        };
        match t {
            Some(w) => theta(&mesh.nodes[idx], w),
            None => f64::NAN,
        }
    };
    let mut f = vec![f64::NAN; nu * nx * nv];
    // Ascend in v along (0,0,·) first.
    f[mesh.idx(0, 0, 0)] = 0.0;
    for k in 1..nv {
        let prev = mesh.idx(0, 0, k - 1);
        let cur = mesh.idx(0, 0, k);
        f[cur] = f[prev] + 0.5 * hv * (comp(prev, 2) + comp(cur, 2));
    }
    for k in 0..nv {
        match order {
            PathOrder::RowFirst => {
                for i in 1..nu {
                    let prev = mesh.idx(i - 1, 0, k);
                    let cur = mesh.idx(i, 0, k);
                    f[cur] = f[prev] + 0.5 * hu * (comp(prev, 0) + comp(cur, 0));
                }
                for i in 0..nu {
                    for j in 1..nx {
                        let prev = mesh.idx(i, j - 1, k);
                        let cur = mesh.idx(i, j, k);
                        f[cur] = f[prev] + 0.5 * hx * (comp(prev, 1) + comp(cur, 1));
                    }
                }
            }
            PathOrder::ColumnFirst => {
                for j in 1..nx {
                    let prev = mesh.idx(0, j - 1, k);
                    let cur = mesh.idx(0, j, k);
                    f[cur] = f[prev] + 0.5 * hx * (comp(prev, 1) + comp(cur, 1));
                }
                for j in 0..nx {
                    for i in 1..nu {
                        let prev = mesh.idx(i - 1, j, k);
                        let cur = mesh.idx(i, j, k);
                        f[cur] = f[prev] + 0.5 * hu * (comp(prev, 0) + comp(cur, 0));
                    }
                }
            }
        }
    }
    f
}

/// Path-independence residual: max |f_row − f_col| over nodes where both
/// are finite.
pub fn check_path_independence(
    name: &str,
    mesh: &MeshedLagrangian,
    tangents: &MeshTangents,
    tol: f64,
) -> CheckEntry {
    let fa = mesh_primitive(mesh, tangents, PathOrder::RowFirst);
    let fb = mesh_primitive(mesh, tangents, PathOrder::ColumnFirst);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for (a, b) in fa.iter().zip(&fb) {
        if a.is_finite() && b.is_finite() {
            worst = worst.max((a - b).abs());
            samples += 1;
        }
    }
    let mut entry = CheckEntry::residual_entry(name, worst, tol, samples, mesh.truncated_count());
    if samples == 0 {
        entry.pass = false;
        entry.degenerate = true;
        entry.residual = f64::INFINITY;
    }
    entry
}

/// Variance of the flow-accumulated primitive over one end band
/// (|v| > band, sign selects the end), excluding flagged nodes.
pub fn check_end_variance(
    name: &str,
    mesh: &MeshedLagrangian,
    band: f64,
    upper: bool,
    tol: f64,
) -> CheckEntry {
    let mut values = Vec::new();
    let mut truncated = 0;
    for i in 0..mesh.nu() {
        for j in 0..mesh.nx() {
            for k in 0..mesh.nv() {
                let v = mesh.vs[k];
                let in_band = if upper { v > band } else { v < -band };
                if !in_band {
                    continue;
                }
                let fl = mesh.flag(i, j, k);
                if fl.truncated {
                    truncated += 1;
                }
                if fl.core || fl.truncated {
                    continue;
                }
                values.push(mesh.action[mesh.idx(i, j, k)]);
            }
        }
    }
    if values.is_empty() {
        let mut e = CheckEntry::residual_entry(name, f64::INFINITY, tol, 0, truncated);
        e.degenerate = true;
        return e;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / values.len() as f64;
    CheckEntry::residual_entry(name, var, tol, values.len(), truncated)
}

/// One-sided distance from the end-band nodes to the cylinder over L_t:
/// nearest-parameter projection of the contact part (the cylinder spans
/// all v, so v contributes nothing).
pub fn check_ends(
    name: &str,
    mesh: &MeshedLagrangian,
    t_cylinder: f64,
    band: f64,
    upper: bool,
    tol: f64,
) -> CheckEntry {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    let mut truncated = 0;
    for i in 0..mesh.nu() {
        for j in 0..mesh.nx() {
            for k in 0..mesh.nv() {
                let v = mesh.vs[k];
                let in_band = if upper { v > band } else { v < -band };
                if !in_band {
                    continue;
                }
                let fl = mesh.flag(i, j, k);
                if fl.truncated {
                    truncated += 1;
                }
                if fl.core || fl.truncated {
                    continue;
                }
                let node = mesh.node(i, j, k);
                // Cold multi-start: the flow drifts parameters along the
                // Legendrian, so the original grid labels are not a
                // trustworthy warm start here.
                let proj = project_to_family(&node.p, t_cylinder, mesh.n, None);
                worst = worst.max(proj.dist);
                samples += 1;
            }
        }
    }
    let mut entry = CheckEntry::residual_entry(name, worst, tol, samples, truncated);
    if samples == 0 {
        entry.pass = false;
        entry.degenerate = true;
        entry.residual = f64::INFINITY;
    }
    entry
}

/// Report validity: fail when more than `max_fraction` of the non-core
/// nodes are truncated.
pub fn check_truncation_validity(
    name: &str,
    mesh: &MeshedLagrangian,
    max_fraction: f64,
) -> CheckEntry {
    let mut non_core = 0usize;
    let mut truncated = 0usize;
    for f in &mesh.flags {
        if !f.core {
            non_core += 1;
            if f.truncated {
                truncated += 1;
            }
        }
    }
    let frac = if non_core == 0 {
        0.0
    } else {
        truncated as f64 / non_core as f64
    };
    let mut entry = CheckEntry::residual_entry(name, frac, max_fraction, non_core, truncated);
    entry.truncated = truncated;
    entry
}

/// Legendrian samples of the model family over a parameter grid, with
/// analytic frames.
pub fn family_samples(t: f64, n: usize, nu: usize, nx: usize, span: f64) -> Vec<FramedSample> {
    let us = crate::util::linspace(-span, span, nu);
    let xs = crate::util::linspace(-span, span, nx);
    let mut out = Vec::with_capacity(nu * nx);
    for &u in &us {
        for &x2 in &xs {
            let point = lift_family(u, x2, t, n);
            let [ru, rx] = jacobian(u, x2, t, n);
            out.push(FramedSample {
                point,
                frame: vec![ru, rx],
            });
        }
    }
    out
}

/// Negative control: the lift with z-noise at the given amplitude, with
/// finite-difference frames (the noise enters the frames through the
/// differences, which is what breaks the Legendrian condition).
pub fn perturbed_family_samples(
    t: f64,
    n: usize,
    count: usize,
    amplitude: f64,
    seed: u64,
) -> Vec<FramedSample> {
    let mut rng = SplitMix64::new(seed);
    let grid = crate::util::linspace(-1.5, 1.5, count);
    let h = grid[1] - grid[0];
    let noisy = |u: f64, x2: f64, rng: &mut SplitMix64| -> ContactPoint {
        let mut p = lift_family(u, x2, t, n);
        p.z += amplitude * (2.0 * rng.next_f64() - 1.0);
        p
    };
    let mut out = Vec::new();
    for &u in &grid {
        for &x2 in &grid {
            // Fresh noise at each stencil point; the FD frame sees the
            // non-Legendrian wiggle at full strength.
            let p = noisy(u, x2, &mut rng);
            let pu_plus = noisy(u + h, x2, &mut rng);
            let pu_minus = noisy(u - h, x2, &mut rng);
            let px_plus = noisy(u, x2 + h, &mut rng);
            let px_minus = noisy(u, x2 - h, &mut rng);
            let fd = |a: &ContactPoint, b: &ContactPoint| -> TangentVector {
                let d: Vec<f64> = a
                    .to_state()
                    .iter()
                    .zip(b.to_state())
                    .map(|(x, y)| (x - y) / (2.0 * h))
                    .collect();
                TangentVector::from_state(&d)
            };
            out.push(FramedSample {
                point: p,
                frame: vec![fd(&pu_plus, &pu_minus), fd(&px_plus, &px_minus)],
            });
        }
    }
    out
}

/// Negative control: the graph of the non-closed 1-form y₁ = κ·x₂,
/// y₂ = 0 over the (x₁, x₂)-plane, extended as a cylinder in v. Not
/// Lagrangian: ω picks up the antisymmetric part κ.
pub fn nonclosed_graph_mesh(kappa: f64, res: usize, nv: usize) -> MeshedLagrangian {
    let us = crate::util::linspace(-1.0, 1.0, res);
    let x2s = crate::util::linspace(-1.0, 1.0, res);
    let vs = crate::util::linspace(-1.0, 1.0, nv);
    let mut nodes = Vec::with_capacity(res * res * nv);
    for &x1 in &us {
        for &x2 in &x2s {
            for &v in &vs {
                let p = ContactPoint {
                    x: vec![x1, x2],
                    y: vec![kappa * x2, 0.0],
                    z: 0.0,
                };
                nodes.push(crate::contact::SymplectizationPoint { p, v });
            }
        }
    }
    let total = nodes.len();
    MeshedLagrangian {
        us,
        x2s,
        vs,
        nodes,
        flags: vec![crate::symplectization::NodeFlags::default(); total],
        action: vec![0.0; total],
        n: 2,
    }
}

/// Negative control: shear a mesh by y₁ += κ·x₂ (a non-Hamiltonian node
/// perturbation; z-only perturbations would pull back to slice-exact
/// forms and leave path independence intact). The pullback of θ gains
/// the non-closed term −κ·e^v·x₂·dx₁, so quad integrals and path
/// independence fail at O(κ).
pub fn shear_mesh(mesh: &MeshedLagrangian, kappa: f64) -> MeshedLagrangian {
    let mut out = mesh.clone();
    for i in 0..out.nu() {
        for j in 0..out.nx() {
            for k in 0..out.nv() {
                let idx = out.idx(i, j, k);
                let x2 = out.x2s[j];
                out.nodes[idx].p.y[0] += kappa * x2;
            }
        }
    }
    out
}
