//! Lifts to the symplectization (Y×R, d(e^v α)): lifted contactomorphisms,
//! the banded cutoff Hamiltonian H̃, its Hamiltonian vector field, the
//! traced image of L₀×R under the flow, and the conjugated isotopy
//! diagnostics.
//!
//! The upper branch of H̃ is the homogeneous lift e^v·H_t(p); with the
//! field convention ι_X ω = −dH̃ its flow projects to the contact flow of
//! H_t and v̇ = −∂H_t/∂z, which is what makes the traced surface
//! cylindrical over the contact isotopy at the ends.

use std::cell::Cell;

use crate::contact::{
    alpha_eval, contact_vector_field, ContactGradient, ContactPoint, ScalarField, SympTangent,
    SymplectizationPoint, TangentVector,
};
use crate::error::{Result, WclError};
use crate::flow::{rk4_flow, BoundingBox};
use crate::patch::{h_ext, PatchParams};
use crate::push::measure_lambda;
use crate::util::{smoothstep5, smoothstep5_deriv};
use crate::wrinkle::{jacobian, lift_family};

/// A contactomorphism of contact space as a fallible map.
pub type ContactMap<'a> = Box<dyn Fn(&ContactPoint) -> Result<ContactPoint> + 'a>;

/// A contactomorphism together with its conformal exponent h
/// (ψ*α = e^h α), lifted to the symplectization as
/// (p, v) ↦ (ψ(p), v − h(p)).
pub struct LiftedMap<'a> {
    pub psi: ContactMap<'a>,
    pub h: Box<dyn Fn(&ContactPoint) -> f64 + 'a>,
}

impl<'a> LiftedMap<'a> {
    pub fn apply(&self, point: &SymplectizationPoint) -> Result<SymplectizationPoint> {
        let image = (self.psi)(&point.p)?;
        let shift = (self.h)(&point.p);
        SymplectizationPoint::new(image, point.v - shift)
    }
}

const LIFT_CONSISTENCY_TOL: f64 = 1e-4;
const LIFT_SYMPLECTIC_TOL: f64 = 1e-6;
const LIFT_FD_STEP: f64 = 1e-5;

fn fd_pushforward<M>(map: &M, p: &ContactPoint, w: &TangentVector) -> Result<TangentVector>
where
    M: Fn(&ContactPoint) -> Result<ContactPoint> + ?Sized,
{
    let h = LIFT_FD_STEP;
    let state = p.to_state();
    let dir = w.to_state();
    let plus: Vec<f64> = state.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = state.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
    let ip = map(&ContactPoint::from_state(&plus))?;
    let im = map(&ContactPoint::from_state(&minus))?;
    let d: Vec<f64> = ip
        .to_state()
        .iter()
        .zip(im.to_state())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    Ok(TangentVector::from_state(&d))
}

/// Build the lifted map after verifying (i) h is consistent with ψ
/// (ψ*α = e^h α on probes, tolerance 1e−4) and (ii) the lifted action
/// preserves d(e^v α) on probe tangent pairs (FD-linearized, 1e−6).
pub fn lift_contactomorphism<'a>(
    psi: ContactMap<'a>,
    h: Box<dyn Fn(&ContactPoint) -> f64 + 'a>,
    probe_points: &[ContactPoint],
    probe_dirs: &[TangentVector],
) -> Result<LiftedMap<'a>> {
    for p in probe_points {
        let image = psi(p)?;
        let scale = (h)(p).exp();
        for w in probe_dirs {
            let dw = fd_pushforward(psi.as_ref(), p, w)?;
            let lhs = alpha_eval(&image, &dw)?;
            let rhs = scale * alpha_eval(p, w)?;
            if (lhs - rhs).abs() > LIFT_CONSISTENCY_TOL * (1.0 + rhs.abs()) {
                return Err(WclError::Domain(format!(
                    "conformal exponent inconsistent with the map: ψ*α = {lhs} vs e^h·α = {rhs}"
                )));
            }
        }
    }
    let lifted = LiftedMap { psi, h };
    // Symplectic-form residual of the lifted action on probe pairs.
    for p in probe_points {
        let base = SymplectizationPoint::new(p.clone(), 0.25)?;
        for (i, w1) in probe_dirs.iter().enumerate() {
            for w2 in probe_dirs.iter().skip(i + 1) {
                let pair = [
                    SympTangent {
                        w: w1.clone(),
                        dv: 0.3,
                    },
                    SympTangent {
                        w: w2.clone(),
                        dv: -0.2,
                    },
                ];
                let before = crate::contact::symp_form_eval(&base, &pair[0], &pair[1])?;
                let after = {
                    let h = LIFT_FD_STEP;
                    let s0 = base.to_state();
                    let push = |w: &SympTangent| -> Result<SympTangent> {
                        let dir = w.to_state();
                        let plus: Vec<f64> = s0.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
                        let minus: Vec<f64> = s0.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
                        let ip = lifted.apply(&SymplectizationPoint::from_state(&plus))?;
                        let im = lifted.apply(&SymplectizationPoint::from_state(&minus))?;
                        let d: Vec<f64> = ip
                            .to_state()
                            .iter()
                            .zip(im.to_state())
                            .map(|(a, b)| (a - b) / (2.0 * h))
                            .collect();
                        Ok(SympTangent::from_state(&d))
                    };
                    let dw1 = push(&pair[0])?;
                    let dw2 = push(&pair[1])?;
                    let image = lifted.apply(&base)?;
                    crate::contact::symp_form_eval(&image, &dw1, &dw2)?
                };
                if (after - before).abs() > LIFT_SYMPLECTIC_TOL * (1.0 + before.abs()) {
                    return Err(WclError::Domain(format!(
                        "lifted action does not preserve d(e^v α): {before} vs {after}"
                    )));
                }
            }
        }
    }
    Ok(lifted)
}

/// A time-dependent contact Hamiltonian family H_t(p). Implementations
/// may keep warm-start state behind interior mutability; workers clone
/// their own instance.
pub trait TimeFamily: Send {
    fn value(&self, p: &ContactPoint, t: f64) -> f64;

    fn gradient(&self, p: &ContactPoint, t: f64) -> ContactGradient {
        crate::contact::fd_gradient(&|q| self.value(q, t), p)
    }

    /// Drop any warm-start state; called at trajectory boundaries so a
    /// hint never leaks from one trajectory to an unrelated one.
    fn reset(&self) {}

    fn boxed_clone(&self) -> Box<dyn TimeFamily>;
}

/// The zero family (traces of it leave the cylinder fixed).
#[derive(Clone)]
pub struct ZeroFamily;

impl TimeFamily for ZeroFamily {
    fn value(&self, _p: &ContactPoint, _t: f64) -> f64 {
        0.0
    }
    fn gradient(&self, p: &ContactPoint, _t: f64) -> ContactGradient {
        ContactGradient {
            dx: vec![0.0; p.dim()],
            dy: vec![0.0; p.dim()],
            dz: 0.0,
        }
    }
    fn boxed_clone(&self) -> Box<dyn TimeFamily> {
        Box::new(self.clone())
    }
}

/// The patched wrinkle-isotopy Hamiltonian, reparametrized to flow time
/// σ ∈ [0,1] over the family window [t_start, t_end]; values carry the
/// dt/dσ factor so the σ-flow realizes the t-isotopy.
#[derive(Clone)]
pub struct IsotopyFamily {
    pub patch: PatchParams,
    pub t_start: f64,
    pub t_end: f64,
    hint: Cell<Option<(f64, f64)>>,
}

impl IsotopyFamily {
    pub fn new(patch: PatchParams, t_start: f64, t_end: f64) -> Self {
        Self {
            patch,
            t_start,
            t_end,
            hint: Cell::new(None),
        }
    }

    pub fn t_of_sigma(&self, sigma: f64) -> f64 {
        self.t_start + (self.t_end - self.t_start) * sigma
    }
}

impl TimeFamily for IsotopyFamily {
    fn value(&self, p: &ContactPoint, sigma: f64) -> f64 {
        let t = self.t_of_sigma(sigma);
        let eval = h_ext(p, t, &self.patch, self.hint.get());
        self.hint.set(Some((eval.projection.u, eval.projection.x2)));
        (self.t_end - self.t_start) * eval.value
    }

    fn reset(&self) {
        self.hint.set(None);
    }

    fn boxed_clone(&self) -> Box<dyn TimeFamily> {
        Box::new(self.clone())
    }
}

/// Gradient of a function on the symplectization.
#[derive(Debug, Clone)]
pub struct SympGradient {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: f64,
    pub dv: f64,
}

/// The banded cutoff lift H̃(p, v, t) = χ(v)·e^v·H_t(p) with χ a
/// monotone smoothstep: 0 for v ≤ −T_band, 1 for v ≥ T_band.
pub struct CutoffLifted {
    pub family: Box<dyn TimeFamily>,
    pub t_band: f64,
}

impl CutoffLifted {
    pub fn new(family: Box<dyn TimeFamily>, t_band: f64) -> Result<Self> {
        if !(t_band > 0.0) {
            return Err(WclError::Domain(format!(
                "T_band must be > 0, got {t_band}"
            )));
        }
        Ok(Self { family, t_band })
    }

    pub fn chi(&self, v: f64) -> f64 {
        smoothstep5((v + self.t_band) / (2.0 * self.t_band))
    }

    fn chi_deriv(&self, v: f64) -> f64 {
        smoothstep5_deriv((v + self.t_band) / (2.0 * self.t_band)) / (2.0 * self.t_band)
    }

    pub fn value(&self, point: &SymplectizationPoint, t: f64) -> f64 {
        let chi = self.chi(point.v);
        if chi == 0.0 {
            return 0.0;
        }
        chi * point.v.exp() * self.family.value(&point.p, t)
    }

    pub fn gradient(&self, point: &SymplectizationPoint, t: f64) -> SympGradient {
        let chi = self.chi(point.v);
        let dchi = self.chi_deriv(point.v);
        let ev = point.v.exp();
        if chi == 0.0 && dchi == 0.0 {
            let n = point.p.dim();
            return SympGradient {
                dx: vec![0.0; n],
                dy: vec![0.0; n],
                dz: 0.0,
                dv: 0.0,
            };
        }
        let h = self.family.value(&point.p, t);
        let g = self.family.gradient(&point.p, t);
        SympGradient {
            dx: g.dx.iter().map(|d| chi * ev * d).collect(),
            dy: g.dy.iter().map(|d| chi * ev * d).collect(),
            dz: chi * ev * g.dz,
            dv: (dchi + chi) * ev * h,
        }
    }

    pub fn boxed_clone(&self) -> Self {
        Self {
            family: self.family.boxed_clone(),
            t_band: self.t_band,
        }
    }
}

/// Convenience constructor matching the operation name.
pub fn lifted_hamiltonian(family: Box<dyn TimeFamily>, t_band: f64) -> Result<CutoffLifted> {
    CutoffLifted::new(family, t_band)
}

/// Hamiltonian vector field of H̃ for ω = d(e^v α), solving ι_X ω = −dH̃
/// in the explicit coordinate frame:
///   ẋᵢ = −e^{−v} H̃_{yᵢ}
///   ẏᵢ =  e^{−v} (H̃_{xᵢ} + yᵢ H̃_z)
///   ż  =  e^{−v} (H̃_v − Σ yᵢ H̃_{yᵢ})
///   v̇  = −e^{−v} H̃_z
/// For H̃ = e^v·H(p) this projects to the contact field of H.
pub fn hamiltonian_field_symp(
    lifted: &CutoffLifted,
    point: &SymplectizationPoint,
    t: f64,
) -> Result<SympTangent> {
    if point.v.abs() > 700.0 {
        return Err(WclError::Overflow(format!(
            "e^v not representable at v = {}",
            point.v
        )));
    }
    let g = lifted.gradient(point, t);
    Ok(field_from_gradient(&g, point))
}

fn field_from_gradient(g: &SympGradient, point: &SymplectizationPoint) -> SympTangent {
    let n = point.p.dim();
    let emv = (-point.v).exp();
    let mut w = TangentVector::zero(n);
    let mut y_dot_hy = 0.0;
    for i in 0..n {
        w.dx[i] = -emv * g.dy[i];
        w.dy[i] = emv * (g.dx[i] + point.p.y[i] * g.dz);
        y_dot_hy += point.p.y[i] * g.dy[i];
    }
    w.dz = emv * (g.dv - y_dot_hy);
    let dv = -emv * g.dz;
    SympTangent { w, dv }
}

/// Residual |ω(X, W) + dH̃(W)| maximized over probe tangents; the field
/// solve is exact in exact arithmetic, so this checks transcription.
pub fn symp_field_residual(
    lifted: &CutoffLifted,
    point: &SymplectizationPoint,
    t: f64,
    probes: &[SympTangent],
) -> Result<f64> {
    let x = hamiltonian_field_symp(lifted, point, t)?;
    let g = lifted.gradient(point, t);
    let mut worst: f64 = 0.0;
    for w in probes {
        let omega = crate::contact::symp_form_eval(point, &x, w)?;
        let mut dh = g.dz * w.w.dz + g.dv * w.dv;
        for i in 0..point.p.dim() {
            dh += g.dx[i] * w.w.dx[i] + g.dy[i] * w.w.dy[i];
        }
        worst = worst.max((omega + dh).abs());
    }
    Ok(worst)
}

/// Per-node bookkeeping of the traced mesh.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeFlags {
    /// Parameter point lies in (or near) the excised core disc.
    pub core: bool,
    /// Trajectory left the bounding box before reaching time 1.
    pub truncated: bool,
}

impl NodeFlags {
    pub fn as_str(&self) -> &'static str {
        match (self.core, self.truncated) {
            (false, false) => "ok",
            (true, false) => "core",
            (false, true) => "truncated",
            (true, true) => "core+truncated",
        }
    }
}

/// A sampled image of L₀×R under the traced Hamiltonian flow, on the
/// grid (u_i, x₂_j, v_k) with quad connectivity inherited from the grid.
#[derive(Debug, Clone)]
pub struct MeshedLagrangian {
    pub us: Vec<f64>,
    pub x2s: Vec<f64>,
    pub vs: Vec<f64>,
    /// Row-major (i·nx + j)·nv + k.
    pub nodes: Vec<SymplectizationPoint>,
    pub flags: Vec<NodeFlags>,
    /// Accumulated action ∫(θ(X_H̃) − H̃) dt along each node's flow; a
    /// primitive of e^v α on the traced surface (zero on the initial
    /// cylinder, where the form pulls back to zero).
    pub action: Vec<f64>,
    pub n: usize,
}

impl MeshedLagrangian {
    pub fn nu(&self) -> usize {
        self.us.len()
    }
    pub fn nx(&self) -> usize {
        self.x2s.len()
    }
    pub fn nv(&self) -> usize {
        self.vs.len()
    }

    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.nx() + j) * self.nv() + k
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> &SymplectizationPoint {
        &self.nodes[self.idx(i, j, k)]
    }

    pub fn flag(&self, i: usize, j: usize, k: usize) -> NodeFlags {
        self.flags[self.idx(i, j, k)]
    }

    pub fn truncated_count(&self) -> usize {
        self.flags.iter().filter(|f| f.truncated).count()
    }

    /// Plain-text export: one node per line, documented header.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# wcl mesh trace v1\n");
        out.push_str(&format!(
            "# grid nu={} nx2={} nv={} n={}\n",
            self.nu(),
            self.nx(),
            self.nv(),
            self.n
        ));
        out.push_str("# columns: iu ix2 iv u x2 v0 x1..xn y1..yn z v flags\n");
        for i in 0..self.nu() {
            for j in 0..self.nx() {
                for k in 0..self.nv() {
                    let node = self.node(i, j, k);
                    let flags = self.flag(i, j, k);
                    out.push_str(&format!(
                        "{} {} {} {} {} {}",
                        i,
                        j,
                        k,
                        crate::util::fmt_f64(self.us[i]),
                        crate::util::fmt_f64(self.x2s[j]),
                        crate::util::fmt_f64(self.vs[k])
                    ));
                    for c in node.p.x.iter().chain(node.p.y.iter()) {
                        out.push_str(&format!(" {}", crate::util::fmt_f64(*c)));
                    }
                    out.push_str(&format!(
                        " {} {} {}\n",
                        crate::util::fmt_f64(node.p.z),
                        crate::util::fmt_f64(node.v),
                        flags.as_str()
                    ));
                }
            }
        }
        out
    }
}

/// Grid and integration controls of the trace.
#[derive(Debug, Clone)]
pub struct TraceConfig {
    pub nu: usize,
    pub nx: usize,
    pub nv: usize,
    pub u_range: (f64, f64),
    pub x2_range: (f64, f64),
    pub v_range: (f64, f64),
    pub step: f64,
    /// Parameter points with u² + x₂² below this are flagged `core`.
    pub core_flag_sq: f64,
    /// Parameter points with |x₂| below this are also flagged: the strip
    /// through the wrinkle core carries the u-branch handover (and its
    /// fold), and residual maxima are taken away from it.
    pub strip_flag: f64,
    pub jobs: usize,
}

impl TraceConfig {
    pub fn desk_default() -> Self {
        Self {
            nu: 33,
            nx: 33,
            nv: 7,
            u_range: (-1.6, 1.6),
            x2_range: (-1.6, 1.6),
            v_range: (-5.0, 5.0),
            step: 2e-3,
            core_flag_sq: 0.15,
            strip_flag: 0.15,
            jobs: available_jobs(),
        }
    }
}

pub fn available_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
}

/// Trace φ₁(L₀×R): flow every grid node of the Legendrian cylinder from
/// time 0 to 1 along the Hamiltonian field of H̃. Nodes in the zero band
/// of the cutoff are fixed without integration; escaping nodes are
/// flagged truncated, and the mesh is still returned.
///
/// Pre: the sampler must produce Legendrian samples (max |α(frame)| over
/// the grid below 1e−8), otherwise the trace is rejected.
pub fn trace_cobordism(
    sampler_t: f64,
    n: usize,
    lifted: &CutoffLifted,
    cfg: &TraceConfig,
) -> Result<MeshedLagrangian> {
    let us = crate::util::linspace(cfg.u_range.0, cfg.u_range.1, cfg.nu.max(3));
    let x2s = crate::util::linspace(cfg.x2_range.0, cfg.x2_range.1, cfg.nx.max(3));
    let vs = crate::util::linspace(cfg.v_range.0, cfg.v_range.1, cfg.nv.max(3));

    // Legendrian pre-check on the sampler.
    let mut worst: f64 = 0.0;
    for &u in &us {
        for &x2 in &x2s {
            let p = lift_family(u, x2, sampler_t, n);
            let [ru, rx] = jacobian(u, x2, sampler_t, n);
            worst = worst.max(alpha_eval(&p, &ru)?.abs());
            worst = worst.max(alpha_eval(&p, &rx)?.abs());
        }
    }
    if worst > 1e-8 {
        return Err(WclError::Domain(format!(
            "L0 sampler is not Legendrian: pullback residual {worst}"
        )));
    }

    let total = us.len() * x2s.len() * vs.len();
    let jobs = cfg.jobs.max(1).min(total.max(1));
    let bbox = BoundingBox { half_width: 1e3 };

    let work = |range: std::ops::Range<usize>,
                lifted: &CutoffLifted|
     -> Vec<(SymplectizationPoint, NodeFlags, f64)> {
        let nv = vs.len();
        let nx = x2s.len();
        let mut out = Vec::with_capacity(range.len());
        for idx in range {
            let k = idx % nv;
            let j = (idx / nv) % nx;
            let i = idx / (nv * nx);
            let (u, x2, v0) = (us[i], x2s[j], vs[k]);
            lifted.family.reset();
            let p0 = lift_family(u, x2, sampler_t, n);
            let core = u * u + x2 * x2 < cfg.core_flag_sq || x2.abs() < cfg.strip_flag;
            let start = SymplectizationPoint { p: p0, v: v0 };
            if v0 <= -lifted.t_band {
                // χ ≡ 0 there and v̇ = 0 keeps it: the node is fixed.
                out.push((
                    start,
                    NodeFlags {
                        core,
                        truncated: false,
                    },
                    0.0,
                ));
                continue;
            }
            // Augmented state (x.., y.., z, v, action): the action rate
            // θ(X) − H̃ integrates the primitive alongside the flow.
            let mut field = |t: f64, state: &[f64]| -> Vec<f64> {
                let point = SymplectizationPoint::from_state(&state[..state.len() - 1]);
                match hamiltonian_field_symp(lifted, &point, t) {
                    Ok(x) => {
                        let theta_x =
                            point.v.exp() * alpha_eval(&point.p, &x.w).unwrap_or(f64::NAN);
                        let h_val = lifted.value(&point, t);
                        let mut st = x.to_state();
                        st.push(theta_x - h_val);
                        st
                    }
                    Err(_) => vec![0.0; state.len()],
                }
            };
            let mut state0 = start.to_state();
            state0.push(0.0);
            let outcome = rk4_flow(&mut field, &state0, 0.0, 1.0, cfg.step, &bbox);
            let flags = NodeFlags {
                core,
                truncated: outcome.truncated.is_some(),
            };
            let action = outcome.state[outcome.state.len() - 1];
            out.push((
                SymplectizationPoint::from_state(&outcome.state[..outcome.state.len() - 1]),
                flags,
                action,
            ));
        }
        out
    };

    let mut nodes: Vec<SymplectizationPoint> = Vec::with_capacity(total);
    let mut flags: Vec<NodeFlags> = Vec::with_capacity(total);
    let mut action: Vec<f64> = Vec::with_capacity(total);
    if jobs <= 1 {
        for (node, flag, act) in work(0..total, lifted) {
            nodes.push(node);
            flags.push(flag);
            action.push(act);
        }
    } else {
        let chunk = total.div_ceil(jobs);
        let mut results: Vec<Vec<(SymplectizationPoint, NodeFlags, f64)>> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..jobs {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                if lo >= hi {
                    break;
                }
                let worker = lifted.boxed_clone();
                let work_ref = &work;
                handles.push(scope.spawn(move || work_ref(lo..hi, &worker)));
            }
            for h in handles {
                results.push(h.join().expect("trace worker panicked"));
            }
        });
        for part in results {
            for (node, flag, act) in part {
                nodes.push(node);
                flags.push(flag);
                action.push(act);
            }
        }
    }

    Ok(MeshedLagrangian {
        us,
        x2s,
        vs,
        nodes,
        flags,
        action,
        n,
    })
}

/// One sampled row of the conjugated-isotopy diagnostic.
#[derive(Debug, Clone)]
pub struct ConjugatedSample {
    pub t: f64,
    pub u: f64,
    pub x2: f64,
    pub alpha_xt: f64,
    pub alpha_conjugated: f64,
    pub lambda: f64,
}

/// Sample the conjugated family L′_t = Ψ_t(L_t): for each (t, parameter)
/// the velocity X′_t is taken by central differences in t and α(X′_t) is
/// reported next to the measured λ(p_t)·α(X_t).
pub fn conjugated_isotopy<F>(
    push_at: &F,
    params: &[(f64, f64)],
    ts: &[f64],
    n: usize,
    fd_dt: f64,
) -> Result<Vec<ConjugatedSample>>
where
    F: Fn(f64, &ContactPoint) -> Result<ContactPoint>,
{
    let mut out = Vec::new();
    for &t in ts {
        if fd_dt <= 0.0 || t + fd_dt == t {
            return Err(WclError::Domain(format!(
                "FD step {fd_dt} underflows at t = {t}"
            )));
        }
        for &(u, x2) in params {
            let center = lift_family(u, x2, t, n);
            let image_c = push_at(t, &center)?;
            let plus = push_at(t + fd_dt, &lift_family(u, x2, t + fd_dt, n))?;
            let minus = push_at(t - fd_dt, &lift_family(u, x2, t - fd_dt, n))?;
            let d: Vec<f64> = plus
                .to_state()
                .iter()
                .zip(minus.to_state())
                .map(|(a, b)| (a - b) / (2.0 * fd_dt))
                .collect();
            let xprime = TangentVector::from_state(&d);
            let alpha_conj = alpha_eval(&image_c, &xprime)?;
            let base_alpha = crate::wrinkle::alpha_xt(u, x2, t);
            let probes = crate::push::probe_directions(&center, 6, 2024);
            let lam = measure_lambda(&|q: &ContactPoint| push_at(t, q), &center, &probes)?;
            out.push(ConjugatedSample {
                t,
                u,
                x2,
                alpha_xt: base_alpha,
                alpha_conjugated: alpha_conj,
                lambda: lam,
            });
        }
    }
    Ok(out)
}

/// Contact projection of the lifted field must equal the contact field of
/// H_t wherever the upper branch is active; returns the max component
/// mismatch over the given points.
pub fn projection_residual(
    lifted: &CutoffLifted,
    points: &[(ContactPoint, f64)],
    t: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, v) in points {
        if *v < lifted.t_band {
            continue;
        }
        let point = SymplectizationPoint::new(p.clone(), *v)?;
        let x = hamiltonian_field_symp(lifted, &point, t)?;
        let field = FrozenFamily {
            family: lifted.family.as_ref(),
            t,
        };
        let xc = contact_vector_field(&field, p)?;
        for i in 0..p.dim() {
            worst = worst.max((x.w.dx[i] - xc.dx[i]).abs());
            worst = worst.max((x.w.dy[i] - xc.dy[i]).abs());
        }
        worst = worst.max((x.w.dz - xc.dz).abs());
    }
    Ok(worst)
}

/// A time slice of a `TimeFamily` viewed as a ScalarField.
pub struct FrozenFamily<'a> {
    pub family: &'a dyn TimeFamily,
    pub t: f64,
}

impl ScalarField for FrozenFamily<'_> {
    fn value(&self, p: &ContactPoint) -> f64 {
        self.family.value(p, self.t)
    }
    fn gradient(&self, p: &ContactPoint) -> ContactGradient {
        self.family.gradient(p, self.t)
    }
}
