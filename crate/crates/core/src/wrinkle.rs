//! The wrinkled front model: the static wrinkled embedding, the
//! one-parameter family of wrinkled Legendrian fronts, their lifts,
//! Jacobians, singular loci, the deformation field X_t and α(X_t).
//!
//! Throughout, w abbreviates t − x₂² (the static model has w = 1 − |v|²).
//! Closed forms:
//!   x₁ = u³ − 3uw
//!   z  = (1/5)u⁵ − (2/3)u³w + uw²
//!   y₁ = (1/3)(u² + x₂² − t) = (1/3)(u² − w)
//!   y₂ = −(2/3)u³x₂ − 2ux₂w,     yᵢ = 0 for i > 2
//! and the pullback of α = dz − Σyᵢdxᵢ under the lift vanishes
//! identically, which the tests check on grids.

use crate::contact::{ContactPoint, TangentVector};
use crate::error::{Result, WclError};

/// Parameters of the one-parameter wrinkle family.
#[derive(Debug, Clone)]
pub struct WrinkleChart {
    /// Family time of this snapshot.
    pub t: f64,
    /// Contact dimension n (ambient R^(2n+1)).
    pub n: usize,
    /// Isotopy half-width: the family runs over [−T, T].
    pub t_half: f64,
    /// Wrinkle lifetime [t₀, t₁] ⊆ [−T, T].
    pub birth: f64,
    pub death: f64,
}

impl WrinkleChart {
    pub fn new(t: f64, n: usize, t_half: f64, birth: f64, death: f64) -> Result<Self> {
        if n < 2 {
            return Err(WclError::Domain(format!("n must be >= 2, got {n}")));
        }
        if !(t_half > 0.0) {
            return Err(WclError::Domain(format!("T must be > 0, got {t_half}")));
        }
        if !(birth <= death && -t_half <= birth && death <= t_half) {
            return Err(WclError::Domain(format!(
                "wrinkle lifetime [{birth}, {death}] must sit inside [-{t_half}, {t_half}]"
            )));
        }
        Ok(Self {
            t,
            n,
            t_half,
            birth,
            death,
        })
    }

    /// Default chart: n = 2, T = 1, lifetime [−T/2, T/2].
    pub fn standard(t: f64) -> Self {
        Self::new(t, 2, 1.0, -0.5, 0.5).expect("standard chart is valid")
    }
}

/// A point (u, v) of the parametrization domain; v₁ plays the role of x₂
/// in the family model, higher slow coordinates are carried inert.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub u: f64,
    pub v: Vec<f64>,
}

impl ParamPoint {
    pub fn new2(u: f64, x2: f64) -> Self {
        Self { u, v: vec![x2] }
    }
}

/// Static wrinkled embedding W(u, v) = (v, x₁, z).
pub fn front_static(q: &ParamPoint) -> Vec<f64> {
    let w = 1.0 - q.v.iter().map(|c| c * c).sum::<f64>();
    let u = q.u;
    let x1 = u * u * u - 3.0 * u * w;
    let z = 0.2 * u.powi(5) - (2.0 / 3.0) * u.powi(3) * w + u * w * w;
    let mut out = q.v.clone();
    out.push(x1);
    out.push(z);
    out
}

/// Family front W_t(u, x₂) = (z, x₁, x₂).
pub fn front_family(u: f64, x2: f64, t: f64) -> [f64; 3] {
    let w = t - x2 * x2;
    let x1 = u * u * u - 3.0 * u * w;
    let z = 0.2 * u.powi(5) - (2.0 / 3.0) * u.powi(3) * w + u * w * w;
    [z, x1, x2]
}

/// Legendrian lift of the family front into R^(2n+1); slow coordinates
/// beyond x₂ are zero and have yᵢ = 0.
pub fn lift_family(u: f64, x2: f64, t: f64, n: usize) -> ContactPoint {
    let [z, x1, _] = front_family(u, x2, t);
    let w = t - x2 * x2;
    let y1 = (u * u + x2 * x2 - t) / 3.0;
    let y2 = -(2.0 / 3.0) * u.powi(3) * x2 - 2.0 * u * x2 * w;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    x[0] = x1;
    x[1] = x2;
    y[0] = y1;
    y[1] = y2;
    ContactPoint { x, y, z }
}

/// Rows ∂/∂u and ∂/∂x₂ of `lift_family`, each a tangent vector of
/// R^(2n+1). Closed-form partials, cross-checked against finite
/// differences in the tests.
pub fn jacobian(u: f64, x2: f64, t: f64, n: usize) -> [TangentVector; 2] {
    let w = t - x2 * x2;
    let u2 = u * u;

    let mut row_u = TangentVector::zero(n);
    row_u.dx[0] = 3.0 * u2 - 3.0 * w;
    row_u.dx[1] = 0.0;
    row_u.dy[0] = 2.0 * u / 3.0;
    row_u.dy[1] = -2.0 * u2 * x2 - 2.0 * x2 * w;
    row_u.dz = (u2 - w) * (u2 - w);

    let mut row_x2 = TangentVector::zero(n);
    row_x2.dx[0] = 6.0 * u * x2;
    row_x2.dx[1] = 1.0;
    row_x2.dy[0] = 2.0 * x2 / 3.0;
    row_x2.dy[1] = -(2.0 / 3.0) * u.powi(3) - 2.0 * u * w + 4.0 * u * x2 * x2;
    row_x2.dz = (4.0 / 3.0) * u.powi(3) * x2 - 4.0 * u * x2 * w;

    [row_u, row_x2]
}

/// Smallest singular value of the 2×(2n+1) Jacobian, via the 2×2 Gram
/// matrix J Jᵀ.
pub fn jacobian_sigma_min(u: f64, x2: f64, t: f64, n: usize) -> f64 {
    let [ru, rx] = jacobian(u, x2, t, n);
    let su = ru.to_state();
    let sx = rx.to_state();
    let a: f64 = su.iter().map(|v| v * v).sum();
    let b: f64 = su.iter().zip(&sx).map(|(p, q)| p * q).sum();
    let c: f64 = sx.iter().map(|v| v * v).sum();
    let mean = 0.5 * (a + c);
    let disc = (0.5 * (a - c)).powi(2) + b * b;
    let lam_min = (mean - disc.sqrt()).max(0.0);
    lam_min.sqrt()
}

/// Rank-drop threshold on singular values.
const SIGMA_TOL: f64 = 1e-8;
/// Guard: σ_min at neighbor grid points must exceed this.
const SIGMA_GUARD: f64 = 1e-2;

/// The codimension-2 singular locus of the time-t wrinkle: empty for
/// t ≤ 0, and {u = 0, x₂² = t} for t > 0 (two points when n = 2). The
/// analytic candidates are certified numerically by a rank analysis of
/// the Jacobian with a guard band against nearby points.
pub fn singular_locus(t: f64, n: usize) -> Vec<ParamPoint> {
    if t <= 0.0 {
        return Vec::new();
    }
    let root = t.sqrt();
    let mut out = Vec::new();
    for &x2 in &[-root, root] {
        let sigma = jacobian_sigma_min(0.0, x2, t, n);
        let guard_ok = [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)]
            .iter()
            .all(|(du, dx)| jacobian_sigma_min(*du, x2 + dx, t, n) > SIGMA_GUARD);
        if sigma < SIGMA_TOL && guard_ok {
            out.push(ParamPoint::new2(0.0, x2));
        }
    }
    out.sort_by(|a, b| a.v[0].partial_cmp(&b.v[0]).unwrap());
    out
}

/// The deformation field X_t = ∂/∂t of `lift_family` at fixed (u, x₂):
/// X_t = (−3u)∂_{x₁} + (−1/3)∂_{y₁} + (−2ux₂)∂_{y₂}
///       + (−(2/3)u³ + 2u(t−x₂²))∂_z.
pub fn isotopy_field_xt(u: f64, x2: f64, t: f64, n: usize) -> TangentVector {
    let w = t - x2 * x2;
    let mut out = TangentVector::zero(n);
    out.dx[0] = -3.0 * u;
    out.dy[0] = -1.0 / 3.0;
    out.dy[1] = -2.0 * u * x2;
    out.dz = -(2.0 / 3.0) * u.powi(3) + 2.0 * u * w;
    out
}

/// α(X_t) = (1/3)u³ + u(t − x₂²). Equals x₁/3 + 2u(t − x₂²) and the
/// direct pairing of `lift_family` with `isotopy_field_xt`; the identity
/// suite checks all three agree.
pub fn alpha_xt(u: f64, x2: f64, t: f64) -> f64 {
    u * u * u / 3.0 + u * (t - x2 * x2)
}

/// u recovered from y₁: u = ±√(3y₁ − x₂² + t). Errors when the radicand
/// is below −1e−9; tiny negative values are clamped to zero.
pub fn u_from_y1(y1: f64, x2: f64, t: f64, positive_branch: bool) -> Result<f64> {
    let radicand = 3.0 * y1 - x2 * x2 + t;
    if radicand < -1e-9 {
        return Err(WclError::Domain(format!(
            "u inversion radicand {radicand} < 0"
        )));
    }
    let root = radicand.max(0.0).sqrt();
    Ok(if positive_branch { root } else { -root })
}

/// u recovered from (x₁, y₂): u = −(y₂ + (2/3)x₁x₂) / (4x₂(t − x₂²)).
/// Errors when the denominator is within the stated guard of zero.
pub fn u_from_y2(x1: f64, x2: f64, y2: f64, t: f64) -> Result<f64> {
    let denom = 4.0 * x2 * (t - x2 * x2);
    if denom.abs() < 1e-9 {
        return Err(WclError::Singularity(format!(
            "u inversion denominator {denom} too small"
        )));
    }
    Ok(-(y2 + (2.0 / 3.0) * x1 * x2) / denom)
}

/// Outcome of the nearest-parameter projection onto L_t.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub u: f64,
    pub x2: f64,
    pub dist: f64,
    pub converged: bool,
    pub iterations: usize,
}

const GN_MAX_ITER: usize = 20;
const GN_STEP_TOL: f64 = 1e-12;

/// The five coordinates (x₁, x₂, y₁, y₂, z) the family actually moves;
/// slow coordinates only add a constant to the distance.
#[inline]
fn lift_active(u: f64, x2: f64, t: f64) -> [f64; 5] {
    let w = t - x2 * x2;
    let u3 = u * u * u;
    let x1 = u3 - 3.0 * u * w;
    let z = 0.2 * u3 * u * u - (2.0 / 3.0) * u3 * w + u * w * w;
    let y1 = (u * u + x2 * x2 - t) / 3.0;
    let y2 = -(2.0 / 3.0) * u3 * x2 - 2.0 * u * x2 * w;
    [x1, x2, y1, y2, z]
}

#[inline]
fn jac_active(u: f64, x2: f64, t: f64) -> ([f64; 5], [f64; 5]) {
    let w = t - x2 * x2;
    let u2 = u * u;
    let u3 = u2 * u;
    let row_u = [
        3.0 * u2 - 3.0 * w,
        0.0,
        2.0 * u / 3.0,
        -2.0 * u2 * x2 - 2.0 * x2 * w,
        (u2 - w) * (u2 - w),
    ];
    let row_x2 = [
        6.0 * u * x2,
        1.0,
        2.0 * x2 / 3.0,
        -(2.0 / 3.0) * u3 - 2.0 * u * w + 4.0 * u * x2 * x2,
        (4.0 / 3.0) * u3 * x2 - 4.0 * u * x2 * w,
    ];
    (row_u, row_x2)
}

#[inline]
fn active_coords(p: &ContactPoint) -> [f64; 5] {
    [p.x[0], p.x[1], p.y[0], p.y[1], p.z]
}

/// Squared distance contributed by the inert slow coordinates (the lift
/// keeps them at zero).
#[inline]
fn slow_offset_sq(p: &ContactPoint) -> f64 {
    let mut s = 0.0;
    for i in 2..p.dim() {
        s += p.x[i] * p.x[i] + p.y[i] * p.y[i];
    }
    s
}

fn gn_refine(target: &[f64; 5], slow_sq: f64, t: f64, mut u: f64, mut x2: f64) -> Projection {
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..GN_MAX_ITER {
        iterations += 1;
        let q = lift_active(u, x2, t);
        let (su, sx) = jac_active(u, x2, t);
        // Normal equations (JᵀJ)δ = −Jᵀr with mild Levenberg damping so
        // the step stays defined at the rank-drop locus.
        let mut a = 0.0;
        let mut b = 0.0;
        let mut c = 0.0;
        let mut g0 = 0.0;
        let mut g1 = 0.0;
        for i in 0..5 {
            let r = q[i] - target[i];
            a += su[i] * su[i];
            b += su[i] * sx[i];
            c += sx[i] * sx[i];
            g0 += su[i] * r;
            g1 += sx[i] * r;
        }
        let damp = 1e-10 * (a + c).max(1.0);
        let (aa, cc) = (a + damp, c + damp);
        let det = aa * cc - b * b;
        if det.abs() < 1e-300 {
            break;
        }
        let du = (-g0 * cc + g1 * b) / det;
        let dx2 = (-g1 * aa + g0 * b) / det;
        u += du;
        x2 += dx2;
        if du.abs().max(dx2.abs()) < GN_STEP_TOL {
            converged = true;
            break;
        }
    }
    let q = lift_active(u, x2, t);
    let mut d2 = slow_sq;
    for i in 0..5 {
        d2 += (q[i] - target[i]) * (q[i] - target[i]);
    }
    Projection {
        u,
        x2,
        dist: d2.sqrt(),
        converged,
        iterations,
    }
}

/// A warm-start result is only trusted when it lands this close; a hint
/// carried over from an unrelated evaluation would otherwise capture the
/// descent on the wrong sheet of the wrinkle. Callers that evaluate
/// along continuous trajectories reset their hint between trajectories,
/// so the radius only needs to reject absurd captures.
const HINT_TRUST_RADIUS: f64 = 50.0;

/// Nearest-parameter projection of an ambient point onto L_t.
///
/// With a `hint` (warm start from a nearby evaluation) a single
/// Gauss–Newton descent is run and kept when it converges within the
/// trust radius; otherwise cold starts try several initializations
/// derived from the front coordinates (x₂ read off directly, u from the
/// y₁ inversion on both branches and from sign(x₁) cube-root estimates)
/// and keep the closest.
pub fn project_to_family(
    p: &ContactPoint,
    t: f64,
    n: usize,
    hint: Option<(f64, f64)>,
) -> Projection {
    debug_assert_eq!(p.dim(), n);
    let target = active_coords(p);
    let slow_sq = slow_offset_sq(p);
    if let Some((u0, x20)) = hint {
        let proj = gn_refine(&target, slow_sq, t, u0, x20);
        if proj.converged && proj.dist <= HINT_TRUST_RADIUS {
            return proj;
        }
    }
    let x20 = p.x[1];
    let radicand = (3.0 * p.y[0] - x20 * x20 + t).max(0.0);
    let u_y1 = radicand.sqrt();
    let u_cbrt = p.x[0].abs().cbrt().copysign(p.x[0]);
    let mut best: Option<Projection> = None;
    for &u0 in &[u_y1, -u_y1, u_cbrt, 0.0] {
        let cand = gn_refine(&target, slow_sq, t, u0, x20);
        let better = match &best {
            None => true,
            Some(b) => cand.dist < b.dist,
        };
        if better {
            best = Some(cand);
        }
    }
    best.expect("at least one start")
}

/// One wrinkle chart of a nested configuration: placement of its core
/// disc in the (u, x₂) parameter plane.
#[derive(Debug, Clone)]
pub struct NestedChart {
    pub chart: WrinkleChart,
    /// Center of the chart's core disc in the (u, x₂) plane.
    pub center: [f64; 2],
    /// Radius of the core disc this chart pushes to infinity.
    pub eps_core: f64,
}

/// Charts ordered from outermost to innermost.
#[derive(Debug, Clone)]
pub struct NestedConfig {
    pub charts: Vec<NestedChart>,
}

/// Result of the nested-containment validation.
#[derive(Debug, Clone, PartialEq)]
pub enum NestedValidation {
    Pass,
    /// Indices (outer, inner) of the first violating pair.
    Fail {
        outer: usize,
        inner: usize,
    },
}

/// Pass iff every outer chart's core disc sits inside each inner chart's
/// pushed region (the core discs can be chosen as small as needed, so a
/// valid configuration always exists; this checks the one given).
pub fn validate_nested(config: &NestedConfig) -> Result<NestedValidation> {
    if config.charts.is_empty() {
        return Err(WclError::Domain("nested config must be nonempty".into()));
    }
    for outer in 0..config.charts.len() {
        for inner in (outer + 1)..config.charts.len() {
            let o = &config.charts[outer];
            let i = &config.charts[inner];
            let dist =
                ((o.center[0] - i.center[0]).powi(2) + (o.center[1] - i.center[1]).powi(2)).sqrt();
            if dist + o.eps_core > i.eps_core {
                return Ok(NestedValidation::Fail { outer, inner });
            }
        }
    }
    Ok(NestedValidation::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::alpha_eval;

    #[test]
    fn front_static_examples() {
        let origin = front_static(&ParamPoint::new2(0.0, 0.0));
        assert_eq!(origin, vec![0.0, 0.0, 0.0]);

        let f = front_static(&ParamPoint::new2(1.0, 0.0));
        assert!((f[1] + 2.0).abs() < 1e-15);
        assert!((f[2] - 8.0 / 15.0).abs() < 1e-15);

        // |v| = 1 kills all but the leading terms.
        let f = front_static(&ParamPoint::new2(1.0, 1.0));
        assert!((f[1] - 1.0).abs() < 1e-15);
        assert!((f[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn front_family_examples() {
        assert_eq!(front_family(0.0, 0.0, 3.0), [0.0, 0.0, 0.0]);

        let f = front_family(1.0, 0.0, 1.0);
        assert!((f[0] - 8.0 / 15.0).abs() < 1e-15);
        assert!((f[1] + 2.0).abs() < 1e-15);

        let f = front_family(1.0, 1.0, 3.0);
        assert!((f[0] - 43.0 / 15.0).abs() < 1e-14);
        assert!((f[1] + 5.0).abs() < 1e-14);
        assert!((f[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn front_family_reduces_to_static_model() {
        // t = 1 − c with x₂² = |v|² − c gives the same w on both sides.
        for &(vv, c) in &[(0.8_f64, 0.3_f64), (1.2, 0.5), (0.5, 0.1), (1.0, 1.0)] {
            let x2 = (vv * vv - c).sqrt();
            let t = 1.0 - c;
            for &u in &[-1.5, -0.3, 0.0, 0.7, 2.0] {
                let fam = front_family(u, x2, t);
                let stat = front_static(&ParamPoint::new2(u, vv));
                assert!((fam[1] - stat[1]).abs() < 1e-12, "x1 mismatch");
                assert!((fam[0] - stat[2]).abs() < 1e-12, "z mismatch");
            }
        }
    }

    #[test]
    fn lift_family_examples() {
        let p = lift_family(0.0, 0.0, 1.0, 2);
        assert_eq!(p.x, vec![0.0, 0.0]);
        assert!((p.y[0] + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.y[1], 0.0);
        assert_eq!(p.z, 0.0);

        let p = lift_family(1.0, 1.0, 3.0, 2);
        assert!((p.x[0] + 5.0).abs() < 1e-14);
        assert!((p.x[1] - 1.0).abs() < 1e-15);
        assert!((p.y[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((p.y[1] + 14.0 / 3.0).abs() < 1e-14);
        assert!((p.z - 43.0 / 15.0).abs() < 1e-14);

        let p = lift_family(1.0, 0.0, 1.0, 2);
        assert!((p.x[0] + 2.0).abs() < 1e-15);
        assert!(p.y[0].abs() < 1e-15);
        assert!(p.y[1].abs() < 1e-15);
        assert!((p.z - 8.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn legendrian_pullback_vanishes_on_grid() {
        // α applied to both Jacobian rows is a symbolic zero; a coarse
        // grid here, the full 101×101×11 grid runs in the acceptance
        // suite.
        for iu in 0..21 {
            for ix in 0..21 {
                for it in 0..5 {
                    let u = -2.0 + 0.2 * iu as f64;
                    let x2 = -2.0 + 0.2 * ix as f64;
                    let t = -1.0 + 0.5 * it as f64;
                    let p = lift_family(u, x2, t, 2);
                    let [ru, rx] = jacobian(u, x2, t, 2);
                    assert!(alpha_eval(&p, &ru).unwrap().abs() < 1e-10);
                    assert!(alpha_eval(&p, &rx).unwrap().abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (u, x2, t) = (1.0, 1.0, 3.0);
        let h = 1e-5;
        let [ru, rx] = jacobian(u, x2, t, 2);
        let fd_u: Vec<f64> = {
            let a = lift_family(u + h, x2, t, 2).to_state();
            let b = lift_family(u - h, x2, t, 2).to_state();
            a.iter().zip(b).map(|(p, q)| (p - q) / (2.0 * h)).collect()
        };
        let fd_x: Vec<f64> = {
            let a = lift_family(u, x2 + h, t, 2).to_state();
            let b = lift_family(u, x2 - h, t, 2).to_state();
            a.iter().zip(b).map(|(p, q)| (p - q) / (2.0 * h)).collect()
        };
        for (a, b) in ru.to_state().iter().zip(fd_u) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in rx.to_state().iter().zip(fd_x) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn jacobian_rank_behavior() {
        // Full rank at the origin for t != 0 (∂x₁/∂u = −3t there).
        let [ru, _] = jacobian(0.0, 0.0, 2.0, 2);
        assert!((ru.dx[0] + 6.0).abs() < 1e-15);
        assert!(jacobian_sigma_min(0.0, 0.0, 2.0, 2) > 1e-1);
        // Rank 1 at the singular locus: the u-row vanishes.
        let [ru, _] = jacobian(0.0, 2.0_f64.sqrt(), 2.0, 2);
        assert!(ru.to_state().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn singular_locus_examples() {
        assert!(singular_locus(-1.0, 2).is_empty());
        let locus = singular_locus(1.0, 2);
        assert_eq!(locus.len(), 2);
        assert!((locus[0].v[0] + 1.0).abs() < 1e-12);
        assert!((locus[1].v[0] - 1.0).abs() < 1e-12);
        assert!(locus.iter().all(|p| p.u == 0.0));
        let locus = singular_locus(4.0, 2);
        assert!((locus[0].v[0] + 2.0).abs() < 1e-12);
        assert!((locus[1].v[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn isotopy_field_examples() {
        let x = isotopy_field_xt(0.0, 0.7, 0.3, 2);
        assert!(x.dx.iter().all(|v| *v == 0.0));
        assert!((x.dy[0] + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(x.dy[1], 0.0);
        assert_eq!(x.dz, 0.0);

        let x = isotopy_field_xt(1.0, 1.0, 3.0, 2);
        assert!((x.dx[0] + 3.0).abs() < 1e-15);
        assert!((x.dy[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((x.dy[1] + 2.0).abs() < 1e-15);
        assert!((x.dz - 10.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn isotopy_field_is_time_derivative_of_lift() {
        let (u, x2, t) = (1.0, 1.0, 3.0);
        let h = 1e-5;
        let a = lift_family(u, x2, t + h, 2).to_state();
        let b = lift_family(u, x2, t - h, 2).to_state();
        let fd: Vec<f64> = a.iter().zip(b).map(|(p, q)| (p - q) / (2.0 * h)).collect();
        let xt = isotopy_field_xt(u, x2, t, 2).to_state();
        for (a, b) in xt.iter().zip(fd) {
            assert!(
                (a - b).abs() < 1e-8,
                "X_t disagrees with FD time derivative"
            );
        }
    }

    #[test]
    fn alpha_xt_examples_and_identities() {
        assert_eq!(alpha_xt(0.0, 0.4, 0.9), 0.0);
        assert!((alpha_xt(1.0, 1.0, 3.0) - 7.0 / 3.0).abs() < 1e-14);
        assert!((alpha_xt(1.0, 0.0, 1.0) - 4.0 / 3.0).abs() < 1e-15);

        // Three routes agree: closed form, x₁/3 + 2uw, α∘(lift, X_t).
        for &(u, x2, t) in &[(1.0, 1.0, 3.0), (-0.7, 0.4, 0.6), (1.3, -0.9, -0.5)] {
            let w = t - x2 * x2;
            let p = lift_family(u, x2, t, 2);
            let closed = alpha_xt(u, x2, t);
            let via_x1 = p.x[0] / 3.0 + 2.0 * u * w;
            let via_alpha = alpha_eval(&p, &isotopy_field_xt(u, x2, t, 2)).unwrap();
            assert!((closed - via_x1).abs() < 1e-12);
            assert!((closed - via_alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn u_inversions_round_trip() {
        for &(u, x2, t) in &[(1.0, 1.0, 3.0), (0.4, -0.8, 1.1), (-1.2, 0.5, 0.9)] {
            let p = lift_family(u, x2, t, 2);
            let rec = u_from_y1(p.y[0], x2, t, u >= 0.0).unwrap();
            assert!((rec - u).abs() < 1e-10);
            let rec = u_from_y2(p.x[0], x2, p.y[1], t).unwrap();
            assert!((rec - u).abs() / u.abs().max(1.0) < 1e-10);
        }
        // The worked example: numerator −(−14/3 − 10/3) = 8, denominator 8.
        let p = lift_family(1.0, 1.0, 3.0, 2);
        let rec = u_from_y2(p.x[0], 1.0, p.y[1], 3.0).unwrap();
        assert!((rec - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_recovers_parameters() {
        let p = lift_family(0.8, -0.6, 0.9, 2);
        let proj = project_to_family(&p, 0.9, 2, None);
        assert!(proj.dist < 1e-9);
        assert!((proj.u - 0.8).abs() < 1e-7);
        assert!((proj.x2 + 0.6).abs() < 1e-7);

        // Off-manifold point: distance positive, projection still lands
        // on the nearest parameters.
        let mut q = p.clone();
        q.z += 0.05;
        let proj = project_to_family(&q, 0.9, 2, Some((0.8, -0.6)));
        assert!(proj.converged);
        assert!(proj.dist <= 0.05 + 1e-12);
    }

    #[test]
    fn nested_validation_examples() {
        let chart = WrinkleChart::standard(0.5);
        let single = NestedConfig {
            charts: vec![NestedChart {
                chart: chart.clone(),
                center: [0.0, 0.0],
                eps_core: 0.3,
            }],
        };
        assert_eq!(validate_nested(&single).unwrap(), NestedValidation::Pass);

        let pass = NestedConfig {
            charts: vec![
                NestedChart {
                    chart: chart.clone(),
                    center: [0.0, 0.0],
                    eps_core: 0.15,
                },
                NestedChart {
                    chart: chart.clone(),
                    center: [0.0, 0.0],
                    eps_core: 0.3,
                },
            ],
        };
        assert_eq!(validate_nested(&pass).unwrap(), NestedValidation::Pass);

        let fail = NestedConfig {
            charts: vec![
                NestedChart {
                    chart: chart.clone(),
                    center: [0.0, 0.0],
                    eps_core: 0.6,
                },
                NestedChart {
                    chart,
                    center: [0.0, 0.0],
                    eps_core: 0.3,
                },
            ],
        };
        assert_eq!(
            validate_nested(&fail).unwrap(),
            NestedValidation::Fail { outer: 0, inner: 1 }
        );
    }

    #[test]
    fn chart_invariants_enforced() {
        assert!(WrinkleChart::new(0.0, 2, 1.0, -0.5, 0.5).is_ok());
        assert!(WrinkleChart::new(0.0, 1, 1.0, -0.5, 0.5).is_err());
        assert!(WrinkleChart::new(0.0, 2, -1.0, -0.5, 0.5).is_err());
        assert!(WrinkleChart::new(0.0, 2, 1.0, -2.0, 0.5).is_err());
    }
}
