//! Excision of the core disc: isotropic escape paths, the cutoff
//! Hamiltonian G(τ,s,a,b) = ψ(s)·f(τ)·φ(a,b) on a tube around the
//! projected path, its flow downstairs, the contact lift Ψ, and the
//! measured conformal factor λ.
//!
//! The escape path freezes every coordinate of the base point except
//! x₁ (moved at unit rate) and z (moved at rate y₁), which makes
//! α(γ′) = y₁ − y₁·1 = 0 exactly. Its Lagrangian projection is a
//! straight segment, so the tube chart is a translation:
//! τ = ±(x₁ − x₁ᵃ), s = ±(y₁ − y₁ᵃ), (a,b) = remaining (x,y) offsets.
//!
//! Sign conventions: downstairs Hamilton equations are taken as
//! ẋ = +∂G/∂y, ẏ = −∂G/∂x so the plateau transports τ at +1; the
//! contact flow that projects onto this one is generated by the
//! z-independent contact Hamiltonian −G∘chart, and is therefore a strict
//! contactomorphism (λ ≡ 1). What diverges with the cap g_cap is the
//! escape displacement, not λ.

use crate::contact::{alpha_eval, ContactPoint, TangentVector};
use crate::error::{Result, WclError};
use crate::flow::{rk4_flow, BoundingBox};
use crate::util::{smoothstep5, smoothstep5_deriv, SplitMix64};
use crate::wrinkle::project_to_family;

/// The capped profile g: [−3T, 3T] → [0, g_cap] standing in for the
/// "infinite push time": plateau g_cap on [−T, T], zero on the outer
/// bands, monotone smoothstep ramps between.
#[derive(Debug, Clone, Copy)]
pub struct EscapeProfile {
    pub t_half: f64,
    pub g_cap: f64,
}

impl EscapeProfile {
    pub fn new(t_half: f64, g_cap: f64) -> Result<Self> {
        if !(t_half > 0.0 && g_cap > 0.0) {
            return Err(WclError::Domain(format!(
                "escape profile needs T > 0 and g_cap > 0, got T={t_half}, g_cap={g_cap}"
            )));
        }
        Ok(Self { t_half, g_cap })
    }

    /// g(t); errors outside [−3T, 3T].
    pub fn g_eval(&self, t: f64) -> Result<f64> {
        let big_t = self.t_half;
        if t.abs() > 3.0 * big_t {
            return Err(WclError::Domain(format!(
                "escape time {t} outside [-3T, 3T] = [{}, {}]",
                -3.0 * big_t,
                3.0 * big_t
            )));
        }
        let a = t.abs();
        Ok(if a <= big_t {
            self.g_cap
        } else if a >= 2.0 * big_t {
            0.0
        } else {
            self.g_cap * smoothstep5((2.0 * big_t - a) / big_t)
        })
    }
}

/// Isotropic escape path: x₁ ↦ x₁ + τ, z ↦ z + τ·y₁, all else frozen.
pub fn gamma(base: &ContactPoint, tau: f64) -> ContactPoint {
    let mut out = base.clone();
    out.x[0] += tau;
    out.z += tau * base.y[0];
    out
}

/// Tangent of the escape path (constant in τ).
pub fn gamma_prime(base: &ContactPoint) -> TangentVector {
    let mut w = TangentVector::zero(base.dim());
    w.dx[0] = 1.0;
    w.dz = base.y[0];
    w
}

/// Result of the clearance sweep: minimum distance to L_t and the
/// direction (+1 or −1) that achieved it.
#[derive(Debug, Clone, Copy)]
pub struct Clearance {
    pub min_dist: f64,
    pub direction: f64,
}

/// Minimum distance from γ(τ), τ ∈ [τ_lead, τ_max], to L_t. The base
/// point typically lies on the very disc being excised, so the sweep
/// discounts the trivial proximity near τ = 0 via the lead-in window
/// τ_lead. The direction is auto-flipped (τ → −τ) when the forward sweep
/// comes closer than `threshold`; if both directions fail the
/// configuration is rejected.
pub fn gamma_clearance(
    base: &ContactPoint,
    tau_lead: f64,
    tau_max: f64,
    t: f64,
    threshold: f64,
) -> Result<Clearance> {
    if !(tau_max > 0.0 && tau_lead >= 0.0 && tau_lead < tau_max) {
        return Err(WclError::Domain(format!(
            "need 0 <= tau_lead < tau_max, got lead={tau_lead}, max={tau_max}"
        )));
    }
    let n = base.dim();
    // Global distance query: always multi-start (a chained warm start can
    // track the wrong sheet of the wrinkle and miss a crossing).
    let dist_at = |tau: f64| -> f64 {
        let q = gamma(base, tau);
        project_to_family(&q, t, n, None).dist
    };
    let sweep = |dir: f64| -> f64 {
        let mut min_d = f64::INFINITY;
        let mut min_tau = dir * tau_lead;
        let samples = 200;
        let coarse = (tau_max - tau_lead) / samples as f64;
        for k in 0..=samples {
            let tau = dir * (tau_lead + coarse * k as f64);
            let d = dist_at(tau);
            if d < min_d {
                min_d = d;
                min_tau = tau;
            }
        }
        // Ternary refinement around the coarse minimum; a crossing can
        // slip between coarse samples otherwise.
        let mut lo = min_tau - dir * coarse;
        let mut hi = min_tau + dir * coarse;
        for _ in 0..40 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let d1 = dist_at(m1);
            let d2 = dist_at(m2);
            if d1 < d2 {
                hi = m2;
            } else {
                lo = m1;
            }
            min_d = min_d.min(d1.min(d2));
        }
        min_d
    };
    let fwd = sweep(1.0);
    if fwd >= threshold {
        return Ok(Clearance {
            min_dist: fwd,
            direction: 1.0,
        });
    }
    let bwd = sweep(-1.0);
    if bwd >= threshold {
        return Ok(Clearance {
            min_dist: bwd,
            direction: -1.0,
        });
    }
    Err(WclError::Domain(format!(
        "no clear escape direction: forward clearance {fwd}, backward {bwd}, threshold {threshold}"
    )))
}

/// Coordinates of the tube chart around the projected escape path.
#[derive(Debug, Clone)]
pub struct TubeCoords {
    pub tau: f64,
    pub s: f64,
    /// Offsets of the slow x-coordinates (x₂.., xₙ).
    pub a: Vec<f64>,
    /// Offsets of the slow y-coordinates (y₂.., yₙ).
    pub b: Vec<f64>,
}

impl TubeCoords {
    pub fn ab_norm(&self) -> f64 {
        let s: f64 = self.a.iter().chain(self.b.iter()).map(|v| v * v).sum();
        s.sqrt()
    }
}

/// The cutoff triple (φ, f, ψ) with the support and derivative
/// conditions:
///   φ = 1 on |(a,b)| ≤ ε/4, φ = 0 beyond 3ε/4, |dφ| = O(1/ε);
///   f = 1 on [0, g], f = 0 outside [−ε/2, g + ε/2], |f′| = O(1/ε);
///   ψ′ = 1 on |s| ≤ ε/4, ψ = ψ′ = 0 beyond |s| = 3ε/4.
#[derive(Debug, Clone, Copy)]
pub struct CutoffTriple {
    pub eps: f64,
}

/// Quintic decay used by ψ beyond its linear core: D(0)=1, D′(0)=2,
/// D″(0)=0 and D(1)=D′(1)=D″(1)=0, so ψ leaves the linear zone with
/// slope one and lands at zero C²-flat.
fn psi_decay(xi: f64) -> f64 {
    1.0 + xi * (2.0 + xi * xi * (-22.0 + xi * (31.0 - 12.0 * xi)))
}

fn psi_decay_deriv(xi: f64) -> f64 {
    2.0 + xi * xi * (-66.0 + xi * (124.0 - 60.0 * xi))
}

impl CutoffTriple {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(WclError::Domain(format!(
                "cutoff eps must be > 0, got {eps}"
            )));
        }
        Ok(Self { eps })
    }

    pub fn phi(&self, r: f64) -> f64 {
        let e = self.eps;
        1.0 - smoothstep5((r.abs() - 0.25 * e) / (0.5 * e))
    }

    /// Radial derivative dφ/dr.
    pub fn phi_deriv(&self, r: f64) -> f64 {
        let e = self.eps;
        -smoothstep5_deriv((r.abs() - 0.25 * e) / (0.5 * e)) / (0.5 * e)
    }

    pub fn f(&self, tau: f64, g: f64) -> f64 {
        let e2 = 0.5 * self.eps;
        if tau < 0.0 {
            smoothstep5((tau + e2) / e2)
        } else if tau <= g {
            1.0
        } else {
            1.0 - smoothstep5((tau - g) / e2)
        }
    }

    pub fn f_deriv(&self, tau: f64, g: f64) -> f64 {
        let e2 = 0.5 * self.eps;
        if tau < 0.0 {
            smoothstep5_deriv((tau + e2) / e2) / e2
        } else if tau <= g {
            0.0
        } else {
            -smoothstep5_deriv((tau - g) / e2) / e2
        }
    }

    pub fn psi(&self, s: f64) -> f64 {
        let e4 = 0.25 * self.eps;
        let abs = s.abs();
        if abs <= e4 {
            s
        } else if abs >= 3.0 * e4 {
            0.0
        } else {
            e4 * psi_decay((abs - e4) / (2.0 * e4)) * s.signum()
        }
    }

    pub fn psi_deriv(&self, s: f64) -> f64 {
        let e4 = 0.25 * self.eps;
        let abs = s.abs();
        if abs <= e4 {
            1.0
        } else if abs >= 3.0 * e4 {
            0.0
        } else {
            0.5 * psi_decay_deriv((abs - e4) / (2.0 * e4))
        }
    }
}

/// G(τ, s, a, b) = ψ(s)·f(τ)·φ(|(a,b)|).
pub fn g_eval(coords: &TubeCoords, triple: &CutoffTriple, g: f64) -> f64 {
    triple.psi(coords.s) * triple.f(coords.tau, g) * triple.phi(coords.ab_norm())
}

/// Tube chart anchored at the base point of the escape path.
#[derive(Debug, Clone)]
pub struct EscapeChart {
    pub anchor: ContactPoint,
    /// +1 pushes along +x₁, −1 along −x₁ (the τ → −τ variant).
    pub direction: f64,
    pub triple: CutoffTriple,
    /// Tube length: f plateaus on [0, g].
    pub g: f64,
}

impl EscapeChart {
    pub fn new(anchor: ContactPoint, direction: f64, eps: f64, g: f64) -> Result<Self> {
        if direction != 1.0 && direction != -1.0 {
            return Err(WclError::Domain("direction must be +1 or -1".into()));
        }
        Ok(Self {
            anchor,
            direction,
            triple: CutoffTriple::new(eps)?,
            g,
        })
    }

    /// Tube coordinates of the Lagrangian projection of an ambient point.
    pub fn to_tube(&self, x: &[f64], y: &[f64]) -> TubeCoords {
        let n = self.anchor.dim();
        TubeCoords {
            tau: self.direction * (x[0] - self.anchor.x[0]),
            s: self.direction * (y[0] - self.anchor.y[0]),
            a: (1..n).map(|i| x[i] - self.anchor.x[i]).collect(),
            b: (1..n).map(|i| y[i] - self.anchor.y[i]).collect(),
        }
    }

    /// True when G and dG both vanish at and beyond this point's shell.
    pub fn outside_support(&self, c: &TubeCoords) -> bool {
        let e = self.triple.eps;
        c.s.abs() >= 0.75 * e
            || c.ab_norm() >= 0.75 * e
            || c.tau <= -0.5 * e
            || c.tau >= self.g + 0.5 * e
    }

    fn g_value_grad(&self, c: &TubeCoords) -> (f64, f64, f64, Vec<f64>, Vec<f64>) {
        let tr = &self.triple;
        let r = c.ab_norm();
        let psi = tr.psi(c.s);
        let f = tr.f(c.tau, self.g);
        let phi = tr.phi(r);
        let dg_dtau = psi * tr.f_deriv(c.tau, self.g) * phi;
        let dg_ds = tr.psi_deriv(c.s) * f * phi;
        let (da, db) = if r > 1e-300 {
            let radial = psi * f * tr.phi_deriv(r) / r;
            (
                c.a.iter().map(|v| radial * v).collect(),
                c.b.iter().map(|v| radial * v).collect(),
            )
        } else {
            (vec![0.0; c.a.len()], vec![0.0; c.b.len()])
        };
        (psi * f * phi, dg_dtau, dg_ds, da, db)
    }
}

/// Time-`duration` flow of the Hamiltonian field of G downstairs
/// (R^(2n) with ω₀ = Σ dxᵢ∧dyᵢ, convention ẋ = ∂G/∂y, ẏ = −∂G/∂x).
/// State layout (x.., y..); points outside supp G are fixed exactly.
pub fn xg_flow(
    chart: &EscapeChart,
    x: &[f64],
    y: &[f64],
    duration: f64,
    step: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = chart.anchor.dim();
    if x.len() != n || y.len() != n {
        return Err(WclError::DimensionMismatch {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    if chart.outside_support(&chart.to_tube(x, y)) {
        return Ok((x.to_vec(), y.to_vec()));
    }
    let mut state: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
    let mut field = |_t: f64, st: &[f64]| -> Vec<f64> {
        let (xs, ys) = st.split_at(n);
        let c = chart.to_tube(xs, ys);
        let (_g, dg_dtau, dg_ds, da, db) = chart.g_value_grad(&c);
        let mut out = vec![0.0; 2 * n];
        // ẋ₁ = ∂G/∂y₁ = dir·∂G/∂s, ẏ₁ = −∂G/∂x₁ = −dir·∂G/∂τ.
        out[0] = chart.direction * dg_ds;
        out[n] = -chart.direction * dg_dtau;
        for j in 1..n {
            out[j] = db[j - 1];
            out[n + j] = -da[j - 1];
        }
        out
    };
    let outcome = rk4_flow(
        &mut field,
        &state,
        0.0,
        duration,
        step,
        &BoundingBox::default(),
    );
    if let Some(tr) = &outcome.truncated {
        return Err(WclError::Domain(format!(
            "downstairs flow left the chart bounding box at t={}",
            tr.time
        )));
    }
    state = outcome.state;
    let (xs, ys) = state.split_at(n);
    Ok((xs.to_vec(), ys.to_vec()))
}

/// The push map Ψ: contact lift of the time-g flow of X_G, realized as
/// the contact flow of the z-independent Hamiltonian −G∘chart.
#[derive(Debug, Clone)]
pub struct PushMap {
    pub chart: EscapeChart,
    pub duration: f64,
    pub step: f64,
}

impl PushMap {
    pub fn new(chart: EscapeChart, duration: f64, step: f64) -> Self {
        Self {
            chart,
            duration,
            step,
        }
    }

    /// Apply Ψ to an ambient contact point. Points outside supp G are
    /// returned unchanged (exactly).
    pub fn apply(&self, p: &ContactPoint) -> Result<ContactPoint> {
        let n = p.dim();
        if n != self.chart.anchor.dim() {
            return Err(WclError::DimensionMismatch {
                expected: self.chart.anchor.dim(),
                got: n,
            });
        }
        if self.chart.outside_support(&self.chart.to_tube(&p.x, &p.y)) {
            return Ok(p.clone());
        }
        let chart = &self.chart;
        let mut field = |_t: f64, st: &[f64]| -> Vec<f64> {
            let xs = &st[..n];
            let ys = &st[n..2 * n];
            let c = chart.to_tube(xs, ys);
            let (g, dg_dtau, dg_ds, da, db) = chart.g_value_grad(&c);
            // Contact field of H = −G: ẋᵢ = −∂H/∂yᵢ = ∂G/∂yᵢ,
            // ẏᵢ = ∂H/∂xᵢ = −∂G/∂xᵢ, ż = H − Σ yᵢ ∂H/∂yᵢ = −G + Σ yᵢ ∂G/∂yᵢ.
            let mut out = vec![0.0; 2 * n + 1];
            out[0] = chart.direction * dg_ds;
            out[n] = -chart.direction * dg_dtau;
            for j in 1..n {
                out[j] = db[j - 1];
                out[n + j] = -da[j - 1];
            }
            let mut zdot = -g + ys[0] * chart.direction * dg_ds;
            for j in 1..n {
                zdot += ys[j] * db[j - 1];
            }
            out[2 * n] = zdot;
            out
        };
        let outcome = rk4_flow(
            &mut field,
            &p.to_state(),
            0.0,
            self.duration,
            self.step,
            &BoundingBox::default(),
        );
        if let Some(tr) = &outcome.truncated {
            return Err(WclError::Domain(format!(
                "contact lift flow left the bounding box at t={}",
                tr.time
            )));
        }
        Ok(ContactPoint::from_state(&outcome.state))
    }
}

/// Measured conformal factor λ of a contact map at p:
/// λ = α_{Ψ(p)}(dΨ(w)) / α_p(w) with dΨ by central finite differences.
/// Probes with |α(w)| ≤ 1e−3 are rejected; if every probe fails the
/// measurement errs.
pub fn measure_lambda<M>(map: &M, p: &ContactPoint, probes: &[TangentVector]) -> Result<f64>
where
    M: Fn(&ContactPoint) -> Result<ContactPoint>,
{
    let values = measure_lambda_all(map, p, probes)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// All per-probe λ values (used by the conformality spread check).
pub fn measure_lambda_all<M>(
    map: &M,
    p: &ContactPoint,
    probes: &[TangentVector],
) -> Result<Vec<f64>>
where
    M: Fn(&ContactPoint) -> Result<ContactPoint>,
{
    let h = 1e-5;
    let image = map(p)?;
    let mut out = Vec::new();
    for w in probes {
        let aw = alpha_eval(p, w)?;
        if aw.abs() <= 1e-3 {
            continue;
        }
        let state = p.to_state();
        let wstate = w.to_state();
        let plus: Vec<f64> = state.iter().zip(&wstate).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = state.iter().zip(&wstate).map(|(a, b)| a - h * b).collect();
        let ip = map(&ContactPoint::from_state(&plus))?;
        let im = map(&ContactPoint::from_state(&minus))?;
        let dpsi: Vec<f64> = ip
            .to_state()
            .iter()
            .zip(im.to_state())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        let dw = TangentVector::from_state(&dpsi);
        out.push(alpha_eval(&image, &dw)? / aw);
    }
    if out.is_empty() {
        return Err(WclError::Domain(
            "no probe direction with |α(w)| > 1e-3".into(),
        ));
    }
    Ok(out)
}

/// Deterministic probe directions with |α(w)| bounded away from zero.
pub fn probe_directions(p: &ContactPoint, count: usize, seed: u64) -> Vec<TangentVector> {
    let n = p.dim();
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut w = TangentVector::zero(n);
        for i in 0..n {
            w.dx[i] = rng.range(-1.0, 1.0);
            w.dy[i] = rng.range(-1.0, 1.0);
        }
        w.dz = rng.range(-1.0, 1.0);
        let norm = w.norm();
        let w = w.scale(1.0 / norm);
        if alpha_eval(p, &w).map(|a| a.abs() > 0.1).unwrap_or(false) {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wrinkle::lift_family;

    #[test]
    fn g_profile_shape() {
        let prof = EscapeProfile::new(1.0, 10.0).unwrap();
        assert_eq!(prof.g_eval(0.0).unwrap(), 10.0);
        assert_eq!(prof.g_eval(0.99).unwrap(), 10.0);
        assert_eq!(prof.g_eval(2.5).unwrap(), 0.0);
        assert_eq!(prof.g_eval(-2.5).unwrap(), 0.0);
        let mid = prof.g_eval(1.5).unwrap();
        assert!(mid > 0.0 && mid < 10.0);
        // Monotone decreasing on the ramp.
        let mut prev = prof.g_eval(1.0).unwrap();
        for k in 1..=20 {
            let v = prof.g_eval(1.0 + k as f64 * 0.05).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!(prof.g_eval(3.5).is_err());
    }

    #[test]
    fn gamma_examples_and_isotropy() {
        let base = lift_family(0.0, 0.0, 1.0, 2);
        assert_eq!(gamma(&base, 0.0), base);
        let moved = gamma(&base, 3.0);
        assert!((moved.x[0] - 3.0).abs() < 1e-15);
        assert!((moved.z + 1.0).abs() < 1e-15);
        assert_eq!(moved.y, base.y);
        assert_eq!(moved.x[1], base.x[1]);
        // α(γ′) cancels exactly at every point along the path.
        for &tau in &[-2.0, 0.0, 0.5, 7.0] {
            let q = gamma(&base, tau);
            let a = alpha_eval(&q, &gamma_prime(&base)).unwrap();
            assert_eq!(a, 0.0);
        }
    }

    #[test]
    fn clearance_positive_from_core_anchor() {
        let t = 0.5;
        let base = lift_family(0.0, 0.0, t, 2);
        let c = gamma_clearance(&base, 0.2, 5.0, t, 1e-3).unwrap();
        assert!(c.min_dist > 1e-3);
    }

    #[test]
    fn clearance_short_sweep_approximates_point_distance() {
        // A point far from L_t with a short sweep: the clearance is close
        // to the distance of the base point itself.
        let t = 0.5;
        let mut base = lift_family(0.3, 0.2, t, 2);
        base.z += 2.0;
        let d0 = crate::wrinkle::project_to_family(&base, t, 2, None).dist;
        let c = gamma_clearance(&base, 0.0, 0.01, t, 1e-3).unwrap();
        assert!((c.min_dist - d0).abs() < 0.05 * d0);
    }

    #[test]
    fn clearance_flips_direction_on_constructed_hit() {
        // Walk backwards from a known Legendrian point so the forward
        // path passes through it exactly.
        let t = 0.5;
        let q = lift_family(1.1, 0.2, t, 2);
        let tau_star = 2.0;
        let mut base = q.clone();
        base.x[0] -= tau_star;
        base.z -= tau_star * q.y[0];
        let c = gamma_clearance(&base, 0.2, 4.0, t, 1e-3).unwrap();
        assert_eq!(c.direction, -1.0, "forward hit must flip the direction");
        assert!(c.min_dist > 1e-3);
    }

    #[test]
    fn cutoff_conditions_hold() {
        let eps = 0.1;
        let tr = CutoffTriple::new(eps).unwrap();
        let g = 5.0;
        let n_samples = 1000;
        for k in 0..n_samples {
            let r = 1.2 * eps * k as f64 / n_samples as f64;
            if r <= 0.25 * eps {
                assert_eq!(tr.phi(r), 1.0);
            }
            if r >= 0.75 * eps {
                assert_eq!(tr.phi(r), 0.0);
            }
            assert!(tr.phi_deriv(r).abs() <= 4.0 / eps + 1e-12);

            let tau = -eps + (g + 2.0 * eps) * k as f64 / n_samples as f64;
            if (0.0..=g).contains(&tau) {
                assert_eq!(tr.f(tau, g), 1.0);
            }
            if tau < -0.5 * eps || tau > g + 0.5 * eps {
                assert_eq!(tr.f(tau, g), 0.0);
            }
            assert!(tr.f_deriv(tau, g).abs() <= 4.0 / eps + 1e-12);

            let s = -eps + 2.0 * eps * k as f64 / n_samples as f64;
            if s.abs() <= 0.25 * eps {
                assert_eq!(tr.psi_deriv(s), 1.0);
            }
            if s.abs() > 0.75 * eps {
                assert_eq!(tr.psi(s), 0.0);
                assert_eq!(tr.psi_deriv(s), 0.0);
            }
            assert!(tr.psi(s).abs() <= eps);
        }
        // ψ is C¹ at the seams: finite differences across ±ε/4 and ±3ε/4.
        for &s0 in &[0.25 * eps, -0.25 * eps, 0.75 * eps, -0.75 * eps] {
            let h = 1e-7;
            let fd = (tr.psi(s0 + h) - tr.psi(s0 - h)) / (2.0 * h);
            assert!((fd - tr.psi_deriv(s0)).abs() < 1e-5);
        }
    }

    #[test]
    fn g_eval_examples() {
        let eps = 0.1;
        let tr = CutoffTriple::new(eps).unwrap();
        let g = 5.0;
        let on_core = TubeCoords {
            tau: 1.0,
            s: 0.01,
            a: vec![0.0],
            b: vec![0.0],
        };
        assert_eq!(g_eval(&on_core, &tr, g), tr.psi(0.01));
        let far_s = TubeCoords {
            tau: 1.0,
            s: 0.09,
            a: vec![0.0],
            b: vec![0.0],
        };
        assert_eq!(g_eval(&far_s, &tr, g), 0.0);
        let far_ab = TubeCoords {
            tau: 1.0,
            s: 0.01,
            a: vec![0.08],
            b: vec![0.0],
        };
        assert_eq!(g_eval(&far_ab, &tr, g), 0.0);
    }

    #[test]
    fn xg_flow_identity_outside_support() {
        let anchor = lift_family(0.0, 0.0, 0.5, 2);
        let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, 5.0).unwrap();
        let x = vec![anchor.x[0] + 0.2, anchor.x[1] + 0.2];
        let y = vec![anchor.y[0], anchor.y[1]];
        let (x1, y1) = xg_flow(&chart, &x, &y, 5.0, 1e-2).unwrap();
        assert_eq!(x1, x);
        assert_eq!(y1, y);
    }

    #[test]
    fn xg_flow_plateau_transport() {
        // On the path core the plateau drives τ at unit rate.
        let anchor = lift_family(0.0, 0.0, 0.5, 2);
        let g = 5.0;
        let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, g).unwrap();
        let duration = g - 1.0;
        let (x1, y1) = xg_flow(&chart, &anchor.x, &anchor.y, duration, 1e-3).unwrap();
        assert!((x1[0] - anchor.x[0] - duration).abs() < 1e-9);
        assert!((y1[0] - anchor.y[0]).abs() < 1e-12);
        assert!((x1[1] - anchor.x[1]).abs() < 1e-12);
    }

    #[test]
    fn xg_flow_conserves_g() {
        let anchor = lift_family(0.0, 0.0, 0.5, 2);
        let g = 5.0;
        let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, g).unwrap();
        let mut x = anchor.x.clone();
        let mut y = anchor.y.clone();
        x[1] += 0.02;
        y[0] += 0.05;
        let c0 = chart.to_tube(&x, &y);
        let g0 = g_eval(&c0, &chart.triple, g);
        assert!(g0 != 0.0);
        let (x1, y1) = xg_flow(&chart, &x, &y, 2.0, 1e-3).unwrap();
        let c1 = chart.to_tube(&x1, &y1);
        let g1 = g_eval(&c1, &chart.triple, g);
        assert!(
            (g1 - g0).abs() < 1e-6,
            "autonomous Hamiltonian must be conserved: {g0} vs {g1}"
        );
    }

    #[test]
    fn contact_lift_projects_onto_downstairs_flow() {
        let anchor = lift_family(0.0, 0.0, 0.5, 2);
        let g = 3.0;
        let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, g).unwrap();
        let push = PushMap::new(chart.clone(), g, 1e-3);
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let mut p = anchor.clone();
            p.x[0] += rng.range(-0.04, 0.5);
            p.x[1] += rng.range(-0.04, 0.04);
            p.y[0] += rng.range(-0.04, 0.04);
            p.y[1] += rng.range(-0.04, 0.04);
            p.z += rng.range(-0.5, 0.5);
            let lifted = push.apply(&p).unwrap();
            let (xd, yd) = xg_flow(&chart, &p.x, &p.y, g, 1e-3).unwrap();
            let err: f64 = lifted
                .x
                .iter()
                .zip(&xd)
                .chain(lifted.y.iter().zip(&yd))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-6, "projection consistency violated: {err}");
        }
    }

    #[test]
    fn push_fixes_complement_exactly() {
        let anchor = lift_family(0.0, 0.0, 0.5, 2);
        let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, 5.0).unwrap();
        let push = PushMap::new(chart, 5.0, 1e-3);
        let mut p = anchor.clone();
        p.y[0] += 0.2; // |s| = 0.2 >= 3ε/4
        let q = push.apply(&p).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn lambda_is_one_for_identity_and_reeb() {
        let p = lift_family(0.4, 0.3, 0.5, 2);
        let probes = probe_directions(&p, 10, 3);
        let ident = |q: &ContactPoint| -> Result<ContactPoint> { Ok(q.clone()) };
        let l = measure_lambda(&ident, &p, &probes).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        let reeb = |q: &ContactPoint| -> Result<ContactPoint> {
            let mut out = q.clone();
            out.z += 0.8;
            Ok(out)
        };
        let l = measure_lambda(&reeb, &p, &probes).unwrap();
        assert!((l - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_error_when_all_probes_degenerate() {
        let p = lift_family(0.4, 0.3, 0.5, 2);
        // A probe inside the contact plane: α(w) = 0.
        let mut w = TangentVector::zero(2);
        w.dx[0] = 1.0;
        w.dz = p.y[0];
        let ident = |q: &ContactPoint| -> Result<ContactPoint> { Ok(q.clone()) };
        assert!(measure_lambda(&ident, &p, &[w]).is_err());
    }

    #[test]
    fn push_escape_and_conformality() {
        // The push moves the core anchor by ≈ g_cap along x₁, while the
        // measured conformal factor stays 1 (the lift is strict).
        let t = 0.5;
        let anchor = lift_family(0.05, 0.05, t, 2);
        for &g in &[5.0, 10.0] {
            let chart = EscapeChart::new(anchor.clone(), 1.0, 0.1, g).unwrap();
            let push = PushMap::new(chart, g, 1e-3);
            let image = push.apply(&anchor).unwrap();
            let escape = image.x[0] - anchor.x[0];
            assert!(
                escape >= 0.8 * g,
                "escape {escape} below 0.8·g_cap for g_cap={g}"
            );
            let probes = probe_directions(&anchor, 10, 5);
            let map = |q: &ContactPoint| push.apply(q);
            let vals = measure_lambda_all(&map, &anchor, &probes).unwrap();
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - 1.0).abs() < 1e-3, "λ = {mean} for g_cap = {g}");
            let spread = vals
                .iter()
                .map(|v| (v - mean).abs())
                .fold(0.0_f64, f64::max);
            assert!(spread / mean.abs() < 1e-3, "conformality spread {spread}");
        }
    }
}
