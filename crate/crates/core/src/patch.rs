//! Extension of α(X_t) from L_t to a tubular neighborhood: the ambient
//! branch formulas obtained by eliminating u, the homotopy between them,
//! and the outer cutoff in tube-normal distance. The result is the
//! time-dependent contact Hamiltonian H_t that drives the isotopy.
//!
//! Branch formulas (all exact restrictions of α(X_t) on L_t):
//!   outer:    −y₂ / (2x₂)                        valid away from x₂ = 0
//!   u-branch: x₁/3 ± 2√(3y₁ − x₂² + t)(t − x₂²)  valid per sign of u
//!
//! The two definitions agree along L_t and disagree in the normal
//! directions. The patched value takes the outer formula wherever
//! |x₂| ≥ ε (the outer region has priority where both definitions
//! apply), the u-branch wherever |x₂| ≤ ε/2 (the outer formula is never
//! evaluated near its singular locus), and blends linearly across the
//! strip between. That makes H_ext continuous across every region
//! boundary, not only on L_t, and it confines the u-branch — whose fold
//! singularity lies on the excised core strip — to that strip. Handing
//! the |u| ≥ δ territory to the u-branch instead (as the region figure
//! might suggest) produces violent tangential shear of traced meshes at
//! the interface, because the two extensions drag points along L_t at
//! very different rates there.

use std::cell::Cell;

use crate::contact::{ContactPoint, ScalarField};
use crate::error::{Result, WclError};
use crate::util::{clamp01, smoothstep5};
#[cfg(test)]
use crate::wrinkle::alpha_xt;
use crate::wrinkle::{project_to_family, Projection};

/// Thresholds of the patch construction.
#[derive(Debug, Clone, Copy)]
pub struct PatchParams {
    /// x₂ threshold of the outer region and of the core disc.
    pub eps: f64,
    /// u threshold of the branch regions.
    pub delta: f64,
    /// Tube radius on which the cutoff is identically 1.
    pub rho_tube: f64,
    /// Outer cutoff radius; H_ext vanishes beyond it.
    pub rho_cut: f64,
    /// Family time this parameter set refers to.
    pub t: f64,
}

impl PatchParams {
    pub fn new(eps: f64, delta: f64, rho_tube: f64, rho_cut: f64, t: f64) -> Result<Self> {
        if !(eps > 0.0 && delta > 0.0 && rho_tube > 0.0 && rho_cut > rho_tube) {
            return Err(WclError::Domain(format!(
                "patch params need 0 < eps, 0 < delta, 0 < rho_tube < rho_cut; \
                 got eps={eps} delta={delta} rho_tube={rho_tube} rho_cut={rho_cut}"
            )));
        }
        Ok(Self {
            eps,
            delta,
            rho_tube,
            rho_cut,
            t,
        })
    }

    pub fn standard(t: f64) -> Self {
        Self {
            eps: 0.1,
            delta: 0.3,
            rho_tube: 0.2,
            rho_cut: 0.35,
            t,
        }
    }
}

/// Deterministic partition of the tube around L_t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    OuterX2,
    PosU,
    NegU,
    Blend,
    CoreDisc,
    Far,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::OuterX2 => "OUTER_X2",
            RegionTag::PosU => "POS_U",
            RegionTag::NegU => "NEG_U",
            RegionTag::Blend => "BLEND",
            RegionTag::CoreDisc => "CORE_DISC",
            RegionTag::Far => "FAR",
        }
    }
}

fn tag_from_params(u: f64, x2: f64, dist: f64, params: &PatchParams) -> RegionTag {
    if dist > params.rho_cut {
        return RegionTag::Far;
    }
    if u * u + x2 * x2 < params.eps {
        return RegionTag::CoreDisc;
    }
    if x2.abs() >= params.eps {
        return RegionTag::OuterX2;
    }
    if u >= params.delta {
        return RegionTag::PosU;
    }
    if u <= -params.delta {
        return RegionTag::NegU;
    }
    RegionTag::Blend
}

/// Region tag of an ambient point at time `params.t`, via the
/// nearest-parameter projection onto L_t.
pub fn classify(p: &ContactPoint, params: &PatchParams) -> Result<RegionTag> {
    classify_at(p, params.t, params, None)
}

pub fn classify_at(
    p: &ContactPoint,
    t: f64,
    params: &PatchParams,
    hint: Option<(f64, f64)>,
) -> Result<RegionTag> {
    let proj = project_to_family(p, t, p.dim(), hint);
    if !proj.converged && proj.dist <= params.rho_cut {
        return Err(WclError::Projection(format!(
            "nearest-parameter projection did not converge at t={t}: \
             reached (u={}, x2={}) dist={} after {} iterations",
            proj.u, proj.x2, proj.dist, proj.iterations
        )));
    }
    Ok(tag_from_params(proj.u, proj.x2, proj.dist, params))
}

/// Outer extension −y₂/(2x₂), read directly off the ambient coordinates.
pub fn h_outer(p: &ContactPoint) -> Result<f64> {
    let x2 = p.x[1];
    if x2.abs() < 1e-9 {
        return Err(WclError::Singularity(format!(
            "outer extension evaluated at |x2| = {} < 1e-9",
            x2.abs()
        )));
    }
    Ok(-p.y[1] / (2.0 * x2))
}

/// u-branch extension x₁/3 + 2·sign·√(3y₁ − x₂² + t)·(t − x₂²).
/// The radicand is clamped to zero within the stated guard and a domain
/// error is raised below it.
pub fn h_branch_u(p: &ContactPoint, t: f64, positive_branch: bool) -> Result<f64> {
    let x2 = p.x[1];
    let radicand = 3.0 * p.y[0] - x2 * x2 + t;
    if radicand < -1e-9 {
        return Err(WclError::Domain(format!(
            "u-branch radicand {radicand} below guard"
        )));
    }
    let root = radicand.max(0.0).sqrt();
    let signed = if positive_branch { root } else { -root };
    Ok(p.x[0] / 3.0 + 2.0 * signed * (t - x2 * x2))
}

fn branch_clamped(p: &ContactPoint, t: f64, positive_branch: bool) -> f64 {
    let x2 = p.x[1];
    let root = (3.0 * p.y[0] - x2 * x2 + t).max(0.0).sqrt();
    let signed = if positive_branch { root } else { -root };
    p.x[0] / 3.0 + 2.0 * signed * (t - x2 * x2)
}

/// Fully evaluated patch value together with its bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct PatchEval {
    pub value: f64,
    pub tag: RegionTag,
    pub projection: Projection,
}

/// The patched extension of α(X_t): total on all of R^(2n+1), zero
/// outside the ρ_cut tube, equal to α(X_t) on L_t.
pub fn h_ext(
    p: &ContactPoint,
    t: f64,
    params: &PatchParams,
    hint: Option<(f64, f64)>,
) -> PatchEval {
    let proj = project_to_family(p, t, p.dim(), hint);
    let tag = tag_from_params(proj.u, proj.x2, proj.dist, params);
    if tag == RegionTag::Far {
        return PatchEval {
            value: 0.0,
            tag,
            projection: proj,
        };
    }
    // Branch weight from the ambient x₂ coordinate (equal to the strip
    // coordinate on L_t): 1 on |x₂| ≤ ε/2, 0 on |x₂| ≥ ε (outer
    // priority), linear between. Using the ambient coordinate puts the
    // guard exactly where the outer formula's denominator lives.
    let w_x = clamp01((p.x[1].abs() - 0.5 * params.eps) / (0.5 * params.eps));
    let weight = 1.0 - w_x;
    let branch = branch_clamped(p, t, proj.u >= 0.0);
    let mixed = if weight >= 1.0 {
        branch
    } else {
        // weight < 1 forces ambient |x2| > eps/2, so the outer formula
        // is safe.
        let outer = -p.y[1] / (2.0 * p.x[1]);
        weight * branch + (1.0 - weight) * outer
    };
    let bump =
        1.0 - smoothstep5((proj.dist - params.rho_tube) / (params.rho_cut - params.rho_tube));
    PatchEval {
        value: bump * mixed,
        tag,
        projection: proj,
    }
}

/// H_ext at a fixed family time packaged as a `ScalarField`, with a
/// warm-start cell so repeated evaluations along a trajectory reuse the
/// previous parameter projection.
#[derive(Debug, Clone)]
pub struct PatchedHamiltonian {
    pub params: PatchParams,
    pub t: f64,
    hint: Cell<Option<(f64, f64)>>,
}

impl PatchedHamiltonian {
    pub fn new(params: PatchParams, t: f64) -> Self {
        Self {
            params,
            t,
            hint: Cell::new(None),
        }
    }

    pub fn eval(&self, p: &ContactPoint) -> PatchEval {
        let out = h_ext(p, self.t, &self.params, self.hint.get());
        self.hint.set(Some((out.projection.u, out.projection.x2)));
        out
    }
}

impl ScalarField for PatchedHamiltonian {
    fn value(&self, p: &ContactPoint) -> f64 {
        self.eval(p).value
    }
}
