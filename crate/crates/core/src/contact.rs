//! Standard contact space R^(2n+1) with α = dz − Σ yᵢ dxᵢ, its forms,
//! contact Hamiltonian vector fields, and the exact symplectic form of the
//! symplectization (Y×R, d(e^v α)).
//!
//! Conventions fixed here and used everywhere else:
//!   - α(X_H) = +H, so H ≡ 1 generates the Reeb field ∂_z;
//!   - X_H components: ẋᵢ = −∂H/∂yᵢ, ẏᵢ = ∂H/∂xᵢ + yᵢ ∂H/∂z,
//!     ż = H − Σ yᵢ ∂H/∂yᵢ;
//!   - dα = Σ dxᵢ∧dyᵢ;
//!   - ω = d(e^v α) = e^v (dv∧α + dα) on the symplectization.

use crate::error::{Result, WclError};

/// Largest |v| for which e^v is representable; beyond this the
/// symplectization form evaluation reports an overflow.
const V_OVERFLOW: f64 = 700.0;

/// A point (x₁..xₙ, y₁..yₙ, z) of standard contact R^(2n+1).
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
}

impl ContactPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(WclError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(WclError::Domain(format!(
                "contact dimension n must be >= 2, got {}",
                x.len()
            )));
        }
        let p = Self { x, y, z };
        if !p.is_finite() {
            return Err(WclError::NonFinite {
                context: "ContactPoint",
            });
        }
        Ok(p)
    }

    /// Origin of R^(2n+1).
    pub fn origin(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite()
            && self.x.iter().all(|v| v.is_finite())
            && self.y.iter().all(|v| v.is_finite())
    }

    /// Flatten to (x.., y.., z) for integrators.
    pub fn to_state(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(2 * self.dim() + 1);
        s.extend_from_slice(&self.x);
        s.extend_from_slice(&self.y);
        s.push(self.z);
        s
    }

    pub fn from_state(state: &[f64]) -> Self {
        let n = (state.len() - 1) / 2;
        debug_assert_eq!(2 * n + 1, state.len());
        Self {
            x: state[..n].to_vec(),
            y: state[n..2 * n].to_vec(),
            z: state[2 * n],
        }
    }

    /// Euclidean distance in ambient coordinates.
    pub fn dist(&self, other: &Self) -> f64 {
        let mut s = (self.z - other.z).powi(2);
        for i in 0..self.dim() {
            s += (self.x[i] - other.x[i]).powi(2) + (self.y[i] - other.y[i]).powi(2);
        }
        s.sqrt()
    }
}

/// A tangent vector (dx, dy, dz) at a point of R^(2n+1).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: f64,
}

impl TangentVector {
    pub fn zero(n: usize) -> Self {
        Self {
            dx: vec![0.0; n],
            dy: vec![0.0; n],
            dz: 0.0,
        }
    }

    /// The Reeb direction ∂_z.
    pub fn reeb(n: usize) -> Self {
        Self {
            dz: 1.0,
            ..Self::zero(n)
        }
    }

    pub fn dim(&self) -> usize {
        self.dx.len()
    }

    pub fn to_state(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(2 * self.dim() + 1);
        s.extend_from_slice(&self.dx);
        s.extend_from_slice(&self.dy);
        s.push(self.dz);
        s
    }

    pub fn from_state(state: &[f64]) -> Self {
        let n = (state.len() - 1) / 2;
        Self {
            dx: state[..n].to_vec(),
            dy: state[n..2 * n].to_vec(),
            dz: state[2 * n],
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dx: self.dx.iter().map(|v| c * v).collect(),
            dy: self.dy.iter().map(|v| c * v).collect(),
            dz: c * self.dz,
        }
    }

    pub fn norm(&self) -> f64 {
        let mut s = self.dz * self.dz;
        for i in 0..self.dim() {
            s += self.dx[i] * self.dx[i] + self.dy[i] * self.dy[i];
        }
        s.sqrt()
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n != m {
        Err(WclError::DimensionMismatch {
            expected: n,
            got: m,
        })
    } else {
        Ok(())
    }
}

/// α_p(w) = w.dz − Σᵢ p.yᵢ · w.dxᵢ.
pub fn alpha_eval(p: &ContactPoint, w: &TangentVector) -> Result<f64> {
    check_dims(p.dim(), w.dim())?;
    let mut acc = w.dz;
    for i in 0..p.dim() {
        acc -= p.y[i] * w.dx[i];
    }
    Ok(acc)
}

/// dα(w1, w2) = Σᵢ (w1.dxᵢ·w2.dyᵢ − w1.dyᵢ·w2.dxᵢ). Point-independent for
/// the standard α.
pub fn dalpha_eval(w1: &TangentVector, w2: &TangentVector) -> Result<f64> {
    check_dims(w1.dim(), w2.dim())?;
    let mut acc = 0.0;
    for i in 0..w1.dim() {
        acc += w1.dx[i] * w2.dy[i] - w1.dy[i] * w2.dx[i];
    }
    Ok(acc)
}

/// A point (p, v) of the symplectization Y×R. The R-factor coordinate is
/// named v to keep it distinct from isotopy time.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplectizationPoint {
    pub p: ContactPoint,
    pub v: f64,
}

impl SymplectizationPoint {
    pub fn new(p: ContactPoint, v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(WclError::NonFinite {
                context: "SymplectizationPoint.v",
            });
        }
        Ok(Self { p, v })
    }

    pub fn to_state(&self) -> Vec<f64> {
        let mut s = self.p.to_state();
        s.push(self.v);
        s
    }

    pub fn from_state(state: &[f64]) -> Self {
        Self {
            p: ContactPoint::from_state(&state[..state.len() - 1]),
            v: state[state.len() - 1],
        }
    }
}

/// A tangent vector of the symplectization: contact part plus dv.
#[derive(Debug, Clone, PartialEq)]
pub struct SympTangent {
    pub w: TangentVector,
    pub dv: f64,
}

impl SympTangent {
    pub fn zero(n: usize) -> Self {
        Self {
            w: TangentVector::zero(n),
            dv: 0.0,
        }
    }

    pub fn to_state(&self) -> Vec<f64> {
        let mut s = self.w.to_state();
        s.push(self.dv);
        s
    }

    pub fn from_state(state: &[f64]) -> Self {
        Self {
            w: TangentVector::from_state(&state[..state.len() - 1]),
            dv: state[state.len() - 1],
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w.norm().powi(2) + self.dv * self.dv).sqrt()
    }
}

/// ω = d(e^v α) evaluated at P on the pair (W1, W2):
/// e^v · ( dα(w1,w2) + W1.dv·α(w2) − W2.dv·α(w1) ).
pub fn symp_form_eval(
    point: &SymplectizationPoint,
    w1: &SympTangent,
    w2: &SympTangent,
) -> Result<f64> {
    if point.v.abs() > V_OVERFLOW {
        return Err(WclError::Overflow(format!(
            "e^v not representable at v = {}",
            point.v
        )));
    }
    let da = dalpha_eval(&w1.w, &w2.w)?;
    let a1 = alpha_eval(&point.p, &w1.w)?;
    let a2 = alpha_eval(&point.p, &w2.w)?;
    Ok(point.v.exp() * (da + w1.dv * a2 - w2.dv * a1))
}

/// Gradient of a scalar function on contact space.
#[derive(Debug, Clone)]
pub struct ContactGradient {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: f64,
}

/// A scalar field H on contact space with a gradient. Implementations may
/// provide closed-form gradients or fall back to `fd_gradient`.
pub trait ScalarField {
    fn value(&self, p: &ContactPoint) -> f64;

    fn gradient(&self, p: &ContactPoint) -> ContactGradient {
        fd_gradient(&|q| self.value(q), p)
    }
}

/// Central finite-difference gradient with per-coordinate step
/// h = 1e−5 · max(1, |coordinate|).
pub fn fd_gradient(f: &dyn Fn(&ContactPoint) -> f64, p: &ContactPoint) -> ContactGradient {
    let n = p.dim();
    let mut g = ContactGradient {
        dx: vec![0.0; n],
        dy: vec![0.0; n],
        dz: 0.0,
    };
    let mut q = p.clone();
    for i in 0..n {
        let h = 1e-5 * p.x[i].abs().max(1.0);
        q.x[i] = p.x[i] + h;
        let fp = f(&q);
        q.x[i] = p.x[i] - h;
        let fm = f(&q);
        q.x[i] = p.x[i];
        g.dx[i] = (fp - fm) / (2.0 * h);
    }
    for i in 0..n {
        let h = 1e-5 * p.y[i].abs().max(1.0);
        q.y[i] = p.y[i] + h;
        let fp = f(&q);
        q.y[i] = p.y[i] - h;
        let fm = f(&q);
        q.y[i] = p.y[i];
        g.dy[i] = (fp - fm) / (2.0 * h);
    }
    let h = 1e-5 * p.z.abs().max(1.0);
    q.z = p.z + h;
    let fp = f(&q);
    q.z = p.z - h;
    let fm = f(&q);
    g.dz = (fp - fm) / (2.0 * h);
    g
}

/// Scalar field from closures (closed-form value, optional closed-form
/// gradient).
pub struct ClosureField<F: Fn(&ContactPoint) -> f64> {
    pub f: F,
}

impl<F: Fn(&ContactPoint) -> f64> ScalarField for ClosureField<F> {
    fn value(&self, p: &ContactPoint) -> f64 {
        (self.f)(p)
    }
}

/// Contact Hamiltonian vector field X_H of H at p, normalized so that
/// α(X_H) = H exactly.
pub fn contact_vector_field<H: ScalarField + ?Sized>(
    field: &H,
    p: &ContactPoint,
) -> Result<TangentVector> {
    let h = field.value(p);
    let g = field.gradient(p);
    let n = p.dim();
    let finite = g.dz.is_finite()
        && h.is_finite()
        && g.dx.iter().all(|v| v.is_finite())
        && g.dy.iter().all(|v| v.is_finite());
    if !finite {
        return Err(WclError::NonFinite {
            context: "contact_vector_field gradient",
        });
    }
    let mut out = TangentVector::zero(n);
    let mut y_dot_hy = 0.0;
    for i in 0..n {
        out.dx[i] = -g.dy[i];
        out.dy[i] = g.dx[i] + p.y[i] * g.dz;
        y_dot_hy += p.y[i] * g.dy[i];
    }
    out.dz = h - y_dot_hy;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: [f64; 2], y: [f64; 2], z: f64) -> ContactPoint {
        ContactPoint::new(x.to_vec(), y.to_vec(), z).unwrap()
    }

    fn vec2(dx: [f64; 2], dy: [f64; 2], dz: f64) -> TangentVector {
        TangentVector {
            dx: dx.to_vec(),
            dy: dy.to_vec(),
            dz,
        }
    }

    #[test]
    fn alpha_is_dz_on_zero_section() {
        let p = pt([0.3, -1.2], [0.0, 0.0], 0.7);
        let w = vec2([2.0, 5.0], [1.0, -4.0], 3.5);
        assert_eq!(alpha_eval(&p, &w).unwrap(), 3.5);
    }

    #[test]
    fn alpha_on_gamma_prime_is_zero() {
        // The escape-path tangent: dx1 = 1, dz = y1, with y1 = -1/3.
        let p = pt([0.0, 0.0], [-1.0 / 3.0, 0.0], 0.0);
        let w = vec2([1.0, 0.0], [0.4, -0.7], -1.0 / 3.0);
        assert_eq!(alpha_eval(&p, &w).unwrap(), 0.0);
    }

    #[test]
    fn alpha_on_isotopy_field_sample() {
        // X_t at (u,x2,t)=(1,1,3) evaluated at the corresponding lift point:
        // direct evaluation gives 7/3, matching H = (1/3)u^3 + u(t - x2^2).
        let p = pt([-5.0, 1.0], [-1.0 / 3.0, -14.0 / 3.0], 43.0 / 15.0);
        let w = vec2([-3.0, 0.0], [-1.0 / 3.0, -2.0], 10.0 / 3.0);
        let a = alpha_eval(&p, &w).unwrap();
        assert!((a - 7.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn alpha_dimension_mismatch_is_error() {
        let p = pt([0.0, 0.0], [0.0, 0.0], 0.0);
        let w = TangentVector::zero(3);
        assert!(alpha_eval(&p, &w).is_err());
    }

    #[test]
    fn dalpha_canonical_pairs() {
        let e_x1 = vec2([1.0, 0.0], [0.0, 0.0], 0.0);
        let e_y1 = vec2([0.0, 0.0], [1.0, 0.0], 0.0);
        let e_x2 = vec2([0.0, 1.0], [0.0, 0.0], 0.0);
        assert_eq!(dalpha_eval(&e_x1, &e_y1).unwrap(), 1.0);
        assert_eq!(dalpha_eval(&e_x1, &e_x2).unwrap(), 0.0);
        assert_eq!(dalpha_eval(&e_x1, &e_x1).unwrap(), 0.0);
    }

    #[test]
    fn symp_form_examples() {
        let n = 2;
        let base = SymplectizationPoint::new(ContactPoint::origin(n), 0.0).unwrap();
        let w1 = SympTangent {
            w: TangentVector::reeb(n),
            dv: 0.0,
        };
        let w2 = SympTangent {
            w: TangentVector::zero(n),
            dv: 1.0,
        };
        assert_eq!(symp_form_eval(&base, &w1, &w1).unwrap(), 0.0);
        assert_eq!(symp_form_eval(&base, &w1, &w2).unwrap(), -1.0);
        let scaled = SymplectizationPoint::new(ContactPoint::origin(n), 2.0_f64.ln()).unwrap();
        assert!((symp_form_eval(&scaled, &w1, &w2).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn symp_form_overflow_is_error() {
        let p = SymplectizationPoint {
            p: ContactPoint::origin(2),
            v: 1e4,
        };
        let w = SympTangent::zero(2);
        assert!(matches!(
            symp_form_eval(&p, &w, &w),
            Err(WclError::Overflow(_))
        ));
    }

    #[test]
    fn constant_hamiltonian_gives_reeb() {
        let h = ClosureField {
            f: |_: &ContactPoint| 1.0,
        };
        let p = pt([0.4, -0.3], [1.1, 0.2], -0.9);
        let x = contact_vector_field(&h, &p).unwrap();
        assert!(x.dx.iter().all(|v| v.abs() < 1e-9));
        assert!(x.dy.iter().all(|v| v.abs() < 1e-9));
        assert!((x.dz - 1.0).abs() < 1e-9);
    }

    #[test]
    fn height_hamiltonian_field() {
        // H = z gives X_H = Σ yᵢ ∂_yᵢ + z ∂_z, and α(X_H) = z.
        let h = ClosureField {
            f: |p: &ContactPoint| p.z,
        };
        let p = pt([0.4, -0.3], [1.1, 0.2], -0.9);
        let x = contact_vector_field(&h, &p).unwrap();
        assert!(x.dx.iter().all(|v| v.abs() < 1e-9));
        assert!((x.dy[0] - 1.1).abs() < 1e-9);
        assert!((x.dy[1] - 0.2).abs() < 1e-9);
        assert!((x.dz + 0.9).abs() < 1e-9);
        let a = alpha_eval(&p, &x).unwrap();
        assert!((a - p.z).abs() < 1e-9);
    }

    #[test]
    fn y1_hamiltonian_field() {
        // H = y1 gives dx = (-1, 0), dy = 0, dz = 0.
        let h = ClosureField {
            f: |p: &ContactPoint| p.y[0],
        };
        let p = pt([0.4, -0.3], [1.1, 0.2], -0.9);
        let x = contact_vector_field(&h, &p).unwrap();
        assert!((x.dx[0] + 1.0).abs() < 1e-9);
        assert!(x.dx[1].abs() < 1e-9);
        assert!(x.dy.iter().all(|v| v.abs() < 1e-9));
        assert!(x.dz.abs() < 1e-9);
        let a = alpha_eval(&p, &x).unwrap();
        assert!((a - p.y[0]).abs() < 1e-9);
    }

    #[test]
    fn alpha_of_contact_field_recovers_h() {
        // Identity α(X_H) = H for a generic polynomial field.
        let h = ClosureField {
            f: |p: &ContactPoint| p.x[0] * p.y[1] + 0.5 * p.z * p.z - p.x[1],
        };
        let mut rng = crate::util::SplitMix64::new(7);
        for _ in 0..50 {
            let p = pt(
                [rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)],
                [rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)],
                rng.range(-2.0, 2.0),
            );
            let x = contact_vector_field(&h, &p).unwrap();
            let a = alpha_eval(&p, &x).unwrap();
            assert!((a - h.value(&p)).abs() < 1e-12, "α(X_H) != H at {p:?}");
        }
    }

    #[test]
    fn fd_gradient_second_order() {
        // The FD gradient of a cubic matches the exact gradient to O(h^2).
        let f = |p: &ContactPoint| p.x[0].powi(3) + p.y[1] * p.z;
        let p = pt([0.7, -0.2], [0.3, 1.4], -0.6);
        let g = fd_gradient(&f, &p);
        assert!((g.dx[0] - 3.0 * 0.49).abs() < 1e-8);
        assert!((g.dy[1] + 0.6).abs() < 1e-8);
        assert!((g.dz - 1.4).abs() < 1e-8);
    }
}
