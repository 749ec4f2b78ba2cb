//! Rotation matrices and the so(3) algebra.
//!
//! Rotations are stored as plain 3×3 matrices. Nothing in this crate ever
//! re-orthonormalizes a rotation: every attitude is produced by `cayley`,
//! `exp_so3`, or a product of rotations, so the orthogonality error reported
//! by [`orthogonality_error`] measures accumulated round-off only.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// An element of so(3) ≅ ℝ³: angular velocities, variations and Cayley
/// parameters all live here.
pub type AxialVector = Vector3<f64>;

/// Tolerance on ‖RᵀR − I‖_F accepted by [`Rotation::new`].
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Tolerance on ‖S + Sᵀ‖_F accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-10;

/// Distance from π (rad) below which `cayley_inv` and `log_so3` refuse to
/// operate.
pub const NEAR_PI_TOL: f64 = 1e-6;

/// A rotation matrix in SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Validates orthogonality (Frobenius, 1e-12) and a positive determinant.
    pub fn new(matrix: Matrix3<f64>) -> Result<Self> {
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::NotARotation("non-finite entry".into()));
        }
        let err = orthogonality_error(&matrix);
        if err > ORTHOGONALITY_TOL {
            return Err(Error::NotARotation(format!(
                "orthogonality error {err:e} exceeds {ORTHOGONALITY_TOL:e}"
            )));
        }
        if matrix.determinant() <= 0.0 {
            return Err(Error::NotARotation("determinant is not positive".into()));
        }
        Ok(Rotation(matrix))
    }

    /// Rotation by `angle` radians about the unit vector `axis`.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        exp_so3(&(axis.normalize() * angle))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Group product `self · rhs`. No projection is applied.
    pub fn compose(&self, rhs: &Rotation) -> Self {
        Rotation(self.0 * rhs.0)
    }

    /// `self · rhs` evaluated as `self + self·(rhs − I)`, which rounds less
    /// when `rhs` is close to the identity.
    pub fn compose_near_identity(&self, rhs: &Rotation) -> Self {
        Rotation(self.0 + self.0 * (rhs.0 - Matrix3::identity()))
    }

    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(&self.0)
    }

    /// Rotation angle of `selfᵀ · other`, in radians.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        rotation_angle(&(self.0.transpose() * other.0))
    }
}

impl Mul<Vector3<f64>> for &Rotation {
    type Output = Vector3<f64>;

    fn mul(self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.0 * rhs
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        self.compose(&rhs)
    }
}

/// The hat map: `hat(v) * w == v.cross(&w)`.
pub fn hat(v: &AxialVector) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -v.z, v.y, //
        v.z, 0.0, -v.x, //
        -v.y, v.x, 0.0,
    )
}

/// Inverse of [`hat`]. Rejects matrices whose symmetric part exceeds
/// [`SKEW_TOL`].
pub fn vee(s: &Matrix3<f64>) -> Result<AxialVector> {
    let asym = (s + s.transpose()).norm();
    if asym.is_nan() || asym > SKEW_TOL {
        return Err(Error::NotSkew { asymmetry: asym });
    }
    Ok(Vector3::new(
        0.5 * (s[(2, 1)] - s[(1, 2)]),
        0.5 * (s[(0, 2)] - s[(2, 0)]),
        0.5 * (s[(1, 0)] - s[(0, 1)]),
    ))
}

/// `(A − Aᵀ)^∨` for an arbitrary matrix `A`.
pub(crate) fn vee_antisymmetrized(a: &Matrix3<f64>) -> AxialVector {
    Vector3::new(a[(2, 1)] - a[(1, 2)], a[(0, 2)] - a[(2, 0)], a[(1, 0)] - a[(0, 1)])
}

/// Cayley transform `(I + x̂)(I − x̂)⁻¹`, evaluated in the closed form
/// `I + 2/(1+‖x‖²)(x̂ + x̂²)`.
pub fn cayley(x: &AxialVector) -> Rotation {
    Rotation(Matrix3::identity() + cayley_increment(x))
}

/// `cayley(x) − I`, kept separate so callers can form `R + R·(F − I)`
/// without losing the low-order bits of a near-identity `F`.
pub(crate) fn cayley_increment(x: &AxialVector) -> Matrix3<f64> {
    let xh = hat(x);
    (xh + xh * xh) * (2.0 / (1.0 + x.norm_squared()))
}

/// Inverse Cayley transform `x = (R − Rᵀ)^∨ / (1 + tr R)`.
pub fn cayley_inv(r: &Rotation) -> Result<AxialVector> {
    let angle = rotation_angle(&r.0);
    if PI - angle < NEAR_PI_TOL {
        return Err(Error::NearPi { angle });
    }
    Ok(vee_antisymmetrized(&r.0) / (1.0 + r.0.trace()))
}

/// Exponential map via Rodrigues' formula.
pub fn exp_so3(v: &AxialVector) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < 1e-4 {
        // Taylor series; truncation error below 1e-20 at this threshold.
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let vh = hat(v);
    Rotation(Matrix3::identity() + vh * a + vh * vh * b)
}

/// Logarithm on SO(3); defined for rotation angles below π − [`NEAR_PI_TOL`].
pub fn log_so3(r: &Rotation) -> Result<AxialVector> {
    let w = vee_antisymmetrized(&r.0);
    let s = 0.5 * w.norm();
    let c = 0.5 * (r.0.trace() - 1.0);
    let theta = s.atan2(c);
    if PI - theta < NEAR_PI_TOL {
        return Err(Error::NearPi { angle: theta });
    }
    let scale = if theta < 1e-4 {
        let t2 = theta * theta;
        0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    } else {
        0.5 * theta / theta.sin()
    };
    Ok(w * scale)
}

/// ‖I − RᵀR‖ in the Frobenius norm.
pub fn orthogonality_error(r: &Matrix3<f64>) -> f64 {
    (Matrix3::identity() - r.transpose() * r).norm()
}

fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    let s = 0.5 * vee_antisymmetrized(r).norm();
    let c = 0.5 * (r.trace() - 1.0);
    s.atan2(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
        Vector3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn hat_examples() {
        let e1 = hat(&Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(e1, Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0));
        assert_eq!(hat(&Vector3::zeros()), Matrix3::zeros());
        let w = hat(&Vector3::new(1.0, 2.0, 3.0)) * Vector3::new(4.0, 5.0, 6.0);
        assert_eq!(w, Vector3::new(-3.0, 6.0, -3.0));
    }

    #[test]
    fn vee_examples() {
        let v = Vector3::new(1.0, 2.0, 3.0);
        assert_eq!(vee(&hat(&v)).unwrap(), v);
        assert_eq!(vee(&Matrix3::zeros()).unwrap(), Vector3::zeros());
        assert!(matches!(vee(&Matrix3::identity()), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn cayley_quarter_turn() {
        assert_eq!(cayley(&Vector3::zeros()), Rotation::identity());
        // cay(e1) rotates by 2·atan(1) = π/2 about e1: e2 → e3, e3 → −e2.
        let r = cayley(&Vector3::new(1.0, 0.0, 0.0));
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_relative_eq!(*r.matrix(), expected, epsilon = 1e-15);
        // Same matrix by explicit inversion.
        let xh = hat(&Vector3::new(1.0, 0.0, 0.0));
        let inv = (Matrix3::identity() - xh).try_inverse().unwrap();
        assert_relative_eq!(*r.matrix(), (Matrix3::identity() + xh) * inv, epsilon = 1e-15);
    }

    #[test]
    fn cayley_matches_explicit_inverse_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = random_vector(&mut rng, 2.0);
            let xh = hat(&x);
            let inv = (Matrix3::identity() - xh).try_inverse().unwrap();
            let direct = (Matrix3::identity() + xh) * inv;
            assert_relative_eq!(*cayley(&x).matrix(), direct, epsilon = 1e-13);
            let r = cayley(&x);
            assert!((r.matrix() * r.matrix().transpose() - Matrix3::identity()).norm() < 1e-14);
        }
    }

    #[test]
    fn cayley_inv_examples() {
        assert_eq!(cayley_inv(&Rotation::identity()).unwrap(), Vector3::zeros());
        let x = Vector3::new(0.1, -0.2, 0.3);
        assert_relative_eq!(cayley_inv(&cayley(&x)).unwrap(), x, epsilon = 1e-15);
        let half_turn = Rotation::from_axis_angle(&Vector3::z(), PI);
        assert!(matches!(cayley_inv(&half_turn), Err(Error::NearPi { .. })));
    }

    #[test]
    fn exp_quarter_turn_maps_e2_to_e3() {
        assert_eq!(exp_so3(&Vector3::zeros()), Rotation::identity());
        let r = exp_so3(&Vector3::new(PI / 2.0, 0.0, 0.0));
        assert_relative_eq!(&r * Vector3::y(), Vector3::z(), epsilon = 1e-15);
    }

    #[test]
    fn exp_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let dir = random_vector(&mut rng, 1.0);
            if dir.norm() < 1e-3 {
                continue;
            }
            let v = dir.normalize() * rng.gen_range(0.0..3.0);
            let back = log_so3(&exp_so3(&v)).unwrap();
            worst = worst.max((back - v).norm());
        }
        assert!(worst < 1e-12, "worst round trip error {worst:e}");
    }

    #[test]
    fn log_small_angles() {
        let v = Vector3::new(1e-9, -2e-9, 5e-10);
        assert_relative_eq!(log_so3(&exp_so3(&v)).unwrap(), v, max_relative = 1e-9);
        assert!(log_so3(&Rotation::from_axis_angle(&Vector3::x(), PI)).is_err());
    }

    #[test]
    fn orthogonality_error_examples() {
        assert_eq!(orthogonality_error(&Matrix3::identity()), 0.0);
        assert_eq!(
            orthogonality_error(&Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0))),
            3.0
        );
        let q = exp_so3(&Vector3::new(0.3, -1.2, 0.7));
        assert!(q.orthogonality_error() <= 1e-15);
    }

    #[test]
    fn rotation_constructor_checks_invariants() {
        assert!(Rotation::new(Matrix3::identity()).is_ok());
        assert!(Rotation::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))).is_err());
        assert!(Rotation::new(Matrix3::identity() * 1.001).is_err());
        assert!(Rotation::new(Matrix3::from_element(f64::NAN)).is_err());
    }

    #[test]
    fn cayley_of_negated_parameter_is_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_vector(&mut rng, 3.0);
            assert_relative_eq!(*cayley(&-x).matrix(), cayley(&x).matrix().transpose(), epsilon = 1e-15);
        }
    }

    #[test]
    fn exp_and_half_cayley_agree_to_third_order() {
        // exp(v) and cay(v/2) share their first- and second-order terms.
        let dir = Vector3::new(0.3, -0.5, 0.8).normalize();
        let mut prev: Option<f64> = None;
        for i in 0..6 {
            let v = dir * (0.2 / 2f64.powi(i));
            let gap = (exp_so3(&v).matrix() - cayley(&(v * 0.5)).matrix()).norm();
            assert!(gap <= 0.15 * v.norm().powi(3));
            if let Some(p) = prev {
                let ratio = p / gap;
                assert!((7.5..8.5).contains(&ratio), "ratio {ratio}");
            }
            prev = Some(gap);
        }
    }
}
