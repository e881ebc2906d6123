//! Bloch-sphere geometry and 2×2 complex matrix algebra.
//!
//! Everything in the crate is built from three value types:
//!
//! * [`UnitVec3`], a point on the unit sphere in R³ (Bloch vectors, rotation axes),
//! * [`QubitState`], a normalized vector in C²,
//! * [`Mat2c`], a 2×2 complex matrix (Paulions, evolution operators).
//!
//! The two pictures are tied together by [`ket_from_unit_vec`] / [`bloch_vec_of`]
//! and by the conjugation identity
//! `exp(-i ξ/2 σ_a) σ_r exp(+i ξ/2 σ_a) = σ_{R_a(ξ) r}`.
//!
//! Angles are radians throughout.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Below this value of sin θ the azimuth of a Bloch vector is taken to be zero.
pub const POLE_EPS: f64 = 1e-14;

/// A unit vector in R³.
///
/// Every constructor normalizes, so `x² + y² + z² = 1` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: UnitVec3 = UnitVec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: UnitVec3 = UnitVec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`. Returns `None` for the zero vector or non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return None;
        }
        Some(UnitVec3 {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn from_array(v: [f64; 3]) -> Option<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitVec3 {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// The vector `sin γ x̂ + cos γ ẑ` in the x–z plane at angle `gamma` from ẑ.
    ///
    /// `gamma` may be negative.
    pub fn in_xz_plane(gamma: f64) -> Self {
        let (s, c) = gamma.sin_cos();
        UnitVec3 { x: s, y: 0.0, z: c }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Cross product. Not a unit vector in general.
    pub fn cross(&self, other: &UnitVec3) -> [f64; 3] {
        cross(self.to_array(), other.to_array())
    }

    /// Polar angle θ ∈ [0, π] measured from ẑ.
    pub fn polar_angle(&self) -> f64 {
        self.x.hypot(self.y).atan2(self.z)
    }

    /// Azimuth φ ∈ (−π, π], or 0 at the poles.
    pub fn azimuth(&self) -> f64 {
        if self.x.hypot(self.y) < POLE_EPS {
            0.0
        } else {
            self.y.atan2(self.x)
        }
    }

    /// Angle between two unit vectors, in [0, π].
    pub fn angle_to(&self, other: &UnitVec3) -> f64 {
        norm(self.cross(other)).atan2(self.dot(other))
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &UnitVec3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    pub fn norm_error(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z - 1.0).abs()
    }

    fn renormalized(v: [f64; 3]) -> Self {
        // Inputs here are rotations/reflections of unit vectors, so n ≈ 1.
        let n = norm(v);
        UnitVec3 {
            x: v[0] / n,
            y: v[1] / n,
            z: v[2] / n,
        }
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;

    fn neg(self) -> UnitVec3 {
        UnitVec3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl fmt::Display for UnitVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Rotation of `r` by angle `xi` about `axis` (right-handed):
///
/// `R_a(ξ) r = a (a·r) + sin ξ (a × r) + cos ξ [r − a (a·r)]`.
pub fn rotate(r: UnitVec3, axis: UnitVec3, xi: f64) -> UnitVec3 {
    let ar = axis.dot(&r);
    let axr = axis.cross(&r);
    let (s, c) = xi.sin_cos();
    let a = axis.to_array();
    let rv = r.to_array();
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = a[k] * ar + s * axr[k] + c * (rv[k] - a[k] * ar);
    }
    UnitVec3::renormalized(out)
}

/// Reflection of `r` through the plane perpendicular to `a`: `r − 2a(a·r)`.
pub fn reflect(r: UnitVec3, a: UnitVec3) -> UnitVec3 {
    let ar = a.dot(&r);
    let av = a.to_array();
    let rv = r.to_array();
    UnitVec3::renormalized([
        rv[0] - 2.0 * av[0] * ar,
        rv[1] - 2.0 * av[1] * ar,
        rv[2] - 2.0 * av[2] * ar,
    ])
}

/// `|⟨r₁|r₂⟩|² = (1 + r₁·r₂) / 2`.
pub fn overlap_sq(r1: UnitVec3, r2: UnitVec3) -> f64 {
    (0.5 * (1.0 + r1.dot(&r2))).clamp(0.0, 1.0)
}

/// A normalized state `a0|0⟩ + a1|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    a0: Complex64,
    a1: Complex64,
}

impl QubitState {
    /// `|0⟩`, the target state and the north pole of the Bloch sphere.
    pub const ZERO: QubitState = QubitState { a0: C1, a1: C0 };
    pub const ONE: QubitState = QubitState { a0: C0, a1: C1 };

    /// Normalizes `(a0, a1)`. Returns `None` for the zero vector.
    pub fn new(a0: Complex64, a1: Complex64) -> Option<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return None;
        }
        Some(QubitState {
            a0: a0 / n,
            a1: a1 / n,
        })
    }

    #[inline]
    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    #[inline]
    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn to_array(self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Mat2c {
        let v = self.to_array();
        let mut m = Mat2c::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Applies `u` and renormalizes. `u` is expected to be unitary.
    pub fn evolve(&self, u: &Mat2c) -> QubitState {
        let [b0, b1] = u.apply(self.to_array());
        QubitState::new(b0, b1).expect("unitary image of a normalized state is nonzero")
    }

    pub fn norm_error(&self) -> f64 {
        (self.a0.norm_sqr() + self.a1.norm_sqr() - 1.0).abs()
    }
}

/// `|r⟩ = (cos(θ/2), e^{iφ} sin(θ/2))` for `r` at polar angles (θ, φ).
///
/// At the south pole the azimuth is ill-defined; φ = 0 is used, giving `(0, 1)`.
pub fn ket_from_unit_vec(r: UnitVec3) -> QubitState {
    let theta = r.polar_angle();
    let phi = r.azimuth();
    let (sh, ch) = (0.5 * theta).sin_cos();
    QubitState {
        a0: Complex64::new(ch, 0.0),
        a1: Complex64::from_polar(sh, phi),
    }
}

/// Bloch vector `(2 Re(a0* a1), 2 Im(a0* a1), |a0|² − |a1|²)`.
pub fn bloch_vec_of(psi: QubitState) -> UnitVec3 {
    let c = psi.a0.conj() * psi.a1;
    UnitVec3::renormalized([
        2.0 * c.re,
        2.0 * c.im,
        psi.a0.norm_sqr() - psi.a1.norm_sqr(),
    ])
}

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2c(pub [[Complex64; 2]; 2]);

impl Mat2c {
    pub fn zero() -> Self {
        Mat2c([[C0, C0], [C0, C0]])
    }

    pub fn identity() -> Self {
        Mat2c([[C1, C0], [C0, C1]])
    }

    pub fn sigma_x() -> Self {
        Mat2c([[C0, C1], [C1, C0]])
    }

    pub fn sigma_y() -> Self {
        Mat2c([[C0, -CI], [CI, C0]])
    }

    pub fn sigma_z() -> Self {
        Mat2c([[C1, C0], [C0, -C1]])
    }

    /// Hadamard `(σ_x + σ_z)/√2`.
    pub fn hadamard() -> Self {
        (Self::sigma_x() + Self::sigma_z())
            .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    pub fn diag(d0: Complex64, d1: Complex64) -> Self {
        Mat2c([[d0, C0], [C0, d1]])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|e| *e *= k);
        m
    }

    pub fn dagger(&self) -> Self {
        let a = &self.0;
        Mat2c([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1],
            a[1][0] * v[0] + a[1][1] * v[1],
        ]
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2c) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Mat2c::identity())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }
}

impl Add for Mat2c {
    type Output = Mat2c;

    fn add(self, rhs: Mat2c) -> Mat2c {
        let mut m = self;
        for (e, r) in m.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *e += r;
        }
        m
    }
}

impl Sub for Mat2c {
    type Output = Mat2c;

    fn sub(self, rhs: Mat2c) -> Mat2c {
        self + rhs.scale(-C1)
    }
}

impl Mul for Mat2c {
    type Output = Mat2c;

    fn mul(self, rhs: Mat2c) -> Mat2c {
        let (a, b) = (&self.0, &rhs.0);
        Mat2c(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

/// `v·σ` for an arbitrary (not necessarily unit) real vector.
pub fn pauli_vector(v: [f64; 3]) -> Mat2c {
    Mat2c([
        [Complex64::new(v[2], 0.0), Complex64::new(v[0], -v[1])],
        [Complex64::new(v[0], v[1]), Complex64::new(-v[2], 0.0)],
    ])
}

/// The Paulion `σ_a = a_x σ_x + a_y σ_y + a_z σ_z`.
pub fn paulion(a: UnitVec3) -> Mat2c {
    pauli_vector(a.to_array())
}

/// `exp(i θ σ_r) = cos θ I + i sin θ σ_r`.
pub fn exp_i_paulion(theta: f64, r: UnitVec3) -> Mat2c {
    let (s, c) = theta.sin_cos();
    Mat2c::identity().scale(Complex64::new(c, 0.0)) + paulion(r).scale(Complex64::new(0.0, s))
}

/// The SU(2) element `exp(−i ξ/2 σ_a)` whose adjoint action is `R_a(ξ)`.
pub fn su2_rotation(axis: UnitVec3, xi: f64) -> Mat2c {
    exp_i_paulion(-0.5 * xi, axis)
}
