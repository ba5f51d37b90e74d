//! Scalar abstraction and small planar math helpers.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar the numeric kernels are generic over: f32 or f64.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + ndarray::ScalarOperand
    + Serialize
    + DeserializeOwned
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an f64 constant.
    fn from_f64_c(v: f64) -> Self;

    /// Widen to f64 (exact for f32 and f64).
    fn to_f64_c(self) -> f64;

    /// Draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw uniformly from `[lo, hi)`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;
}

impl Real for f32 {
    fn from_f64_c(v: f64) -> Self {
        v as f32
    }
    fn to_f64_c(self) -> f64 {
        self as f64
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.gen_range(lo..hi)
    }
}

impl Real for f64 {
    fn from_f64_c(v: f64) -> Self {
        v
    }
    fn to_f64_c(self) -> f64 {
        self
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.gen_range(lo..hi)
    }
}

/// Planar vector, y up.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, serde::Deserialize)]
pub struct Vector2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Vector2<S> {
    pub const fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn dot(self, rhs: Self) -> S {
        self.x * rhs.x + self.y * rhs.y
    }

    /// 2D cross product (z component of the 3D cross).
    pub fn cross(self, rhs: Self) -> S {
        self.x * rhs.y - self.y * rhs.x
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.norm_sq().sqrt()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn scale(self, s: S) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    /// Unit vector in the same direction, or zero if too short to normalize.
    pub fn normalized_or_zero(self) -> Self {
        let n = self.norm();
        if n > S::from_f64_c(1e-12) {
            self.scale(S::one() / n)
        } else {
            Self::zero()
        }
    }

    pub fn distance(self, rhs: Self) -> S {
        (self - rhs).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, rhs: Self, t: S) -> Self {
        self + (rhs - self).scale(t)
    }
}

impl<S: Real> Add for Vector2<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<S: Real> Sub for Vector2<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<S: Real> Neg for Vector2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<S: Real> Mul<S> for Vector2<S> {
    type Output = Self;
    fn mul(self, s: S) -> Self {
        self.scale(s)
    }
}

impl<S: Real> Div<S> for Vector2<S> {
    type Output = Self;
    fn div(self, s: S) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<S: Real> AddAssign for Vector2<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Real> SubAssign for Vector2<S> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<S: Real> MulAssign<S> for Vector2<S> {
    fn mul_assign(&mut self, s: S) {
        *self = self.scale(s);
    }
}

impl<S: Real> DivAssign<S> for Vector2<S> {
    fn div_assign(&mut self, s: S) {
        *self = *self / s;
    }
}

/// Wrap an angle difference onto the shortest arc in `(-pi, pi]`.
pub fn shortest_arc<S: Real>(delta: S) -> S {
    let two_pi = S::from_f64_c(std::f64::consts::TAU);
    let pi = S::from_f64_c(std::f64::consts::PI);
    let mut d = delta % two_pi;
    if d > pi {
        d -= two_pi;
    } else if d <= -pi {
        d += two_pi;
    }
    d
}

/// Shortest-arc interpolation between two angles; result stays near `a`.
pub fn lerp_angle<S: Real>(a: S, b: S, t: S) -> S {
    a + shortest_arc(b - a) * t
}

/// Mean of squared differences over all scalar components of two equal-length slices.
pub fn mse<S: Real>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "mse operands must have equal length");
    if a.is_empty() {
        return S::zero();
    }
    let sum: S = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(S::zero(), |acc, v| acc + v);
    sum / S::from_f64_c(a.len() as f64)
}
