//! Vectors, unit directions and exact half-integers.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector (or point) in R^3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (numerically) zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Vec3 {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Vec3::X
        } else if self.y.abs() <= self.z.abs() {
            Vec3::Y
        } else {
            Vec3::Z
        };
        self.cross(a).normalized().unwrap_or(Vec3::X)
    }

    /// Rotate about the unit `axis` by `angle` (Rodrigues).
    pub fn rotate(self, axis: Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        self * c + axis.cross(self) * s + axis * (axis.dot(self) * (1.0 - c))
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A unit vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct Direction(Vec3);

impl Direction {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn new(v: Vec3) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidDirection(v.to_string()));
        }
        v.normalized().map(Direction).ok_or_else(|| Error::InvalidDirection(v.to_string()))
    }

    pub fn x() -> Self {
        Direction(Vec3::X)
    }

    pub fn y() -> Self {
        Direction(Vec3::Y)
    }

    pub fn z() -> Self {
        Direction(Vec3::Z)
    }

    #[inline]
    pub fn vec(self) -> Vec3 {
        self.0
    }

    /// Height of `p` along this direction.
    #[inline]
    pub fn height(self, p: Point3) -> f64 {
        self.0.dot(p)
    }

    /// Longitude/latitude in radians.
    pub fn lon_lat(self) -> (f64, f64) {
        let v = self.0;
        (v.y.atan2(v.x), v.z.clamp(-1.0, 1.0).asin())
    }

    pub fn from_lon_lat(lon: f64, lat: f64) -> Self {
        let (sl, cl) = lat.sin_cos();
        Direction(Vec3::new(cl * lon.cos(), cl * lon.sin(), sl))
    }

    /// Rotate by `angle` about the component of `axis` orthogonal to this direction.
    pub fn tilt(self, axis: Vec3, angle: f64) -> Self {
        let perp = axis - self.0 * self.0.dot(axis);
        let perp = perp.normalized().unwrap_or_else(|| self.0.any_orthogonal());
        // Rotating about an axis orthogonal to the direction moves it by exactly `angle`.
        let r = self.0.rotate(perp, angle);
        Direction(r.normalized().unwrap_or(self.0))
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        d.0.to_array()
    }
}

impl From<Direction> for Vec3 {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// An exact element of (1/2)Z, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { doubled: 2 * n }
    }

    pub const fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn to_f64(self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    /// max(self, 0)
    pub fn pos(self) -> Self {
        HalfInt::from_doubled(self.doubled.max(0))
    }

    pub fn abs(self) -> Self {
        HalfInt::from_doubled(self.doubled.abs())
    }

    /// Symbolic multiple of pi for `2*pi*self`, e.g. "5*pi" or "3*pi".
    pub fn two_pi_times(self) -> String {
        pi_multiple(self.doubled)
    }
}

/// Formats `k*pi` for an integer `k`.
pub fn pi_multiple(k: i64) -> String {
    match k {
        0 => "0".to_string(),
        1 => "pi".to_string(),
        -1 => "-pi".to_string(),
        k => format!("{k}*pi"),
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_doubled(self.doubled + o.doubled)
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, o: HalfInt) {
        self.doubled += o.doubled;
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_doubled(self.doubled - o.doubled)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_doubled(-self.doubled)
    }
}

impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, k: i64) -> HalfInt {
        HalfInt::from_doubled(self.doubled * k)
    }
}

impl Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, |a, b| a + b)
    }
}

/// Angle between two unit vectors, robust near 0 and pi.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}
