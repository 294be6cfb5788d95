//! Small geometric primitives shared across the kernel.

use nalgebra::{Point3, Vector3};
use robust::Coord3D;

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

fn coord(p: &Point) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

/// Exact sign of the signed volume of `(a, b, c, d)`.
///
/// Positive when `d` lies on the side of plane `abc` that the normal
/// `(b - a) x (c - a)` points to.
pub fn orient(a: &Point, b: &Point, c: &Point, d: &Point) -> i8 {
    // robust::orient3d is positive when d lies "below" abc, i.e. the opposite convention.
    let det = robust::orient3d(coord(a), coord(b), coord(c), coord(d));
    if det < 0.0 {
        1
    } else if det > 0.0 {
        -1
    } else {
        0
    }
}

pub fn signed_volume(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}
