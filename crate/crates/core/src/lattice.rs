//! Points of the half-integer lattice with integral coordinate sum.
//!
//! Vertices of `Z^3` carry the `h` values of the hexahedron recurrence; points
//! with exactly two half-integer coordinates are centres of unit squares and carry
//! the face values `h^(x)`, `h^(y)`, `h^(z)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// The two other axes in cyclic order.
    pub fn others(self) -> (Axis, Axis) {
        let i = self.index();
        (Axis::from_index(i + 1), Axis::from_index(i + 2))
    }

    pub fn unit(self) -> [i32; 3] {
        let mut e = [0; 3];
        e[self.index()] = 1;
        e
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    Vertex,
    /// Centre of a square perpendicular to the axis.
    Face(Axis),
}

/// A point of `(1/2)Z^3` whose coordinates sum to an integer, stored doubled.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfLatticePoint {
    doubled: [i32; 3],
}

impl HalfLatticePoint {
    pub fn from_doubled(doubled: [i32; 3]) -> Result<Self> {
        if doubled.iter().sum::<i32>().rem_euclid(2) != 0 {
            return Err(Error::Domain(format!(
                "coordinate sum of {:?}/2 is not an integer",
                doubled
            )));
        }
        Ok(HalfLatticePoint { doubled })
    }

    pub fn vertex(v: [i32; 3]) -> Self {
        HalfLatticePoint { doubled: [2 * v[0], 2 * v[1], 2 * v[2]] }
    }

    /// The face point `v + (0, 1/2, 1/2)` (and cyclic), i.e. the square
    /// perpendicular to `axis` whose minimal corner is `v`.
    pub fn face(v: [i32; 3], axis: Axis) -> Self {
        let mut d = [2 * v[0], 2 * v[1], 2 * v[2]];
        let (b, c) = axis.others();
        d[b.index()] += 1;
        d[c.index()] += 1;
        HalfLatticePoint { doubled: d }
    }

    pub fn doubled(&self) -> [i32; 3] {
        self.doubled
    }

    pub fn kind(&self) -> PointKind {
        let odd: Vec<usize> = (0..3).filter(|&i| self.doubled[i].rem_euclid(2) == 1).collect();
        match odd.len() {
            0 => PointKind::Vertex,
            _ => {
                let even = (0..3).find(|i| !odd.contains(i)).unwrap();
                PointKind::Face(Axis::from_index(even))
            }
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.kind() == PointKind::Vertex
    }

    /// Level `i + j + k`.
    pub fn level(&self) -> i32 {
        self.doubled.iter().sum::<i32>() / 2
    }

    /// Integer coordinates of a vertex; `None` for face points.
    pub fn as_vertex(&self) -> Option<[i32; 3]> {
        self.is_vertex().then(|| self.doubled.map(|d| d / 2))
    }

    /// Minimal corner of the square whose centre this is.
    pub fn face_base(&self) -> Option<([i32; 3], Axis)> {
        match self.kind() {
            PointKind::Vertex => None,
            PointKind::Face(a) => Some((self.doubled.map(|d| d.div_euclid(2)), a)),
        }
    }

    pub fn translate(&self, v: [i32; 3]) -> Self {
        HalfLatticePoint {
            doubled: [
                self.doubled[0] + 2 * v[0],
                self.doubled[1] + 2 * v[1],
                self.doubled[2] + 2 * v[2],
            ],
        }
    }
}

fn fmt_half(d: i32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if d.rem_euclid(2) == 0 {
        write!(f, "{}", d / 2)
    } else {
        write!(f, "{}/2", d)
    }
}

impl fmt::Display for HalfLatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_half(self.doubled[0], f)?;
        f.write_str(",")?;
        fmt_half(self.doubled[1], f)?;
        f.write_str(",")?;
        fmt_half(self.doubled[2], f)
    }
}

impl fmt::Debug for HalfLatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

fn parse_half(s: &str) -> Result<i32> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad coordinate {s:?}"));
    match s.split_once('/') {
        None => s.parse::<i32>().map(|v| 2 * v).map_err(|_| bad()),
        Some((n, d)) => {
            if d.trim() != "2" {
                return Err(bad());
            }
            let n: i32 = n.trim().parse().map_err(|_| bad())?;
            if n.rem_euclid(2) != 1 {
                return Err(bad());
            }
            Ok(n)
        }
    }
}

impl FromStr for HalfLatticePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected \"i,j,k\", got {s:?}")));
        }
        let d = [parse_half(parts[0])?, parse_half(parts[1])?, parse_half(parts[2])?];
        HalfLatticePoint::from_doubled(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification() {
        let v = HalfLatticePoint::vertex([1, -2, 0]);
        assert_eq!(v.kind(), PointKind::Vertex);
        assert_eq!(v.level(), -1);
        let f = HalfLatticePoint::face([-1, -1, -1], Axis::X);
        assert_eq!(f.kind(), PointKind::Face(Axis::X));
        assert_eq!(f.to_string(), "-1,-1/2,-1/2");
        assert_eq!(f.level(), -2);
        assert_eq!(f.face_base(), Some(([-1, -1, -1], Axis::X)));
    }

    #[test]
    fn rejects_non_integral_sum() {
        assert!(HalfLatticePoint::from_doubled([1, 0, 0]).is_err());
        assert!(HalfLatticePoint::from_doubled([1, 1, 1]).is_err());
        assert!("1/2,0,0".parse::<HalfLatticePoint>().is_err());
        assert!("1,2".parse::<HalfLatticePoint>().is_err());
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(a in -20i32..20, b in -20i32..20, c in -20i32..20, axis in 0usize..4) {
            let p = if axis == 3 {
                HalfLatticePoint::vertex([a, b, c])
            } else {
                HalfLatticePoint::face([a, b, c], Axis::from_index(axis))
            };
            let q: HalfLatticePoint = p.to_string().parse().unwrap();
            prop_assert_eq!(p, q);
            if axis < 3 {
                prop_assert_eq!(p.face_base(), Some(([a, b, c], Axis::from_index(axis))));
                prop_assert_eq!(p.level(), a + b + c + 1);
            }
        }
    }
}
