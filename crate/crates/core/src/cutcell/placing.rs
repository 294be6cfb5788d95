//! Placing triangulation of a point set in a fixed insertion order.
//!
//! Each point is coned to every hull facet it strictly sees; coplanar facets
//! are left alone. The result is the regular triangulation for heights that
//! grow fast enough along the insertion order, so its restriction to any face
//! of the convex hull is the placing triangulation of that face's points in
//! the same relative order. That property is what makes cell decompositions
//! agree on shared lattice faces.
//!
//! All predicates are exact.

use std::collections::HashMap;

use crate::geom::{orient, Point};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PlacingError {
    TooFewPoints,
    CollinearStart,
    PointNotExtreme(usize),
}

impl std::fmt::Display for PlacingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlacingError::TooFewPoints => write!(f, "fewer than four points"),
            PlacingError::CollinearStart => write!(f, "first three points are collinear"),
            PlacingError::PointNotExtreme(i) => write!(f, "point {i} does not extend the hull"),
        }
    }
}

/// Tetrahedra (indices into `points`) with positive orientation.
pub(crate) fn placing_triangulation(points: &[Point]) -> Result<Vec<[usize; 4]>, PlacingError> {
    if points.len() < 4 {
        return Err(PlacingError::TooFewPoints);
    }
    let (p0, p1, p2) = (&points[0], &points[1], &points[2]);
    let normal = (p1 - p0).cross(&(p2 - p0));
    if normal.norm_squared() == 0.0 {
        return Err(PlacingError::CollinearStart);
    }
    // Any point strictly on the positive side of the starting plane serves as
    // the "up" reference for in-plane orientation tests.
    let scale = (p1 - p0).norm().max((p2 - p0).norm());
    let up = p0 + normal.normalize() * scale;
    if orient(p0, p1, p2, &up) <= 0 {
        return Err(PlacingError::CollinearStart);
    }

    // Planar stage: counter-clockwise boundary loop seen from `up`.
    let mut flat: Vec<[usize; 3]> = vec![[0, 1, 2]];
    let mut boundary: Vec<usize> = vec![0, 1, 2];
    let mut next = 3;
    while next < points.len() && orient(p0, p1, p2, &points[next]) == 0 {
        let p = &points[next];
        let n = boundary.len();
        let visible: Vec<bool> =
            (0..n).map(|e| orient(&points[boundary[e]], &points[boundary[(e + 1) % n]], p, &up) < 0).collect();
        if !visible.iter().any(|&v| v) {
            return Err(PlacingError::PointNotExtreme(next));
        }
        for e in 0..n {
            if visible[e] {
                flat.push([boundary[(e + 1) % n], boundary[e], next]);
            }
        }
        // Visible edges form one contiguous run; splice the point in place of it.
        let start = (0..n).find(|&e| visible[e] && !visible[(e + n - 1) % n]).expect("contiguous run");
        let mut loop_ = Vec::with_capacity(n + 1);
        let mut e = start;
        while visible[e] {
            e = (e + 1) % n;
        }
        // boundary[start] .. boundary[e] are the run's endpoints; keep e..start.
        let mut k = e;
        loop {
            loop_.push(boundary[k]);
            if k == start {
                break;
            }
            k = (k + 1) % n;
        }
        loop_.push(next);
        boundary = loop_;
        next += 1;
    }
    if next == points.len() {
        // Everything was coplanar; nothing three-dimensional to return.
        return Ok(Vec::new());
    }

    // Hull facets are stored with outward orientation: a point p sees facet
    // (a, b, c) iff orient(a, b, c, p) > 0. The first off-plane point sees one
    // whole side of the planar stage.
    let apex = next;
    let above = orient(p0, p1, p2, &points[apex]) > 0;
    let mut tets = Vec::with_capacity(flat.len() + 16);
    let mut facets: Vec<[usize; 3]> = Vec::with_capacity(flat.len() + boundary.len());
    for &[a, b, c] in &flat {
        if above {
            tets.push([a, b, c, apex]);
            facets.push([a, c, b]);
        } else {
            tets.push([a, c, b, apex]);
            facets.push([a, b, c]);
        }
    }
    let n = boundary.len();
    for e in 0..n {
        let (u, v) = (boundary[e], boundary[(e + 1) % n]);
        facets.push(if above { [u, v, apex] } else { [v, u, apex] });
    }
    next += 1;

    for (idx, p) in points.iter().enumerate().skip(next) {
        let visible: Vec<bool> =
            facets.iter().map(|&[a, b, c]| orient(&points[a], &points[b], &points[c], p) > 0).collect();
        if !visible.iter().any(|&v| v) {
            return Err(PlacingError::PointNotExtreme(idx));
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(facets.len() * 3);
        for (f, &[a, b, c]) in facets.iter().enumerate() {
            owner.insert((a, b), f);
            owner.insert((b, c), f);
            owner.insert((c, a), f);
        }
        let mut kept = Vec::with_capacity(facets.len() + 4);
        let mut added = Vec::new();
        for (f, &[a, b, c]) in facets.iter().enumerate() {
            if !visible[f] {
                kept.push([a, b, c]);
                continue;
            }
            tets.push([a, b, c, idx]);
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let twin = owner[&(v, u)];
                if !visible[twin] {
                    added.push([u, v, idx]);
                }
            }
        }
        kept.extend(added);
        facets = kept;
    }
    Ok(tets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::signed_volume;

    fn cube_corners() -> Vec<Point> {
        (0..8).map(|c| Point::new((c & 1) as f64, ((c >> 1) & 1) as f64, ((c >> 2) & 1) as f64)).collect()
    }

    fn total_volume(points: &[Point], tets: &[[usize; 4]]) -> f64 {
        tets.iter()
            .map(|t| {
                let v = signed_volume(&points[t[0]], &points[t[1]], &points[t[2]], &points[t[3]]);
                assert!(v > 0.0);
                v
            })
            .sum()
    }

    #[test]
    fn single_tet() {
        let pts =
            vec![Point::origin(), Point::new(1.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0), Point::new(0.0, 0.0, 1.0)];
        let tets = placing_triangulation(&pts).unwrap();
        assert_eq!(tets.len(), 1);
        assert!((total_volume(&pts, &tets) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn cube_fills_volume_with_cospherical_corners() {
        let pts = cube_corners();
        let tets = placing_triangulation(&pts).unwrap();
        assert!((total_volume(&pts, &tets) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_order_also_fills_cube() {
        let mut pts = cube_corners();
        pts.reverse();
        let tets = placing_triangulation(&pts).unwrap();
        assert!((total_volume(&pts, &tets) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coplanar_prefix_then_apex() {
        let pts = vec![
            Point::new(0.0, 0.0, 0.5),
            Point::new(1.0, 0.0, 0.5),
            Point::new(1.0, 1.0, 0.5),
            Point::new(0.0, 1.0, 0.5),
            Point::new(0.5, 0.5, 1.0),
            Point::new(0.5, 0.5, 0.0),
        ];
        let tets = placing_triangulation(&pts).unwrap();
        // Two square pyramids of height 0.5.
        assert!((total_volume(&pts, &tets) - 2.0 / 6.0).abs() < 1e-14);
        assert_eq!(tets.len(), 4);
    }

    #[test]
    fn collinear_start_is_reported() {
        let pts =
            vec![Point::origin(), Point::new(1.0, 0.0, 0.0), Point::new(2.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0)];
        assert_eq!(placing_triangulation(&pts), Err(PlacingError::CollinearStart));
    }

    #[test]
    fn interior_point_is_reported() {
        let mut pts = cube_corners();
        pts.push(Point::new(0.5, 0.5, 0.5));
        assert_eq!(placing_triangulation(&pts), Err(PlacingError::PointNotExtreme(8)));
    }
}
