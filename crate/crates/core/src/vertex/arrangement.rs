//! Arrangement of the great circles orthogonal to the tangents of a star.
//!
//! Each tangent `T` splits the sphere along the circle `<e, T> = 0`.  The cells of
//! the arrangement are the regions on which every sign `<e, T_i>` is constant, so
//! any integrand built from those signs is piecewise constant over cells.

use std::f64::consts::PI;

use serde::Serialize;

use crate::geom::Vec3;

/// Normals closer than this (up to sign) describe the same circle.
pub const CIRCLE_MERGE_TOL: f64 = 1e-9;
/// Arrangement vertices closer than this are identified.
pub const VERTEX_MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct GreatCircle {
    /// Unit normal of the circle (one of the merged tangents).
    pub normal: Vec3,
    /// How many input tangents produced this circle.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    /// Corners in counter-clockwise order seen from outside; empty for a hemisphere.
    pub corners: Vec<Vec3>,
    /// Circle index of each boundary arc (arc `i` runs from corner `i` to `i+1`).
    pub arc_circles: Vec<usize>,
    /// A point strictly inside the cell.
    pub interior: Vec3,
    pub area: f64,
    /// sum_i chi_i on the cell, with chi_i = +1 where <e, T_i> < 0 and -1 otherwise.
    pub value: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphericalArrangement {
    pub circles: Vec<GreatCircle>,
    pub cells: Vec<Cell>,
}

impl SphericalArrangement {
    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// True if some tangents were parallel or antiparallel and shared a circle.
    pub fn has_merged_circles(&self) -> bool {
        self.circles.iter().any(|c| c.multiplicity > 1)
    }

    /// Integral over the sphere of `f(value)`, exact up to rounding in the areas.
    pub fn integrate(&self, f: impl Fn(i32) -> f64) -> f64 {
        self.cells.iter().map(|c| c.area * f(c.value)).sum()
    }
}

/// sum_i chi_i(e) for the given tangents.
pub fn chi_sum(tangents: &[Vec3], e: Vec3) -> i32 {
    tangents.iter().map(|t| if e.dot(*t) < 0.0 { 1 } else { -1 }).sum()
}

struct HalfEdge {
    origin: usize,
    dest: usize,
    circle: usize,
    /// +1 if travelling counter-clockwise about the circle normal.
    sense: f64,
    /// Angular length of the arc.
    length: f64,
    twin: usize,
}

/// Build the arrangement for unit tangents `tangents` (at least one).
pub fn build_arrangement(tangents: &[Vec3]) -> SphericalArrangement {
    let mut circles: Vec<GreatCircle> = Vec::new();
    for &t in tangents {
        match circles.iter_mut().find(|c| c.normal.cross(t).norm() < CIRCLE_MERGE_TOL) {
            Some(c) => c.multiplicity += 1,
            None => circles.push(GreatCircle { normal: t, multiplicity: 1 }),
        }
    }
    if circles.is_empty() {
        let cell = Cell { corners: vec![], arc_circles: vec![], interior: Vec3::Z, area: 4.0 * PI, value: 0 };
        return SphericalArrangement { circles, cells: vec![cell] };
    }
    if circles.len() == 1 {
        let n = circles[0].normal;
        let cells = [n, -n]
            .into_iter()
            .map(|p| Cell {
                corners: vec![],
                arc_circles: vec![0],
                interior: p,
                area: 2.0 * PI,
                value: chi_sum(tangents, p),
            })
            .collect();
        return SphericalArrangement { circles, cells };
    }

    // Arrangement vertices with the circles through each.
    let mut points: Vec<Vec3> = Vec::new();
    let mut on: Vec<Vec<usize>> = Vec::new();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let p = circles[i].normal.cross(circles[j].normal).normalized().expect("distinct circles");
            for q in [p, -p] {
                let k = match points.iter().position(|x| x.dist(q) < VERTEX_MERGE_TOL) {
                    Some(k) => k,
                    None => {
                        points.push(q);
                        on.push(Vec::new());
                        points.len() - 1
                    }
                };
                for c in [i, j] {
                    if !on[k].contains(&c) {
                        on[k].push(c);
                    }
                }
            }
        }
    }

    // Arcs along each circle, as pairs of half-edges.
    let mut half: Vec<HalfEdge> = Vec::new();
    for (c, circle) in circles.iter().enumerate() {
        let n = circle.normal;
        let mut here: Vec<(f64, usize)> = Vec::new();
        let u = points[on.iter().position(|s| s.contains(&c)).expect("circle has vertices")];
        let w = n.cross(u);
        for (k, s) in on.iter().enumerate() {
            if s.contains(&c) {
                let p = points[k];
                let a = p.dot(w).atan2(p.dot(u)).rem_euclid(2.0 * PI);
                here.push((a, k));
            }
        }
        here.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = here.len();
        for idx in 0..m {
            let (a0, k0) = here[idx];
            let (a1, k1) = here[(idx + 1) % m];
            let length = (a1 - a0).rem_euclid(2.0 * PI);
            let h = half.len();
            half.push(HalfEdge { origin: k0, dest: k1, circle: c, sense: 1.0, length, twin: h + 1 });
            half.push(HalfEdge { origin: k1, dest: k0, circle: c, sense: -1.0, length, twin: h });
        }
    }

    let tangent_at = |h: &HalfEdge, at: Vec3| -> Vec3 { circles[h.circle].normal.cross(at) * h.sense };

    // Outgoing half-edges at each vertex, counter-clockwise about the outward normal.
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (i, h) in half.iter().enumerate() {
        outgoing[h.origin].push(i);
    }
    let mut slot = vec![0usize; half.len()];
    for (v, list) in outgoing.iter_mut().enumerate() {
        let p = points[v];
        let t0 = tangent_at(&half[list[0]], p);
        let t1 = p.cross(t0);
        let ang = |i: usize| {
            let t = tangent_at(&half[i], p);
            t.dot(t1).atan2(t.dot(t0)).rem_euclid(2.0 * PI)
        };
        list.sort_by(|&a, &b| ang(a).total_cmp(&ang(b)));
        for (s, &i) in list.iter().enumerate() {
            slot[i] = s;
        }
    }
    // Keep the face on the left: leave along the edge just clockwise of the twin.
    let next = |i: usize| -> usize {
        let t = half[i].twin;
        let list = &outgoing[half[i].dest];
        list[(slot[t] + list.len() - 1) % list.len()]
    };

    let mut seen = vec![false; half.len()];
    let mut cells = Vec::new();
    for start in 0..half.len() {
        if seen[start] {
            continue;
        }
        let mut ring = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            ring.push(i);
            i = next(i);
        }
        let n = ring.len();
        let mut angle_sum = 0.0;
        let mut mid_sum = Vec3::ZERO;
        for (r, &i) in ring.iter().enumerate() {
            let h = &half[i];
            let b = points[h.dest];
            let out = tangent_at(&half[ring[(r + 1) % n]], b);
            let back = tangent_at(&half[h.twin], b);
            angle_sum += b.dot(out.cross(back)).atan2(out.dot(back)).rem_euclid(2.0 * PI);
            let a = points[h.origin];
            let dir = tangent_at(h, a);
            let half_len = 0.5 * h.length;
            mid_sum += a * half_len.cos() + dir * half_len.sin();
        }
        let area = angle_sum - (n as f64 - 2.0) * PI;
        let interior = mid_sum.normalized().unwrap_or(points[half[ring[0]].origin]);
        cells.push(Cell {
            corners: ring.iter().map(|&i| points[half[i].origin]).collect(),
            arc_circles: ring.iter().map(|&i| half[i].circle).collect(),
            interior,
            area,
            value: chi_sum(tangents, interior),
        });
    }
    SphericalArrangement { circles, cells }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z).normalized().unwrap()
    }

    #[test]
    fn coordinate_axes_give_octants() {
        let arr = build_arrangement(&[Vec3::X, Vec3::Y, Vec3::Z]);
        assert_eq!(arr.cells.len(), 8);
        for c in &arr.cells {
            assert!((c.area - PI / 2.0).abs() < 1e-12);
            assert_eq!(c.corners.len(), 3);
        }
    }

    #[test]
    fn areas_cover_the_sphere() {
        let ts = [unit(1.0, 0.2, 0.1), unit(-0.3, 1.0, 0.4), unit(0.2, -0.5, 1.0), unit(0.7, 0.7, -0.2)];
        let arr = build_arrangement(&ts);
        assert!((arr.total_area() - 4.0 * PI).abs() < 1e-9);
        // Four circles in general position: 2 + 2 * C(4, 2) regions.
        assert_eq!(arr.cells.len(), 14);
        for c in &arr.cells {
            assert!(c.area > 0.0);
            for t in &ts {
                assert!(c.interior.dot(*t).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn concurrent_circles_merge_vertices() {
        // All tangents in the xy-plane: every circle passes through the poles.
        let ts: Vec<Vec3> = (0..5)
            .map(|k| {
                let lon = k as f64 * 0.9;
                Vec3::new(lon.cos(), lon.sin(), 0.0)
            })
            .collect();
        let arr = build_arrangement(&ts);
        assert_eq!(arr.cells.len(), 10);
        assert!((arr.total_area() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn parallel_tangents_share_a_circle() {
        let arr = build_arrangement(&[Vec3::X, -Vec3::X, Vec3::Y]);
        assert_eq!(arr.circles.len(), 2);
        assert!(arr.has_merged_circles());
        assert_eq!(arr.cells.len(), 4);
        let arr = build_arrangement(&[Vec3::Z]);
        assert_eq!(arr.cells.len(), 2);
        assert!((arr.total_area() - 4.0 * PI).abs() < 1e-15);
    }
}
