//! Curvature functionals of a single vertex star.

mod arrangement;

pub use arrangement::{build_arrangement, chi_sum, Cell, GreatCircle, SphericalArrangement};

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angle_between, Vec3};
use crate::sampling;

/// The unit tangents of the edges leaving one vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexStar {
    vertex: String,
    tangents: Vec<Vec3>,
}

impl VertexStar {
    /// Normalizes each tangent; fails on a zero or non-finite vector.
    pub fn new(vertex: impl Into<String>, tangents: &[Vec3]) -> Result<Self> {
        let ts = tangents
            .iter()
            .map(|&t| {
                if !t.is_finite() {
                    return Err(Error::NonFinite("tangent".into()));
                }
                t.normalized().ok_or_else(|| Error::InvalidDirection(t.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexStar { vertex: vertex.into(), tangents: ts })
    }

    pub(crate) fn from_unit(vertex: String, tangents: Vec<Vec3>) -> Self {
        VertexStar { vertex, tangents }
    }

    pub fn vertex(&self) -> &str {
        &self.vertex
    }

    pub fn tangents(&self) -> &[Vec3] {
        &self.tangents
    }

    pub fn degree(&self) -> usize {
        self.tangents.len()
    }

    pub fn arrangement(&self) -> SphericalArrangement {
        build_arrangement(&self.tangents)
    }
}

/// Net total curvature: (1/4) * integral over the sphere of [sum chi_i]^+.
pub fn ntc_vertex(star: &VertexStar) -> f64 {
    if star.tangents.is_empty() {
        return 0.0;
    }
    0.25 * star.arrangement().integrate(|v| v.max(0) as f64)
}

/// The equivalent form (1/8) * integral of |sum chi_i|; agrees with [`ntc_vertex`]
/// because sum chi_i is odd under e -> -e.
pub fn ntc_vertex_abs(star: &VertexStar) -> f64 {
    if star.tangents.is_empty() {
        return 0.0;
    }
    0.125 * star.arrangement().integrate(|v| v.abs() as f64)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of [`ntc_vertex`] from `samples` uniform directions.
pub fn ntc_vertex_mc(star: &VertexStar, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::BadParameter("need at least 2 samples".into()));
    }
    let blocks = sampling::blocks(samples);
    let sums: Vec<(f64, f64)> = blocks
        .par_iter()
        .map(|&(b, len)| {
            let mut s = 0.0;
            let mut s2 = 0.0;
            for e in sampling::uniform_block(seed, b, len) {
                let x = PI * chi_sum(&star.tangents, e).max(0) as f64;
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(Estimate { estimate: mean, stderr: (var / n).sqrt(), samples })
}

/// Exterior angle at a pass from tangent `a` to tangent `b`: pi - angle(a, b).
pub fn exterior_angle(a: Vec3, b: Vec3) -> f64 {
    PI - angle_between(a, b)
}

/// Sum of the exterior angles over all pairs of tangents.
pub fn tc_vertex(star: &VertexStar) -> Result<f64> {
    let d = star.degree();
    if d < 2 {
        return Err(Error::DegreeTooSmall { needed: 2, got: d });
    }
    Ok(tc_pairs(&star.tangents))
}

pub(crate) fn tc_pairs(ts: &[Vec3]) -> f64 {
    let mut s = 0.0;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            s += exterior_angle(ts[i], ts[j]);
        }
    }
    s
}

/// sum_i arcsin <T_i, e>
pub fn ctc_objective(tangents: &[Vec3], e: Vec3) -> f64 {
    // atan2 keeps full precision near the poles, where asin has infinite slope.
    tangents.iter().map(|t| t.dot(e).atan2(t.cross(e).norm())).sum()
}

fn ctc_gradient(tangents: &[Vec3], e: Vec3) -> Vec3 {
    let mut g = Vec3::ZERO;
    for &t in tangents {
        let c = t.dot(e);
        let s2 = 1.0 - c * c;
        if s2 > 1e-24 {
            g += (t - e * c) * (1.0 / s2.sqrt());
        }
    }
    g
}

/// Maximum over the sphere of [`ctc_objective`], by multi-start projected ascent.
pub fn ctc_vertex(star: &VertexStar) -> f64 {
    let ts = &star.tangents;
    if ts.is_empty() {
        return 0.0;
    }
    let mut seeds: Vec<Vec3> = Vec::new();
    for &t in ts {
        seeds.push(t);
        seeds.push(-t);
    }
    if let Some(s) = ts.iter().copied().sum::<Vec3>().normalized() {
        seeds.push(s);
    }
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            if let Some(c) = ts[i].cross(ts[j]).normalized() {
                seeds.push(c);
                seeds.push(-c);
            }
        }
    }
    let mut scan: Vec<(f64, Vec3)> = sampling::fibonacci_sphere(4000).map(|e| (ctc_objective(ts, e), e)).collect();
    scan.sort_by(|a, b| b.0.total_cmp(&a.0));
    seeds.extend(scan.iter().take(12).map(|x| x.1));

    seeds.into_iter().map(|s| ascend(ts, s)).fold(f64::NEG_INFINITY, f64::max).max(0.0)
}

/// Projected gradient ascent with backtracking; returns the best value seen.
fn ascend(ts: &[Vec3], mut e: Vec3) -> f64 {
    let mut f = ctc_objective(ts, e);
    let mut step = 0.5;
    for _ in 0..2000 {
        let g = ctc_gradient(ts, e);
        let gn = g.norm();
        if gn < 1e-13 {
            break;
        }
        let mut improved = false;
        while step > 1e-16 {
            let cand = (e + g * (step / gn)).normalized().unwrap_or(e);
            let fc = ctc_objective(ts, cand);
            if fc > f {
                e = cand;
                f = fc;
                improved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    f
}

/// |sum T_i|
pub fn vtc_vertex(star: &VertexStar) -> f64 {
    star.tangents.iter().copied().sum::<Vec3>().norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAngle {
    pub i: usize,
    pub j: usize,
    pub exterior: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexReport {
    pub vertex: String,
    pub degree: usize,
    pub ntc: f64,
    pub tc: Option<f64>,
    pub ctc: f64,
    pub vtc: f64,
    pub cells: usize,
    /// Some tangents were parallel or antiparallel; the ctc maximum may be attained
    /// on a whole arc in that case.
    pub merged_circles: bool,
    pub pairs: Vec<PairAngle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<Estimate>,
}

pub fn vertex_report(star: &VertexStar) -> VertexReport {
    let arr = star.arrangement();
    let ts = &star.tangents;
    let mut pairs = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            pairs.push(PairAngle { i, j, exterior: exterior_angle(ts[i], ts[j]) });
        }
    }
    VertexReport {
        vertex: star.vertex.clone(),
        degree: star.degree(),
        ntc: if ts.is_empty() { 0.0 } else { 0.25 * arr.integrate(|v| v.max(0) as f64) },
        tc: tc_vertex(star).ok(),
        ctc: ctc_vertex(star),
        vtc: vtc_vertex(star),
        cells: arr.cells.len(),
        merged_circles: arr.has_merged_circles(),
        pairs,
        monte_carlo: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(ts: &[[f64; 3]]) -> VertexStar {
        let v: Vec<Vec3> = ts.iter().map(|&a| a.into()).collect();
        VertexStar::new("q", &v).unwrap()
    }

    fn coplanar(d: usize) -> VertexStar {
        let v: Vec<Vec3> = (0..d)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / d as f64;
                Vec3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        VertexStar::new("q", &v).unwrap()
    }

    /// Brute-force quadrature of the chi-sum integrand on a latitude/longitude grid.
    fn grid_ntc(ts: &[Vec3], n: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..n {
            let z = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
            let r = (1.0 - z * z).sqrt();
            for j in 0..2 * n {
                let a = (j as f64 + 0.5) * PI / n as f64;
                let e = Vec3::new(r * a.cos(), r * a.sin(), z);
                total += chi_sum(ts, e).max(0) as f64;
            }
        }
        // Each cell has area 4 pi / (2 n^2).
        0.25 * total * 4.0 * PI / (2 * n * n) as f64
    }

    #[test]
    fn leaf_vertex_has_quarter_turn() {
        // chi = +1 on one hemisphere.
        assert!((ntc_vertex(&star(&[[0.0, 0.0, 1.0]])) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_edges_give_exterior_angle() {
        for theta in [0.3f64, 1.0, 2.0, 3.0] {
            let s = star(&[[1.0, 0.0, 0.0], [theta.cos(), theta.sin(), 0.0]]);
            assert!((ntc_vertex(&s) - (PI - theta)).abs() < 1e-12);
        }
        let s = star(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]);
        assert!(ntc_vertex(&s).abs() < 1e-15);
        let s = star(&[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert!((ntc_vertex(&s) - PI).abs() < 1e-15);
    }

    #[test]
    fn abs_form_agrees() {
        let s = star(&[[1.0, 0.2, 0.3], [-0.4, 1.0, 0.1], [0.1, -0.3, 1.0], [-0.5, -0.5, -0.7], [0.9, -0.1, -0.2]]);
        assert!((ntc_vertex(&s) - ntc_vertex_abs(&s)).abs() < 1e-12);
    }

    #[test]
    fn matches_grid_quadrature() {
        let s = star(&[[1.0, 0.2, 0.3], [-0.4, 1.0, 0.1], [0.1, -0.3, 1.0], [-0.5, -0.5, -0.7]]);
        let exact = ntc_vertex(&s);
        let grid = grid_ntc(s.tangents(), 600);
        assert!((exact - grid).abs() < 2e-3, "{exact} vs {grid}");
    }

    #[test]
    fn coplanar_stars() {
        for d in 3..=6 {
            let s = coplanar(d);
            let want = if d % 2 == 1 { PI / 2.0 } else { 0.0 };
            assert!((ntc_vertex(&s) - want).abs() < 1e-9, "d={d}");
            let tc_want = PI / 2.0 * (((d - 1) * (d - 1)) / 2) as f64;
            assert!((tc_vertex(&s).unwrap() - tc_want).abs() < 1e-9, "d={d}");
        }
    }

    /// Dense scan of the ctc objective, refined around the best grid point.
    fn scan_ctc(ts: &[Vec3]) -> f64 {
        let mut best = (f64::NEG_INFINITY, Vec3::Z);
        for e in sampling::fibonacci_sphere(200_000) {
            let f = ctc_objective(ts, e);
            if f > best.0 {
                best = (f, e);
            }
        }
        best.0
    }

    #[test]
    fn ctc_of_coplanar_stars() {
        // Odd stars: the maximum sits at a tangent, value pi/6 (d=3) and pi/10 (d=5).
        assert!((ctc_vertex(&coplanar(3)) - PI / 6.0).abs() < 1e-9);
        assert!((ctc_vertex(&coplanar(5)) - PI / 10.0).abs() < 1e-9);
        assert!(ctc_vertex(&coplanar(4)).abs() < 1e-12, "{}", ctc_vertex(&coplanar(4)));
        assert!(ctc_vertex(&coplanar(6)).abs() < 1e-12, "{}", ctc_vertex(&coplanar(6)));
        for d in [3, 5] {
            let s = coplanar(d);
            let scan = scan_ctc(s.tangents());
            assert!(ctc_vertex(&s) >= scan - 1e-12);
            assert!(ctc_vertex(&s) - scan < 1e-2);
        }
    }

    #[test]
    fn ctc_dominates_scan() {
        let s = star(&[[1.0, 0.2, 0.3], [-0.4, 1.0, 0.1], [0.1, -0.3, 1.0], [0.5, 0.5, -0.7]]);
        let c = ctc_vertex(&s);
        let scan = scan_ctc(s.tangents());
        assert!(c >= scan - 1e-12 && c - scan < 1e-3, "{c} vs {scan}");
    }

    #[test]
    fn vtc_and_errors() {
        let s = coplanar(4);
        assert!(vtc_vertex(&s) < 1e-15);
        assert!(matches!(tc_vertex(&star(&[[1.0, 0.0, 0.0]])), Err(Error::DegreeTooSmall { .. })));
        assert!(VertexStar::new("q", &[Vec3::ZERO]).is_err());
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let s = coplanar(3);
        let a = ntc_vertex_mc(&s, 100_000, 11).unwrap();
        let b = ntc_vertex_mc(&s, 100_000, 11).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert!((a.estimate - PI / 2.0).abs() < 4.0 * a.stderr);
    }
}
