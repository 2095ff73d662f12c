//! Whole-graph curvature totals.

use rayon::prelude::*;
use serde::Serialize;

use crate::double_cover::{Circuit, Traversal};
use crate::error::{Error, Result};
use crate::geom::Direction;
use crate::graph::{EdgeEnd, End, SpatialGraph};
use crate::vertex::{ctc_vertex, exterior_angle, ntc_vertex, tc_pairs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Ntc,
    Tc,
    Ctc,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexTerm {
    pub id: String,
    pub degree: usize,
    pub ntc: f64,
    pub tc: f64,
    pub ctc: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub graph: String,
    pub ntc_total: f64,
    pub tc_total: f64,
    pub ctc_total: f64,
    /// Exterior angles summed over all polyline joints (shared by every functional).
    pub joint_angle_sum: f64,
    pub joints: usize,
    pub connected: bool,
    pub vertices: Vec<VertexTerm>,
}

/// Exterior angle at every joint of every edge, in edge order.
pub fn joint_angles(g: &SpatialGraph) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.joint_count());
    for k in 0..g.edges().len() {
        out.extend(edge_joint_angles(g, k));
    }
    out
}

fn edge_joint_angles(g: &SpatialGraph, k: usize) -> Vec<f64> {
    let pts = g.polyline(k);
    pts.windows(3)
        .map(|w| {
            let a = (w[0] - w[1]).normalized().expect("validated segment");
            let b = (w[2] - w[1]).normalized().expect("validated segment");
            exterior_angle(a, b)
        })
        .collect()
}

/// Turning of edge `k` summed over its joints.
pub fn edge_turning(g: &SpatialGraph, k: usize) -> f64 {
    edge_joint_angles(g, k).iter().sum()
}

/// All three totals with a per-vertex breakdown.  Leaf vertices contribute 0 to tc.
pub fn curvature_report(g: &SpatialGraph) -> CurvatureReport {
    let vertices: Vec<VertexTerm> = (0..g.vertices().len())
        .into_par_iter()
        .map(|v| {
            let star = g.tangent_star(v);
            VertexTerm {
                id: g.vertex(v).id.clone(),
                degree: star.degree(),
                ntc: ntc_vertex(&star),
                tc: tc_pairs(star.tangents()),
                ctc: ctc_vertex(&star),
            }
        })
        .collect();
    let joint_angle_sum: f64 = joint_angles(g).iter().sum();
    CurvatureReport {
        graph: g.name().to_string(),
        ntc_total: joint_angle_sum + vertices.iter().map(|v| v.ntc).sum::<f64>(),
        tc_total: joint_angle_sum + vertices.iter().map(|v| v.tc).sum::<f64>(),
        ctc_total: joint_angle_sum + vertices.iter().map(|v| v.ctc).sum::<f64>(),
        joint_angle_sum,
        joints: g.joint_count(),
        connected: g.is_connected(),
        vertices,
    }
}

/// Sum of joint angles plus vertex net total curvatures.
pub fn ntc_total(g: &SpatialGraph) -> f64 {
    let v: Vec<f64> = (0..g.vertices().len()).into_par_iter().map(|v| ntc_vertex(&g.tangent_star(v))).collect();
    joint_angles(g).iter().sum::<f64>() + v.iter().sum::<f64>()
}

pub fn tc_total(g: &SpatialGraph) -> f64 {
    joint_angles(g).iter().sum::<f64>()
        + (0..g.vertices().len()).map(|v| tc_pairs(g.tangent_star(v).tangents())).sum::<f64>()
}

pub fn total(g: &SpatialGraph, f: Functional) -> f64 {
    match f {
        Functional::Ntc => ntc_total(g),
        Functional::Tc => tc_total(g),
        Functional::Ctc => curvature_report(g).ctc_total,
    }
}

fn departure(t: &Traversal) -> EdgeEnd {
    EdgeEnd { edge: t.edge, end: if t.forward { End::Start } else { End::Finish } }
}

fn arrival(t: &Traversal) -> EdgeEnd {
    EdgeEnd { edge: t.edge, end: if t.forward { End::Finish } else { End::Start } }
}

/// Exterior angle of a closed circuit at each pass through a vertex, in order, as
/// `(vertex, angle)`.  A reversal costs pi.
pub fn pass_angles(g: &SpatialGraph, circuit: &Circuit) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    let mut step = 0;
    for comp in &circuit.components {
        for (i, t) in comp.iter().enumerate() {
            let u = &comp[(i + 1) % comp.len()];
            let (a, d) = (arrival(t), departure(u));
            let v = g.end_vertex(a);
            if v != g.end_vertex(d) {
                return Err(Error::OpenCircuit(step));
            }
            out.push((v, exterior_angle(g.end_tangent(a), g.end_tangent(d))));
            step += 1;
        }
    }
    Ok(out)
}

/// Total curvature of a closed circuit: joint angles of every traversed edge plus
/// the exterior angle at each pass through a vertex.
pub fn circuit_curvature(g: &SpatialGraph, circuit: &Circuit) -> Result<f64> {
    let turning: Vec<f64> = (0..g.edges().len()).map(|k| edge_turning(g, k)).collect();
    let joints: f64 = circuit.components.iter().flatten().map(|t| turning[t.edge]).sum();
    let passes: f64 = pass_angles(g, circuit)?.iter().map(|p| p.1).sum();
    Ok(joints + passes)
}

/// Circuit curvature concentrated at vertex `v`.
pub fn circuit_vertex_curvature(g: &SpatialGraph, circuit: &Circuit, v: usize) -> Result<f64> {
    Ok(pass_angles(g, circuit)?.iter().filter(|p| p.0 == v).map(|p| p.1).sum())
}

/// Squeeze the graph toward the line through the origin along `e`:
/// `p -> <e,p> e + delta (p - <e,p> e)`.
pub fn cylindrical_shrink(g: &SpatialGraph, e: Direction, delta: f64) -> Result<SpatialGraph> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::BadParameter(format!("shrink factor {delta} not in (0, 1]")));
    }
    let ev = e.vec();
    g.map_points(|p| {
        let along = ev * ev.dot(p);
        along + (p - along) * delta
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use crate::inscribe::circle_polygon;
    use std::f64::consts::PI;

    #[test]
    fn convex_polygon_has_two_pi() {
        for n in [3, 4, 7, 12] {
            let g = circle_polygon(1.0, n).unwrap();
            assert!((ntc_total(&g) - 2.0 * PI).abs() < 1e-12, "n={n}");
            assert!((tc_total(&g) - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn planar_theta_has_three_pi() {
        let g = load_graph(
            r#"{"name": "theta",
            "vertices": [{"id": "p", "pos": [0, 1, 0]}, {"id": "q", "pos": [0, -1, 0]}],
            "edges": [
                {"id": "a", "ends": ["p", "q"], "polyline": [[1, 0, 0]]},
                {"id": "b", "ends": ["p", "q"]},
                {"id": "c", "ends": ["p", "q"], "polyline": [[-1, 0, 0]]}]}"#,
        )
        .unwrap();
        let r = curvature_report(&g);
        assert!((r.ntc_total - 3.0 * PI).abs() < 1e-12, "{}", r.ntc_total);
        // Each vertex: pairs at 45, 45 and 90 degrees.
        let tc_vertex = 3.0 * PI - (PI / 4.0 + PI / 4.0 + PI / 2.0);
        assert!((r.tc_total - (r.joint_angle_sum + 2.0 * tc_vertex)).abs() < 1e-12);
    }

    #[test]
    fn shrink_rejects_bad_factor() {
        let g = circle_polygon(1.0, 4).unwrap();
        assert!(cylindrical_shrink(&g, Direction::z(), 0.0).is_err());
        assert!(cylindrical_shrink(&g, Direction::z(), 1.5).is_err());
        let s = cylindrical_shrink(&g, Direction::x(), 0.5).unwrap();
        assert!((s.vertex(0).pos.x - 1.0).abs() < 1e-15);
    }
}
