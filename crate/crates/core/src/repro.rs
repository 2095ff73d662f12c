//! Reproduction runs: each experiment recomputes known values and compares them
//! against the computed ones.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::crofton::{crofton_ntc, Scheme};
use crate::curvature::{circuit_curvature, circuit_vertex_curvature, curvature_report, cylindrical_shrink, ntc_total};
use crate::double_cover::{double, euler_circuit, nlm_from_circuit, perfect_matchings, TransitionSystem};
use crate::error::{Error, Result};
use crate::geom::{pi_multiple, Direction, HalfInt, Vec3};
use crate::graph::{GraphBuilder, SpatialGraph, Vertex};
use crate::inscribe::{circle_polygon, inscribe, planar_theta, wild_arch_params, wild_curve, SampledArc};
use crate::minimizer::{flat_min, Family, FlatResult};
use crate::projection::Projector;
use crate::random::{random_connected, random_embedding, random_star, random_trivalent};
use crate::sampling::{rng, uniform_direction};
use crate::vertex::{ctc_vertex, ntc_vertex, ntc_vertex_mc, tc_vertex, VertexStar};

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Experiment {
    pub id: u32,
    pub key: &'static str,
    pub title: &'static str,
    pub checks: Vec<CheckLine>,
}

impl Experiment {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

type Runner = fn() -> Result<Vec<CheckLine>>;

/// (id, key, title, runner)
pub const EXPERIMENTS: [(u32, &str, &str, Runner); 12] = [
    (1, "vertex-table", "coplanar equal-angle stars, d = 3..6", vertex_table),
    (2, "crofton", "Crofton average of mu against the direct total", crofton),
    (3, "butterfly", "butterfly graph and its subgraph without L0", butterfly),
    (4, "family-minima", "exhaustive minima of named families", family_minima),
    (5, "width", "minimal width of complete graphs", width),
    (6, "trivalent-identity", "non-reversing double circuits of trivalent graphs", trivalent_identity),
    (7, "circuit-independence", "nlm from circuits against nlm from degrees", circuit_independence),
    (8, "refinement", "mu under refinement of inscribed polygons", refinement),
    (9, "degree4-strictness", "degree-4 star where ntc is below every circuit pairing", degree4_strictness),
    (10, "wild-curve", "inscribed polygons of a curve of infinite curvature", wild),
    (11, "cylindrical-shrink", "ntc under shrinking toward a line", shrink),
    (12, "properties", "randomized property suites", properties),
];

/// Run one experiment, by number or key.
pub fn run(which: &str) -> Result<Experiment> {
    let &(id, key, title, f) = EXPERIMENTS
        .iter()
        .find(|(id, key, _, _)| which == *key || which.parse::<u32>().ok() == Some(*id))
        .ok_or_else(|| Error::UnknownExperiment(which.to_string()))?;
    let checks = f().unwrap_or_else(|e| {
        vec![CheckLine {
            name: "run".into(),
            expected: "no error".into(),
            computed: e.to_string(),
            tolerance: "-".into(),
            pass: false,
        }]
    });
    Ok(Experiment { id, key, title, checks })
}

pub fn run_all() -> Vec<Experiment> {
    EXPERIMENTS.iter().map(|(id, ..)| run(&id.to_string()).expect("listed experiment")).collect()
}

/// Plain-text table, one line per check.
pub fn render(exps: &[Experiment]) -> String {
    let mut s = String::new();
    for e in exps {
        let _ = writeln!(s, "[{}] {}: {}", e.id, e.key, e.title);
        for c in &e.checks {
            let _ = writeln!(
                s,
                "  {}  {:<34} expected {:<22} computed {:<22} tol {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.computed,
                c.tolerance
            );
        }
        let _ = writeln!(s, "  => {}", if e.pass() { "PASS" } else { "FAIL" });
    }
    let failed = exps.iter().filter(|e| !e.pass()).count();
    let _ = writeln!(s, "{} experiments, {} failed", exps.len(), failed);
    s
}

fn close(name: impl Into<String>, expected: f64, computed: f64, tol: f64) -> CheckLine {
    CheckLine {
        name: name.into(),
        expected: format!("{expected:.9}"),
        computed: format!("{computed:.9}"),
        tolerance: format!("{tol:.1e}"),
        pass: (expected - computed).abs() <= tol,
    }
}

fn exact(name: impl Into<String>, expected: impl ToString, computed: impl ToString) -> CheckLine {
    let (expected, computed) = (expected.to_string(), computed.to_string());
    CheckLine { name: name.into(), pass: expected == computed, expected, computed, tolerance: "exact".into() }
}

fn holds(name: impl Into<String>, expected: impl ToString, computed: impl ToString, pass: bool) -> CheckLine {
    CheckLine {
        name: name.into(),
        expected: expected.to_string(),
        computed: computed.to_string(),
        tolerance: "-".into(),
        pass,
    }
}

/// `d` unit tangents at equal angles in the xy-plane.
pub fn coplanar_star(d: usize) -> VertexStar {
    let t: Vec<Vec3> = (0..d)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / d as f64;
            Vec3::new(a.cos(), a.sin(), 0.0)
        })
        .collect();
    VertexStar::new("q", &t).expect("unit tangents")
}

fn vertex_table() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for d in 3..=6 {
        let s = coplanar_star(d);
        let ntc = ntc_vertex(&s);
        let ntc_expected = if d % 2 == 1 { PI / 2.0 } else { 0.0 };
        out.push(close(format!("ntc d={d}"), ntc_expected, ntc, 1e-6));
        out.push(close(format!("ctc d={d}"), 0.0, ctc_vertex(&s), 1e-6));
        let tc_expected = PI / 2.0 * (((d - 1) * (d - 1)) / 2) as f64;
        out.push(close(format!("tc d={d}"), tc_expected, tc_vertex(&s)?, 1e-6));
        let mc = ntc_vertex_mc(&s, 1_000_000, d as u64)?;
        out.push(CheckLine {
            name: format!("ntc Monte Carlo d={d}"),
            expected: format!("{ntc:.9}"),
            computed: format!("{:.9} +- {:.2e}", mc.estimate, mc.stderr),
            tolerance: "3 stderr".into(),
            pass: (mc.estimate - ntc).abs() <= 3.0 * mc.stderr,
        });
    }
    Ok(out)
}

fn butterfly_graph() -> Result<SpatialGraph> {
    Family::Butterfly { alpha: 0.5f64.atan() }.embed()
}

fn k4_graph() -> Result<SpatialGraph> {
    Family::Complete { m: 4 }.embed()
}

fn crofton() -> Result<Vec<CheckLine>> {
    let graphs = [circle_polygon(1.0, 4)?, butterfly_graph()?, planar_theta(128)?, k4_graph()?];
    let mut out = Vec::new();
    let theta = ntc_total(&graphs[2]);
    out.push(close("planar theta ntc_total", 3.0 * PI, theta, 2e-3));
    for (i, g) in graphs.iter().enumerate() {
        let direct = ntc_total(g);
        let r = crofton_ntc(g, Scheme::Mc, 200_000, 100 + i as u64)?;
        let tol = (3.0 * r.stderr).max(0.01 * direct);
        out.push(CheckLine {
            name: format!("crofton {}", g.name()),
            expected: format!("{direct:.9}"),
            computed: format!("{:.9} +- {:.2e}", r.estimate, r.stderr),
            tolerance: format!("{tol:.3e}"),
            pass: (r.estimate - direct).abs() <= tol,
        });
    }
    Ok(out)
}

fn butterfly() -> Result<Vec<CheckLine>> {
    let alpha = 0.5f64.atan();
    let g = butterfly_graph()?;
    let g0 = g.remove_edge("L0")?;
    let (a, b) = (ntc_total(&g), ntc_total(&g0));
    Ok(vec![
        close("ntc(G) = 5pi - 4a", 5.0 * PI - 4.0 * alpha, a, 1e-9),
        close("ntc(G0) = 6pi - 8a", 6.0 * PI - 8.0 * alpha, b, 1e-9),
        holds("ntc(G0) > ntc(G)", "true", format!("{b:.6} > {a:.6}"), b > a),
    ])
}

/// (family, expected ntc / pi)
pub const FAMILY_MINIMA: [(&str, i64); 23] = [
    ("complete:4", 4),
    ("complete:5", 6),
    ("complete:6", 9),
    ("complete:7", 12),
    ("bipartite:2,2", 2),
    ("bipartite:3,2", 3),
    ("bipartite:3,3", 5),
    ("bipartite:4,3", 6),
    ("bipartite:4,4", 8),
    ("theta:3", 3),
    ("theta:4", 4),
    ("theta:5", 5),
    ("theta:6", 6),
    ("ladder:3", 5),
    ("ladder:4", 6),
    ("ladder:5", 7),
    ("wheel:4", 4),
    ("wheel:5", 5),
    ("wheel:6", 5),
    ("ring:3", 8),
    ("triple_circles", 5),
    ("triple_theta", 6),
    ("sinewave:3,0.05", 4),
];

fn family_min(s: &str) -> Result<FlatResult> {
    flat_min(&s.parse::<Family>()?.combinatorial()?)
}

fn family_minima() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for (fam, k) in FAMILY_MINIMA {
        let r = family_min(fam)?;
        out.push(exact(format!("ntc* {fam}"), pi_multiple(k), &r.ntc_star));
        if fam == "triple_circles" {
            out.push(exact("bridge triple_circles", HalfInt::from_doubled(3), r.bridge));
        }
    }
    Ok(out)
}

fn width() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for (m, w) in [(4, 4), (5, 6), (6, 9)] {
        let r = family_min(&format!("complete:{m}"))?;
        out.push(exact(format!("width* K{m}"), w, r.width_star));
    }
    let mut bad = Vec::new();
    for (fam, _) in FAMILY_MINIMA {
        let r = family_min(fam)?;
        if r.mu_star.doubled() < r.width_star as i64 {
            bad.push(fam);
        }
    }
    out.push(holds(
        "mu* >= width*/2 on all families",
        "0 violations",
        format!("{} violations {:?}", bad.len(), bad),
        bad.is_empty(),
    ));
    Ok(out)
}

/// Largest relative error of circuit curvature against twice the total, over
/// `circuits` non-reversing circuits.
fn circuit_ratio_error(g: &SpatialGraph, circuits: u64, seed: u64) -> Result<f64> {
    let dg = double(&g.combinatorial());
    let ntc = ntc_total(g);
    let mut worst = 0.0f64;
    for s in 0..circuits {
        let c = euler_circuit(&dg, true, seed * 1000 + s)?;
        let cc = circuit_curvature(g, &c)?;
        worst = worst.max((cc - 2.0 * ntc).abs() / (2.0 * ntc).max(1.0));
    }
    Ok(worst)
}

fn trivalent_identity() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for (name, g) in [("theta3", Family::Theta { m: 3 }.embed()?), ("ladder3", Family::Ladder { m: 3 }.embed()?)] {
        let err = circuit_ratio_error(&g, 10, 1)?;
        out.push(close(format!("C(G')/2NTC - 1, {name}"), 0.0, err, 1e-9));
    }
    let fine = planar_theta(128)?;
    let c = euler_circuit(&double(&fine.combinatorial()), true, 5)?;
    out.push(close("planar theta C(G')", 6.0 * PI, circuit_curvature(&fine, &c)?, 2e-3));
    let mut r = rng(6, 0);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = [4, 6, 8][i % 3];
        let cg = random_trivalent(&mut r, n)?;
        let g = random_embedding(&mut r, &cg, 1, 2)?;
        worst = worst.max(circuit_ratio_error(&g, 10, 10 + i as u64)?);
    }
    out.push(close("worst of 20 random trivalent", 0.0, worst, 1e-9));
    Ok(out)
}

fn circuit_independence() -> Result<Vec<CheckLine>> {
    let mut r = rng(7, 0);
    let (mut compared, mut violations) = (0usize, 0usize);
    for gi in 0..10 {
        let cg = random_connected(&mut r, 5, 4)?;
        let g = random_embedding(&mut r, &cg, 0, 2)?;
        let proj = Projector::new(&g);
        let dg = double(&cg);
        let circuits: Vec<_> = (0..10).map(|s| euler_circuit(&dg, false, 100 * gi + s)).collect::<Result<_>>()?;
        let mut generic = 0;
        while generic < 50 {
            let e = Direction::new(uniform_direction(&mut r))?;
            if proj.genericity(e).witness.is_some() {
                continue;
            }
            generic += 1;
            for v in 0..g.vertices().len() {
                let (up, down) = proj.vertex_updown(e, v)?;
                let expected = HalfInt::from_doubled(down as i64 - up as i64);
                for c in &circuits {
                    compared += 1;
                    if nlm_from_circuit(&g, c, e, v)? != expected {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok(vec![holds(
        "nlm(circuit) = nlm(degrees)",
        "0 violations",
        format!("{violations} violations in {compared}"),
        violations == 0 && compared > 0,
    )])
}

fn refinement() -> Result<Vec<CheckLine>> {
    let mut r = rng(8, 0);
    let (mut trials, mut violations, mut attempts) = (0usize, 0usize, 0usize);
    while trials < 1000 && attempts < 100_000 {
        attempts += 1;
        let n = r.random_range(3..=5);
        let cg = random_connected(&mut r, n, 2)?;
        let fine = random_embedding(&mut r, &cg, 3, 5)?;
        let keep: Vec<Vec<bool>> =
            fine.edges().iter().map(|e| e.joints.iter().map(|_| r.random_bool(0.5)).collect()).collect();
        let dropped: Vec<(usize, usize)> = keep
            .iter()
            .enumerate()
            .flat_map(|(k, ks)| ks.iter().enumerate().filter(|x| !*x.1).map(move |(j, _)| (k, j)))
            .collect();
        if dropped.is_empty() {
            continue;
        }
        let add = dropped[r.random_range(0..dropped.len())];
        let coarse = fine.filter_joints(|k, j| keep[k][j])?;
        let refined = fine.filter_joints(|k, j| keep[k][j] || (k, j) == add)?;
        let e = Direction::new(uniform_direction(&mut r))?;
        let (Some(a), Some(b)) = (Projector::new(&coarse).mu_doubled(e), Projector::new(&refined).mu_doubled(e)) else {
            continue;
        };
        trials += 1;
        if b < a {
            violations += 1;
        }
    }
    Ok(vec![holds(
        "mu(refined) >= mu(coarse)",
        "0 violations in 1000",
        format!("{violations} violations in {trials}"),
        violations == 0 && trials == 1000,
    )])
}

/// Four edges from the origin with tangents (1,0,0), (0,1,0),
/// (-cos a, 0, sin a), (0, -cos a, -sin a).
pub fn degree4_star(alpha: f64) -> Result<SpatialGraph> {
    let t = [Vec3::X, Vec3::Y, Vec3::new(-alpha.cos(), 0.0, alpha.sin()), Vec3::new(0.0, -alpha.cos(), -alpha.sin())];
    let mut b = GraphBuilder::new("degree4_star");
    let q = b.vertex("q", Vec3::ZERO);
    for (i, &d) in t.iter().enumerate() {
        let v = b.vertex(format!("t{i}"), d);
        b.edge(format!("s{i}"), q, v, vec![]);
    }
    b.build()
}

fn degree4_strictness() -> Result<Vec<CheckLine>> {
    let alpha = 0.5;
    let g = degree4_star(alpha)?;
    let q = g.vertex_index("q")?;
    let ntc = ntc_vertex(&g.tangent_star(q));
    let dg = double(&g.combinatorial());
    let centre = dg.copy_ends_at(q);
    let mut leaf_pairs = Vec::new();
    for v in 0..g.vertices().len() {
        if v != q {
            let ends = dg.copy_ends_at(v);
            leaf_pairs.push((ends[0], ends[1]));
        }
    }
    // Every transition system at the centre: all 105 pairings of its 8 copy-ends.
    let mut best = f64::INFINITY;
    for m in perfect_matchings(centre.len()) {
        let mut pairs = leaf_pairs.clone();
        pairs.extend(m.iter().map(|&(i, j)| (centre[i], centre[j])));
        let c = TransitionSystem::from_pairs(&dg, &pairs)?.circuit();
        best = best.min(0.5 * circuit_vertex_curvature(&g, &c, q)?);
    }
    Ok(vec![
        CheckLine {
            name: "ntc(q) < 2a - 1e-3".into(),
            expected: format!("< {:.9}", 2.0 * alpha - 1e-3),
            computed: format!("{ntc:.9}"),
            tolerance: "-".into(),
            pass: ntc < 2.0 * alpha - 1e-3,
        },
        close("best pairing C(q)/2 = 2a", 2.0 * alpha, best, 1e-12),
    ])
}

fn wild() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for k in [5, 10, 20] {
        // Arches k..2k-1: the polygon resolves each arch with 16 samples.
        let arc = SampledArc { curve: &wild_curve, params: wild_arch_params(k, 2 * k - 1, 16), closed: false };
        let g = inscribe(&format!("wild{k}"), &arc)?;
        let tc = curvature_report(&g).joint_angle_sum;
        out.push(CheckLine {
            name: format!("total curvature, {k} arches"),
            expected: format!(">= {:.6}", 0.9 * k as f64 * PI),
            computed: format!("{tc:.6}"),
            tolerance: "-".into(),
            pass: tc >= 0.9 * k as f64 * PI,
        });
    }
    Ok(out)
}

fn shrink_case(name: &str, g: &SpatialGraph, e: Direction) -> Result<Vec<CheckLine>> {
    let limit = 2.0 * PI * Projector::new(g).resolve(e)?.mu.to_f64();
    let tiny = ntc_total(&cylindrical_shrink(g, e, 1e-4)?);
    let seq: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
        .iter()
        .map(|&d| cylindrical_shrink(g, e, d).map(|s| ntc_total(&s)))
        .collect::<Result<_>>()?;
    let up = seq.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = seq.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let nearer = seq.windows(2).all(|w| (w[1] - limit).abs() <= (w[0] - limit).abs() + 1e-12);
    let shown: Vec<String> = seq.iter().map(|v| format!("{v:.5}")).collect();
    Ok(vec![
        close(format!("{name} ntc at 1e-4 -> 2 pi mu"), limit, tiny, 0.01 * limit),
        holds(format!("{name} monotone toward limit"), "monotone", shown.join(" "), (up || down) && nearer),
    ])
}

fn shrink() -> Result<Vec<CheckLine>> {
    let mut out = shrink_case("K4", &k4_graph()?, Direction::new(Vec3::new(0.3, 0.5, 0.8))?)?;
    out.extend(shrink_case("butterfly", &butterfly_graph()?, Direction::new(Vec3::Y)?)?);
    Ok(out)
}

fn properties() -> Result<Vec<CheckLine>> {
    let mut r = rng(12, 0);
    let mut out = Vec::new();

    let mut floor_bad = 0;
    for _ in 0..500 {
        let d = [1, 3, 5, 7][r.random_range(0..4)];
        if ntc_vertex(&random_star(&mut r, d)) < PI / 2.0 - 1e-9 {
            floor_bad += 1;
        }
    }
    out.push(holds(
        "odd degree: ntc >= pi/2 (500 stars)",
        "0 violations",
        format!("{floor_bad} violations"),
        floor_bad == 0,
    ));

    let mut tc_bad = 0;
    for _ in 0..500 {
        let d = r.random_range(2..=7);
        let s = random_star(&mut r, d);
        if tc_vertex(&s)? < (d - 1) as f64 * ntc_vertex(&s) - 1e-9 {
            tc_bad += 1;
        }
    }
    out.push(holds("tc >= (d-1) ntc (500 stars)", "0 violations", format!("{tc_bad} violations"), tc_bad == 0));

    let (mut triples, mut nlm_bad, mut fiber_bad) = (0, 0, 0);
    while triples < 200 {
        let n = r.random_range(2..=6);
        let cg = random_connected(&mut r, n, 3)?;
        let g = random_embedding(&mut r, &cg, 0, 3)?;
        let proj = Projector::new(&g);
        let e = Direction::new(uniform_direction(&mut r))?;
        let Ok(profile) = proj.profile(e) else { continue };
        let h = proj.heights(e);
        let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let s = r.random_range(lo..hi);
        match proj.fiber_count(e, s) {
            Err(Error::CriticalLevel(_)) => continue,
            Err(_) => fiber_bad += 1,
            Ok(_) => {}
        }
        triples += 1;
        if profile.points.iter().map(|p| p.nlm).sum::<HalfInt>() != HalfInt::ZERO {
            nlm_bad += 1;
        }
    }
    out.push(holds("sum nlm = 0 (200 triples)", "0 violations", format!("{nlm_bad} violations"), nlm_bad == 0));
    out.push(holds("fiber identity (200 triples)", "0 violations", format!("{fiber_bad} violations"), fiber_bad == 0));

    let (mut sub_bad, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..100 {
        let (g1, g2) = glued_pair(&mut r)?;
        let u = g1.union(&g2, 1e-9)?;
        let gap = ntc_total(&u) - ntc_total(&g1) - ntc_total(&g2);
        worst = worst.max(gap);
        if gap > 1e-9 {
            sub_bad += 1;
        }
    }
    out.push(holds(
        "subadditivity (100 glued pairs)",
        "0 violations",
        format!("{sub_bad} violations, max excess {worst:.3e}"),
        sub_bad == 0,
    ));
    Ok(out)
}

/// Two random graphs sharing one or two vertex positions.
fn glued_pair<R: Rng + ?Sized>(r: &mut R) -> Result<(SpatialGraph, SpatialGraph)> {
    let n1 = r.random_range(2..=5);
    let c1 = random_connected(r, n1, 2)?;
    let g1 = random_embedding(r, &c1, 0, 2)?;
    let n2 = r.random_range(2..=5);
    let c2 = random_connected(r, n2, 2)?;
    let g2 = random_embedding(r, &c2, 0, 2)?;
    let glue = r.random_range(1..=n1.min(n2).min(2));
    let mut vs: Vec<Vertex> = g2.vertices().to_vec();
    for (i, v) in vs.iter_mut().enumerate().take(glue) {
        v.pos = g1.vertex(i).pos;
    }
    Ok((g1, SpatialGraph::new("g2", vs, g2.edges().to_vec())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(run("butterfly").unwrap().id, 3);
        assert_eq!(run("3").unwrap().key, "butterfly");
        assert!(matches!(run("nope"), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn butterfly_passes() {
        assert!(run("butterfly").unwrap().pass());
    }

    #[test]
    fn render_marks_lines() {
        let e = run("degree4-strictness").unwrap();
        let text = render(&[e]);
        assert!(text.contains("PASS") || text.contains("FAIL"));
        assert!(text.ends_with("failed\n"));
    }
}
