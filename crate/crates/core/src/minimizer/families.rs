//! Named graph families, their standard embeddings, and known minimal values.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};
use crate::graph::{CombinatorialGraph, GraphBuilder, SpatialGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// K_m
    Complete { m: usize },
    /// K_{m,n}
    Bipartite { m: usize, n: usize },
    /// Two vertices joined by m edges.
    Theta { m: usize },
    /// A hub joined to every vertex of an m-cycle.
    Wheel { m: usize },
    /// Two m-cycles joined by m rungs.
    Ladder { m: usize },
    /// A cycle of 2m vertices where alternate neighbours are joined by three edges.
    Ring { m: usize },
    /// A cycle of 2m vertices with every edge doubled, drawn as r = 1 +- eps sin(m t).
    Sinewave { m: usize, eps: f64 },
    /// Six points in the plane with slanted edges at angle `alpha` to the verticals.
    Butterfly { alpha: f64 },
    /// A cut vertex joined to three vertices, each carrying a loop.
    TripleCircles,
    /// Three theta graphs sharing one vertex.
    TripleTheta,
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `name` or `name:p1,p2`, e.g. `bipartite:3,3` or `sinewave:3,0.05`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').map(str::trim).collect() };
        let int = |i: usize| -> Result<usize> {
            args.get(i)
                .ok_or_else(|| Error::BadParameter(format!("`{s}`: missing parameter {}", i + 1)))?
                .parse()
                .map_err(|_| Error::BadParameter(format!("`{s}`: parameter {} is not an integer", i + 1)))
        };
        let real = |i: usize, default: f64| -> Result<f64> {
            match args.get(i) {
                None => Ok(default),
                Some(a) => a.parse().map_err(|_| Error::BadParameter(format!("`{s}`: bad number `{a}`"))),
            }
        };
        let fam = match name {
            "complete" | "K" => Family::Complete { m: int(0)? },
            "bipartite" => Family::Bipartite { m: int(0)?, n: int(1)? },
            "theta" => Family::Theta { m: int(0)? },
            "wheel" => Family::Wheel { m: int(0)? },
            "ladder" => Family::Ladder { m: int(0)? },
            "ring" => Family::Ring { m: int(0)? },
            "sinewave" => Family::Sinewave { m: int(0)?, eps: real(1, 0.05)? },
            "butterfly" => Family::Butterfly { alpha: real(0, 0.5f64.atan())? },
            "triple_circles" => Family::TripleCircles,
            "triple_theta" => Family::TripleTheta,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        };
        fam.check()?;
        Ok(fam)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Complete { m } => write!(f, "complete:{m}"),
            Family::Bipartite { m, n } => write!(f, "bipartite:{m},{n}"),
            Family::Theta { m } => write!(f, "theta:{m}"),
            Family::Wheel { m } => write!(f, "wheel:{m}"),
            Family::Ladder { m } => write!(f, "ladder:{m}"),
            Family::Ring { m } => write!(f, "ring:{m}"),
            Family::Sinewave { m, eps } => write!(f, "sinewave:{m},{eps}"),
            Family::Butterfly { alpha } if alpha == 0.5f64.atan() => write!(f, "butterfly"),
            Family::Butterfly { alpha } => write!(f, "butterfly:{alpha}"),
            Family::TripleCircles => write!(f, "triple_circles"),
            Family::TripleTheta => write!(f, "triple_theta"),
        }
    }
}

fn bad(msg: String) -> Error {
    Error::BadParameter(msg)
}

fn polygon(m: usize, r: f64, z: f64, phase: f64) -> Vec<Point3> {
    (0..m)
        .map(|k| {
            let a = phase + 2.0 * PI * k as f64 / m as f64;
            Vec3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

/// Joints strictly inside the arc of the circle `centre + r (cos t, sin t)` from
/// `t0` to `t1`, `count` of them.
fn arc_joints(centre: Point3, r: f64, t0: f64, t1: f64, count: usize) -> Vec<Point3> {
    (1..=count)
        .map(|j| {
            let t = t0 + (t1 - t0) * j as f64 / (count + 1) as f64;
            centre + Vec3::new(r * t.cos(), r * t.sin(), 0.0)
        })
        .collect()
}

fn moment(t: f64) -> Point3 {
    Vec3::new(t, t * t, t * t * t)
}

impl Family {
    fn check(&self) -> Result<()> {
        match *self {
            Family::Complete { m } if !(2..=12).contains(&m) => Err(bad(format!("complete: m={m} not in 2..=12"))),
            Family::Bipartite { m, n } if m < 1 || n < 1 || m + n > 16 => {
                Err(bad(format!("bipartite: need m, n >= 1 and m + n <= 16, got {m},{n}")))
            }
            Family::Theta { m } if !(2..=32).contains(&m) => Err(bad(format!("theta: m={m} not in 2..=32"))),
            Family::Wheel { m } if !(3..=32).contains(&m) => Err(bad(format!("wheel: m={m} not in 3..=32"))),
            Family::Ladder { m } if !(3..=32).contains(&m) => Err(bad(format!("ladder: m={m} not in 3..=32"))),
            Family::Ring { m } if !(3..=32).contains(&m) => Err(bad(format!("ring: m={m} not in 3..=32"))),
            Family::Sinewave { m, eps } if !(3..=32).contains(&m) || !(eps > 0.0 && eps < 1.0) => {
                Err(bad(format!("sinewave: need m in 3..=32 and 0 < eps < 1, got {m},{eps}")))
            }
            Family::Butterfly { alpha } if !(alpha > 0.0 && alpha < PI / 2.0) => {
                Err(bad(format!("butterfly: alpha={alpha} not in (0, pi/2)")))
            }
            _ => Ok(()),
        }
    }

    /// The embedded graph; its combinatorial type equals [`Family::combinatorial`].
    pub fn embed(&self) -> Result<SpatialGraph> {
        self.check()?;
        let mut b = GraphBuilder::new(self.to_string());
        match *self {
            Family::Complete { m } => {
                let vs: Vec<usize> =
                    (0..m).map(|i| b.vertex(format!("v{i}"), moment(-1.0 + 2.0 * i as f64 / (m - 1) as f64))).collect();
                for i in 0..m {
                    for j in i + 1..m {
                        b.auto_edge(vs[i], vs[j], vec![]);
                    }
                }
            }
            Family::Bipartite { m, n } => {
                let total = (m + n - 1).max(1) as f64;
                let t = |i: usize| moment(-1.0 + 2.0 * i as f64 / total);
                let a: Vec<usize> = (0..m).map(|i| b.vertex(format!("a{i}"), t(i))).collect();
                let c: Vec<usize> = (0..n).map(|j| b.vertex(format!("b{j}"), t(m + j))).collect();
                for &x in &a {
                    for &y in &c {
                        b.auto_edge(x, y, vec![]);
                    }
                }
            }
            Family::Theta { m } => {
                let p = b.vertex("q+", Vec3::new(0.0, 1.0, 0.0));
                let q = b.vertex("q-", Vec3::new(0.0, -1.0, 0.0));
                for j in 0..m {
                    let x = -1.0 + 2.0 * j as f64 / (m - 1) as f64;
                    let joints = if x.abs() < 1e-12 { vec![] } else { vec![Vec3::new(x, 0.0, 0.0)] };
                    b.auto_edge(p, q, joints);
                }
            }
            Family::Wheel { m } => {
                let hub = b.vertex("hub", Vec3::ZERO);
                let rim: Vec<usize> = polygon(m, 1.0, 0.0, 0.1)
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| b.vertex(format!("r{i}"), p))
                    .collect();
                for i in 0..m {
                    b.auto_edge(rim[i], rim[(i + 1) % m], vec![]);
                }
                for &r in &rim {
                    b.auto_edge(hub, r, vec![]);
                }
            }
            Family::Ladder { m } => {
                let lo: Vec<usize> = polygon(m, 1.0, 0.0, 0.1)
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| b.vertex(format!("a{i}"), p))
                    .collect();
                let hi: Vec<usize> = polygon(m, 1.0, 1.0, 0.1)
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| b.vertex(format!("b{i}"), p))
                    .collect();
                for i in 0..m {
                    b.auto_edge(lo[i], lo[(i + 1) % m], vec![]);
                    b.auto_edge(hi[i], hi[(i + 1) % m], vec![]);
                    b.auto_edge(lo[i], hi[i], vec![]);
                }
            }
            Family::Ring { m } => {
                // Small circles of angular half-width beta centred on the unit circle.
                let beta = PI / (2 * m) as f64;
                let rho = 2.0 * (beta / 2.0).sin();
                let mut vs = Vec::new();
                for i in 0..m {
                    let phi = 2.0 * PI * i as f64 / m as f64;
                    for s in [-1.0, 1.0] {
                        let a = phi + s * beta;
                        vs.push(b.vertex(format!("v{}", vs.len() + 1), Vec3::new(a.cos(), a.sin(), 0.0)));
                    }
                }
                for i in 0..m {
                    let phi = 2.0 * PI * i as f64 / m as f64;
                    let c = Vec3::new(phi.cos(), phi.sin(), 0.0);
                    let (u, v) = (vs[2 * i], vs[2 * i + 1]);
                    // Angles on the small circle of its two crossing points.
                    let tu = (b.pos(u) - c).y.atan2((b.pos(u) - c).x);
                    let tv = (b.pos(v) - c).y.atan2((b.pos(v) - c).x);
                    let tv = if tv < tu { tv + 2.0 * PI } else { tv };
                    b.auto_edge(u, v, arc_joints(Vec3::ZERO, 1.0, phi - beta, phi + beta, 3));
                    b.auto_edge(u, v, arc_joints(c, rho, tu, tv, 5));
                    b.auto_edge(u, v, arc_joints(c, rho, tu, tv - 2.0 * PI, 5));
                    let next = vs[(2 * i + 2) % (2 * m)];
                    let end = phi + 2.0 * PI / m as f64 - beta;
                    b.auto_edge(v, next, arc_joints(Vec3::ZERO, 1.0, phi + beta, end, 5));
                }
            }
            Family::Sinewave { m, eps } => {
                let k = 2 * m;
                let vs: Vec<usize> = (0..k)
                    .map(|i| {
                        let t = PI * (i + 1) as f64 / m as f64;
                        b.vertex(format!("v{i}"), Vec3::new(t.cos(), t.sin(), 0.0))
                    })
                    .collect();
                for i in 0..k {
                    let (t0, t1) = (PI * (i + 1) as f64 / m as f64, PI * (i + 2) as f64 / m as f64);
                    for s in [1.0, -1.0] {
                        let joints = (1..8)
                            .map(|j| {
                                let t = t0 + (t1 - t0) * j as f64 / 8.0;
                                let r = 1.0 + s * eps * (m as f64 * t).sin();
                                Vec3::new(r * t.cos(), r * t.sin(), 0.0)
                            })
                            .collect();
                        b.auto_edge(vs[i], vs[(i + 1) % k], joints);
                    }
                }
            }
            Family::Butterfly { alpha } => {
                let h = 1.0 + 1.0 / alpha.tan();
                let q0p = b.vertex("q0+", Vec3::new(0.0, 1.0, 0.0));
                let q0m = b.vertex("q0-", Vec3::new(0.0, -1.0, 0.0));
                let q1p = b.vertex("q1+", Vec3::new(1.0, h, 0.0));
                let q1m = b.vertex("q1-", Vec3::new(1.0, -h, 0.0));
                let q2p = b.vertex("q2+", Vec3::new(-1.0, h, 0.0));
                let q2m = b.vertex("q2-", Vec3::new(-1.0, -h, 0.0));
                b.edge("L0", q0m, q0p, vec![]);
                b.edge("L1", q1m, q1p, vec![]);
                b.edge("L2", q2m, q2p, vec![]);
                b.edge("S1+", q0p, q1p, vec![]);
                b.edge("S2+", q0p, q2p, vec![]);
                b.edge("S1-", q0m, q1m, vec![]);
                b.edge("S2-", q0m, q2m, vec![]);
            }
            Family::TripleCircles => {
                let p0 = b.vertex("p0", Vec3::ZERO);
                for i in 0..3 {
                    let a = 2.0 * PI * i as f64 / 3.0;
                    let dir = Vec3::new(a.cos(), a.sin(), 0.0);
                    let p = b.vertex(format!("p{}", i + 1), dir * 2.0);
                    b.edge(format!("E{}", i + 1), p0, p, vec![]);
                    // Circle of radius 1 through p, centred further out; 8 sides.
                    let c = dir * 3.0;
                    let joints = arc_joints(c, 1.0, a + PI, a + 3.0 * PI, 7);
                    b.edge(format!("C{}", i + 1), p, p, joints);
                }
            }
            Family::TripleTheta => {
                let w = b.vertex("w", Vec3::ZERO);
                for i in 0..3 {
                    let a = 2.0 * PI * i as f64 / 3.0;
                    let dir = Vec3::new(a.cos(), a.sin(), 0.0);
                    let perp = Vec3::new(-a.sin(), a.cos(), 0.0);
                    let v = b.vertex(format!("v{}", i + 1), dir * 2.0);
                    b.auto_edge(w, v, vec![]);
                    b.auto_edge(w, v, vec![dir + perp * 0.5]);
                    b.auto_edge(w, v, vec![dir - perp * 0.5]);
                }
            }
        }
        b.build()
    }

    pub fn combinatorial(&self) -> Result<CombinatorialGraph> {
        self.check()?;
        let name = self.to_string();
        let numbered = |n: usize, e: Vec<(usize, usize)>| CombinatorialGraph::numbered(name.clone(), n, e);
        match *self {
            Family::Complete { m } => {
                let mut e = Vec::new();
                for i in 0..m {
                    for j in i + 1..m {
                        e.push((i, j));
                    }
                }
                numbered(m, e)
            }
            Family::Bipartite { m, n } => {
                let e = (0..m).flat_map(|i| (0..n).map(move |j| (i, m + j))).collect();
                numbered(m + n, e)
            }
            Family::Theta { m } => numbered(2, vec![(0, 1); m]),
            Family::Wheel { m } => {
                let mut e: Vec<(usize, usize)> = (0..m).map(|i| (1 + i, 1 + (i + 1) % m)).collect();
                e.extend((0..m).map(|i| (0, 1 + i)));
                numbered(m + 1, e)
            }
            Family::Ladder { m } => {
                let mut e = Vec::new();
                for i in 0..m {
                    e.push((i, (i + 1) % m));
                    e.push((m + i, m + (i + 1) % m));
                    e.push((i, m + i));
                }
                numbered(2 * m, e)
            }
            Family::Ring { m } => {
                let mut e = Vec::new();
                for i in 0..m {
                    e.extend([(2 * i, 2 * i + 1); 3]);
                    e.push((2 * i + 1, (2 * i + 2) % (2 * m)));
                }
                numbered(2 * m, e)
            }
            Family::Sinewave { m, .. } => {
                let k = 2 * m;
                numbered(k, (0..k).flat_map(|i| [(i, (i + 1) % k); 2]).collect())
            }
            // Same vertex and edge order as the embedding.
            Family::Butterfly { .. } | Family::TripleCircles | Family::TripleTheta => Ok(self.embed()?.combinatorial()),
        }
    }

    /// Known minimum of net total curvature over all embeddings, in units of pi.
    pub fn closed_form(&self) -> Option<(i64, &'static str)> {
        let v = match *self {
            Family::Complete { m } => {
                let l = (m / 2) as i64;
                if m % 2 == 0 {
                    (l * l, "l^2 for m = 2l; l(l+1) for m = 2l+1")
                } else {
                    (l * (l + 1), "l^2 for m = 2l; l(l+1) for m = 2l+1")
                }
            }
            Family::Bipartite { m, n } => ((m * n).div_ceil(2) as i64, "ceil(mn/2)"),
            Family::Theta { m } => (m as i64, "m"),
            Family::Wheel { m } => (2 + m.div_ceil(2) as i64, "2 + ceil(m/2)"),
            Family::Ladder { m } => (2 + m as i64, "2 + m"),
            Family::Ring { m } => (2 * (m as i64 + 1), "2(m+1)"),
            Family::Sinewave { .. } => (4, "4"),
            Family::TripleCircles => (5, "2B + k/2 with B = 3/2, k = 4"),
            Family::TripleTheta => (6, "6"),
            Family::Butterfly { .. } => return None,
        };
        Some(v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub family: String,
    pub formula: &'static str,
    pub ntc_over_pi: i64,
    pub ntc: String,
    pub vertices: usize,
    pub edges: usize,
}

/// The closed-form table over a standard range of parameters.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut fams = Vec::new();
    fams.extend((3..=8).map(|m| Family::Complete { m }));
    for (m, n) in [(2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 4), (5, 5)] {
        fams.push(Family::Bipartite { m, n });
    }
    fams.extend((2..=8).map(|m| Family::Theta { m }));
    fams.extend((3..=8).map(|m| Family::Wheel { m }));
    fams.extend((3..=6).map(|m| Family::Ladder { m }));
    fams.extend((3..=5).map(|m| Family::Ring { m }));
    fams.extend((3..=5).map(|m| Family::Sinewave { m, eps: 0.05 }));
    fams.push(Family::TripleCircles);
    fams.push(Family::TripleTheta);
    fams.into_iter()
        .filter_map(|f| {
            let (k, formula) = f.closed_form()?;
            let g = f.combinatorial().ok()?;
            Some(CatalogEntry {
                family: f.to_string(),
                formula,
                ntc_over_pi: k,
                ntc: crate::geom::pi_multiple(k),
                vertices: g.n_vertices(),
                edges: g.edges().len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<Family> {
        vec![
            Family::Complete { m: 5 },
            Family::Bipartite { m: 3, n: 2 },
            Family::Theta { m: 4 },
            Family::Theta { m: 3 },
            Family::Wheel { m: 5 },
            Family::Ladder { m: 4 },
            Family::Ring { m: 3 },
            Family::Sinewave { m: 3, eps: 0.05 },
            Family::Butterfly { alpha: 0.5f64.atan() },
            Family::TripleCircles,
            Family::TripleTheta,
        ]
    }

    #[test]
    fn embedding_matches_combinatorics() {
        for f in all() {
            let g = f.embed().unwrap();
            assert_eq!(g.combinatorial().edges(), f.combinatorial().unwrap().edges(), "{f}");
        }
    }

    #[test]
    fn parse_roundtrip() {
        for f in all() {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("bipartite:3".parse::<Family>().is_err());
        assert!("wheel:2".parse::<Family>().is_err());
        assert!("moebius:3".parse::<Family>().is_err());
        assert!("butterfly:2.0".parse::<Family>().is_err());
    }

    #[test]
    fn degrees() {
        let w = Family::Wheel { m: 4 }.combinatorial().unwrap();
        let mut d = w.degrees();
        d.sort();
        assert_eq!(d, vec![3, 3, 3, 3, 4]);
        let r = Family::Ring { m: 3 }.combinatorial().unwrap();
        assert_eq!(r.n_vertices(), 6);
        assert!(r.degrees().iter().all(|&d| d == 4));
        assert_eq!(r.edges().iter().filter(|&&e| e == (0, 1)).count(), 3);
    }

    #[test]
    fn catalog_values() {
        let c = catalog();
        let get = |s: &str| c.iter().find(|e| e.family == s).unwrap().ntc_over_pi;
        assert_eq!(get("complete:6"), 9);
        assert_eq!(get("complete:7"), 12);
        assert_eq!(get("bipartite:3,3"), 5);
        assert_eq!(get("wheel:6"), 5);
        assert_eq!(get("ring:3"), 8);
    }
}
