//! Net total curvature recovered as 2*pi times the average of mu over directions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Direction, HalfInt};
use crate::graph::SpatialGraph;
use crate::projection::Projector;
use crate::sampling::{self, Rotation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Independent uniform directions.
    Mc,
    /// A randomly rotated Fibonacci lattice.
    Fibonacci,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Scheme::Mc),
            "fibonacci" => Ok(Scheme::Fibonacci),
            _ => Err(Error::BadParameter(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureResult {
    pub scheme: Scheme,
    pub estimate: f64,
    /// Standard error of the mean, scaled by 2*pi.  For the lattice this is the
    /// i.i.d. formula and overstates the true error.
    pub stderr: f64,
    pub samples: usize,
    /// Directions that stayed non-generic after perturbation.
    pub rejected: usize,
    /// Directions that needed perturbation.
    pub perturbed: usize,
}

/// Rejection rate above which the estimate is refused.
pub const MAX_REJECT_RATE: f64 = 1e-3;

#[derive(Default, Clone, Copy)]
struct Acc {
    n: usize,
    sum: i64,
    sum_sq: i64,
    rejected: usize,
    perturbed: usize,
}

impl Acc {
    fn add(&mut self, r: Option<(i64, u64)>) {
        match r {
            Some((m, k)) => {
                self.n += 1;
                self.sum += m;
                self.sum_sq += m * m;
                self.perturbed += (k > 0) as usize;
            }
            None => self.rejected += 1,
        }
    }

    fn merge(a: Acc, b: Acc) -> Acc {
        Acc {
            n: a.n + b.n,
            sum: a.sum + b.sum,
            sum_sq: a.sum_sq + b.sum_sq,
            rejected: a.rejected + b.rejected,
            perturbed: a.perturbed + b.perturbed,
        }
    }
}

/// Estimate the net total curvature of `g` from `n` directions.
pub fn crofton_ntc(g: &SpatialGraph, scheme: Scheme, n: usize, seed: u64) -> Result<QuadratureResult> {
    if n < 10 {
        return Err(Error::BadParameter(format!("need at least 10 directions, got {n}")));
    }
    let proj = Projector::new(g);
    let blocks = sampling::blocks(n);
    let rot = Rotation::random(&mut sampling::rng(seed, 0));
    let golden = PI * (3.0 - 5f64.sqrt());
    // Integer sums make the reduction exact, so the result is independent of threading.
    let acc = blocks
        .par_iter()
        .map(|&(b, len)| {
            let mut acc = Acc::default();
            match scheme {
                Scheme::Mc => {
                    for v in sampling::uniform_block(seed, b, len) {
                        acc.add(Direction::new(v).ok().and_then(|e| proj.mu_doubled_resolved(e)));
                    }
                }
                Scheme::Fibonacci => {
                    let start = b as usize * sampling::BLOCK;
                    for i in start..start + len {
                        let v = rot.apply(sampling::fibonacci_point(i, n, golden));
                        acc.add(Direction::new(v).ok().and_then(|e| proj.mu_doubled_resolved(e)));
                    }
                }
            }
            acc
        })
        .reduce(Acc::default, Acc::merge);
    if acc.rejected as f64 > MAX_REJECT_RATE * n as f64 || acc.n < 2 {
        return Err(Error::ExcessiveRejections { rejected: acc.rejected, samples: n });
    }
    let m = acc.n as f64;
    // mu = doubled / 2, estimate = 2 pi mean(mu) = pi mean(doubled).
    let mean = acc.sum as f64 / m;
    let var = ((acc.sum_sq as f64 - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(QuadratureResult {
        scheme,
        estimate: PI * mean,
        stderr: PI * (var / m).sqrt(),
        samples: n,
        rejected: acc.rejected,
        perturbed: acc.perturbed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatCell {
    pub lon: f64,
    pub lat: f64,
    pub mu: Option<HalfInt>,
    pub generic: bool,
}

/// mu on an equirectangular grid with `resolution` rows and `2 * resolution`
/// columns, sampled at cell centres.  Non-generic centres are perturbed for the
/// value but flagged.
pub fn mu_heatmap(g: &SpatialGraph, resolution: usize) -> Result<Vec<HeatCell>> {
    if resolution < 8 {
        return Err(Error::BadParameter(format!("resolution must be at least 8, got {resolution}")));
    }
    let proj = Projector::new(g);
    let rows: Vec<Vec<HeatCell>> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let lat = -PI / 2.0 + PI * (i as f64 + 0.5) / resolution as f64;
            (0..2 * resolution)
                .map(|j| {
                    let lon = -PI + PI * (j as f64 + 0.5) / resolution as f64;
                    let e = Direction::from_lon_lat(lon, lat);
                    let r = proj.mu_doubled_resolved(e);
                    HeatCell {
                        lon,
                        lat,
                        mu: r.map(|(m, _)| HalfInt::from_doubled(m)),
                        generic: matches!(r, Some((_, 0))),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// CSV with header `lon,lat,mu_doubled,generic`; unresolved cells leave mu empty.
pub fn heatmap_csv(cells: &[HeatCell]) -> String {
    let mut s = String::from("lon,lat,mu_doubled,generic\n");
    for c in cells {
        let m = c.mu.map(|m| m.doubled().to_string()).unwrap_or_default();
        s.push_str(&format!("{:.6},{:.6},{},{}\n", c.lon, c.lat, m, c.generic));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inscribe::circle_polygon;

    #[test]
    fn convex_polygon_has_constant_mu() {
        let g = circle_polygon(1.0, 6).unwrap();
        for scheme in [Scheme::Mc, Scheme::Fibonacci] {
            let r = crofton_ntc(&g, scheme, 20_000, 1).unwrap();
            assert!((r.estimate - 2.0 * PI).abs() < 1e-12, "{scheme:?}");
            assert!(r.stderr < 1e-12);
        }
    }

    #[test]
    fn rejects_small_n() {
        let g = circle_polygon(1.0, 6).unwrap();
        assert!(crofton_ntc(&g, Scheme::Mc, 5, 0).is_err());
    }

    #[test]
    fn reproducible() {
        let g =
            circle_polygon(1.0, 5).unwrap().map_points(|p| p + crate::geom::Vec3::new(0.0, 0.0, p.x * p.y)).unwrap();
        let a = crofton_ntc(&g, Scheme::Mc, 10_000, 9).unwrap();
        let b = crofton_ntc(&g, Scheme::Mc, 10_000, 9).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn heatmap_shape() {
        let g = circle_polygon(1.0, 4).unwrap();
        let cells = mu_heatmap(&g, 8).unwrap();
        assert_eq!(cells.len(), 128);
        let csv = heatmap_csv(&cells);
        assert!(csv.starts_with("lon,lat,mu_doubled,generic\n"));
        assert_eq!(csv.lines().count(), 129);
        assert!(mu_heatmap(&g, 4).is_err());
    }
}
