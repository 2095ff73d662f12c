//! Exhaustive search over mappings of a graph to the line.
//!
//! A mapping is described by a strict ordering of the vertices (heights are ranks)
//! with every non-loop edge monotone, plus an up/down choice for each loop, which
//! then carries one interior maximum or minimum.

mod checks;
mod families;

pub use checks::{one_point_union_check, trivalent_formula_check, Hypothesis, TrivalentCheck, UnionCheck};
pub use families::{catalog, CatalogEntry, Family};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{pi_multiple, HalfInt};
use crate::graph::CombinatorialGraph;

/// Largest vertex count searched exhaustively.
pub const FLAT_BUDGET: usize = 10;
/// At most this many minimizing assignments are kept.
pub const MAX_ARGMIN: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HeightAssignment {
    /// Vertex indices from lowest to highest.
    pub order: Vec<usize>,
    /// For each loop edge, in edge order: true if the loop rises from its vertex.
    pub loop_up: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentValue {
    pub mu: HalfInt,
    /// Local extrema: source and sink vertices plus one per loop.
    pub extrema: usize,
    /// Largest number of edge crossings over levels between critical heights.
    pub width: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatResult {
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub mu_star: HalfInt,
    /// 2*pi*mu_star as a multiple of pi.
    pub ntc_star: String,
    pub ntc_star_radians: f64,
    /// Half the least number of local extrema.
    pub bridge: HalfInt,
    pub width_star: u32,
    /// Lexicographically first minimizers of mu.
    pub argmin: Vec<HeightAssignment>,
    /// Total number of minimizers of mu.
    pub argmin_count: u64,
}

/// Precomputed edge lists for fast evaluation.
struct Evaluator {
    n: usize,
    edges: Vec<(usize, usize)>,
    loops: Vec<usize>,
}

impl Evaluator {
    fn new(g: &CombinatorialGraph) -> Self {
        let mut edges = Vec::new();
        let mut loops = Vec::new();
        for &(a, b) in g.edges() {
            if a == b {
                loops.push(a);
            } else {
                edges.push((a, b));
            }
        }
        Evaluator { n: g.n_vertices(), edges, loops }
    }

    /// Returns (2 * mu, extrema, width) for `rank[v]` heights and loop mask bits.
    fn eval(&self, rank: &[usize], mask: u64, up: &mut [i32], down: &mut [i32]) -> (i64, usize, u32) {
        let n = self.n;
        up.fill(0);
        down.fill(0);
        let mut ups_at = [0u32; FLAT_BUDGET];
        let mut downs_at = [0u32; FLAT_BUDGET];
        // Crossing count changes by +1 at the lower rank and -1 at the upper.
        let mut delta = [0i32; FLAT_BUDGET + 1];
        for &(a, b) in &self.edges {
            let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
            up[lo] += 1;
            down[hi] += 1;
            delta[rank[lo]] += 1;
            delta[rank[hi]] -= 1;
        }
        let mut mu2 = 0i64;
        for (i, &v) in self.loops.iter().enumerate() {
            if mask >> i & 1 == 1 {
                up[v] += 2;
                mu2 += 2;
                ups_at[rank[v]] += 1;
            } else {
                down[v] += 2;
                downs_at[rank[v]] += 1;
            }
        }
        let mut extrema = self.loops.len();
        for v in 0..n {
            mu2 += (down[v] - up[v]).max(0) as i64;
            if up[v] == 0 || down[v] == 0 {
                extrema += 1;
            }
        }
        // Between ranks r and r+1 the base crossing count is constant; loop extrema
        // sit just above their vertex (up) or just below it (down).
        let mut width = 2 * downs_at[0].max(ups_at[n - 1]);
        let mut base = 0i32;
        for r in 0..n - 1 {
            base += delta[r];
            let w = base as u32 + 2 * ups_at[r].max(downs_at[r + 1]);
            width = width.max(w);
        }
        (mu2, extrema, width)
    }
}

fn validate(g: &CombinatorialGraph, a: &HeightAssignment) -> Result<Vec<usize>> {
    let n = g.n_vertices();
    if a.order.len() != n {
        return Err(Error::InvalidAssignment(format!("order has {} entries for {n} vertices", a.order.len())));
    }
    let mut rank = vec![usize::MAX; n];
    for (r, &v) in a.order.iter().enumerate() {
        if v >= n || rank[v] != usize::MAX {
            return Err(Error::InvalidAssignment(format!("order is not a permutation (at {v})")));
        }
        rank[v] = r;
    }
    if a.loop_up.len() != g.loop_count() {
        return Err(Error::InvalidAssignment(format!("{} loop choices for {} loops", a.loop_up.len(), g.loop_count())));
    }
    Ok(rank)
}

/// mu, extrema and width of one mapping.
pub fn mu_of_assignment(g: &CombinatorialGraph, a: &HeightAssignment) -> Result<AssignmentValue> {
    if g.n_vertices() > FLAT_BUDGET {
        return Err(Error::BudgetExceeded { vertices: g.n_vertices(), budget: FLAT_BUDGET });
    }
    let rank = validate(g, a)?;
    if g.n_vertices() == 0 {
        return Ok(AssignmentValue { mu: HalfInt::ZERO, extrema: 0, width: 0 });
    }
    let ev = Evaluator::new(g);
    let mask = a.loop_up.iter().enumerate().fold(0u64, |m, (i, &u)| m | ((u as u64) << i));
    let (mut up, mut down) = (vec![0; g.n_vertices()], vec![0; g.n_vertices()]);
    let (mu2, extrema, width) = ev.eval(&rank, mask, &mut up, &mut down);
    Ok(AssignmentValue { mu: HalfInt::from_doubled(mu2), extrema, width })
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[derive(Clone)]
struct BlockBest {
    mu2: i64,
    argmin: Vec<HeightAssignment>,
    count: u64,
    extrema: usize,
    width: u32,
}

impl BlockBest {
    fn empty() -> Self {
        BlockBest { mu2: i64::MAX, argmin: Vec::new(), count: 0, extrema: usize::MAX, width: u32::MAX }
    }

    /// Combine with a block that comes later in lexicographic order.
    fn then(mut self, o: BlockBest) -> BlockBest {
        if o.mu2 < self.mu2 {
            self.mu2 = o.mu2;
            self.argmin = o.argmin;
            self.count = o.count;
        } else if o.mu2 == self.mu2 {
            self.count += o.count;
            let room = MAX_ARGMIN - self.argmin.len();
            self.argmin.extend(o.argmin.into_iter().take(room));
        }
        self.extrema = self.extrema.min(o.extrema);
        self.width = self.width.min(o.width);
        self
    }
}

fn search_block(ev: &Evaluator, first: usize) -> BlockBest {
    let n = ev.n;
    let mut order: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&v| v != first)).collect();
    let mut rank = vec![0usize; n];
    let (mut up, mut down) = (vec![0; n], vec![0; n]);
    let masks = 1u64 << ev.loops.len();
    let mut best = BlockBest::empty();
    loop {
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        for mask in 0..masks {
            let (mu2, extrema, width) = ev.eval(&rank, mask, &mut up, &mut down);
            if mu2 < best.mu2 {
                best.mu2 = mu2;
                best.argmin.clear();
                best.count = 0;
            }
            if mu2 == best.mu2 {
                best.count += 1;
                if best.argmin.len() < MAX_ARGMIN {
                    let loop_up = (0..ev.loops.len()).map(|i| mask >> i & 1 == 1).collect();
                    best.argmin.push(HeightAssignment { order: order.clone(), loop_up });
                }
            }
            best.extrema = best.extrema.min(extrema);
            best.width = best.width.min(width);
        }
        if !next_permutation(&mut order[1..]) {
            break;
        }
    }
    best
}

/// Exhaustive minimum of mu, and separately of extrema and width.
pub fn flat_min(g: &CombinatorialGraph) -> Result<FlatResult> {
    let n = g.n_vertices();
    if n > FLAT_BUDGET {
        return Err(Error::BudgetExceeded { vertices: n, budget: FLAT_BUDGET });
    }
    if g.loop_count() > 16 {
        return Err(Error::BadParameter(format!("{} loops exceed the search budget", g.loop_count())));
    }
    let ev = Evaluator::new(g);
    let best = if n == 0 {
        BlockBest { mu2: 0, argmin: vec![], count: 1, extrema: 0, width: 0 }
    } else {
        let blocks: Vec<BlockBest> = (0..n).into_par_iter().map(|f| search_block(&ev, f)).collect();
        blocks.into_iter().fold(BlockBest::empty(), BlockBest::then)
    };
    let mu_star = HalfInt::from_doubled(best.mu2);
    Ok(FlatResult {
        graph: g.name().to_string(),
        vertices: n,
        edges: g.edges().len(),
        mu_star,
        ntc_star: pi_multiple(best.mu2),
        ntc_star_radians: std::f64::consts::PI * best.mu2 as f64,
        bridge: HalfInt::from_doubled(best.extrema as i64),
        width_star: best.width,
        argmin: best.argmin,
        argmin_count: best.count,
    })
}

/// Half the least number of local extrema over all mappings.
pub fn bridge_number(g: &CombinatorialGraph) -> Result<HalfInt> {
    Ok(flat_min(g)?.bridge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(m: usize) -> CombinatorialGraph {
        CombinatorialGraph::numbered("theta", 2, vec![(0, 1); m]).unwrap()
    }

    fn complete(m: usize) -> CombinatorialGraph {
        let mut e = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                e.push((i, j));
            }
        }
        CombinatorialGraph::numbered("K", m, e).unwrap()
    }

    #[test]
    fn theta_assignment() {
        let v = mu_of_assignment(&theta(3), &HeightAssignment { order: vec![1, 0], loop_up: vec![] }).unwrap();
        assert_eq!(v.mu, HalfInt::from_doubled(3));
        assert_eq!(v.extrema, 2);
        assert_eq!(v.width, 3);
    }

    #[test]
    fn k4_sorted_order() {
        let v = mu_of_assignment(&complete(4), &HeightAssignment { order: vec![0, 1, 2, 3], loop_up: vec![] }).unwrap();
        assert_eq!(v.mu, HalfInt::from_int(2));
        assert_eq!(v.width, 4);
    }

    #[test]
    fn triple_circle_assignment() {
        // p0 = 0, p1..p3 carry loops.
        let g = CombinatorialGraph::numbered("tc", 4, vec![(0, 1), (0, 2), (0, 3), (1, 1), (2, 2), (3, 3)]).unwrap();
        let a = HeightAssignment { order: vec![1, 0, 2, 3], loop_up: vec![false, true, true] };
        assert_eq!(mu_of_assignment(&g, &a).unwrap().mu, HalfInt::from_doubled(5));
    }

    #[test]
    fn invalid_assignments() {
        let g = theta(3);
        assert!(mu_of_assignment(&g, &HeightAssignment { order: vec![0, 0], loop_up: vec![] }).is_err());
        assert!(mu_of_assignment(&g, &HeightAssignment { order: vec![0], loop_up: vec![] }).is_err());
        assert!(mu_of_assignment(&g, &HeightAssignment { order: vec![0, 1], loop_up: vec![true] }).is_err());
    }

    #[test]
    fn small_minima() {
        let r = flat_min(&complete(4)).unwrap();
        assert_eq!(r.ntc_star, "4*pi");
        assert_eq!(r.width_star, 4);
        assert_eq!(r.bridge, HalfInt::from_int(1));
        let r = flat_min(&theta(5)).unwrap();
        assert_eq!(r.mu_star, HalfInt::from_doubled(5));
        // Both orders of the two vertices tie.
        assert_eq!(r.argmin_count, 2);
        assert_eq!(r.argmin[0].order, vec![0, 1]);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(flat_min(&complete(11)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut a = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut a) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(a, vec![3, 2, 1, 0]);
    }
}
