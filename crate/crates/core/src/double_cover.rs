//! The doubled graph, where every edge is present twice, and its Euler circuits.
//!
//! Every vertex of the doubled graph has even degree.  A circuit is described by a
//! transition system: at each vertex the copy-ends are matched in pairs, and the
//! circuit enters along one member of a pair and leaves along the other.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, HalfInt};
use crate::graph::{CombinatorialGraph, EdgeEnd, End, SpatialGraph};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sheet {
    A,
    B,
}

/// One pass along one copy of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Traversal {
    pub edge: usize,
    pub sheet: Sheet,
    /// True if travelling from the edge's start vertex to its finish vertex.
    pub forward: bool,
}

/// A closed walk, possibly split into several closed components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub components: Vec<Vec<Traversal>>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True if no pass leaves along the edge-end it arrived on.
    pub fn is_nonreversing(&self) -> bool {
        self.components.iter().all(|c| {
            (0..c.len()).all(|i| {
                let (t, u) = (c[i], c[(i + 1) % c.len()]);
                !(t.edge == u.edge && t.forward != u.forward)
            })
        })
    }
}

/// One end of one copy of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CopyEnd {
    pub edge: usize,
    pub sheet: Sheet,
    pub end: End,
}

impl CopyEnd {
    fn index(self) -> usize {
        4 * self.edge + 2 * (self.sheet == Sheet::B) as usize + (self.end == End::Finish) as usize
    }

    fn from_index(i: usize) -> Self {
        CopyEnd {
            edge: i / 4,
            sheet: if i & 2 == 0 { Sheet::A } else { Sheet::B },
            end: if i & 1 == 0 { End::Start } else { End::Finish },
        }
    }

    /// Both copy-ends of the same edge-end.
    pub fn same_edge_end(self, o: CopyEnd) -> bool {
        self.edge == o.edge && self.end == o.end
    }
}

#[derive(Clone, Debug)]
pub struct DoubledGraph {
    base: CombinatorialGraph,
}

pub fn double(g: &CombinatorialGraph) -> DoubledGraph {
    DoubledGraph { base: g.clone() }
}

impl DoubledGraph {
    pub fn base(&self) -> &CombinatorialGraph {
        &self.base
    }

    pub fn copy_count(&self) -> usize {
        2 * self.base.edges().len()
    }

    pub fn degree(&self, v: usize) -> usize {
        2 * self.base.degree(v)
    }

    /// Copy-ends at vertex `v`, in a fixed order.
    pub fn copy_ends_at(&self, v: usize) -> Vec<CopyEnd> {
        let mut out = Vec::new();
        for (k, &(a, b)) in self.base.edges().iter().enumerate() {
            for (end, w) in [(End::Start, a), (End::Finish, b)] {
                if w == v {
                    for sheet in [Sheet::A, Sheet::B] {
                        out.push(CopyEnd { edge: k, sheet, end });
                    }
                }
            }
        }
        out
    }

    fn vertex_of(&self, c: CopyEnd) -> usize {
        let (a, b) = self.base.edges()[c.edge];
        match c.end {
            End::Start => a,
            End::Finish => b,
        }
    }
}

/// A perfect matching of the copy-ends at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    partner: Vec<usize>,
}

impl TransitionSystem {
    /// Build from explicit pairs; every copy-end must appear exactly once, and both
    /// members of a pair must sit at the same vertex.
    pub fn from_pairs(dg: &DoubledGraph, pairs: &[(CopyEnd, CopyEnd)]) -> Result<Self> {
        let n = 2 * dg.copy_count();
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a.edge >= dg.base.edges().len() || b.edge >= dg.base.edges().len() {
                return Err(Error::UnknownEdge(format!("#{}", a.edge.max(b.edge))));
            }
            if dg.vertex_of(a) != dg.vertex_of(b) {
                return Err(Error::BadParameter(format!("{a:?} and {b:?} are at different vertices")));
            }
            let (i, j) = (a.index(), b.index());
            if i == j || partner[i] != usize::MAX || partner[j] != usize::MAX {
                return Err(Error::BadParameter(format!("copy-end paired twice: {a:?} / {b:?}")));
            }
            partner[i] = j;
            partner[j] = i;
        }
        if let Some(i) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::BadParameter(format!("copy-end {:?} unpaired", CopyEnd::from_index(i))));
        }
        Ok(TransitionSystem { partner })
    }

    /// A random transition system; non-reversing ones never pair the two copies of
    /// one edge-end.
    pub fn random<R: Rng + ?Sized>(dg: &DoubledGraph, nonreversing: bool, rng: &mut R) -> Result<Self> {
        let mut pairs = Vec::new();
        for v in 0..dg.base.n_vertices() {
            let mut ends = dg.copy_ends_at(v);
            if ends.is_empty() {
                continue;
            }
            if nonreversing && ends.len() == 2 {
                return Err(Error::DegreeOneVertex(dg.base.vertex_names()[v].clone()));
            }
            ends.shuffle(rng);
            let mut local: Vec<(CopyEnd, CopyEnd)> = ends.chunks(2).map(|c| (c[0], c[1])).collect();
            if nonreversing {
                // Swapping partners with any other pair always yields two valid pairs,
                // since each edge-end has exactly two copies.
                for p in 0..local.len() {
                    if local[p].0.same_edge_end(local[p].1) {
                        let mut q = rng.random_range(0..local.len() - 1);
                        if q >= p {
                            q += 1;
                        }
                        let (a, b) = local[p];
                        let (c, d) = local[q];
                        local[p] = (a, c);
                        local[q] = (b, d);
                    }
                }
            }
            pairs.extend(local);
        }
        Self::from_pairs(dg, &pairs)
    }

    pub fn partner(&self, c: CopyEnd) -> CopyEnd {
        CopyEnd::from_index(self.partner[c.index()])
    }

    pub fn is_nonreversing(&self) -> bool {
        (0..self.partner.len()).all(|i| !CopyEnd::from_index(i).same_edge_end(CopyEnd::from_index(self.partner[i])))
    }

    /// Follow the transitions; returns the closed components.
    pub fn circuit(&self) -> Circuit {
        let copies = self.partner.len() / 2;
        let mut seen = vec![false; copies];
        let mut components = Vec::new();
        for c in 0..copies {
            if seen[c] {
                continue;
            }
            let start = 2 * c;
            let mut dep = start;
            let mut comp = Vec::new();
            loop {
                let ce = CopyEnd::from_index(dep);
                seen[dep / 2] = true;
                comp.push(Traversal { edge: ce.edge, sheet: ce.sheet, forward: ce.end == End::Start });
                dep = self.partner[dep ^ 1];
                if dep == start {
                    break;
                }
            }
            components.push(comp);
        }
        Circuit { components }
    }

    fn component_of_copies(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.partner.len() / 2];
        for (ci, c) in self.circuit().components.iter().enumerate() {
            for t in c {
                let ce = CopyEnd { edge: t.edge, sheet: t.sheet, end: End::Start };
                comp[ce.index() / 2] = ci;
            }
        }
        comp
    }

    /// Re-pair at shared vertices until the circuit is a single closed walk (or the
    /// base graph is disconnected).  Keeps the system non-reversing if it was.
    pub fn merge_components<R: Rng + ?Sized>(&mut self, dg: &DoubledGraph, rng: &mut R) {
        let nonreversing = self.is_nonreversing();
        loop {
            let comp = self.component_of_copies();
            let mut found = None;
            'search: for v in 0..dg.base.n_vertices() {
                let ends = dg.copy_ends_at(v);
                let reps: Vec<usize> = ends.iter().map(|c| c.index()).filter(|&i| i < self.partner[i]).collect();
                for (x, &a) in reps.iter().enumerate() {
                    for &c in &reps[x + 1..] {
                        if comp[a / 2] != comp[c / 2] {
                            found = Some((a, c));
                            break 'search;
                        }
                    }
                }
            }
            let Some((a, c)) = found else { return };
            let (b, d) = (self.partner[a], self.partner[c]);
            let ok = |x: usize, y: usize| !CopyEnd::from_index(x).same_edge_end(CopyEnd::from_index(y));
            let first = ok(a, c) && ok(b, d);
            let second = ok(a, d) && ok(b, c);
            let take_first = if nonreversing {
                match (first, second) {
                    (true, true) => rng.random_bool(0.5),
                    (f, _) => f,
                }
            } else {
                rng.random_bool(0.5)
            };
            let (p, q) = if take_first { ((a, c), (b, d)) } else { ((a, d), (b, c)) };
            for (x, y) in [p, q] {
                self.partner[x] = y;
                self.partner[y] = x;
            }
        }
    }
}

/// A random Euler circuit of the doubled graph, seeded.  With `nonreversing`, no
/// pass turns back along the edge it arrived on; that needs every degree >= 2.
pub fn euler_circuit(dg: &DoubledGraph, nonreversing: bool, seed: u64) -> Result<Circuit> {
    let mut rng = sampling::rng(seed, 0);
    let mut ts = TransitionSystem::random(dg, nonreversing, &mut rng)?;
    ts.merge_components(dg, &mut rng);
    Ok(ts.circuit())
}

/// Every perfect matching of `0..n` (n even), in lexicographic order.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = rest.remove(0);
        for i in 0..rest.len() {
            let b = rest.remove(i);
            cur.push((a, b));
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, b);
        }
        rest.insert(0, a);
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    }
    out
}

fn end_of(t: &Traversal, arriving: bool) -> EdgeEnd {
    let start = t.forward != arriving;
    EdgeEnd { edge: t.edge, end: if start { End::Start } else { End::Finish } }
}

/// Sign of the height change leaving the vertex along `ee`.
fn goes_up(g: &SpatialGraph, e: Direction, ee: EdgeEnd) -> Result<bool> {
    let p = g.vertex(g.end_vertex(ee)).pos;
    let q = g.end_neighbor(ee);
    let dh = e.height(q) - e.height(p);
    if dh.abs() <= crate::projection::ORTHO_TOL * p.dist(q) {
        return Err(Error::NonGeneric(format!("edge `{}` is orthogonal to the direction", g.edge(ee.edge).id)));
    }
    Ok(dh > 0.0)
}

/// nlm at vertex `v`, computed from how the circuit passes through it:
/// (local maxima - local minima) / 2.
pub fn nlm_from_circuit(g: &SpatialGraph, circuit: &Circuit, e: Direction, v: usize) -> Result<HalfInt> {
    let mut doubled = 0i64;
    for comp in &circuit.components {
        for i in 0..comp.len() {
            let arr = end_of(&comp[i], true);
            let dep = end_of(&comp[(i + 1) % comp.len()], false);
            if g.end_vertex(arr) != v {
                continue;
            }
            match (goes_up(g, e, arr)?, goes_up(g, e, dep)?) {
                (false, false) => doubled += 1,
                (true, true) => doubled -= 1,
                _ => {}
            }
        }
    }
    Ok(HalfInt::from_doubled(doubled))
}

/// Local maxima of the height along the circuit: passes through vertices that are
/// maxima, plus extremal joints of every traversed edge.
pub fn circuit_local_maxima(g: &SpatialGraph, circuit: &Circuit, e: Direction) -> Result<usize> {
    let mut count = 0;
    for comp in &circuit.components {
        for i in 0..comp.len() {
            let arr = end_of(&comp[i], true);
            let dep = end_of(&comp[(i + 1) % comp.len()], false);
            if !goes_up(g, e, arr)? && !goes_up(g, e, dep)? {
                count += 1;
            }
            let pts = g.polyline(comp[i].edge);
            count += pts
                .windows(3)
                .filter(|w| {
                    let h = [e.height(w[0]), e.height(w[1]), e.height(w[2])];
                    h[1] > h[0] && h[1] > h[2]
                })
                .count();
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> CombinatorialGraph {
        CombinatorialGraph::numbered("theta", 2, vec![(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    fn uses_every_copy_once(c: &Circuit, m: usize) -> bool {
        let mut seen = vec![0; 2 * m];
        for t in c.components.iter().flatten() {
            seen[2 * t.edge + (t.sheet == Sheet::B) as usize] += 1;
        }
        seen.iter().all(|&s| s == 1)
    }

    #[test]
    fn matchings_count() {
        assert_eq!(perfect_matchings(2).len(), 1);
        assert_eq!(perfect_matchings(6).len(), 15);
        assert_eq!(perfect_matchings(8).len(), 105);
    }

    #[test]
    fn circuits_are_closed_and_single() {
        let dg = double(&theta());
        for seed in 0..50 {
            let c = euler_circuit(&dg, true, seed).unwrap();
            assert_eq!(c.components.len(), 1, "seed {seed}");
            assert!(c.is_nonreversing());
            assert!(uses_every_copy_once(&c, 3));
        }
    }

    #[test]
    fn loops_and_multi_edges() {
        let g = CombinatorialGraph::numbered("fig8", 1, vec![(0, 0), (0, 0)]).unwrap();
        let dg = double(&g);
        for seed in 0..20 {
            let c = euler_circuit(&dg, true, seed).unwrap();
            assert_eq!(c.components.len(), 1);
            assert!(c.is_nonreversing());
            assert!(uses_every_copy_once(&c, 2));
        }
    }

    #[test]
    fn leaves_force_reversal() {
        let g = CombinatorialGraph::numbered("path", 3, vec![(0, 1), (1, 2)]).unwrap();
        let dg = double(&g);
        assert!(matches!(euler_circuit(&dg, true, 0), Err(Error::DegreeOneVertex(_))));
        let c = euler_circuit(&dg, false, 0).unwrap();
        assert_eq!(c.components.len(), 1);
        assert!(!c.is_nonreversing());
    }

    #[test]
    fn explicit_pairs_validated() {
        let dg = double(&theta());
        let ends = dg.copy_ends_at(0);
        assert!(TransitionSystem::from_pairs(&dg, &[(ends[0], ends[1])]).is_err());
    }
}
