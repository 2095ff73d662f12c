//! Independent check of the exhaustive minimizer on small graphs.
//!
//! The oracle enumerates height configurations more generally than the minimizer:
//! vertex heights form a weak order (ties allowed), and every edge independently
//! takes one of several shapes, including shapes with extra interior extrema.

use curvegraph::minimizer::{flat_min, Family};
use curvegraph::random::random_connected;
use curvegraph::sampling::rng;
use curvegraph::CombinatorialGraph;

#[derive(Clone, Copy, Debug)]
enum Shape {
    /// Strictly monotone; needs distinct end heights.
    Monotone,
    /// One interior maximum.
    Peak,
    /// One interior minimum.
    Valley,
    /// An interior maximum followed by an interior minimum.
    Zigzag,
}

const SHAPES: [Shape; 4] = [Shape::Monotone, Shape::Peak, Shape::Valley, Shape::Zigzag];

/// Every weak order of `n` items, as a level per item.
fn weak_orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            // Keep only surjections onto 0..k so every order appears once.
            let k = cur.iter().max().map_or(0, |m| m + 1);
            if (0..k).all(|l| cur.contains(&l)) {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..n {
            cur.push(l);
            rec(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// (2 mu, local extrema) of one configuration, or None if infeasible.
fn evaluate(g: &CombinatorialGraph, level: &[usize], shapes: &[Shape]) -> Option<(i64, usize)> {
    let n = g.n_vertices();
    let (mut up, mut down) = (vec![0i64; n], vec![0i64; n]);
    let (mut mu2, mut interior) = (0i64, 0usize);
    for (&(a, b), &s) in g.edges().iter().zip(shapes) {
        match s {
            Shape::Monotone => {
                if a == b || level[a] == level[b] {
                    return None;
                }
                let (lo, hi) = if level[a] < level[b] { (a, b) } else { (b, a) };
                up[lo] += 1;
                down[hi] += 1;
            }
            Shape::Peak => {
                up[a] += 1;
                up[b] += 1;
                mu2 += 2;
                interior += 1;
            }
            Shape::Valley => {
                down[a] += 1;
                down[b] += 1;
                interior += 1;
            }
            Shape::Zigzag => {
                // Leaves a upward and arrives at b from below.
                up[a] += 1;
                down[b] += 1;
                mu2 += 2;
                interior += 2;
            }
        }
    }
    for v in 0..n {
        mu2 += (down[v] - up[v]).max(0);
    }
    let vertex_extrema = (0..n).filter(|&v| up[v] == 0 || down[v] == 0).count();
    Some((mu2, vertex_extrema + interior))
}

/// (min 2 mu, min extrema) over all configurations.
fn oracle(g: &CombinatorialGraph) -> (i64, usize) {
    let m = g.edges().len();
    let orders = weak_orders(g.n_vertices());
    let mut best = (i64::MAX, usize::MAX);
    let mut shapes = vec![Shape::Monotone; m];
    let total = SHAPES.len().pow(m as u32);
    for code in 0..total {
        let mut c = code;
        for s in shapes.iter_mut() {
            *s = SHAPES[c % SHAPES.len()];
            c /= SHAPES.len();
        }
        for level in &orders {
            if let Some((mu2, ext)) = evaluate(g, level, &shapes) {
                best.0 = best.0.min(mu2);
                best.1 = best.1.min(ext);
            }
        }
    }
    best
}

fn compare(g: &CombinatorialGraph) {
    let r = flat_min(g).unwrap();
    let (mu2, ext) = oracle(g);
    assert_eq!(r.mu_star.doubled(), mu2, "mu* of {:?}", g.edges());
    assert_eq!(r.bridge.doubled(), ext as i64, "extrema of {:?}", g.edges());
}

#[test]
fn weak_order_counts() {
    // Ordered Bell numbers.
    let counts: Vec<usize> = (1..=5).map(|n| weak_orders(n).len()).collect();
    assert_eq!(counts, vec![1, 3, 13, 75, 541]);
}

#[test]
fn named_families() {
    for f in ["theta:3", "theta:4", "complete:4", "triple_circles", "bipartite:2,2"] {
        compare(&f.parse::<Family>().unwrap().combinatorial().unwrap());
    }
}

#[test]
fn loops_and_figure_eight() {
    let fig8 = CombinatorialGraph::numbered("fig8", 1, vec![(0, 0), (0, 0)]).unwrap();
    compare(&fig8);
    let lollipop = CombinatorialGraph::numbered("lollipop", 2, vec![(0, 1), (1, 1)]).unwrap();
    compare(&lollipop);
    let path = CombinatorialGraph::numbered("path", 3, vec![(0, 1), (1, 2)]).unwrap();
    compare(&path);
}

#[test]
fn random_small_graphs() {
    let mut r = rng(2024, 0);
    for i in 0..30 {
        let n = 2 + i % 5;
        let extra = (i % 3).min(7 - (n - 1));
        let mut edges = random_connected(&mut r, n, extra).unwrap().edges().to_vec();
        if i % 4 == 0 {
            edges.push((0, 0));
        }
        if edges.len() > 7 {
            edges.truncate(7);
        }
        match CombinatorialGraph::numbered("random", n, edges) {
            Ok(g) => compare(&g),
            Err(e) => panic!("{e}"),
        }
    }
}
