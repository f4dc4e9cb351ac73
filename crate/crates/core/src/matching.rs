//! Bottleneck distance between persistence diagrams.
//!
//! The point cost is
//! `min{ max{|x-x'|, |y-y'|}, max{|x-y|/2, |x'-y'|/2} }`
//! with the extended-real conventions `inf - y = inf`, `y - inf = -inf`,
//! `inf - inf = 0`, `inf / 2 = inf`, `|±inf| = inf`. Under these rules an
//! essential point can only be matched to another essential point, at cost
//! `|x - x'|`, and a finite point is matched to the diagonal at cost
//! `(y - x) / 2`.
//!
//! [`bottleneck`] is exact: the optimum is one of finitely many pairwise
//! costs, so it binary-searches that sorted list and tests each radius with
//! a maximum bipartite matching on the diagonal-augmented point sets.
//! [`bottleneck_brute`] enumerates every matching and is used as an oracle.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::persistence::Diagram;

/// Difference with the extended-real conventions above.
fn ext_sub(a: f64, b: f64) -> f64 {
    match (a == f64::INFINITY, b == f64::INFINITY) {
        (true, true) => 0.0,
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => a - b,
    }
}

/// Point cost between `(x, y)` and `(x2, y2)`; `y`, `y2` may be `+inf`.
pub fn point_delta(p: (f64, f64), q: (f64, f64)) -> Result<f64> {
    for &(x, y) in &[p, q] {
        if x.is_nan() || y.is_nan() || x == f64::INFINITY || x > y {
            return Err(Error::MalformedPoint { birth: x, death: y });
        }
    }
    Ok(delta_unchecked(p, q))
}

#[inline]
fn delta_unchecked((x, y): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    let shift = ext_sub(x, x2).abs().max(ext_sub(y, y2).abs());
    let to_diagonal = (ext_sub(x, y).abs() / 2.0).max(ext_sub(x2, y2).abs() / 2.0);
    shift.min(to_diagonal)
}

/// How one point was matched in an optimal bijection. Indices refer to
/// `Diagram::finite()` / `Diagram::essential()` of the two inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Finite { left: usize, right: usize },
    LeftToDiagonal(usize),
    RightToDiagonal(usize),
    Essential { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub distance: f64,
    /// An optimal matching; `None` when the distance is infinite.
    pub witness: Option<Vec<Assignment>>,
}

impl MatchResult {
    /// Cost of every pair in the witness, in witness order.
    pub fn witness_costs(&self, a: &Diagram, b: &Diagram) -> Option<Vec<f64>> {
        let w = self.witness.as_ref()?;
        Some(w.iter().map(|m| assignment_cost(a, b, *m)).collect())
    }
}

fn assignment_cost(a: &Diagram, b: &Diagram, m: Assignment) -> f64 {
    let fin = |d: &Diagram, i: usize| (d.finite()[i].birth, d.finite()[i].death);
    match m {
        Assignment::Finite { left, right } => delta_unchecked(fin(a, left), fin(b, right)),
        Assignment::LeftToDiagonal(i) => a.finite()[i].persistence() / 2.0,
        Assignment::RightToDiagonal(j) => b.finite()[j].persistence() / 2.0,
        Assignment::Essential { left, right } => {
            delta_unchecked((a.essential()[left], f64::INFINITY), (b.essential()[right], f64::INFINITY))
        }
    }
}

/// Exact bottleneck distance with an optimal matching.
pub fn bottleneck(a: &Diagram, b: &Diagram) -> MatchResult {
    if a.essential().len() != b.essential().len() {
        return MatchResult { distance: f64::INFINITY, witness: None };
    }
    let mut witness = Vec::new();
    let essential = match_essential(a.essential(), b.essential(), &mut witness);
    let finite = match_finite(a, b, &mut witness);
    MatchResult { distance: essential.max(finite), witness: Some(witness) }
}

/// Sorted order is optimal for points on a line.
fn match_essential(a: &[f64], b: &[f64], out: &mut Vec<Assignment>) -> f64 {
    let sorted = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        idx
    };
    let (ia, ib) = (sorted(a), sorted(b));
    let mut worst: f64 = 0.0;
    for (&i, &j) in ia.iter().zip(&ib) {
        worst = worst.max(delta_unchecked((a[i], f64::INFINITY), (b[j], f64::INFINITY)));
        out.push(Assignment::Essential { left: i, right: j });
    }
    worst
}

/// Augmented bipartite graph: left side is `A` followed by one diagonal copy
/// per point of `B`; right side is `B` followed by one diagonal copy per
/// point of `A`.
struct Augmented<'a> {
    a: &'a Diagram,
    b: &'a Diagram,
}

impl Augmented<'_> {
    fn n(&self) -> usize {
        self.a.finite().len()
    }

    fn m(&self) -> usize {
        self.b.finite().len()
    }

    fn size(&self) -> usize {
        self.n() + self.m()
    }

    /// Cost of edge `(l, r)`, `None` when the edge does not exist.
    fn cost(&self, l: usize, r: usize) -> Option<f64> {
        let (n, m) = (self.n(), self.m());
        match (l < n, r < m) {
            (true, true) => {
                let (p, q) = (self.a.finite()[l], self.b.finite()[r]);
                Some(delta_unchecked((p.birth, p.death), (q.birth, q.death)))
            }
            (true, false) => (r - m == l).then(|| self.a.finite()[l].persistence() / 2.0),
            (false, true) => (l - n == r).then(|| self.b.finite()[r].persistence() / 2.0),
            (false, false) => Some(0.0),
        }
    }
}

fn match_finite(a: &Diagram, b: &Diagram, out: &mut Vec<Assignment>) -> f64 {
    let g = Augmented { a, b };
    let size = g.size();
    if size == 0 {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(size * 2 + g.n() * g.m());
    candidates.push(0.0);
    for l in 0..g.n() {
        candidates.push(a.finite()[l].persistence() / 2.0);
        for r in 0..g.m() {
            candidates.push(g.cost(l, r).unwrap_or(f64::INFINITY));
        }
    }
    for r in 0..g.m() {
        candidates.push(b.finite()[r].persistence() / 2.0);
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // sending every point to the diagonal is always feasible, so the last
    // candidate is an upper bound
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&g, candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let best = perfect_matching(&g, candidates[hi]).expect("feasible radius");
    for (l, &r) in best.iter().enumerate() {
        match (l < g.n(), r < g.m()) {
            (true, true) => out.push(Assignment::Finite { left: l, right: r }),
            (true, false) => out.push(Assignment::LeftToDiagonal(l)),
            (false, true) => out.push(Assignment::RightToDiagonal(r)),
            (false, false) => {}
        }
    }
    candidates[hi]
}

/// Perfect matching using only edges of cost `<= radius`, as `left -> right`.
/// Hopcroft–Karp.
fn perfect_matching(g: &Augmented<'_>, radius: f64) -> Option<Vec<usize>> {
    let size = g.size();
    let adj: Vec<Vec<usize>> = (0..size)
        .map(|l| (0..size).filter(|&r| g.cost(l, r).is_some_and(|c| c <= radius)).collect())
        .collect();
    let matched = hopcroft_karp(&adj, size);
    if matched.iter().all(|r| r.is_some()) {
        Some(matched.into_iter().map(|r| r.unwrap()).collect())
    } else {
        None
    }
}

fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = alloc::vec![FREE; n_left];
    let mut match_r = alloc::vec![FREE; n_right];
    let mut dist = alloc::vec![0usize; n_left];
    let mut queue = Vec::with_capacity(n_left);

    loop {
        // layered BFS from free left vertices
        queue.clear();
        for l in 0..n_left {
            if match_l[l] == FREE {
                dist[l] = 0;
                queue.push(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let l = queue[head];
            head += 1;
            for &r in &adj[l] {
                let next = match_r[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = alloc::vec![0usize; n_left];
        for l in 0..n_left {
            if match_l[l] == FREE {
                augment(l, adj, &mut match_l, &mut match_r, &mut dist, &mut it);
            }
        }
    }
    match_l.into_iter().map(|r| (r != FREE).then_some(r)).collect()
}

/// Iterative DFS along the BFS layers.
fn augment(
    start: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    let mut stack: Vec<usize> = alloc::vec![start];
    while let Some(&l) = stack.last() {
        if it[l] == adj[l].len() {
            dist[l] = usize::MAX;
            stack.pop();
            continue;
        }
        let r = adj[l][it[l]];
        let next = match_r[r];
        if next == FREE {
            // flip the path
            for &pl in stack.iter().rev() {
                let pr = adj[pl][it[pl]];
                match_l[pl] = pr;
                match_r[pr] = pl;
            }
            return true;
        }
        if dist[next] == dist[l] + 1 {
            stack.push(next);
        } else {
            it[l] += 1;
        }
    }
    false
}

/// Largest number of finite points (both sides together) accepted by
/// [`bottleneck_brute`].
pub const BRUTE_FINITE_CAP: usize = 12;
/// Largest number of essential points per side accepted by
/// [`bottleneck_brute`].
pub const BRUTE_ESSENTIAL_CAP: usize = 8;

/// Bottleneck distance by exhaustive enumeration: every partial injection of
/// finite points into finite points (the rest going to the diagonal) and
/// every permutation of essential points.
pub fn bottleneck_brute(a: &Diagram, b: &Diagram) -> Result<f64> {
    let finite = a.finite().len() + b.finite().len();
    if finite > BRUTE_FINITE_CAP {
        return Err(Error::TooLarge { points: finite, cap: BRUTE_FINITE_CAP });
    }
    let ess = a.essential().len().max(b.essential().len());
    if ess > BRUTE_ESSENTIAL_CAP {
        return Err(Error::TooLarge { points: ess, cap: BRUTE_ESSENTIAL_CAP });
    }
    if a.essential().len() != b.essential().len() {
        return Ok(f64::INFINITY);
    }

    let ea: Vec<(f64, f64)> = a.essential().iter().map(|&x| (x, f64::INFINITY)).collect();
    let eb: Vec<(f64, f64)> = b.essential().iter().map(|&x| (x, f64::INFINITY)).collect();
    let mut used = alloc::vec![false; eb.len()];
    let essential = brute_permutations(&ea, &eb, 0, &mut used, 0.0);

    let fa: Vec<(f64, f64)> = a.finite().iter().map(|p| (p.birth, p.death)).collect();
    let fb: Vec<(f64, f64)> = b.finite().iter().map(|p| (p.birth, p.death)).collect();
    let mut used = alloc::vec![false; fb.len()];
    let finite = brute_injections(&fa, &fb, 0, &mut used, 0.0);
    Ok(essential.max(finite))
}

fn brute_permutations(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    i: usize,
    used: &mut [bool],
    acc: f64,
) -> f64 {
    if i == a.len() {
        return acc;
    }
    let mut best = f64::INFINITY;
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            let c = delta_unchecked(a[i], b[j]);
            best = best.min(brute_permutations(a, b, i + 1, used, acc.max(c)));
            used[j] = false;
        }
    }
    best
}

fn brute_injections(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    i: usize,
    used: &mut [bool],
    acc: f64,
) -> f64 {
    let diag = |(x, y): (f64, f64)| (y - x) / 2.0;
    if i == a.len() {
        return b
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .fold(acc, |m, (&q, _)| m.max(diag(q)));
    }
    let mut best = brute_injections(a, b, i + 1, used, acc.max(diag(a[i])));
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            let c = delta_unchecked(a[i], b[j]);
            best = best.min(brute_injections(a, b, i + 1, used, acc.max(c)));
            used[j] = false;
        }
    }
    best
}
