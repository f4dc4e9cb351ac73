//! Degree-0 persistence of sublevel sets of a piecewise-linear signal.
//!
//! The sublevel-set topology of a piecewise-linear function on an interval is
//! that of its vertex path, so the diagram is computed from the samples with
//! the elder rule: vertices enter in increasing order of value, adjacent
//! active vertices are merged with a union-find, and when two components meet
//! the one with the younger (higher) minimum dies.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// A finite off-diagonal point of a diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !(birth.is_finite() && death.is_finite()) || birth > death {
            return Err(Error::MalformedPoint { birth, death });
        }
        Ok(Interval { birth, death })
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Multiset of persistence pairs. Diagonal points are implicit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram {
    finite: Vec<Interval>,
    /// Births of classes that never die.
    essential: Vec<f64>,
}

impl Diagram {
    pub fn new(finite: Vec<Interval>, essential: Vec<f64>) -> Result<Self> {
        for p in &finite {
            Interval::new(p.birth, p.death)?;
        }
        if essential.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("essential births must be finite"));
        }
        Ok(Diagram { finite, essential })
    }

    /// Builds a diagram from `(birth, death)` pairs; `death = +inf` marks an
    /// essential class. Points on the diagonal are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self> {
        let mut finite = Vec::new();
        let mut essential = Vec::new();
        for (birth, death) in pairs {
            if !birth.is_finite() {
                return Err(Error::MalformedPoint { birth, death });
            }
            if death == f64::INFINITY {
                essential.push(birth);
            } else {
                let p = Interval::new(birth, death)?;
                if p.birth < p.death {
                    finite.push(p);
                }
            }
        }
        Ok(Diagram { finite, essential })
    }

    pub fn empty() -> Self {
        Diagram::default()
    }

    pub fn finite(&self) -> &[Interval] {
        &self.finite
    }

    pub fn essential(&self) -> &[f64] {
        &self.essential
    }

    pub fn len(&self) -> usize {
        self.finite.len() + self.essential.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points as `(birth, death)`, essentials last with `death = +inf`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.finite
            .iter()
            .map(|p| (p.birth, p.death))
            .chain(self.essential.iter().map(|&b| (b, f64::INFINITY)))
    }

    /// Sorted copy, for order-insensitive comparison.
    pub fn canonical(&self) -> Diagram {
        let mut finite = self.finite.clone();
        finite.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
        let mut essential = self.essential.clone();
        essential.sort_by(f64::total_cmp);
        Diagram { finite, essential }
    }
}

/// Diagram of the sublevel-set filtration of `s` on its sampled interval.
pub fn sublevel_pd0(s: &Signal) -> Diagram {
    sublevel_pd0_values(s.values())
}

/// Same as [`sublevel_pd0`] for a bare vertex sequence.
pub fn sublevel_pd0_values(values: &[f64]) -> Diagram {
    let n = values.len();
    if n == 0 {
        return Diagram::empty();
    }
    // (value, index) order: equal values enter left to right, so the
    // leftmost of tied minima is the elder
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut sets = Components::new(n);
    let mut finite = Vec::new();
    for &v in &order {
        sets.activate(v);
        for nb in [v.wrapping_sub(1), v + 1] {
            if nb >= n || !sets.is_active(nb) {
                continue;
            }
            let (a, b) = (sets.find(v), sets.find(nb));
            if a == b {
                continue;
            }
            let (elder, younger) = match elder_cmp(values, sets.root_min(a), sets.root_min(b)) {
                Ordering::Less => (a, b),
                _ => (b, a),
            };
            let birth = values[sets.root_min(younger)];
            let death = values[v];
            if birth < death {
                finite.push(Interval { birth, death });
            }
            sets.attach(younger, elder);
        }
    }
    let global_min = values[order[0]];
    Diagram { finite, essential: alloc::vec![global_min] }
}

fn elder_cmp(values: &[f64], a: usize, b: usize) -> Ordering {
    values[a].total_cmp(&values[b]).then(a.cmp(&b))
}

/// Union-find over grid vertices; each root remembers the index of its
/// component's minimum.
struct Components {
    parent: Vec<usize>,
    min_vertex: Vec<usize>,
}

const INACTIVE: usize = usize::MAX;

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: alloc::vec![INACTIVE; n], min_vertex: alloc::vec![0; n] }
    }

    fn activate(&mut self, v: usize) {
        self.parent[v] = v;
        self.min_vertex[v] = v;
    }

    fn is_active(&self, v: usize) -> bool {
        self.parent[v] != INACTIVE
    }

    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn root_min(&self, root: usize) -> usize {
        self.min_vertex[root]
    }

    /// Hangs `child` under `root`. The elder's minimum is kept, which is
    /// already `root`'s.
    fn attach(&mut self, child: usize, root: usize) {
        self.parent[child] = root;
    }
}
