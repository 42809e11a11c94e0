//! Iterated blowups of a seed coloring and the two seed fixtures.
//!
//! Vertices of `K_{m^d}` are base-`m` strings of length `d`, most
//! significant digit first. The edge `{x, y}` takes the seed color of the
//! digit pair at the most significant position where `x` and `y` differ.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::coloring::{count_rainbow, EdgeColoring};
use crate::error::{cap_exceeded, Error, Result};
use crate::graph::Graph;

pub const DEFAULT_VERTEX_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupSpec {
    pub seed: EdgeColoring,
    pub depth: usize,
}

impl BlowupSpec {
    pub fn new(seed: EdgeColoring, depth: usize) -> Result<Self> {
        if seed.n() < 2 {
            return Err(Error::Precondition("blowup seed needs m >= 2".into()));
        }
        if depth == 0 {
            return Err(Error::Precondition("blowup depth must be at least 1".into()));
        }
        Ok(BlowupSpec { seed, depth })
    }

    pub fn m(&self) -> usize {
        self.seed.n()
    }

    /// `m^d`, or `None` on overflow.
    pub fn vertex_count(&self) -> Option<usize> {
        self.m().checked_pow(self.depth as u32)
    }

    /// Color of `{x, y}` without materializing the coloring.
    pub fn color(&self, x: usize, y: usize) -> usize {
        debug_assert_ne!(x, y);
        let m = self.m();
        let mut place = m.pow(self.depth as u32 - 1);
        loop {
            let (dx, dy) = ((x / place) % m, (y / place) % m);
            if dx != dy {
                return self.seed.color(dx, dy);
            }
            place /= m;
        }
    }
}

pub fn blowup_coloring(spec: &BlowupSpec, vertex_cap: usize) -> Result<EdgeColoring> {
    let n = spec
        .vertex_count()
        .filter(|&n| n <= vertex_cap)
        .ok_or_else(|| cap_exceeded("blowup vertices", format!("{}^{}", spec.m(), spec.depth), vertex_cap))?;
    EdgeColoring::from_fn(n, spec.seed.r(), |u, v| spec.color(u, v))
}

/// `sum_{k=1}^{d} ell m^{k-1} (m^{d-k})^{v_h}`.
pub fn blowup_lower_bound(ell: u64, m: u64, v_h: u32, d: u32) -> BigUint {
    let m = BigUint::from(m);
    (1..=d)
        .map(|k| BigUint::from(ell) * m.pow(k - 1) * m.pow(d - k).pow(v_h))
        .fold(BigUint::zero(), |a, x| a + x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupReport {
    pub m: usize,
    pub depth: usize,
    pub n: usize,
    /// Rainbow copies in the seed.
    pub seed_count: u64,
    pub actual: u64,
    pub total: u64,
    pub lower_bound: BigUint,
}

impl BlowupReport {
    pub fn holds(&self) -> bool {
        BigUint::from(self.actual) >= self.lower_bound
    }
}

pub fn verify_blowup(h: &Graph, spec: &BlowupSpec, vertex_cap: usize) -> Result<BlowupReport> {
    let seed_count = count_rainbow(h, &spec.seed)?.copies;
    let blown = blowup_coloring(spec, vertex_cap)?;
    let rc = count_rainbow(h, &blown)?;
    Ok(BlowupReport {
        m: spec.m(),
        depth: spec.depth,
        n: blown.n(),
        seed_count,
        actual: rc.copies,
        total: rc.total,
        lower_bound: blowup_lower_bound(seed_count, spec.m() as u64, h.n_vertices() as u32, spec.depth as u32),
    })
}

/// Restriction of the blowup to first digit `digit`, with that digit dropped.
pub fn first_digit_class(c: &EdgeColoring, m: usize, depth: usize, digit: usize) -> Result<EdgeColoring> {
    let block = m.pow(depth as u32 - 1);
    let vertices: Vec<usize> = (digit * block..(digit + 1) * block).collect();
    c.induced(&vertices)
}

const K5_TRIPLES: [(usize, usize, usize); 10] = [
    (0, 1, 3),
    (0, 2, 0),
    (1, 2, 3),
    (0, 3, 2),
    (1, 3, 1),
    (2, 3, 2),
    (0, 4, 3),
    (1, 4, 0),
    (2, 4, 3),
    (3, 4, 1),
];

const K8_TRIPLES: [(usize, usize, usize); 28] = [
    (0, 1, 1),
    (0, 2, 4),
    (1, 2, 1),
    (0, 3, 1),
    (1, 3, 0),
    (2, 3, 1),
    (0, 4, 0),
    (1, 4, 1),
    (2, 4, 0),
    (3, 4, 1),
    (0, 5, 2),
    (1, 5, 3),
    (2, 5, 2),
    (3, 5, 3),
    (4, 5, 2),
    (0, 6, 2),
    (1, 6, 3),
    (2, 6, 2),
    (3, 6, 3),
    (4, 6, 2),
    (5, 6, 4),
    (0, 7, 1),
    (1, 7, 4),
    (2, 7, 1),
    (3, 7, 0),
    (4, 7, 1),
    (5, 7, 3),
    (6, 7, 3),
];

/// The 4-coloring of `K_5` with 8 rainbow 4-cycles.
pub fn fixture_k5() -> EdgeColoring {
    EdgeColoring::from_triples(5, 4, K5_TRIPLES).expect("K5 fixture is total")
}

/// The 5-coloring of `K_8` with 128 rainbow 5-cycles.
pub fn fixture_k8() -> EdgeColoring {
    EdgeColoring::from_triples(8, 5, K8_TRIPLES).expect("K8 fixture is total")
}

pub fn fixtures() -> Vec<(&'static str, EdgeColoring)> {
    vec![("K5", fixture_k5()), ("K8", fixture_k8())]
}

/// Looks up `K5` / `K8`.
pub fn fixture(name: &str) -> Option<EdgeColoring> {
    fixtures().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
