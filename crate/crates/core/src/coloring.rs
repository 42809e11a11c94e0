//! Edge colorings of complete graphs and exact rainbow-copy counting.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{cap_exceeded, Error, Result};
use crate::graph::{CopyEnumerator, Graph, DEFAULT_AUTOMORPHISM_CAP};
use crate::scalar::{falling_factorial, Rational};

/// Colors are tested with a `u64` bitmask.
pub const MAX_COLORS: usize = 64;

/// Default cap on `r^(n(n-1)/2)` for exhaustive coloring enumeration.
pub const DEFAULT_COLORING_ENUMERATION_CAP: u64 = 1 << 22;

/// Index of the pair `{u, v}`, `u != v`, among the edges of `K_n`.
#[inline]
pub fn pair_index(u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    b * (b - 1) / 2 + a
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A total `r`-coloring of the edges of `K_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeColoring {
    n: usize,
    r: usize,
    colors: Vec<u8>,
}

impl EdgeColoring {
    /// `colors` is indexed by [`pair_index`].
    pub fn from_vec(n: usize, r: usize, colors: Vec<u8>) -> Result<Self> {
        if r == 0 || r > MAX_COLORS {
            return Err(Error::InvalidColoring(format!("color count {r} outside 1..={MAX_COLORS}")));
        }
        if colors.len() != pair_count(n) {
            return Err(Error::InvalidColoring(format!(
                "expected {} edge colors for K_{n}, got {}",
                pair_count(n),
                colors.len()
            )));
        }
        if let Some(&c) = colors.iter().find(|&&c| c as usize >= r) {
            return Err(Error::InvalidColoring(format!("color {c} not below r = {r}")));
        }
        Ok(EdgeColoring { n, r, colors })
    }

    pub fn from_fn(n: usize, r: usize, mut color: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let mut colors = Vec::with_capacity(pair_count(n));
        for v in 0..n {
            for u in 0..v {
                let c = color(u, v);
                colors.push(u8::try_from(c).map_err(|_| Error::InvalidColoring(format!("color {c} too large")))?);
            }
        }
        EdgeColoring::from_vec(n, r, colors)
    }

    /// Builds a coloring from `(u, v, color)` triples covering every edge once.
    pub fn from_triples(n: usize, r: usize, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let mut colors: Vec<Option<u8>> = vec![None; pair_count(n)];
        for (u, v, c) in triples {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidColoring(format!("bad edge ({u}, {v}) for K_{n}")));
            }
            if c >= r {
                return Err(Error::InvalidColoring(format!("color {c} not below r = {r}")));
            }
            let slot = &mut colors[pair_index(u, v)];
            if slot.is_some() {
                return Err(Error::InvalidColoring(format!("edge ({u}, {v}) colored twice")));
            }
            *slot = Some(c as u8);
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::InvalidColoring(format!("edge #{i} has no color"))))
            .collect::<Result<Vec<_>>>()?;
        EdgeColoring::from_vec(n, r, colors)
    }

    /// Text format: `n r`, then `n(n-1)/2` lines `u v c`.
    pub fn parse(text: &str) -> Result<Self> {
        let nums = text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("coloring: expected a non-negative integer, got {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if nums.len() < 2 {
            return Err(Error::Parse("coloring: missing header `n r`".into()));
        }
        let (n, r) = (nums[0], nums[1]);
        let body = &nums[2..];
        if body.len() != 3 * pair_count(n) {
            return Err(Error::Parse(format!(
                "coloring: expected {} lines `u v c`, found {} numbers",
                pair_count(n),
                body.len()
            )));
        }
        EdgeColoring::from_triples(n, r, body.chunks(3).map(|t| (t[0], t[1], t[2])))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        EdgeColoring::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.r);
        for v in 0..self.n {
            for u in 0..v {
                out.push_str(&format!("{u} {v} {}\n", self.color(u, v)));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> usize {
        self.colors[pair_index(u, v)] as usize
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn permute_colors(&self, perm: &[usize]) -> Result<Self> {
        EdgeColoring::from_vec(self.n, self.r, self.colors.iter().map(|&c| perm[c as usize] as u8).collect())
    }

    /// Coloring with `result(perm[u], perm[v]) = self(u, v)`.
    pub fn permute_vertices(&self, perm: &[usize]) -> Result<Self> {
        let mut colors = vec![0u8; self.colors.len()];
        for v in 0..self.n {
            for u in 0..v {
                colors[pair_index(perm[u], perm[v])] = self.colors[pair_index(u, v)];
            }
        }
        EdgeColoring::from_vec(self.n, self.r, colors)
    }

    /// The coloring restricted to `vertices`, relabeled `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        EdgeColoring::from_fn(vertices.len(), self.r, |a, b| self.color(vertices[a], vertices[b]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowCount {
    pub copies: u64,
    pub total: u64,
    pub density_per_copy: Rational,
}

impl RainbowCount {
    pub fn empty() -> Self {
        RainbowCount::new(0, 0)
    }

    fn new(copies: u64, total: u64) -> Self {
        let density_per_copy = if total == 0 {
            Rational::zero()
        } else {
            Rational::new(BigInt::from(copies), BigInt::from(total))
        };
        RainbowCount {
            copies,
            total,
            density_per_copy,
        }
    }
}

#[inline]
fn is_rainbow(h: &Graph, c: &EdgeColoring, image: &[usize]) -> bool {
    let mut seen = 0u64;
    for &(u, v) in h.edges() {
        let bit = 1u64 << c.color(image[u], image[v]);
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

/// Counts copies of `h` in `K_n` whose edges carry pairwise distinct colors.
pub fn count_rainbow(h: &Graph, c: &EdgeColoring) -> Result<RainbowCount> {
    let copies = CopyEnumerator::new(h, c.n(), DEFAULT_AUTOMORPHISM_CAP)?;
    Ok(count_rainbow_with(&copies, c))
}

pub fn count_rainbow_with(copies: &CopyEnumerator, c: &EdgeColoring) -> RainbowCount {
    let h = copies.pattern();
    let (rainbow, total) = copies.par_fold(
        (0u64, 0u64),
        |acc, img| {
            acc.1 += 1;
            if is_rainbow(h, c, img) {
                acc.0 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    RainbowCount::new(rainbow, total)
}

/// Copies of a pattern pre-resolved to `K_n` pair indices, for repeated
/// counting against many colorings of the same host.
#[derive(Clone, Debug)]
pub struct CopyIndex {
    n: usize,
    edges_per_copy: usize,
    pairs: Vec<u32>,
    // copies touching each pair
    incident: Vec<Vec<u32>>,
}

impl CopyIndex {
    pub fn new(h: &Graph, n: usize) -> Result<Self> {
        let copies = CopyEnumerator::new(h, n, DEFAULT_AUTOMORPHISM_CAP)?;
        let mut pairs = Vec::new();
        copies.for_each(|img| {
            pairs.extend(h.edges().iter().map(|&(u, v)| pair_index(img[u], img[v]) as u32));
        });
        let edges_per_copy = h.n_edges();
        let mut incident = vec![Vec::new(); pair_count(n)];
        if edges_per_copy > 0 {
            for (i, chunk) in pairs.chunks(edges_per_copy).enumerate() {
                for &p in chunk {
                    incident[p as usize].push(i as u32);
                }
            }
        }
        Ok(CopyIndex {
            n,
            edges_per_copy,
            pairs,
            incident,
        })
    }

    pub fn len(&self) -> usize {
        if self.edges_per_copy == 0 {
            0
        } else {
            self.pairs.len() / self.edges_per_copy
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn host_size(&self) -> usize {
        self.n
    }

    #[inline]
    fn copy_is_rainbow(&self, colors: &[u8], copy: usize) -> bool {
        let start = copy * self.edges_per_copy;
        let mut seen = 0u64;
        for &p in &self.pairs[start..start + self.edges_per_copy] {
            let bit = 1u64 << colors[p as usize];
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        }
        true
    }

    pub fn count(&self, c: &EdgeColoring) -> u64 {
        debug_assert_eq!(c.n(), self.n);
        (0..self.len()).filter(|&i| self.copy_is_rainbow(c.colors(), i)).count() as u64
    }

    /// Rainbow copies through the pair `pair` only.
    pub fn count_through(&self, colors: &[u8], pair: usize) -> u64 {
        self.incident[pair]
            .iter()
            .filter(|&&i| self.copy_is_rainbow(colors, i as usize))
            .count() as u64
    }
}

/// `(r)_{e(h)} (n)_{v(h)} / (r^{e(h)} |Aut(h)|)`.
pub fn expected_uniform_count(h: &Graph, r: usize, n: usize) -> Result<Rational> {
    let aut = crate::graph::automorphism_count(h, DEFAULT_AUTOMORPHISM_CAP)?;
    let e = h.n_edges() as u64;
    let numer = BigInt::from(falling_factorial(r as u64, e)) * BigInt::from(falling_factorial(n as u64, h.n_vertices() as u64));
    let denom = BigInt::from(r).pow(e as u32) * BigInt::from(aut);
    Ok(Rational::new(numer, denom))
}

/// Exact mean of the rainbow count over every `r`-coloring of `K_n`.
pub fn empirical_uniform_mean(h: &Graph, r: usize, n: usize, cap: u64) -> Result<Rational> {
    let pairs = pair_count(n) as u32;
    let space = (r as u128).checked_pow(pairs).unwrap_or(u128::MAX);
    if space > cap as u128 {
        return Err(cap_exceeded("coloring enumeration", space, cap));
    }
    if r == 0 || r > MAX_COLORS {
        return Err(Error::Precondition(format!("color count {r} outside 1..={MAX_COLORS}")));
    }
    if h.n_vertices() > n {
        return Ok(Rational::zero());
    }
    let index = CopyIndex::new(h, n)?;
    let mut colors = vec![0u8; pairs as usize];
    let mut total = BigInt::zero();
    let mut count: u128 = 0;
    let mut sum: u128 = 0;
    loop {
        sum += (0..index.len()).filter(|&i| index.copy_is_rainbow(&colors, i)).count() as u128;
        count += 1;
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == colors.len() {
                total += BigInt::from(sum);
                return Ok(Rational::new(total, BigInt::from(count)));
            }
            colors[pos] += 1;
            if (colors[pos] as usize) < r {
                break;
            }
            colors[pos] = 0;
            pos += 1;
        }
    }
}

/// Rainbow count a coloring of `K_m` must exceed for its iterated blowup to
/// beat the uniform random coloring: `(m^v - m) (r)_e / (r^e |Aut(h)|)`.
pub fn blowup_threshold(h: &Graph, r: usize, m: usize) -> Result<Rational> {
    let aut = crate::graph::automorphism_count(h, DEFAULT_AUTOMORPHISM_CAP)?;
    let e = h.n_edges() as u32;
    let m_big = BigInt::from(m);
    let spread = m_big.pow(h.n_vertices() as u32) - &m_big;
    let numer = spread * BigInt::from(falling_factorial(r as u64, e as u64));
    let denom = BigInt::from(r).pow(e) * BigInt::from(aut);
    if denom.is_zero() {
        return Err(Error::Precondition("r must be positive".into()));
    }
    Ok(Rational::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn c(s: usize) -> Graph {
        Graph::cycle(s).unwrap()
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 7;
        let mut seen = vec![false; pair_count(n)];
        for v in 0..n {
            for u in 0..v {
                assert!(!seen[pair_index(u, v)]);
                seen[pair_index(u, v)] = true;
                assert_eq!(pair_index(u, v), pair_index(v, u));
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn two_colors_have_no_rainbow_triangle() {
        let col = EdgeColoring::from_fn(4, 2, |u, v| (u + v) % 2).unwrap();
        let rc = count_rainbow(&c(3), &col).unwrap();
        assert_eq!(rc.copies, 0);
        assert_eq!(rc.total, 4);
    }

    #[test]
    fn single_edge_always_rainbow() {
        let col = EdgeColoring::from_fn(6, 1, |_, _| 0).unwrap();
        let rc = count_rainbow(&Graph::path(1), &col).unwrap();
        assert_eq!(rc.copies, 15);
        assert_eq!(rc.copies, rc.total);
    }

    #[test]
    fn expected_counts() {
        assert_eq!(expected_uniform_count(&c(3), 3, 4).unwrap(), rational(8, 9));
        assert_eq!(expected_uniform_count(&c(4), 4, 5).unwrap(), rational(45, 32));
        assert_eq!(expected_uniform_count(&c(3), 2, 10).unwrap(), Rational::zero());
    }

    #[test]
    fn enumeration_mean_matches_closed_form() {
        assert_eq!(empirical_uniform_mean(&c(3), 3, 4, 1 << 20).unwrap(), rational(8, 9));
        assert_eq!(empirical_uniform_mean(&c(3), 2, 3, 1 << 20).unwrap(), Rational::zero());
        let p2 = Graph::path(2);
        assert_eq!(
            empirical_uniform_mean(&p2, 2, 3, 1 << 20).unwrap(),
            expected_uniform_count(&p2, 2, 3).unwrap()
        );
        assert!(matches!(
            empirical_uniform_mean(&c(3), 3, 8, 1 << 20),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn thresholds() {
        assert_eq!(blowup_threshold(&c(4), 4, 5).unwrap(), rational(465, 64));
        assert_eq!(blowup_threshold(&c(5), 5, 8).unwrap(), rational(786240, 6250));
        assert_eq!(blowup_threshold(&c(3), 3, 1).unwrap(), Rational::zero());
    }

    #[test]
    fn text_format() {
        let col = EdgeColoring::from_fn(4, 3, |u, v| (u * v) % 3).unwrap();
        assert_eq!(EdgeColoring::parse(&col.to_text()).unwrap(), col);
        assert!(EdgeColoring::parse("3 2\n0 1 0\n0 2 1\n").is_err());
        assert!(EdgeColoring::parse("3 2\n0 1 0\n0 2 1\n0 1 1\n").is_err());
        assert!(EdgeColoring::parse("3 2\n0 1 0\n0 2 1\n1 2 2\n").is_err());
    }

    #[test]
    fn copy_index_agrees_with_enumerator() {
        let col = EdgeColoring::from_fn(7, 5, |u, v| (u * 3 + v * 5 + u * v) % 5).unwrap();
        for h in [c(3), c(4), c(5), Graph::path(3)] {
            let idx = CopyIndex::new(&h, 7).unwrap();
            assert_eq!(idx.count(&col), count_rainbow(&h, &col).unwrap().copies);
        }
    }
}
