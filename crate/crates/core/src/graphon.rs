//! Step coloring graphons and exact rainbow homomorphism densities.
//!
//! A step coloring graphon splits `[0, 1]` into `q` blocks of given measure
//! and assigns each color a symmetric `q x q` matrix of cell values. Cell
//! values of all colors sum to one, except on the diagonal of graphons
//! built from a finite coloring (see [`StepColoringGraphon::associated`]).

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::coloring::EdgeColoring;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{
    falling_factorial, falling_factorial_sat, format_fraction, parse_fraction, pow_sat, Rational, Scalar,
};

/// Default budget on `(r)_{e(h)} * q^{v(h)}`.
pub const DEFAULT_DENSITY_BUDGET: u128 = 1_000_000_000;

/// Default budget on `n^{v(h)}` for brute-force homomorphism counting.
pub const DEFAULT_HOM_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct StepColoringGraphon<T> {
    r: usize,
    q: usize,
    block_weights: Vec<T>,
    // values[color][a][b]
    values: Vec<Vec<Vec<T>>>,
    diagonal_exempt: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityResult<T> {
    pub value: T,
    pub injection_count: BigUint,
}

impl<T: Scalar> StepColoringGraphon<T> {
    /// Validates symmetry, range, partition of unity and block weights.
    pub fn new(block_weights: Vec<T>, values: Vec<Vec<Vec<T>>>) -> Result<Self> {
        Self::build(block_weights, values, false)
    }

    /// Like [`new`](Self::new), but diagonal cells must be zero in every
    /// color instead of summing to one.
    pub fn new_diagonal_exempt(block_weights: Vec<T>, values: Vec<Vec<Vec<T>>>) -> Result<Self> {
        Self::build(block_weights, values, true)
    }

    fn build(block_weights: Vec<T>, values: Vec<Vec<Vec<T>>>, diagonal_exempt: bool) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGraphon(msg));
        let r = values.len();
        let q = block_weights.len();
        if r == 0 {
            return bad("at least one color is required".into());
        }
        if q == 0 {
            return bad("at least one block is required".into());
        }
        if block_weights.iter().any(|w| *w <= T::zero()) {
            return bad("block weights must be positive".into());
        }
        let total = block_weights.iter().fold(T::zero(), |a, w| a + w.clone());
        if !total.approx_eq(&T::one()) {
            return bad(format!("block weights sum to {total:?}, not 1"));
        }
        for (i, plane) in values.iter().enumerate() {
            if plane.len() != q || plane.iter().any(|row| row.len() != q) {
                return bad(format!("color {i}: matrix is not {q}x{q}"));
            }
            for a in 0..q {
                for b in 0..q {
                    let x = &plane[a][b];
                    if *x < T::zero() || *x > T::one() {
                        return bad(format!("color {i}: cell ({a}, {b}) = {x:?} outside [0, 1]"));
                    }
                    if !x.approx_eq(&plane[b][a]) {
                        return bad(format!("color {i}: cell ({a}, {b}) is not symmetric"));
                    }
                }
            }
        }
        for a in 0..q {
            for b in 0..q {
                let sum = values.iter().fold(T::zero(), |acc, p| acc + p[a][b].clone());
                if diagonal_exempt && a == b {
                    if !sum.approx_eq(&T::zero()) {
                        return bad(format!("diagonal cell ({a}, {a}) must be zero in every color"));
                    }
                } else if !sum.approx_eq(&T::one()) {
                    return bad(format!("cell ({a}, {b}) sums to {sum:?}, not 1"));
                }
            }
        }
        Ok(StepColoringGraphon {
            r,
            q,
            block_weights,
            values,
            diagonal_exempt,
        })
    }

    /// The constant graphon `(1/r, ..., 1/r)`.
    pub fn uniform(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidGraphon("r must be at least 1".into()));
        }
        let cell = T::recip_count(r as u64);
        Self::new(vec![T::one()], vec![vec![vec![cell]]; r])
    }

    /// Block indicator graphon of a coloring of `K_n`.
    ///
    /// Block `a` has measure `1/n`; off-diagonal cell `(a, b)` is one in the
    /// color of edge `{a, b}`. Diagonal cells are zero in every color, so a
    /// block assignment sending both ends of a pattern edge to one block
    /// contributes nothing, matching maps that collapse an edge.
    pub fn associated(c: &EdgeColoring) -> Result<Self> {
        let n = c.n();
        let r = c.r();
        let mut values = vec![vec![vec![T::zero(); n]; n]; r];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    values[c.color(a, b)][a][b] = T::one();
                }
            }
        }
        Self::new_diagonal_exempt(vec![T::recip_count(n as u64); n], values)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn block_weights(&self) -> &[T] {
        &self.block_weights
    }

    pub fn value(&self, color: usize, a: usize, b: usize) -> &T {
        &self.values[color][a][b]
    }

    pub fn plane(&self, color: usize) -> &[Vec<T>] {
        &self.values[color]
    }

    pub fn is_diagonal_exempt(&self) -> bool {
        self.diagonal_exempt
    }

    /// Graphon whose color `perm[i]` plane is this graphon's color `i` plane.
    pub fn permute_colors(&self, perm: &[usize]) -> Result<Self> {
        let mut values = vec![Vec::new(); self.r];
        for (i, plane) in self.values.iter().enumerate() {
            values[perm[i]] = plane.clone();
        }
        Self::build(self.block_weights.clone(), values, self.diagonal_exempt)
    }

    /// Splits block `a` into two blocks of half its measure with copied values.
    pub fn split_block(&self, a: usize) -> Result<Self> {
        let two = T::from_count(2);
        let mut weights = self.block_weights.clone();
        weights[a] = weights[a].clone() / two.clone();
        weights.push(self.block_weights[a].clone() / two);
        let src = |x: usize| if x == self.q { a } else { x };
        let q = self.q + 1;
        let values = self
            .values
            .iter()
            .map(|plane| {
                (0..q)
                    .map(|x| (0..q).map(|y| plane[src(x)][src(y)].clone()).collect())
                    .collect()
            })
            .collect();
        if self.diagonal_exempt {
            return Err(Error::InvalidGraphon(
                "splitting a block of a diagonal-exempt graphon creates off-diagonal zero cells".into(),
            ));
        }
        Self::new(weights, values)
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<StepColoringGraphon<U>> {
        let weights = self.block_weights.iter().map(&f).collect();
        let values = self
            .values
            .iter()
            .map(|p| p.iter().map(|row| row.iter().map(&f).collect()).collect())
            .collect();
        StepColoringGraphon::<U>::build(weights, values, self.diagonal_exempt)
    }
}

impl StepColoringGraphon<Rational> {
    /// Text format: `r q`, `q` block weights, then `r` matrices of `q x q`
    /// fractions. A graphon whose diagonal cells are zero in every color is
    /// read as diagonal-exempt.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut header = |what: &str| -> Result<usize> {
            let t = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("graphon: missing {what}")))?;
            t.parse()
                .map_err(|_| Error::Parse(format!("graphon: bad {what} {t:?}")))
        };
        let r = header("color count")?;
        let q = header("block count")?;
        let rest: Vec<Rational> = tokens.map(parse_fraction).collect::<Result<_>>()?;
        if rest.len() != q + r * q * q {
            return Err(Error::Parse(format!(
                "graphon: expected {} fractions after the header, found {}",
                q + r * q * q,
                rest.len()
            )));
        }
        let weights = rest[..q].to_vec();
        let mut cells = rest[q..].iter().cloned();
        let values: Vec<Vec<Vec<Rational>>> = (0..r)
            .map(|_| (0..q).map(|_| (0..q).map(|_| cells.next().expect("sized")).collect()).collect())
            .collect();
        let exempt = q > 1 && (0..q).all(|a| values.iter().all(|p| p[a][a].is_zero()));
        Self::build(weights, values, exempt)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.r, self.q);
        out.push_str(&self.block_weights.iter().map(format_fraction).collect::<Vec<_>>().join(" "));
        out.push('\n');
        for plane in &self.values {
            for row in plane {
                out.push_str(&row.iter().map(format_fraction).collect::<Vec<_>>().join(" "));
                out.push('\n');
            }
        }
        out
    }
}

fn guard(h: &Graph, r: usize, q: usize, budget: u128) -> Result<()> {
    let need = falling_factorial_sat(r as u64, h.n_edges() as u64).saturating_mul(pow_sat(q as u64, h.n_vertices() as u64));
    if need > budget {
        return Err(Error::ComplexityGuard {
            what: "rainbow density",
            requested: need.to_string(),
            budget: budget.to_string(),
        });
    }
    Ok(())
}

/// Exact rainbow homomorphism density of `h` in `w`.
///
/// Sums over block assignments of the pattern vertices; for each one the
/// sum over injective edge colorings is evaluated by a dynamic program over
/// classes of colors with identical value matrices.
pub fn rainbow_density<T: Scalar>(h: &Graph, w: &StepColoringGraphon<T>, budget: u128) -> Result<DensityResult<T>> {
    guard(h, w.r, w.q, budget)?;
    let injection_count = falling_factorial(w.r as u64, h.n_edges() as u64);
    if injection_count.is_zero() {
        return Ok(DensityResult {
            value: T::zero(),
            injection_count,
        });
    }

    // colors with equal planes are interchangeable
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for i in 0..w.r {
        match classes.iter_mut().find(|(rep, _)| w.values[*rep] == w.values[i]) {
            Some((_, size)) => *size += 1,
            None => classes.push((i, 1)),
        }
    }

    let v = h.n_vertices();
    let mut blocks = vec![0usize; v];
    let mut total = T::zero();
    assign_blocks(h, w, &classes, 0, T::one(), &mut blocks, &mut total);
    Ok(DensityResult {
        value: total,
        injection_count,
    })
}

fn assign_blocks<T: Scalar>(
    h: &Graph,
    w: &StepColoringGraphon<T>,
    classes: &[(usize, usize)],
    depth: usize,
    weight: T,
    blocks: &mut [usize],
    total: &mut T,
) {
    if depth == blocks.len() {
        let s = injective_class_sum(h, w, classes, blocks);
        *total = total.clone() + weight * s;
        return;
    }
    for b in 0..w.q {
        blocks[depth] = b;
        // an edge into an all-zero cell kills the term
        let dead = h
            .neighbors(depth)
            .filter(|&u| u < depth)
            .any(|u| (0..w.r).all(|i| w.values[i][blocks[u]][b].is_zero()));
        if dead {
            continue;
        }
        let next = weight.clone() * w.block_weights[b].clone();
        assign_blocks(h, w, classes, depth + 1, next, blocks, total);
    }
}

fn injective_class_sum<T: Scalar>(
    h: &Graph,
    w: &StepColoringGraphon<T>,
    classes: &[(usize, usize)],
    blocks: &[usize],
) -> T {
    let mut states: HashMap<Vec<u8>, T> = HashMap::new();
    states.insert(vec![0u8; classes.len()], T::one());
    for &(a, b) in h.edges() {
        let (ba, bb) = (blocks[a], blocks[b]);
        let mut next: HashMap<Vec<u8>, T> = HashMap::with_capacity(states.len() * 2);
        for (used, acc) in &states {
            for (c, &(rep, size)) in classes.iter().enumerate() {
                let taken = used[c] as usize;
                if taken >= size {
                    continue;
                }
                let cell = &w.values[rep][ba][bb];
                if cell.is_zero() {
                    continue;
                }
                let term = acc.clone() * cell.clone() * T::from_count((size - taken) as u64);
                let mut key = used.clone();
                key[c] += 1;
                let slot = next.entry(key).or_insert_with(T::zero);
                *slot = slot.clone() + term;
            }
        }
        states = next;
        if states.is_empty() {
            return T::zero();
        }
    }
    states.into_values().fold(T::zero(), |a, x| a + x)
}

/// Reference evaluation by enumerating every injection and block assignment.
pub fn rainbow_density_direct<T: Scalar>(h: &Graph, w: &StepColoringGraphon<T>, budget: u128) -> Result<DensityResult<T>> {
    guard(h, w.r, w.q, budget)?;
    let e = h.n_edges();
    let injection_count = falling_factorial(w.r as u64, e as u64);
    let mut total = T::zero();
    let mut colors = vec![0usize; e];
    let mut used = vec![false; w.r];

    fn per_injection<T: Scalar>(h: &Graph, w: &StepColoringGraphon<T>, colors: &[usize]) -> T {
        let v = h.n_vertices();
        let mut acc = T::zero();
        let mut blocks = vec![0usize; v];
        let assignments = w.q.pow(v as u32);
        for code in 0..assignments {
            let mut x = code;
            for b in blocks.iter_mut() {
                *b = x % w.q;
                x /= w.q;
            }
            let mut term = blocks.iter().fold(T::one(), |a, &b| a * w.block_weights[b].clone());
            for (idx, &(a, b)) in h.edges().iter().enumerate() {
                term = term * w.values[colors[idx]][blocks[a]][blocks[b]].clone();
            }
            acc = acc + term;
        }
        acc
    }

    fn injections<T: Scalar>(
        h: &Graph,
        w: &StepColoringGraphon<T>,
        depth: usize,
        colors: &mut [usize],
        used: &mut [bool],
        total: &mut T,
    ) {
        if depth == colors.len() {
            *total = total.clone() + per_injection(h, w, colors);
            return;
        }
        for c in 0..w.r {
            if used[c] {
                continue;
            }
            used[c] = true;
            colors[depth] = c;
            injections(h, w, depth + 1, colors, used, total);
            used[c] = false;
        }
    }

    if !injection_count.is_zero() {
        injections(h, w, 0, &mut colors, &mut used, &mut total);
    }
    Ok(DensityResult {
        value: total,
        injection_count,
    })
}

/// `(r)_{e(h)} / r^{e(h)}`, the rainbow density of the uniform graphon.
pub fn baseline_density(h: &Graph, r: usize) -> Rational {
    let e = h.n_edges() as u64;
    if r == 0 {
        return if e == 0 { Rational::one() } else { Rational::zero() };
    }
    Rational::new(
        BigInt::from(falling_factorial(r as u64, e)),
        BigInt::from(r).pow(e as u32),
    )
}

/// Number of maps `V(h) -> [n]` sending every pattern edge to an edge of
/// `K_n` with pairwise distinct colors.
pub fn rainbow_hom_count(h: &Graph, c: &EdgeColoring, budget: u128) -> Result<u64> {
    let need = pow_sat(c.n() as u64, h.n_vertices() as u64);
    if need > budget {
        return Err(crate::error::cap_exceeded("homomorphism enumeration", need, budget));
    }
    let mut image = vec![0usize; h.n_vertices()];
    let mut count = 0u64;

    fn extend(h: &Graph, c: &EdgeColoring, depth: usize, image: &mut [usize], count: &mut u64) {
        if depth == image.len() {
            let mut seen = 0u64;
            for &(a, b) in h.edges() {
                let bit = 1u64 << c.color(image[a], image[b]);
                if seen & bit != 0 {
                    return;
                }
                seen |= bit;
            }
            *count += 1;
            return;
        }
        for x in 0..c.n() {
            let collapses = h.neighbors(depth).any(|u| u < depth && image[u] == x);
            if collapses {
                continue;
            }
            image[depth] = x;
            extend(h, c, depth + 1, image, count);
        }
    }

    extend(h, c, 0, &mut image, &mut count);
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    type Exact = StepColoringGraphon<Rational>;

    fn c(s: usize) -> Graph {
        Graph::cycle(s).unwrap()
    }

    #[test]
    fn uniform_cells() {
        for r in 1..=3 {
            let w = Exact::uniform(r).unwrap();
            assert_eq!(w.q(), 1);
            assert!((0..r).all(|i| *w.value(i, 0, 0) == rational(1, r as i64)));
        }
    }

    #[test]
    fn associated_single_edge() {
        let col = EdgeColoring::from_fn(2, 1, |_, _| 0).unwrap();
        let w = Exact::associated(&col).unwrap();
        assert_eq!(w.q(), 2);
        assert_eq!(*w.value(0, 0, 1), Rational::one());
        assert_eq!(*w.value(0, 0, 0), Rational::zero());
    }

    #[test]
    fn uniform_densities() {
        let d = |h: &Graph, r| rainbow_density(h, &Exact::uniform(r).unwrap(), DEFAULT_DENSITY_BUDGET).unwrap();
        assert_eq!(d(&c(3), 3).value, rational(2, 9));
        assert_eq!(d(&c(4), 4).value, rational(3, 32));
        assert_eq!(d(&c(4), 3).value, Rational::zero());
        assert_eq!(d(&c(4), 4).injection_count, BigUint::from(24u32));
    }

    #[test]
    fn baselines() {
        assert_eq!(baseline_density(&c(3), 3), rational(2, 9));
        assert_eq!(baseline_density(&c(5), 5), rational(24, 625));
        assert_eq!(baseline_density(&c(3), 2), Rational::zero());
    }

    #[test]
    fn invalid_graphons() {
        let half = rational(1, 2);
        assert!(Exact::new(vec![Rational::one()], vec![vec![vec![half.clone()]]]).is_err());
        assert!(Exact::new(vec![half.clone()], vec![vec![vec![Rational::one()]]]).is_err());
        let asym = vec![
            vec![vec![Rational::one(), Rational::one()], vec![Rational::zero(), Rational::one()]],
            vec![vec![Rational::zero(), Rational::zero()], vec![Rational::one(), Rational::zero()]],
        ];
        assert!(Exact::new(vec![half.clone(), half], asym).is_err());
    }

    #[test]
    fn hom_counts() {
        let rainbow = EdgeColoring::from_fn(3, 3, |u, v| u + v - 1).unwrap();
        assert_eq!(rainbow_hom_count(&c(3), &rainbow, DEFAULT_HOM_BUDGET).unwrap(), 6);
        let mono = EdgeColoring::from_fn(3, 1, |_, _| 0).unwrap();
        assert_eq!(rainbow_hom_count(&c(3), &mono, DEFAULT_HOM_BUDGET).unwrap(), 0);
    }

    #[test]
    fn text_round_trip() {
        let col = EdgeColoring::from_fn(3, 2, |u, _| u % 2).unwrap();
        let w = Exact::associated(&col).unwrap();
        let back = Exact::parse(&w.to_text()).unwrap();
        assert_eq!(back, w);
        assert!(back.is_diagonal_exempt());
        let u = Exact::uniform(3).unwrap();
        assert_eq!(Exact::parse(&u.to_text()).unwrap(), u);
        assert!(Exact::parse("1 1\n1\n1/2\n").is_err());
    }

    #[test]
    fn float_scalar_agrees() {
        let w = StepColoringGraphon::<f64>::uniform(5).unwrap();
        let d = rainbow_density(&c(5), &w, DEFAULT_DENSITY_BUDGET).unwrap().value;
        assert!((d - 24.0 / 625.0).abs() < 1e-12);
    }

    #[test]
    fn guard_trips() {
        let w = Exact::uniform(30).unwrap();
        assert!(matches!(
            rainbow_density(&Graph::complete(7), &w, 1000),
            Err(Error::ComplexityGuard { .. })
        ));
    }
}
