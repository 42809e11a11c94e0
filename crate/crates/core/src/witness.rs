//! Perturbation witnesses for rainbow uncommonness.
//!
//! For a pattern `h` with girth `s` and `r >= e(h)` colors, the witness is
//! the two-block coloring graphon
//!
//! ```text
//! W_i(x, y) = 1/r + eps * sigma(i) * f(x, y)
//! ```
//!
//! where `f` is `+1` on the diagonal blocks and `-1` off them, and `sigma`
//! is `1/k` on the first `k` colors and `-1/(r-k)` on the rest. Expanding
//! the rainbow density in `eps` gives one term per even subgraph of `h`; the
//! lowest degree is `s` and its coefficient is positive for a suitable `k`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cycle_subgraphs, girth, is_even_graph, Graph};
use crate::graphon::{baseline_density, rainbow_density, StepColoringGraphon};
use crate::scalar::{binomial, factorial, falling_factorial, falling_factorial_sat, Rational, Scalar};

/// `f` on the 2x2 block grid of equal halves.
pub const SIGN_KERNEL: [[i64; 2]; 2] = [[1, -1], [-1, 1]];

/// Trials in the epsilon ladder `1 / (r 2^j)`, `j = 0..LADDER_LEN`.
pub const LADDER_LEN: u32 = 65;

/// Default budget on `(r)_{|G|}` for injection sums over a subgraph.
pub const DEFAULT_INJECTION_BUDGET: u128 = 50_000_000;

/// Default cap on pattern edges for subset enumeration.
pub const DEFAULT_SUBSET_EDGE_CAP: usize = 24;

/// Color weights: `1/k` on colors `0..k`, `-1/(r-k)` on `k..r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sigma {
    r: usize,
    k: usize,
}

impl Sigma {
    pub fn new(r: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= r {
            return Err(Error::Precondition(format!("split k = {k} must lie in [1, r-1] for r = {r}")));
        }
        Ok(Sigma { r, k })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value<T: Scalar>(&self, i: usize) -> T {
        if i < self.k {
            T::recip_count(self.k as u64)
        } else {
            -T::recip_count((self.r - self.k) as u64)
        }
    }

    /// Sum of `prod sigma` over injections of `edges` edges into the colors.
    /// Tallies injections by how many edges land in `0..k`.
    fn injection_sum(&self, edges: usize, budget: u128) -> Result<Rational> {
        let need = falling_factorial_sat(self.r as u64, edges as u64);
        if need > budget {
            return Err(Error::ComplexityGuard {
                what: "sigma injection sum",
                requested: need.to_string(),
                budget: budget.to_string(),
            });
        }
        let mut tally = vec![0u64; edges + 1];
        let mut used = vec![false; self.r];

        fn walk(sigma: &Sigma, left: usize, low: usize, used: &mut [bool], tally: &mut [u64]) {
            if left == 0 {
                tally[low] += 1;
                return;
            }
            for c in 0..sigma.r {
                if used[c] {
                    continue;
                }
                used[c] = true;
                walk(sigma, left - 1, low + usize::from(c < sigma.k), used, tally);
                used[c] = false;
            }
        }

        walk(self, edges, 0, &mut used, &mut tally);
        let hi: Rational = self.value(0);
        let lo: Rational = self.value(self.k);
        Ok(tally
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0)
            .map(|(i, &t)| Rational::from_integer(BigInt::from(t)) * pow(&hi, i) * pow(&lo, edges - i))
            .fold(Rational::zero(), |a, x| a + x))
    }
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// `sum_{i=0}^{s} (-1)^i C(k,i) C(r-k,s-i) k^{s-i} (r-k)^i`.
pub fn capital_f(r: usize, s: usize, k: usize) -> BigInt {
    let (r, s, k) = (r as u64, s as u64, k as u64);
    (0..=s)
        .map(|i| {
            let term = BigInt::from(binomial(k, i))
                * BigInt::from(binomial(r - k, s - i))
                * BigInt::from(k).pow((s - i) as u32)
                * BigInt::from(r - k).pow(i as u32);
            if i % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

fn check_cycle_args(r: usize, s: usize, k: usize, e_host: usize) -> Result<()> {
    if !(s >= 3 && e_host >= s && r >= e_host) {
        return Err(Error::Precondition(format!(
            "need r >= e(H) >= s >= 3, got r = {r}, e(H) = {e_host}, s = {s}"
        )));
    }
    if k == 0 || k >= r {
        return Err(Error::Precondition(format!("split k = {k} must lie in [1, r-1]")));
    }
    Ok(())
}

/// Weight of an `s`-cycle inside a host with `e_host` edges, by direct
/// summation over injective colorings.
pub fn q_of_cycle(r: usize, s: usize, k: usize, e_host: usize) -> Result<Rational> {
    check_cycle_args(r, s, k, e_host)?;
    let sigma = Sigma::new(r, k)?;
    let cycle_sum = sigma.injection_sum(s, u128::MAX)?;
    let extend = falling_factorial((r - s) as u64, (e_host - s) as u64);
    Ok(cycle_sum * Rational::from_integer(BigInt::from(extend)))
}

/// Closed form `(-1)^s s! (r-s)_{e-s} F(r,s,k) / (k^s (r-k)^s)`.
pub fn q_of_cycle_closed_form(r: usize, s: usize, k: usize, e_host: usize) -> Result<Rational> {
    check_cycle_args(r, s, k, e_host)?;
    let sign = if s % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let numer = sign
        * BigInt::from(factorial(s as u64))
        * BigInt::from(falling_factorial((r - s) as u64, (e_host - s) as u64))
        * capital_f(r, s, k);
    let denom = BigInt::from(k).pow(s as u32) * BigInt::from(r - k).pow(s as u32);
    Ok(Rational::new(numer, denom))
}

/// `sum over injections E(h) -> [r]` of the sigma product over `edge_subset`.
pub fn q_of_even_subgraph(h: &Graph, edge_subset: &[usize], r: usize, k: usize, budget: u128) -> Result<Rational> {
    let e = h.n_edges();
    let d = edge_subset.len();
    if d == 0 {
        return Err(Error::Precondition("edge subset must be nonempty".into()));
    }
    if r < e {
        return Err(Error::Precondition(format!("r = {r} is below e(h) = {e}")));
    }
    if let Some(&bad) = edge_subset.iter().find(|&&x| x >= e) {
        return Err(Error::Precondition(format!("edge {bad} is not an edge of h")));
    }
    let sigma = Sigma::new(r, k)?;
    let sum = sigma.injection_sum(d, budget)?;
    Ok(sum * Rational::from_integer(BigInt::from(falling_factorial((r - d) as u64, (e - d) as u64))))
}

/// Split `k` maximizing the directly summed cycle weight; ties go to the
/// smaller `k`.
pub fn select_k(r: usize, s: usize) -> Result<usize> {
    let mut best: Option<(usize, Rational)> = None;
    for k in 1..r {
        let q = q_of_cycle(r, s, k, s)?;
        if best.as_ref().map_or(true, |(_, b)| q > *b) {
            best = Some((k, q));
        }
    }
    match best {
        Some((k, q)) if q.is_positive() => Ok(k),
        _ => Err(Error::NoPositiveK { r, s }),
    }
}

/// `eps * max(1/k, 1/(r-k)) <= 1/r`, i.e. `eps <= min(k, r-k) / r`.
pub fn epsilon_is_valid(r: usize, k: usize, epsilon: &Rational) -> bool {
    !epsilon.is_negative() && *epsilon <= Rational::new(BigInt::from(k.min(r - k)), BigInt::from(r))
}

/// The two-block witness graphon at `epsilon`.
pub fn build_witness_graphon<T: Scalar>(r: usize, k: usize, epsilon: &Rational) -> Result<StepColoringGraphon<T>> {
    let sigma = Sigma::new(r, k)?;
    if !epsilon_is_valid(r, k, epsilon) {
        if epsilon.is_negative() {
            return Err(Error::Precondition("epsilon must be non-negative".into()));
        }
        return Err(Error::EpsilonTooLarge {
            epsilon: crate::scalar::format_fraction(epsilon),
            r,
            k,
        });
    }
    let base = Rational::new(BigInt::one(), BigInt::from(r));
    let values = (0..r)
        .map(|i| {
            let shift = epsilon * sigma.value::<Rational>(i);
            SIGN_KERNEL
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&f| T::from_rational(&(&base + &shift * Rational::from_integer(BigInt::from(f)))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let half = T::recip_count(2);
    StepColoringGraphon::new(vec![half.clone(), half], values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    /// Edge indices of the even subgraph.
    pub edges: Vec<usize>,
    pub degree: usize,
    pub coefficient: Rational,
    pub descriptor: String,
}

/// Coefficients of `t(rb h, W_eps) - t(rb h, 1/r)` as a polynomial in eps.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    /// `coefficients[d]` multiplies `eps^d`; index 0 is always zero.
    pub coefficients: Vec<Rational>,
    pub terms: Vec<ExpansionTerm>,
}

impl Expansion {
    pub fn evaluate(&self, epsilon: &Rational) -> Rational {
        // Horner
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * epsilon + c)
    }

    pub fn lowest_nonzero_degree(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }
}

fn describe(h: &Graph, edges: &[usize]) -> String {
    let mut touched: Vec<usize> = edges.iter().flat_map(|&e| [h.edges()[e].0, h.edges()[e].1]).collect();
    touched.sort_unstable();
    touched.dedup();
    let sub = Graph::new(h.n_vertices(), edges.iter().map(|&e| h.edges()[e])).expect("subgraph of a simple graph");
    let two_regular = touched.iter().all(|&v| sub.degree(v) == 2);
    if two_regular && touched.len() == edges.len() && cycle_subgraphs(&sub, edges.len()).len() == 1 {
        format!("C{}", edges.len())
    } else {
        format!("even(v={}, e={})", touched.len(), edges.len())
    }
}

pub fn expansion_polynomial(h: &Graph, r: usize, k: usize, budget: u128) -> Result<Expansion> {
    let e = h.n_edges();
    if e > DEFAULT_SUBSET_EDGE_CAP {
        return Err(Error::ComplexityGuard {
            what: "even subgraph enumeration",
            requested: format!("2^{e}"),
            budget: format!("2^{DEFAULT_SUBSET_EDGE_CAP}"),
        });
    }
    Sigma::new(r, k)?;
    let r_pow_e = BigInt::from(r).pow(e as u32);
    let terms: Vec<ExpansionTerm> = (1u64..(1u64 << e))
        .into_par_iter()
        .filter_map(|mask| {
            let edges: Vec<usize> = (0..e).filter(|&i| mask >> i & 1 == 1).collect();
            is_even_graph(h, &edges).then_some(edges)
        })
        .map(|edges| {
            let d = edges.len();
            let q = q_of_even_subgraph(h, &edges, r, k, budget)?;
            let coefficient = q * Rational::new(BigInt::from(r).pow(d as u32), r_pow_e.clone());
            Ok(ExpansionTerm {
                descriptor: describe(h, &edges),
                degree: d,
                coefficient,
                edges,
            })
        })
        .collect::<Result<_>>()?;
    let mut coefficients = vec![Rational::zero(); e + 1];
    for t in &terms {
        coefficients[t.degree] += &t.coefficient;
    }
    let mut terms = terms;
    terms.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.edges.cmp(&b.edges)));
    Ok(Expansion { coefficients, terms })
}

/// Exact `t(rb h, W_eps) - t(rb h, 1/r)`.
pub fn density_gap(h: &Graph, r: usize, k: usize, epsilon: &Rational, budget: u128) -> Result<Rational> {
    let w = build_witness_graphon::<Rational>(r, k, epsilon)?;
    Ok(rainbow_density(h, &w, budget)?.value - baseline_density(h, r))
}

/// Largest `1/(r 2^j)` that is valid and gives a positive exact gap.
pub fn select_epsilon(h: &Graph, r: usize, k: usize, budget: u128) -> Result<(Rational, Rational)> {
    if girth(h).is_none() {
        return Err(Error::NoCycle);
    }
    if r < h.n_edges() {
        return Err(Error::Precondition(format!("r = {r} is below e(h) = {}", h.n_edges())));
    }
    for j in 0..LADDER_LEN {
        let epsilon = Rational::new(BigInt::one(), BigInt::from(r) << j as usize);
        if !epsilon_is_valid(r, k, &epsilon) {
            continue;
        }
        let gap = density_gap(h, r, k, &epsilon, budget)?;
        if gap.is_positive() {
            return Ok((epsilon, gap));
        }
    }
    Err(Error::NotFound)
}

#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub k: Option<usize>,
    pub epsilon: Option<Rational>,
    pub density_budget: Option<u128>,
    pub injection_budget: Option<u128>,
}

/// Exact record that `t(rb h, W_eps) > t(rb h, 1/r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCertificate {
    pub h: Graph,
    pub r: usize,
    pub s: usize,
    pub k: usize,
    pub epsilon: Rational,
    pub baseline: Rational,
    pub density: Rational,
    pub gap: Rational,
    pub cycle_count: usize,
    pub cycle_weight: Rational,
    pub expansion: Expansion,
}

impl WitnessCertificate {
    /// Re-checks the stored claims without recomputing any density.
    pub fn check(&self) -> Result<()> {
        if !self.gap.is_positive() {
            return Err(Error::GapNotPositive {
                gap: crate::scalar::format_fraction(&self.gap),
            });
        }
        if self.density.clone() - &self.baseline != self.gap {
            return Err(Error::Precondition("density - baseline differs from the recorded gap".into()));
        }
        if self.expansion.evaluate(&self.epsilon) != self.gap {
            return Err(Error::Precondition("expansion at epsilon differs from the recorded gap".into()));
        }
        let per_degree: Rational = self
            .expansion
            .terms
            .iter()
            .filter(|t| t.degree == self.s)
            .map(|t| t.coefficient.clone())
            .sum();
        if per_degree != self.expansion.coefficients[self.s] {
            return Err(Error::Precondition("term breakdown disagrees with the coefficient table".into()));
        }
        Ok(())
    }
}

pub fn certify_uncommon(h: &Graph, r: usize, opts: &CertifyOptions) -> Result<WitnessCertificate> {
    let s = girth(h).ok_or(Error::NoCycle)?;
    let e = h.n_edges();
    if r < e {
        return Err(Error::Precondition(format!("r = {r} is below e(h) = {e}")));
    }
    let density_budget = opts.density_budget.unwrap_or(crate::graphon::DEFAULT_DENSITY_BUDGET);
    let injection_budget = opts.injection_budget.unwrap_or(DEFAULT_INJECTION_BUDGET);
    let k = match opts.k {
        Some(k) => {
            Sigma::new(r, k)?;
            k
        }
        None => select_k(r, s)?,
    };
    let (epsilon, gap) = match &opts.epsilon {
        Some(eps) => {
            if !eps.is_positive() {
                return Err(Error::Precondition("epsilon must be positive".into()));
            }
            let gap = density_gap(h, r, k, eps, density_budget)?;
            if !gap.is_positive() {
                return Err(Error::GapNotPositive {
                    gap: crate::scalar::format_fraction(&gap),
                });
            }
            (eps.clone(), gap)
        }
        None => select_epsilon(h, r, k, density_budget)?,
    };
    let expansion = expansion_polynomial(h, r, k, injection_budget)?;
    let evaluated = expansion.evaluate(&epsilon);
    assert_eq!(evaluated, gap, "expansion and direct density disagree");

    let cycles = cycle_subgraphs(h, s);
    let cycle_weight = q_of_cycle(r, s, k, e)? * Rational::new(BigInt::from(r).pow(s as u32), BigInt::from(r).pow(e as u32));
    let baseline = baseline_density(h, r);
    Ok(WitnessCertificate {
        h: h.clone(),
        r,
        s,
        k,
        density: &baseline + &gap,
        baseline,
        epsilon,
        gap,
        cycle_count: cycles.len(),
        cycle_weight,
        expansion,
    })
}

/// Injections counted by a certificate's density, `(r)_{e(h)}`.
pub fn injection_count(h: &Graph, r: usize) -> BigUint {
    falling_factorial(r as u64, h.n_edges() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn capital_f_examples() {
        assert_eq!(capital_f(4, 3, 3), BigInt::from(8));
        assert_eq!(capital_f(4, 4, 2), BigInt::from(16));
        assert_eq!(capital_f(3, 3, 2), BigInt::from(2));
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_of_cycle(3, 3, 1, 3).unwrap(), rational(3, 2));
        assert_eq!(q_of_cycle(3, 3, 2, 3).unwrap(), rational(-3, 2));
        assert_eq!(q_of_cycle(4, 4, 2, 4).unwrap(), rational(3, 2));
        assert!(q_of_cycle(3, 4, 1, 4).is_err());
        assert!(q_of_cycle(5, 3, 5, 3).is_err());
    }

    #[test]
    fn even_subgraph_weights() {
        // one edge: sigma sums to zero
        let p = Graph::path(1);
        assert_eq!(q_of_even_subgraph(&p, &[0], 2, 1, 1000).unwrap(), Rational::zero());
        let c3 = Graph::cycle(3).unwrap();
        assert_eq!(q_of_even_subgraph(&c3, &[0, 1, 2], 3, 1, 1000).unwrap(), rational(3, 2));
        let two = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(q_of_even_subgraph(&two, &[0, 1], 2, 1, 1000).unwrap(), rational(-2, 1));
        assert!(q_of_even_subgraph(&c3, &[], 3, 1, 1000).is_err());
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(3, 3).unwrap(), 1);
        assert_eq!(select_k(4, 4).unwrap(), 2);
        let k = select_k(5, 3).unwrap();
        assert!(q_of_cycle(5, 3, k, 3).unwrap().is_positive());
    }

    #[test]
    fn witness_cells() {
        let w0 = build_witness_graphon::<Rational>(3, 1, &Rational::zero()).unwrap();
        assert!((0..3).all(|i| (0..2).all(|a| (0..2).all(|b| *w0.value(i, a, b) == rational(1, 3)))));
        let w = build_witness_graphon::<Rational>(3, 1, &rational(1, 9)).unwrap();
        assert_eq!(*w.value(0, 0, 0), rational(4, 9));
        assert_eq!(*w.value(0, 0, 1), rational(2, 9));
        assert!(matches!(
            build_witness_graphon::<Rational>(3, 1, &rational(1, 2)),
            Err(Error::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn c3_expansion() {
        let c3 = Graph::cycle(3).unwrap();
        let exp = expansion_polynomial(&c3, 3, 1, DEFAULT_INJECTION_BUDGET).unwrap();
        assert_eq!(exp.coefficients, vec![Rational::zero(), Rational::zero(), Rational::zero(), rational(3, 2)]);
        assert_eq!(exp.terms.len(), 1);
        assert_eq!(exp.terms[0].descriptor, "C3");
    }

    #[test]
    fn forest_rejected() {
        let p = Graph::path(2);
        assert_eq!(certify_uncommon(&p, 2, &CertifyOptions::default()), Err(Error::NoCycle));
        assert_eq!(select_epsilon(&p, 2, 1, 1000), Err(Error::NoCycle));
        let exp = expansion_polynomial(&Graph::path(4), 5, 2, 1000).unwrap();
        assert!(exp.coefficients.iter().all(Zero::is_zero));
    }

    #[test]
    fn c3_certificate() {
        let c3 = Graph::cycle(3).unwrap();
        let cert = certify_uncommon(&c3, 3, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.s, 3);
        assert_eq!(cert.k, 1);
        assert_eq!(cert.epsilon, rational(1, 3));
        assert_eq!(cert.gap, rational(3, 2) * pow(&cert.epsilon, 3));
        cert.check().unwrap();
    }

    #[test]
    fn explicit_epsilon_and_k() {
        let c3 = Graph::cycle(3).unwrap();
        let opts = CertifyOptions {
            k: Some(1),
            epsilon: Some(rational(1, 9)),
            ..Default::default()
        };
        let cert = certify_uncommon(&c3, 3, &opts).unwrap();
        assert_eq!(cert.gap, rational(3, 2) * rational(1, 729));
        let bad_k = CertifyOptions {
            k: Some(2),
            epsilon: Some(rational(1, 9)),
            ..Default::default()
        };
        assert!(matches!(certify_uncommon(&c3, 3, &bad_k), Err(Error::GapNotPositive { .. })));
    }
}
