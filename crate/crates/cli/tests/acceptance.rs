//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use std::process::Command;
use std::time::{Duration, Instant};

use rainbow_core::blowup::{self, BlowupSpec};
use rainbow_core::coloring::{self, DEFAULT_COLORING_ENUMERATION_CAP};
use rainbow_core::graph::{girth, Graph};
use rainbow_core::graphon::{self, DEFAULT_DENSITY_BUDGET, DEFAULT_HOM_BUDGET};
use rainbow_core::scalar::{minimal_beating_integer, rational, rational_from_int};
use rainbow_core::stochastic::{self, SearchConfig};
use rainbow_core::witness::{self, CertifyOptions};
use rainbow_core::{ExactGraphon, Rational};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration, what: &str) -> Check {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(())
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn cli_count(pattern: &str, coloring: &str) -> Result<String, String> {
    let out = e(Command::new(env!("CARGO_BIN_EXE_rainbow-lab"))
        .args(["count", "--pattern", pattern, "--coloring", coloring])
        .output())?;
    ensure!(out.status.success(), "count exited with {}", out.status);
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let c4 = cli_count("C4", "fixture:K5")?;
    within(t, Duration::from_secs(1), "C4 count")?;
    ensure!(c4 == "8", "C4 in K5 fixture: got {c4}");
    let t = Instant::now();
    let c5 = cli_count("C5", "fixture:K8")?;
    within(t, Duration::from_secs(30), "C5 count")?;
    ensure!(c5 == "128", "C5 in K8 fixture: got {c5}");
    Ok(())
}

fn criterion_2() -> Check {
    for (s, r, m, want) in [(4, 4, 5, 8), (5, 5, 8, 126)] {
        let t = e(coloring::blowup_threshold(&e(Graph::cycle(s))?, r, m))?;
        let got = minimal_beating_integer(&t);
        ensure!(got == want.into(), "C{s}, r={r}, m={m}: got {got}");
    }
    Ok(())
}

fn small_patterns() -> Result<Vec<Graph>, String> {
    let mut hs = Vec::new();
    for s in 1..=6 {
        hs.push(Graph::path(s));
    }
    for s in 3..=6 {
        hs.push(e(Graph::cycle(s))?);
    }
    hs.push(Graph::complete(4));
    hs.push(e(Graph::cycle(3))?.with_pendant(0).map_err(|x| x.to_string())?);
    hs.push(e(Graph::cycle(4))?.with_pendant(0).map_err(|x| x.to_string())?);
    hs.push(e(Graph::new(4, [(0, 1), (0, 2), (0, 3)]))?);
    hs.push(e(Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]))?);
    hs.push(e(Graph::new(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]))?);
    Ok(hs)
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let c3 = e(Graph::cycle(3))?;
    let d = e(graphon::rainbow_density(&c3, &e(ExactGraphon::uniform(3))?, DEFAULT_DENSITY_BUDGET))?;
    ensure!(d.value == rational(2, 9), "C3 at r=3: got {}", d.value);
    for h in small_patterns()? {
        ensure!(h.n_edges() <= 6, "pattern too large");
        for r in 1..=8 {
            let w = e(ExactGraphon::uniform(r))?;
            let got = e(graphon::rainbow_density(&h, &w, DEFAULT_DENSITY_BUDGET))?.value;
            let want = graphon::baseline_density(&h, r);
            ensure!(got == want, "{h} at r={r}: {got} vs baseline {want}");
        }
    }
    within(start, Duration::from_secs(10), "baseline grid")
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let k4 = Graph::complete(4);
    let grid = [
        e(Graph::cycle(3))?,
        e(Graph::cycle(4))?,
        e(Graph::cycle(5))?,
        k4.clone(),
        e(k4.with_pendant(0))?,
    ];
    for h in &grid {
        let g = girth(h).ok_or("grid pattern without a cycle")?;
        for r in h.n_edges()..=h.n_edges() + 2 {
            let cert = e(witness::certify_uncommon(h, r, &CertifyOptions::default()))?;
            ensure!(cert.gap > Rational::from_integer(0.into()), "{h}, r={r}: gap {}", cert.gap);
            e(cert.check())?;
            let direct = e(witness::density_gap(h, r, cert.k, &cert.epsilon, DEFAULT_DENSITY_BUDGET))?;
            let poly = cert.expansion.evaluate(&cert.epsilon);
            ensure!(poly == direct, "{h}, r={r}: expansion {poly} vs direct {direct}");
            ensure!(direct == cert.gap, "{h}, r={r}: certificate gap differs from direct gap");
            let low = cert.expansion.lowest_nonzero_degree();
            ensure!(low == Some(g), "{h}, r={r}: lowest degree {low:?}, girth {g}");
        }
    }
    within(start, Duration::from_secs(120), "certificate grid")
}

fn criterion_5() -> Check {
    ensure!(e(witness::q_of_cycle(3, 3, 1, 3))? == rational(3, 2), "Q(3,3,1,3) != 3/2");
    ensure!(e(witness::q_of_cycle(3, 3, 2, 3))? == rational(-3, 2), "Q(3,3,2,3) != -3/2");
    for r in 3..=7 {
        for s in 3..=5.min(r) {
            for e_host in s..=r {
                for k in 1..r {
                    let a = e(witness::q_of_cycle(r, s, r - k, e_host))?;
                    let b = e(witness::q_of_cycle(r, s, k, e_host))?;
                    let b = if s % 2 == 0 { b } else { -b };
                    ensure!(a == b, "sign symmetry fails at r={r}, s={s}, k={k}, e={e_host}");
                }
            }
            let k = e(witness::select_k(r, s))?;
            let q = e(witness::q_of_cycle(r, s, k, s))?;
            ensure!(q > Rational::from_integer(0.into()), "select_k({r},{s}) = {k} gives Q = {q}");
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    for r in 4..=12 {
        for s in 4..=r {
            let f = witness::capital_f(r, s, 2);
            ensure!(f > 0.into(), "F({r},{s},2) = {f}");
        }
    }
    for r in 3..=12usize {
        let f = witness::capital_f(r, 3, r - 1);
        let want = (r * (r - 1) * (r - 2) / 3) as i64;
        ensure!(f == want.into(), "F({r},3,{}) = {f}, want {want}", r - 1);
    }
    Ok(())
}

fn criterion_7() -> Check {
    let c3 = e(Graph::cycle(3))?;
    let cases = [(c3.clone(), 3, 4), (c3, 4, 4), (Graph::path(2), 3, 4), (e(Graph::cycle(4))?, 4, 4)];
    for (i, (h, r, n)) in cases.iter().enumerate() {
        let expected = e(coloring::expected_uniform_count(h, *r, *n))?;
        let mean = e(coloring::empirical_uniform_mean(h, *r, *n, DEFAULT_COLORING_ENUMERATION_CAP))?;
        ensure!(expected == mean, "{h}, r={r}, n={n}: {expected} vs {mean}");
        if i == 0 {
            ensure!(expected == rational(8, 9), "C3, r=3, n=4: got {expected}");
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let c4 = e(Graph::cycle(4))?;
    let spec = e(BlowupSpec::new(blowup::fixture_k5(), 2))?;
    let report = e(blowup::verify_blowup(&c4, &spec, blowup::DEFAULT_VERTEX_CAP))?;
    let bound = blowup::blowup_lower_bound(8, 5, 4, 2);
    ensure!(bound == 5040u32.into(), "lower bound {bound}");
    ensure!(report.lower_bound == bound, "report bound {}", report.lower_bound);
    ensure!(report.actual >= 5040, "K25 count {}", report.actual);
    let big = e(blowup::blowup_coloring(&spec, blowup::DEFAULT_VERTEX_CAP))?;
    let inner = e(BlowupSpec::new(blowup::fixture_k5(), 1))?;
    let inner = e(blowup::blowup_coloring(&inner, blowup::DEFAULT_VERTEX_CAP))?;
    for digit in 0..5 {
        let class = e(blowup::first_digit_class(&big, 5, 2, digit))?;
        ensure!(class == inner, "first-digit class {digit} is not the depth-1 blowup");
    }
    within(start, Duration::from_secs(60), "blowup check")
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let c3 = e(Graph::cycle(3))?;
    let uniform = e(ExactGraphon::uniform(3))?;
    let rep = e(stochastic::estimate_density(&c3, &uniform, 200, 100_000, 9, DEFAULT_DENSITY_BUDGET))?;
    ensure!(rep.exact_target == rational(2, 9), "uniform target {}", rep.exact_target);
    ensure!(rep.within(3), "uniform estimate {} outside band", rep.empirical_mean);

    let cert = e(witness::certify_uncommon(&c3, 3, &CertifyOptions::default()))?;
    let w = e(witness::build_witness_graphon::<Rational>(3, cert.k, &cert.epsilon))?;
    let rep = e(stochastic::estimate_density(&c3, &w, 200, 100_000, 9, DEFAULT_DENSITY_BUDGET))?;
    ensure!(rep.exact_target == cert.density, "witness target {} vs {}", rep.exact_target, cert.density);
    ensure!(rep.within(3), "witness estimate {} outside band around {}", rep.empirical_mean, cert.density);
    within(start, Duration::from_secs(120), "Monte Carlo")
}

fn criterion_10() -> Check {
    let patterns = [Graph::path(2), e(Graph::cycle(3))?, e(Graph::cycle(4))?];
    for h in &patterns {
        for n in h.n_vertices()..=6 {
            for seed in 0..10 {
                let r = 4;
                let c = e(stochastic::sample_coloring(&e(ExactGraphon::uniform(r))?, n, seed))?;
                let w = e(ExactGraphon::associated(&c))?;
                let d = e(graphon::rainbow_density(h, &w, DEFAULT_DENSITY_BUDGET))?.value;
                let scaled = d * rational_from_int(n as u64).pow(h.n_vertices() as i32);
                let homs = e(graphon::rainbow_hom_count(h, &c, DEFAULT_HOM_BUDGET))?;
                ensure!(scaled == rational_from_int(homs), "{h}, n={n}, seed={seed}: {scaled} vs {homs}");
            }
        }
    }
    Ok(())
}

fn criterion_11() -> Check {
    let start = Instant::now();
    let cfg = SearchConfig::new(e(Graph::cycle(4))?, 5, 4);
    let res = e(stochastic::local_search(&cfg))?;
    let recount = e(coloring::count_rainbow(&cfg.pattern, &res.best))?;
    ensure!(recount.copies == res.count.copies, "reported {} but recount {}", res.count.copies, recount.copies);
    ensure!(recount.copies >= 8, "best coloring has {} rainbow C4", recount.copies);
    let again = e(stochastic::local_search(&cfg))?;
    ensure!(again.best == res.best, "search is not deterministic");
    within(start, Duration::from_secs(120), "search")
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check); 11] = [
        (1, "fixture counts", criterion_1),
        (2, "blowup thresholds", criterion_2),
        (3, "baseline densities", criterion_3),
        (4, "certificate suite", criterion_4),
        (5, "Q sign properties", criterion_5),
        (6, "F positivity", criterion_6),
        (7, "uniform expectation oracle", criterion_7),
        (8, "blowup dominance", criterion_8),
        (9, "Monte Carlo consistency", criterion_9),
        (10, "density bridge", criterion_10),
        (11, "search reproduces constructions", criterion_11),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let t = Instant::now();
        match check() {
            Ok(()) => println!("PASS criterion {n:>2} {name} ({:.2?})", t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n:>2} {name}: {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
