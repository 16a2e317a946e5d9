//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::needless_range_loop)]

use std::hint::black_box;
use std::process::ExitCode;
use std::time::Instant;

use bqap::analytics::{average_value, canonical_sweep, canonical_values};
use bqap::gadgets::{
    adversarial_instance, default_penalty, embed_instance, extract_embedded_solution,
    partition_gadget, tightness_instance,
};
use bqap::heuristics::{
    below_average_rounding, dominate, local_search, round_x_optimize_y, round_y_optimize_x,
};
use bqap::model::{random_fractional, random_instance, random_solution};
use bqap::oracle::{
    count_at_least_average, enumerate_report, exact_optimum, neighborhood_enumerate, swap_sets,
    witness_sets, Assignments,
};
use bqap::{Error, Instance, NeighborhoodKind, Rational, Variant, DEFAULT_LIMIT};
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const VARIANTS: [Variant; 2] = [Variant::Bqap1, Variant::Bqap2];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Objective straight from the definition.
fn value(inst: &Instance, sigma: &[usize], tau: &[usize]) -> i64 {
    let mut v = 0;
    for (i, &j) in sigma.iter().enumerate() {
        v += inst.c(i, j);
    }
    for (l, &k) in tau.iter().enumerate() {
        v += inst.d(k, l);
    }
    for (i, &j) in sigma.iter().enumerate() {
        for (l, &k) in tau.iter().enumerate() {
            v += inst.q(i, j, k, l);
        }
    }
    v
}

fn all_values(inst: &Instance) -> Vec<i64> {
    let mut out = Vec::new();
    for sigma in Assignments::new(inst.m(), inst.x_choices()) {
        for tau in Assignments::new(inst.n(), inst.y_choices()) {
            out.push(value(inst, &sigma, &tau));
        }
    }
    out
}

fn ipow(base: usize, exp: usize) -> u64 {
    (base as u64).pow(exp as u32)
}

/// 50 instances per variant, m, n in 1..=4, costs in [-9, 9].
fn test_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for variant in VARIANTS {
        for s in 0..50u64 {
            let m = 1 + (s % 4) as usize;
            let n = 1 + ((s / 4) % 4) as usize;
            out.push(random_instance(variant, m, n, -9, 9, 1000 + s).unwrap());
        }
    }
    out
}

fn criterion_1(instances: &[Instance]) -> Outcome {
    for (idx, inst) in instances.iter().enumerate() {
        let vals = all_values(inst);
        let sum: i128 = vals.iter().map(|&v| v as i128).sum();
        let mean = Rational::new(sum, vals.len() as i128).unwrap();
        let avg = average_value(inst);
        ensure(avg == mean, || format!("instance {idx}: closed form {avg}, enumeration {mean}"))?;
    }
    Ok(format!("{} instances, exact rational equality", instances.len()))
}

fn criterion_2(instances: &[Instance]) -> Outcome {
    for (idx, inst) in instances.iter().enumerate() {
        let (m, n) = (inst.m(), inst.n());
        let bound = match inst.variant() {
            Variant::Bqap1 => ipow(n, m - 1) * ipow(m, n - 1),
            Variant::Bqap2 => ipow(m, m - 1) * ipow(n, n - 1),
        };
        let count = count_at_least_average(inst, DEFAULT_LIMIT).unwrap();
        ensure(count >= BigUint::from(bound), || {
            format!("instance {idx}: {count} solutions at or above average, bound {bound}")
        })?;
    }
    let mut tight = 0;
    for variant in VARIANTS {
        for m in 1..=4 {
            for n in 1..=4 {
                let (xc, yc) = (variant.x_choices(m, n), variant.y_choices(m, n));
                let bound = match variant {
                    Variant::Bqap1 => ipow(n, m - 1) * ipow(m, n - 1),
                    Variant::Bqap2 => ipow(m, m - 1) * ipow(n, n - 1),
                };
                for i in 0..m {
                    for j in 0..xc {
                        for k in 0..yc {
                            for l in 0..n {
                                let g = tightness_instance(variant, m, n, [i, j, k, l]).unwrap();
                                let count = count_at_least_average(&g.instance, DEFAULT_LIMIT).unwrap();
                                ensure(count == BigUint::from(bound), || {
                                    format!("{variant} {m}x{n} at {:?}: count {count}, bound {bound}", [i, j, k, l])
                                })?;
                                tight += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("bound holds on {} instances; equality on {tight} tightness instances", instances.len()))
}

fn criterion_3(instances: &[Instance]) -> Outcome {
    for (idx, inst) in instances.iter().enumerate() {
        let avg = average_value(inst);
        let canon = canonical_values(inst);
        let lo = *canon.iter().min().unwrap();
        let hi = *canon.iter().max().unwrap();
        ensure(Rational::from(lo) <= avg && avg <= Rational::from(hi), || {
            format!("instance {idx}: canonical range [{lo}, {hi}] misses average {avg}")
        })?;
        let sweep = canonical_sweep(inst);
        ensure(
            sweep.best_value == value(inst, &sweep.best.sigma, &sweep.best.tau) && sweep.best_value == lo,
            || format!("instance {idx}: sweep best {} disagrees with {lo}", sweep.best_value),
        )?;
        let r = below_average_rounding(inst);
        let rv = value(inst, &r.sigma, &r.tau);
        ensure(Rational::from(rv) <= avg, || {
            format!("instance {idx}: rounding value {rv} above average {avg}")
        })?;
    }
    Ok(format!("{} instances", instances.len()))
}

fn fractional_value(inst: &Instance, x: &[Vec<Rational>], y: &[Vec<Rational>]) -> Rational {
    let mut v = Rational::zero();
    for i in 0..inst.m() {
        for j in 0..inst.x_choices() {
            v = v + Rational::from(inst.c(i, j)) * x[i][j].clone();
        }
    }
    for k in 0..inst.y_choices() {
        for l in 0..inst.n() {
            v = v + Rational::from(inst.d(k, l)) * y[k][l].clone();
        }
    }
    for i in 0..inst.m() {
        for j in 0..inst.x_choices() {
            for k in 0..inst.y_choices() {
                for l in 0..inst.n() {
                    let q = inst.q(i, j, k, l);
                    if q != 0 {
                        v = v + Rational::from(q) * x[i][j].clone() * y[k][l].clone();
                    }
                }
            }
        }
    }
    v
}

fn criterion_4() -> Outcome {
    let mut pairs = 0;
    for s in 0..100u64 {
        let variant = VARIANTS[(s % 2) as usize];
        let m = 1 + (s / 2 % 4) as usize;
        let n = 1 + (s / 8 % 4) as usize;
        let inst = random_instance(variant, m, n, -9, 9, 2000 + s).unwrap();
        let frac = random_fractional(&inst, 3000 + s, 1 + (s % 7) as u32);
        let fv = fractional_value(&inst, frac.x(), frac.y());
        for (name, rounded) in [
            ("RxOy", round_x_optimize_y(&inst, &frac).unwrap()),
            ("RyOx", round_y_optimize_x(&inst, &frac).unwrap()),
        ] {
            let rv = Rational::from(value(&inst, &rounded.sigma, &rounded.tau));
            ensure(rv <= fv, || format!("pair {s}: {name} gives {rv} above fractional {fv}"))?;
        }
        pairs += 1;
    }
    Ok(format!("{pairs} pairs, both rounding orders"))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for variant in VARIANTS {
        for m in 2..=3 {
            for n in 2..=3 {
                let inst = Instance::zeros(variant, m, n).unwrap();
                let (xc, yc) = (inst.x_choices(), inst.y_choices());
                let swap = match variant {
                    Variant::Bqap1 => 2 * m * n - m - n + 1,
                    Variant::Bqap2 => m * m + n * n - m - n + 1,
                };
                let cswap = (ipow(xc, m) + ipow(yc, n) - 1) as usize;
                for s in 0..5 {
                    let sol = random_solution(&inst, 40 + s);
                    let size = |k| neighborhood_enumerate(&inst, &sol, k, DEFAULT_LIMIT).unwrap().len();
                    let got = size(NeighborhoodKind::Swap);
                    ensure(got == swap, || format!("{variant} {m}x{n} swap: {got} vs {swap}"))?;
                    let got = size(NeighborhoodKind::ConcurrentSwap);
                    ensure(got == cswap, || format!("{variant} {m}x{n} cswap: {got} vs {cswap}"))?;
                    if variant == Variant::Bqap1 {
                        let sets = swap_sets(&inst, &sol, DEFAULT_LIMIT).unwrap();
                        let sx = ((m * (n - 1) + 1) as u64 * ipow(m, n)) as usize;
                        let sy = ((n * (m - 1) + 1) as u64 * ipow(n, m)) as usize;
                        ensure(sets.sx.len() == sx && sets.sy.len() == sy, || {
                            format!("{m}x{n} |Sx|, |Sy| = {}, {} vs {sx}, {sy}", sets.sx.len(), sets.sy.len())
                        })?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} base solutions"))
}

fn criterion_6() -> Outcome {
    let g = adversarial_instance(Variant::Bqap1, 2, 2, 100, 1).map_err(|e| e.to_string())?;
    let inst = &g.instance;
    let start = g.distinguished_solution.clone().unwrap();
    ensure(value(inst, &start.sigma, &start.tau) == -2, || "distinguished value is not -2".into())?;
    for kind in [NeighborhoodKind::Swap, NeighborhoodKind::ConcurrentSwap] {
        let (end, trace) = local_search(inst, &start, kind, 1000).unwrap();
        ensure(end == start && trace.end_value == -2, || format!("{kind} search left the start"))?;
    }
    let opt = *all_values(inst).iter().min().unwrap();
    ensure(opt == -100, || format!("enumerated optimum {opt}"))?;
    let (end, _) = local_search(inst, &start, NeighborhoodKind::OptimizedSwap, 1000).unwrap();
    let reached = value(inst, &end.sigma, &end.tau);
    ensure(reached == -100, || format!("optimized swap search reached {reached}"))?;

    let big = adversarial_instance(Variant::Bqap1, 2, 2, 1_000_000, 1).unwrap();
    let bad = big.distinguished_solution.clone().unwrap();
    let bad_value = value(&big.instance, &bad.sigma, &bad.tau);
    let opt = exact_optimum(&big.instance, DEFAULT_LIMIT).unwrap().0;
    let ratio = Rational::new(bad_value, opt).unwrap();
    ensure(ratio < Rational::new(1, 100_000).unwrap(), || format!("ratio {ratio}"))?;
    Ok(format!("fixed point at -2, optimum -100 reached by optimized swap; L = 1e6 ratio {ratio}"))
}

fn closed_form_bound(m: i64, n: i64) -> i64 {
    m.pow(n as u32 - 1) * n.pow(m as u32 - 1)
        + (m - 1) * (m * (n - 1) + 1) * m.pow(n as u32 - 1)
        + (n - 1) * (n * (m - 1) + 1) * n.pow(m as u32 - 1)
        - 2 * m * n
        + m
        + n
        - 1
}

fn criterion_7() -> Outcome {
    let mut flagged = Vec::new();
    for s in 0..20u64 {
        let m = 1 + (s % 3) as usize;
        let n = 1 + (s / 3 % 3) as usize;
        let inst = random_instance(Variant::Bqap1, m, n, -9, 9, 7000 + s).unwrap();
        let (sol, cert) = dominate(&inst);
        let v = value(&inst, &sol.sigma, &sol.tau);
        ensure(v == cert.value, || format!("instance {s}: certificate value mismatch"))?;
        ensure(Rational::from(v) <= average_value(&inst), || {
            format!("instance {s}: value {v} above average")
        })?;
        let dominated = all_values(&inst).iter().filter(|&&w| w >= v).count();
        let witnesses = witness_sets(&inst, &cert.start, DEFAULT_LIMIT).unwrap().union_len();
        ensure(dominated >= witnesses, || {
            format!("instance {s}: dominates {dominated} < witness union {witnesses}")
        })?;
        let closed = closed_form_bound(m as i64, n as i64);
        if (witnesses as i64) < closed {
            flagged.push(format!("{m}x{n}: union {witnesses} < closed form {closed}"));
        }
    }
    let note = if flagged.is_empty() {
        "closed form never exceeded the enumerated union".to_string()
    } else {
        format!("closed form exceeds enumerated union (not asserted): {}", flagged.join("; "))
    };
    Ok(format!("20 instances; {note}"))
}

fn medians(inst: &Instance) -> (i64, i64) {
    let mut vals = all_values(inst);
    vals.sort_unstable();
    let len = vals.len();
    (vals[len.div_ceil(2) - 1], vals[len / 2])
}

fn criterion_8() -> Outcome {
    let yes = partition_gadget(&[1, 1, 1, 1]).unwrap();
    let (lo, hi) = medians(&yes.instance);
    ensure(lo == 2 && hi == 2, || format!("(1,1,1,1): medians {lo}, {hi}"))?;
    let report = enumerate_report(&yes.instance, DEFAULT_LIMIT).unwrap();
    ensure(report.count == BigUint::from(65536u32), || format!("count {}", report.count))?;
    ensure((report.lower_median, report.upper_median) == (lo, hi), || "oracle medians disagree".into())?;

    let no = partition_gadget(&[1, 1, 1, 5]).unwrap();
    let (lo, hi) = medians(&no.instance);
    ensure(lo < 4 && 4 < hi && lo + hi == 8, || format!("(1,1,1,5): medians {lo}, {hi}"))?;
    let report = enumerate_report(&no.instance, DEFAULT_LIMIT).unwrap();
    ensure((report.lower_median, report.upper_median) == (lo, hi), || "oracle medians disagree".into())?;
    Ok(format!("medians (2, 2) and ({lo}, {hi})"))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut skipped = Vec::new();
    for variant in VARIANTS {
        for m in 1..=2 {
            for n in 1..=2 {
                let orig = random_instance(variant, m, n, -9, 9, 9000 + (m * 3 + n) as u64).unwrap();
                let orig_opt = *all_values(&orig).iter().min().unwrap();
                for (a, b) in [(2, 1), (3, 2)] {
                    let g = embed_instance(&orig, a, b, default_penalty(&orig)).unwrap();
                    let found = match exact_optimum(&g.instance, DEFAULT_LIMIT) {
                        Ok((v, sol)) => (v, sol),
                        Err(Error::SpaceTooLarge { .. }) => {
                            skipped.push(format!("{variant} {m}x{n} a/b={a}/{b}"));
                            continue;
                        }
                        Err(e) => return Err(e.to_string()),
                    };
                    let (emb_opt, emb_sol) = found;
                    ensure(emb_opt == orig_opt, || {
                        format!("{variant} {m}x{n} a/b={a}/{b}: embedded optimum {emb_opt}, original {orig_opt}")
                    })?;
                    if g.instance.solution_space_size() <= BigUint::from(DEFAULT_LIMIT) {
                        let full = enumerate_report(&g.instance, DEFAULT_LIMIT).unwrap();
                        ensure(full.min_value == orig_opt, || "full enumeration disagrees".into())?;
                    }
                    let back = extract_embedded_solution(&g, &emb_sol).map_err(|e| e.to_string())?;
                    let bv = value(&orig, &back.sigma, &back.tau);
                    ensure(bv == emb_opt, || format!("extracted value {bv} vs {emb_opt}"))?;
                    checked += 1;
                }
            }
        }
    }
    let note = if skipped.is_empty() {
        String::new()
    } else {
        format!("; beyond the enumeration limit: {}", skipped.join(", "))
    };
    Ok(format!("{checked} embeddings{note}"))
}

/// Seconds per call: minimum over 3 repetitions, each long enough to time.
fn time_per_call<F: FnMut()>(mut f: F) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let start = Instant::now();
        let mut calls = 0u32;
        while start.elapsed().as_secs_f64() < 0.02 {
            f();
            calls += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / calls as f64);
    }
    best
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn criterion_10() -> Outcome {
    let sizes = [4usize, 8, 16, 32];
    let mut mn = Vec::new();
    let mut sweep_t = Vec::new();
    let mut dom_t = Vec::new();
    for &s in &sizes {
        let inst = random_instance(Variant::Bqap1, s, s, -100, 100, s as u64).unwrap();
        mn.push((s * s) as f64);
        sweep_t.push(time_per_call(|| {
            black_box(canonical_sweep(black_box(&inst)));
        }));
        dom_t.push(time_per_call(|| {
            black_box(dominate(black_box(&inst)));
        }));
    }
    let s_sweep = slope(&mn, &sweep_t);
    let s_dom = slope(&mn, &dom_t);
    let detail = format!("slope vs mn: canonical sweep {s_sweep:.2} (expect 2), dominate {s_dom:.2} (expect 3)");
    ensure((s_sweep - 2.0).abs() <= 0.7 && (s_dom - 3.0).abs() <= 0.7, || detail.clone())?;
    Ok(detail)
}

fn main() -> ExitCode {
    let instances = test_instances();
    let criteria: Vec<Check> = vec![
        ("average value equals enumeration mean", Box::new(|| criterion_1(&instances))),
        ("at-least-average count bound and tightness", Box::new(|| criterion_2(&instances))),
        ("canonical straddle and below-average rounding", Box::new(|| criterion_3(&instances))),
        ("rounding never increases the fractional value", Box::new(criterion_4)),
        ("neighborhood cardinalities", Box::new(criterion_5)),
        ("swap local optimum arbitrarily bad, optimized swap escapes", Box::new(criterion_6)),
        ("dominating solution at desk scale", Box::new(criterion_7)),
        ("partition gadget medians", Box::new(criterion_8)),
        ("padded embedding preserves the optimum", Box::new(criterion_9)),
        ("complexity sanity", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} [PRIMARY] PASS  {name} ({detail}) [{secs:.2}s]", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} [PRIMARY] FAIL  {name}: {detail} [{secs:.2}s]", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
