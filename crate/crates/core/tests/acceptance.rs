//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lauricella::determinant::{build_delta, certify_range};
use lauricella::evaluate::{check_estimates, linear_form_scan, perron_check};
use lauricella::height::{archimedean_threshold, d_n, measure, mu_n, v_quantity, Place};
use lauricella::interval::round_down;
use lauricella::operator::jp_expand;
use lauricella::padic::{eval_padic, reduce_mod, series_tail_valuation};
use lauricella::pade::{build_system, leibniz_expand, remainder_closed_form, rodrigues_apply};
use lauricella::rational::{factorial, from_bigint, int, ln_f64, pochhammer, pow, rat};
use lauricella::solutions::{build_canonical, build_closed_form};
use lauricella::{Instance, Order, Poly, Rational};
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn instances() -> [(&'static str, Instance); 2] {
    [("I1", Instance::i1()), ("I2", Instance::i2())]
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {:.1}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail}; took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn series_equality() -> Outcome {
    let start = Instant::now();
    for (name, inst) in instances() {
        let rec = build_canonical(&inst, 200).map_err(|e| e.to_string())?;
        let closed = build_closed_form(&inst, 200).map_err(|e| e.to_string())?;
        for j in 0..=inst.w {
            if let Some(k) = (0..200).find(|&k| rec.f[j].coeff(k) != closed.f[j].coeff(k)) {
                return Err(format!("{name}: f_{j} differs at coefficient {k}"));
            }
        }
    }
    within(Duration::from_secs(10), start, "200 coefficients of every f_j agree on I1, I2".into())
}

fn pade_orders() -> Outcome {
    let mut details = Vec::new();
    for (name, inst) in instances() {
        let start = Instant::now();
        let fam = build_canonical(&inst, 100).map_err(|e| e.to_string())?;
        let mut cells = 0;
        for n in 0..=20 {
            let sys = build_system(&fam, n).map_err(|e| format!("{name} n = {n}: {e}"))?;
            if !sys.verified {
                return Err(format!("{name} n = {n}: system not verified"));
            }
            for j in 0..=inst.w {
                for l in 0..inst.m {
                    let r = &sys.r[j][l];
                    let ok = match r.ord_inf() {
                        Order::Exact(k) => k > n,
                        Order::AtLeast(_) => true,
                    };
                    if !ok {
                        return Err(format!("{name} n = {n} (j, l) = ({j}, {l}): ord = {}", r.ord_inf()));
                    }
                    let terms = n + 20;
                    let closed = remainder_closed_form(&fam, n, j, l, terms).map_err(|e| e.to_string())?;
                    if let Some(k) = (0..terms).find(|&k| closed.coeff(k) != r.coeff(k)) {
                        return Err(format!("{name} n = {n} (j, l) = ({j}, {l}): remainder differs at {k}"));
                    }
                    cells += 1;
                }
            }
        }
        details.push(within(Duration::from_secs(120), start, format!("{name}: {cells} cells"))?);
    }
    Ok(format!("ord >= n+1 and closed remainders match for n <= 20 ({})", details.join(", ")))
}

fn rodrigues_leibniz() -> Outcome {
    for (name, inst) in instances() {
        for n in 0..=10 {
            for l in 0..inst.m {
                let p = rodrigues_apply(&inst, n, l).map_err(|e| e.to_string())?;
                let q = leibniz_expand(&inst, n, l).map_err(|e| e.to_string())?;
                if p != q {
                    return Err(format!("{name}: n = {n}, l = {l} differ"));
                }
                if p.degree() != Some(l + n * (inst.w + 1)) {
                    return Err(format!("{name}: deg P_({n},{l}) = {:?}", p.degree()));
                }
            }
        }
    }
    Ok("R_n z^l equals the Leibniz sum with deg = l + n(w+1) for n <= 10".into())
}

fn determinants() -> Outcome {
    let mut parts = Vec::new();
    for ((name, inst), n_max) in instances().into_iter().zip([15usize, 10]) {
        let fam = build_canonical(&inst, 80).map_err(|e| e.to_string())?;
        let reports = certify_range(&fam, n_max).map_err(|e| format!("{name}: {e}"))?;
        for r in &reports {
            if !(r.delta_is_constant && r.delta_nonzero) {
                return Err(format!("{name}: Delta_{} = {}", r.n, r.delta_n));
            }
        }
        parts.push(format!("{name}: n <= {n_max}"));
    }
    let fam = build_canonical(&Instance::i1(), 20).map_err(|e| e.to_string())?;
    let d0 = build_delta(&fam, &build_system(&fam, 0).map_err(|e| e.to_string())?, 5).map_err(|e| e.to_string())?;
    if d0.delta != Poly::one() {
        return Err(format!("I1: Delta_0 = {}", d0.delta_n));
    }
    Ok(format!("Delta_n nonzero constant ({}); I1 Delta_0 = 1", parts.join(", ")))
}

fn arithmetic_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let d: i64 = rng.random_range(1..=30);
        let num: i64 = rng.random_range(-100..=100);
        let s = rat(num, d);
        let n: u64 = rng.random_range(0..=50);
        let k: u64 = rng.random_range(0..=n);
        let x = pochhammer(&s, k) / from_bigint(factorial(k)) * from_bigint(mu_n(&s, n));
        if !x.is_integer() {
            return Err(format!("mu_{n}({s}) (s)_{k}/{k}! = {x} is not an integer"));
        }
        let shift: i64 = rng.random_range(-5..=5);
        if mu_n(&s, n) != mu_n(&(&s + int(shift)), n) {
            return Err(format!("mu_{n} not shift invariant at {s}"));
        }
        let n2: u64 = rng.random_range(0..=20);
        let prod = mu_n(&s, n) * mu_n(&s, n2);
        if !num_integer::Integer::is_multiple_of(&mu_n(&s, n + n2), &prod) {
            return Err(format!("mu_{} not divisible by mu_{n} mu_{n2} at {s}", n + n2));
        }
    }
    let n = 10_000u64;
    let d = d_n(&int(1), n).map_err(|e| e.to_string())?;
    let slope = ln_f64(&from_bigint(d)) / n as f64;
    if !(0.9..=1.1).contains(&slope) {
        return Err(format!("(1/n) log d_n(1) = {slope:.4} at n = 10^4"));
    }
    within(Duration::from_secs(60), start, format!("200 integrality triples, shifts, divisibility; (1/n) log d_n(1) = {slope:.4}"))
}

fn estimate_slopes() -> Outcome {
    let start = Instant::now();
    let inst = Instance::i1();
    let fam = build_canonical(&inst, 160).map_err(|e| e.to_string())?;
    let beta = int(100_000);
    let rep = check_estimates(&fam, &beta, Place::Infinity, 5..=25).map_err(|e| e.to_string())?;
    let r_ok = rep.slope_r00 <= -rep.a + 0.05;
    let pq_ok = rep.slope_pq <= rep.u + 0.05;
    let detail = format!(
        "slope log|R_n00| = {:.4} vs -A+0.05 = {:.4} ({}); slope log max(|P|,|Q|) = {:.4} vs U+0.05 = {:.4} ({}); \
         bound with the m log 4 term: {:.4}",
        rep.slope_r00,
        -rep.a + 0.05,
        if r_ok { "ok" } else { "exceeded" },
        rep.slope_pq,
        rep.u + 0.05,
        if pq_ok { "ok" } else { "exceeded" },
        rep.pq_bound_slope,
    );
    if r_ok && pq_ok {
        within(Duration::from_secs(300), start, detail)
    } else {
        Err(detail)
    }
}

fn perron() -> Outcome {
    let mut parts = Vec::new();
    for (name, inst) in instances() {
        let fam = build_canonical(&inst, 1001).map_err(|e| e.to_string())?;
        let rep = perron_check(&fam, 900, 1000, 0.05).map_err(|e| e.to_string())?;
        let sup = rep.sup[0];
        if sup > rep.max_abs_root + 0.05 {
            return Err(format!("{name}: sup |f_0,n|^(1/n) = {sup:.5} > {:.2}", rep.max_abs_root + 0.05));
        }
        parts.push(format!("{name}: {sup:.5} <= {:.2}", rep.max_abs_root + 0.05));
    }
    Ok(parts.join(", "))
}

fn measure_pipeline() -> Outcome {
    let start = Instant::now();
    let inst = Instance::i1();
    let prec = 256;
    let beta = from_bigint(archimedean_threshold(&inst, prec).map_err(|e| e.to_string())?);
    let v = v_quantity(&inst, &beta, Place::Infinity).map_err(|e| e.to_string())?.enclose(prec);
    if !v.is_positive() {
        return Err(format!("V({beta}) not positive"));
    }
    let below = &beta - Rational::one();
    if v_quantity(&inst, &below, Place::Infinity).map_err(|e| e.to_string())?.enclose(prec).is_positive() {
        return Err("threshold search is not minimal".into());
    }
    let eps = round_down(&(v.lo() / int(2)), 64);
    let m = measure(&inst, &beta, Place::Infinity, &eps, prec).map_err(|e| e.to_string())?;
    let (Some(mu), Some(log_c)) = (m.mu_measure.clone(), m.log_c.clone()) else {
        return Err(format!("measure not applicable: {:?}", m.note));
    };
    let fam = build_canonical(&inst, 160).map_err(|e| e.to_string())?;
    let scan = linear_form_scan(&fam, &m, 100, prec).map_err(|e| e.to_string())?;
    let listed = scan.violations.iter().all(|l| l.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) < scan.h0_proxy);
    let detail = format!(
        "beta = {beta}, V in [{}, {}], mu in [{}, {}], log C in [{}, {}]; {} cells, {} violations, {} undecided, H0 proxy {}",
        m.v.bounds.lower,
        m.v.bounds.upper,
        mu.lower,
        mu.upper,
        log_c.lower,
        log_c.upper,
        scan.cells,
        scan.violations.len(),
        scan.undecided.len(),
        scan.h0_proxy
    );
    if !scan.undecided.is_empty() || !listed {
        return Err(detail);
    }
    if !scan.violations.is_empty() {
        return Err(format!("{detail}; violations: {:?}", scan.violations));
    }
    within(Duration::from_secs(600), start, detail)
}

fn padic() -> Outcome {
    let inst = Instance::i1();
    let fam = build_canonical(&inst, 80).map_err(|e| e.to_string())?;
    let beta = rat(1, 125);
    let p = 5;
    let value = eval_padic(&fam, 0, &beta, p, 40).map_err(|e| e.to_string())?;
    if value.absolute_precision() < 40 {
        return Err(format!("only O(5^{}) certified", value.absolute_precision()));
    }
    let target = reduce_mod(&value.to_rational(), p, 40);
    let mut partial = Rational::zero();
    let mut first = None;
    for k in 0..fam.f[0].truncation() {
        partial += fam.f[0].coeff(k) * pow(&beta.recip(), k as u64 + 1);
        let tail = series_tail_valuation(&fam, 0, &beta, p, k + 1).map_err(|e| e.to_string())?;
        if tail >= 40 {
            first.get_or_insert(k + 1);
            if reduce_mod(&partial, p, 40) != target {
                return Err(format!("partial sum of {} terms differs mod 5^40", k + 1));
            }
        }
    }
    let first = first.ok_or("no partial sum reached 5^40")?;
    Ok(format!(
        "converges (|beta|_5 = 125 > 1); value {} ; partial sums from {first} terms agree mod 5^40",
        value.truncate(8)
    ))
}

fn jordan_pochhammer() -> Outcome {
    let mut cases = vec![Instance::i1(), Instance::i2()];
    cases.push(Instance::from_roots(vec![rat(1, 2), int(-3)], vec![rat(2, 7), rat(-5, 3)]).map_err(|e| e.to_string())?);
    cases.push(Instance::from_roots(vec![int(2), rat(-1, 3), int(5)], vec![rat(1, 9), int(4), rat(-7, 2)]).map_err(|e| e.to_string())?);
    for inst in &cases {
        let (composed, binomial_form) = jp_expand(&inst.a, &inst.b);
        if composed != binomial_form {
            return Err(format!("m = {}: forms differ", inst.m));
        }
    }
    Ok(format!("{} operators with m in {{2, 3}} agree", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cross-oracle series equality", series_equality),
        ("Pade order conditions and closed remainders", pade_orders),
        ("Rodrigues/Leibniz identity", rodrigues_leibniz),
        ("determinant certificates", determinants),
        ("arithmetic identities", arithmetic_identities),
        ("growth and estimate slopes", estimate_slopes),
        ("Perron bound", perron),
        ("measure pipeline", measure_pipeline),
        ("p-adic evaluation", padic),
        ("Jordan-Pochhammer identity", jordan_pochhammer),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS [{}] {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{}] {name}: {d}", i + 1);
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
