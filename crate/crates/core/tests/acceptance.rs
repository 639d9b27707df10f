//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use groupeq::abelian::{
    parse_descriptor, solve_over_finite_abelian, theorem1_criterion, FiniteAbelianGroup, GroupDescriptor, Reason,
    Verdict,
};
use groupeq::group::{CayleyTable, FiniteGroup, Group};
use groupeq::linclass::{classify_truncations, det, smith_normal_form, ExponentMatrix};
use groupeq::padic::{periodicity_verdict, rational_reconstruct, solve_series, DigitRule, PAdicInt, Periodicity};
use groupeq::pcgroup::{
    brute_force_solve, builtin_catalog, central_series, cyclic_of_order, dihedral, heisenberg, lift_solve,
    nilpotency_class, power_subgroup_check, PcGroup, SeriesKind,
};
use groupeq::syntax::parse_word;
use groupeq::system::{exponent_table, Declarations, Equation};
use groupeq::witness::{
    crossprime_all_primes, crossprime_system, first_primes, telescope, ulmbad_system, verify_ulmbad, KRule,
    KSequence,
};
use groupeq::word::{exponent_sum, Symbol};

type Check = Result<String, String>;
type Criterion = (u32, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let decls = Declarations::with_vars(&["x", "y"]);
    let start = Instant::now();
    let w = parse_word("x^2 y^-3 g1 x y^2 x y^2 x^-1 y^-2 g2", &decls).map_err(|e| e.to_string())?;
    let s = exponent_sum(&w, &Symbol::plain("y"));
    let elapsed = start.elapsed();
    ensure(s == BigInt::from(-1), || format!("exponent sum of y is {s}, want -1"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("exponent sum of y = {s}"))
}

fn criterion_2() -> Check {
    let mut checked = 0;
    let last_divisor_is_one = |r: &groupeq::linclass::TruncationReport, what: &str| -> Result<(), String> {
        for (n, c) in r.truncations.iter().enumerate() {
            ensure(c.unimodular && c.elementary_divisors.last().is_some_and(|d| d.is_one()), || {
                format!("{what} truncation {} is not unimodular: {}", n + 1, c.summary())
            })?;
        }
        Ok(())
    };
    let ulmbad = ulmbad_system(&KSequence::default_rule(2, 1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let r = classify_truncations(&ulmbad, 12).map_err(|e| e.to_string())?;
    last_divisor_is_one(&r, "bidiagonal")?;
    checked += r.truncations.len();
    let listed = crossprime_system(&first_primes(8, 1)).map_err(|e| e.to_string())?;
    let r = classify_truncations(&listed, 8).map_err(|e| e.to_string())?;
    last_divisor_is_one(&r, "cross-prime (first 8 primes)")?;
    checked += r.truncations.len();
    let every = crossprime_all_primes(1);
    let r = classify_truncations(&every, 12).map_err(|e| e.to_string())?;
    last_divisor_is_one(&r, "cross-prime (all primes)")?;
    checked += r.truncations.len();
    Ok(format!("{checked} truncations unimodular, d_r = 1"))
}

/// Minimal order of `x_1` over truncation `n` of the bidiagonal system, by
/// running the brute-force solver over every assignment.
fn exhaustive_min_order(ks: &KSequence, n: usize) -> Result<(u64, usize), String> {
    let k = ks.terms(n).map_err(|e| e.to_string())?;
    let sys = ulmbad_system(ks).map_err(|e| e.to_string())?;
    let eqs = sys.truncate(n).map_err(|e| e.to_string())?;
    let group = FiniteAbelianGroup::from_orders(&k.iter().map(|&e| 1u64 << e).collect::<Vec<_>>())?;
    let coeffs: HashMap<_, _> = (0..n).map(|i| (Symbol::indexed("a", i as u64 + 1), group.basis(i))).collect();
    let sols = brute_force_solve(&sys.decls, &eqs, &group, &coeffs, 5_000_000).map_err(|e| e.to_string())?;
    let x1 = sols.variables.iter().position(|v| *v == Symbol::indexed("x", 1)).ok_or("x_1 missing")?;
    let min = sols.solutions.iter().map(|s| group.element_order(&s[x1]) as u64).min().ok_or("no solutions")?;
    Ok((min, sols.solutions.len()))
}

fn criterion_3() -> Check {
    let ks = KSequence::new(2, 1, KRule::Explicit(vec![2, 5, 11])).map_err(|e| e.to_string())?;
    let reports = verify_ulmbad(&ks, 3).map_err(|e| e.to_string())?;
    let want = [4u64, 8, 64];
    for (r, &w) in reports.iter().zip(&want) {
        let tele = telescope(&ks, r.n).map_err(|e| e.to_string())?;
        ensure(tele.order == BigUint::from(w) && tele.closed_form == BigUint::from(w), || {
            format!("n={}: telescoped order {} (closed form {}), want {w}", r.n, tele.order, tele.closed_form)
        })?;
        ensure(r.min_order.value() >= BigUint::from(w), || format!("n={}: min order {} < {w}", r.n, r.min_order))?;
        if r.n >= 2 {
            let bound = BigUint::one() << (1u64 << (r.n - 2));
            ensure(r.min_order.value() >= bound, || format!("n={}: min order {} below doubling bound", r.n, r.min_order))?;
        }
        ensure(r.holds, || format!("n={}: report says FAIL", r.n))?;
    }
    let mut enumerated = Vec::new();
    for n in 1..=2 {
        let (min, count) = exhaustive_min_order(&ks, n)?;
        let sys = ulmbad_system(&ks).map_err(|e| e.to_string())?;
        let k = ks.terms(n).map_err(|e| e.to_string())?;
        let group = FiniteAbelianGroup::from_orders(&k.iter().map(|&e| 1u64 << e).collect::<Vec<_>>())?;
        let coeffs: HashMap<_, _> = (0..n).map(|i| (Symbol::indexed("a", i as u64 + 1), group.basis(i))).collect();
        let sol = solve_over_finite_abelian(&sys.decls, &sys.truncate(n).map_err(|e| e.to_string())?, &group, &coeffs)
            .map_err(|e| e.to_string())?;
        ensure(sol.size() == BigUint::from(count), || format!("n={n}: parametrization has {} solutions, enumeration {count}", sol.size()))?;
        ensure(BigUint::from(min) == reports[n - 1].min_order.value(), || {
            format!("n={n}: enumerated min order {min}, parametrized {}", reports[n - 1].min_order)
        })?;
        enumerated.push(min);
    }
    let mins: Vec<String> = reports.iter().map(|r| r.min_order.value().to_string()).collect();
    Ok(format!("min orders {} (enumerated {:?} for n <= 2)", mins.join(", "), enumerated))
}

/// Random word over the variables and two coefficients, as text.
fn random_word(rng: &mut StdRng, vars: &[&str]) -> String {
    let len = rng.gen_range(1..=6);
    let letters: Vec<&str> = vars.iter().copied().chain(["c1", "c2"]).collect();
    (0..len)
        .map(|_| {
            let e = loop {
                let e: i64 = rng.gen_range(-4..=4);
                if e != 0 {
                    break e;
                }
            };
            format!("{}^{e}", letters[rng.gen_range(0..letters.len())])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Square systems whose exponent matrix has determinant ±1.
fn random_unimodular_system(rng: &mut StdRng, n_vars: usize) -> (Declarations, Vec<Equation>) {
    let names = &["x", "y"][..n_vars];
    let decls = Declarations::with_vars(names);
    loop {
        let eqs: Vec<Equation> = (0..n_vars)
            .map(|_| Equation::new(parse_word(&random_word(rng, names), &decls).expect("generated word parses")))
            .collect();
        let table = exponent_table(&decls, &eqs);
        if table.columns.len() == n_vars && det(&table.matrix.to_dense()).abs().is_one() {
            return (decls, eqs);
        }
    }
}

fn oracle_sweep(name: &str, g: &PcGroup, rng: &mut StdRng, per_size: usize) -> Result<usize, String> {
    let elems = g.elements();
    let mut count = 0;
    for n_vars in 1..=2 {
        for _ in 0..per_size {
            let (decls, eqs) = random_unimodular_system(rng, n_vars);
            let coeffs: HashMap<_, _> = ["c1", "c2"]
                .iter()
                .map(|c| (Symbol::plain(c), elems[rng.gen_range(0..elems.len())].clone()))
                .collect();
            let brute = brute_force_solve(&decls, &eqs, g, &coeffs, 1_000_000).map_err(|e| e.to_string())?;
            let (_, lifted) = lift_solve(&decls, &eqs, g, &coeffs).map_err(|e| format!("{name}: {e}"))?;
            let shown: Vec<String> = eqs.iter().map(ToString::to_string).collect();
            ensure(brute.solutions.len() == 1, || {
                format!("{name}: {} solutions for {}", brute.solutions.len(), shown.join("; "))
            })?;
            ensure(brute.solutions[0] == lifted, || format!("{name}: lift differs from brute force on {}", shown.join("; ")))?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_4() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let mut groups: Vec<(String, PcGroup)> =
        (2..=27).map(|n| (format!("C{n}"), cyclic_of_order(n).expect("cyclic"))).collect();
    groups.push(("Heis(2)".into(), heisenberg(2, 1).expect("heisenberg")));
    groups.push(("Heis(3)".into(), heisenberg(3, 1).expect("heisenberg")));
    groups.push(("D8".into(), dihedral(3).expect("dihedral")));
    let mut total = 0;
    for (name, g) in &groups {
        total += oracle_sweep(name, g, &mut rng, 20)?;
    }
    Ok(format!("{total} systems over {} groups, each with one solution equal to the lift", groups.len()))
}

fn lower_term(t: &CayleyTable, i: usize) -> Result<BTreeSet<u32>, String> {
    let series = central_series(t, SeriesKind::Lower).map_err(|e| e.to_string())?;
    Ok(series.subgroups.get(i - 1).map_or_else(|| BTreeSet::from([t.identity()]), |s| s.elements.iter().copied().collect()))
}

fn closure(t: &CayleyTable, gens: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut set = BTreeSet::from([t.identity()]);
    let mut stack = vec![t.identity()];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = t.mul(&x, g);
            if set.insert(y) {
                stack.push(y);
            }
        }
    }
    set
}

fn criterion_5() -> Check {
    let catalog = builtin_catalog();
    let (mut identity_groups, mut power_groups) = (0, 0);
    for (name, g) in &catalog {
        let (t, _) = CayleyTable::from_group(g);
        let all = t.elements();
        if t.len() <= 64 {
            for a in &all {
                for b in &all {
                    let ab = t.commutator(a, b);
                    for c in &all {
                        let lhs = t.commutator(a, &t.mul(b, c));
                        let rhs = t.mul(&t.mul(&t.commutator(a, c), &ab), &t.commutator(&ab, c));
                        ensure(lhs == rhs, || format!("{name}: [a,bc] identity fails"))?;
                    }
                }
            }
            let gamma3 = lower_term(&t, 3)?;
            for g in &all {
                for r in &all {
                    let gr = t.commutator(g, r);
                    for n in -4i64..=8 {
                        let x = t.mul(&t.commutator(g, &t.pow_i64(r, n)), &t.pow_i64(&gr, -n));
                        ensure(gamma3.contains(&x), || format!("{name}: power congruence fails for n={n}"))?;
                    }
                }
            }
            identity_groups += 1;
        }
        if t.len() <= 81 && nilpotency_class(g).map_err(|e| e.to_string())? <= 2 {
            for n in [2i64, 3] {
                let gens: BTreeSet<u32> = all.iter().map(|x| t.pow_i64(x, n * n)).collect();
                let nth: BTreeSet<u32> = all.iter().map(|x| t.pow_i64(x, n)).collect();
                ensure(closure(&t, &gens).is_subset(&nth), || format!("{name}: <G^{}> not inside G^{n}", n * n))?;
                ensure(power_subgroup_check(g, n as u32).map_err(|e| e.to_string())?, || {
                    format!("{name}: library power check disagrees for n={n}")
                })?;
            }
            power_groups += 1;
        }
    }
    Ok(format!("identities on {identity_groups} groups, power inclusion on {power_groups} groups"))
}

fn periodic(text: &str) -> Result<groupeq::abelian::PeriodicAbelianDescriptor, String> {
    match parse_descriptor(text).map_err(|e| e.to_string())? {
        GroupDescriptor::Periodic(d) => Ok(d),
        other => Err(format!("expected a periodic descriptor, got {other:?}")),
    }
}

fn criterion_6() -> Check {
    let every_prime = theorem1_criterion(&periodic("component p=* cyclic [1]")?);
    ensure(every_prime == Verdict::NotClosed(vec![Reason::InfinitelyManyNontrivialUlmFactors]), || {
        format!("one Z/p per prime: {every_prime}")
    })?;
    let unbounded = theorem1_criterion(&periodic("component p=2 cyclic k_i = i for i>=1")?);
    ensure(
        unbounded == Verdict::NotClosed(vec![Reason::UnboundedUlmFactor(groupeq::abelian::PrimeRef::Prime(2))]),
        || format!("unbounded 2-group: {unbounded}"),
    )?;
    let bounded = theorem1_criterion(&periodic(
        "component p=2 cyclic [1, 3]\ncomponent p=2 pruefer count=omega\ncomponent p=5 pruefer count=2",
    )?);
    ensure(bounded == Verdict::Closed, || format!("bounded Ulm factor: {bounded}"))?;
    Ok(format!("{every_prime} | {unbounded} | {bounded}"))
}

fn criterion_7() -> Check {
    let mut series_checked = 0;
    let rules = [
        DigitRule::Triangular,
        DigitRule::Constant(1),
        DigitRule::Periodic(vec![1, 0, 1]),
        DigitRule::Explicit(vec![1, 1, 0, 1]),
    ];
    for rule in &rules {
        for p in [2u64, 3, 5] {
            for n in [8usize, 16, 32, 64] {
                let s = solve_series(rule, p, n).map_err(|e| e.to_string())?;
                ensure(s.recurrence_failure().is_none(), || format!("{rule} p={p} N={n}: recurrence fails"))?;
                series_checked += 1;
            }
        }
    }
    let minus_one = solve_series(&DigitRule::Constant(1), 2, 64).map_err(|e| e.to_string())?;
    let want = PAdicInt::from_integer(&BigInt::from(-1), 2, 64).map_err(|e| e.to_string())?;
    ensure(*minus_one.x1() == want, || format!("constant 1 at p=2 gives {}", minus_one.x1()))?;

    let mut reconstructed = 0;
    for p in [2u64, 3, 5] {
        for t in 1..=4u32 {
            let pt = p.pow(t);
            for code in 0..pt {
                let digits: Vec<u64> = (0..t).map(|i| code / p.pow(i) % p).collect();
                let x = solve_series(&DigitRule::Periodic(digits.clone()), p, 40).map_err(|e| e.to_string())?;
                let (a, b) = rational_reconstruct(x.x1(), &BigUint::from(pt))
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("p={p} period {digits:?}: no fraction found"))?;
                ensure((BigInt::from(pt) - 1u32).is_multiple_of(&b), || {
                    format!("p={p} period {digits:?}: {a}/{b} has denominator not dividing {p}^{t} - 1")
                })?;
                reconstructed += 1;
            }
        }
    }

    let tri = solve_series(&DigitRule::Triangular, 2, 64).map_err(|e| e.to_string())?;
    let window = BigUint::one() << 28u32;
    let found = rational_reconstruct(tri.x1(), &window).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || format!("aperiodic pattern reconstructs to {found:?}"))?;
    let verdict = periodicity_verdict(tri.x1(), 8, 2).map_err(|e| e.to_string())?;
    ensure(verdict.verdict == Periodicity::NotPeriodicWithin(8), || format!("aperiodic pattern: {verdict}"))?;
    Ok(format!("{series_checked} series, {reconstructed} periodic rules, aperiodic: {verdict}"))
}

/// Rank over F_p by row reduction, independent of the Smith form.
fn rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = (1..p).find(|&x| x * m[rank][c] % p == 1).expect("field");
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % p;
                for j in 0..cols {
                    m[r][j] = (m[r][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    for case in 0..1000 {
        let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let m = ExponentMatrix::from_i64(&refs);
        let snf = smith_normal_form(&m);
        snf.verify(&m).map_err(|e| format!("case {case} ({r}x{c}): {e}"))?;
        ensure(det(&snf.u).abs().is_one() && det(&snf.v).abs().is_one(), || format!("case {case}: transform not unimodular"))?;
        let nz: Vec<&BigInt> = snf.diagonal.iter().filter(|d| !d.is_zero()).collect();
        ensure(nz.windows(2).all(|w| w[1].is_multiple_of(w[0])), || format!("case {case}: divisibility chain broken"))?;
        ensure(snf.diagonal.iter().all(|d| !d.is_negative()), || format!("case {case}: negative divisor"))?;
        for p in [2i64, 3, 5, 7] {
            let want = rank_mod_p(&rows, p);
            let got = snf.rank_mod(&BigInt::from(p));
            ensure(got == want, || format!("case {case}: rank mod {p} is {got}, elimination gives {want}"))?;
        }
    }
    Ok("1000 matrices".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, Duration::from_secs(1), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(10), criterion_3),
        (4, Duration::from_secs(60), criterion_4),
        (5, Duration::from_secs(60), criterion_5),
        (6, Duration::from_secs(1), criterion_6),
        (7, Duration::from_secs(5), criterion_7),
        (8, Duration::from_secs(30), criterion_8),
    ];
    let mut failed = 0;
    for (n, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= limit {
                Ok(d)
            } else {
                Err(format!("{d}; took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({elapsed:.2?}) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({elapsed:.2?}) {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
