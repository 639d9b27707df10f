use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigUint;

use groupeq::abelian::{
    abelian_reduced_criterion, parse_descriptor, theorem1_criterion, theorem2_criterion, GroupDescriptor, Verdict,
};
use groupeq::group::FiniteGroup;
use groupeq::linclass::{classify, classify_truncations};
use groupeq::padic::{periodicity_verdict, rational_reconstruct, solve_series, DigitRule};
use groupeq::pcgroup::{
    central_series, format_abelian_element, parse_group_file, solve_concrete, CentralSeries, ConcreteGroup,
    SeriesError, SeriesKind, SERIES_LIMIT,
};
use groupeq::report::Report;
use groupeq::syntax::parse_system;
use groupeq::system::{exponent_table, EquationSystem};
use groupeq::witness::{
    crossprime_system, first_primes, growth_table, ulmbad_system, verify_crossprime, verify_ulmbad, KRule, KSequence,
};

use crate::{Command, Failure, Family, Outcome, PadicArgs, Theorem, EXIT_NEGATIVE, EXIT_OK};

pub fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Classify { system, truncation } => classify_cmd(system, *truncation),
        Command::Solve { system, group, truncation, budget, limit } => {
            solve_cmd(system, group, *truncation, *budget, *limit)
        }
        Command::Criterion { descriptor, theorem } => criterion_cmd(descriptor, *theorem),
        Command::Witness { family } => witness_cmd(family),
        Command::Padic(args) => padic_cmd(args),
        Command::Groupinfo { group } => groupinfo_cmd(group),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_system(path: &Path) -> Result<EquationSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_group(path: &Path) -> Result<ConcreteGroup, Failure> {
    parse_group_file(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn code_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn classify_cmd(path: &Path, n: usize) -> Result<Outcome, Failure> {
    let sys = read_system(path)?;
    if sys.is_generated() {
        if n == 0 {
            return Err(Failure::usage("truncation must be at least 1"));
        }
        let r = classify_truncations(&sys, n).map_err(Failure::usage)?;
        let mut human = String::new();
        for (i, c) in r.truncations.iter().enumerate() {
            writeln!(human, "n={}: {}", i + 1, c.summary()).unwrap();
        }
        writeln!(human, "{}", r.verdict()).unwrap();
        return Ok(Outcome { code: code_for(r.all_unimodular()), human, report: r.to_report(), tsv: None });
    }
    let eqs = sys.equations_or_truncation(0).map_err(Failure::usage)?;
    if eqs.is_empty() {
        return Err(Failure::usage(format!("{}: the system has no equations", path.display())));
    }
    let table = exponent_table(&sys.decls, &eqs);
    let c = classify(&table.matrix);
    let mut report = c.to_report();
    report.push("verdict", c.summary());
    Ok(Outcome { code: code_for(c.unimodular), human: format!("{}\n", c.summary()), report, tsv: None })
}

fn solve_cmd(system: &Path, group: &Path, n: Option<usize>, budget: u64, limit: usize) -> Result<Outcome, Failure> {
    let sys = read_system(system)?;
    let g = read_group(group)?;
    let eqs = match (sys.is_generated(), n) {
        (true, None) => return Err(Failure::usage("rule-generated system: pass -n to choose a truncation")),
        (true, Some(0)) => return Err(Failure::usage("truncation must be at least 1")),
        (true, Some(n)) => sys.truncate(n).map_err(Failure::usage)?,
        (false, _) => sys.equations_or_truncation(0).map_err(Failure::usage)?,
    };
    if eqs.is_empty() {
        return Err(Failure::usage(format!("{}: the system has no equations", system.display())));
    }
    let sol = solve_concrete(&sys.decls, &eqs, &g, budget, limit).map_err(|e| {
        use groupeq::pcgroup::{ConcreteSolveError, SolveError};
        match &e {
            _ if e.is_budget() => Failure::budget(&e),
            ConcreteSolveError::Pc(SolveError::Series(SeriesError::TooLarge(_))) => Failure::budget(&e),
            ConcreteSolveError::Mismatch(_) => Failure { code: EXIT_NEGATIVE, message: e.to_string() },
            _ => Failure::usage(&e),
        }
    })?;
    let mut human = String::new();
    match &sol.obstruction {
        Some(why) => writeln!(human, "UNSAT: {why}").unwrap(),
        None => {
            for i in 0..sol.solutions.len() {
                writeln!(human, "{}", sol.format_solution(i)).unwrap();
            }
            if BigUint::from(sol.solutions.len()) < sol.count {
                writeln!(human, "({} solutions in total; {} shown)", sol.count, sol.solutions.len()).unwrap();
            }
        }
    }
    writeln!(human, "method: {}", sol.method).unwrap();
    Ok(Outcome { code: code_for(sol.is_sat()), human, report: sol.to_report(), tsv: None })
}

fn criterion_cmd(path: &Path, theorem: Theorem) -> Result<Outcome, Failure> {
    let desc = parse_descriptor(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let verdict: Verdict = match (theorem, &desc) {
        (Theorem::Ulm, GroupDescriptor::Periodic(d)) => theorem1_criterion(d),
        (Theorem::Reduced, GroupDescriptor::Periodic(d)) => abelian_reduced_criterion(d),
        (Theorem::TorsionFree, GroupDescriptor::TorsionFree { divisible }) => theorem2_criterion(*divisible),
        (Theorem::TorsionFree, _) => {
            return Err(Failure::usage("--theorem torsion-free needs a `torsionfree divisible=yes|no` descriptor"))
        }
        (_, _) => return Err(Failure::usage("this criterion needs a periodic descriptor (`component ...` lines)")),
    };
    let mut report = Report::new();
    report.push("verdict", if verdict.is_closed() { "CLOSED" } else { "NOT_CLOSED" });
    if let Verdict::NotClosed(reasons) = &verdict {
        for r in reasons {
            report.push("reason", r);
        }
    }
    Ok(Outcome { code: code_for(verdict.is_closed()), human: format!("{verdict}\n"), report, tsv: None })
}

fn witness_cmd(family: &Family) -> Result<Outcome, Failure> {
    match family {
        Family::Ulmbad { p, m, k, n } => {
            let ks = match k {
                Some(v) => KSequence::new(*p, *m, KRule::Explicit(v.clone())),
                None => KSequence::default_rule(*p, *m),
            }
            .map_err(Failure::usage)?;
            if *n == 0 {
                return Err(Failure::usage("-n must be at least 1"));
            }
            let sys = ulmbad_system(&ks).map_err(Failure::usage)?;
            let reports = verify_ulmbad(&ks, *n).map_err(Failure::usage)?;
            let table = growth_table(&reports);
            let ok = reports.iter().all(|r| r.holds);
            let mut report = Report::new();
            report.push("family", "ulmbad").push("k_rule", &ks);
            for r in &reports {
                let key = format!("n{}", r.n);
                report
                    .push(format!("{key}.k_n"), r.k_n)
                    .push(format!("{key}.telescoped_order"), r.telescoped_order)
                    .push(format!("{key}.min_order"), r.min_order)
                    .push(format!("{key}.doubling_bound"), r.doubling_bound)
                    .push(format!("{key}.holds"), r.holds);
            }
            report.push("verdict", if ok { "ok" } else { "FAIL" });
            let human = format!("# system\n{sys}\n# growth\n{table}");
            Ok(Outcome { code: code_for(ok), human, report, tsv: Some(table) })
        }
        Family::Crossprime { m, primes, n } => {
            let data: Vec<(u64, u64)> = match primes {
                Some(ps) => ps.iter().map(|&p| (p, *m)).collect(),
                None => first_primes(*n, *m),
            };
            if *n == 0 || *n > data.len() {
                return Err(Failure::usage(format!("-n must be between 1 and the number of primes ({})", data.len())));
            }
            let sys = crossprime_system(&data).map_err(Failure::usage)?;
            let mut table = String::from("n\tp_n\tmin_parts\tverdict\n");
            let mut report = Report::new();
            report.push("family", "crossprime");
            let mut ok = true;
            for i in 1..=*n {
                let r = verify_crossprime(&data, i).map_err(Failure::usage)?;
                let parts: Vec<String> = r.parts.iter().map(ToString::to_string).collect();
                writeln!(table, "{i}\t{}\t{}\t{}", data[i - 1].0, parts.join(","), if r.holds { "ok" } else { "FAIL" })
                    .unwrap();
                report.push(format!("n{i}.min_parts"), parts.join(",")).push(format!("n{i}.holds"), r.holds);
                ok &= r.holds;
            }
            report.push("verdict", if ok { "ok" } else { "FAIL" });
            let human = format!("# system\n{sys}\n# minimal prime parts of x\n{table}");
            Ok(Outcome { code: code_for(ok), human, report, tsv: Some(table) })
        }
    }
}

fn padic_cmd(a: &PadicArgs) -> Result<Outcome, Failure> {
    if !groupeq::arith::is_prime_u64(a.p) {
        return Err(Failure::usage(format!("{} is not prime", a.p)));
    }
    let rule: DigitRule = a.rule.parse().map_err(Failure::usage)?;
    let bound: BigUint = match &a.bound {
        Some(b) => b.parse().map_err(|_| Failure::usage(format!("bad bound `{b}`")))?,
        None => num_traits::pow(BigUint::from(a.p), 7 * a.precision / 16),
    };
    let sol = solve_series(&rule, a.p, a.precision).map_err(Failure::usage)?;
    let periodicity = periodicity_verdict(sol.x1(), a.max_period, a.min_repeats).map_err(Failure::usage)?;
    let fraction = rational_reconstruct(sol.x1(), &bound).map_err(Failure::usage)?;
    let recurrence = match sol.recurrence_failure() {
        None => format!("verified at {} digits", a.precision),
        Some(k) => format!("fails at k={k}"),
    };
    let fraction_text = match &fraction {
        Some((num, den)) => format!("{num}/{den}"),
        None => format!("none with |a|, b <= {bound}"),
    };
    let mut report = Report::new();
    report
        .push("p", a.p)
        .push("precision", a.precision)
        .push("rule", &rule)
        .push("digits", sol.x1())
        .push("recurrence", &recurrence)
        .push("periodicity", periodicity)
        .push("reconstruction", &fraction_text);
    let human = format!(
        "x_1 digits (least significant first): {}\nrecurrence x_k = c_k + p x_(k+1): {recurrence}\nperiodicity: {periodicity}\nrational reconstruction: {fraction_text}\n",
        sol.x1()
    );
    Ok(Outcome { code: code_for(sol.recurrence_failure().is_none()), human, report, tsv: None })
}

fn series_lines<E: Clone + Ord>(series: &CentralSeries<E>, show: &dyn Fn(&E) -> String, out: &mut String, report: &mut Report) {
    let kind = series.kind;
    let orders: Vec<String> = series.subgroups.iter().map(|s| s.order().to_string()).collect();
    writeln!(out, "{kind} central series orders: {}", orders.join(" ")).unwrap();
    report.push(format!("{kind}_series_orders"), orders.join(","));
    for (i, s) in series.subgroups.iter().enumerate() {
        let gens: Vec<String> = s.generators.iter().map(show).collect();
        let gens = if gens.is_empty() { "1".to_string() } else { gens.join(", ") };
        writeln!(out, "  term {i}: order {}, generated by {gens}", s.order()).unwrap();
        report.push(format!("{kind}_series.{i}"), gens);
    }
}

fn describe<G: FiniteGroup>(g: &G, show: &dyn Fn(&G::Elem) -> String, out: &mut String, report: &mut Report) -> Result<bool, Failure> {
    let map = |e: SeriesError| match e {
        SeriesError::TooLarge(_) => Failure::budget(e),
        SeriesError::NotNilpotent(_) => Failure { code: EXIT_NEGATIVE, message: e.to_string() },
    };
    let upper = central_series(g, SeriesKind::Upper).map_err(map)?;
    let lower = central_series(g, SeriesKind::Lower).map_err(map)?;
    writeln!(out, "nilpotency class: {}", lower.class()).unwrap();
    report.push("class", lower.class());
    series_lines(&upper, show, out, report);
    series_lines(&lower, show, out, report);
    Ok(upper.class() == lower.class())
}

fn groupinfo_cmd(path: &Path) -> Result<Outcome, Failure> {
    let g = read_group(path)?;
    let mut human = String::new();
    let mut report = Report::new();
    let order = g.order();
    writeln!(human, "order: {order}").unwrap();
    report.push("order", &order);
    let consistent = match &g {
        ConcreteGroup::Pc(pc) => {
            let names: Vec<String> = pc.names().iter().map(ToString::to_string).collect();
            let orders: Vec<String> = pc.relative_orders().iter().map(ToString::to_string).collect();
            writeln!(human, "generators: {} (relative orders {})", names.join(" "), orders.join(" ")).unwrap();
            report.push("generators", names.join(" ")).push("relative_orders", orders.join(" "));
            describe(pc, &|x| pc.format_element(x), &mut human, &mut report)?
        }
        ConcreteGroup::Abelian { group, names } => {
            writeln!(human, "abelian: {group}").unwrap();
            report.push("abelian", group);
            if order > BigUint::from(SERIES_LIMIT) {
                let class = usize::from(order > BigUint::from(1u32));
                writeln!(human, "nilpotency class: {class}\n(series omitted: order above {SERIES_LIMIT})").unwrap();
                report.push("class", class);
                true
            } else {
                describe(group, &|x| format_abelian_element(names, x), &mut human, &mut report)?
            }
        }
    };
    Ok(Outcome { code: code_for(consistent), human, report, tsv: None })
}
