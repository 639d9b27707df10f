use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use groupeq::abelian::{parse_descriptor, theorem1_criterion, GroupDescriptor};
use groupeq::linclass::{classify, classify_truncations};
use groupeq::pcgroup::{nilpotency_class, parse_group_file, solve_concrete, ConcreteGroup};
use groupeq::report::Report;
use groupeq::syntax::parse_system;
use groupeq::system::exponent_table;
use groupeq::witness::{verify_ulmbad, KSequence};

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new(files: &[(&str, &str)]) -> Self {
        let dir = tempfile::tempdir().unwrap();
        for (name, text) in files {
            std::fs::write(dir.path().join(name), text).unwrap();
        }
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> (i32, String, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_groupeq")).args(args).current_dir(self.dir.path()).output().unwrap();
        (
            out.status.code().expect("exited normally"),
            String::from_utf8(out.stdout).unwrap(),
            String::from_utf8(out.stderr).unwrap(),
        )
    }

    fn report(&self, args: &[&str]) -> (i32, Report) {
        let mut full = vec!["--format", "report"];
        full.extend_from_slice(args);
        let (code, out, _) = self.run(&full);
        (code, out.parse().expect("report output parses"))
    }
}

const ULMBAD: &str = "varfamily x\ncoefffamily a\nseq k_0 = 0\nseq k_1 = 2\nseq k_i = 2*k_{i-1} + 1 for i>=2\nrule i: x_i x_{i+1}^-{2^(k_i - k_{i-1})} = a_i\n";

fn fixtures() -> Workspace {
    Workspace::new(&[
        ("ulmbad.sys", ULMBAD),
        ("square.sys", "var x\nx^2 = a\n"),
        ("cube.sys", "var x\nx^3 = a\n"),
        ("empty.sys", "# nothing here\n"),
        ("broken.sys", "var x\nx^2 = (a\n"),
        ("pair.sys", "var x, y\nx y^-4 = g1\nx y^-3 = g3\n"),
        ("free.sys", "var x, y, z\n[x, y] z = g1\n"),
        ("c4.grp", "abelian 4\nnames a\n"),
        ("c4pc.grp", "builtin cyclic 2 2\nnames a a2\n"),
        ("c9c27.grp", "builtin cyclic 3 2\nbuiltin cyclic 3 3\n"),
        ("heis.grp", "builtin heisenberg 3 1\n"),
        ("big.grp", "builtin dihedral 6\n"),
        ("broken.grp", "gens 2\norders 2 2\ncomm 1 2: g2\n"),
        ("zp.desc", "component p=* cyclic [1]\n"),
        ("unbounded.desc", "component p=2 cyclic k_i = i for i>=1\n"),
        ("bounded.desc", "component p=2 cyclic [1, 3]\ncomponent p=2 pruefer count=omega\ncomponent p=5 pruefer count=2\n"),
        ("divisible.desc", "torsionfree divisible=yes\n"),
        ("rigid.desc", "torsionfree divisible=no\n"),
        ("broken.desc", "component p=4 cyclic [1]\n"),
    ])
}

#[test]
fn golden_exit_codes() {
    let w = fixtures();
    let cases: &[(&[&str], i32, &str)] = &[
        (&["classify", "ulmbad.sys", "-n", "4"], 0, "unimodular (structural"),
        (&["classify", "square.sys"], 1, "nonsingular; singular primes: {2}; not unimodular"),
        (&["classify", "empty.sys"], 2, ""),
        (&["classify", "broken.sys"], 2, ""),
        (&["classify", "missing.sys"], 2, ""),
        (&["solve", "cube.sys", "c4.grp"], 0, "x = a^3"),
        (&["solve", "square.sys", "c4.grp"], 1, "UNSAT"),
        (&["solve", "square.sys", "c4pc.grp"], 1, "UNSAT"),
        (&["solve", "cube.sys", "broken.grp"], 2, ""),
        (&["solve", "pair.sys", "c9c27.grp"], 0, "x = "),
        (&["solve", "free.sys", "big.grp", "--budget", "1000"], 3, ""),
        (&["solve", "ulmbad.sys", "c4.grp"], 2, ""),
        (&["criterion", "zp.desc", "--theorem", "ulm"], 1, "infinitely many nontrivial first Ulm factors"),
        (&["criterion", "unbounded.desc", "--theorem", "ulm"], 1, "unbounded first Ulm factor at p=2"),
        (&["criterion", "bounded.desc", "--theorem", "ulm"], 0, "CLOSED"),
        (&["criterion", "bounded.desc", "--theorem", "reduced"], 0, "CLOSED"),
        (&["criterion", "zp.desc", "--theorem", "reduced"], 1, "NOT_CLOSED"),
        (&["criterion", "divisible.desc", "--theorem", "torsion-free"], 0, "CLOSED"),
        (&["criterion", "rigid.desc", "--theorem", "torsion-free"], 1, "not divisible"),
        (&["criterion", "zp.desc", "--theorem", "torsion-free"], 2, ""),
        (&["criterion", "broken.desc", "--theorem", "ulm"], 2, ""),
        (&["witness", "ulmbad", "--k", "2,5,11", "-n", "3"], 0, "3\t11\t2^6\t2^6\t2^2\tok"),
        (&["witness", "crossprime", "-n", "4"], 0, "4\t7\t2^2,3^2,5^2,7^2\tok"),
        (&["witness", "ulmbad", "--p", "4"], 2, ""),
        (&["padic", "--p", "2", "--rule", "triangular"], 0, "NOT_PERIODIC_WITHIN(8)"),
        (&["padic", "--p", "2", "--precision", "16", "--rule", "constant:1", "--max-period", "4"], 0, "-1/1"),
        (&["padic", "--p", "2", "--rule", "constant:2"], 2, ""),
        (&["padic", "--p", "2", "--precision", "8", "--rule", "constant:1", "--bound", "100"], 2, ""),
        (&["padic", "--p", "6", "--rule", "constant:1"], 2, ""),
        (&["groupinfo", "heis.grp"], 0, "nilpotency class: 2"),
        (&["groupinfo", "c4.grp"], 0, "nilpotency class: 1"),
        (&["groupinfo", "broken.grp"], 2, ""),
        (&["frobnicate"], 2, ""),
        (&["--jobs", "0", "groupinfo", "heis.grp"], 2, ""),
    ];
    for (args, code, needle) in cases {
        let (got, out, err) = w.run(args);
        assert_eq!(got, *code, "{args:?}: stdout {out} stderr {err}");
        assert!(out.contains(needle), "{args:?}: `{needle}` not in {out}");
        if *code == 2 {
            assert!(!err.is_empty(), "{args:?}: usage errors explain themselves");
        }
    }
}

#[test]
fn help_exits_zero() {
    let w = fixtures();
    let (code, out, _) = w.run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("groupinfo"));
}

#[test]
fn classify_matches_core() {
    let w = fixtures();
    let sys = parse_system(ULMBAD).unwrap();
    let core = classify_truncations(&sys, 5).unwrap().to_report();
    let (_, cli) = w.report(&["classify", "ulmbad.sys", "-n", "5"]);
    assert_eq!(cli, core);

    let sys = parse_system("var x\nx^2 = a\n").unwrap();
    let eqs = sys.equations_or_truncation(0).unwrap();
    let c = classify(&exponent_table(&sys.decls, &eqs).matrix);
    let (_, cli) = w.report(&["classify", "square.sys"]);
    assert_eq!(cli.get("singular_primes"), Some(c.singular_primes.to_string().as_str()));
    assert_eq!(cli.get("unimodular"), Some("false"));
}

#[test]
fn solve_matches_core() {
    let w = fixtures();
    for (sys_file, grp_file) in [("cube.sys", "c4.grp"), ("square.sys", "c4pc.grp"), ("pair.sys", "c9c27.grp"), ("cube.sys", "c4pc.grp")] {
        let sys = parse_system(&std::fs::read_to_string(w.path(sys_file)).unwrap()).unwrap();
        let eqs = sys.equations_or_truncation(0).unwrap();
        let g = parse_group_file(&std::fs::read_to_string(w.path(grp_file)).unwrap()).unwrap();
        let core = solve_concrete(&sys.decls, &eqs, &g, groupeq::pcgroup::DEFAULT_BUDGET, 20).unwrap();
        let (code, cli) = w.report(&["solve", sys_file, grp_file]);
        assert_eq!(cli, core.to_report(), "{sys_file} over {grp_file}");
        assert_eq!(code, if core.is_sat() { 0 } else { 1 });
    }
}

#[test]
fn criterion_matches_core() {
    let w = fixtures();
    for file in ["zp.desc", "unbounded.desc", "bounded.desc"] {
        let GroupDescriptor::Periodic(d) = parse_descriptor(&std::fs::read_to_string(w.path(file)).unwrap()).unwrap() else {
            panic!("periodic fixture");
        };
        let core = theorem1_criterion(&d);
        let (_, out, _) = w.run(&["criterion", file, "--theorem", "ulm"]);
        assert_eq!(out.trim(), core.to_string());
    }
}

#[test]
fn witness_matches_core() {
    let w = fixtures();
    let ks = KSequence::default_rule(2, 1).unwrap();
    let core = verify_ulmbad(&ks, 5).unwrap();
    let (code, cli) = w.report(&["witness", "ulmbad", "-n", "5"]);
    assert_eq!(code, 0);
    for r in &core {
        assert_eq!(cli.get(&format!("n{}.min_order", r.n)), Some(r.min_order.to_string().as_str()));
        assert_eq!(cli.get(&format!("n{}.k_n", r.n)), Some(r.k_n.to_string().as_str()));
    }
    let (_, tsv, _) = w.run(&["--format", "tsv", "witness", "ulmbad", "-n", "5"]);
    assert_eq!(tsv, groupeq::witness::growth_table(&core));
}

#[test]
fn groupinfo_matches_core() {
    let w = fixtures();
    let ConcreteGroup::Pc(g) = parse_group_file("builtin heisenberg 3 1").unwrap() else { unreachable!() };
    let (_, cli) = w.report(&["groupinfo", "heis.grp"]);
    assert_eq!(cli.get("class"), Some(nilpotency_class(&g).unwrap().to_string().as_str()));
    assert_eq!(cli.get("order"), Some("27"));
    assert_eq!(cli.get("upper_series_orders"), Some("1,3,27"));
}

#[test]
fn output_is_independent_of_jobs() {
    let w = fixtures();
    let mut seen: HashMap<String, String> = HashMap::new();
    for jobs in ["1", "2", "4"] {
        let (_, out, _) = w.run(&["--jobs", jobs, "solve", "free.sys", "heis.grp", "--limit", "1000"]);
        seen.insert(jobs.to_string(), out);
    }
    assert_eq!(seen["1"], seen["2"]);
    assert_eq!(seen["1"], seen["4"]);
    assert!(seen["1"].contains("solutions in total") || seen["1"].lines().count() > 1);
}

#[test]
fn reports_round_trip() {
    let w = fixtures();
    for args in [
        &["classify", "ulmbad.sys", "-n", "3"][..],
        &["solve", "cube.sys", "c4.grp"],
        &["padic", "--p", "3", "--precision", "20", "--rule", "periodic:1,2"],
        &["groupinfo", "c9c27.grp"],
    ] {
        let (_, r) = w.report(args);
        let again: Report = r.to_string().parse().unwrap();
        assert_eq!(again, r);
        assert!(!r.entries().is_empty());
    }
}

#[test]
fn in_process_entry_point() {
    let w = fixtures();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let path = w.path("cube.sys");
    let grp = w.path("c4.grp");
    let code = groupeq_cli::run(
        ["groupeq", "solve", path.to_str().unwrap(), grp.to_str().unwrap()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().starts_with("x = a^3"));
    assert!(Path::new(&path).exists());
}
