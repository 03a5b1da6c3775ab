//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Frozen values (cardinalities of A_n and F_n, h_A(9), the r_5 word) come
//! from brute-force enumeration done independently of this crate.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use rfib_core::counting::{
    count_a_closed, count_a_rec, length_l, length_l_binet_exact, metallic_binet_exact, CountingContext,
};
use rfib_core::entropy::{entropy_estimate, entropy_estimate_for, gap_bound, h_a, h_f, DEFAULT_N_CAP};
use rfib_core::factors::{count_f, factor_set_any};
use rfib_core::family::sample_chain;
use rfib_core::inflation::build_a;
use rfib_core::{Budget, FactorTable, GenerationTable, Params, SupersetB, WordSet};

use rfib::verify::{
    self, run_suite, CheckKind, Outcome, PointResult, SuiteConfig, SuiteReport,
};

type CriterionResult = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn set(words: &[&str]) -> WordSet {
    WordSet::parse(&words.join(" "), None).unwrap()
}

fn points<'a>(report: &'a SuiteReport, kind: CheckKind) -> Vec<&'a PointResult> {
    report.check(kind).flat_map(|c| c.points.iter()).collect()
}

fn all_pass(report: &SuiteReport, kind: CheckKind) -> Result<usize, String> {
    let pts = points(report, kind);
    ensure!(!pts.is_empty(), "{} has no grid points", kind.name());
    for p in &pts {
        ensure!(
            p.outcome == Outcome::Pass,
            "{} at {:?}: {:?} values={:?} witnesses={:?}",
            kind.name(),
            p.point,
            p.outcome,
            p.values,
            p.witnesses
        );
    }
    Ok(pts.len())
}

fn peak_rss_mb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024)
}

fn length_sequences() -> CriterionResult {
    let start = Instant::now();
    let mut literal_matches = Vec::new();
    for m in 1..=3u32 {
        // plain recursion, independent of the library
        let (mut prev, mut cur) = (BigUint::from(1u32), BigUint::from(1u32));
        for n in 1..=90usize {
            if n >= 3 {
                let next = &cur * m + &prev;
                prev = std::mem::replace(&mut cur, next);
            }
            let l = length_l(m, n);
            ensure!(l == cur, "m={m} n={n}: length_l {l} vs recursion {cur}");
            let binet = length_l_binet_exact(m, n);
            ensure!(binet == cur, "m={m} n={n}: closed form {binet} vs {cur}");
        }
        // the textbook metallic closed form, (α^n - β^n)/√(m²+4)
        let literal = (1..=90).all(|n| metallic_binet_exact(m, n) == length_l(m, n));
        literal_matches.push((m, literal));
        if m >= 2 {
            // it is the shifted sequence P with l_n = P_n - (m-1) P_{n-1}
            for n in 2..=90 {
                let p = metallic_binet_exact(m, n);
                let shifted = metallic_binet_exact(m, n - 1) * (m - 1) + length_l(m, n);
                ensure!(p == shifted, "m={m} n={n}: metallic form is not the shifted sequence");
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    ensure!(
        literal_matches == [(1, true), (2, false), (3, false)],
        "unexpected literal closed-form pattern {literal_matches:?}"
    );
    Ok(format!(
        "recursion == closed form for m=1..3, n<=90 in {elapsed:?}; textbook (α^n-β^n)/√(m²+4) equals l_n only for m=1 (finding)"
    ))
}

fn enumeration_vs_closed_form() -> CriterionResult {
    let start = Instant::now();
    let expected: [(u32, &[u64]); 3] = [
        (1, &[2, 3, 8, 30, 288, 10080, 3317760]),
        (2, &[3, 15, 945]),
        (3, &[4, 112]),
    ];
    let mut checked = 0;
    for (m, values) in expected {
        for (i, &v) in values.iter().enumerate() {
            let n = i + 3;
            let built = build_a(m, n, Budget::DEFAULT).map_err(|e| format!("m={m} n={n}: {e}"))?;
            let closed = count_a_closed(m, n).map_err(|e| e.to_string())?;
            let rec = count_a_rec(m, n).map_err(|e| e.to_string())?;
            let size = BigUint::from(built.len());
            ensure!(
                size == BigUint::from(v) && closed == size && rec == size,
                "m={m} n={n}: enumerated {size}, closed {closed}, rec {rec}, expected {v}"
            );
            ensure!(built.word_len() == CountingContext::new(m).length_usize(n), "m={m} n={n}: word length");
            checked += 1;
        }
        for n in 1..=2 {
            ensure!(build_a(m, n, Budget::DEFAULT).unwrap().len() == 1, "m={m}: A_{n} is not a singleton");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    let rss = peak_rss_mb();
    if let Some(mb) = rss {
        ensure!(mb <= 4096, "peak RSS {mb} MB");
    }
    Ok(format!(
        "{checked} generations agree (largest |A_9| = 3317760 for m=1) in {elapsed:.2?}, peak RSS {} MB",
        rss.map_or("n/a".to_string(), |m| m.to_string())
    ))
}

fn union_product(report: &SuiteReport) -> CriterionResult {
    let count = all_pass(report, CheckKind::UnionProduct)?;
    let anchor = verify::verify_union_product(1, 2, 1, Budget::DEFAULT);
    ensure!(
        anchor.outcome == Outcome::Pass
            && anchor.value("enumerated") == Some("2")
            && anchor.value("formula") == Some("2"),
        "anchor (1,2,1): {:?}",
        anchor.values
    );
    let p = verify::verify_union_product(1, 3, 1, Budget::DEFAULT);
    let recorded = (p.value("enumerated").unwrap_or("?"), p.value("formula").unwrap_or("?"));
    ensure!(recorded == ("3", "3"), "(1,3,1) recorded {recorded:?}");
    Ok(format!(
        "{count} grid points, enumeration == formula everywhere; (1,2,1) -> 2, (1,3,1) -> enumerated 3 = formula 3"
    ))
}

fn overlap(report: &SuiteReport) -> CriterionResult {
    let count = all_pass(report, CheckKind::Overlap)?;
    // (m=1, n=2, k=1) by hand: U = A_1 A_2 ∪ A_2 A_1 = {01, 10}
    let a2 = set(&["1"]);
    let u = set(&["01", "10"]);
    let lhs = a2.product(&u).intersection(&u.product(&a2)).unwrap();
    let rhs = WordSet::product_all([&a2, &set(&["0"]), &a2]);
    ensure!(lhs == set(&["101"]) && rhs == lhs, "hand example: {lhs:?} vs {rhs:?}");
    let p = verify::verify_overlap(1, 2, 1, Budget::DEFAULT);
    ensure!(p.outcome == Outcome::Pass && p.value("left_count") == Some("1"), "(1,2,1): {:?}", p.values);
    Ok(format!("{count} grid points pass; (1,2,1) has both sides {{101}}"))
}

fn prefix_stability(report: &SuiteReport) -> CriterionResult {
    let mut checked = 0;
    let grid = (3..=7).flat_map(|n| (1..=3).map(move |k| (1u32, n, k)));
    let grid = grid.chain((3..=4).flat_map(|n| (1..=2).map(move |k| (2u32, n, k))));
    for (m, n, k) in grid {
        let p = verify::verify_prefix_stability(m, n, k, Budget::DEFAULT);
        ensure!(p.outcome == Outcome::Pass, "({m},{n},{k}): {:?} {:?}", p.outcome, p.witnesses);
        ensure!(
            p.value("prefix_left_count") == p.value("prefix_right_count")
                && p.value("suffix_left_count") == p.value("suffix_right_count"),
            "({m},{n},{k}): counts {:?}",
            p.values
        );
        checked += 1;
    }
    let a3 = build_a(1, 3, Budget::DEFAULT).unwrap().slice(1, 1).unwrap();
    let a4 = build_a(1, 4, Budget::DEFAULT).unwrap().slice(1, 1).unwrap();
    ensure!(a3 == WordSet::letters() && a4 == a3, "A_3[1,1] = {a3:?}, A_4[1,1] = {a4:?}");
    let suite = all_pass(report, CheckKind::PrefixStability)?;
    Ok(format!(
        "{checked} required points equal (prefix and suffix); {suite} suite points pass"
    ))
}

fn superset() -> CriterionResult {
    let mut sizes = Vec::new();
    for m in 1..=2u32 {
        let mut table = GenerationTable::new(m, Budget::DEFAULT);
        for n in 4..=5 {
            let b = SupersetB::new(&mut table, n).map_err(|e| e.to_string())?;
            let mut factors = vec![b.prefix()];
            factors.extend(std::iter::repeat_n(b.center(), m as usize - 1));
            factors.push(b.suffix());
            let explicit = WordSet::product_all(factors);
            let a = table.build(n).unwrap();
            ensure!(a.is_subset(&explicit), "m={m} n={n}: A_n ⊄ B_n");
            ensure!(a.iter().all(|w| b.contains(w)), "m={m} n={n}: membership test disagrees");
            let p = verify::verify_superset(m, n, Budget::DEFAULT);
            ensure!(p.outcome == Outcome::Pass, "m={m} n={n}: {:?}", p.values);
            sizes.push(format!("|A|={}⊆|B|={}", a.len(), explicit.len()));
        }
    }
    Ok(format!("A_n ⊆ B_n exhaustively: {}", sizes.join(", ")))
}

fn stabilization(report: &SuiteReport) -> CriterionResult {
    let mut table = FactorTable::new(1, Budget::DEFAULT);
    for n in 4..=7 {
        for k in 1..=2 {
            let r = table.stabilization(n, k).map_err(|e| e.to_string())?;
            ensure!(r.relation == rfib_core::Relation::Equal, "m=1 n={n} k={k}: {:?}", r.relation);
        }
    }
    let r = FactorTable::new(2, Budget::DEFAULT).stabilization(3, 1).map_err(|e| e.to_string())?;
    ensure!(r.relation == rfib_core::Relation::Equal, "m=2 n=3 k=1: {:?}", r.relation);

    let exception = report
        .check(CheckKind::Stabilization)
        .find_map(|c| c.find(1, 3, Some(1)))
        .ok_or("suite has no (1,3,1) stabilization point")?;
    ensure!(
        exception.outcome == Outcome::ExpectedException
            && exception.witnesses.iter().any(|w| w.word == "00" && w.side == "right_only"),
        "(1,3,1): {:?} {:?}",
        exception.outcome,
        exception.witnesses
    );
    let unexpected: Vec<_> = points(report, CheckKind::Stabilization)
        .into_iter()
        .filter(|p| p.outcome != Outcome::Pass && p.outcome != Outcome::ExpectedException)
        .collect();
    ensure!(unexpected.is_empty(), "unexpected: {unexpected:?}");

    let any2 = factor_set_any(1, 2, Budget::DEFAULT).map_err(|e| e.to_string())?;
    ensure!(any2 == set(&["00", "01", "10", "11"]), "F(A,2) = {any2:?}");
    Ok(
        "equal for m=1 n=4..7 k=1,2 and m=2 n=3 k=1; (1,3,1) is the expected exception with witness 00; F(A,2) = {00,01,10,11}"
            .into(),
    )
}

fn bounds(report: &SuiteReport) -> CriterionResult {
    let split = all_pass(report, CheckKind::SplitBound)?;
    let factor = all_pass(report, CheckKind::FactorBound)?;
    let f3 = count_f(1, 3, Budget::DEFAULT).map_err(|e| e.to_string())?;
    let f4 = count_f(1, 4, Budget::DEFAULT).map_err(|e| e.to_string())?;
    ensure!((f3, f4) == (4, 7), "|F_3|, |F_4| = {f3}, {f4}");
    ensure!(4 <= 4u64.pow(3) * 2 * 2 && 7 <= 4u64.pow(4) * 3 * 3, "bound arithmetic");
    let p3 = verify::verify_factor_bound(1, 3, Budget::DEFAULT);
    let p4 = verify::verify_factor_bound(1, 4, Budget::DEFAULT);
    ensure!(
        p3.value("bound") == Some("256") && p4.value("bound") == Some("2304"),
        "bounds {:?} {:?}",
        p3.values,
        p4.values
    );
    let worst = points(report, CheckKind::SplitBound)
        .iter()
        .filter_map(|p| p.value("max_ratio")?.parse::<f64>().ok())
        .fold(0.0, f64::max);
    Ok(format!(
        "{split} split-bound and {factor} factor-bound instances hold; |F_3|=4 <= 256, |F_4|=7 <= 2304; largest split ratio {worst:.4} vs 4^(mn)"
    ))
}

fn entropy() -> CriterionResult {
    let mut checked = 0;
    for (m, top) in [(1u32, 8usize), (2, 5), (3, 4)] {
        let mut ctx = CountingContext::new(m);
        let mut table = FactorTable::new(m, Budget::DEFAULT);
        for n in 3..=top {
            let enumerated = table.generations().build(n).unwrap().len() as f64;
            let ha = enumerated.ln() / ctx.length_usize(n) as f64;
            ensure!((ha - h_a(&mut ctx, n)).abs() < 1e-12, "m={m} n={n}: series vs enumeration");
            let hf = h_f(&mut table, n).map_err(|e| e.to_string())?;
            let gap = hf - ha;
            let bound = gap_bound(&mut ctx, n);
            ensure!((0.0..=bound).contains(&gap), "m={m} n={n}: h_F - h_A = {gap}, bound {bound}");
            checked += 1;
        }
    }
    let mut ctx = CountingContext::new(1);
    let h9 = h_a(&mut ctx, 9);
    ensure!((h9 - 3317760f64.ln() / 34.0).abs() < 1e-12, "h_A(9) = {h9}");
    ensure!((h9 - 0.44162).abs() < 1e-5, "h_A(9) = {h9}");

    let report = entropy_estimate(1, 1e-9, DEFAULT_N_CAP).map_err(|e| e.to_string())?;
    let tail = &report.rows[report.rows.len() - 2..];
    ensure!(
        report.converged && report.n_reached <= 200 && (tail[1].h_a - tail[0].h_a).abs() < 1e-9,
        "estimate did not converge: n={} converged={}",
        report.n_reached,
        report.converged
    );
    let ps = [vec![1.0, 0.0], vec![0.5, 0.5], vec![0.1, 0.9]];
    for p in &ps {
        let other = entropy_estimate_for(&Params::new(1, p.clone()).unwrap(), 1e-9, DEFAULT_N_CAP).unwrap();
        ensure!(other.estimate.to_bits() == report.estimate.to_bits(), "estimate changes with p = {p:?}");
    }
    Ok(format!(
        "sandwich holds on {checked} enumerable generations; h_A(9) = {h9:.6}; estimate {:.9} at n = {} (bit-identical for 3 choices of p)",
        report.estimate, report.n_reached
    ))
}

/// `θ^{n-1}(0)` for the fixed image `1 ↦ 1^i 0 1^{m-i}`, by string rewriting.
fn classical_word(m: u32, i: u32, n: usize) -> String {
    let image: String = (0..=m).map(|j| if j == i { '0' } else { '1' }).collect();
    let mut w = String::from("0");
    for _ in 1..n {
        w = w.chars().map(|c| if c == '0' { "1" } else { image.as_str() }).collect();
    }
    w
}

fn sampler(report: &SuiteReport) -> CriterionResult {
    let uniform = Params::uniform(1).unwrap();
    let p = verify::verify_sampler(&uniform, 6, 10_000, 2024, Budget::DEFAULT);
    ensure!(
        p.outcome == Outcome::Pass && p.value("a_count") == Some("30") && p.value("outside_count") == Some("0"),
        "(m=1, n=6): {:?} {:?}",
        p.outcome,
        p.values
    );
    ensure!(p.value("chi_square").is_some(), "chi-square was not evaluated: {:?}", p.note);
    let three = verify::verify_sampler(&Params::uniform(2).unwrap(), 4, 10_000, 2024, Budget::DEFAULT);
    ensure!(three.outcome == Outcome::Pass, "(m=2, n=4): {:?}", three.values);

    let r5 = sample_chain(&Params::new(1, vec![1.0, 0.0]).unwrap(), 5, 0).unwrap();
    ensure!(r5.word.to_string() == "01101", "r_5 = {}", r5.word);
    for m in 1..=3u32 {
        for i in 0..=m {
            let params = Params::deterministic(m, i).unwrap();
            for n in 1..=8 {
                let got = sample_chain(&params, n, 99).unwrap().word.to_string();
                ensure!(got == classical_word(m, i, n), "m={m} i={i} n={n}: {got}");
            }
        }
    }
    let suite = all_pass(report, CheckKind::Sampler)?;
    Ok(format!(
        "10^4 samples in A_6 (|A_6| = 30), chi-square {} in [{}, {}]; r_5 = 01101; {suite} suite configurations pass",
        p.value("chi_square").unwrap(),
        p.value("chi_square_lower").unwrap(),
        p.value("chi_square_upper").unwrap()
    ))
}

fn fekete() -> CriterionResult {
    let mut table = FactorTable::new(1, Budget::DEFAULT);
    let l7 = table.generations().length(7);
    let counts: Vec<usize> = (0..=l7)
        .map(|t| if t == 0 { Ok(1) } else { table.any(t).map(WordSet::len) })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for a in 1..l7 {
        for b in 1..=l7 - a {
            ensure!(
                counts[a + b] <= counts[a] * counts[b],
                "|F({})| = {} > {} * {}",
                a + b,
                counts[a + b],
                counts[a],
                counts[b]
            );
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} pairs with a+b <= l_7 = {l7}; |F(A,t)| for t=1..{l7}: {:?}",
        &counts[1..]
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let report = run_suite(&SuiteConfig::standard());
    let suite_time = start.elapsed();

    let criteria: Vec<(&str, Box<dyn Fn() -> CriterionResult + '_>)> = vec![
        ("length sequences", Box::new(length_sequences)),
        ("enumeration vs closed form", Box::new(enumeration_vs_closed_form)),
        ("union-product formula", Box::new(|| union_product(&report))),
        ("overlap identity", Box::new(|| overlap(&report))),
        ("prefix stability", Box::new(|| prefix_stability(&report))),
        ("superset", Box::new(superset)),
        ("factor stabilization", Box::new(|| stabilization(&report))),
        ("bounds", Box::new(|| bounds(&report))),
        ("entropy sandwich", Box::new(entropy)),
        ("sampler", Box::new(|| sampler(&report))),
        ("sub-multiplicativity", Box::new(fekete)),
    ];

    println!(
        "standard suite: {} pass, {} fail, {} expected exception, {} skipped in {suite_time:.1?}",
        report.summary.pass, report.summary.fail, report.summary.expected_exception, report.summary.skipped_over_budget
    );
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:02}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:02}] {name}: {why}", i + 1);
            }
        }
    }
    if !report.success {
        failed += 1;
        println!("FAIL standard suite reported unexpected failures");
    }
    println!("{} of {} criteria passed", criteria.len() - failed.min(criteria.len()), criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
