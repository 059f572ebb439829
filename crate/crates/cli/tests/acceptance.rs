//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the summary lines always reach the console.

use std::process::Command;
use std::sync::OnceLock;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trirec::boundary::{self, WitnessParams};
use trirec::classify::{self, DiscRadius, Kind};
use trirec::decomposition::{self, GroupMode};
use trirec::heun::{self, GaussVerdict, HeunParams, IndicialRoot};
use trirec::number::{self, Exact};
use trirec::series::{self, NumericMode};
use trirec::{CoefficientFamily, PolyN};

type Outcome = Result<String, String>;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn ex(r: BigRational) -> Exact {
    Exact::new(r, BigRational::zero())
}

fn heun_params(alpha: BigRational, beta: BigRational, gamma: BigRational, delta: BigRational, qq: BigRational, root: IndicialRoot) -> HeunParams {
    HeunParams { alpha: ex(alpha), beta: ex(beta), gamma: ex(gamma), delta: ex(delta), q: ex(qq), root }
}

fn example_params() -> HeunParams {
    heun_params(q(1, 1), q(1, 1), q(4, 1), q(1, 1), q(2, 1), IndicialRoot::Zero)
}

fn example_family() -> CoefficientFamily {
    heun::heun_family(&example_params()).unwrap()
}

/// `A_n = 1/(n+1)`, `B_n = (4n+1)/(n+1)`: B-dominant with radius 1/2.
fn b_dominant_family() -> CoefficientFamily {
    CoefficientFamily::new(
        PolyN::from_ints(&[1]),
        PolyN::from_ints(&[1, 1]),
        PolyN::from_ints(&[1, 4]),
        PolyN::from_ints(&[1, 1]),
    )
    .unwrap()
}

fn witness() -> &'static WitnessParams {
    static W: OnceLock<WitnessParams> = OnceLock::new();
    W.get_or_init(|| boundary::find_witness(&example_family(), &q(1, 1000), 100_000, 0.5).unwrap())
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    let d = rng.gen_range(1..=4);
    q(rng.gen_range(lo * d..=hi * d), d)
}

// --- 1 ---------------------------------------------------------------------

/// Heun coefficients straight from the parameters, for `lambda = 0`.
fn heun_ab(p: &HeunParams, n: u64) -> (BigRational, BigRational) {
    let (al, be, ga, de, qq) = (&p.alpha.re, &p.beta.re, &p.gamma.re, &p.delta.re, &p.q.re);
    let n = q(n as i64, 1);
    let one = BigRational::one();
    let den = (&n + &one) * (&n + ga);
    let a = (&n * &n + (-be + ga + de - &one) * &n - qq) / &den;
    let b = be * (&n + al - &one) / &den;
    (a, b)
}

fn criterion_1() -> Outcome {
    let p = example_params();
    let d = series::generate_exact(&example_family(), &Exact::one(), 200).map_err(|e| e.to_string())?;
    check(d.len() == 201, "wrong number of coefficients")?;
    let (a0, _) = heun_ab(&p, 0);
    check(d[1] == ex(a0 * &d[0].re), "d_1 != A_0 d_0")?;
    check(d[1].re == -(&p.q.re / &p.gamma.re) * &d[0].re, "d_1 != -q/gamma d_0")?;
    let mut nonzero = 0;
    for n in 1..200usize {
        let (a, b) = heun_ab(&p, n as u64);
        let residual = &d[n + 1] - ex(a) * &d[n] - ex(b) * &d[n - 1];
        if !residual.is_zero() {
            nonzero += 1;
        }
    }
    check(nonzero == 0, format!("{nonzero} nonzero residuals"))?;
    Ok("200 residuals zero, d_1 = -q/gamma".into())
}

// --- 2 ---------------------------------------------------------------------

fn random_heun(rng: &mut ChaCha8Rng) -> HeunParams {
    loop {
        let root = if rng.gen_bool(0.2) { IndicialRoot::OneMinusGamma } else { IndicialRoot::Zero };
        let beta = rand_rat(rng, -3, 3);
        let gamma = q(rng.gen_range(1..=20), rng.gen_range(1..=4));
        if beta.is_zero() || (root == IndicialRoot::OneMinusGamma && gamma.is_integer()) {
            continue;
        }
        let p = heun_params(rand_rat(rng, -3, 3), beta, gamma, rand_rat(rng, -3, 3), rand_rat(rng, -4, 4), root);
        if heun::heun_family(&p).is_ok() {
            return p;
        }
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sets: Vec<HeunParams> = (0..50).map(|_| random_heun(&mut rng)).collect();
    for p in &sets {
        let c = classify::classify(&heun::heun_family(p).unwrap());
        let radius_one = matches!(&c.disc_radius, Some(DiscRadius::Finite { exact: Some(r), .. }) if r.is_one());
        check(c.kind == Kind::ADominant && radius_one, format!("{p:?} classified as {c:?}"))?;
    }
    let samples: Vec<u64> = (9000..=10_000).step_by(100).collect();
    let samples = &samples;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = sets
            .iter()
            .map(|p| s.spawn(move || classify::ratio_scan(&heun::heun_family(p).unwrap(), 1, 10_001, samples)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut stable = 0;
    let mut worst: f64 = 0.0;
    for r in results {
        let r = r.map_err(|e| e.to_string())?;
        if r.stabilized(5, 1e-3) {
            stable += 1;
            worst = worst.max((r.last().unwrap() - 1.0).abs());
        }
    }
    check(stable > 0, "no ratio scan stabilized")?;
    check(worst <= 1e-2, format!("ratio off by {worst:e}"))?;
    Ok(format!("50/50 radius exactly 1; {stable}/50 scans stable, max |ratio(1e4) - 1| = {worst:.2e}"))
}

// --- 3 ---------------------------------------------------------------------

/// `2F1(a, b; c; x)` by direct exact summation, stopped once the term ratio
/// is below 0.9 and the term below 1e-30.
fn hyp2f1_direct(a: &BigRational, b: &BigRational, c: &BigRational, x: &BigRational) -> f64 {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let tiny = q(1, 1) / BigRational::from_integer(BigInt::from(10).pow(30));
    for n in 0u64.. {
        let nn = q(n as i64, 1);
        let ratio = (&nn + a) * (&nn + b) / ((&nn + c) * (&nn + BigRational::one())) * x;
        term *= &ratio;
        sum += &term;
        if term.is_zero() || (term.abs() < tiny && ratio.abs() < q(9, 10)) {
            break;
        }
    }
    number::rat_to_f64(&sum)
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs = ["0.3", "0.5", "-0.5"];
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a = rand_rat(&mut rng, -3, 3);
        let b = rand_rat(&mut rng, -3, 3);
        let c = q(rng.gen_range(1..=16), 4);
        let one = BigRational::one();
        // gamma = c, gamma + delta - 1 = a + b, q = -ab
        let p = heun_params(one.clone(), BigRational::zero(), c.clone(), &a + &b + &one - &c, -(&a * &b), IndicialRoot::Zero);
        let f = heun::heun_family(&p).map_err(|e| e.to_string())?;
        for xs in xs {
            let x = number::parse_exact(xs).unwrap();
            let r = series::eval_series(&f, number::C64::new(0.0, 0.0), &x, 1e-16, 100_000, NumericMode::Exact)
                .map_err(|e| e.to_string())?;
            let oracle = hyp2f1_direct(&a, &b, &c, &x.re);
            let rel = (r.value.re - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel.max(r.value.im.abs()));
        }
    }
    check(worst <= 1e-12, format!("relative error {worst:e}"))?;
    Ok(format!("30 evaluations, max relative error {worst:.2e}"))
}

// --- 4 ---------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let quarter = ex(q(1, 4));
    let half = ex(q(1, 2));
    let one = Exact::one();
    let conv = heun::hypergeometric_family(&quarter, &quarter, &one).unwrap();
    let div = heun::hypergeometric_family(&half, &half, &one).unwrap();
    let s = boundary::growth_scan(&conv, 1.0, &[1000, 10_000, 100_000]).map_err(|e| e.to_string())?;
    let inc = *s.doubling_increments().last().unwrap();
    check(inc < 1e-3, format!("(1/4,1/4,1): S_2M - S_M = {inc:e} at M = 1e5"))?;
    let g = boundary::growth_scan(&div, 1.0, &[1000, 10_000, 20_000, 50_000, 100_000]).map_err(|e| e.to_string())?;
    let alpha = g.fitted_model.map(|m| m.alpha).unwrap_or(0.0);
    check(alpha > 0.1, format!("(1/2,1/2,1): fitted slope {alpha}"))?;
    let c = |z: &Exact| number::to_c64(z);
    check(
        heun::gauss_boundary_test(c(&quarter), c(&quarter), c(&one)).unwrap() == GaussVerdict::AbsolutelyConvergent
            && heun::gauss_boundary_test(c(&half), c(&half), c(&one)).unwrap() == GaussVerdict::Divergent,
        "Gauss verdicts disagree with the scans",
    )?;
    Ok(format!("increment {inc:.2e} at M = 1e5; divergent slope {alpha:.3}"))
}

// --- 5, 9: exhaustive path oracle --------------------------------------------

/// `c̄_i` as a sum over all compositions of `i` into A-steps (1) and B-steps (2):
/// an A-step at position `p` weighs `|A_{N+p}|`, a B-step from `p` weighs `|B_{N+p+1}|`.
fn path_sum(f: &CoefficientFamily, n_start: u64, i: usize) -> (BigRational, usize) {
    fn walk(f: &CoefficientFamily, n: u64, pos: usize, end: usize, w: BigRational, acc: &mut (BigRational, usize)) {
        if pos == end {
            acc.0 += w;
            acc.1 += 1;
            return;
        }
        let a = f.coeff_a(n + pos as u64).unwrap().re.abs();
        walk(f, n, pos + 1, end, &w * a, acc);
        if pos + 2 <= end {
            let b = f.coeff_b(n + pos as u64 + 1).unwrap().re.abs();
            walk(f, n, pos + 2, end, w * b, acc);
        }
    }
    let mut acc = (BigRational::zero(), 0);
    walk(f, n_start, 0, i, BigRational::one(), &mut acc);
    acc
}

fn identity_holds(f: &CoefficientFamily, n_start: u64, m: usize, mode: GroupMode) -> Result<usize, String> {
    let lhs = series::majorant_exact(f, n_start, m).map_err(|e| e.to_string())?;
    let rhs = decomposition::rhs_coeffs_exact(f, n_start, m, m, mode).map_err(|e| e.to_string())?;
    let report = decomposition::decomposition_check(f, n_start, m, None, mode, true, None).map_err(|e| e.to_string())?;
    check(report.discrepancy == "0", format!("reported discrepancy {}", report.discrepancy))?;
    let mut paths = 0;
    for i in 0..=m {
        let (oracle, count) = path_sum(f, n_start, i);
        paths = paths.max(count);
        check(lhs[i] == oracle, format!("N={n_start} degree {i}: modulus recurrence != path sum"))?;
        check(rhs[i] == oracle, format!("N={n_start} degree {i}: regrouped series != path sum"))?;
    }
    Ok(paths)
}

fn random_a_dominant(rng: &mut ChaCha8Rng) -> CoefficientFamily {
    let pos = |rng: &mut ChaCha8Rng| rng.gen_range(1..=6i64);
    let nz = |rng: &mut ChaCha8Rng| {
        let v = rng.gen_range(1..=5i64);
        if rng.gen_bool(0.5) {
            -v
        } else {
            v
        }
    };
    let a_num = PolyN::from_ints(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5), nz(rng)]);
    let a_den = PolyN::from_ints(&[pos(rng), pos(rng), pos(rng)]);
    let b_num = PolyN::from_ints(&[rng.gen_range(-5..=5), nz(rng)]);
    let b_den = PolyN::from_ints(&[pos(rng), pos(rng), pos(rng)]);
    CoefficientFamily::new(a_num, a_den, b_num, b_den).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut families = vec![example_family()];
    families.extend((0..20).map(|_| random_a_dominant(&mut rng)));
    let mut paths = 0;
    for f in &families {
        check(classify::classify(f).kind == Kind::ADominant, "random family is not A-dominant")?;
        for n_start in [5, 10] {
            for m in 0..=12 {
                paths = paths.max(identity_holds(f, n_start, m, GroupMode::GroupByB)?);
            }
        }
    }
    Ok(format!("21 families x N in {{5,10}} x M <= 12 exact; {paths} paths at M = 12"))
}

// --- 6 ---------------------------------------------------------------------

fn criterion_6() -> Outcome {
    let w = witness();
    check(w.margins_exact, "margins are not exact")?;
    let dom = number::parse_rational(&w.margin_dominant).map_err(|e| e.to_string())?;
    let dec = number::parse_rational(&w.margin_decaying).map_err(|e| e.to_string())?;
    check(dom.is_positive() && dec.is_positive(), format!("margins {dom} / {dec}"))?;
    check(boundary::verify_witness(&example_family(), w).map_err(|e| e.to_string())?, "witness does not verify")?;
    Ok(format!("N={} h={} h0={} m={}; margins {} and {}", w.n, w.h, w.h0, w.m, w.margin_dominant, w.margin_decaying))
}

// --- 7 ---------------------------------------------------------------------

fn criterion_7() -> Outcome {
    let other = [
        heun_params(q(1, 1), q(1, 1), q(4, 1), q(1, 1), q(2, 1), IndicialRoot::Zero),
        heun_params(q(2, 1), q(1, 2), q(3, 2), q(2, 1), q(1, 1), IndicialRoot::Zero),
    ];
    let mut pairs = vec![(witness().n, witness().h)];
    for (p, eps) in other.iter().zip([q(1, 10), q(1, 20)]) {
        let w = boundary::find_witness(&heun::heun_family(p).unwrap(), &eps, 5_000, 0.5).map_err(|e| e.to_string())?;
        pairs.push((w.n, w.h));
    }
    let mut points = 0;
    for &(n, h) in &pairs {
        for r in 1..=3 {
            for i2r in [0, 3, 7, 15] {
                let thr = decomposition::tail_bound_threshold(n, h, r, i2r).map_err(|e| e.to_string())?;
                for k in 0..28u64 {
                    let i = thr + k * k;
                    points += 1;
                    let ok = decomposition::verify_pochhammer_tail_bound(n, h, r, i2r, i).map_err(|e| e.to_string())?;
                    check(ok, format!("fails at N={n} h={h} r={r} i2r={i2r} i={i}"))?;
                }
            }
        }
    }
    Ok(format!("{points} grid points from the per-line threshold hold for (N,h) in {pairs:?}"))
}

// --- 8 ---------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let f = example_family();
    let scan = boundary::boundary_scan(&f, boundary::Side::A, &[1000, 10_000, 50_000]).map_err(|e| e.to_string())?;
    let incs = scan.doubling_increments();
    check(incs.iter().all(|&d| d >= 1e-3), format!("boundary increments {incs:?}"))?;
    let interior = boundary::growth_scan(&f, 0.9, &[1000, 10_000, 50_000]).map_err(|e| e.to_string())?;
    let top = *interior.doubling_increments().last().unwrap();
    check(top < 1e-6, format!("interior increment {top:e}"))?;
    let w = witness();
    let eta = boundary::boundary_eta(&f).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = [2, 4, 8, 16]
        .iter()
        .map(|c| {
            let m = c * w.m;
            (m as f64, boundary::lower_bound_witness(w, eta, 10, m).unwrap())
        })
        .collect();
    check(pts.windows(2).all(|p| p[1].1 > p[0].1), format!("lower bound not increasing: {pts:?}"))?;
    let slope = boundary::fit_log(&pts).map(|fit| fit.alpha).unwrap_or(0.0);
    check(slope > 0.0, format!("lower bound slope {slope}"))?;
    let min_inc = incs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("boundary increments >= {min_inc:.4}; interior {top:.1e}; lower-bound slope {slope:.3e}"))
}

// --- 9 ---------------------------------------------------------------------

fn criterion_9() -> Outcome {
    let f = b_dominant_family();
    let c = classify::classify(&f);
    let half = matches!(&c.disc_radius, Some(DiscRadius::Finite { exact: Some(r), .. }) if *r == q(1, 2));
    check(c.kind == Kind::BDominant && half, format!("classified as {c:?}"))?;
    let x = number::parse_exact("0.45").unwrap();
    let r = series::eval_series(&f, number::C64::new(0.0, 0.0), &x, 1e-12, 100_000, NumericMode::Exact).map_err(|e| e.to_string())?;
    check(r.converged && r.truncation_error_bound <= 1e-12, "interior evaluation did not meet the tail bound")?;
    let scan = boundary::growth_scan(&f, 0.5, &[1000, 10_000, 50_000]).map_err(|e| e.to_string())?;
    let incs = scan.doubling_increments();
    check(incs.iter().all(|&d| d >= 1.0), format!("boundary increments {incs:?}"))?;
    for n_start in [5, 10] {
        for m in 0..=12 {
            identity_holds(&f, n_start, m, GroupMode::GroupByA)?;
        }
    }
    Ok(format!("radius 1/2; x=0.45 converged in {} terms; boundary increments {:.1}..{:.1}; by-A identity exact", r.terms, incs[0], incs[2]))
}

// --- 10 --------------------------------------------------------------------

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_trirec")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_10() -> Outcome {
    let heun = ["--heun", "--alpha", "1", "--beta", "1", "--gamma", "4", "--delta", "1", "--q", "2"];
    let b_dom = r#"{"a_num":["1"],"a_den":["1","1"],"b_num":["1","4"],"b_den":["1","1"]}"#;
    let with = |cmd: &str, extra: &[&str]| -> Vec<String> {
        let mut v = vec![cmd.to_string()];
        v.extend(heun.iter().map(|s| s.to_string()));
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let mut runs: Vec<Vec<String>> = vec![
        with("classify", &[]),
        with("eval", &["--x", "1/2"]),
        vec!["heun", "--alpha", "1", "--beta", "0", "--gamma", "3", "--delta", "1", "--q", "2", "--x", "0.3"]
            .into_iter()
            .map(String::from)
            .collect(),
        with("scan-boundary", &["--checkpoints", "1000,5000"]),
        with("decompose-check", &[]),
        vec!["decompose-check".into(), "--family-json".into(), b_dom.into(), "--group".into(), "by-a".into()],
        with("witness", &[]),
    ];
    let csv: Vec<Vec<String>> = runs[..6]
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.extend(["--output".to_string(), "csv".to_string()]);
            r
        })
        .collect();
    runs.extend(csv);
    for r in &runs {
        let args: Vec<&str> = r.iter().map(String::as_str).collect();
        let first = run_cli(&args)?;
        let second = run_cli(&args)?;
        check(first == second, format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} invocations byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let results: Vec<(u32, Outcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(n, f)| (n, s.spawn(move || std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into())))))
            .collect();
        handles.into_iter().map(|(n, h)| (n, h.join().unwrap())).collect()
    });
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("[acceptance] criterion {n}: PASS {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[acceptance] criterion {n}: FAIL {msg}");
            }
        }
    }
    println!("[acceptance] {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
