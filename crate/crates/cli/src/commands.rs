use num::{BigRational, Zero};
use serde_json::{json, Map, Value};

use trirec::boundary::{self, Side};
use trirec::decomposition::{self, GroupMode};
use trirec::heun::{self, HeunParams};
use trirec::number::{self, Exact, C64};
use trirec::series::{self, NumericMode, SeriesEval};
use trirec::{classify, normalize, CoefficientFamily};

use crate::args::{Cli, Command, EvalArgs, FamilyArgs, Group, HeunArgs, Mode, SideArg};
use crate::output::{emit, Report, Table};
use crate::CliError;

const PRECISION_ENV: &str = "TRIREC_PRECISION_BITS";
const DEFAULT_PRECISION_BITS: u32 = 256;

/// Significant decimal digits used when exact results are printed as decimals.
fn decimal_digits() -> Result<usize, CliError> {
    let bits = match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| CliError::Config(format!("{PRECISION_ENV}: expected a positive integer, got {v:?}")))?,
        Err(_) => DEFAULT_PRECISION_BITS,
    };
    Ok((bits as f64 * std::f64::consts::LOG10_2).ceil() as usize)
}

fn flag<T>(name: &str, r: trirec::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("--{name}: {e}")))
}

fn s(x: f64) -> Value {
    Value::String(number::fmt_f64(x))
}

fn c64_json(z: C64) -> Value {
    json!({ "re": number::fmt_f64(z.re), "im": number::fmt_f64(z.im) })
}

fn mode_of(m: Mode) -> NumericMode {
    match m {
        Mode::Exact => NumericMode::Exact,
        Mode::Float => NumericMode::Float,
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn heun_params(a: &HeunArgs) -> Result<HeunParams, CliError> {
    let get = |name: &str, v: &Option<String>| -> Result<Exact, CliError> {
        let v = v.as_deref().ok_or_else(|| CliError::Config(format!("--{name} is required for the Heun family")))?;
        flag(name, number::parse_exact(v))
    };
    Ok(HeunParams {
        alpha: get("alpha", &a.alpha)?,
        beta: get("beta", &a.beta)?,
        gamma: get("gamma", &a.gamma)?,
        delta: get("delta", &a.delta)?,
        q: get("q", &a.q)?,
        root: flag("lambda-root", a.lambda_root.parse())?,
    })
}

fn load_family(a: &FamilyArgs) -> Result<(CoefficientFamily, Option<HeunParams>), CliError> {
    let sources = a.family.is_some() as u8 + a.family_json.is_some() as u8 + a.heun as u8;
    if sources != 1 {
        return Err(CliError::Config("exactly one of --family, --family-json, --heun is required".into()));
    }
    if let Some(path) = &a.family {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("--family {}: {e}", path.display())))?;
        return Ok((flag("family", CoefficientFamily::from_json(&text))?, None));
    }
    if let Some(text) = &a.family_json {
        return Ok((flag("family-json", CoefficientFamily::from_json(text))?, None));
    }
    let p = heun_params(&a.params)?;
    Ok((heun::heun_family(&p)?, Some(p)))
}

fn parse_list(name: &str, text: &str) -> Result<Vec<u64>, CliError> {
    let v: Vec<u64> = text
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Config(format!("--{name}: not an integer: {t:?}"))))
        .collect::<Result<_, _>>()?;
    if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!("--{name}: values must be strictly increasing")));
    }
    Ok(v)
}

fn family_json(f: &CoefficientFamily) -> Value {
    serde_json::to_value(f.to_doc()).expect("family document serializes")
}

fn classify_json(f: &CoefficientFamily) -> Value {
    let class = classify(f);
    let mut v = serde_json::to_value(&class).expect("class serializes");
    if let Ok(nf) = normalize(f) {
        let list = |c: Vec<Exact>| c.iter().map(number::format_exact).collect::<Vec<_>>();
        v["normalized"] = json!({
            "t": nf.t.to_string(),
            "a_lead": number::format_exact(&nf.a_lead),
            "b_lead": number::format_exact(&nf.b_lead),
            "omega_num": list(nf.omega_num()),
            "omega_den": list(nf.omega_den()),
            "theta_num": list(nf.theta_num()),
            "theta_den": list(nf.theta_den()),
        });
    }
    v
}

fn eval_json(r: &SeriesEval, lambda: C64, digits: usize) -> Value {
    let value = match (&r.exact_sum, lambda == C64::new(0.0, 0.0)) {
        (Some(sum), true) => json!({
            "re": number::rational_to_decimal(&sum.re, digits),
            "im": number::rational_to_decimal(&sum.im, digits),
        }),
        _ => c64_json(r.value),
    };
    json!({
        "value": value,
        "terms": r.terms.to_string(),
        "truncation_error_bound": s(r.truncation_error_bound),
        "converged": r.converged,
    })
}

fn coefficient_table(r: &SeriesEval) -> Table {
    let rows = r
        .run
        .rows()
        .into_iter()
        .map(|row| {
            vec![
                row.n.to_string(),
                number::fmt_f64(row.re),
                number::fmt_f64(row.im),
                row.scale_exponent.to_string(),
                number::fmt_f64(row.s),
            ]
        })
        .collect();
    Table { headers: vec!["n", "re_d", "im_d", "scale_exponent", "s_n"], rows }
}

fn run_eval(f: &CoefficientFamily, lambda: C64, e: &EvalArgs) -> Result<Report, CliError> {
    if !(e.tol > 0.0) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", e.tol)));
    }
    let x = flag("x", number::parse_exact(&e.x))?;
    let r = series::eval_series(f, lambda, &x, e.tol, e.m_max, mode_of(e.mode))?;
    let mut json = eval_json(&r, lambda, decimal_digits()?);
    json["command"] = json!("eval");
    json["x"] = json!(number::format_exact(&x));
    json["lambda"] = c64_json(lambda);
    json["mode"] = json!(mode_name(e.mode));
    Ok(Report { table: Some(coefficient_table(&r)), json })
}

fn run_heun(params: &HeunArgs, x: &Option<String>, tol: f64, m_max: usize, mode: Mode) -> Result<Report, CliError> {
    let p = heun_params(params)?;
    let f = heun::heun_family(&p)?;
    let lambda = p.lambda();
    let mut out = Map::new();
    out.insert("command".into(), json!("heun"));
    out.insert(
        "params".into(),
        json!({
            "alpha": number::format_exact(&p.alpha),
            "beta": number::format_exact(&p.beta),
            "gamma": number::format_exact(&p.gamma),
            "delta": number::format_exact(&p.delta),
            "q": number::format_exact(&p.q),
            "lambda": number::format_exact(&lambda),
        }),
    );
    out.insert("family".into(), family_json(&f));
    out.insert("class".into(), classify_json(&f));
    if p.roots_coincide() {
        out.insert("note".into(), json!("gamma = 1: the indicial roots coincide; only the power-series solution is computed"));
    }
    if p.beta.is_zero() {
        let h = heun::hypergeometric_reduction(&p)?;
        let verdict = heun::gauss_boundary_test(h.a, h.b, h.c).map(|v| serde_json::to_value(v).expect("serializes"));
        let mut red = json!({ "a": c64_json(h.a), "b": c64_json(h.b), "c": c64_json(h.c) });
        if let Some((a, b, c)) = &h.exact {
            red["exact"] = json!({ "a": number::format_exact(a), "b": number::format_exact(b), "c": number::format_exact(c) });
        }
        red["gauss_boundary"] = verdict.unwrap_or_else(|e| json!(e.to_string()));
        out.insert("hypergeometric".into(), red);
    }
    let mut table = None;
    if let Some(xs) = x {
        let e = EvalArgs { x: xs.clone(), tol, m_max, mode };
        let r = run_eval(&f, number::to_c64(&lambda), &e)?;
        out.insert("eval".into(), r.json);
        table = r.table;
    }
    Ok(Report { json: Value::Object(out), table })
}

fn side_of(a: SideArg) -> Side {
    match a {
        SideArg::A => Side::A,
        SideArg::B => Side::B,
    }
}

fn run_scan(f: &CoefficientFamily, side: Option<SideArg>, checkpoints: &str, interior: Option<f64>) -> Result<Report, CliError> {
    let cps: Vec<usize> = parse_list("checkpoints", checkpoints)?.into_iter().map(|v| v as usize).collect();
    let nf = normalize(f)?;
    let natural = match nf.shape {
        trirec::Shape::ADominant => Side::A,
        trirec::Shape::BDominant => Side::B,
    };
    let side = side.map(side_of).unwrap_or(natural);
    let scan = match interior {
        Some(t) if !(t > 0.0) => return Err(CliError::Config(format!("--interior must be positive, got {t}"))),
        Some(t) => {
            if side != natural {
                return Err(trirec::Error::DomainError(format!("family is not {side:?}-dominant")).into());
            }
            boundary::growth_scan(f, t * boundary::boundary_radius(&nf), &cps)?
        }
        None => boundary::boundary_scan(f, side, &cps)?,
    };
    let rows: Vec<Vec<String>> = scan
        .checkpoints
        .iter()
        .map(|c| vec![c.m.to_string(), number::fmt_f64(c.s_m), number::fmt_f64(c.s_2m), number::fmt_f64(c.s_2m - c.s_m)])
        .collect();
    let json = json!({
        "command": "scan-boundary",
        "side": serde_json::to_value(side).expect("serializes"),
        "x_abs": s(scan.x_abs),
        "checkpoints": scan.checkpoints.iter().map(|c| json!({
            "m": c.m.to_string(),
            "s_m": s(c.s_m),
            "s_2m": s(c.s_2m),
            "increment": s(c.s_2m - c.s_m),
        })).collect::<Vec<_>>(),
        "fitted_model": scan.fitted_model.map(|fit| json!({ "alpha": s(fit.alpha), "beta": s(fit.beta) })),
    });
    Ok(Report { json, table: Some(Table { headers: vec!["m", "s_m", "s_2m", "increment"], rows }) })
}

#[allow(clippy::too_many_arguments)]
fn run_decompose(
    f: &CoefficientFamily,
    n_start: u64,
    degree: usize,
    group: Group,
    mode: Mode,
    x: &Option<String>,
    tau_max: Option<usize>,
) -> Result<Report, CliError> {
    let x: Option<BigRational> = x.as_deref().map(|t| flag("x", number::parse_rational(t))).transpose()?;
    if x.as_ref().is_some_and(|v| v < &BigRational::zero()) {
        return Err(CliError::Config("--x must be nonnegative".into()));
    }
    let group = match group {
        Group::ByB => GroupMode::GroupByB,
        Group::ByA => GroupMode::GroupByA,
    };
    let r = decomposition::decomposition_check(f, n_start, degree, x.as_ref(), group, mode == Mode::Exact, tau_max)?;
    let rows = r
        .lhs_coeffs
        .iter()
        .zip(&r.rhs_coeffs)
        .enumerate()
        .map(|(i, (l, rh))| vec![i.to_string(), l.clone(), rh.clone()])
        .collect();
    let mut json = serde_json::to_value(&r).expect("report serializes");
    json["command"] = json!("decompose-check");
    json["n_start"] = json!(r.n_start.to_string());
    json["degree"] = json!(r.degree.to_string());
    Ok(Report { json, table: Some(Table { headers: vec!["degree", "lhs", "rhs"], rows }) })
}

fn run_witness(f: &CoefficientFamily, eps: &str, scan_limit: u64, k: f64, p_max: u64, upper: &Option<String>) -> Result<Report, CliError> {
    let eps = flag("eps", number::parse_rational(eps))?;
    let w = boundary::find_witness(f, &eps, scan_limit, k)?;
    let eta = boundary::boundary_eta(f)?;
    let uppers = match upper {
        Some(t) => parse_list("upper", t)?,
        None => [2, 4, 8, 16].iter().map(|c| c * w.m).collect(),
    };
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for &u in &uppers {
        let ln = boundary::lower_bound_witness_ln(&w, eta, p_max, u)?;
        let v = ln.exp();
        if v > 0.0 {
            points.push((u as f64, v));
        }
        rows.push(vec![u.to_string(), number::fmt_f64(v), number::fmt_f64(ln)]);
        bounds.push(json!({ "upper": u.to_string(), "value": s(v), "ln_value": s(ln) }));
    }
    let fit = boundary::fit_log(&points);
    let mut wj = serde_json::to_value(&w).expect("witness serializes");
    for key in ["n", "h", "h0", "m", "scan_limit"] {
        let v = wj[key].to_string();
        wj[key] = json!(v);
    }
    wj["k"] = s(w.k);
    let json = json!({
        "command": "witness",
        "witness": wj,
        "eta": s(eta),
        "p_max": p_max.to_string(),
        "lower_bound": bounds,
        "lower_bound_fit": fit.map(|fit| json!({ "alpha": s(fit.alpha), "beta": s(fit.beta) })),
    });
    Ok(Report { json, table: Some(Table { headers: vec!["upper", "lower_bound", "ln_lower_bound"], rows }) })
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let report = match &cli.command {
        Command::Classify { family } => {
            let (f, _) = load_family(family)?;
            let mut json = classify_json(&f);
            json["command"] = json!("classify");
            json["family"] = family_json(&f);
            Report::json(json)
        }
        Command::Eval { family, eval, lambda } => {
            let (f, heun) = load_family(family)?;
            let lambda = match heun {
                Some(p) if lambda == "0" => number::to_c64(&p.lambda()),
                _ => number::to_c64(&flag("lambda", number::parse_exact(lambda))?),
            };
            run_eval(&f, lambda, eval)?
        }
        Command::Heun { params, x, tol, m_max, mode } => run_heun(params, x, *tol, *m_max, *mode)?,
        Command::ScanBoundary { family, side, checkpoints, interior } => {
            let (f, _) = load_family(family)?;
            run_scan(&f, *side, checkpoints, *interior)?
        }
        Command::DecomposeCheck { family, n_start, degree, group, mode, x, tau_max } => {
            let (f, _) = load_family(family)?;
            run_decompose(&f, *n_start, *degree, *group, *mode, x, *tau_max)?
        }
        Command::Witness { family, eps, scan_limit, k, p_max, upper } => {
            let (f, _) = load_family(family)?;
            run_witness(&f, eps, *scan_limit, *k, *p_max, upper)?
        }
    };
    emit(&report, cli.output, cli.out.as_deref())
}
