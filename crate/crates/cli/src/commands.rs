//! One function per subcommand, each producing a [`Report`].

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qsphere_core::algebra::{AlgebraElement, Monomial};
use qsphere_core::cocycles::{
    b_twisted, big_b_twisted, cocycle_identities, phi0, phi0_cochain, phi2, phi2_cochain,
    podles_monomials, Cochain,
};
use qsphere_core::ktheory::{
    chern0, chern2, equivariance_check, expected_index, index_symbolic_ext, projection_pn, rep_vn,
};
use qsphere_core::peterweyl::{expected_norm_sq, pw_element, PWIndex};
use qsphere_core::scalars::{parse_rational, ConstExt, HalfInt, QRat};
use qsphere_core::spectral::{
    d_squared_deviation, expected_zeta_residue, kernel_index_with, level_projection, psi_r,
    psi_r_level, spectral_dimension_probe, zeta_residue_fit, Component, KernelReport,
    TruncatedHilbert,
};
use qsphere_core::{Error, Result};

use crate::report::{object, Check, Report};

/// A deformation parameter given exactly (`"1/2"`, `"0.3"`), with its double value.
#[derive(Clone, Debug)]
pub struct QArg {
    pub text: String,
    pub exact: BigRational,
    pub value: f64,
}

pub fn parse_q(text: &str) -> std::result::Result<QArg, String> {
    let exact = parse_rational(text).map_err(|e| e.to_string())?;
    let value = exact.to_f64().unwrap_or(f64::NAN);
    if !(exact > BigRational::zero() && value < 1.0) {
        return Err(format!("q = {text} must lie strictly between 0 and 1"));
    }
    Ok(QArg {
        text: text.trim().to_string(),
        exact,
        value,
    })
}

pub fn parse_element(text: &str) -> std::result::Result<AlgebraElement, String> {
    text.parse::<AlgebraElement>().map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Symbolic,
    Kernel,
    Both,
}

pub struct IndexJob {
    pub n: HalfInt,
    pub q: QArg,
    pub method: Method,
    pub lambda: Option<HalfInt>,
    pub tau: f64,
    pub tol: f64,
    pub stability: bool,
}

fn kernel_json(k: &KernelReport, expected: f64) -> Value {
    object([
        ("job", json!("kernel_index")),
        ("q", json!(k.q)),
        ("lambda_cutoff", json!(k.lambda_cutoff)),
        ("value", json!(k.value)),
        ("expected", json!(expected)),
        ("abs_err", json!((k.value - expected).abs())),
        ("svd_gap", json!(k.svd_gap)),
        ("tau", json!(k.tau)),
        ("n_plus", json!(k.n_plus)),
        ("n_minus", json!(k.n_minus)),
        ("kernel_dim_plus", json!(k.kernel_dim_plus)),
        ("kernel_dim_minus", json!(k.kernel_dim_minus)),
        ("discarded_edge", json!(k.discarded_edge)),
        ("min_nonkernel_singular", json!(k.min_nonkernel_singular)),
        ("isometry_defect", json!(k.isometry_defect)),
    ])
}

pub fn index(job: &IndexJob) -> Result<Report> {
    let n = job.n;
    let expected = expected_index(n);
    let expected_at_q = expected.eval_checked(&job.q.exact)?;
    let mut checks = Vec::new();
    let mut result = vec![
        ("expected_exact", json!(expected.to_string())),
        ("expected_at_q", json!(expected_at_q)),
    ];

    // the exact route runs for every method
    let ext = index_symbolic_ext(n)?;
    checks.push(Check::new(
        "L and EG cancel",
        !ext.has_symbols(),
        json!({"pairing": ext.to_string()}),
    ));
    let exact = ext.to_qrat();
    let symbolic_ok = exact.as_ref() == Some(&expected);
    checks.push(Check::new(
        "symbolic index = q^{-2|n|}[2n]_q",
        symbolic_ok,
        json!({"got": ext.to_string(), "expected": expected.to_string()}),
    ));
    let value = match &exact {
        Some(v) => json!(v.eval_checked(&job.q.exact)?),
        None => Value::Null,
    };
    result.push(("symbolic", json!({"exact": ext.to_string(), "at_q": value})));

    if job.method != Method::Symbolic {
        let lambda = job.lambda.unwrap_or(n.abs() + HalfInt::from_int(10));
        let k = kernel_index_with(n, lambda, job.q.value, job.tau)?;
        let abs_err = (k.value - expected_at_q).abs();
        checks.push(Check::new(
            "kernel index matches",
            abs_err < job.tol,
            json!({"got": k.value, "expected": expected_at_q, "abs_err": abs_err, "tol": job.tol}),
        ));
        result.push(("kernel", kernel_json(&k, expected_at_q)));
        if job.stability {
            let wider = kernel_index_with(n, lambda + HalfInt::from_int(2), job.q.value, job.tau)?;
            let looser = kernel_index_with(n, lambda, job.q.value, job.tau * 10.0)?;
            let drift = (wider.value - k.value)
                .abs()
                .max((looser.value - k.value).abs());
            checks.push(Check::new(
                "kernel index stable under cutoff+2 and threshold x10",
                drift < job.tol,
                json!({"cutoff_plus_2": wider.value, "threshold_x10": looser.value, "drift": drift}),
            ));
        }
    }
    let config = json!({
        "n": n,
        "q": job.q.text,
        "method": format!("{:?}", job.method).to_lowercase(),
        "lambda_cutoff": job.lambda,
        "tau": job.tau,
        "tol": job.tol,
    });
    Ok(Report::new("index", config, checks, object(result)))
}

pub fn chern(n: HalfInt, q: Option<&QArg>, show_terms: bool) -> Result<Report> {
    let p = projection_pn(n)?;
    let v = rep_vn(n);
    let sq = p.matrix.mul(&p.matrix);
    let ch0 = chern0(&p, &v);
    let ch2 = chern2(&p, &v);
    let part0 = phi0(&ch0)?;
    let mut part2 = ConstExt::zero();
    for (c, [x0, x1, x2]) in &ch2.terms {
        part2 = &part2 + &phi2(x0, x1, x2)?.scale(c);
    }
    let total = &part0 + &part2;
    let expected = expected_index(n);
    let checks = vec![
        Check::new("P^2 = P", sq == p.matrix, Value::Null),
        Check::new("P* = P", p.matrix.star() == p.matrix, Value::Null),
        Check::new(
            "P is V_n-equivariant",
            equivariance_check(&p.matrix, &v),
            Value::Null,
        ),
        Check::new(
            "pairing = q^{-2|n|}[2n]_q",
            total.to_qrat().as_ref() == Some(&expected),
            json!({"got": total.to_string(), "expected": expected.to_string()}),
        ),
    ];
    let mut result = vec![
        ("dimension", json!(p.dim())),
        ("weights", json!(v.weights)),
        ("ch0", json!(ch0.to_string())),
        ("ch2_terms", json!(ch2.len())),
        ("phi0_ch0", json!(part0.to_string())),
        ("phi2_ch2", json!(part2.to_string())),
        ("pairing", json!(total.to_string())),
    ];
    if let Some(q) = q {
        result.push(("pairing_at_q", json!(total.eval_f64(q.value))));
    }
    if show_terms {
        let terms: Vec<Value> = ch2
            .terms
            .iter()
            .map(|(c, xs)| json!({"coeff": c.to_string(), "tensor": xs.iter().map(|x| x.to_string()).collect::<Vec<_>>()}))
            .collect();
        result.push(("ch2", Value::Array(terms)));
    }
    let config = json!({"n": n, "q": q.map(|q| q.text.clone()), "show_terms": show_terms});
    Ok(Report::new("chern", config, checks, object(result)))
}

/// A random element of the Podleś sphere: up to three monomials of degree at most 2 with
/// small integer coefficients.
fn random_podles_element(rng: &mut ChaCha8Rng, pool: &[Monomial]) -> AlgebraElement {
    let mut x = AlgebraElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let m = pool[rng.gen_range(0..pool.len())];
        let c = rng.gen_range(-2i64..=2);
        x.add_term(m, QRat::from_int(c));
    }
    x
}

fn random_check(
    psi: &Cochain,
    samples: usize,
    rng: &mut ChaCha8Rng,
    pool: &[Monomial],
) -> Result<Check> {
    let mut failures = Vec::new();
    for _ in 0..samples {
        let args: Vec<AlgebraElement> = (0..=psi.degree())
            .map(|_| random_podles_element(rng, pool))
            .collect();
        let v = psi.eval(&args)?;
        if !v.is_zero() {
            failures.push(json!({
                "inputs": args.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "value": v.to_string(),
            }));
        }
    }
    Ok(Check::new(
        format!("{} = 0 on {samples} random tuples", psi.name()),
        failures.is_empty(),
        json!({"failures": failures}),
    ))
}

pub fn cocycle_check(
    degree_max: u32,
    q: Option<&QArg>,
    random: usize,
    seed: u64,
) -> Result<Report> {
    let reports = cocycle_identities(degree_max, q.map(|q| q.value))?;
    let mut checks: Vec<Check> = reports
        .iter()
        .map(|r| {
            Check::new(
                format!("{} on {} spanning tuples", r.identity, r.tuples_checked),
                r.passed(),
                json!({"failures": r.failures}),
            )
        })
        .collect();
    // the n = 1/2 Chern contraction is a concrete tuple on which φ_2 does not vanish
    let half = HalfInt::HALF;
    let p = projection_pn(half)?;
    let ch2 = chern2(&p, &rep_vn(half));
    let mut witness = ConstExt::zero();
    for (c, [x0, x1, x2]) in &ch2.terms {
        witness = &witness + &phi2(x0, x1, x2)?.scale(c);
    }
    checks.push(Check::new(
        "phi_2(Ch_2(P_1/2)) = q^-1, nonzero",
        witness == ConstExt::from_qrat(QRat::q_pow(-1)),
        json!({"got": witness.to_string()}),
    ));
    if random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = podles_monomials(2);
        let p0 = phi0_cochain();
        let p2 = phi2_cochain();
        let mixed = b_twisted(&p0).add(&big_b_twisted(&p2))?;
        checks.push(random_check(&mixed, random, &mut rng, &pool)?);
        checks.push(random_check(&b_twisted(&p2), random, &mut rng, &pool)?);
    }
    let result = json!({
        "identities": reports,
        "normalization_constant": 1,
        "witness": witness.to_string(),
    });
    let config = json!({
        "degree_max": degree_max,
        "q": q.map(|q| q.text.clone()),
        "random_tuples": random,
        "seed": seed,
    });
    Ok(Report::new("cocycle-check", config, checks, result))
}

pub fn zeta(beta_text: &str, beta: &AlgebraElement, q: &QArg, precision: f64) -> Result<Report> {
    let fit = zeta_residue_fit(beta, q.value, precision)?;
    let eps = beta.counit();
    let eps_at_q = eps.eval_checked(&q.exact)?;
    let expected = eps_at_q * expected_zeta_residue(q.value);
    let (passed, tol) = if eps.is_zero() {
        (fit.residue.abs() < 1e-4, json!({"abs": 1e-4}))
    } else {
        (
            (fit.residue - expected).abs() < 1e-2 * expected.abs(),
            json!({"rel": 1e-2}),
        )
    };
    let checks = vec![Check::new(
        "residue = (q^-1 - q)/(2 ln q^-1) eps(beta)",
        passed,
        json!({"got": fit.residue, "expected": expected, "tol": tol}),
    )];
    let result = json!({
        "counit": eps.to_string(),
        "expected": expected,
        "residue": fit.residue,
        "abs_err": (fit.residue - expected).abs(),
        "fit": fit,
    });
    let config = json!({"beta": beta_text, "q": q.text, "precision": precision});
    Ok(Report::new("zeta", config, checks, result))
}

pub fn spectrum(lmax: HalfInt, q: &QArg, tol: f64) -> Result<Report> {
    if lmax < HalfInt::HALF {
        return Err(Error::Domain(format!(
            "lmax = {lmax} leaves an empty truncation"
        )));
    }
    let basis = TruncatedHilbert::new(lmax, q.value)?;
    let dev = d_squared_deviation(&basis);
    let mut checks = vec![Check::new(
        "spectrum of D^2 = {[l+1/2]_q^2}",
        dev <= 1e-12,
        json!({"max_rel_dev": dev, "dim": basis.dim()}),
    )];
    let mut levels = Vec::new();
    let mut exact_ok = true;
    let mut numeric_dev: f64 = 0.0;
    let mut l = HalfInt::HALF;
    while l <= lmax {
        let exact = psi_r_level(l);
        let want = qsphere_core::scalars::qnum(l + l + HalfInt::ONE);
        exact_ok &= exact == want;
        let p = level_projection(&basis, l, &[Component::Plus]);
        let num = psi_r(&p);
        let w = want.eval_f64(q.value);
        numeric_dev = numeric_dev.max((num - w).abs() / w);
        levels.push(json!({"l": l, "psi_r": exact.to_string(), "at_q": num}));
        l = l + HalfInt::ONE;
    }
    checks.push(Check::new(
        "Psi_R(P_l) = [2l+1]_q exactly",
        exact_ok,
        Value::Null,
    ));
    checks.push(Check::new(
        "numeric Psi_R(P_l) agrees",
        numeric_dev <= 1e-12,
        json!({"max_rel_dev": numeric_dev}),
    ));
    let probe = spectral_dimension_probe(q.value, &[2.2, 2.0, 3.0], tol)?;
    let [p22, p20, p30] = &probe.probes[..] else {
        unreachable!("three exponents requested")
    };
    checks.push(Check::new(
        "Psi_R((1+D^2)^{-1.1}) converges",
        p22.converges,
        json!({"converged_at": p22.converged_at}),
    ));
    checks.push(Check::new(
        "Psi_R((1+D^2)^{-1}) diverges",
        p20.diverges,
        Value::Null,
    ));
    let s3 = p30.partial_sums.last().map_or(f64::NAN, |p| p.1);
    let acc = p30.accelerated.unwrap_or(f64::NAN);
    checks.push(Check::new(
        "s = 3 sum matches the accelerated sum",
        (s3 - acc).abs() < 1e-10,
        json!({"direct": s3, "accelerated": acc}),
    ));
    let result = json!({"levels": levels, "dimension_probe": probe});
    let config = json!({"lmax": lmax, "q": q.text, "tol": tol});
    Ok(Report::new("spectrum", config, checks, result))
}

pub fn haar(expr: &str, x: &AlgebraElement, q: Option<&QArg>) -> Result<Report> {
    let h = x.haar();
    let mut result = vec![
        ("expr", json!(expr)),
        ("normal_form", json!(x.to_string())),
        ("haar", json!(h.to_string())),
    ];
    if let Some(q) = q {
        result.push(("at_q", json!(h.eval_checked(&q.exact)?)));
    }
    let config = json!({"expr": expr, "q": q.map(|q| q.text.clone())});
    Ok(Report::new("haar", config, vec![], object(result)))
}

pub fn pw(l: HalfInt, r: HalfInt, s: HalfInt, q: Option<&QArg>) -> Result<Report> {
    let idx = PWIndex::new(l, r, s)?;
    let t = pw_element(idx)?;
    let want = expected_norm_sq(idx);
    let checks = vec![Check::new(
        "h(t* t) = q^{-2r}/[2l+1]",
        t.norm_sq == want,
        json!({"got": t.norm_sq.to_string(), "expected": want.to_string()}),
    )];
    let mut result = vec![
        ("index", json!(idx.to_string())),
        ("bigrade", json!(idx.bigrade())),
        ("element", json!(t.element().to_string())),
        ("norm_sq", json!(t.norm_sq.to_string())),
    ];
    if let Some(q) = q {
        result.push(("norm_sq_at_q", json!(t.norm_sq.eval_checked(&q.exact)?)));
    }
    let config = json!({"l": l, "r": r, "s": s, "q": q.map(|q| q.text.clone())});
    Ok(Report::new("pw", config, checks, object(result)))
}
