//! The residue cocycle `(φ_0, φ_2)` on the Podleś sphere and the twisted coboundaries
//! `b^σ`, `B^σ` with `σ = ϑ^{-1}`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{del_e, del_f, AlgebraElement, Monomial};
use crate::error::{Error, Result};
use crate::scalars::{q_big, ConstExt, QRat};

/// Tensors `Σ c · x0 ⊗ x1 ⊗ x2` over the Podleś sphere.
#[derive(Clone, Debug, Default)]
pub struct Chain3 {
    pub terms: Vec<(QRat, [AlgebraElement; 3])>,
}

impl Chain3 {
    pub fn push(&mut self, c: QRat, x: [AlgebraElement; 3]) {
        if !c.is_zero() && x.iter().all(|e| !e.is_zero()) {
            self.terms.push((c, x));
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Multilinear functional on tuples from the Podleś sphere with values in `ConstExt`.
#[derive(Clone)]
pub struct Cochain {
    degree: usize,
    name: String,
    eval: Arc<dyn Fn(&[AlgebraElement]) -> Result<ConstExt> + Send + Sync>,
}

impl Cochain {
    pub fn new(
        degree: usize,
        name: impl Into<String>,
        eval: impl Fn(&[AlgebraElement]) -> Result<ConstExt> + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            degree,
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn zero(degree: usize) -> Self {
        Cochain::new(degree, "0", |_| Ok(ConstExt::zero()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluate on `degree + 1` arguments.
    pub fn eval(&self, args: &[AlgebraElement]) -> Result<ConstExt> {
        if args.len() != self.degree + 1 {
            return Err(Error::Domain(format!(
                "{} has degree {} but got {} arguments",
                self.name,
                self.degree,
                args.len()
            )));
        }
        (self.eval)(args)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.degree != other.degree {
            return Err(Error::Domain("adding cochains of different degrees".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Cochain::new(
            self.degree,
            format!("{} + {}", self.name, other.name),
            move |x| Ok(&a.eval(x)? + &b.eval(x)?),
        ))
    }
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain({}, degree {})", self.name, self.degree)
    }
}

/// The twist `σ = ϑ^{-1}`.
pub fn sigma(x: &AlgebraElement) -> AlgebraElement {
    x.theta_inv()
}

fn require_b(x: &AlgebraElement) -> Result<()> {
    if x.in_podles() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{x} is not in the Podleś sphere")))
    }
}

/// `φ_0((bc)^k)`.
pub fn phi0_bc_power(k: u32) -> ConstExt {
    match k {
        0 => ConstExt::zero(),
        1 => {
            // ½(1 - EG/L) - q/(q^{-1} - q)
            let half = QRat::ratio(1, 2);
            let eg_term = ConstExt::monomial(-1, 1, -half.clone());
            let rational = &half - &(&QRat::q_pow(1) * &q_big());
            &ConstExt::from_qrat(rational) + &eg_term
        }
        _ => {
            let h = AlgebraElement::monomial(Monomial::bc(k - 2, k - 2)).haar();
            ConstExt::from_qrat(-(&h * &q_big()))
        }
    }
}

pub fn phi0(a0: &AlgebraElement) -> Result<ConstExt> {
    require_b(a0)?;
    let mut acc = ConstExt::zero();
    for (m, c) in a0.terms() {
        if m.a == 0 && m.d == 0 && m.b == m.c {
            acc = &acc + &phi0_bc_power(m.b).scale(c);
        }
    }
    Ok(acc)
}

/// Coefficients `(C_e, C_f)` with `φ_2 = C_e ε(a0)ε(∂_e a1)ε(∂_f a2) - C_f ε(a0)ε(∂_f a1)ε(∂_e a2)`.
pub fn phi2_constants() -> (ConstExt, ConstExt) {
    let two_l = ConstExt::monomial(1, 0, QRat::from_int(2));
    let denom = ConstExt::monomial(
        1,
        0,
        &(&QRat::q_pow(-1) - &QRat::q_pow(1)) * &QRat::from_int(2),
    );
    let ce = &ConstExt::from_qrat(&QRat::q_pow(-2) - &QRat::one()) - &two_l;
    let cf = &ConstExt::from_qrat(&QRat::q_pow(2) - &QRat::one()) + &two_l;
    (
        ce.checked_div(&denom).expect("monomial"),
        cf.checked_div(&denom).expect("monomial"),
    )
}

pub fn phi2(a0: &AlgebraElement, a1: &AlgebraElement, a2: &AlgebraElement) -> Result<ConstExt> {
    for x in [a0, a1, a2] {
        require_b(x)?;
    }
    let e0 = a0.counit();
    if e0.is_zero() {
        return Ok(ConstExt::zero());
    }
    // ε is a character, so ε(a0 ∂a1 ∂a2) factors
    let ef = &(&del_e(a1).counit() * &del_f(a2).counit()) * &e0;
    let fe = &(&del_f(a1).counit() * &del_e(a2).counit()) * &e0;
    let (ce, cf) = phi2_constants();
    Ok(&ce.scale(&ef) - &cf.scale(&fe))
}

pub fn phi0_cochain() -> Cochain {
    Cochain::new(0, "φ_0", |x| phi0(&x[0]))
}

pub fn phi2_cochain() -> Cochain {
    Cochain::new(2, "φ_2", |x| phi2(&x[0], &x[1], &x[2]))
}

/// `(b^σψ)(a_0,…,a_{m+1}) = Σ_j (-1)^j ψ(…, a_j a_{j+1}, …) + (-1)^{m+1} ψ(σ(a_{m+1}) a_0, a_1, …, a_m)`.
pub fn b_twisted(psi: &Cochain) -> Cochain {
    let m = psi.degree;
    let inner = psi.clone();
    Cochain::new(m + 1, format!("b^σ({})", psi.name), move |a| {
        let mut acc = ConstExt::zero();
        for j in 0..=m {
            let mut args: Vec<AlgebraElement> = Vec::with_capacity(m + 1);
            args.extend_from_slice(&a[..j]);
            args.push(a[j].mul_ref(&a[j + 1]));
            args.extend_from_slice(&a[j + 2..]);
            let v = inner.eval(&args)?;
            acc = if j % 2 == 0 { &acc + &v } else { &acc - &v };
        }
        let mut args = vec![sigma(&a[m + 1]).mul_ref(&a[0])];
        args.extend_from_slice(&a[1..=m]);
        let v = inner.eval(&args)?;
        Ok(if (m + 1) % 2 == 0 {
            &acc + &v
        } else {
            &acc - &v
        })
    })
}

/// `B^σ = N_σ ∘ B_0`; the zero cochain of degree 0 on degree-0 input.
pub fn big_b_twisted(psi: &Cochain) -> Cochain {
    let m = psi.degree;
    if m == 0 {
        return Cochain::new(0, format!("B^σ({})", psi.name), |_| Ok(ConstExt::zero()));
    }
    let inner = psi.clone();
    Cochain::new(m - 1, format!("B^σ({})", psi.name), move |a| {
        let mut acc = ConstExt::zero();
        let mut args: Vec<AlgebraElement> = a.to_vec();
        let mut sign = 1i64;
        for _ in 0..m {
            let mut full = vec![AlgebraElement::one()];
            full.extend_from_slice(&args);
            let v = inner.eval(&full)?;
            acc = if sign > 0 { &acc + &v } else { &acc - &v };
            // λ_σ(a_0 ⊗ … ⊗ a_{m-1}) = (-1)^{m-1} σ(a_{m-1}) ⊗ a_0 ⊗ … ⊗ a_{m-2}
            let last = args.pop().expect("m >= 1 arguments");
            args.insert(0, sigma(&last));
            if (m - 1) % 2 == 1 {
                sign = -sign;
            }
        }
        Ok(acc)
    })
}

/// `φ_0(ch0) + Σ c φ_2(x0, x1, x2)`, required to be free of `L` and `EG`.
pub fn index_pair_ext(ch0: &AlgebraElement, ch2: &Chain3) -> Result<ConstExt> {
    let mut acc = phi0(ch0)?;
    for (c, [x0, x1, x2]) in &ch2.terms {
        acc = &acc + &phi2(x0, x1, x2)?.scale(c);
    }
    Ok(acc)
}

pub fn index_pair(ch0: &AlgebraElement, ch2: &Chain3) -> Result<QRat> {
    let v = index_pair_ext(ch0, ch2)?;
    v.to_qrat()
        .ok_or_else(|| Error::ResidualTranscendental(v.to_string()))
}

/// Monomials spanning the Podleś sphere up to a given degree (bigrade `(m, 0)`).
pub fn podles_monomials(max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=max_degree {
        for a in 0..=deg {
            for b in 0..=deg - a {
                for c in 0..=deg - a - b {
                    let d = deg - a - b - c;
                    if a > 0 && d > 0 {
                        continue;
                    }
                    let m = Monomial::new(a, b, c, d);
                    if m.bigrade().1 == 0 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// All tuples of spanning monomials with `arity` entries and total degree at most `max_degree`.
pub fn spanning_tuples(arity: usize, max_degree: u32) -> Vec<Vec<Monomial>> {
    let basis = podles_monomials(max_degree);
    let mut out: Vec<(Vec<Monomial>, u32)> = vec![(Vec::new(), 0)];
    for _ in 0..arity {
        let mut next = Vec::new();
        for (t, deg) in &out {
            for m in &basis {
                if deg + m.degree() <= max_degree {
                    let mut t2 = t.clone();
                    t2.push(*m);
                    next.push((t2, deg + m.degree()));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(t, _)| t).collect()
}

/// One evaluation row for reports.
#[derive(Clone, Debug, Serialize)]
pub struct EvalRow {
    pub cochain: String,
    pub inputs: Vec<String>,
    pub value_exact: String,
    pub value_at_q: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub tuples_checked: usize,
    /// Nonzero evaluations, verbatim.
    pub failures: Vec<EvalRow>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates `psi` on every spanning tuple and collects the nonzero values.
pub fn check_vanishes(psi: &Cochain, max_degree: u32, q: Option<f64>) -> Result<IdentityReport> {
    let tuples = spanning_tuples(psi.degree + 1, max_degree);
    let mut failures = Vec::new();
    for t in &tuples {
        let args: Vec<AlgebraElement> = t.iter().map(|m| AlgebraElement::monomial(*m)).collect();
        let v = psi.eval(&args)?;
        if !v.is_zero() {
            failures.push(EvalRow {
                cochain: psi.name.clone(),
                inputs: t.iter().map(|m| m.to_string()).collect(),
                value_exact: v.to_string(),
                value_at_q: q.map(|q| v.eval_f64(q)),
            });
        }
    }
    Ok(IdentityReport {
        identity: format!("{} = 0", psi.name),
        tuples_checked: tuples.len(),
        failures,
    })
}

/// The three cocycle identities on spanning tuples up to `max_degree`.
pub fn cocycle_identities(max_degree: u32, q: Option<f64>) -> Result<Vec<IdentityReport>> {
    let p0 = phi0_cochain();
    let p2 = phi2_cochain();
    let mixed = b_twisted(&p0).add(&big_b_twisted(&p2))?;
    Ok(vec![
        check_vanishes(&mixed, max_degree, q)?,
        check_vanishes(&b_twisted(&p2), max_degree, q)?,
        check_vanishes(&big_b_twisted(&p0), max_degree, q)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;
    use crate::text::qr;

    #[test]
    fn phi0_values() {
        assert!(phi0(&el("1")).unwrap().is_zero());
        let v = phi0(&el("b c")).unwrap();
        assert_eq!(
            v,
            "1/2 - 1/2 EG L^-1 - q/(q^-1 - q)"
                .parse::<ConstExt>()
                .unwrap()
        );
        assert_eq!(
            phi0(&el("b^2 c^2")).unwrap().to_qrat().unwrap(),
            qr("-1/(q^-1 - q)")
        );
        // the closed form (-1)^{k+1} q^{k+1}/(1 - q^{2k+2}) at k = 1
        assert_eq!(
            phi0(&el("b^3 c^3")).unwrap().to_qrat().unwrap(),
            qr("q^2/(1 - q^4)")
        );
        assert!(matches!(phi0(&el("a")), Err(Error::Domain(_))));
    }

    #[test]
    fn phi2_kills_units_and_respects_selection() {
        let one = el("1");
        assert!(phi2(&one, &one, &one).unwrap().is_zero());
        for x in ["a b", "c d", "b c"] {
            assert!(phi2(&el(x), &one, &el("a b")).unwrap().is_zero());
            assert!(phi2(&el(x), &el("c d"), &one).unwrap().is_zero());
        }
        for t in spanning_tuples(3, 4) {
            let ms: i64 = t.iter().map(|m| m.bigrade().0).sum();
            let args: Vec<_> = t.iter().map(|m| AlgebraElement::monomial(*m)).collect();
            let v = phi2(&args[0], &args[1], &args[2]).unwrap();
            if ms != 0 {
                assert!(v.is_zero(), "{t:?}");
            }
        }
        let v = phi2(&el("1"), &el("-c d"), &el("q^-1 a b")).unwrap();
        assert!(!v.is_zero());
    }

    #[test]
    fn coboundary_instantiations() {
        let b0 = b_twisted(&phi0_cochain());
        let (x, y) = (el("a b"), el("c d"));
        let want = &phi0(&x.mul_ref(&y)).unwrap() - &phi0(&sigma(&y).mul_ref(&x)).unwrap();
        assert_eq!(b0.eval(&[x.clone(), y.clone()]).unwrap(), want);
        assert!(b0.eval(&[el("b c"), el("1")]).unwrap().is_zero());
        let bb = big_b_twisted(&phi2_cochain());
        let want = &phi2(&el("1"), &x, &y).unwrap() - &phi2(&el("1"), &sigma(&y), &x).unwrap();
        assert_eq!(bb.eval(&[x, y]).unwrap(), want);
        assert_eq!(big_b_twisted(&phi0_cochain()).degree(), 0);
    }

    #[test]
    fn spanning_set_of_podles_sphere() {
        let names: std::collections::BTreeSet<String> =
            podles_monomials(4).iter().map(|m| m.to_string()).collect();
        let want = [
            "1", "a b", "b c", "c d", "a^2 b^2", "a b^2 c", "b^2 c^2", "b c^2 d", "c^2 d^2",
        ];
        assert_eq!(names, want.iter().map(|s| s.to_string()).collect());
    }
}
