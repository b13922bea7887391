//! Randomized exact checks of the algebra layer, shared by the property and acceptance targets.

#![allow(dead_code)]

use qsphere_core::algebra::{del_e, del_f, AlgebraElement, Element, Monomial};
use qsphere_core::peterweyl::{pw_element, PWIndex};
use qsphere_core::scalars::{HalfInt, QRat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A normal-form monomial of total degree at most `max_degree`.
pub fn random_monomial(rng: &mut impl Rng, max_degree: u32) -> Monomial {
    let deg = rng.gen_range(0..=max_degree);
    let mut e = [0u32; 4];
    let use_a = rng.gen_bool(0.5);
    for _ in 0..deg {
        // the slot for a or d, then b, then c
        match rng.gen_range(0..3) {
            0 => e[if use_a { 0 } else { 3 }] += 1,
            1 => e[1] += 1,
            _ => e[2] += 1,
        }
    }
    Monomial::new(e[0], e[1], e[2], e[3])
}

/// A combination of up to four monomials with small coefficients in `q^{±1/2}`.
pub fn random_element(rng: &mut impl Rng, max_degree: u32) -> AlgebraElement {
    let mut x = Element::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let c = QRat::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
            .mul_s_pow(rng.gen_range(-2..=2));
        x.add_term(random_monomial(rng, max_degree), c);
    }
    x
}

#[derive(Debug)]
pub struct SuiteLine {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteLine {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn line(name: &'static str, cases: usize, failures: Vec<String>) -> SuiteLine {
    SuiteLine {
        name,
        cases,
        failures,
    }
}

pub fn associativity(seed: u64, triples: usize) -> SuiteLine {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for _ in 0..triples {
        let [x, y, z] = [0; 3].map(|_| Element::<QRat>::monomial(random_monomial(&mut r, 5)));
        if x.mul_ref(&y).mul_ref(&z) != x.mul_ref(&y.mul_ref(&z)) {
            bad.push(format!("({x})({y})({z})"));
        }
    }
    line("associativity", triples, bad)
}

pub fn twisted_trace(seed: u64, pairs: usize) -> SuiteLine {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for _ in 0..pairs {
        let x = Element::<QRat>::monomial(random_monomial(&mut r, 6));
        let y = Element::<QRat>::monomial(random_monomial(&mut r, 6));
        if x.mul_ref(&y).haar() != y.theta().mul_ref(&x).haar() {
            bad.push(format!("x = {x}, y = {y}"));
        }
    }
    line("h(xy) = h(theta(y) x)", pairs, bad)
}

pub fn pw_orthogonality(l_max: HalfInt) -> SuiteLine {
    let all = PWIndex::all_up_to(l_max);
    let mut bad = Vec::new();
    let mut cases = 0;
    for (i, x) in all.iter().enumerate() {
        let tx = pw_element(*x).expect("within the default cutoff");
        for y in &all[i + 1..] {
            if x.bigrade() != y.bigrade() {
                continue;
            }
            cases += 1;
            let ty = pw_element(*y).expect("within the default cutoff");
            if !tx.raw.star().mul_ref(&ty.raw).haar().is_zero() {
                bad.push(format!("{x} vs {y}"));
            }
        }
    }
    line("Peter-Weyl orthogonality", cases, bad)
}

/// `(t^l_{i,j})* = (-q)^{j-i} t^l_{-i,-j}`.
pub fn pw_star_law(l_max: HalfInt) -> SuiteLine {
    let mut bad = Vec::new();
    let all = PWIndex::all_up_to(l_max);
    for i in &all {
        let t = pw_element(*i).unwrap();
        let mirror = pw_element(PWIndex::new(i.l, -i.r, -i.s).unwrap()).unwrap();
        let k = (i.s - i.r).to_int().unwrap();
        let factor = if k % 2 == 0 {
            QRat::q_pow(k)
        } else {
            -QRat::q_pow(k)
        };
        if t.element().star() != mirror.element().scale(&factor) {
            bad.push(i.to_string());
        }
    }
    line("Peter-Weyl star law", all.len(), bad)
}

/// `ε(∂_e(x*)) = -q ε(∂_f(x))` and `ε(∂_f(x*)) = -q^{-1} ε(∂_e(x))`.
pub fn counit_star(seed: u64, samples: usize) -> SuiteLine {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    let minus_q = -QRat::q_pow(1);
    let minus_q_inv = -QRat::q_pow(-1);
    let mut nonzero = 0;
    for _ in 0..samples {
        let x = random_element(&mut r, 4);
        let xs = x.star();
        if !del_e(&xs).counit().is_zero() || !del_f(&xs).counit().is_zero() {
            nonzero += 1;
        }
        if del_e(&xs).counit() != &minus_q * &del_f(&x).counit() {
            bad.push(format!("e on {x}"));
        }
        if del_f(&xs).counit() != &minus_q_inv * &del_e(&x).counit() {
            bad.push(format!("f on {x}"));
        }
    }
    if nonzero < samples / 10 {
        bad.push(format!("only {nonzero} samples with a non-zero side"));
    }
    line("counit and derivations under star", samples, bad)
}

pub fn full_suite(seed: u64) -> Vec<SuiteLine> {
    let three = HalfInt::from_int(3);
    vec![
        associativity(seed, 200),
        twisted_trace(seed + 1, 200),
        pw_orthogonality(three),
        pw_star_law(three),
        counit_star(seed + 2, 200),
    ]
}
