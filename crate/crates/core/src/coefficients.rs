//! Exact coefficient tables and identity certificates.
//!
//! Everything here is computed in big-rational arithmetic. Floating point
//! only enters through [`Model`], the `f64` view used by the grid code.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{
    alternating, binomial_q, even_over_lower_odd_double_factorial,
    even_over_odd_double_factorial, eval_poly, frac, int, lcm_of_denominators, poly_mul, to_f64,
    Rational,
};

/// `c_k`, `d_k` (k = 1..2n−1) of the auxiliary function `h` plus the
/// derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    n: u32,
    c: Vec<Rational>,
    d: Vec<Rational>,
    leading: Rational,
    b: Rational,
    two_minus_c1: Rational,
}

impl CoefficientTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `c_k` with 1-based `k`.
    pub fn c(&self, k: usize) -> &Rational {
        &self.c[k - 1]
    }

    pub fn d(&self, k: usize) -> &Rational {
        &self.d[k - 1]
    }

    pub fn c_all(&self) -> &[Rational] {
        &self.c
    }

    pub fn d_all(&self) -> &[Rational] {
        &self.d
    }

    /// `(−1)ⁿ/(2n+1)`, the coefficient of `u_x^{2n}` in `h`.
    pub fn leading(&self) -> &Rational {
        &self.leading
    }

    /// `B = Σ_{k=1}^{n} (2k)!!/(2k+1)!!`.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn two_minus_c1(&self) -> &Rational {
        &self.two_minus_c1
    }

    pub fn c1(&self) -> &Rational {
        &self.c[0]
    }

    /// Coefficients of `φ(z) = Σ c_{2k−1} z^{2k−2}` in ascending powers of `z`
    /// (odd powers are zero and omitted from storage: entry `k−1` multiplies
    /// `z^{2k−2}`).
    pub fn phi_even_coefficients(&self) -> Vec<Rational> {
        (1..=self.n as usize).map(|k| self.c(2 * k - 1).clone()).collect()
    }

    /// Returns a copy with `c_k` overwritten and nothing re-derived. Used to
    /// exercise the failure paths of the certificates.
    pub fn with_corrupted_c(&self, k: usize, value: Rational) -> Self {
        let mut out = self.clone();
        out.c[k - 1] = value;
        out
    }

    pub fn with_corrupted_d(&self, k: usize, value: Rational) -> Self {
        let mut out = self.clone();
        out.d[k - 1] = value;
        out
    }

    /// The sequence extended by `e_0 = 1` and `e_{2n} = leading`, which lets
    /// every line of the recurrences read `e_k ∓ 2e_{k−1} + e_{k−2}`.
    fn extended(&self, odd_sign_flipped: bool) -> Vec<Rational> {
        let src = if odd_sign_flipped { &self.d } else { &self.c };
        let mut e = Vec::with_capacity(src.len() + 3);
        e.push(Rational::one());
        e.extend(src.iter().cloned());
        e.push(self.leading.clone());
        e.push(Rational::zero());
        e
    }
}

/// `C^j_{n+1}(−1)^{j+1}/(2j−1)`: the coefficient of `u^{2n+2−2j}u_x^{2j}`
/// in the density of `F`.
pub fn f_density_coefficient(n: u32, j: u32) -> Rational {
    alternating(j + 1) * binomial_q(n + 1, j) / int(2 * j as i64 - 1)
}

/// `(−1)^{k+1}C^k_n/(2k+1)`, the transport coefficients of the nonlocal form.
pub fn transport_coefficient(n: u32, k: u32) -> Rational {
    alternating(k + 1) * binomial_q(n, k) / int(2 * k as i64 + 1)
}

/// `(−1)^{k−1}C^k_n/(2k−1)`, the coefficients of the even nonlocal term.
pub fn nonlocal_coefficient(n: u32, k: u32) -> Rational {
    alternating(k + 1) * binomial_q(n, k) / int(2 * k as i64 - 1)
}

/// `c_1` straight from its closed form.
pub fn c1_closed_form(n: u32) -> Rational {
    let mut acc = frac(1, 2);
    for j in 1..=n + 1 {
        acc += alternating(j + 1) * binomial_q(n + 1, j) * frac(2 * j as i64 - 3, 2 * (2 * j as i64 - 1));
    }
    acc
}

pub fn double_factorial_sum(n: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    Ok((1..=n).map(even_over_odd_double_factorial).sum())
}

/// `κ_n = 1 − Σ_{k=1}^{n} (−1)^{k+1}C^k_n/(2k+1)`, so that `c = κ_n a^{2n}`.
pub fn kappa(n: u32) -> Rational {
    let mut acc = Rational::one();
    for k in 1..=n {
        acc -= transport_coefficient(n, k);
    }
    acc
}

pub fn coefficient_table(n: u32) -> Result<CoefficientTable> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    let len = 2 * n as usize - 1;
    let mut c = alloc::vec![Rational::zero(); len];
    c[0] = c1_closed_form(n);
    for m in 1..n {
        let mut acc = Rational::zero();
        for j in m + 1..=n + 1 {
            acc += alternating(j + 1) * binomial_q(n + 1, j)
                * frac(2 * j as i64 - 2 * m as i64 - 1, 2 * j as i64 - 1);
        }
        c[2 * m as usize - 1] = acc;
    }
    for m in 2..=n {
        let mut acc = Rational::zero();
        for j in m + 1..=n + 1 {
            acc += alternating(j + 1) * binomial_q(n + 1, j)
                * frac(2 * j as i64 - 2 * m as i64, 2 * j as i64 - 1);
        }
        c[2 * m as usize - 2] = acc;
    }
    let d = c
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { -v.clone() } else { v.clone() })
        .collect();
    let b = double_factorial_sum(n)?;
    let two_minus_c1 = int(2) - &c[0];
    let table = CoefficientTable {
        n,
        c,
        d,
        leading: alternating(n) / int(2 * n as i64 + 1),
        b,
        two_minus_c1,
    };
    if verify_recurrences(&table)
        .iter()
        .any(|cert| cert.status == Status::Fail)
    {
        return Err(Error::SelfCheck(n));
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IdentityId {
    #[serde(rename = "E2.14")]
    E2_14,
    #[serde(rename = "E2.15")]
    E2_15,
    #[serde(rename = "E2.16")]
    E2_16,
    #[serde(rename = "E2.17")]
    E2_17,
    #[serde(rename = "E3.33")]
    E3_33,
    #[serde(rename = "E3.34")]
    E3_34,
    #[serde(rename = "E3.35")]
    E3_35,
    #[serde(rename = "R4.3")]
    R4_3,
    #[serde(rename = "R4.4")]
    R4_4,
    #[serde(rename = "PHI_NONPOS")]
    PhiNonpos,
    #[serde(rename = "COMBINATION_FORMULA")]
    CombinationFormula,
    /// `c₁ = −B`.
    #[serde(rename = "C1_LINK")]
    C1Link,
    /// `f(z) = (1+z)²φ(z)/2`.
    #[serde(rename = "F_FACTORIZATION")]
    FFactorization,
}

impl IdentityId {
    pub fn label(self) -> &'static str {
        match self {
            IdentityId::E2_14 => "E2.14",
            IdentityId::E2_15 => "E2.15",
            IdentityId::E2_16 => "E2.16",
            IdentityId::E2_17 => "E2.17",
            IdentityId::E3_33 => "E3.33",
            IdentityId::E3_34 => "E3.34",
            IdentityId::E3_35 => "E3.35",
            IdentityId::R4_3 => "R4.3",
            IdentityId::R4_4 => "R4.4",
            IdentityId::PhiNonpos => "PHI_NONPOS",
            IdentityId::CombinationFormula => "COMBINATION_FORMULA",
            IdentityId::C1Link => "C1_LINK",
            IdentityId::FFactorization => "F_FACTORIZATION",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> core::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

fn ser_opt_rational<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> core::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.collect_str(q),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub n: u32,
    /// LHS − RHS, or the violating value for inequalities.
    #[serde(serialize_with = "ser_rational")]
    pub residual: Rational,
    /// Sample point for pointwise claims.
    #[serde(serialize_with = "ser_opt_rational", skip_serializing_if = "Option::is_none")]
    pub at: Option<Rational>,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    identity_id: IdentityId,
    n_range: (u32, u32),
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
}

impl Certificate {
    pub fn pass(identity_id: IdentityId, n_range: (u32, u32)) -> Self {
        Self { identity_id, n_range, status: Status::Pass, witness: None, variant: None }
    }

    pub fn fail(identity_id: IdentityId, n_range: (u32, u32), witness: Witness) -> Self {
        Self { identity_id, n_range, status: Status::Fail, witness: Some(witness), variant: None }
    }

    fn with_variant(mut self, variant: &str) -> Self {
        self.variant = Some(variant.into());
        self
    }

    pub fn identity_id(&self) -> IdentityId {
        self.identity_id
    }

    pub fn n_range(&self) -> (u32, u32) {
        self.n_range
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn variant(&self) -> Option<&str> {
        self.variant.as_deref()
    }
}

struct Relation {
    k: usize,
    rhs: Rational,
    line: u8,
}

/// Lines of the recurrence system in the order they are checked.
fn relations(n: u32) -> Vec<Relation> {
    let n_us = n as usize;
    let mut out = Vec::new();
    out.push(Relation { k: 2 * n_us + 1, rhs: Rational::zero(), line: 1 });
    out.push(Relation { k: 2 * n_us, rhs: f_density_coefficient(n, n), line: 2 });
    for j in 1..n_us {
        out.push(Relation { k: 2 * j + 1, rhs: Rational::zero(), line: 3 });
    }
    for j in 2..n_us {
        out.push(Relation { k: 2 * j, rhs: f_density_coefficient(n, j as u32), line: 4 });
    }
    out.push(Relation { k: 2, rhs: int(n as i64 + 1), line: 5 });
    out
}

fn check_system(table: &CoefficientTable, flipped: bool) -> Certificate {
    let id = if flipped { IdentityId::R4_4 } else { IdentityId::R4_3 };
    let n = table.n;
    let e = table.extended(flipped);
    let two = int(if flipped { 2 } else { -2 });
    for rel in relations(n) {
        let lhs = &e[rel.k] + &two * &e[rel.k - 1] + &e[rel.k - 2];
        let residual = lhs - &rel.rhs;
        if !residual.is_zero() {
            let sym = if flipped { 'd' } else { 'c' };
            return Certificate::fail(
                id,
                (n, n),
                Witness {
                    n,
                    residual,
                    at: None,
                    relation: format!("line {} at k = {} ({sym})", rel.line, rel.k),
                },
            );
        }
    }
    Certificate::pass(id, (n, n))
}

/// Checks both recurrence systems; the first entry covers `c`, the second `d`.
pub fn verify_recurrences(table: &CoefficientTable) -> Vec<Certificate> {
    alloc::vec![check_system(table, false), check_system(table, true)]
}

fn identity_over_range(
    id: IdentityId,
    n_max: u32,
    mut residual: impl FnMut(u32) -> Rational,
) -> Certificate {
    for n in 1..=n_max {
        let r = residual(n);
        if !r.is_zero() {
            return Certificate::fail(
                id,
                (1, n_max),
                Witness { n, residual: r, at: None, relation: String::from("lhs - rhs") },
            );
        }
    }
    Certificate::pass(id, (1, n_max))
}

fn sum_transport(n: u32, upper: u32) -> Rational {
    (1..=upper).map(|k| transport_coefficient(n, k)).sum()
}

fn sum_nonlocal(n: u32) -> Rational {
    (1..=n).map(|k| nonlocal_coefficient(n, k)).sum()
}

pub fn identity_2_14_residual(n: u32) -> Rational {
    let t = sum_transport(n, n);
    let lhs = ((int(2 * n as i64) + &t) + int(2 * n as i64 + 1) * sum_nonlocal(n))
        / int(4 * n as i64 * (n as i64 + 1));
    lhs - (Rational::one() - t)
}

/// Residual of the second auxiliary identity with the upper limit of its
/// first sum set to `upper` (`n − 1` as printed, or `n`).
pub fn identity_2_15_residual(n: u32, upper: u32) -> Rational {
    let lhs = int(2 * n as i64 + 1) * sum_transport(n, upper) + sum_nonlocal(n);
    lhs - (int(2 * n as i64) + alternating(n))
}

pub fn identity_2_16_residual(n: u32) -> Rational {
    let lhs = sum_transport(n, n - 1);
    let rhs = -(even_over_odd_double_factorial(n)
        - Rational::one()
        - alternating(n) / int(2 * n as i64 + 1));
    lhs - rhs
}

pub fn identity_2_17_residual(n: u32) -> Rational {
    sum_nonlocal(n) - (even_over_lower_odd_double_factorial(n) - Rational::one())
}

pub fn combination_formula_residual(n: u32) -> Rational {
    let lhs: Rational = (0..=n)
        .map(|k| alternating(k) * binomial_q(n, k) / int(2 * k as i64 + 1))
        .sum();
    lhs - even_over_odd_double_factorial(n)
}

pub fn identity_3_33_residual(n: u32) -> Rational {
    let rhs: Rational =
        Rational::one() + (1..=n + 1).map(|k| f_density_coefficient(n, k)).sum::<Rational>();
    (int(2) - c1_closed_form(n)) - rhs
}

pub fn identity_3_34_residual(n: u32) -> Rational {
    let lhs: Rational = (1..=n + 1)
        .map(|k| alternating(k + 1) * binomial_q(n + 1, k))
        .sum();
    lhs - Rational::one()
}

pub fn c1_link_residual(n: u32) -> Rational {
    c1_closed_form(n) + (1..=n).map(even_over_odd_double_factorial).sum::<Rational>()
}

/// Certificates for the scalar identities over `n = 1..=n_max`.
///
/// The certificate for the second auxiliary identity records which upper
/// limit of its first sum makes it exact (`"upper=n-1"` or `"upper=n"`).
pub fn verify_identities(n_max: u32) -> Result<Vec<Certificate>> {
    if n_max == 0 {
        return Err(Error::ZeroDegree);
    }
    let printed = identity_over_range(IdentityId::E2_15, n_max, |n| identity_2_15_residual(n, n - 1));
    let e2_15 = if printed.passed() {
        printed.with_variant("upper=n-1")
    } else {
        let alt = identity_over_range(IdentityId::E2_15, n_max, |n| identity_2_15_residual(n, n));
        if alt.passed() {
            alt.with_variant("upper=n")
        } else {
            printed.with_variant("neither")
        }
    };
    Ok(alloc::vec![
        identity_over_range(IdentityId::E2_14, n_max, identity_2_14_residual),
        e2_15,
        identity_over_range(IdentityId::E2_16, n_max, identity_2_16_residual),
        identity_over_range(IdentityId::E2_17, n_max, identity_2_17_residual),
        identity_over_range(IdentityId::E3_33, n_max, identity_3_33_residual),
        identity_over_range(IdentityId::E3_34, n_max, identity_3_34_residual),
        identity_over_range(IdentityId::CombinationFormula, n_max, combination_formula_residual),
        identity_over_range(IdentityId::C1Link, n_max, c1_link_residual),
    ])
}

/// Scaled integer form of `φ` on the grid `z = j/D`:
/// `Φ(j) = S·φ(j/D)` with `S = Q·D^{2n−2}` and `Q` the lcm of the
/// coefficient denominators.
struct ScaledPhi {
    n: usize,
    den: BigInt,
    /// `Q·c_{2k−1}` as integers, `k = 1..n`.
    p: Vec<BigInt>,
    q: BigInt,
}

impl ScaledPhi {
    fn new(coeffs: &[Rational], den: u64) -> Self {
        let q = lcm_of_denominators(coeffs);
        let p = coeffs.iter().map(|c| (c * Rational::from_integer(q.clone())).to_integer()).collect();
        Self { n: coeffs.len(), den: BigInt::from(den), p, q }
    }

    fn eval(&self, j: u64) -> BigInt {
        // Σ p_k j^{2k−2} D^{2n−2k}, Horner in (j², D²).
        let j2 = BigInt::from(j) * BigInt::from(j);
        let d2 = &self.den * &self.den;
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        let mut terms = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            terms.push(dpow.clone());
            dpow *= &d2;
        }
        for k in (0..self.n).rev() {
            acc = acc * &j2 + &self.p[k] * &terms[self.n - 1 - k];
        }
        acc
    }

    fn scale(&self) -> BigInt {
        &self.q * num_traits::pow(self.den.clone(), 2 * self.n - 2)
    }
}

/// Upper bound of `φ` over `[l, r] ⊂ [0, 1]`, from the endpoint values and
/// the smaller of a Lipschitz and a curvature remainder. Both remainders use
/// coefficient magnitudes evaluated at `r`, which dominate the interval
/// since every term is monotone in `|z|`.
fn cell_upper_bound(coeffs: &[Rational], l: &Rational, r: &Rational) -> Rational {
    let h = r - l;
    let fl = phi_eval(coeffs, l);
    let fr = phi_eval(coeffs, r);
    let top = if fl > fr { fl } else { fr };
    let mut lip = Rational::zero();
    let mut curv = Rational::zero();
    for (idx, c) in coeffs.iter().enumerate().skip(1) {
        let deg = 2 * idx as i64;
        let mag = c.abs();
        lip += &mag * int(deg) * num_traits::pow(r.clone(), deg as usize - 1);
        curv += &mag * int(deg * (deg - 1)) * num_traits::pow(r.clone(), deg as usize - 2);
    }
    let rem_lip = lip * &h / int(2);
    let rem_curv = curv * &h * &h / int(8);
    top + if rem_lip < rem_curv { rem_lip } else { rem_curv }
}

fn phi_eval(coeffs: &[Rational], z: &Rational) -> Rational {
    let z2 = z * z;
    eval_poly(coeffs, &z2)
}

fn certify_cell(coeffs: &[Rational], l: Rational, r: Rational, depth: u32) -> Option<(Rational, Rational)> {
    let bound = cell_upper_bound(coeffs, &l, &r);
    if bound <= Rational::zero() {
        return None;
    }
    if depth == 0 {
        return Some((l, bound));
    }
    let mid = (&l + &r) / int(2);
    certify_cell(coeffs, l, mid.clone(), depth - 1).or_else(|| certify_cell(coeffs, mid, r, depth - 1))
}

/// Certifies `φ(z) ≤ 0` on `[−1, 1]` and `φ(z)(1+z)² ≤ −B` at the samples
/// `z = j/D ∈ [0, 1)`.
///
/// `φ` is even, so `[0, 1]` suffices. Every cell `[j/D, (j+1)/D]` is covered
/// by an exact endpoint evaluation plus a remainder bound; cells whose
/// bound is inconclusive are bisected (up to 24 levels) before failing.
pub fn certify_phi_nonpositive(n: u32, denominator_bound: u64) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    if denominator_bound < 64 {
        return Err(Error::InvalidGrid("phi certification needs at least 64 cells"));
    }
    let table = coefficient_table(n)?;
    Ok(certify_phi_for_table(&table, denominator_bound))
}

pub fn certify_phi_for_table(table: &CoefficientTable, denominator_bound: u64) -> Certificate {
    let n = table.n;
    let id = IdentityId::PhiNonpos;
    let coeffs = table.phi_even_coefficients();
    let scaled = ScaledPhi::new(&coeffs, denominator_bound);
    let s = scaled.scale();
    let dz = |j: u64| Rational::new(BigInt::from(j), BigInt::from(denominator_bound));
    let fail = |at: Rational, residual: Rational, relation: &str| {
        Certificate::fail(id, (n, n), Witness { n, residual, at: Some(at), relation: relation.into() })
    };

    let values: Vec<BigInt> = (0..=denominator_bound).map(|j| scaled.eval(j)).collect();
    let to_phi = |v: &BigInt| Rational::new(v.clone(), s.clone());
    for (j, v) in values.iter().enumerate() {
        if v.is_positive() {
            return fail(dz(j as u64), to_phi(v), "phi(z) <= 0 at sample");
        }
    }

    // Sharp bound: φ(j/D)·(D+j)²/D² ≤ −B, compared as integers.
    let b = table.b();
    let d = BigInt::from(denominator_bound);
    let rhs_scale = &s * &d * &d * b.numer();
    for (j, v) in values.iter().enumerate().take(denominator_bound as usize) {
        let w = BigInt::from(denominator_bound + j as u64);
        let lhs = v * &w * &w * b.denom();
        if lhs > -rhs_scale.clone() {
            let phi = to_phi(v);
            let one_plus = Rational::one() + dz(j as u64);
            let residual = phi * &one_plus * &one_plus + b;
            return fail(dz(j as u64), residual, "phi(z)(1+z)^2 <= -B at sample");
        }
    }

    // Cell remainders in the same integer scaling, times 8:
    // 8·max(Φ_j, Φ_{j+1}) + min(4·L, M(j+1)) ≤ 0 with
    // L = Σ_k |p_k|(2k−2) D^{2n−3} and M(j) = Σ_k |p_k|(2k−2)(2k−3) j^{2k−4} D^{2n−2k}.
    let nn = scaled.n;
    let abs_p: Vec<BigInt> = scaled.p.iter().map(|v| v.abs()).collect();
    let lip: BigInt = if nn >= 2 {
        let dpow = num_traits::pow(d.clone(), 2 * nn - 3);
        abs_p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, p)| p * BigInt::from(2 * i as u64) * &dpow)
            .sum::<BigInt>()
            * 4
    } else {
        BigInt::zero()
    };
    let dpows: Vec<BigInt> = (0..nn).map(|i| num_traits::pow(d.clone(), 2 * i)).collect();
    for j in 0..denominator_bound as usize {
        let top = if values[j] > values[j + 1] { &values[j] } else { &values[j + 1] };
        let jr = BigInt::from(j as u64 + 1);
        let jr2 = &jr * &jr;
        let mut curv = BigInt::zero();
        let mut jpow = BigInt::one();
        for (i, p) in abs_p.iter().enumerate().skip(1) {
            let k = i as u64 + 1;
            curv += p * BigInt::from((2 * k - 2) * (2 * k - 3)) * &jpow * &dpows[nn - k as usize];
            jpow *= &jr2;
        }
        let rem = if lip < curv { &lip } else { &curv };
        let bound: BigInt = top * BigInt::from(8u32) + rem;
        if bound.is_positive() {
            if let Some((at, ub)) = certify_cell(&coeffs, dz(j as u64), dz(j as u64 + 1), 24) {
                return fail(at, ub, "phi <= 0 on cell (remainder bound)");
            }
        }
    }
    Certificate::pass(id, (n, n))
}

/// `f(z) = c_{2n−1}z^{2n}/2 + Σ_{k=1}^{2n−1} c_k z^k + c₁/2`.
pub fn f_polynomial(table: &CoefficientTable, z: &Rational) -> Rational {
    let n = table.n as usize;
    let mut coeffs = alloc::vec![Rational::zero(); 2 * n + 1];
    coeffs[0] = table.c1() / int(2);
    for k in 1..2 * n {
        coeffs[k] = table.c(k).clone();
    }
    coeffs[2 * n] = table.c(2 * n - 1) / int(2);
    eval_poly(&coeffs, z)
}

pub fn verify_f_factorization(n: u32, samples: &[Rational]) -> Result<Certificate> {
    let table = coefficient_table(n)?;
    Ok(verify_f_factorization_for_table(&table, samples))
}

pub fn verify_f_factorization_for_table(table: &CoefficientTable, samples: &[Rational]) -> Certificate {
    let n = table.n;
    let coeffs = table.phi_even_coefficients();
    for z in samples {
        let one_plus = Rational::one() + z;
        let rhs = &one_plus * &one_plus / int(2) * phi_eval(&coeffs, z);
        let residual = f_polynomial(table, z) - rhs;
        if !residual.is_zero() {
            return Certificate::fail(
                IdentityId::FFactorization,
                (n, n),
                Witness { n, residual, at: Some(z.clone()), relation: "f(z) = (1+z)^2 phi(z)/2".into() },
            );
        }
    }
    Certificate::pass(IdentityId::FFactorization, (n, n))
}

/// Coefficients of `P₀(y)/a^{2n+2}` as a polynomial in `s = y/a`, ascending:
/// `n s^{2n+2} − (n+1) s^{2n} + 1`.
pub fn p0_target(n: u32) -> Vec<BigInt> {
    let deg = 2 * n as usize + 2;
    let mut out = alloc::vec![BigInt::zero(); deg + 1];
    out[0] = BigInt::one();
    out[deg - 2] = -BigInt::from(n + 1);
    out[deg] = BigInt::from(n);
    out
}

/// Expansion of `(s−1)²(n s^{2n} + Σ_{k=1}^{2n−1}(2n+1−k) s^{2n−k} + 1)`.
///
/// `P₀` is homogeneous of degree `2n+2` in `(y, a)`, so the coefficient of
/// `sᵐ` is the coefficient of `yᵐ a^{2n+2−m}`.
pub fn p0_factored_expansion(n: u32) -> Vec<BigInt> {
    let nn = n as usize;
    let mut quot = alloc::vec![BigInt::zero(); 2 * nn + 1];
    quot[0] = BigInt::one();
    for k in 1..2 * nn {
        quot[2 * nn - k] = BigInt::from(2 * nn + 1 - k);
    }
    quot[2 * nn] = BigInt::from(n);
    let square = [BigInt::one(), BigInt::from(-2), BigInt::one()];
    poly_mul(&square, &quot)
}

pub fn verify_p0_factorization(n: u32) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    let lhs = p0_target(n);
    let rhs = p0_factored_expansion(n);
    for (m, (l, r)) in lhs.iter().zip(rhs.iter()).enumerate() {
        if l != r {
            let deg_a = 2 * n as usize + 2 - m;
            return Ok(Certificate::fail(
                IdentityId::E3_35,
                (n, n),
                Witness {
                    n,
                    residual: Rational::from_integer(l - r),
                    at: None,
                    relation: format!("coefficient of y^{m} a^{deg_a}"),
                },
            ));
        }
    }
    Ok(Certificate::pass(IdentityId::E3_35, (n, n)))
}

/// `f64` view of a coefficient table together with the other exact
/// constants the grid code needs. Every entry is converted once from the
/// exact rational.
#[derive(Debug, Clone)]
pub struct Model {
    n: u32,
    table: CoefficientTable,
    c: Vec<f64>,
    d: Vec<f64>,
    leading: f64,
    two_minus_c1: f64,
    kappa: f64,
    transport: Vec<f64>,
    nonlocal: Vec<f64>,
    f_density: Vec<f64>,
    odd_nonlocal: f64,
}

impl Model {
    pub fn new(n: u32) -> Result<Self> {
        let table = coefficient_table(n)?;
        Ok(Self {
            n,
            c: table.c.iter().map(to_f64).collect(),
            d: table.d.iter().map(to_f64).collect(),
            leading: to_f64(&table.leading),
            two_minus_c1: to_f64(&table.two_minus_c1),
            kappa: to_f64(&kappa(n)),
            transport: (1..=n).map(|k| to_f64(&transport_coefficient(n, k))).collect(),
            nonlocal: (1..=n).map(|k| to_f64(&nonlocal_coefficient(n, k))).collect(),
            f_density: (0..=n + 1).map(|j| to_f64(&f_density_coefficient(n, j))).collect(),
            odd_nonlocal: to_f64(&frac(2 * n as i64, 2 * n as i64 + 1)),
            table,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// `c_k`, 1-based.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn leading(&self) -> f64 {
        self.leading
    }

    pub fn two_minus_c1(&self) -> f64 {
        self.two_minus_c1
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(−1)^{k+1}C^k_n/(2k+1)` for `k = 1..n` (index `k−1`).
    pub fn transport(&self) -> &[f64] {
        &self.transport
    }

    /// `(−1)^{k−1}C^k_n/(2k−1)` for `k = 1..n` (index `k−1`).
    pub fn nonlocal(&self) -> &[f64] {
        &self.nonlocal
    }

    /// Density coefficients of `F`, `j = 0..n+1`.
    pub fn f_density(&self) -> &[f64] {
        &self.f_density
    }

    /// `2n/(2n+1)`.
    pub fn odd_nonlocal(&self) -> f64 {
        self.odd_nonlocal
    }
}
