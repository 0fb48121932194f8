//! Exact certificate bundle for `n ∈ 1..=n_max`.

use gmch_core::coefficients::{
    certify_phi_for_table, coefficient_table, verify_f_factorization_for_table, verify_identities,
    verify_p0_factorization, verify_recurrences,
};
use gmch_core::exact::{frac, int, Rational};
use gmch_core::{Certificate, IdentityId};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LabError;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub n_max: u32,
    /// Denominator bound of the rational grid for the φ certificate.
    pub phi_denominator: u64,
    /// Corrupt `d₁` of the table for this `n` by `+1/5`.
    pub inject_fault: Option<u32>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { n_max: 20, phi_denominator: 4096, inject_fault: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bundle {
    pub n_max: u32,
    pub all_passed: bool,
    pub certificates: Vec<Certificate>,
}

impl Bundle {
    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| !c.passed())
    }
}

/// Rational sample points for the `f(z)` factorization check.
fn factorization_samples() -> Vec<Rational> {
    let mut v: Vec<Rational> = (-6..=6).map(|k| frac(k, 7)).collect();
    v.extend([int(2), int(-3), frac(101, 97)]);
    v
}

/// One certificate per identity over `1..=n_max`, carrying the first
/// failing witness if any.
fn merge(id: IdentityId, n_max: u32, per_n: &[Certificate]) -> Certificate {
    match per_n.iter().find(|c| !c.passed()).and_then(|c| c.witness()) {
        Some(w) => Certificate::fail(id, (1, n_max), w.clone()),
        None => Certificate::pass(id, (1, n_max)),
    }
}

pub fn certify(opts: &CertifyOptions) -> Result<Bundle, LabError> {
    if opts.n_max == 0 {
        return Err(LabError::Internal(anyhow::anyhow!("n_max must be at least 1")));
    }
    let mut certificates = verify_identities(opts.n_max)?;
    let samples = factorization_samples();
    let per_n: Vec<Vec<Certificate>> = (1..=opts.n_max)
        .into_par_iter()
        .map(|n| -> Result<Vec<Certificate>, gmch_core::Error> {
            let mut table = coefficient_table(n)?;
            if opts.inject_fault == Some(n) {
                let bad = table.d(1) + frac(1, 5);
                table = table.with_corrupted_d(1, bad);
            }
            let mut out = verify_recurrences(&table);
            out.push(certify_phi_for_table(&table, opts.phi_denominator));
            out.push(verify_f_factorization_for_table(&table, &samples));
            out.push(verify_p0_factorization(n)?);
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let ids = per_n.first().map(|c| c.iter().map(|c| c.identity_id()).collect::<Vec<_>>()).unwrap_or_default();
    for (slot, id) in ids.into_iter().enumerate() {
        let column: Vec<Certificate> = per_n.iter().map(|row| row[slot].clone()).collect();
        certificates.push(merge(id, opts.n_max, &column));
    }
    certificates.sort_by_key(|c| c.identity_id());
    let all_passed = certificates.iter().all(|c| c.passed());
    Ok(Bundle { n_max: opts.n_max, all_passed, certificates })
}
