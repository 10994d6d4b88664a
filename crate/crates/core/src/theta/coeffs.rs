use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormId {
    F,
    G,
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormId::F => "f",
            FormId::G => "g",
        })
    }
}

impl FromStr for FormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(FormId::F),
            "g" => Ok(FormId::G),
            _ => Err(Error::Invalid(format!("unknown form `{s}` (expected f or g)"))),
        }
    }
}

/// q-expansion coefficients a_0..=a_N of one of the forms; a_0 is always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffStream {
    pub form: FormId,
    coefficients: Vec<Integer>,
}

impl CoeffStream {
    /// a_n, for 0 ≤ n ≤ len().
    pub fn get(&self, n: usize) -> &Integer {
        &self.coefficients[n]
    }

    /// Largest available index N.
    pub fn len(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// a_1, …, a_N.
    pub fn coefficients(&self) -> &[Integer] {
        &self.coefficients[1..]
    }
}

/// Sparse series Σ c_k q^{e_k}, exponents increasing.
type Sparse = Vec<(usize, i64)>;

/// Σ_{n≥0} q^{n(n+1)}: θ2(q) = 2q^{1/4} times this.
fn theta2_core(n_max: usize) -> Sparse {
    (0..).map(|n| n * (n + 1)).take_while(|&e| e <= n_max).map(|e| (e, 1)).collect()
}

/// θ4(q^step) = 1 + 2Σ(-1)^n q^{step·n²}.
fn theta4_sparse(step: usize, n_max: usize) -> Sparse {
    let mut out = vec![(0, 1)];
    out.extend(
        (1..)
            .map(|n: usize| (step * n * n, if n % 2 == 1 { -2 } else { 2 }))
            .take_while(|&(e, _)| e <= n_max),
    );
    out
}

/// dense × sparse, truncated at degree n_max. Output coefficients are independent,
/// so they are computed in parallel. Machine integers suffice for every index the
/// crate can store; overflow is reported rather than wrapped.
fn mul_sparse(dense: &[i64], sparse: &Sparse, n_max: usize) -> Result<Vec<i64>> {
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = 0i64;
            for &(e, c) in sparse.iter().take_while(|(e, _)| *e <= n) {
                acc = dense[n - e]
                    .checked_mul(c)
                    .and_then(|t| acc.checked_add(t))
                    .ok_or_else(|| Error::Invalid(format!("coefficient overflow at q^{n}")))?;
            }
            Ok(acc)
        })
        .collect()
}

/// Exact q-expansion through q^N by integer power-series multiplication:
/// f = q·P⁴·θ4(q)², g = q·P⁴·θ4(q²)², with P = Σ q^{n(n+1)} so that θ2⁴ = 16qP⁴.
pub fn coeffs_convolution(form: FormId, n: usize) -> Result<CoeffStream> {
    if n == 0 {
        return Err(Error::Invalid("coefficient count must be at least 1".into()));
    }
    let m = n - 1; // degree needed in the cofactor of q
    let core = theta2_core(m);
    let mut dense = vec![0i64; m + 1];
    dense[0] = 1;
    for _ in 0..4 {
        dense = mul_sparse(&dense, &core, m)?;
    }
    let t4 = match form {
        FormId::F => theta4_sparse(1, m),
        FormId::G => theta4_sparse(2, m),
    };
    dense = mul_sparse(&dense, &t4, m)?;
    dense = mul_sparse(&dense, &t4, m)?;
    let mut coefficients = Vec::with_capacity(n + 1);
    coefficients.push(Integer::new());
    coefficients.extend(dense.into_iter().map(Integer::from));
    Ok(CoeffStream { form, coefficients })
}

fn chi4(n: usize) -> i64 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// a_m = Σ_{nk=m} ψ(n) n² χ₋₄(k), ψ(n) = (-1)^{n-1}; only defined for f.
pub fn coeffs_lambert(form: FormId, n: usize) -> Result<CoeffStream> {
    if form != FormId::F {
        return Err(Error::Invalid("the twisted divisor-sum expansion exists only for f".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("coefficient count must be at least 1".into()));
    }
    let mut coefficients = vec![Integer::new(); n + 1];
    for d in 1..=n {
        let psi: i64 = if d % 2 == 1 { 1 } else { -1 };
        let w = Integer::from(d) * d * psi;
        for k in 1..=n / d {
            match chi4(k) {
                1 => coefficients[d * k] += &w,
                -1 => coefficients[d * k] -= &w,
                _ => {}
            }
        }
    }
    Ok(CoeffStream { form, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn first_coefficients() {
        let f = coeffs_convolution(FormId::F, 3).unwrap();
        assert_eq!(f.coefficients(), ints(&[1, -4, 8]).as_slice());
        assert_eq!(*f.get(0), 0);
        let g = coeffs_convolution(FormId::G, 5).unwrap();
        assert_eq!(g.coefficients(), ints(&[1, 0, 0, 0, -6]).as_slice());
        let l = coeffs_lambert(FormId::F, 3).unwrap();
        assert_eq!(l.coefficients(), ints(&[1, -4, 8]).as_slice());
    }

    /// Dense schoolbook product of the θ-series truncated at q^{n}, computed from
    /// the bilateral definitions in terms of q^{1/4} to avoid the P-factorization.
    #[test]
    fn matches_schoolbook_in_quarter_powers() {
        let n = 60usize;
        let top = 4 * n; // exponents counted in units of q^{1/4}
        let mut t2 = vec![0i64; top + 1];
        for k in -40i64..=40 {
            let e = ((2 * k + 1) * (2 * k + 1)) as usize; // 4·(k+1/2)²
            if e <= top {
                t2[e] += 1;
            }
        }
        let mut t4 = vec![0i64; top + 1];
        for k in -40i64..=40 {
            let e = (4 * k * k) as usize;
            if e <= top {
                t4[e] += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        let mul = |a: &[i64], b: &[i64]| {
            let mut out = vec![0i64; top + 1];
            for (i, &x) in a.iter().enumerate() {
                if x != 0 {
                    for (j, &y) in b.iter().enumerate().take(top + 1 - i) {
                        out[i + j] += x * y;
                    }
                }
            }
            out
        };
        let t2_4 = mul(&mul(&t2, &t2), &mul(&t2, &t2));
        let prod = mul(&t2_4, &mul(&t4, &t4));
        let f = coeffs_convolution(FormId::F, n).unwrap();
        for m in 0..=n {
            assert_eq!(prod[4 * m] % 16, 0);
            assert_eq!(Integer::from(prod[4 * m] / 16), *f.get(m), "a_{m}");
        }
    }

    #[test]
    fn f_oracles_agree() {
        let n = 2000;
        assert_eq!(coeffs_convolution(FormId::F, n).unwrap(), coeffs_lambert(FormId::F, n).unwrap());
    }

    #[test]
    fn g_vanishes_at_inert_primes() {
        let n = 2000;
        let g = coeffs_convolution(FormId::G, n).unwrap();
        let mut sieve = vec![true; n + 1];
        for p in 2..=n {
            if sieve[p] {
                for m in (p * p..=n).step_by(p) {
                    sieve[m] = false;
                }
                if p % 4 == 3 {
                    assert_eq!(*g.get(p), 0, "a_{p}(g)");
                }
            }
        }
    }

    #[test]
    fn rejects_empty_and_lambert_for_g() {
        assert!(coeffs_convolution(FormId::F, 0).is_err());
        assert!(coeffs_lambert(FormId::G, 10).is_err());
    }
}
