//! Decreasing rearrangements, `l_p` and Lorentz `l_{p,q}` quasinorms, and the
//! discrete Hardy transform.
//!
//! All quantities are computed on finite sequences; infinite tails are
//! truncated. The Lorentz weight is `(n+1)^{1/p - 1/q}` with zero-based `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite sequence of nonnegative reals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NonnegSeq(Vec<f64>);

impl NonnegSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::NegativeEntry { index, value });
        }
        Ok(Self(values))
    }

    /// Takes absolute values; panics on non-finite input.
    pub fn from_abs(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().map(f64::abs).collect();
        assert!(v.iter().all(|x| x.is_finite()), "non-finite sequence entry");
        Self(v)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl std::ops::Index<usize> for NonnegSeq {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn decreasing_rearrangement(s: &NonnegSeq) -> NonnegSeq {
    let mut v = s.0.clone();
    v.sort_by(|a, b| b.total_cmp(a));
    NonnegSeq(v)
}

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidExponent { name, value })
    }
}

/// `(sum s_n^p)^{1/p}`; `p = inf` gives the maximum.
pub fn ell_p(s: &NonnegSeq, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if p.is_infinite() {
        return Ok(s.0.iter().copied().fold(0.0, f64::max));
    }
    let sum: f64 = s.0.iter().map(|v| v.powf(p)).sum();
    Ok(sum.powf(1.0 / p))
}

/// Lorentz quasinorm `l_{p,q}` of the decreasing rearrangement. When
/// `q == p` this is exactly [`ell_p`].
pub fn lorentz_pq(s: &NonnegSeq, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if q == p {
        return ell_p(s, p);
    }
    let sorted = decreasing_rearrangement(s);
    if q.is_infinite() {
        return Ok(sorted
            .0
            .iter()
            .enumerate()
            .map(|(n, v)| (n as f64 + 1.0).powf(1.0 / p) * v)
            .fold(0.0, f64::max));
    }
    let exponent = 1.0 / p - 1.0 / q;
    let sum: f64 = sorted
        .0
        .iter()
        .enumerate()
        .map(|(n, v)| ((n as f64 + 1.0).powf(exponent) * v).powf(q))
        .sum();
    Ok(sum.powf(1.0 / q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyTransform {
    /// `a_1, a_2, ...` stored zero-based.
    pub values: NonnegSeq,
    /// True when the input was not nonincreasing and was rearranged first.
    pub rearranged: bool,
}

/// `a_n = n^{-r} (sum_{k=n}^{len} k^{r mu - 1} b_k^mu)^{1/mu}` for `n >= 1`,
/// with `b` indexed from one.
pub fn hardy_transform(b: &NonnegSeq, r: f64, mu: f64) -> Result<HardyTransform> {
    check_exponent("r", r)?;
    check_exponent("mu", mu)?;
    if b.is_empty() {
        return Err(Error::EmptySequence);
    }
    let rearranged = !b.is_nonincreasing();
    let b = if rearranged { decreasing_rearrangement(b) } else { b.clone() };
    let len = b.len();
    let mut tail = vec![0.0; len + 1];
    for k in (1..=len).rev() {
        let term = (k as f64).powf(r * mu - 1.0) * b.0[k - 1].powf(mu);
        tail[k - 1] = tail[k] + term;
    }
    let values = (1..=len).map(|n| (n as f64).powf(-r) * tail[n - 1].powf(1.0 / mu)).collect();
    Ok(HardyTransform { values: NonnegSeq(values), rearranged })
}

/// `||hardy_transform(b)||_{l_{1/s,q}} / ||b||_{l_{1/s,q}}`.
pub fn hardy_check(b: &NonnegSeq, r: f64, mu: f64, s: f64, q: f64) -> Result<f64> {
    if !(s > r) {
        return Err(Error::InvalidExponent { name: "s", value: s });
    }
    let denom = lorentz_pq(b, 1.0 / s, q)?;
    if denom == 0.0 {
        return Err(Error::DivisionByZero("hardy_check on a zero sequence"));
    }
    let a = hardy_transform(b, r, mu)?;
    Ok(lorentz_pq(&a.values, 1.0 / s, q)? / denom)
}
