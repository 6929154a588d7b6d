//! Closed-form first/last-position marginals.
//!
//! Both marginals have combinatorial closed forms with factorial growth:
//! they are evaluated in exact big-rational arithmetic up to
//! [`EXACT_MARGINAL_LIMIT`] and in log-space (log-gamma based) beyond, where
//! deck sizes up to `10^6` and more are routine.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::ExactProb;
use crate::error::Error;
use crate::Result;

/// Largest deck size evaluated in exact rational arithmetic.
pub const EXACT_MARGINAL_LIMIT: usize = 300;

/// A marginal probability together with the arithmetic that produced it.
#[derive(Debug, Clone)]
pub enum MarginalProb {
    /// Exact rational value (deck sizes up to [`EXACT_MARGINAL_LIMIT`]).
    Exact(ExactProb),
    /// Natural log of the probability, from log-space summation.
    Log { log_prob: f64 },
}

impl MarginalProb {
    pub fn prob(&self) -> f64 {
        match self {
            MarginalProb::Exact(p) => p.as_f64(),
            MarginalProb::Log { log_prob } => log_prob.exp(),
        }
    }

    pub fn log_prob(&self) -> f64 {
        match self {
            MarginalProb::Exact(p) => p.as_f64().ln(),
            MarginalProb::Log { log_prob } => *log_prob,
        }
    }

    /// `n * p`, the rescaling under which the limit laws live.
    pub fn rescaled(&self, n: usize) -> f64 {
        match self {
            MarginalProb::Exact(p) => n as f64 * p.as_f64(),
            MarginalProb::Log { log_prob } => (log_prob + (n as f64).ln()).exp(),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            MarginalProb::Exact(_) => "exact",
            MarginalProb::Log { .. } => "log",
        }
    }

    pub fn exact(&self) -> Option<&ExactProb> {
        match self {
            MarginalProb::Exact(p) => Some(p),
            MarginalProb::Log { .. } => None,
        }
    }
}

fn check_range(n: usize, j: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    if j == 0 || j > n {
        return Err(Error::invalid(format!("card {j} outside 1..={n}")));
    }
    Ok(())
}

/// `P(σ_1 = j)`: probability that card `j` ends in the first position.
///
/// For `j <= n-1` this is
/// `(1/n)((n-1)/n)^{n-j} + ((n-1)!/n^n) Σ_{r=0}^{n-j-1} (n-1)^r / r!`,
/// and `1/n` for `j = n`.
pub fn first_pos_prob(n: usize, j: usize) -> Result<MarginalProb> {
    check_range(n, j)?;
    if n <= EXACT_MARGINAL_LIMIT {
        Ok(MarginalProb::Exact(first_pos_exact(n, j)))
    } else {
        Ok(MarginalProb::Log {
            log_prob: first_pos_log(n, j),
        })
    }
}

fn first_pos_exact(n: usize, j: usize) -> ExactProb {
    let big_n = BigUint::from(n);
    let nm1 = BigUint::from(n - 1);
    // (n-1)^{n-j} n^{j-1}
    let mut numerator = nm1.pow((n - j) as u32) * big_n.pow(j as u32 - 1);
    if j < n {
        numerator += first_sum_exact(n, j);
    }
    ExactProb::new(numerator, big_n.pow(n as u32))
}

fn first_sum_exact(n: usize, j: usize) -> BigUint {
    // Σ_{r=0}^{n-j-1} (n-1)^r * (n-1)!/r!
    let nm1 = BigUint::from(n - 1);
    let top = n - j - 1;
    let mut sum = BigUint::zero();
    // walk r downward, carrying (n-1)!/r!
    let mut fact_ratio = BigUint::one();
    for v in (top + 1..n).rev() {
        fact_ratio *= BigUint::from(v);
    }
    let mut power = nm1.pow(top as u32);
    for r in (0..=top).rev() {
        sum += &power * &fact_ratio;
        if r > 0 {
            fact_ratio *= BigUint::from(r);
            power /= &nm1;
        }
    }
    sum
}

fn first_pos_log(n: usize, j: usize) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let ln_nm1 = (nf - 1.0).ln();
    let piece1 = -ln_n + (n - j) as f64 * (ln_nm1 - ln_n);
    if j == n {
        return piece1;
    }
    // Σ_{r=0}^{n-j-1} e^{t_r}, t_r = r ln(n-1) - lgamma(r+1); terms increase
    // in r over the whole range, so sum backward and stop once negligible.
    let top = (n - j - 1) as f64;
    let t_top = top * ln_nm1 - libm::lgamma(top + 1.0);
    let mut sum = 0.0f64;
    let mut t = t_top;
    let mut r = top;
    loop {
        let w = (t - t_top).exp();
        sum += w;
        if w < 1e-18 || r == 0.0 {
            break;
        }
        // t_{r-1} = t_r - ln(n-1) + ln r
        t += r.ln() - ln_nm1;
        r -= 1.0;
    }
    let piece2 = libm::lgamma(nf) - nf * ln_n + t_top + sum.ln();
    log_add(piece1, piece2)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `P(σ_n = j)`: probability that card `j` ends in the last position.
///
/// `((n-1)!/n^n) Σ_{m=j-1}^{n-1} ((m+1)/m)^{j-1} m^m/m!`, with `0^0` and
/// `(1/0)^0` read as 1; the formula covers `j = n` as well, where it
/// collapses to `1/n`.
pub fn last_pos_prob(n: usize, j: usize) -> Result<MarginalProb> {
    check_range(n, j)?;
    if n <= EXACT_MARGINAL_LIMIT {
        Ok(MarginalProb::Exact(last_pos_exact(n, j)))
    } else {
        Ok(MarginalProb::Log {
            log_prob: last_pos_log(n, j),
        })
    }
}

fn last_pos_exact(n: usize, j: usize) -> ExactProb {
    // Σ_{m=j-1}^{n-1} (m+1)^{j-1} m^{m-j+1} (n-1)!/m!
    let mut numerator = BigUint::zero();
    let mut fact_ratio = BigUint::one(); // (n-1)!/m! at m = n-1, built downward
    for m in (j.saturating_sub(1)..n).rev() {
        let term = if m == 0 {
            // j = 1: ((1/0)^0 and 0^0 are 1) so the term is (n-1)!/0!
            fact_ratio.clone()
        } else {
            BigUint::from(m + 1).pow(j as u32 - 1)
                * BigUint::from(m).pow((m + 1 - j) as u32)
                * &fact_ratio
        };
        numerator += term;
        if m > 0 {
            fact_ratio *= BigUint::from(m);
        }
    }
    ExactProb::new(numerator, BigUint::from(n).pow(n as u32))
}

fn last_pos_log(n: usize, j: usize) -> f64 {
    let nf = n as f64;
    // log term_m = (j-1) ln((m+1)/m) + m ln m - lgamma(m+1)
    let term = |m: f64| -> f64 {
        if m == 0.0 {
            0.0
        } else {
            (j as f64 - 1.0) * ((m + 1.0).ln() - m.ln()) + m * m.ln() - libm::lgamma(m + 1.0)
        }
    };
    let mut reference = term(nf - 1.0);
    let mut sum = 1.0f64;
    let mut prev = reference;
    let mut m = nf - 2.0;
    let lo = (j as f64 - 1.0).max(0.0);
    while m >= lo {
        let t = term(m);
        if t > reference {
            sum = sum * (reference - t).exp() + 1.0;
            reference = t;
        } else {
            sum += (t - reference).exp();
        }
        if t - reference < -45.0 && t < prev {
            break;
        }
        prev = t;
        m -= 1.0;
    }
    libm::lgamma(nf) - nf * nf.ln() + reference + sum.ln()
}

/// Natural log of `Σ_{m=1}^{n-1} m^m / m!`, summed stably in log-space.
pub fn power_sum(n: usize) -> f64 {
    assert!(n >= 2, "power_sum needs n >= 2");
    let term = |m: f64| m * m.ln() - libm::lgamma(m + 1.0);
    let reference = term(n as f64 - 1.0);
    let mut sum = 0.0f64;
    let mut m = n as f64 - 1.0;
    while m >= 1.0 {
        let w = (term(m) - reference).exp();
        sum += w;
        if w < 1e-18 {
            break;
        }
        m -= 1.0;
    }
    reference + sum.ln()
}
