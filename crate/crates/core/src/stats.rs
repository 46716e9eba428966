//! Small statistical helpers shared by tests, diagnostics and the
//! acceptance checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail p-value of a chi-square statistic with `df` degrees of freedom.
pub fn chi_square_pvalue(stat: f64, df: usize) -> f64 {
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// Chi-square goodness-of-fit p-value of observed counts against exact
/// category probabilities.
pub fn chi_square_gof(counts: &[usize], probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), probs.len());
    let total: usize = counts.iter().sum();
    let mut stat = 0.0;
    let mut df = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if e > 0.0 {
            stat += (c as f64 - e).powi(2) / e;
            df += 1;
        } else {
            assert_eq!(c, 0, "observed mass in a zero-probability category");
        }
    }
    chi_square_pvalue(stat, df.saturating_sub(1))
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Median (averages the middle pair for even lengths).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One-sided sign-test p-value for `P(X < Y) > 1/2` given paired
/// observations: the probability under Binomial(n, 1/2) of seeing at least
/// the observed number of `x < y` pairs. Ties are dropped.
pub fn sign_test_less(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut wins = 0u64;
    let mut n = 0u64;
    for (&x, &y) in xs.iter().zip(ys) {
        if x < y {
            wins += 1;
            n += 1;
        } else if x > y {
            n += 1;
        }
    }
    binomial_upper_tail(wins, n)
}

/// P(Bin(n, 1/2) >= k), computed with log-binomial coefficients.
fn binomial_upper_tail(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ln_half = 0.5f64.ln();
    let mut p = 0.0;
    for j in k..=n {
        p += (ln_choose(n, j) + n as f64 * ln_half).exp();
    }
    p.min(1.0)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
