//! Closed-form expected times, variances and order-statistics bounds on
//! complete graphs. All logarithms are natural; times are in time units.

use serde::Serialize;

use crate::error::{Error, Result};

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Minority and majority sizes `r = round(n rho)`, `s = n - r`.
fn binary_sizes(n: usize, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(domain(format!("minority fraction {rho} outside (0, 1/2)")));
    }
    let r = (n as f64 * rho).round();
    let s = n as f64 - r;
    if r < 1.0 || s <= r {
        return Err(domain(format!("need 1 <= r < s, got r = {r}, s = {s}")));
    }
    Ok((r, s))
}

/// `sum_{i<r} n / (2 (r-i)(s-i))`: expected extinction time of the smaller
/// singleton population `r` against `s`.
fn sojourn_mean(n: f64, r: f64, s: f64) -> f64 {
    (0..r as u64)
        .map(|i| {
            let i = i as f64;
            n / (2.0 * (r - i) * (s - i))
        })
        .sum()
}

fn sojourn_var(n: f64, r: f64, s: f64) -> f64 {
    (0..r as u64)
        .map(|i| {
            let i = i as f64;
            let d = 2.0 * (r - i) * (s - i);
            n * n / (d * d)
        })
        .sum()
}

pub fn harmonic(m: u64) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Exact expected first-phase time on the complete graph.
pub fn expected_tau1(n: usize, rho: f64) -> Result<f64> {
    let (r, s) = binary_sizes(n, rho)?;
    Ok(sojourn_mean(n as f64, r, s))
}

/// The logarithmic approximation `n / (2(s-r)) * ln(r(s-r)/s)`.
pub fn expected_tau1_log(n: usize, rho: f64) -> Result<f64> {
    let (r, s) = binary_sizes(n, rho)?;
    Ok(n as f64 / (2.0 * (s - r)) * (r * (s - r) / s).ln())
}

pub fn var_tau1(n: usize, rho: f64) -> Result<f64> {
    let (r, s) = binary_sizes(n, rho)?;
    Ok(sojourn_var(n as f64, r, s))
}

/// Upper bound on the expected second-phase time, `H_r / (2(1 - 2 rho))`.
pub fn expected_tau2_bound(n: usize, rho: f64) -> Result<f64> {
    let (r, s) = binary_sizes(n, rho)?;
    // n / (2 (r-i) n(1-2rho)) with n(1 - 2rho) = s - r
    Ok(n as f64 * harmonic(r as u64) / (2.0 * (s - r)))
}

/// `ln(2 n rho) / (2(1 - 2 rho))`.
pub fn expected_tau2_bound_log(n: usize, rho: f64) -> Result<f64> {
    binary_sizes(n, rho)?;
    Ok((2.0 * n as f64 * rho).ln() / (2.0 * (1.0 - 2.0 * rho)))
}

/// `(ln(n rho (1-2rho)/(1-rho)) + ln(2 n rho)) / (2(1 - 2 rho))`.
pub fn total_bound_binary(n: usize, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(domain(format!("minority fraction {rho} outside (0, 1/2)")));
    }
    let nf = n as f64;
    let a = nf * rho * (1.0 - 2.0 * rho) / (1.0 - rho);
    let b = 2.0 * nf * rho;
    if a <= 1.0 || b <= 1.0 {
        return Err(domain(format!("log arguments {a}, {b} must exceed 1")));
    }
    Ok((a.ln() + b.ln()) / (2.0 * (1.0 - 2.0 * rho)))
}

/// Mean and variance of the first time the projection onto two choices with
/// fractions `rho_k`, `rho_l` hits its convergence set. The smaller
/// population plays `r`, the larger `s`.
pub fn pairwise_moments(n: usize, rho_k: f64, rho_l: f64) -> Result<(f64, f64)> {
    if !(rho_k > 0.0 && rho_l > 0.0) {
        return Err(domain("fractions must be positive"));
    }
    let nf = n as f64;
    let r = (nf * rho_k.min(rho_l)).round();
    let s = (nf * rho_k.max(rho_l)).round();
    if r < 1.0 || s <= r {
        return Err(domain(format!(
            "pair ({rho_k}, {rho_l}) gives r = {r}, s = {s}; need 1 <= r < s"
        )));
    }
    Ok((sojourn_mean(nf, r, s), sojourn_var(nf, r, s)))
}

/// Upper bound on `E[max Z_r]` from the means and variances of dependent
/// variables: `mean(mu) + sqrt((R-1)/R * sum(var_r + (mu_r - mean(mu))^2))`.
pub fn order_stat_bound(means: &[f64], variances: &[f64]) -> Result<f64> {
    let r = means.len();
    if r < 2 {
        return Err(domain(format!("need at least two variables, got {r}")));
    }
    if variances.len() != r {
        return Err(domain("means and variances differ in length"));
    }
    if variances.iter().any(|v| !(*v >= 0.0)) {
        return Err(domain("variances must be nonnegative"));
    }
    let rf = r as f64;
    let mu = means.iter().sum::<f64>() / rf;
    let spread: f64 = means
        .iter()
        .zip(variances)
        .map(|(m, v)| v + (m - mu) * (m - mu))
        .sum();
    Ok(mu + ((rf - 1.0) / rf * spread).sqrt())
}

fn check_descending(rho: &[f64]) -> Result<()> {
    if rho.len() < 2 {
        return Err(domain(format!("need K >= 2, got {}", rho.len())));
    }
    if rho.windows(2).any(|w| w[0] <= w[1]) || rho.iter().any(|r| !(*r > 0.0)) {
        return Err(domain(format!("fractions {rho:?} are not positive and strictly descending")));
    }
    Ok(())
}

fn max_bound(means: Vec<f64>, vars: Vec<f64>) -> Result<f64> {
    if means.len() == 1 {
        Ok(means[0])
    } else {
        order_stat_bound(&means, &vars)
    }
}

/// All pairwise hitting-time moments, pairs `(a, b)` with `a < b`.
pub fn pairwise_table(n: usize, rho: &[f64]) -> Result<Vec<(usize, usize, f64, f64)>> {
    check_descending(rho)?;
    let mut out = Vec::new();
    for a in 0..rho.len() {
        for b in a + 1..rho.len() {
            let (m, v) = pairwise_moments(n, rho[a], rho[b])?;
            out.push((a, b, m, v));
        }
    }
    Ok(out)
}

/// Bound on the expected time to enter the convergence set.
pub fn tau_x_bound(n: usize, rho: &[f64]) -> Result<f64> {
    let table = pairwise_table(n, rho)?;
    max_bound(
        table.iter().map(|t| t.2).collect(),
        table.iter().map(|t| t.3).collect(),
    )
}

/// Per-level dissemination moments `(ln n / (2 gap), 1 / (4 gap^2))` for
/// levels `1..K-1`, with `gap = rho_j - rho_{j+1}`.
pub fn tau_prime_levels(n: usize, rho: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_descending(rho)?;
    let ln_n = (n as f64).ln();
    Ok(rho
        .windows(2)
        .map(|w| {
            let gap = w[0] - w[1];
            (ln_n / (2.0 * gap), 1.0 / (4.0 * gap * gap))
        })
        .collect())
}

/// Bound on the expected memory-dissemination time after entering the
/// convergence set.
pub fn tau_prime_bound(n: usize, rho: &[f64]) -> Result<f64> {
    let levels = tau_prime_levels(n, rho)?;
    max_bound(
        levels.iter().map(|l| l.0).collect(),
        levels.iter().map(|l| l.1).collect(),
    )
}

/// One named value of the bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub quantity: String,
    pub value: f64,
}

/// Every formula that applies to `(n, rho)`: the binary ones when `K = 2`,
/// the pairwise and order-statistics ones always.
pub fn bounds_table(n: usize, rho: &[f64]) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    let mut push = |q: String, v: f64| rows.push(BoundRow { quantity: q, value: v });
    if rho.len() == 2 {
        let minority = rho[1];
        push("expected_tau1".into(), expected_tau1(n, minority)?);
        push("expected_tau1_log".into(), expected_tau1_log(n, minority)?);
        push("var_tau1".into(), var_tau1(n, minority)?);
        push("expected_tau2_bound".into(), expected_tau2_bound(n, minority)?);
        push("expected_tau2_bound_log".into(), expected_tau2_bound_log(n, minority)?);
        if let Ok(v) = total_bound_binary(n, minority) {
            push("total_bound_binary".into(), v);
        }
    }
    for (a, b, m, v) in pairwise_table(n, rho)? {
        push(format!("pair_mean[{a},{b}]"), m);
        push(format!("pair_var[{a},{b}]"), v);
    }
    push("tau_x_bound".into(), tau_x_bound(n, rho)?);
    for (j, (m, v)) in tau_prime_levels(n, rho)?.into_iter().enumerate() {
        push(format!("level_mean[{}]", j + 1), m);
        push(format!("level_var[{}]", j + 1), v);
    }
    push("tau_prime_bound".into(), tau_prime_bound(n, rho)?);
    Ok(rows)
}
