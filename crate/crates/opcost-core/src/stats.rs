//! Rank correlation and fit-accuracy statistics.
//!
//! Both correlations are total-order comparisons of two paired samples:
//! Spearman's rho is the Pearson correlation of fractional (average) ranks,
//! and Kendall's tau is the tie-adjusted tau-b. The accuracy fit finds the
//! least-squares scale from predictions to measurements and reports the
//! absolute and relative errors of the scaled predictions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;

fn check_paired(x: &[f64], y: &[f64]) -> Result<(), Error> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid(
            "paired statistics need at least two observations",
        ));
    }
    for v in x.iter().chain(y.iter()) {
        if !v.is_finite() {
            return Err(Error::invalid("observations must be finite"));
        }
    }
    Ok(())
}

/// Fractional ranks (1-based); tied values share the average of the
/// positions they occupy.
#[must_use]
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j+1 average to (i + j + 2) / 2
        let rank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, Error> {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(cov / fmath::sqrt(var_x * var_y))
}

/// Spearman's rho: Pearson correlation of the samples' average ranks.
/// Undefined when either sample is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, Error> {
    check_paired(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall's tau-b. Undefined when either sample is constant.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<f64, Error> {
    check_paired(x, y)?;
    let n = x.len();
    let mut concordant = 0u64;
    let mut discordant = 0u64;
    let mut ties_x = 0u64;
    let mut ties_y = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as f64;
    let denom = (n0 - ties_x as f64) * (n0 - ties_y as f64);
    if denom <= 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((concordant as f64 - discordant as f64) / fmath::sqrt(denom))
}

/// Least-squares scale fit of measurements onto predictions, with the
/// errors of the scaled predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    /// `sum(p * m) / sum(p^2)`, the scale minimizing squared residuals.
    pub scale: f64,
    /// Mean absolute error of `scale * p` against `m`.
    pub mae: f64,
    /// Mean absolute percentage error, in percent.
    pub mape: f64,
}

/// Fits `measured ~= scale * predicted` and reports the residual errors.
/// Predictions must not be all zero; measurements must be nonzero so the
/// percentage error is defined.
pub fn accuracy(predicted: &[f64], measured: &[f64]) -> Result<Accuracy, Error> {
    check_paired(predicted, measured)?;
    let mut dot = 0.0;
    let mut norm = 0.0;
    for (p, m) in predicted.iter().zip(measured.iter()) {
        dot += p * m;
        norm += p * p;
    }
    if norm == 0.0 {
        return Err(Error::invalid("cannot fit a scale to all-zero predictions"));
    }
    let scale = dot / norm;
    let mut abs_sum = 0.0;
    let mut pct_sum = 0.0;
    for (p, m) in predicted.iter().zip(measured.iter()) {
        if *m == 0.0 {
            return Err(Error::invalid(
                "percentage error is undefined for a zero measurement",
            ));
        }
        let err = fmath::abs(scale * p - m);
        abs_sum += err;
        pct_sum += err / fmath::abs(*m);
    }
    let n = predicted.len() as f64;
    Ok(Accuracy {
        scale,
        mae: abs_sum / n,
        mape: 100.0 * pct_sum / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, what: &str) {
        let scale = expected.abs().max(1.0);
        assert!(
            ((actual - expected) / scale).abs() <= 1e-12,
            "{what}: got {actual}, expected {expected}"
        );
    }

    #[test]
    fn monotone_sequences_correlate_exactly() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [10.0, 20.0, 30.0, 40.0, 50.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_close(spearman(&x, &up).unwrap(), 1.0, "rho increasing");
        assert_close(spearman(&x, &down).unwrap(), -1.0, "rho decreasing");
        assert_close(kendall(&x, &up).unwrap(), 1.0, "tau increasing");
        assert_close(kendall(&x, &down).unwrap(), -1.0, "tau decreasing");
    }

    #[test]
    fn single_swap_gives_rho_point_eight() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 2.0, 4.0, 3.0];
        // d^2 sums to 2: 1 - 6*2 / (4 * 15)
        assert_close(spearman(&x, &y).unwrap(), 0.8, "rho");
    }

    #[test]
    fn one_discordant_pair_gives_tau_one_third() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0];
        // 2 concordant, 1 discordant, no ties
        assert_close(kendall(&x, &y).unwrap(), 1.0 / 3.0, "tau");
    }

    #[test]
    fn tied_values_share_average_ranks() {
        let ranks = average_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(ranks, vec![3.5, 1.0, 3.5, 2.0]);
        let ranks = average_ranks(&[7.0, 7.0, 7.0]);
        assert_eq!(ranks, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_handles_ties_via_average_ranks() {
        let x = [1.0, 2.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        // ranks of x: 1, 2.5, 2.5, 4 against 1, 2, 3, 4
        let expected = pearson(&[1.0, 2.5, 2.5, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_close(spearman(&x, &y).unwrap(), expected, "rho with ties");
        assert!(expected > 0.94 && expected < 0.95);
    }

    #[test]
    fn kendall_tau_b_adjusts_for_ties() {
        let x = [1.0, 1.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        // pairs: one x-tie, 5 concordant, 0 discordant
        // n0 = 6, tau = 5 / sqrt((6-1) * 6)
        assert_close(kendall(&x, &y).unwrap(), 5.0 / fmath::sqrt(30.0), "tau-b");
    }

    #[test]
    fn constant_samples_have_undefined_correlation() {
        let x = [1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0];
        assert!(matches!(spearman(&x, &y), Err(Error::UndefinedCorrelation)));
        assert!(matches!(spearman(&y, &x), Err(Error::UndefinedCorrelation)));
        assert!(matches!(kendall(&x, &y), Err(Error::UndefinedCorrelation)));
    }

    #[test]
    fn mismatched_or_short_samples_are_invalid() {
        assert!(matches!(
            spearman(&[1.0], &[1.0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(kendall(&[], &[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            accuracy(&[1.0], &[1.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn accuracy_fit_matches_hand_computation() {
        // scale = (1*1 + 1*3) / (1 + 1) = 2
        // errors: |2-1| = 1, |2-3| = 1; mape = 100 * (1/1 + 1/3) / 2
        let fit = accuracy(&[1.0, 1.0], &[1.0, 3.0]).unwrap();
        assert_close(fit.scale, 2.0, "scale");
        assert_close(fit.mae, 1.0, "mae");
        assert_close(fit.mape, 100.0 * (1.0 + 1.0 / 3.0) / 2.0, "mape");
    }

    #[test]
    fn perfect_proportionality_has_zero_error() {
        let fit = accuracy(&[1.0, 2.0, 3.0], &[2.5, 5.0, 7.5]).unwrap();
        assert_close(fit.scale, 2.5, "scale");
        assert!(fit.mae.abs() < 1e-12);
        assert!(fit.mape.abs() < 1e-9);
    }

    #[test]
    fn degenerate_fits_are_invalid() {
        assert!(accuracy(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(accuracy(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }
}
