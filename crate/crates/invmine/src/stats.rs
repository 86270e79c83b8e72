//! Clopper-Pearson trial-count arithmetic for certifying a candidate
//! that survived `n` all-successful challenge rounds. With every run
//! successful the exact binomial interval degenerates to
//! `[(alpha/2)^(1/n), 1]`.

use thiserror::Error;

#[derive(Debug, Clone, Copy, Error, PartialEq)]
pub enum StatsError {
    #[error("significance alpha must lie strictly between 0 and 1, got {0}")]
    AlphaOutOfRange(f64),
}

/// Smallest number of all-successful trials n with
/// `(alpha/2)^(1/n) >= 1 - alpha`, i.e. ceil(log(alpha/2) / log(1 - alpha)).
/// The closed form is evaluated in floats and then corrected by the
/// exact inequality so boundary cases cannot be off by one.
pub fn cp_trials(alpha: f64) -> Result<u64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::AlphaOutOfRange(alpha));
    }
    let estimate = ((alpha / 2.0).ln() / (1.0 - alpha).ln()).ceil();
    let mut n = if estimate.is_finite() && estimate >= 1.0 {
        estimate as u64
    } else {
        1
    };
    let meets = |n: u64| cp_lower_bound(n, alpha).unwrap() >= 1.0 - alpha;
    while !meets(n) {
        n += 1;
    }
    while n > 1 && meets(n - 1) {
        n -= 1;
    }
    Ok(n)
}

/// Lower end of the Clopper-Pearson interval when all `n` trials
/// succeeded: `(alpha/2)^(1/n)`.
pub fn cp_lower_bound(n: u64, alpha: f64) -> Result<f64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::AlphaOutOfRange(alpha));
    }
    assert!(n >= 1, "cp_lower_bound requires at least one trial");
    Ok((alpha / 2.0).powf(1.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_0_05_needs_72_trials() {
        // log(0.025)/log(0.95) = 71.9...
        assert_eq!(cp_trials(0.05).unwrap(), 72);
    }

    #[test]
    fn closed_form_spot_checks() {
        // ceil(log 0.25 / log 0.5) = 2
        assert_eq!(cp_trials(0.5).unwrap(), 2);
        // Near-1 alpha degenerates to a single trial.
        assert_eq!(cp_trials(0.99).unwrap(), 1);
    }

    #[test]
    fn lower_bound_values() {
        let b = cp_lower_bound(72, 0.05).unwrap();
        assert!((0.95..=0.9505).contains(&b), "{b}");
        assert_eq!(cp_lower_bound(1, 0.05).unwrap(), 0.025);
    }

    #[test]
    fn lower_bound_is_monotone_in_n() {
        let mut prev = 0.0;
        for n in 1..200 {
            let b = cp_lower_bound(n, 0.05).unwrap();
            assert!(b > prev, "bound({n}) = {b} not above bound({}) = {prev}", n - 1);
            prev = b;
        }
    }

    #[test]
    fn trials_meet_their_own_bound() {
        for alpha in [0.01, 0.05, 0.1, 0.2, 0.5] {
            let n = cp_trials(alpha).unwrap();
            assert!(cp_lower_bound(n, alpha).unwrap() >= 1.0 - alpha);
            if n > 1 {
                assert!(cp_lower_bound(n - 1, alpha).unwrap() < 1.0 - alpha);
            }
        }
    }

    #[test]
    fn alpha_out_of_range_is_rejected() {
        assert!(cp_trials(0.0).is_err());
        assert!(cp_trials(1.0).is_err());
        assert!(cp_lower_bound(3, -0.1).is_err());
    }
}
