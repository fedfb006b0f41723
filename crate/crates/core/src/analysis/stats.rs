//! Descriptive statistics and one-way ANOVA.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::AnalysisError;

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Quantile by linear interpolation between order statistics
/// (`(n - 1) * q` positioning).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number(xs: &[f64]) -> Option<FiveNumber> {
    if xs.is_empty() {
        return None;
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    Some(FiveNumber {
        min: s[0],
        q1: quantile(&s, 0.25),
        median: quantile(&s, 0.5),
        q3: quantile(&s, 0.75),
        max: s[s.len() - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anova {
    #[serde(with = "crate::serde_f64")]
    pub f: f64,
    pub p: f64,
    pub df_between: u32,
    pub df_within: u32,
    /// Set when there is no within-group variance, so F is not a ratio of
    /// two positive variances.
    pub degenerate: bool,
}

/// One-way ANOVA over two or more groups of at least two values each.
///
/// With zero within-group variance F is infinite and p is 0, unless the
/// groups also share one mean, in which case F is 0 and p is 1. Both cases
/// set `degenerate`.
pub fn anova_oneway(groups: &[&[f64]]) -> Result<Anova, AnalysisError> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(AnalysisError::DegenerateGroups);
    }
    if groups.iter().flat_map(|g| g.iter()).any(|x| !x.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let k = groups.len();
    let n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = mean(g).unwrap();
        ss_between += g.len() as f64 * (m - grand).powi(2);
        ss_within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df_between = (k - 1) as u32;
    let df_within = (n - k) as u32;
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;

    // Relative to the data scale, so rounding noise in equal groups is zero.
    let scale = groups.iter().flat_map(|g| g.iter()).map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    let eps = 1e-24 * scale;
    if ss_within <= eps {
        let (f, p) = if ss_between <= eps { (0.0, 1.0) } else { (f64::INFINITY, 0.0) };
        return Ok(Anova {
            f,
            p,
            df_between,
            df_within,
            degenerate: true,
        });
    }
    let f = ms_between / ms_within;
    let dist = FisherSnedecor::new(df_between as f64, df_within as f64).expect("positive degrees of freedom");
    Ok(Anova {
        f,
        p: dist.sf(f),
        df_between,
        df_within,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anova_examples() {
        let a = anova_oneway(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]).unwrap();
        assert_eq!((a.f, a.p), (0.0, 1.0));
        let a = anova_oneway(&[&[0.0; 4], &[1.0; 4]]).unwrap();
        assert!(a.degenerate && a.f.is_infinite() && a.p == 0.0);
        let a = anova_oneway(&[&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 4.0, 5.0]]).unwrap();
        // SSB = 2, SSW = 10 over (1, 6) degrees of freedom.
        assert!((a.f - 1.2).abs() < 1e-12);
        assert!((a.p - 0.315_333_596).abs() < 1e-6);
        assert_eq!((a.df_between, a.df_within), (1, 6));
    }

    #[test]
    fn anova_rejects_small_groups() {
        assert!(anova_oneway(&[&[1.0, 2.0]]).is_err());
        assert!(anova_oneway(&[&[1.0], &[1.0, 2.0]]).is_err());
        assert!(anova_oneway(&[&[1.0, f64::NAN], &[1.0, 2.0]]).is_err());
    }

    #[test]
    fn five_number_examples() {
        let s = five_number(&[1000.0, 2000.0, 3000.0]).unwrap();
        assert_eq!(s.median, 2000.0);
        assert_eq!((s.q1, s.q3), (1500.0, 2500.0));
        let s = five_number(&[7.0; 5]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (7.0, 7.0, 7.0, 7.0, 7.0));
        assert_eq!(mean(&[2.0, 4.0]), Some(3.0));
        assert!(five_number(&[]).is_none());
    }
}
