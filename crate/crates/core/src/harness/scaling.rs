use std::fmt;

use serde::Serialize;

use crate::linearity::BLR_ROUNDS_CONSTANT;
use crate::tester::DerivedParams;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub k: usize,
    pub epsilon: f64,
    pub blr: u64,
    pub binning: u64,
    pub learner: u64,
    pub consistency: u64,
    pub total: u64,
    /// `total(2k) / total(k)` when `2k` is also listed.
    pub ratio_to_double: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

/// Planned query totals from the accounting identity; no tester is run.
pub fn query_scaling_report(k_list: &[usize], epsilon_list: &[f64]) -> Result<ScalingReport> {
    let mut rows = Vec::new();
    for &epsilon in epsilon_list {
        for &k in k_list {
            let p = DerivedParams::compute(k, epsilon, BLR_ROUNDS_CONSTANT)?;
            rows.push(ScalingRow {
                k,
                epsilon,
                blr: 3 * p.t1 as u64,
                binning: 2 * p.bin_cells as u64,
                learner: 2 * p.q_learn as u64,
                consistency: 3 * p.t as u64,
                total: p.total_queries(),
                ratio_to_double: None,
            });
        }
    }
    let totals: Vec<(usize, u64, u64)> = rows
        .iter()
        .map(|r| (r.k, r.epsilon.to_bits(), r.total))
        .collect();
    for r in &mut rows {
        r.ratio_to_double = totals
            .iter()
            .find(|&&(k, e, _)| k == 2 * r.k && e == r.epsilon.to_bits())
            .map(|&(_, _, t)| t as f64 / r.total as f64);
    }
    Ok(ScalingReport { rows })
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "k,epsilon,blr,binning,learner,consistency,total,ratio_2k"
        )?;
        for r in &self.rows {
            let ratio = r
                .ratio_to_double
                .map(|x| format!("{x:.4}"))
                .unwrap_or_default();
            writeln!(
                f,
                "{},{},{},{},{},{},{},{}",
                r.k, r.epsilon, r.blr, r.binning, r.learner, r.consistency, r.total, ratio
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `D = 12(16k + q)` with `q = 8k·m + 1`, `m` the bit length of `256k²`.
    fn closed_form(k: u64, eps: f64) -> u64 {
        let m = 64 - (256 * k * k).leading_zeros() as u64;
        let q = 8 * k * m + 1;
        let d = 12 * (16 * k + q);
        let t = (4.0 / eps - 1e-9).ceil() as u64;
        3 * 2 * d + 32 * k + 2 * q + 3 * t
    }

    #[test]
    fn matches_closed_form() {
        let report = query_scaling_report(&[1, 2, 8, 16, 32, 64], &[0.25, 0.1, 1.0]).unwrap();
        for r in &report.rows {
            assert_eq!(r.total, closed_form(r.k as u64, r.epsilon));
            assert_eq!(r.total, r.blr + r.binning + r.learner + r.consistency);
        }
        let at = |k: usize| {
            report
                .rows
                .iter()
                .find(|r| r.k == k && r.epsilon == 0.25)
                .unwrap()
                .total
        };
        assert_eq!(at(8), 80634);
        assert_eq!(at(16), 180090);
        assert_eq!(at(32), 397946);
        assert_eq!(at(64), 871546);
    }

    #[test]
    fn doubling_k_ratio() {
        let report = query_scaling_report(&[8, 16, 32, 64], &[0.25]).unwrap();
        for r in report.rows.iter().filter(|r| r.k <= 32) {
            let ratio = r.ratio_to_double.unwrap();
            assert!((1.8..=2.6).contains(&ratio), "k={} ratio={ratio}", r.k);
        }
        assert_eq!(report.rows.last().unwrap().ratio_to_double, None);
    }

    #[test]
    fn doubling_inverse_epsilon() {
        // halving ε to ε' adds exactly 3·ceil(4/ε') − 3·ceil(2/ε') queries
        let report = query_scaling_report(&[4], &[0.2, 0.1]).unwrap();
        let (a, b) = (&report.rows[0], &report.rows[1]);
        assert_eq!(b.total - a.total, 3 * 40 - 3 * 20);
        let one = query_scaling_report(&[1], &[1.0]).unwrap();
        assert!(one.rows[0].total > 0);
        assert!(one.to_string().starts_with("k,epsilon,"));
    }
}
