//! CSV output for `sample`.

use std::fmt::Write as _;

pub const SAMPLE_HEADER: &str = "index,avg_fidelity,min_fidelity";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRow {
    pub index: u64,
    pub avg_fidelity: f64,
    pub min_fidelity: f64,
}

/// Fixed-point with `digits` significant digits.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x);
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn format_samples(rows: &[SampleRow]) -> String {
    let mut s = String::with_capacity(32 * (rows.len() + 1));
    s.push_str(SAMPLE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{}",
            r.index,
            sig_digits(r.avg_fidelity, 12),
            sig_digits(r.min_fidelity, 12)
        );
    }
    s
}

/// Histogram of both columns over `[0, 1]` with `bins` equal bins.
pub fn format_histogram(rows: &[SampleRow], bins: usize) -> String {
    let bins = bins.max(1);
    let bin_of = |x: f64| ((x.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
    let mut avg = vec![0u64; bins];
    let mut min = vec![0u64; bins];
    for r in rows {
        avg[bin_of(r.avg_fidelity)] += 1;
        min[bin_of(r.min_fidelity)] += 1;
    }
    let mut s = String::from("bin_lo,bin_hi,avg_count,min_count\n");
    for b in 0..bins {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sig_digits(b as f64 / bins as f64, 12),
            sig_digits((b + 1) as f64 / bins as f64, 12),
            avg[b],
            min[b]
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig_digits(0.5, 12), "0.500000000000");
        assert_eq!(sig_digits(1.0, 12), "1.00000000000");
        assert_eq!(sig_digits(0.0, 12), "0.00000000000");
        assert_eq!(sig_digits(0.0123456789012345, 12), "0.0123456789012");
    }

    #[test]
    fn sample_layout() {
        let rows = [SampleRow {
            index: 0,
            avg_fidelity: 0.75,
            min_fidelity: 0.5,
        }];
        assert_eq!(
            format_samples(&rows),
            "index,avg_fidelity,min_fidelity\n0,0.750000000000,0.500000000000\n"
        );
    }

    #[test]
    fn histogram_counts() {
        let rows: Vec<SampleRow> = (0..10)
            .map(|i| SampleRow {
                index: i,
                avg_fidelity: 0.95,
                min_fidelity: i as f64 / 10.0,
            })
            .collect();
        let h = format_histogram(&rows, 10);
        let lines: Vec<&str> = h.lines().collect();
        assert_eq!(lines.len(), 11);
        assert!(lines[10].ends_with(",10,1"));
        assert!(lines[1].ends_with(",0,1"));
    }
}
