use gatefid::channel::dual_choi;
use gatefid::cli::choi_file::{format_choi, parse_choi};
use gatefid::fidelity::{
    average_fidelity_choi, constant_fidelity, constant_fidelity_necessary, gate_fidelity_at,
    min_gate_fidelity,
};
use gatefid::s1norm::{s1_exact_qubit, s1_ppt_upper, s1_seesaw_lower, seesaw_single};
use gatefid::sampling::{ginibre, random_channel, random_pure_state};
use gatefid::symmetry::compression;
use gatefid::{CMat, Choi, MinFidelityMethod, RngStream};
use proptest::prelude::*;

fn random_psd(m: usize, seed: u64) -> CMat {
    let mut rng = RngStream::new(seed, 0);
    let g = ginibre(m, m, &mut rng);
    let p = g.matmul(&g.adjoint());
    let tr = p.trace().re;
    p.scale_real(1.0 / tr).hermitian_part()
}

fn constant_map(n: usize, c: f64) -> Choi {
    let nf = n as f64;
    Choi::from_map(n, |x| {
        let id = CMat::identity(n).scale(x.trace());
        (&x.scale_real(c * nf - 1.0) + &id.scale_real(1.0 - c)).scale_real(1.0 / (nf - 1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn s1_exact_scales_linearly(seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let x = random_psd(4, seed);
        let a = s1_exact_qubit(&x).unwrap().value;
        let b = s1_exact_qubit(&x.scale_real(alpha)).unwrap().value;
        prop_assert!((b - alpha * a).abs() <= 1e-8 * alpha.max(1.0), "{b} vs {}", alpha * a);
    }

    #[test]
    fn s1_exact_shifts_with_identity(seed in any::<u64>(), beta in 0.0f64..3.0) {
        let x = random_psd(4, seed);
        let a = s1_exact_qubit(&x).unwrap().value;
        let b = s1_exact_qubit(&(&x + &CMat::identity(4).scale_real(beta))).unwrap().value;
        prop_assert!((b - a - beta).abs() <= 1e-8 * (1.0 + beta), "{b} vs {}", a + beta);
    }

    #[test]
    fn s1_exact_matches_ppt_relaxation(seed in any::<u64>()) {
        let x = random_psd(4, seed);
        let exact = s1_exact_qubit(&x).unwrap();
        let upper = s1_ppt_upper(&x, 2).unwrap();
        prop_assert!((exact.value - upper).abs() <= 1e-8, "{} vs {upper}", exact.value);
        prop_assert!(exact.lower <= exact.upper);
    }

    #[test]
    fn seesaw_is_monotone(seed in any::<u64>(), n in 2usize..=3) {
        let x = random_psd(n * n, seed);
        let mut rng = RngStream::new(seed, 1);
        let start = random_pure_state(n, &mut rng);
        let run = seesaw_single(&x, n, start.amplitudes(), 100).unwrap();
        for w in run.history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "history decreased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn seesaw_below_ppt_bound(seed in any::<u64>()) {
        let x = random_psd(9, seed);
        let lower = s1_seesaw_lower(&x, 3, 4, 100, seed).unwrap();
        let upper = s1_ppt_upper(&x, 3).unwrap();
        prop_assert!(lower.lower <= upper + 1e-8, "{} > {upper}", lower.lower);
    }

    #[test]
    fn dual_channel_has_same_gate_fidelity(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = RngStream::new(seed, 0);
        let c = random_channel(n, &mut rng);
        let d = dual_choi(&c);
        let diff = (compression(&c).k() - compression(&d).k()).frobenius_norm();
        prop_assert!(diff <= 1e-12, "compressions differ by {diff}");
        let phi = random_pure_state(n, &mut rng);
        let a = gate_fidelity_at(&c, &phi).unwrap();
        let b = gate_fidelity_at(&d, &phi).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn constant_fidelity_implies_necessary_condition(n in 2usize..=4, c in 0.0f64..1.0) {
        let nf = n as f64;
        // complete positivity needs c ≥ 1/(n+1)
        let c = 1.0 / (nf + 1.0) + c * (1.0 - 1.0 / (nf + 1.0));
        let ch = constant_map(n, c);
        let value = constant_fidelity(&ch, 1e-10);
        prop_assert!(value.is_some());
        prop_assert!((value.unwrap() - c).abs() <= 1e-12);
        prop_assert!(constant_fidelity_necessary(&ch, 1e-10).unwrap());
    }

    #[test]
    fn minimum_never_exceeds_average(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let c = random_channel(2, &mut rng);
        let report = min_gate_fidelity(&c, MinFidelityMethod::SdpExact).unwrap();
        prop_assert!(report.minimum <= report.average + 1e-12);
        let (lo, hi) = report.certified_interval;
        prop_assert!(lo <= report.minimum && report.minimum <= hi);
        prop_assert!(hi - lo <= 1e-8);
    }

    #[test]
    fn choi_file_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = RngStream::new(seed, 0);
        let c = random_channel(n, &mut rng);
        let parsed = parse_choi(&format_choi(&c)).unwrap();
        prop_assert!(parsed.mat() == c.mat());
    }
}

#[test]
fn empirical_mean_matches_average_fidelity() {
    let mut rng = RngStream::new(99, 0);
    let c = random_channel(2, &mut rng);
    let avg = average_fidelity_choi(&c).unwrap();
    let samples = 100_000;
    let mut sampler = RngStream::new(99, 1);
    let values: Vec<f64> = (0..samples)
        .map(|_| gate_fidelity_at(&c, &random_pure_state(2, &mut sampler)).unwrap())
        .collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    assert!(
        (mean - avg).abs() <= 3.0 * se,
        "mean {mean}, average {avg}, se {se}"
    );
}
