//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that every line is printed even when
//! everything passes. The process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gatefid::channel::{
    choi_from_kraus, dual_choi, kraus_from_choi, validate, Choi, DensityMatrix,
};
use gatefid::cli::{self, choi_file::read_choi};
use gatefid::fidelity::{
    average_fidelity_choi, average_fidelity_via_kraus, compression_difference, constant_fidelity,
    decompose_qubit, equal_fidelity, gate_fidelity_at, grid_minimum, min_fid_bounds,
    min_fid_mixed_check, min_gate_fidelity, qubit_shift_channel, MinFidelityMethod,
};
use gatefid::linalg::{kron_vec, takagi, CMat, C64};
use gatefid::sampling::{random_channel, random_density, random_pure_state, RngStream};
use gatefid::symmetry::{compression, flip, sym_projector};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    check(start.elapsed() <= limit, || {
        format!("runtime {:.1?} exceeds {:?}", start.elapsed(), limit)
    })
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gatefid").chain(args.iter().copied());
    let code = cli::run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn c1_example1() -> Outcome {
    let t = Instant::now();
    let q = read_choi(fixture("example1_q.choi")).map_err(|e| e.to_string())?;
    let r = read_choi(fixture("example1_r.choi")).map_err(|e| e.to_string())?;
    let vq = validate(&q, 1e-12).map_err(|e| e.to_string())?;
    let vr = validate(&r, 1e-12).map_err(|e| e.to_string())?;
    check(vq.cp && vq.tp, || format!("C_Q report {vq:?}"))?;
    check(vr.cp && vr.tp, || format!("C_R report {vr:?}"))?;
    check(vq.unital, || "C_Q should be unital".into())?;
    check(!vr.unital, || "C_R should not be unital".into())?;
    let diff = compression_difference(&q, &r).unwrap();
    check(diff <= 1e-12, || format!("compression difference {diff:e}"))?;
    check(equal_fidelity(&q, &r, 1e-12).unwrap(), || {
        "equal_fidelity false".into()
    })?;
    let (code, out) = run_cli(&[
        "equal-fid",
        fixture("example1_q.choi").to_str().unwrap(),
        fixture("example1_r.choi").to_str().unwrap(),
    ]);
    check(code == 0 && out.lines().next() == Some("true"), || {
        format!("CLI exit {code}, output {out:?}")
    })?;
    within(Duration::from_secs(1), t)?;
    Ok(format!("diff {diff:.1e}"))
}

fn c2_average_routes() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for i in 0..200 {
            let c = random_channel(n, &mut RngStream::new(200 + n as u64, i));
            let a = average_fidelity_choi(&c).map_err(|e| e.to_string())?;
            let b = average_fidelity_via_kraus(&c).map_err(|e| e.to_string())?;
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-10, || format!("max route difference {worst:e}"))?;
    within(Duration::from_secs(30), t)?;
    Ok(format!("max |diff| {worst:.1e}"))
}

fn c3_dual_choi() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let n = 2 + (i % 2) as usize;
        let c = random_channel(n, &mut RngStream::new(300, i));
        let kraus = kraus_from_choi(&c).map_err(|e| e.to_string())?;
        let via_kraus = choi_from_kraus(&kraus.adjoint());
        let f = flip(n);
        let via_flip = f.matmul(&c.mat().transpose()).matmul(&f);
        worst = worst.max((via_kraus.mat() - &via_flip).max_abs());
        worst = worst.max((dual_choi(&c).mat() - &via_flip).max_abs());
    }
    check(worst <= 1e-10, || format!("max entry difference {worst:e}"))?;
    within(Duration::from_secs(30), t)?;
    Ok(format!("max |diff| {worst:.1e}"))
}

fn c4_constant_fidelity() -> Outcome {
    let mut rng = RngStream::new(400, 0);
    for &c in &[0.4, 0.6, 0.9] {
        for n in 2..=3usize {
            let nf = n as f64;
            let r = Choi::from_map(n, |x| {
                let id = CMat::identity(n).scale(x.trace() * (1.0 - c));
                (&x.scale_real(c * nf - 1.0) + &id).scale_real(1.0 / (nf - 1.0))
            });
            let k = compression(&r);
            let dev = (k.k() - &sym_projector(n).scale_real(c)).frobenius_norm();
            check(dev <= 1e-12, || {
                format!("c={c} n={n}: |k - cP_S| = {dev:e}")
            })?;
            let got = constant_fidelity(&r, 1e-12);
            check(got.is_some_and(|v| (v - c).abs() <= 1e-12), || {
                format!("c={c} n={n}: constant_fidelity = {got:?}")
            })?;
            for _ in 0..100 {
                let phi = random_pure_state(n, &mut rng);
                let f = gate_fidelity_at(&r, &phi).unwrap();
                check((f - c).abs() <= 1e-10, || format!("c={c} n={n}: F = {f}"))?;
            }
        }
    }
    Ok("6 maps".into())
}

fn c5_sdp_vs_grid() -> Outcome {
    let t = Instant::now();
    let rows: Vec<Result<(f64, f64), String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let c = random_channel(2, &mut RngStream::new(500, i));
            let rep = min_gate_fidelity(&c, MinFidelityMethod::SdpExact)
                .map_err(|e| format!("channel {i}: {e}"))?;
            let (g, _) = grid_minimum(&c, 1000).map_err(|e| e.to_string())?;
            let gap = rep.certified_interval.1 - rep.certified_interval.0;
            Ok(((rep.minimum - g).abs(), gap))
        })
        .collect();
    let mut worst_diff: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for r in rows {
        let (d, g) = r?;
        worst_diff = worst_diff.max(d);
        worst_gap = worst_gap.max(g);
    }
    check(worst_diff <= 1e-4, || {
        format!("max |sdp - grid| {worst_diff:e}")
    })?;
    check(worst_gap <= 1e-8, || {
        format!("max certified gap {worst_gap:e}")
    })?;
    within(Duration::from_secs(300), t)?;
    Ok(format!(
        "max |sdp-grid| {worst_diff:.1e}, max gap {worst_gap:.1e}"
    ))
}

fn c6_amplitude_damping() -> Outcome {
    let gamma: f64 = 0.3;
    let scan = (0..=1_000_000)
        .map(|i| {
            let t = i as f64 / 1e6;
            (1.0 - (1.0 - (1.0 - gamma).sqrt()) * t).powi(2) + gamma * t * (1.0 - t)
        })
        .fold(f64::INFINITY, f64::min);
    let c = read_choi(fixture("amplitude_damping_0.3.choi")).map_err(|e| e.to_string())?;
    let rep = min_gate_fidelity(&c, MinFidelityMethod::SdpExact).map_err(|e| e.to_string())?;
    check((rep.minimum - scan).abs() <= 1e-6, || {
        format!("minimum {} vs scan {scan}", rep.minimum)
    })?;
    check((rep.minimum - 0.7).abs() <= 1e-6, || {
        format!("minimum {}", rep.minimum)
    })?;
    Ok(format!("minimum {:.12}", rep.minimum))
}

fn c7_decomposition() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = RngStream::new(700, i);
        let u = 0.1 * (2.0 * rng.uniform() - 1.0);
        let c1 = C64::new(0.0, u);
        let c2 = C64::from_polar(0.1 * rng.uniform(), std::f64::consts::TAU * rng.uniform());
        let base = random_channel(2, &mut rng);
        // full rank: λ_min ≥ 0.4 ≥ ‖C_Q − C_R‖
        let cq = Choi::new(
            2,
            &base.mat().scale_real(0.2) + &CMat::identity(4).scale_real(0.4),
        )
        .unwrap();
        let r = 2.0 * c2.norm() + 2.0 * c1.norm();
        let e = qubit_shift_channel(r, c1, c2).map_err(|e| e.to_string())?;
        let shift = (&e - &dual_choi(&e)).mat().scale_real(r);
        let cr = Choi::new(2, cq.mat() - &shift).unwrap();
        let vr = validate(&cr, 1e-9).unwrap();
        check(vr.is_channel(), || {
            format!("pair {i}: C_R is not a channel")
        })?;
        let d = decompose_qubit(&cq, &cr).map_err(|e| format!("pair {i}: {e}"))?;
        let v = validate(&d.e, 1e-9).unwrap();
        check(v.cp && v.tp && v.unital, || {
            format!("pair {i}: E report {v:?}")
        })?;
        let rec = (&d.e - &dual_choi(&d.e)).mat().scale_real(d.r);
        let res = ((cq.mat() - cr.mat()) - rec).frobenius_norm();
        worst = worst.max(res);
    }
    check(worst <= 1e-8, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e}"))
}

fn c8_bound_sandwich() -> Outcome {
    let rows: Vec<Result<(), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let n = if i < 100 { 2 } else { 3 };
            let c = random_channel(n, &mut RngStream::new(800, i));
            let (lo, hi) = min_fid_bounds(&c).map_err(|e| e.to_string())?;
            let rep = min_gate_fidelity(&c, MinFidelityMethod::SdpExact)
                .map_err(|e| format!("channel {i}: {e}"))?;
            let (a, b) = rep.certified_interval;
            let ok = if n == 2 {
                lo - 1e-8 <= rep.minimum && rep.minimum <= hi + 1e-8
            } else {
                a <= hi + 1e-8 && lo - 1e-8 <= b
            };
            check(ok, || {
                format!("channel {i} (n={n}): bounds [{lo}, {hi}], estimate [{a}, {b}]")
            })
        })
        .collect();
    rows.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok("200 channels".into())
}

fn c9_takagi_alpha_beta() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = RngStream::new(900, i);
        let n = 2 + (i % 3) as usize;
        let psi = random_pure_state(n, &mut rng);
        let chi = random_pure_state(n, &mut rng);
        let ov: C64 = psi
            .amplitudes()
            .iter()
            .zip(chi.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if ov.norm() > 0.0 {
            ov.conj() / ov.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let chi: Vec<C64> = chi.amplitudes().iter().map(|z| z * phase).collect();
        let v = sym_projector(n).matvec(&kron_vec(psi.amplitudes(), &chi));
        let m = CMat::from_fn(n, n, |a, b| v[a * n + b]);
        let tk = takagi(&m).map_err(|e| e.to_string())?;
        let sum: f64 = tk.coefficients.iter().sum();
        worst = worst.max((sum - 1.0).abs());
    }
    check(worst <= 1e-10, || format!("max |α+β−1| {worst:e}"))?;
    Ok(format!("max |α+β−1| {worst:.1e}"))
}

fn c10_distribution() -> Outcome {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |threads: &str, tag: &str| -> Result<(Vec<u8>, String), String> {
        let csv = dir.path().join(format!("{tag}.csv"));
        let hist = dir.path().join(format!("{tag}_hist.csv"));
        let (code, out) = run_cli(&[
            "sample",
            "--n",
            "2",
            "--count",
            "10000",
            "--seed",
            "20240601",
            "--out",
            csv.to_str().unwrap(),
            "--threads",
            threads,
            "--hist",
            hist.to_str().unwrap(),
            "--bins",
            "40",
        ]);
        check(code == 0, || format!("sample exited {code}"))?;
        let h = std::fs::read_to_string(&hist).map_err(|e| e.to_string())?;
        check(h.lines().count() == 41, || {
            "histogram has wrong row count".into()
        })?;
        Ok((std::fs::read(&csv).map_err(|e| e.to_string())?, out))
    };
    let (a, out_a) = run("1", "a")?;
    let (b, out_b) = run("3", "b")?;
    check(a == b, || "CSV differs between thread counts".into())?;
    check(out_a == out_b, || {
        "reported means differ between runs".into()
    })?;
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    check(
        lines.next() == Some("index,avg_fidelity,min_fidelity"),
        || "bad header".into(),
    )?;
    let mut count = 0u64;
    let mut sum = 0.0;
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let idx: u64 = f[0].parse().unwrap();
        let avg: f64 = f[1].parse().unwrap();
        let min: f64 = f[2].parse().unwrap();
        check(idx == k as u64, || format!("row {k} has index {idx}"))?;
        check(min <= avg && avg <= 1.0 + 1e-9 && min >= -1e-9, || {
            format!("row {k}: min {min}, avg {avg}")
        })?;
        sum += avg;
        count += 1;
    }
    check(count == 10_000, || format!("{count} rows"))?;
    within(Duration::from_secs(600), t)?;
    let mean = out_a
        .lines()
        .find(|l| l.starts_with("mean avg_fidelity"))
        .unwrap_or("")
        .to_string();
    Ok(format!("{mean} (csv mean {:.6})", sum / count as f64))
}

fn c11_mixed_states() -> Outcome {
    let rows: Vec<Result<f64, String>> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(1100, i);
            let c = random_channel(2, &mut rng);
            let m = min_gate_fidelity(&c, MinFidelityMethod::SdpExact)
                .map_err(|e| e.to_string())?
                .minimum;
            let mut worst = f64::INFINITY;
            for k in 0..100 {
                let rho: DensityMatrix = random_density(2, 1 + k % 2, &mut rng).unwrap();
                let v = min_fid_mixed_check(&c, &rho).map_err(|e| e.to_string())?;
                worst = worst.min(v - m);
            }
            Ok(worst)
        })
        .collect();
    let mut worst = f64::INFINITY;
    for r in rows {
        worst = worst.min(r?);
    }
    check(worst >= -1e-7, || {
        format!("mixed-state fidelity undercuts F^min by {worst:e}")
    })?;
    Ok(format!("min margin {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Example 1 regression", c1_example1),
        ("average fidelity, Choi vs Kraus route", c2_average_routes),
        ("dual Choi, Kraus adjoint vs F C^T F", c3_dual_choi),
        ("constant-fidelity maps", c4_constant_fidelity),
        ("qubit minimum fidelity, SDP vs Bloch grid", c5_sdp_vs_grid),
        ("amplitude damping minimum", c6_amplitude_damping),
        ("qubit decomposition", c7_decomposition),
        ("eigenvalue/Schmidt bound sandwich", c8_bound_sandwich),
        ("Takagi coefficients sum to one", c9_takagi_alpha_beta),
        ("distribution run", c10_distribution),
        ("mixed-state consistency", c11_mixed_states),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS  criterion {id:>2}: {name} [{detail}] ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {id:>2}: {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
