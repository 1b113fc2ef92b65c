//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so every verdict is printed
//! even when an earlier one fails. Exit status is nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use surp::analysis::{
    beta_sweep, empirical_slope, fl_budget, ks_statistic, surp_budget, table8_betas, zero_rate_check,
};
use surp::codec::random_codebook::random_codebook_encode;
use surp::codec::Encoder;
use surp::entropy::{golomb_parameter, unary_decode, unary_encode, BitSink, BitSource, GolombCoder};
use surp::nn_eval::{induced_l1_norm, measure_perturbation, symmetric_bound, theorem1_bound, DenseNet};
use surp::rd_theory::{ExponentialModel, LaplacianModel, RdSource};
use surp::rng::DetRng;
use surp::tensor_store::{denormalize, normalize};
use surp::{decode, encode, IndexCodec, NormalizedVector, Segment, StopRule, SurpConfig, Variant, WeightSet};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(limit: Duration, start: Instant, detail: String) -> Verdict {
    let took = start.elapsed();
    check(took < limit, format!("{detail}; {:.1}s of {}s allowed", took.as_secs_f64(), limit.as_secs()))
}

fn laplace(n: usize, lambda: f64, seed: u64) -> Vec<f64> {
    LaplacianModel::new(lambda).unwrap().sample_source(n, seed)
}

fn c1_round_trip() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for n in [10usize, 1_000, 100_000] {
        for variant in [Variant::Laplacian, Variant::Exponential] {
            for k in 0..100u64 {
                let lambda = 0.5 + (k % 7) as f64;
                let u = laplace(n, lambda, 1_000 * n as u64 + k);
                let iters = if n == 10 { 40 } else { 300 };
                let cfg = SurpConfig::new(variant, StopRule::Iterations(iters))
                    .with_seed(k)
                    .with_codec(IndexCodec::Raw);
                let enc = encode(&NormalizedVector::from_raw(u), &cfg).map_err(|e| e.to_string())?;
                let dec = decode(&enc.container).map_err(|e| e.to_string())?;
                let same = dec.reconstruction.len() == enc.reconstruction.len()
                    && dec
                        .reconstruction
                        .iter()
                        .zip(&enc.reconstruction)
                        .all(|(a, b)| a.to_bits() == b.to_bits());
                if !same {
                    return Err(format!("mismatch at n={n} {variant} input {k}"));
                }
                checked += 1;
            }
        }
    }
    within_time(
        Duration::from_secs(60),
        start,
        format!("{checked} encodes decoded bit-exactly"),
    )
}

fn c2_decrement() -> Verdict {
    let n = 100_000;
    let iterations = 10_000u64;
    let mut worst = 0.0f64;
    let mut steps = 0u64;
    for variant in [Variant::Laplacian, Variant::Exponential] {
        let u = laplace(n, 1.0, 2);
        let cfg = SurpConfig::new(variant, StopRule::Iterations(iterations)).with_seed(2);
        let mut enc = Encoder::new(&u, &cfg).map_err(|e| e.to_string())?;
        let mut before = enc.residual().to_vec();
        while enc.t() < iterations {
            let thr = enc.threshold();
            let Some(em) = enc.step().map_err(|e| e.to_string())? else {
                return Err(format!("{variant} exhausted at t={}", enc.t()));
            };
            if em.record.is_refresh() {
                continue;
            }
            let after = enc.residual();
            let drop: f64 = before
                .iter()
                .zip(after)
                .filter(|(b, a)| b != a)
                .map(|(b, a)| b.abs() - a.abs())
                .sum::<f64>()
                / n as f64;
            let expected = match variant {
                Variant::Laplacian => 2.0 * thr / n as f64,
                Variant::Exponential => thr / n as f64,
            };
            worst = worst.max(((drop - expected) / expected).abs());
            steps += 1;
            before.copy_from_slice(after);
        }
    }
    check(
        worst <= 1e-12,
        format!("{steps} steps, worst relative error {worst:.3e} (limit 1e-12)"),
    )
}

fn c3_zero_rate() -> Verdict {
    let n = 100_000;
    let beta = (n as f64).ln();
    let u = laplace(n, 1.0, 7);
    let cfg = SurpConfig::new(Variant::Laplacian, StopRule::Iterations(1_000))
        .with_lambda0(1.0)
        .with_beta(beta)
        .with_seed(1);
    let enc = encode(&NormalizedVector::from_raw(u), &cfg).map_err(|e| e.to_string())?;
    let theory = zero_rate_check(n, 1.0, beta).map_err(|e| e.to_string())?.theoretical_ratio;
    let slope = empirical_slope(&enc.trace, 1_000).map_err(|e| e.to_string())?;
    let rel = (slope / theory - 1.0).abs();

    let mut prev = 0.0;
    let mut increasing = true;
    for m in [1_000usize, 10_000, 100_000, 1_000_000] {
        let r = zero_rate_check(m, 1.0, (m as f64).ln()).map_err(|e| e.to_string())?.theoretical_ratio;
        increasing &= r > prev && r < 1.0;
        prev = r;
    }
    check(
        rel < 0.01 && increasing,
        format!(
            "slope {slope:.5} vs {theory:.5} ({:+.3}%), closed form increasing toward 1: {increasing}",
            (slope / theory - 1.0) * 100.0
        ),
    )
}

fn c4_refresh_rarity() -> Verdict {
    let n = 10_000;
    let u = laplace(n, 1.0, 4);
    let cfg = SurpConfig::new(Variant::Laplacian, StopRule::Iterations(100_000))
        .with_beta((n as f64).ln())
        .with_seed(4);
    let enc = encode(&NormalizedVector::from_raw(u), &cfg).map_err(|e| e.to_string())?;
    let iters = enc.trace.iterations();
    let refreshes = enc.trace.refresh_count;
    check(
        iters == 100_000 && refreshes <= 100,
        format!("{refreshes} refreshes in {iters} iterations (limit 100)"),
    )
}

fn c5_beta_sweep() -> Verdict {
    let start = Instant::now();
    let n = 10_000;
    let betas = table8_betas(n);
    let rows = beta_sweep(n, &betas, 0.95, 5).map_err(|e| e.to_string())?;
    let (sqrt_ln, ln, ln_sq) = (&rows[0], &rows[2], &rows[4]);
    let iter_ratio = ln_sq.iterations as f64 / ln.iterations as f64;
    let refresh_ratio = sqrt_ln.refreshments as f64 / (ln.refreshments as f64).max(1.0);
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("β={:.2}: {} it/{} rf", r.beta, r.iterations, r.refreshments))
        .collect();
    let verdict = check(
        iter_ratio >= 5.0 && refresh_ratio >= 10.0,
        format!(
            "iterations (ln n)²/ln n = {iter_ratio:.2} (need ≥ 5), refreshes √ln n/ln n = {refresh_ratio:.2} (need ≥ 10) [{}]",
            table.join(", ")
        ),
    );
    match verdict {
        Ok(d) => within_time(Duration::from_secs(300), start, d),
        Err(d) => Err(d),
    }
}

fn c6_decomposition() -> Verdict {
    let n = 100_000;
    let mut worst_ks = 0.0f64;
    let mut worst_sigma = 0.0f64;
    let mut run = |model: &dyn RdSource, name: &str, seed: u64| -> Result<(), String> {
        for d in [0.2, 0.5, 0.9] {
            let (v, u) = model.sample_optimal_pair(d, n, seed).map_err(|e| e.to_string())?;
            let ks = ks_statistic(&u, |x| model.cdf(x));
            let mass = model.mass_formula(d);
            let zeros = v.iter().filter(|x| **x == 0.0).count() as f64 / n as f64;
            let sigma = (mass * (1.0 - mass) / n as f64).sqrt();
            let z = (zeros - mass).abs() / sigma;
            worst_ks = worst_ks.max(ks);
            worst_sigma = worst_sigma.max(z);
            if ks >= 0.007 || z > 3.0 {
                return Err(format!("{name} D={d}: KS {ks:.5}, sparsity {zeros:.5} vs {mass:.5} ({z:.2}σ)"));
            }
        }
        Ok(())
    };
    run(&LaplacianModel::new(1.0).unwrap(), "laplacian", 61)?;
    run(&ExponentialModel::new(1.0).unwrap(), "exponential", 62)?;
    Ok(format!("worst KS {worst_ks:.5} (limit 0.007), worst sparsity offset {worst_sigma:.2}σ (limit 3σ)"))
}

fn c7_monotone() -> Verdict {
    let mut traces = 0;
    for (n, seed) in [(100usize, 1u64), (5_000, 2), (50_000, 3)] {
        let u = laplace(n, 2.0, seed);
        for variant in [Variant::Laplacian, Variant::Exponential] {
            for codec in [IndexCodec::Raw, IndexCodec::Unary, IndexCodec::GolombPermuted] {
                for stop in [StopRule::Iterations((2 * n as u64).min(4_000)), StopRule::TargetSparsity(0.9)] {
                    let cfg = SurpConfig::new(variant, stop).with_codec(codec).with_seed(seed);
                    let enc = encode(&NormalizedVector::from_raw(u.clone()), &cfg).map_err(|e| e.to_string())?;
                    let dec = decode(&enc.container).map_err(|e| e.to_string())?;
                    for (side, trace) in [("encoder", &enc.trace), ("decoder", &dec.trace)] {
                        trace
                            .check_monotone()
                            .map_err(|e| format!("{side} n={n} {variant} {codec}: {e}"))?;
                        if trace.rows.first().map(|r| r.sparsity) != Some(1.0) {
                            return Err(format!("{side} n={n} {variant} {codec}: sparsity does not start at 1"));
                        }
                        traces += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{traces} traces monotone, all starting at sparsity 1.0"))
}

fn random_matrix(rows: usize, cols: usize, rng: &mut DetRng) -> Vec<f64> {
    let m = LaplacianModel::new(1.0).unwrap();
    (0..rows * cols).map(|_| m.draw(rng)).collect()
}

fn c8_dominance() -> Verdict {
    let mut rng = DetRng::new(8);
    let mut cases = 0;
    let mut tightest = 0.0f64;
    for net_id in 0..50u64 {
        let dims: Vec<usize> = (0..4).map(|_| 2 + rng.below(31) as usize).collect();
        let segments: Vec<Segment> = (0..3)
            .map(|l| {
                let (rows, cols) = (dims[l + 1], dims[l]);
                Segment::new(format!("fc{l}"), vec![rows, cols], random_matrix(rows, cols, &mut rng)).unwrap()
            })
            .collect();
        let ws = WeightSet::new(segments).map_err(|e| e.to_string())?;
        let net = DenseNet::from_weight_set(&ws).map_err(|e| e.to_string())?;
        let nv = normalize(&ws).map_err(|e| e.to_string())?;
        let n = nv.n() as u64;
        for (k, iters) in [1, n / 20, n / 5, n / 2, 2 * n].into_iter().enumerate() {
            let cfg = SurpConfig::new(Variant::Laplacian, StopRule::Iterations(iters.max(1))).with_seed(net_id * 10 + k as u64);
            let enc = encode(&nv, &cfg).map_err(|e| e.to_string())?;
            let hat_ws = denormalize(&enc.header.layout, &enc.reconstruction).map_err(|e| e.to_string())?;
            let hat = DenseNet::from_weight_set(&hat_ws).map_err(|e| e.to_string())?;
            let measured = measure_perturbation(&net, &hat, 1_000, net_id).map_err(|e| e.to_string())?;
            let t1 = theorem1_bound(&net, &hat).map_err(|e| format!("net {net_id} rate {k}: {e}"))?;
            let sym = symmetric_bound(&net, &hat).map_err(|e| e.to_string())?;
            if !(measured <= t1 && measured <= sym) {
                return Err(format!("net {net_id} rate {k}: measured {measured} vs bounds {t1}, {sym}"));
            }
            if t1 > 0.0 {
                tightest = tightest.max(measured / t1);
            }
            cases += 1;

            // Single-layer case: the supremum sits on a basis vector.
            let (w, wh) = (&net.layers()[1], &hat.layers()[1]);
            let one = DenseNet::new(vec![w.clone()]).unwrap();
            let one_hat = DenseNet::new(vec![wh.clone()]).unwrap();
            let m1 = measure_perturbation(&one, &one_hat, 1_000, net_id).map_err(|e| e.to_string())?;
            let exact = induced_l1_norm(&w.sub(wh).map_err(|e| e.to_string())?);
            if m1 != exact {
                return Err(format!("net {net_id} rate {k}: d=1 measured {m1} != induced norm {exact}"));
            }
        }
    }
    Ok(format!(
        "{cases} (net, rate) pairs within both bounds, d=1 exact; largest measured/bound {tightest:.3}"
    ))
}

fn geometric_entropy_bits(p: f64) -> f64 {
    (-(1.0 - p) * (1.0 - p).log2() - p * p.log2()) / p
}

fn c9_entropy() -> Verdict {
    for m in 1..=64u64 {
        let coder = GolombCoder::new(m).map_err(|e| e.to_string())?;
        let mut sink = BitSink::new();
        let mut expected_len = 0;
        for v in 0..=65_535u64 {
            coder.encode(&mut sink, v);
            expected_len += coder.code_len(v);
        }
        if sink.len_bits() != expected_len {
            return Err(format!("M={m}: code_len disagrees with the written length"));
        }
        let bytes = sink.into_bytes();
        let mut src = BitSource::new(&bytes);
        for v in 0..=65_535u64 {
            let got = coder.decode(&mut src).map_err(|e| e.to_string())?;
            if got != v {
                return Err(format!("Golomb M={m}: {v} decoded as {got}"));
            }
        }
    }

    let mut sink = BitSink::new();
    for b in 1..=10_000u64 {
        unary_encode(&mut sink, b).map_err(|e| e.to_string())?;
    }
    let bytes = sink.into_bytes();
    let mut src = BitSource::new(&bytes);
    for b in 1..=10_000u64 {
        let got = unary_decode(&mut src).map_err(|e| e.to_string())?;
        if got != b {
            return Err(format!("unary: {b} decoded as {got}"));
        }
    }

    let n = 1_000_000u64;
    let mut gaps = Vec::new();
    for p in [0.5, 0.1, 0.01] {
        let m = golomb_parameter(n, p * n as f64).map_err(|e| e.to_string())?;
        let coder = GolombCoder::new(m).map_err(|e| e.to_string())?;
        let mut mean = 0.0;
        let mut mass = p;
        let mut v = 0u64;
        while mass > 1e-18 {
            mean += mass * coder.code_len(v) as f64;
            mass *= 1.0 - p;
            v += 1;
        }
        let h = geometric_entropy_bits(p);
        let gap = mean - h;
        if gap.abs() > 1.0 || gap.is_nan() {
            return Err(format!("p={p}, M={m}: mean length {mean:.4} vs entropy {h:.4}"));
        }
        gaps.push(format!("p={p} M={m} +{gap:.3}"));
    }
    Ok(format!(
        "Golomb 65536×64 and unary 1..=10⁴ round trips exact; length over entropy {}",
        gaps.join(", ")
    ))
}

fn c10_converse() -> Verdict {
    let model = LaplacianModel::new(1.0).unwrap();
    let trials = 200u64;
    let rates = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let mut means = Vec::new();
    for &r in &rates {
        let ds: Vec<f64> = (0..trials)
            .map(|k| {
                let u = model.sample_source(8, 10_000 + k);
                random_codebook_encode(&u, &model, 2, r, k).map(|c| c.distortion)
            })
            .collect::<surp::Result<_>>()
            .map_err(|e| e.to_string())?;
        let mean = ds.iter().sum::<f64>() / trials as f64;
        let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let bound = model.distortion_at_rate(r).map_err(|e| e.to_string())?;
        if mean < bound - 3.0 * se {
            return Err(format!("R={r}: mean distortion {mean:.4} below D(R) {bound:.4} - 3σ ({se:.4})"));
        }
        means.push(mean);
    }
    let nonincreasing = means.windows(2).all(|w| w[1] <= w[0]);
    let shown: Vec<String> = rates.iter().zip(&means).map(|(r, m)| format!("{r}:{m:.3}")).collect();
    check(
        nonincreasing,
        format!("mean distortion by rate {} (all ≥ D(R) - 3σ)", shown.join(" ")),
    )
}

fn c11_rd_formulas() -> Verdict {
    let mut worst = 0.0f64;
    for lambda in [0.5, 1.0, 4.0] {
        let models: [Box<dyn RdSource>; 2] = [
            Box::new(LaplacianModel::new(lambda).unwrap()),
            Box::new(ExponentialModel::new(lambda).unwrap()),
        ];
        for m in &models {
            let r0 = m.rate_at_distortion(1.0 / lambda).map_err(|e| e.to_string())?;
            let d0 = m.distortion_at_rate(0.0).map_err(|e| e.to_string())?;
            if r0 != 0.0 || (d0 - 1.0 / lambda).abs() > 1e-12 {
                return Err(format!("λ={lambda}: R(1/λ)={r0}, D(0)={d0}"));
            }
            for k in 1..=100 {
                let r = 0.05 * k as f64;
                let back = m
                    .rate_at_distortion(m.distortion_at_rate(r).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                worst = worst.max((back - r).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("worst |R(D(R)) - R| = {worst:.2e} over 100 rates × 3 λ"))
}

fn c12_budget() -> Verdict {
    let start = Instant::now();
    let n = 431_080;
    let k = 431;
    let u = laplace(n, 1.0, 12);
    let ws = WeightSet::new(vec![Segment::new("w", vec![n], u).unwrap()]).map_err(|e| e.to_string())?;
    let nv = normalize(&ws).map_err(|e| e.to_string())?;
    // β = n / k puts about k coordinates per side over the first threshold.
    let cfg = SurpConfig::new(Variant::Laplacian, StopRule::TargetSparsity(0.999))
        .with_codec(IndexCodec::GolombPermuted)
        .with_beta(n as f64 / k as f64)
        .with_seed(3);
    let enc = encode(&nv, &cfg).map_err(|e| e.to_string())?;
    let sparsity = enc.trace.last().map_or(1.0, |r| r.sparsity);
    let budget = surp_budget(&enc.container).map_err(|e| e.to_string())?;
    let limit = fl_budget(n, k).map_err(|e| e.to_string())?.baseline_bytes / 4.0;
    let detail = format!(
        "{} bytes ({} header, {} records) at sparsity {sparsity:.4} vs limit {limit:.2}",
        budget.total_bytes, budget.header_bytes, budget.record_count
    );
    if sparsity > 0.999 {
        return Err(format!("target sparsity not reached: {detail}"));
    }
    match check(budget.total_bytes as f64 <= limit, detail) {
        Ok(d) => within_time(Duration::from_secs(600), start, d),
        Err(d) => Err(d),
    }
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 12] = [
        (1, c1_round_trip),
        (2, c2_decrement),
        (3, c3_zero_rate),
        (4, c4_refresh_rarity),
        (5, c5_beta_sweep),
        (6, c6_decomposition),
        (7, c7_monotone),
        (8, c8_dominance),
        (9, c9_entropy),
        (10, c10_converse),
        (11, c11_rd_formulas),
        (12, c12_budget),
    ];
    // Keep panic messages out of the way of the verdict lines.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (id, f) in criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                println!("criterion {id}: FAIL ({secs:.1}s) {detail}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
