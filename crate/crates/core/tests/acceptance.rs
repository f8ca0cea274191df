//! Acceptance checks, one PASS/FAIL line per criterion. Runs sequentially so
//! the timing criteria see an otherwise idle process; exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cellfps::bench::{run_sampling_bench, speedup, summarize, SizeSummary, DEFAULT_SIZES};
use cellfps::losses::{
    adversarial_loss_from, joint_loss, multi_stage_completion_loss, LossWeights, StagePredictions,
};
use cellfps::metrics::{chamfer, covering_radius};
use cellfps::{cell_ifps, ifps, CellIfpsConfig, Point3, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn uniform_cloud(len: usize, rng: &mut ChaCha8Rng, half: f64) -> PointCloud {
    PointCloud::new(
        (0..len)
            .map(|_| {
                Point3::new(
                    rng.random_range(-half..half),
                    rng.random_range(-half..half),
                    rng.random_range(-half..half),
                )
            })
            .collect(),
    )
    .unwrap()
}

/// Clouds of assorted shapes: uniform, clustered, flat, collinear and
/// heavy with duplicates.
fn varied_cloud(len: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    let kind = rng.random_range(0..5);
    let centers: Vec<[f64; 3]> = (0..4)
        .map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
        .collect();
    let points = (0..len)
        .map(|_| match kind {
            0 => Point3::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)),
            1 => {
                let c = centers[rng.random_range(0..centers.len())];
                Point3::new(
                    c[0] + rng.random_range(-0.05..0.05),
                    c[1] + rng.random_range(-0.05..0.05),
                    c[2] + rng.random_range(-0.05..0.05),
                )
            }
            2 => Point3::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0), 0.25),
            3 => {
                let t: f64 = rng.random_range(0.0..10.0);
                Point3::new(t, 2.0 * t, -t)
            }
            _ => Point3::new(
                rng.random_range(0..4) as f64,
                rng.random_range(0..4) as f64,
                rng.random_range(0..2) as f64,
            ),
        })
        .collect();
    PointCloud::new(points).unwrap()
}

fn exact_count() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let instances = 1000;
    let mut failures = Vec::new();
    for case in 0..instances {
        let len = rng.random_range(2..=4096);
        let n = rng.random_range(1..=len);
        let cloud = varied_cloud(len, &mut rng);
        let config = CellIfpsConfig::with_seed(rng.random());
        let ok = match cell_ifps(&cloud, n, &config) {
            Ok(sel) => {
                let mut idx = sel.indices().to_vec();
                idx.sort_unstable();
                idx.dedup();
                sel.len() == n && idx.len() == n && idx.last().is_some_and(|&i| i < len)
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(format!("case {case} (|cloud| {len}, n {n})"));
        }
    }
    if failures.is_empty() {
        Ok(format!("{instances} instances, all exact"))
    } else {
        Err(format!("{} failures, first {}", failures.len(), failures[0]))
    }
}

fn greedy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut steps = 0usize;
    for case in 0..100 {
        let len = rng.random_range(1..=256);
        let cloud = if case % 4 == 3 {
            varied_cloud(len, &mut rng)
        } else {
            uniform_cloud(len, &mut rng, 1.0)
        };
        let n = rng.random_range(1..=len);
        let sel = ifps(&cloud, n, rng.random()).map_err(|e| format!("case {case}: {e}"))?;
        let pts = cloud.points();
        let idx = sel.indices();
        for k in 1..idx.len() {
            let chosen = &idx[..k];
            let min_to_chosen = |p: &Point3| {
                chosen
                    .iter()
                    .map(|&j| {
                        let q = pts[j];
                        (p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2)
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            let best = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| !chosen.contains(i))
                .map(|(_, p)| min_to_chosen(p))
                .fold(f64::NEG_INFINITY, f64::max);
            let got = min_to_chosen(&pts[idx[k]]);
            if chosen.contains(&idx[k]) || got != best {
                return Err(format!("case {case} step {k}: picked {got}, max-min is {best}"));
            }
            steps += 1;
        }
    }
    Ok(format!("100 clouds, {steps} selections match the brute-force max-min"))
}

fn brute_directional(from: &PointCloud, to: &PointCloud) -> f64 {
    let sum: f64 = from
        .iter()
        .map(|p| {
            to.iter()
                .map(|q| (p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    sum / from.len() as f64
}

fn chamfer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let rel_ok = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()) || a == b;
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let a = uniform_cloud(rng.random_range(1..=512), &mut rng, 2.0);
        let b = if case % 2 == 0 {
            uniform_cloud(rng.random_range(1..=512), &mut rng, 2.0)
        } else {
            varied_cloud(rng.random_range(1..=512), &mut rng)
        };
        let got = chamfer(&a, &b).map_err(|e| e.to_string())?;
        let ab = brute_directional(&a, &b);
        let ba = brute_directional(&b, &a);
        for (g, w) in [(got.pred_to_gt, ab), (got.gt_to_pred, ba), (got.chamfer, ab + ba)] {
            if !rel_ok(g, w) {
                return Err(format!("case {case}: indexed {g}, brute force {w}"));
            }
            if w != 0.0 {
                worst = worst.max((g - w).abs() / w.abs());
            }
        }
    }
    Ok(format!("200 pairs, worst relative gap {worst:.1e}"))
}

fn speedup_arithmetic() -> Outcome {
    let a = speedup(368.1, 11.9).map_err(|e| e.to_string())?;
    let b = speedup(373.0, 17.2).map_err(|e| e.to_string())?;
    let msg = format!("368.1/11.9 = {a:.3}, 373.0/17.2 = {b:.3}");
    if (a - 30.9).abs() <= 0.05 && (b - 21.7).abs() <= 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn describe(summary: &[SizeSummary]) -> String {
    summary
        .iter()
        .map(|s| {
            format!(
                "{}: {:.3}/{:.3} ms = {:.1}x",
                s.n_input, s.ifps_median_ms, s.cell_ifps_median_ms, s.speedup
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn efficiency(summary: &[SizeSummary], elapsed: Duration) -> Outcome {
    let detail = format!("{}; bench ran {:.1} s", describe(summary), elapsed.as_secs_f64());
    if summary.len() != DEFAULT_SIZES.len() {
        return Err(format!("expected {} sizes, got {}", DEFAULT_SIZES.len(), summary.len()));
    }
    if let Some(s) = summary.iter().find(|s| s.speedup.is_nan() || s.speedup < 10.0) {
        return Err(format!("speedup {:.2} below 10 at {}; {detail}", s.speedup, s.n_input));
    }
    let drops: Vec<(usize, f64)> = summary
        .windows(2)
        .filter(|w| w[1].speedup < w[0].speedup)
        .map(|w| (w[1].n_input, 1.0 - w[1].speedup / w[0].speedup))
        .collect();
    let trend_ok = match drops.as_slice() {
        [] => true,
        [(_, d)] => *d <= 0.10,
        _ => false,
    };
    if !trend_ok {
        let listed: Vec<String> = drops.iter().map(|(n, d)| format!("{n} -{:.1}%", d * 100.0)).collect();
        return Err(format!("speedup not rising (drops {}); {detail}", listed.join(", ")));
    }
    if elapsed >= Duration::from_secs(300) {
        return Err(format!("took longer than 5 min; {detail}"));
    }
    Ok(detail)
}

fn scale_sensitivity(summary: &[SizeSummary]) -> Outcome {
    let at = |n: usize| summary.iter().find(|s| s.n_input == n);
    let (Some(small), Some(large)) = (at(2048), at(10048)) else {
        return Err("benchmark lacks 2048 or 10048".into());
    };
    let cell = large.cell_ifps_median_ms / small.cell_ifps_median_ms;
    let full = large.ifps_median_ms / small.ifps_median_ms;
    let msg = format!("cell_ifps grows {cell:.2}x, ifps grows {full:.2}x from 2048 to 10048");
    if cell < 3.0 && full > 2.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cloud_of(points: &[[f64; 3]]) -> PointCloud {
    PointCloud::new(points.iter().map(|&p| p.into()).collect()).unwrap()
}

fn loss_suite() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let fail = |what: &str| Err::<String, String>(what.to_string());

    let origin = cloud_of(&[[0.0, 0.0, 0.0]]);
    let unit_x = cloud_of(&[[1.0, 0.0, 0.0]]);
    let preds = StagePredictions::new(origin.clone(), origin.clone(), origin).unwrap();
    if multi_stage_completion_loss(&preds, &unit_x, 1.0, 0).unwrap() != 8.0 {
        return fail("single-point stages should give 8");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let gt = uniform_cloud(64, &mut rng, 1.0);
    let gt_preds = StagePredictions::new(
        gt.clone(),
        gt.select(&ifps(&gt, 16, 9).unwrap()),
        gt.select(&ifps(&gt, 4, 9).unwrap()),
    )
    .unwrap();
    for alpha in [0.0, 0.3, 7.0] {
        if multi_stage_completion_loss(&gt_preds, &gt, alpha, 9).unwrap() != 0.0 {
            return fail("predictions equal to ground truth should give 0");
        }
    }
    let detail = uniform_cloud(32, &mut rng, 1.0);
    let preds = StagePredictions::new(
        detail.clone(),
        uniform_cloud(16, &mut rng, 1.0),
        uniform_cloud(8, &mut rng, 1.0),
    )
    .unwrap();
    if multi_stage_completion_loss(&preds, &gt, 0.0, 1).unwrap() != chamfer(&detail, &gt).unwrap().chamfer {
        return fail("alpha = 0 should reduce to the detail chamfer");
    }

    if adversarial_loss_from(&[1.0; 5], &[0.0; 5]).unwrap() != 0.0 {
        return fail("perfect discriminator should give 0");
    }
    let pair = adversarial_loss_from(&[0.5], &[0.5]).unwrap();
    // the quoted value is 2 ln 0.5 rounded to six decimals
    if !close(pair, 2.0 * 0.5f64.ln())
        || (pair - -1.386294).abs() > 5e-7
        || !close(adversarial_loss_from(&[0.5; 9], &[0.5; 9]).unwrap(), 9.0 * pair)
    {
        return fail("adversarial loss of 0.5 scores");
    }
    if adversarial_loss_from(&[0.0], &[0.5]).is_ok() || adversarial_loss_from(&[0.5], &[1.0]).is_ok() {
        return fail("log-domain scores should be rejected");
    }

    let w = LossWeights::from_completion_weight(1.0, 1.0).unwrap();
    if joint_loss(2.75, -3.0, &w) != 2.75 {
        return fail("lambda_c = 1 should return l_com");
    }
    let w = LossWeights::from_completion_weight(1.0, 0.5).unwrap();
    if joint_loss(2.0, 4.0, &w) != 3.0 {
        return fail("0.5 * 2 + 0.5 * 4 should be 3");
    }
    let w = LossWeights::from_completion_weight(1.0, 0.95).unwrap();
    if !close(joint_loss(1.0, -1.386294, &w), 0.950 - 0.0693147) {
        return fail("0.95 * 1 + 0.05 * -1.386294");
    }
    if LossWeights::new(1.0, 0.6, 0.6).is_ok() {
        return fail("weights summing to 1.2 should be rejected");
    }

    for case in 0..100 {
        let gt = uniform_cloud(rng.random_range(8..=64), &mut rng, 1.0);
        let primary = rng.random_range(2..=gt.len().min(24));
        let secondary = rng.random_range(1..=primary);
        let detail = rng.random_range(primary..=48);
        let preds = StagePredictions::new(
            uniform_cloud(detail, &mut rng, 1.0),
            uniform_cloud(primary, &mut rng, 1.0),
            uniform_cloud(secondary, &mut rng, 1.0),
        )
        .unwrap();
        let a0 = rng.random_range(0.0..2.0);
        let a1 = a0 + rng.random_range(0.01..2.0);
        let seed = rng.random();
        let l0 = multi_stage_completion_loss(&preds, &gt, a0, seed).unwrap();
        let l1 = multi_stage_completion_loss(&preds, &gt, a1, seed).unwrap();
        if l1 <= l0 || l1.is_nan() {
            return Err(format!("case {case}: alpha {a0} -> {a1} gave {l0} -> {l1}"));
        }

        let l_com = rng.random_range(0.0..10.0);
        let l_adv = -rng.random_range(0.0..10.0);
        let lambda = rng.random_range(0.0..=1.0);
        let w = LossWeights::from_completion_weight(rng.random_range(0.0..3.0), lambda).unwrap();
        let j = joint_loss(l_com, l_adv, &w);
        let expected = lambda * l_com + (1.0 - lambda) * l_adv;
        if !close(j, expected) || j < l_adv - 1e-12 || j > l_com + 1e-12 {
            return Err(format!("case {case}: joint {j} for lambda_c {lambda}, l_com {l_com}, l_adv {l_adv}"));
        }
    }
    Ok("examples exact; alpha-monotone and lambda-convex on 100 instances".into())
}

fn uniformity() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC8 ^ seed);
        let cloud = PointCloud::new(
            (0..4096)
                .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
                .collect(),
        )
        .unwrap();
        let config = CellIfpsConfig::with_seed(seed);
        let cell = covering_radius(&cloud, &cloud.select(&cell_ifps(&cloud, 256, &config).unwrap())).unwrap();
        let full = covering_radius(&cloud, &cloud.select(&ifps(&cloud, 256, seed).unwrap())).unwrap();
        let ratio = cell / full;
        if ratio > 2.0 {
            return Err(format!("seed {seed}: covering radius {cell:.4} vs {full:.4} ({ratio:.2}x)"));
        }
        worst = worst.max(ratio);
    }
    Ok(format!("20 seeds, worst ratio {worst:.3}"))
}

fn report(index: usize, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let mut outcome = run();
    let elapsed = t0.elapsed();
    if let (Some(limit), Ok(msg)) = (limit, &outcome) {
        if elapsed >= limit {
            outcome = Err(format!("{msg}; took {:.1} s", elapsed.as_secs_f64()));
        }
    }
    match &outcome {
        Ok(msg) => println!("PASS {index}. {name}: {msg} [{:.2} s]", elapsed.as_secs_f64()),
        Err(msg) => println!("FAIL {index}. {name}: {msg} [{:.2} s]", elapsed.as_secs_f64()),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let minute = Some(Duration::from_secs(60));
    let mut ok = true;
    ok &= report(1, "exact sample count", minute, exact_count);
    ok &= report(2, "farthest-point greedy oracle", minute, greedy_oracle);
    ok &= report(3, "chamfer brute-force oracle", minute, chamfer_oracle);
    ok &= report(4, "speedup arithmetic", None, speedup_arithmetic);

    let t0 = Instant::now();
    let bench = run_sampling_bench(&DEFAULT_SIZES, 9, 0);
    let bench_time = t0.elapsed();
    let summary = bench.as_deref().map(summarize).map_err(|e| e.to_string());
    ok &= report(5, "pipeline speedup across input sizes", None, || {
        efficiency(summary.as_ref().map_err(Clone::clone)?, bench_time)
    });
    ok &= report(6, "scale sensitivity", None, || scale_sensitivity(summary.as_ref().map_err(Clone::clone)?));

    ok &= report(7, "loss functions", None, loss_suite);
    ok &= report(8, "covering radius against ifps", None, uniformity);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
