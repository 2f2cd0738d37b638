//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line and the
//! process exits non-zero if any criterion fails.
//!
//! Runs without the test harness so the lines are always shown and the
//! timing checks are not disturbed by other test threads.

use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use huekeep::colorspace::{oklch_to_srgb, srgb_to_oklch, OklchColor};
use huekeep::evaluation::{
    generate_dataset, generate_with, Category, DatasetConfig, EdgeFamily, LabeledPair,
};
use huekeep::metrics::ciede2000;
use huekeep::optimizer::{
    binary_search_lightness, gd_cost, gd_gradient, hue_difference, Compliance, DescentCost,
    PairContext, DELTA_E_SCHEDULE,
};
use huekeep::{
    delta_e_2000, generate_accessible_color, ContrastRatio, LabColor, PerceptualDistance, RgbColor,
};
use huekeep_cli::{run_eval, EvalArgs};

type Outcome = Result<String, String>;

/// WCAG 2.1 contrast written out from the definition, independent of the
/// library's lookup tables.
fn wcag_contrast(a: RgbColor, b: RgbColor) -> f64 {
    fn channel(v: u8) -> f64 {
        let s = f64::from(v) / 255.0;
        if s <= 0.03928 {
            s / 12.92
        } else {
            ((s + 0.055) / 1.055).powf(2.4)
        }
    }
    fn luminance(c: RgbColor) -> f64 {
        0.2126 * channel(c.r) + 0.7152 * channel(c.g) + 0.0722 * channel(c.b)
    }
    let (la, lb) = (luminance(a), luminance(b));
    (la.max(lb) + 0.05) / (la.min(lb) + 0.05)
}

fn random_color(rng: &mut ChaCha8Rng) -> RgbColor {
    RgbColor::new(rng.gen(), rng.gen(), rng.gen())
}

// Sharma, Wu and Dalal CIEDE2000 test data: (L1, a1, b1, L2, a2, b2, ΔE).
#[rustfmt::skip]
const SHARMA: [[f64; 7]; 34] = [
    [50.0000, 2.6772, -79.7751, 50.0000, 0.0000, -82.7485, 2.0425],
    [50.0000, 3.1571, -77.2803, 50.0000, 0.0000, -82.7485, 2.8615],
    [50.0000, 2.8361, -74.0200, 50.0000, 0.0000, -82.7485, 3.4412],
    [50.0000, -1.3802, -84.2814, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, -1.1848, -84.8006, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, -0.9009, -85.5211, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, 0.0000, 0.0000, 50.0000, -1.0000, 2.0000, 2.3669],
    [50.0000, -1.0000, 2.0000, 50.0000, 0.0000, 0.0000, 2.3669],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0009, 7.1792],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0010, 7.1792],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0011, 7.2195],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0012, 7.2195],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0009, -2.4900, 4.8045],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0010, -2.4900, 4.8045],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0011, -2.4900, 4.7461],
    [50.0000, 2.5000, 0.0000, 50.0000, 0.0000, -2.5000, 4.3065],
    [50.0000, 2.5000, 0.0000, 73.0000, 25.0000, -18.0000, 27.1492],
    [50.0000, 2.5000, 0.0000, 61.0000, -5.0000, 29.0000, 22.8977],
    [50.0000, 2.5000, 0.0000, 56.0000, -27.0000, -3.0000, 31.9030],
    [50.0000, 2.5000, 0.0000, 58.0000, 24.0000, 15.0000, 19.4535],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.1736, 0.5854, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.2972, 0.0000, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 1.8634, 0.5757, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.2592, 0.3350, 1.0000],
    [60.2574, -34.0099, 36.2677, 60.4626, -34.1751, 39.4387, 1.2644],
    [63.0109, -31.0961, -5.8663, 62.8187, -29.7946, -4.0864, 1.2630],
    [61.2901, 3.7196, -5.3901, 61.4292, 2.2480, -4.9620, 1.8731],
    [35.0831, -44.1164, 3.7933, 35.0232, -40.0716, 1.5901, 1.8645],
    [22.7233, 20.0904, -46.6940, 23.0331, 14.9730, -42.5619, 2.0373],
    [36.4612, 47.8580, 18.3852, 36.2715, 50.5065, 21.2231, 1.4146],
    [90.8027, -2.0831, 1.4410, 91.1528, -1.6435, 0.0447, 1.4441],
    [90.9257, -0.5406, -0.9208, 88.6381, -0.8985, -0.7239, 1.5381],
    [6.7747, -0.2908, -2.4247, 5.8714, -0.0985, -2.2286, 0.6377],
    [2.0776, 0.0795, -1.1350, 0.9033, -0.0636, -0.5514, 0.9082],
];

fn ciede2000_reference_pairs() -> Outcome {
    let mut worst = 0.0_f64;
    for (i, row) in SHARMA.iter().enumerate() {
        let a = LabColor::new(row[0], row[1], row[2]);
        let b = LabColor::new(row[3], row[4], row[5]);
        for d in [ciede2000(&a, &b), ciede2000(&b, &a)] {
            let err = (d - row[6]).abs();
            worst = worst.max(err);
            if err > 1e-4 {
                return Err(format!("pair {}: {d:.6} vs {}", i + 1, row[6]));
            }
        }
    }
    Ok(format!("34 pairs, both orders, max error {worst:.2e}"))
}

fn round_trip_closure() -> Outcome {
    let lattice = (0..64u32).map(|i| ((i * 255 + 31) / 63) as u8);
    let mut colors = Vec::with_capacity(64 * 64 * 64 + 10_000);
    for r in lattice.clone() {
        for g in lattice.clone() {
            for b in lattice.clone() {
                colors.push(RgbColor::new(r, g, b));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    colors.extend((0..10_000).map(|_| random_color(&mut rng)));

    let failures: Vec<RgbColor> = colors
        .iter()
        .copied()
        .filter(|&c| oklch_to_srgb(srgb_to_oklch(c)) != Some(c))
        .collect();
    if failures.is_empty() {
        Ok(format!("{} colors, 0 failures", colors.len()))
    } else {
        Err(format!(
            "{} failures, first {}",
            failures.len(),
            failures[0]
        ))
    }
}

struct Tuned {
    pair: LabeledPair,
    color: RgbColor,
    contrast: f64,
    delta_e: f64,
    compliance: Compliance,
}

fn tune_all(pairs: &[LabeledPair]) -> Vec<Tuned> {
    pairs
        .iter()
        .map(|&pair| {
            let r = generate_accessible_color(pair.text, pair.bg, false);
            Tuned {
                pair,
                color: r.color,
                contrast: r.contrast.value(),
                delta_e: r.delta_e.value(),
                compliance: r.compliance,
            }
        })
        .collect()
}

fn compliance_invariant(results: &[Tuned]) -> Outcome {
    let mut labelled = 0;
    for t in results {
        let rho = wcag_contrast(t.color, t.pair.bg);
        let ok = match t.compliance {
            Compliance::TargetMet => rho >= 7.0,
            Compliance::MinimumMet => rho >= 4.5,
            Compliance::Unchanged => t.color == t.pair.text,
            Compliance::Improved => rho < 4.5,
        };
        if !ok {
            return Err(format!(
                "{} on {} tuned to {} labelled {} but contrast is {rho}",
                t.pair.text, t.pair.bg, t.color, t.compliance
            ));
        }
        if t.compliance.is_compliant() {
            labelled += 1;
        }
    }
    Ok(format!(
        "{} pairs, {labelled} labelled compliant, all recomputations agree",
        results.len()
    ))
}

fn hue_preservation(results: &[Tuned]) -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0_f64;
    for t in results {
        let input = srgb_to_oklch(t.pair.text);
        if input.is_achromatic() || t.color == t.pair.text {
            continue;
        }
        let output = srgb_to_oklch(t.color);
        let drift = if output.is_achromatic() {
            f64::INFINITY
        } else {
            hue_difference(output.h, input.h)
        };
        checked += 1;
        worst = worst.max(drift);
        if drift > 0.5 {
            return Err(format!(
                "{} -> {}: hue moved {drift:.3} degrees",
                t.pair.text, t.color
            ));
        }
    }
    Ok(format!(
        "{checked} changed chromatic outputs, worst drift {worst:.3} degrees"
    ))
}

fn graceful_failure() -> Outcome {
    let families = [
        EdgeFamily::MidGrayOnGray,
        EdgeFamily::RedOnGreen,
        EdgeFamily::OrangeOnYellow,
        EdgeFamily::BrightYellowOnWhite,
    ];
    let pairs = generate_dataset(11, 4000).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut failed = None;
    for family in families {
        let members: Vec<LabeledPair> = pairs
            .iter()
            .copied()
            .filter(|p| p.category == Category::Edge(family))
            .collect();
        let results = tune_all(&members);
        let successes = results.iter().filter(|t| t.contrast >= 4.5).count();
        let untouched = results
            .iter()
            .filter(|t| t.color == t.pair.text && t.delta_e == 0.0)
            .count();
        let untouched_rate = untouched as f64 / results.len() as f64;
        lines.push(format!(
            "{} n={} success={successes} unchanged={:.1}%",
            Category::Edge(family),
            results.len(),
            untouched_rate * 100.0
        ));
        if results.is_empty() || successes > 0 || untouched_rate < 0.99 {
            failed.get_or_insert(family);
        }
    }
    match failed {
        None => Ok(lines.join("; ")),
        Some(f) => Err(format!("{f:?} out of band: {}", lines.join("; "))),
    }
}

fn aggregate_and_performance() -> (Outcome, Outcome) {
    let args = EvalArgs {
        n: 10_000,
        seed: 1,
        output: None,
        format: None,
        dataset: None,
        jobs: 1,
    };
    let start = Instant::now();
    let run = run_eval(&args);
    let wall = start.elapsed().as_secs_f64();
    let (report, records) = match run {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };

    let aggregate = {
        let detail = format!(
            "{} pairs: success {:.2}%, median ΔE {:.3}, high fidelity {:.2}%, {wall:.1} s",
            report.total,
            report.success_rate * 100.0,
            report.median_delta_e,
            report.high_fidelity_rate * 100.0
        );
        if (0.65..=0.88).contains(&report.success_rate)
            && report.median_delta_e <= 1.5
            && report.high_fidelity_rate >= 0.75
            && wall <= 60.0
        {
            Ok(detail)
        } else {
            Err(detail)
        }
    };

    let performance = {
        let mut failing: Vec<f64> = records
            .iter()
            .filter(|r| r.initial_contrast.value() < 7.0)
            .map(|r| r.elapsed)
            .collect();
        failing.sort_by(f64::total_cmp);
        let median_ms = failing[(failing.len() - 1) / 2] * 1000.0;
        let detail = format!(
            "median {median_ms:.3} ms over {} failing pairs, {:.0} pairs/s single-threaded",
            failing.len(),
            report.throughput
        );
        if median_ms <= 5.0 && report.throughput >= 200.0 {
            Ok(detail)
        } else {
            Err(detail)
        }
    };
    (aggregate, performance)
}

/// Minimum ΔE over a uniform lightness sweep at the text's chroma and hue
/// among in-gamut colors meeting `tau` within `delta`. With `keep_hue`, only
/// 8-bit colors within 0.5 degrees of the text hue count, which is the set
/// the optimizer may return.
fn sweep_optimum(
    text: RgbColor,
    bg: RgbColor,
    delta: f64,
    tau: f64,
    keep_hue: bool,
) -> Option<f64> {
    let lch = srgb_to_oklch(text);
    let admissible = |c: RgbColor| {
        if !keep_hue || lch.is_achromatic() {
            return true;
        }
        let o = srgb_to_oklch(c);
        !o.is_achromatic() && hue_difference(o.h, lch.h) <= 0.5
    };
    (0..4096)
        .filter_map(|i| {
            let l = i as f64 / 4095.0;
            let c = oklch_to_srgb(OklchColor::new(l, lch.c, lch.h))?;
            let d = delta_e_2000(text, c).value();
            (wcag_contrast(c, bg) >= tau && d <= delta && admissible(c)).then_some(d)
        })
        .min_by(f64::total_cmp)
}

fn phase_one_oracle() -> Outcome {
    const TAU: f64 = 4.5;
    let pairs: Vec<LabeledPair> = generate_dataset(23, 4000)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|p| wcag_contrast(p.text, p.bg) < TAU)
        .take(500)
        .collect();
    if pairs.len() < 500 {
        return Err(format!("only {} failing pairs generated", pairs.len()));
    }
    let mut lines = Vec::new();
    let mut ok = true;
    for delta in [1.0, 2.0, 5.0] {
        let mut feasible = 0;
        let mut found = 0;
        let mut worst_gap = 0.0_f64;
        let mut worst_unconstrained = 0.0_f64;
        for p in &pairs {
            let Some(optimum) = sweep_optimum(p.text, p.bg, delta, TAU, true) else {
                continue;
            };
            feasible += 1;
            let candidate = binary_search_lightness(
                p.text,
                p.bg,
                PerceptualDistance(delta),
                ContrastRatio(TAU),
            );
            if let Some(c) = candidate
                .filter(|c| wcag_contrast(c.color, p.bg) >= TAU && c.delta_e.value() <= delta)
            {
                found += 1;
                worst_gap = worst_gap.max(c.delta_e.value() - optimum);
                if let Some(free) = sweep_optimum(p.text, p.bg, delta, TAU, false) {
                    worst_unconstrained = worst_unconstrained.max(c.delta_e.value() - free);
                }
            }
        }
        let rate = if feasible == 0 {
            1.0
        } else {
            found as f64 / feasible as f64
        };
        ok &= rate >= 0.95 && worst_gap <= 0.25;
        lines.push(format!(
            "δ={delta}: {found}/{feasible} found ({:.1}%), worst excess ΔE {worst_gap:.3} \
             ({worst_unconstrained:.3} against a sweep that ignores hue)",
            rate * 100.0
        ));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gradient_check() -> Outcome {
    const MARGIN: f64 = 1e-3;
    let pairs = generate_dataset(5, 2000).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut worst = 0.0_f64;
    while accepted < 100 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(format!("only {accepted} smooth points found"));
        }
        let pair = pairs[rng.gen_range(0..pairs.len())];
        let ctx = PairContext::new(pair.text, pair.bg);
        let tau = if rng.gen_bool(0.5) { 7.0 } else { 4.5 };
        let delta = DELTA_E_SCHEDULE[rng.gen_range(0..DELTA_E_SCHEDULE.len())];
        let model = DescentCost::new(&ctx, tau, delta);
        let p = [rng.gen_range(0.05..0.95), rng.gen_range(0.0..0.3)];

        // Smooth: every stencil point in gamut and away from both hinges and
        // from the ΔE = 0 cusp.
        let stencil = [
            [0.0, 0.0],
            [2e-4, 0.0],
            [-2e-4, 0.0],
            [0.0, 2e-4],
            [0.0, -2e-4],
        ];
        let smooth = stencil.iter().all(|d| {
            model
                .metrics([p[0] + d[0], p[1] + d[1]])
                .is_some_and(|(rho, de)| {
                    (rho - tau).abs() > MARGIN * tau && (de - delta).abs() > MARGIN && de > 0.5
                })
        });
        if !smooth || p[1] < 2e-4 {
            continue;
        }

        let hue = ctx.text_oklch.h;
        let g = gd_gradient(
            p,
            hue,
            pair.text,
            pair.bg,
            ContrastRatio(tau),
            PerceptualDistance(delta),
        );
        let cost = |q: [f64; 2]| {
            gd_cost(
                q,
                hue,
                pair.text,
                pair.bg,
                ContrastRatio(tau),
                PerceptualDistance(delta),
            )
        };
        let h = 1e-5;
        let reference = [
            (cost([p[0] + h, p[1]]) - cost([p[0] - h, p[1]])) / (2.0 * h),
            (cost([p[0], p[1] + h]) - cost([p[0], p[1] - h])) / (2.0 * h),
        ];
        let norm = reference[0].hypot(reference[1]);
        let err = (g[0] - reference[0]).hypot(g[1] - reference[1]) / norm.max(1e-12);
        worst = worst.max(err);
        accepted += 1;
    }
    let detail = format!("100 points ({attempts} drawn), worst relative error {worst:.2e}");
    if worst <= 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |tag: &str| {
        let args = EvalArgs {
            n: 500,
            seed: 7,
            output: Some(dir.path().join(format!("report-{tag}.csv"))),
            format: None,
            dataset: Some(dir.path().join(format!("dataset-{tag}.csv"))),
            jobs: 1,
        };
        run_eval(&args).map_err(|e| e.to_string())
    };
    let (first, _) = run("a")?;
    let (second, _) = run("b")?;
    let read = |name: &str| fs::read(dir.path().join(name)).map_err(|e| e.to_string());
    let (da, db) = (read("dataset-a.csv")?, read("dataset-b.csv")?);
    if da != db {
        return Err("dataset exports differ".into());
    }
    if first.without_timing() != second.without_timing() {
        return Err("non-timing summary fields differ".into());
    }
    Ok(format!(
        "dataset exports byte-identical ({} bytes), summaries equal",
        da.len()
    ))
}

fn identity_on_compliant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut pairs = Vec::with_capacity(1000);
    while pairs.len() < 1000 {
        let (text, bg) = (random_color(&mut rng), random_color(&mut rng));
        if wcag_contrast(text, bg) >= 7.0 {
            pairs.push((text, bg));
        }
    }
    for (text, bg) in pairs {
        let r = generate_accessible_color(text, bg, false);
        if r.color != text || r.delta_e.value() != 0.0 || r.compliance != Compliance::TargetMet {
            return Err(format!("{text} on {bg} changed to {}", r.color));
        }
    }
    Ok("1000 compliant pairs returned unchanged".into())
}

fn main() {
    let base = generate_with(&DatasetConfig {
        edge_fraction: 0.0,
        ..DatasetConfig::new(2024, 2000)
    })
    .expect("dataset");
    let tuned = tune_all(&base);
    let (aggregate, performance) = aggregate_and_performance();

    let outcomes: Vec<(&str, Outcome)> = vec![
        ("1 CIEDE2000 reference pairs", ciede2000_reference_pairs()),
        ("2 round-trip closure", round_trip_closure()),
        ("3 compliance invariant", compliance_invariant(&tuned)),
        ("4 hue preservation", hue_preservation(&tuned)),
        ("5 graceful failure on edge families", graceful_failure()),
        ("6 aggregate statistics", aggregate),
        ("7 performance", performance),
        ("8 lightness search vs sweep", phase_one_oracle()),
        ("9 gradient check", gradient_check()),
        ("10 determinism", determinism()),
        ("11 identity on compliant input", identity_on_compliant()),
    ];

    let mut failures = 0;
    for (name, outcome) in &outcomes {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        outcomes.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
