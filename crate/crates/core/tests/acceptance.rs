//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use qnr::concentration::{concentration_experiment, expected_reduced, perturbation_bound, ConcentrationConfig};
use qnr::driver::{compute_qnr, random_sampling_baseline, DriverConfig, SampleBudget, StopRule};
use qnr::grid::{grid_select, single_link_clusters, GridOptions, PointCloud};
use qnr::io::write_cloud_csv;
use qnr::kernel::{eigen2x2, objective, reduce, split_by_alpha, ObjectiveParams, Reduced2x2};
use qnr::linalg::{
    complex_gaussian, full_spectrum, operator_norm, rng_from_seed, sample_unit_pair, NumericalRangeEnclosure, SeededRng,
};
use qnr::seeker::{curve_point, derivative_along, seek_boundary, steepest_tangent, SeekConfig};
use qnr::zoo::{gen_a1, gen_a3, gen_a5};
use qnr::{BlockMatrix, ComplexMatrix, C64};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_block(n1: usize, n2: usize, rng: &mut SeededRng) -> BlockMatrix {
    let g = |r, c, rng: &mut SeededRng| ComplexMatrix::from_fn(r, c, |_, _| complex_gaussian(rng));
    BlockMatrix::new(g(n1, n1, rng), g(n1, n2, rng), g(n2, n1, rng), g(n2, n2, rng)).unwrap()
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn quadratic_residual() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let block = random_block(16, 16, &mut rng);
        let pair = sample_unit_pair(16, 16, &mut rng);
        let m = reduce(&block, &pair).unwrap();
        let alpha = rng.random::<f64>() * std::f64::consts::TAU;
        let s = split_by_alpha(eigen2x2(&m), alpha);
        let scale = 1.0 + m.norm().powi(2);
        for l in [s.lambda_alpha, s.lambda_alpha_pi] {
            worst = worst.max(m.residual(l) / scale);
        }
    }
    let (fast, t) = within(start, Duration::from_secs(10));
    outcome(worst <= 1e-10 && fast, format!("worst scaled residual {worst:.2e}, {t}"))
}

fn derivative_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(102);
    let (mut checked, mut worst) = (0, 0.0f64);
    while checked < 100 {
        let n1 = rng.random_range(2..9);
        let n2 = rng.random_range(2..9);
        let block = random_block(n1, n2, &mut rng);
        let pair = sample_unit_pair(n1, n2, &mut rng);
        let m = reduce(&block, &pair).unwrap();
        let [l0, l1] = eigen2x2(&m);
        // the selected branch must stay selected across the stencil
        if (l0 - l1).norm() <= 0.1 || (l0.re - l1.re).abs() < 1e-3 {
            continue;
        }
        let params = ObjectiveParams::new(0.0, complex_gaussian(&mut rng), rng.random::<f64>()).unwrap();
        let lambda = params.select(&m);
        let tangent = steepest_tangent(&block, &pair, lambda, &params).unwrap();
        let analytic = derivative_along(&block, &pair, &tangent, lambda, &params).unwrap();
        let h = 1e-5;
        let f = |t: f64| objective(&block, &curve_point(&pair, &tangent, t, t), &params).unwrap();
        let fd = (f(h) - f(-h)) / (2.0 * h);
        worst = worst.max((fd - analytic).abs() / analytic.abs());
        checked += 1;
    }
    let (fast, t) = within(start, Duration::from_secs(10));
    outcome(worst <= 1e-6 && fast, format!("worst relative error {worst:.2e} over 100 instances, {t}"))
}

fn ascent_monotonicity() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(103);
    let a3 = gen_a3();
    // penalty as the driver would use it at iteration 5
    let seed_cloud = random_sampling_baseline(&a3, SampleBudget::Count(256), 0.0, 103, false);
    let p = grid_select(&seed_cloud.w, 20, 5, &GridOptions::default()).unwrap().penalty;
    let cfg = SeekConfig::with_iterations(50);
    let (mut worst_drop, mut runs, mut steps) = (0.0f64, 0, 0);
    for k in 0..100 {
        let block = if k < 50 { a3.clone() } else { random_block(4, 4, &mut rng) };
        let start_pair = sample_unit_pair(block.n1(), block.n2(), &mut rng);
        let lambda0 = ObjectiveParams::new(0.0, C64::new(0.0, 0.0), 0.0).unwrap().select(&reduce(&block, &start_pair).unwrap());
        let params = ObjectiveParams::new(0.0, lambda0, p).unwrap();
        let mut prev = objective(&block, &start_pair, &params).unwrap();
        for pair in seek_boundary(&block, &start_pair, &params, &cfg) {
            let v = objective(&block, &pair, &params).unwrap();
            worst_drop = worst_drop.max(prev - v);
            prev = v;
            steps += 1;
        }
        runs += 1;
    }
    let (fast, t) = within(start, Duration::from_secs(30));
    outcome(worst_drop <= 1e-12 && fast, format!("{runs} runs, {steps} steps, largest decrease {worst_drop:.2e}, penalty {p:.4}, {t}"))
}

fn bbox<'a>(points: impl IntoIterator<Item = &'a C64>) -> (f64, f64, f64, f64) {
    points.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, z| {
        (b.0.min(z.re), b.1.max(z.re), b.2.min(z.im), b.3.max(z.im))
    })
}

fn spectral_inclusion(block: &BlockMatrix, points: &[C64]) -> Outcome {
    let (a, b, c, d) = bbox(points);
    let diameter = ((b - a).powi(2) + (d - c).powi(2)).sqrt();
    let eigs = full_spectrum(&block.assemble()).unwrap();
    let worst = eigs
        .iter()
        .map(|e| points.iter().map(|p| (p - e).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    outcome(
        worst <= 0.05 * diameter,
        format!("{} eigenvalues, farthest {worst:.4} from the cloud, limit {:.4}", eigs.len(), 0.05 * diameter),
    )
}

fn containment(block: &BlockMatrix, points: &[C64]) -> Outcome {
    let enclosure = NumericalRangeEnclosure::new(&block.assemble(), 360).unwrap();
    let worst = points.iter().map(|z| enclosure.excess(*z)).fold(f64::NEG_INFINITY, f64::max);
    outcome(worst <= 1e-8, format!("{} points, largest support excess {worst:.2e}", points.len()))
}

fn occupied_cells(points: &[C64], bounds: (f64, f64, f64, f64)) -> usize {
    let (a, b, c, d) = bounds;
    let mut grid = vec![false; 100 * 100];
    for z in points {
        let i = (((z.re - a) / (b - a) * 100.0) as usize).min(99);
        let j = (((z.im - c) / (d - c) * 100.0) as usize).min(99);
        grid[i * 100 + j] = true;
    }
    grid.into_iter().filter(|o| *o).count()
}

fn coverage(algorithm: &[C64], baseline: &[C64]) -> Outcome {
    let bounds = bbox(algorithm.iter().chain(baseline));
    let (ca, cb) = (occupied_cells(algorithm, bounds), occupied_cells(baseline, bounds));
    outcome(
        ca as f64 >= 1.5 * cb as f64,
        format!("cells {ca} (algorithm, {} points) vs {cb} (sampling, {} points)", algorithm.len(), baseline.len()),
    )
}

fn two_components(points: &[C64]) -> Outcome {
    let n = single_link_clusters(points, 0.5);
    outcome(n == 2, format!("{n} single-link clusters at cutoff 0.5"))
}

fn expected_value() -> Outcome {
    let start = Instant::now();
    let block = gen_a3();
    let e = expected_reduced(&block);
    let mut rng = rng_from_seed(107);
    let n = 100_000;
    let mut sum = [C64::new(0.0, 0.0); 4];
    for _ in 0..n {
        let m = reduce(&block, &sample_unit_pair(2, 2, &mut rng)).unwrap();
        for (s, v) in sum.iter_mut().zip([m.a, m.b, m.c, m.d]) {
            *s += v;
        }
    }
    let bound = 5.0 * operator_norm(&block.assemble()) / (n as f64).sqrt();
    let want = [e.ea, C64::new(0.0, 0.0), C64::new(0.0, 0.0), e.ed];
    let worst = sum.iter().zip(want).map(|(s, w)| (s / n as f64 - w).norm()).fold(0.0, f64::max);
    let exact = e.ea == C64::new(0.5, 0.0) && e.ed == C64::new(-0.5, 0.0);
    let (fast, t) = within(start, Duration::from_secs(20));
    outcome(exact && worst <= bound && fast, format!("largest deviation {worst:.2e}, bound {bound:.2e}, {t}"))
}

fn perturbation_lemma() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(108);
    let disc = |rng: &mut SeededRng| C64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
    let mut pairs: Vec<(Reduced2x2, Reduced2x2)> =
        vec![(Reduced2x2::from_real(1.0, 0.0, 0.0, 0.0), Reduced2x2::from_real(0.0, 0.0, 0.0, 0.0))];
    while pairs.len() < 10_000 {
        let mut draw = || Reduced2x2::new(disc(&mut rng), disc(&mut rng), disc(&mut rng), disc(&mut rng));
        pairs.push((draw(), draw()));
    }
    let (mut violations, mut tightest) = (0, f64::INFINITY);
    for (m1, m2) in &pairs {
        let (lhs, rhs) = perturbation_bound(m1, m2);
        if lhs > rhs + 1e-10 {
            violations += 1;
        }
        tightest = tightest.min(rhs - lhs);
    }
    let (fast, t) = within(start, Duration::from_secs(5));
    outcome(
        violations == 0 && tightest <= 1e-6 && fast,
        format!("{violations} violations in {} pairs, smallest slack {tightest:.2e}, {t}", pairs.len()),
    )
}

fn concentration_decay() -> Outcome {
    let start = Instant::now();
    let cfg = ConcentrationConfig::new(vec![8, 32, 128], 100_000, vec![0.5], 109);
    let (report, _) = concentration_experiment(|d| gen_a5(d / 2), &cfg).unwrap();
    let e: Vec<f64> = report.exceedance.iter().map(|row| row[0]).collect();
    let decreasing = e[0] > e[1] && e[1] > e[2];
    let halved = e[2] <= 0.5 * e[0];
    let (fast, t) = within(start, Duration::from_secs(180));
    outcome(decreasing && halved && fast, format!("exceedance at dims 8, 32, 128: {:.4}, {:.4}, {:.4}, {t}", e[0], e[1], e[2]))
}

fn norm_anchor() -> Outcome {
    let norms: Vec<f64> = [8, 32, 64].iter().map(|k| operator_norm(&gen_a5(*k).unwrap().assemble())).collect();
    let ok = norms.iter().all(|n| (n - 2.36).abs() <= 0.02);
    outcome(ok, format!("norms {norms:.4?} for half dimensions 8, 32, 64"))
}

fn csv_bytes(cloud: &PointCloud) -> Vec<u8> {
    let mut buf = Vec::new();
    write_cloud_csv(cloud, &mut buf, std::path::Path::new("memory.csv")).unwrap();
    buf
}

fn determinism() -> Outcome {
    let block = gen_a1(20).unwrap();
    let cfg = DriverConfig::new(StopRule::OuterIterations(12), 112);
    let first = csv_bytes(&compute_qnr(&block, &cfg).unwrap());
    let second = csv_bytes(&compute_qnr(&block, &cfg).unwrap());
    outcome(first == second, format!("{} bytes, identical: {}", first.len(), first == second))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, o: Outcome| {
        println!("{} criterion {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failures += 1;
        }
    };

    report(1, "quadratic residual", quadratic_residual());
    report(2, "derivative oracle", derivative_oracle());
    report(3, "ascent monotonicity", ascent_monotonicity());

    let a1 = gen_a1(20).unwrap();
    let budget = Duration::from_secs(60);
    let cloud = compute_qnr(&a1, &DriverConfig::new(StopRule::Time(budget), 104)).unwrap();
    let points: Vec<C64> = cloud.all_points().collect();
    drop(cloud);
    report(4, "spectral inclusion", spectral_inclusion(&a1, &points));
    report(5, "numerical-range containment", containment(&a1, &points));
    let baseline: Vec<C64> = random_sampling_baseline(&a1, SampleBudget::Time(budget), 0.0, 106, false).all_points().collect();
    report(6, "coverage dominance", coverage(&points, &baseline));
    drop(baseline);

    report(7, "expected value", expected_value());
    report(8, "perturbation lemma", perturbation_lemma());
    report(9, "concentration decay", concentration_decay());
    report(10, "norm anchor", norm_anchor());
    report(11, "two components", two_components(&points));
    report(12, "determinism", determinism());

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
