//! Acceptance suite. Each test prints one pass/fail line with the measured
//! quantities before asserting, so a full run documents every criterion.

use std::time::Instant;

use laplace_limits::graph::{
    EdgeFunction, GraphStructure, LaplacianKind, PresetKind, WeightedGraph, preset_structure,
};
use laplace_limits::harness::{
    Bandwidth, EvalPoints, ExperimentConfig, estimate_rate_filtered, run_convergence_with_threads,
    write_aggregates_csv, write_rates_csv, write_rows_csv,
};
use laplace_limits::kernel::KernelProfile;
use laplace_limits::manifold::{Manifold, SphereCluster, manifold_by_name};
use laplace_limits::numerics::{mean, median, pearson};
use laplace_limits::oracle::{LimitSpec, convolution_expansion};
use ndarray::Array2;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn status(ok: bool) -> &'static str {
    if ok { "PASS" } else { "FAIL" }
}

fn random_symmetric(n: usize, rng: &mut StdRng) -> WeightedGraph {
    loop {
        let mut w = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.5 {
                    let v = rng.random::<f64>() + 0.05;
                    w[[i, j]] = v;
                    w[[j, i]] = v;
                }
            }
        }
        if let Ok(g) = WeightedGraph::from_dense(w) {
            return g;
        }
    }
}

fn random_directed(n: usize, rng: &mut StdRng) -> WeightedGraph {
    loop {
        let mut w = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random::<f64>() < 0.35 {
                    w[[i, j]] = rng.random::<f64>() + 0.05;
                }
            }
        }
        if let Ok(g) = WeightedGraph::from_dense(w) {
            return g;
        }
    }
}

fn random_vec(n: usize, rng: &mut StdRng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()
}

/// Criterion 1: the algebraic operator identities hold to 1e-10 on at least
/// 100 random graphs with n <= 50, in under 5 seconds.
#[test]
fn acceptance_1_algebraic_identities() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(20260809);
    let structure = GraphStructure::undirected(
        |d: f64| d,
        |w: f64| w.sqrt(),
        |w: f64| if w > 0.0 { 1.0 } else { 0.0 },
    );
    let trials = 120usize;
    let tol = 1e-10;
    let mut zhou_graphs = 0usize;
    for trial in 0..trials {
        let n = 2 + (trial % 49);
        let directed = trial % 2 == 1;
        let g = if directed {
            random_directed(n, &mut rng)
        } else {
            random_symmetric(n, &mut rng)
        };
        let f = random_vec(n, &mut rng);
        let u = EdgeFunction::from_fn(&g, |_, _, _| rng.random::<f64>() * 2.0 - 1.0);

        // adjointness <df, u>_E = <f, d*u>_V
        let df = g.difference(&structure, &f).unwrap();
        let lhs = g.edge_inner(&structure, &df, &u).unwrap();
        let rhs = g
            .vertex_inner(&structure, &f, &g.adjoint(&structure, &u).unwrap())
            .unwrap();
        assert!(
            (lhs - rhs).abs() <= tol * (1.0 + lhs.abs()),
            "adjointness violated on trial {trial}: {lhs} vs {rhs}"
        );

        // self-adjointness and positive semi-definiteness of d*d
        let h = random_vec(n, &mut rng);
        let lf = g.laplacian_general(&structure, &f).unwrap();
        let lh = g.laplacian_general(&structure, &h).unwrap();
        let a = g.vertex_inner(&structure, &f, &lh).unwrap();
        let b = g.vertex_inner(&structure, &lf, &h).unwrap();
        assert!((a - b).abs() <= tol * (1.0 + a.abs()), "self-adjointness violated");
        let quad = g.vertex_inner(&structure, &f, &lf).unwrap();
        assert!(quad >= -tol, "quadratic form negative: {quad}");

        // constants are annihilated by the general Laplacian
        let c = vec![3.7; n];
        for v in g.laplacian_general(&structure, &c).unwrap() {
            assert!(v.abs() <= tol, "general Laplacian not zero on constants: {v}");
        }

        if directed {
            continue;
        }

        // named-Laplacian identities on undirected graphs
        let rw = g.laplacian_rw(&f).unwrap();
        let un = g.laplacian_unnorm(&f).unwrap();
        let no = g.laplacian_norm(&f).unwrap();
        for i in 0..n {
            assert!((un[i] - g.degree(i) * rw[i]).abs() <= tol * (1.0 + un[i].abs()));
        }
        let fd: Vec<f64> = (0..n).map(|i| f[i] / g.degree(i).sqrt()).collect();
        let und = g.laplacian_unnorm(&fd).unwrap();
        for i in 0..n {
            let expect = und[i] / g.degree(i).sqrt();
            assert!((no[i] - expect).abs() <= tol * (1.0 + no[i].abs()));
        }
        for v in g.laplacian_rw(&c).unwrap() {
            assert!(v.abs() <= tol);
        }
        for v in g.laplacian_unnorm(&c).unwrap() {
            assert!(v.abs() <= tol);
        }
        let sqrt_d: Vec<f64> = (0..n).map(|i| g.degree(i).sqrt()).collect();
        for v in g.laplacian_norm(&sqrt_d).unwrap() {
            assert!(v.abs() <= tol);
        }

        // presets reproduce the named operators through d*d
        let via_rw = g
            .laplacian_general(&preset_structure(PresetKind::RandomWalk), &f)
            .unwrap();
        let via_un = g
            .laplacian_general(&preset_structure(PresetKind::Unnormalized), &f)
            .unwrap();
        for i in 0..n {
            assert!((rw[i] - via_rw[i]).abs() <= tol * (1.0 + rw[i].abs()));
            assert!((un[i] - via_un[i]).abs() <= tol * (1.0 + un[i].abs()));
        }

        // the Zhou difference operator is not zero on constants when
        // degrees differ
        let degs: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
        let spread = degs.iter().cloned().fold(f64::MIN, f64::max)
            - degs.iter().cloned().fold(f64::MAX, f64::min);
        if spread > 1e-6 {
            zhou_graphs += 1;
            let dz = g.zhou_difference(&structure, &c).unwrap();
            let max = dz.iter().map(|(_, _, v)| v.abs()).fold(0.0, f64::max);
            assert!(max > 1e-12, "Zhou operator vanished on constants, spread {spread}");
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = elapsed < 5.0 && zhou_graphs >= 40;
    println!(
        "criterion 1 (algebraic identities, {trials} graphs, {zhou_graphs} zhou checks): {} ({elapsed:.2}s)",
        status(ok)
    );
    assert!(ok, "runtime {elapsed:.2}s exceeds 5s or too few Zhou checks");
}

/// Criterion 2: cubic-taper moments in one dimension match 32/35 and
/// 32/315 to 1e-9.
#[test]
fn acceptance_2_kernel_moments() {
    let m = KernelProfile::cubic_taper().moments(1).unwrap();
    let e1 = (m.c1 - 32.0 / 35.0).abs();
    let e2 = (m.c2 - 32.0 / 315.0).abs();
    let ok = e1 <= 1e-9 && e2 <= 1e-9;
    println!(
        "criterion 2 (kernel moments m=1): {} (err c1 {e1:.2e}, err c2 {e2:.2e})",
        status(ok)
    );
    assert!(ok);
}

fn uniform_box_config() -> ExperimentConfig {
    ExperimentConfig {
        model: "box2_uniform".into(),
        kernel: "cubic_taper".into(),
        function: "paper_sine".into(),
        lambdas: vec![0.0],
        kinds: vec![
            LaplacianKind::RandomWalk,
            LaplacianKind::Unnormalized,
            LaplacianKind::Normalized,
        ],
        ns: vec![2500],
        bandwidth: Bandwidth::Explicit(vec![1.4]),
        eval_points: EvalPoints::ModelGrid,
        boundary_margin_factor: 0.0,
        seeds: vec![1, 2, 3],
    }
}

/// Criterion 3: uniform measure on the box, n = 2500, h = 1.4, lambda = 0,
/// f = paper_sine. Per seed: the random-walk estimate has median relative
/// error <= 0.30 against -(c2/2c1) lap f on the 25-point grid, and the
/// three kinds agree after dividing out their constant/density factors to
/// median relative discrepancy <= 0.15. Runtime < 60 s.
#[test]
fn acceptance_3_uniform_density_agreement() {
    let start = Instant::now();
    let config = uniform_box_config();
    let report = run_convergence_with_threads(&config, None).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);

    let kernel = KernelProfile::cubic_taper();
    let c1 = kernel.moments(2).unwrap().c1;
    let p_uniform = 1.0 / 36.0;
    // estimates adjusted to the common random-walk scale:
    // rw as-is, unnorm / (c1^{1-2l} p^{1-2l}) with l = 0, norm as-is
    let unnorm_factor = c1 * p_uniform;

    let mut all_ok = true;
    let mut details = String::new();
    for &seed in &config.seeds {
        let per_kind = |kind: LaplacianKind| -> Vec<&laplace_limits::harness::ReportRow> {
            report
                .rows
                .iter()
                .filter(|r| r.seed == seed && r.kind == kind)
                .collect()
        };
        let rw = per_kind(LaplacianKind::RandomWalk);
        let un = per_kind(LaplacianKind::Unnormalized);
        let no = per_kind(LaplacianKind::Normalized);
        assert_eq!(rw.len(), 25);

        let rels: Vec<f64> = rw.iter().map(|r| r.rel_err).collect();
        let med_rel = median(&rels);

        let mut discrepancies = Vec::new();
        for i in 0..rw.len() {
            let a = rw[i].estimate;
            let b = un[i].estimate / unnorm_factor;
            let c = no[i].estimate;
            for (u, v) in [(a, b), (a, c), (b, c)] {
                let scale = u.abs().max(v.abs());
                discrepancies.push(if scale == 0.0 { 0.0 } else { (u - v).abs() / scale });
            }
        }
        let med_disc = median(&discrepancies);
        let seed_ok = med_rel <= 0.30 && med_disc <= 0.15;
        all_ok &= seed_ok;
        details.push_str(&format!(
            " seed {seed}: rel {med_rel:.3}, disc {med_disc:.3};"
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 60.0;
    println!(
        "criterion 3 (uniform box agreement):{details} {} ({elapsed:.1}s)",
        status(all_ok)
    );
    assert!(all_ok, "{details} runtime {elapsed:.1}s");
}

/// Criterion 4: Gaussian density, f with lap f = 0, n = 2500, h = 1.2,
/// lambda = 0: the random-walk estimate correlates with the advection-only
/// limit (Pearson r >= 0.9) at median relative error <= 0.35, per seed.
#[test]
fn acceptance_4_gaussian_anisotropy() {
    let start = Instant::now();
    let mut config = ExperimentConfig {
        model: "gauss2".into(),
        kernel: "cubic_taper".into(),
        function: "paper_affine".into(),
        lambdas: vec![0.0],
        kinds: vec![LaplacianKind::RandomWalk],
        ns: vec![2500],
        bandwidth: Bandwidth::Explicit(vec![1.2]),
        eval_points: EvalPoints::ModelGrid,
        boundary_margin_factor: 0.0,
        seeds: vec![],
    };
    // a Gaussian sample occasionally has an outlier beyond the kernel range
    // of every other point, which fails the build by contract; take the
    // first three seeds whose samples connect
    for seed in 1..=10u64 {
        let mut probe = config.clone();
        probe.seeds = vec![seed];
        let rep = run_convergence_with_threads(&probe, None).unwrap();
        if rep.failures.is_empty() {
            config.seeds.push(seed);
            if config.seeds.len() == 3 {
                break;
            }
        }
    }
    assert_eq!(config.seeds.len(), 3, "no three connected samples in seeds 1..=10");
    let report = run_convergence_with_threads(&config, None).unwrap();
    assert!(report.failures.is_empty());

    // the limit column is -(c2/2c1)(-2 sum x_i): lap f = 0 leaves only the
    // density advection
    let mut all_ok = true;
    let mut details = String::new();
    for &seed in &config.seeds {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.seed == seed).collect();
        assert_eq!(rows.len(), 25);
        let ests: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
        let lims: Vec<f64> = rows.iter().map(|r| r.limit).collect();
        let r = pearson(&ests, &lims);
        let rels: Vec<f64> = rows.iter().map(|r| r.rel_err).collect();
        let med = median(&rels);
        let seed_ok = r >= 0.9 && med <= 0.35;
        all_ok &= seed_ok;
        details.push_str(&format!(" seed {seed}: pearson {r:.4}, rel {med:.3};"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 4 (gaussian anisotropy):{details} {} ({elapsed:.1}s)",
        status(all_ok)
    );
    assert!(all_ok, "{details}");
}

/// Criterion 5: on the sphere with the cluster density, lambda = 1 removes
/// the density from the limit (median relative error <= 0.35 against
/// (c2/c1) cos theta), and switching lambda from 0 to 2 moves the estimate
/// at theta = pi/4 in the direction the advection term predicts.
#[test]
fn acceptance_5_lambda_control_on_sphere() {
    let start = Instant::now();
    let config = ExperimentConfig {
        model: "sphere_cluster".into(),
        kernel: "cubic_taper".into(),
        function: "sphere_costheta".into(),
        lambdas: vec![0.0, 1.0, 2.0],
        kinds: vec![LaplacianKind::RandomWalk],
        ns: vec![2500],
        bandwidth: Bandwidth::Explicit(vec![0.6]),
        eval_points: EvalPoints::ModelGrid,
        boundary_margin_factor: 2.0,
        seeds: vec![1, 2, 3],
    };
    let report = run_convergence_with_threads(&config, None).unwrap();
    assert!(report.failures.is_empty());

    // sanity: the lambda = 1 limit column is the density-free value
    let kernel = KernelProfile::cubic_taper();
    let mo = kernel.moments(2).unwrap();
    let sphere = SphereCluster::new();
    let grid = sphere.eval_grid();
    for row in report.rows.iter().filter(|r| r.lambda == 1.0 && r.seed == 1) {
        let expect = mo.c2 / mo.c1 * grid[row.point_id][2];
        assert!(
            (row.limit - expect).abs() <= 1e-6 * (1.0 + expect.abs()),
            "lambda=1 limit {} vs (c2/c1) cos theta {expect}",
            row.limit
        );
    }

    // median relative error of the lambda = 1 estimate, pooled over the
    // replicate seeds of the single configured experiment
    let rels: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.lambda == 1.0)
        .map(|r| r.rel_err)
        .collect();
    assert_eq!(rels.len(), 24 * config.seeds.len());
    let med = median(&rels);

    // the advection term 6 s sin^2(t) cos(t) / (1 + 3 cos^2 t) is positive
    // at t = pi/4 and enters the limit with factor -s, so the estimate must
    // increase when lambda goes from 0 (s = 2) to 2 (s = -2); checked per
    // seed on the theta = pi/4 ring (point ids 0..8)
    let mut all_deltas_positive = true;
    let mut details = String::new();
    for &seed in &config.seeds {
        let at = |lambda: f64, pid: usize| -> f64 {
            report
                .rows
                .iter()
                .find(|r| r.seed == seed && r.lambda == lambda && r.point_id == pid)
                .unwrap()
                .estimate
        };
        let deltas: Vec<f64> = (0..8).map(|pid| at(2.0, pid) - at(0.0, pid)).collect();
        let mean_delta = mean(&deltas);
        all_deltas_positive &= mean_delta > 0.0;
        details.push_str(&format!(" seed {seed}: delta(l2-l0)@pi/4 {mean_delta:.3};"));
    }
    let ok = med <= 0.35 && all_deltas_positive;
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 5 (sphere lambda control): rel(l=1) {med:.3};{details} {} ({elapsed:.1}s)",
        status(ok)
    );
    assert!(ok, "median rel {med}, {details}");
}

/// Criterion 6: with the bandwidth schedule h(n) = 1.5 (ln n / n)^{1/6} on
/// the uniform box, the per-seed log-log slope of the median error over
/// n in {500, 2000, 8000} is negative for every one of 5 seeds and the
/// seed-mean slope lies in [-0.45, -0.04]. Runtime < 10 min.
#[test]
fn acceptance_6_rate_property() {
    let start = Instant::now();
    let config = ExperimentConfig {
        model: "box2_uniform".into(),
        kernel: "cubic_taper".into(),
        function: "paper_sine".into(),
        lambdas: vec![0.0],
        kinds: vec![LaplacianKind::RandomWalk],
        ns: vec![500, 2000, 8000],
        bandwidth: Bandwidth::Schedule { c: 1.5 },
        eval_points: EvalPoints::ModelGrid,
        boundary_margin_factor: 2.0,
        seeds: vec![1, 2, 3, 4, 5],
    };
    let report = run_convergence_with_threads(&config, None).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert_eq!(report.schedule_c, Some(1.5));

    let mut slopes = Vec::new();
    let mut monotone_seeds = 0;
    let mut details = String::new();
    for &seed in &config.seeds {
        let fit =
            estimate_rate_filtered(&report, 0.0, LaplacianKind::RandomWalk, Some(seed)).unwrap();
        slopes.push(fit.slope);
        details.push_str(&format!(" seed {seed}: slope {:.3};", fit.slope));

        let med_at = |n: usize| -> f64 {
            let errs: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| r.seed == seed && r.n == n)
                .map(|r| r.abs_err)
                .collect();
            median(&errs)
        };
        let m500 = med_at(500);
        let m2000 = med_at(2000);
        let m8000 = med_at(8000);
        if m500 >= m2000 && m2000 >= m8000 {
            monotone_seeds += 1;
        }
    }
    let mean_slope = mean(&slopes);
    let all_negative = slopes.iter().all(|&s| s < 0.0);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = all_negative && (-0.45..=-0.04).contains(&mean_slope) && elapsed < 600.0;
    println!(
        "criterion 6 (rate property):{details} mean slope {mean_slope:.3}, monotone {monotone_seeds}/5: {} ({elapsed:.1}s)",
        status(ok)
    );
    assert!(
        ok,
        "slopes {slopes:?}, mean {mean_slope}, elapsed {elapsed:.1}s"
    );
}

/// Criterion 7: on the unit sphere with the uniform density and f = 1, the
/// residual between the kernel-convolution quadrature and the two-term
/// expansion is required to shrink by a factor in [6, 10] when h is halved
/// from 0.2 to 0.1.
///
/// This cannot hold: on the unit 2-sphere the pushforward of the area
/// measure under the squared chordal distance is exactly the flat measure
/// (the cap of chordal radius c has area pi c^2), so the integral equals
/// c1 * p exactly for every bandwidth below the diameter and both residuals
/// sit at quadrature noise near 1e-16. The companion unit test pins the
/// exactness; this test records the criterion faithfully and is expected
/// to fail.
#[test]
fn acceptance_7_convolution_expansion_ratio() {
    let sphere = UniformSphere;
    let kernel = KernelProfile::cubic_taper();
    let f = |_: &[f64]| 1.0;
    let x = [0.0, 0.0, 1.0];
    let r1 = convolution_expansion(&sphere, &kernel, &f, &x, 0.2)
        .unwrap()
        .residual();
    let r2 = convolution_expansion(&sphere, &kernel, &f, &x, 0.1)
        .unwrap()
        .residual();
    let ratio = r1 / r2;
    let ok = (6.0..=10.0).contains(&ratio);
    println!(
        "criterion 7 (convolution residual ratio): {} (residuals {r1:.3e} -> {r2:.3e}, ratio {ratio:.2}; \
         the integral is exactly c1*p on the unit sphere, so both residuals are quadrature noise)",
        status(ok)
    );
    assert!(
        ok,
        "residual ratio {ratio} outside [6, 10]; residuals {r1:.3e}, {r2:.3e} are at \
         floating-point noise level because the spherical cap of chordal radius c has \
         area pi c^2, making the kernel integral exactly c1*p for every h < 2"
    );
}

/// Criterion 8: repeating the criterion-3 run with the same configuration
/// yields byte-identical CSV files regardless of the thread count.
#[test]
fn acceptance_8_determinism() {
    let config = uniform_box_config();
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (label, threads) in [("a", Some(1)), ("b", Some(4)), ("c", None)] {
        let report = run_convergence_with_threads(&config, threads).unwrap();
        let rows = dir.path().join(format!("rows_{label}.csv"));
        let agg = dir.path().join(format!("agg_{label}.csv"));
        let rates = dir.path().join(format!("rates_{label}.csv"));
        write_rows_csv(&rows, &report).unwrap();
        write_aggregates_csv(&agg, &report).unwrap();
        write_rates_csv(&rates, &report).unwrap();
        outputs.push((
            std::fs::read(rows).unwrap(),
            std::fs::read(agg).unwrap(),
            std::fs::read(rates).unwrap(),
        ));
    }
    let ok = outputs.windows(2).all(|w| w[0] == w[1]);
    println!("criterion 8 (byte-identical reruns across thread counts): {}", status(ok));
    assert!(ok, "outputs differ between runs");
}

/// Sanity companion to criteria 3-5: the oracle limit columns are what the
/// closed forms say on the uniform box (all three kinds proportional).
#[test]
fn acceptance_sanity_uniform_limits_share_shape() {
    let model = manifold_by_name("box2_uniform").unwrap();
    let kernel = KernelProfile::cubic_taper();
    let spec = LimitSpec::new(model.as_ref(), &kernel, 0.0).unwrap();
    let f = |x: &[f64]| laplace_limits::oracle::TestFunction::PaperSine.eval(x);
    let p = 1.0 / 36.0;
    let c1 = spec.moments.c1;
    for x in model.eval_grid() {
        let rw = spec.limit_rw(&f, &x).unwrap();
        let un = spec.limit_unnorm(&f, &x).unwrap();
        let no = spec.limit_norm(&f, &x).unwrap();
        assert!((un - c1 * p * rw).abs() <= 1e-9 * (1.0 + un.abs()));
        assert!((no - rw).abs() <= 1e-6 * (1.0 + no.abs()));
    }
}

/// Unit sphere with uniform density (only the density differs from the
/// cluster model).
#[derive(Debug, Clone, Default)]
struct UniformSphere;

impl Manifold for UniformSphere {
    fn name(&self) -> &'static str {
        "sphere_uniform"
    }
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn geometry(&self) -> laplace_limits::manifold::GeometryClass {
        laplace_limits::manifold::GeometryClass::Sphere { radius: 1.0 }
    }
    fn chart_count(&self) -> usize {
        2
    }
    fn embed(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        SphereCluster::new().embed(chart, u)
    }
    fn embed_jacobian(&self, chart: usize, u: &[f64]) -> Array2<f64> {
        SphereCluster::new().embed_jacobian(chart, u)
    }
    fn chart_contains(&self, chart: usize, u: &[f64]) -> bool {
        SphereCluster::new().chart_contains(chart, u)
    }
    fn chart_of(&self, x: &[f64]) -> laplace_limits::Result<laplace_limits::manifold::ChartPoint> {
        SphereCluster::new().chart_of(x)
    }
    fn density_ambient(&self, _x: &[f64]) -> laplace_limits::Result<f64> {
        Ok(1.0 / (4.0 * std::f64::consts::PI))
    }
    fn density_ambient_gradient(&self, _x: &[f64]) -> laplace_limits::Result<Vec<f64>> {
        Ok(vec![0.0, 0.0, 0.0])
    }
    fn sample(&self, n: usize, seed: u64) -> Array2<f64> {
        SphereCluster::new().sample(n, seed)
    }
    fn boundary_distance(&self, _x: &[f64]) -> Option<f64> {
        None
    }
    fn interior_test(&self, _x: &[f64], _margin: f64) -> bool {
        true
    }
    fn eval_grid(&self) -> Vec<Vec<f64>> {
        SphereCluster::new().eval_grid()
    }
}
