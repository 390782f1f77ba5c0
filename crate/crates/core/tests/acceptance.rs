// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion (with the
//! individual checks indented beneath it) and exits non-zero if any fail.
//!
//! Run with `cargo test -p hopcov-core --test acceptance`.

mod common;

use std::time::Instant;

use common::*;
use hopcov_core::dataset::load_tu_dataset;
use hopcov_core::fingerprint::fingerprint_dataset;
use hopcov_core::learn::{evaluate_protocol, train_forest};
use hopcov_core::spectral::{dominant_left_eigenvectors, left_residual};
use hopcov_core::stats::{friedman_test, nemenyi_cd, AccuracyTable, FriedmanResult};
use hopcov_core::walk::CategoricalEncoding;
use hopcov_core::{
    CdConvention, Dataset, FingerprintConfig, Graph, MergePolicy, ProtocolConfig, WalkModel,
};
use rand::Rng;

struct Check {
    ok: bool,
    line: String,
}

fn check(ok: bool, line: impl Into<String>) -> Check {
    Check {
        ok,
        line: line.into(),
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Check {
    check(
        (got - want).abs() <= tol,
        format!("{label}: {got:.6} (target {want} ± {tol})"),
    )
}

fn within_rel(label: &str, got: f64, want: f64, rel: f64) -> Check {
    check(
        ((got - want) / want).abs() <= rel,
        format!("{label}: {got:.6e} (target {want:e} ± {}%)", rel * 100.0),
    )
}

fn at_most(label: &str, got: f64, bound: f64) -> Check {
    check(
        got <= bound,
        format!("{label}: {got:.3e} (bound {bound:e})"),
    )
}

/// Synthetic dataset whose graphs jointly use exactly `k` node categories
/// (`k = 0` for unlabeled).
fn stand_in(k: usize, seed: u64) -> Dataset {
    let mut rng = rng(seed);
    let raw = (0..6)
        .map(|_| {
            let n = rng.random_range(k.max(6)..k.max(6) + 10);
            let mut e = erdos_renyi(n, 0.3, false, &mut rng);
            connect(n, &mut e, &mut rng);
            let labels = (k > 0).then(|| (0..n).map(|i| Some((i % k) as i64)).collect());
            (n, e, labels)
        })
        .collect();
    let classes = (0..6).map(|i| (i % 2).to_string()).collect();
    Dataset::from_raw("stand-in", raw, classes, MergePolicy::Sum).unwrap()
}

fn criterion_1() -> Vec<Check> {
    let rows: [(&str, usize, usize); 12] = [
        ("mutag", 7, 56),
        ("ptc", 19, 116),
        ("nci1", 22, 131),
        ("nci109", 19, 116),
        ("enzymes", 3, 36),
        ("proteins", 3, 36),
        ("collab", 0, 31),
        ("reddit-binary", 0, 31),
        ("reddit-multi-5k", 0, 31),
        ("reddit-multi-12k", 0, 31),
        ("imdb-binary", 0, 21),
        ("imdb-multi", 0, 21),
    ];
    let mut out = Vec::new();
    for (i, (name, k, want)) in rows.iter().enumerate() {
        let cfg = FingerprintConfig::preset(name).unwrap();
        let m = fingerprint_dataset(&stand_in(*k, i as u64), &cfg).unwrap();
        out.push(check(
            m.num_features() == *want && cfg.dimension(*k) == *want,
            format!(
                "{name} (k = {k}): {} features (target {want})",
                m.num_features()
            ),
        ));
    }
    if let Ok(d) = load_tu_dataset(&mutag_dir(), "MUTAG") {
        let m = fingerprint_dataset(&d, &FingerprintConfig::preset("mutag").unwrap()).unwrap();
        out.push(check(
            m.num_features() == 56,
            format!("MUTAG files: {} features (target 56)", m.num_features()),
        ));
    }
    out
}

fn ar(f: &FriedmanResult, name: &str) -> f64 {
    f.average_ranks[f.algorithms.iter().position(|a| a == name).unwrap()]
}

/// Ranks counted from the worst algorithm (`K + 1 − R`), sorted ascending and
/// paired with the algorithm names sorted from best to worst.
fn mirrored_pairing(f: &FriedmanResult) -> Vec<(String, f64)> {
    let k = f.algorithms.len() as f64;
    let mut order: Vec<usize> = (0..f.algorithms.len()).collect();
    order.sort_by(|&a, &b| f.average_ranks[a].total_cmp(&f.average_ranks[b]));
    let mut mirrored: Vec<f64> = f.average_ranks.iter().map(|r| k + 1.0 - r).collect();
    mirrored.sort_by(f64::total_cmp);
    order
        .iter()
        .map(|&j| f.algorithms[j].clone())
        .zip(mirrored)
        .collect()
}

fn criterion_2() -> Vec<Check> {
    let load = |name| {
        AccuracyTable::read_csv(&fixture(name))
            .unwrap()
            .complete_columns()
    };
    let chemo = load("chemo.csv");
    let social = load("social.csv");
    let fc = friedman_test(&chemo).unwrap();
    let fs = friedman_test(&social).unwrap();
    let ncs = nemenyi_cd(
        social.num_algorithms(),
        social.num_datasets(),
        0.05,
        CdConvention::Paper,
    )
    .unwrap();
    let ncc = nemenyi_cd(
        chemo.num_algorithms(),
        chemo.num_datasets(),
        0.05,
        CdConvention::Paper,
    )
    .unwrap();
    let mut out = vec![
        check(
            chemo.num_algorithms() == 11,
            format!("chemo complete algorithms: K = {}", chemo.num_algorithms()),
        ),
        check(
            social.num_algorithms() == 8,
            format!(
                "social complete algorithms: K = {}",
                social.num_algorithms()
            ),
        ),
        within("Q chemo", fc.q, 34.63, 0.05),
        within_rel("p chemo", fc.p_value, 0.000144, 0.10),
        within("Q social", fs.q, 24.66, 0.05),
        within_rel("p social", fs.p_value, 0.000869, 0.10),
        within("CD social (paper convention)", ncs.cd, 4.2863, 0.001),
        within("CD chemo (paper convention)", ncc.cd, 6.1633, 0.001),
        within("AR(MaF-RF, chemo)", ar(&fc, "MaF-RF"), 3.0, 0.01),
        within("AR(MaF-SVM, social)", ar(&fs, "MaF-SVM"), 1.333, 0.01),
        within("AR(GK, chemo)", ar(&fc, "GK"), 10.166, 0.01),
    ];
    for (label, f) in [("chemo", &fc), ("social", &fs)] {
        let ranks: Vec<String> = f
            .algorithms
            .iter()
            .zip(&f.average_ranks)
            .map(|(a, r)| format!("{a} {r:.3}"))
            .collect();
        out.push(check(
            true,
            format!("info: {label} ARs (rank 1 = best): {}", ranks.join(", ")),
        ));
        let mirrored: Vec<String> = mirrored_pairing(f)
            .iter()
            .map(|(a, r)| format!("{a} {r:.3}"))
            .collect();
        out.push(check(
            true,
            format!(
                "info: {label} ARs counted from the worst, sorted, paired best-first: {}",
                mirrored.join(", ")
            ),
        ));
    }
    out
}

fn criterion_3() -> Vec<Check> {
    let started = Instant::now();
    let d = match load_tu_dataset(&mutag_dir(), "MUTAG") {
        Ok(d) => d,
        Err(e) => return vec![check(false, format!("MUTAG files unavailable: {e}"))],
    };
    let s = d.summarize();
    let mut out = vec![
        check(
            s.num_graphs == 188,
            format!("graphs: {} (target 188)", s.num_graphs),
        ),
        within("mean nodes", s.mean_nodes, 17.93, 0.01),
        within("mean edges", s.mean_edges, 19.79, 0.2),
    ];
    let m = fingerprint_dataset(&d, &FingerprintConfig::preset("mutag").unwrap()).unwrap();
    let cfg = ProtocolConfig {
        trees_grid: vec![128, 256, 512],
        repeats: 10,
        folds: 10,
        split_fraction: 0.9,
        master_seed: 0,
    };
    let report = evaluate_protocol(&m.rows, &m.classes, &m.class_alphabet, &cfg).unwrap();
    out.push(check(
        report.mean_accuracy >= 0.80,
        format!(
            "mean accuracy: {:.4} ± {:.4} (target ≥ 0.80)",
            report.mean_accuracy, report.std_accuracy
        ),
    ));
    let secs = started.elapsed().as_secs_f64();
    out.push(check(
        secs < 300.0,
        format!("runtime: {secs:.1} s (bound 300 s)"),
    ));
    out
}

fn criterion_4() -> Vec<Check> {
    let mut rng = rng(2024);
    let (mut scalar, mut category, mut total, mut node_id) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for index in 0..200 {
        let g = mixed_graph(index, 12, 3, &mut rng);
        let dense = Dense::new(&g);
        let model = WalkModel::new(&g);
        let n = g.num_nodes();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..3.0)).collect();
        let h = CategoricalEncoding::from_graph(&g, 3).unwrap();
        for t in 0..=4 {
            let rho = dense.rho(t);
            scalar = scalar
                .max((model.scalar_assortativity(&v, t).unwrap().value - dense.quad(t, &v)).abs());
            let (per, sum) = model.categorical_assortativity(&h, t).unwrap();
            let mut dense_sum = 0.0;
            for (i, a) in per.iter().enumerate() {
                let want = dense.quad(t, &h.column(i));
                dense_sum += want;
                category = category.max((a.value - want).abs());
            }
            total = total.max((sum.value - dense_sum).abs());
            let trace: f64 = (0..n).map(|i| rho[(i, i)]).sum();
            node_id = node_id.max((model.node_id_assortativity(t).unwrap().value - trace).abs());
        }
    }
    vec![
        at_most("max |r(t,v) − dense|", scalar, 1e-10),
        at_most("max |r(t,h_i) − dense|", category, 1e-10),
        at_most("max |r(t,H) − dense|", total, 1e-10),
        at_most("max |r(t,I) − dense|", node_id, 1e-10),
    ]
}

fn criterion_5() -> Vec<Check> {
    let mut rng = rng(7);
    let mut zero: f64 = 0.0;
    for index in 0..200 {
        let g = mixed_graph(index, 30, 2, &mut rng);
        let model = WalkModel::new(&g);
        let pi2: f64 = model.pi().iter().map(|p| p * p).sum();
        zero = zero.max((model.node_id_assortativity(0).unwrap().value - (1.0 - pi2)).abs());
    }
    let mut complete_dev: f64 = 0.0;
    for n in 3..=8 {
        let g = complete(n);
        let model = WalkModel::new(&g);
        let nf = n as f64;
        for t in 0..=5 {
            let want = (nf - 1.0) / nf * (-1.0 / (nf - 1.0)).powi(t);
            complete_dev = complete_dev
                .max((model.node_id_assortativity(t as usize).unwrap().value - want).abs());
        }
    }
    let mut balanced: f64 = 0.0;
    for k in 2..=6 {
        let n = 5 * k;
        let g = Graph::from_edges(
            n,
            &regular(n, 4),
            Some((0..n).map(|i| Some(i % k)).collect()),
        )
        .unwrap();
        let h = CategoricalEncoding::from_graph(&g, k).unwrap();
        let (_, sum) = WalkModel::new(&g).categorical_assortativity(&h, 0).unwrap();
        balanced = balanced.max((sum.value - (1.0 - 1.0 / k as f64)).abs());
    }
    vec![
        at_most("max |r(0,I) − (1 − ‖π‖²)|", zero, 1e-12),
        at_most(
            "max |r(t,I) − closed form| on K3..K8, t ≤ 5",
            complete_dev,
            1e-12,
        ),
        at_most("max |r(0,H) − (1 − 1/k)| balanced", balanced, 1e-12),
    ]
}

fn criterion_6() -> Vec<Check> {
    let mut rng = rng(99);
    let mut modularity_dev: f64 = 0.0;
    for trial in 0..50 {
        let n = rng.random_range(5..40);
        let g = Graph::from_edges(n, &erdos_renyi(n, 0.3, trial % 2 == 0, &mut rng), None).unwrap();
        let k = rng.random_range(2..5);
        let part: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let h = CategoricalEncoding::new(part.iter().map(|&c| Some(c)).collect(), k).unwrap();
        let (_, sum) = WalkModel::new(&g).categorical_assortativity(&h, 1).unwrap();
        modularity_dev = modularity_dev.max((sum.value - modularity(&g, &part)).abs());
    }
    let mut rng = common::rng(5);
    let mut corr_dev: f64 = 0.0;
    let mut used = 0;
    while used < 50 {
        let n = rng.random_range(6..40);
        let g = random_connected(n, 0.15, false, &mut rng);
        let v: Vec<f64> = if used % 2 == 0 {
            g.degrees()
        } else {
            (0..n).map(|_| rng.random::<f64>()).collect()
        };
        let model = WalkModel::new(&g);
        let r0 = model.scalar_assortativity(&v, 0).unwrap().value;
        if r0 < 1e-12 {
            continue; // constant attribute (regular graph); correlation undefined
        }
        let ratio = model.scalar_assortativity(&v, 1).unwrap().value / r0;
        corr_dev = corr_dev.max((ratio - edge_correlation(&g, &v)).abs());
        used += 1;
    }
    vec![
        at_most(
            "max |r(1,H) − modularity| (50 graphs)",
            modularity_dev,
            1e-10,
        ),
        at_most(
            "max |r(1,v)/r(0,v) − edge correlation| (50 graphs)",
            corr_dev,
            1e-8,
        ),
    ]
}

fn criterion_7() -> Vec<Check> {
    let mut worst_ratio: f64 = 0.0;
    let mut graphs: Vec<Graph> = load_tu_dataset(&mutag_dir(), "MUTAG")
        .map(|d| d.graphs)
        .unwrap_or_default();
    let mut rng = rng(17);
    for &n in &[500usize, 1000, 3000] {
        graphs.push(random_connected(n, 6.0 / n as f64, n == 1000, &mut rng));
    }
    for g in &graphs {
        let model = WalkModel::new(g);
        let basis = dominant_left_eigenvectors(&model, 3).unwrap();
        for (u, &l) in basis.left_eigenvectors.iter().zip(&basis.eigenvalues) {
            let r = left_residual(&model, u, l) / (1e-10 * g.num_nodes() as f64);
            worst_ratio = worst_ratio.max(r);
        }
    }
    let mut eig_dev: f64 = 0.0;
    let mut pi_dev: f64 = 0.0;
    let mut rng = common::rng(31);
    for index in 0..200 {
        let g = mixed_graph(index, 12, 2, &mut rng);
        let model = WalkModel::new(&g);
        let basis = dominant_left_eigenvectors(&model, 3.min(g.num_nodes())).unwrap();
        let dense = Dense::new(&g).eigenvalues();
        for (i, l) in basis.eigenvalues.iter().enumerate() {
            eig_dev = eig_dev.max((l - dense[i]).abs());
        }
        let norm = model.pi().iter().map(|p| p * p).sum::<f64>().sqrt();
        for (u, p) in basis.left_eigenvectors[0].iter().zip(model.pi()) {
            pi_dev = pi_dev.max((u - p / norm).abs());
        }
    }
    vec![
        at_most(
            &format!("max residual / (1e-10·N) over {} graphs", graphs.len()),
            worst_ratio,
            1.0,
        ),
        at_most("max |λ − dense λ| (N ≤ 12)", eig_dev, 1e-8),
        at_most("max |u₁ − π/‖π‖|", pi_dev, 1e-12),
    ]
}

fn criterion_8() -> Vec<Check> {
    let samples = 1_000_000;
    let mut inside = 0;
    for (c, (g, v, t)) in mc_cases().iter().enumerate() {
        let model = WalkModel::new(g);
        let exact = model.scalar_assortativity(v, *t).unwrap().value;
        let se = (product_variance(&Dense::new(g), v, *t) / samples as f64).sqrt();
        let est = model
            .mc_assortativity(v, *t, samples, c as u64)
            .unwrap()
            .value;
        if (est - exact).abs() <= 3.0 * se {
            inside += 1;
        }
    }
    let (g, v, t) = &mc_cases()[1];
    let slope = error_slope(g, v, *t, 32);
    vec![
        check(
            inside >= 19,
            format!("{inside}/20 estimates within 3 analytic SE (need ≥ 19)"),
        ),
        check(
            (-0.6..=-0.4).contains(&slope),
            format!("log-log error slope {slope:.3} (target [−0.6, −0.4])"),
        ),
    ]
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn criterion_9() -> Vec<Check> {
    let d = match load_tu_dataset(&mutag_dir(), "MUTAG") {
        Ok(d) => d,
        Err(_) => stand_in(7, 0),
    };
    let cfg = FingerprintConfig::preset("mutag").unwrap();
    let extract = |threads| with_threads(threads, || fingerprint_dataset(&d, &cfg).unwrap());
    let (m1, m4) = (extract(1), extract(4));
    let (csv1, csv4) = (m1.to_csv_string(), m4.to_csv_string());

    let train = |threads| {
        with_threads(threads, || {
            train_forest(&m1.rows, &m1.classes, 256, 7)
                .unwrap()
                .to_json()
                .unwrap()
        })
    };
    let protocol = ProtocolConfig {
        trees_grid: vec![32, 64],
        repeats: 3,
        folds: 5,
        split_fraction: 0.9,
        master_seed: 11,
    };
    let evaluate = |threads| {
        with_threads(threads, || {
            let r =
                evaluate_protocol(&m1.rows, &m1.classes, &m1.class_alphabet, &protocol).unwrap();
            serde_json::to_string(&r).unwrap()
        })
    };
    vec![
        check(
            csv1 == csv4,
            format!(
                "feature CSV identical at 1 and 4 threads ({} bytes)",
                csv1.len()
            ),
        ),
        check(
            train(1) == train(4),
            "forest JSON identical at 1 and 4 threads",
        ),
        check(
            evaluate(1) == evaluate(4),
            "evaluation report identical at 1 and 4 threads",
        ),
    ]
}

fn main() {
    type Criterion = (&'static str, fn() -> Vec<Check>);
    let criteria: [Criterion; 9] = [
        ("fingerprint dimensions per dataset config", criterion_1),
        (
            "rank statistics from the bundled accuracy tables",
            criterion_2,
        ),
        ("MUTAG ingestion and end-to-end accuracy", criterion_3),
        ("dense-oracle equivalence", criterion_4),
        ("closed forms", criterion_5),
        ("modularity and edge-correlation identities", criterion_6),
        ("spectral residuals and oracle", criterion_7),
        ("Monte Carlo consistency", criterion_8),
        ("thread-count determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let checks = run();
        let ok = checks.iter().all(|c| c.ok);
        println!(
            "{} criterion {}: {title} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            started.elapsed().as_secs_f64()
        );
        for c in &checks {
            let tag = if c.line.starts_with("info:") {
                "    "
            } else if c.ok {
                "  ok"
            } else {
                "  !!"
            };
            println!("    {tag} {}", c.line);
        }
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
