//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/support/qp_oracle.rs"]
mod qp_oracle;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use bri_core::eval::{
    baseline1_accuracy, baseline2_featurize, cross_validate, featurize, BinarySvm, ClassifierKind,
    Granularity, Label, LabeledPoint, SmoConfig,
};
use bri_core::index::{
    complete_pool, cosine_similarity, ideal_country, impute, rank, rank_detailed, select_donors,
    CoverageWeight, Entity, ImputationConfig, IndicatorVector, Metric, WeightingScheme,
};
use bri_core::ingest::{normalize, parse_data, parse_schema};
use bri_core::synth::{generate, SynthConfig};
use bri_service::{router, AppState, DatasetSnapshot};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ent(name: &str, cells: &[Option<f64>]) -> Entity {
    Entity::new(name, IndicatorVector::new(cells.to_vec()).unwrap())
}

fn bri(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bri"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("bri binary runs")
}

fn worked_example() -> Outcome {
    let data = vec![
        ent("c0", &[Some(0.25), Some(0.30), None]),
        ent("c1", &[Some(0.17), Some(0.20), Some(0.20)]),
        ent("c2", &[Some(0.15), Some(0.18), Some(0.35)]),
        ent("c3", &[Some(0.28), Some(0.16), Some(0.30)]),
    ];
    let probe = data[0].values.zero_fill();
    let expected = [0.795, 0.556, 0.686];
    let mut sims = Vec::new();
    for (e, want) in data[1..].iter().zip(expected) {
        let s = cosine_similarity(&probe, &e.values.zero_fill()).map_err(|e| e.to_string())?;
        check((s - want).abs() <= 1e-3, format!("cos(c0,{}) = {s}, want {want}", e.name))?;
        sims.push(s);
    }
    let pool = complete_pool(&data);
    let mut donors = select_donors(&data[0].values, &pool, 2, Metric::Cosine).map_err(|e| e.to_string())?;
    donors.sort_unstable();
    check(donors == ["c1", "c3"], format!("donors {donors:?}"))?;

    let cfg = ImputationConfig::new(2, Metric::Cosine).unwrap();
    let imputed = impute(&data, &cfg).map_err(|e| e.to_string())?;
    check(
        imputed.entities[0].values == [0.25, 0.30, 0.25],
        format!("imputed {:?}", imputed.entities[0].values),
    )?;

    let mut times: Vec<Duration> = (0..201)
        .map(|_| {
            let t = Instant::now();
            let out = impute(&data, &cfg).unwrap();
            std::hint::black_box(out);
            t.elapsed()
        })
        .collect();
    times.sort_unstable();
    let median = times[times.len() / 2];
    check(median < Duration::from_millis(1), format!("median runtime {median:?}"))?;
    Ok(format!(
        "sims {:.3}/{:.3}/{:.3}, donors {{c1,c3}}, imputed [0.25,0.30,0.25], median {median:?}",
        sims[0], sims[1], sims[2]
    ))
}

fn ideal_vector() -> Outcome {
    let rows = [
        IndicatorVector::complete(&[0.52, 0.63, 0.19]).unwrap(),
        IndicatorVector::complete(&[0.71, 0.25, 0.80]).unwrap(),
    ];
    let ideal = ideal_country(&rows).map_err(|e| e.to_string())?;
    check(ideal == [0.71, 0.63, 0.80], format!("{ideal:?}"))?;
    Ok(format!("{ideal:?}"))
}

fn labeled(high: usize, mid: usize, low: usize) -> Vec<LabeledPoint> {
    let mut out = Vec::new();
    for (label, n) in [(Label::High, high), (Label::Mid, mid), (Label::Low, low)] {
        for i in 0..n {
            out.push(LabeledPoint {
                name: format!("{label}{i}"),
                features: [0.0, 0.0],
                label,
            });
        }
    }
    out
}

fn baseline1_parity() -> Outcome {
    let pts = labeled(45, 55, 90);
    let three = baseline1_accuracy(&pts, Granularity::ThreeClass).map_err(|e| e.to_string())?;
    let two = baseline1_accuracy(&Granularity::TwoClass.filter(&pts), Granularity::TwoClass)
        .map_err(|e| e.to_string())?;
    let (a, b) = (format!("{:.1}", three * 100.0), format!("{:.1}", two * 100.0));
    check(a == "47.4" && b == "66.7", format!("{a}% / {b}%"))?;
    Ok(format!("{a}% (3-class) / {b}% (2-class)"))
}

fn sigmoid_properties() -> Outcome {
    let cov = |g: f64| CoverageWeight { g, n_missing: 0 };
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let gamma = i as f64 / 10.0;
        let scheme = WeightingScheme::sigmoid(gamma).map_err(|e| e.to_string())?;
        let centre = bri_core::index::weight(cov(gamma), scheme);
        worst = worst.max((centre - 0.5).abs());
        check((centre - 0.5).abs() <= 1e-12, format!("weight({gamma}) = {centre}"))?;
        let mut prev = f64::NEG_INFINITY;
        for j in 0..1000 {
            let g = j as f64 / 999.0;
            let w = scheme.apply(g);
            check(w >= prev, format!("not monotone at gamma {gamma}, g {g}"))?;
            check((0.0..=1.0).contains(&w), format!("weight {w} out of range"))?;
            prev = w;
        }
        check(
            scheme.apply(0.0) == 0.0 && scheme.apply(1.0) == 1.0,
            format!("limits at gamma {gamma}: {} {}", scheme.apply(0.0), scheme.apply(1.0)),
        )?;
    }
    Ok(format!("max |w(γ)-0.5| = {worst:.1e}; monotone on 1000-point grid; w(0)=0, w(1)=1"))
}

fn smo_correctness() -> Outcome {
    let cfg = SmoConfig {
        normalize: false,
        ..SmoConfig::default()
    };
    let mut worst_kkt = 0.0f64;
    let sets = qp_oracle::hand_sets();
    for set in &sets {
        let rows: Vec<&[f64]> = set.x.iter().map(Vec::as_slice).collect();
        let svm = BinarySvm::train(&rows, &set.y, &cfg).map_err(|e| e.to_string())?;
        let oracle = qp_oracle::solve_dual(&set.x, &set.y, cfg.c);
        for x in &set.x {
            let (a, b) = (svm.decision(x), oracle.decision(x));
            check(
                (a >= 0.0) == (b >= 0.0),
                format!("{}: decision {a} vs oracle {b} at {x:?}", set.name),
            )?;
        }
        check(
            svm.objective_trace().windows(2).all(|w| w[1] >= w[0] - 1e-12),
            format!("{}: dual objective decreased", set.name),
        )?;
        check(
            svm.max_kkt_violation() <= cfg.tol,
            format!("{}: KKT residual {}", set.name, svm.max_kkt_violation()),
        )?;
        check(
            (svm.dual_objective() - oracle.objective).abs() <= 1e-3,
            format!("{}: objective {} vs {}", set.name, svm.dual_objective(), oracle.objective),
        )?;
        worst_kkt = worst_kkt.max(svm.max_kkt_violation());
    }
    Ok(format!(
        "{} sets agree with dual-QP oracle; objective monotone; max KKT residual {worst_kkt:.1e}",
        sets.len()
    ))
}

fn synthetic_ordering() -> Outcome {
    const SEEDS: u64 = 20;
    let start = Instant::now();
    let icfg = ImputationConfig::default();
    let schemes = [WeightingScheme::Linear, WeightingScheme::sigmoid(0.7).unwrap()];
    let kinds = [ClassifierKind::NaiveBayes, ClassifierKind::svm()];
    let grans = [Granularity::ThreeClass, Granularity::TwoClass];
    // (classifier, granularity, features) -> summed accuracy
    let mut acc: HashMap<(usize, usize, usize), f64> = HashMap::new();
    let mut b1: HashMap<usize, f64> = HashMap::new();
    for seed in 0..SEEDS {
        let (raw, labels) = generate(&SynthConfig::default().with_seed(seed)).map_err(|e| e.to_string())?;
        let entities = normalize(&raw);
        let mut sets = vec![baseline2_featurize(&entities, &labels, &icfg).map_err(|e| e.to_string())?];
        for s in schemes {
            sets.push(featurize(&entities, &labels, s, &icfg).map_err(|e| e.to_string())?);
        }
        for (ki, kind) in kinds.iter().enumerate() {
            for (gi, g) in grans.iter().enumerate() {
                for (fi, points) in sets.iter().enumerate() {
                    let r = cross_validate(points, kind, 10, *g, seed).map_err(|e| e.to_string())?;
                    *acc.entry((ki, gi, fi)).or_default() += r.mean_accuracy / SEEDS as f64;
                    if ki == 0 && fi == 0 {
                        *b1.entry(gi).or_default() += r.baseline1_accuracy / SEEDS as f64;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();

    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        for (gi, g) in grans.iter().enumerate() {
            let base1 = b1[&gi];
            let base2 = acc[&(ki, gi, 0)];
            if base2 <= base1 {
                failures.push(format!("{kind} {}: B2 {base2:.3} <= B1 {base1:.3}", g.name()));
            }
            for (si, s) in schemes.iter().enumerate() {
                let p = acc[&(ki, gi, si + 1)];
                summary.push(format!("{kind}/{}/{}: P {p:.3} B2 {base2:.3} B1 {base1:.3}", s.name(), g.name()));
                if p <= base2 {
                    failures.push(format!("{kind} {} {}: proposed {p:.3} <= B2 {base2:.3}", s.name(), g.name()));
                }
            }
            if gi == 0 {
                for fi in 0..3 {
                    let (three, two) = (acc[&(ki, 0, fi)], acc[&(ki, 1, fi)]);
                    if two < three {
                        failures.push(format!("{kind} features#{fi}: 2-class {two:.3} < 3-class {three:.3}"));
                    }
                }
            }
        }
    }
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("runtime {elapsed:?} >= 60s"));
    }
    let detail = format!("{}; runtime {elapsed:.2?}", summary.join("; "));
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} | {detail}", failures.join("; ")))
    }
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, width: usize, p_missing: f64) -> Vec<Vec<Option<f64>>> {
    (0..n)
        .map(|_| {
            (0..width)
                .map(|_| (rng.random::<f64>() >= p_missing).then(|| rng.random::<f64>()))
                .collect()
        })
        .collect()
}

fn entities(rows: &[Vec<Option<f64>>]) -> Vec<Entity> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| Entity::new(format!("c{i:02}"), IndicatorVector::new(r.clone()).unwrap()))
        .collect()
}

fn ranking_invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let n = rng.random_range(1..=50);
        let width = rng.random_range(1..=16);
        let rows = random_dataset(&mut rng, n, width, 0.3);
        let factor = rng.random_range(0.01..=1.0);
        let k = rng.random_range(1..=10);
        let cfg = ImputationConfig::new(k, Metric::Cosine).unwrap();
        let scaled: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|c| c.map(|v| v * factor)).collect())
            .collect();
        let a = rank(&entities(&rows), WeightingScheme::Linear, &cfg).map_err(|e| e.to_string())?;
        let b = rank(&entities(&scaled), WeightingScheme::Linear, &cfg).map_err(|e| e.to_string())?;
        for (x, y) in a.iter().zip(&b) {
            check(
                (0.0..=1.0).contains(&x.score) && (0.0..=1.0).contains(&y.score),
                format!("case {case}: score out of range"),
            )?;
            if x.name != y.name {
                // a swap is only acceptable between scores equal to rounding
                let other = a.iter().find(|s| s.name == y.name).unwrap();
                check(
                    (other.score - x.score).abs() < 1e-12,
                    format!("case {case}: order changed at rank {} ({} vs {})", x.rank, x.name, y.name),
                )?;
            }
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    let mut outputs = Vec::new();
    for out in ["a", "b"] {
        let s = bri(&["synth", "--seed", "11", "--out", out], p);
        check(s.status.success(), "synth failed")?;
        let r = bri(
            &["rank", "--data", &format!("{out}/data.csv"), "--schema", &format!("{out}/schema.json"),
              "--scheme", "sigmoid", "--gamma", "0.6", "--neighbors", "7", "--emit-imputed"],
            p,
        );
        check(r.status.success(), "rank failed")?;
        let e = bri(
            &["evaluate", "--data", &format!("{out}/data.csv"), "--schema", &format!("{out}/schema.json"),
              "--labels", &format!("{out}/labels.csv"), "--seed", "5", "--out", &format!("{out}/report.json")],
            p,
        );
        check(e.status.success(), "evaluate failed")?;
        let mut bytes = std::fs::read(p.join(out).join("data.csv")).unwrap();
        bytes.extend(r.stdout);
        bytes.extend(std::fs::read(p.join(out).join("report.json")).unwrap());
        outputs.push(bytes);
    }
    check(outputs[0] == outputs[1], "CLI outputs differ between identical runs")?;
    Ok("100 random datasets: linear order unchanged under scaling, scores in [0,1]; synth/rank/evaluate byte-identical on rerun".into())
}

fn imputation_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..100 {
        let n = rng.random_range(1..=30);
        let width = rng.random_range(1..=10);
        let rows = random_dataset(&mut rng, n, width, 0.0);
        let k = rng.random_range(1..=12);
        let cfg = ImputationConfig::new(k, Metric::Cosine).unwrap();
        let out = impute(&entities(&rows), &cfg).map_err(|e| e.to_string())?;
        for (r, e) in rows.iter().zip(&out.entities) {
            let dense: Vec<f64> = r.iter().map(|c| c.unwrap()).collect();
            check(e.values == dense, format!("idempotence case {case}"))?;
        }
    }

    let mut all_missing_rows = 0;
    let mut all_missing_cols = 0;
    for case in 0..1000 {
        let n = rng.random_range(1..=40);
        let width = rng.random_range(1..=12);
        let p = rng.random_range(0.0..0.9);
        let mut rows = random_dataset(&mut rng, n, width, p);
        if case % 3 == 0 {
            let r = rng.random_range(0..n);
            rows[r].iter_mut().for_each(|c| *c = None);
        }
        if case % 4 == 0 {
            let c = rng.random_range(0..width);
            rows.iter_mut().for_each(|r| r[c] = None);
        }
        all_missing_rows += usize::from(rows.iter().any(|r| r.iter().all(Option::is_none)));
        all_missing_cols += usize::from((0..width).any(|c| rows.iter().all(|r| r[c].is_none())));
        let k = rng.random_range(1..=12);
        let metric = if rng.random::<bool>() { Metric::Cosine } else { Metric::Euclidean };
        let cfg = ImputationConfig::new(k, metric).unwrap();
        let scheme = if rng.random::<bool>() {
            WeightingScheme::Linear
        } else {
            WeightingScheme::sigmoid(rng.random_range(0.05..0.95)).unwrap()
        };
        let data = entities(&rows);
        let result = catch_unwind(AssertUnwindSafe(|| rank_detailed(&data, scheme, &cfg)));
        let ranking = match result {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => return Err(format!("fuzz case {case}: {e}")),
            Err(_) => return Err(format!("fuzz case {case}: panic")),
        };
        let pool: Vec<&Vec<Option<f64>>> = rows.iter().filter(|r| r.iter().all(Option::is_some)).collect();
        for (r, e) in rows.iter().zip(&ranking.imputed) {
            if r.iter().all(Option::is_none) {
                continue;
            }
            for c in 0..width {
                if r[c].is_some() {
                    continue;
                }
                let column: Vec<f64> = if pool.is_empty() {
                    rows.iter().filter_map(|x| x[c]).collect()
                } else {
                    pool.iter().map(|x| x[c].unwrap()).collect()
                };
                let v = e.values[c];
                if column.is_empty() {
                    check(v == 0.0, format!("fuzz case {case}: empty column imputed {v}"))?;
                } else {
                    let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    check(
                        v >= lo - 1e-12 && v <= hi + 1e-12,
                        format!("fuzz case {case}: imputed {v} outside [{lo}, {hi}]"),
                    )?;
                }
            }
        }
    }
    Ok(format!(
        "idempotent on 100 complete sets; 1000 fuzz cases total and mean-contained ({all_missing_rows} with all-missing rows, {all_missing_cols} with all-missing columns)"
    ))
}

fn table_shape() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    check(bri(&["synth", "--seed", "2", "--out", "s"], p).status.success(), "synth failed")?;
    let files = ["--data", "s/data.csv", "--schema", "s/schema.json", "--labels", "s/labels.csv"];
    let mut shapes = Vec::new();
    for (axis, symbol, header) in [
        ("gamma", "γ", vec!["0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"]),
        ("neighbors", "|T_c|", vec!["1", "2", "3", "5", "10", "15", "20", "30", "40"]),
    ] {
        let mut args = vec!["sweep", "--axis", axis];
        args.extend(files);
        let o = bri(&args, p);
        check(o.status.success(), format!("sweep {axis} failed: {}", String::from_utf8_lossy(&o.stderr)))?;
        let text = String::from_utf8(o.stdout).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        check(lines.len() == 4, format!("{axis}: {} lines", lines.len()))?;
        let cells = |l: &str| -> Vec<String> { l.split(" | ").map(|c| c.trim().to_string()).collect() };
        let head = cells(lines[0]);
        check(head[0] == symbol && head[1..] == header[..], format!("{axis} header {head:?}"))?;
        for (line, name) in [(lines[2], "3-class"), (lines[3], "2-class")] {
            let row = cells(line);
            check(row[0] == name && row.len() == 10, format!("{axis} row {row:?}"))?;
            check(
                row[1..].iter().all(|c| c.parse::<f64>().is_ok_and(|v| (0.0..=100.0).contains(&v))),
                format!("{axis} row {row:?}"),
            )?;
        }
        shapes.push(format!("{symbol}: 9 x {{3-class, 2-class}}"));
    }
    Ok(shapes.join("; "))
}

fn service_equivalence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    check(bri(&["synth", "--seed", "8", "--out", "s"], p).status.success(), "synth failed")?;
    let schema = parse_schema(&std::fs::read(p.join("s/schema.json")).unwrap()).map_err(|e| e.to_string())?;
    let raw = parse_data(&std::fs::read(p.join("s/data.csv")).unwrap(), &schema).map_err(|e| e.to_string())?;
    let state = AppState::new();
    state.install(DatasetSnapshot::new(raw));
    let runtime = tokio_runtime();

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..20 {
        let scheme = if rng.random::<bool>() { "linear" } else { "sigmoid" };
        let gamma = (rng.random_range(0.05..0.95f64) * 100.0).round() / 100.0;
        let neighbors = rng.random_range(1..=40usize);
        let metric = if rng.random::<bool>() { "cosine" } else { "euclidean" };
        let (g, k) = (gamma.to_string(), neighbors.to_string());

        let cli = bri(
            &["rank", "--data", "s/data.csv", "--schema", "s/schema.json", "--scheme", scheme,
              "--gamma", &g, "--neighbors", &k, "--metric", metric],
            p,
        );
        check(cli.status.success(), format!("case {case}: CLI failed"))?;
        let csv = String::from_utf8(cli.stdout).unwrap();
        let cli_rows: Vec<(String, f64)> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[1].to_string(), f[2].parse().unwrap())
            })
            .collect();

        let uri = format!("/ranking?scheme={scheme}&gamma={g}&neighbors={k}&metric={metric}");
        let body: serde_json::Value = runtime.block_on(async {
            let resp = router(state.clone())
                .oneshot(Request::get(&uri).body(Body::empty()).unwrap())
                .await
                .unwrap();
            let bytes = resp.into_body().collect().await.unwrap().to_bytes();
            serde_json::from_slice(&bytes).unwrap()
        });
        let api = body["ranking"].as_array().ok_or(format!("case {case}: {body}"))?;
        check(api.len() == cli_rows.len(), format!("case {case}: length differs"))?;
        for (row, (name, score)) in api.iter().zip(&cli_rows) {
            check(row["name"] == name.as_str(), format!("case {case}: order differs at {name}"))?;
            let s = row["score"].as_f64().unwrap();
            check((s - score).abs() <= 1e-12, format!("case {case}: {name} {s} vs {score}"))?;
        }
    }
    Ok("20 random (scheme, gamma, neighbors, metric) tuples: identical order, scores within 1e-12".into())
}

fn tokio_runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked-example fidelity", worked_example),
        ("ideal-vector fidelity", ideal_vector),
        ("baseline-1 parity", baseline1_parity),
        ("sigmoid properties", sigmoid_properties),
        ("SMO correctness", smo_correctness),
        ("synthetic accuracy ordering", synthetic_ordering),
        ("ranking invariances", ranking_invariances),
        ("imputation properties", imputation_properties),
        ("table-shape parity", table_shape),
        ("service/CLI equivalence", service_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
