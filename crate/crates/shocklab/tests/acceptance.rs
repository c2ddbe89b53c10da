//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 2 and 10 report more than they assert. The process fails when
//! an asserted check fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use shocklab::config::{render_seed, PipelineConfig};
use shocklab::pipeline::{run_pipeline, Inputs, Stage};
use shocklab_core::detector::{
    build_baseline_min_days, detect_panel, resolution_consistency, score_panel, DetectorParams,
};
use shocklab_core::laws::{
    displaced_curves, displaced_curves_at, ensemble_laws, fit_omori, shock_laws, EnsembleSettings,
    ResponseCurve, Side,
};
use shocklab_core::series::{exceedance_panel, HalfDayCalendar, NormalizedVolatility};
use shocklab_core::stats::log_edges;
use shocklab_core::synth::{
    empirical_pdf, generate_ensemble, render_grid, shuffle_intraday, BathLaw, GeneratorSpec,
    ProductivityLaw, RenderSpec, SyntheticPanel,
};

struct Outcome {
    id: u32,
    pass: bool,
    /// Whether a FAIL makes the suite fail.
    asserted: bool,
    detail: String,
    elapsed: Duration,
}

fn check(id: u32, limit: Option<Duration>, f: impl FnOnce() -> (bool, bool, String)) -> Outcome {
    let t0 = Instant::now();
    let (pass, asserted, mut detail) = f();
    let elapsed = t0.elapsed();
    let mut pass = pass;
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail.push_str(&format!("; over the {:.0} s limit", limit.as_secs_f64()));
        }
    }
    let o = Outcome {
        id,
        pass,
        asserted,
        detail,
        elapsed,
    };
    println!(
        "criterion {:>2}: {} ({:.2} s) {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.elapsed.as_secs_f64(),
        o.detail
    );
    o
}

fn curve(omega: f64, beta: f64, h: usize) -> ResponseCurve<f64> {
    let tau: Vec<usize> = (1..=h).collect();
    ResponseCurve {
        side: Side::After,
        cumulative: tau.iter().map(|&t| beta * (t as f64).powf(1.0 - omega)).collect(),
        tau,
        horizon: h,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn criterion_1() -> (bool, bool, String) {
    let mut cases: Vec<(f64, f64)> = [-0.3, 0.0, 0.09, 0.32, 0.7].iter().map(|&o| (o, 0.4)).collect();
    // Before and after pairs of a market shock, given as (omega, alpha).
    for (o, a) in [(0.09, 0.21), (0.32, 0.81)] {
        cases.push((o, a / (1.0 - o)));
    }
    let mut worst = 0.0f64;
    for (omega, beta) in cases {
        let f = fit_omori(&curve(omega, beta, 90)).expect("noiseless fit");
        worst = worst.max(rel(f.omega, omega)).max(rel(f.beta, beta));
    }
    (worst <= 1e-9, true, format!("worst relative error {worst:.2e} (limit 1e-9)"))
}

fn market_normalized(p: &SyntheticPanel) -> NormalizedVolatility<f64> {
    p.normalized::<f64>()
}

fn criterion_2() -> (bool, bool, String) {
    let grid: Vec<(f64, f64)> = [0.0, 0.25, 0.5]
        .iter()
        .flat_map(|&o| [0.2, 0.55, 0.9].map(|a| (o, a)))
        .collect();
    let results: Vec<(f64, f64, f64, f64, bool)> = grid
        .par_iter()
        .map(|&(omega, alpha)| {
            let spec = GeneratorSpec {
                omega_a: omega,
                alpha_a: alpha,
                background: 0.0,
                seed: 2,
                ..GeneratorSpec::default()
            };
            let p = generate_ensemble(&spec).expect("valid spec");
            let ex = exceedance_panel(&market_normalized(&p), spec.q).expect("panel");
            let (mut so, mut sa, mut n) = (0.0, 0.0, 0usize);
            for (day, truth) in ex.days.iter().zip(p.truth()) {
                let (_, after) = displaced_curves_at(&day.rate, truth.t_c, spec.horizon, 1).expect("window");
                if let Some(f) = fit_omori(&after) {
                    so += f.omega;
                    sa += f.alpha;
                    n += 1;
                }
            }
            let (mo, ma) = (so / n as f64, sa / n as f64);
            let ok = (mo - omega).abs() <= 0.05 && rel(ma, alpha) <= 0.10;
            (omega, alpha, mo, ma, ok)
        })
        .collect();
    // beta = alpha / (1 - omega) above 1 asks for a first-minute exceedance
    // probability above 1, which no panel can realise.
    let feasible = |o: f64, a: f64| a / (1.0 - o) <= 1.0;
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.4)
        .map(|r| format!("({}, {}) fitted ({:.3}, {:.3})", r.0, r.1, r.2, r.3))
        .collect();
    let feasible_ok = results.iter().all(|r| r.4 || !feasible(r.0, r.1));
    let detail = if failed.is_empty() {
        "all 9 grid points within omega +-0.05 and alpha +-10%".to_string()
    } else {
        format!(
            "{} of 9 grid points within tolerance; outside: {}; every point with beta <= 1 passes: {}",
            9 - failed.len(),
            failed.join(", "),
            feasible_ok
        )
    };
    (failed.is_empty(), !feasible_ok, detail)
}

fn default_panel() -> (GeneratorSpec, SyntheticPanel) {
    let spec = GeneratorSpec {
        seed: 3,
        ..GeneratorSpec::default()
    };
    let p = generate_ensemble(&spec).expect("valid spec");
    (spec, p)
}

fn criterion_3(spec: &GeneratorSpec, p: &SyntheticPanel) -> (bool, bool, String) {
    let ex = exceedance_panel(&market_normalized(p), spec.q).expect("panel");
    let scan = detect_panel(&ex, &DetectorParams::default()).expect("detect");
    let truth = p.truth();
    let mut within = 0;
    let mut n = 0;
    for (r, t) in scan.records.iter().zip(&truth) {
        if !r.accepted || r.x_peak.map_or(true, |x| x < 3.0) {
            continue;
        }
        n += 1;
        if r.t_c.expect("accepted").abs_diff(t.t_c) <= 2 {
            within += 1;
        }
    }
    let frac = within as f64 / n.max(1) as f64;
    (
        n > 0 && frac >= 0.95,
        true,
        format!("{within}/{n} accepted days with peak >= 3 within 2 minutes ({:.1}%, need 95%)", 100.0 * frac),
    )
}

fn criterion_4(spec: &GeneratorSpec, p: &SyntheticPanel) -> (bool, bool, String) {
    let render = RenderSpec {
        seed: render_seed(spec.seed),
        ..RenderSpec::default()
    };
    let grid = render_grid::<f64>(p, &render).expect("render");
    let (table, _) = resolution_consistency(&grid, &HalfDayCalendar::default(), spec.q, &[1, 5], &DetectorParams::default())
        .expect("resolution");
    match table.mean_abs_diff.get(&5) {
        Some(&d) => (d <= 10.0, true, format!("mean |T_c(5) - T_c(1)| = {d:.2} min over {} days (limit 10)", table.rows.len())),
        None => (false, true, "no day with a shock at both steps".into()),
    }
}

fn detected_laws(spec: &GeneratorSpec) -> shocklab_core::laws::EnsembleLaws<f64> {
    let p = generate_ensemble(spec).expect("valid spec");
    let nv = market_normalized(&p);
    let ex = exceedance_panel(&nv, spec.q).expect("panel");
    let scan = detect_panel(&ex, &DetectorParams::default()).expect("detect");
    let tables = shock_laws(&nv, &ex, &scan.records, spec.horizon).expect("laws");
    ensemble_laws(&tables, &[], &EnsembleSettings::default())
}

fn criterion_5() -> (bool, bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (pi, scale) in [(0.25, 2.0), (0.48, 1.0)] {
        let spec = GeneratorSpec {
            productivity: Some(ProductivityLaw { pi, scale }),
            seed: 5,
            ..GeneratorSpec::default()
        };
        let e = detected_laws(&spec);
        for (side, fit) in [("before", e.pi_b), ("after", e.pi_a)] {
            match fit {
                Some(f) => {
                    ok &= (f.pi - pi).abs() <= 0.05;
                    parts.push(format!("Pi {pi} {side}: {:.3} (n {})", f.pi, f.n_used));
                }
                None => {
                    ok = false;
                    parts.push(format!("Pi {pi} {side}: no fit"));
                }
            }
        }
    }
    (ok, true, parts.join("; "))
}

fn criterion_6() -> (bool, bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for ratio in [0.81, 0.90] {
        let spec = GeneratorSpec {
            bath: Some(BathLaw { ratio, noise: 0.1 }),
            seed: 6,
            ..GeneratorSpec::default()
        };
        let e = detected_laws(&spec);
        let b_true = -ratio.log10();
        for (side, fit) in [("before", e.bath_b), ("after", e.bath_a)] {
            match fit {
                Some(f) => {
                    ok &= (f.c_b - ratio).abs() <= 0.02 && (f.b - b_true).abs() <= 0.01;
                    parts.push(format!("C_B {ratio} {side}: {:.4}, B {:.4} vs {:.4}", f.c_b, f.b, b_true));
                }
                None => {
                    ok = false;
                    parts.push(format!("C_B {ratio} {side}: no fit"));
                }
            }
        }
    }
    (ok, true, parts.join("; "))
}

fn criterion_7(spec: &GeneratorSpec, p: &SyntheticPanel) -> (bool, bool, String) {
    let nv = market_normalized(p);
    let sh = shuffle_intraday(&nv, 7);
    let mut multiset_ok = true;
    for (a, b) in nv.panel.days.iter().zip(&sh.panel.days) {
        for (x, y) in a.series.iter().zip(&b.series) {
            let (Some(x), Some(y)) = (x, y) else { continue };
            let mut x = x.clone();
            let mut y = y.clone();
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            multiset_ok &= x.iter().zip(&y).all(|(u, v)| u.to_bits() == v.to_bits());
        }
    }
    let edges = log_edges(1e-3, 1e2, 20);
    let pdf = |nv: &NormalizedVolatility<f64>| {
        let ex = exceedance_panel(nv, spec.q).expect("panel");
        let b = build_baseline_min_days(&ex, 15, 30).expect("baseline");
        let scores: Vec<f64> = score_panel(&ex, &b)
            .expect("score")
            .iter()
            .flat_map(|s| s.score.iter().flatten().copied().collect::<Vec<_>>())
            .collect();
        empirical_pdf(&scores, &edges).expect("pdf")
    };
    let (px, psh) = (pdf(&nv), pdf(&sh));
    let mut bins = 0;
    let mut bad = 0;
    for i in 0..px.bins() {
        if px.edges[i] < 1.0 || (px.counts[i] == 0 && psh.counts[i] == 0) {
            continue;
        }
        bins += 1;
        if px.density[i] < 2.0 * psh.density[i] {
            bad += 1;
        }
    }
    (
        multiset_ok && bins > 0 && bad == 0,
        true,
        format!("multiset preserved: {multiset_ok}; {}/{bins} occupied bins above x = 1 with pdf_x >= 2 pdf_x_sh", bins - bad),
    )
}

fn criterion_8(spec: &GeneratorSpec, p: &SyntheticPanel) -> (bool, bool, String) {
    let nv = market_normalized(p);
    let ex = exceedance_panel(&nv, spec.q).expect("panel");
    let scan = detect_panel(&ex, &DetectorParams::default()).expect("detect");
    let tables = shock_laws(&nv, &ex, &scan.records, spec.horizon).expect("laws");
    let mut alpha_ok = true;
    let mut p_ok = true;
    let mut mono_ok = true;
    for r in &tables.market {
        for f in [r.fit_b, r.fit_a].into_iter().flatten() {
            alpha_ok &= (f.alpha - f.beta * (1.0 - f.omega)).abs() <= 1e-12 * f.alpha.abs().max(1.0);
        }
        let rec = scan.records.iter().find(|x| x.date == r.date).expect("record");
        let day = ex.days.iter().find(|d| d.date == r.date).expect("day");
        let (b, a) = displaced_curves(&day.rate, rec, spec.horizon).expect("curves");
        p_ok &= b.terminal() == r.p_b && a.terminal() == r.p_a;
        mono_ok &= [&b, &a].iter().all(|c| c.cumulative.windows(2).all(|w| w[1] >= w[0]));
    }
    let e = ensemble_laws(&tables, &[], &EnsembleSettings::default());
    let b_ok = [e.bath_b, e.bath_a].iter().flatten().all(|f| (f.b + f.c_b.log10()).abs() <= 1e-12);

    // Detrended per-minute mean of a rendered panel with an intraday U shape.
    let render = RenderSpec {
        seed: 8,
        u_pattern: 1.5,
        ..RenderSpec::default()
    };
    let small = generate_ensemble(&GeneratorSpec {
        days: 40,
        symbols: 20,
        seed: 8,
        ..GeneratorSpec::default()
    })
    .expect("valid spec");
    let grid = render_grid::<f64>(&small, &render).expect("render");
    let raw = shocklab_core::series::compute_volatility(&grid, 1).expect("volatility");
    let norm = shocklab_core::series::normalize_and_detrend(&raw, &HalfDayCalendar::default()).expect("normalize");
    let dev = norm
        .full_day_minute_means()
        .iter()
        .skip(1)
        .map(|m| (m - 1.0).abs())
        .fold(0.0, f64::max);
    let mean_ok = dev <= 1e-9;
    let pass = alpha_ok && p_ok && b_ok && mean_ok && mono_ok && !tables.market.is_empty();
    (
        pass,
        true,
        format!(
            "alpha = beta(1-omega): {alpha_ok}; P = N(h): {p_ok}; B = -log10 C_B: {b_ok}; detrended mean max |m-1| = {dev:.1e}; monotone curves: {mono_ok}; {} shocks",
            tables.market.len()
        ),
    )
}

fn criterion_9() -> (bool, bool, String) {
    let dir = tempfile::tempdir().expect("tempdir");
    let sim = shocklab::config::SimulationConfig {
        generator: GeneratorSpec {
            days: 40,
            symbols: 20,
            seed: 9,
            ..GeneratorSpec::default()
        },
        render: RenderSpec {
            seed: render_seed(9),
            ..RenderSpec::default()
        },
    };
    shocklab::simulate(&sim, &dir.path().join("sim")).expect("simulate");
    let inputs = Inputs {
        panel: dir.path().join("sim/panel.csv"),
        calendar: None,
    };
    let cfg = PipelineConfig::default();
    let mut manifests = BTreeMap::new();
    for threads in [1usize, 4] {
        let out: PathBuf = dir.path().join(format!("run{threads}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
        pool.install(|| run_pipeline(&cfg, &inputs, &out, Stage::Report)).expect("pipeline");
        manifests.insert(threads, std::fs::read(out.join("manifest.json")).expect("manifest"));
    }
    let same = manifests[&1] == manifests[&4];
    (same, true, format!("manifest byte-identical at 1 and 4 threads: {same}"))
}

fn criterion_10() -> (bool, bool, String) {
    let Some(panel) = std::env::var_os("SHOCKLAB_REAL_PANEL") else {
        return (
            false,
            false,
            "not evaluated, needs proprietary data; set SHOCKLAB_REAL_PANEL (and optionally SHOCKLAB_REAL_CALENDAR) to a real panel to compute it".into(),
        );
    };
    let dir = tempfile::tempdir().expect("tempdir");
    let inputs = Inputs {
        panel: panel.into(),
        calendar: std::env::var_os("SHOCKLAB_REAL_CALENDAR").map(Into::into),
    };
    match run_pipeline(&PipelineConfig::default(), &inputs, dir.path(), Stage::Report) {
        Ok(s) => {
            let e = s.ensemble.as_ref().expect("laws ran");
            let corr = |pair: &str| {
                e.correlations
                    .iter()
                    .find(|c| c.pair.label() == pair && c.horizon == 90)
                    .map(|c| c.correlation)
            };
            let deltas: Vec<String> = shocklab::table1::table1_rows(&s.records)
                .iter()
                .map(|r| format!("{} {:?}", r.reference.date, r.delta()))
                .collect();
            let frac_ok = s.fraction_above_xc.is_some_and(|f| (0.015..=0.045).contains(&f));
            let corr_ok = matches!((corr("alpha"), corr("omega")), (Some(a), Some(o)) if a > o);
            let mx_ok = e.m_x().is_some_and(|m| (m - 0.5).abs() <= 0.25);
            (
                frac_ok && corr_ok && mx_ok,
                false,
                format!(
                    "reported only; fraction above x_c {:?} (reference ~0.03); corr alpha {:?} vs omega {:?}; M_x {:?} (reference ~0.5); T_c - T: [{}]",
                    s.fraction_above_xc,
                    corr("alpha"),
                    corr("omega"),
                    e.m_x(),
                    deltas.join(", ")
                ),
            )
        }
        Err(err) => (false, false, format!("reported only; pipeline failed: {err}")),
    }
}

fn main() {
    // Only the harness flags cargo passes along; nothing to parse.
    let min = Duration::from_secs(60);
    let (spec, panel) = default_panel();
    let outcomes = vec![
        check(1, Some(Duration::from_secs(1)), criterion_1),
        check(2, Some(min), criterion_2),
        check(3, Some(min), || criterion_3(&spec, &panel)),
        check(4, None, || criterion_4(&spec, &panel)),
        check(5, None, criterion_5),
        check(6, None, criterion_6),
        check(7, None, || criterion_7(&spec, &panel)),
        check(8, None, || criterion_8(&spec, &panel)),
        check(9, None, criterion_9),
        check(10, None, criterion_10),
    ];
    let failed: Vec<u32> = outcomes.iter().filter(|o| o.asserted && !o.pass).map(|o| o.id).collect();
    if !failed.is_empty() {
        eprintln!("asserted criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
