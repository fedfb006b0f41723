//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::oracle::{self, Verdict};
use common::spectrum::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonoscape::analysis::*;
use sonoscape::mapping::{
    idle_params, map_frame, map_jingle, AlarmState, Ecology, NormalizedDeviation, Selection, Stimulus, StimulusParams,
};
use sonoscape::process_sim::{generate_trajectory, Criterion, CriterionFrame, CriterionRegistry, Level};
use sonoscape::records::{Action, Answer, SurveyResponse, SURVEY_STATEMENTS};
use sonoscape::synth::{bell_partials, mix_level, render_bell, render_jingle, AssetLibrary, GRAIN_LENGTH_S};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(started: Instant, budget: Duration) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure(took < budget, || format!("took {took:.1?}, budget {budget:?}"))?;
    Ok(took)
}

// Parameter bounds, written out here independently of the library constants.
const C5: f64 = 523.25;
const F6: f64 = 1396.91;
const A3_LOW: f64 = 155.56;
const A3_HIGH: f64 = 311.13;
const HZ_SLACK: f64 = 0.01;

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo - 1e-12 && x <= hi + 1e-12
}

fn check_bounds(p: &StimulusParams) -> Result<(), String> {
    let bad = || format!("{p:?}");
    let pitch = p.pitch_hz.unwrap_or(f64::NAN);
    let ok = match p.stimulus {
        Stimulus::Arpeggio => {
            in_range(pitch, C5 - HZ_SLACK, F6 + HZ_SLACK)
                && in_range(p.loudness, 0.02, 0.2)
                && in_range(p.interval_s.unwrap_or(f64::NAN), 0.5, 1.5)
        }
        Stimulus::Drone => in_range(pitch, A3_LOW - HZ_SLACK, A3_HIGH + HZ_SLACK) && in_range(p.loudness, 0.1, 0.4),
        Stimulus::Droplets => {
            in_range(p.playback_rate.unwrap_or(f64::NAN), 0.5, 2.0)
                && in_range(p.loudness, 0.1, 0.8)
                && in_range(p.interval_s.unwrap_or(f64::NAN), 0.5, 1.5)
        }
        Stimulus::Birds => {
            matches!(p.selection, Some(Selection::Misc | Selection::Ducks | Selection::Crows))
                && in_range(p.loudness, 0.0, 0.3)
        }
        Stimulus::Jingle => (pitch == 220.0 || pitch == 880.0) && [0.0, 0.1, 0.2].contains(&p.loudness),
        Stimulus::Water => {
            matches!(p.selection, Some(Selection::Silent | Selection::Crackling | Selection::Boiling))
                && [0.0, 0.2, 0.5].contains(&p.loudness)
        }
        Stimulus::Bell | Stimulus::Sizzle => in_range(p.loudness, 0.0, 1.0),
    };
    ensure(ok, bad)
}

fn mapping_bounds() -> Outcome {
    let started = Instant::now();
    let reg = CriterionRegistry::default();
    let bands = [Criterion::WpdWidth, Criterion::WpdHeight, Criterion::Ph, Criterion::Wpt];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for eco in Ecology::ALL {
        // Random frames, as one long level so the one-shot rule is exercised too.
        let mut state = AlarmState::default();
        let mut triggers = 0;
        for i in 0..10_000 {
            let mut values = [0.0; 5];
            for c in bands {
                let s = reg.get(c);
                values[c.index()] = s.nominal + rng.gen_range(-5.0..5.0) * s.tol_halfwidth;
            }
            values[Criterion::Pt.index()] = rng.gen_range(400.0..800.0);
            let frame = CriterionFrame { t: i as f64 * 0.1, values };
            for p in map_frame(&frame, eco, &mut state) {
                check_bounds(&p)?;
                triggers += p.trigger as usize;
            }
        }
        ensure(triggers <= 1, || format!("{eco}: {triggers} alarms in one level"))?;

        // In-tolerance frames: exactly the idle set.
        let idle = idle_params(eco);
        for i in 0..10_000 {
            let mut values = [0.0; 5];
            for c in bands {
                let s = reg.get(c);
                values[c.index()] = s.nominal + rng.gen_range(-1.0..=1.0) * s.tol_halfwidth;
            }
            values[Criterion::Pt.index()] = rng.gen_range(400.0..599.0);
            let frame = CriterionFrame { t: i as f64 * 0.1, values };
            let got = map_frame(&frame, eco, &mut AlarmState::default());
            ensure(got == idle, || format!("{eco}: idle frame {values:?} mapped to {got:?}"))?;
        }
    }
    let took = within_budget(started, Duration::from_secs(5))?;
    Ok(format!("3 x 20000 frames in {took:.2?}"))
}

fn spectral() -> Outcome {
    const SR: u32 = 44_100;
    let started = Instant::now();
    let slice = |s: &[f32], a: f64, b: f64| -> Vec<f32> {
        s[(a * SR as f64) as usize..((b * SR as f64) as usize).min(s.len())].to_vec()
    };

    let level = Level::idle("idle", 4);
    let frames = generate_trajectory(&level, 10.0).map_err(|e| e.to_string())?;
    let mix = mix_level(&level, &frames, Ecology::Mixed, 1, SR, &AssetLibrary::empty()).mix.samples;
    let drone = peak_hz(&slice(&mix, 0.0, 10.0), SR, 100.0, 400.0);
    ensure((drone - 220.0).abs() <= 2.0, || format!("drone peak {drone:.2} Hz"))?;
    let onsets = flux_onsets(&slice(&mix, 0.0, 12.0), SR, 480.0, 1000.0, 0.5);
    let gaps: Vec<f64> = onsets.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(gaps.len() >= 4 && gaps.iter().all(|g| (g - 1.5).abs() <= 0.05), || {
        format!("arpeggio onsets {onsets:?}")
    })?;
    // Major triad from the tonic, one note per onset.
    let triad = [C5, 659.26, 783.99];
    for (k, t) in onsets.iter().enumerate() {
        let f = peak_hz(&slice(&mix, t + 0.01, t + 0.45), SR, 480.0, 1000.0);
        let want = triad[k % 3];
        ensure((f - want).abs() <= 2.0, || format!("window at {t:.2}s peaks at {f:.2} Hz, want {want}"))?;
    }
    let tonic_windows = onsets.len().div_ceil(3);

    let grains = bursts(&render_jingle(&map_jingle(NormalizedDeviation::new(2.5)), 1.0, SR).samples, SR, 0.02);
    ensure(!grains.is_empty(), || "no jingle grains".into())?;
    for (_, len) in &grains {
        ensure((len - 0.06).abs() <= 0.006, || format!("grain of {len:.4} s"))?;
    }
    ensure(GRAIN_LENGTH_S == 0.06, || "grain constant".into())?;

    for seed in 0..8 {
        ensure(bell_partials(seed).iter().all(|&(f, _, _)| (220.0..=880.0).contains(&f)), || {
            format!("seed {seed}: partials {:?}", bell_partials(seed))
        })?;
        let found = peaks(&render_bell(seed, SR).samples, SR, 50.0, 4000.0, 0.1);
        ensure(found.iter().any(|f| (f - 440.0).abs() <= 2.0), || format!("seed {seed}: no 440 Hz in {found:?}"))?;
        ensure(found.iter().all(|f| (218.0..=882.0).contains(f)), || format!("seed {seed}: {found:?}"))?;
    }
    let took = within_budget(started, Duration::from_secs(30))?;
    Ok(format!(
        "drone {drone:.2} Hz, {} onsets 1.5 s apart ({tonic_windows} on C5), {} grains, 8 bells, {took:.1?}",
        onsets.len(),
        grains.len()
    ))
}

fn sdt() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..=1000 {
        let p = i as f64 / 1001.0;
        let ours = probit(p).map_err(|e| e.to_string())?;
        worst = worst.max((ours - oracle::probit(p)).abs());
    }
    ensure(worst < 1e-6, || format!("probit off by {worst:e}"))?;
    let d = d_prime(0.99, 0.01).map_err(|e| e.to_string())?;
    ensure((d - 4.6527).abs() <= 2e-3, || format!("d' = {d}"))?;
    let independent = oracle::probit(0.99) - oracle::probit(0.01);
    ensure((d - independent).abs() < 1e-6, || format!("d' {d} vs oracle {independent}"))?;
    ensure(clamp_rate(0.0) == 0.01 && clamp_rate(1.0) == 0.99, || "clamping".into())?;
    Ok(format!("max probit error {worst:.1e}, d' = {d:.4}"))
}

fn classification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut predictions, mut changes) = (0, 0);
    for n in 0..10_000 {
        let onset = rng.gen_bool(0.6).then(|| rng.gen_range(0..300) as f64 / 10.0);
        let k = rng.gen_range(0..7);
        let mut ts: Vec<f64> = (0..k).map(|_| rng.gen_range(0..=300) as f64 / 10.0).collect();
        ts.sort_by(f64::total_cmp);
        let toggles: Vec<(f64, Action)> = ts
            .into_iter()
            .map(|t| (t, if rng.gen_bool(0.6) { Action::Check } else { Action::Uncheck }))
            .collect();
        if onset.is_some_and(|o| toggles.iter().any(|&(t, a)| a == Action::Check && t < o)) {
            predictions += 1;
        }
        if toggles.iter().any(|&(_, a)| a == Action::Uncheck) {
            changes += 1;
        }
        let ours = classify_trial(onset, &toggles);
        let agree = match (ours.outcome, oracle::classify(onset, &toggles)) {
            (sonoscape::analysis::Outcome::Hit, Verdict::Hit(t)) => ours.annotation_time_s == Some(t),
            (sonoscape::analysis::Outcome::Miss, Verdict::Miss)
            | (sonoscape::analysis::Outcome::FalseAlarm, Verdict::FalseAlarm)
            | (sonoscape::analysis::Outcome::CorrectRejection, Verdict::CorrectRejection) => true,
            _ => false,
        };
        ensure(agree, || format!("history {n}: {onset:?} {toggles:?} scored {ours:?}"))?;
    }
    Ok(format!("10000/10000 agree ({predictions} predictions, {changes} with unchecks)"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sonoscape"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited {}: {}", out.status, String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_report(dir: &Path) -> Result<Report, String> {
    let text = std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn robot_end_to_end() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap();
    run_cli(&["robot", "--sessions", "4", "--profile", "perfect", "--delay", "0.5", "--report", out])?;
    let report = read_report(dir.path())?;
    let total: usize = report.sessions.values().sum();
    ensure(total == 4, || format!("{total} sessions scored"))?;
    let counts: Vec<usize> = report.sessions.values().copied().collect();
    let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
    ensure(spread <= 1, || format!("unbalanced: {:?}", report.sessions))?;
    for s in &report.sensitivity {
        ensure(s.h == 0.99 && s.fa == 0.01, || format!("{s:?}"))?;
    }
    let frame_ms = 1000.0 / sonoscape::process_sim::DEFAULT_FRAME_RATE;
    for t in &report.annotation_times {
        if let Some(m) = t.mean_ms {
            ensure((m - 500.0).abs() <= frame_ms, || format!("{t:?}"))?;
        }
    }
    let took = within_budget(started, Duration::from_secs(120))?;
    Ok(format!("sessions {:?}, {} stimuli at H=0.99/FA=0.01, {took:.1?}", report.sessions, report.sensitivity.len()))
}

fn sloppy_monotonicity() -> Outcome {
    let mut means = Vec::new();
    for pmiss in ["0", "0.3", "0.6"] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().to_str().unwrap();
        run_cli(&[
            "robot", "--sessions", "4", "--profile", "sloppy", "--pmiss", pmiss, "--pfa", "0", "--seed", "5",
            "--no-audio", "--report", out,
        ])?;
        let report = read_report(dir.path())?;
        let mut by_session: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for p in &report.participants {
            by_session.entry(&p.session_id).or_default().push(p.d_prime);
        }
        let per_session: Vec<f64> = by_session.values().map(|d| d.iter().sum::<f64>() / d.len() as f64).collect();
        ensure(per_session.len() == 4, || format!("pmiss {pmiss}: {} sessions", per_session.len()))?;
        means.push(per_session.iter().sum::<f64>() / 4.0);
    }
    ensure(means[0] > means[1] && means[1] > means[2], || format!("mean d' {means:.4?}"))?;
    Ok(format!("mean d' {means:.4?} for pmiss 0 / 0.3 / 0.6"))
}

fn anova() -> Outcome {
    let (a, b) = ([1.0, 2.0, 3.0, 4.0], [2.0, 3.0, 4.0, 5.0]);
    let r = anova_oneway(&[&a, &b]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..rng.gen_range(2..12)).map(|_| rng.gen_range(0.0..10.0)).collect();
        let y: Vec<f64> = (0..rng.gen_range(2..12)).map(|_| rng.gen_range(0.0..10.0)).collect();
        let f = anova_oneway(&[&x, &y]).map_err(|e| e.to_string())?.f;
        let t = oracle::student_t(&x, &y);
        worst = worst.max((f - t * t).abs() / f.max(1.0));
    }
    ensure(worst < 1e-9, || format!("F vs t^2 off by {worst:e}"))?;
    let detail = format!("F = {:.12}, p = {:.6}; F = t^2 on 100 instances (max rel error {worst:.1e})", r.f, r.p);
    ensure((r.f - 1.8).abs() <= 1e-9 && (r.p - 0.228).abs() <= 1e-3, || {
        format!("{detail}; expected F = 1.8, p = 0.228")
    })?;
    Ok(detail)
}

fn survey() -> Outcome {
    let resp = |a: Answer| SurveyResponse {
        age: None,
        gender: None,
        answers: vec![a; SURVEY_STATEMENTS.len()],
        comment: String::new(),
    };
    let (s, a) = (resp(Answer::Somewhat), resp(Answer::Agree));
    let rows = survey_aggregate(&[&s, &s, &s, &a]);
    let pct = agreement(&[Answer::Somewhat, Answer::Somewhat, Answer::Somewhat, Answer::Agree]);
    ensure(pct == Some(62.5), || format!("agreement {pct:?}"))?;
    ensure(format!("{:.2}", pct.unwrap()) == "62.50", || "formatting".into())?;
    let names: Vec<&str> = rows.iter().map(|r| r.statement.as_str()).collect();
    ensure(rows.len() == 7 && names == SURVEY_STATEMENTS, || format!("rows {names:?}"))?;
    ensure(rows.iter().all(|r| r.percent == Some(62.5)), || format!("{rows:?}"))?;
    Ok("62.50 over 7 rows in order".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("mapping bounds", mapping_bounds),
        ("spectral suite", spectral),
        ("sdt oracle", sdt),
        ("trial classification oracle", classification),
        ("end-to-end robot run", robot_end_to_end),
        ("sloppy robot monotonicity", sloppy_monotonicity),
        ("anova", anova),
        ("survey math", survey),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
