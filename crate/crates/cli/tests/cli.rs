use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use uwr_core::dataset::{load_image, save_image};
use uwr_core::imaging::{airlight, degrade, restore, RestorationParams};
use uwr_core::spectra::ChannelCoefficients;
use uwr_core::{BitDepth, LinearImage};

fn rows_csv(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn uwr<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_uwr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scene(w: usize, h: usize) -> LinearImage {
    LinearImage::from_fn(w, h, |x, y, c| {
        let v = 0.15 + 0.7 * (x as f64 / w as f64) * (0.5 + 0.5 * (y as f64 / h as f64));
        [v, 1.0 - v, 0.5 + 0.3 * (v - 0.5)][c]
    })
}

fn p_060() -> ChannelCoefficients {
    ChannelCoefficients::new(0.6, 0.3, 0.1).unwrap()
}

#[test]
fn coefficients_linear_beta_box_band() {
    let dir = tempfile::tempdir().unwrap();
    let sidecar = dir.path().join("p.json");
    let out = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_flat.csv").to_str().unwrap(),
        "--attenuation",
        fixture("beta_linear.csv").to_str().unwrap(),
        "--band",
        "600,700",
        "--out",
        sidecar.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    for c in ["r", "g", "b"] {
        assert!((v[c].as_f64().unwrap() - 0.6).abs() <= 1e-9, "{v}");
    }
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert_eq!(saved, v);
    assert_eq!(saved["band_nm"], serde_json::json!([600.0, 700.0]));

    let raw = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_flat.csv").to_str().unwrap(),
        "--attenuation",
        fixture("beta_linear.csv").to_str().unwrap(),
        "--band",
        "600,700",
        "--raw",
        "--out",
        dir.path().join("raw.json").to_str().unwrap(),
    ]);
    let v = stdout_json(&raw);
    let want = [("r", 60.0), ("g", 30.0), ("b", 15.0)];
    for (c, w) in want {
        assert!((v[c].as_f64().unwrap() - w).abs() <= 1e-9, "{v}");
    }
}

#[test]
fn coefficients_constant_beta() {
    let dir = tempfile::tempdir().unwrap();
    let out = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_synthetic.csv").to_str().unwrap(),
        "--attenuation",
        fixture("beta_constant.csv").to_str().unwrap(),
        "--out",
        dir.path().join("p.json").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    for c in ["r", "g", "b"] {
        assert!((v[c].as_f64().unwrap() - 0.1).abs() <= 1e-12);
    }
}

#[test]
fn synthetic_response_orders_channels() {
    let dir = tempfile::tempdir().unwrap();
    let out = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_synthetic.csv").to_str().unwrap(),
        "--attenuation",
        fixture("beta_linear.csv").to_str().unwrap(),
        "--out",
        dir.path().join("p.json").to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    let (r, g, b) = (
        v["r"].as_f64().unwrap(),
        v["g"].as_f64().unwrap(),
        v["b"].as_f64().unwrap(),
    );
    assert!(r > g && g > b, "{v}");
}

#[test]
fn missing_curve_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_curve.csv");
    let out = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_flat.csv").to_str().unwrap(),
        "--attenuation",
        missing.to_str().unwrap(),
        "--out",
        dir.path().join("p.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no_such_curve.csv"));
    assert!(!dir.path().join("p.json").exists());
}

#[test]
fn malformed_curve_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "wavelength_nm,value\n400,0.1\n500,abc\n").unwrap();
    let out = uwr([
        "coefficients",
        "--camera-response",
        fixture("response_flat.csv").to_str().unwrap(),
        "--attenuation",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("p.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("bad.csv") && err.contains("line 3"), "{err}");
}

#[test]
fn degrade_shifts_towards_blue_green() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reef.png");
    let img = scene(64, 48);
    save_image(&img, &input).unwrap();
    let out_dir = dir.path().join("out");
    let out = uwr([
        "degrade",
        input.to_str().unwrap(),
        "--p",
        "0.6,0.3,0.1",
        "--distance",
        "2",
        "--depth",
        "7.2",
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let degraded = load_image(out_dir.join("reef_degraded.png"), None).unwrap();
    let before = load_image(&input, None).unwrap();
    assert!(degraded.channel_mean(0) < before.channel_mean(0));
    assert!(degraded.channel_mean(0) < degraded.channel_mean(1));
    assert!(degraded.channel_mean(0) < degraded.channel_mean(2));

    let log = std::fs::read_to_string(out_dir.join("degraded_log.jsonl")).unwrap();
    let rec: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(rec["distance_m"], 2.0);
    assert_eq!(rec["depth_m"], 7.2);
}

#[test]
fn zero_distance_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.png");
    save_image(&scene(32, 24), &input).unwrap();
    let original = std::fs::read(&input).unwrap();
    for cmd in ["degrade", "restore"] {
        let out_dir = dir.path().join(cmd);
        let out = uwr([
            cmd,
            input.to_str().unwrap(),
            "--p",
            "0.6,0.3,0.1",
            "--distance",
            "0",
            "--depth",
            "5",
            "--no-range-map",
            "--no-rescale",
            "-o",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let suffix = if cmd == "degrade" {
            "degraded"
        } else {
            "restored"
        };
        let got = load_image(out_dir.join(format!("a_{suffix}.png")), None).unwrap();
        assert_eq!(got, load_image(&input, None).unwrap(), "{cmd}");
    }
    assert_eq!(std::fs::read(&input).unwrap(), original);
}

#[test]
fn airlight_is_fixed_point_of_degrade() {
    let dir = tempfile::tempdir().unwrap();
    let a = airlight(p_060(), 7.2).unwrap();
    let input = dir.path().join("flat.png");
    save_image(&LinearImage::filled(16, 16, a), &input).unwrap();
    let out_dir = dir.path().join("out");
    let out = uwr([
        "degrade",
        input.to_str().unwrap(),
        "--p",
        "0.6,0.3,0.1",
        "--depth",
        "7.2",
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = load_image(out_dir.join("flat_degraded.png"), None).unwrap();
    assert_eq!(got, load_image(&input, None).unwrap());
}

#[test]
fn restore_recovers_degraded_sixteen_bit_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let params = RestorationParams::literal(p_060(), 1.5, 4.0);
    let truth = scene(40, 30).with_bit_depth(BitDepth::Sixteen);
    let observed = dir.path().join("obs.png");
    save_image(&degrade(&truth, &params).unwrap(), &observed).unwrap();

    let out_dir = dir.path().join("out");
    let out = uwr([
        "restore",
        observed.to_str().unwrap(),
        "--p",
        "0.6,0.3,0.1",
        "--distance",
        "1.5",
        "--depth",
        "4",
        "--no-range-map",
        "--no-rescale",
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = load_image(out_dir.join("obs_restored.png"), None).unwrap();
    assert_eq!(got.bit_depth(), BitDepth::Sixteen);

    // Bit-identical to the library inversion of the stored observation.
    let stored = load_image(&observed, None).unwrap();
    let expected_path = dir.path().join("expected.png");
    save_image(&restore(&stored, &params).unwrap(), &expected_path).unwrap();
    assert_eq!(got, load_image(&expected_path, None).unwrap());

    // Within storage quantisation: half a step on the observation amplified by 1/t,
    // plus half a step on each of the two stored outputs.
    let t_min = (-0.6f64 * 1.5).exp();
    let tol = (0.5 / 65535.0) / t_min + 1.0 / 65535.0 + 1e-12;
    let truth_q = {
        let p = dir.path().join("truth.png");
        save_image(&truth, &p).unwrap();
        load_image(&p, None).unwrap()
    };
    for (a, b) in got.data().iter().zip(truth_q.data()) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    let log = std::fs::read_to_string(out_dir.join("restored_log.jsonl")).unwrap();
    let rec: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(rec["distance_m"], 1.5);
    assert_eq!(rec["t0_clamped_channels"], 0);
    let t = rec["transmission"].as_array().unwrap();
    assert!((t[0].as_f64().unwrap() - t_min).abs() < 1e-15);
}

#[test]
fn directory_batch_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    for i in 0..5 {
        let img = LinearImage::from_fn(24, 16, |x, y, c| {
            ((x + 3 * y + 7 * c + i * 5) % 23) as f64 / 22.0
        });
        save_image(&img, inputs.join(format!("img{i}.png"))).unwrap();
    }
    std::fs::write(inputs.join("notes.txt"), "ignored").unwrap();

    let run = |jobs: &str, name: &str| {
        let out_dir = dir.path().join(name);
        let out = uwr([
            "restore",
            inputs.to_str().unwrap(),
            "--p",
            "0.6,0.3,0.1",
            "--depth",
            "7.2",
            "--jobs",
            jobs,
            "-o",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        out_dir
    };
    let a = run("1", "a");
    let b = run("4", "b");
    for i in 0..5 {
        let name = format!("img{i}_restored.png");
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap()
        );
    }
    let pngs = std::fs::read_dir(&a)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "png")
        .count();
    assert_eq!(pngs, 5);
    let log_a = std::fs::read_to_string(a.join("restored_log.jsonl")).unwrap();
    let log_b = std::fs::read_to_string(b.join("restored_log.jsonl")).unwrap();
    assert_eq!(log_a.replace("/a/", "/x/"), log_b.replace("/b/", "/x/"));
    assert_eq!(log_a.lines().count(), 5);
}

#[test]
fn bad_file_fails_batch_but_others_complete() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    save_image(&scene(8, 8), inputs.join("good.png")).unwrap();
    std::fs::write(inputs.join("broken.png"), b"\x89PNG\r\n\x1a\nnot really").unwrap();
    let out_dir = dir.path().join("out");
    let out = uwr([
        "restore",
        inputs.to_str().unwrap(),
        "--p",
        "0.6,0.3,0.1",
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out_dir.join("good_restored.png").exists());
    assert!(!out_dir.join("broken_restored.png").exists());
    assert!(stderr(&out).contains("broken.png"));
    let log = std::fs::read_to_string(out_dir.join("restored_log.jsonl")).unwrap();
    assert!(log.lines().any(|l| l.contains("\"error\"")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("beta_linear.csv"), dir.path().join("beta.csv")).unwrap();
    std::fs::copy(fixture("response_flat.csv"), dir.path().join("qe.csv")).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "camera_response = \"qe.csv\"\nattenuation = \"beta.csv\"\nband_nm = [600, 700]\n\
         distance_m = 0.0\nuse_range_map = false\nrescale = false\noutput_dir = \"results\"\n",
    )
    .unwrap();
    let input = dir.path().join("a.png");
    save_image(&scene(16, 12), &input).unwrap();

    // Config alone: distance 0 gives the identity.
    let out = uwr([
        "restore",
        input.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let restored = dir.path().join("results/a_restored.png");
    assert_eq!(
        load_image(&restored, None).unwrap(),
        load_image(&input, None).unwrap()
    );

    // The flag wins over the config value.
    let out = uwr([
        "restore",
        input.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--distance",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rec: Value = serde_json::from_str(
        std::fs::read_to_string(dir.path().join("results/restored_log.jsonl"))
            .unwrap()
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(rec["distance_m"], 1.0);
    let t = rec["transmission"][0].as_f64().unwrap();
    assert!(
        (t - (-0.6f64).exp()).abs() < 1e-12,
        "coefficients from config curves: {rec}"
    );
}

#[test]
fn config_with_missing_path_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "attenuation = \"gone.csv\"\n").unwrap();
    let out = uwr(["coefficients", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gone.csv"));
}

#[test]
fn manifest_distances_apply_per_image() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    save_image(&scene(8, 8), inputs.join("near.png")).unwrap();
    save_image(&scene(8, 8), inputs.join("far.png")).unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"schema_version": 1, "sites": [
            {"site_id": 1, "low_quality_count": 2, "good_quality_count": 0, "reference_count": 0,
             "diver1_max_depth_m": 5.0, "diver2_max_depth_m": 5.0}],
            "images": [
              {"id": "near", "site": 1, "quality": "low", "path": "in/near.png", "distance_m": 1.0},
              {"id": "far", "site": 1, "quality": "low", "path": "in/far.png", "distance_m": 4.5}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = uwr([
        "restore",
        inputs.to_str().unwrap(),
        "--p",
        "0.6,0.3,0.1",
        "--manifest",
        manifest.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let log = std::fs::read_to_string(out_dir.join("restored_log.jsonl")).unwrap();
    let recs: Vec<Value> = log
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    // Inputs are processed in sorted order: far, near.
    assert_eq!(recs[0]["distance_m"], 4.5);
    assert_eq!(recs[1]["distance_m"], 1.0);
    assert_eq!(
        recs[0]["t0_clamped"],
        serde_json::json!([true, false, false])
    );
}

fn write_set(dir: &Path, names: &[&str], seed: usize) {
    std::fs::create_dir_all(dir).unwrap();
    for (i, n) in names.iter().enumerate() {
        let img = LinearImage::from_fn(32, 24, |x, y, c| {
            ((x * 7 + y * 3 + c * 11 + (i + seed) * 13) % 64) as f64 / 63.0
        });
        save_image(&img, dir.join(n)).unwrap();
    }
}

#[test]
fn evaluate_identical_sets() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["c.png", "a.png", "b.png"];
    write_set(&dir.path().join("pred"), &names, 0);
    write_set(&dir.path().join("ref"), &names, 0);
    let feats = dir.path().join("feat.csv");
    std::fs::write(
        &feats,
        rows_csv(
            &(0..20)
                .map(|i| (0..4).map(|j| ((i * 7 + j * 3) % 11) as f64).collect())
                .collect::<Vec<_>>(),
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("report");
    let out = uwr([
        "evaluate",
        dir.path().join("pred").to_str().unwrap(),
        dir.path().join("ref").to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--features-real",
        feats.to_str().unwrap(),
        "--features-generated",
        feats.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 3 + 1);
    assert!(lines[1].starts_with("a.png,0,inf,1,"));
    assert!(lines[2].starts_with("b.png,0,inf,1,"));
    assert!(lines[3].starts_with("c.png,0,inf,1,"));
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(json["summary"]["count"], 3);
    assert_eq!(json["summary"]["psnr_db"], "inf");
    assert!(json["summary"]["fid"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn evaluate_lists_unmatched_files() {
    let dir = tempfile::tempdir().unwrap();
    write_set(
        &dir.path().join("pred"),
        &["a_restored.png", "b_restored.png", "extra.png"],
        1,
    );
    write_set(
        &dir.path().join("ref"),
        &["a.png", "b.png", "lonely.png"],
        0,
    );
    let out_dir = dir.path().join("report");
    let out = uwr([
        "evaluate",
        dir.path().join("pred").to_str().unwrap(),
        dir.path().join("ref").to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--no-uiqm",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("lonely.png") && err.contains("extra.png"),
        "{err}"
    );
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 + 1);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "a.png");
    let (mse, psnr): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!(mse > 0.0 && (10.0 * (255.0f64.powi(2) / mse).log10() - psnr).abs() < 1e-9);
    assert_eq!(row[7], "", "uiqm skipped");
}

#[test]
fn nce_matches_library() {
    use uwr_core::losses::{patch_nce, write_stack, FeatureLayer, FeatureStack};
    let dir = tempfile::tempdir().unwrap();
    let stack = |offset: f64| {
        FeatureStack::new(vec![
            FeatureLayer::new(
                "rgb",
                4,
                3,
                (0..12)
                    .map(|i| ((i as f64 + offset) * 0.37).sin())
                    .collect(),
            )
            .unwrap(),
            FeatureLayer::new(
                "downsample1",
                3,
                5,
                (0..15)
                    .map(|i| ((i as f64 * 1.3 + offset) * 0.21).cos())
                    .collect(),
            )
            .unwrap(),
        ])
        .unwrap()
    };
    let (a, b) = (stack(0.0), stack(0.4));
    write_stack(dir.path().join("a.uwfs"), &a).unwrap();
    write_stack(dir.path().join("b.uwfs"), &b).unwrap();
    let out = uwr([
        "nce",
        "--input",
        dir.path().join("a.uwfs").to_str().unwrap(),
        "--output",
        dir.path().join("b.uwfs").to_str().unwrap(),
        "--tau",
        "0.07",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(
        v["patch_nce"].as_f64().unwrap(),
        patch_nce(&a, &b, 0.07).unwrap()
    );
    assert_eq!(v["pairs"], 1);
}

#[test]
fn fid_of_identical_and_shifted_features() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|i| {
            (0..3)
                .map(|j| ((i * 5 + j * 7) % 13) as f64 / 3.0)
                .collect()
        })
        .collect();
    let shifted: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v + 2.0).collect())
        .collect();
    std::fs::write(dir.path().join("r.csv"), rows_csv(&rows)).unwrap();
    std::fs::write(dir.path().join("g.csv"), rows_csv(&shifted)).unwrap();
    let r = dir.path().join("r.csv");
    let g = dir.path().join("g.csv");

    let same = stdout_json(&uwr(["fid", r.to_str().unwrap(), r.to_str().unwrap()]));
    assert!(same["fid"].as_f64().unwrap().abs() <= 1e-6);
    assert_eq!(same["dim"], 3);
    assert_eq!(same["real_count"], 30);

    let saved = dir.path().join("fid.json");
    let moved = stdout_json(&uwr([
        "fid",
        r.to_str().unwrap(),
        g.to_str().unwrap(),
        "--out",
        saved.to_str().unwrap(),
    ]));
    // Pure mean shift of 2 in 3 dimensions.
    assert!(
        (moved["fid"].as_f64().unwrap() - 12.0).abs() < 1e-8,
        "{moved}"
    );
    assert!(saved.exists());
}

#[test]
fn manifest_validate_and_split() {
    let table = core_fixture("hicrd_table1.json");
    let out = uwr(["manifest", "validate", table.to_str().unwrap(), "--hicrd"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["totals"]["low_quality"], 6003);
    assert_eq!(v["totals"]["good_quality"], 3673);
    assert_eq!(v["totals"]["reference"], 2000);

    let dir = tempfile::tempdir().unwrap();
    let split = dir.path().join("split.json");
    let out = uwr([
        "manifest",
        "split",
        table.to_str().unwrap(),
        "--seed",
        "0",
        "-o",
        split.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&split).unwrap()).unwrap();
    let shipped: Value = serde_json::from_str(
        &std::fs::read_to_string(core_fixture("hicrd_split_seed0.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(got, shipped);
    assert_eq!(got["paired_train"].as_array().unwrap().len(), 1700);
    assert_eq!(got["test"].as_array().unwrap().len(), 300);
}

#[test]
fn manifest_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut m: Value =
        serde_json::from_str(&std::fs::read_to_string(core_fixture("hicrd_table1.json")).unwrap())
            .unwrap();
    m["sites"][0]["low_quality_count"] = serde_json::json!(1);
    let edited = dir.path().join("edited.json");
    std::fs::write(&edited, m.to_string()).unwrap();
    assert!(uwr(["manifest", "validate", edited.to_str().unwrap()])
        .status
        .success());
    let out = uwr(["manifest", "validate", edited.to_str().unwrap(), "--hicrd"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("6003"));

    m["sites"][4]["reference_count"] = serde_json::json!(100);
    std::fs::write(&edited, m.to_string()).unwrap();
    let out = uwr([
        "manifest",
        "split",
        edited.to_str().unwrap(),
        "-o",
        dir.path().join("s.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("site 5"));

    let out = uwr([
        "manifest",
        "validate",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(uwr(["restore"]).status.code(), Some(2));
    assert_eq!(
        uwr(["restore", "x.png", "--resize", "big"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let out = uwr([
        "restore",
        dir.path().join("x.png").to_str().unwrap(),
        "--p",
        "1,1,1",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = uwr([
        "restore",
        dir.path().to_str().unwrap(),
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "no coefficients given");
}

#[test]
fn evaluate_full_test_set_size() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, reference) = (dir.path().join("pred"), dir.path().join("ref"));
    std::fs::create_dir_all(&pred).unwrap();
    std::fs::create_dir_all(&reference).unwrap();
    for i in 0..300 {
        let r = LinearImage::from_fn(16, 12, |x, y, c| {
            ((x + y * 2 + c * 5 + i) % 17) as f64 / 16.0
        });
        let p = LinearImage::from_fn(16, 12, |x, y, c| {
            (r.get(x, y, c) * 0.9 + 0.05 * ((x + i) % 2) as f64).min(1.0)
        });
        save_image(&r, reference.join(format!("{i:04}.png"))).unwrap();
        save_image(&p, pred.join(format!("{i:04}_restored.png"))).unwrap();
    }
    let out_dir = dir.path().join("report");
    let out = uwr([
        "evaluate",
        pred.to_str().unwrap(),
        reference.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--jobs",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 300 + 1);
    assert!(lines[1].starts_with("0000.png,") && lines[300].starts_with("0299.png,"));
    assert!(lines[301].starts_with("mean,"));
}
