//! End-to-end runs of the `inr` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn inr(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inr"))
        .args(args)
        .env("INR_OUTPUT_ROOT", root)
        .output()
        .expect("spawn inr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn small_image(dir: &Path, model: &str, width: &str) -> Vec<String> {
    [
        "train",
        "--task",
        "image",
        "--model",
        model,
        "--image-size",
        "16",
        "--rings",
        "4",
        "--width",
        width,
        "--epochs",
        "20",
        "--output-dir",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([dir.display().to_string()])
    .collect()
}

fn run_strings(args: &[String], root: &Path) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    inr(&refs, root)
}

#[test]
fn image_train_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = run_strings(&small_image(&dir, "fm-siren", "16"), tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in [
        "reconstruction.pgm",
        "metrics.csv",
        "loss.csv",
        "manifest.json",
        "config.toml",
        "checkpoint.json",
    ] {
        assert!(dir.join(name).exists(), "missing {name}");
    }
    let metrics = fs::read_to_string(dir.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("metric,value\n"));
    assert!(metrics.contains("\npsnr,") && metrics.contains("\nssim,"));
    let loss = fs::read_to_string(dir.join("loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 21);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let cfg = &manifest["config"];
    assert_eq!(cfg["omega0"], 30.0);
    assert_eq!(cfg["learning_rate"], 1e-3);
    assert_eq!(cfg["nyquist_factor"], 1.0);
    assert_eq!(cfg["seed"], 0);

    // Re-running the manifest's config reproduces the metrics.
    let again = tmp.path().join("again");
    let toml_path = tmp.path().join("again.toml");
    let text = fs::read_to_string(dir.join("config.toml")).unwrap();
    let text = text.replace(&dir.display().to_string(), &again.display().to_string());
    fs::write(&toml_path, text).unwrap();
    let out = inr(&["train", "--config", toml_path.to_str().unwrap()], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        fs::read(dir.join("metrics.csv")).unwrap(),
        fs::read(again.join("metrics.csv")).unwrap()
    );
    assert_eq!(
        fs::read(dir.join("checkpoint.json")).unwrap(),
        fs::read(again.join("checkpoint.json")).unwrap()
    );
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        "task = \"image\"\nimage_size = 16\nrings = 3\nwidth = 8\nepochs = 50\n",
    )
    .unwrap();
    let dir = tmp.path().join("r");
    let out = inr(
        &[
            "train",
            "--config",
            cfg.to_str().unwrap(),
            "--epochs",
            "2",
            "-o",
            dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(dir.join("loss.csv")).unwrap().lines().count(), 3);
}

#[test]
fn default_output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = inr(
        &[
            "train",
            "--task",
            "image",
            "--image-size",
            "16",
            "--width",
            "4",
            "--epochs",
            "1",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(tmp.path().join("image-fm-siren-seed0/metrics.csv").exists());
}

#[test]
fn audio_and_shape_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let audio = tmp.path().join("audio");
    let out = inr(
        &[
            "train",
            "--task",
            "audio",
            "--model",
            "fm-finer",
            "--duration",
            "0.05",
            "--width",
            "8",
            "--epochs",
            "3",
            "-o",
            audio.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(audio.join("reconstruction.wav").exists());
    let manifest = fs::read_to_string(audio.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"omega0\": 700.0"), "{manifest}");

    let shape = tmp.path().join("shape");
    let out = inr(
        &[
            "train",
            "--task",
            "shape",
            "--model",
            "siren",
            "--resolution",
            "8",
            "--width",
            "8",
            "--epochs",
            "2",
            "--batch-size",
            "100",
            "-o",
            shape.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read(shape.join("reconstruction.occ")).unwrap().len(), 12 + 512);
    assert!(fs::read_to_string(shape.join("metrics.csv"))
        .unwrap()
        .contains("\niou,"));
}

#[test]
fn failure_classes_have_distinct_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = inr(&["train", "--model", "mystery"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--model"), "{}", stderr(&out));

    let out = inr(&["train", "--nyquist-factor", "1.5"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--nyquist-factor"));

    let out = inr(
        &["train", "--task", "audio", "--tone", "2500:0.5", "--epochs", "1"],
        tmp.path(),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert_eq!(stderr(&out).lines().count(), 1);

    let out = inr(
        &["train", "--task", "image", "--input", "/nonexistent/x.pgm"],
        tmp.path(),
    );
    assert_eq!(code(&out), 3);

    let out = inr(
        &[
            "train",
            "--task",
            "image",
            "--model",
            "pe",
            "--image-size",
            "16",
            "--width",
            "8",
            "--embed-size",
            "8",
            "--learning-rate",
            "1e300",
            "--epochs",
            "5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn dst_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("dst");
    let out = inr(
        &[
            "dst",
            "-m",
            "256",
            "--image-size",
            "16",
            "--rings",
            "5",
            "-o",
            dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let metrics = fs::read_to_string(dir.join("metrics.csv")).unwrap();
    let psnr: f64 = metrics
        .lines()
        .find_map(|l| l.strip_prefix("psnr,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(psnr >= 90.0, "{psnr}");
    assert!(dir.join("reconstruction.pgm").exists());

    let out = inr(
        &["dst", "-m", "257", "--image-size", "16", "-o", dir.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn analyze_one_and_two_checkpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert_eq!(code(&run_strings(&small_image(&a, "siren", "16"), tmp.path())), 0);
    assert_eq!(code(&run_strings(&small_image(&b, "fm-siren", "16"), tmp.path())), 0);
    assert_eq!(code(&run_strings(&small_image(&c, "fm-siren", "8"), tmp.path())), 0);
    let ck = |d: &Path| d.join("checkpoint.json").display().to_string();

    let out_dir = tmp.path().join("one");
    let out = inr(
        &["analyze", &ck(&a), "--samples", "500", "-o", out_dir.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let cov = fs::read_to_string(out_dir.join("covariance-0.csv")).unwrap();
    assert_eq!(cov.lines().count(), 17);

    let out_dir = tmp.path().join("two");
    let out = inr(
        &["analyze", &ck(&a), &ck(&b), "-o", out_dir.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("redundancy reduction:"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("redundancy.json")).unwrap()).unwrap();
    assert_eq!(summary["n_samples"], 10_000);
    assert!(summary["reduction_percent"].is_number());

    let out = inr(&["analyze", &ck(&a), &ck(&c)], tmp.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn sweeps() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("w");
    let base = [
        "--task",
        "image",
        "--image-size",
        "16",
        "--epochs",
        "2",
        "-o",
        dir.to_str().unwrap(),
    ];
    let mut args = vec!["sweep", "--axis", "width", "--values", "8,16"];
    args.extend(base);
    let out = inr(&args, tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "value,final_loss,mse,quality,seconds,param_count");
    // 2→[K,K]→1 has 2K + K + K² + K + K + 1 parameters.
    for (row, k) in rows[1..].iter().zip([8usize, 16]) {
        assert!(row.ends_with(&format!(",{}", k * k + 5 * k + 1)), "{row}");
    }

    let dir = tmp.path().join("nf");
    let out = inr(
        &[
            "sweep",
            "--axis",
            "nyquist-factor",
            "--values",
            "0.3333333333333333,0.4,0.5,0.6666666666666666,1",
            "--model",
            "fm-finer",
            "--image-size",
            "16",
            "--width",
            "8",
            "--epochs",
            "2",
            "-o",
            dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(dir.join("sweep.csv")).unwrap().lines().count(), 6);

    let dir = tmp.path().join("d");
    let out = inr(
        &[
            "sweep",
            "--axis",
            "depth",
            "--values",
            "2,3",
            "--image-size",
            "16",
            "--width",
            "8",
            "--epochs",
            "2",
            "-o",
            dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.join("depth-3/loss.csv").exists());

    let out = inr(&["sweep", "--axis", "width", "--values", ""], tmp.path());
    assert_eq!(code(&out), 2);
    let out = inr(&["sweep", "--axis", "width", "--values", "2.5"], tmp.path());
    assert_eq!(code(&out), 2);
}
