use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use twomask_core::dsp::{read_wav, write_wav, StftConfig, Waveform};
use twomask_core::resf::{band_energy_ratio, FfrBand};
use twomask_core::synth::{human_voice, robot_ego};

const SR: u32 = 16_000;

fn twomask(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twomask")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A directory holding `human.wav` and `ego.wav`.
fn sources(len: usize, seed: u64) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    write_wav(dir.path().join("human.wav"), &human_voice(len, SR, &mut rng)).unwrap();
    write_wav(dir.path().join("ego.wav"), &robot_ego(len, SR, &mut rng)).unwrap();
    dir
}

fn simulate_one(dir: &TempDir, snr: f64) -> (PathBuf, PathBuf) {
    std::fs::write(dir.path().join("m.csv"), format!("human,ego,snr_db\nhuman.wav,ego.wav,{snr}\n")).unwrap();
    let out = dir.path().join("sim");
    let o = twomask(&["simulate", "--manifest", s(&dir.path().join("m.csv")), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let prefix = format!("001_human_snr{snr}");
    (out.join(format!("{prefix}.distortion.wav")), out.join(format!("{prefix}.target.wav")))
}

fn files_with_suffix(dir: &Path, suffix: &str) -> usize {
    std::fs::read_dir(dir)
        .map(|it| it.filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(suffix)).count())
        .unwrap_or(0)
}

#[test]
fn simulate_empty_manifest_warns_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "human,ego,snr_db\n").unwrap();
    let out = dir.path().join("out");
    let o = twomask(&["simulate", "--manifest", s(&dir.path().join("m.csv")), "--out", s(&out)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert_eq!(files_with_suffix(&out, ".wav"), 0);
}

#[test]
fn simulate_sweep_writes_nine_trios() {
    let dir = sources(8_000, 1);
    std::fs::write(dir.path().join("m.csv"), "human.wav,ego.wav,3\n").unwrap();
    let out = dir.path().join("out");
    let o = twomask(&["simulate", "--manifest", s(&dir.path().join("m.csv")), "--snr-sweep", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for suffix in [".distortion.wav", ".target.wav", ".mixture.wav"] {
        assert_eq!(files_with_suffix(&out, suffix), 9, "{suffix}");
    }
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("FFR energy ratio")).count(), 9);
    assert!(out.join("simulate.run.json").exists());
}

#[test]
fn simulate_malformed_row_names_the_line() {
    let dir = sources(4_000, 2);
    std::fs::write(dir.path().join("m.csv"), "human.wav,ego.wav,0\n\nhuman.wav,ego.wav\n").unwrap();
    let o = twomask(&["simulate", "--manifest", s(&dir.path().join("m.csv")), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn enhance_identity_streaming_is_bit_identical() {
    let dir = sources(30_001, 3);
    let (input, output) = (dir.path().join("human.wav"), dir.path().join("out.wav"));
    let o =
        twomask(&["enhance", "--input", s(&input), "--output", s(&output), "--generator", "identity", "--streaming"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&input).unwrap(), std::fs::read(&output).unwrap());
    assert!(dir.path().join("out.wav.run.json").exists());
}

#[test]
fn enhance_oracle_restores_ffr_energy_within_five_percent() {
    let dir = sources(32_000, 4);
    let (distortion, target) = simulate_one(&dir, 0.0);
    let output = dir.path().join("restored.wav");
    let generator = format!("oracle:{}", s(&target));
    let o = twomask(&["enhance", "--input", s(&distortion), "--output", s(&output), "--generator", &generator]);
    assert!(o.status.success(), "{}", stderr(&o));
    let target = read_wav(&target).unwrap();
    let (ratio, _) =
        band_energy_ratio(&read_wav(&output).unwrap(), &target, &StftConfig::default(), &FfrBand::default()).unwrap();
    assert!((ratio - 1.0).abs() <= 0.05, "FFR energy ratio {ratio}");
}

#[test]
fn enhance_oracle_length_mismatch_fails() {
    let dir = sources(8_000, 5);
    let short = dir.path().join("short.wav");
    write_wav(&short, &Waveform::zeros(7_000, SR)).unwrap();
    let output = dir.path().join("out.wav");
    let generator = format!("oracle:{}", s(&short));
    let o = twomask(&[
        "enhance",
        "--input",
        s(&dir.path().join("human.wav")),
        "--output",
        s(&output),
        "--generator",
        &generator,
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!output.exists());
}

#[test]
fn enhance_toy_without_model_writes_nothing() {
    let dir = sources(4_000, 6);
    let output = dir.path().join("out.wav");
    let generator = format!("toy:{}", s(&dir.path().join("missing.tmgm")));
    let o = twomask(&[
        "enhance",
        "--input",
        s(&dir.path().join("human.wav")),
        "--output",
        s(&output),
        "--generator",
        &generator,
    ]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("missing.tmgm"), "{}", stderr(&o));
    assert!(!output.exists());
}

#[test]
fn train_toy_prints_a_monotone_curve_and_is_deterministic() {
    let dir = sources(16_000, 7);
    let (distortion, _) = simulate_one(&dir, 0.0);
    let data = distortion.parent().unwrap();
    let mut models = Vec::new();
    for run in 0..2 {
        let model = dir.path().join(format!("model{run}.tmgm"));
        let o = twomask(&["train-toy", "--data", s(data), "--model", s(&model), "--epochs", "10", "--seed", "11"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let losses: Vec<f64> = stdout(&o)
            .lines()
            .enumerate()
            .map(|(i, line)| {
                let (epoch, loss) = line.split_once('\t').unwrap();
                assert_eq!(epoch.parse::<usize>().unwrap(), i + 1);
                loss.parse().unwrap()
            })
            .collect();
        assert_eq!(losses.len(), 10);
        assert!(losses.windows(2).all(|w| w[1] <= w[0]), "{losses:?}");
        models.push(std::fs::read(&model).unwrap());
    }
    assert_eq!(models[0], models[1]);
}

#[test]
fn train_toy_names_a_corrupt_wav() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.distortion.wav"), b"not a wav file").unwrap();
    write_wav(dir.path().join("bad.target.wav"), &Waveform::zeros(1_000, SR)).unwrap();
    let o = twomask(&["train-toy", "--data", s(dir.path()), "--model", s(&dir.path().join("m.tmgm"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.distortion.wav"), "{}", stderr(&o));
}

#[test]
fn train_toy_empty_directory_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = twomask(&["train-toy", "--data", s(dir.path()), "--model", s(&dir.path().join("m.tmgm"))]);
    assert_eq!(o.status.code(), Some(1));
}

fn transcripts(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn eval_identical_files_score_zero() {
    let dir = tempfile::tempdir().unwrap();
    let r = transcripts(dir.path(), "ref.txt", "a\thello world\nb\tgood morning robot\n");
    let out = dir.path().join("report");
    let o = twomask(&["eval", "--reference", s(&r), "--hypothesis", s(&r), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("0.00") && text.contains("100.00"), "{text}");
    for name in ["wer_report.csv", "wer_report.txt", "eval.run.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn eval_quarter_and_zero_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let r = transcripts(dir.path(), "ref.txt", "a\tone two three four\nb\tfive six\n");
    let h = transcripts(dir.path(), "hyp.txt", "a\tone two three for\nb\tfive six\n");
    let o = twomask(&["eval", "--reference", s(&r), "--hypothesis", s(&h)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("12.50") && text.contains("50.00"), "{text}");
}

#[test]
fn eval_lists_a_missing_id() {
    let dir = tempfile::tempdir().unwrap();
    let r = transcripts(dir.path(), "ref.txt", "a\thello\nutt_missing\tworld\n");
    let h = transcripts(dir.path(), "hyp.txt", "a\thello\n");
    let o = twomask(&["eval", "--reference", s(&r), "--hypothesis", s(&h)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("utt_missing"), "{}", stderr(&o));
}

#[test]
fn eval_runs_an_asr_command_over_a_directory() {
    let dir = sources(1_000, 8);
    let r = transcripts(dir.path(), "ref.txt", "ego\thello world\nhuman\thello world\n");
    let o = twomask(&[
        "eval",
        "--reference",
        s(&r),
        "--asr-audio",
        s(dir.path()),
        "--asr-command",
        "sh -c 'echo Hello, world' {audio}",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("100.00"), "{}", stdout(&o));
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = twomask(&["dump-config", "--seed", "42"]);
    assert!(first.status.success());
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = twomask(&["dump-config", "--config", s(&path)]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn dumped_config_reproduces_outputs() {
    let dir = sources(16_000, 9);
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, twomask(&["dump-config"]).stdout).unwrap();
    let (input, target) = simulate_one(&dir, 5.0);
    let generator = format!("oracle:{}", s(&target));
    let mut outputs = Vec::new();
    for extra in [&[][..], &["--config", s(&cfg)][..]] {
        let output = dir.path().join(format!("out{}.wav", outputs.len()));
        let mut args = vec!["enhance", "--input", s(&input), "--output", s(&output), "--generator", &generator];
        args.extend_from_slice(extra);
        let o = twomask(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(&output).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "[stft]\nn_fft = 400\nhop_lenght = 100\n").unwrap();
    let o = twomask(&["dump-config", "--config", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hop_lenght"), "{}", stderr(&o));
}

#[test]
fn exit_codes_follow_error_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.wav");
    let o = twomask(&["enhance", "--input", s(&missing), "--output", s(&dir.path().join("o.wav"))]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = twomask(&["enhance", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(1));
    let o = twomask(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
