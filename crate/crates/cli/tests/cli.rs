use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn phonation(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phonation"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = phonation(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    phonation(args).status.code().expect("exit code")
}

fn synth(dir: &Path, n_pd: usize, n_hc: usize) -> PathBuf {
    let profile = dir.join("profile.toml");
    fs::write(&profile, "short_duration = 0.5\nsustained_duration = 0.7\n").unwrap();
    let corpus = dir.join("corpus");
    ok(&[
        "synth",
        "--out",
        corpus.to_str().unwrap(),
        "--n-pd",
        &n_pd.to_string(),
        "--n-hc",
        &n_hc.to_string(),
        "--seed",
        "5",
        "--profile",
        profile.to_str().unwrap(),
    ]);
    corpus
}

/// A small, fast configuration; `extra` is appended verbatim.
fn write_config(dir: &Path, name: &str, output: &str, extra: &str) -> PathBuf {
    let text = format!(
        r#"corpus = "corpus"
metadata = "corpus/metadata.csv"
output = "{output}"
seed = 3
functionals = ["median", "std", "ir"]
{extra}
[screening]
winner_candidates = 2
[screening.forest]
n_trees = 10

[selection]
k = 15
max_size = 3
[selection.wrapper_forest]
n_trees = 10

[forest]
n_trees = 25
"#
    );
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const PERCEPTUAL: &str = "[perceptual]\nfamilies = [\"MFCC\", \"LPCC\"]\nwith_delta = false\n";

fn report_bytes(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = ["matrices", "reports"]
        .iter()
        .flat_map(|sub| fs::read_dir(out.join(sub)).unwrap())
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn full_pipeline_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, 8, 5);
    let first = write_config(dir, "a.toml", "out_a", PERCEPTUAL);
    let second = write_config(dir, "b.toml", "out_b", PERCEPTUAL);

    for cfg in [&first, &second] {
        let cfg = cfg.to_str().unwrap();
        let workers = if cfg.ends_with("a.toml") { "1" } else { "2" };
        let extract = ok(&["--workers", workers, "extract", "--config", cfg]);
        assert!(extract.contains("recordings: 260"));
        ok(&["--workers", workers, "screen", "--config", cfg]);
        ok(&["--workers", workers, "select", "--config", cfg]);
        ok(&["--workers", workers, "classify", "--config", cfg]);
        ok(&["--workers", workers, "correlate", "--config", cfg]);
        ok(&["--workers", workers, "report", "--config", cfg]);
    }
    let a = report_bytes(&dir.join("out_a"));
    let b = report_bytes(&dir.join("out_b"));
    assert_eq!(a.len(), b.len());
    for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
        assert_eq!(na, nb);
        assert!(ba == bb, "{na} differs between runs");
    }

    // 20 vowel-style matrices plus the per-style and overall merges.
    let matrices = dir.join("out_a/matrices");
    for v in ["a", "e", "i", "o", "u"] {
        for s in ["s", "l", "ll", "ls"] {
            assert!(matrices.join(format!("{v}_{s}.csv")).exists());
            assert!(matrices.join(format!("{v}_{s}.json")).exists());
        }
    }
    assert!(matrices.join("all.csv").exists());
    assert!(matrices.join("all_ll.csv").exists());

    let classify = fs::read_to_string(dir.join("out_a/reports/classify.tsv")).unwrap();
    let header: Vec<&str> = classify.lines().find(|l| !l.starts_with('#')).unwrap().split('\t').collect();
    assert_eq!(&header[..6], ["Vowels", "ACC [%]", "SEN [%]", "SPE [%]", "TSS", "No."]);
    let row: Vec<&str> = classify.lines().last().unwrap().split('\t').collect();
    assert_eq!(row[0], "all (s, l, ll, ls)");
    let selected: Vec<&str> = row[10].split("; ").filter(|s| !s.is_empty()).collect();
    assert_eq!(row[5].parse::<usize>().unwrap(), selected.len());
    assert!(classify.contains("# config_hash\t"));

    let correlate = fs::read_to_string(dir.join("out_a/reports/correlate.txt")).unwrap();
    for label in ["PD duration", "UPDRS III", "UPDRS IV", "RBDSQ", "FOG", "NMSS", "BDI", "MMSE"] {
        assert_eq!(correlate.lines().filter(|l| l.starts_with(label)).count(), 1, "{label}");
    }
    // PD subjects only.
    assert!(correlate.lines().any(|l| l.starts_with("UPDRS III") && l.trim_end().ends_with(" 8")));

    let summary = fs::read_to_string(dir.join("out_a/reports/summary.txt")).unwrap();
    assert!(summary.contains("Classification results") && summary.contains("Feature extraction"));
}

#[test]
fn scenarios_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, 6, 5);
    let extra = "conventional = false\n[perceptual]\nfamilies = [\"LPC\"]\nwith_delta = true\n";
    let cfg = write_config(dir, "c.toml", "out", extra);
    let cfg = cfg.to_str().unwrap();
    ok(&["extract", "--config", cfg]);

    // Disabled families never reach the matrices.
    let header = fs::read_to_string(dir.join("out/matrices/all.csv")).unwrap();
    let header = header.lines().next().unwrap();
    assert!(header.contains("LPC") && header.contains("ΔLPC"));
    for absent in ["MFCC", "PLP", "jitter", "HNR", "VSA"] {
        assert!(!header.contains(absent), "{absent} present");
    }

    let per_vowel = ok(&["classify", "--config", cfg, "--scenario", "per-vowel"]);
    assert!(per_vowel.contains("scenario: per-vowel"));
    assert!(per_vowel.contains("\na (s) ") && per_vowel.contains("\nu (ls) "));
    let per_style = ok(&["select", "--config", cfg, "--scenario", "per-style"]);
    assert!(per_style.contains("\nall (ll) "));

    let nested = ok(&["classify", "--config", cfg, "--selection-placement", "nested", "--seed", "8"]);
    assert!(nested.contains("placement: nested") && nested.contains("seed: 8"));
    assert!(nested.contains("fold subset sizes:"));

    // Too few PD subjects for a partial correlation with two covariates.
    assert_eq!(code(&["correlate", "--config", cfg]), 3);
    assert_eq!(code(&["correlate", "--config", cfg, "--targets", "updrs5"]), 2);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let missing = dir.join("missing.toml");
    assert_eq!(code(&["extract", "--config", missing.to_str().unwrap()]), 2);

    let bad = dir.join("bad.toml");
    fs::write(&bad, "corpus = [").unwrap();
    assert_eq!(code(&["extract", "--config", bad.to_str().unwrap()]), 2);

    let unknown = dir.join("unknown.toml");
    fs::write(&unknown, "corpus = \"c\"\nmetadata = \"m\"\noutput = \"o\"\ntrees = 4\n").unwrap();
    assert_eq!(code(&["extract", "--config", unknown.to_str().unwrap()]), 2);

    let cfg = write_config(dir, "ok.toml", "out", PERCEPTUAL);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&["classify", "--config", cfg, "--scenario", "vowels"]), 2);
    assert_eq!(code(&["--workers", "0", "classify", "--config", cfg]), 2);
    // No corpus or metadata on disk.
    assert_eq!(code(&["extract", "--config", cfg]), 3);
    // No matrices yet.
    fs::create_dir_all(dir.join("corpus")).unwrap();
    fs::write(
        dir.join("corpus/metadata.csv"),
        "speaker_id,group,sex,age,pd_duration,updrs3,updrs4,rbdsq,fog,nmss,bdi,mmse,led\n",
    )
    .unwrap();
    assert_eq!(code(&["classify", "--config", cfg]), 3);
    assert_eq!(code(&["report", "--config", cfg]), 3);

    let out = dir.join("cohort");
    assert_eq!(code(&["synth", "--out", out.to_str().unwrap(), "--n-pd", "3"]), 2);
}
