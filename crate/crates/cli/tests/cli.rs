use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn lexicon() -> String {
    fixtures().join("lexicon/proverbs.tsv").display().to_string()
}

fn paremio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paremio"))
        .args(args)
        .env_remove("PAREMIO_CACHE_DIR")
        .env("RUST_LOG", "info")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_corpus(dir: &Path, files: &str) -> PathBuf {
    fs::create_dir_all(dir.join("texts")).unwrap();
    fs::write(
        dir.join("texts/a.txt"),
        "Time flies when the early bird catches the worm.\n",
    )
    .unwrap();
    fs::write(
        dir.join("texts/b.txt"),
        "Actions speak louder than words, and time flies.\n",
    )
    .unwrap();
    fs::write(
        dir.join("metadata.tsv"),
        "doc_id\tauthor\tbirth_year\ttitle\na\tAnn\t1801\tA\nb\tBo\t1850\tB\n",
    )
    .unwrap();
    let manifest = dir.join("manifest.toml");
    fs::write(
        &manifest,
        format!("corpus_id = \"small\"\nkind = \"plaintext\"\nfiles = {files}\nmetadata = \"metadata.tsv\"\n"),
    )
    .unwrap();
    manifest
}

#[test]
fn lexicon_check_reports_counts() {
    let o = paremio(&["lexicon-check", "--lexicon", &lexicon()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(out.starts_with("entries\t38\n"), "{out}");
    assert!(out.contains("collisions\t2\n"));
    assert!(stderr(&o).contains("collision"));
}

#[test]
fn missing_lexicon_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = paremio(&[
        "lexicon-check",
        "--lexicon",
        tmp.path().join("nope.tsv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_manifest_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("manifest.toml");
    fs::write(
        &manifest,
        "corpus_id = \"x\"\nkind = \"scrolls\"\nfiles = [\"*.txt\"]\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = paremio(&[
        "match",
        "--lexicon",
        &lexicon(),
        "--corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind"), "{}", stderr(&o));

    fs::write(
        &manifest,
        "corpus_id = \"\"\nkind = \"plaintext\"\nfiles = [\"*.txt\"]\n",
    )
    .unwrap();
    let o = paremio(&[
        "match",
        "--lexicon",
        &lexicon(),
        "--corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("corpus_id"), "{}", stderr(&o));
}

#[test]
fn rerun_hits_the_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_corpus(&tmp.path().join("c"), "[\"texts/*.txt\"]");
    let out = tmp.path().join("out");
    let args = [
        "match",
        "--lexicon",
        &lexicon(),
        "--corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    let first = paremio(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(!stderr(&first).contains("cache hit"));
    let summary = fs::read(out.join("summary.tsv")).unwrap();

    let second = paremio(&args);
    assert!(second.status.success());
    assert!(stderr(&second).contains("cache hit"), "{}", stderr(&second));
    assert_eq!(fs::read(out.join("summary.tsv")).unwrap(), summary);

    // Editing a document invalidates the entry.
    fs::write(tmp.path().join("c/texts/b.txt"), "Nothing to see.\n").unwrap();
    let third = paremio(&args);
    assert!(!stderr(&third).contains("cache hit"));
    assert_ne!(fs::read(out.join("summary.tsv")).unwrap(), summary);
}

#[test]
fn missing_file_is_a_partial_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_corpus(&tmp.path().join("c"), "[\"texts/a.txt\", \"texts/gone.txt\"]");
    let out = tmp.path().join("out");
    let o = paremio(&[
        "match",
        "--lexicon",
        &lexicon(),
        "--corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let errors = fs::read_to_string(out.join("errors.tsv")).unwrap();
    assert!(errors.lines().nth(1).unwrap().contains("gone.txt"));
    // The readable document still made it into the table.
    let summary = fs::read_to_string(out.join("summary.tsv")).unwrap();
    assert!(summary.contains("time flies"));
}

#[test]
fn zero_top_k_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_corpus(&tmp.path().join("c"), "[\"texts/*.txt\"]");
    let out = tmp.path().join("out");
    let o = paremio(&[
        "network",
        "--lexicon",
        &lexicon(),
        "--corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--top",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_bin_and_window_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_corpus(&tmp.path().join("c"), "[\"texts/*.txt\"]");
    let out = tmp.path().join("out");
    let lex = lexicon();
    for extra in [["--bin", "fortnight"], ["--window", "0"]] {
        let mut args = vec![
            "timeseries",
            "--lexicon",
            &lex,
            "--corpus",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend(extra);
        let o = paremio(&args);
        assert_eq!(o.status.code(), Some(2), "{extra:?}: {}", stderr(&o));
    }
}

#[test]
fn flatten_ngrams_rewrites_year_tuples() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    fs::write(&input, "time flies\t1990,3,2\t1991,5,4\n").unwrap();
    let output = tmp.path().join("out.tsv");
    let o = paremio(&[
        "flatten-ngrams",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&output).unwrap();
    assert!(text.contains("time flies\t1990\t3\t2"), "{text}");
    assert!(text.contains("time flies\t1991\t5\t4"), "{text}");
}
