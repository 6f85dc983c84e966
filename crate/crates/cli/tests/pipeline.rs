use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use newsvol_cli::config::{ConfigLayer, PipelineConfig};
use newsvol_cli::pipeline::run_pipeline;
use newsvol_cli::{FigureKind, Stage};

fn demo_conf() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/demo/demo.conf")
}

fn demo_config(out: &Path) -> PipelineConfig {
    ConfigLayer::from_file(&demo_conf())
        .unwrap()
        .merge(ConfigLayer {
            out_dir: Some(out.to_path_buf()),
            ..Default::default()
        })
        .finish()
        .unwrap()
}

#[test]
fn missing_market_file_is_an_ingest_error() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = demo_config(out.path());
    cfg.markets[1].1 = out.path().join("absent.csv");
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.stage, Stage::Ingest);
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().starts_with("ingest: "));
}

#[test]
fn figure_files_have_headers_and_qq_matches_residuals() {
    let out = tempfile::tempdir().unwrap();
    let bundle = run_pipeline(&demo_config(out.path())).unwrap();
    for kind in FigureKind::ALL {
        let text = fs::read_to_string(out.path().join("figures").join(kind.file_name())).unwrap();
        assert_eq!(text.lines().next().unwrap(), kind.header().join(","), "{kind}");
    }
    let qq = fs::read_to_string(out.path().join("figures").join(FigureKind::Qq.file_name())).unwrap();
    assert_eq!(qq.lines().count() - 1, bundle.analysis.garch.standardized.len());
    assert_eq!(bundle.analysis.garch.standardized.len(), bundle.panel.len());
    let report = fs::read_to_string(out.path().join("report.md")).unwrap();
    assert!(report.contains("Sentiment Score"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_newsvol");
    let out = tempfile::tempdir().unwrap();
    let ok = Command::new(bin)
        .args(["--config", demo_conf().to_str().unwrap(), "--out", out.path().to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(out.path().join("metadata.txt").exists());

    let bad = Command::new(bin)
        .args(["--headlines", "/nonexistent/h.csv", "--out", out.path().to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ingest"));

    let usage = Command::new(bin).args(["fit-garch", "--dist", "cauchy"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
}
