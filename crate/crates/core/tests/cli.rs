use std::path::PathBuf;
use std::process::{Command, Output};

use qir_toolkit::corpus;

fn qir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qir")).args(args).output().expect("binary runs")
}

fn corpus_path(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_exit_codes_over_corpus() {
    for (name, _) in corpus::QIR_FILES {
        let o = qir(&["validate", &corpus_path(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
    let o = qir(&["validate", &corpus_path("bell.qasm")]);
    assert_eq!((o.status.code(), stdout(&o).lines().next()), (Some(0), Some("base")));
}

#[test]
fn transpile_to_qasm_reproduces_the_bell_listing() {
    let o = qir(&["transpile", &corpus_path("bell_dynamic.ll"), "--to", "qasm2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), corpus::BELL_QASM);
}

#[test]
fn pipeline_closes() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.ll");
    let qasm = dir.path().join("back.qasm");
    for (name, _) in corpus::QIR_FILES {
        if name == "feedback.ll" {
            continue;
        }
        let o = qir(&["transpile", &corpus_path(name), "--to", "qir-base", "--out", base.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let v = qir(&["validate", base.to_str().unwrap()]);
        assert_eq!(stdout(&v).lines().next(), Some("base"), "{name}");
        let o = qir(&["transpile", base.to_str().unwrap(), "--to", "qasm2", "--out", qasm.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let o = qir(&["transpile", qasm.to_str().unwrap(), "--to", "qir-base"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn feedback_fails_semantically() {
    let o = qir(&["transpile", &corpus_path("feedback.ll"), "--to", "qir-base"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FeedbackRequired"), "{}", stderr(&o));
    // The adaptive program still runs.
    let o = qir(&["run", &corpus_path("feedback.ll"), "--shots", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn run_is_reproducible_json() {
    let args = ["run", &corpus_path("bell_static.ll"), "--shots", "200", "--seed", "9", "--memory"];
    let a = qir(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&qir(&args)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["shots"], 200);
    assert_eq!(v["memory"].as_array().unwrap().len(), 200);
    let total: u64 = v["counts"].as_object().unwrap().values().map(|n| n.as_u64().unwrap()).sum();
    assert_eq!(total, 200);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ll");
    std::fs::write(&bad, "define void @main() {\nentry:\n  frobnicate\n}\n").unwrap();
    let o = qir(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = qir(&["validate", dir.path().join("absent.ll").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = qir(&["unroll", &corpus_path("for_loop.ll"), "--iteration-cap", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("CapExceeded"));

    let unknown = dir.path().join("unknown.ll");
    std::fs::write(
        &unknown,
        "define void @main() #0 {\nentry:\n  call void @__quantum__qis__foo__body(ptr null)\n  ret void\n}\n\n\
         declare void @__quantum__qis__foo__body(ptr)\n\nattributes #0 = { \"entry_point\" }\n",
    )
    .unwrap();
    let o = qir(&["run", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownIntrinsic"), "{}", stderr(&o));

    let o = qir(&["run", &corpus_path("bell_static.ll"), "--shots", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qir(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}
