use axum::body::Body;
use axum::http::{Method as HttpMethod, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tower::ServiceExt;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn seatalloc(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seatalloc"));
    cmd.args(args).env_remove("SEATALLOC_CACHE_DIR");
    if let Some(c) = cache {
        cmd.env("SEATALLOC_CACHE_DIR", c);
    }
    cmd.output().unwrap()
}

fn stderr_doc(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn solve_args<'a>(out: &'a str, hierarchy: &'a str, extra: &[&'a str]) -> Vec<String> {
    let mut v: Vec<String> = vec![
        "solve".into(),
        "--plan".into(),
        fixture("office.plan.json"),
        "--hierarchy".into(),
        hierarchy.into(),
        "--out".into(),
        out.into(),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_solve(out: &Path, hierarchy: &str, extra: &[&str], cache: Option<&Path>) -> Output {
    let out = out.to_string_lossy();
    let args = solve_args(&out, hierarchy, extra);
    seatalloc(&args.iter().map(String::as_str).collect::<Vec<_>>(), cache)
}

#[test]
fn bundled_fixtures_match_generators() {
    let stale = seatalloc_cli::fixtures::drift(&fixtures());
    assert!(stale.is_empty(), "regenerate with `seatalloc fixtures`: {stale:?}");
}

#[test]
fn solve_writes_report_and_renderings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let h = fixture("office.hierarchy.json");
    let res = run_solve(&out, &h, &["--method", "ica++", "--delayed-office", "--seed", "7"], None);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["allocation.json", "report.json", "timing.json", "level-0.svg", "level-1.svg", "level-2.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let report: Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["method"], "ica++");
    assert_eq!(report["delayed_office"], true);
    assert_eq!(report["params"]["seed"], 7);
    assert_eq!(report["levels"], 3);
    let summary: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(summary["levels"], 3);
}

#[test]
fn same_seed_same_bytes_with_and_without_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let h = fixture("office.hierarchy.json");
    let args = ["--method", "gsa+ls", "--seed", "11"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(run_solve(&a, &h, &args, None).status.code(), Some(0));
    assert_eq!(run_solve(&b, &h, &args, Some(&cache)).status.code(), Some(0));
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(run_solve(&c, &h, &args, Some(&cache)).status.code(), Some(0));
    for f in ["allocation.json", "report.json", "level-0.svg", "level-1.svg", "level-2.svg"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(x, fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn office_shortage_exits_infeasible_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    fs::write(&h, r#"[{"id": "x", "desks": 3, "offices": 30}]"#).unwrap();
    let out = dir.path().join("run");
    let res = run_solve(&out, &h.to_string_lossy(), &[], None);
    assert_eq!(res.status.code(), Some(4));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let doc = stderr_doc(&res);
    assert_eq!(doc["error"]["class"], "infeasible");
    assert_eq!(doc["error"]["violations"][0]["kind"], "office");
    assert_eq!(doc["error"]["violations"][0]["supply"], 6);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");

    let missing = run_solve(&out, "/nonexistent/h.json", &[], None);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(stderr_doc(&missing)["error"]["class"], "config");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"[{"id": "a", "parent": "b", "desks": 1}, {"id": "b", "parent": "a"}]"#).unwrap();
    let invalid = run_solve(&out, &bad.to_string_lossy(), &[], None);
    assert_eq!(invalid.status.code(), Some(3));
    let doc = stderr_doc(&invalid);
    assert_eq!(doc["error"]["class"], "validation");
    assert!(doc["error"]["violations"].as_array().unwrap().iter().any(|v| v["violation"] == "cycle"));

    let h = fixture("office.hierarchy.json");
    let flag = run_solve(&out, &h, &["--max-iterations", "0"], None);
    assert_eq!(flag.status.code(), Some(2));
    let unknown = run_solve(&out, &h, &["--method", "simplex"], None);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unconnected_roadmap_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let h = fixture("office.hierarchy.json");
    let res = run_solve(&out, &h, &["--max-nodes", "1"], None);
    assert_eq!(res.status.code(), Some(4), "{}", String::from_utf8_lossy(&res.stderr));
    let doc = stderr_doc(&res);
    assert_eq!(doc["error"]["violations"][0]["violation"], "unconnected_seat");
}

#[test]
fn distances_fills_the_cache_and_renders_the_roadmap() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let svg = dir.path().join("roadmap.svg");
    let matrix = dir.path().join("m.dm");
    let plan = fixture("quadrants.plan.json");
    let args = [
        "distances",
        "--plan",
        &plan,
        "--roadmap-svg",
        svg.to_str().unwrap(),
        "--out",
        matrix.to_str().unwrap(),
    ];
    let first = seatalloc(&args, Some(&cache));
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(doc["seats"], 42);
    assert_eq!(doc["cache_hit"], false);
    let second = seatalloc(&args, Some(&cache));
    let doc2: Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(doc2["cache_hit"], true);
    assert_eq!(doc["roadmap_nodes"], doc2["roadmap_nodes"]);
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg") && svg_text.contains("<line"));
    let m = seatalloc::DistanceMatrix::read_cache(fs::File::open(&matrix).unwrap()).unwrap();
    assert_eq!(m.len(), 42);
}

#[test]
fn bench_tables_recompute_from_run_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let plan = fixture("quadrants.plan.json");
    let h = fixture("quadrants.hierarchy.json");
    let res = seatalloc(
        &[
            "bench", "--plan", &plan, "--hierarchy", &h, "--out", out.to_str().unwrap(), "--runs", "4",
            "--methods", "gsa,ica", "--seed", "3",
        ],
        None,
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(out.join("table.txt")).unwrap();
    assert_eq!(String::from_utf8(res.stdout).unwrap(), table);
    let header = table.lines().next().unwrap();
    assert!(header.find("ica").unwrap() < header.find("gsa").unwrap());
    assert!(out.join("runs/gsa/seed-6/report.json").is_file());
    assert!(!out.join("runs/gsa/seed-7").exists());

    let from = seatalloc(&["bench", "--from", out.to_str().unwrap(), "--verify"], None);
    assert_eq!(from.status.code(), Some(0), "{}", String::from_utf8_lossy(&from.stderr));
    assert_eq!(String::from_utf8(from.stdout).unwrap(), table);

    // A doctored run report must be caught.
    let victim = out.join("runs/ica/seed-4/report.json");
    let mut report: Value = serde_json::from_slice(&fs::read(&victim).unwrap()).unwrap();
    report["averaged"]["mean_central_seat_distance"] = json!(1.0e6);
    fs::write(&victim, serde_json::to_vec_pretty(&report).unwrap()).unwrap();
    let tampered = seatalloc(&["bench", "--from", out.to_str().unwrap(), "--verify"], None);
    assert_eq!(tampered.status.code(), Some(5));
}

#[test]
fn hidden_oracle_agrees_on_a_few_instances() {
    let res = seatalloc(&["oracle", "--instances", "25"], None);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["mismatches"], json!([]));
}

async fn http(app: &axum::Router, method: HttpMethod, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req.body(Body::from(serde_json::to_vec(&v).unwrap())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::test(flavor = "multi_thread")]
async fn service_returns_cli_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cli");
    let h_path = fixture("office.hierarchy.json");
    let res = run_solve(&out, &h_path, &["--method", "ica++", "--delayed-office", "--seed", "7"], None);
    assert_eq!(res.status.code(), Some(0));

    let state = seatalloc_service::AppState::open(&seatalloc_service::ServiceConfig {
        data_dir: dir.path().join("svc"),
        workers: 1,
    })
    .unwrap();
    let app = seatalloc_service::router(state);
    let plan: Value = serde_json::from_slice(&fs::read(fixture("office.plan.json")).unwrap()).unwrap();
    let (s, body) = http(&app, HttpMethod::POST, "/plans", Some(plan)).await;
    assert_eq!(s, StatusCode::CREATED);
    let plan_id = serde_json::from_slice::<Value>(&body).unwrap()["id"].clone();
    let hierarchy: Value = serde_json::from_slice(&fs::read(&h_path).unwrap()).unwrap();
    let config = json!({ "method": "ica++", "delayed_office": true, "params": { "seed": 7 } });
    let (s, body) = http(
        &app,
        HttpMethod::POST,
        "/scenarios",
        Some(json!({ "plan": plan_id, "hierarchy": hierarchy, "config": config })),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    let id = serde_json::from_slice::<Value>(&body).unwrap()["id"].as_str().unwrap().to_string();
    let (s, _) = http(&app, HttpMethod::POST, &format!("/scenarios/{id}/solve"), None).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let mut done = false;
    for _ in 0..3000 {
        let (_, body) = http(&app, HttpMethod::GET, &format!("/scenarios/{id}"), None).await;
        let doc: Value = serde_json::from_slice(&body).unwrap();
        if doc["status"] == "done" {
            done = true;
            break;
        }
        assert_ne!(doc["status"], "failed", "{doc}");
        tokio::time::sleep(std::time::Duration::from_millis(10)).await;
    }
    assert!(done);
    let (_, report) = http(&app, HttpMethod::GET, &format!("/scenarios/{id}/report"), None).await;
    assert_eq!(report, fs::read(out.join("report.json")).unwrap());
    let (_, alloc) = http(&app, HttpMethod::GET, &format!("/scenarios/{id}/allocation"), None).await;
    assert_eq!(alloc, fs::read(out.join("allocation.json")).unwrap());
    for level in 0..3 {
        let (_, svg) = http(&app, HttpMethod::GET, &format!("/scenarios/{id}/render/{level}.svg"), None).await;
        assert_eq!(svg, fs::read(out.join(format!("level-{level}.svg"))).unwrap());
    }
}
