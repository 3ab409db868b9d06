use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use netgame_service::{resolve_port, router, ServiceConfig, SessionStore};

fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn app() -> Router {
    router(Arc::new(SessionStore::new()), ServiceConfig::default())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let (status, bytes) = call_raw(app, method, uri, body).await;
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn call_raw(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn load(app: &Router, doc: String) -> String {
    let (status, body) = call(app, "POST", "/games", Some(doc)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["game_id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn complete_example_session() {
    let app = app();
    let id = load(&app, data("complete_example.json")).await;

    let (status, report) = call(&app, "GET", &format!("/games/{id}/anarchy"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["worst_stable_value"], 1077.0);
    assert_eq!(report["best_value"], 1487.0);
    assert!((report["poa_ratio"].as_f64().unwrap() - 0.724).abs() < 5e-4);
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["game_id"], id.as_str());
    assert_eq!(report["game_hash"].as_str().unwrap().len(), 64);

    let (_, stable) = call(&app, "GET", &format!("/games/{id}/stable"), None).await;
    assert_eq!(stable["objective"], 1077.0);
    assert_eq!(stable["graph"]["edges"].as_array().unwrap().len(), 13);
    let (_, best) = call(&app, "GET", &format!("/games/{id}/best"), None).await;
    assert_eq!(best["objective"], 1487.0);

    let (status, w) = call(
        &app,
        "POST",
        &format!("/games/{id}/whatif"),
        Some(json!({"remove": 10}).to_string()),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{w}");
    assert_eq!(w["whatif"]["removed"], 10);
    assert_eq!(w["whatif"]["communal_utility_change"], 576.0);
    assert_eq!(w["removed_label"], "10");
    let derived = w["derived_game_id"].as_str().unwrap().to_string();

    let (_, after) = call(&app, "GET", &format!("/games/{derived}/anarchy"), None).await;
    assert_eq!(after["worst_stable_value"], 501.0);
    assert_eq!(after["best_value"], 789.0);

    let (status, back) = call(&app, "POST", &format!("/games/{derived}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(back["game_id"], id.as_str());
    let (status, _) = call(&app, "POST", &format!("/games/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (_, shown) = call(&app, "GET", &format!("/games/{derived}"), None).await;
    assert_eq!(shown["parent_id"], id.as_str());
    assert_eq!(shown["removed"], 10);
    assert_eq!(shown["document"]["n"], 9);
}

#[tokio::test]
async fn summary_is_idempotent() {
    let app = app();
    let id = load(&app, data("complete_example.json")).await;
    let uri = format!("/games/{id}/summary");
    let (status, first) = call_raw(&app, "GET", &uri, None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, second) = call_raw(&app, "GET", &uri, None).await;
    assert_eq!(first, second);
    let v: Value = serde_json::from_slice(&first).unwrap();
    let du: Vec<f64> = v["summary"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["communal_utility_change"].as_f64().unwrap())
        .collect();
    assert_eq!(
        du,
        [178., 153., 285., 190., 193., 42., 213., 221., 103., 576.]
    );
    assert!(v["summary"]["pareto"]
        .as_array()
        .unwrap()
        .contains(&json!(10)));
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let id = load(&app, data("complete_example.json")).await;
    let whatif = format!("/games/{id}/whatif");
    for remove in [0, 11, -3] {
        let (status, body) = call(
            &app,
            "POST",
            &whatif,
            Some(json!({"remove": remove}).to_string()),
        )
        .await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
        assert!(body["error"].as_str().unwrap().contains("out of range"));
    }
    let (status, _) = call(&app, "POST", &whatif, Some("{\"remove\":".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let bad = json!({"kind": "link_bias", "n": 2, "c": [[1, 0], [0, 0]]}).to_string();
    let (status, body) = call(&app, "POST", "/games", Some(bad)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("diagonal"));

    let (status, _) = call(&app, "GET", "/games/nope/anarchy", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/jobs/99", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let body = json!({"runs": 3, "seed": 1}).to_string();
    let (status, _) = call(&app, "POST", &format!("/games/{id}/simulate"), Some(body)).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn degree_game_simulation() {
    let app = app();
    let id = load(&app, data("powerlaw100.json")).await;
    let uri = format!("/games/{id}/simulate");
    let body = json!({"runs": 20, "seed": 42}).to_string();
    let (status, first) = call_raw(&app, "POST", &uri, Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let (_, second) = call_raw(&app, "POST", &uri, Some(body)).await;
    assert_eq!(first, second);
    let v: Value = serde_json::from_slice(&first).unwrap();
    let stats = &v["simulation"]["statistics"];
    assert_eq!(stats["runs"], 20);
    assert!(stats["poa_histogram"].as_object().unwrap().keys().all(|k| {
        let p: i64 = k.parse().unwrap();
        p >= 0 && p % 2 == 0
    }));

    let (status, _) = call(
        &app,
        "POST",
        &uri,
        Some(json!({"runs": 0, "seed": 1}).to_string()),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn derived_games_match_fresh_loads() {
    let app = app();
    let id = load(&app, data("complete_example.json")).await;
    let (_, w) = call(
        &app,
        "POST",
        &format!("/games/{id}/whatif"),
        Some(json!({"remove": 10}).to_string()),
    )
    .await;
    let derived = w["derived_game_id"].as_str().unwrap().to_string();

    let full: Value = serde_json::from_str(&data("complete_example.json")).unwrap();
    let reduced: Vec<Vec<f64>> = full["c"].as_array().unwrap()[..9]
        .iter()
        .map(|row| {
            row.as_array().unwrap()[..9]
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect();
    let fresh = load(
        &app,
        json!({"kind": "link_bias", "n": 9, "c": reduced}).to_string(),
    )
    .await;

    for v in 1..=9 {
        let body = Some(json!({ "remove": v }).to_string());
        let (_, a) = call(
            &app,
            "POST",
            &format!("/games/{derived}/whatif"),
            body.clone(),
        )
        .await;
        let (_, b) = call(&app, "POST", &format!("/games/{fresh}/whatif"), body).await;
        assert_eq!(a["whatif"], b["whatif"], "vertex {v}");
        assert_eq!(a["game_hash"], b["game_hash"]);
        assert_eq!(a["derived_game_hash"], b["derived_game_hash"]);
    }
}

#[tokio::test]
async fn slow_requests_become_jobs() {
    let config = ServiceConfig {
        job_threshold: Duration::ZERO,
        ..ServiceConfig::default()
    };
    let app = router(Arc::new(SessionStore::new()), config);
    let id = load(&app, data("complete_example.json")).await;
    let (status, accepted) = call(&app, "GET", &format!("/games/{id}/summary"), None).await;
    assert_eq!(status, StatusCode::ACCEPTED);
    let job = accepted["job_id"].as_u64().unwrap();

    let mut result = Value::Null;
    for _ in 0..200 {
        let (status, body) = call(&app, "GET", &format!("/jobs/{job}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if body["status"] == "done" {
            result = body["result"].clone();
            break;
        }
        assert_eq!(body["status"], "pending");
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    let du = &result["summary"]["rows"][9]["communal_utility_change"];
    assert_eq!(du, &json!(576.0));
}

#[tokio::test]
async fn cors_headers() {
    let req = Request::builder()
        .method("GET")
        .uri("/games/none/anarchy")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[test]
fn port_flag_wins() {
    assert_eq!(resolve_port(Some(9001)).unwrap(), 9001);
}

#[test]
fn snapshot_round_trip() {
    let store = SessionStore::new();
    let game = netgame::io::parse_game(&data("complete_example.json")).unwrap();
    let root = store.load(game, None);
    let child = store.derive(&root, 9).unwrap();
    let snap = store.snapshot();
    assert_eq!(snap.nodes.len(), 2);
    assert_eq!(snap.nodes[0].id, root.id);

    let restored = SessionStore::new();
    restored.restore(snap.clone()).unwrap();
    let c = restored.get(&child.id).unwrap();
    assert_eq!(c.parent.as_deref(), Some(root.id.as_str()));
    assert_eq!(c.hash, child.hash);
    assert_eq!(c.labels.len(), 9);
    assert_eq!(restored.snapshot(), snap);
}
