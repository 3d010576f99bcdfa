//! Wiring and exit statuses of the `screenforge` binary.

mod common;

use std::process::Command;

use serde_json::{json, Value};

use common::{broken, code, sf, stdout, techsupport, Server, BIN};
use screenforge_backend_sim::BackendSim;
use screenforge_core::fixtures::BROKEN_VARIANTS;

fn ws() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[tokio::test(flavor = "multi_thread")]
async fn validate_reports_planted_defects() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let dir = ws();
    let ts = techsupport();
    let ts = ts.to_str().unwrap();
    assert_eq!(code(&sf(dir.path(), &["validate", ts])), 0);
    assert_eq!(code(&sf(dir.path(), &["discover", &sim.url()])), 0);
    assert_eq!(code(&sf(dir.path(), &["validate", ts])), 0);
    for (name, _) in BROKEN_VARIANTS {
        let path = broken(name);
        let out = sf(dir.path(), &["--format", "machine", "validate", path.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{name}");
        let expected = name.to_uppercase();
        let codes: Vec<String> = stdout(&out)
            .lines()
            .map(|l| l.split(' ').nth(1).unwrap().to_string())
            .collect();
        assert!(codes.contains(&expected), "{name}: {codes:?}");
    }
    assert_eq!(code(&sf(dir.path(), &["validate", "/nonexistent.app.json"])), 2);
}

#[tokio::test(flavor = "multi_thread")]
async fn discover_lists_services_deterministically() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let dir = ws();
    let first = sf(dir.path(), &["discover", &sim.url()]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first).lines().count(), 5);
    let again = sf(dir.path(), &["discover", &sim.url()]);
    assert_eq!(stdout(&first), stdout(&again));
    assert!(dir.path().join("registry.workspace.json").exists());

    let machine = sf(dir.path(), &["--format", "machine", "discover", &sim.url()]);
    let ids: Vec<String> = stdout(&machine)
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["serviceId"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(
        ids,
        [
            "getCustomer",
            "getSchedule",
            "getTicket",
            "getTicketHistory",
            "saveSummary"
        ]
    );

    assert_eq!(code(&sf(dir.path(), &["discover", "http://127.0.0.1:1"])), 3);
    assert_eq!(code(&sf(dir.path(), &["discover", "not a url"])), 2);
}

#[tokio::test(flavor = "multi_thread")]
async fn bind_check_requires_discovery() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let dir = ws();
    let ts = techsupport();
    let ts = ts.to_str().unwrap();
    let out = sf(dir.path(), &["--format", "machine", "bind-check", ts]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).lines().all(|l| l.starts_with("error UNCHECKED_SERVICE")));
    sf(dir.path(), &["discover", &sim.url()]);
    assert_eq!(code(&sf(dir.path(), &["bind-check", ts])), 0);
}

#[tokio::test(flavor = "multi_thread")]
async fn deploy_publishes_one_entry_per_target() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let ts = techsupport();
    let ts = ts.to_str().unwrap();

    let dir = ws();
    assert_eq!(code(&sf(dir.path(), &["deploy", ts])), 1, "unchecked bindings");
    sf(dir.path(), &["discover", &sim.url()]);
    let out = sf(
        dir.path(),
        &["--format", "machine", "deploy", ts, "--targets", "ios,android"],
    );
    assert_eq!(code(&out), 0);
    let deployed: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(deployed.len(), 2);
    let entries = sf(dir.path(), &["--format", "machine", "catalogue"]);
    assert_eq!(stdout(&entries).lines().count(), 2);

    // redeploying the same version replaces, never duplicates
    sf(dir.path(), &["deploy", ts]);
    assert_eq!(stdout(&sf(dir.path(), &["catalogue"])).lines().count(), 2);

    let id = deployed[0]["bundleId"].as_str().unwrap();
    let archived = sf(dir.path(), &["--format", "machine", "catalogue", "--archive", id]);
    let statuses: Vec<String> = stdout(&archived)
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["status"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(statuses.iter().filter(|s| *s == "archived").count(), 1);
    assert_eq!(code(&sf(dir.path(), &["catalogue", "--archive", "nope"])), 1);

    let single = ws();
    sf(single.path(), &["discover", &sim.url()]);
    assert_eq!(code(&sf(single.path(), &["deploy", ts, "--targets", "android"])), 0);
    assert_eq!(stdout(&sf(single.path(), &["catalogue"])).lines().count(), 1);
    assert_eq!(code(&sf(single.path(), &["deploy", ts, "--targets", "windows"])), 2);
}

#[tokio::test(flavor = "multi_thread")]
async fn preview_serves_the_entry_form() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let dir = ws();
    sf(dir.path(), &["discover", &sim.url()]);
    let ts = techsupport();
    let a = Server::start(dir.path(), &["preview", ts.to_str().unwrap()]).unwrap();
    let b = Server::start(dir.path(), &["preview", ts.to_str().unwrap()]).unwrap();
    assert_ne!(a.url, b.url);

    let c = reqwest::Client::new();
    let bundles: Vec<String> = c
        .get(format!("{}/bundles", a.url))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(bundles.len(), 1);
    let started: Value = c
        .post(format!("{}/sessions", a.url))
        .json(&json!({"bundleId": bundles[0]}))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(started["formState"]["formId"], "schedule");
    assert!(!started["formState"]["tables"]["tickets"].as_array().unwrap().is_empty());

    let sid = started["sessionId"].as_str().unwrap();
    let elsewhere = c.get(format!("{}/sessions/{sid}", b.url)).send().await.unwrap();
    assert_eq!(elsewhere.status().as_u16(), 404);

    let plain: Value = c
        .get(format!("{}/preview", b.url))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(plain["formState"]["formId"], "schedule");

    let invalid = broken("unresolved_nav_target");
    let err = Server::start(dir.path(), &["preview", invalid.to_str().unwrap()])
        .err()
        .unwrap();
    assert_eq!(code(&err), 1);
    assert!(stdout(&err).contains("UNRESOLVED_NAV_TARGET"));
}

#[tokio::test(flavor = "multi_thread")]
async fn builder_api_edits_and_deploys() {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let dir = ws();
    sf(dir.path(), &["discover", &sim.url()]);
    let ts = techsupport();
    let server = Server::start(dir.path(), &["preview", ts.to_str().unwrap()]).unwrap();
    let url = &server.url;
    let c = reqwest::Client::new();

    let got: Value = c
        .get(format!("{url}/apps/TechSupport"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(got["app"]["forms"].as_array().unwrap().len(), 5);
    assert!(got["diagnostics"].as_array().unwrap().is_empty(), "{got}");

    let rows: Vec<Value> = c
        .get(format!("{url}/catalogue"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(rows.len(), 5);

    let edit = |body: Value| {
        let c = c.clone();
        let url = url.clone();
        async move {
            let resp = c
                .post(format!("{url}/apps/Demo/edits"))
                .json(&body)
                .send()
                .await
                .unwrap();
            (resp.status().as_u16(), resp.json::<Value>().await.unwrap())
        }
    };
    let (status, _) = edit(json!({"op": "addForm", "target": "/", "payload": {"id": "x", "title": "X"}})).await;
    assert_eq!(status, 404);
    let (status, created) = edit(json!({"op": "createApp", "target": "/", "payload": {"name": "Demo"}})).await;
    assert_eq!(status, 200, "{created}");
    let v = created["version"].as_u64().unwrap();
    let (status, added) = edit(json!({
        "baseVersion": v,
        "op": "addField",
        "target": "/forms/main/pages/page1",
        "payload": {"id": "notes", "kind": "multiline", "label": "Notes"}
    }))
    .await;
    assert_eq!(status, 200, "{added}");
    assert_eq!(added["version"].as_u64().unwrap(), v + 1);
    assert_eq!(added["inverse"]["op"], "removeNode");

    let (status, stale) =
        edit(json!({"baseVersion": v, "op": "hideField", "target": "/forms/main/fields/notes"})).await;
    assert_eq!((status, stale["code"].as_str()), (409, Some("VERSION_CONFLICT")));
    let (status, missing) = edit(json!({"op": "hideField", "target": "/forms/main/fields/nope"})).await;
    assert_eq!((status, missing["code"].as_str()), (422, Some("TARGET_NOT_FOUND")));

    let older = json!({"name": "Demo", "version": 1, "globals": [], "forms": [{"id": "main", "title": "Main", "pages": [{"id": "p", "fields": []}]}]});
    let resp = c.put(format!("{url}/apps/Demo")).json(&older).send().await.unwrap();
    assert_eq!(resp.status().as_u16(), 409);

    let deployed: Value = c
        .post(format!("{url}/deploy"))
        .json(&json!({"appId": "TechSupport", "targets": ["ios", "android"]}))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(deployed["bundles"].as_array().unwrap().len(), 2, "{deployed}");
    let entries: Vec<Value> = c
        .get(format!("{url}/deployments"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(entries.len(), 2);
    let android = deployed["bundles"][1]["bundleId"].as_str().unwrap();
    let resp = c
        .post(format!("{url}/sessions"))
        .json(&json!({"bundleId": android}))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status().as_u16(), 200);
}

#[test]
fn workspace_comes_from_the_environment() {
    let dir = ws();
    let out = Command::new(BIN)
        .args(["new", "Demo", "--out"])
        .arg(dir.path().join("demo.app.json"))
        .env("SCREENFORGE_WORKSPACE", dir.path().join("ws"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let demo = dir.path().join("demo.app.json");
    assert_eq!(code(&sf(dir.path(), &["validate", demo.to_str().unwrap()])), 0);
    assert_eq!(
        code(&sf(dir.path(), &["new", "Demo", "--out", demo.to_str().unwrap()])),
        2
    );

    let listed = Command::new(BIN)
        .arg("catalogue")
        .env("SCREENFORGE_WORKSPACE", dir.path().join("ws"))
        .output()
        .unwrap();
    assert_eq!(code(&listed), 0);
    assert!(stdout(&listed).is_empty());
}

#[test]
fn usage_errors_exit_2() {
    let dir = ws();
    assert_eq!(code(&sf(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&sf(dir.path(), &["--format", "xml", "catalogue"])), 2);
    assert_eq!(code(&sf(dir.path(), &["lint", "/missing.app.json"])), 2);
}
