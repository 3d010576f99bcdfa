use serde_json::{json, Value};

use screenforge_backend_sim::{BackendSim, Dataset, Fault, RunningSim};
use screenforge_core::descriptor::parse_descriptor;

async fn start() -> RunningSim {
    BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap()
}

async fn invoke(sim: &RunningSim, id: &str, body: Value) -> (u16, Value) {
    let resp = reqwest::Client::new()
        .post(format!("{}/invoke/{id}", sim.url()))
        .json(&body)
        .send()
        .await
        .unwrap();
    let status = resp.status().as_u16();
    (status, resp.json().await.unwrap_or(Value::Null))
}

fn seed() -> Value {
    serde_json::from_str(&std::fs::read_to_string("fixtures/techsupport.seed.json").unwrap()).unwrap()
}

#[test]
fn seed_has_referential_integrity() {
    let data = Dataset::techsupport();
    data.check_integrity().unwrap();
    assert_eq!(data.contacts.len(), 3);
    assert_eq!(data.tickets.len(), 4);
}

#[tokio::test]
async fn discovery_lists_five_valid_descriptors() {
    let sim = start().await;
    let ids: Vec<String> = reqwest::get(format!("{}/services", sim.url()))
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(
        ids,
        [
            "getSchedule",
            "getCustomer",
            "getTicket",
            "getTicketHistory",
            "saveSummary"
        ]
    );
    for id in &ids {
        let doc: Value = reqwest::get(format!("{}/services/{id}/descriptor", sim.url()))
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        assert_eq!(parse_descriptor(&doc).unwrap().service_id, *id);
    }
    let missing = reqwest::get(format!("{}/services/nope/descriptor", sim.url()))
        .await
        .unwrap();
    assert_eq!(missing.status().as_u16(), 404);
}

#[tokio::test]
async fn get_customer_answers_from_seed() {
    let sim = start().await;
    let (status, body) = invoke(&sim, "getCustomer", json!({"contactId": "42"})).await;
    assert_eq!(status, 200);
    let expected = seed()["contacts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["contactId"] == "42")
        .unwrap()
        .clone();
    assert_eq!(body, expected);
    assert_eq!(body["lastName"], "Smith");
}

#[tokio::test]
async fn schedule_is_open_tickets_by_date_and_stable() {
    let sim = start().await;
    let (_, first) = invoke(&sim, "getSchedule", json!({})).await;
    let (_, second) = invoke(&sim, "getSchedule", json!({})).await;
    assert_eq!(first, second);
    let rows: Vec<(String, String, String)> = first["contacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["ticketId"].as_str().unwrap().to_string(),
                r["contactId"].as_str().unwrap().to_string(),
                r["lastName"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let own = |a: &str, b: &str, c: &str| (a.to_string(), b.to_string(), c.to_string());
    assert_eq!(
        rows,
        vec![
            own("T-100", "42", "Smith"),
            own("T-101", "7", "Jones"),
            own("T-102", "19", "Brown")
        ]
    );
}

#[tokio::test]
async fn save_summary_appends_one_history_record() {
    let sim = start().await;
    let history = |body: Value| body["history"].as_array().unwrap().len();
    let (_, before) = invoke(&sim, "getTicketHistory", json!({"ticketId": "T-100"})).await;
    let (status, ack) = invoke(
        &sim,
        "saveSummary",
        json!({"ticketId": "T-100", "date": "2013-10-27", "status": "done", "notes": "fixed"}),
    )
    .await;
    assert_eq!(status, 200);
    assert!(ack["ack"].is_string());
    let (_, after) = invoke(&sim, "getTicketHistory", json!({"ticketId": "T-100"})).await;
    assert_eq!(history(after.clone()), history(before) + 1);
    let last = after["history"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["status"], "done");
    assert_eq!(sim.sim.dataset().history.len(), 6);
}

#[tokio::test]
async fn bad_requests_are_rejected_and_logged() {
    let sim = start().await;
    assert_eq!(invoke(&sim, "getCustomer", json!({})).await.0, 400);
    assert_eq!(invoke(&sim, "nope", json!({})).await.0, 404);
    let log = sim.sim.log();
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].status, 400);
    assert_eq!(log[0].source_address, "127.0.0.1");
}

#[tokio::test]
async fn fault_flag_switches_every_service_to_500() {
    let sim = start().await;
    let client = reqwest::Client::new();
    client
        .post(format!("{}/admin/fault", sim.url()))
        .json(&json!({"mode": "on"}))
        .send()
        .await
        .unwrap();
    for id in ["getSchedule", "getCustomer", "saveSummary"] {
        assert_eq!(invoke(&sim, id, json!({"contactId": "42"})).await.0, 500);
    }
    sim.sim.set_fault(Fault::Garbage);
    let text = client
        .post(format!("{}/invoke/getSchedule", sim.url()))
        .json(&json!({}))
        .send()
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_err());
    sim.sim.set_fault(Fault::Off);
    assert_eq!(invoke(&sim, "getSchedule", json!({})).await.0, 200);
    let log: Vec<Value> = reqwest::get(format!("{}/admin/log", sim.url()))
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(log.len(), 5);
}

#[tokio::test]
async fn custom_descriptor_sets_are_served_verbatim() {
    let empty = BackendSim::new(vec![], Dataset::techsupport())
        .spawn("127.0.0.1:0")
        .await
        .unwrap();
    let ids: Vec<String> = reqwest::get(format!("{}/services", empty.url()))
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert!(ids.is_empty());
}
