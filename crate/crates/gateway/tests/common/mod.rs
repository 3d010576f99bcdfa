#![allow(dead_code)]

use std::sync::Arc;

use screenforge_backend_sim::{BackendSim, RunningSim};
use screenforge_core::fixtures::{techsupport_app, techsupport_catalogue};
use screenforge_core::{build_bundle, generate_adapter, AdapterSpec, Bundle, Target};
use screenforge_gateway::Gateway;

pub struct Fixture {
    pub sim: RunningSim,
    pub gateway: Arc<Gateway>,
    pub ios: Bundle,
    pub android: Bundle,
    pub adapters: Vec<AdapterSpec>,
}

pub fn adapters_for(endpoint: &str) -> Vec<AdapterSpec> {
    let app = techsupport_app();
    let catalogue = techsupport_catalogue();
    app.bindings()
        .map(|(form, role, b)| {
            let d = catalogue
                .iter()
                .find(|d| d.service_id == b.service_ref.service_id)
                .unwrap();
            generate_adapter(&app, &form.id, role, d, endpoint).unwrap()
        })
        .collect()
}

pub async fn fixture_with(gateway: Gateway) -> Fixture {
    let sim = BackendSim::techsupport().spawn("127.0.0.1:0").await.unwrap();
    let adapters = adapters_for(&sim.url());
    let app = techsupport_app();
    let ios = build_bundle(&app, Target::Ios, &adapters).unwrap();
    let android = build_bundle(&app, Target::Android, &adapters).unwrap();
    gateway.host(ios.clone(), &adapters).unwrap();
    gateway.host(android.clone(), &adapters).unwrap();
    Fixture {
        sim,
        gateway: Arc::new(gateway),
        ios,
        android,
        adapters,
    }
}

pub async fn fixture() -> Fixture {
    fixture_with(Gateway::new()).await
}

impl Fixture {
    pub fn calls(&self, service: &str) -> usize {
        self.sim.sim.log().iter().filter(|e| e.service_id == service).count()
    }

    pub fn adapter(&self, form: &str) -> &AdapterSpec {
        self.adapters.iter().find(|a| a.form_id == form).unwrap()
    }
}
