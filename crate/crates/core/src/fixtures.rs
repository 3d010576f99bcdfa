//! The TechSupport sample application and the catalogue it binds to.

use serde_json::Value as Json;

use crate::descriptor::{parse_descriptor, ServiceDescriptor};
use crate::dsl::parse_app;
use crate::model::Application;

/// Canonical document of the five-form sample app.
pub const TECHSUPPORT_APP: &str = include_str!("../fixtures/techsupport.app.json");

/// Descriptor documents exactly as the simulated backend advertises them.
pub const TECHSUPPORT_SERVICES: &str = include_str!("../fixtures/techsupport.services.json");

/// Registry id of a backend discovered at `http://127.0.0.1:<any port>`.
pub const TECHSUPPORT_SYSTEM_ID: &str = "sys-12ca17b4";

/// Variants of the sample app with one planted defect each, keyed by the
/// lowercased diagnostic code the defect must produce.
pub const BROKEN_VARIANTS: [(&str, &str); 10] = [
    (
        "capability_kind_mismatch",
        include_str!("../fixtures/broken/capability_kind_mismatch.app.json"),
    ),
    (
        "duplicate_field_id",
        include_str!("../fixtures/broken/duplicate_field_id.app.json"),
    ),
    (
        "missing_required_input",
        include_str!("../fixtures/broken/missing_required_input.app.json"),
    ),
    (
        "no_entry_form",
        include_str!("../fixtures/broken/no_entry_form.app.json"),
    ),
    (
        "repeating_to_scalar",
        include_str!("../fixtures/broken/repeating_to_scalar.app.json"),
    ),
    ("syntax_error", include_str!("../fixtures/broken/syntax_error.app.json")),
    (
        "type_mismatch",
        include_str!("../fixtures/broken/type_mismatch.app.json"),
    ),
    (
        "unknown_field_kind",
        include_str!("../fixtures/broken/unknown_field_kind.app.json"),
    ),
    (
        "unknown_parameter",
        include_str!("../fixtures/broken/unknown_parameter.app.json"),
    ),
    (
        "unresolved_nav_target",
        include_str!("../fixtures/broken/unresolved_nav_target.app.json"),
    ),
];

pub fn techsupport_app() -> Application {
    parse_app(TECHSUPPORT_APP).expect("sample app parses")
}

pub fn techsupport_service_documents() -> Vec<Json> {
    serde_json::from_str(TECHSUPPORT_SERVICES).expect("sample services parse")
}

/// The sample catalogue as the registry stores it after discovering the
/// simulated backend on the loopback address.
pub fn techsupport_catalogue() -> Vec<ServiceDescriptor> {
    techsupport_service_documents()
        .iter()
        .map(|doc| {
            let mut d = parse_descriptor(doc).expect("sample descriptor is valid");
            d.system_id = TECHSUPPORT_SYSTEM_ID.to_string();
            d
        })
        .collect()
}
