//! Core of the screenforge platform: the declarative application model and
//! everything that can be computed from it without a network.
//!
//! * [`dsl`], [`structure`], [`validate`], [`lint`] and [`edit`] cover the
//!   design-time model.
//! * [`descriptor`] and [`binding`] describe backend services and type-check
//!   bindings against them.
//! * [`transform`] and [`adapter`] are the gateway's mediation layer.
//! * [`bundle`] and [`catalogue`] are the deployment step.

pub mod adapter;
pub mod binding;
pub mod bundle;
pub mod catalogue;
pub mod descriptor;
pub mod diag;
pub mod dsl;
pub mod edit;
pub mod fixtures;
pub mod kind;
pub mod lint;
pub mod model;
pub mod path;
pub mod projection;
pub mod structure;
pub mod transform;
pub mod validate;
pub mod value;
pub mod workspace;

pub use adapter::{generate_adapter, AdapterSpec};
pub use binding::check_binding;
pub use bundle::{build_bundle, Bundle, Target};
pub use catalogue::{Catalogue, CatalogueEntry};
pub use descriptor::{parse_descriptor, system_id_for, ParameterSpec, ServiceDescriptor};
pub use diag::{Diagnostic, Severity};
pub use dsl::{parse_app, serialize_app};
pub use edit::{apply_edit, EditCommand, EditOp};
pub use kind::{Capability, FieldKind};
pub use lint::lint;
pub use model::Application;
pub use projection::project_form;
pub use transform::transform;
pub use validate::validate;
pub use value::Value;
