//! Runtime side of screenforge: interprets deployed app models per session
//! and mediates every backend call through generated adapters.

pub mod http;
pub mod invoke;
pub mod runtime;
pub mod session;

pub use invoke::{invoke_adapter, InvokeError, ADAPTER_TIMEOUT};
pub use runtime::{CapabilityStubs, Gateway, GatewayError};
pub use session::{FormState, SaveResult, Session};
