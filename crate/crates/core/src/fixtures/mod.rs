//! Synthetic ground-truth fixtures: deterministic scenarios rendered into
//! per-app extractions and SAR containers, plus the availability matrix and
//! the expected-recovery oracle the conformance suite checks the pipeline
//! against.

pub mod conformance;
pub mod matrix;
pub mod render;
pub mod rules;
pub mod sar_render;
pub mod scenario;
pub mod writers;

pub use matrix::{availability_matrix, AccountState, AvailabilityMatrix, Category, CellSymbol};
pub use render::{container_root, container_uuid, render_extraction, render_many};
pub use rules::{expected_recovery, ExpectedEvent};
pub use sar_render::{render_sar, telemetry_csv, TESLA_TELEMETRY_COLUMNS};
pub use scenario::{generate_scenario, Action, ActionKind, Scenario, ScenarioError};
pub use writers::RenderError;

/// A scenario together with its derived expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub scenario: Scenario,
}

impl GroundTruth {
    pub fn new(scenario: Scenario) -> Self {
        GroundTruth { scenario }
    }

    pub fn generate(seed: u64, length: usize) -> Result<Self, ScenarioError> {
        Ok(GroundTruth {
            scenario: generate_scenario(seed, length)?,
        })
    }

    /// The oracle: events the pipeline must recover for this app, platform
    /// and account state. Pure scenario-and-rules computation; no extractor
    /// code is involved.
    pub fn expected(
        &self,
        app: crate::locator::AppId,
        platform: crate::locator::Platform,
        state: AccountState,
    ) -> Vec<ExpectedEvent> {
        expected_recovery(&self.scenario, app, platform, state)
    }
}
