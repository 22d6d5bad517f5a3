//! End-to-end verification suite: one function per criterion, each returning
//! a pass/fail report with the measured numbers.

mod criteria;
mod shared;

pub use criteria::{all_criteria, run_criterion, CRITERION_COUNT};
pub use shared::SuiteContext;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {} - {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Run every criterion (sequentially; individual criteria parallelize
/// internally). Returns one report per criterion.
pub fn run_all(ctx: &SuiteContext) -> Vec<CriterionReport> {
    (1..=CRITERION_COUNT).map(|id| run_criterion(id, ctx)).collect()
}
