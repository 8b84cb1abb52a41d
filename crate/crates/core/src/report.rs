//! Verification reports. A failed identity is not an error: verifiers list
//! every violation together with the full residual combination, which is
//! what one needs to debug sign conventions downstream.

use std::fmt;

#[derive(Clone, Debug)]
pub struct Violation {
    /// Which identity failed, on which arguments.
    pub what: String,
    /// The nonzero residual, rendered exactly.
    pub residual: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub context: String,
    pub violations: Vec<Violation>,
    /// Number of identity instances actually evaluated.
    pub checked: usize,
    /// Instances skipped because an evaluation would leave the weight window.
    pub skipped: usize,
}

impl Report {
    pub fn new(context: impl Into<String>) -> Self {
        Report {
            context: context.into(),
            ..Report::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violate(&mut self, what: impl Into<String>, residual: impl Into<String>) {
        self.violations.push(Violation {
            what: what.into(),
            residual: residual.into(),
        });
    }

    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(
                f,
                "{}: pass ({} checked, {} skipped)",
                self.context, self.checked, self.skipped
            )
        } else {
            writeln!(
                f,
                "{}: FAIL ({} violations, {} checked, {} skipped)",
                self.context,
                self.violations.len(),
                self.checked,
                self.skipped
            )?;
            for v in &self.violations {
                writeln!(f, "  {} -> residual {}", v.what, v.residual)?;
            }
            Ok(())
        }
    }
}
