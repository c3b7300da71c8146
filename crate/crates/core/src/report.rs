//! Machine-readable verification reports.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEntry {
    pub identity: String,
    pub status: Status,
    pub residual_terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, identity: impl Into<String>, pass: bool, residual_terms: usize) {
        self.entries.push(ReportEntry {
            identity: identity.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            residual_terms,
            detail: None,
        });
    }

    /// Attaches a residual dump (or other note) to the most recent entry.
    pub fn annotate_last(&mut self, detail: String) {
        if let Some(e) = self.entries.last_mut() {
            e.detail = Some(detail);
        }
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn get(&self, identity: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.identity == identity)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::new();
        r.push("[Dy, eta] = q eta_bar", true, 0);
        r.push("broken", false, 3);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v[0]["status"], "pass");
        assert_eq!(v[1]["residual_terms"], 3);
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 1);
    }
}
