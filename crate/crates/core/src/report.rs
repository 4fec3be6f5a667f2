//! Machine-readable report rendering shared by every check.

/// Flat `key=value` view of a report.
pub trait KeyValues {
    fn key_values(&self) -> Vec<(String, String)>;
}

/// One `key=value` line per entry.
pub fn render_key_values(report: &impl KeyValues) -> String {
    report
        .key_values()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
}
