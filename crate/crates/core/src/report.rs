//! Shared pieces of the JSON outputs.

/// Significant digits kept for every probability written to a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant decimal digits (ties to even).
///
/// Serializing the result gives the short decimal form, so reports do not
/// carry accumulated rounding noise such as `0.009000000000000001`.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Pretty JSON with a trailing newline, the format of every file the tools write.
pub fn to_pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(0.1 * 0.9 * 0.1), 0.009);
        assert_eq!(serde_json::json!(round_significant(0.1 * 0.9 * 0.1)).to_string(), "0.009");
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(round_significant(1.0), 1.0);
        assert_eq!(round_significant(0.123456789012345), 0.123456789012);
        assert_eq!(round_significant(123456.7890123456), 123456.789012);
        assert_eq!(round_significant(2.5e-20), 2.5e-20);
    }
}
