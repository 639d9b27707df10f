//! Line-oriented key-value reports: one `key: value` per line, keys are
//! `[a-z0-9_.]+`, values run to the end of the line. Keys may repeat.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        debug_assert!(valid_key(&key), "bad report key {key:?}");
        let value = value.to_string().replace('\n', " ");
        self.entries.push((key, value));
        self
    }

    /// Appends `other` with every key prefixed by `prefix.`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: &Report) {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}.{k}"), v.clone()));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '.')
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("report line {line}: {message}")]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for Report {
    type Err = ReportParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut r = Report::new();
        for (i, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |m: &str| ReportParseError { line: i + 1, message: m.to_string() };
            let (k, v) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
            if !valid_key(k) {
                return Err(err("invalid key"));
            }
            r.entries.push((k.to_string(), v.strip_prefix(' ').unwrap_or(v).to_string()));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new();
        r.push("nonsingular", true).push("singular_primes", "2, 3").push("note", "");
        let mut outer = Report::new();
        outer.push("rows", 2);
        outer.extend_prefixed("n1", &r);
        let parsed: Report = outer.to_string().parse().unwrap();
        assert_eq!(parsed, outer);
        assert_eq!(parsed.get("n1.singular_primes"), Some("2, 3"));
        assert!("no colon here".parse::<Report>().is_err());
    }
}
