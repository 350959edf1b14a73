use serde_json::json;
use tanglefree::Error;

/// Failure of a run, carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn verification(message: impl Into<String>) -> Self {
        CliError { kind: "verification", message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError { kind: "domain", message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            "domain" | "geometry" => 2,
            "resource" => 3,
            "numerical" => 4,
            "verification" => 5,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind, "exit_code": self.exit_code(), "message": self.message } }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { kind: e.kind(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { kind: "io", message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { kind: "json", message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError { kind: "io", message: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let code = |kind| CliError { kind, message: String::new() }.exit_code();
        assert_eq!(code("domain"), 2);
        assert_eq!(code("geometry"), 2);
        assert_eq!(code("resource"), 3);
        assert_eq!(code("numerical"), 4);
        assert_eq!(code("verification"), 5);
        assert_eq!(code("io"), 1);
        assert_eq!(code("cache"), 1);
    }

    #[test]
    fn error_json_shape() {
        let v: serde_json::Value = serde_json::from_str(&CliError::validation("bad").to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "domain");
        assert_eq!(v["error"]["exit_code"], 2);
        assert_eq!(v["error"]["message"], "bad");
    }
}
