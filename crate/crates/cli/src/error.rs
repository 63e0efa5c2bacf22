use answer_sim::corpus::CorpusError;
use answer_sim::datagen::DatagenError;
use answer_sim::providers::ProviderError;
use answer_sim::report::ReportError;
use serde_json::{json, Map, Value};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PROVIDER: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    pub metric: Option<String>,
    pub record: Option<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
            metric: None,
            record: None,
        }
    }

    fn provider(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PROVIDER,
            ..Self::validation(message)
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        let mut m = Map::new();
        let kind = if self.code == EXIT_PROVIDER { "provider" } else { "validation" };
        m.insert("error".into(), json!(kind));
        m.insert("message".into(), json!(self.message));
        if let Some(x) = &self.metric {
            m.insert("metric".into(), json!(x));
        }
        if let Some(x) = &self.record {
            m.insert("record".into(), json!(x));
        }
        Value::Object(m).to_string()
    }
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::validation(s)
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        let base = if e.is_provider() {
            CliError::provider(e.to_string())
        } else {
            CliError::validation(e.to_string())
        };
        CliError {
            metric: e.metric().map(str::to_owned),
            record: e.record().map(str::to_owned),
            ..base
        }
    }
}

impl From<ProviderError> for CliError {
    fn from(e: ProviderError) -> Self {
        CliError::provider(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<DatagenError> for CliError {
    fn from(e: DatagenError) -> Self {
        match e {
            DatagenError::Provider(p) => p.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(e.to_string())
    }
}
