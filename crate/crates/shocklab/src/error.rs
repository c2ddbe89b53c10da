use std::fmt;

/// Exit status of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input = 1,
    Internal = 2,
}

#[derive(Debug)]
pub struct ToolError {
    pub kind: ExitKind,
    pub stage: Option<&'static str>,
    pub message: String,
}

pub type ToolResult<T> = Result<T, ToolError>;

impl ToolError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Input,
            stage: None,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Internal,
            stage: None,
            message: message.into(),
        }
    }

    pub fn at(mut self, stage: &'static str) -> Self {
        self.stage.get_or_insert(stage);
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for ToolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(s) => write!(f, "stage {s}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ToolError {}

impl From<shocklab_core::Error> for ToolError {
    fn from(e: shocklab_core::Error) -> Self {
        use shocklab_core::Error as E;
        match e {
            E::UnacceptedShock { .. } => Self::internal(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

/// Write and serialization failures are the tool's problem, not the input's.
pub fn io_error(what: &str, e: impl fmt::Display) -> ToolError {
    ToolError::internal(format!("{what}: {e}"))
}
