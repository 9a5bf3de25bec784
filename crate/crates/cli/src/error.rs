use serde::Serialize;

/// Failure of a command, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent input; exit status 2.
    #[error("{0}")]
    Input(String),
    /// A numerical step failed or a tolerance was missed; exit status 1.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// `{"error": {"kind": ..., "message": ..., "exit_code": ...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            message: String,
            exit_code: i32,
        }
        #[derive(Serialize)]
        struct Outer<'a> {
            error: Inner<'a>,
        }
        let body = Outer { error: Inner { kind: self.kind(), message: self.to_string(), exit_code: self.exit_code() } };
        serde_json::to_string(&body).expect("error report serializes")
    }
}

impl From<wavefocus::Error> for CliError {
    fn from(e: wavefocus::Error) -> Self {
        use wavefocus::Error as E;
        match e {
            E::NotConverged { .. } | E::Singular(_) | E::BoundViolation { .. } | E::InfeasibleSeparation { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("invalid configuration: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_exit_one_and_input_errors_two() {
        let nc = wavefocus::Error::NotConverged { residual: 1.0, tol: 1e-8, iterations: 3 };
        assert_eq!(CliError::from(nc).exit_code(), 1);
        let bv = wavefocus::Error::BoundViolation { min_psi: 0.0, half_delta: 0.1 };
        assert_eq!(CliError::from(bv).exit_code(), 1);
        let parse = wavefocus::Error::Parse { line: 1, message: "bad".into() };
        assert_eq!(CliError::from(parse).exit_code(), 2);
        let budget = wavefocus::Error::BudgetExceeded { what: "x", count: 2, limit: 1 };
        assert_eq!(CliError::from(budget).exit_code(), 2);
    }

    #[test]
    fn error_json_is_machine_readable() {
        let v: serde_json::Value = serde_json::from_str(&CliError::Numerical("off".into()).to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "numerical");
        assert_eq!(v["error"]["exit_code"], 1);
        assert_eq!(v["error"]["message"], "off");
    }
}
