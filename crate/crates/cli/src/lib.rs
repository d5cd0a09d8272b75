//! Files, reports and suites behind the `budgeted-efx` command.

pub mod bench;
pub mod error;
pub mod generate;
pub mod io;
pub mod solve;

pub use error::{exit, CliError};

use budgeted_efx::SearchBudget;

/// Environment variable overriding the default search cap.
pub const CAP_ENV: &str = "BUDGETED_EFX_CAP";

/// The search cap: an explicit value wins over the environment, which wins over the default.
pub fn search_budget(explicit: Option<u64>, env: Option<&str>) -> Result<SearchBudget, CliError> {
    let cap = match (explicit, env) {
        (Some(cap), _) => cap,
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CAP_ENV}={text:?} is not a positive integer")))?,
        (None, None) => return Ok(SearchBudget::default()),
    };
    Ok(SearchBudget::new(cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_precedence() {
        assert_eq!(search_budget(None, None).unwrap(), SearchBudget::default());
        assert_eq!(search_budget(None, Some("12")).unwrap().max_assignments(), 12);
        assert_eq!(search_budget(Some(5), Some("12")).unwrap().max_assignments(), 5);
        assert!(search_budget(None, Some("lots")).is_err());
        assert!(search_budget(Some(0), None).is_err());
    }
}
