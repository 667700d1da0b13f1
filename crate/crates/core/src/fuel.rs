use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("normalization did not finish within {limit} steps")]
    FuelExhausted { limit: u64 },
}

/// A budget of reduction steps (beta and projection contractions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    limit: Option<u64>,
    used: u64,
}

impl Fuel {
    pub const fn unlimited() -> Self {
        Fuel { limit: None, used: 0 }
    }

    pub const fn limited(steps: u64) -> Self {
        Fuel {
            limit: Some(steps),
            used: 0,
        }
    }

    pub fn from_option(limit: Option<u64>) -> Self {
        Fuel { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    /// Spends one step.
    #[inline]
    pub fn tick(&mut self) -> Result<(), NormalizeError> {
        self.used += 1;
        match self.limit {
            Some(limit) if self.used > limit => Err(NormalizeError::FuelExhausted { limit }),
            _ => Ok(()),
        }
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::unlimited()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limited_fuel_runs_out() {
        let mut fuel = Fuel::limited(2);
        assert!(fuel.tick().is_ok());
        assert!(fuel.tick().is_ok());
        assert_eq!(fuel.tick(), Err(NormalizeError::FuelExhausted { limit: 2 }));
    }

    #[test]
    fn unlimited_never_fails() {
        let mut fuel = Fuel::unlimited();
        for _ in 0..1000 {
            fuel.tick().unwrap();
        }
        assert_eq!(fuel.used(), 1000);
    }
}
