use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order parameter `s ∈ [-1, 1]`: −1 Husimi Q, 0 Wigner, +1 Glauber P.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Ordering(f64);

impl Ordering {
    pub const Q: Ordering = Ordering(-1.0);
    pub const WIGNER: Ordering = Ordering(0.0);
    pub const P: Ordering = Ordering(1.0);

    pub fn new(s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::OrderingOutOfRange(s));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Ordering {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<Ordering> for f64 {
    fn from(o: Ordering) -> f64 {
        o.0
    }
}
