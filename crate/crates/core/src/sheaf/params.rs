use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("p={0} is not prime")]
    NonPrime(u64),
    #[error("N > D > 1 violated")]
    Ordering,
    #[error("gcd(N,D)=1 violated")]
    NotCoprime,
    #[error("gcd(ND,p)=1 violated")]
    DivisibleByP,
}

/// The data (p, N, D) with N > D > 1, gcd(N, D) = 1 and ND prime to p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SheafParams {
    p: u32,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "D")]
    d: u64,
}

impl SheafParams {
    #[allow(non_snake_case)]
    pub fn new(p: u32, N: u64, D: u64) -> Result<Self, ParamsError> {
        if !is_prime(p as u64) {
            return Err(ParamsError::NonPrime(p as u64));
        }
        if !(N > D && D > 1) {
            return Err(ParamsError::Ordering);
        }
        if num_integer::gcd(N, D) != 1 {
            return Err(ParamsError::NotCoprime);
        }
        if N.is_multiple_of(p as u64) || D.is_multiple_of(p as u64) {
            return Err(ParamsError::DivisibleByP);
        }
        Ok(SheafParams { p, n: N, d: D })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> u64 {
        self.n
    }

    #[allow(non_snake_case)]
    pub fn D(&self) -> u64 {
        self.d
    }
}
