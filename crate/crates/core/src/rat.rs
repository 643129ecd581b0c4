//! Exact rational scalars.
//!
//! Every probability in the crate is a [`Rat`]. `BigRational` keeps values
//! reduced with a positive denominator after every operation, which is the
//! canonical form the rest of the crate relies on for equality tests.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rat;

/// Builds `num/den` from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRatError(pub String);

/// Parses `p/q` or a bare integer. Whitespace inside the token is rejected.
pub fn parse_rat(token: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(token.to_string());
    if token.is_empty() || token.chars().any(char::is_whitespace) {
        return Err(err());
    }
    match token.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num).map_err(|_| err())?;
            let den = BigInt::from_str(den).map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(num, den))
        }
        None => BigInt::from_str(token)
            .map(Rat::from_integer)
            .map_err(|_| err()),
    }
}

/// True when the value is stored reduced with a positive denominator.
pub fn is_canonical(value: &Rat) -> bool {
    value.denom().is_positive() && value.numer().gcd(value.denom()).is_one()
}

/// True when `0 <= value <= 1`.
pub fn is_probability(value: &Rat) -> bool {
    !value.is_negative() && *value <= Rat::one()
}
