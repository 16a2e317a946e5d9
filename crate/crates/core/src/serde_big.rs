use std::fmt::Display;

use serde::Serializer;

/// Serializes big integers as decimal strings.
pub fn to_decimal<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}
