//! Serde adapters writing [`Natural`](crate::arith::Natural) as a decimal string.

use serde::Serializer;

use crate::arith::Natural;

pub fn serialize<S: Serializer>(n: &Natural, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(n: &Option<Natural>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(n) => s.collect_str(n),
            None => s.serialize_none(),
        }
    }
}
