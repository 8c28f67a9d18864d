use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A vector of binary values, one per variable (or vertex).
///
/// Serialized as a JSON array of `0`/`1` integers, which is also the wire
/// format used by remote solvers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    /// Draws `n` independent fair bits from `rng`, in index order.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Assignment((0..n).map(|_| rng.gen::<bool>()).collect())
    }

    /// Bits of the binary expansion of `code`, least significant bit first.
    pub fn from_index(n: usize, code: u64) -> Self {
        Assignment((0..n).map(|i| i < 64 && (code >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Complements every bit.
    pub fn complement(&self) -> Self {
        Assignment(self.0.iter().map(|b| !b).collect())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Assignment(")?;
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|&b| u8::from(b)))
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!(
                    "assignment values must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_zero_one_array() {
        let a = Assignment::from_bits(vec![true, false, true]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,0,1]");
        let back: Assignment = serde_json::from_str("[1,0,1]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Assignment>("[1,2]").is_err());
    }

    #[test]
    fn from_index_is_little_endian() {
        assert_eq!(
            Assignment::from_index(4, 0b0110).bits(),
            &[false, true, true, false]
        );
    }
}
