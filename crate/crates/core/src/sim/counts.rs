use std::collections::BTreeMap;

use crate::circuit::Circuit;
use crate::{Error, Result};

/// Histogram of measured bitstrings.
///
/// Outcomes are stored packed (qubit `i` is bit `i`); the text form puts
/// qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    num_qubits: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl ShotCounts {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits <= 64, "outcomes are packed into 64 bits");
        ShotCounts {
            num_qubits,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn add(&mut self, outcome: u64, count: u64) {
        debug_assert!(self.num_qubits == 64 || outcome >> self.num_qubits == 0);
        if count > 0 {
            *self.counts.entry(outcome).or_insert(0) += count;
            self.total += count;
        }
    }

    pub fn merge(&mut self, other: &ShotCounts) {
        assert_eq!(self.num_qubits, other.num_qubits);
        for (&k, &v) in &other.counts {
            self.add(k, v);
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn frequency(&self, outcome: u64) -> f64 {
        self.get(outcome) as f64 / self.total as f64
    }

    pub fn render(&self, outcome: u64) -> String {
        (0..self.num_qubits)
            .map(|i| if outcome >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<u64> {
        if s.len() > 64 {
            return Err(Error::Format(format!("bitstring too long: {} bits", s.len())));
        }
        s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
            '0' => Ok(acc),
            '1' => Ok(acc | 1 << i),
            _ => Err(Error::Format(format!("invalid bitstring '{s}'"))),
        })
    }

    /// Text-keyed view, qubit 0 leftmost.
    pub fn to_string_map(&self) -> BTreeMap<String, u64> {
        self.iter().map(|(k, v)| (self.render(k), v)).collect()
    }

    /// Builds counts from text keys, checking that every key has `num_qubits`
    /// characters.
    pub fn from_string_map(num_qubits: usize, map: &BTreeMap<String, u64>) -> Result<Self> {
        let mut out = ShotCounts::new(num_qubits);
        for (k, &v) in map {
            if k.len() != num_qubits {
                return Err(Error::Format(format!(
                    "bitstring '{k}' has length {}, expected {num_qubits}",
                    k.len()
                )));
            }
            out.add(Self::parse_bitstring(k)?, v);
        }
        Ok(out)
    }

    /// Maps register outcomes back to the first `logical` qubits of the
    /// circuit's input, following its final permutation.
    pub fn decode(&self, circuit: &Circuit, logical: usize) -> ShotCounts {
        let mut out = ShotCounts::new(logical);
        for (k, v) in self.iter() {
            out.add(circuit.decode_bits(k, logical), v);
        }
        out
    }

    /// Total-variation distance to a reference distribution over the same
    /// register, indexed by packed outcome.
    pub fn tv_distance(&self, reference: &[f64]) -> f64 {
        let mut d: f64 = reference
            .iter()
            .enumerate()
            .map(|(k, p)| (self.frequency(k as u64) - p).abs())
            .sum();
        d += self
            .iter()
            .filter(|&(k, _)| k as usize >= reference.len())
            .map(|(_, v)| v as f64 / self.total as f64)
            .sum::<f64>();
        d / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_qubit_zero_first() {
        let c = ShotCounts::new(3);
        assert_eq!(c.render(0b001), "100");
        assert_eq!(c.render(0b110), "011");
        assert_eq!(ShotCounts::parse_bitstring("011").unwrap(), 0b110);
        assert!(ShotCounts::parse_bitstring("01x").is_err());
    }

    #[test]
    fn string_map_validation() {
        let mut m = BTreeMap::new();
        m.insert("01".to_string(), 3);
        m.insert("11".to_string(), 1);
        let c = ShotCounts::from_string_map(2, &m).unwrap();
        assert_eq!(c.total(), 4);
        assert_eq!(c.to_string_map(), m);
        m.insert("1".to_string(), 1);
        assert!(ShotCounts::from_string_map(2, &m).is_err());
    }

    #[test]
    fn tv_distance_basics() {
        let mut c = ShotCounts::new(1);
        c.add(0, 50);
        c.add(1, 50);
        assert!(c.tv_distance(&[0.5, 0.5]) < 1e-15);
        assert!((c.tv_distance(&[1.0, 0.0]) - 0.5).abs() < 1e-15);
    }
}
