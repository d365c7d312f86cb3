//! Integer partitions and bounded enumeration.

use std::fmt;

use crate::error::{invalid, Result};

/// A weakly decreasing sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("partition parts must be positive");
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid("partition parts must be weakly decreasing");
        }
        Ok(Self { parts })
    }

    /// Builds a partition from parts that may contain trailing zeros.
    pub fn from_padded(parts: &[u32]) -> Result<Self> {
        let end = parts.iter().position(|&p| p == 0).unwrap_or(parts.len());
        if parts[end..].iter().any(|&p| p != 0) {
            return invalid("zero part followed by a positive part");
        }
        Self::new(parts[..end].to_vec())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part, zero for the empty partition.
    pub fn first(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Part `i` (zero-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// `2 nu`: each part doubled.
    pub fn doubled(&self) -> Partition {
        Partition { parts: self.parts.iter().map(|p| 2 * p).collect() }
    }

    /// `nu^2`: each part repeated twice.
    pub fn squared(&self) -> Partition {
        Partition { parts: self.parts.iter().flat_map(|&p| [p, p]).collect() }
    }

    pub fn conjugate(&self) -> Partition {
        let parts = (0..self.first()).map(|c| self.parts.iter().filter(|&&p| p > c).count() as u32).collect();
        Partition { parts }
    }

    /// Dominance order on partitions of the same weight.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        let (mut a, mut b) = (0, 0);
        for i in 0..self.len().max(other.len()) {
            a += self.part(i);
            b += other.part(i);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Calls `f(arm, leg, coarm, coleg)` for every box of the diagram.
    pub fn for_each_box(&self, mut f: impl FnMut(u32, u32, u32, u32)) {
        let conj = self.conjugate();
        for (i, &p) in self.parts.iter().enumerate() {
            for j in 0..p {
                let arm = p - j - 1;
                let leg = conj.parts[j as usize] - i as u32 - 1;
                f(arm, leg, j, i as u32);
            }
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Partitions of a fixed weight with bounded parts and length, in reverse
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct WeightShell {
    current: Option<Vec<u32>>,
    max_length: usize,
}

impl WeightShell {
    pub fn new(weight: u32, max_part: u32, max_length: usize) -> Self {
        let fits = u64::from(max_part) * max_length as u64 >= u64::from(weight);
        let current = if weight == 0 {
            Some(Vec::new())
        } else if fits && max_part > 0 {
            let mut v = Vec::new();
            fill(&mut v, weight, max_part);
            Some(v)
        } else {
            None
        };
        Self { current, max_length }
    }

    fn advance(&mut self, mut p: Vec<u32>) -> Option<Vec<u32>> {
        let mut rest: u64 = 0;
        for i in (0..p.len()).rev() {
            let pi = p[i];
            rest += u64::from(pi);
            if pi > 1 {
                let cap = u64::from(pi - 1) * (self.max_length - i - 1) as u64;
                let remainder = rest - u64::from(pi) + 1;
                if cap >= remainder {
                    p.truncate(i + 1);
                    p[i] = pi - 1;
                    fill(&mut p, remainder as u32, pi - 1);
                    return Some(p);
                }
            }
        }
        None
    }
}

fn fill(v: &mut Vec<u32>, mut remainder: u32, bound: u32) {
    while remainder > 0 {
        let x = remainder.min(bound);
        v.push(x);
        remainder -= x;
    }
}

impl Iterator for WeightShell {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.current.take()?;
        self.current = self.advance(cur.clone());
        Some(Partition { parts: cur })
    }
}

/// Every partition with `nu_1 <= max_part` and `len <= max_length`, the
/// empty one included, ordered by weight.
pub fn enumerate_partitions(max_part: u32, max_length: usize) -> impl Iterator<Item = Partition> {
    let top = u64::from(max_part) * max_length as u64;
    let top = u32::try_from(top).unwrap_or(u32::MAX);
    (0..=top).flat_map(move |w| WeightShell::new(w, max_part, max_length))
}
