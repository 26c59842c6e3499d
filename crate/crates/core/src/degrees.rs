//! Degree sequences and the half-edge index space they induce.
//!
//! Half-edges are numbered `0..ell` in vertex order, so the half-edges of a
//! vertex form a contiguous range and sibling enumeration is O(1).

use alloc::string::ToString;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Index of a half-edge in `0..ell`.
pub type HalfEdge = u32;
/// Index of a vertex in `0..n`.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    /// `offsets[v]..offsets[v + 1]` are the half-edges of `v`.
    offsets: Vec<u32>,
    owner: Vec<Vertex>,
}

/// Summary of the regularity statistics of a degree sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityReport {
    /// Mean forward degree of a uniform half-edge, `sum d(d-1) / sum d`.
    pub nu: f64,
    pub max_degree: u32,
    pub min_degree: u32,
    pub ell_even: bool,
    pub min_degree_ok: bool,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((vertex, &d)) = degrees.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::DegreeTooSmall {
                vertex,
                degree: d as u64,
            });
        }
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total % 2 == 1 {
            return Err(Error::OddTotal(total));
        }
        if total > u32::MAX as u64 {
            return Err(Error::Overflow("half-edge count"));
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut owner = Vec::with_capacity(total as usize);
        let mut acc = 0u32;
        for (v, &d) in degrees.iter().enumerate() {
            offsets.push(acc);
            owner.extend(core::iter::repeat_n(v as Vertex, d as usize));
            acc += d;
        }
        offsets.push(acc);
        Ok(Self {
            degrees,
            offsets,
            owner,
        })
    }

    /// `n` vertices of degree `d`.
    pub fn make_regular(n: usize, d: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices { min: 2, got: n });
        }
        if d < 2 {
            return Err(Error::DegreeTooSmall {
                vertex: 0,
                degree: d as u64,
            });
        }
        let total = n as u64 * d as u64;
        if total % 2 == 1 {
            return Err(Error::OddTotal(total));
        }
        Self::new(alloc::vec![d; n])
    }

    /// Parses whitespace- or newline-separated degrees.
    pub fn parse(text: &str) -> Result<Self> {
        let degrees = text
            .split_whitespace()
            .enumerate()
            .map(|(record, token)| {
                token.parse::<u32>().map_err(|_| Error::ParseDegree {
                    record,
                    token: token.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(degrees)
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Number of half-edges.
    pub fn ell(&self) -> usize {
        self.owner.len()
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.owner.len() / 2
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.degrees[v as usize]
    }

    #[inline]
    pub fn owner(&self, x: HalfEdge) -> Vertex {
        self.owner[x as usize]
    }

    /// Forward degree of a half-edge: the number of siblings, `d(v(x)) - 1`.
    #[inline]
    pub fn deg(&self, x: HalfEdge) -> u32 {
        self.degrees[self.owner[x as usize] as usize] - 1
    }

    #[inline]
    pub fn half_edges_of(&self, v: Vertex) -> Range<HalfEdge> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    #[inline]
    pub fn are_siblings(&self, x: HalfEdge, y: HalfEdge) -> bool {
        x != y && self.owner(x) == self.owner(y)
    }

    /// The `r`-th sibling of `z` (`r < deg(z)`), skipping `z` itself.
    #[inline]
    pub fn sibling(&self, z: HalfEdge, r: u32) -> HalfEdge {
        let start = self.offsets[self.owner(z) as usize];
        let y = start + r;
        if y >= z {
            y + 1
        } else {
            y
        }
    }

    pub fn siblings(&self, z: HalfEdge) -> impl Iterator<Item = HalfEdge> + '_ {
        self.half_edges_of(self.owner(z)).filter(move |&y| y != z)
    }

    pub fn regularity(&self) -> RegularityReport {
        let (num, den) = self.degrees.iter().fold((0u128, 0u128), |(a, b), &d| {
            let d = d as u128;
            (a + d * (d - 1), b + d)
        });
        RegularityReport {
            nu: num as f64 / den as f64,
            max_degree: self.degrees.iter().copied().max().unwrap_or(0),
            min_degree: self.degrees.iter().copied().min().unwrap_or(0),
            ell_even: self.ell() % 2 == 0,
            min_degree_ok: self.degrees.iter().all(|&d| d >= 2),
        }
    }

    /// Canonical text form, one degree per line.
    pub fn to_text(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        for d in &self.degrees {
            let _ = writeln!(s, "{d}");
        }
        s
    }

    pub(crate) fn check_half_edge(&self, x: u64) -> Result<HalfEdge> {
        if x < self.ell() as u64 {
            Ok(x as HalfEdge)
        } else {
            Err(Error::HalfEdgeOutOfRange {
                index: x,
                len: self.ell(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_sizes() {
        let s = DegreeSequence::make_regular(4, 3).unwrap();
        assert_eq!((s.ell(), s.m()), (12, 6));
        let s = DegreeSequence::make_regular(5, 2).unwrap();
        assert_eq!((s.ell(), s.m()), (10, 5));
    }

    #[test]
    fn regular_rejects_odd_total_and_small_degree() {
        assert_eq!(DegreeSequence::make_regular(3, 3), Err(Error::OddTotal(9)));
        assert!(matches!(
            DegreeSequence::make_regular(4, 1),
            Err(Error::DegreeTooSmall { .. })
        ));
        assert!(matches!(
            DegreeSequence::make_regular(1, 2),
            Err(Error::TooFewVertices { .. })
        ));
    }

    #[test]
    fn parse_records() {
        let s = DegreeSequence::parse("3 3 3 3").unwrap();
        assert_eq!(s.degrees(), &[3, 3, 3, 3]);
        let s = DegreeSequence::parse("2\n3\n3 4\n").unwrap();
        assert_eq!(s.ell(), 12);
        assert!(matches!(
            DegreeSequence::parse("1 3"),
            Err(Error::DegreeTooSmall {
                vertex: 0,
                degree: 1
            })
        ));
        assert!(matches!(
            DegreeSequence::parse("3 x 3"),
            Err(Error::ParseDegree { record: 1, .. })
        ));
        assert!(matches!(
            DegreeSequence::parse("3 -3"),
            Err(Error::ParseDegree { .. })
        ));
        assert_eq!(DegreeSequence::parse("3 2"), Err(Error::OddTotal(5)));
        assert_eq!(DegreeSequence::parse("  \n"), Err(Error::EmptySequence));
    }

    #[test]
    fn nu_values() {
        let s = DegreeSequence::make_regular(10, 3).unwrap();
        assert_eq!(s.regularity().nu, 2.0);
        let s = DegreeSequence::parse("2 2 2 2").unwrap();
        assert_eq!(s.regularity().nu, 1.0);
        let r = DegreeSequence::parse("2 3 3 4").unwrap().regularity();
        assert!((r.nu - 26.0 / 12.0).abs() < 1e-15);
        assert_eq!((r.min_degree, r.max_degree), (2, 4));
        assert!(r.ell_even && r.min_degree_ok);
    }

    #[test]
    fn siblings_and_owner() {
        let s = DegreeSequence::parse("2 3 3 4").unwrap();
        assert_eq!(s.half_edges_of(1), 2..5);
        assert_eq!(s.deg(3), 2);
        let sibs: Vec<_> = s.siblings(3).collect();
        assert_eq!(sibs, [2, 4]);
        assert_eq!(s.sibling(3, 0), 2);
        assert_eq!(s.sibling(3, 1), 4);
        assert!(s.are_siblings(2, 4));
        assert!(!s.are_siblings(2, 2));
        assert!(!s.are_siblings(1, 2));
        assert_eq!(
            s.check_half_edge(12),
            Err(Error::HalfEdgeOutOfRange { index: 12, len: 12 })
        );
    }
}
