//! Tree-node indexes and the words they spell.
//!
//! Node `n` on level `d` of the full `m`-ary tree is the base-`m` expansion of
//! `n`, least-significant digit rightmost, each remainder shifted up by one so
//! that `0` stays free for the identity. Short expansions are left-padded with
//! digit `1`, so every word on level `d` has exactly `d` letters.

use crate::error::{Error, Result};
use crate::group::Word;

/// Default cap on render depth; `4^20` nodes per level is already far past desk scale.
pub const DEFAULT_MAX_DEPTH: u32 = 20;

fn check_alphabet(m: u64) -> Result<()> {
    if (2..=255).contains(&m) {
        Ok(())
    } else {
        Err(Error::AlphabetSize(m))
    }
}

/// A node on one level of the full `m`-ary tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeIndex {
    n: u64,
    m: u8,
    depth: u32,
}

impl NodeIndex {
    pub fn new(n: u64, m: u8, depth: u32) -> Result<Self> {
        let leaves = leaf_count(m, depth)?;
        if n >= leaves {
            return Err(Error::IndexOutOfRange {
                index: n,
                m: m as u64,
                depth,
            });
        }
        Ok(Self { n, m, depth })
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn word(&self) -> Word {
        let mut digits = vec![0; self.depth as usize];
        decode_into(self.n, self.m, &mut digits);
        Word::new(digits)
    }
}

/// Node totals for a tree of bounded depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCount {
    /// `m^D`, the nodes on the deepest level.
    pub leaves: u64,
    /// `m + m² + … + m^D`, every node below the root.
    pub total: u64,
}

/// `m^depth`, overflow-checked.
pub fn leaf_count(m: u8, depth: u32) -> Result<u64> {
    check_alphabet(m as u64)?;
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    (m as u64).checked_pow(depth).ok_or(Error::DepthOverflow {
        m: m as u64,
        depth,
        max_depth: max_depth(m),
    })
}

/// Largest depth whose node total still fits in 64 bits.
pub fn max_depth(m: u8) -> u32 {
    let m = m as u64;
    let (mut depth, mut level, mut total) = (0u32, 1u64, 0u64);
    loop {
        let Some(next) = level.checked_mul(m) else {
            return depth;
        };
        let Some(sum) = total.checked_add(next) else {
            return depth;
        };
        depth += 1;
        level = next;
        total = sum;
    }
}

pub fn node_counts(m: u8, depth: u32) -> Result<NodeCount> {
    check_alphabet(m as u64)?;
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    let overflow = || Error::DepthOverflow {
        m: m as u64,
        depth,
        max_depth: max_depth(m),
    };
    let mut level = 1u64;
    let mut total = 0u64;
    for _ in 0..depth {
        level = level.checked_mul(m as u64).ok_or_else(overflow)?;
        total = total.checked_add(level).ok_or_else(overflow)?;
    }
    Ok(NodeCount {
        leaves: level,
        total,
    })
}

/// Writes the digits of node `n` into `out`, whose length is the depth.
///
/// No range checks: `n` must be below `m^out.len()`. This is the allocation-free
/// form used inside render loops.
#[inline]
pub fn decode_into(mut n: u64, m: u8, out: &mut [u8]) {
    let m = m as u64;
    for slot in out.iter_mut().rev() {
        *slot = (n % m) as u8 + 1;
        n /= m;
    }
    debug_assert_eq!(n, 0, "index exceeds m^depth");
}

/// The `depth`-letter word of node `n` in the full `m`-ary tree.
pub fn decode_index(n: u64, m: u8, depth: u32) -> Result<Word> {
    Ok(NodeIndex::new(n, m, depth)?.word())
}

/// Inverse of [`decode_index`]: `Σ (digit − 1)·m^i` with `i` counted from the right.
pub fn encode_word(word: &Word, m: u8) -> Result<u64> {
    check_alphabet(m as u64)?;
    let mut n = 0u64;
    for (position, &digit) in word.digits().iter().enumerate() {
        if digit == 0 || digit > m {
            return Err(Error::DigitOutOfRange { digit, position, m });
        }
        n = n
            .checked_mul(m as u64)
            .and_then(|n| n.checked_add(digit as u64 - 1))
            .ok_or(Error::DepthOverflow {
                m: m as u64,
                depth: word.len() as u32,
                max_depth: max_depth(m),
            })?;
    }
    Ok(n)
}
