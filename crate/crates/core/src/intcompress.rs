//! Simple16 integer compression.
//!
//! Each 32-bit word holds a 4-bit selector in its top bits and 28 payload
//! bits. The selector picks one of sixteen layouts; values are packed from
//! the least significant bit upwards. Layout table (bits × count):
//!
//! | sel | layout              | values |
//! |-----|---------------------|--------|
//! | 0   | 1×28                | 28     |
//! | 1   | 2×7, 1×14           | 21     |
//! | 2   | 1×7, 2×7, 1×7       | 21     |
//! | 3   | 1×14, 2×7           | 21     |
//! | 4   | 2×14                | 14     |
//! | 5   | 4×1, 3×8            | 9      |
//! | 6   | 3×1, 4×4, 3×3       | 8      |
//! | 7   | 4×7                 | 7      |
//! | 8   | 5×4, 4×2            | 6      |
//! | 9   | 4×2, 5×4            | 6      |
//! | 10  | 6×3, 5×2            | 5      |
//! | 11  | 5×2, 6×3            | 5      |
//! | 12  | 7×4                 | 4      |
//! | 13  | 10×1, 9×2           | 3      |
//! | 14  | 14×2                | 2      |
//! | 15  | 28×1                | 1      |
//!
//! The encoder is greedy: at each position it takes the first selector whose
//! layout fits the upcoming values (a short tail may fill a layout only
//! partially). Compression is a pure function of the input, so equal inputs
//! give bit-identical blocks and blocks can be compared directly as keys.

use crate::error::{Error, Result};

pub const MAX_VALUE: u32 = (1 << 28) - 1;

const LAYOUTS: [&[(u32, u32)]; 16] = [
    &[(1, 28)],
    &[(2, 7), (1, 14)],
    &[(1, 7), (2, 7), (1, 7)],
    &[(1, 14), (2, 7)],
    &[(2, 14)],
    &[(4, 1), (3, 8)],
    &[(3, 1), (4, 4), (3, 3)],
    &[(4, 7)],
    &[(5, 4), (4, 2)],
    &[(4, 2), (5, 4)],
    &[(6, 3), (5, 2)],
    &[(5, 2), (6, 3)],
    &[(7, 4)],
    &[(10, 1), (9, 2)],
    &[(14, 2)],
    &[(28, 1)],
];

fn widths(selector: usize) -> impl Iterator<Item = u32> {
    LAYOUTS[selector]
        .iter()
        .flat_map(|&(bits, count)| std::iter::repeat_n(bits, count as usize))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompressedBlock {
    words: Vec<u32>,
    original_length: usize,
}

impl CompressedBlock {
    pub fn from_raw(words: Vec<u32>, original_length: usize) -> Self {
        CompressedBlock {
            words,
            original_length,
        }
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }
}

pub fn compress(values: &[u32]) -> Result<CompressedBlock> {
    if let Some((position, &value)) = values.iter().enumerate().find(|(_, &v)| v > MAX_VALUE) {
        return Err(Error::ValueOutOfRange { position, value });
    }
    let mut words = Vec::with_capacity(values.len() / 4 + 1);
    let mut pos = 0;
    while pos < values.len() {
        let rest = &values[pos..];
        let (selector, taken) = (0..16)
            .find_map(|sel| {
                let mut n = 0;
                for (bits, &v) in widths(sel).zip(rest) {
                    if v >> bits != 0 {
                        return None;
                    }
                    n += 1;
                }
                Some((sel, n))
            })
            .expect("selector 15 fits every in-range value");
        let mut word = (selector as u32) << 28;
        let mut shift = 0;
        for (bits, &v) in widths(selector).zip(&rest[..taken]) {
            word |= v << shift;
            shift += bits;
        }
        words.push(word);
        pos += taken;
    }
    Ok(CompressedBlock {
        words,
        original_length: values.len(),
    })
}

pub fn decompress(block: &CompressedBlock) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(block.original_length);
    decompress_into(block, &mut out)?;
    Ok(out)
}

pub fn decompress_into(block: &CompressedBlock, out: &mut Vec<u32>) -> Result<()> {
    let target = out.len() + block.original_length;
    let mut words = block.words.iter();
    while out.len() < target {
        let word = *words
            .next()
            .ok_or(Error::CorruptBlock("block ends before its original length"))?;
        let selector = (word >> 28) as usize;
        let mut shift = 0;
        for bits in widths(selector) {
            if out.len() == target {
                break;
            }
            out.push((word >> shift) & ((1 << bits) - 1));
            shift += bits;
        }
    }
    if words.next().is_some() {
        return Err(Error::CorruptBlock("trailing words after the last value"));
    }
    Ok(())
}

/// Σ original lengths / Σ words over a set of blocks.
pub fn compression_ratio<'a>(blocks: impl IntoIterator<Item = &'a CompressedBlock>) -> Result<f64> {
    let (values, words) = blocks
        .into_iter()
        .fold((0usize, 0usize), |(v, w), b| (v + b.original_length, w + b.words.len()));
    if words == 0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(values as f64 / words as f64)
}
