//! Fixed-width little-endian bit packing. Value `i` occupies bits
//! `[i·w, (i+1)·w)` of the stream, least significant bit first.

use crate::error::{Error, Result};

/// Bytes needed for `n` values of `width` bits.
pub fn packed_len(n: usize, width: u32) -> usize {
    (n * width as usize).div_ceil(8)
}

pub fn pack(values: &[u64], width: u32) -> Vec<u8> {
    assert!((1..=64).contains(&width), "bit width {width} out of range");
    let mut out = vec![0u8; packed_len(values.len(), width)];
    let mut bit = 0usize;
    for &v in values {
        debug_assert!(width == 64 || v >> width == 0, "value {v} wider than {width} bits");
        for k in 0..width as usize {
            if (v >> k) & 1 == 1 {
                out[(bit + k) / 8] |= 1 << ((bit + k) % 8);
            }
        }
        bit += width as usize;
    }
    out
}

pub fn unpack(bytes: &[u8], width: u32, n: usize) -> Result<Vec<u64>> {
    assert!((1..=64).contains(&width), "bit width {width} out of range");
    let need = packed_len(n, width);
    if bytes.len() != need {
        return Err(Error::Truncated {
            expected: need,
            found: bytes.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    let mut bit = 0usize;
    for _ in 0..n {
        let mut v = 0u64;
        for k in 0..width as usize {
            if (bytes[(bit + k) / 8] >> ((bit + k) % 8)) & 1 == 1 {
                v |= 1 << k;
            }
        }
        out.push(v);
        bit += width as usize;
    }
    Ok(out)
}
