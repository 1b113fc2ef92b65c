//! Bit-level I/O and index entropy coders.

mod bits;
mod golomb;
mod permute;

pub use bits::{BitSink, BitSource};
pub use golomb::{golomb_parameter, unary_decode, unary_encode, unary_len, GolombCoder};
pub use permute::{
    permuted_rank_decode, permuted_rank_encode, permuted_rank_encode_flags, LazyPermutation,
};

/// Width of a raw index field able to carry `0..=n` (the value `n` is the
/// refresh escape): `ceil(log2(n + 1))`.
pub fn raw_index_width(n: u64) -> u32 {
    64 - n.leading_zeros()
}
