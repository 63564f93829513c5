//! Scrambled Sobol exploration of the coefficient box.

use crate::error::{Error, Result};
use crate::optimizer::SearchSpace;
use crate::ring_model::CoefficientTensor;

/// Dimensions served by one scrambling seed of the Sobol generator.
const BLOCK_DIMS: usize = sobol_burley::NUM_DIMENSIONS as usize;
/// Padded dimensions supported (16 independently scrambled blocks).
pub const MAX_QMC_DIMS: usize = 16 * BLOCK_DIMS;
/// Points available per sequence.
pub const MAX_QMC_POINTS: usize = 1 << 16;

fn block_seed(seed: u64, block: usize) -> u32 {
    // splitmix64 finalizer over (seed, block)
    let mut z = seed.wrapping_add((block as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z ^ (z >> 32)) as u32
}

/// Point `index` of the sequence, in `[0, 1)^dim`. Independent of how many
/// points are drawn in total.
pub fn unit_point(index: usize, dim: usize, seed: u64) -> Result<Vec<f64>> {
    if dim > MAX_QMC_DIMS {
        return Err(Error::DimensionTooLarge { dim, max: MAX_QMC_DIMS });
    }
    if index >= MAX_QMC_POINTS {
        return Err(Error::SequenceTooLong { n: index + 1, max: MAX_QMC_POINTS });
    }
    Ok((0..dim)
        .map(|d| {
            let (block, within) = (d / BLOCK_DIMS, d % BLOCK_DIMS);
            f64::from(sobol_burley::sample(index as u32, within as u32, block_seed(seed, block)))
        })
        .collect())
}

/// Points `start..start + n` scaled to the search box.
pub fn sample_qmc_range(space: &SearchSpace, start: usize, n: usize, seed: u64) -> Result<Vec<CoefficientTensor>> {
    if space.dim() > MAX_QMC_DIMS {
        return Err(Error::DimensionTooLarge { dim: space.dim(), max: MAX_QMC_DIMS });
    }
    if start + n > MAX_QMC_POINTS {
        return Err(Error::SequenceTooLong { n: start + n, max: MAX_QMC_POINTS });
    }
    (start..start + n)
        .map(|i| {
            let u = unit_point(i, space.dim(), seed)?;
            let x = u.iter().map(|&u| space.lower() + u * (space.upper() - space.lower())).collect();
            space.unflatten(x)
        })
        .collect()
}

pub fn sample_qmc(space: &SearchSpace, n: usize, seed: u64) -> Result<Vec<CoefficientTensor>> {
    sample_qmc_range(space, 0, n, seed)
}
