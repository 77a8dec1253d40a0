use crate::{Error, Result};

/// Walsh sign pattern for `n` equal interaction segments (`n` a power of two).
///
/// The pattern is the Thue–Morse sequence `s_k = (−1)^{popcount(k)}`: it is
/// balanced (`Σ s_k = 0`) and for `n ≥ 4` also cancels the first moment
/// `Σ k·s_k`, which nulls residual displacements from a static detuning that
/// grow linearly along the gate.
pub fn walsh_signs(n_segments: usize) -> Result<Vec<i8>> {
    if n_segments < 2 || !n_segments.is_power_of_two() {
        return Err(Error::Schedule(format!("Walsh modulation needs a power-of-two segment count ≥ 2, got {n_segments}")));
    }
    Ok((0..n_segments).map(|k| if (k as u32).count_ones() % 2 == 0 { 1 } else { -1 }).collect())
}

/// Indices `k` such that a π pulse is needed between segment `k` and `k + 1`.
pub fn sign_flips(signs: &[i8]) -> Vec<usize> {
    signs.windows(2).enumerate().filter(|(_, w)| w[0] != w[1]).map(|(k, _)| k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_patterns() {
        assert_eq!(walsh_signs(2).unwrap(), vec![1, -1]);
        assert_eq!(walsh_signs(4).unwrap(), vec![1, -1, -1, 1]);
        assert_eq!(walsh_signs(8).unwrap(), vec![1, -1, -1, 1, -1, 1, 1, -1]);
        assert!(walsh_signs(6).is_err());
        assert!(walsh_signs(1).is_err());
    }

    #[test]
    fn eight_segments_need_five_pulses_and_cancel_moments() {
        let s = walsh_signs(8).unwrap();
        assert_eq!(sign_flips(&s).len(), 5);
        assert_eq!(s.iter().map(|&v| v as i32).sum::<i32>(), 0);
        assert_eq!(s.iter().enumerate().map(|(k, &v)| k as i32 * v as i32).sum::<i32>(), 0);
        assert_eq!(s.iter().map(|&v| v as i32).product::<i32>(), 1);
    }
}
