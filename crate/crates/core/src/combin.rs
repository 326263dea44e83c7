//! Small combinatorial helpers: binomials, colex ranking of k-subsets,
//! increasing index sets and content digests.

use sha2::{Digest, Sha256};

/// `C(n, k)` or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Colex rank of a subset given as a bitmask: `sum C(c_i, i)` over the
/// sorted members `c_1 < c_2 < ...` (1-based `i`).
pub fn colex_rank(mask: u64) -> u64 {
    let mut rank = 0;
    let mut i = 1;
    let mut m = mask;
    while m != 0 {
        let c = u64::from(m.trailing_zeros());
        rank += binomial(c, i).unwrap_or(0);
        i += 1;
        m &= m - 1;
    }
    rank
}

/// Inverse of [`colex_rank`] for subsets of size `k`.
pub fn colex_unrank(mut rank: u64, k: u32) -> u64 {
    let mut mask = 0u64;
    for i in (1..=u64::from(k)).rev() {
        // largest c with C(c, i) <= rank
        let mut c = i - 1;
        while binomial(c + 1, i).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binomial(c, i).unwrap_or(0);
        mask |= 1 << c;
    }
    mask
}

/// All strictly increasing index sets of `0..n` with exactly `size` members,
/// in lexicographic order.
pub fn index_sets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - size + i {
                cur[i] += 1;
                for j in i + 1..size {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Members of a bitmask in increasing order.
pub fn mask_members(mask: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 1), Some(6));
        assert_eq!(binomial(6, 2), Some(15));
        assert_eq!(binomial(9, 3), Some(84));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
    }

    #[test]
    fn colex_round_trip() {
        let n = 9;
        let k = 3;
        let total = binomial(n, k).unwrap();
        let mut prev = None;
        for r in 0..total {
            let m = colex_unrank(r, k as u32);
            assert_eq!(m.count_ones(), 3);
            assert!(m < 1 << n);
            assert_eq!(colex_rank(m), r);
            if let Some(p) = prev {
                // colex: compare by largest differing element
                assert!(m > p);
            }
            prev = Some(m);
        }
    }

    #[test]
    fn index_sets_lexicographic() {
        let sets = index_sets(4, 2);
        assert_eq!(
            sets,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(index_sets(3, 0), vec![Vec::<usize>::new()]);
        assert!(index_sets(2, 3).is_empty());
    }
}
