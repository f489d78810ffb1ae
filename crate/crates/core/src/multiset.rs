//! Index arithmetic for dense row-major order-`n` arrays with `m` entries per
//! axis.

use alloc::vec::Vec;

/// Writes the base-`m` digits of `flat` (most significant first) into `digits`.
#[inline]
pub(crate) fn decompose(mut flat: usize, m: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = flat % m;
        flat /= m;
    }
}

#[inline]
pub(crate) fn compose(digits: &[usize], m: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * m + d)
}

/// Flat index of the sorted rearrangement of the tuple at `flat`.
pub(crate) fn canonical(flat: usize, m: usize, scratch: &mut [usize]) -> usize {
    decompose(flat, m, scratch);
    scratch.sort_unstable();
    compose(scratch, m)
}

/// All non-decreasing tuples `j_1 <= ... <= j_n` over `0..m`, in lexicographic
/// order, each as `(flat index, run-length encoded (cell, multiplicity) list)`.
pub(crate) fn sorted_tuples(m: usize, n: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    if n == 0 {
        out.push((0, Vec::new()));
        return out;
    }
    let mut tuple = alloc::vec![0usize; n];
    loop {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &j in &tuple {
            match runs.last_mut() {
                Some((cell, k)) if *cell == j => *k += 1,
                _ => runs.push((j, 1)),
            }
        }
        out.push((compose(&tuple, m), runs));
        // next non-decreasing tuple
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if tuple[pos] + 1 < m {
                let v = tuple[pos] + 1;
                for t in &mut tuple[pos..] {
                    *t = v;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let mut d = [0usize; 3];
        decompose(5 * 16 + 2 * 4 + 3, 4, &mut d);
        assert_eq!(d, [1, 2, 3]);
        assert_eq!(compose(&d, 4), 27);
        assert_eq!(
            canonical(compose(&[3, 0, 2], 4), 4, &mut d),
            compose(&[0, 2, 3], 4)
        );
    }

    #[test]
    fn sorted_tuple_count_is_multiset_count() {
        // C(m+n-1, n)
        assert_eq!(sorted_tuples(4, 2).len(), 10);
        assert_eq!(sorted_tuples(3, 3).len(), 10);
        assert_eq!(sorted_tuples(5, 0).len(), 1);
        let t = sorted_tuples(3, 3);
        assert_eq!(t[0].1, alloc::vec![(0, 3)]);
        assert_eq!(t[1].1, alloc::vec![(0, 2), (1, 1)]);
        assert_eq!(t.last().unwrap().0, compose(&[2, 2, 2], 3));
    }
}
