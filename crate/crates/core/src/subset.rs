//! Subsets of small ground sets as `u32` bitmasks. Bit `i` set means element
//! `i` (zero-based) is a member.

use alloc::vec::Vec;

pub type Mask = u32;

pub fn full(n: usize) -> Mask {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn contains(mask: Mask, i: usize) -> bool {
    mask >> i & 1 == 1
}

pub fn size(mask: Mask) -> usize {
    mask.count_ones() as usize
}

pub fn singleton(i: usize) -> Mask {
    1 << i
}

pub fn complement(mask: Mask, n: usize) -> Mask {
    !mask & full(n)
}

/// Members in increasing order.
pub fn members(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    core::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn from_members(items: &[usize]) -> Mask {
    items.iter().fold(0, |m, &i| m | singleton(i))
}

/// Prefix masks `{o_1..o_j}` for `j = 0..=n` along an ordering.
pub fn chain(ordering: &[usize]) -> Vec<Mask> {
    let mut out = Vec::with_capacity(ordering.len() + 1);
    let mut acc = 0;
    out.push(acc);
    for &i in ordering {
        acc |= singleton(i);
        out.push(acc);
    }
    out
}

/// Whether `ordering` is a permutation of `0..n`.
pub fn is_permutation(ordering: &[usize], n: usize) -> bool {
    ordering.len() == n && ordering.iter().all(|&i| i < n) && from_members(ordering) == full(n)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_helpers() {
        let m = from_members(&[0, 2]);
        assert_eq!(m, 0b101);
        assert_eq!(members(m).collect::<Vec<_>>(), alloc::vec![0, 2]);
        assert_eq!(complement(m, 3), 0b010);
        assert_eq!(size(full(5)), 5);
        assert_eq!(chain(&[2, 0]), alloc::vec![0, 0b100, 0b101]);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], alloc::vec![0, 2, 1]);
        assert!(permutations(4).iter().all(|p| is_permutation(p, 4)));
    }
}
