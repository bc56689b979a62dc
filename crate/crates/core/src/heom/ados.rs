//! Auxiliary-density-operator index space.

use crate::error::{invalid, Error, Result};
use std::collections::HashMap;

pub const DEFAULT_ADO_CAP: usize = 1_000_000;

/// `C(k + m, m)`, or `None` on overflow.
pub fn ado_count(k: usize, m_max: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..=m_max as u128 {
        acc = acc.checked_mul(k as u128 + i)? / i;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Occupation vectors with `Σ n_k ≤ m_max` in lexicographic order; index 0
/// is the physical state.
#[derive(Clone, Debug)]
pub struct AdoSpace {
    pub k: usize,
    pub m_max: usize,
    pub ados: Vec<Vec<u16>>,
    up: Vec<Option<usize>>,
    down: Vec<Option<usize>>,
}

impl AdoSpace {
    pub fn len(&self) -> usize {
        self.ados.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ados.is_empty()
    }

    pub fn level(&self, a: usize) -> usize {
        self.ados[a].iter().map(|&x| x as usize).sum()
    }

    /// Index of `n + e_slot`, if inside the truncation.
    pub fn up(&self, a: usize, slot: usize) -> Option<usize> {
        self.up[a * self.k + slot]
    }

    /// Index of `n − e_slot`, if `n_slot > 0`.
    pub fn down(&self, a: usize, slot: usize) -> Option<usize> {
        self.down[a * self.k + slot]
    }

    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.ados.binary_search_by(|x| x.as_slice().cmp(occ)).ok()
    }
}

fn fill(k: usize, slot: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if slot == k {
        out.push(cur.clone());
        return;
    }
    for v in 0..=left {
        cur.push(v as u16);
        fill(k, slot + 1, left - v, cur, out);
        cur.pop();
    }
}

pub fn enumerate_ados(k: usize, m_max: usize) -> Result<AdoSpace> {
    enumerate_ados_capped(k, m_max, DEFAULT_ADO_CAP)
}

pub fn enumerate_ados_capped(k: usize, m_max: usize, cap: usize) -> Result<AdoSpace> {
    if k == 0 {
        return Err(invalid("K", "need at least one exponential term"));
    }
    if m_max > u16::MAX as usize {
        return Err(invalid("m_max", "too large"));
    }
    let size = ado_count(k, m_max).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::AdoCap { size, cap });
    }
    let mut ados = Vec::with_capacity(size);
    fill(k, 0, m_max, &mut Vec::with_capacity(k), &mut ados);
    debug_assert_eq!(ados.len(), size);
    let lookup: HashMap<&[u16], usize> = ados.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
    let mut up = vec![None; size * k];
    let mut down = vec![None; size * k];
    let mut probe = vec![0u16; k];
    for (a, occ) in ados.iter().enumerate() {
        let level: usize = occ.iter().map(|&x| x as usize).sum();
        probe.copy_from_slice(occ);
        for s in 0..k {
            if level < m_max {
                probe[s] += 1;
                up[a * k + s] = lookup.get(probe.as_slice()).copied();
                probe[s] -= 1;
            }
            if occ[s] > 0 {
                probe[s] -= 1;
                down[a * k + s] = lookup.get(probe.as_slice()).copied();
                probe[s] += 1;
            }
        }
    }
    Ok(AdoSpace { k, m_max, ados, up, down })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(enumerate_ados(2, 2).unwrap().len(), 6);
        assert_eq!(enumerate_ados(21, 2).unwrap().len(), 253);
        assert_eq!(enumerate_ados(1, 0).unwrap().len(), 1);
        assert_eq!(ado_count(10, 4), Some(1001));
    }

    #[test]
    fn order_and_neighbors() {
        let s = enumerate_ados(2, 2).unwrap();
        let want: Vec<Vec<u16>> = vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]];
        assert_eq!(s.ados, want);
        for a in 0..s.len() {
            for k in 0..2 {
                if let Some(b) = s.up(a, k) {
                    assert_eq!(s.down(b, k), Some(a));
                }
            }
        }
        assert_eq!(s.up(2, 0), None);
        assert_eq!(s.index_of(&[1, 1]), Some(4));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_ados_capped(30, 8, 1000), Err(Error::AdoCap { .. })));
    }
}
