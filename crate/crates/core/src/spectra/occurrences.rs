//! Finding square templates in a patch, and the return vectors between their
//! occurrences.

use std::cmp::Ordering;

use memchr::memmem;
use serde::Serialize;

use crate::fusion::Patch;
use crate::{Error, Result};

/// A rectangular label array, row-major from the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u8>,
}

impl Template {
    /// The `size × size` block with lower-left cell `(x, y)`.
    pub fn from_patch(patch: &Patch, x: i64, y: i64, size: usize) -> Option<Self> {
        let mut labels = Vec::with_capacity(size * size);
        for yy in y..y + size as i64 {
            for xx in x..x + size as i64 {
                labels.push(patch.label_at(xx, yy)? as u8);
            }
        }
        Some(Self { width: size, height: size, labels })
    }

    fn row(&self, j: usize) -> &[u8] {
        &self.labels[j * self.width..(j + 1) * self.width]
    }
}

/// Lower-left cells of every occurrence of `template` in `host`, sorted by
/// `(y, x)`.
pub fn occurrences(template: &Template, host: &Patch) -> Result<Vec<(i64, i64)>> {
    let grid = host.grid()?;
    let (w, h) = (host.width() as usize, host.height() as usize);
    let (tw, th) = (template.width, template.height);
    let mut out = Vec::new();
    if tw == 0 || th == 0 || tw > w || th > h {
        return Ok(out);
    }
    let finder = memmem::Finder::new(template.row(0));
    for y in 0..=h - th {
        let row = &grid[y * w..(y + 1) * w];
        let mut from = 0;
        while let Some(found) = finder.find(&row[from..]) {
            let x = from + found;
            from = x + 1;
            let fits = (1..th).all(|j| &grid[(y + j) * w + x..(y + j) * w + x + tw] == template.row(j));
            if fits {
                out.push((x as i64, y as i64));
            }
        }
    }
    Ok(out)
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let r = (p & MODULUS as u128) as u64 + (p >> 61) as u64;
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    acc
}

/// Polynomial hashes of every `size × size` window of a `w × h` grid, indexed
/// by lower-left cell, `(w − size + 1)` per row.
pub(crate) fn window_hashes(grid: &[u8], w: usize, h: usize, size: usize) -> Vec<u64> {
    if size == 0 || size > w || size > h {
        return Vec::new();
    }
    const BX: u64 = 1_000_003;
    const BY: u64 = 998_244_353;
    let (ow, oh) = (w - size + 1, h - size + 1);
    let px = pow_mod(BX, size as u64);
    let py = pow_mod(BY, size as u64);
    let mut rows = vec![0u64; ow * h];
    for y in 0..h {
        let line = &grid[y * w..(y + 1) * w];
        let mut acc = 0;
        for (x, &c) in line.iter().enumerate() {
            acc = (mul_mod(acc, BX) + c as u64 + 1) % MODULUS;
            if x >= size {
                acc = (acc + MODULUS - mul_mod(line[x - size] as u64 + 1, px)) % MODULUS;
            }
            if x + 1 >= size {
                rows[y * ow + x + 1 - size] = acc;
            }
        }
    }
    let mut out = vec![0u64; ow * oh];
    for x in 0..ow {
        let mut acc = 0;
        for y in 0..h {
            acc = (mul_mod(acc, BY) + rows[y * ow + x]) % MODULUS;
            if y >= size {
                acc = (acc + MODULUS - mul_mod(rows[(y - size) * ow + x], py)) % MODULUS;
            }
            if y + 1 >= size {
                out[(y + 1 - size) * ow + x] = acc;
            }
        }
    }
    out
}

/// Occurrences of the `size × size` windows of `host`, grouped by content.
/// Each group lists lower-left cells; groups are verified cell by cell, so a
/// hash collision only splits work, never merges distinct windows.
pub(crate) fn window_classes(host: &Patch, size: usize) -> Result<Vec<Vec<(i64, i64)>>> {
    let grid = host.grid()?;
    let (w, h) = (host.width() as usize, host.height() as usize);
    let hashes = window_hashes(grid, w, h, size);
    if hashes.is_empty() {
        return Ok(Vec::new());
    }
    let ow = w - size + 1;
    let mut order: Vec<u32> = (0..hashes.len() as u32).collect();
    order.sort_unstable_by_key(|&i| (hashes[i as usize], i));
    let same = |a: usize, b: usize| {
        let (ax, ay, bx, by) = (a % ow, a / ow, b % ow, b / ow);
        (0..size).all(|j| grid[(ay + j) * w + ax..][..size] == grid[(by + j) * w + bx..][..size])
    };
    let mut classes = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let key = hashes[order[start] as usize];
        let end = start + order[start..].iter().take_while(|&&i| hashes[i as usize] == key).count();
        let mut pending: Vec<usize> = order[start..end].iter().map(|&i| i as usize).collect();
        while let Some(&rep) = pending.first() {
            let (class, rest): (Vec<usize>, Vec<usize>) = pending.into_iter().partition(|&i| same(rep, i));
            classes.push(class.into_iter().map(|i| ((i % ow) as i64, (i / ow) as i64)).collect());
            pending = rest;
        }
        start = end;
    }
    Ok(classes)
}

/// Return vectors of radius-`rho` patches: differences `q − p` between cells
/// whose `(2ρ+1)²` neighbourhoods agree. Contains 0 and is symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnVectorSet {
    pub rho: u32,
    /// Sorted by Euclidean norm, then lexicographically.
    pub vectors: Vec<(i64, i64)>,
}

impl ReturnVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: (i64, i64)) -> bool {
        self.vectors.binary_search_by(|p| cmp_norm(p, &v)).is_ok()
    }

    /// One of each `±v`, without 0.
    pub fn half(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.vectors.iter().copied().filter(|&(x, y)| x > 0 || (x == 0 && y > 0))
    }
}

fn cmp_norm(a: &(i64, i64), b: &(i64, i64)) -> Ordering {
    (a.0 * a.0 + a.1 * a.1).cmp(&(b.0 * b.0 + b.1 * b.1)).then(a.cmp(b))
}

/// Pairwise differences within one class are bounded by the patch, so a
/// bitset over `[−(w−1), w−1] × [−(h−1), h−1]` collects them.
pub fn return_vectors(host: &Patch, rho: u32, pair_budget: u64) -> Result<ReturnVectorSet> {
    let size = 2 * rho as usize + 1;
    let classes = window_classes(host, size)?;
    let pairs: u64 = classes.iter().map(|c| (c.len() as u64).pow(2)).sum();
    if pairs > pair_budget {
        return Err(Error::Budget { what: "return-vector pairs".into(), budget: pair_budget });
    }
    let (w, h) = (host.width(), host.height());
    let (bw, bh) = (2 * w - 1, 2 * h - 1);
    let mut bits = vec![0u64; ((bw * bh) as usize).div_ceil(64)];
    for class in &classes {
        for &(px, py) in class {
            for &(qx, qy) in class {
                let i = ((qy - py + h - 1) * bw + (qx - px + w - 1)) as usize;
                bits[i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut vectors = Vec::new();
    for (word_no, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let i = word_no as i64 * 64 + word.trailing_zeros() as i64;
            vectors.push((i % bw - (w - 1), i / bw - (h - 1)));
            word &= word - 1;
        }
    }
    vectors.sort_by(cmp_norm);
    Ok(ReturnVectorSet { rho, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fusion::build_supertile;
    use std::collections::BTreeSet;

    #[test]
    fn hashes_agree_with_naive_occurrences() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        for size in 1..=3 {
            let classes = window_classes(&p, size).unwrap();
            let total: usize = classes.iter().map(Vec::len).sum();
            let (w, h) = (p.width() as usize, p.height() as usize);
            assert_eq!(total, (w - size + 1) * (h - size + 1));
            for class in &classes {
                let t = Template::from_patch(&p, class[0].0, class[0].1, size).unwrap();
                assert_eq!(occurrences(&t, &p).unwrap().len(), class.len());
            }
        }
    }

    #[test]
    fn return_vectors_brute_force() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        let set = return_vectors(&p, 1, u64::MAX).unwrap();
        let mut naive = BTreeSet::new();
        let (w, h) = (p.width(), p.height());
        for py in 0..h - 2 {
            for px in 0..w - 2 {
                let a = Template::from_patch(&p, px, py, 3).unwrap();
                for qy in 0..h - 2 {
                    for qx in 0..w - 2 {
                        if Template::from_patch(&p, qx, qy, 3).unwrap() == a {
                            naive.insert((qx - px, qy - py));
                        }
                    }
                }
            }
        }
        assert_eq!(set.vectors.iter().copied().collect::<BTreeSet<_>>(), naive);
        assert!(set.contains((0, 0)));
        assert!(set.vectors.iter().all(|&(x, y)| set.contains((-x, -y))));
        assert!(matches!(return_vectors(&p, 0, 10), Err(Error::Budget { .. })));
    }
}
