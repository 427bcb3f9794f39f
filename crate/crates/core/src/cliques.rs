//! Maximal cliques by Bron–Kerbosch with pivoting, on bitset adjacency.
//!
//! Vertices are visited in ascending order and the pivot is the vertex of
//! `P ∪ X` with the most neighbours in `P` (lowest index on ties), so the
//! output is deterministic.

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let t = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + t)
            })
        })
    }
}

/// All maximal cliques of the graph on `0..n` whose edges are given by
/// `adjacent` (queried for `i < j` only). Each clique is sorted; the list
/// is sorted lexicographically.
pub fn maximal_cliques<F>(n: usize, adjacent: F) -> Vec<Vec<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    let mut nbrs = vec![Bits::empty(n); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if adjacent(i, j) {
                nbrs[i].insert(j);
                nbrs[j].insert(i);
            }
        }
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    expand(&nbrs, &mut r, Bits::full(n), Bits::empty(n), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn expand(nbrs: &[Bits], r: &mut Vec<usize>, mut p: Bits, mut x: Bits, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .or(&x)
        .iter()
        .max_by(|&a, &b| p.count_and(&nbrs[a]).cmp(&p.count_and(&nbrs[b])).then(b.cmp(&a)))
        .expect("P is nonempty");
    let candidates: Vec<usize> = p.and_not(&nbrs[pivot]).iter().collect();
    for v in candidates {
        r.push(v);
        expand(nbrs, r, p.and(&nbrs[v]), x.and(&nbrs[v]), out);
        r.pop();
        p.remove(v);
        x.insert(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every subset that is a clique and not extendable, by brute force.
    fn brute(n: usize, adj: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
        let is_clique = |s: u32| {
            (0..n).all(|i| (i + 1..n).all(|j| s & (1 << i) == 0 || s & (1 << j) == 0 || adj(i, j)))
        };
        let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
            .filter(|&s| is_clique(s))
            .filter(|&s| (0..n).all(|v| s & (1 << v) != 0 || !is_clique(s | (1 << v))))
            .map(|s| (0..n).filter(|&i| s & (1 << i) != 0).collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        // Deterministic pseudo-random graphs from a simple LCG.
        let mut seed: u64 = 7;
        for n in 1..=9 {
            for _ in 0..20 {
                let mut edges = vec![vec![false; n]; n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let e = (seed >> 33) % 2 == 0;
                        edges[i][j] = e;
                        edges[j][i] = e;
                    }
                }
                let adj = |i: usize, j: usize| edges[i][j];
                assert_eq!(maximal_cliques(n, adj), brute(n, &adj));
            }
        }
    }

    #[test]
    fn isolated_and_complete() {
        assert_eq!(maximal_cliques(3, |_, _| false), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(maximal_cliques(4, |_, _| true), vec![vec![0, 1, 2, 3]]);
        assert!(maximal_cliques(0, |_, _| true).is_empty());
        assert_eq!(maximal_cliques(70, |_, _| true)[0].len(), 70);
    }
}
