//! Individualization-refinement search over vertex orderings.
//!
//! Callers turn every leaf ordering into an encoding and keep the least one;
//! the leaf set is closed under automorphisms, so leaves with equal encodings
//! differ exactly by an automorphism.

pub(crate) struct Colored {
    /// Initial invariant color of each vertex.
    pub init: Vec<u64>,
    /// Adjacency with an invariant edge label (multiplicity, color, ...).
    pub adj: Vec<Vec<(usize, u32)>>,
}

fn ranks<T: Ord + Clone>(keys: &[T]) -> (Vec<u32>, usize) {
    let mut uniq: Vec<T> = keys.to_vec();
    uniq.sort();
    uniq.dedup();
    let out = keys.iter().map(|k| uniq.binary_search(k).unwrap() as u32).collect();
    (out, uniq.len())
}

fn refine(g: &Colored, colors: &mut Vec<u32>) {
    let mut ncell = {
        let mut c = colors.clone();
        c.sort();
        c.dedup();
        c.len()
    };
    loop {
        if ncell == colors.len() {
            return;
        }
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(u32, u32)> = g.adj[v].iter().map(|&(w, l)| (colors[w], l)).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let (next, count) = ranks(&sigs);
        *colors = next;
        if count == ncell {
            return;
        }
        ncell = count;
    }
}

fn search(g: &Colored, colors: Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    let n = colors.len();
    let mut size = vec![0usize; n];
    for &c in &colors {
        size[c as usize] += 1;
    }
    let Some(target) = (0..n).find(|&c| size[c] > 1) else {
        f(&colors);
        return;
    };
    let target = target as u32;
    for v in 0..n {
        if colors[v] != target {
            continue;
        }
        let mut next: Vec<u32> = colors
            .iter()
            .enumerate()
            .map(|(w, &c)| if c > target || (c == target && w != v) { c + 1 } else { c })
            .collect();
        refine(g, &mut next);
        search(g, next, f);
    }
}

/// Calls `f` with `pos`, where `pos[v]` is the new index of vertex `v`.
pub(crate) fn for_each_leaf(g: &Colored, mut f: impl FnMut(&[u32])) {
    if g.init.is_empty() {
        f(&[]);
        return;
    }
    let (mut colors, _) = ranks(&g.init);
    refine(g, &mut colors);
    search(g, colors, &mut f);
}

/// Sign of the permutation `i -> p[i]`.
pub(crate) fn perm_sign(p: &[u32]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i8;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j] as usize;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_leaves_count_automorphisms() {
        // 4-cycle: 8 automorphisms, refinement cannot split anything.
        let adj = (0..4).map(|v| vec![((v + 1) % 4, 1), ((v + 3) % 4, 1)]).collect();
        let g = Colored { init: vec![0; 4], adj };
        let mut n = 0;
        for_each_leaf(&g, |_| n += 1);
        assert_eq!(n, 8);
    }

    #[test]
    fn signs() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
    }
}
