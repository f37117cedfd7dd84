//! Oriented graphs with external and internal vertices, Koszul signs and
//! canonical forms with signs.
//!
//! Orientation data is kept in standard order: external vertices by id,
//! internal vertices by id, then edges in list order, each edge directed
//! from its first to its second entry. Externals carry degree -m, internals
//! -n, edges n-1; only parities matter for signs.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::canon::{for_each_leaf, perm_sign, Colored};

/// Parities of the source dimension m and target dimension n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parity {
    pub m_odd: bool,
    pub n_odd: bool,
}

impl Parity {
    pub fn of(m: i64, n: i64) -> Self {
        Parity { m_odd: m.rem_euclid(2) == 1, n_odd: n.rem_euclid(2) == 1 }
    }

    pub fn all() -> [Parity; 4] {
        [Parity::of(1, 1), Parity::of(1, 2), Parity::of(2, 1), Parity::of(2, 2)]
    }

    /// Two-letter tag, parity of m first: `oo`, `oe`, `eo`, `ee`.
    pub fn tag(&self) -> &'static str {
        match (self.m_odd, self.n_odd) {
            (true, true) => "oo",
            (true, false) => "oe",
            (false, true) => "eo",
            (false, false) => "ee",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Parity::all().into_iter().find(|p| p.tag() == tag)
    }

    /// Position in [`Parity::all`].
    pub fn index(&self) -> usize {
        2 * (!self.m_odd) as usize + (!self.n_odd) as usize
    }

    pub fn m(&self) -> u8 {
        self.m_odd as u8
    }

    pub fn n(&self) -> u8 {
        self.n_odd as u8
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("permutation of length {0} does not match {1} degrees")]
    LengthMismatch(usize, usize),
    #[error("not a permutation")]
    NotPermutation,
    #[error("malformed graph encoding: {0}")]
    Malformed(String),
}

/// `(-1)^(d_a d_b)` accumulated over all pairs reordered by `perm`, where
/// `perm[i]` is the source index of the element placed at position `i`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i8, GraphError> {
    if perm.len() != degrees.len() {
        return Err(GraphError::LengthMismatch(perm.len(), degrees.len()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(GraphError::NotPermutation);
        }
    }
    let odd: Vec<usize> = perm.iter().map(|&p| p).filter(|&p| degrees[p].rem_euclid(2) == 1).collect();
    let mut sign = 1i8;
    for i in 0..odd.len() {
        for j in i + 1..odd.len() {
            if odd[i] > odd[j] {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedGraph {
    pub n_external: usize,
    pub n_internal: usize,
    pub edges: Vec<(u8, u8)>,
}

/// Canonical representative with the sign relating it to the input:
/// `input = sign * graph`, and `sign == 0` when an automorphism acts by -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedCanonical {
    pub graph: OrientedGraph,
    pub sign: i8,
}

impl OrientedGraph {
    pub fn new(n_external: usize, n_internal: usize, edges: Vec<(u8, u8)>) -> Self {
        OrientedGraph { n_external, n_internal, edges }
    }

    /// The single edge joining two external vertices.
    pub fn segment() -> Self {
        OrientedGraph::new(2, 0, vec![(0, 1)])
    }

    pub fn n_vertices(&self) -> usize {
        self.n_external + self.n_internal
    }

    pub fn is_internal(&self, v: u8) -> bool {
        (v as usize) >= self.n_external
    }

    /// First Betti number after gluing all external vertices together.
    pub fn complexity(&self) -> usize {
        self.edges.len().saturating_sub(self.n_internal)
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.n_vertices()];
        for &(a, b) in &self.edges {
            val[a as usize] += 1;
            val[b as usize] += 1;
        }
        val
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = n;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Homological degree `(n-1)E - nI - ms`.
    pub fn degree(&self, m: i64, n: i64) -> i64 {
        (n - 1) * self.edges.len() as i64 - n * self.n_internal as i64 - m * self.n_external as i64
    }

    /// Koszul sign for moving orientation data listed as `order` (indices
    /// into the standard order) into the standard order.
    pub fn reorder_sign(&self, order: &[usize], p: Parity) -> Result<i8, GraphError> {
        let mut degrees = vec![p.m() as i64; self.n_external];
        degrees.extend(std::iter::repeat(p.n() as i64).take(self.n_internal));
        degrees.extend(std::iter::repeat(1 - p.n() as i64).take(self.edges.len()));
        let mut inverse = vec![usize::MAX; order.len()];
        for (i, &o) in order.iter().enumerate() {
            if o >= inverse.len() {
                return Err(GraphError::NotPermutation);
            }
            inverse[o] = i;
        }
        koszul_sign(&inverse, &degrees)
    }

    pub fn encode(&self) -> String {
        self.to_string()
    }

    pub fn decode(text: &str) -> Result<Self, GraphError> {
        text.parse()
    }

    /// Whether [`canonicalize`] accepts the graph: the segment, or every
    /// external vertex is a leg on an internal vertex.
    pub fn is_well_formed(&self) -> bool {
        if self.n_internal == 0 {
            return self.n_external == 2 && self.edges.len() == 1 && self.edges[0].0 != self.edges[0].1;
        }
        let mut legs = vec![0; self.n_external];
        for &(a, b) in &self.edges {
            match (self.is_internal(a), self.is_internal(b)) {
                (true, true) => {}
                (false, true) => legs[a as usize] += 1,
                (true, false) => legs[b as usize] += 1,
                (false, false) => return false,
            }
        }
        legs.iter().all(|&k| k == 1)
    }

    pub fn canonicalize(&self, p: Parity) -> SignedCanonical {
        canonicalize(self, p)
    }
}

impl fmt::Display for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E={} I={} edges=", self.n_external, self.n_internal)?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for OrientedGraph {
    type Err = GraphError;

    fn from_str(text: &str) -> Result<Self, GraphError> {
        let bad = |m: &str| GraphError::Malformed(m.to_string());
        let mut parts = text.trim().split(' ');
        let field = |part: Option<&str>, key: &str| -> Result<String, GraphError> {
            part.and_then(|p| p.strip_prefix(key)).map(str::to_string).ok_or_else(|| bad(key))
        };
        let s: usize = field(parts.next(), "E=")?.parse().map_err(|_| bad("E"))?;
        let i: usize = field(parts.next(), "I=")?.parse().map_err(|_| bad("I"))?;
        let list = field(parts.next(), "edges=")?;
        if parts.next().is_some() {
            return Err(bad("trailing fields"));
        }
        let total = s.checked_add(i).filter(|&t| t <= u8::MAX as usize).ok_or_else(|| bad("too many vertices"))?;
        let mut edges = Vec::new();
        if !list.is_empty() {
            for e in list.split(',') {
                let (a, b) = e.split_once('-').ok_or_else(|| bad("edge"))?;
                let a: u8 = a.parse().map_err(|_| bad("edge tail"))?;
                let b: u8 = b.parse().map_err(|_| bad("edge head"))?;
                if a as usize >= total || b as usize >= total {
                    return Err(bad("vertex out of range"));
                }
                edges.push((a, b));
            }
        }
        Ok(OrientedGraph::new(s, i, edges))
    }
}

fn segment_signs(g: &OrientedGraph) -> [i8; 4] {
    let (a, b) = g.edges[0];
    let mut signs = [0i8; 4];
    for p in Parity::all() {
        // Swapping the ends costs (-1)^m for the vertices and (-1)^n for the edge.
        signs[p.index()] = if p.m_odd != p.n_odd {
            0
        } else if a > b && p.n_odd {
            -1
        } else {
            1
        };
    }
    signs
}

/// Canonical form and sign.
pub fn canonicalize(g: &OrientedGraph, p: Parity) -> SignedCanonical {
    let (graph, signs) = canonicalize_all(g);
    SignedCanonical { graph, sign: signs[p.index()] }
}

/// Canonical form with the sign for every parity class, indexed by
/// [`Parity::index`]. The search does not depend on parities, so one pass
/// serves all four.
///
/// Precondition: every external vertex is univalent and attached to an
/// internal vertex, unless the graph is the segment.
pub fn canonicalize_all(g: &OrientedGraph) -> (OrientedGraph, [i8; 4]) {
    let s = g.n_external;
    let ni = g.n_internal;
    if ni == 0 {
        assert!(s == 2 && g.edges.len() == 1, "only the segment has no internal vertices");
        return (OrientedGraph::segment(), segment_signs(g));
    }
    let mut attach = vec![0u8; s];
    let mut legs = vec![0u32; ni];
    let mut loops = vec![0u32; ni];
    let mut valence = vec![0u32; ni];
    let mut mult: HashMap<(usize, usize), u32> = HashMap::new();
    for &(a, b) in &g.edges {
        let (a, b) = (a as usize, b as usize);
        match (a < s, b < s) {
            (true, false) => {
                attach[a] = b as u8;
                legs[b - s] += 1;
                valence[b - s] += 1;
            }
            (false, true) => {
                attach[b] = a as u8;
                legs[a - s] += 1;
                valence[a - s] += 1;
            }
            (false, false) if a == b => {
                loops[a - s] += 1;
                valence[a - s] += 2;
            }
            (false, false) => {
                *mult.entry((a.min(b) - s, a.max(b) - s)).or_insert(0) += 1;
                valence[a - s] += 1;
                valence[b - s] += 1;
            }
            (true, true) => panic!("external-external edge outside the segment"),
        }
    }
    let mut adj = vec![Vec::new(); ni];
    for (&(a, b), &k) in &mult {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let init = (0..ni).map(|v| ((legs[v] as u64) << 40) | ((loops[v] as u64) << 20) | valence[v] as u64).collect();
    let colored = Colored { init, adj };

    let mut best: Option<Vec<(u8, u8)>> = None;
    // seen[parity][0] = some min leaf had sign +1, seen[parity][1] = sign -1
    let mut seen = [[false; 2]; 4];
    let mut newid = vec![0u8; s + ni];
    let mut ext_order: Vec<u32> = (0..s as u32).collect();
    let mut relabeled: Vec<(u8, u8)> = Vec::with_capacity(g.edges.len());
    for_each_leaf(&colored, |pos| {
        for v in 0..ni {
            newid[s + v] = (s as u32 + pos[v]) as u8;
        }
        ext_order.sort_by_key(|&e| (newid[attach[e as usize] as usize], e));
        for (k, &e) in ext_order.iter().enumerate() {
            newid[e as usize] = k as u8;
        }
        let mut reversed = 0usize;
        relabeled.clear();
        for &(a, b) in &g.edges {
            let (x, y) = (newid[a as usize], newid[b as usize]);
            if x > y {
                reversed += 1;
                relabeled.push((y, x));
            } else {
                relabeled.push((x, y));
            }
        }
        let mut order: Vec<u32> = (0..relabeled.len() as u32).collect();
        order.sort_by_key(|&k| (relabeled[k as usize], k));
        let key: Vec<(u8, u8)> = order.iter().map(|&k| relabeled[k as usize]).collect();
        let better = match &best {
            None => true,
            Some(b) => key < *b,
        };
        if !better && best.as_ref() != Some(&key) {
            return;
        }
        let mut edge_perm = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            edge_perm[old as usize] = new as u32;
        }
        let ext_perm: Vec<u32> = (0..s).map(|e| newid[e] as u32).collect();
        let eps_edge = perm_sign(&edge_perm);
        let eps_ext = perm_sign(&ext_perm);
        let eps_int = perm_sign(&pos[..ni]);
        let eps_rev = if reversed % 2 == 0 { 1 } else { -1 };
        if better {
            best = Some(key);
            seen = [[false; 2]; 4];
        }
        for p in Parity::all() {
            let mut sign = 1i8;
            if p.n_odd {
                sign *= eps_rev * eps_int;
            } else {
                sign *= eps_edge;
            }
            if p.m_odd {
                sign *= eps_ext;
            }
            seen[p.index()][(sign < 0) as usize] = true;
        }
    });
    let key = best.expect("at least one leaf");
    let has_loop = key.iter().any(|&(a, b)| a == b);
    let has_parallel = key.windows(2).any(|w| w[0] == w[1]);
    let multi_leg = legs.iter().any(|&l| l >= 2);
    let mut signs = [0i8; 4];
    for p in Parity::all() {
        let [plus, minus] = seen[p.index()];
        let zero = (plus && minus)
            || (p.n_odd && has_loop)
            || (!p.n_odd && has_parallel)
            || (p.m_odd == p.n_odd && multi_leg);
        signs[p.index()] = if zero { 0 } else if plus { 1 } else { -1 };
    }
    (OrientedGraph::new(s, ni, key), signs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[7, 7]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[-2, 6]).unwrap(), 1);
        assert!(koszul_sign(&[1, 0], &[1]).is_err());
        assert!(koszul_sign(&[1, 1], &[1, 1]).is_err());
    }

    #[test]
    fn segment_sign() {
        for p in Parity::all() {
            let c = OrientedGraph::segment().canonicalize(p);
            assert_eq!(c.sign == 0, p.m_odd != p.n_odd, "{}", p.tag());
        }
    }

    #[test]
    fn tadpole_loop_and_double_edge() {
        // external 0 on internal 1 with a loop
        let tadpole = OrientedGraph::new(1, 1, vec![(0, 1), (1, 1)]);
        assert_eq!(tadpole.canonicalize(Parity::of(3, 9)).sign, 0);
        assert_ne!(tadpole.canonicalize(Parity::of(3, 8)).sign, 0);
        // two internal vertices joined by a double edge, one leg each
        let g = OrientedGraph::new(2, 2, vec![(0, 2), (1, 3), (2, 3), (2, 3)]);
        assert_eq!(g.canonicalize(Parity::of(2, 8)).sign, 0);
        assert_ne!(g.canonicalize(Parity::of(3, 9)).sign, 0);
        assert_eq!(g.canonicalize(Parity::of(2, 7)).sign, 0);
    }

    #[test]
    fn idempotent() {
        let g = OrientedGraph::new(1, 2, vec![(2, 0), (2, 1), (1, 2), (2, 1)]);
        for p in Parity::all() {
            let c = g.canonicalize(p);
            let again = c.graph.canonicalize(p);
            assert_eq!(again.graph, c.graph);
            if c.sign != 0 {
                assert_eq!(again.sign, 1);
            }
        }
    }

    #[test]
    fn encoding_round_trip() {
        let g = OrientedGraph::segment();
        assert_eq!(g.encode(), "E=2 I=0 edges=0-1");
        assert_eq!(OrientedGraph::decode(&g.encode()).unwrap(), g);
        assert!(OrientedGraph::decode("E=2 I=0 edges=0-").is_err());
        assert!(OrientedGraph::decode("E=2 I=0").is_err());
        assert!(OrientedGraph::decode("E=1 I=0 edges=0-3").is_err());
    }
}
