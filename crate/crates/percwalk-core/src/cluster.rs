//! Cluster decomposition of a bond configuration.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::Direction;
use crate::percolation::BondConfiguration;

/// Partition of the box into open-edge connected components.
///
/// Labels are dense in `0..cluster_count()` and deterministic: clusters are
/// numbered by their smallest member vertex. The largest cluster (smallest
/// label on ties) serves as the finite-volume stand-in for the infinite
/// cluster, with its member list kept sorted so `members()[0]` is the
/// canonical root.
#[derive(Clone, Debug)]
pub struct ClusterDecomposition {
    labels: Vec<u32>,
    sizes: Vec<usize>,
    degrees: Vec<u8>,
    largest: u32,
    largest_members: Vec<usize>,
    /// Position of a vertex inside `largest_members`, `u32::MAX` elsewhere.
    largest_pos: Vec<u32>,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let grand = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = grand;
            v = grand;
        }
        v
    }

    /// Union by smaller root id; keeps labels reproducible.
    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Decompose `config` into clusters, recording per-vertex degrees and the
/// largest cluster.
pub fn decompose_clusters(config: &BondConfiguration) -> ClusterDecomposition {
    let spec = config.spec();
    let n = spec.vertex_count();
    let d = spec.dimension();
    let mut uf = UnionFind::new(n);
    let mut degrees = vec![0u8; n];
    for x in 0..n {
        for axis in 0..d {
            if config.is_open_edge(spec.undirected_edge(x, axis)) {
                let y = spec.neighbor(x, Direction::positive(axis));
                uf.union(x as u32, y as u32);
                degrees[x] += 1;
                degrees[y] += 1;
            }
        }
    }

    // Dense labels in order of first appearance (== smallest member).
    let mut labels = vec![0u32; n];
    let mut root_label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    for (x, label) in labels.iter_mut().enumerate() {
        let root = uf.find(x as u32) as usize;
        if root_label[root] == u32::MAX {
            root_label[root] = sizes.len() as u32;
            sizes.push(0);
        }
        *label = root_label[root];
        sizes[root_label[root] as usize] += 1;
    }

    // Maximal size, smallest label on ties.
    let mut largest = 0u32;
    for (id, &size) in sizes.iter().enumerate() {
        if size > sizes[largest as usize] {
            largest = id as u32;
        }
    }

    let mut largest_members = Vec::with_capacity(sizes[largest as usize]);
    let mut largest_pos = vec![u32::MAX; n];
    for x in 0..n {
        if labels[x] == largest {
            largest_pos[x] = largest_members.len() as u32;
            largest_members.push(x);
        }
    }

    ClusterDecomposition {
        labels,
        sizes,
        degrees,
        largest,
        largest_members,
        largest_pos,
    }
}

impl ClusterDecomposition {
    #[inline]
    pub fn label(&self, vertex: usize) -> u32 {
        self.labels[vertex]
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, label: u32) -> usize {
        self.sizes[label as usize]
    }

    /// Number of open edges incident to `vertex`.
    #[inline]
    pub fn degree(&self, vertex: usize) -> usize {
        self.degrees[vertex] as usize
    }

    #[inline]
    pub fn degrees(&self) -> &[u8] {
        &self.degrees
    }

    pub fn largest_label(&self) -> u32 {
        self.largest
    }

    pub fn largest_size(&self) -> usize {
        self.sizes[self.largest as usize]
    }

    /// Vertices of the largest cluster in increasing index order.
    #[inline]
    pub fn members(&self) -> &[usize] {
        &self.largest_members
    }

    /// Smallest-index vertex of the largest cluster; anchors the corrector
    /// and re-roots the origin in finite volume.
    #[inline]
    pub fn root(&self) -> usize {
        self.largest_members[0]
    }

    #[inline]
    pub fn in_largest(&self, vertex: usize) -> bool {
        self.largest_pos[vertex] != u32::MAX
    }

    /// Position of `vertex` inside `members()`, if it belongs to the
    /// largest cluster.
    #[inline]
    pub fn largest_position(&self, vertex: usize) -> Option<usize> {
        let p = self.largest_pos[vertex];
        (p != u32::MAX).then_some(p as usize)
    }

    /// Sum of degrees over the largest cluster (twice its open edges).
    pub fn largest_total_degree(&self) -> usize {
        self.largest_members
            .iter()
            .map(|&x| self.degrees[x] as usize)
            .sum()
    }
}
