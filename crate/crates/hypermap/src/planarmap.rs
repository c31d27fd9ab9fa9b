//! Rooted planar maps in dart (half-edge) representation.
//!
//! A map on darts `0..n` is given by two permutations:
//!
//! * `alpha`, a fixed-point-free involution pairing the two darts of an edge;
//! * `sigma`, the counterclockwise successor of a dart around its origin vertex.
//!
//! Vertices are the orbits of `sigma`, edges the orbits of `alpha`, and faces
//! the orbits of `phi = sigma ∘ alpha`. With a counterclockwise `sigma`,
//! `phi(d)` is the next dart along the face lying on the **right** of `d`, so
//! every face is traversed clockwise around its interior. This single
//! orientation convention is used everywhere in the crate: "clockwise" around
//! a vertex means iterating `sigma⁻¹`.
//!
//! Some faces are *holes* (outer boundary, top and bottom of cylinders, ...),
//! stored as a representative dart with the hole on its right; every other
//! face must be a triangle. The root dart has the first hole (the outer or
//! bottom face) on its right.
//!
//! All public constructors return maps in canonical form (darts relabelled by
//! a breadth-first search from the root), so structurally equal maps compare
//! equal and serialize byte-for-byte identically.

use std::collections::VecDeque;
use std::fmt::Write as _;

/// Sentinel for a not-yet-assigned dart.
pub const NONE: u32 = u32::MAX;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MapError {
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error("map is disconnected")]
    Disconnected,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size cap of {0} darts exceeded")]
    SizeCap(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A rooted planar map with marked holes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarMap {
    alpha: Vec<u32>,
    sigma: Vec<u32>,
    root: u32,
    holes: Vec<u32>,
}

/// Orbit labelling of the darts (vertices or faces).
#[derive(Clone, Debug)]
pub struct Labels {
    /// Label of every dart.
    pub of: Vec<u32>,
    /// One representative dart per label.
    pub rep: Vec<u32>,
}

impl Labels {
    pub fn count(&self) -> usize {
        self.rep.len()
    }

    fn from_permutation(perm: impl Fn(u32) -> u32, n: usize) -> Self {
        let mut of = vec![NONE; n];
        let mut rep = Vec::new();
        for d in 0..n as u32 {
            if of[d as usize] != NONE {
                continue;
            }
            let label = rep.len() as u32;
            rep.push(d);
            let mut x = d;
            loop {
                of[x as usize] = label;
                x = perm(x);
                if x == d {
                    break;
                }
            }
        }
        Labels { of, rep }
    }
}

/// Where breadth-first distances are measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// The origin vertex of the root dart.
    Root,
    /// All vertices incident to the hole with the given index.
    Hole(usize),
    /// The origin vertex of the given dart.
    Vertex(u32),
}

/// Graph distances from a source set.
#[derive(Clone, Debug)]
pub struct DistanceField {
    pub vertices: Labels,
    /// Distance of every vertex (indexed by vertex label).
    pub dist: Vec<u32>,
}

impl DistanceField {
    /// Distance of the origin of dart `d`.
    pub fn of_dart(&self, d: u32) -> u32 {
        self.dist[self.vertices.of[d as usize] as usize]
    }

    pub fn max(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// Outcome of [`PlanarMap::validate`]: one entry per violated invariant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl PlanarMap {
    /// Build a map from raw permutations and canonicalize it.
    pub fn from_parts(alpha: Vec<u32>, sigma: Vec<u32>, root: u32, holes: Vec<u32>) -> Result<Self, MapError> {
        let map = PlanarMap {
            alpha,
            sigma,
            root,
            holes,
        };
        map.check_permutations()?;
        Ok(map.canonicalize())
    }

    /// Build from `alpha` and the face permutation `phi`.
    pub fn from_alpha_phi(alpha: Vec<u32>, phi: Vec<u32>, root: u32, holes: Vec<u32>) -> Result<Self, MapError> {
        if alpha.len() != phi.len() {
            return Err(MapError::Malformed("alpha and phi differ in length".into()));
        }
        let mut sigma = vec![0; alpha.len()];
        for d in 0..alpha.len() {
            let a = alpha[d] as usize;
            if a >= alpha.len() {
                return Err(MapError::Malformed(format!("alpha({d}) out of range")));
            }
            // sigma = phi ∘ alpha
            sigma[d] = phi[a];
        }
        Self::from_parts(alpha, sigma, root, holes)
    }

    /// The degenerate triangulation of the 2-gon: a single edge.
    pub fn single_edge() -> Self {
        PlanarMap {
            alpha: vec![1, 0],
            sigma: vec![0, 1],
            root: 0,
            holes: vec![0],
        }
    }

    /// A single triangle with an outer hole of perimeter 3.
    /// Triangulation of the `k`-gon without inner vertices, all diagonals
    /// leaving one corner (the degenerate single edge for `k = 2`).
    pub fn fan(k: usize) -> Self {
        assert!(k >= 2, "polygons have perimeter at least 2");
        if k == 2 {
            return Self::single_edge();
        }
        let mut b = MapBuilder::new();
        let first = b.add_face(k);
        // Darts facing the unfilled region, clockwise around it.
        let mut hole: Vec<u32> = std::iter::once(first)
            .chain((1..k as u32).rev().map(|i| first + i))
            .collect();
        while hole.len() > 2 {
            let p = hole.len();
            let [t1, t2, t3] = b.add_triangle();
            b.pair(t1, hole[0]);
            b.pair(hole[p - 1], t3);
            let mut rest = hole[1..p - 1].to_vec();
            rest.push(t2);
            hole = rest;
        }
        b.pair(hole[0], hole[1]);
        b.finish(first, vec![first]).expect("fan triangulation is valid")
    }

    pub fn triangle() -> Self {
        let mut b = MapBuilder::new();
        let outer = b.add_face(3);
        let inner = b.add_face(3);
        // The inner face runs against the outer one.
        b.pair(outer, inner);
        b.pair(outer + 1, inner + 2);
        b.pair(outer + 2, inner + 1);
        b.finish(outer, vec![outer]).expect("triangle is valid")
    }

    pub fn num_darts(&self) -> usize {
        self.alpha.len()
    }

    pub fn num_edges(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn holes(&self) -> &[u32] {
        &self.holes
    }

    pub fn alpha(&self, d: u32) -> u32 {
        self.alpha[d as usize]
    }

    pub fn sigma(&self, d: u32) -> u32 {
        self.sigma[d as usize]
    }

    /// Next dart of the face on the right of `d`.
    pub fn phi(&self, d: u32) -> u32 {
        self.sigma[self.alpha[d as usize] as usize]
    }

    /// Inverse of [`phi`](Self::phi): `alpha ∘ sigma⁻¹`.
    pub fn phi_inv(&self, d: u32) -> u32 {
        self.alpha[self.sigma_inv_table()[d as usize] as usize]
    }

    pub fn alpha_slice(&self) -> &[u32] {
        &self.alpha
    }

    pub fn sigma_slice(&self) -> &[u32] {
        &self.sigma
    }

    /// `phi` as a table.
    pub fn phi_table(&self) -> Vec<u32> {
        (0..self.num_darts() as u32).map(|d| self.phi(d)).collect()
    }

    /// `sigma⁻¹` as a table.
    pub fn sigma_inv_table(&self) -> Vec<u32> {
        let mut inv = vec![0; self.sigma.len()];
        for (d, &s) in self.sigma.iter().enumerate() {
            inv[s as usize] = d as u32;
        }
        inv
    }

    pub fn vertices(&self) -> Labels {
        Labels::from_permutation(|d| self.sigma[d as usize], self.num_darts())
    }

    pub fn faces(&self) -> Labels {
        Labels::from_permutation(|d| self.phi(d), self.num_darts())
    }

    /// Darts of the face on the right of `d`, in `phi` order starting at `d`.
    pub fn face_darts(&self, d: u32) -> Vec<u32> {
        let mut out = vec![d];
        let mut x = self.phi(d);
        while x != d {
            out.push(x);
            x = self.phi(x);
        }
        out
    }

    /// Perimeter of hole `i`.
    pub fn hole_degree(&self, i: usize) -> usize {
        self.face_darts(self.holes[i]).len()
    }

    /// Number of vertices not incident to any hole.
    pub fn inner_vertex_count(&self) -> usize {
        let vertices = self.vertices();
        let mut on_hole = vec![false; vertices.count()];
        for &h in &self.holes {
            for d in self.face_darts(h) {
                on_hole[vertices.of[d as usize] as usize] = true;
            }
        }
        on_hole.iter().filter(|&&b| !b).count()
    }

    fn check_permutations(&self) -> Result<(), MapError> {
        let n = self.alpha.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(MapError::Malformed(format!("dart count {n} must be positive and even")));
        }
        if self.sigma.len() != n {
            return Err(MapError::Malformed("alpha and sigma differ in length".into()));
        }
        if self.root as usize >= n {
            return Err(MapError::Malformed("root out of range".into()));
        }
        let mut seen = vec![false; n];
        for d in 0..n {
            let a = self.alpha[d] as usize;
            if a >= n || a == d || self.alpha[a] as usize != d {
                return Err(MapError::Malformed(format!(
                    "alpha is not a fixed-point-free involution at dart {d}"
                )));
            }
            let s = self.sigma[d] as usize;
            if s >= n || seen[s] {
                return Err(MapError::Malformed(format!("sigma is not a permutation at dart {d}")));
            }
            seen[s] = true;
        }
        for &h in &self.holes {
            if h as usize >= n {
                return Err(MapError::Malformed("hole representative out of range".into()));
            }
        }
        Ok(())
    }

    /// Relabel darts by a breadth-first search from the root (neighbours
    /// `alpha(d)` then `sigma(d)`); hole representatives become the smallest
    /// dart of their face. The root becomes dart 0.
    pub fn canonicalize(&self) -> Self {
        self.canonicalize_with_labels().0
    }

    /// Like [`canonicalize`](Self::canonicalize), also returning the new
    /// label of every old dart.
    pub fn canonicalize_with_labels(&self) -> (Self, Vec<u32>) {
        let n = self.num_darts();
        let mut label = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        label[self.root as usize] = 0;
        order.push(self.root);
        queue.push_back(self.root);
        while let Some(d) = queue.pop_front() {
            for e in [self.alpha[d as usize], self.sigma[d as usize]] {
                if label[e as usize] == NONE {
                    label[e as usize] = order.len() as u32;
                    order.push(e);
                    queue.push_back(e);
                }
            }
        }
        if order.len() != n {
            // Disconnected maps keep their unreachable darts at the end so that
            // validation can report them.
            for d in 0..n as u32 {
                if label[d as usize] == NONE {
                    label[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let alpha = order.iter().map(|&d| label[self.alpha[d as usize] as usize]).collect();
        let sigma = order.iter().map(|&d| label[self.sigma[d as usize] as usize]).collect();
        let mut map = PlanarMap {
            alpha,
            sigma,
            root: 0,
            holes: Vec::new(),
        };
        map.holes = self
            .holes
            .iter()
            .map(|&h| map.face_darts(label[h as usize]).into_iter().min().unwrap())
            .collect();
        (map, label)
    }

    /// The same map rooted at `d` (no relabelling).
    pub fn with_root(&self, d: u32) -> PlanarMap {
        let mut m = self.clone();
        m.root = d;
        m
    }

    /// Map from raw permutations without relabelling (crate-internal; used
    /// for intermediate objects whose dart ids must stay meaningful).
    pub(crate) fn raw(alpha: Vec<u32>, sigma: Vec<u32>, root: u32, holes: Vec<u32>) -> Result<Self, MapError> {
        let map = PlanarMap {
            alpha,
            sigma,
            root,
            holes,
        };
        map.check_permutations()?;
        Ok(map)
    }

    /// Raw map from `alpha` and `phi`, without relabelling.
    pub(crate) fn raw_from_alpha_phi(
        alpha: Vec<u32>,
        phi: Vec<u32>,
        root: u32,
        holes: Vec<u32>,
    ) -> Result<Self, MapError> {
        let mut sigma = vec![0; alpha.len()];
        for d in 0..alpha.len() {
            let a = alpha[d] as usize;
            if a >= alpha.len() {
                return Err(MapError::Malformed(format!("alpha({d}) out of range")));
            }
            sigma[d] = phi[a];
        }
        Self::raw(alpha, sigma, root, holes)
    }

    /// Check every structural invariant, collecting all failures.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Err(e) = self.check_permutations() {
            report.failures.push(e.to_string());
            return report;
        }
        let faces = self.faces();
        let vertices = self.vertices();
        let mut is_hole = vec![false; faces.count()];
        for (i, &h) in self.holes.iter().enumerate() {
            let f = faces.of[h as usize] as usize;
            if is_hole[f] {
                report
                    .failures
                    .push(format!("hole {i} (dart {h}) repeats an earlier hole"));
            }
            is_hole[f] = true;
        }
        for f in 0..faces.count() {
            if is_hole[f] {
                continue;
            }
            let deg = self.face_darts(faces.rep[f]).len();
            if deg != 3 {
                report.failures.push(format!(
                    "non-triangle inner face at dart {} (degree {deg})",
                    faces.rep[f]
                ));
            }
        }
        for (i, &h) in self.holes.iter().enumerate() {
            let darts = self.face_darts(h);
            let mut vs: Vec<u32> = darts.iter().map(|&d| vertices.of[d as usize]).collect();
            vs.sort_unstable();
            vs.dedup();
            if vs.len() != darts.len() {
                report
                    .failures
                    .push(format!("hole {i} (dart {h}) boundary is not a simple cycle"));
            }
        }
        // Connectivity via the dart graph.
        let mut seen = vec![false; self.num_darts()];
        let mut stack = vec![self.root];
        seen[self.root as usize] = true;
        let mut reached = 1;
        while let Some(d) = stack.pop() {
            for e in [self.alpha[d as usize], self.sigma[d as usize]] {
                if !seen[e as usize] {
                    seen[e as usize] = true;
                    reached += 1;
                    stack.push(e);
                }
            }
        }
        if reached != self.num_darts() {
            let bad = seen.iter().position(|&s| !s).unwrap();
            report
                .failures
                .push(format!("map is disconnected (dart {bad} unreachable)"));
        }
        let euler = vertices.count() as i64 - self.num_edges() as i64 + faces.count() as i64;
        if euler != 2 {
            report.failures.push(format!("Euler characteristic {euler} != 2"));
        }
        report
    }

    /// Breadth-first distances from the root vertex or a hole boundary.
    pub fn distances(&self, source: Source) -> Result<DistanceField, MapError> {
        let vertices = self.vertices();
        let nv = vertices.count();
        let mut dist = vec![u32::MAX; nv];
        let mut queue = VecDeque::new();
        match source {
            Source::Root | Source::Vertex(_) => {
                let d = if let Source::Vertex(d) = source { d } else { self.root };
                if d as usize >= self.num_darts() {
                    return Err(MapError::Precondition(format!("no dart {d}")));
                }
                let v = vertices.of[d as usize];
                dist[v as usize] = 0;
                queue.push_back(v);
            }
            Source::Hole(i) => {
                let h = *self
                    .holes
                    .get(i)
                    .ok_or_else(|| MapError::Precondition(format!("no hole with index {i}")))?;
                for d in self.face_darts(h) {
                    let v = vertices.of[d as usize];
                    if dist[v as usize] != 0 {
                        dist[v as usize] = 0;
                        queue.push_back(v);
                    }
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            let start = vertices.rep[v as usize];
            let mut d = start;
            loop {
                let w = vertices.of[self.alpha[d as usize] as usize];
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
                d = self.sigma[d as usize];
                if d == start {
                    break;
                }
            }
        }
        if dist.contains(&u32::MAX) {
            return Err(MapError::Disconnected);
        }
        Ok(DistanceField { vertices, dist })
    }

    /// Keep the faces selected by `keep` (indexed by face label of `faces`)
    /// and replace every connected region of removed faces by a hole.
    ///
    /// Kept holes keep their order; the new holes are appended in order of
    /// their smallest boundary dart. Returns the new map and, for every
    /// surviving old dart, its new index.
    pub fn cut(&self, faces: &Labels, keep: &[bool]) -> Result<(PlanarMap, Vec<u32>), MapError> {
        let n = self.num_darts();
        let kept = |d: u32| keep[faces.of[d as usize] as usize];
        let boundary = |d: u32| !kept(d) && kept(self.alpha[d as usize]);
        if !kept(self.root) {
            return Err(MapError::Precondition("the root face must be kept".into()));
        }
        let mut new_id = vec![NONE; n];
        let mut count = 0u32;
        for d in 0..n as u32 {
            if kept(d) || boundary(d) {
                new_id[d as usize] = count;
                count += 1;
            }
        }
        let mut alpha = vec![0; count as usize];
        let mut phi = vec![0; count as usize];
        let mut new_holes = Vec::new();
        for d in 0..n as u32 {
            let id = new_id[d as usize];
            if id == NONE {
                continue;
            }
            alpha[id as usize] = new_id[self.alpha[d as usize] as usize];
            if kept(d) {
                phi[id as usize] = new_id[self.phi(d) as usize];
            } else {
                // Follow the removed region around the origin of phi(d).
                let mut x = self.phi(d);
                while !boundary(x) {
                    x = self.sigma[x as usize];
                }
                phi[id as usize] = new_id[x as usize];
            }
        }
        // New hole representatives: one per new phi-cycle of boundary darts.
        let mut seen = vec![false; count as usize];
        for d in 0..n as u32 {
            if boundary(d) && !seen[new_id[d as usize] as usize] {
                let start = new_id[d as usize];
                let mut x = start;
                loop {
                    seen[x as usize] = true;
                    x = phi[x as usize];
                    if x == start {
                        break;
                    }
                }
                new_holes.push(start);
            }
        }
        let mut holes: Vec<u32> = self
            .holes
            .iter()
            .filter(|&&h| kept(h))
            .map(|&h| new_id[h as usize])
            .collect();
        holes.extend(new_holes);
        let root = new_id[self.root as usize];
        // Keep labels meaningful to the caller: no canonicalization here.
        let mut sigma = vec![0; count as usize];
        for d in 0..count as usize {
            sigma[d] = phi[alpha[d] as usize];
        }
        let map = PlanarMap {
            alpha,
            sigma,
            root,
            holes,
        };
        map.check_permutations()?;
        Ok((map, new_id))
    }

    /// The hull `B_r^•`: faces incident to a vertex at distance `< r` from the
    /// source, together with every complementary region except the one
    /// containing the hole `far_hole`. The removed region becomes the last hole.
    pub fn hull(&self, source: Source, far_hole: usize, r: u32) -> Result<PlanarMap, MapError> {
        let dist = self.distances(source)?;
        let faces = self.faces();
        let far = *self
            .holes
            .get(far_hole)
            .ok_or_else(|| MapError::Precondition(format!("no hole with index {far_hole}")))?;
        let far_face = faces.of[far as usize] as usize;
        if self.face_darts(far).iter().any(|&d| dist.of_dart(d) < r) {
            return Err(MapError::Precondition(format!(
                "radius {r} exceeds the available height"
            )));
        }
        let (mut map, _) = self.cut(&faces, &self.hull_mask(&dist, &faces, far_face, r))?;
        map = map.canonicalize();
        Ok(map)
    }

    /// Face mask of the hull of radius `r` (see [`hull`](Self::hull)).
    pub fn hull_mask(&self, dist: &DistanceField, faces: &Labels, far_face: usize, r: u32) -> Vec<bool> {
        let nf = faces.count();
        // Faces in the ball: some vertex at distance < r (hole faces never count).
        let mut in_ball = vec![false; nf];
        for d in 0..self.num_darts() as u32 {
            if dist.of_dart(d) < r {
                in_ball[faces.of[d as usize] as usize] = true;
            }
        }
        // Flood the complement of the ball from the far face through edges.
        let mut outside = vec![false; nf];
        let mut stack = vec![far_face];
        outside[far_face] = true;
        while let Some(f) = stack.pop() {
            let start = faces.rep[f];
            let mut d = start;
            loop {
                let g = faces.of[self.alpha[d as usize] as usize] as usize;
                if !outside[g] && !in_ball[g] {
                    outside[g] = true;
                    stack.push(g);
                }
                d = self.phi(d);
                if d == start {
                    break;
                }
            }
        }
        outside.iter().map(|&o| !o).collect()
    }

    /// Forward root transformation: from a triangulation of the 1-gon (root
    /// loop with the outer face on its right) to the plane form. The root loop
    /// and the triangle inside it are removed and the two remaining sides of
    /// that triangle are glued; the new root leaves the same vertex. The
    /// vertex count is unchanged; two edges and two faces disappear.
    pub fn root_transform(&self) -> Result<PlanarMap, MapError> {
        Ok(self.root_transform_with_labels()?.0)
    }

    /// Like [`root_transform`](Self::root_transform), also returning the new
    /// label of every surviving dart (`NONE` for the four removed darts).
    pub fn root_transform_with_labels(&self) -> Result<(PlanarMap, Vec<u32>), MapError> {
        let b = self.root;
        if self.phi(b) != b {
            return Err(MapError::Precondition("root face is not a loop (perimeter 1)".into()));
        }
        let b2 = self.alpha(b);
        let s1 = self.phi(b2);
        let s2 = self.phi(s1);
        if self.phi(s2) != b2 {
            return Err(MapError::Precondition(
                "face inside the root loop is not a triangle".into(),
            ));
        }
        let (x, y) = (self.alpha(s1), self.alpha(s2));
        if x == s2 || [x, y].iter().any(|&d| d == b || d == b2) {
            return Err(MapError::Precondition(
                "nothing remains after removing the root loop".into(),
            ));
        }
        let removed = [b, b2, s1, s2];
        let mut alpha = self.alpha.clone();
        alpha[x as usize] = y;
        alpha[y as usize] = x;
        let phi = self.phi_table();
        let mut new_id = vec![NONE; self.num_darts()];
        let mut count = 0;
        for d in 0..self.num_darts() as u32 {
            if !removed.contains(&d) {
                new_id[d as usize] = count;
                count += 1;
            }
        }
        let mut na = vec![0; count as usize];
        let mut nphi = vec![0; count as usize];
        for d in 0..self.num_darts() as u32 {
            let id = new_id[d as usize];
            if id == NONE {
                continue;
            }
            na[id as usize] = new_id[alpha[d as usize] as usize];
            nphi[id as usize] = new_id[phi[d as usize] as usize];
        }
        let holes = self.holes[1..].iter().map(|&h| new_id[h as usize]).collect();
        let raw = PlanarMap::raw_from_alpha_phi(na, nphi, new_id[y as usize], holes)?;
        let (map, label) = raw.canonicalize_with_labels();
        let labels = new_id
            .iter()
            .map(|&i| if i == NONE { NONE } else { label[i as usize] })
            .collect();
        Ok((map, labels))
    }

    /// Inverse of [`root_transform`](Self::root_transform).
    pub fn root_transform_inverse(&self) -> Result<PlanarMap, MapError> {
        let y = self.root;
        let x = self.alpha(y);
        let n = self.num_darts() as u32;
        let (b, b2, s1, s2) = (n, n + 1, n + 2, n + 3);
        let mut alpha = self.alpha.clone();
        let mut phi = self.phi_table();
        alpha.extend([b2, b, x, y]);
        phi.extend([b, s1, s2, b2]);
        alpha[x as usize] = s1;
        alpha[y as usize] = s2;
        let mut holes = vec![b];
        holes.extend_from_slice(&self.holes);
        PlanarMap::from_alpha_phi(alpha, phi, b, holes)
    }

    /// Text serialization: header, one `id alpha sigma` line per dart, then
    /// one line per hole listing its darts in face order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "planarmap {} {} {}", self.num_darts(), self.root, self.holes.len()).unwrap();
        for d in 0..self.num_darts() {
            writeln!(out, "{} {} {}", d, self.alpha[d], self.sigma[d]).unwrap();
        }
        for &h in &self.holes {
            let darts: Vec<String> = self.face_darts(h).iter().map(|d| d.to_string()).collect();
            writeln!(out, "hole {}", darts.join(" ")).unwrap();
        }
        out
    }

    /// Parse the format written by [`to_text`](Self::to_text). The map is
    /// taken as given (no relabelling), so round-trips are exact.
    pub fn from_text(text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| MapError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "planarmap" {
            return Err(perr(ln, "expected header `planarmap <darts> <root> <holes>`"));
        }
        let num = |s: &str, line: usize| s.parse::<u32>().map_err(|_| perr(line, "expected an integer"));
        let n = num(fields[1], ln)? as usize;
        let root = num(fields[2], ln)?;
        let nh = num(fields[3], ln)? as usize;
        let mut alpha = vec![0; n];
        let mut sigma = vec![0; n];
        for d in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| perr(ln, "missing dart lines"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 || num(f[0], ln)? as usize != d {
                return Err(perr(ln, "expected `id alpha sigma` in increasing id order"));
            }
            alpha[d] = num(f[1], ln)?;
            sigma[d] = num(f[2], ln)?;
        }
        let mut holes = Vec::with_capacity(nh);
        for _ in 0..nh {
            let (ln, line) = lines.next().ok_or_else(|| perr(ln, "missing hole lines"))?;
            let mut f = line.split_whitespace();
            if f.next() != Some("hole") {
                return Err(perr(ln, "expected `hole <darts...>`"));
            }
            let first = f.next().ok_or_else(|| perr(ln, "empty hole"))?;
            holes.push(num(first, ln)?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing content"));
        }
        let map = PlanarMap {
            alpha,
            sigma,
            root,
            holes,
        };
        map.check_permutations()?;
        Ok(map)
    }
}

/// Incremental construction of maps from faces given as `phi`-cycles.
///
/// Darts are created face by face with [`add_face`](Self::add_face) and
/// paired with [`pair`](Self::pair); `sigma` is derived at the end as
/// `phi ∘ alpha`. A hole is described by the list of darts *outside* it, in
/// the order in which their partners will run around the hole.
#[derive(Clone, Debug, Default)]
pub struct MapBuilder {
    alpha: Vec<u32>,
    phi: Vec<u32>,
    cap: Option<usize>,
}

impl MapBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder that refuses to grow beyond `cap` darts.
    /// Builder holding all darts of `map` (same ids).
    pub fn from_map(map: &PlanarMap) -> Self {
        MapBuilder {
            alpha: map.alpha.clone(),
            phi: map.phi_table(),
            cap: None,
        }
    }

    pub fn with_cap(cap: usize) -> Self {
        MapBuilder {
            cap: Some(cap),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Whether the dart cap has been exceeded.
    pub fn over_cap(&self) -> bool {
        self.cap.is_some_and(|c| self.alpha.len() > c)
    }

    /// Create a face of `k` new darts forming a `phi`-cycle; returns the first
    /// id (the darts are consecutive).
    pub fn add_face(&mut self, k: usize) -> u32 {
        let first = self.alpha.len() as u32;
        for i in 0..k as u32 {
            self.alpha.push(NONE);
            self.phi.push(first + (i + 1) % k as u32);
        }
        first
    }

    /// Add a triangle and return its darts `(t1, t2, t3)` in `phi` order.
    pub fn add_triangle(&mut self) -> [u32; 3] {
        let t = self.add_face(3);
        [t, t + 1, t + 2]
    }

    pub fn pair(&mut self, a: u32, b: u32) {
        debug_assert!(
            self.alpha[a as usize] == NONE && self.alpha[b as usize] == NONE,
            "dart paired twice"
        );
        self.alpha[a as usize] = b;
        self.alpha[b as usize] = a;
    }

    pub fn alpha(&self, d: u32) -> u32 {
        self.alpha[d as usize]
    }

    pub fn phi(&self, d: u32) -> u32 {
        self.phi[d as usize]
    }

    /// Redirect the face successor of `d`.
    pub(crate) fn set_phi(&mut self, d: u32, next: u32) {
        self.phi[d as usize] = next;
    }

    /// Glue a triangulation of a polygon into a hole.
    ///
    /// `outside[i]` is the dart whose partner is the `i`-th side of the hole;
    /// the filling's root dart is matched with side 0 and the filling's outer
    /// face is traversed against the hole. The degenerate 2-gon pairs the two
    /// outside darts directly.
    pub fn glue(&mut self, filling: &PlanarMap, outside: &[u32]) -> Result<(), MapError> {
        let outer = filling.face_darts(filling.root());
        let k = outer.len();
        if k != outside.len() {
            return Err(MapError::Precondition(format!(
                "filling perimeter {k} does not match hole perimeter {}",
                outside.len()
            )));
        }
        // side[d] = hole side matched by outer dart d of the filling.
        let n = filling.num_darts();
        let mut side = vec![NONE; n];
        for (t, &b) in outer.iter().enumerate() {
            side[b as usize] = ((k - t) % k) as u32;
        }
        let base = self.alpha.len() as u32;
        let mut new_id = vec![NONE; n];
        let mut count = 0;
        for d in 0..n {
            if side[d] == NONE {
                new_id[d] = base + count;
                count += 1;
            }
        }
        for d in 0..n as u32 {
            if side[d as usize] != NONE {
                continue;
            }
            self.alpha.push(NONE);
            self.phi.push(new_id[filling.phi(d) as usize]);
        }
        for d in 0..n as u32 {
            let a = filling.alpha(d);
            match (side[d as usize], side[a as usize]) {
                (NONE, NONE) => {
                    if d < a {
                        self.pair(new_id[d as usize], new_id[a as usize]);
                    }
                }
                (NONE, s) => self.pair(new_id[d as usize], outside[s as usize]),
                (s, t) if t != NONE && d < a => {
                    self.pair(outside[s as usize], outside[t as usize]);
                }
                _ => {}
            }
        }
        if self.over_cap() {
            return Err(MapError::SizeCap(self.cap.unwrap()));
        }
        Ok(())
    }

    /// Finish: derive `sigma` and canonicalize.
    pub fn finish(self, root: u32, holes: Vec<u32>) -> Result<PlanarMap, MapError> {
        Ok(self.finish_with_labels(root, holes)?.0)
    }

    /// Finish, also returning the canonical label of every builder dart.
    pub fn finish_with_labels(self, root: u32, holes: Vec<u32>) -> Result<(PlanarMap, Vec<u32>), MapError> {
        Ok(self.finish_raw(root, holes)?.canonicalize_with_labels())
    }

    /// Finish without relabelling.
    pub fn finish_raw(self, root: u32, holes: Vec<u32>) -> Result<PlanarMap, MapError> {
        if let Some(d) = self.alpha.iter().position(|&a| a == NONE) {
            return Err(MapError::Malformed(format!("dart {d} left unpaired")));
        }
        PlanarMap::raw_from_alpha_phi(self.alpha, self.phi, root, holes)
    }

    /// Cut the map open along a path, turning it into part of a hole.
    ///
    /// `path` lists darts going away from the vertex `v` where the hole face
    /// passes (`path[0]` leaves `v`, each next dart leaves the endpoint of the
    /// previous one); `hole_in` is the hole dart arriving at `v`. Every path
    /// edge is doubled: the hole now runs from `v` down one side of the path
    /// and back up the other. Returns the new darts `(down, up)`, where
    /// `down[k]` runs along `path[k]` and `up[k]` against it, both with the
    /// hole on their right.
    pub fn slit(&mut self, path: &[u32], hole_in: u32) -> (Vec<u32>, Vec<u32>) {
        let r = path.len();
        let hole_out = self.phi[hole_in as usize];
        let mut down = Vec::with_capacity(r);
        let mut up = Vec::with_capacity(r);
        for &g in path {
            let back = self.alpha[g as usize];
            let n_up = self.alpha.len() as u32;
            let n_down = n_up + 1;
            self.alpha.push(g);
            self.alpha.push(back);
            self.phi.push(NONE);
            self.phi.push(NONE);
            self.alpha[g as usize] = n_up;
            self.alpha[back as usize] = n_down;
            down.push(n_down);
            up.push(n_up);
        }
        self.phi[hole_in as usize] = down[0];
        for k in 0..r {
            let next_down = if k + 1 < r { down[k + 1] } else { up[r - 1] };
            self.phi[down[k] as usize] = next_down;
            let next_up = if k > 0 { up[k - 1] } else { hole_out };
            self.phi[up[k] as usize] = next_up;
        }
        (down, up)
    }
}

/// Number of rooted triangulations of the p-gon with `n` inner vertices,
/// counted by brute force over all gluings of labelled triangles.
///
/// The face permutation is fixed (one outer p-cycle plus `2n + p − 2`
/// labelled triangles) and every fixed-point-free involution is tried; a
/// gluing counts when it is connected, planar, has a simple outer boundary
/// and `n + p` vertices. Each rooted map arises from exactly `k!·3^k`
/// labellings of its `k` triangles.
pub fn brute_force_count(n: u64, p: u64) -> u64 {
    let k = 2 * n as i64 + p as i64 - 2;
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    let p = p as usize;
    let total = p + 3 * k;
    let mut phi = vec![0u32; total];
    for i in 0..p {
        phi[i] = ((i + 1) % p) as u32;
    }
    for t in 0..k {
        let b = p + 3 * t;
        phi[b] = (b + 1) as u32;
        phi[b + 1] = (b + 2) as u32;
        phi[b + 2] = b as u32;
    }
    let mut alpha = vec![NONE; total];
    let mut count = 0u64;
    let target_vertices = n as usize + p;
    let mut scratch = vec![false; total];
    fn rec(alpha: &mut Vec<u32>, phi: &[u32], p: usize, target: usize, scratch: &mut Vec<bool>, count: &mut u64) {
        let Some(d) = alpha.iter().position(|&a| a == NONE) else {
            if accept(alpha, phi, p, target, scratch) {
                *count += 1;
            }
            return;
        };
        for e in d + 1..alpha.len() {
            if alpha[e] != NONE {
                continue;
            }
            alpha[d] = e as u32;
            alpha[e] = d as u32;
            rec(alpha, phi, p, target, scratch, count);
            alpha[d] = NONE;
            alpha[e] = NONE;
        }
    }
    fn accept(alpha: &[u32], phi: &[u32], p: usize, target: usize, seen: &mut [bool]) -> bool {
        let total = alpha.len();
        let sigma = |d: usize| phi[alpha[d] as usize] as usize;
        // Vertex count and simplicity of the outer boundary.
        seen.iter_mut().for_each(|s| *s = false);
        let mut vertices = 0;
        let mut outer_vertex = vec![usize::MAX; p];
        for d in 0..total {
            if seen[d] {
                continue;
            }
            vertices += 1;
            if vertices > target {
                return false;
            }
            let mut x = d;
            loop {
                seen[x] = true;
                if x < p {
                    outer_vertex[x] = vertices;
                }
                x = sigma(x);
                if x == d {
                    break;
                }
            }
        }
        if vertices != target {
            return false;
        }
        let mut ov = outer_vertex.clone();
        ov.sort_unstable();
        ov.dedup();
        if ov.len() != p {
            return false;
        }
        // Connectivity through alpha and phi.
        seen.iter_mut().for_each(|s| *s = false);
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(d) = stack.pop() {
            for e in [alpha[d] as usize, phi[d] as usize] {
                if !seen[e] {
                    seen[e] = true;
                    reached += 1;
                    stack.push(e);
                }
            }
        }
        // With V = n + p, E = total/2 and F = k + 1, connectivity forces genus 0.
        reached == total
    }
    rec(&mut alpha, &phi, p, target_vertices, &mut scratch, &mut count);
    let labellings: u64 = (1..=k as u64).product::<u64>() * 3u64.pow(k as u32);
    assert_eq!(count % labellings, 0, "labelled gluings must come in full orbits");
    count / labellings
}
