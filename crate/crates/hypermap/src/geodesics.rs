//! Leftmost geodesics, geodesic trees and slicing into strips.
//!
//! Geodesics are computed by walking *down* from a target vertex: at every
//! vertex the darts are scanned counter-clockwise (along `sigma`) starting
//! from a reference dart, and the first one leading to a vertex one step
//! closer to the source is taken. The reference at the next vertex is the
//! reverse of the dart just used. On cylinders and hulls this is exactly the
//! path that passes between two consecutive trees of the skeleton, and the
//! paths started from different vertices coalesce once they meet.

use std::collections::HashMap;

use thiserror::Error;

use crate::planarmap::{DistanceField, MapBuilder, MapError, PlanarMap, NONE};
use crate::skeleton::{GeodesicTree, SkeletonError, StripMap};

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("no neighbour closer to the source around vertex {0}")]
    Unreachable(u32),
    #[error("tree and map do not match: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

/// A geodesic from the source: `vertices[i]` is at distance `i` and
/// `darts[i]` goes from `vertices[i]` to `vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicPath {
    pub vertices: Vec<u32>,
    pub darts: Vec<u32>,
}

impl GeodesicPath {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// The darts walked from the target down to the source.
    pub fn descent(&self, map: &PlanarMap) -> Vec<u32> {
        self.darts.iter().rev().map(|&d| map.alpha(d)).collect()
    }
}

/// Leftmost geodesic from the source of `dist` to the origin of `start`,
/// scanning counter-clockwise from `start` at the target.
pub fn leftmost_geodesic(map: &PlanarMap, dist: &DistanceField, start: u32) -> Result<GeodesicPath, GeodesicError> {
    let vertex = |d: u32| dist.vertices.of[d as usize];
    let mut d = start;
    let mut vertices = vec![vertex(d)];
    let mut down = Vec::new();
    loop {
        let here = dist.of_dart(d);
        if here == 0 {
            break;
        }
        let mut x = d;
        loop {
            if dist.of_dart(map.alpha(x)) + 1 == here {
                break;
            }
            x = map.sigma(x);
            if x == d {
                return Err(GeodesicError::Unreachable(vertex(d)));
            }
        }
        down.push(x);
        d = map.alpha(x);
        vertices.push(vertex(d));
    }
    vertices.reverse();
    let darts = down.iter().rev().map(|&x| map.alpha(x)).collect();
    Ok(GeodesicPath { vertices, darts })
}

/// Reference darts of the top-boundary vertices: for the vertex `u_k` the
/// top-hole dart leaving it, where `u_0` is the endpoint of `top_anchor`
/// and the vertices are numbered clockwise (against the hole's `phi`).
pub fn top_references(map: &PlanarMap, top_anchor: u32) -> Vec<u32> {
    let cycle = map.face_darts(top_anchor);
    let q = cycle.len();
    // cycle[i] = phi^i(T_0) = T_{-i}; the dart leaving u_k is T_{k-1}.
    (0..q).map(|k| cycle[(q + 1 - k % q) % q]).collect()
}

/// Union of the leftmost geodesics from the origins of `sources` (in order).
pub fn geodesic_tree(map: &PlanarMap, dist: &DistanceField, sources: &[u32]) -> Result<GeodesicTree, GeodesicError> {
    Ok(geodesic_tree_with_paths(map, dist, sources)?.0)
}

fn geodesic_tree_with_paths(
    map: &PlanarMap,
    dist: &DistanceField,
    sources: &[u32],
) -> Result<(GeodesicTree, Vec<GeodesicPath>, Vec<Vec<u32>>), GeodesicError> {
    let paths = sources
        .iter()
        .map(|&s| leftmost_geodesic(map, dist, s))
        .collect::<Result<Vec<_>, _>>()?;
    let vertex_paths: Vec<Vec<u32>> = paths.iter().map(|p| p.vertices.clone()).collect();
    let (tree, nodes) = GeodesicTree::from_paths(&vertex_paths)?;
    Ok((tree, paths, nodes))
}

/// One strip cut out of a map by [`slice`]. The side labels are geodesic
/// tree nodes (the upper endpoint of every side edge), listed from the top.
#[derive(Clone, Debug)]
pub struct Slice {
    pub strip: StripMap,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    /// The strip dart that was the root of the original map, if any.
    pub root: Option<u32>,
}

/// Cut `map` along the leftmost geodesics from the top-hole references
/// `sources` (given left to right). Slice `i` lies between the geodesics of
/// `sources[i]` and `sources[i + 1]` (cyclically).
pub fn slice(map: &PlanarMap, dist: &DistanceField, sources: &[u32]) -> Result<Vec<Slice>, GeodesicError> {
    let (_, paths, nodes) = geodesic_tree_with_paths(map, dist, sources)?;
    let n = map.num_darts();
    let faces = map.faces();
    let top = sources[0];
    let top_face = faces.of[top as usize];
    // Edges on some geodesic cannot be crossed.
    let mut barrier = vec![false; n];
    for p in &paths {
        for &d in &p.darts {
            barrier[d as usize] = true;
            barrier[map.alpha(d) as usize] = true;
        }
    }
    let k = sources.len();
    if k == 1 {
        return Ok(vec![slice_single(map, &paths[0], &nodes[0], sources[0])?]);
    }
    let mut out = Vec::with_capacity(k);
    let mut owner = vec![NONE; faces.count()];
    for i in 0..k {
        let j = (i + 1) % k;
        // First edge of the top below the strip: from the left source vertex
        // towards the right.
        let start = map.alpha(map.phi_inv(sources[i]));
        let mut keep = vec![false; faces.count()];
        let mut stack = vec![faces.of[start as usize]];
        keep[faces.of[start as usize] as usize] = true;
        while let Some(f) = stack.pop() {
            if owner[f as usize] != NONE {
                return Err(GeodesicError::Mismatch("strips overlap".into()));
            }
            owner[f as usize] = i as u32;
            for d in map.face_darts(faces.rep[f as usize]) {
                if barrier[d as usize] {
                    continue;
                }
                let g = faces.of[map.alpha(d) as usize];
                if g != top_face && !keep[g as usize] {
                    keep[g as usize] = true;
                    stack.push(g);
                }
            }
        }
        let (cut, new_id) = map.with_root(start).cut(&faces, &keep)?;
        if cut.holes().len() != 1 {
            return Err(GeodesicError::Mismatch(format!("strip {i} is not a disk")));
        }
        // Common part of the two paths, from the source.
        let (li, ri) = (&nodes[i], &nodes[j]);
        let shared = li.iter().zip(ri).take_while(|(a, b)| a == b).count();
        let height = li.len() - shared;
        if ri.len() != li.len() || height == 0 {
            return Err(GeodesicError::Mismatch(
                "sources must lie on the top at equal distance".into(),
            ));
        }
        // Boundary from the top dart arriving at the left vertex: down the
        // left path, up the right path.
        let t = new_id[map.phi_inv(sources[i]) as usize];
        let mut root = cut.phi(t);
        for _ in 0..height {
            root = cut.phi(root);
        }
        let orig_root = (keep[faces.of[map.root() as usize] as usize]).then(|| new_id[map.root() as usize]);
        let (canon, labels) = cut.with_root(root).canonicalize_with_labels();
        let strip = StripMap { map: canon, height };
        let left = li[shared..].iter().rev().copied().collect();
        let right = ri[shared..].iter().rev().copied().collect();
        out.push(Slice {
            strip,
            left,
            right,
            root: orig_root.map(|d| labels[d as usize]),
        });
    }
    if owner
        .iter()
        .enumerate()
        .any(|(f, &o)| o == NONE && f as u32 != top_face)
    {
        return Err(GeodesicError::Mismatch("faces outside every strip".into()));
    }
    Ok(out)
}

fn slice_single(map: &PlanarMap, path: &GeodesicPath, nodes: &[u32], source: u32) -> Result<Slice, GeodesicError> {
    let mut b = MapBuilder::from_map(map);
    let descent = path.descent(map);
    let hole_in = map.phi_inv(source);
    let (_, up) = b.slit(&descent, hole_in);
    let root = *up.last().unwrap();
    // Track the original root through canonicalization.
    let orig_root = map.root();
    let (canon, labels) = b.finish_with_labels(root, vec![root])?;
    let side: Vec<u32> = nodes[1..].iter().rev().copied().collect();
    let strip = StripMap {
        map: canon,
        height: descent.len(),
    };
    Ok(Slice {
        strip,
        left: side.clone(),
        right: side,
        root: Some(labels[orig_root as usize]),
    })
}

/// Reassemble slices produced by [`slice`]: sides carrying the same tree
/// node are glued and the tops are joined in order. The result is rooted at
/// the recorded root (canonical form).
pub fn glue(slices: &[Slice]) -> Result<PlanarMap, GeodesicError> {
    // Disjoint union with boundary bookkeeping.
    let mut alpha: Vec<u32> = Vec::new();
    let mut phi: Vec<u32> = Vec::new();
    let mut removed: Vec<bool> = Vec::new();
    let mut side_darts: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut tops: Vec<(u32, u32)> = Vec::new();
    let mut root = NONE;
    for s in slices {
        let m = &s.strip.map;
        let base = alpha.len() as u32;
        alpha.extend(m.alpha_slice().iter().map(|&a| a + base));
        phi.extend(m.phi_table().iter().map(|&p| p + base));
        removed.extend(std::iter::repeat_n(false, m.num_darts()));
        let bd = s.strip.boundary();
        let h = s.strip.height;
        let len = bd.len();
        if s.left.len() != h || s.right.len() != h {
            return Err(GeodesicError::Mismatch(
                "side labels do not match the strip height".into(),
            ));
        }
        // Right side: bd[0..h] going up from the bottom; labels listed from the top.
        for k in 0..h {
            side_darts.entry(s.right[h - 1 - k]).or_default().push(bd[k] + base);
            side_darts
                .entry(s.left[h - 1 - k])
                .or_default()
                .push(bd[len - 1 - k] + base);
        }
        for &d in bd.iter().take(h).chain(bd.iter().skip(len - h)) {
            removed[(d + base) as usize] = true;
        }
        tops.push((bd[h] + base, bd[len - h - 1] + base));
        if let Some(r) = s.root {
            root = r + base;
        }
    }
    if root == NONE {
        return Err(GeodesicError::Mismatch("no slice carries the root".into()));
    }
    for (node, ds) in &side_darts {
        if ds.len() != 2 {
            return Err(GeodesicError::Mismatch(format!(
                "tree edge {node} bounds {} strips",
                ds.len()
            )));
        }
        let (a, b) = (alpha[ds[0] as usize], alpha[ds[1] as usize]);
        alpha[a as usize] = b;
        alpha[b as usize] = a;
    }
    // Join the tops: the last top dart of slice i continues with the first
    // top dart of slice i - 1.
    let k = tops.len();
    for i in 0..k {
        let prev = (i + k - 1) % k;
        phi[tops[i].1 as usize] = tops[prev].0;
    }
    let n = alpha.len();
    let mut new_id = vec![NONE; n];
    let mut count = 0u32;
    for d in 0..n {
        if !removed[d] {
            new_id[d] = count;
            count += 1;
        }
    }
    let mut na = vec![0; count as usize];
    let mut nphi = vec![0; count as usize];
    for d in 0..n {
        if removed[d] {
            continue;
        }
        na[new_id[d] as usize] = new_id[alpha[d] as usize];
        nphi[new_id[d] as usize] = new_id[phi[d] as usize];
    }
    let hole = new_id[tops[0].0 as usize];
    Ok(PlanarMap::from_alpha_phi(na, nphi, new_id[root as usize], vec![hole])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planarmap::Source;
    use crate::skeleton::{decode_cylinder, encode_strip, Mode, ReverseForest, SkeletonDecomposition};

    fn figure3_cylinder() -> (ReverseForest, crate::skeleton::DecodedCylinder) {
        let f = ReverseForest::new(
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 1, 0, 1, 0, 2],
                vec![3, 0, 2, 1, 0, 1],
                vec![1, 0, 2, 0, 1, 1, 1, 0],
            ],
            0,
        )
        .unwrap();
        let sk = SkeletonDecomposition::with_fillings(f.clone(), Mode::Cylinder, |k| -> Result<_, SkeletonError> {
            Ok(PlanarMap::fan(k))
        })
        .unwrap();
        (f, decode_cylinder(&sk, usize::MAX).unwrap())
    }

    #[test]
    fn leftmost_geodesics_follow_between_tree_paths() {
        let (f, dec) = figure3_cylinder();
        let map = &dec.map;
        let dist = map.distances(Source::Hole(0)).unwrap();
        let refs = top_references(map, dec.top_anchor());
        let r = f.height();
        for (i, &s) in refs.iter().enumerate() {
            let path = leftmost_geodesic(map, &dist, s).unwrap();
            assert_eq!(path.len(), r);
            let mut pos = i;
            let mut expected = vec![dist.vertices.of[dec.layers[r][pos] as usize]];
            for j in (1..=r).rev() {
                pos = f.child_starts(j)[pos] % f.level(j - 1).len();
                expected.push(dist.vertices.of[dec.layers[j - 1][pos] as usize]);
            }
            expected.reverse();
            assert_eq!(path.vertices, expected, "top vertex {i}");
        }
    }

    #[test]
    fn strip_slice_of_decoded_strip() {
        let f = ReverseForest::new(vec![vec![0, 0, 0], vec![2, 1], vec![1, 1]], 0).unwrap();
        let sk = SkeletonDecomposition::with_fillings(f, Mode::Strip, |k| -> Result<_, SkeletonError> {
            Ok(PlanarMap::fan(k))
        })
        .unwrap();
        let strip = crate::skeleton::decode_strip(&sk, usize::MAX).unwrap();
        assert_eq!(encode_strip(&strip).unwrap(), sk);
    }
}
