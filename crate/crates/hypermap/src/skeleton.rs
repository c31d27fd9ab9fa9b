//! Skeleton decomposition of cylinder triangulations and strips.
//!
//! A cylinder triangulation of height `r` is cut along the boundaries
//! `∂_0, ..., ∂_r` of its hulls. Every edge of `∂_j` (`j ≥ 1`) carries a
//! downward triangle whose apex lies on `∂_{j-1}`; the edges of `∂_{j-1}`
//! between two consecutive apexes are the *children* of the right-hand edge,
//! which gives a forest of plane trees read in reverse height. The holes left
//! between downward triangles are filled by triangulations of polygons with
//! perimeter `c + 2`. [`encode`] and [`decode`] implement this bijection.
//!
//! Conventions: the forest levels are indexed by reverse height, `levels[r]`
//! holding the roots and `levels[0]` the bottom vertices; at every level the
//! vertices are listed clockwise (the direction of [`PlanarMap::phi`] along
//! the bottom hole). The children of level `j` are the concatenation, in
//! order, of the children of the vertices of level `j + 1`.
//!
//! In *strip* mode the bottom cycle is collapsed to a single vertex `ρ`: the
//! level-0 edges also carry downward triangles (all with apex `ρ`) and
//! degenerate-or-not 2-gon fillings, and the map is slit along the leftmost
//! geodesic from the top-left vertex to `ρ`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::planarmap::{MapBuilder, MapError, PlanarMap, Source, NONE};

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("invalid forest: {0}")]
    Forest(String),
    #[error("filling ({level}, {index}) has perimeter {found}, expected {expected}")]
    Perimeter {
        level: usize,
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("not a cylinder triangulation: {0}")]
    NotACylinder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A finite forest of plane trees stored level by level in reverse height.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReverseForest {
    levels: Vec<Vec<u32>>,
    distinguished: usize,
}

impl ReverseForest {
    /// Forest from child counts per level (`levels[0]` must be all zeros and
    /// the counts of level `j` must sum to the size of level `j - 1`).
    pub fn new(levels: Vec<Vec<u32>>, distinguished: usize) -> Result<Self, SkeletonError> {
        if levels.is_empty() {
            return Err(SkeletonError::Forest("no levels".into()));
        }
        if levels[0].iter().any(|&c| c != 0) {
            return Err(SkeletonError::Forest("level 0 vertices cannot have children".into()));
        }
        for j in 1..levels.len() {
            let total: u64 = levels[j].iter().map(|&c| c as u64).sum();
            if total != levels[j - 1].len() as u64 {
                return Err(SkeletonError::Forest(format!(
                    "level {j} has {total} children but level {} has {} vertices",
                    j - 1,
                    levels[j - 1].len()
                )));
            }
        }
        if levels.iter().any(|l| l.is_empty()) {
            return Err(SkeletonError::Forest("empty level".into()));
        }
        if distinguished >= levels[0].len() {
            return Err(SkeletonError::Forest(format!(
                "distinguished vertex {distinguished} out of range"
            )));
        }
        Ok(ReverseForest { levels, distinguished })
    }

    /// The height `r` (index of the root level).
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &[u32] {
        &self.levels[j]
    }

    /// Number of bottom vertices (reverse height 0).
    pub fn p(&self) -> usize {
        self.levels[0].len()
    }

    /// Number of trees (vertices at reverse height `r`).
    pub fn q(&self) -> usize {
        self.levels[self.height()].len()
    }

    /// Index of the distinguished vertex at reverse height 0.
    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn num_vertices(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Index in level `j - 1` of the first child of each vertex of level `j`
    /// (with one extra entry equal to the size of level `j - 1`).
    pub fn child_starts(&self, j: usize) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.levels[j].len() + 1);
        let mut s = 0;
        starts.push(0);
        for &c in &self.levels[j] {
            s += c as usize;
            starts.push(s);
        }
        starts
    }

    /// Index at level `to` of the ancestor of vertex `i` at level `from`.
    pub fn ancestor(&self, from: usize, mut i: usize, to: usize) -> usize {
        for j in from + 1..=to {
            let starts = self.child_starts(j);
            // Last vertex whose first child is at most i and which has children.
            i = starts.partition_point(|&s| s <= i) - 1;
            while self.levels[j][i] == 0 {
                i -= 1;
            }
        }
        i
    }

    /// Index of the tree containing the distinguished vertex.
    pub fn distinguished_tree(&self) -> usize {
        self.ancestor(0, self.distinguished, self.height())
    }

    /// Admissible: the distinguished vertex lies in the first tree.
    pub fn is_admissible(&self) -> bool {
        self.distinguished_tree() == 0
    }

    /// Ball `B_r`: the levels `0..=r` in the same cyclic order.
    pub fn ball(&self, r: usize) -> ReverseForest {
        assert!(r <= self.height(), "ball radius exceeds forest height");
        ReverseForest {
            levels: self.levels[..=r].to_vec(),
            distinguished: self.distinguished,
        }
    }

    /// Ball `B'_r`: `B_r` rotated so the distinguished vertex's tree is first.
    pub fn reordered_ball(&self, r: usize) -> ReverseForest {
        let ball = self.ball(r);
        let t = ball.distinguished_tree();
        ball.rotate(t)
    }

    /// Cyclic rotation moving the first `k` trees to the end.
    pub fn rotate(&self, k: usize) -> ReverseForest {
        let r = self.height();
        let mut shift = vec![0usize; r + 1];
        shift[r] = k % self.q();
        for j in (1..=r).rev() {
            shift[j - 1] = self.child_starts(j)[shift[j]];
        }
        let levels: Vec<Vec<u32>> = self
            .levels
            .iter()
            .zip(&shift)
            .map(|(l, &s)| l[s..].iter().chain(&l[..s]).copied().collect())
            .collect();
        let p = self.p();
        let distinguished = (self.distinguished + p - shift[0]) % p;
        ReverseForest { levels, distinguished }
    }

    /// Stack blocks side by side: block `b` has height `r - offset_b` and
    /// occupies the levels `offset_b..=r`. The distinguished vertex is taken
    /// from the first block, which must have offset 0.
    pub fn concat_blocks(blocks: &[(ReverseForest, usize)]) -> Result<ReverseForest, SkeletonError> {
        let (first, off0) = blocks
            .first()
            .ok_or_else(|| SkeletonError::Forest("no blocks".into()))?;
        if *off0 != 0 {
            return Err(SkeletonError::Forest("first block must reach level 0".into()));
        }
        let r = first.height();
        let mut levels = vec![Vec::new(); r + 1];
        for (b, off) in blocks {
            if b.height() + off != r {
                return Err(SkeletonError::Forest("block heights do not line up".into()));
            }
            for (k, l) in b.levels.iter().enumerate() {
                levels[k + off].extend_from_slice(l);
            }
        }
        ReverseForest::new(levels, first.distinguished)
    }

    /// Trees as parenthesized strings, e.g. `(()())`.
    pub fn tree_parens(&self) -> Vec<String> {
        let r = self.height();
        let starts: Vec<Vec<usize>> = (0..=r)
            .map(|j| if j == 0 { vec![0] } else { self.child_starts(j) })
            .collect();
        let mut out = Vec::with_capacity(self.q());
        for t in 0..self.q() {
            let mut s = String::new();
            // Explicit stack of (level, index, next child offset).
            let mut stack = vec![(r, t, 0usize)];
            s.push('(');
            while let Some(top) = stack.last_mut() {
                let (j, i, k) = *top;
                if j > 0 && k < self.levels[j][i] as usize {
                    top.2 += 1;
                    stack.push((j - 1, starts[j][i] + k, 0));
                    s.push('(');
                } else {
                    stack.pop();
                    s.push(')');
                }
            }
            out.push(s);
        }
        out
    }

    /// Text format: `forest <r>`, `trees <parens>...`, and
    /// `distinguished <tree> <child index>...` (the path from the tree root).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "forest {}", self.height());
        let _ = writeln!(s, "trees {}", self.tree_parens().join(" "));
        let r = self.height();
        let mut path = Vec::with_capacity(r);
        let mut i = self.distinguished;
        for j in 1..=r {
            let parent = self.ancestor(j - 1, i, j);
            path.push(i - self.child_starts(j)[parent]);
            i = parent;
        }
        path.reverse();
        let _ = write!(s, "distinguished {i}");
        for c in path {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, SkeletonError> {
        let bad = |m: &str| SkeletonError::Parse(m.to_string());
        let mut height = None;
        let mut trees: Option<Vec<&str>> = None;
        let mut dist: Option<Vec<usize>> = None;
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("forest") => {
                    height = Some(
                        it.next()
                            .ok_or_else(|| bad("missing height"))?
                            .parse::<usize>()
                            .map_err(|e| bad(&e.to_string()))?,
                    )
                }
                Some("trees") => trees = Some(it.collect()),
                Some("distinguished") => {
                    dist = Some(
                        it.map(|x| x.parse::<usize>())
                            .collect::<Result<_, _>>()
                            .map_err(|e| bad(&e.to_string()))?,
                    )
                }
                _ => return Err(bad(&format!("unexpected line `{line}`"))),
            }
        }
        let r = height.ok_or_else(|| bad("missing `forest` line"))?;
        let trees = trees.ok_or_else(|| bad("missing `trees` line"))?;
        let dist = dist.ok_or_else(|| bad("missing `distinguished` line"))?;
        let mut levels = vec![Vec::new(); r + 1];
        // Position in level j of the current vertex on the path (for the path lookup).
        for t in &trees {
            let mut depth: isize = -1;
            for ch in t.chars() {
                match ch {
                    '(' => {
                        depth += 1;
                        let j = r as isize - depth;
                        if j < 0 {
                            return Err(bad("tree deeper than the forest height"));
                        }
                        levels[j as usize].push(0);
                        if depth > 0 {
                            let parent = levels[j as usize + 1].last_mut().unwrap();
                            *parent += 1;
                        }
                    }
                    ')' => depth -= 1,
                    _ => return Err(bad("trees must consist of parentheses")),
                }
                if depth < -1 {
                    return Err(bad("unbalanced parentheses"));
                }
            }
            if depth != -1 {
                return Err(bad("unbalanced parentheses"));
            }
        }
        if dist.len() != r + 1 {
            return Err(bad("distinguished path must have one tree index and r child indices"));
        }
        let mut probe = ReverseForest {
            levels: levels.clone(),
            distinguished: 0,
        };
        if probe.levels.iter().any(|l| l.is_empty()) {
            return Err(bad("empty level"));
        }
        let mut i = dist[0];
        if i >= probe.q() {
            return Err(bad("distinguished tree out of range"));
        }
        for (k, &c) in dist[1..].iter().enumerate() {
            let j = r - k;
            if c >= probe.levels[j][i] as usize {
                return Err(bad("distinguished path leaves the tree"));
            }
            i = probe.child_starts(j)[i] + c;
        }
        probe.distinguished = i;
        ReverseForest::new(probe.levels, probe.distinguished)
    }
}

/// Which kind of object a skeleton describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Cylinder,
    Strip,
}

/// A forest together with one filling per vertex of positive reverse height
/// (cylinders) or per vertex (strips). `fillings[j][i]` fills the hole to the
/// left of the downward triangle of vertex `i` at level `j` and has perimeter
/// `levels[j][i] + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonDecomposition {
    pub forest: ReverseForest,
    pub mode: Mode,
    pub fillings: Vec<Vec<PlanarMap>>,
}

impl SkeletonDecomposition {
    /// Skeleton whose 2-gon fillings are all degenerate single edges; fails if
    /// some vertex has children (larger polygons need real fillings).
    pub fn with_degenerate_fillings(forest: ReverseForest, mode: Mode) -> Result<Self, SkeletonError> {
        let fillings = Self::filled_levels(&forest, mode)
            .map(|j| {
                forest.levels[j]
                    .iter()
                    .map(|&c| {
                        if c == 0 {
                            Ok(PlanarMap::single_edge())
                        } else {
                            Err(SkeletonError::Forest(
                                "vertex with children needs an explicit filling".into(),
                            ))
                        }
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        Ok(Self::pad(forest, mode, fillings))
    }

    /// Skeleton with fillings produced by `fill(perimeter)`.
    pub fn with_fillings<F, E>(forest: ReverseForest, mode: Mode, mut fill: F) -> Result<Self, E>
    where
        F: FnMut(usize) -> Result<PlanarMap, E>,
    {
        let mut fillings = Vec::new();
        for j in Self::filled_levels(&forest, mode) {
            let mut row = Vec::with_capacity(forest.levels[j].len());
            for &c in &forest.levels[j] {
                row.push(fill(c as usize + 2)?);
            }
            fillings.push(row);
        }
        Ok(Self::pad(forest, mode, fillings))
    }

    fn filled_levels(forest: &ReverseForest, mode: Mode) -> std::ops::RangeInclusive<usize> {
        match mode {
            Mode::Cylinder => 1..=forest.height(),
            Mode::Strip => 0..=forest.height(),
        }
    }

    fn pad(forest: ReverseForest, mode: Mode, mut fillings: Vec<Vec<PlanarMap>>) -> Self {
        if mode == Mode::Cylinder {
            fillings.insert(0, Vec::new());
        }
        SkeletonDecomposition { forest, mode, fillings }
    }

    /// Check filling counts and perimeters.
    pub fn check(&self) -> Result<(), SkeletonError> {
        let f = &self.forest;
        if self.fillings.len() != f.height() + 1 {
            return Err(SkeletonError::Forest("one row of fillings per level expected".into()));
        }
        for j in 0..=f.height() {
            let needed = j > 0 || self.mode == Mode::Strip;
            let row = &self.fillings[j];
            if !needed {
                if !row.is_empty() {
                    return Err(SkeletonError::Forest("cylinders carry no level-0 fillings".into()));
                }
                continue;
            }
            if row.len() != f.levels[j].len() {
                return Err(SkeletonError::Forest(format!(
                    "level {j} needs {} fillings",
                    f.levels[j].len()
                )));
            }
            for (i, m) in row.iter().enumerate() {
                let found = m.face_darts(m.root()).len();
                let expected = f.levels[j][i] as usize + 2;
                if found != expected {
                    return Err(SkeletonError::Perimeter {
                        level: j,
                        index: i,
                        found,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    /// Total number of darts of the decoded map.
    pub fn dart_count(&self) -> usize {
        let f = &self.forest;
        let tri: usize = (1..=f.height()).map(|j| 3 * f.levels[j].len()).sum::<usize>()
            + f.q()
            + match self.mode {
                Mode::Cylinder => f.p(),
                Mode::Strip => 3 * f.p() + 2 * (f.height() + 1),
            };
        let fill: usize = self
            .fillings
            .iter()
            .flatten()
            .map(|m| m.num_darts() - m.face_darts(m.root()).len())
            .sum();
        tri + fill
    }

    /// Write `skeleton.forest` plus one map file per filling into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SkeletonError> {
        std::fs::create_dir_all(dir)?;
        let mode = match self.mode {
            Mode::Cylinder => "cylinder",
            Mode::Strip => "strip",
        };
        std::fs::write(
            dir.join("skeleton.forest"),
            format!("mode {mode}\n{}", self.forest.to_text()),
        )?;
        for (j, row) in self.fillings.iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                std::fs::write(dir.join(format!("fill_{j}_{i}.map")), m.to_text())?;
            }
        }
        Ok(())
    }

    /// Read a directory written by [`write_dir`](Self::write_dir). Missing
    /// 2-gon fillings default to the degenerate single edge.
    pub fn read_dir(dir: &Path) -> Result<Self, SkeletonError> {
        Self::read_parts(&dir.join("skeleton.forest"), dir)
    }

    /// Read a forest file and the fillings stored in `fills`, named as by
    /// [`write_dir`](Self::write_dir).
    pub fn read_parts(forest: &Path, fills: &Path) -> Result<Self, SkeletonError> {
        let dir = fills;
        let text = std::fs::read_to_string(forest)?;
        let mut mode = Mode::Cylinder;
        let mut rest = String::new();
        for line in text.lines() {
            match line.trim().strip_prefix("mode ") {
                Some("cylinder") => mode = Mode::Cylinder,
                Some("strip") => mode = Mode::Strip,
                Some(other) => return Err(SkeletonError::Parse(format!("unknown mode `{other}`"))),
                None => {
                    rest.push_str(line);
                    rest.push('\n');
                }
            }
        }
        let forest = ReverseForest::from_text(&rest)?;
        let mut fillings = Vec::new();
        for j in Self::filled_levels(&forest, mode) {
            let mut row = Vec::new();
            for (i, &c) in forest.levels[j].iter().enumerate() {
                let path = dir.join(format!("fill_{j}_{i}.map"));
                if path.exists() {
                    row.push(PlanarMap::from_text(&std::fs::read_to_string(path)?)?);
                } else if c == 0 {
                    row.push(PlanarMap::single_edge());
                } else {
                    return Err(SkeletonError::Parse(format!("missing filling {}", path.display())));
                }
            }
            fillings.push(row);
        }
        let sk = Self::pad(forest, mode, fillings);
        sk.check()?;
        Ok(sk)
    }
}

/// A strip: a triangulated disk whose boundary, read from the root, is the
/// right geodesic side (`height` darts going up), the top (`q` darts) and the
/// left geodesic side (`height` darts going down). The root leaves the bottom
/// vertex `ρ` with the hole on its right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripMap {
    pub map: PlanarMap,
    pub height: usize,
}

impl StripMap {
    /// Top perimeter `q`.
    pub fn top_len(&self) -> usize {
        self.map.hole_degree(0) - 2 * self.height
    }

    /// Darts of the boundary from the root: right side, top, left side.
    pub fn boundary(&self) -> Vec<u32> {
        self.map.face_darts(self.map.root())
    }
}

/// A decoded cylinder with the positions of its layers.
#[derive(Clone, Debug)]
pub struct DecodedCylinder {
    pub map: PlanarMap,
    /// `layers[j][i]`: the dart of `∂_j` from vertex `i` to vertex `i + 1`
    /// (clockwise, the lower side on its right), in forest order.
    pub layers: Vec<Vec<u32>>,
}

impl DecodedCylinder {
    /// The top-hole dart arriving at the first vertex of tree 0.
    pub fn top_anchor(&self) -> u32 {
        self.map.alpha(self.layers[self.layers.len() - 1][0])
    }
}

struct Layout {
    builder: MapBuilder,
    /// Clockwise darts per level, builder ids.
    cw: Vec<Vec<u32>>,
    /// Top face darts; `top[i]` is paired with `cw[r][i]`.
    top: Vec<u32>,
    /// Downward darts per level (strip mode needs them for the slit).
    down: Vec<Vec<u32>>,
}

fn layout(sk: &SkeletonDecomposition, cap: usize) -> Result<Layout, SkeletonError> {
    sk.check()?;
    let f = &sk.forest;
    let r = f.height();
    let strip = sk.mode == Mode::Strip;
    let mut b = MapBuilder::with_cap(cap);
    let mut cw: Vec<Vec<u32>> = Vec::with_capacity(r + 1);
    let mut down: Vec<Vec<u32>> = Vec::with_capacity(r + 1);
    let mut ups: Vec<Vec<u32>> = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let n = f.levels[j].len();
        if j == 0 && !strip {
            let first = b.add_face(n);
            cw.push((0..n as u32).map(|i| first + i).collect());
            down.push(Vec::new());
            ups.push(Vec::new());
            continue;
        }
        let mut c = Vec::with_capacity(n);
        let mut dn = Vec::with_capacity(n);
        let mut up = Vec::with_capacity(n);
        for _ in 0..n {
            let [t1, t2, t3] = b.add_triangle();
            c.push(t1);
            dn.push(t2);
            up.push(t3);
        }
        cw.push(c);
        down.push(dn);
        ups.push(up);
        if b.over_cap() {
            return Err(MapError::SizeCap(cap).into());
        }
    }
    for j in (if strip { 0 } else { 1 })..=r {
        let n = f.levels[j].len();
        let starts = if j > 0 { f.child_starts(j) } else { vec![0; n + 1] };
        for i in 0..n {
            let ci = f.levels[j][i] as usize;
            let mut outside = Vec::with_capacity(ci + 2);
            outside.push(ups[j][i]);
            for k in (0..ci).rev() {
                outside.push(cw[j - 1][starts[i] + k]);
            }
            outside.push(down[j][(i + n - 1) % n]);
            b.glue(&sk.fillings[j][i], &outside)?;
            if b.over_cap() {
                return Err(MapError::SizeCap(cap).into());
            }
        }
    }
    let q = f.levels[r].len();
    let first = b.add_face(q);
    // top[i] runs from vertex i + 1 to vertex i, so phi(top[i]) = top[i - 1].
    let top: Vec<u32> = (0..q).map(|i| first + ((q - i) % q) as u32).collect();
    for i in 0..q {
        b.pair(top[i], cw[r][i]);
    }
    Ok(Layout {
        builder: b,
        cw,
        top,
        down,
    })
}

/// Decode a cylinder skeleton.
pub fn decode(sk: &SkeletonDecomposition) -> Result<PlanarMap, SkeletonError> {
    Ok(decode_cylinder(sk, usize::MAX)?.map)
}

/// Decode a cylinder skeleton, keeping track of the layer darts. `cap`
/// bounds the number of darts.
pub fn decode_cylinder(sk: &SkeletonDecomposition, cap: usize) -> Result<DecodedCylinder, SkeletonError> {
    if sk.mode != Mode::Cylinder {
        return Err(SkeletonError::Forest("expected a cylinder skeleton".into()));
    }
    let Layout { builder, cw, top, .. } = layout(sk, cap)?;
    let f = &sk.forest;
    let root = cw[0][f.distinguished];
    let (map, labels) = builder.finish_with_labels(root, vec![cw[0][0], top[0]])?;
    let layers = cw
        .iter()
        .map(|l| l.iter().map(|&d| labels[d as usize]).collect())
        .collect();
    Ok(DecodedCylinder { map, layers })
}

/// Decode a strip skeleton. The forest of height `r` gives a strip of height
/// `r + 1`.
pub fn decode_strip(sk: &SkeletonDecomposition, cap: usize) -> Result<StripMap, SkeletonError> {
    if sk.mode != Mode::Strip {
        return Err(SkeletonError::Forest("expected a strip skeleton".into()));
    }
    let Layout {
        mut builder, top, down, ..
    } = layout(sk, cap)?;
    let r = sk.forest.height();
    // Leftmost geodesic from the top-left vertex: at every level the downward
    // dart of the last edge.
    let path: Vec<u32> = (0..=r).rev().map(|j| *down[j].last().unwrap()).collect();
    let (_, up) = builder.slit(&path, top[0]);
    let root = *up.last().unwrap();
    let map = builder.finish(root, vec![root])?;
    Ok(StripMap { map, height: r + 1 })
}

/// Glue the two geodesic sides of a strip, giving a disk with one hole (the
/// top) and root leaving `ρ`. Returns the raw map and the top dart arriving
/// at the top of the glued path.
fn close_strip(strip: &StripMap) -> Result<(PlanarMap, u32), SkeletonError> {
    let m = &strip.map;
    let h = strip.height;
    let bd = strip.boundary();
    let len = bd.len();
    if h == 0 || len < 2 * h + 1 {
        return Err(SkeletonError::NotACylinder("strip boundary too short".into()));
    }
    let n = m.num_darts();
    let mut removed = vec![false; n];
    for &d in bd.iter().take(h).chain(bd.iter().skip(len - h)) {
        removed[d as usize] = true;
    }
    let mut new_id = vec![NONE; n];
    let mut count = 0u32;
    for d in 0..n {
        if !removed[d] {
            new_id[d] = count;
            count += 1;
        }
    }
    let mut alpha = vec![NONE; count as usize];
    let mut phi = vec![NONE; count as usize];
    for d in 0..n as u32 {
        let id = new_id[d as usize];
        if id == NONE {
            continue;
        }
        let a = m.alpha(d);
        if !removed[a as usize] {
            alpha[id as usize] = new_id[a as usize];
        }
        let p = m.phi(d);
        if !removed[p as usize] {
            phi[id as usize] = new_id[p as usize];
        }
    }
    // Glue right side k (going up from ρ) with left side k (going down to ρ).
    for k in 0..h {
        let right = m.alpha(bd[k]);
        let left = m.alpha(bd[len - 1 - k]);
        if removed[right as usize] || removed[left as usize] {
            return Err(SkeletonError::NotACylinder("strip sides touch".into()));
        }
        alpha[new_id[right as usize] as usize] = new_id[left as usize];
        alpha[new_id[left as usize] as usize] = new_id[right as usize];
    }
    let top_first = new_id[bd[h] as usize];
    let top_last = new_id[bd[len - h - 1] as usize];
    phi[top_last as usize] = top_first;
    let root = new_id[m.alpha(bd[len - 1]) as usize];
    let map = PlanarMap::raw_from_alpha_phi(alpha, phi, root, vec![top_first])?;
    Ok((map, top_last))
}

/// Encode a cylinder triangulation (holes: bottom, top; root on the bottom).
pub fn encode(cyl: &PlanarMap) -> Result<SkeletonDecomposition, SkeletonError> {
    let holes = cyl.holes();
    if holes.len() != 2 {
        return Err(SkeletonError::NotACylinder(format!("{} holes", holes.len())));
    }
    let bottom_face = cyl.face_darts(holes[0]);
    if !bottom_face.contains(&cyl.root()) {
        return Err(SkeletonError::NotACylinder("root not on the bottom boundary".into()));
    }
    let dist = cyl.distances(Source::Hole(0))?;
    let r = dist.of_dart(holes[1]);
    let root = cyl.root();
    let levels = Layers::compute(cyl, &dist, holes[1], r, bottom_face, false)?;
    // The tree of the root dart comes first.
    let w0 = levels.walk[0].iter().position(|&d| d == root).unwrap();
    let mut t = w0;
    for j in 1..=r as usize {
        t = levels.parent(j, t);
    }
    levels.into_skeleton(cyl, t, root, Mode::Cylinder)
}

/// Encode a strip.
pub fn encode_strip(strip: &StripMap) -> Result<SkeletonDecomposition, SkeletonError> {
    let (closed, top_last) = close_strip(strip)?;
    let dist = closed.distances(Source::Root)?;
    let h = strip.height as u32;
    let layers = Layers::compute(&closed, &dist, closed.holes()[0], h, Vec::new(), true)?;
    // The top layer starts at the edge leaving the top of the path.
    let anchor = closed.alpha(top_last);
    let top = layers.walk.len() - 1;
    let start = layers.walk[top]
        .iter()
        .position(|&d| d == anchor)
        .ok_or_else(|| SkeletonError::NotACylinder("top anchor not on the top layer".into()))?;
    layers.into_skeleton(&closed, start, NONE, Mode::Strip)
}

/// Layer structure of a cylinder (or closed strip) read off its distances.
struct Layers {
    /// Clockwise darts of each layer in walk order. In strip mode the list
    /// starts at `∂_1`.
    walk: Vec<Vec<u32>>,
    /// Child counts and first child (walk index in the layer below) per edge.
    count: Vec<Vec<u32>>,
    start: Vec<Vec<usize>>,
    strip: bool,
}

impl Layers {
    fn compute(
        map: &PlanarMap,
        dist: &crate::planarmap::DistanceField,
        top_hole: u32,
        r: u32,
        bottom: Vec<u32>,
        strip: bool,
    ) -> Result<Self, SkeletonError> {
        let err = |m: String| SkeletonError::NotACylinder(m);
        if r == 0 {
            return Err(err("height 0".into()));
        }
        let top_darts = map.face_darts(top_hole);
        if top_darts.iter().any(|&d| dist.of_dart(d) != r) {
            return Err(err("top boundary is not at constant distance".into()));
        }
        let faces = map.faces();
        let top_face = faces.of[top_hole as usize] as usize;
        let n = map.num_darts();
        let mut walk: Vec<Vec<u32>> = Vec::new();
        let lowest = if strip { 1 } else { 0 };
        if !strip {
            walk.push(bottom);
        }
        for j in 1..=r {
            let keep = map.hull_mask(dist, &faces, top_face, j);
            let kept = |d: u32| keep[faces.of[d as usize] as usize];
            let start = (0..n as u32).find(|&d| kept(d) && !kept(map.alpha(d)));
            let start = start.ok_or_else(|| err(format!("empty layer {j}")))?;
            let mut layer = vec![start];
            let mut d = start;
            loop {
                let mut x = map.phi(d);
                while kept(map.alpha(x)) {
                    x = map.sigma(x);
                }
                if x == start {
                    break;
                }
                layer.push(x);
                if layer.len() > n {
                    return Err(err(format!("layer {j} does not close")));
                }
                d = x;
            }
            let total = (0..n as u32).filter(|&d| kept(d) && !kept(map.alpha(d))).count();
            if total != layer.len() {
                return Err(err(format!("layer {j} is not a simple cycle")));
            }
            walk.push(layer);
        }
        // Downward triangles and children.
        let levels = walk.len();
        let mut count = vec![Vec::new(); levels];
        let mut start = vec![Vec::new(); levels];
        let mut index = vec![NONE; n];
        let sigma_inv = map.sigma_inv_table();
        for l in 0..levels {
            let j = l as u32 + lowest;
            if !strip && j == 0 {
                continue;
            }
            for (t, &d) in walk[l].iter().enumerate() {
                let dn = map.phi(d);
                let up = map.phi(dn);
                if map.phi(up) != d
                    || map
                        .holes()
                        .iter()
                        .any(|&h| faces.of[h as usize] == faces.of[d as usize])
                {
                    return Err(err(format!("layer {j} edge {t} has no downward triangle")));
                }
                if dist.of_dart(up) + 1 != j {
                    return Err(err(format!("layer {j} edge {t}: apex not on the layer below")));
                }
                index[d as usize] = t as u32;
            }
            let nk = walk[l].len();
            if strip && j == 1 {
                count[l] = vec![0; nk];
                start[l] = vec![0; nk];
                continue;
            }
            let below = &walk[l - 1];
            let nb = below.len();
            // Sweep the corners of the layer below clockwise.
            let mut sweep: Vec<(usize, usize)> = Vec::with_capacity(nk);
            for c in 0..nb {
                let end = below[c];
                let mut y = map.alpha(below[(c + nb - 1) % nb]);
                loop {
                    y = sigma_inv[y as usize];
                    if y == end {
                        break;
                    }
                    let target = map.phi(y);
                    let t = index[target as usize];
                    if t != NONE && walk[l].get(t as usize) == Some(&target) && map.phi(map.phi(target)) == y {
                        sweep.push((t as usize, c));
                    }
                }
            }
            if sweep.len() != nk {
                return Err(err(format!("layer {j}: {} apexes for {nk} triangles", sweep.len())));
            }
            for (s, &(t, _)) in sweep.iter().enumerate() {
                if t != (sweep[0].0 + s) % nk {
                    return Err(err(format!("layer {j}: apexes out of order")));
                }
            }
            let mut cnt = vec![0u32; nk];
            let mut st = vec![0usize; nk];
            for s in 0..nk {
                let (t, c) = sweep[s];
                let (_, prev) = sweep[(s + nk - 1) % nk];
                let k = if s == 0 { c + nb - prev } else { c - prev };
                cnt[t] = k as u32;
                st[t] = prev;
            }
            if cnt.iter().map(|&c| c as usize).sum::<usize>() != nb {
                return Err(err(format!("layer {j}: children do not cover the layer below")));
            }
            count[l] = cnt;
            start[l] = st;
        }
        Ok(Layers {
            walk,
            count,
            start,
            strip,
        })
    }

    /// Walk index of the parent (at layer `l`) of edge `e` of layer `l - 1`.
    fn parent(&self, l: usize, e: usize) -> usize {
        let nb = self.walk[l - 1].len();
        for t in 0..self.walk[l].len() {
            let off = (e + nb - self.start[l][t]) % nb;
            if off < self.count[l][t] as usize {
                return t;
            }
        }
        unreachable!("every edge has a parent")
    }

    fn into_skeleton(
        self,
        map: &PlanarMap,
        top_start: usize,
        root: u32,
        mode: Mode,
    ) -> Result<SkeletonDecomposition, SkeletonError> {
        let levels = self.walk.len();
        let top = levels - 1;
        let mut order: Vec<Vec<usize>> = vec![Vec::new(); levels];
        let nt = self.walk[top].len();
        order[top] = (0..nt).map(|i| (top_start + i) % nt).collect();
        for l in (1..levels).rev() {
            let nb = self.walk[l - 1].len();
            let mut o = Vec::with_capacity(nb);
            for &t in &order[l] {
                for m in 0..self.count[l][t] as usize {
                    o.push((self.start[l][t] + m) % nb);
                }
            }
            order[l - 1] = o;
        }
        let forest_levels: Vec<Vec<u32>> = (0..levels)
            .map(|l| {
                if !self.strip && l == 0 {
                    vec![0; self.walk[0].len()]
                } else {
                    order[l].iter().map(|&t| self.count[l][t]).collect()
                }
            })
            .collect();
        let distinguished = if root == NONE {
            0
        } else {
            order[0].iter().position(|&e| self.walk[0][e] == root).unwrap()
        };
        let forest = ReverseForest::new(forest_levels, distinguished)?;
        // Fillings.
        let n = map.num_darts();
        let mut scratch = Scratch {
            mark: vec![0; n],
            id: vec![NONE; n],
            stamp: 0,
        };
        let mut fillings = Vec::with_capacity(levels);
        for l in 0..levels {
            if !self.strip && l == 0 {
                fillings.push(Vec::new());
                continue;
            }
            let nk = self.walk[l].len();
            let mut row = Vec::with_capacity(nk);
            let mut pos = 0;
            for i in 0..nk {
                let t = order[l][i];
                let d = self.walk[l][t];
                let up = map.phi(map.phi(d));
                let prev = self.walk[l][(t + nk - 1) % nk];
                let down_prev = map.phi(prev);
                let c = self.count[l][t] as usize;
                let mut outside = Vec::with_capacity(c + 2);
                outside.push(up);
                for k in (0..c).rev() {
                    outside.push(self.walk[l - 1][order[l - 1][pos + k]]);
                }
                pos += c;
                outside.push(down_prev);
                row.push(extract_filling(map, &outside, &mut scratch)?);
            }
            fillings.push(row);
        }
        Ok(SkeletonDecomposition { forest, mode, fillings })
    }
}

struct Scratch {
    mark: Vec<u32>,
    id: Vec<u32>,
    stamp: u32,
}

/// Extract the triangulated polygon enclosed by the darts `outside` (listed
/// clockwise around the polygon, with the polygon on their left).
fn extract_filling(map: &PlanarMap, outside: &[u32], s: &mut Scratch) -> Result<PlanarMap, SkeletonError> {
    let k = outside.len();
    if map.alpha(outside[0]) == outside[k - 1] {
        if k != 2 {
            return Err(SkeletonError::NotACylinder("pinched filling".into()));
        }
        return Ok(PlanarMap::single_edge());
    }
    s.stamp += 2;
    let barrier = s.stamp - 1;
    let inside = s.stamp;
    for &o in outside {
        s.mark[o as usize] = barrier;
    }
    let start = map.alpha(outside[0]);
    let mut region = vec![start];
    s.mark[start as usize] = inside;
    let mut i = 0;
    while i < region.len() {
        let d = region[i];
        i += 1;
        let a = map.alpha(d);
        let next = if s.mark[a as usize] == barrier { map.phi(d) } else { a };
        for e in [next, map.phi(d)] {
            if s.mark[e as usize] == barrier {
                return Err(SkeletonError::NotACylinder("filling region leaks".into()));
            }
            if s.mark[e as usize] != inside {
                s.mark[e as usize] = inside;
                region.push(e);
            }
        }
    }
    for &d in &region {
        let p = map.phi(d);
        if map.phi(map.phi(p)) != d {
            return Err(SkeletonError::NotACylinder(
                "non-triangular face inside a filling".into(),
            ));
        }
    }
    // Relabel: region darts first, then the outer face b_0..b_{k-1}.
    let nr = region.len() as u32;
    for (j, &d) in region.iter().enumerate() {
        s.id[d as usize] = j as u32;
    }
    let total = nr as usize + k;
    let mut alpha = vec![NONE; total];
    let mut phi = vec![NONE; total];
    // b_t pairs with the partner of side (k - t) % k.
    let mut side_dart: HashMap<u32, u32> = HashMap::with_capacity(k);
    for t in 0..k {
        let side = (k - t) % k;
        side_dart.insert(map.alpha(outside[side]), nr + t as u32);
    }
    for (j, &d) in region.iter().enumerate() {
        let a = map.alpha(d);
        alpha[j] = match side_dart.get(&d) {
            Some(&b) => b,
            None => s.id[a as usize],
        };
        phi[j] = s.id[map.phi(d) as usize];
    }
    for t in 0..k {
        let side = (k - t) % k;
        let b = nr as usize + t;
        alpha[b] = s.id[map.alpha(outside[side]) as usize];
        phi[b] = nr + ((t + 1) % k) as u32;
    }
    Ok(PlanarMap::from_alpha_phi(alpha, phi, nr, vec![nr])?)
}

/// A rooted plane tree with heights (root at height 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeodesicTree {
    children: Vec<Vec<u32>>,
    height: Vec<u32>,
}

impl GeodesicTree {
    /// Tree whose leaves, in order, are at heights `leaf_heights` and where
    /// consecutive leaves `k - 1`, `k` branch off at height `lca[k - 1]`.
    pub fn from_leaf_profile(leaf_heights: &[u32], lca: &[u32]) -> Result<Self, SkeletonError> {
        if leaf_heights.is_empty() || lca.len() + 1 != leaf_heights.len() {
            return Err(SkeletonError::Forest("inconsistent leaf profile".into()));
        }
        let mut tree = GeodesicTree {
            children: vec![Vec::new()],
            height: vec![0],
        };
        let mut stack = vec![0u32];
        for (k, &h) in leaf_heights.iter().enumerate() {
            if k > 0 {
                let a = lca[k - 1];
                if a >= h || a as usize >= stack.len() - 1 {
                    return Err(SkeletonError::Forest(format!(
                        "branch height {a} is not below both leaves"
                    )));
                }
                stack.truncate(a as usize + 1);
            }
            while (stack.len() as u32) <= h {
                let parent = *stack.last().unwrap();
                let v = tree.children.len() as u32;
                tree.children.push(Vec::new());
                tree.height.push(stack.len() as u32);
                tree.children[parent as usize].push(v);
                stack.push(v);
            }
        }
        Ok(tree)
    }

    /// Union of paths given as vertex sequences starting at a common root.
    /// Children are ordered by first appearance. Returns the tree and, for
    /// every path, the tree node of each of its vertices.
    pub fn from_paths(paths: &[Vec<u32>]) -> Result<(Self, Vec<Vec<u32>>), SkeletonError> {
        let root = paths.first().and_then(|p| p.first()).copied();
        let root = root.ok_or_else(|| SkeletonError::Forest("no paths".into()))?;
        let mut tree = GeodesicTree {
            children: vec![Vec::new()],
            height: vec![0],
        };
        let mut node_of: HashMap<(u32, u32), u32> = HashMap::new();
        let mut nodes = Vec::with_capacity(paths.len());
        for path in paths {
            if path.first() != Some(&root) {
                return Err(SkeletonError::Forest("paths must share their first vertex".into()));
            }
            let mut ids = vec![0u32];
            let mut cur = 0u32;
            for (h, &v) in path.iter().enumerate().skip(1) {
                cur = *node_of.entry((cur, v)).or_insert_with(|| {
                    let id = tree.children.len() as u32;
                    tree.children.push(Vec::new());
                    tree.height.push(h as u32);
                    tree.children[cur as usize].push(id);
                    id
                });
                ids.push(cur);
            }
            nodes.push(ids);
        }
        Ok((tree, nodes))
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn height_of(&self, v: usize) -> u32 {
        self.height[v]
    }

    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[v]
    }

    pub fn max_height(&self) -> u32 {
        self.height.iter().copied().max().unwrap_or(0)
    }

    /// Number of vertices at each height `0..=max_height`.
    pub fn width_profile(&self) -> Vec<usize> {
        let mut w = vec![0; self.max_height() as usize + 1];
        for &h in &self.height {
            w[h as usize] += 1;
        }
        w
    }

    /// Number of leaves at height `h`.
    pub fn leaves_at(&self, h: u32) -> usize {
        (0..self.len())
            .filter(|&v| self.height[v] == h && self.children[v].is_empty())
            .count()
    }

    /// Offspring counts of the vertices at heights in `lo..=hi`.
    pub fn offspring_counts(&self, lo: u32, hi: u32) -> Vec<u32> {
        (0..self.len())
            .filter(|&v| (lo..=hi).contains(&self.height[v]))
            .map(|v| self.children[v].len() as u32)
            .collect()
    }

    /// Parenthesized encoding in depth-first order.
    pub fn to_parens(&self) -> String {
        let mut s = String::with_capacity(2 * self.len());
        let mut stack = vec![(0u32, 0usize)];
        s.push('(');
        while let Some(top) = stack.last_mut() {
            let (v, k) = *top;
            if k < self.children[v as usize].len() {
                top.1 += 1;
                stack.push((self.children[v as usize][k], 0));
                s.push('(');
            } else {
                stack.pop();
                s.push(')');
            }
        }
        s
    }

    /// Text format: `geotree <max height>` then the parenthesized tree.
    pub fn to_text(&self) -> String {
        format!("geotree {}\n{}\n", self.max_height(), self.to_parens())
    }

    pub fn from_parens(s: &str) -> Result<Self, SkeletonError> {
        let mut tree = GeodesicTree {
            children: Vec::new(),
            height: Vec::new(),
        };
        let mut stack: Vec<u32> = Vec::new();
        for ch in s.trim().chars() {
            match ch {
                '(' => {
                    let v = tree.children.len() as u32;
                    tree.children.push(Vec::new());
                    tree.height.push(stack.len() as u32);
                    if let Some(&p) = stack.last() {
                        tree.children[p as usize].push(v);
                    } else if v != 0 {
                        return Err(SkeletonError::Parse("more than one root".into()));
                    }
                    stack.push(v);
                }
                ')' => {
                    stack
                        .pop()
                        .ok_or_else(|| SkeletonError::Parse("unbalanced parentheses".into()))?;
                }
                c if c.is_whitespace() => {}
                _ => return Err(SkeletonError::Parse("trees must consist of parentheses".into())),
            }
        }
        if !stack.is_empty() || tree.children.is_empty() {
            return Err(SkeletonError::Parse("unbalanced parentheses".into()));
        }
        Ok(tree)
    }
}

/// The tree `U` of the branches passing between the infinite trees of a
/// forest ball. `blocks[j]` is the number of consecutive trees of the ball
/// belonging to the `j`-th infinite tree (cyclically from tree 0).
///
/// Each block contributes a leaf at height `r`; consecutive blocks `j - 1`,
/// `j` separate at height `h_min(j) - 1`, where `h_min(j)` is the lowest
/// reverse height reached by block `j`. The first block must reach height 0
/// and the other blocks must not.
pub fn u_tree(forest: &ReverseForest, blocks: &[usize]) -> Result<GeodesicTree, SkeletonError> {
    if blocks.iter().sum::<usize>() != forest.q() || blocks.contains(&0) {
        return Err(SkeletonError::Forest(
            "blocks must partition the trees into nonempty runs".into(),
        ));
    }
    let r = forest.height();
    let hmin = block_min_heights(forest, blocks);
    if hmin[0] != 0 {
        return Err(SkeletonError::Forest(
            "the first block must contain the distinguished vertex".into(),
        ));
    }
    if hmin[1..].contains(&0) {
        return Err(SkeletonError::Forest(
            "only the first block may reach reverse height 0".into(),
        ));
    }
    let leaves = vec![r as u32; blocks.len()];
    let lca: Vec<u32> = hmin[1..].iter().map(|&h| h as u32 - 1).collect();
    GeodesicTree::from_leaf_profile(&leaves, &lca)
}

/// Lowest reverse height reached by each block of consecutive trees.
pub fn block_min_heights(forest: &ReverseForest, blocks: &[usize]) -> Vec<usize> {
    let r = forest.height();
    // Range of indices covered by the current block at each level.
    let starts: Vec<Vec<usize>> = (0..=r)
        .map(|j| if j == 0 { Vec::new() } else { forest.child_starts(j) })
        .collect();
    let mut out = Vec::with_capacity(blocks.len());
    let mut lo = 0;
    for &b in blocks {
        let (mut a, mut z) = (lo, lo + b);
        let mut h = r;
        let mut j = r;
        while j > 0 {
            let (na, nz) = (starts[j][a], starts[j][z]);
            if na == nz {
                break;
            }
            a = na;
            z = nz;
            j -= 1;
            h = j;
        }
        out.push(h);
        lo += b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure3() -> ReverseForest {
        ReverseForest::new(
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 1, 0, 1, 0, 2],
                vec![3, 0, 2, 1, 0, 1],
                vec![1, 0, 2, 0, 1, 1, 1, 0],
            ],
            0,
        )
        .unwrap()
    }

    fn figure5() -> ReverseForest {
        ReverseForest::new(
            vec![
                vec![0],
                vec![0, 1, 0, 0],
                vec![2, 1, 0, 1, 0],
                vec![0, 0, 2, 0, 2, 1, 0],
                vec![1, 2, 0, 2, 0, 2],
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn forest_text_round_trip() {
        for f in [figure3(), figure5(), figure3().rotate(3)] {
            let back = ReverseForest::from_text(&f.to_text()).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn figure3_is_admissible_with_expected_sizes() {
        let f = figure3();
        assert!(f.is_admissible());
        assert_eq!((f.p(), f.q(), f.height()), (4, 8, 3));
    }

    #[test]
    fn figure3_round_trip() {
        let sk = SkeletonDecomposition::with_fillings(figure3(), Mode::Cylinder, |k| -> Result<_, SkeletonError> {
            Ok(if k == 2 {
                PlanarMap::single_edge()
            } else {
                PlanarMap::fan(k)
            })
        })
        .unwrap();
        let map = decode(&sk).unwrap();
        let report = map.validate();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(map.hole_degree(0), 4);
        assert_eq!(map.hole_degree(1), 8);
        let back = encode(&map).unwrap();
        assert_eq!(back, sk);
    }

    #[test]
    fn figure5_u_tree() {
        let f = figure5();
        assert_eq!(block_min_heights(&f, &[2, 1, 2, 1]), vec![0, 4, 1, 2]);
        let u = u_tree(&f, &[2, 1, 2, 1]).unwrap();
        // Leaves at height 4 branching at heights 3, 0, 1.
        let expected = GeodesicTree::from_leaf_profile(&[4, 4, 4, 4], &[3, 0, 1]).unwrap();
        assert_eq!(u, expected);
        assert_eq!(GeodesicTree::from_parens(&u.to_parens()).unwrap(), u);
        assert_eq!(u.width_profile(), vec![1, 2, 3, 3, 4]);
    }

    #[test]
    fn ball_and_reordered_ball() {
        let f = figure3();
        assert_eq!(f.ball(2).ball(1), f.ball(1));
        let g = f.rotate(5);
        assert_eq!(g.distinguished_tree(), 3);
        let b = g.reordered_ball(3);
        assert!(b.is_admissible());
        assert_eq!(b, f);
    }

    #[test]
    fn strip_round_trip_degenerate() {
        let f = ReverseForest::new(vec![vec![0, 0, 0], vec![2, 1], vec![1, 1]], 0).unwrap();
        let sk = SkeletonDecomposition::with_fillings(f, Mode::Strip, |k| -> Result<_, SkeletonError> {
            Ok(if k == 2 {
                PlanarMap::single_edge()
            } else {
                PlanarMap::fan(k)
            })
        })
        .unwrap();
        let strip = decode_strip(&sk, usize::MAX).unwrap();
        let report = strip.map.validate();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(strip.height, 3);
        assert_eq!(strip.top_len(), 2);
        let back = encode_strip(&strip).unwrap();
        assert_eq!(back, sk);
    }
}
