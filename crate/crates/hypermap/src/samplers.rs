//! Exact random generation of the objects attached to `T_λ`.
//!
//! * Boltzmann triangulations of polygons, by peeling the boundary;
//! * the peeling exploration of the half-plane model;
//! * Galton–Watson(θ) trees conditioned on their height, by the Doob kernel;
//! * balls of the reverse trees `τ⁰`/`τ¹`, built on the spine decomposition;
//! * the skeleton forest `F_λ` with its tree `U`, full-plane hulls and strips;
//! * the perimeter process of the hulls.
//!
//! Every sampler is a method of [`Sampler`], which caches the numeric tables
//! it needs, and draws its randomness from an explicit [`Rng`].

use std::collections::{HashMap, VecDeque};

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geodesics;
use crate::model::{power_gap, ModelParams};
use crate::planarmap::{MapBuilder, MapError, PlanarMap};
use crate::skeleton::{
    decode_cylinder, decode_strip, DecodedCylinder, GeodesicTree, Mode, ReverseForest, SkeletonDecomposition,
    SkeletonError, StripMap,
};

/// Default bound on the number of darts of a sampled map.
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;

/// Default number of attempts of a rejection sampler.
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

/// Largest order of the `Π_λ` series table.
const MAX_PI_ORDER: usize = 1 << 15;

/// Perimeters up to this value use the exact transition kernel.
const EXACT_PERIMETER_LIMIT: u64 = 64;

/// Perimeters up to this value use the discretised local limit kernel.
const LOCAL_PERIMETER_LIMIT: f64 = 20_000.0;

#[derive(Debug, thiserror::Error)]
pub enum SamplerError {
    #[error("size cap of {0} exceeded")]
    SizeCap(usize),
    #[error("rejection budget of {attempts} attempts exhausted (acceptance rate {rate:.3e})")]
    RejectionBudget { attempts: u64, rate: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

impl From<geodesics::GeodesicError> for SamplerError {
    fn from(e: geodesics::GeodesicError) -> Self {
        SamplerError::Precondition(e.to_string())
    }
}

// ---------------------------------------------------------------------- rng

/// Deterministic, splittable random stream (ChaCha8).
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream number `replica` derived from `seed`.
    pub fn for_replica(seed: u64, replica: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(replica.wrapping_add(1));
        Rng(inner)
    }

    /// A new independent generator seeded from this one.
    pub fn split(&mut self) -> Self {
        let mut seed = [0u8; 32];
        self.0.fill_bytes(&mut seed);
        Rng(ChaCha8Rng::from_seed(seed))
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.0.gen::<f64>()
    }

    /// Standard normal variate (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        let u = self.uniform_open0();
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

// -------------------------------------------------------------------- types

/// Limits applied by the samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Maximal number of darts of a sampled map (also bounds forest sizes).
    pub size_cap: usize,
    /// Maximal number of attempts of rejection samplers.
    pub rejection_budget: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            size_cap: DEFAULT_SIZE_CAP,
            rejection_budget: DEFAULT_REJECTION_BUDGET,
        }
    }
}

/// A finite plane tree stored level by level: `levels[d][i]` is the number
/// of children of the `i`-th vertex (left to right) at depth `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    levels: Vec<Vec<u32>>,
}

impl PlaneTree {
    /// Tree from its level sequence; the first level must hold the root only.
    pub fn from_levels(levels: Vec<Vec<u32>>) -> Self {
        assert!(
            levels.first().is_some_and(|l| l.len() == 1),
            "a plane tree has a single root"
        );
        PlaneTree { levels }
    }

    /// The single-vertex tree.
    pub fn singleton() -> Self {
        PlaneTree { levels: vec![vec![0]] }
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn root_degree(&self) -> u32 {
        self.levels[0][0]
    }

    /// Parenthesized form, e.g. `(()(()))`.
    pub fn to_parens(&self) -> String {
        let starts: Vec<Vec<usize>> = self
            .levels
            .iter()
            .map(|l| {
                let mut s = vec![0];
                let mut acc = 0;
                for &c in l {
                    acc += c as usize;
                    s.push(acc);
                }
                s
            })
            .collect();
        let mut out = String::from("(");
        let mut stack = vec![(0usize, 0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (d, i, k) = *top;
            if k < self.levels[d][i] as usize {
                top.2 += 1;
                stack.push((d + 1, starts[d][i] + k, 0));
                out.push('(');
            } else {
                stack.pop();
                out.push(')');
            }
        }
        out
    }
}

/// Conditioning of a Galton–Watson tree on its height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightCondition {
    AtMost,
    Exactly,
}

/// One vertex `s_level` of the spine of a reverse tree, with its `left`
/// subtrees (height at most `level − 2`) and `right` subtrees (height at most
/// `level − 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineSection {
    pub level: u32,
    pub left: u32,
    pub right: u32,
    pub left_trees: Vec<PlaneTree>,
    pub right_trees: Vec<PlaneTree>,
}

/// The two reverse trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReverseVariant {
    /// `τ⁰`.
    Tau0,
    /// `τ¹`: `τ⁰` conditioned on a single vertex at reverse height 0.
    Tau1,
}

/// The two strips.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripVariant {
    /// Strip built on `τ⁰`.
    S0,
    /// Strip built on `τ¹` with its lowest vertex cut.
    S1,
}

/// One step of the boundary peeling of a Boltzmann disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelEvent {
    /// The revealed triangle has a new inner vertex.
    NewVertex,
    /// The apex is on the boundary; the first part has perimeter `k`.
    Split(usize),
    /// Perimeter 2 only: the two boundary edges are glued together.
    Degenerate,
}

/// One step of the half-plane peeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPlaneCase {
    /// The revealed triangle has a new vertex.
    NewVertex,
    /// The apex lies on the boundary `i` edges before the peeled edge.
    SwallowLeft(u32),
    /// The apex lies on the boundary `i` edges after the peeled edge.
    SwallowRight(u32),
}

/// The explored part of the half-plane after some peeling steps.
#[derive(Clone, Debug)]
pub struct HalfPlaneBall {
    /// A triangulation of a polygon; the outer face consists of the touched
    /// part of the original boundary followed by the exposed boundary.
    pub map: PlanarMap,
    pub cases: Vec<HalfPlaneCase>,
    /// Number of original boundary edges inside the explored region.
    pub bottom_len: usize,
}

/// A sample of the skeleton forest `F_λ` up to radius `r`.
#[derive(Clone, Debug)]
pub struct SkeletonF {
    /// `B_r(F_λ)`, blocks in the order of construction (the `τ¹` block first).
    pub ball: ReverseForest,
    /// Number of trees of each block.
    pub blocks: Vec<usize>,
    /// The tree `U` (one leaf per block, leaves in block order).
    pub u: GeodesicTree,
    /// Index in `ball` of the tree holding the distinguished vertex.
    pub rotation: usize,
    /// `B'_r(F_λ)`: the ball rotated so the distinguished tree comes first.
    pub forest: ReverseForest,
}

impl SkeletonF {
    pub fn radius(&self) -> usize {
        self.ball.height()
    }

    /// Index in `forest` of the first tree of each block.
    pub fn block_starts(&self) -> Vec<usize> {
        let q = self.ball.q();
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut start = 0;
        for &b in &self.blocks {
            out.push((start + q - self.rotation) % q);
            start += b;
        }
        out
    }

    /// Top vertices (indices in `forest`) whose leftmost geodesics form the
    /// tree `U`, in leaf order: the geodesic separating block `k` from block
    /// `k + 1` is the `k`-th leaf.
    pub fn geodesic_sources(&self) -> Vec<usize> {
        let starts = self.block_starts();
        let mut out: Vec<usize> = starts[1..].to_vec();
        out.push(starts[0]);
        out
    }
}

/// A hull `B_r^•(T_λ)` in plane form together with its skeleton.
#[derive(Clone, Debug)]
pub struct Hull {
    pub map: PlanarMap,
    /// The top-hole dart arriving at the first top vertex of `skeleton.forest`.
    pub top_anchor: u32,
    pub skeleton: SkeletonF,
}

impl Hull {
    pub fn radius(&self) -> usize {
        self.skeleton.radius()
    }

    /// `|∂B_r^•|`.
    pub fn perimeter(&self) -> usize {
        self.skeleton.forest.q()
    }

    /// Reference darts of the top vertices in forest order.
    pub fn top_references(&self) -> Vec<u32> {
        geodesics::top_references(&self.map, self.top_anchor)
    }

    /// Reference darts of the top vertices whose leftmost geodesics form `U`.
    pub fn geodesic_sources(&self) -> Vec<u32> {
        let refs = self.top_references();
        self.skeleton.geodesic_sources().into_iter().map(|k| refs[k]).collect()
    }

    /// The tree of leftmost geodesics from the block boundaries.
    pub fn geodesic_tree(&self) -> Result<GeodesicTree, SamplerError> {
        let dist = self.map.distances(crate::planarmap::Source::Root)?;
        Ok(geodesics::geodesic_tree(&self.map, &dist, &self.geodesic_sources())?)
    }
}

/// Kernel state of a vertex while growing conditioned trees.
#[derive(Clone, Copy, Debug)]
enum Node {
    /// Subtree of height at most `n`.
    AtMost(u32),
    /// Subtree of height exactly `n` (Doob kernel).
    Exact(u32),
    /// Spine vertex at height `n` above the spine bottom ((L, R) law).
    Spine(u32),
}

// ------------------------------------------------------------------ sampler

/// Samplers for one parameter value, with cached numeric tables.
#[derive(Clone, Debug)]
pub struct Sampler {
    params: ModelParams,
    config: SamplerConfig,
    theta0: f64,
    /// `x[k] = g^{∘k}(0)` and `c[k] = 1 − x[k]`.
    x: Vec<f64>,
    c: Vec<f64>,
    /// `ln w_λ(p)`, index `p` (index 0 unused).
    ln_w: Vec<f64>,
    /// `π_λ(p)`, index `p`.
    pi: Vec<f64>,
    /// Cumulative exact perimeter kernels.
    perimeter_rows: HashMap<u64, Vec<f64>>,
    /// `A_q` partial sums for the cone weights.
    cone_sums: Vec<f64>,
    theta_variance: Option<f64>,
}

impl Sampler {
    pub fn new(params: ModelParams) -> Self {
        Self::with_config(params, SamplerConfig::default())
    }

    pub fn with_config(params: ModelParams, config: SamplerConfig) -> Self {
        Sampler {
            params,
            config,
            theta0: params.theta(0),
            x: vec![0.0],
            c: vec![1.0],
            ln_w: vec![f64::NAN],
            pi: Vec::new(),
            perimeter_rows: HashMap::new(),
            cone_sums: Vec::new(),
            theta_variance: None,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    fn ensure_iterates(&mut self, k: usize) {
        while self.x.len() <= k {
            let j = self.x.len() as u64;
            let c = self.params.g_iter_complement(j, 0.0);
            self.c.push(c);
            self.x.push(1.0 - c);
        }
    }

    /// `g^{∘k}(0)`.
    fn xk(&mut self, k: u32) -> f64 {
        self.ensure_iterates(k as usize);
        self.x[k as usize]
    }

    /// `1 − g^{∘k}(0)`.
    fn ck(&mut self, k: u32) -> f64 {
        self.ensure_iterates(k as usize);
        self.c[k as usize]
    }

    fn ln_w(&mut self, p: usize) -> f64 {
        while self.ln_w.len() <= p {
            let q = self.ln_w.len() as u64;
            self.ln_w.push(self.params.ln_disk_weight(q));
        }
        self.ln_w[p]
    }

    fn ensure_pi(&mut self, p: usize) -> Result<(), SamplerError> {
        if p < self.pi.len() {
            return Ok(());
        }
        let order = (2 * p).max(64).max(2 * self.pi.len()) + 1;
        if order > MAX_PI_ORDER {
            return Err(SamplerError::SizeCap(MAX_PI_ORDER));
        }
        self.pi = self.params.big_pi_series(order).coeffs().to_vec();
        Ok(())
    }

    // ------------------------------------------------------------ disks

    /// Probabilities of one peeling step on a hole of perimeter `p`:
    /// `[new vertex, split k = 1, …, split k = p]`, followed by the
    /// degenerate gluing when `p = 2`.
    pub fn peel_probabilities(&mut self, p: usize) -> Vec<f64> {
        assert!(p >= 1, "perimeter must be positive");
        let lw = self.ln_w(p);
        let lw_next = self.ln_w(p + 1);
        let mut out = Vec::with_capacity(p + 2);
        out.push((self.params.lambda.ln() + lw_next - lw).exp());
        for k in 1..=p {
            let v = self.ln_w(k) + self.ln_w(p + 1 - k) - lw;
            out.push(v.exp());
        }
        if p == 2 {
            out.push((-lw).exp());
        }
        out
    }

    fn peel_event(&mut self, rng: &mut Rng, p: usize) -> PeelEvent {
        let lw = self.ln_w(p);
        let lw_next = self.ln_w(p + 1);
        let mut u = rng.uniform();
        let new_vertex = (self.params.lambda.ln() + lw_next - lw).exp();
        if u < new_vertex {
            return PeelEvent::NewVertex;
        }
        u -= new_vertex;
        for k in 1..=p {
            let prob = (self.ln_w(k) + self.ln_w(p + 1 - k) - lw).exp();
            if u < prob {
                return PeelEvent::Split(k);
            }
            u -= prob;
        }
        if p == 2 {
            PeelEvent::Degenerate
        } else {
            // Rounding leftover: attribute it to the last split.
            PeelEvent::Split(p)
        }
    }

    /// Fill every hole of `stack` (lists of outside darts, first entry the
    /// edge to peel) with independent Boltzmann triangulations. Returns the
    /// number of inner vertices created.
    fn fill_holes(
        &mut self,
        rng: &mut Rng,
        b: &mut MapBuilder,
        stack: Vec<VecDeque<u32>>,
    ) -> Result<u64, SamplerError> {
        let cap = self.config.size_cap;
        fill_holes_with(b, stack, cap, |p| Ok(self.peel_event(rng, p)))
    }

    /// Boltzmann triangulation of the `p`-gon: probability `λ^n / w_λ(p)` for
    /// each triangulation with `n` inner vertices. The root dart has the
    /// outer face on its right.
    pub fn sample_boltzmann_disk(&mut self, rng: &mut Rng, p: usize) -> Result<PlanarMap, SamplerError> {
        if p == 0 {
            return Err(SamplerError::Precondition("perimeter must be positive".into()));
        }
        let (mut b, o, hole) = polygon(p);
        self.fill_holes(rng, &mut b, vec![hole])?;
        Ok(b.finish(o, vec![o])?)
    }

    // -------------------------------------------------------- half-plane

    /// `(P(I), [P(II_i) for i = 0..=imax])`; the swallowing cases on the two
    /// sides have equal probabilities.
    pub fn halfplane_case_probabilities(&mut self, imax: usize) -> (f64, Vec<f64>) {
        let p_new = 1.0 / (1.0 + 8.0 * self.params.h).sqrt();
        let ln_alpha = self.params.alpha().ln();
        let swallow = (0..=imax)
            .map(|i| (self.ln_w(i + 1) - i as f64 * ln_alpha).exp())
            .collect();
        (p_new, swallow)
    }

    fn halfplane_case(&mut self, rng: &mut Rng) -> HalfPlaneCase {
        let p_new = 1.0 / (1.0 + 8.0 * self.params.h).sqrt();
        let ln_alpha = self.params.alpha().ln();
        let mut u = rng.uniform();
        if u < p_new {
            return HalfPlaneCase::NewVertex;
        }
        u -= p_new;
        let mut i = 0u32;
        loop {
            let prob = (self.ln_w(i as usize + 1) - i as f64 * ln_alpha).exp();
            if u < prob {
                return HalfPlaneCase::SwallowLeft(i);
            }
            u -= prob;
            if u < prob {
                return HalfPlaneCase::SwallowRight(i);
            }
            u -= prob;
            i += 1;
            if prob < 1e-300 {
                return HalfPlaneCase::SwallowRight(i);
            }
        }
    }

    /// Run `steps` steps of the peeling of the half-plane model, always
    /// peeling the leftmost edge created by the previous step, and return
    /// the explored region.
    pub fn sample_halfplane_ball(&mut self, rng: &mut Rng, steps: usize) -> Result<HalfPlaneBall, SamplerError> {
        if steps == 0 {
            return Err(SamplerError::Precondition("at least one peeling step is needed".into()));
        }
        let mut b = MapBuilder::new();
        // Original boundary edges, left to right, each represented by the
        // dart lying in the (final) outer face.
        let root = b.add_face(1);
        let mut bottoms: VecDeque<u32> = VecDeque::from([root]);
        // Darts bordering the unexplored region, left to right.
        let mut exposed: VecDeque<u32> = VecDeque::from([root]);
        let mut cursor = 0usize;
        let mut cases = Vec::with_capacity(steps);
        for _ in 0..steps {
            let case = self.halfplane_case(rng);
            cases.push(case);
            let [t1, t2, t3] = b.add_triangle();
            b.pair(t1, exposed[cursor]);
            match case {
                HalfPlaneCase::NewVertex => {
                    exposed[cursor] = t3;
                    exposed.insert(cursor + 1, t2);
                }
                HalfPlaneCase::SwallowRight(i) => {
                    let i = i as usize;
                    while exposed.len() < cursor + 1 + i {
                        let d = b.add_face(1);
                        bottoms.push_back(d);
                        exposed.push_back(d);
                    }
                    let mut hole: VecDeque<u32> = exposed.drain(cursor + 1..cursor + 1 + i).collect();
                    hole.push_back(t2);
                    exposed[cursor] = t3;
                    self.fill_holes(rng, &mut b, vec![hole])?;
                }
                HalfPlaneCase::SwallowLeft(i) => {
                    let i = i as usize;
                    while cursor < i {
                        let d = b.add_face(1);
                        bottoms.push_front(d);
                        exposed.push_front(d);
                        cursor += 1;
                    }
                    let mut hole: VecDeque<u32> = exposed.drain(cursor - i..cursor).collect();
                    hole.push_back(t3);
                    cursor -= i;
                    exposed[cursor] = t2;
                    self.fill_holes(rng, &mut b, vec![hole])?;
                }
            }
            if b.len() > self.config.size_cap {
                return Err(SamplerError::SizeCap(self.config.size_cap));
            }
        }
        // Close the outer face: the bottom from right to left, then the
        // exposed chain from left to right.
        let n = exposed.len();
        let y0 = b.add_face(n);
        for (k, &x) in exposed.iter().enumerate() {
            b.pair(y0 + k as u32, x);
        }
        for k in 1..bottoms.len() {
            b.set_phi(bottoms[k], bottoms[k - 1]);
        }
        b.set_phi(bottoms[0], y0);
        b.set_phi(y0 + n as u32 - 1, *bottoms.back().unwrap());
        let bottom_len = bottoms.len();
        let map = b.finish(root, vec![root])?;
        Ok(HalfPlaneBall { map, cases, bottom_len })
    }

    // ------------------------------------------------ conditioned trees

    fn sample_at_most_children(&mut self, rng: &mut Rng, n: u32) -> u32 {
        if n == 0 {
            return 0;
        }
        // P(k) = θ(k) x_n^k / x_{n+1}.
        let b = self.xk(n);
        let norm = self.xk(n + 1);
        let u = rng.uniform();
        let mut term = self.theta0 / norm;
        let mut acc = term;
        let mut k = 0u32;
        while u >= acc {
            term *= self.params.theta_ratio(k as u64) * b;
            k += 1;
            acc += term;
            if term <= acc * 1e-18 {
                break;
            }
        }
        k
    }

    /// Child count of a vertex whose subtree has height exactly `n ≥ 1`,
    /// together with the position (1-based) of the first child whose
    /// subtree has height exactly `n − 1`.
    fn sample_exact_children(&mut self, rng: &mut Rng, n: u32) -> (u32, u32) {
        // P(k) = θ(k) (x_n^k − x_{n−1}^k) / (x_{n+1} − x_n).
        let a = self.xk(n - 1);
        let b = self.xk(n);
        let ba = self.ck(n - 1) - self.ck(n);
        let norm = self.ck(n) - self.ck(n + 1);
        let u = rng.uniform();
        let mut th = self.theta0;
        let mut d = 0.0; // b^k − a^k
        let mut a_pow = 1.0; // a^k
        let mut acc = 0.0;
        let mut k = 0u32;
        loop {
            d = b * d + a_pow * ba;
            a_pow *= a;
            th *= self.params.theta_ratio(k as u64);
            k += 1;
            let term = th * d / norm;
            acc += term;
            if u < acc || term <= acc * 1e-18 {
                break;
            }
        }
        (k, self.sample_first_exact(rng, a, b, k))
    }

    /// Position `i ∈ 1..=k` with probability `∝ a^{i−1} b^{k−i}`.
    fn sample_first_exact(&mut self, rng: &mut Rng, a: f64, b: f64, k: u32) -> u32 {
        if a == 0.0 || k == 1 {
            return 1;
        }
        let ratio = a / b;
        // Σ_{i<k} ratio^i, evaluated stably.
        let total = if (1.0 - ratio).abs() < 1e-12 {
            k as f64
        } else {
            (1.0 - ratio.powi(k as i32)) / (1.0 - ratio)
        };
        let mut u = rng.uniform() * total;
        let mut w = 1.0;
        for i in 1..=k {
            if u < w {
                return i;
            }
            u -= w;
            w *= ratio;
        }
        k
    }

    /// `(L_n, R_n)` from the spine law
    /// `P(L = i, R = j) = (x_n − x_{n−1})/(x_{n+1} − x_n) · θ(i+j+1) x_{n−1}^i x_n^j`.
    pub fn sample_lr(&mut self, rng: &mut Rng, n: u32) -> (u32, u32) {
        assert!(n >= 1, "spine levels start at 1");
        let a = self.xk(n - 1);
        let b = self.xk(n);
        let prefactor = (self.ck(n - 1) - self.ck(n)) / (self.ck(n) - self.ck(n + 1));
        // Total N = L + R: P(N) = prefactor θ(N+1) Σ_{i≤N} a^i b^{N−i}.
        let u = rng.uniform();
        let mut th = self.theta0 * self.params.theta_ratio(0); // θ(1)
        let mut e = 1.0; // Σ_{i≤N} a^i b^{N−i}
        let mut a_pow = 1.0; // a^N
        let mut acc = 0.0;
        let mut total = 0u32;
        loop {
            let term = prefactor * th * e;
            acc += term;
            if u < acc || term <= acc * 1e-18 {
                break;
            }
            a_pow *= a;
            e = b * e + a_pow;
            th *= self.params.theta_ratio(total as u64 + 1);
            total += 1;
        }
        let left = self.sample_first_exact(rng, a, b, total + 1) - 1;
        (left, total - left)
    }

    /// Grow a forest from root states, level by level; returns the child
    /// counts per depth (the last level is all zeros).
    fn grow(&mut self, rng: &mut Rng, roots: Vec<Node>) -> Result<Vec<Vec<u32>>, SamplerError> {
        let mut levels = Vec::new();
        let mut current = roots;
        let mut total = 0usize;
        while !current.is_empty() {
            let mut counts = Vec::with_capacity(current.len());
            let mut next = Vec::new();
            for node in &current {
                match *node {
                    Node::AtMost(n) => {
                        let k = self.sample_at_most_children(rng, n);
                        counts.push(k);
                        next.extend(std::iter::repeat_n(Node::AtMost(n.saturating_sub(1)), k as usize));
                    }
                    Node::Exact(0) | Node::Spine(0) => counts.push(0),
                    Node::Exact(n) => {
                        let (k, i) = self.sample_exact_children(rng, n);
                        counts.push(k);
                        if i > 1 {
                            next.extend(std::iter::repeat_n(Node::AtMost(n - 2), i as usize - 1));
                        }
                        next.push(Node::Exact(n - 1));
                        next.extend(std::iter::repeat_n(Node::AtMost(n - 1), (k - i) as usize));
                    }
                    Node::Spine(n) => {
                        let (left, right) = self.sample_lr(rng, n);
                        counts.push(left + right + 1);
                        if left > 0 {
                            next.extend(std::iter::repeat_n(Node::AtMost(n - 2), left as usize));
                        }
                        next.push(Node::Spine(n - 1));
                        next.extend(std::iter::repeat_n(Node::AtMost(n - 1), right as usize));
                    }
                }
            }
            total += counts.len();
            if total > self.config.size_cap {
                return Err(SamplerError::SizeCap(self.config.size_cap));
            }
            levels.push(counts);
            current = next;
        }
        Ok(levels)
    }

    /// Galton–Watson(θ_λ) tree conditioned on height `≤ maxheight` or
    /// `= maxheight`, sampled exactly with the Doob-transformed kernel.
    pub fn sample_gw_height_conditioned(
        &mut self,
        rng: &mut Rng,
        maxheight: u32,
        condition: HeightCondition,
    ) -> Result<PlaneTree, SamplerError> {
        let root = match condition {
            HeightCondition::AtMost => Node::AtMost(maxheight),
            HeightCondition::Exactly => Node::Exact(maxheight),
        };
        Ok(PlaneTree {
            levels: self.grow(rng, vec![root])?,
        })
    }

    /// Galton–Watson tree conditioned on height exactly `r`, built along its
    /// leftmost deepest branch with the spine `(L, R)` law.
    pub fn sample_spine_tree(&mut self, rng: &mut Rng, r: u32) -> Result<PlaneTree, SamplerError> {
        Ok(PlaneTree {
            levels: self.grow(rng, vec![Node::Spine(r)])?,
        })
    }

    /// One spine section at `level ≥ 1`: the pair `(L, R)` and its grafted trees.
    pub fn sample_spine_section(&mut self, rng: &mut Rng, level: u32) -> Result<SpineSection, SamplerError> {
        let (left, right) = self.sample_lr(rng, level);
        let mut left_trees = Vec::with_capacity(left as usize);
        for _ in 0..left {
            left_trees.push(self.sample_gw_height_conditioned(rng, level - 2, HeightCondition::AtMost)?);
        }
        let mut right_trees = Vec::with_capacity(right as usize);
        for _ in 0..right {
            right_trees.push(self.sample_gw_height_conditioned(rng, level - 1, HeightCondition::AtMost)?);
        }
        Ok(SpineSection {
            level,
            left,
            right,
            left_trees,
            right_trees,
        })
    }

    // ---------------------------------------------------- reverse trees

    /// `Y(r)`, the number of vertices of `τ⁰` at reverse height `r`.
    pub fn sample_y(&mut self, rng: &mut Rng, r: u32) -> Result<usize, SamplerError> {
        let (ln_cur, step) = self.params.power_gap_terms(r as u64);
        let scale = self.params.m_pow_neg(r as u64) / self.params.pi_at_theta0();
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut p = 1usize;
        let mut prev = f64::INFINITY;
        loop {
            self.ensure_pi(p)?;
            let pf = p as f64;
            let prob = self.pi[p] * scale * power_gap(pf, ln_cur, step);
            acc += prob;
            // Past the mode, once terms no longer move the sum, `u` is lost to
            // rounding: the remaining mass is below double precision.
            if u < acc || (prob < prev && prob <= acc * 1e-18) {
                return Ok(p);
            }
            prev = prob;
            p += 1;
        }
    }

    /// `B_r(τ⁰)` or `B_r(τ¹)`. Trees are in the cyclic order of the reverse
    /// tree; the distinguished vertex is the leftmost vertex at height 0.
    ///
    /// The number of trees is drawn from the exact law of `Y(r)`. The first
    /// tree reaching height `r` is built on the spine; trees before it have
    /// height at most `r − 1`, trees after it at most `r`.
    pub fn sample_reverse_tree(
        &mut self,
        rng: &mut Rng,
        r: u32,
        variant: ReverseVariant,
    ) -> Result<ReverseForest, SamplerError> {
        match variant {
            ReverseVariant::Tau0 => self.sample_tau0_ball(rng, r),
            ReverseVariant::Tau1 => {
                let budget = self.config.rejection_budget;
                for _ in 0..budget {
                    let ball = self.sample_tau0_ball(rng, r)?;
                    if ball.p() == 1 {
                        return Ok(ball);
                    }
                }
                Err(SamplerError::RejectionBudget {
                    attempts: budget,
                    rate: self.params.prob_y0_one(),
                })
            }
        }
    }

    fn sample_tau0_ball(&mut self, rng: &mut Rng, r: u32) -> Result<ReverseForest, SamplerError> {
        let p = self.sample_y(rng, r)?;
        if p > self.config.size_cap {
            return Err(SamplerError::SizeCap(self.config.size_cap));
        }
        let a = self.xk(r);
        let b = self.xk(r + 1);
        let k = self.sample_first_exact(rng, a, b, p as u32) as usize;
        let mut roots = Vec::with_capacity(p);
        if k > 1 {
            roots.extend(std::iter::repeat_n(Node::AtMost(r - 1), k - 1));
        }
        roots.push(Node::Spine(r));
        roots.extend(std::iter::repeat_n(Node::AtMost(r), p - k));
        let mut levels = self.grow(rng, roots)?;
        levels.reverse();
        Ok(ReverseForest::new(levels, 0)?)
    }

    /// `τ^{1,*}` up to radius `r`: `B_{r+1}(τ¹)` with its lowest vertex cut and
    /// the heights shifted down by one.
    pub fn sample_tau1_star(&mut self, rng: &mut Rng, r: u32) -> Result<ReverseForest, SamplerError> {
        let ball = self.sample_reverse_tree(rng, r + 1, ReverseVariant::Tau1)?;
        let mut levels = ball.levels()[1..].to_vec();
        for c in levels[0].iter_mut() {
            *c = 0;
        }
        Ok(ReverseForest::new(levels, 0)?)
    }

    // ---------------------------------------------------------- skeleton

    /// Offspring of `U`: geometric `μ_λ(k) = m (1 − m)^{k−1}`, `k ≥ 1`.
    fn sample_mu(&mut self, rng: &mut Rng) -> u32 {
        let m = self.params.m;
        if self.params.is_critical || m >= 1.0 {
            return 1;
        }
        let u = rng.uniform_open0();
        1 + (u.ln() / (1.0 - m).ln()).floor() as u32
    }

    /// Height in `U` at which the first branching above the root occurs
    /// (the number of single-child generations from the root).
    pub fn sample_first_branching(&mut self, rng: &mut Rng, limit: u64) -> u64 {
        let mut h = 0;
        while h < limit && self.sample_mu(rng) == 1 {
            h += 1;
        }
        h
    }

    /// `U` truncated at height `r`: child counts per depth `0..r`.
    fn sample_u_levels(&mut self, rng: &mut Rng, r: u32) -> Result<Vec<Vec<u32>>, SamplerError> {
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(r as usize);
        let mut width = 1usize;
        for _ in 0..r {
            let counts: Vec<u32> = (0..width).map(|_| self.sample_mu(rng)).collect();
            width = counts.iter().map(|&c| c as usize).sum();
            levels.push(counts);
            if width > self.config.size_cap {
                return Err(SamplerError::SizeCap(self.config.size_cap));
            }
        }
        Ok(levels)
    }

    /// `F_λ` up to radius `r ≥ 1`: `U ~ GW(μ_λ)` truncated at height `r`; the
    /// first leaf carries `B_r(τ¹)` and the `j`-th leaf (`j ≥ 2`) carries
    /// `B_{h_j}(τ⁰)`, where `r − h_j` is the lowest height at which the
    /// ancestor of the leaf is not the leftmost child of its parent.
    pub fn sample_skeleton_f(&mut self, rng: &mut Rng, r: u32) -> Result<SkeletonF, SamplerError> {
        if r == 0 {
            return Err(SamplerError::Precondition("the radius must be positive".into()));
        }
        let u_levels = self.sample_u_levels(rng, r)?;
        // branch[d][i]: lowest depth on the path from the root to vertex i at
        // depth d where the path takes a non-leftmost child (0 if none).
        let mut branch: Vec<u32> = vec![0];
        for (d, counts) in u_levels.iter().enumerate() {
            let mut next = Vec::new();
            for (i, &c) in counts.iter().enumerate() {
                for k in 0..c {
                    next.push(if k == 0 { branch[i] } else { d as u32 + 1 });
                }
            }
            branch = next;
        }
        let mut blocks_f: Vec<(ReverseForest, usize)> = Vec::with_capacity(branch.len());
        let mut lca = Vec::with_capacity(branch.len().saturating_sub(1));
        for (j, &low) in branch.iter().enumerate() {
            let f = if j == 0 {
                self.sample_reverse_tree(rng, r, ReverseVariant::Tau1)?
            } else {
                lca.push(low - 1);
                self.sample_tau0_ball(rng, r - low)?
            };
            blocks_f.push((f, low as usize));
        }
        let blocks: Vec<usize> = blocks_f.iter().map(|(f, _)| f.q()).collect();
        let ball = ReverseForest::concat_blocks(&blocks_f)?;
        if ball.num_vertices() > self.config.size_cap {
            return Err(SamplerError::SizeCap(self.config.size_cap));
        }
        let u = GeodesicTree::from_leaf_profile(&vec![r; branch.len()], &lca)?;
        let rotation = ball.distinguished_tree();
        let forest = ball.rotate(rotation);
        Ok(SkeletonF {
            ball,
            blocks,
            u,
            rotation,
            forest,
        })
    }

    /// The hull `B_r^•(T_λ)` in plane form.
    pub fn sample_hull(&mut self, rng: &mut Rng, r: u32) -> Result<Hull, SamplerError> {
        let (skeleton, cyl) = self.sample_hull_parts(rng, r)?;
        let anchor = cyl.top_anchor();
        let (map, labels) = cyl.map.root_transform_with_labels()?;
        Ok(Hull {
            map,
            top_anchor: labels[anchor as usize],
            skeleton,
        })
    }

    /// The hull `B_r^•(T_λ)` in cylinder form, before the root transformation:
    /// the bottom hole is the root loop (degree 1) and the top hole is `∂B_r^•`.
    /// This is the form accepted by [`skeleton::encode`](crate::skeleton::encode).
    pub fn sample_hull_cylinder(&mut self, rng: &mut Rng, r: u32) -> Result<PlanarMap, SamplerError> {
        Ok(self.sample_hull_parts(rng, r)?.1.map)
    }

    fn sample_hull_parts(&mut self, rng: &mut Rng, r: u32) -> Result<(SkeletonF, DecodedCylinder), SamplerError> {
        let skeleton = self.sample_skeleton_f(rng, r)?;
        let sk = SkeletonDecomposition::with_fillings(skeleton.forest.clone(), Mode::Cylinder, |p| {
            self.sample_boltzmann_disk(rng, p)
        })?;
        if sk.dart_count() > self.config.size_cap {
            return Err(SamplerError::SizeCap(self.config.size_cap));
        }
        let cyl = decode_cylinder(&sk, self.config.size_cap)?;
        Ok((skeleton, cyl))
    }

    /// Skeleton of the strip of height `r ≥ 1` (a forest of height `r − 1`).
    pub fn sample_strip_forest(
        &mut self,
        rng: &mut Rng,
        variant: StripVariant,
        r: u32,
    ) -> Result<ReverseForest, SamplerError> {
        if r == 0 {
            return Err(SamplerError::Precondition("the strip height must be positive".into()));
        }
        match variant {
            StripVariant::S0 => self.sample_tau0_ball(rng, r - 1),
            StripVariant::S1 => self.sample_tau1_star(rng, r - 1),
        }
    }

    /// `B_r^•` of the strip `S⁰` or `S¹`, with its two geodesic sides.
    pub fn sample_strip(&mut self, rng: &mut Rng, variant: StripVariant, r: u32) -> Result<StripMap, SamplerError> {
        let forest = self.sample_strip_forest(rng, variant, r)?;
        let sk = SkeletonDecomposition::with_fillings(forest, Mode::Strip, |p| self.sample_boltzmann_disk(rng, p))?;
        if sk.dart_count() > self.config.size_cap {
            return Err(SamplerError::SizeCap(self.config.size_cap));
        }
        Ok(decode_strip(&sk, self.config.size_cap)?)
    }

    // -------------------------------------------------- perimeter chain

    /// `h_λ(q)` with cached partial sums.
    fn h_weight_cached(&mut self, q: u64) -> f64 {
        let h = self.params.h;
        if self.cone_sums.is_empty() {
            self.cone_sums.push(0.0);
        }
        let converged = |s: &Vec<f64>| s.len() > 2 && s[s.len() - 1] == s[s.len() - 2];
        while (self.cone_sums.len() as u64) <= q && !converged(&self.cone_sums) && self.cone_sums.len() < 1 << 22 {
            let t = (self.cone_sums.len() - 1) as u64;
            // C(2t, t) h^t, in log-space.
            let ln_term = statrs::function::factorial::ln_binomial(2 * t, t) + t as f64 * h.ln();
            let last = *self.cone_sums.last().unwrap();
            self.cone_sums.push(last + ln_term.exp());
        }
        let idx = (q as usize).min(self.cone_sums.len() - 1);
        (1.0 + 8.0 * h).sqrt() * self.cone_sums[idx] / q as f64
    }

    fn theta_variance(&mut self) -> f64 {
        if let Some(v) = self.theta_variance {
            return v;
        }
        let m = self.params.m;
        let mut th = self.theta0;
        let (mut s2, mut i) = (0.0, 0u64);
        loop {
            s2 += th * (i * i) as f64;
            th *= self.params.theta_ratio(i);
            i += 1;
            if th * ((i * i) as f64) < 1e-17 * s2.max(1e-300) || i > 10_000_000 {
                break;
            }
        }
        let v = s2 - m * m;
        self.theta_variance = Some(v);
        v
    }

    /// One step `P_r = p → P_{r+1}` of the hull perimeter process, with
    /// kernel `h(q)/h(p) · P_q(X_1 = p)`. Exact for small `p`; for larger
    /// `p`, `P_q(X_1 = p)` is replaced by its Gaussian local limit (the
    /// offspring law θ has exponential tails when `λ < λ_c`).
    pub fn perimeter_step(&mut self, rng: &mut Rng, p: f64) -> Result<f64, SamplerError> {
        if self.params.is_critical {
            return Err(SamplerError::Precondition("the perimeter chain needs λ < λ_c".into()));
        }
        let m = self.params.m;
        let sigma2 = self.theta_variance();
        if p <= EXACT_PERIMETER_LIMIT as f64 {
            let pi = p.round() as u64;
            if !self.perimeter_rows.contains_key(&pi) {
                let sd = (sigma2 * p / m).sqrt() / m;
                let qmax = (p / m + 30.0 * sd + 50.0).ceil() as u64;
                let row = self.params.perimeter_transition_row(pi, 1, qmax);
                let mut cdf = Vec::with_capacity(row.len());
                let mut acc = 0.0;
                for v in row {
                    acc += v;
                    cdf.push(acc);
                }
                self.perimeter_rows.insert(pi, cdf);
            }
            let cdf = &self.perimeter_rows[&pi];
            let u = rng.uniform() * cdf[cdf.len() - 1];
            let q = cdf.partition_point(|&c| c <= u) + 1;
            return Ok(q.min(cdf.len()) as f64);
        }
        let mean = p / m;
        let sd = (sigma2 * p / m).sqrt() / m;
        if p <= LOCAL_PERIMETER_LIMIT {
            let lo = (mean - 12.0 * sd).floor().max(1.0) as u64;
            let hi = (mean + 12.0 * sd).ceil() as u64;
            let mut weights = Vec::with_capacity((hi - lo + 1) as usize);
            let mut total = 0.0;
            for q in lo..=hi {
                let qf = q as f64;
                let z = p - qf * m;
                let w = self.h_weight_cached(q) * (-z * z / (2.0 * qf * sigma2)).exp() / qf.sqrt();
                total += w;
                weights.push(w);
            }
            let mut u = rng.uniform() * total;
            for (k, w) in weights.iter().enumerate() {
                if u < *w {
                    return Ok((lo + k as u64) as f64);
                }
                u -= w;
            }
            return Ok(hi as f64);
        }
        Ok((mean + sd * rng.normal()).round().max(1.0))
    }

    /// Perimeters `P_0 = 1, P_1, …, P_{r_max}` of the hulls of `T_λ`.
    pub fn sample_perimeter_chain(&mut self, rng: &mut Rng, r_max: u32) -> Result<Vec<f64>, SamplerError> {
        let mut out = Vec::with_capacity(r_max as usize + 1);
        let mut p = 1.0;
        out.push(p);
        for _ in 0..r_max {
            p = self.perimeter_step(rng, p)?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Fill every hole of `stack` by peeling, taking the event for a hole of
/// perimeter `p` from `next(p)`. The front dart of a hole is peeled; holes
/// are processed last in, first out. Returns the number of inner vertices.
fn fill_holes_with<F>(
    b: &mut MapBuilder,
    mut stack: Vec<VecDeque<u32>>,
    cap: usize,
    mut next: F,
) -> Result<u64, SamplerError>
where
    F: FnMut(usize) -> Result<PeelEvent, SamplerError>,
{
    let mut inner = 0;
    while let Some(mut hole) = stack.pop() {
        loop {
            let p = hole.len();
            match next(p)? {
                PeelEvent::Degenerate => {
                    if p != 2 {
                        return Err(SamplerError::Precondition(format!("degenerate event on a {p}-gon")));
                    }
                    b.pair(hole[0], hole[1]);
                    break;
                }
                PeelEvent::NewVertex => {
                    let [t1, t2, t3] = b.add_triangle();
                    let x1 = hole.pop_front().expect("holes are nonempty");
                    b.pair(t1, x1);
                    hole.push_front(t2);
                    hole.push_back(t3);
                    inner += 1;
                }
                PeelEvent::Split(k) => {
                    if k == 0 || k > p {
                        return Err(SamplerError::Precondition(format!("split {k} on a {p}-gon")));
                    }
                    let [t1, t2, t3] = b.add_triangle();
                    let x1 = hole.pop_front().expect("holes are nonempty");
                    b.pair(t1, x1);
                    let mut rest = hole.split_off(k - 1);
                    hole.push_back(t2);
                    rest.push_back(t3);
                    stack.push(rest);
                }
            }
            if b.len() > cap {
                return Err(SamplerError::SizeCap(cap));
            }
        }
    }
    Ok(inner)
}

/// Builder holding a `p`-gon outer face and the hole inside it.
fn polygon(p: usize) -> (MapBuilder, u32, VecDeque<u32>) {
    let mut b = MapBuilder::new();
    let o = b.add_face(p);
    let hole = std::iter::once(o).chain((1..p as u32).rev().map(|i| o + i)).collect();
    (b, o, hole)
}

/// The triangulation of the `p`-gon with peeling transcript `events` (in the
/// order consumed by the disk sampler). Fails if the transcript is too short
/// or too long or names an impossible event.
pub fn disk_from_events(p: usize, events: &[PeelEvent]) -> Result<PlanarMap, SamplerError> {
    if p == 0 {
        return Err(SamplerError::Precondition("perimeter must be positive".into()));
    }
    let (mut b, o, hole) = polygon(p);
    let mut it = events.iter();
    fill_holes_with(&mut b, vec![hole], usize::MAX, |_| {
        it.next()
            .copied()
            .ok_or_else(|| SamplerError::Precondition("peeling transcript too short".into()))
    })?;
    if it.next().is_some() {
        return Err(SamplerError::Precondition("peeling transcript too long".into()));
    }
    Ok(b.finish(o, vec![o])?)
}

/// Peeling transcripts of all triangulations of the `p`-gon with `n` inner
/// vertices, in lexicographic order of events. There are `#T_{n,p}` of them
/// and distinct transcripts give distinct rooted maps.
pub fn enumerate_transcripts(p: usize, n: usize) -> Vec<Vec<PeelEvent>> {
    // Every event but the degenerate one adds a triangle; a triangulation of
    // the p-gon with n inner vertices has 2n + p - 2 of them.
    fn go(
        holes: &mut Vec<usize>,
        inner_left: usize,
        triangles_left: usize,
        prefix: &mut Vec<PeelEvent>,
        out: &mut Vec<Vec<PeelEvent>>,
    ) {
        let Some(&p) = holes.last() else {
            if inner_left == 0 && triangles_left == 0 {
                out.push(prefix.clone());
            }
            return;
        };
        // Each remaining hole of perimeter q needs at least max(q - 2, 1)
        // triangles unless it is a 2-gon.
        let needed: usize = holes
            .iter()
            .map(|&q| if q == 2 { 0 } else { q.saturating_sub(2).max(1) })
            .sum();
        if needed > triangles_left {
            return;
        }
        if p == 2 {
            holes.pop();
            prefix.push(PeelEvent::Degenerate);
            go(holes, inner_left, triangles_left, prefix, out);
            prefix.pop();
            holes.push(2);
        }
        if triangles_left == 0 {
            return;
        }
        if inner_left > 0 {
            *holes.last_mut().unwrap() = p + 1;
            prefix.push(PeelEvent::NewVertex);
            go(holes, inner_left - 1, triangles_left - 1, prefix, out);
            prefix.pop();
            *holes.last_mut().unwrap() = p;
        }
        for k in 1..=p {
            // The sampler keeps peeling A (length k) and defers B (length
            // p + 1 - k), so A goes on top.
            *holes.last_mut().unwrap() = p + 1 - k;
            holes.push(k);
            prefix.push(PeelEvent::Split(k));
            go(holes, inner_left, triangles_left - 1, prefix, out);
            prefix.pop();
            holes.pop();
            *holes.last_mut().unwrap() = p;
        }
    }
    let mut out = Vec::new();
    if p == 0 || 2 * n + p < 2 {
        return out;
    }
    go(&mut vec![p], n, 2 * n + p - 2, &mut Vec::new(), &mut out);
    out
}

/// All triangulations of the `p`-gon with `n` inner vertices.
pub fn enumerate_disks(p: usize, n: usize) -> Vec<PlanarMap> {
    enumerate_transcripts(p, n)
        .iter()
        .map(|t| disk_from_events(p, t).expect("enumerated transcripts are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampler(h: f64) -> Sampler {
        Sampler::new(ModelParams::from_h(h).unwrap())
    }

    #[test]
    fn enumeration_matches_counts() {
        for p in 1..=5usize {
            for n in 0..=3usize {
                let disks = enumerate_disks(p, n);
                let expected = crate::model::count_triangulations(n as u64, p as u64);
                assert_eq!(num_bigint::BigUint::from(disks.len()), expected, "p={p} n={n}");
                let mut seen = std::collections::HashSet::new();
                for d in &disks {
                    assert!(d.validate().passed(), "p={p} n={n}");
                    assert_eq!(d.inner_vertex_count(), n);
                    assert_eq!(d.face_darts(d.root()).len(), p);
                    assert!(seen.insert(d.canonicalize()), "duplicate map p={p} n={n}");
                }
            }
        }
    }

    #[test]
    fn rng_streams_are_reproducible() {
        let mut a = Rng::new(5);
        let mut b = Rng::new(5);
        assert_eq!(a.next_u64(), b.next_u64());
        let mut r1 = Rng::for_replica(5, 3);
        let mut r2 = Rng::for_replica(5, 3);
        let mut r3 = Rng::for_replica(5, 4);
        let x = r1.next_u64();
        assert_eq!(x, r2.next_u64());
        assert_ne!(x, r3.next_u64());
    }

    #[test]
    fn peel_probabilities_sum_to_one() {
        for h in [0.05, 0.125, 0.2, 0.25] {
            let mut s = sampler(h);
            for p in 1..=50 {
                let total: f64 = s.peel_probabilities(p).iter().sum();
                assert!((total - 1.0).abs() < 1e-10, "h={h} p={p} total={total}");
            }
        }
    }

    #[test]
    fn halfplane_case_probabilities_sum_to_one() {
        for h in [0.125, 0.25] {
            let mut s = sampler(h);
            let (p_new, sw) = s.halfplane_case_probabilities(4000);
            let total = p_new + 2.0 * sw.iter().sum::<f64>();
            assert!((total - 1.0).abs() < 1e-6, "h={h} total={total}");
        }
    }

    #[test]
    fn lr_law_is_normalized() {
        let s = sampler(0.125);
        for r in 1..6 {
            let mut total = 0.0;
            for i in 0..80 {
                for j in 0..80 {
                    total += s.params.lr_probability(r, i, j);
                }
            }
            assert!((total - 1.0).abs() < 1e-8, "r={r} total={total}");
        }
    }

    #[test]
    fn disks_are_valid_maps() {
        let mut s = sampler(0.2);
        let mut rng = Rng::new(1);
        for p in 1..8 {
            for _ in 0..20 {
                let d = s.sample_boltzmann_disk(&mut rng, p).unwrap();
                assert!(d.validate().passed(), "{:?}", d.validate());
                assert_eq!(d.hole_degree(0), p);
            }
        }
    }

    #[test]
    fn halfplane_balls_are_valid_maps() {
        let mut s = sampler(0.25);
        let mut rng = Rng::new(2);
        for steps in [1, 2, 5, 30] {
            for _ in 0..20 {
                let ball = s.sample_halfplane_ball(&mut rng, steps).unwrap();
                assert!(ball.map.validate().passed(), "{:?}", ball.map.validate());
            }
        }
    }

    #[test]
    fn conditioned_trees_respect_heights() {
        let mut s = sampler(0.125);
        let mut rng = Rng::new(3);
        for r in 0..6 {
            for _ in 0..50 {
                let t = s
                    .sample_gw_height_conditioned(&mut rng, r, HeightCondition::AtMost)
                    .unwrap();
                assert!(t.height() <= r as usize);
                let t = s
                    .sample_gw_height_conditioned(&mut rng, r, HeightCondition::Exactly)
                    .unwrap();
                assert_eq!(t.height(), r as usize);
                let t = s.sample_spine_tree(&mut rng, r).unwrap();
                assert_eq!(t.height(), r as usize);
            }
        }
    }

    #[test]
    fn reverse_balls_have_the_right_shape() {
        let mut s = sampler(0.125);
        let mut rng = Rng::new(4);
        for r in 0..5 {
            for _ in 0..30 {
                let b = s.sample_reverse_tree(&mut rng, r, ReverseVariant::Tau0).unwrap();
                assert_eq!(b.height(), r as usize);
                let b = s.sample_reverse_tree(&mut rng, r, ReverseVariant::Tau1).unwrap();
                assert_eq!(b.p(), 1);
            }
        }
    }

    #[test]
    fn hulls_decode_and_match_u() {
        let mut s = sampler(0.125);
        let mut rng = Rng::new(5);
        for r in 1..=3 {
            for _ in 0..10 {
                let hull = s.sample_hull(&mut rng, r).unwrap();
                assert!(hull.map.validate().passed());
                assert_eq!(hull.map.hole_degree(0), hull.perimeter());
                let expected = crate::skeleton::u_tree(&hull.skeleton.ball, &hull.skeleton.blocks).unwrap();
                assert_eq!(hull.skeleton.u, expected);
                assert_eq!(hull.geodesic_tree().unwrap(), hull.skeleton.u);
            }
        }
    }

    #[test]
    fn strips_decode() {
        let mut s = sampler(0.125);
        let mut rng = Rng::new(6);
        for variant in [StripVariant::S0, StripVariant::S1] {
            for r in 1..=4 {
                for _ in 0..10 {
                    let strip = s.sample_strip(&mut rng, variant, r).unwrap();
                    assert!(strip.map.validate().passed());
                    assert_eq!(strip.height, r as usize);
                }
            }
        }
    }

    #[test]
    fn perimeter_chain_grows() {
        let mut s = sampler(0.125);
        let mut rng = Rng::new(7);
        let chain = s.sample_perimeter_chain(&mut rng, 12).unwrap();
        assert_eq!(chain.len(), 13);
        assert!(chain.iter().all(|&p| p >= 1.0));
    }
}
