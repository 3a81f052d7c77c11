//! Point clouds and the box grid that picks boundary starts from them.

use crate::error::{Error, Result};
use crate::kernel::{eigen2x2, reduce};
use crate::linalg::{BlockMatrix, UnitPair, C64};

/// Unit pairs stored back to back, `n1 + n2` entries each.
#[derive(Clone, Debug, PartialEq)]
pub struct PairStore {
    n1: usize,
    n2: usize,
    data: Vec<C64>,
}

impl PairStore {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2, data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.data.len() / (self.n1 + self.n2)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, pair: &UnitPair) {
        assert_eq!((pair.n1(), pair.n2()), (self.n1, self.n2), "pair dimensions differ from the store");
        self.data.extend_from_slice(pair.x());
        self.data.extend_from_slice(pair.y());
    }

    pub fn get(&self, j: usize) -> UnitPair {
        let stride = self.n1 + self.n2;
        let chunk = &self.data[j * stride..(j + 1) * stride];
        UnitPair { x: chunk[..self.n1].to_vec(), y: chunk[self.n1..].to_vec() }
    }

    pub fn iter(&self) -> impl Iterator<Item = UnitPair> + '_ {
        (0..self.len()).map(|j| self.get(j))
    }
}

/// The two eigenvalue clouds `W` (selected by `alpha`) and `W~` (the
/// other root), optionally with the pair that produced each entry.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub w: Vec<C64>,
    pub w_tilde: Vec<C64>,
    pub pairs: Option<PairStore>,
}

impl PointCloud {
    pub fn with_pairs(n1: usize, n2: usize) -> Self {
        Self { w: Vec::new(), w_tilde: Vec::new(), pairs: Some(PairStore::new(n1, n2)) }
    }

    pub fn points_only() -> Self {
        Self { w: Vec::new(), w_tilde: Vec::new(), pairs: None }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn push(&mut self, w: C64, w_tilde: C64, pair: &UnitPair) {
        self.w.push(w);
        self.w_tilde.push(w_tilde);
        if let Some(store) = &mut self.pairs {
            store.push(pair);
        }
    }

    /// Both components, `W` first.
    pub fn all_points(&self) -> impl Iterator<Item = C64> + '_ {
        self.w.iter().chain(&self.w_tilde).copied()
    }

    /// Check lengths and, when pairs are kept, that each `{W[j], W~[j]}`
    /// is the spectrum of the reduced matrix at `pairs[j]`.
    pub fn verify(&self, block: &BlockMatrix, tol: f64) -> Result<()> {
        if self.w.len() != self.w_tilde.len() {
            return Err(Error::DimensionMismatch(format!("W has {} points, W~ has {}", self.w.len(), self.w_tilde.len())));
        }
        let Some(store) = &self.pairs else { return Ok(()) };
        if store.len() != self.w.len() {
            return Err(Error::DimensionMismatch(format!("{} points but {} pairs", self.w.len(), store.len())));
        }
        for (j, pair) in store.iter().enumerate() {
            let [l0, l1] = eigen2x2(&reduce(block, &pair)?);
            let (p, q) = (self.w[j], self.w_tilde[j]);
            let direct = (p - l0).norm().max((q - l1).norm());
            let swapped = (p - l1).norm().max((q - l0).norm());
            if direct.min(swapped) > tol {
                return Err(Error::DimensionMismatch(format!("point {j} does not match its pair")));
            }
        }
        Ok(())
    }
}

/// Knobs of [`grid_select`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridOptions {
    /// Also emit starts from the outermost rows and columns.
    pub include_border: bool,
    /// `p = iteration^2 / penalty_divisor * extent`.
    pub penalty_divisor: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { include_border: false, penalty_divisor: 100.0 }
    }
}

/// A representative point chosen to seed a boundary seek.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridStart {
    /// 0-based position in the cloud.
    pub index: usize,
    pub lambda0: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSelection {
    pub boxes_per_side: usize,
    /// Row-major `B x B`, row 0 at the top (largest imaginary part).
    pub occupancy: Vec<bool>,
    /// Row-major `B x B`: 1-based cloud index of the box representative,
    /// 0 for an empty box.
    pub index: Vec<usize>,
    pub starts: Vec<GridStart>,
    pub penalty: f64,
    pub cell_width: f64,
    pub cell_height: f64,
}

impl GridSelection {
    pub fn occupied(&self, k: usize, l: usize) -> bool {
        self.occupancy[k * self.boxes_per_side + l]
    }

    pub fn start_pairs<'a>(&'a self, pairs: &'a PairStore) -> impl Iterator<Item = (UnitPair, C64)> + 'a {
        self.starts.iter().map(|s| (pairs.get(s.index), s.lambda0))
    }
}

const DEGENERATE_EXTENT: f64 = 1e-300;

/// Box `(k, l)` of `z`: `k` counts rows down from the top edge, `l`
/// columns right from the left edge, both clamped to `[0, B-1]`.
fn box_of(z: C64, re_min: f64, im_max: f64, h_re: f64, h_im: f64, b: usize) -> (usize, usize) {
    let clamp = |v: f64| (v.floor().max(0.0) as usize).min(b - 1);
    (clamp((im_max - z.im) / h_im), clamp((z.re - re_min) / h_re))
}

/// Partition the bounding box of `points` into `B x B` boxes, keep the
/// first point landing in each box, and return the representatives of
/// occupied boxes that are not completely surrounded by occupied boxes.
pub fn grid_select(points: &[C64], boxes_per_side: usize, iteration: usize, opts: &GridOptions) -> Result<GridSelection> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if boxes_per_side < 2 {
        return Err(Error::InvalidConfig(format!("boxes_per_side must be at least 2, got {boxes_per_side}")));
    }
    if let Some(j) = points.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidConfig(format!("point {j} is not finite")));
    }
    let b = boxes_per_side;
    let (mut re_min, mut re_max, mut im_min, mut im_max) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in points {
        re_min = re_min.min(z.re);
        re_max = re_max.max(z.re);
        im_min = im_min.min(z.im);
        im_max = im_max.max(z.im);
    }
    let width = re_max - re_min;
    let height = im_max - im_min;
    let penalty = (iteration * iteration) as f64 / opts.penalty_divisor * width.max(height);
    let cell_width = if width < DEGENERATE_EXTENT { 1.0 } else { width / b as f64 };
    let cell_height = if height < DEGENERATE_EXTENT { 1.0 } else { height / b as f64 };

    let mut occupancy = vec![false; b * b];
    let mut index = vec![0usize; b * b];
    for (j, z) in points.iter().enumerate() {
        let (k, l) = box_of(*z, re_min, im_max, cell_width, cell_height, b);
        let cell = k * b + l;
        if !occupancy[cell] {
            occupancy[cell] = true;
            index[cell] = j + 1;
        }
    }

    let occ = |k: isize, l: isize| -> bool {
        k >= 0 && l >= 0 && (k as usize) < b && (l as usize) < b && occupancy[k as usize * b + l as usize]
    };
    let surrounded = |k: usize, l: usize| -> bool {
        (-1..=1).all(|m| (-1..=1).all(|n| occ(k as isize + m, l as isize + n)))
    };
    let range = if opts.include_border { 0..b } else { 1..b - 1 };
    let mut starts = Vec::new();
    for k in range.clone() {
        for l in range.clone() {
            let cell = k * b + l;
            if occupancy[cell] && !surrounded(k, l) {
                let j = index[cell] - 1;
                starts.push(GridStart { index: j, lambda0: points[j] });
            }
        }
    }
    Ok(GridSelection { boxes_per_side: b, occupancy, index, starts, penalty, cell_width, cell_height })
}

/// Grow the grid once the number of starts stops changing: true iff
/// `previous > 0` and `ratio < current / previous <= 1`.
pub fn should_escalate_with(previous: usize, current: usize, ratio: f64) -> bool {
    if previous == 0 {
        return false;
    }
    let r = current as f64 / previous as f64;
    r > ratio && r <= 1.0
}

pub fn should_escalate(previous: usize, current: usize) -> bool {
    should_escalate_with(previous, current, 0.99)
}

/// Number of single-link clusters of `points` at distance `cutoff`: two
/// points share a cluster when a chain of points joins them with every
/// step at most `cutoff` long.
pub fn single_link_clusters(points: &[C64], cutoff: f64) -> usize {
    use std::collections::HashMap;
    assert!(cutoff > 0.0, "cutoff must be positive");
    // cells of diagonal `cutoff`: points sharing a cell are always linked
    let side = cutoff / std::f64::consts::SQRT_2;
    let mut cells: HashMap<(i64, i64), Vec<C64>> = HashMap::new();
    for z in points {
        cells.entry(((z.re / side).floor() as i64, (z.im / side).floor() as i64)).or_default().push(*z);
    }
    let keys: Vec<(i64, i64)> = cells.keys().copied().collect();
    let id: HashMap<(i64, i64), usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let cut2 = cutoff * cutoff;
    for (i, key) in keys.iter().enumerate() {
        for dk in -2..=2i64 {
            for dl in -2..=2i64 {
                let other = (key.0 + dk, key.1 + dl);
                let Some(&j) = id.get(&other) else { continue };
                if j <= i {
                    continue;
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    continue;
                }
                let linked = cells[key].iter().any(|p| cells[&other].iter().any(|q| (p - q).norm_sqr() <= cut2));
                if linked {
                    parent[ri] = rj;
                }
            }
        }
    }
    (0..keys.len()).filter(|&i| find(&mut parent, i) == i).count()
}
