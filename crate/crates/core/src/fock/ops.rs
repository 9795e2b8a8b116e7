//! Structured superoperators built from products of ladder and qubit
//! operators.
//!
//! Every generator term here has the form coeff · L₁L₂ ρ R₁R₂ with at most
//! two elementary operators per side. Elementary operators are single
//! shifts with index-dependent weights, so each term compiles to a constant
//! flat-index offset plus per-row/per-column weight tables, and application
//! is a single O(dim²) pass per term.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Basis ordering of the truncated Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLayout {
    /// photon ⊗ phonon: flat index = na · n_b + nb.
    TwoMode { n_a: usize, n_b: usize },
    /// qubit ⊗ photon ⊗ phonon: flat index = (q · n_a + na) · n_b + nb,
    /// with q = 0 the qubit ground state and q = 1 the excited state.
    QubitTwoMode { n_a: usize, n_b: usize },
}

impl BasisLayout {
    pub fn dim(&self) -> usize {
        match *self {
            BasisLayout::TwoMode { n_a, n_b } => n_a * n_b,
            BasisLayout::QubitTwoMode { n_a, n_b } => 2 * n_a * n_b,
        }
    }

    pub fn n_a(&self) -> usize {
        match *self {
            BasisLayout::TwoMode { n_a, .. } | BasisLayout::QubitTwoMode { n_a, .. } => n_a,
        }
    }

    pub fn n_b(&self) -> usize {
        match *self {
            BasisLayout::TwoMode { n_b, .. } | BasisLayout::QubitTwoMode { n_b, .. } => n_b,
        }
    }

    pub fn has_qubit(&self) -> bool {
        matches!(self, BasisLayout::QubitTwoMode { .. })
    }

    /// Flat index of |q, na, nb⟩ (q ignored for the two-mode layout).
    pub fn flat(&self, q: usize, na: usize, nb: usize) -> usize {
        match *self {
            BasisLayout::TwoMode { n_b, .. } => na * n_b + nb,
            BasisLayout::QubitTwoMode { n_a, n_b } => (q * n_a + na) * n_b + nb,
        }
    }

    /// Inverse of [`BasisLayout::flat`]: (q, na, nb).
    pub fn split(&self, i: usize) -> (usize, usize, usize) {
        match *self {
            BasisLayout::TwoMode { n_b, .. } => (0, i / n_b, i % n_b),
            BasisLayout::QubitTwoMode { n_a, n_b } => {
                let nb = i % n_b;
                let rest = i / n_b;
                (rest / n_a, rest % n_a, nb)
            }
        }
    }
}

/// Elementary single-mode operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOp {
    /// a
    PhotonLower,
    /// a†
    PhotonRaise,
    /// b
    PhononLower,
    /// b†
    PhononRaise,
    /// S⁻ = |g⟩⟨e|
    QubitLower,
    /// S⁺ = |e⟩⟨g|
    QubitRaise,
    /// S_z = (|e⟩⟨e| − |g⟩⟨g|)/2
    QubitZ,
}

impl ModeOp {
    pub fn dagger(&self) -> ModeOp {
        match self {
            ModeOp::PhotonLower => ModeOp::PhotonRaise,
            ModeOp::PhotonRaise => ModeOp::PhotonLower,
            ModeOp::PhononLower => ModeOp::PhononRaise,
            ModeOp::PhononRaise => ModeOp::PhononLower,
            ModeOp::QubitLower => ModeOp::QubitRaise,
            ModeOp::QubitRaise => ModeOp::QubitLower,
            ModeOp::QubitZ => ModeOp::QubitZ,
        }
    }

    /// Nonzero matrix element O[row, col] with `col` given, if any:
    /// returns (row, weight).
    fn entry_for_col(
        &self,
        layout: &BasisLayout,
        q: usize,
        na: usize,
        nb: usize,
    ) -> Option<((usize, usize, usize), f64)> {
        let (n_a, n_b) = (layout.n_a(), layout.n_b());
        match self {
            ModeOp::PhotonLower => {
                // a|na> = sqrt(na)|na-1>
                (na > 0).then(|| ((q, na - 1, nb), (na as f64).sqrt()))
            }
            ModeOp::PhotonRaise => {
                (na + 1 < n_a).then(|| ((q, na + 1, nb), ((na + 1) as f64).sqrt()))
            }
            ModeOp::PhononLower => (nb > 0).then(|| ((q, na, nb - 1), (nb as f64).sqrt())),
            ModeOp::PhononRaise => {
                (nb + 1 < n_b).then(|| ((q, na, nb + 1), ((nb + 1) as f64).sqrt()))
            }
            ModeOp::QubitLower => (q == 1).then(|| ((0, na, nb), 1.0)),
            ModeOp::QubitRaise => (q == 0).then(|| ((1, na, nb), 1.0)),
            ModeOp::QubitZ => Some(((q, na, nb), q as f64 - 0.5)),
        }
    }

    /// Nonzero matrix element O[row, col] with `row` given: (col, weight).
    fn entry_for_row(
        &self,
        layout: &BasisLayout,
        q: usize,
        na: usize,
        nb: usize,
    ) -> Option<((usize, usize, usize), f64)> {
        // O[r, c] != 0  <=>  O†[c, r] != 0, with the same magnitude; all
        // elementary weights are real, so reuse the dagger's column walk.
        self.dagger().entry_for_col(layout, q, na, nb)
    }
}

/// One generator term coeff · (left ops) ρ (right ops).
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub coeff: C64,
    pub left: Vec<ModeOp>,
    pub right: Vec<ModeOp>,
    pub label: String,
}

impl ProductTerm {
    pub fn new(coeff: C64, left: &[ModeOp], right: &[ModeOp], label: impl Into<String>) -> Self {
        Self {
            coeff,
            left: left.to_vec(),
            right: right.to_vec(),
            label: label.into(),
        }
    }
}

/// One side of a compiled term, factorized over modes: the weight of a
/// multi-index is the product of per-mode weights, each mode shifts by a
/// constant, and the set of valid (nonzero-weight) indices is a box.
#[derive(Debug, Clone)]
struct SideKernel {
    /// Flat source offset: source = target + flat_shift.
    flat_shift: isize,
    wq: Vec<f64>,
    wa: Vec<f64>,
    wb: Vec<f64>,
    q_range: std::ops::Range<usize>,
    a_range: std::ops::Range<usize>,
    b_range: std::ops::Range<usize>,
}

/// out[r, c] += coeff · row(r) · col(c) · rho[r + row.flat_shift, c + col.flat_shift].
#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: C64,
    row: SideKernel,
    col: SideKernel,
}

fn nonzero_range(w: &[f64]) -> std::ops::Range<usize> {
    let lo = w.iter().position(|&x| x != 0.0).unwrap_or(w.len());
    let hi = w.iter().rposition(|&x| x != 0.0).map_or(lo, |i| i + 1);
    lo..hi
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Mode {
    Qubit,
    Photon,
    Phonon,
}

impl ModeOp {
    fn mode(&self) -> Mode {
        match self {
            ModeOp::PhotonLower | ModeOp::PhotonRaise => Mode::Photon,
            ModeOp::PhononLower | ModeOp::PhononRaise => Mode::Phonon,
            ModeOp::QubitLower | ModeOp::QubitRaise | ModeOp::QubitZ => Mode::Qubit,
        }
    }
}

/// Walk one mode index through the mode's own operator chain, collecting the
/// product of matrix elements. Each elementary operator touches exactly one
/// mode, so a side's operator list partitions by mode and every mode's
/// weight table is independent of the others.
fn mode_table(
    layout: &BasisLayout,
    ops: &[ModeOp],
    mode: Mode,
    size: usize,
    is_left: bool,
) -> (isize, Vec<f64>) {
    let chain: Vec<ModeOp> = ops.iter().copied().filter(|o| o.mode() == mode).collect();
    let mut w = vec![0.0f64; size];
    let mut shift = 0isize;
    for start in 0..size {
        let mut idx = start;
        let mut weight = 1.0f64;
        let mut ok = true;
        let step = |op: &ModeOp, i: usize| -> Option<(usize, f64)> {
            // embed the single-mode index into a full multi-index at the
            // origin of the untouched modes
            let (q, na, nb) = match mode {
                Mode::Qubit => (i, 0, 0),
                Mode::Photon => (0, i, 0),
                Mode::Phonon => (0, 0, i),
            };
            let entry = if is_left {
                op.entry_for_row(layout, q, na, nb)
            } else {
                op.entry_for_col(layout, q, na, nb)
            };
            entry.map(|((q2, na2, nb2), f)| {
                let j = match mode {
                    Mode::Qubit => q2,
                    Mode::Photon => na2,
                    Mode::Phonon => nb2,
                };
                (j, f)
            })
        };
        // left side: L1 then L2 toward the source row;
        // right side: R2 then R1 toward the source column
        let iter: Vec<&ModeOp> = if is_left {
            chain.iter().collect()
        } else {
            chain.iter().rev().collect()
        };
        for op in iter {
            match step(op, idx) {
                Some((j, f)) => {
                    weight *= f;
                    idx = j;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && weight != 0.0 {
            w[start] = weight;
            shift = idx as isize - start as isize;
        }
    }
    (shift, w)
}

fn compile_side(layout: &BasisLayout, ops: &[ModeOp], is_left: bool) -> SideKernel {
    let qubit_dim = if layout.has_qubit() { 2 } else { 1 };
    let (n_a, n_b) = (layout.n_a(), layout.n_b());
    let (sq, wq) = mode_table(layout, ops, Mode::Qubit, qubit_dim, is_left);
    let (sa, wa) = mode_table(layout, ops, Mode::Photon, n_a, is_left);
    let (sb, wb) = mode_table(layout, ops, Mode::Phonon, n_b, is_left);
    let flat_shift = match layout {
        BasisLayout::TwoMode { n_b, .. } => sa * *n_b as isize + sb,
        BasisLayout::QubitTwoMode { n_a, n_b } => {
            (sq * *n_a as isize + sa) * *n_b as isize + sb
        }
    };
    SideKernel {
        flat_shift,
        q_range: nonzero_range(&wq),
        a_range: nonzero_range(&wa),
        b_range: nonzero_range(&wb),
        wq,
        wa,
        wb,
    }
}

/// Matrix-free linear map on density matrices, stored as a list of labeled
/// product terms.
#[derive(Debug, Clone)]
pub struct Superoperator {
    layout: BasisLayout,
    terms: Vec<ProductTerm>,
    compiled: Vec<CompiledTerm>,
}

impl Superoperator {
    pub fn new(layout: BasisLayout, terms: Vec<ProductTerm>) -> Self {
        let compiled = terms
            .iter()
            .map(|t| CompiledTerm {
                coeff: t.coeff,
                row: compile_side(&layout, &t.left, true),
                col: compile_side(&layout, &t.right, false),
            })
            .collect();
        Self {
            layout,
            terms,
            compiled,
        }
    }

    pub fn layout(&self) -> BasisLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Generator terms with their labels.
    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    /// out = L(rho), both flattened row-major over dim × dim.
    pub fn apply(&self, rho: &[C64], out: &mut [C64]) {
        let d = self.dim();
        assert_eq!(rho.len(), d * d);
        assert_eq!(out.len(), d * d);
        let (n_a, n_b) = (self.layout.n_a(), self.layout.n_b());
        out.par_chunks_mut(d).enumerate().for_each(|(r, out_row)| {
            out_row.fill(C64::new(0.0, 0.0));
            let (rq, rna, rnb) = self.layout.split(r);
            for t in &self.compiled {
                let rw = t.row.wq[rq] * t.row.wa[rna] * t.row.wb[rnb];
                if rw == 0.0 {
                    continue;
                }
                let src_row = (r as isize + t.row.flat_shift) as usize;
                let crw = t.coeff * rw;
                let rho_row = &rho[src_row * d..(src_row + 1) * d];
                let cs = t.col.flat_shift;
                for cq in t.col.q_range.clone() {
                    for cna in t.col.a_range.clone() {
                        let cw2 = crw * (t.col.wq[cq] * t.col.wa[cna]);
                        let col0 = (cq * n_a + cna) * n_b;
                        // in range whenever the per-mode weights are nonzero
                        let src_start =
                            (col0 as isize + cs + t.col.b_range.start as isize) as usize;
                        let wb = &t.col.wb[t.col.b_range.clone()];
                        let dst = &mut out_row[col0 + t.col.b_range.start..][..wb.len()];
                        let src = &rho_row[src_start..][..wb.len()];
                        for ((o, &w), &x) in dst.iter_mut().zip(wb).zip(src) {
                            *o += cw2 * w * x;
                        }
                    }
                }
            }
        });
    }

    /// Convenience: apply to an `Array2` density matrix.
    pub fn apply_matrix(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.dim();
        let flat: Vec<C64> = rho.iter().copied().collect();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        self.apply(&flat, &mut out);
        Array2::from_shape_vec((d, d), out).unwrap()
    }

    fn side_weight(&self, k: &SideKernel, i: usize) -> f64 {
        let (q, na, nb) = self.layout.split(i);
        k.wq[q] * k.wa[na] * k.wb[nb]
    }

    /// Diagonal of the vectorized map (terms with zero shift on both sides).
    pub fn diagonal(&self) -> Vec<C64> {
        let d = self.dim();
        let mut diag = vec![C64::new(0.0, 0.0); d * d];
        for t in &self.compiled {
            if t.row.flat_shift != 0 || t.col.flat_shift != 0 {
                continue;
            }
            for r in 0..d {
                let rw = self.side_weight(&t.row, r);
                if rw == 0.0 {
                    continue;
                }
                for c in 0..d {
                    let cw = self.side_weight(&t.col, c);
                    diag[r * d + c] += t.coeff * rw * cw;
                }
            }
        }
        diag
    }

    /// Split into the one-sided part G_L ρ + ρ G_R (dense d × d matrices)
    /// plus the remaining two-sided terms. Used for preconditioning the
    /// steady-state solve.
    pub fn one_sided_split(&self) -> (Array2<C64>, Array2<C64>) {
        let d = self.dim();
        let mut g_left = Array2::<C64>::zeros((d, d));
        let mut g_right = Array2::<C64>::zeros((d, d));
        let is_identity = |k: &SideKernel| {
            k.flat_shift == 0
                && k.wq.iter().all(|&w| w == 1.0)
                && k.wa.iter().all(|&w| w == 1.0)
                && k.wb.iter().all(|&w| w == 1.0)
        };
        for t in &self.compiled {
            let left_identity = is_identity(&t.col);
            let right_identity = is_identity(&t.row);
            if left_identity && !right_identity {
                for r in 0..d {
                    let rw = self.side_weight(&t.row, r);
                    if rw != 0.0 {
                        let src = (r as isize + t.row.flat_shift) as usize;
                        g_left[(r, src)] += t.coeff * rw;
                    }
                }
            } else if right_identity {
                for c in 0..d {
                    let cw = self.side_weight(&t.col, c);
                    if cw != 0.0 {
                        let src = (c as isize + t.col.flat_shift) as usize;
                        g_right[(src, c)] += t.coeff * cw;
                    }
                }
            }
        }
        (g_left, g_right)
    }

    /// Frobenius norm of L(rho).
    pub fn residual_norm(&self, rho: &[C64]) -> f64 {
        let mut out = vec![C64::new(0.0, 0.0); rho.len()];
        self.apply(rho, &mut out);
        out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}
