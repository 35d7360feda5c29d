//! Differential forms at a point, expanded on the orthonormal coframe basis.
//!
//! A k-form is stored as its full antisymmetric component array
//! `F_{i_1 ... i_k} = F(v_{i_1}, ..., v_{i_k})`, so that
//! `F = 1/k! F_{i_1 ... i_k} theta^{i_1} ^ ... ^ theta^{i_k}` and
//! `(alpha ^ beta)(X, Y) = alpha(X) beta(Y) - alpha(Y) beta(X)`.

use std::sync::OnceLock;

use crate::clifford::ETA;
use crate::error::{Error, Result};

/// Levi-Civita symbol with `epsilon_{0123} = +1`.
///
/// The same numerical values serve for upper and lower indices; no sign flip
/// is applied when all four indices are raised.
pub fn levi_civita(idx: &[usize]) -> f64 {
    debug_assert_eq!(idx.len(), 4);
    let mut sign = 1.0;
    for i in 0..4 {
        if idx[i] > 3 {
            return 0.0;
        }
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn decode(mut flat: usize, degree: usize) -> [usize; 4] {
    let mut idx = [0usize; 4];
    for slot in (0..degree).rev() {
        idx[slot] = flat % 4;
        flat /= 4;
    }
    idx
}

fn encode(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 4 + i)
}

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

/// Permutations of `0..n` paired with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (perm, sign) in signed_permutations(n - 1) {
        // Insert n-1 at every position; moving it left past k entries costs (-1)^k.
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            let shifts = perm.len() - pos;
            let s = if shifts % 2 == 0 { sign } else { -sign };
            out.push((p, s));
        }
    }
    out
}

/// Permutations of `0..n` with their signs.
type SignedPermutations = Vec<(Vec<usize>, f64)>;

fn permutations_of(n: usize) -> &'static [(Vec<usize>, f64)] {
    static TABLES: OnceLock<Vec<SignedPermutations>> = OnceLock::new();
    &TABLES.get_or_init(|| (0..=4).map(signed_permutations).collect())[n]
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexedForm {
    degree: usize,
    comps: Vec<f64>,
}

impl IndexedForm {
    pub fn zero(degree: usize) -> Result<Self> {
        if degree > 4 {
            return Err(Error::BadDegree(degree));
        }
        Ok(IndexedForm {
            degree,
            comps: vec![0.0; 4usize.pow(degree as u32)],
        })
    }

    pub fn scalar(value: f64) -> Self {
        IndexedForm {
            degree: 0,
            comps: vec![value],
        }
    }

    /// `theta^a`.
    pub fn basis(a: usize) -> Self {
        let mut f = IndexedForm::zero(1).unwrap();
        f.comps[a] = 1.0;
        f
    }

    /// `theta_a = eta_{ab} theta^b`.
    pub fn lowered_basis(a: usize) -> Self {
        let mut f = IndexedForm::zero(1).unwrap();
        f.comps[a] = ETA[a];
        f
    }

    /// `theta^0 ^ theta^1 ^ theta^2 ^ theta^3`.
    pub fn volume() -> Self {
        let mut f = IndexedForm::zero(4).unwrap();
        for flat in 0..f.comps.len() {
            f.comps[flat] = levi_civita(&decode(flat, 4));
        }
        f
    }

    /// Build a form from a component function; the function must already be
    /// antisymmetric.
    pub fn from_fn(degree: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut form = IndexedForm::zero(degree)?;
        for flat in 0..form.comps.len() {
            let idx = decode(flat, degree);
            form.comps[flat] = f(&idx[..degree]);
        }
        Ok(form)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.degree);
        self.comps[encode(idx)]
    }

    /// Coefficient of `theta^0 ^ theta^1 ^ theta^2 ^ theta^3` for a 4-form.
    pub fn top_coefficient(&self) -> f64 {
        debug_assert_eq!(self.degree, 4);
        self.get(&[0, 1, 2, 3])
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest deviation from full antisymmetry under transpositions of
    /// adjacent slots.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for flat in 0..self.comps.len() {
            let idx = decode(flat, self.degree);
            for slot in 0..self.degree.saturating_sub(1) {
                let mut swapped = idx;
                swapped.swap(slot, slot + 1);
                let other = self.comps[encode(&swapped[..self.degree])];
                worst = worst.max((self.comps[flat] + other).abs());
            }
        }
        worst
    }

    pub fn scaled(&self, factor: f64) -> Self {
        IndexedForm {
            degree: self.degree,
            comps: self.comps.iter().map(|x| x * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &IndexedForm, factor: f64) {
        assert_eq!(self.degree, other.degree, "degree mismatch in form sum");
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            *x += factor * y;
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &IndexedForm) -> Result<IndexedForm> {
        let (k, l) = (self.degree, other.degree);
        let n = k + l;
        let mut out = IndexedForm::zero(n)?;
        let perms = permutations_of(n);
        let norm = 1.0 / (factorial(k) * factorial(l));
        for flat in 0..out.comps.len() {
            let idx = decode(flat, n);
            if (0..n).any(|i| (i + 1..n).any(|j| idx[i] == idx[j])) {
                continue;
            }
            let mut sum = 0.0;
            let (mut left, mut right) = ([0usize; 4], [0usize; 4]);
            for (perm, sign) in perms {
                for (slot, &p) in perm[..k].iter().enumerate() {
                    left[slot] = idx[p];
                }
                for (slot, &p) in perm[k..].iter().enumerate() {
                    right[slot] = idx[p];
                }
                sum += sign * self.get(&left[..k]) * other.get(&right[..l]);
            }
            out.comps[flat] = sum * norm;
        }
        Ok(out)
    }

    /// Hodge dual on the orthonormal basis:
    /// `*(theta_{i_1} ^ ... ^ theta_{i_k}) = 1/(4-k)! epsilon_{i_1..i_k j_1..j_{4-k}} theta^{j_1} ^ ... ^ theta^{j_{4-k}}`.
    ///
    /// Components are raised with `eta` before contracting, so `**1 = -1` and
    /// `*theta_0 = theta^1 ^ theta^2 ^ theta^3`.
    pub fn hodge_dual(&self) -> Result<IndexedForm> {
        let k = self.degree;
        if k > 4 {
            return Err(Error::BadDegree(k));
        }
        let mut out = IndexedForm::zero(4 - k)?;
        let norm = 1.0 / factorial(k);
        for (out_flat, slot) in out.comps.iter_mut().enumerate() {
            let j = decode(out_flat, 4 - k);
            let mut sum = 0.0;
            for in_flat in 0..self.comps.len() {
                let value = self.comps[in_flat];
                if value == 0.0 {
                    continue;
                }
                let i = decode(in_flat, k);
                let raise: f64 = i[..k].iter().map(|&a| ETA[a]).product();
                let mut all = [0usize; 4];
                all[..k].copy_from_slice(&i[..k]);
                all[k..].copy_from_slice(&j[..4 - k]);
                sum += raise * value * levi_civita(&all);
            }
            *slot = sum * norm;
        }
        Ok(out)
    }

    /// Exterior derivative of a form whose orthonormal components are constant,
    /// given the exterior derivatives `d theta^a` of the basis (as 2-forms).
    ///
    /// Uses `d(theta^{i_1} ^ ... ^ theta^{i_k}) = sum_j (-1)^j theta^{i_1} ^ ... ^ d theta^{i_j} ^ ... ^ theta^{i_k}`.
    pub fn d_constant(&self, d_basis: &[IndexedForm; 4]) -> Result<IndexedForm> {
        let k = self.degree;
        let mut out = IndexedForm::zero(k + 1)?;
        if k == 0 {
            return Ok(out);
        }
        // Iterate over increasing multi-indices so each monomial is counted once.
        for flat in 0..self.comps.len() {
            let idx = decode(flat, k);
            if !(0..k.saturating_sub(1)).all(|s| idx[s] < idx[s + 1]) {
                continue;
            }
            let coeff = self.comps[flat];
            if coeff == 0.0 {
                continue;
            }
            for j in 0..k {
                let mut term = IndexedForm::scalar(1.0);
                for (slot, &a) in idx[..k].iter().enumerate() {
                    let factor = if slot == j { &d_basis[a] } else { &IndexedForm::basis(a) };
                    term = term.wedge(factor)?;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.add_scaled(&term, sign * coeff);
            }
        }
        Ok(out)
    }
}
