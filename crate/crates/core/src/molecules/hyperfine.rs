//! ²Σ rotational, fine and hyperfine structure in the Hund's case (b_βJ)
//! basis |((N S)J I)F⟩.
//!
//! H = B N² + γ N·S + b_F I·S + c I_z′S_z′ + eQq [3I_z′² − I²]/(4I(2I−1))
//!
//! with z′ the internuclear axis. Both axial terms are written as scalar
//! products of spherical tensors:
//!
//! - c I_z′S_z′ = (c/3) I·S − c(√10/3) [C²⊗S¹]¹·I¹
//! - 3I_z′² − I² = √6 C²·[I⊗I]²
//!
//! Matrices are block diagonal in F and in the parity of N.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::angular::{phase, reduced_angular_momentum, reduced_c_tensor, wigner_6j, wigner_9j, HalfInt};
use crate::error::{invalid, Error, Result};

/// Coupling constants in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpinRotorConstants {
    pub b_rot: f64,
    pub gamma_sr: f64,
    pub b_f: f64,
    pub c: f64,
    pub eqq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineLevel {
    /// Dominant rotational quantum number.
    #[serde(rename = "N")]
    pub n: u32,
    /// Dominant J.
    #[serde(rename = "J")]
    pub j: HalfInt,
    #[serde(rename = "F")]
    pub f: HalfInt,
    /// MHz, relative to the N = 0 centroid.
    pub energy: f64,
    /// 2F + 1
    pub degeneracy: u32,
    /// Weight of the (N, J) basis state the level is labelled with.
    pub purity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BasisState {
    n: HalfInt,
    j: HalfInt,
}

/// Basis of one (F, N-parity) block.
fn block_basis(s: HalfInt, i: HalfInt, f: HalfInt, parity: u32, n_max: u32) -> Vec<BasisState> {
    let mut out = Vec::new();
    for n in (parity..=n_max).step_by(2) {
        let n = HalfInt::int(n as i32);
        for j in HalfInt::couple(n, s) {
            if HalfInt::couple(j, i).any(|x| x == f) {
                out.push(BasisState { n, j });
            }
        }
    }
    out
}

/// Matrix element of the full Hamiltonian between two basis states of the
/// same F block, MHz.
fn element(k: &SpinRotorConstants, s: HalfInt, i: HalfInt, f: HalfInt, a: BasisState, b: BasisState) -> f64 {
    let one = HalfInt::ONE;
    let two = HalfInt::int(2);
    let mut h = 0.0;

    if a == b {
        h += k.b_rot * a.n.casimir();
        h += 0.5 * k.gamma_sr * (a.j.casimir() - a.n.casimir() - s.casimir());
    }

    // ⟨J I F| T¹(J-part)·I¹ |J′ I F⟩ prefactor shared by I·S and Z·I
    let scalar1 = phase(b.j + i + f) * wigner_6j(f, i, b.j, one, a.j, i) * reduced_angular_momentum(i);

    // I·S: S acts on the second member of (N S)J
    let is = if a.n == b.n {
        let red_s = phase(a.n + s + a.j + one)
            * ((a.j.multiplicity() * b.j.multiplicity()) as f64).sqrt()
            * wigner_6j(s, a.j, a.n, b.j, s, one)
            * reduced_angular_momentum(s);
        scalar1 * red_s
    } else {
        0.0
    };
    h += (k.b_f + k.c / 3.0) * is;

    // [C²⊗S¹]¹·I¹
    if k.c != 0.0 {
        let red_z = (3.0 * (a.j.multiplicity() * b.j.multiplicity()) as f64).sqrt()
            * wigner_9j(a.n, b.n, two, s, s, one, a.j, b.j, one)
            * reduced_c_tensor(a.n, two, b.n)
            * reduced_angular_momentum(s);
        h -= k.c * (10.0f64).sqrt() / 3.0 * scalar1 * red_z;
    }

    // √6 eQq/(4I(2I−1)) C²·[I⊗I]²
    if k.eqq != 0.0 && i.twice() >= 2 {
        let iv = i.value();
        let red_c_j = phase(a.n + s + b.j + two)
            * ((a.j.multiplicity() * b.j.multiplicity()) as f64).sqrt()
            * wigner_6j(a.n, a.j, s, b.j, b.n, two)
            * reduced_c_tensor(a.n, two, b.n);
        let red_t2 = ((2.0 * iv - 1.0) * 2.0 * iv * (2.0 * iv + 1.0) * (2.0 * iv + 2.0) * (2.0 * iv + 3.0)).sqrt()
            / (2.0 * 6f64.sqrt());
        let scalar2 = phase(b.j + i + f) * wigner_6j(f, i, b.j, two, a.j, i);
        let pref = 6f64.sqrt() * k.eqq / (4.0 * iv * (2.0 * iv - 1.0));
        h += pref * scalar2 * red_c_j * red_t2;
    }
    h
}

/// Hamiltonian matrix of one (F, parity) block and its basis labels.
pub fn block_hamiltonian(
    k: &SpinRotorConstants,
    s: HalfInt,
    i: HalfInt,
    f: HalfInt,
    parity: u32,
    n_max: u32,
) -> (DMatrix<f64>, Vec<(u32, HalfInt)>) {
    let basis = block_basis(s, i, f, parity, n_max);
    let d = basis.len();
    let m = DMatrix::from_fn(d, d, |r, c| element(k, s, i, f, basis[r], basis[c]));
    let labels = basis.iter().map(|b| ((b.n.twice() / 2) as u32, b.j)).collect();
    (m, labels)
}

/// All levels up to `n_max`, sorted by energy.
pub fn spin_rotor_levels(k: &SpinRotorConstants, s: HalfInt, i: HalfInt, n_max: u32) -> Result<Vec<HyperfineLevel>> {
    if n_max > 4 {
        return Err(invalid("n_max", "at most 4 is supported"));
    }
    if s.twice() < 0 || i.twice() < 0 {
        return Err(Error::AngularMomentum("spins must be non-negative".into()));
    }
    for v in [k.b_rot, k.gamma_sr, k.b_f, k.c, k.eqq] {
        if !v.is_finite() {
            return Err(invalid("constants", "must be finite"));
        }
    }
    let f_max = HalfInt::int(n_max as i32) + s + i;
    let mut levels = Vec::new();
    for parity in 0..2u32.min(n_max + 1) {
        let mut f = HalfInt::from_twice(f_max.twice() % 2);
        while f <= f_max {
            let (h, labels) = block_hamiltonian(k, s, i, f, parity, n_max);
            if !labels.is_empty() {
                let eig = SymmetricEigen::new(h);
                let assign = assign_labels(&eig.eigenvectors);
                for (col, &row) in assign.iter().enumerate() {
                    let (n, j) = labels[row];
                    levels.push(HyperfineLevel {
                        n,
                        j,
                        f,
                        energy: eig.eigenvalues[col],
                        degeneracy: f.multiplicity() as u32,
                        purity: eig.eigenvectors[(row, col)].powi(2),
                    });
                }
            }
            f = f + HalfInt::ONE;
        }
    }
    let (w, e) = levels
        .iter()
        .filter(|l| l.n == 0)
        .fold((0.0, 0.0), |(w, e), l| (w + l.degeneracy as f64, e + l.degeneracy as f64 * l.energy));
    let centroid = if w > 0.0 { e / w } else { 0.0 };
    for l in &mut levels {
        l.energy -= centroid;
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.f.cmp(&b.f)));
    Ok(levels)
}

/// One-to-one eigenvector → basis-state labels, greedily by largest weight.
fn assign_labels(v: &DMatrix<f64>) -> Vec<usize> {
    let d = v.ncols();
    let mut out = vec![usize::MAX; d];
    let mut row_used = vec![false; d];
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| (v[(r, c)].powi(2), r, c)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, r, c) in pairs {
        if out[c] == usize::MAX && !row_used[r] {
            out[c] = r;
            row_used[r] = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const HALF: HalfInt = HalfInt::HALF;
    const FIVE_HALVES: HalfInt = HalfInt::from_twice(5);

    #[test]
    fn bare_rotor() {
        let k = SpinRotorConstants { b_rot: 1000.0, ..Default::default() };
        let lv = spin_rotor_levels(&k, HALF, FIVE_HALVES, 2).unwrap();
        for l in &lv {
            assert_relative_eq!(l.energy, 1000.0 * (l.n * (l.n + 1)) as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn fermi_contact_ground_rotor() {
        let b = 93.117;
        let k = SpinRotorConstants { b_f: b, ..Default::default() };
        let lv = spin_rotor_levels(&k, HALF, FIVE_HALVES, 0).unwrap();
        assert_eq!(lv.len(), 2);
        assert_eq!((lv[0].f, lv[1].f), (HalfInt::int(2), HalfInt::int(3)));
        assert_relative_eq!(lv[1].energy - lv[0].energy, 3.0 * b, epsilon = 1e-10);
        let trace: f64 = lv.iter().map(|l| l.degeneracy as f64 * l.energy).sum();
        assert!(trace.abs() < 1e-10);
    }

    #[test]
    fn spin_rotation_doublet() {
        let k = SpinRotorConstants { gamma_sr: 75.85, ..Default::default() };
        let lv = spin_rotor_levels(&k, HALF, HalfInt::ZERO, 1).unwrap();
        let n1: Vec<_> = lv.iter().filter(|l| l.n == 1).collect();
        // γ(N + 1/2) splitting
        assert_relative_eq!(n1[1].energy - n1[0].energy, 1.5 * 75.85, epsilon = 1e-10);
    }

    #[test]
    fn state_count_per_n() {
        let k = SpinRotorConstants { b_rot: 800.0, gamma_sr: 75.85, b_f: 93.117, c: 52.17, eqq: 33.62 };
        let lv = spin_rotor_levels(&k, HALF, FIVE_HALVES, 3).unwrap();
        for n in 0..=3u32 {
            let count: u32 = lv.iter().filter(|l| l.n == n).map(|l| l.degeneracy).sum();
            assert_eq!(count, 2 * 6 * (2 * n + 1));
        }
    }

    #[test]
    fn blocks_are_symmetric() {
        let k = SpinRotorConstants { b_rot: 800.0, gamma_sr: 75.85, b_f: 93.117, c: 52.17, eqq: 33.62 };
        for f2 in [2, 4, 6, 8] {
            let (h, _) = block_hamiltonian(&k, HALF, FIVE_HALVES, HalfInt::from_twice(f2), 0, 4);
            assert!((&h - h.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn n_max_limit() {
        assert!(spin_rotor_levels(&SpinRotorConstants::default(), HALF, HALF, 5).is_err());
    }

    proptest! {
        #[test]
        fn fermi_contact_sum_rule(b_rot in 100.0f64..2000.0, b_f in -200.0f64..200.0, i2 in 0i32..8, n_max in 0u32..4) {
            let k = SpinRotorConstants { b_rot, b_f, ..Default::default() };
            let lv = spin_rotor_levels(&k, HALF, HalfInt::from_twice(i2), n_max).unwrap();
            for n in 0..=n_max {
                let (w, e) = lv.iter().filter(|l| l.n == n)
                    .fold((0.0, 0.0), |(w, e), l| (w + l.degeneracy as f64, e + l.degeneracy as f64 * l.energy));
                let expect = w * b_rot * (n * (n + 1)) as f64;
                prop_assert!((e - expect).abs() <= 1e-10 * expect.abs().max(w * b_f.abs()).max(1.0));
            }
        }
    }
}
