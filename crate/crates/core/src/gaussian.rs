//! Single-particle Gaussian calculus on 2k Majorana modes.
//!
//! Majorana vectors are ordered with odd indices on top and even below,
//! (γ¹, γ³, …, γ^{2k−1}, γ², γ⁴, …, γ^{2k}), so that T maps them to (d, d†)
//! with d_m = (γ^{2m−1} + iγ^{2m})/2.

use crate::error::{Error, Result};
use crate::fock::{jw_majorana, FockOperator, PureState};
use crate::linalg::hermitian_eigen;
use crate::pauli::{Pauli, PauliSum, C64, I};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalPoint {
    pub r: DMatrix<f64>,
    pub det_sign: i8,
}

impl OrthogonalPoint {
    pub fn identity(n: usize) -> Self {
        OrthogonalPoint {
            r: DMatrix::identity(n, n),
            det_sign: 1,
        }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.r.nrows();
        (&self.r * self.r.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Haar-random element of SO(k2): QR of a Gaussian matrix with diag(R) > 0,
/// last column negated when the determinant is −1.
pub fn haar_so<G: Rng + ?Sized>(k2: usize, rng: &mut G) -> Result<OrthogonalPoint> {
    if k2 < 2 || k2 % 2 != 0 {
        return Err(Error::Argument(format!(
            "SO({k2}) sampling needs an even size >= 2"
        )));
    }
    let g = DMatrix::<f64>::from_fn(k2, k2, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..k2 {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(k2 - 1).neg_mut();
    }
    Ok(OrthogonalPoint { r: q, det_sign: 1 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovBlocks {
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
}

impl BogoliubovBlocks {
    pub fn k(&self) -> usize {
        self.a.nrows()
    }

    /// max of ‖AA† + BB† − 1‖ and ‖ABᵀ + BAᵀ‖ (entrywise).
    pub fn constraint_residual(&self) -> f64 {
        let k = self.k();
        let u = &self.a * self.a.adjoint() + &self.b * self.b.adjoint()
            - DMatrix::<C64>::identity(k, k);
        let s = &self.a * self.b.transpose() + &self.b * self.a.transpose();
        let m = |x: &DMatrix<C64>| x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        m(&u).max(m(&s))
    }
}

/// Upper blocks of T R T⁻¹, T = ½[[1, i],[1, −i]].
pub fn bogoliubov_blocks(r: &OrthogonalPoint) -> BogoliubovBlocks {
    let n = r.r.nrows();
    let k = n / 2;
    let rc = |i: usize, j: usize| re(r.r[(i, j)]);
    let h = re(0.5);
    let a = DMatrix::from_fn(k, k, |i, j| {
        h * (rc(i, j) + rc(k + i, k + j) + I * (rc(k + i, j) - rc(i, k + j)))
    });
    let b = DMatrix::from_fn(k, k, |i, j| {
        h * (rc(i, j) - rc(k + i, k + j) + I * (rc(k + i, j) + rc(i, k + j)))
    });
    BogoliubovBlocks { a, b }
}

/// Cyclic pseudo-permutation with C^k = −1.
pub fn c_matrix(k: usize) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(k, k);
    for m in 0..k.saturating_sub(1) {
        c[(m, m + 1)] = 1.0;
    }
    c[(k - 1, 0)] = -1.0;
    c
}

pub fn eta_blocks(k: usize) -> BogoliubovBlocks {
    let c = c_matrix(k).map(re);
    let id = DMatrix::<C64>::identity(k, k);
    BogoliubovBlocks {
        a: (&c - &id) * re(-0.5),
        b: (&c + &id) * re(-0.5),
    }
}

/// Two-site 2k×2k blocks A₀ = ½[[1, i],[−i, −1]], B₀ = ½[[1, i],[i, 1]].
pub fn zero_blocks(k: usize) -> BogoliubovBlocks {
    let quad = |tl: C64, tr: C64, bl: C64, br: C64| {
        DMatrix::from_fn(2 * k, 2 * k, |i, j| {
            if i % k != j % k {
                return re(0.0);
            }
            0.5 * match (i < k, j < k) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            }
        })
    };
    BogoliubovBlocks {
        a: quad(re(1.0), I, -I, re(-1.0)),
        b: quad(re(1.0), I, I, re(1.0)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overlap {
    E,
    Eta,
    Zero,
}

/// Squared overlaps as pure determinants:
/// Ω_e² = det A, Ω_η² = det(A_η†A + B_ηᵀB*), Ω₀² = det[(A* − B)(A* + B)].
pub fn omega_sq(which: Overlap, blocks: &BogoliubovBlocks) -> C64 {
    let (a, b) = (&blocks.a, &blocks.b);
    match which {
        Overlap::E => a.determinant(),
        Overlap::Eta => {
            let eta = eta_blocks(blocks.k());
            (eta.a.adjoint() * a + eta.b.transpose() * b.conjugate()).determinant()
        }
        Overlap::Zero => ((a.conjugate() - b) * (a.conjugate() + b)).determinant(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZMatrix {
    pub z: DMatrix<C64>,
}

impl ZMatrix {
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.z + self.z.transpose())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Z = −A⁻¹B; singular A signals a resample.
pub fn z_matrix(blocks: &BogoliubovBlocks) -> Result<ZMatrix> {
    let lu = blocks.a.clone().lu();
    let det = lu.determinant();
    if det.norm() < 1e-12 {
        return Err(Error::Singular);
    }
    let z = lu.solve(&blocks.b).ok_or(Error::Singular)? * re(-1.0);
    Ok(ZMatrix { z })
}

/// Sign-aware d_n† on a k-mode JW register (mode m is qubit m).
fn create(n: usize, k: usize, v: &[C64], out: &mut [C64], coeff: C64) {
    let bit = 1usize << (k - 1 - n);
    let higher = !((bit << 1) - 1) & ((1usize << k) - 1);
    for (b, &amp) in v.iter().enumerate() {
        if amp == re(0.0) || b & bit != 0 {
            continue;
        }
        let s = if (b & higher).count_ones() % 2 == 1 {
            -coeff
        } else {
            coeff
        };
        out[b | bit] += s * amp;
    }
}

fn annihilate(n: usize, k: usize, v: &[C64], out: &mut [C64], coeff: C64) {
    let bit = 1usize << (k - 1 - n);
    let higher = !((bit << 1) - 1) & ((1usize << k) - 1);
    for (b, &amp) in v.iter().enumerate() {
        if amp == re(0.0) || b & bit == 0 {
            continue;
        }
        let s = if (b & higher).count_ones() % 2 == 1 {
            -coeff
        } else {
            coeff
        };
        out[b ^ bit] += s * amp;
    }
}

/// Normalized exp(½ d†Z d†)|e⟩ on k qubits with positive vacuum amplitude.
pub fn thouless_from_z(z: &ZMatrix) -> PureState {
    let k = z.z.nrows();
    let dim = 1usize << k;
    let mut term = vec![re(0.0); dim];
    term[0] = re(1.0);
    let mut acc = term.clone();
    for t in 1..=k / 2 {
        let mut next = vec![re(0.0); dim];
        for m in 0..k {
            for n in (m + 1)..k {
                let c = z.z[(m, n)];
                if c == re(0.0) {
                    continue;
                }
                let mut tmp = vec![re(0.0); dim];
                create(n, k, &term, &mut tmp, re(1.0));
                create(m, k, &tmp, &mut next, c);
            }
        }
        let inv = re(1.0 / t as f64);
        term = next.into_iter().map(|x| x * inv).collect();
        for (a, b) in acc.iter_mut().zip(&term) {
            *a += b;
        }
    }
    let norm = acc.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let amps = DVector::from_iterator(dim, acc.into_iter().map(|c| c / norm));
    PureState {
        amplitudes: amps,
        n_qubits: k,
        layout: None,
    }
}

pub fn thouless_state(blocks: &BogoliubovBlocks) -> Result<PureState> {
    Ok(thouless_from_z(&z_matrix(blocks)?))
}

/// Blocks of Rᵀ: (A†, Bᵀ).
pub fn inverse_blocks(blocks: &BogoliubovBlocks) -> BogoliubovBlocks {
    BogoliubovBlocks {
        a: blocks.a.adjoint(),
        b: blocks.b.transpose(),
    }
}

/// U_R|e⟩ with U_R U_S = U_{RS}; annihilated by A†d + Bᵀd†.
/// In this convention Ω_e² = ⟨e|U_R|e⟩² and Ω₀² = 2^k ⟨φ₀|U_R|e⟩⊗U_R|e⟩ up to phase.
pub fn coherent_state(r: &OrthogonalPoint) -> Result<PureState> {
    thouless_state(&inverse_blocks(&bogoliubov_blocks(r)))
}

/// ‖(A d + B d†)_m v‖ maximized over m.
pub fn annihilation_residual(blocks: &BogoliubovBlocks, v: &PureState) -> f64 {
    let k = blocks.k();
    let dim = 1usize << k;
    let mut worst: f64 = 0.0;
    for m in 0..k {
        let mut out = vec![re(0.0); dim];
        for n in 0..k {
            annihilate(n, k, v.as_slice(), &mut out, blocks.a[(m, n)]);
            create(n, k, v.as_slice(), &mut out, blocks.b[(m, n)]);
        }
        worst = worst.max(out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    }
    worst
}

/// exp(−iH) with H = (i/4) Σ_ab h_ab γ^a γ^b for real antisymmetric h on n_maj/2 qubits.
pub fn quadratic_unitary(h: &DMatrix<f64>) -> Result<DMatrix<C64>> {
    let n_maj = h.nrows();
    if n_maj == 0 || n_maj % 2 != 0 || h.ncols() != n_maj {
        return Err(Error::Argument(
            "generator must be square with an even size".into(),
        ));
    }
    if (h + h.transpose()).amax() > 1e-12 {
        return Err(Error::Argument("generator must be antisymmetric".into()));
    }
    let q = n_maj / 2;
    let mut gen = PauliSum::zero();
    for a in 0..n_maj {
        for b in 0..n_maj {
            if a != b && h[(a, b)] != 0.0 {
                let t = jw_majorana(a, 0, q).mul(&jw_majorana(b, 0, q));
                gen.add_term(t.scale(I * (0.25 * h[(a, b)])));
            }
        }
    }
    let (vals, vecs) = hermitian_eigen(gen.to_dense(q));
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C64::from_polar(1.0, -e)),
    ));
    Ok(&vecs * phases * vecs.adjoint())
}

/// JW Majorana γ^mu (1-based) on a k-qubit local register.
pub fn local_majorana(mu: usize, k: usize) -> Pauli {
    jw_majorana(mu - 1, 0, k)
}

/// Λ = Σ_a γ^a ⊗ γ^a (plain tensor product) on the doubled space of `n_maj` Majoranas.
pub fn lambda_pauli(n_maj: usize) -> Result<PauliSum> {
    if n_maj == 0 || n_maj % 2 != 0 {
        return Err(Error::Argument(format!(
            "Λ needs an even Majorana count, got {n_maj}"
        )));
    }
    Ok(plain_lambda(n_maj))
}

fn plain_lambda(n_maj: usize) -> PauliSum {
    let q = n_maj / 2;
    let first_copy = ((1u64 << q) - 1) << q;
    let mut s = PauliSum::zero();
    for a in 0..n_maj {
        let first = jw_majorana(a, 0, 2 * q);
        let second = jw_majorana(a, q, 2 * q);
        // drop the JW tail of the second copy over the first copy's qubits
        let second = Pauli {
            z: second.z & !first_copy,
            ..second
        };
        s.add_term(first.mul(&second));
    }
    s
}

pub fn lambda_op(n_maj: usize) -> Result<FockOperator> {
    let s = lambda_pauli(n_maj)?;
    Ok(FockOperator::from_pauli(&s, n_maj, None, true))
}

/// ‖Λ(v ⊗ v)‖ for a state on n_maj/2 qubits.
pub fn lambda_norm(v: &PureState) -> f64 {
    let n_maj = 2 * v.n_qubits;
    let s = plain_lambda(n_maj);
    let w = v.kron(v);
    s.apply(w.as_slice())
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Boundary states from their quadratic stabilizers on k local qubits.
pub fn boundary_state(which: Overlap, k: usize) -> Result<PureState> {
    let g = |mu: usize| local_majorana((mu - 1) % (2 * k) + 1, k);
    let stabilizers: Vec<Pauli> = match which {
        Overlap::E => (1..=k)
            .map(|m| g(2 * m - 1).mul(&g(2 * m)).scale(-I))
            .collect(),
        // −iγ^{2m}γ^{2m+1} = +1 for m < k and −iγ^{2k}γ^1 = −1
        Overlap::Eta => (1..=k)
            .map(|m| {
                let s = if m == k { I } else { -I };
                g(2 * m).mul(&g(2 * m + 1)).scale(s)
            })
            .collect(),
        Overlap::Zero => {
            return Err(Error::Argument(
                "the two-site state comes from zero_blocks".into(),
            ))
        }
    };
    let dim = 1usize << k;
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0xb0_0d);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    for s in &stabilizers {
        let w = s.apply(&v);
        v = v.iter().zip(w).map(|(a, b)| (a + b) * 0.5).collect();
    }
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return Err(Error::Consistency(
            "stabilizer group has no joint +1 state".into(),
        ));
    }
    // phase: real positive overlap with the vacuum
    let ph = v[0].conj() / (v[0].norm() * norm);
    let amps = DVector::from_iterator(dim, v.into_iter().map(|c| c * ph));
    Ok(PureState {
        amplitudes: amps,
        n_qubits: k,
        layout: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingReport {
    /// ‖N w − k w‖ with w = v ⊗ v
    pub number_residual: f64,
    /// ‖Λ_{4k}(w ⊗ w)‖
    pub lambda_norm: f64,
}

impl EmbeddingReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.number_residual < tol && self.lambda_norm < tol
    }
}

/// Doubling |v⟩ ↦ |v⟩⊗|v⟩ lands in the half-filled Λ-null manifold on 4k modes.
pub fn embedding_check(v: &PureState) -> EmbeddingReport {
    let k = v.n_qubits;
    let n = 2 * k;
    let w = v.kron(v);
    let mut number = PauliSum::zero();
    for a in 0..2 * k {
        // c_a = (γ_a ⊗ 1 + i (JW-dressed) 1 ⊗ γ_a)/2, n_a = (1 + i γ γ')/2
        let p = jw_majorana(a, 0, n);
        let q = jw_majorana(a, k, n);
        number.add_term(Pauli::identity().scale(re(0.5)));
        number.add_term(p.mul(&q).scale(I * 0.5));
    }
    let nw = number.apply(w.as_slice());
    let kk = re(k as f64);
    let number_residual = nw
        .iter()
        .zip(w.as_slice())
        .map(|(a, b)| (a - kk * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    EmbeddingReport {
        number_residual,
        lambda_norm: lambda_norm(&w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn haar_is_special_orthogonal() {
        let mut g = rng();
        for n in [2, 4, 6, 8] {
            let r = haar_so(n, &mut g).unwrap();
            assert!(r.orthogonality_defect() < 1e-12);
            assert!((r.r.determinant() - 1.0).abs() < 1e-10);
        }
        assert!(haar_so(3, &mut g).is_err());
    }

    #[test]
    fn identity_blocks() {
        let b = bogoliubov_blocks(&OrthogonalPoint::identity(4));
        assert_eq!(b.a, DMatrix::identity(2, 2));
        assert_eq!(b.b, DMatrix::zeros(2, 2));
    }

    #[test]
    fn k1_rotation_is_a_phase() {
        // SO(2) rotation: A = e^{±iθ}, B = 0
        let t = 0.37f64;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let b = bogoliubov_blocks(&OrthogonalPoint { r, det_sign: 1 });
        assert!((b.a[(0, 0)] - C64::from_polar(1.0, t)).norm() < 1e-15);
        assert!(b.b[(0, 0)].norm() < 1e-15);
        assert!((omega_sq(Overlap::E, &b) - C64::from_polar(1.0, t)).norm() < 1e-15);
    }

    #[test]
    fn k2_odd_plane_rotation() {
        // rotation in the (γ¹, γ³) plane: A = (rot + 1)/2, B = (rot − 1)/2
        let t = 0.9f64;
        let mut r = DMatrix::<f64>::identity(4, 4);
        r[(0, 0)] = t.cos();
        r[(0, 1)] = -t.sin();
        r[(1, 0)] = t.sin();
        r[(1, 1)] = t.cos();
        let b = bogoliubov_blocks(&OrthogonalPoint { r, det_sign: 1 });
        assert!(b.constraint_residual() < 1e-14);
        let oe = omega_sq(Overlap::E, &b);
        assert!((oe - re((t / 2.0).cos().powi(2))).norm() < 1e-14);
    }

    #[test]
    fn c_matrix_power() {
        for k in 1..=6 {
            let c = c_matrix(k);
            let mut p = DMatrix::<f64>::identity(k, k);
            for _ in 0..k {
                p = &p * &c;
            }
            assert_eq!(p, -DMatrix::<f64>::identity(k, k));
        }
        let e1 = eta_blocks(1);
        assert_eq!(e1.a[(0, 0)], re(1.0));
        assert_eq!(e1.b[(0, 0)], re(0.0));
    }

    #[test]
    fn boundary_blocks_satisfy_constraints() {
        for k in 1..=5 {
            assert!(eta_blocks(k).constraint_residual() < 1e-14);
            assert!(zero_blocks(k).constraint_residual() < 1e-14);
        }
        let z = zero_blocks(1);
        let h = re(0.5);
        assert_eq!(z.a, DMatrix::from_row_slice(2, 2, &[h, h * I, -h * I, -h]));
        assert_eq!(z.b, DMatrix::from_row_slice(2, 2, &[h, h * I, h * I, h]));
    }

    #[test]
    fn normalizations() {
        for k in 1..=4 {
            let id = bogoliubov_blocks(&OrthogonalPoint::identity(2 * k));
            assert!((omega_sq(Overlap::E, &id) - re(1.0)).norm() < 1e-12);
            assert!((omega_sq(Overlap::Eta, &id) - re(2f64.powi(1 - k as i32))).norm() < 1e-12);
            assert!((omega_sq(Overlap::Zero, &id) - re(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn thouless_annihilation_and_overlaps() {
        let mut g = rng();
        for k in [2usize, 3] {
            for _ in 0..20 {
                let b = bogoliubov_blocks(&haar_so(2 * k, &mut g).unwrap());
                assert!(b.constraint_residual() < 1e-10);
                let z = z_matrix(&b).unwrap();
                assert!(z.antisymmetry_defect() < 1e-10);
                let v = thouless_from_z(&z);
                assert!((v.norm() - 1.0).abs() < 1e-12);
                assert!(annihilation_residual(&b, &v) < 1e-10);
                let zz = DMatrix::<C64>::identity(k, k) + &z.z * z.z.adjoint();
                let vac = zz.determinant().re.powf(-0.25);
                assert!((v.amplitudes[0] - re(vac)).norm() < 1e-10);
                assert!(
                    (v.amplitudes[0].norm_sqr() - omega_sq(Overlap::E, &b).norm()).abs() < 1e-10
                );
            }
        }
    }

    #[test]
    fn coherent_state_overlaps() {
        let mut g = rng();
        for k in [2usize, 3] {
            // reference U_{R_η}|e⟩ in the composition convention
            let eta_ref = thouless_state(&inverse_blocks(&eta_blocks(k))).unwrap();
            for _ in 0..20 {
                let r = haar_so(2 * k, &mut g).unwrap();
                let b = bogoliubov_blocks(&r);
                let v = coherent_state(&r).unwrap();
                assert!(
                    (v.amplitudes[0].norm_sqr() - omega_sq(Overlap::E, &b).norm()).abs() < 1e-10
                );
                let o = eta_ref.inner(&v).norm_sqr();
                assert!((o - omega_sq(Overlap::Eta, &b).norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn stabilizer_eta_is_the_transposed_reference_at_k2() {
        // at k = 2 the two readings of (A_η, B_η) give the two even pairing states
        let stab = boundary_state(Overlap::Eta, 2).unwrap();
        let other = thouless_state(&inverse_blocks(&eta_blocks(2))).unwrap();
        assert!(stab.inner(&other).norm() < 1e-12);
        assert!(
            (boundary_state(Overlap::E, 2)
                .unwrap()
                .inner(&other)
                .norm_sqr()
                - 0.5)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn stabilizer_boundary_states_match_blocks() {
        for k in 1..=4 {
            let e = boundary_state(Overlap::E, k).unwrap();
            assert!((e.amplitudes[0] - re(1.0)).norm() < 1e-12);
            let eta = boundary_state(Overlap::Eta, k).unwrap();
            let from_blocks = thouless_state(&eta_blocks(k)).unwrap();
            assert!((eta.amplitudes.clone() - from_blocks.amplitudes).norm() < 1e-12);
            assert!((e.inner(&eta).norm_sqr() - 2f64.powi(1 - k as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_overlap() {
        let mut g = rng();
        for k in [2usize, 3] {
            let phi0 = thouless_state(&zero_blocks(k)).unwrap();
            for _ in 0..10 {
                let r = haar_so(2 * k, &mut g).unwrap();
                let v = coherent_state(&r).unwrap();
                let o = phi0.inner(&v.kron(&v)).norm_sqr() * 2f64.powi(k as i32);
                assert!((o - omega_sq(Overlap::Zero, &bogoliubov_blocks(&r)).norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lambda_gaussianity() {
        let mut g = rng();
        let e = boundary_state(Overlap::E, 2).unwrap();
        assert!(lambda_norm(&e) < 1e-12);
        for _ in 0..20 {
            let v = thouless_state(&bogoliubov_blocks(&haar_so(4, &mut g).unwrap())).unwrap();
            assert!(lambda_norm(&v) < 1e-10);
        }
        let s = re(1.0 / 3f64.sqrt());
        let w = PureState::new(DVector::from_vec(vec![s, s, re(0.0), s]), None).unwrap();
        assert!(lambda_norm(&w) > 0.1);
        assert!(lambda_op(3).is_err());
    }

    #[test]
    fn embedding() {
        let mut g = rng();
        let e = boundary_state(Overlap::E, 2).unwrap();
        assert!(embedding_check(&e).passes(1e-12));
        for _ in 0..10 {
            let v = thouless_state(&bogoliubov_blocks(&haar_so(4, &mut g).unwrap())).unwrap();
            assert!(embedding_check(&v).passes(1e-10));
            let odd = PureState {
                amplitudes: DVector::from_vec(local_majorana(1, 2).apply(v.as_slice())),
                ..v
            };
            assert!(lambda_norm(&odd) < 1e-10);
            assert!(embedding_check(&odd).passes(1e-10));
        }
    }
}
