//! Replicated Liouvillians, effective Hamiltonians P^(k), certified kernels and
//! the structural checks on them.

pub use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::fock::{
    chirality_pauli, klein_mode_pauli, majorana_site_mode, replica_complex_mode_pauli,
    replica_mode_pauli, replica_parity_pauli, FockLayout, FockOperator, PureState, SiteBasis,
};
use crate::liealg::commutant_dim;
use crate::linalg::{components, diff_norm, hermitian_eigen, max_abs, stack_columns};
use crate::pauli::{Pauli, PauliSum, C64, I};
use nalgebra::{DMatrix, DVector};

pub const DEFAULT_QUBIT_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermId {
    Mg,
    SOnSite,
    RHop,
    CHop,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn has_bond(ens: &EnsembleSpec, i: usize, j: usize) -> bool {
    ens.bonds
        .iter()
        .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
}

/// Symbolic replicated adjoint operator of one Hamiltonian term. For `SOnSite`
/// only `i` is used.
pub fn liouvillian_pauli(
    ens: &EnsembleSpec,
    term: TermId,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<PauliSum> {
    let lay = ens.layout(k, l)?;
    let majorana = ens.kind.is_majorana();
    match (majorana, term) {
        (true, TermId::Mg) | (false, TermId::SOnSite | TermId::RHop | TermId::CHop) => {}
        _ => {
            return Err(Error::Argument(format!(
                "term {term:?} does not belong to {}",
                ens.kind.name()
            )))
        }
    }
    if term != TermId::SOnSite && !has_bond(ens, i, j) {
        return Err(Error::Argument(format!(
            "({i},{j}) is not a bond of the ensemble"
        )));
    }
    if term == TermId::SOnSite && (i == 0 || i > l) {
        return Err(Error::Range(format!("site {i}")));
    }
    let mut out = PauliSum::zero();
    for a in 1..=lay.n_replicas {
        for alpha in 1..=lay.n_flavors {
            match term {
                TermId::Mg => {
                    let gi = klein_mode_pauli(majorana_site_mode(i, alpha, &lay), a, &lay)?;
                    let gj = klein_mode_pauli(majorana_site_mode(j, alpha, &lay), a, &lay)?;
                    out.add_term(gi.mul(&gj).scale(I));
                }
                TermId::SOnSite => {
                    let (c, cd) = replica_complex_mode_pauli(i, alpha, a, &lay)?;
                    out.add(&cd.mul(&c));
                    out.add_term(Pauli::identity().scale(re(-0.5)));
                }
                TermId::RHop | TermId::CHop => {
                    let (ci, cdi) = replica_complex_mode_pauli(i, alpha, a, &lay)?;
                    let (cj, cdj) = replica_complex_mode_pauli(j, alpha, a, &lay)?;
                    let w = if term == TermId::RHop { re(1.0) } else { I };
                    out.add_scaled(&cdi.mul(&cj), w);
                    out.add_scaled(&cdj.mul(&ci), w.conj());
                }
            }
        }
    }
    out.prune();
    Ok(out)
}

pub fn liouvillian(
    ens: &EnsembleSpec,
    term: TermId,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<FockOperator> {
    let lay = ens.layout(k, l)?;
    let p = liouvillian_pauli(ens, term, i, j, k, l)?;
    Ok(FockOperator::from_pauli(
        &p,
        lay.n_qubits(),
        Some(lay),
        true,
    ))
}

/// Σ over bonds of the squared bond Liouvillians (single bond `P_ij`).
pub fn bond_term_pauli(
    ens: &EnsembleSpec,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<PauliSum> {
    let mut out = PauliSum::zero();
    if ens.kind.is_majorana() {
        let x = liouvillian_pauli(ens, TermId::Mg, i, j, k, l)?;
        out.add(&x.mul(&x));
    } else {
        for t in [TermId::RHop, TermId::CHop] {
            let x = liouvillian_pauli(ens, t, i, j, k, l)?;
            out.add(&x.mul(&x));
        }
    }
    out.prune();
    Ok(out)
}

pub fn effective_hamiltonian_pauli(ens: &EnsembleSpec, k: usize, l: usize) -> Result<PauliSum> {
    let mut out = PauliSum::zero();
    for &(i, j) in &ens.bonds {
        out.add(&bond_term_pauli(ens, i, j, k, l)?);
    }
    if !ens.kind.is_majorana() {
        for i in 1..=l {
            let s = liouvillian_pauli(ens, TermId::SOnSite, i, i, k, l)?;
            out.add(&s.mul(&s));
        }
    }
    out.prune();
    Ok(out)
}

pub fn effective_hamiltonian(ens: &EnsembleSpec, k: usize, l: usize) -> Result<FockOperator> {
    effective_hamiltonian_capped(ens, k, l, DEFAULT_QUBIT_CAP)
}

pub fn effective_hamiltonian_capped(
    ens: &EnsembleSpec,
    k: usize,
    l: usize,
    qubit_cap: usize,
) -> Result<FockOperator> {
    let lay = ens.layout(k, l)?;
    if lay.n_qubits() > qubit_cap {
        return Err(Error::Resource(format!(
            "{} qubits exceeds cap {qubit_cap}",
            lay.n_qubits()
        )));
    }
    let p = effective_hamiltonian_pauli(ens, k, l)?;
    Ok(FockOperator::from_pauli(
        &p,
        lay.n_qubits(),
        Some(lay),
        true,
    ))
}

/// Numerical kernel certification rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPolicy {
    /// τ = dim · ε · ‖P‖₂ · tau_scale
    pub tau_scale: f64,
    pub min_gap_ratio: f64,
}

impl Default for KernelPolicy {
    fn default() -> Self {
        KernelPolicy {
            tau_scale: 1e2,
            min_gap_ratio: 1e3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSplit {
    pub zero_cluster: Vec<f64>,
    pub first_excited: Option<f64>,
    /// Infinite when the whole spectrum is zero.
    pub gap_ratio: f64,
    pub tau: f64,
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
}

impl SpectrumSplit {
    pub fn is_degenerate(&self) -> bool {
        self.first_excited.is_none()
    }
}

/// Orthonormal basis of the certified zero eigenspace of a Hermitian PSD operator.
///
/// The matrix is first split into the connected components of its sparsity
/// graph; each block is diagonalized separately and the spectra are merged.
pub fn kernel_basis(
    p: &FockOperator,
    policy: KernelPolicy,
) -> Result<(Vec<PureState>, SpectrumSplit)> {
    let dim = p.dim();
    let mut eigen: Vec<(f64, Vec<usize>, DVector<C64>)> = Vec::new();
    for comp in components(&p.matrix) {
        let n = comp.len();
        let block = DMatrix::from_fn(n, n, |r, c| p.matrix[(comp[r], comp[c])]);
        let (vals, vecs) = hermitian_eigen(block);
        for (c, v) in vals.into_iter().enumerate() {
            eigen.push((v, comp.clone(), vecs.column(c).into_owned()));
        }
    }
    let norm = eigen.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
    let tau = dim as f64 * f64::EPSILON * norm * policy.tau_scale;
    let min_eigenvalue = eigen.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let zero_cluster: Vec<f64> = eigen.iter().filter(|e| e.0 <= tau).map(|e| e.0).collect();
    let first_excited = eigen
        .iter()
        .filter(|e| e.0 > tau)
        .map(|e| e.0)
        .reduce(f64::min);
    let floor = f64::EPSILON * norm.max(1.0);
    let zmax = zero_cluster.iter().map(|z| z.abs()).fold(floor, f64::max);
    let gap_ratio = match first_excited {
        Some(f) => f / zmax,
        None => f64::INFINITY,
    };
    let split = SpectrumSplit {
        zero_cluster,
        first_excited,
        gap_ratio,
        tau,
        min_eigenvalue,
        spectral_norm: norm,
    };
    if gap_ratio < policy.min_gap_ratio {
        return Err(Error::AmbiguousKernel {
            gap_ratio,
            required: policy.min_gap_ratio,
        });
    }
    let vectors = eigen
        .into_iter()
        .filter(|e| e.0 <= tau)
        .map(|(_, comp, v)| {
            let mut a = DVector::zeros(dim);
            for (r, &idx) in comp.iter().enumerate() {
                a[idx] = v[r];
            }
            PureState {
                amplitudes: a,
                n_qubits: p.n_qubits,
                layout: p.layout,
            }
        })
        .collect();
    Ok((vectors, split))
}

#[derive(Clone, Debug)]
pub struct Kernel {
    pub vectors: Vec<PureState>,
    pub split: SpectrumSplit,
    pub layout: FockLayout,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let vs: Vec<DVector<C64>> = self.vectors.iter().map(|v| v.amplitudes.clone()).collect();
        stack_columns(&vs, self.layout.dim())
    }
}

/// Kernel of P^(k) for the ensemble; MG* additionally applies the parity-gate restriction.
pub fn commutant_basis(
    ens: &EnsembleSpec,
    k: usize,
    l: usize,
    policy: KernelPolicy,
) -> Result<Kernel> {
    commutant_basis_capped(ens, k, l, policy, DEFAULT_QUBIT_CAP)
}

pub fn commutant_basis_capped(
    ens: &EnsembleSpec,
    k: usize,
    l: usize,
    policy: KernelPolicy,
    qubit_cap: usize,
) -> Result<Kernel> {
    let lay = ens.layout(k, l)?;
    let p = effective_hamiltonian_capped(ens, k, l, qubit_cap)?;
    let (vectors, split) = kernel_basis(&p, policy)?;
    drop(p);
    let vectors = if ens.kind == EnsembleKind::MgStar {
        mgstar_restrict(&vectors, k, l)?
    } else {
        vectors
    };
    Ok(Kernel {
        vectors,
        split,
        layout: lay,
    })
}

/// (Q ⊗ Q*)^{⊗k} with Q = γ₁, i.e. ∏_a γ̃_1^a.
pub fn mgstar_gate_pauli(layout: &FockLayout) -> Result<Pauli> {
    let mut g = Pauli::identity();
    for a in 1..=layout.n_replicas {
        g = g.mul(&replica_mode_pauli(1, a, layout)?);
    }
    Ok(g)
}

/// W_k = ∏_{a odd} exp(iπ/4 Γ̃^a).
pub fn w_k_pauli(layout: &FockLayout) -> Result<PauliSum> {
    let s = re(std::f64::consts::FRAC_1_SQRT_2);
    let mut w = PauliSum::scalar(re(1.0));
    for a in (1..=layout.n_replicas).step_by(2) {
        let mut f = PauliSum::scalar(s);
        f.add_term(replica_parity_pauli(a, layout)?.scale(I * s));
        w = w.mul(&f);
    }
    Ok(w)
}

/// Compress a Hermitian operator onto an orthonormal set and diagonalize it.
fn compress_eigen(
    vectors: &[PureState],
    apply: impl Fn(&[C64]) -> Vec<C64>,
) -> (Vec<f64>, DMatrix<C64>, Vec<Vec<C64>>) {
    let images: Vec<Vec<C64>> = vectors.iter().map(|v| apply(v.as_slice())).collect();
    let n = vectors.len();
    let m = DMatrix::from_fn(n, n, |r, c| {
        vectors[r]
            .as_slice()
            .iter()
            .zip(&images[c])
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
    });
    let m = (&m + m.adjoint()) * re(0.5);
    let (vals, vecs) = hermitian_eigen(m);
    (vals, vecs, images)
}

fn combine(vectors: &[PureState], coeffs: nalgebra::DVectorView<C64>) -> PureState {
    let mut a = DVector::zeros(vectors[0].amplitudes.len());
    for (v, &c) in vectors.iter().zip(coeffs.iter()) {
        a.axpy(c, &v.amplitudes, re(1.0));
    }
    PureState {
        amplitudes: a,
        n_qubits: vectors[0].n_qubits,
        layout: vectors[0].layout,
    }
}

/// +1 eigenspace of the MG* gate inside an MG kernel.
pub fn mgstar_restrict(kernel: &[PureState], k: usize, l: usize) -> Result<Vec<PureState>> {
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let lay = FockLayout::majorana(k, l)?;
    let g = mgstar_gate_pauli(&lay)?;
    let (vals, vecs, _) = compress_eigen(kernel, |v| g.apply(v));
    if let Some(bad) = vals.iter().find(|&&e| (e.abs() - 1.0).abs() > 1e-8) {
        return Err(Error::Consistency(format!(
            "gate eigenvalue {bad} on the kernel is not ±1"
        )));
    }
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(c, _)| combine(kernel, vecs.column(c)))
        .collect())
}

/// Kernel vectors resolved by the chirality Γ̄₁, with the largest deviation from
/// Γ̄_i v = s v over all sites i.
pub fn chirality_sectors(
    kernel: &[PureState],
    layout: &FockLayout,
) -> Result<(Vec<(PureState, i8)>, f64)> {
    if kernel.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let c1 = chirality_pauli(1, layout)?;
    let (vals, vecs, _) = compress_eigen(kernel, |v| c1.apply(v));
    let mut out = Vec::new();
    let mut dev: f64 = 0.0;
    for (c, &e) in vals.iter().enumerate() {
        let s: i8 = if e > 0.0 { 1 } else { -1 };
        let v = combine(kernel, vecs.column(c));
        for i in 1..=layout.n_sites() {
            let ci = chirality_pauli(i, layout)?;
            let w = ci.apply(v.as_slice());
            let sv: Vec<C64> = v.as_slice().iter().map(|a| a * re(s as f64)).collect();
            dev = dev.max(diff_norm(&w, &sv));
        }
        out.push((v, s));
    }
    Ok((out, dev))
}

/// ‖P_ij − (c₀ − c₁ C_ij)‖_max; for NC restricted to the half-filled sector of i and j.
pub fn casimir_identity_residual(
    ens: &EnsembleSpec,
    k: usize,
    l: usize,
    bond: (usize, usize),
) -> Result<f64> {
    let (i, j) = bond;
    if ens.n_flavors != 1 {
        return Err(Error::Argument(
            "Casimir identities are checked for N = 1".into(),
        ));
    }
    let lay = ens.layout(k, l)?;
    let n = lay.n_qubits();
    let pij = bond_term_pauli(ens, i, j, k, l)?;
    let kk = k as f64;
    if ens.kind.is_majorana() {
        let site = |s: usize| -> Result<Vec<Pauli>> {
            (1..=2 * k).map(|a| klein_mode_pauli(s, a, &lay)).collect()
        };
        let (gi, gj) = (site(i)?, site(j)?);
        let mut c = PauliSum::zero();
        for a in 0..2 * k {
            for b in (a + 1)..2 * k {
                // J^{ab} = -(i/2) γ^a γ^b on each site
                let mut jab = PauliSum::zero();
                jab.add_term(gi[a].mul(&gi[b]).scale(-I * 0.5));
                jab.add_term(gj[a].mul(&gj[b]).scale(-I * 0.5));
                c.add(&jab.mul(&jab));
            }
        }
        let mut d = pij;
        d.add_term(Pauli::identity().scale(re(-4.0 * kk * kk)));
        d.add_scaled(&c, re(4.0));
        d.prune();
        Ok(max_abs(&d.to_dense(n)))
    } else {
        let modes = |s: usize| -> Result<Vec<(PauliSum, PauliSum)>> {
            (1..=2 * k)
                .map(|a| replica_complex_mode_pauli(s, 1, a, &lay))
                .collect()
        };
        let (mi, mj) = (modes(i)?, modes(j)?);
        let s_ab = |a: usize, b: usize| -> PauliSum {
            let mut s = mi[a].1.mul(&mi[b].0);
            s.add(&mj[a].1.mul(&mj[b].0));
            if a == b {
                s.add_term(Pauli::identity().scale(re(-1.0)));
            }
            s
        };
        let mut c = PauliSum::zero();
        for a in 0..2 * k {
            for b in 0..2 * k {
                c.add(&s_ab(a, b).mul(&s_ab(b, a)));
            }
        }
        let mut d = pij;
        d.add_term(Pauli::identity().scale(re(-4.0 * kk * (kk + 1.0))));
        d.add_scaled(&c, re(2.0));
        d.prune();
        let number = |m: &[(PauliSum, PauliSum)]| {
            let mut s = PauliSum::zero();
            for (c, cd) in m {
                s.add(&cd.mul(c));
            }
            s
        };
        let (ni, nj) = (number(&mi), number(&mj));
        let dim = lay.dim();
        let diag = |op: &PauliSum| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for p in op.iter() {
                debug_assert_eq!(p.x, 0);
                for (b, o) in out.iter_mut().enumerate() {
                    let s = if (p.z & b as u64).count_ones() % 2 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    *o += s * p.coeff.re;
                }
            }
            out
        };
        let (di, dj) = (diag(&ni), diag(&nj));
        let hf: Vec<usize> = (0..dim)
            .filter(|&b| (di[b] - kk).abs() < 1e-9 && (dj[b] - kk).abs() < 1e-9)
            .collect();
        let dm = d.to_dense(n);
        let mut r: f64 = 0.0;
        for &a in &hf {
            for &b in &hf {
                r = r.max(dm[(a, b)].norm());
            }
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub max_residual: f64,
    pub n_vectors: usize,
    pub n_transpositions: usize,
}

/// Max over kernel vectors and site transpositions of ‖Σ_ij v − v‖.
pub fn lemma1_check(kernel: &[PureState], layout: &FockLayout) -> Result<Lemma1Report> {
    let basis = SiteBasis::new(layout)?;
    let ns = basis.n_sites();
    let mut max_residual: f64 = 0.0;
    let mut n_transpositions = 0;
    for i in 0..ns {
        for j in (i + 1)..ns {
            let sw = basis.swap(i, j)?;
            n_transpositions += 1;
            for v in kernel {
                max_residual = max_residual.max(diff_norm(&sw.apply(v.as_slice()), v.as_slice()));
            }
        }
    }
    Ok(Lemma1Report {
        max_residual,
        n_vectors: kernel.len(),
        n_transpositions,
    })
}

/// Sines of the principal angles between the spans of two orthonormal column sets.
pub fn principal_angle_sines(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Vec<f64> {
    let resid = b - a * (a.adjoint() * b);
    let mut s: Vec<f64> = resid
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlavorCase {
    pub majorana: bool,
    pub k: usize,
    pub n_flavors: usize,
    pub l: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlavorReport {
    pub case: FlavorCase,
    pub flavored_dim: usize,
    pub plain_dim: usize,
}

impl FlavorReport {
    pub fn matches(&self) -> bool {
        self.flavored_dim == self.plain_dim
    }
}

/// Kernel dimension of the N-flavored P^(k) against the plain P^(kN).
pub fn flavor_equivalence(cases: &[FlavorCase]) -> Result<Vec<FlavorReport>> {
    let policy = KernelPolicy::default();
    cases
        .iter()
        .map(|&case| {
            let (plain, flav) = if case.majorana {
                (EnsembleKind::Mg, EnsembleKind::MgFlavored)
            } else {
                (EnsembleKind::Nc, EnsembleKind::NcFlavored)
            };
            let fk = if case.n_flavors == 1 { plain } else { flav };
            let fe = EnsembleSpec::chain(fk, case.n_flavors, case.l)?;
            let pe = EnsembleSpec::chain(plain, 1, case.l)?;
            let flavored_dim = commutant_basis(&fe, case.k, case.l, policy)?.dim();
            let plain_dim = commutant_basis(&pe, case.k * case.n_flavors, case.l, policy)?.dim();
            Ok(FlavorReport {
                case,
                flavored_dim,
                plain_dim,
            })
        })
        .collect()
}

/// ED kernel dimension next to the closed form.
pub fn dimension_check(ens: &EnsembleSpec, k: usize, l: usize) -> Result<(usize, usize)> {
    let formula = commutant_dim(ens, k, l)?;
    let formula: usize = formula
        .try_into()
        .map_err(|_| Error::Resource("dimension overflow".into()))?;
    let ed = commutant_basis(ens, k, l, KernelPolicy::default())?.dim();
    Ok((formula, ed))
}
