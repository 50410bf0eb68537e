//! Replicated fermionic Fock spaces: Jordan-Wigner Majoranas, conjugated replica
//! copies, Klein-dressed modes, chirality and site permutations.

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::pauli::{Pauli, PauliSum, C64, I};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Human-readable statement of the fixed qubit ordering.
pub const QUBIT_ORDER: &str =
    "replica-major; within a replica mode-major (site, then flavor); qubit 0 is the most significant bit";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// 2L Majorana sites per replica, two Majoranas share a qubit.
    Majorana,
    /// L complex fermion sites per replica, one qubit each.
    ComplexFermion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockLayout {
    pub n_phys_sites: usize,
    pub n_replicas: usize,
    pub n_flavors: usize,
    pub mode_kind: ModeKind,
}

impl FockLayout {
    pub fn new(
        n_phys_sites: usize,
        n_replicas: usize,
        n_flavors: usize,
        mode_kind: ModeKind,
    ) -> Result<Self> {
        if n_phys_sites == 0 || n_flavors == 0 {
            return Err(Error::Argument(
                "site and flavor counts must be positive".into(),
            ));
        }
        if n_replicas < 2 || n_replicas % 2 != 0 {
            return Err(Error::Argument(format!(
                "replica count {n_replicas} must be even and >= 2"
            )));
        }
        let l = FockLayout {
            n_phys_sites,
            n_replicas,
            n_flavors,
            mode_kind,
        };
        if l.n_qubits() > 62 {
            return Err(Error::Resource(format!("{} qubits", l.n_qubits())));
        }
        Ok(l)
    }

    pub fn majorana(k: usize, l: usize) -> Result<Self> {
        Self::new(l, 2 * k, 1, ModeKind::Majorana)
    }

    pub fn complex(k: usize, l: usize) -> Result<Self> {
        Self::new(l, 2 * k, 1, ModeKind::ComplexFermion)
    }

    pub fn k(&self) -> usize {
        self.n_replicas / 2
    }

    pub fn qubits_per_replica(&self) -> usize {
        self.n_phys_sites * self.n_flavors
    }

    pub fn majoranas_per_replica(&self) -> usize {
        2 * self.qubits_per_replica()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_replicas * self.qubits_per_replica()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    /// Sites entering bonds and permutations: 2L Majorana sites or L complex sites.
    pub fn n_sites(&self) -> usize {
        match self.mode_kind {
            ModeKind::Majorana => 2 * self.n_phys_sites,
            ModeKind::ComplexFermion => self.n_phys_sites,
        }
    }

    pub fn qubit_order(&self) -> &'static str {
        QUBIT_ORDER
    }
}

#[derive(Clone, Debug)]
pub struct FockOperator {
    pub matrix: DMatrix<C64>,
    pub n_qubits: usize,
    /// `None` for single-copy (unreplicated) operators.
    pub layout: Option<FockLayout>,
    pub hermitian_hint: bool,
}

impl FockOperator {
    pub fn from_pauli(
        op: &PauliSum,
        n_qubits: usize,
        layout: Option<FockLayout>,
        hermitian_hint: bool,
    ) -> Self {
        FockOperator {
            matrix: op.to_dense(n_qubits),
            n_qubits,
            layout,
            hermitian_hint,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn apply(&self, v: &PureState) -> PureState {
        PureState {
            amplitudes: &self.matrix * &v.amplitudes,
            n_qubits: v.n_qubits,
            layout: v.layout,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub amplitudes: DVector<C64>,
    pub n_qubits: usize,
    pub layout: Option<FockLayout>,
}

impl PureState {
    pub fn new(amplitudes: DVector<C64>, layout: Option<FockLayout>) -> Result<Self> {
        let n = amplitudes.len();
        if !n.is_power_of_two() {
            return Err(Error::Argument(format!(
                "state length {n} is not a power of two"
            )));
        }
        let n_qubits = n.trailing_zeros() as usize;
        if let Some(l) = layout {
            if l.n_qubits() != n_qubits {
                return Err(Error::Argument("state length does not match layout".into()));
            }
        }
        Ok(PureState {
            amplitudes,
            n_qubits,
            layout,
        })
    }

    pub fn basis(index: usize, n_qubits: usize) -> Self {
        let mut a = DVector::zeros(1 << n_qubits);
        a[index] = C64::new(1.0, 0.0);
        PureState {
            amplitudes: a,
            n_qubits,
            layout: None,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes /= C64::new(n, 0.0);
        self
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    /// Plain Kronecker product; `self` occupies the leading qubits.
    pub fn kron(&self, other: &PureState) -> PureState {
        let a = &self.amplitudes;
        let b = &other.amplitudes;
        let mut out = DVector::zeros(a.len() * b.len());
        for i in 0..a.len() {
            for j in 0..b.len() {
                out[i * b.len() + j] = a[i] * b[j];
            }
        }
        PureState {
            amplitudes: out,
            n_qubits: self.n_qubits + other.n_qubits,
            layout: None,
        }
    }
}

/// Jordan-Wigner Majorana `mu` (0-based) of a register starting at qubit `offset`.
pub fn jw_majorana(mu: usize, offset: usize, n_qubits: usize) -> Pauli {
    let q = offset + mu / 2;
    let mut p = if mu % 2 == 0 {
        Pauli::x(q, n_qubits)
    } else {
        Pauli::y(q, n_qubits)
    };
    for r in offset..q {
        p.z |= crate::pauli::qubit_bit(r, n_qubits);
    }
    // Z strings sit to the left of X/Y on distinct qubits, so no reordering sign.
    p
}

pub fn majorana_pauli(i: usize, l: usize) -> Result<Pauli> {
    if i == 0 || i > 2 * l {
        return Err(Error::Range(format!(
            "Majorana index {i} not in 1..={}",
            2 * l
        )));
    }
    Ok(jw_majorana(i - 1, 0, l))
}

/// γ_i on L qubits.
pub fn majorana(i: usize, l: usize) -> Result<FockOperator> {
    Ok(FockOperator::from_pauli(
        &majorana_pauli(i, l)?.into(),
        l,
        None,
        true,
    ))
}

/// (c_i, c_i†) on L qubits, c_i = (γ_{2i-1} + iγ_{2i})/2.
pub fn complex_modes_pauli(i: usize, l: usize) -> Result<(PauliSum, PauliSum)> {
    if i == 0 || i > l {
        return Err(Error::Range(format!("site {i} not in 1..={l}")));
    }
    let p = jw_majorana(2 * i - 2, 0, l);
    let q = jw_majorana(2 * i - 1, 0, l);
    Ok(pair_to_mode(p, q))
}

pub fn complex_modes(i: usize, l: usize) -> Result<(FockOperator, FockOperator)> {
    let (c, cd) = complex_modes_pauli(i, l)?;
    Ok((
        FockOperator::from_pauli(&c, l, None, false),
        FockOperator::from_pauli(&cd, l, None, false),
    ))
}

/// (p + iq)/2 and its adjoint (p - iq)/2.
pub fn pair_to_mode(p: Pauli, q: Pauli) -> (PauliSum, PauliSum) {
    let h = C64::new(0.5, 0.0);
    let mut c = PauliSum::zero();
    c.add_term(p.scale(h));
    c.add_term(q.scale(I * h));
    let mut cd = PauliSum::zero();
    cd.add_term(p.scale(h));
    cd.add_term(q.scale(-I * h));
    (c, cd)
}

fn check_replica(a: usize, layout: &FockLayout) -> Result<()> {
    if a == 0 || a > layout.n_replicas {
        return Err(Error::Range(format!(
            "replica {a} not in 1..={}",
            layout.n_replicas
        )));
    }
    Ok(())
}

/// γ̃_mu^a: Majorana `mu` (1-based, 1..=2LN) of replica `a`, conjugated on even replicas.
pub fn replica_mode_pauli(mu: usize, a: usize, layout: &FockLayout) -> Result<Pauli> {
    check_replica(a, layout)?;
    let m = layout.majoranas_per_replica();
    if mu == 0 || mu > m {
        return Err(Error::Range(format!("mode {mu} not in 1..={m}")));
    }
    let p = jw_majorana(
        mu - 1,
        (a - 1) * layout.qubits_per_replica(),
        layout.n_qubits(),
    );
    Ok(if a % 2 == 0 { p.conj() } else { p })
}

pub fn replica_mode(mu: usize, a: usize, layout: &FockLayout) -> Result<FockOperator> {
    let p = replica_mode_pauli(mu, a, layout)?;
    Ok(FockOperator::from_pauli(
        &p.into(),
        layout.n_qubits(),
        Some(*layout),
        true,
    ))
}

/// Γ̃^b = (-i)^{LN} ∏_mu γ̃_mu^b.
pub fn replica_parity_pauli(b: usize, layout: &FockLayout) -> Result<Pauli> {
    check_replica(b, layout)?;
    let m = layout.majoranas_per_replica();
    let mut p = Pauli::identity();
    for mu in 1..=m {
        p = p.mul(&replica_mode_pauli(mu, b, layout)?);
    }
    Ok(p.scale((-I).powu((m / 2) as u32)))
}

/// γ̄_mu^a = (∏_{b<a} Γ̃^b) γ̃_mu^a.
pub fn klein_mode_pauli(mu: usize, a: usize, layout: &FockLayout) -> Result<Pauli> {
    let g = replica_mode_pauli(mu, a, layout)?;
    let mut p = Pauli::identity();
    for b in 1..a {
        p = p.mul(&replica_parity_pauli(b, layout)?);
    }
    Ok(p.mul(&g))
}

pub fn klein_mode(mu: usize, a: usize, layout: &FockLayout) -> Result<FockOperator> {
    let p = klein_mode_pauli(mu, a, layout)?;
    Ok(FockOperator::from_pauli(
        &p.into(),
        layout.n_qubits(),
        Some(*layout),
        true,
    ))
}

/// Replica-mode index (1-based) of flavor `alpha` on Majorana site `i`.
pub fn majorana_site_mode(i: usize, alpha: usize, layout: &FockLayout) -> usize {
    (i - 1) * layout.n_flavors + alpha
}

fn check_site(i: usize, layout: &FockLayout) -> Result<()> {
    if i == 0 || i > layout.n_sites() {
        return Err(Error::Range(format!(
            "site {i} not in 1..={}",
            layout.n_sites()
        )));
    }
    Ok(())
}

/// All dressed Majoranas living on a site, ordered replica-major, then flavor,
/// then (for complex sites) the two Majoranas of each mode.
pub fn site_majoranas(i: usize, layout: &FockLayout) -> Result<Vec<Pauli>> {
    check_site(i, layout)?;
    let mut out = Vec::new();
    for a in 1..=layout.n_replicas {
        for alpha in 1..=layout.n_flavors {
            match layout.mode_kind {
                ModeKind::Majorana => {
                    out.push(klein_mode_pauli(
                        majorana_site_mode(i, alpha, layout),
                        a,
                        layout,
                    )?);
                }
                ModeKind::ComplexFermion => {
                    let q = (i - 1) * layout.n_flavors + alpha;
                    out.push(klein_mode_pauli(2 * q - 1, a, layout)?);
                    out.push(klein_mode_pauli(2 * q, a, layout)?);
                }
            }
        }
    }
    Ok(out)
}

/// Dressed complex mode (c̄, c̄†) of flavor `alpha`, replica `a` on complex site `i`.
pub fn replica_complex_mode_pauli(
    i: usize,
    alpha: usize,
    a: usize,
    layout: &FockLayout,
) -> Result<(PauliSum, PauliSum)> {
    if layout.mode_kind != ModeKind::ComplexFermion {
        return Err(Error::Argument(
            "complex modes need a complex-fermion layout".into(),
        ));
    }
    check_site(i, layout)?;
    if alpha == 0 || alpha > layout.n_flavors {
        return Err(Error::Range(format!("flavor {alpha}")));
    }
    let q = (i - 1) * layout.n_flavors + alpha;
    let p = klein_mode_pauli(2 * q - 1, a, layout)?;
    let r = klein_mode_pauli(2 * q, a, layout)?;
    Ok(pair_to_mode(p, r))
}

/// Γ̄_i = (-i)^{kN} ∏ over the site's dressed Majoranas (Majorana layouts).
pub fn chirality_pauli(i: usize, layout: &FockLayout) -> Result<Pauli> {
    if layout.mode_kind != ModeKind::Majorana {
        return Err(Error::Argument(
            "chirality is defined for Majorana layouts".into(),
        ));
    }
    let ms = site_majoranas(i, layout)?;
    let mut p = Pauli::identity();
    for m in &ms {
        p = p.mul(m);
    }
    Ok(p.scale((-I).powu((ms.len() / 2) as u32)))
}

pub fn chirality(i: usize, layout: &FockLayout) -> Result<FockOperator> {
    let p = chirality_pauli(i, layout)?;
    Ok(FockOperator::from_pauli(
        &p.into(),
        layout.n_qubits(),
        Some(*layout),
        true,
    ))
}

/// Ordered site-major occupation basis of a replicated layout.
///
/// Each site carries complex modes d = (p + iq)/2 built from consecutive pairs of
/// its dressed Majoranas. Basis states are ∏ (d†)^n |Ω⟩ with creation operators
/// in increasing site-major order; |Ω⟩ is the common vacuum with a fixed phase.
/// In this basis the replicated local spaces of different sites form a plain
/// tensor product, which is what site permutations and product states refer to.
#[derive(Clone, Debug)]
pub struct SiteBasis {
    pub layout: FockLayout,
    sites: Vec<Vec<Pauli>>,
    parities: Vec<Pauli>,
    vacuum: Vec<C64>,
}

impl SiteBasis {
    pub fn new(layout: &FockLayout) -> Result<Self> {
        let n = layout.n_qubits();
        let sites: Vec<Vec<Pauli>> = (1..=layout.n_sites())
            .map(|i| site_majoranas(i, layout))
            .collect::<Result<_>>()?;
        let parities = sites
            .iter()
            .map(|ms| {
                ms.chunks(2).fold(Pauli::identity(), |acc, pq| {
                    acc.mul(&pq[0].mul(&pq[1]).scale(-I))
                })
            })
            .collect::<Vec<_>>();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_f0c4);
        let mut v: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let half = C64::new(0.5, 0.0);
        for ms in &sites {
            for pq in ms.chunks(2) {
                // 1 - n = (1 + (-i p q))/2
                let par = pq[0].mul(&pq[1]).scale(-I);
                let w = par.apply(&v);
                for (a, b) in v.iter_mut().zip(w) {
                    *a = (*a + b) * half;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::Consistency("vacuum projection vanished".into()));
        }
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |(bi, bm), (i, c)| {
            if c.norm() > bm + 1e-12 {
                (i, c.norm())
            } else {
                (bi, bm)
            }
        });
        let phase = v[imax].conj() / (v[imax].norm() * norm);
        for a in v.iter_mut() {
            *a *= phase;
        }
        Ok(SiteBasis {
            layout: *layout,
            sites,
            parities,
            vacuum: v,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn modes_per_site(&self) -> usize {
        self.sites[0].len() / 2
    }

    pub fn local_dim(&self) -> usize {
        1 << self.modes_per_site()
    }

    pub fn vacuum(&self) -> &[C64] {
        &self.vacuum
    }

    /// Local parity ∏_m (1 - 2 n_m) of site `i` (0-based).
    pub fn site_parity(&self, i: usize) -> Pauli {
        self.parities[i]
    }

    fn apply_creation(&self, site: usize, m: usize, v: &[C64]) -> Vec<C64> {
        let p = self.sites[site][2 * m];
        let q = self.sites[site][2 * m + 1];
        let h = C64::new(0.5, 0.0);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        p.scale(h).apply_add(v, &mut out);
        q.scale(-I * h).apply_add(v, &mut out);
        out
    }

    /// Apply ∏_m (d_m†)^{n_m} of one site, local index bits with mode 1 most significant.
    fn apply_local(&self, site: usize, n: usize, v: &[C64]) -> Vec<C64> {
        let k = self.modes_per_site();
        let mut w = v.to_vec();
        for m in (0..k).rev() {
            if (n >> (k - 1 - m)) & 1 == 1 {
                w = self.apply_creation(site, m, &w);
            }
        }
        w
    }

    /// Qubit-space image of the site-major product state ⊗_i locals[i].
    pub fn embed_product(&self, locals: &[DVector<C64>]) -> Result<Vec<C64>> {
        if locals.len() != self.n_sites() || locals.iter().any(|v| v.len() != self.local_dim()) {
            return Err(Error::Argument(
                "product state needs one local vector per site".into(),
            ));
        }
        let mut w = self.vacuum.clone();
        for site in (0..self.n_sites()).rev() {
            let mut acc = vec![C64::new(0.0, 0.0); w.len()];
            for (n, &c) in locals[site].iter().enumerate() {
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let t = self.apply_local(site, n, &w);
                for (a, b) in acc.iter_mut().zip(t) {
                    *a += c * b;
                }
            }
            w = acc;
        }
        Ok(w)
    }

    /// Unitary V whose column `n` is the ordered basis state with site-major index n.
    pub fn embedding_matrix(&self) -> DMatrix<C64> {
        let dim = self.layout.dim();
        let ld = self.local_dim();
        let ns = self.n_sites();
        let mut v = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut w = self.vacuum.clone();
            let mut rest = col;
            for site in (0..ns).rev() {
                let n = rest % ld;
                rest /= ld;
                w = self.apply_local(site, n, &w);
            }
            v.set_column(col, &DVector::from_vec(w));
        }
        v
    }

    /// Permutation of sites i and j (0-based) in the ordered basis.
    pub fn swap(&self, i: usize, j: usize) -> Result<SiteSwap> {
        let ns = self.n_sites();
        if i == j {
            return Err(Error::Argument("swap needs two distinct sites".into()));
        }
        if i >= ns || j >= ns {
            return Err(Error::Range(format!("sites {i},{j} with {ns} sites")));
        }
        let (i, j) = (i.min(j), i.max(j));
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let factors: Vec<PauliSum> = self.sites[i]
            .iter()
            .zip(&self.sites[j])
            .map(|(a, b)| {
                let mut f = PauliSum::zero();
                f.add_term(a.scale(s));
                f.add_term(b.scale(-s));
                f
            })
            .collect();
        let pi = PauliSum::from(self.parities[i]);
        let pj = PauliSum::from(self.parities[j]);
        let pm = PauliSum::from(
            ((i + 1)..j).fold(Pauli::identity(), |acc, l| acc.mul(&self.parities[l])),
        );
        let one = PauliSum::scalar(C64::new(1.0, 0.0));
        let pij = pi.mul(&pj);
        // (-1)^{ab} with a, b the site parities
        let mut d1 = one.clone();
        d1.add(&pi);
        d1.add(&pj);
        d1.add_scaled(&pij, C64::new(-1.0, 0.0));
        // (-1)^{(a+b) M} with M the parity strictly between the sites
        let mut d2 = one;
        d2.add(&pm);
        d2.add(&pij);
        d2.add_scaled(&pm.mul(&pij), C64::new(-1.0, 0.0));
        let sign = d1.mul(&d2).scale(C64::new(0.25, 0.0));
        let mut sw = SiteSwap {
            factors,
            sign,
            phase: C64::new(1.0, 0.0),
        };
        let fv = sw.apply_relabel(&self.vacuum);
        let lam: C64 = self.vacuum.iter().zip(&fv).map(|(a, b)| a.conj() * b).sum();
        if (lam.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Consistency(format!(
                "relabelling does not fix the vacuum (|λ|={})",
                lam.norm()
            )));
        }
        sw.phase = lam.conj();
        Ok(sw)
    }
}

/// Site transposition as a product of Pauli factors: phase · F' · D.
#[derive(Clone, Debug)]
pub struct SiteSwap {
    factors: Vec<PauliSum>,
    sign: PauliSum,
    phase: C64,
}

impl SiteSwap {
    fn apply_relabel(&self, v: &[C64]) -> Vec<C64> {
        let mut w = v.to_vec();
        for f in self.factors.iter().rev() {
            w = f.apply(&w);
        }
        w
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let w = self.sign.apply(v);
        let mut w = self.apply_relabel(&w);
        for a in w.iter_mut() {
            *a *= self.phase;
        }
        w
    }

    pub fn to_dense(&self, n_qubits: usize) -> DMatrix<C64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        for c in 0..dim {
            e[c] = C64::new(1.0, 0.0);
            m.set_column(c, &DVector::from_vec(self.apply(&e)));
            e[c] = C64::new(0.0, 0.0);
        }
        m
    }
}

/// Σ_ij as a dense operator; sites are Majorana sites (1..=2L) or complex sites (1..=L).
pub fn site_swap(i: usize, j: usize, layout: &FockLayout) -> Result<FockOperator> {
    if i == j {
        return Err(Error::Argument("swap needs two distinct sites".into()));
    }
    check_site(i, layout)?;
    check_site(j, layout)?;
    let basis = SiteBasis::new(layout)?;
    let sw = basis.swap(i - 1, j - 1)?;
    Ok(FockOperator {
        matrix: sw.to_dense(layout.n_qubits()),
        n_qubits: layout.n_qubits(),
        layout: Some(*layout),
        hermitian_hint: true,
    })
}
