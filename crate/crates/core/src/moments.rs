//! Ensemble averages: exact and Monte Carlo commutant projectors, the
//! Haar-Gaussian purity oracle, averaged k-purities and the saddle-point rate.
//!
//! Every Monte Carlo sample `i` draws from its own ChaCha stream keyed by
//! (master seed, domain) with stream id `i`. Samples are grouped in fixed
//! chunks and chunk results are combined in index order, so estimates are
//! bit-identical for any worker count.

use crate::effham::{commutant_basis, KernelPolicy};
use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::fock::{
    chirality_pauli, replica_parity_pauli, FockLayout, FockOperator, PureState, SiteBasis,
};
use crate::gaussian::{
    bogoliubov_blocks, coherent_state, eta_blocks, haar_so, BogoliubovBlocks, OrthogonalPoint,
};
use crate::liealg::{commutant_dim_kind, Q};
use crate::pauli::{PauliSum, C64};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::Range;

/// Largest L accepted by the oracle (state on L qubits).
pub const ORACLE_SITE_CAP: usize = 10;
/// Largest register for which dense projectors are assembled.
pub const PROJECTOR_QUBIT_CAP: usize = 12;

const CHUNK: usize = 256;
const MAX_REDRAWS: usize = 32;

pub const DOMAIN_ORACLE: u64 = 0x6f72_6163_6c65;
pub const DOMAIN_COHERENT: u64 = 0x636f_6865_7265;
pub const DOMAIN_PROJECTOR: u64 = 0x7072_6f6a_6563;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Oracle,
    CoherentMc,
    ExactK2,
    Saddle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::CoherentMc => "coherent-mc",
            Method::ExactK2 => "exact-k2",
            Method::Saddle => "saddle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Method::Oracle),
            "coherent-mc" | "coherent_mc" => Ok(Method::CoherentMc),
            "exact-k2" | "exact_k2" => Ok(Method::ExactK2),
            "saddle" => Ok(Method::Saddle),
            _ => Err(Error::Argument(format!(
                "unknown method '{s}' (oracle, coherent-mc, exact-k2, saddle)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    /// sample standard deviation / √n
    pub stderr: f64,
    pub imag_mean: f64,
    pub imag_stderr: f64,
    pub n_samples: u64,
    pub master_seed: u64,
    pub method: Method,
}

impl MomentEstimate {
    pub fn exact(value: f64, n_samples: u64, master_seed: u64, method: Method) -> Self {
        MomentEstimate {
            mean: value,
            stderr: 0.0,
            imag_mean: 0.0,
            imag_stderr: 0.0,
            n_samples,
            master_seed,
            method,
        }
    }

    /// |mean − target| ≤ sigmas · stderr (exact estimates compare to 1e-12).
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr + 1e-12
    }
}

/// |a − b| within `sigmas` combined standard errors.
pub fn estimates_agree(a: &MomentEstimate, b: &MomentEstimate, sigmas: f64) -> bool {
    (a.mean - b.mean).abs() <= sigmas * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() + 1e-12
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageCurvePoint {
    pub k: usize,
    pub l: usize,
    pub ell: usize,
    pub estimate: MomentEstimate,
}

/// Random stream of sample `index` within `domain`.
pub fn sample_rng(master_seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

fn map_chunks<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> Result<T> + Sync,
{
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect()
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn mean_stderr(s: f64, s2: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = s / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Average of a complex-valued per-sample function.
fn estimate<F>(n: usize, seed: u64, domain: u64, method: Method, f: F) -> Result<MomentEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<C64> + Sync,
{
    if n == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let chunks = map_chunks(n, |range| {
        let mut acc = [0.0f64; 4];
        for i in range {
            let x = f(&mut sample_rng(seed, domain, i as u64))?;
            acc[0] += x.re;
            acc[1] += x.re * x.re;
            acc[2] += x.im;
            acc[3] += x.im * x.im;
        }
        Ok(acc)
    })?;
    let mut tot = [Compensated::default(); 4];
    for c in &chunks {
        for (t, x) in tot.iter_mut().zip(c) {
            t.add(*x);
        }
    }
    let (mean, stderr) = mean_stderr(tot[0].value(), tot[1].value(), n);
    let (imag_mean, imag_stderr) = mean_stderr(tot[2].value(), tot[3].value(), n);
    Ok(MomentEstimate {
        mean,
        stderr,
        imag_mean,
        imag_stderr,
        n_samples: n as u64,
        master_seed: seed,
        method,
    })
}

/// Haar SO(2m) draw and its coherent state, redrawn on a singular block.
fn draw_coherent(m: usize, rng: &mut ChaCha8Rng) -> Result<(OrthogonalPoint, PureState)> {
    for _ in 0..MAX_REDRAWS {
        let r = haar_so(2 * m, rng)?;
        match coherent_state(&r) {
            Ok(v) => return Ok((r, v)),
            Err(Error::Singular) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Singular)
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn d_plus(k: usize, l: usize) -> Result<f64> {
    Ok(big_to_f64(&commutant_dim_kind(
        EnsembleKind::MgStar,
        1,
        k,
        l,
    )?))
}

// ---------------------------------------------------------------------------
// projectors

/// Π = Σ |b⟩⟨b| over the certified kernel basis.
pub fn projector_exact(ensemble: &EnsembleSpec, k: usize, l: usize) -> Result<FockOperator> {
    let kernel = commutant_basis(ensemble, k, l, KernelPolicy::default())?;
    let m = kernel.matrix();
    Ok(FockOperator {
        matrix: &m * m.adjoint(),
        n_qubits: kernel.layout.n_qubits(),
        layout: Some(kernel.layout),
        hermitian_hint: true,
    })
}

/// Π (1 + Γ̄₁)/2 for a Majorana-layout operator.
pub fn positive_chirality_part(pi: &FockOperator) -> Result<FockOperator> {
    let layout = pi
        .layout
        .ok_or_else(|| Error::Argument("projector carries no layout".into()))?;
    let mut half = PauliSum::scalar(C64::new(0.5, 0.0));
    half.add_term(chirality_pauli(1, &layout)?.scale(C64::new(0.5, 0.0)));
    let g = half.to_dense(pi.n_qubits);
    Ok(FockOperator {
        matrix: &pi.matrix * g,
        ..pi.clone()
    })
}

pub fn frobenius_distance(a: &FockOperator, b: &FockOperator) -> f64 {
    (&a.matrix - &b.matrix).norm()
}

#[derive(Clone, Debug)]
pub struct ProjectorEstimate {
    /// even-chirality part
    pub plus: FockOperator,
    /// Π₊ + Γ̃¹ Π₊ Γ̃¹
    pub full: FockOperator,
    /// per-sample trace, centered on D₊
    pub trace: MomentEstimate,
    pub d_plus: f64,
}

/// Occupation-number basis of Sym^n(C^d) with its embedding into (C^d)^{⊗n}.
struct SymmetricBasis {
    occupations: Vec<Vec<u32>>,
    /// √(n!/∏ m_i!)
    weights: Vec<f64>,
    /// for each product index, its symmetric basis label
    label: Vec<usize>,
}

impl SymmetricBasis {
    fn new(d: usize, n: usize) -> Self {
        let total = d.pow(n as u32);
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut occupations = Vec::new();
        let mut counts = Vec::new();
        let mut label = Vec::with_capacity(total);
        for idx in 0..total {
            let mut occ = vec![0u32; d];
            let mut rest = idx;
            for _ in 0..n {
                occ[rest % d] += 1;
                rest /= d;
            }
            let s = *index.entry(occ.clone()).or_insert_with(|| {
                occupations.push(occ);
                counts.push(0usize);
                occupations.len() - 1
            });
            counts[s] += 1;
            label.push(s);
        }
        let weights = counts.iter().map(|&c| (c as f64).sqrt()).collect();
        SymmetricBasis {
            occupations,
            weights,
            label,
        }
    }

    fn len(&self) -> usize {
        self.occupations.len()
    }

    /// Coordinates of v^{⊗n}.
    fn power(&self, v: &[C64]) -> Vec<C64> {
        self.occupations
            .iter()
            .zip(&self.weights)
            .map(|(occ, w)| {
                occ.iter().zip(v).fold(C64::new(*w, 0.0), |acc, (&m, x)| {
                    if m == 0 {
                        acc
                    } else {
                        acc * x.powu(m)
                    }
                })
            })
            .collect()
    }
}

/// Coherent-state Monte Carlo estimate of the MG commutant projector.
pub fn projector_coherent_mc(
    k: usize,
    l: usize,
    n_samples: usize,
    seed: u64,
) -> Result<ProjectorEstimate> {
    if n_samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let layout = FockLayout::majorana(k, l)?;
    let nq = layout.n_qubits();
    if nq > PROJECTOR_QUBIT_CAP {
        return Err(Error::Resource(format!(
            "{nq} qubits exceeds the projector cap {PROJECTOR_QUBIT_CAP}"
        )));
    }
    let dp = d_plus(k, l)?;
    let sb = SiteBasis::new(&layout)?;
    let sym = SymmetricBasis::new(sb.local_dim(), sb.n_sites());
    let ns = sym.len();

    let chunks = map_chunks(n_samples, |range| {
        let mut m = DMatrix::<C64>::zeros(ns, ns);
        let mut tr = [0.0f64; 2];
        for i in range {
            let mut rng = sample_rng(seed, DOMAIN_PROJECTOR, i as u64);
            let (_, v) = draw_coherent(k, &mut rng)?;
            let s = sym.power(v.as_slice());
            for (c, sc) in s.iter().enumerate() {
                let sc = sc.conj();
                for (r, sr) in s.iter().enumerate() {
                    m[(r, c)] += sr * sc;
                }
            }
            let t = dp * s.iter().map(|x| x.norm_sqr()).sum::<f64>();
            tr[0] += t;
            tr[1] += t * t;
        }
        Ok((m, tr))
    })?;
    let mut m = DMatrix::<C64>::zeros(ns, ns);
    let mut tr = [Compensated::default(); 2];
    for (cm, ct) in &chunks {
        m += cm;
        tr[0].add(ct[0]);
        tr[1].add(ct[1]);
    }
    m *= C64::new(dp / n_samples as f64, 0.0);
    let (mean, stderr) = mean_stderr(tr[0].value(), tr[1].value(), n_samples);

    let v = sb.embedding_matrix();
    let mut w = DMatrix::<C64>::zeros(layout.dim(), ns);
    for (idx, &s) in sym.label.iter().enumerate() {
        let scale = C64::new(1.0 / sym.weights[s], 0.0);
        let mut col = w.column_mut(s);
        col.axpy(scale, &v.column(idx), C64::new(1.0, 0.0));
    }
    let plus = &w * m * w.adjoint();
    let g = PauliSum::from(replica_parity_pauli(1, &layout)?).to_dense(nq);
    let full = &plus + &g * &plus * &g;
    let op = |matrix| FockOperator {
        matrix,
        n_qubits: nq,
        layout: Some(layout),
        hermitian_hint: true,
    };
    Ok(ProjectorEstimate {
        plus: op(plus),
        full: op(full),
        trace: MomentEstimate {
            mean,
            stderr,
            imag_mean: 0.0,
            imag_stderr: 0.0,
            n_samples: n_samples as u64,
            master_seed: seed,
            method: Method::CoherentMc,
        },
        d_plus: dp,
    })
}

/// U ⊗ U* ⊗ U ⊗ U* ⊗ … (2k factors) in replica order.
pub fn replicated_unitary(u: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let uc = u.conjugate();
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for _ in 0..k {
        out = out.kronecker(u).kronecker(&uc);
    }
    out
}

/// Least-squares slope of log d against log n.
pub fn loglog_slope(ns: &[f64], ds: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = ds.iter().map(|y| y.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// purities

/// tr(ρ_A^k) with the first `ell` qubits traced out.
pub fn purity_state(state: &PureState, ell: usize, k: usize) -> Result<f64> {
    let l = state.n_qubits;
    if ell > l {
        return Err(Error::Range(format!("cut {ell} outside 0..={l}")));
    }
    if k == 0 {
        return Err(Error::Argument("replica count k must be >= 1".into()));
    }
    if ell == 0 || ell == l {
        return Ok(1.0);
    }
    let (rows, cols) = (1usize << ell, 1usize << (l - ell));
    let m = DMatrix::from_fn(rows, cols, |r, c| state.amplitudes[r * cols + c]);
    // M M† and Mᵀ M̄ share their nonzero spectrum
    let g = if rows <= cols {
        &m * m.adjoint()
    } else {
        m.transpose() * m.conjugate()
    };
    let mut p = g.clone();
    for _ in 1..k {
        p = &p * &g;
    }
    Ok(p.trace().re)
}

/// Brute-force average of tr(ρ_A^k) over Haar-Gaussian states U_R|0⟩ on L sites.
pub fn purity_oracle(
    k: usize,
    l: usize,
    ell: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if l == 0 || k == 0 {
        return Err(Error::Argument("k and L must be >= 1".into()));
    }
    if l > ORACLE_SITE_CAP {
        return Err(Error::Resource(format!(
            "oracle L = {l} exceeds the cap {ORACLE_SITE_CAP}"
        )));
    }
    if ell > l {
        return Err(Error::Range(format!("cut {ell} outside 0..={l}")));
    }
    if n_samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    if ell == 0 || ell == l {
        return Ok(MomentEstimate::exact(
            1.0,
            n_samples as u64,
            seed,
            Method::Oracle,
        ));
    }
    estimate(n_samples, seed, DOMAIN_ORACLE, Method::Oracle, |rng| {
        let (_, v) = draw_coherent(l, rng)?;
        Ok(C64::new(purity_state(&v, ell, k)?, 0.0))
    })
}

/// D₊ · (Ω_e²)^ℓ (Ω_η²)^{L−ℓ} (Ω₀²)^{L/2} for one Bogoliubov sample.
pub fn purity_integrand(
    blocks: &BogoliubovBlocks,
    eta: &BogoliubovBlocks,
    l: usize,
    ell: usize,
    d_plus: f64,
) -> C64 {
    let (a, b) = (&blocks.a, &blocks.b);
    let oe = a.determinant();
    let oh = (eta.a.adjoint() * a + eta.b.transpose() * b.conjugate()).determinant();
    let o0 = ((a.conjugate() - b) * (a.conjugate() + b)).determinant();
    oe.powu(ell as u32) * oh.powu((l - ell) as u32) * o0.powu((l / 2) as u32) * d_plus
}

/// Coherent-state integral for the averaged k-purity, Haar SO(2k) sampling.
pub fn purity_coherent_mc(
    k: usize,
    l: usize,
    ell: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if k == 0 || l == 0 {
        return Err(Error::Argument("k and L must be >= 1".into()));
    }
    if l % 2 != 0 {
        return Err(Error::Argument(format!(
            "coherent-mc needs even L, got {l}"
        )));
    }
    if ell > l {
        return Err(Error::Range(format!("cut {ell} outside 0..={l}")));
    }
    let dp = d_plus(k, l)?;
    let eta = eta_blocks(k);
    let est = estimate(
        n_samples,
        seed,
        DOMAIN_COHERENT,
        Method::CoherentMc,
        |rng| {
            let r = haar_so(2 * k, rng)?;
            Ok(purity_integrand(&bogoliubov_blocks(&r), &eta, l, ell, dp))
        },
    )?;
    if est.imag_mean.abs() > 6.0 * est.imag_stderr + 1e-12 {
        return Err(Error::Consistency(format!(
            "imaginary part {:.3e} of the integrand average exceeds 6 stderr ({:.3e})",
            est.imag_mean, est.imag_stderr
        )));
    }
    Ok(est)
}

pub fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// 2^{−(L−ℓ)} Σ_h C(2(L−ℓ), 2h) C(L, h) / C(2L, 2h).
pub fn purity_exact_k2(l: usize, ell: usize) -> Result<Q> {
    if ell > l {
        return Err(Error::Range(format!("cut {ell} outside 0..={l}")));
    }
    let (l, m) = (l as u64, (l - ell) as u64);
    let mut sum = Q::zero();
    for h in 0..=m {
        sum += Q::new(
            binomial(2 * m, 2 * h) * binomial(l, h),
            binomial(2 * l, 2 * h),
        );
    }
    Ok(sum / Q::from_integer(BigInt::one() << m))
}

pub fn rational_to_f64(x: &Q) -> f64 {
    (ln_big(x.numer()) - ln_big(x.denom())).exp()
        * if x.numer() < &BigInt::zero() {
            -1.0
        } else {
            1.0
        }
}

fn ln_big(x: &BigInt) -> f64 {
    let x = x.magnitude();
    let bits = x.bits();
    if bits <= 1000 {
        return big_to_f64(&BigInt::from(x.clone())).ln();
    }
    let shift = bits - 64;
    let top: BigInt = BigInt::from(x >> shift);
    big_to_f64(&top).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational without overflow.
pub fn ln_rational(x: &Q) -> f64 {
    ln_big(x.numer()) - ln_big(x.denom())
}

// ---------------------------------------------------------------------------
// saddle point

/// ω_p = π − 2πp/k.
pub fn omega_p(p: f64, k: usize) -> f64 {
    PI - 2.0 * PI * p / k as f64
}

/// Positive momentum labels: ½, 3/2, … for even k; 1, 2, … for odd k.
pub fn positive_labels(k: usize) -> Vec<f64> {
    if k % 2 == 0 {
        (1..=k / 2).map(|j| j as f64 - 0.5).collect()
    } else {
        (1..=(k - 1) / 2).map(|j| j as f64).collect()
    }
}

fn check_saddle_args(p: f64, r: f64, k: usize) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Argument(format!(
            "cut fraction r = {r} must lie in (0, 1)"
        )));
    }
    if k < 2 {
        return Err(Error::Argument("saddle point needs k >= 2".into()));
    }
    if !positive_labels(k).iter().any(|&q| q == p) {
        return Err(Error::Argument(format!(
            "momentum label {p} is not a positive label for k = {k}"
        )));
    }
    Ok(())
}

/// −[r log cos²θ + (1−r) log sin²(θ − ω_p/2)].
pub fn pair_action(theta: f64, p: f64, r: f64, k: usize) -> f64 {
    let w = omega_p(p, k) / 2.0;
    -(r * theta.cos().powi(2).ln() + (1.0 - r) * (theta - w).sin().powi(2).ln())
}

/// r tan θ − (1−r) cot(θ − ω_p/2).
pub fn saddle_residual(theta: f64, p: f64, r: f64, k: usize) -> f64 {
    let w = omega_p(p, k) / 2.0;
    r * theta.tan() - (1.0 - r) / (theta - w).tan()
}

/// Both roots of r t² − tan(ω_p/2) t − (1−r) = 0 as angles in (−π/2, π/2).
pub fn saddle_roots(p: f64, r: f64, k: usize) -> Result<[f64; 2]> {
    check_saddle_args(p, r, k)?;
    let w = (omega_p(p, k) / 2.0).tan();
    let disc = (w * w + 4.0 * r * (1.0 - r)).sqrt();
    let big = if w >= 0.0 {
        (w + disc) / (2.0 * r)
    } else {
        (w - disc) / (2.0 * r)
    };
    let small = -(1.0 - r) / (r * big);
    Ok([big.atan(), small.atan()])
}

/// Saddle angle θ_p*, the root of lower pair action.
pub fn saddle_theta(p: f64, r: f64, k: usize) -> Result<f64> {
    let [a, b] = saddle_roots(p, r, k)?;
    Ok(if pair_action(a, p, r, k) <= pair_action(b, p, r, k) {
        a
    } else {
        b
    })
}

/// S*(r) = Σ_{p>0} pair action at θ_p*; the odd-k zero mode contributes nothing.
pub fn rate_function(k: usize, r: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Argument("rate function needs k >= 2".into()));
    }
    let mut s = 0.0;
    for p in positive_labels(k) {
        s += pair_action(saddle_theta(p, r, k)?, p, r, k);
    }
    Ok(s)
}

/// k = 2 closed form: t = (1 − √(1+4r−4r²))/(2r), S* = log(1+t²) − (1−r) log((1−t)²/2).
pub fn rate_k2_closed_form(r: f64) -> f64 {
    let t = (1.0 - (1.0 + 4.0 * r - 4.0 * r * r).sqrt()) / (2.0 * r);
    (1.0 + t * t).ln() - (1.0 - r) * ((1.0 - t).powi(2) / 2.0).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub r: f64,
    pub rate: f64,
    /// (L, Δ(L))
    pub points: Vec<(usize, f64)>,
    pub decreasing: bool,
    /// least-squares C in Δ ≈ C log L / L
    pub envelope_c: f64,
}

/// Δ(L) = |−(1/L) log E₂(rL) − S*(r)| from the exact k=2 sum.
pub fn rate_vs_exact_convergence(r: f64, l_list: &[usize]) -> Result<ConvergenceReport> {
    let rate = rate_function(2, r)?;
    let mut points = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let cut = r * l as f64;
        let ell = cut.round();
        if (cut - ell).abs() > 1e-9 || l == 0 {
            return Err(Error::Argument(format!(
                "r·L = {cut} is not an integer cut for L = {l}"
            )));
        }
        let e = purity_exact_k2(l, ell as usize)?;
        points.push((l, (-ln_rational(&e) / l as f64 - rate).abs()));
    }
    let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
    let xs: Vec<f64> = points
        .iter()
        .map(|&(l, _)| (l as f64).ln() / l as f64)
        .collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&points).map(|(x, p)| x * p.1).sum();
    Ok(ConvergenceReport {
        r,
        rate,
        points,
        decreasing,
        envelope_c: if sxx > 0.0 { sxy / sxx } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::qf;

    #[test]
    fn exact_k2_values() {
        assert_eq!(purity_exact_k2(2, 1).unwrap(), qf(2, 3));
        assert_eq!(purity_exact_k2(4, 2).unwrap(), qf(17, 35));
        for l in 0..12 {
            assert_eq!(purity_exact_k2(l, 0).unwrap(), qf(1, 1));
            assert_eq!(purity_exact_k2(l, l).unwrap(), qf(1, 1));
        }
        assert!(purity_exact_k2(3, 4).is_err());
    }

    #[test]
    fn purity_of_product_and_bell() {
        let zero = PureState::basis(0, 3);
        for ell in 0..=3 {
            assert_eq!(purity_state(&zero, ell, 2).unwrap(), 1.0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = nalgebra::DVector::zeros(4);
        amps[0] = C64::new(h, 0.0);
        amps[3] = C64::new(h, 0.0);
        let bell = PureState::new(amps, None).unwrap();
        assert!((purity_state(&bell, 1, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((purity_state(&bell, 1, 3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oracle_endpoints_are_exact() {
        for ell in [0, 3] {
            let e = purity_oracle(2, 3, ell, 50, 7).unwrap();
            assert_eq!(e.mean, 1.0);
            assert_eq!(e.stderr, 0.0);
        }
        assert!(matches!(
            purity_oracle(2, 11, 1, 10, 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn estimator_is_deterministic() {
        let a = purity_oracle(2, 3, 1, 600, 42).unwrap();
        let b = purity_oracle(2, 3, 1, 600, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| purity_oracle(2, 3, 1, 600, 42)).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, purity_oracle(2, 3, 1, 600, 43).unwrap());
    }

    #[test]
    fn coherent_mc_small() {
        assert!(matches!(
            purity_coherent_mc(2, 3, 1, 10, 1),
            Err(Error::Argument(_))
        ));
        let e = purity_coherent_mc(2, 2, 1, 4000, 5).unwrap();
        assert!(e.agrees_with(2.0 / 3.0, 3.0), "{e:?}");
        assert!(e.imag_mean.abs() <= 3.0 * e.imag_stderr + 1e-12);
        let top = purity_coherent_mc(2, 2, 2, 4000, 5).unwrap();
        assert!(top.agrees_with(1.0, 3.0), "{top:?}");
    }

    #[test]
    fn saddle_k2_half() {
        let th = saddle_theta(0.5, 0.5, 2).unwrap();
        assert!((th.tan() - (1.0 - 2f64.sqrt())).abs() < 1e-14);
        let s = rate_function(2, 0.5).unwrap();
        assert!((s - (4.0 - 2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        assert!((s - 0.1583472).abs() < 1e-7);
        assert!(saddle_theta(1.0, 0.5, 2).is_err());
        assert!(rate_function(2, 1.0).is_err());
    }

    #[test]
    fn saddle_residuals_and_closed_form() {
        for i in 1..50 {
            let r = i as f64 / 50.0;
            assert!((rate_function(2, r).unwrap() - rate_k2_closed_form(r)).abs() < 1e-12);
            for k in 2..=4 {
                for p in positive_labels(k) {
                    let th = saddle_theta(p, r, k).unwrap();
                    assert!(saddle_residual(th, p, r, k).abs() < 1e-12);
                }
            }
        }
        assert!(rate_function(2, 1.0 - 1e-9).unwrap() < 1e-6);
    }

    #[test]
    fn convergence_half() {
        let rep = rate_vs_exact_convergence(0.5, &[20, 50, 100, 200]).unwrap();
        assert!(rep.decreasing);
        assert!(rep.points[3].1 < 0.05);
        assert!(rate_vs_exact_convergence(0.5, &[21]).is_err());
    }

    #[test]
    fn ln_of_large_rationals() {
        let big = Q::new(binomial(4000, 2000), BigInt::one() << 3990);
        let direct = (1..=2000)
            .map(|i| ((2000 + i) as f64 / i as f64).ln())
            .sum::<f64>()
            - 3990.0 * std::f64::consts::LN_2;
        assert!((ln_rational(&big) - direct).abs() < 1e-9);
    }

    #[test]
    fn exact_projector_is_invariant() {
        let ens = EnsembleSpec::chain(EnsembleKind::Mg, 1, 2).unwrap();
        let p1 = projector_exact(&ens, 1, 2).unwrap();
        assert!((p1.matrix.trace().re - 2.0).abs() < 1e-10);
        let pi = projector_exact(&ens, 2, 2).unwrap();
        assert!((pi.matrix.trace().re - 10.0).abs() < 1e-10);
        assert!(crate::linalg::max_abs(&(&pi.matrix * &pi.matrix - &pi.matrix)) < 1e-10);
        let mut g = sample_rng(3, 0, 0);
        let h = DMatrix::<f64>::from_fn(4, 4, |_, _| {
            rand::Rng::sample(&mut g, rand_distr::StandardNormal)
        });
        let u = crate::gaussian::quadratic_unitary(&(&h - h.transpose())).unwrap();
        let t = replicated_unitary(&u, 2);
        assert!(crate::linalg::max_abs(&(&t * &pi.matrix - &pi.matrix * &t)) < 1e-8);
        assert!(crate::linalg::max_abs(&(&t * &pi.matrix - &pi.matrix)) < 1e-8);
    }

    #[test]
    fn coherent_projector_k1_is_exact() {
        let est = projector_coherent_mc(1, 1, 20, 9).unwrap();
        let ens = EnsembleSpec::chain(EnsembleKind::Mg, 1, 1).unwrap();
        let exact = projector_exact(&ens, 1, 1).unwrap();
        assert!(frobenius_distance(&est.full, &exact) < 1e-10);
        assert_eq!(est.trace.stderr, 0.0);
    }

    #[test]
    fn coherent_projector_k2_converges() {
        let ens = EnsembleSpec::chain(EnsembleKind::Mg, 1, 2).unwrap();
        let exact = projector_exact(&ens, 2, 2).unwrap();
        let plus = positive_chirality_part(&exact).unwrap();
        let est = projector_coherent_mc(2, 2, 4000, 1).unwrap();
        assert!((est.trace.mean - 5.0).abs() < 1e-9);
        let dp = frobenius_distance(&est.plus, &plus);
        let df = frobenius_distance(&est.full, &exact);
        assert!(dp < 0.3 && df < 0.4, "{dp} {df}");
    }

    #[test]
    fn symmetric_power_is_isometric() {
        let sym = SymmetricBasis::new(4, 4);
        assert_eq!(sym.len(), 35);
        let v: Vec<C64> = [0.5, -0.1, 0.3, 0.7]
            .iter()
            .map(|&x| C64::new(x, 0.2 * x))
            .collect();
        let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let s = sym.power(&v);
        let ns: f64 = s.iter().map(|x| x.norm_sqr()).sum();
        assert!((ns - nv.powi(4)).abs() < 1e-12);
    }
}
