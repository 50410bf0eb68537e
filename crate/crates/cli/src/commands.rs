use crate::output::{Cell, Table};
use ffcomm::effham::{
    casimir_identity_residual, commutant_basis, dimension_check, lemma1_check, KernelPolicy,
};
use ffcomm::ensemble::{EnsembleKind, EnsembleSpec};
use ffcomm::fock::{klein_mode_pauli, QUBIT_ORDER};
use ffcomm::gaussian::{
    bogoliubov_blocks, coherent_state, embedding_check, eta_blocks, haar_so, lambda_norm, omega_sq,
    zero_blocks, OrthogonalPoint, Overlap,
};
use ffcomm::liealg::commutant_dim;
use ffcomm::moments::{
    frobenius_distance, positive_chirality_part, projector_coherent_mc, projector_exact,
    purity_coherent_mc, purity_exact_k2, purity_oracle, rate_function, rate_vs_exact_convergence,
    rational_to_f64, sample_rng, Method, MomentEstimate,
};
use ffcomm::pauli::{Pauli, C64};
use ffcomm::{Error, Result};

pub struct DimRow {
    pub ensemble: EnsembleKind,
    pub n_flavors: usize,
    pub k: usize,
    pub l: usize,
}

/// Formula dimensions, optionally next to ED. Returns the table and whether all rows match.
pub fn dims(rows: &[DimRow], verify_ed: bool) -> Result<(Table, bool)> {
    let mut t = if verify_ed {
        Table::new(&["ensemble", "k", "L", "formula", "ed", "status"])
    } else {
        Table::new(&["ensemble", "k", "L", "dim"])
    };
    let mut all = true;
    for r in rows {
        let ens = EnsembleSpec::chain(r.ensemble, r.n_flavors, r.l)?;
        if verify_ed {
            let (formula, ed) = dimension_check(&ens, r.k, r.l)?;
            let hit = formula == ed;
            all &= hit;
            t.push(vec![
                r.ensemble.name().into(),
                r.k.into(),
                r.l.into(),
                formula.into(),
                ed.into(),
                if hit { "MATCH" } else { "MISMATCH" }.into(),
            ]);
        } else {
            let d = commutant_dim(&ens, r.k, r.l)?;
            t.push(vec![
                r.ensemble.name().into(),
                r.k.into(),
                r.l.into(),
                Cell::Text(d.to_string()),
            ]);
        }
    }
    Ok((t, all))
}

pub struct PageRequest {
    pub method: Method,
    pub k: usize,
    pub l: Option<usize>,
    pub ells: Vec<usize>,
    pub rs: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

pub const PAGE_HEADER: [&str; 8] = [
    "method", "k", "L", "ell", "value", "stderr", "samples", "seed",
];

fn page_row(m: Method, k: usize, l: Cell, ell: Cell, e: &MomentEstimate) -> Vec<Cell> {
    vec![
        m.name().into(),
        k.into(),
        l,
        ell,
        e.mean.into(),
        e.stderr.into(),
        e.n_samples.into(),
        e.master_seed.into(),
    ]
}

/// One row per cut. Saddle rows given by `--r` leave L blank and carry r in the ell column.
pub fn page_curve(req: &PageRequest) -> Result<Table> {
    let mut t = Table::new(&PAGE_HEADER);
    let m = req.method;
    if m == Method::Saddle && !req.rs.is_empty() {
        for &r in &req.rs {
            let v = rate_function(req.k, r)?;
            let e = MomentEstimate::exact(v, 0, req.seed, m);
            t.push(page_row(m, req.k, Cell::Empty, r.into(), &e));
        }
        return Ok(t);
    }
    let l = req
        .l
        .ok_or_else(|| Error::Argument(format!("method {} needs --L", m.name())))?;
    let ells: Vec<usize> = if req.ells.is_empty() {
        (0..=l).collect()
    } else {
        req.ells.clone()
    };
    if m == Method::ExactK2 && req.k != 2 {
        return Err(Error::Argument(format!(
            "exact-k2 requires k = 2, got k = {}",
            req.k
        )));
    }
    if m == Method::CoherentMc && l % 2 != 0 {
        return Err(Error::Argument(format!(
            "coherent-mc requires even L, got L = {l}"
        )));
    }
    for &ell in &ells {
        if ell > l {
            return Err(Error::Argument(format!(
                "cut ell = {ell} must satisfy 0 <= ell <= L = {l}"
            )));
        }
        let e = match m {
            Method::ExactK2 => {
                MomentEstimate::exact(rational_to_f64(&purity_exact_k2(l, ell)?), 0, req.seed, m)
            }
            Method::Oracle => purity_oracle(req.k, l, ell, req.samples, req.seed)?,
            Method::CoherentMc => purity_coherent_mc(req.k, l, ell, req.samples, req.seed)?,
            Method::Saddle => {
                if ell == 0 || ell == l {
                    return Err(Error::Argument(
                        "saddle needs 0 < ell < L (r in (0,1))".into(),
                    ));
                }
                MomentEstimate::exact(rate_function(req.k, ell as f64 / l as f64)?, 0, req.seed, m)
            }
        };
        t.push(page_row(m, req.k, l.into(), ell.into(), &e));
    }
    Ok(t)
}

pub fn rate_grid(k: usize, rs: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["k", "r", "rate"]);
    for &r in rs {
        t.push(vec![k.into(), r.into(), rate_function(k, r)?.into()]);
    }
    Ok(t)
}

pub fn convergence(r: f64, ls: &[usize]) -> Result<(Table, bool)> {
    let rep = rate_vs_exact_convergence(r, ls)?;
    let mut t = Table::new(&["r", "L", "delta", "rate"]);
    for &(l, d) in &rep.points {
        t.push(vec![r.into(), l.into(), d.into(), rep.rate.into()]);
    }
    Ok((t, rep.decreasing))
}

pub fn projector(k: usize, l: usize, samples: usize, seed: u64) -> Result<Table> {
    let est = projector_coherent_mc(k, l, samples, seed)?;
    let ens = EnsembleSpec::chain(EnsembleKind::Mg, 1, l)?;
    let exact = projector_exact(&ens, k, l)?;
    let plus = positive_chirality_part(&exact)?;
    let mut t = Table::new(&[
        "k",
        "L",
        "samples",
        "seed",
        "d_plus",
        "trace",
        "trace_stderr",
        "distance_full",
        "distance_plus",
    ]);
    t.push(vec![
        k.into(),
        l.into(),
        samples.into(),
        seed.into(),
        est.d_plus.into(),
        est.trace.mean.into(),
        est.trace.stderr.into(),
        frobenius_distance(&est.full, &exact).into(),
        frobenius_distance(&est.plus, &plus).into(),
    ]);
    Ok(t)
}

/// Kernel vectors: a "dim,count" line, then one vector per line as interleaved re,im.
pub fn kernel_csv(ens: &EnsembleSpec, k: usize, l: usize) -> Result<String> {
    let kern = commutant_basis(ens, k, l, KernelPolicy::default())?;
    let dim = kern.layout.dim();
    let mut s = format!("{},{}\n", dim, kern.dim());
    for v in &kern.vectors {
        let parts: Vec<String> = v
            .as_slice()
            .iter()
            .flat_map(|c| [crate::output::fmt_num(c.re), crate::output::fmt_num(c.im)])
            .collect();
        s.push_str(&parts.join(","));
        s.push('\n');
    }
    Ok(s)
}

pub fn kernel_json(ens: &EnsembleSpec, k: usize, l: usize) -> Result<String> {
    let kern = commutant_basis(ens, k, l, KernelPolicy::default())?;
    let vectors: Vec<Vec<f64>> = kern
        .vectors
        .iter()
        .map(|v| v.as_slice().iter().flat_map(|c| [c.re, c.im]).collect())
        .collect();
    let v = serde_json::json!({
        "schema_version": crate::output::SCHEMA_VERSION,
        "command": "kernel",
        "ensemble": ens.kind.name(),
        "k": k,
        "L": l,
        "dim": kern.layout.dim(),
        "count": kern.dim(),
        "qubit_order": QUBIT_ORDER,
        "vectors": vectors,
    });
    Ok(serde_json::to_string_pretty(&v).unwrap() + "\n")
}

// ---------------------------------------------------------------------------
// check suites

pub const SUITES: [&str; 7] = [
    "anticommutation",
    "casimir",
    "lemma1",
    "gaussianity",
    "embedding",
    "constraint",
    "normalization",
];

pub struct CheckTarget {
    pub ensemble: Option<EnsembleKind>,
    pub k: Option<usize>,
    pub l: Option<usize>,
}

pub struct SuiteResult {
    pub suite: &'static str,
    pub case: String,
    pub value: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.value < self.tolerance
    }
}

fn kinds(t: &CheckTarget, default: &[EnsembleKind]) -> Vec<EnsembleKind> {
    t.ensemble
        .map(|e| vec![e])
        .unwrap_or_else(|| default.to_vec())
}

fn anticommutation(kind: EnsembleKind, k: usize, l: usize) -> Result<f64> {
    let lay = EnsembleSpec::chain(kind, 1, l)?.layout(k, l)?;
    let m = lay.majoranas_per_replica();
    let mut ops: Vec<Pauli> = Vec::new();
    for a in 1..=lay.n_replicas {
        for mu in 1..=m {
            ops.push(klein_mode_pauli(mu, a, &lay)?);
        }
    }
    let mut worst: f64 = 0.0;
    for (i, p) in ops.iter().enumerate() {
        let sq = p.mul(p);
        worst = worst.max(
            (sq.coeff - C64::new(1.0, 0.0)).norm() + if sq.x == 0 && sq.z == 0 { 0.0 } else { 1.0 },
        );
        for q in &ops[i + 1..] {
            if p.commutes(q) {
                worst = worst.max(1.0);
            }
        }
    }
    Ok(worst)
}

fn run_suite(name: &'static str, t: &CheckTarget) -> Result<Vec<SuiteResult>> {
    let mut out = Vec::new();
    let mut push = |case: String, value: f64, tolerance: f64| {
        out.push(SuiteResult {
            suite: name,
            case,
            value,
            tolerance,
        })
    };
    match name {
        "anticommutation" => {
            for kind in kinds(t, &[EnsembleKind::Mg, EnsembleKind::Nc]) {
                let (k, l) = (t.k.unwrap_or(2), t.l.unwrap_or(2));
                push(
                    format!("{} k={k} L={l}", kind.name()),
                    anticommutation(kind, k, l)?,
                    1e-12,
                );
            }
        }
        "casimir" => {
            for kind in kinds(t, &[EnsembleKind::Mg, EnsembleKind::Nc]) {
                let (k, l) = (t.k.unwrap_or(2), t.l.unwrap_or(2));
                let ens = EnsembleSpec::chain(kind, 1, l)?;
                push(
                    format!("{} k={k} L={l} bond=1-2", kind.name()),
                    casimir_identity_residual(&ens, k, l, (1, 2))?,
                    1e-10,
                );
            }
        }
        "lemma1" => {
            for kind in kinds(t, &[EnsembleKind::Mg, EnsembleKind::Nc]) {
                let (k, l) = (t.k.unwrap_or(2), t.l.unwrap_or(2));
                let ens = EnsembleSpec::chain(kind, 1, l)?;
                let kern = commutant_basis(&ens, k, l, KernelPolicy::default())?;
                let rep = lemma1_check(&kern.vectors, &kern.layout)?;
                push(
                    format!(
                        "{} k={k} L={l} vectors={} transpositions={}",
                        kind.name(),
                        rep.n_vectors,
                        rep.n_transpositions
                    ),
                    rep.max_residual,
                    1e-10,
                );
            }
        }
        "gaussianity" => {
            let k = t.k.unwrap_or(2);
            let mut worst: f64 = 0.0;
            for i in 0..100 {
                let mut rng = sample_rng(0, 0x6761_7573, i);
                worst = worst.max(lambda_norm(&coherent_state(&haar_so(2 * k, &mut rng)?)?));
            }
            push(format!("k={k} samples=100"), worst, 1e-10);
        }
        "embedding" => {
            let k = t.k.unwrap_or(2);
            let mut worst: f64 = 0.0;
            for i in 0..50 {
                let mut rng = sample_rng(0, 0x656d_6264, i);
                let r = embedding_check(&coherent_state(&haar_so(2 * k, &mut rng)?)?);
                worst = worst.max(r.number_residual).max(r.lambda_norm);
            }
            push(format!("k={k} samples=50"), worst, 1e-10);
        }
        "constraint" => {
            let ks: Vec<usize> = t.k.map(|k| vec![k]).unwrap_or_else(|| (1..=4).collect());
            for k in ks {
                let mut worst = eta_blocks(k)
                    .constraint_residual()
                    .max(zero_blocks(k).constraint_residual());
                for i in 0..20 {
                    let mut rng = sample_rng(0, 0x636f_6e73, i);
                    worst = worst
                        .max(bogoliubov_blocks(&haar_so(2 * k, &mut rng)?).constraint_residual());
                }
                push(format!("k={k}"), worst, 1e-10);
            }
        }
        "normalization" => {
            let ks: Vec<usize> = t.k.map(|k| vec![k]).unwrap_or_else(|| (1..=4).collect());
            for k in ks {
                let id = bogoliubov_blocks(&OrthogonalPoint::identity(2 * k));
                let one = C64::new(1.0, 0.0);
                let d = (omega_sq(Overlap::E, &id) - one)
                    .norm()
                    .max(
                        (omega_sq(Overlap::Eta, &id) - C64::new(2f64.powi(1 - k as i32), 0.0))
                            .norm(),
                    )
                    .max((omega_sq(Overlap::Zero, &id) - one).norm());
                push(format!("k={k}"), d, 1e-12);
            }
        }
        _ => {
            return Err(Error::Argument(format!(
                "unknown suite '{name}' (one of {})",
                SUITES.join(", ")
            )))
        }
    }
    Ok(out)
}

pub fn check(suites: &[&'static str], target: &CheckTarget) -> Result<(Table, bool)> {
    let mut t = Table::new(&["suite", "case", "value", "tolerance", "status"]);
    let mut all = true;
    for &s in suites {
        for r in run_suite(s, target)? {
            let ok = r.pass();
            all &= ok;
            t.push(vec![
                r.suite.into(),
                r.case.into(),
                r.value.into(),
                r.tolerance.into(),
                if ok { "PASS" } else { "FAIL" }.into(),
            ]);
        }
    }
    Ok((t, all))
}

pub fn suite_name(s: &str) -> Result<&'static str> {
    SUITES.iter().find(|&&n| n == s).copied().ok_or_else(|| {
        Error::Argument(format!(
            "unknown suite '{s}' (one of {})",
            SUITES.join(", ")
        ))
    })
}
