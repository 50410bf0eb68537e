//! Root systems, Casimir values and Weyl dimensions for so(2k) and su(2k),
//! and the closed-form commutant dimensions built on them.
//!
//! Everything is exact: weights are big rationals and dimensions big integers.

use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    SoEven,
    Su,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraTag {
    pub family: Family,
    /// n for so(n) or su(n).
    pub parameter: usize,
}

impl AlgebraTag {
    pub fn so(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Argument(format!(
                "so({n}) needs an even parameter >= 2"
            )));
        }
        Ok(AlgebraTag {
            family: Family::SoEven,
            parameter: n,
        })
    }

    pub fn su(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!("su({n}) needs parameter >= 2")));
        }
        Ok(AlgebraTag {
            family: Family::Su,
            parameter: n,
        })
    }

    /// Length of weight vectors in the ε-basis.
    pub fn basis_len(&self) -> usize {
        match self.family {
            Family::SoEven => self.parameter / 2,
            Family::Su => self.parameter,
        }
    }

    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        let dot = a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y);
        match self.family {
            Family::SoEven => dot,
            Family::Su => {
                let sa: Q = a.iter().cloned().sum();
                let sb: Q = b.iter().cloned().sum();
                dot - sa * sb / q(self.parameter as i64)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HighestWeight {
    pub components: Vec<Q>,
    pub algebra: AlgebraTag,
}

impl HighestWeight {
    pub fn new(components: Vec<Q>, algebra: AlgebraTag) -> Result<Self> {
        if components.len() != algebra.basis_len() {
            return Err(Error::Argument(format!(
                "weight has {} components, {:?} needs {}",
                components.len(),
                algebra,
                algebra.basis_len()
            )));
        }
        Ok(HighestWeight {
            components,
            algebra,
        })
    }

    pub fn zero(algebra: AlgebraTag) -> Self {
        HighestWeight {
            components: vec![Q::zero(); algebra.basis_len()],
            algebra,
        }
    }

    pub fn is_dominant(&self) -> bool {
        let c = &self.components;
        let n = c.len();
        let integral = |x: &Q| x.is_integer();
        match self.algebra.family {
            Family::SoEven => {
                let two = q(2);
                let all_int = c.iter().all(integral);
                let all_half = c.iter().all(|x| !x.is_integer() && (x * &two).is_integer());
                if !(all_int || all_half) {
                    return false;
                }
                (0..n.saturating_sub(2)).all(|i| c[i] >= c[i + 1])
                    && (n < 2 || c[n - 2] >= c[n - 1].abs())
            }
            Family::Su => (0..n - 1).all(|i| {
                let d = &c[i] - &c[i + 1];
                d >= Q::zero() && d.is_integer()
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSystem {
    pub positive_roots: Vec<Vec<Q>>,
    pub weyl_vector: Vec<Q>,
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

fn combine(a: &[Q], b: &[Q], s: i64) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y * q(s)).collect()
}

pub fn positive_roots(algebra: AlgebraTag) -> RootSystem {
    let n = algebra.basis_len();
    let mut roots = Vec::new();
    for m in 0..n {
        for l in (m + 1)..n {
            roots.push(combine(&unit(n, m), &unit(n, l), -1));
            if algebra.family == Family::SoEven {
                roots.push(combine(&unit(n, m), &unit(n, l), 1));
            }
        }
    }
    let mut rho = vec![Q::zero(); n];
    for r in &roots {
        for (x, y) in rho.iter_mut().zip(r) {
            *x += y;
        }
    }
    let half = qf(1, 2);
    for x in rho.iter_mut() {
        *x *= &half;
    }
    RootSystem {
        positive_roots: roots,
        weyl_vector: rho,
    }
}

/// C(λ) = (λ, λ + 2ρ).
pub fn casimir_value(hw: &HighestWeight) -> Q {
    let rs = positive_roots(hw.algebra);
    let shifted: Vec<Q> = hw
        .components
        .iter()
        .zip(&rs.weyl_vector)
        .map(|(l, r)| l + r * q(2))
        .collect();
    hw.algebra.inner(&hw.components, &shifted)
}

/// ∏_{α>0} (λ+ρ, α)/(ρ, α).
pub fn weyl_dim(hw: &HighestWeight) -> Result<BigInt> {
    if !hw.is_dominant() {
        return Err(Error::Argument(format!(
            "weight {:?} is not dominant",
            hw.components
        )));
    }
    let rs = positive_roots(hw.algebra);
    let lr: Vec<Q> = hw
        .components
        .iter()
        .zip(&rs.weyl_vector)
        .map(|(l, r)| l + r)
        .collect();
    let mut d = Q::one();
    for a in &rs.positive_roots {
        d *= hw.algebra.inner(&lr, a) / hw.algebra.inner(&rs.weyl_vector, a);
    }
    if !d.is_integer() {
        return Err(Error::Consistency(format!(
            "Weyl dimension {d} is not an integer"
        )));
    }
    Ok(d.to_integer())
}

/// Dimension of the spinor-type irrep with highest weight (L,...,L) of so(2k).
pub fn mg_irrep_dim(k: usize, l: usize) -> BigInt {
    let (k, l) = (k as i64, l as i64);
    let mut d = Q::one();
    for m in 1..=k {
        for n in (m + 1)..=k {
            d *= qf(2 * l + 2 * k - m - n, 2 * k - m - n);
        }
    }
    d.to_integer()
}

pub fn nc_dim(k: usize, l: usize) -> BigInt {
    let (k, l) = (k as i64, l as i64);
    let mut d = Q::one();
    for a in 1..=k {
        for b in (k + 1)..=(2 * k) {
            d *= qf(l + b - a, b - a);
        }
    }
    d.to_integer()
}

/// Closed-form commutant dimension; flavored kinds use k → kN.
pub fn commutant_dim(ensemble: &EnsembleSpec, k: usize, l: usize) -> Result<BigInt> {
    commutant_dim_kind(ensemble.kind, ensemble.n_flavors, k, l)
}

pub fn commutant_dim_kind(
    kind: EnsembleKind,
    n_flavors: usize,
    k: usize,
    l: usize,
) -> Result<BigInt> {
    if k == 0 || l == 0 || n_flavors == 0 {
        return Err(Error::Argument("k, L and N must be >= 1".into()));
    }
    let kn = k * n_flavors;
    Ok(match kind {
        EnsembleKind::Mg | EnsembleKind::MgFlavored => mg_irrep_dim(kn, l) * 2,
        EnsembleKind::MgStar => mg_irrep_dim(kn, l),
        EnsembleKind::Nc | EnsembleKind::NcFlavored => nc_dim(kn, l),
    })
}

/// The same dimensions via the Weyl formula on the relevant highest weight.
pub fn commutant_dim_weyl(
    kind: EnsembleKind,
    n_flavors: usize,
    k: usize,
    l: usize,
) -> Result<BigInt> {
    let kn = k * n_flavors;
    match kind {
        EnsembleKind::Mg | EnsembleKind::MgFlavored | EnsembleKind::MgStar => {
            let hw = HighestWeight::new(vec![q(l as i64); kn], AlgebraTag::so(2 * kn)?)?;
            let d = weyl_dim(&hw)?;
            Ok(if kind == EnsembleKind::MgStar {
                d
            } else {
                d * 2
            })
        }
        EnsembleKind::Nc | EnsembleKind::NcFlavored => {
            let mut c = vec![q(l as i64); kn];
            c.extend(vec![Q::zero(); kn]);
            weyl_dim(&HighestWeight::new(c, AlgebraTag::su(2 * kn)?)?)
        }
    }
}
