use crate::error::{Error, Result};
use crate::fock::{FockLayout, ModeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    /// Matchgates: quadratic Majorana Hamiltonians.
    Mg,
    /// Matchgates plus a single-Majorana gate (parity breaking).
    MgStar,
    /// Number-conserving free fermions.
    Nc,
    MgFlavored,
    NcFlavored,
}

impl EnsembleKind {
    pub fn is_majorana(self) -> bool {
        matches!(
            self,
            EnsembleKind::Mg | EnsembleKind::MgStar | EnsembleKind::MgFlavored
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Mg => "mg",
            EnsembleKind::MgStar => "mgstar",
            EnsembleKind::Nc => "nc",
            EnsembleKind::MgFlavored => "mg-flavored",
            EnsembleKind::NcFlavored => "nc-flavored",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mg" => EnsembleKind::Mg,
            "mgstar" | "mg*" | "mg-star" => EnsembleKind::MgStar,
            "nc" | "u1" => EnsembleKind::Nc,
            "mg-flavored" | "mg_flavored" => EnsembleKind::MgFlavored,
            "nc-flavored" | "nc_flavored" => EnsembleKind::NcFlavored,
            _ => return Err(Error::Argument(format!("unknown ensemble '{s}'"))),
        })
    }
}

/// Ensemble of gates with its bond graph. Bonds refer to Majorana sites
/// (1..=2L) for Majorana kinds and to physical sites (1..=L) otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_flavors: usize,
    pub bonds: Vec<(usize, usize)>,
}

fn n_sites(kind: EnsembleKind, l: usize) -> usize {
    if kind.is_majorana() {
        2 * l
    } else {
        l
    }
}

impl EnsembleSpec {
    pub fn new(
        kind: EnsembleKind,
        n_flavors: usize,
        bonds: Vec<(usize, usize)>,
        l: usize,
    ) -> Result<Self> {
        if n_flavors == 0 {
            return Err(Error::Argument("flavor count must be >= 1".into()));
        }
        let flavored = matches!(kind, EnsembleKind::MgFlavored | EnsembleKind::NcFlavored);
        if flavored && n_flavors < 2 {
            return Err(Error::Argument("flavored ensembles need N >= 2".into()));
        }
        if !flavored && n_flavors != 1 {
            return Err(Error::Argument(format!("{} takes no flavors", kind.name())));
        }
        let ns = n_sites(kind, l);
        for &(i, j) in &bonds {
            if i == j || i == 0 || j == 0 || i > ns || j > ns {
                return Err(Error::Argument(format!(
                    "bad bond ({i},{j}) for {ns} sites"
                )));
            }
        }
        if !connected(ns, &bonds) {
            return Err(Error::Argument("bond graph is not connected".into()));
        }
        Ok(EnsembleSpec {
            kind,
            n_flavors,
            bonds,
        })
    }

    /// Open chain 1-2, 2-3, ...
    pub fn chain(kind: EnsembleKind, n_flavors: usize, l: usize) -> Result<Self> {
        let ns = n_sites(kind, l);
        Self::new(kind, n_flavors, (1..ns).map(|i| (i, i + 1)).collect(), l)
    }

    pub fn all_to_all(kind: EnsembleKind, n_flavors: usize, l: usize) -> Result<Self> {
        let ns = n_sites(kind, l);
        let bonds = (1..=ns)
            .flat_map(|i| ((i + 1)..=ns).map(move |j| (i, j)))
            .collect();
        Self::new(kind, n_flavors, bonds, l)
    }

    pub fn layout(&self, k: usize, l: usize) -> Result<FockLayout> {
        let kind = if self.kind.is_majorana() {
            ModeKind::Majorana
        } else {
            ModeKind::ComplexFermion
        };
        FockLayout::new(l, 2 * k, self.n_flavors, kind)
    }
}

fn connected(n: usize, bonds: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(i, j) in bonds {
        let (a, b) = (find(&mut parent, i - 1), find(&mut parent, j - 1));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|x| find(&mut parent, x) == root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_all_to_all() {
        let c = EnsembleSpec::chain(EnsembleKind::Mg, 1, 3).unwrap();
        assert_eq!(c.bonds.len(), 5);
        let a = EnsembleSpec::all_to_all(EnsembleKind::Mg, 1, 3).unwrap();
        assert_eq!(a.bonds.len(), 15);
        let n = EnsembleSpec::chain(EnsembleKind::Nc, 1, 3).unwrap();
        assert_eq!(n.bonds, vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn rejects_disconnected_and_bad_flavors() {
        assert!(EnsembleSpec::new(EnsembleKind::Nc, 1, vec![(1, 2)], 4).is_err());
        assert!(EnsembleSpec::chain(EnsembleKind::MgFlavored, 1, 2).is_err());
        assert!(EnsembleSpec::chain(EnsembleKind::Mg, 2, 2).is_err());
    }
}
