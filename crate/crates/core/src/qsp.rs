//! The coideal subalgebra of quasi-split type AIII: generators, modules over
//! it, and the intertwiner `Upsilon`.
//!
//! Generators in the `Part2` convention are
//! `B_i = F_i + s_i E_{t(i)} K_i^-1` off the fixed node (with `s_i = 1` except
//! `s_i = q` on the lower node of an adjacent swapped pair) and
//! `B = F + q^-1 E K^-1 + kappa K^-1` at it, with `k_i = K_i K_{t(i)}^-1`.
//! The `Part3` generators are their images under the antilinear automorphism
//! exchanging `E` and `F`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{Lattice, LaurentPoly};
use crate::linalg::Solution;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::sparse::SparseMat;
use crate::uq::{cartan, Convention, FAlgebra, RootLatticeVec, UModule, UPlusElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSPConfig {
    #[serde(rename = "N")]
    pub rank: usize,
    #[serde(default = "default_kappa")]
    pub kappa: u8,
    #[serde(default = "default_convention")]
    pub convention: Convention,
    #[serde(default)]
    pub lattice: Option<Lattice>,
    #[serde(default = "default_cap")]
    pub height_cap: i32,
}

fn default_kappa() -> u8 {
    1
}

fn default_convention() -> Convention {
    Convention::Part3
}

fn default_cap() -> i32 {
    8
}

impl QSPConfig {
    pub fn new(rank: usize, convention: Convention) -> Self {
        QSPConfig {
            rank,
            kappa: 1,
            convention,
            lattice: None,
            height_cap: default_cap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank < 2 {
            return Err(Error::Config(format!(
                "rank N = {} must be at least 2",
                self.rank
            )));
        }
        if self.kappa > 1 {
            return Err(Error::Config(format!(
                "kappa = {} must be 0 or 1",
                self.kappa
            )));
        }
        if self.height_cap < 1 {
            return Err(Error::Config("height cap must be positive".into()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.rank - 1
    }

    /// The diagram involution.
    pub fn theta(&self, i: usize) -> usize {
        self.rank - 2 - i
    }

    pub fn fixed_node(&self) -> Option<usize> {
        self.rank.is_multiple_of(2).then(|| self.rank / 2 - 1)
    }

    /// Strict lattice of the canonical basis: `q^-1 Z[q^-1]` for `Part2`,
    /// `qZ[q]` for `Part3`, unless overridden.
    pub fn lattice(&self) -> Lattice {
        self.lattice.unwrap_or(match self.convention {
            Convention::Part2 => Lattice::QinvZqinv,
            Convention::Part3 => Lattice::QZq,
        })
    }

    pub fn params(&self) -> CoidealParams {
        CoidealParams::standard(self)
    }
}

/// Scalars in the `Part2` generators `B_i = F_i + s_i E_{t(i)} K_i^-1 + kappa_i K_i^-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoidealParams {
    pub varsigma: Vec<LaurentPoly>,
    pub kappa: Vec<LaurentPoly>,
}

impl CoidealParams {
    pub fn standard(cfg: &QSPConfig) -> Self {
        let n = cfg.nodes();
        // off the fixed node the intertwiner exists iff s_i s_{t(i)} = q^{-(alpha_i, alpha_t(i))}
        let varsigma = (0..n)
            .map(|i| {
                let t = cfg.theta(i);
                if Some(i) == cfg.fixed_node() {
                    LaurentPoly::qinv()
                } else if i < t {
                    LaurentPoly::q_pow(-cartan(i, t))
                } else {
                    LaurentPoly::one()
                }
            })
            .collect();
        let kappa = (0..n)
            .map(|i| {
                if Some(i) == cfg.fixed_node() {
                    LaurentPoly::constant(cfg.kappa as i64)
                } else {
                    LaurentPoly::zero()
                }
            })
            .collect();
        CoidealParams { varsigma, kappa }
    }

    /// Scalar in front of the second-leg term for the given convention.
    fn twist(&self, i: usize, conv: Convention) -> LaurentPoly {
        match conv {
            Convention::Part2 => self.varsigma[i].clone(),
            Convention::Part3 => self.varsigma[i].bar(),
        }
    }
}

/// A finite-dimensional module over the coideal subalgebra.
#[derive(Clone, Debug, PartialEq)]
pub struct IModule {
    pub rank: usize,
    /// Exponent of each `k_i` on each basis vector.
    pub k_exps: Vec<Vec<i64>>,
    pub b: Vec<SparseMat<LaurentPoly>>,
}

impl IModule {
    pub fn dim(&self) -> usize {
        self.k_exps.len()
    }

    pub fn k_mat(&self, i: usize, power: i64) -> SparseMat<LaurentPoly> {
        let mut m = SparseMat::zeros(self.dim(), self.dim());
        for v in 0..self.dim() {
            m.set(v, v, LaurentPoly::q_pow(power * self.k_exps[v][i]));
        }
        m
    }

    /// Restriction of a `U`-module.
    pub fn restrict(m: &UModule, cfg: &QSPConfig, params: &CoidealParams) -> Self {
        let nodes = cfg.nodes();
        let k_exps = (0..m.dim())
            .map(|v| {
                (0..nodes)
                    .map(|i| m.k_exp(v, i) - m.k_exp(v, cfg.theta(i)))
                    .collect()
            })
            .collect();
        let b = (0..nodes)
            .map(|i| coideal_generator_matrix(m, i, cfg, params))
            .collect();
        IModule {
            rank: cfg.rank,
            k_exps,
            b,
        }
    }

    /// `self (x) n` through the coideal structure
    /// `D(B_i) = B_i (x) K_i^-1 + 1 (x) P_i + c_i k_i^-1 (x) S_{t(i)} K_i^-1`
    /// with `(P, S) = (F, E)` in `Part2` and `(E, F)` in `Part3`.
    pub fn tensor(&self, n: &UModule, cfg: &QSPConfig, params: &CoidealParams) -> IModule {
        let nodes = cfg.nodes();
        let k_exps = self
            .k_exps
            .iter()
            .flat_map(|a| {
                (0..n.dim()).map(move |v| {
                    (0..nodes)
                        .map(|i| a[i] + n.k_exp(v, i) - n.k_exp(v, cfg.theta(i)))
                        .collect()
                })
            })
            .collect();
        let im = SparseMat::identity(self.dim());
        let b = (0..nodes)
            .map(|i| {
                let t = cfg.theta(i);
                let (p, s) = match cfg.convention {
                    Convention::Part2 => (&n.f[i], &n.e[t]),
                    Convention::Part3 => (&n.e[i], &n.f[t]),
                };
                let c = params.twist(i, cfg.convention);
                let first = SparseMat::kron(&self.b[i], &n.k_mat(i, -1));
                let second = SparseMat::kron(&im, p);
                let third = SparseMat::kron(&self.k_mat(i, -1), &s.mul(&n.k_mat(i, -1))).scale(&c);
                first.add(&second).add(&third)
            })
            .collect();
        IModule {
            rank: self.rank,
            k_exps,
            b,
        }
    }

    /// Projection to a quotient: `pi X s` for each generator.
    pub fn quotient(
        &self,
        proj: &SparseMat<LaurentPoly>,
        section: &SparseMat<LaurentPoly>,
    ) -> IModule {
        let k_exps = (0..section.ncols())
            .map(|j| {
                let &lift = section
                    .col(j)
                    .keys()
                    .next()
                    .expect("nonzero section column");
                self.k_exps[lift].clone()
            })
            .collect();
        let b = self.b.iter().map(|x| proj.mul(&x.mul(section))).collect();
        IModule {
            rank: self.rank,
            k_exps,
            b,
        }
    }
}

/// Matrix of `B_i` on a `U`-module.
pub fn coideal_generator_matrix(
    m: &UModule,
    i: usize,
    cfg: &QSPConfig,
    params: &CoidealParams,
) -> SparseMat<LaurentPoly> {
    let t = cfg.theta(i);
    let kinv = m.k_mat(i, -1);
    let (p, s) = match cfg.convention {
        Convention::Part2 => (&m.f[i], &m.e[t]),
        Convention::Part3 => (&m.e[i], &m.f[t]),
    };
    p.add(&s.mul(&kinv).scale(&params.twist(i, cfg.convention)))
        .add(&kinv.scale(&params.kappa[i]))
}

/// Applies `B_i` (or `k_i` when `cartan` is set) to a vector of a `U`-module.
pub fn coideal_generator_action(
    m: &UModule,
    i: usize,
    cartan_part: bool,
    v: &BTreeMap<usize, LaurentPoly>,
    cfg: &QSPConfig,
) -> BTreeMap<usize, LaurentPoly> {
    if cartan_part {
        let t = cfg.theta(i);
        v.iter()
            .map(|(&a, c)| (a, c.mul(&LaurentPoly::q_pow(m.k_exp(a, i) - m.k_exp(a, t)))))
            .collect()
    } else {
        coideal_generator_matrix(m, i, cfg, &cfg.params()).apply(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonComponent {
    pub weight: RootLatticeVec,
    pub value: UPlusElement,
}

/// The intertwiner `Upsilon = sum_mu Upsilon_mu`, in `Part2` terms (an element
/// of `U^+`). Under `Part3` it acts through `F`s with barred coefficients.
#[derive(Debug)]
pub struct Upsilon {
    cfg: QSPConfig,
    params: CoidealParams,
    falg: FAlgebra,
    comps: Mutex<BTreeMap<RootLatticeVec, UPlusElement>>,
}

fn qmq() -> RatFunc {
    RatFunc::from_laurent(&LaurentPoly::q_minus_qinv())
}

impl Upsilon {
    pub fn new(cfg: &QSPConfig) -> Result<Self> {
        Self::with_params(cfg, cfg.params())
    }

    pub fn with_params(cfg: &QSPConfig, params: CoidealParams) -> Result<Self> {
        cfg.validate()?;
        let nodes = cfg.nodes();
        let comps = BTreeMap::from([(RootLatticeVec::zero(nodes), UPlusElement::one(nodes))]);
        Ok(Upsilon {
            cfg: cfg.clone(),
            params,
            falg: FAlgebra::new(nodes, cfg.height_cap),
            comps: Mutex::new(comps),
        })
    }

    pub fn falgebra(&self) -> &FAlgebra {
        &self.falg
    }

    pub fn config(&self) -> &QSPConfig {
        &self.cfg
    }

    fn lookup(&self, mu: &RootLatticeVec) -> Result<UPlusElement> {
        if !mu.is_nonneg() {
            return Ok(UPlusElement::zero(mu.clone()));
        }
        self.component(mu)
    }

    /// `Upsilon_mu`, solved from both families of derivation equations.
    pub fn component(&self, mu: &RootLatticeVec) -> Result<UPlusElement> {
        if let Some(v) = self.comps.lock().unwrap().get(mu) {
            return Ok(v.clone());
        }
        if mu.height() > self.cfg.height_cap {
            return Err(Error::HeightCapExceeded {
                height: mu.height() as i64,
                cap: self.cfg.height_cap as i64,
            });
        }
        let nodes = self.cfg.nodes();
        let mut right = Vec::with_capacity(nodes);
        let mut left = Vec::with_capacity(nodes);
        let mut any = false;
        for i in 0..nodes {
            if mu.0[i] == 0 {
                right.push(None);
                left.push(None);
                continue;
            }
            let t = self.cfg.theta(i);
            let ai = RootLatticeVec::simple(nodes, i);
            let at = RootLatticeVec::simple(nodes, t);
            let target_weight = mu.sub(&ai);
            let prev2 = self.lookup(&mu.sub(&ai).sub(&at))?;
            let prev1 = self.lookup(&mu.sub(&ai))?;
            let et = UPlusElement::monomial(nodes, vec![t]);
            let s = RatFunc::from_laurent(&self.params.varsigma[i]);
            let kappa = RatFunc::from_laurent(&self.params.kappa[i]);
            let factor = qmq().neg();
            let mut r = UPlusElement::zero(target_weight.clone());
            let mut l = UPlusElement::zero(target_weight);
            if !prev2.is_zero() {
                r = r.add(&prev2.mul(&et).scale(&s.bar()));
                let twist = RatFunc::from_laurent(&LaurentPoly::q_pow(cartan(i, t)));
                l = l.add(&et.mul(&prev2).scale(&s.mul(&twist)));
            }
            if !prev1.is_zero() && !kappa.is_zero() {
                r = r.add(&prev1.scale(&kappa));
                l = l.add(&prev1.scale(&kappa));
            }
            any |= !r.is_zero() || !l.is_zero();
            right.push(Some(r.scale(&factor)));
            left.push(Some(l.scale(&factor)));
        }
        let value = if !any {
            UPlusElement::zero(mu.clone())
        } else {
            let wb = self.falg.weight_basis(mu)?;
            match self.falg.solve_by_derivations(mu, &right, &left)? {
                Solution::Unique(x) => {
                    let plain = wb
                        .words
                        .iter()
                        .cloned()
                        .zip(x)
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    UPlusElement::from_plain(mu.clone(), &plain)
                }
                Solution::Underdetermined(..) => {
                    return Err(Error::InconsistentUpsilon {
                        weight: format!("{:?}", mu.0),
                        relation: "derivation system is underdetermined".into(),
                    })
                }
                Solution::Inconsistent => {
                    return Err(Error::InconsistentUpsilon {
                        weight: format!("{:?}", mu.0),
                        relation: "the B_i intertwining equations have no common solution".into(),
                    })
                }
            }
        };
        self.comps.lock().unwrap().insert(mu.clone(), value.clone());
        Ok(value)
    }

    pub fn upsilon_component(&self, mu: &RootLatticeVec) -> Result<UpsilonComponent> {
        Ok(UpsilonComponent {
            weight: mu.clone(),
            value: self.component(mu)?,
        })
    }

    /// Component of `Upsilon^-1 = psi(Upsilon)`.
    pub fn upsilon_inverse_component(&self, mu: &RootLatticeVec) -> Result<UpsilonComponent> {
        Ok(UpsilonComponent {
            weight: mu.clone(),
            value: self.component(mu)?.bar(),
        })
    }

    /// Checks `sum_{a + b = mu} Upsilon_a psi(Upsilon_b) = delta_{mu,0}`.
    pub fn check_inverse(&self, mu: &RootLatticeVec) -> Result<bool> {
        let nodes = self.cfg.nodes();
        let mut acc = UPlusElement::zero(mu.clone());
        for a in sub_weights(mu) {
            let b = mu.sub(&a);
            let (x, y) = (self.component(&a)?, self.component(&b)?);
            if !x.is_zero() && !y.is_zero() {
                acc = acc.add(&x.mul(&y.bar()));
            }
        }
        let expected = if mu.is_zero() {
            UPlusElement::one(nodes)
        } else {
            UPlusElement::zero(mu.clone())
        };
        self.falg.equal(&acc, &expected)
    }

    /// Every component of height at most the cap.
    pub fn all_components(&self) -> Result<Vec<UpsilonComponent>> {
        let nodes = self.cfg.nodes();
        let mut out = Vec::new();
        for mu in weights_up_to(nodes, self.cfg.height_cap) {
            out.push(self.upsilon_component(&mu)?);
        }
        Ok(out)
    }

    /// The action of `Upsilon` (or of `Upsilon^-1` when `inverse`) on a module.
    pub fn operator(&self, m: &UModule, inverse: bool) -> Result<SparseMat<RatFunc>> {
        let mut total = SparseMat::identity(m.dim()).map(RatFunc::from_laurent);
        for mu in module_raising_weights(m) {
            let mut x = self.component(&mu)?;
            if inverse {
                x = x.bar();
            }
            if x.is_zero() {
                continue;
            }
            let op = match self.cfg.convention {
                Convention::Part2 => m.uplus_action(&x, true),
                Convention::Part3 => m.uplus_action(&x.bar(), false),
            };
            total = total.add(&op);
        }
        Ok(total)
    }
}

/// All `b` with `0 <= b <= mu` componentwise.
pub fn sub_weights(mu: &RootLatticeVec) -> Vec<RootLatticeVec> {
    let mut out = vec![Vec::new()];
    for &c in &mu.0 {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i32>| {
                (0..=c).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(RootLatticeVec).collect()
}

/// Every `mu` in `N I` with `0 < ht(mu) <= cap`.
pub fn weights_up_to(nodes: usize, cap: i32) -> Vec<RootLatticeVec> {
    let mut out = Vec::new();
    let mut cur = vec![RootLatticeVec::zero(nodes)];
    for _ in 0..cap {
        let mut next = std::collections::BTreeSet::new();
        for w in &cur {
            for i in 0..nodes {
                next.insert(w.add(&RootLatticeVec::simple(nodes, i)));
            }
        }
        cur = next.into_iter().collect();
        out.extend(cur.iter().cloned());
    }
    out
}

/// Nonzero weights `mu >= 0` occurring as `wt(a) - wt(b)` in a module.
pub fn module_raising_weights(m: &UModule) -> Vec<RootLatticeVec> {
    let mut s = std::collections::BTreeSet::new();
    for a in 0..m.dim() {
        for b in 0..m.dim() {
            let d = m.weight_diff(a, b);
            if d.is_nonneg() && !d.is_zero() {
                s.insert(d);
            }
        }
    }
    s.into_iter().collect()
}

/// `Theta^i = Upsilon^{M(x)N} Theta (Upsilon^M^-1 (x) 1)` on `M (x) N`, split by
/// the weight `mu` by which the second leg moves (up in `Part2`, down in `Part3`).
pub fn theta_i_components(
    ups: &Upsilon,
    m: &UModule,
    n: &UModule,
) -> Result<BTreeMap<RootLatticeVec, SparseMat<RatFunc>>> {
    let cfg = ups.config();
    let mn = UModule::tensor(m, n, cfg.convention);
    let theta = UModule::theta_operator(m, n, cfg.convention, ups.falgebra())?;
    let left = ups.operator(&mn, false)?;
    let right = SparseMat::kron(
        &ups.operator(m, true)?,
        &SparseMat::identity(n.dim()).map(RatFunc::from_laurent),
    );
    let full = left.mul(&theta).mul(&right);
    let mut parts: BTreeMap<RootLatticeVec, SparseMat<RatFunc>> = BTreeMap::new();
    let d = mn.dim();
    for (row, col, v) in full.entries() {
        let (nr, nc) = (row % n.dim(), col % n.dim());
        let mu = match cfg.convention {
            Convention::Part2 => n.weight_diff(nr, nc),
            Convention::Part3 => n.weight_diff(nc, nr),
        };
        parts
            .entry(mu)
            .or_insert_with(|| SparseMat::zeros(d, d))
            .set(row, col, v.clone());
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rl(v: &[i32]) -> RootLatticeVec {
        RootLatticeVec(v.to_vec())
    }

    #[test]
    fn sl2_generator_matrix() {
        let cfg = QSPConfig::new(2, Convention::Part2);
        let v = UModule::natural(2);
        let b = coideal_generator_matrix(&v, 0, &cfg, &cfg.params());
        // F + q^-1 E K^-1 + K^-1 with K v_0 = q v_0
        assert_eq!(b.get(1, 0), LaurentPoly::one());
        assert_eq!(b.get(0, 1), LaurentPoly::one());
        assert_eq!(b.get(0, 0), LaurentPoly::qinv());
        assert_eq!(b.get(1, 1), LaurentPoly::q());
    }

    #[test]
    fn coideal_tensor_matches_restriction() {
        for rank in [2, 3, 4] {
            for conv in [Convention::Part2, Convention::Part3] {
                let cfg = QSPConfig::new(rank, conv);
                let p = cfg.params();
                let v = UModule::natural(rank);
                let w = UModule::dual(rank);
                let vw = UModule::tensor(&v, &w, conv);
                let direct = IModule::restrict(&vw, &cfg, &p);
                let via = IModule::restrict(&v, &cfg, &p).tensor(&w, &cfg, &p);
                assert_eq!(direct, via, "rank {rank} {conv:?}");
            }
        }
    }

    #[test]
    fn sl2_upsilon_is_consistent_and_integral() {
        let cfg = QSPConfig {
            height_cap: 6,
            ..QSPConfig::new(2, Convention::Part2)
        };
        let ups = Upsilon::new(&cfg).unwrap();
        for k in 0..=6 {
            let mu = rl(&[k]);
            let c = ups.component(&mu).unwrap();
            assert!(c.is_integral(), "{k}: {c:?}");
            assert!(ups.check_inverse(&mu).unwrap());
        }
        // first component: -(q - q^-1) kappa E
        let u1 = ups.component(&rl(&[1])).unwrap();
        assert_eq!(u1, UPlusElement::monomial(1, vec![0]).scale(&qmq().neg()));
    }

    #[test]
    fn upsilon_with_q_at_fixed_node_is_inconsistent() {
        let cfg = QSPConfig {
            height_cap: 4,
            ..QSPConfig::new(2, Convention::Part2)
        };
        let mut params = cfg.params();
        params.varsigma[0] = LaurentPoly::q();
        let ups = Upsilon::with_params(&cfg, params).unwrap();
        let failure = (1..=4)
            .map(|k| ups.component(&rl(&[k])))
            .find(|r| r.is_err());
        assert!(matches!(
            failure,
            Some(Err(Error::InconsistentUpsilon { .. }))
        ));
    }

    #[test]
    fn upsilon_intertwines_on_modules() {
        for rank in [2, 3, 4] {
            for conv in [Convention::Part2, Convention::Part3] {
                let cfg = QSPConfig {
                    height_cap: 6,
                    ..QSPConfig::new(rank, conv)
                };
                let ups = Upsilon::new(&cfg).unwrap();
                let v = UModule::natural(rank);
                let w = UModule::dual(rank);
                let m = if rank < 4 {
                    UModule::tensor(&UModule::tensor(&v, &v, conv), &w, conv)
                } else {
                    UModule::tensor(&v, &w, conv)
                };
                let u = ups.operator(&m, false).unwrap();
                let p = cfg.params();
                for i in 0..cfg.nodes() {
                    let b = coideal_generator_matrix(&m, i, &cfg, &p).map(RatFunc::from_laurent);
                    // psi(B_i) has every scalar barred and K^-1 replaced by K
                    let bar_b = psi_of_generator(&m, i, &cfg, &p).map(RatFunc::from_laurent);
                    assert_eq!(b.mul(&u), u.mul(&bar_b), "rank {rank} {conv:?} node {i}");
                }
                let uinv = ups.operator(&m, true).unwrap();
                assert!(u.mul(&uinv).is_identity());
            }
        }
    }

    /// `psi(B_i)` acting on a module whose standard basis is bar-invariant.
    fn psi_of_generator(
        m: &UModule,
        i: usize,
        cfg: &QSPConfig,
        p: &CoidealParams,
    ) -> SparseMat<LaurentPoly> {
        let t = cfg.theta(i);
        let k = m.k_mat(i, 1);
        let (pp, s) = match cfg.convention {
            Convention::Part2 => (&m.f[i], &m.e[t]),
            Convention::Part3 => (&m.e[i], &m.f[t]),
        };
        pp.add(&s.mul(&k).scale(&p.twist(i, cfg.convention).bar()))
            .add(&k.scale(&p.kappa[i].bar()))
    }
}
