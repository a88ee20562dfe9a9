//! Class-group layers of a tower presented as `(X̄, C̄)`.
//!
//! Level `n` of the tower is `A_n = X̄ / omega_n C̄`. The procedures here
//! compute those layers, test the stabilization statements (level 0 against
//! level 1, modulo `p^k` or in full), fit `e_n = μ p^n + λ n + ν`, and give
//! the growth of elementary `Λ`-modules `⊕ Λ/(p^{μ_i}) ⊕ Λ/(P_j^{k_j})`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::AbelianType;
use crate::lambda::{companion_quotient, CompanionOptions, DistinguishedPoly};
use crate::module::{Element, FiniteHModule, Submodule};
use crate::padic::ModMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TowerLength {
    /// `H ≅ Z/p^d`, levels `0..=d`.
    Finite(u32),
    /// `H ≅ Z_p`.
    Unbounded,
}

impl TowerLength {
    pub fn check_level(&self, n: u32) -> Result<()> {
        match *self {
            TowerLength::Finite(d) if n > d => Err(Error::LevelOutOfRange { level: n, length: d }),
            _ => Ok(()),
        }
    }
}

/// `X̄` with its distinguished submodule `C̄ ⊇ (σ - 1) X̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerInstance {
    module: FiniteHModule,
    c_bar: Submodule,
    length: TowerLength,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerRecord {
    pub n: u32,
    pub group: AbelianType,
    /// `log_p |A_n|`.
    pub e: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerReport {
    pub levels: Vec<LayerRecord>,
    /// First `n` with `A_n ≅ A_{n+1}`, after which every computed layer agrees.
    pub stable_from: Option<u32>,
}

impl LayerReport {
    fn from_types(types: Vec<AbelianType>) -> Result<Self> {
        let levels: Vec<LayerRecord> = types
            .into_iter()
            .enumerate()
            .map(|(n, group)| LayerRecord { n: n as u32, e: group.log_order(), group })
            .collect();
        let stable_from = levels.windows(2).position(|w| w[0].group == w[1].group);
        if let Some(s) = stable_from {
            if let Some(bad) = levels[s..].iter().find(|r| r.group != levels[s].group) {
                return Err(Error::TheoremViolation {
                    level: bad.n,
                    detail: "layers changed after A_n ≅ A_{n+1}",
                });
            }
        }
        Ok(LayerReport { levels, stable_from: stable_from.map(|s| s as u32) })
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.levels.iter().map(|r| r.e).collect()
    }
}

/// How much of `A_n` the stabilization statement compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilizationDepth {
    /// `A / p^k A`.
    Mod(u32),
    /// `A` itself.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationVerdict {
    pub depth: StabilizationDepth,
    pub hypothesis_holds: bool,
    /// Whether the conclusion was checked at every level `1..=n_max` (only when the hypothesis holds).
    pub conclusion_verified: bool,
    /// `C̄ ⊆ p^k X̄`, evaluated when the hypothesis holds.
    pub c_in_pk_x: Option<bool>,
    pub n_max: u32,
}

impl TowerInstance {
    pub fn new(module: FiniteHModule, c_bar: Submodule, length: TowerLength) -> Result<Self> {
        if !module.is_h_stable(&c_bar)? {
            return Err(Error::NotTowerInstance("C̄ is not σ-stable"));
        }
        let t = module.t_endo();
        for j in 0..module.rank() {
            if !module.contains(&c_bar, &module.apply_endo(&t, &module.basis(j)))? {
                return Err(Error::NotTowerInstance("(σ - 1)X̄ is not contained in C̄"));
            }
        }
        if let TowerLength::Finite(d) = length {
            if module.order_exponent() > d {
                return Err(Error::NotTowerInstance("σ^{p^d} is not the identity"));
            }
        }
        Ok(TowerInstance { module, c_bar, length })
    }

    /// `C̄` spanned by `(σ - 1)X̄` and the given extra elements.
    pub fn from_generators(module: FiniteHModule, extra: &[Element], length: TowerLength) -> Result<Self> {
        let t = module.t_endo();
        let mut gens: Vec<Element> =
            (0..module.rank()).map(|j| module.apply_endo(&t, &module.basis(j))).collect();
        gens.extend(extra.iter().cloned());
        let c_bar = module.span(&gens)?;
        TowerInstance::new(module, c_bar, length)
    }

    pub fn module(&self) -> &FiniteHModule {
        &self.module
    }

    pub fn c_bar(&self) -> &Submodule {
        &self.c_bar
    }

    pub fn length(&self) -> TowerLength {
        self.length
    }

    pub fn p(&self) -> u64 {
        self.module.p()
    }

    /// `omega_n C̄`.
    pub fn scaled_c(&self, n: u32) -> Result<Submodule> {
        self.length.check_level(n)?;
        self.module.endo_image(&self.module.omega_endo(n), &self.c_bar)
    }

    /// `A_n = X̄ / omega_n C̄`.
    pub fn layer(&self, n: u32) -> Result<AbelianType> {
        self.module.quotient_type(&self.scaled_c(n)?)
    }

    /// Layers `0..=n_max`, checking that each `A_n → A_{n-1}` is onto.
    pub fn layer_sequence(&self, n_max: u32) -> Result<LayerReport> {
        self.length.check_level(n_max)?;
        let mut types = Vec::with_capacity(n_max as usize + 1);
        let mut prev: Option<Submodule> = None;
        for n in 0..=n_max {
            let s = self.scaled_c(n)?;
            if let Some(prev) = &prev {
                if !self.module.is_subset(&s, prev)? {
                    return Err(Error::TheoremViolation { level: n, detail: "omega_n C̄ ⊄ omega_{n-1} C̄" });
                }
            }
            types.push(self.module.quotient_type(&s)?);
            prev = Some(s);
        }
        LayerReport::from_types(types)
    }

    fn witness_k(&self, depth: StabilizationDepth) -> u32 {
        match depth {
            StabilizationDepth::Mod(k) => k,
            StabilizationDepth::Full => self.module.exponents().first().copied().unwrap_or(0),
        }
    }

    fn witness(&self, depth: StabilizationDepth) -> Result<bool> {
        let pk = self.module.multiples(self.witness_k(depth));
        self.module.is_subset(&self.c_bar, &pk)
    }

    fn stabilization(
        &self,
        depth: StabilizationDepth,
        n_max: u32,
        same: impl Fn(&AbelianType, &AbelianType) -> bool,
    ) -> Result<StabilizationVerdict> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1"));
        }
        if depth == StabilizationDepth::Mod(0) {
            return Err(Error::InvalidArgument("k must be at least 1"));
        }
        self.length.check_level(n_max)?;
        let a0 = self.layer(0)?;
        let a1 = self.layer(1)?;
        let mut verdict = StabilizationVerdict {
            depth,
            hypothesis_holds: same(&a0, &a1),
            conclusion_verified: false,
            c_in_pk_x: None,
            n_max,
        };
        if !verdict.hypothesis_holds {
            return Ok(verdict);
        }
        for n in 2..=n_max {
            if !same(&a0, &self.layer(n)?) {
                return Err(Error::TheoremViolation { level: n, detail: "A_n differs from A_0" });
            }
        }
        verdict.conclusion_verified = true;
        let w = self.witness(depth)?;
        verdict.c_in_pk_x = Some(w);
        if !w {
            return Err(Error::TheoremViolation { level: 1, detail: "C̄ ⊄ p^k X̄" });
        }
        Ok(verdict)
    }

    /// If `A_1/p^k ≅ A_0/p^k`, confirms `A_n/p^k ≅ A_0/p^k` for `n <= n_max` and `C̄ ⊆ p^k X̄`.
    pub fn check_stabilization(&self, depth: StabilizationDepth, n_max: u32) -> Result<StabilizationVerdict> {
        self.stabilization(depth, n_max, |a, b| match depth {
            StabilizationDepth::Mod(k) => a.mod_pk(k) == b.mod_pk(k),
            StabilizationDepth::Full => a == b,
        })
    }

    /// The same statement phrased with `p^i`-ranks for `i <= k`.
    pub fn rank_stabilization(&self, depth: StabilizationDepth, n_max: u32) -> Result<StabilizationVerdict> {
        self.stabilization(depth, n_max, |a, b| {
            let top = match depth {
                StabilizationDepth::Mod(k) => k,
                StabilizationDepth::Full => {
                    let ea = a.exponents().first().copied().unwrap_or(0);
                    let eb = b.exponents().first().copied().unwrap_or(0);
                    ea.max(eb)
                }
            };
            (1..=top).all(|i| a.rank_pi(i) == b.rank_pi(i))
        })
    }
}

/// `e_n = μ p^n + λ n + ν` for all `n >= n0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthFit {
    pub mu: u64,
    pub lambda: u64,
    pub nu: i64,
    pub n0: u32,
}

impl GrowthFit {
    pub fn predict(&self, p: u64, n: u32) -> Option<i128> {
        let pn = (p as i128).checked_pow(n)?;
        (self.mu as i128)
            .checked_mul(pn)?
            .checked_add(self.lambda as i128 * n as i128)?
            .checked_add(self.nu as i128)
    }
}

/// Smallest `n0` such that one exact `(μ, λ, ν)` fits every `e_n`, `n >= n0`, with at least
/// three points in the fitted suffix.
pub fn fit_growth(e: &[u64], p: u64) -> Result<GrowthFit> {
    if e.len() < 4 {
        return Err(Error::InvalidArgument("growth fitting needs at least 4 levels"));
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let pm1 = p as i128 - 1;
    for n0 in 0..=e.len() - 3 {
        let Some(pn0) = (p as i128).checked_pow(n0 as u32) else { break };
        let (e0, e1, e2) = (e[n0] as i128, e[n0 + 1] as i128, e[n0 + 2] as i128);
        let (d0, d1) = (e1 - e0, e2 - e1);
        let denom = pm1 * pm1 * pn0;
        let num = d1 - d0;
        if num < 0 || num % denom != 0 {
            continue;
        }
        let mu = num / denom;
        let lambda = d0 - mu * pm1 * pn0;
        if lambda < 0 {
            continue;
        }
        let nu = e0 - mu * pn0 - lambda * n0 as i128;
        let (Ok(mu), Ok(lambda), Ok(nu)) = (u64::try_from(mu), u64::try_from(lambda), i64::try_from(nu)) else {
            continue;
        };
        let fit = GrowthFit { mu, lambda, nu, n0: n0 as u32 };
        if (n0..e.len()).all(|n| fit.predict(p, n as u32) == Some(e[n] as i128)) {
            return Ok(fit);
        }
    }
    Err(Error::NoStableFit)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementarySummand {
    /// `Λ/(p^μ)`.
    PPower { mu: u32 },
    /// `Λ/(P^k)`.
    Distinguished { poly: DistinguishedPoly, power: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryModule {
    p: u64,
    summands: Vec<ElementarySummand>,
}

impl ElementaryModule {
    pub fn new(p: u64, summands: Vec<ElementarySummand>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::InvalidArgument("elementary module needs at least one summand"));
        }
        for s in &summands {
            match s {
                ElementarySummand::PPower { mu } if *mu == 0 => {
                    return Err(Error::InvalidArgument("p-power summand needs μ >= 1"))
                }
                ElementarySummand::Distinguished { poly, power } => {
                    if *power == 0 {
                        return Err(Error::InvalidArgument("distinguished summand needs k >= 1"));
                    }
                    if poly.params().p() != p {
                        return Err(Error::ParamsMismatch);
                    }
                }
                _ => {}
            }
        }
        Ok(ElementaryModule { p, summands })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn summands(&self) -> &[ElementarySummand] {
        &self.summands
    }

    /// `(Σ μ_i, Σ k_j deg P_j)`.
    pub fn expected_mu_lambda(&self) -> (u64, u64) {
        self.summands.iter().fold((0, 0), |(mu, la), s| match s {
            ElementarySummand::PPower { mu: m } => (mu + *m as u64, la),
            ElementarySummand::Distinguished { poly, power } => (mu, la + *power as u64 * poly.degree() as u64),
        })
    }

    /// Abelian type of `M / omega_n M`.
    pub fn layer(&self, n: u32, opts: CompanionOptions) -> Result<AbelianType> {
        let mut total = AbelianType::trivial();
        for s in &self.summands {
            let part = match s {
                ElementarySummand::PPower { mu } => {
                    let deg = self
                        .p
                        .checked_pow(n)
                        .filter(|&d| d <= 1 << 24)
                        .ok_or(Error::InvalidArgument("level too large for a p-power summand"))?
                        - 1;
                    AbelianType::from_exponents(vec![*mu; deg as usize])
                }
                ElementarySummand::Distinguished { poly, power } => {
                    companion_quotient(&poly.pow(*power), n, opts)?
                }
            };
            total = total.sum(&part);
        }
        Ok(total)
    }

    pub fn layers(&self, n_max: u32, opts: CompanionOptions) -> Result<LayerReport> {
        let types = (0..=n_max).map(|n| self.layer(n, opts)).collect::<Result<Vec<_>>>()?;
        LayerReport::from_types(types)
    }
}

/// Layers `0..=n_max` of an elementary module together with their growth fit.
pub fn elementary_growth(
    m: &ElementaryModule,
    n_max: u32,
    opts: CompanionOptions,
) -> Result<(LayerReport, GrowthFit)> {
    let report = m.layers(n_max, opts)?;
    let fit = fit_growth(&report.exponents(), m.p)?;
    Ok((report, fit))
}

/// Size limits for [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceBounds {
    /// `|X̄| <= p^max_log_order`.
    pub max_log_order: u32,
    pub max_rank: usize,
    /// Extra random generators of `C̄` beyond `(σ - 1)X̄`.
    pub max_extra_generators: usize,
    pub length: TowerLength,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        InstanceBounds { max_log_order: 8, max_rank: 4, max_extra_generators: 2, length: TowerLength::Unbounded }
    }
}

const RANDOM_RETRIES: usize = 64;

/// Deterministic random tower: `σ = 1 + N + pR` with `N` strictly upper triangular,
/// both respecting the divisibility constraints, and `C̄ = ⟨(σ - 1)X̄, extra⟩`.
pub fn random_instance(p: u64, bounds: InstanceBounds, seed: u64) -> Result<TowerInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RETRIES {
        let total = rng.random_range(0..=bounds.max_log_order);
        let mut exps = Vec::new();
        let mut left = total;
        while left > 0 && exps.len() < bounds.max_rank {
            let e = rng.random_range(1..=left);
            exps.push(e);
            left -= e;
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        if exps.is_empty() {
            let module = FiniteHModule::trivial(p)?;
            let c = module.zero_submodule();
            return TowerInstance::new(module, c, bounds.length);
        }

        let r = exps.len();
        let params = crate::padic::RingParams::new(p, exps[0])?;
        let unipotent_part = rng.random_bool(0.5);
        let mut sigma = ModMatrix::identity(params, r);
        for i in 0..r {
            let qi = p.pow(exps[i]);
            for j in 0..r {
                let gap = exps[i].saturating_sub(exps[j]);
                let mut entry = sigma.raw(i, j);
                if unipotent_part && i < j {
                    entry += p.pow(gap) * rng.random_range(0..qi);
                }
                entry += p.pow(gap.max(1)) * rng.random_range(0..qi);
                sigma.set_raw(i, j, entry % qi);
            }
        }
        let module = match FiniteHModule::from_matrix(&exps, sigma, crate::module::default_k_max(p, &exps)) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if let TowerLength::Finite(d) = bounds.length {
            if module.order_exponent() > d {
                continue;
            }
        }
        let extra_count = rng.random_range(0..=bounds.max_extra_generators);
        let extra: Vec<Element> = (0..extra_count)
            .map(|_| (0..r).map(|i| rng.random_range(0..p.pow(exps[i]))).collect())
            .collect();
        return TowerInstance::from_generators(module, &extra, bounds.length);
    }
    Err(Error::GenerationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::LambdaElement;
    use crate::padic::RingParams;

    fn z9(sigma: i64, c: &[Element]) -> TowerInstance {
        let m = FiniteHModule::new(3, &[2], &[[sigma]]).unwrap();
        let c = m.span(c).unwrap();
        TowerInstance::new(m, c, TowerLength::Unbounded).unwrap()
    }

    fn ty(e: &[u32]) -> AbelianType {
        AbelianType::from_exponents(e.iter().copied())
    }

    #[test]
    fn layer_examples() {
        let inst = z9(4, &[vec![3]]);
        assert_eq!(inst.layer(0).unwrap(), ty(&[1]));
        assert_eq!(inst.layer(1).unwrap(), ty(&[2]));
        assert_eq!(inst.layer(2).unwrap(), ty(&[2]));

        let m = FiniteHModule::new(3, &[2, 1], &[[1, 0], [0, 1]]).unwrap();
        let inst = TowerInstance::new(m.clone(), m.zero_submodule(), TowerLength::Unbounded).unwrap();
        for n in 0..5 {
            assert_eq!(inst.layer(n).unwrap(), m.abelian_type());
        }
    }

    #[test]
    fn rejects_invalid_instances() {
        let m = FiniteHModule::new(3, &[2], &[[4]]).unwrap();
        // (σ - 1)X = 3X must lie in C̄
        assert!(matches!(
            TowerInstance::new(m.clone(), m.zero_submodule(), TowerLength::Unbounded),
            Err(Error::NotTowerInstance(_))
        ));
        let c = m.full_submodule();
        assert!(matches!(TowerInstance::new(m.clone(), c.clone(), TowerLength::Finite(0)), Err(Error::NotTowerInstance(_))));
        let inst = TowerInstance::new(m, c, TowerLength::Finite(2)).unwrap();
        assert_eq!(inst.layer(3), Err(Error::LevelOutOfRange { level: 3, length: 2 }));
    }

    #[test]
    fn layer_sequence_examples() {
        let rep = z9(4, &[vec![3]]).layer_sequence(5).unwrap();
        assert_eq!(rep.exponents(), [1, 2, 2, 2, 2, 2]);
        assert_eq!(rep.stable_from, Some(1));

        let triv = FiniteHModule::trivial(5).unwrap();
        let inst = TowerInstance::new(triv.clone(), triv.zero_submodule(), TowerLength::Unbounded).unwrap();
        let rep = inst.layer_sequence(3).unwrap();
        assert!(rep.levels.iter().all(|r| r.group.is_trivial()));

        let m = FiniteHModule::new(3, &[1, 1], &[[1, 1], [0, 1]]).unwrap();
        let inst = TowerInstance::from_generators(m, &[], TowerLength::Unbounded).unwrap();
        let rep = inst.layer_sequence(3).unwrap();
        assert_eq!(rep.levels[0].group, ty(&[1]));
        for r in &rep.levels[1..] {
            assert_eq!(r.group, ty(&[1, 1]));
        }
    }

    #[test]
    fn stabilization_examples() {
        let inst = z9(1, &[vec![3]]);
        let v = inst.check_stabilization(StabilizationDepth::Mod(1), 6).unwrap();
        assert!(v.hypothesis_holds && v.conclusion_verified);
        assert_eq!(v.c_in_pk_x, Some(true));
        let full = inst.check_stabilization(StabilizationDepth::Full, 6).unwrap();
        assert!(!full.hypothesis_holds);
        assert_eq!(inst.rank_stabilization(StabilizationDepth::Mod(1), 6).unwrap(), v);

        let zero = z9(1, &[]);
        for depth in [StabilizationDepth::Mod(1), StabilizationDepth::Mod(2), StabilizationDepth::Full] {
            let v = zero.check_stabilization(depth, 4).unwrap();
            assert!(v.hypothesis_holds && v.conclusion_verified);
            assert_eq!(v.c_in_pk_x, Some(true));
        }
        assert!(matches!(zero.check_stabilization(StabilizationDepth::Mod(1), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn fit_examples() {
        assert_eq!(fit_growth(&[1, 2, 2, 2, 2], 3).unwrap(), GrowthFit { mu: 0, lambda: 0, nu: 2, n0: 1 });
        assert_eq!(fit_growth(&[0, 1, 2, 3, 4, 5], 3).unwrap(), GrowthFit { mu: 0, lambda: 1, nu: 0, n0: 0 });
        let e: Vec<u64> = (0..6).map(|n| 2u64.pow(n) - 1).collect();
        assert_eq!(fit_growth(&e, 2).unwrap(), GrowthFit { mu: 1, lambda: 0, nu: -1, n0: 0 });
        assert_eq!(fit_growth(&[0, 1, 5, 2], 3), Err(Error::NoStableFit));
        assert!(fit_growth(&[0, 1, 2], 3).is_err());
    }

    #[test]
    fn elementary_examples() {
        let opts = CompanionOptions::default();
        let pr = RingParams::new(3, 6).unwrap();
        let m = ElementaryModule::new(3, vec![ElementarySummand::PPower { mu: 1 }]).unwrap();
        let (rep, fit) = elementary_growth(&m, 4, opts).unwrap();
        assert_eq!(rep.exponents(), [0, 2, 8, 26, 80]);
        assert_eq!((fit.mu, fit.lambda, fit.nu), (1, 0, -1));

        let t = DistinguishedPoly::new(LambdaElement::t(pr)).unwrap();
        let m = ElementaryModule::new(3, vec![ElementarySummand::Distinguished { poly: t, power: 1 }]).unwrap();
        let (rep, fit) = elementary_growth(&m, 5, opts).unwrap();
        assert_eq!(rep.exponents(), [0, 1, 2, 3, 4, 5]);
        assert_eq!((fit.mu, fit.lambda, fit.nu), (0, 1, 0));

        let tp = DistinguishedPoly::new(LambdaElement::from_i64(pr, &[-3, 1])).unwrap();
        let m = ElementaryModule::new(
            3,
            vec![ElementarySummand::PPower { mu: 1 }, ElementarySummand::Distinguished { poly: tp, power: 1 }],
        )
        .unwrap();
        let (rep, fit) = elementary_growth(&m, 4, opts).unwrap();
        assert_eq!(rep.exponents(), [0, 3, 10, 29, 84]);
        assert_eq!((fit.mu, fit.lambda, fit.nu), (1, 1, -1));
        assert_eq!(m.expected_mu_lambda(), (1, 1));
    }

    #[test]
    fn random_instances_are_deterministic_and_valid() {
        let b = InstanceBounds::default();
        assert_eq!(random_instance(3, b, 11).unwrap(), random_instance(3, b, 11).unwrap());
        let tiny = InstanceBounds { max_log_order: 0, ..b };
        let inst = random_instance(3, tiny, 5).unwrap();
        assert_eq!(inst.module().rank(), 0);
        assert!(inst.c_bar().is_zero());
        for seed in 0..1000 {
            let inst = random_instance(3, b, seed).unwrap();
            assert!(inst.module().log_order() <= 8);
            // re-validate from parts
            TowerInstance::new(inst.module().clone(), inst.c_bar().clone(), inst.length()).unwrap();
        }
    }
}
