//! Finite abelian `p`-groups `X ≅ ⊕ Z/p^{e_i}` with an automorphism `σ` of
//! `p`-power order, viewed as modules over `Λ` through `T ↦ σ - 1`.
//!
//! Elements are residue vectors, component `i` reduced modulo `p^{e_i}`.
//! Structural questions (orders, membership, quotients) are answered by one
//! Smith form over `Z/p^{e_1}` of the generators stacked on the relations
//! `p^{e_i} e_i`.

use alloc::vec;
use alloc::vec::Vec;

use crate::abelian::AbelianType;
use crate::lambda::LambdaElement;
use crate::padic::{ModMatrix, RingParams};
use crate::{Error, Result};

pub type Element = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHModule {
    exponents: Vec<u32>,
    /// `Z/p^{e_1}`; every endomorphism matrix lives here.
    params: RingParams,
    sigma: ModMatrix,
    order_exponent: u32,
}

/// An `H`-stable subgroup, stored as a reduced generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    parent: Vec<u32>,
    generators: Vec<Element>,
    log_order: u64,
}

impl Submodule {
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// `log_p |S|`.
    pub fn log_order(&self) -> u64 {
        self.log_order
    }

    pub fn is_zero(&self) -> bool {
        self.log_order == 0
    }
}

/// Reduced span data of a subgroup.
struct Lattice {
    generators: Vec<Element>,
    quotient: Vec<u32>,
}

/// Default bound on `k` with `σ^{p^k} = 1`.
pub fn default_k_max(p: u64, exponents: &[u32]) -> u32 {
    let e1 = exponents.first().copied().unwrap_or(0);
    let r = exponents.len() as u64;
    let mut log = 0;
    let mut pk = 1u64;
    while pk < r {
        pk = pk.saturating_mul(p);
        log += 1;
    }
    e1 + log + 2
}

/// Validated construction from integer matrix rows; see [`FiniteHModule::new`].
pub fn make_module<R: AsRef<[i64]>>(p: u64, exponents: &[u32], sigma: &[R]) -> Result<FiniteHModule> {
    FiniteHModule::new(p, exponents, sigma)
}

impl FiniteHModule {
    /// `sigma[i][j]` is the `i`-th coordinate of `σ(e_j)`.
    pub fn new<R: AsRef<[i64]>>(p: u64, exponents: &[u32], sigma: &[R]) -> Result<Self> {
        FiniteHModule::with_k_max(p, exponents, sigma, default_k_max(p, exponents))
    }

    pub fn with_k_max<R: AsRef<[i64]>>(
        p: u64,
        exponents: &[u32],
        sigma: &[R],
        k_max: u32,
    ) -> Result<Self> {
        let params = Self::ring_for(p, exponents)?;
        if sigma.len() != exponents.len() {
            return Err(Error::DimensionMismatch);
        }
        let m = if exponents.is_empty() {
            ModMatrix::zero(params, 0, 0)
        } else {
            ModMatrix::from_rows(params, sigma)?
        };
        if m.cols() != exponents.len() {
            return Err(Error::DimensionMismatch);
        }
        Self::from_matrix(exponents, m, k_max)
    }

    /// The trivial module.
    pub fn trivial(p: u64) -> Result<Self> {
        let params = RingParams::new(p, 1)?;
        Self::from_matrix(&[], ModMatrix::zero(params, 0, 0), 0)
    }

    fn ring_for(p: u64, exponents: &[u32]) -> Result<RingParams> {
        if exponents.windows(2).any(|w| w[0] < w[1]) || exponents.contains(&0) {
            return Err(Error::UnsortedExponents);
        }
        RingParams::new(p, exponents.first().copied().unwrap_or(1))
    }

    /// Validates `sigma` given over `Z/p^{e_1}` (any ring with the same prime is re-read there).
    pub fn from_matrix(exponents: &[u32], sigma: ModMatrix, k_max: u32) -> Result<Self> {
        let params = Self::ring_for(sigma.params().p(), exponents)?;
        let r = exponents.len();
        if sigma.rows() != r || sigma.cols() != r {
            return Err(Error::DimensionMismatch);
        }
        let sigma = sigma.lift_to(params)?;
        let mut module = FiniteHModule {
            exponents: exponents.to_vec(),
            params,
            sigma: ModMatrix::zero(params, r, r),
            order_exponent: 0,
        };
        module.check_endomorphism(&sigma)?;
        module.sigma = module.normalize_endo(&sigma);

        let images: Vec<Element> = (0..r).map(|j| module.apply_endo(&module.sigma, &module.basis(j))).collect();
        if module.lattice(&images).quotient.iter().any(|&d| d > 0) {
            return Err(Error::NotAutomorphism);
        }

        let id = ModMatrix::identity(params, r);
        let mut s = module.sigma.clone();
        let mut k = 0;
        loop {
            if module.endo_eq(&s, &id) {
                break;
            }
            if k >= k_max {
                return Err(Error::OrderNotPPower);
            }
            s = s.pow(params.p())?;
            k += 1;
        }
        module.order_exponent = k;
        Ok(module)
    }

    /// Checks `M[i][j] ≡ 0 mod p^{max(0, e_i - e_j)}`, i.e. `M` induces an endomorphism.
    pub fn check_endomorphism(&self, m: &ModMatrix) -> Result<()> {
        let r = self.rank();
        if m.rows() != r || m.cols() != r {
            return Err(Error::DimensionMismatch);
        }
        let p = self.p();
        for i in 0..r {
            for j in 0..r {
                let gap = self.exponents[i].saturating_sub(self.exponents[j]);
                if gap > 0 && m.raw(i, j) % p.pow(gap) != 0 {
                    return Err(Error::WellDefinednessViolation { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    fn normalize_endo(&self, m: &ModMatrix) -> ModMatrix {
        let mut out = m.clone();
        for i in 0..self.rank() {
            let q = self.component_modulus(i);
            for j in 0..self.rank() {
                out.set_raw(i, j, m.raw(i, j) % q);
            }
        }
        out
    }

    pub fn p(&self) -> u64 {
        self.params.p()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// `Z/p^{e_1}`.
    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn sigma(&self) -> &ModMatrix {
        &self.sigma
    }

    /// Minimal `k` with `σ^{p^k} = 1`.
    pub fn order_exponent(&self) -> u32 {
        self.order_exponent
    }

    /// `log_p |X|`.
    pub fn log_order(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum()
    }

    /// `|X|`, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.p().checked_pow(u32::try_from(self.log_order()).ok()?)
    }

    pub fn abelian_type(&self) -> AbelianType {
        AbelianType::from_exponents(self.exponents.iter().copied())
    }

    fn component_modulus(&self, i: usize) -> u64 {
        self.p().pow(self.exponents[i])
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn basis(&self, j: usize) -> Element {
        let mut e = self.zero();
        e[j] = 1 % self.component_modulus(j);
        e
    }

    pub fn reduce(&self, x: &[u64]) -> Element {
        x.iter().enumerate().map(|(i, &v)| v % self.component_modulus(i)).collect()
    }

    pub fn reduce_i64(&self, x: &[i64]) -> Result<Element> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch);
        }
        Ok(x.iter()
            .enumerate()
            .map(|(i, &v)| v.rem_euclid(self.component_modulus(i) as i64) as u64)
            .collect())
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        (0..self.rank()).map(|i| (x[i] + y[i]) % self.component_modulus(i)).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        (0..self.rank())
            .map(|i| {
                let q = self.component_modulus(i);
                (q - x[i] % q) % q
            })
            .collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Element {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &[u64], c: u64) -> Element {
        (0..self.rank())
            .map(|i| {
                let q = self.component_modulus(i);
                ((x[i] as u128 * (c % q) as u128) % q as u128) as u64
            })
            .collect()
    }

    pub fn is_zero_element(&self, x: &[u64]) -> bool {
        x.iter().enumerate().all(|(i, &v)| v % self.component_modulus(i) == 0)
    }

    /// Applies an endomorphism matrix over `Z/p^{e_1}`.
    pub fn apply_endo(&self, m: &ModMatrix, x: &[u64]) -> Element {
        let y = m.apply(x).expect("endomorphism dimension");
        self.reduce(&y)
    }

    /// Equality as endomorphisms of `X`.
    pub fn endo_eq(&self, a: &ModMatrix, b: &ModMatrix) -> bool {
        (0..self.rank()).all(|i| {
            let q = self.component_modulus(i);
            (0..self.rank()).all(|j| a.raw(i, j) % q == b.raw(i, j) % q)
        })
    }

    pub fn identity_endo(&self) -> ModMatrix {
        ModMatrix::identity(self.params, self.rank())
    }

    pub fn sigma_apply(&self, x: &[u64]) -> Element {
        self.apply_endo(&self.sigma, x)
    }

    /// `σ - 1`, the action of `T`.
    pub fn t_endo(&self) -> ModMatrix {
        self.sigma.try_sub(&self.identity_endo()).expect("square")
    }

    /// `omega_n(σ - 1) = Σ_{j < p^n} σ^j`.
    pub fn omega_endo(&self, n: u32) -> ModMatrix {
        self.sigma.omega_sum(n).expect("square")
    }

    /// Evaluates `f` at `T = σ - 1` and applies it to `x`.
    ///
    /// `f` must carry at least `e_1` digits of precision.
    pub fn lambda_act(&self, f: &LambdaElement, x: &[u64]) -> Result<Element> {
        if f.params().p() != self.p() {
            return Err(Error::ParamsMismatch);
        }
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch);
        }
        if f.params().precision() < self.params.precision() && self.rank() > 0 {
            return Err(Error::PrecisionExhausted);
        }
        let t = self.t_endo();
        let x = self.reduce(x);
        let mut acc = self.zero();
        for &c in f.coeffs().iter().rev() {
            let shifted = self.apply_endo(&t, &acc);
            acc = self.add(&shifted, &self.scale(&x, c));
        }
        Ok(acc)
    }

    /// Endomorphism matrix of `f(σ - 1)`.
    pub fn lambda_endo(&self, f: &LambdaElement) -> Result<ModMatrix> {
        if f.params().p() != self.p() {
            return Err(Error::ParamsMismatch);
        }
        if f.params().precision() < self.params.precision() && self.rank() > 0 {
            return Err(Error::PrecisionExhausted);
        }
        f.lift_to(self.params)?.eval_matrix(&self.t_endo())
    }

    fn lattice(&self, gens: &[Element]) -> Lattice {
        let r = self.rank();
        if r == 0 {
            return Lattice { generators: Vec::new(), quotient: Vec::new() };
        }
        let pr = self.params;
        let mut rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut row = vec![0; r];
                row[i] = pr.p_pow(self.exponents[i]);
                row
            })
            .collect();
        rows.extend(gens.iter().map(|g| g.clone()));
        let m = ModMatrix::from_residue_rows(pr, r, &rows).expect("generator length");
        let smith = m.smith_form();
        let cap = pr.precision();
        let mut generators = Vec::new();
        for (j, &d) in smith.exponents.iter().enumerate() {
            if d < cap {
                let row = smith.right_inverse.row(j);
                let g = self.scale(row, pr.p_pow(d));
                if !self.is_zero_element(&g) {
                    generators.push(g);
                }
            }
        }
        Lattice { generators, quotient: smith.exponents }
    }

    fn log_quotient(&self, l: &Lattice) -> u64 {
        l.quotient.iter().map(|&d| d as u64).sum()
    }

    fn check_elements(&self, gens: &[Element]) -> Result<()> {
        if gens.iter().any(|g| g.len() != self.rank()) {
            Err(Error::DimensionMismatch)
        } else {
            Ok(())
        }
    }

    fn check_parent(&self, s: &Submodule) -> Result<()> {
        if s.parent == self.exponents {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    fn submodule_from(&self, l: Lattice) -> Submodule {
        let log_order = self.log_order() - self.log_quotient(&l);
        Submodule { parent: self.exponents.clone(), generators: l.generators, log_order }
    }

    /// The subgroup generated by `gens`, without closing under `σ`.
    pub fn subgroup_type_of_quotient(&self, gens: &[Element]) -> Result<AbelianType> {
        self.check_elements(gens)?;
        let gens: Vec<Element> = gens.iter().map(|g| self.reduce(g)).collect();
        Ok(AbelianType::from_exponents(self.lattice(&gens).quotient))
    }

    /// Smallest `σ`-stable subgroup containing `gens`.
    pub fn span(&self, gens: &[Element]) -> Result<Submodule> {
        self.check_elements(gens)?;
        let gens: Vec<Element> = gens.iter().map(|g| self.reduce(g)).collect();
        let mut current = self.lattice(&gens);
        loop {
            let mut cand = current.generators.clone();
            cand.extend(current.generators.iter().map(|g| self.sigma_apply(g)));
            let next = self.lattice(&cand);
            if self.log_quotient(&next) == self.log_quotient(&current) {
                return Ok(self.submodule_from(next));
            }
            current = next;
        }
    }

    pub fn zero_submodule(&self) -> Submodule {
        Submodule { parent: self.exponents.clone(), generators: Vec::new(), log_order: 0 }
    }

    pub fn full_submodule(&self) -> Submodule {
        let gens: Vec<Element> = (0..self.rank()).map(|j| self.basis(j)).collect();
        self.span(&gens).expect("basis vectors")
    }

    /// `p^k X`.
    pub fn multiples(&self, k: u32) -> Submodule {
        let pk = self.p().checked_pow(k).unwrap_or(0);
        let gens: Vec<Element> = (0..self.rank()).map(|j| self.scale(&self.basis(j), pk)).collect();
        self.span(&gens).expect("basis vectors")
    }

    /// Abelian invariants of `X / S`.
    pub fn quotient_type(&self, s: &Submodule) -> Result<AbelianType> {
        self.check_parent(s)?;
        Ok(AbelianType::from_exponents(self.lattice(&s.generators).quotient))
    }

    pub fn contains(&self, s: &Submodule, x: &[u64]) -> Result<bool> {
        self.check_parent(s)?;
        self.check_elements(core::slice::from_ref(&x.to_vec()))?;
        let mut gens = s.generators.clone();
        gens.push(self.reduce(x));
        Ok(self.log_order() - self.log_quotient(&self.lattice(&gens)) == s.log_order)
    }

    pub fn is_subset(&self, a: &Submodule, b: &Submodule) -> Result<bool> {
        self.check_parent(a)?;
        for g in &a.generators {
            if !self.contains(b, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_h_stable(&self, s: &Submodule) -> Result<bool> {
        for g in &s.generators {
            if !self.contains(s, &self.sigma_apply(g))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum_submodules(&self, a: &Submodule, b: &Submodule) -> Result<Submodule> {
        self.check_parent(a)?;
        self.check_parent(b)?;
        let mut gens = a.generators.clone();
        gens.extend(b.generators.iter().cloned());
        self.span(&gens)
    }

    /// `f · S`, spanned by `f(σ - 1) g` over the generators `g` of `S`.
    pub fn scale_submodule(&self, f: &LambdaElement, s: &Submodule) -> Result<Submodule> {
        self.check_parent(s)?;
        let gens = s
            .generators
            .iter()
            .map(|g| self.lambda_act(f, g))
            .collect::<Result<Vec<_>>>()?;
        self.span(&gens)
    }

    /// Image of `S` under an endomorphism commuting with `σ`.
    pub fn endo_image(&self, m: &ModMatrix, s: &Submodule) -> Result<Submodule> {
        self.check_parent(s)?;
        let gens: Vec<Element> = s.generators.iter().map(|g| self.apply_endo(m, g)).collect();
        self.span(&gens)
    }

    /// `X / S` with its induced action, plus the projection matrix `X → X/S`.
    pub fn quotient_module(&self, s: &Submodule) -> Result<(FiniteHModule, ModMatrix)> {
        self.quotient_with_lifts(s).map(|(q, proj, _)| (q, proj))
    }

    /// As [`Self::quotient_module`], also returning a preimage in `X` of each new basis vector.
    pub fn quotient_with_lifts(&self, s: &Submodule) -> Result<(FiniteHModule, ModMatrix, Vec<Element>)> {
        self.check_parent(s)?;
        let r = self.rank();
        let pr = self.params;
        if r == 0 {
            return Ok((self.clone(), ModMatrix::zero(pr, 0, 0), Vec::new()));
        }
        let mut rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut row = vec![0; r];
                row[i] = pr.p_pow(self.exponents[i]);
                row
            })
            .collect();
        rows.extend(s.generators.iter().cloned());
        let smith = ModMatrix::from_residue_rows(pr, r, &rows)?.smith_form();
        // kept coordinates, largest cyclic factor first
        let mut kept: Vec<(u32, usize)> = smith
            .exponents
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d > 0)
            .map(|(j, &d)| (d, j))
            .collect();
        kept.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let new_exps: Vec<u32> = kept.iter().map(|&(d, _)| d).collect();
        let k = kept.len();
        let mut proj = ModMatrix::zero(pr, k, r);
        for (row, &(_, j)) in kept.iter().enumerate() {
            for i in 0..r {
                proj.set_raw(row, i, smith.right.raw(i, j));
            }
        }
        if k == 0 {
            return Ok((FiniteHModule::trivial(self.p())?, proj, Vec::new()));
        }
        let reduce_new = |v: Vec<u64>| -> Vec<u64> {
            v.iter().zip(&new_exps).map(|(&c, &d)| c % self.p().pow(d)).collect()
        };
        let lifts: Vec<Element> = kept.iter().map(|&(_, j)| self.reduce(smith.right_inverse.row(j))).collect();
        let mut sigma_bar = ModMatrix::zero(pr, k, k);
        for (col, b) in lifts.iter().enumerate() {
            let image = reduce_new(proj.apply(&self.sigma_apply(b))?);
            for (row, &v) in image.iter().enumerate() {
                sigma_bar.set_raw(row, col, v);
            }
        }
        let q = FiniteHModule::from_matrix(&new_exps, sigma_bar, default_k_max(self.p(), &new_exps))?;
        let proj = proj.lift_to(pr)?;
        Ok((q, proj, lifts))
    }

    /// Enumeration index in mixed radix `(p^{e_1}, ..., p^{e_r})`, first component most significant.
    pub fn index_of(&self, x: &[u64]) -> u64 {
        x.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc * self.component_modulus(i) + v % self.component_modulus(i))
    }

    pub fn element_at(&self, mut idx: u64) -> Element {
        let mut x = self.zero();
        for i in (0..self.rank()).rev() {
            let q = self.component_modulus(i);
            x[i] = idx % q;
            idx /= q;
        }
        x
    }
}

/// Applies a projection from [`FiniteHModule::quotient_module`].
pub fn project(quotient: &FiniteHModule, proj: &ModMatrix, x: &[u64]) -> Element {
    let y = proj.apply(x).expect("projection dimension");
    quotient.reduce(&y)
}
