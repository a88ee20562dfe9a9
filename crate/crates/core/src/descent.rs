//! Finite models of `𝒢 = X ⋊ G` with `G = H ⋊ Δ`, `H = Z/p^d`, and the
//! inertia subgroups `I_{w_i} = ⟨(a_i, h)⟩ · {(b_{δ,i}, δ)}`.
//!
//! The brute-force side enumerates `𝒢_n = X ⋊ (H^{p^n} ⋊ Δ)` and closes subgroups
//! element by element. The closed form is `X / (omega_n C + D)` with
//! `C = ⟨(σ - 1)X, a_i⟩_H` and `D = ⟨I_Δ X, b_{δ,i}⟩_H`.
//!
//! Ambient elements are encoded as `x_index * |G| + g_index`, and `g_index = i * |Δ| + δ`
//! stands for `h^i δ`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::AbelianType;
use crate::module::{default_k_max, project, Element, FiniteHModule, Submodule};
use crate::padic::{is_prime, ModMatrix, RingParams};
use crate::tower::{TowerInstance, TowerLength};
use crate::{Error, Result};

/// Default cap on `|X| · |G|`.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// A finite group given by its multiplication table, `table[a * order + b] = ab`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl DeltaGroup {
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::InvalidGroupTable("table must be order × order"));
        }
        if table.iter().any(|&v| v >= order) {
            return Err(Error::InvalidGroupTable("entry out of range"));
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| mul(e, a) == a && mul(a, e) == a))
            .ok_or(Error::InvalidGroupTable("no identity element"))?;
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidGroupTable("table is not associative"));
                    }
                }
            }
        }
        let inverse = (0..order)
            .map(|a| (0..order).find(|&b| mul(a, b) == identity && mul(b, a) == identity))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::InvalidGroupTable("element without inverse"))?;
        Ok(DeltaGroup { order, table, identity, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(m: usize) -> Self {
        let table = (0..m * m).map(|k| (k / m + k % m) % m).collect();
        Self::from_table(m, table).expect("cyclic table")
    }

    /// `S_3` as permutations of three points; elements 1, 2, 3 are the transpositions.
    pub fn s3() -> Self {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let mut table = Vec::with_capacity(36);
        for a in &PERMS {
            for b in &PERMS {
                let c = [a[b[0]], a[b[1]], a[b[2]]];
                table.push(PERMS.iter().position(|q| *q == c).unwrap());
            }
        }
        Self::from_table(6, table).expect("S3 table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `[1, a, a^2, ...]` up to the order of `a`.
    pub fn powers(&self, a: usize) -> Vec<usize> {
        let mut out = vec![self.identity];
        let mut x = a;
        while x != self.identity {
            out.push(x);
            x = self.mul(x, a);
        }
        out
    }

    pub fn is_subgroup(&self, s: &[usize]) -> bool {
        let mut seen = vec![false; self.order];
        for &a in s {
            if a >= self.order || seen[a] {
                return false;
            }
            seen[a] = true;
        }
        seen[self.identity] && s.iter().all(|&a| s.iter().all(|&b| seen[self.mul(a, b)]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeltaPreset {
    Trivial,
    /// `Z/2` acting on `H` by inversion.
    Z2Inverting,
    /// `Z/2` acting trivially on `H`.
    Z2Central,
    /// `Z/3` acting through a unit of order 3 mod `p^d` when there is one.
    Z3,
    /// `S_3` with transpositions inverting `H`.
    S3Type,
}

impl DeltaPreset {
    pub const ALL: [DeltaPreset; 5] =
        [DeltaPreset::Trivial, DeltaPreset::Z2Inverting, DeltaPreset::Z2Central, DeltaPreset::Z3, DeltaPreset::S3Type];

    pub fn name(&self) -> &'static str {
        match self {
            DeltaPreset::Trivial => "trivial",
            DeltaPreset::Z2Inverting => "z2",
            DeltaPreset::Z2Central => "z2-central",
            DeltaPreset::Z3 => "z3",
            DeltaPreset::S3Type => "s3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }
}

/// `G = H ⋊ Δ` with `δ h δ^{-1} = h^{χ(δ)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectGroup {
    p: u64,
    d: u32,
    q: u64,
    delta: DeltaGroup,
    chi: Vec<u64>,
}

impl SemidirectGroup {
    pub fn new(p: u64, d: u32, delta: DeltaGroup, chi: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("d must be at least 1"));
        }
        let q = p
            .checked_pow(d)
            .filter(|&q| q <= DEFAULT_BUDGET)
            .ok_or(Error::BudgetExceeded { needed: u64::MAX, budget: DEFAULT_BUDGET })?;
        if chi.len() != delta.order() {
            return Err(Error::DimensionMismatch);
        }
        let chi: Vec<u64> = chi.into_iter().map(|c| c % q).collect();
        if chi.iter().any(|&c| c % p == 0) {
            return Err(Error::ActionNotHomomorphism("χ(δ) is not a unit mod p^d"));
        }
        if chi[delta.identity()] != 1 % q {
            return Err(Error::ActionNotHomomorphism("χ(1) ≠ 1"));
        }
        for a in 0..delta.order() {
            for b in 0..delta.order() {
                if chi[delta.mul(a, b)] != (chi[a] as u128 * chi[b] as u128 % q as u128) as u64 {
                    return Err(Error::ActionNotHomomorphism("χ is not multiplicative"));
                }
            }
        }
        Ok(SemidirectGroup { p, d, q, delta, chi })
    }

    pub fn from_preset(p: u64, d: u32, preset: DeltaPreset) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = p.checked_pow(d).ok_or(Error::InvalidArgument("p^d too large"))?;
        let minus_one = q - 1;
        let (delta, chi) = match preset {
            DeltaPreset::Trivial => (DeltaGroup::trivial(), vec![1]),
            DeltaPreset::Z2Inverting => (DeltaGroup::cyclic(2), vec![1, minus_one]),
            DeltaPreset::Z2Central => (DeltaGroup::cyclic(2), vec![1, 1]),
            DeltaPreset::Z3 => {
                let u = (2..q)
                    .find(|&u| (u as u128).pow(3) % q as u128 == 1)
                    .unwrap_or(1);
                let u2 = (u as u128 * u as u128 % q as u128) as u64;
                (DeltaGroup::cyclic(3), vec![1, u, u2])
            }
            DeltaPreset::S3Type => (DeltaGroup::s3(), vec![1, minus_one, minus_one, minus_one, 1, 1]),
        };
        Self::new(p, d, delta, chi)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `|H| = p^d`.
    pub fn h_order(&self) -> u64 {
        self.q
    }

    pub fn delta(&self) -> &DeltaGroup {
        &self.delta
    }

    pub fn chi(&self) -> &[u64] {
        &self.chi
    }

    pub fn order(&self) -> usize {
        self.q as usize * self.delta.order()
    }

    /// Index of `h^i δ`.
    pub fn element(&self, i: u64, delta: usize) -> usize {
        (i % self.q) as usize * self.delta.order() + delta
    }

    pub fn parts(&self, g: usize) -> (u64, usize) {
        let m = self.delta.order();
        ((g / m) as u64, g % m)
    }

    pub fn identity(&self) -> usize {
        self.element(0, self.delta.identity())
    }

    pub fn h(&self) -> usize {
        self.element(1, self.delta.identity())
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let (i, da) = self.parts(a);
        let (j, db) = self.parts(b);
        let twisted = (self.chi[da] as u128 * j as u128 % self.q as u128) as u64;
        self.element(i + twisted, self.delta.mul(da, db))
    }

    pub fn inv(&self, a: usize) -> usize {
        let (i, da) = self.parts(a);
        let di = self.delta.inv(da);
        let t = (self.chi[di] as u128 * i as u128 % self.q as u128) as u64;
        self.element((self.q - t) % self.q, di)
    }

    /// Whether `g` lies in `G_n = H^{p^n} ⋊ Δ`.
    pub fn in_level(&self, g: usize, n: u32) -> bool {
        let step = self.p.checked_pow(n).unwrap_or(u64::MAX);
        self.parts(g).0 % step == 0
    }

    pub fn level_elements(&self, n: u32) -> Vec<usize> {
        (0..self.order()).filter(|&g| self.in_level(g, n)).collect()
    }

    /// `h^{p^n}` together with every `δ ∈ Δ`.
    pub fn level_generators(&self, n: u32) -> Vec<usize> {
        let step = self.p.checked_pow(n).unwrap_or(0);
        let mut gens = vec![self.element(step, self.delta.identity())];
        gens.extend((0..self.delta.order()).map(|dl| self.element(0, dl)));
        gens
    }
}

/// An element `(x, g)` of `X ⋊ G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientElement {
    pub x: Element,
    pub g: usize,
}

/// `G` acting on a finite `H`-module `X`: `h` through `σ`, `δ` through `τ_δ`.
#[derive(Clone, Debug)]
pub struct DescentGroup {
    g: SemidirectGroup,
    module: FiniteHModule,
    tau: Vec<ModMatrix>,
    budget: u64,
    x_size: usize,
    radix: Vec<u64>,
    act: Vec<u32>,
}

/// Validates the action and precomputes it on every element of `X`.
pub fn build_group(g: SemidirectGroup, module: FiniteHModule, tau: Vec<ModMatrix>, budget: u64) -> Result<DescentGroup> {
    if module.p() != g.p() {
        return Err(Error::ParamsMismatch);
    }
    let x_size = module.order().ok_or(Error::BudgetExceeded { needed: u64::MAX, budget })?;
    let needed = x_size.saturating_mul(g.order() as u64);
    if needed > budget || needed > u32::MAX as u64 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if module.order_exponent() > g.d() {
        return Err(Error::ActionNotHomomorphism("σ^{p^d} is not the identity"));
    }
    let delta = g.delta();
    if tau.len() != delta.order() {
        return Err(Error::DimensionMismatch);
    }
    let params = module.params();
    let tau = tau.iter().map(|t| t.lift_to(params)).collect::<Result<Vec<_>>>()?;
    for t in &tau {
        module.check_endomorphism(t)?;
    }
    if !module.endo_eq(&tau[delta.identity()], &module.identity_endo()) {
        return Err(Error::ActionNotHomomorphism("τ_1 is not the identity"));
    }
    let sigma = module.sigma();
    for a in 0..delta.order() {
        for b in 0..delta.order() {
            if !module.endo_eq(&tau[a].try_mul(&tau[b])?, &tau[delta.mul(a, b)]) {
                return Err(Error::ActionNotHomomorphism("τ_a τ_b ≠ τ_{ab}"));
            }
        }
        let lhs = tau[a].try_mul(sigma)?;
        let rhs = sigma.pow(g.chi()[a])?.try_mul(&tau[a])?;
        if !module.endo_eq(&lhs, &rhs) {
            return Err(Error::ActionNotHomomorphism("τ_δ σ ≠ σ^{χ(δ)} τ_δ"));
        }
    }

    let radix: Vec<u64> = module.exponents().iter().map(|&e| g.p().pow(e)).collect();
    let x_size = x_size as usize;
    let mut act = vec![0u32; g.order() * x_size];
    let mut sigma_pow = module.identity_endo();
    for i in 0..g.h_order() {
        for dl in 0..delta.order() {
            let m = sigma_pow.try_mul(&tau[dl])?;
            let gi = g.element(i, dl);
            for xi in 0..x_size {
                let y = module.apply_endo(&m, &module.element_at(xi as u64));
                act[gi * x_size + xi] = module.index_of(&y) as u32;
            }
        }
        sigma_pow = sigma.try_mul(&sigma_pow)?;
    }
    Ok(DescentGroup { g, module, tau, budget, x_size, radix, act })
}

struct Closure {
    seen: Vec<bool>,
    elems: Vec<u32>,
    gens: Vec<u32>,
}

impl DescentGroup {
    pub fn group(&self) -> &SemidirectGroup {
        &self.g
    }

    pub fn module(&self) -> &FiniteHModule {
        &self.module
    }

    pub fn tau(&self) -> &[ModMatrix] {
        &self.tau
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn ambient_order(&self) -> u64 {
        self.x_size as u64 * self.g.order() as u64
    }

    /// Matrix of `h^i δ` on `X`.
    pub fn action_matrix(&self, g: usize) -> Result<ModMatrix> {
        let (i, dl) = self.g.parts(g);
        self.module.sigma().pow(i)?.try_mul(&self.tau[dl])
    }

    pub fn act_on(&self, g: usize, x: &[u64]) -> Element {
        let xi = self.module.index_of(x) as usize;
        self.module.element_at(self.act[g * self.x_size + xi] as u64)
    }

    pub fn mul(&self, a: &AmbientElement, b: &AmbientElement) -> AmbientElement {
        self.decode(self.amb_mul(self.encode(a), self.encode(b)))
    }

    pub fn inv(&self, a: &AmbientElement) -> AmbientElement {
        self.decode(self.amb_inv(self.encode(a)))
    }

    pub fn pow(&self, a: &AmbientElement, mut e: u64) -> AmbientElement {
        let mut base = self.encode(a);
        let mut acc = self.g.identity() as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.amb_mul(acc, base);
            }
            base = self.amb_mul(base, base);
            e >>= 1;
        }
        self.decode(acc)
    }

    fn encode(&self, a: &AmbientElement) -> u32 {
        (self.module.index_of(&a.x) as usize * self.g.order() + a.g) as u32
    }

    fn decode(&self, a: u32) -> AmbientElement {
        let m = self.g.order();
        AmbientElement { x: self.module.element_at((a as usize / m) as u64), g: a as usize % m }
    }

    fn pack(&self, x: u32, g: usize) -> u32 {
        (x as usize * self.g.order() + g) as u32
    }

    fn unpack(&self, a: u32) -> (u32, usize) {
        let m = self.g.order();
        ((a as usize / m) as u32, a as usize % m)
    }

    fn x_add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut scale = 1u64;
        for &q in self.radix.iter().rev() {
            out += ((a % q + b % q) % q) * scale;
            scale *= q;
            a /= q;
            b /= q;
        }
        out as u32
    }

    fn x_neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0u64;
        let mut scale = 1u64;
        for &q in self.radix.iter().rev() {
            out += ((q - a % q) % q) * scale;
            scale *= q;
            a /= q;
        }
        out as u32
    }

    fn x_act(&self, g: usize, x: u32) -> u32 {
        self.act[g * self.x_size + x as usize]
    }

    fn amb_mul(&self, a: u32, b: u32) -> u32 {
        let (xa, ga) = self.unpack(a);
        let (xb, gb) = self.unpack(b);
        self.pack(self.x_add(xa, self.x_act(ga, xb)), self.g.mul(ga, gb))
    }

    fn amb_inv(&self, a: u32) -> u32 {
        let (x, g) = self.unpack(a);
        let gi = self.g.inv(g);
        self.pack(self.x_neg(self.x_act(gi, x)), gi)
    }

    fn new_closure(&self) -> Closure {
        let mut seen = vec![false; self.x_size * self.g.order()];
        let id = self.g.identity() as u32;
        seen[id as usize] = true;
        Closure { seen, elems: vec![id], gens: Vec::new() }
    }

    /// Adds `s` to the generators and re-closes: new elements arise as `old · s · word`.
    fn extend(&self, cl: &mut Closure, s: u32) -> Result<()> {
        if cl.seen[s as usize] {
            return Ok(());
        }
        cl.gens.push(s);
        let old = cl.elems.len();
        for k in 0..old {
            let y = self.amb_mul(cl.elems[k], s);
            if !cl.seen[y as usize] {
                cl.seen[y as usize] = true;
                cl.elems.push(y);
            }
        }
        let mut next = old;
        while next < cl.elems.len() {
            let e = cl.elems[next];
            next += 1;
            for gi in 0..cl.gens.len() {
                let y = self.amb_mul(e, cl.gens[gi]);
                if !cl.seen[y as usize] {
                    cl.seen[y as usize] = true;
                    cl.elems.push(y);
                }
            }
            if cl.elems.len() as u64 > self.budget {
                return Err(Error::BudgetExceeded { needed: cl.elems.len() as u64, budget: self.budget });
            }
        }
        Ok(())
    }

    /// Subgroup generated by `gens`, or `None` once it grows past `cap`.
    fn small_closure(&self, gens: &[u32], cap: usize) -> Option<Vec<u32>> {
        let mut elems = vec![self.g.identity() as u32];
        let mut next = 0;
        while next < elems.len() {
            let e = elems[next];
            next += 1;
            for &s in gens {
                let y = self.amb_mul(e, s);
                if !elems.contains(&y) {
                    if elems.len() == cap {
                        return None;
                    }
                    elems.push(y);
                }
            }
        }
        Some(elems)
    }

    /// Normal closure in `⟨gens⟩` of the commutators of `gens`.
    fn commutator_subgroup(&self, gens: &[u32]) -> Result<Closure> {
        let mut cl = self.new_closure();
        let mut work = Vec::new();
        for &s in gens {
            for &t in gens {
                let c = self.amb_mul(self.amb_mul(s, t), self.amb_inv(self.amb_mul(t, s)));
                if !cl.seen[c as usize] {
                    self.extend(&mut cl, c)?;
                    work.push(c);
                }
            }
        }
        while let Some(k) = work.pop() {
            for &s in gens {
                let c = self.amb_mul(self.amb_mul(s, k), self.amb_inv(s));
                if !cl.seen[c as usize] {
                    self.extend(&mut cl, c)?;
                    work.push(c);
                }
            }
        }
        Ok(cl)
    }

    /// Additive closure in `X` of a subgroup `base` and `gens`.
    fn x_closure(&self, base: &[u32], gens: &[u32]) -> (Vec<bool>, Vec<u32>) {
        let mut seen = vec![false; self.x_size];
        let mut elems: Vec<u32> = if base.is_empty() { vec![0] } else { base.to_vec() };
        for &e in &elems {
            seen[e as usize] = true;
        }
        for &s in gens {
            // ⟨S, s⟩ = ∪_k (S + k s)
            let current = elems.clone();
            let mut t = s;
            while !seen[t as usize] {
                for &y in &current {
                    let z = self.x_add(y, t);
                    seen[z as usize] = true;
                    elems.push(z);
                }
                t = self.x_add(t, s);
            }
        }
        (seen, elems)
    }

    fn x_index(&self, x: &[u64]) -> u32 {
        self.module.index_of(x) as u32
    }

    /// Abelian type of `X / Y` from the orders `|p^i X + Y|`.
    fn quotient_type_enumerative(&self, y: &[u32]) -> AbelianType {
        let p = self.g.p();
        let log = |mut n: usize| {
            let mut k = 0u64;
            while n > 1 {
                n /= p as usize;
                k += 1;
            }
            k
        };
        let log_y = log(y.len());
        let top = self.module.exponents().first().copied().unwrap_or(0);
        // c[i] = log |p^i Q|
        let mut c = Vec::new();
        for i in 0..=top {
            let gens: Vec<u32> = (0..self.module.rank())
                .map(|j| self.x_index(&self.module.scale(&self.module.basis(j), p.pow(i))))
                .collect();
            let (_, elems) = self.x_closure(y, &gens);
            c.push(log(elems.len()) - log_y);
        }
        c.push(0);
        let mut exps = Vec::new();
        for i in 0..c.len() - 1 {
            let above = c[i] - c[i + 1];
            let above_next = if i + 2 < c.len() { c[i + 1] - c[i + 2] } else { 0 };
            exps.extend(core::iter::repeat(i as u32 + 1).take((above - above_next) as usize));
        }
        AbelianType::from_exponents(exps)
    }
}

/// Data of one inertia subgroup: `Δ_i`, `a_i`, and `b_{δ,i}` listed in the order of `delta_subgroup`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub delta_subgroup: Vec<usize>,
    pub a: Element,
    pub b: Vec<Element>,
}

impl Section {
    /// The section with `a = 0`, `b = 0` over all of `Δ`.
    pub fn totally_ramified(group: &DescentGroup) -> Self {
        let delta = group.group().delta();
        let zero = group.module().zero();
        Section { delta_subgroup: (0..delta.order()).collect(), a: zero.clone(), b: vec![zero; delta.order()] }
    }
}

#[derive(Clone, Debug)]
pub struct DescentInstance {
    group: DescentGroup,
    sections: Vec<Section>,
    inertia: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLevel {
    pub n: u32,
    pub brute: AbelianType,
    pub closed: AbelianType,
    pub tower: AbelianType,
    pub equal: bool,
    /// The two subgroups of `X` agree as sets.
    pub same_subgroup: bool,
    /// Smallest element (by enumeration index) in exactly one of the two subgroups.
    pub witness: Option<Element>,
    pub brute_g_stable: bool,
    pub closed_g_stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub levels: Vec<OracleLevel>,
}

impl OracleReport {
    pub fn all_equal(&self) -> bool {
        self.levels.iter().all(|l| l.equal)
    }
}

impl DescentInstance {
    pub fn new(group: DescentGroup, sections: Vec<Section>) -> Result<Self> {
        let delta = group.group().delta().clone();
        let module = group.module().clone();
        let first = sections.first().ok_or(Error::InvalidSection { index: 0, detail: "no sections" })?;
        let mut full: Vec<usize> = first.delta_subgroup.clone();
        full.sort_unstable();
        if full != (0..delta.order()).collect::<Vec<_>>() {
            return Err(Error::InvalidSection { index: 0, detail: "first section must have Δ_1 = Δ" });
        }
        if !module.is_zero_element(&first.a) || first.b.iter().any(|b| !module.is_zero_element(b)) {
            return Err(Error::InvalidSection { index: 0, detail: "first section must have a = 0 and b = 0" });
        }
        let omega_d = module.omega_endo(group.group().d());
        let mut inertia = Vec::with_capacity(sections.len());
        for (index, s) in sections.iter().enumerate() {
            if !delta.is_subgroup(&s.delta_subgroup) {
                return Err(Error::InvalidSection { index, detail: "Δ_i is not a subgroup" });
            }
            if s.b.len() != s.delta_subgroup.len()
                || s.a.len() != module.rank()
                || s.b.iter().any(|b| b.len() != module.rank())
            {
                return Err(Error::InvalidSection { index, detail: "dimension mismatch" });
            }
            if !module.is_zero_element(&module.apply_endo(&omega_d, &s.a)) {
                return Err(Error::InvalidSection { index, detail: "omega_d a_i ≠ 0" });
            }
            let g = group.group();
            let mut gens = vec![group.pack(group.x_index(&module.reduce(&s.a)), g.h())];
            for (dl, b) in s.delta_subgroup.iter().zip(&s.b) {
                gens.push(group.pack(group.x_index(&module.reduce(b)), g.element(0, *dl)));
            }
            let expected = g.h_order() as usize * s.delta_subgroup.len();
            let elems = group
                .small_closure(&gens, expected)
                .filter(|e| e.len() == expected)
                .ok_or(Error::InvalidSection { index, detail: "I_w is larger than H ⋊ Δ_i" })?;
            if elems.iter().any(|&e| e != g.identity() as u32 && group.unpack(e).1 == g.identity()) {
                return Err(Error::InvalidSection { index, detail: "I_w meets X nontrivially" });
            }
            inertia.push(elems);
        }
        Ok(DescentInstance { group, sections, inertia })
    }

    pub fn group(&self) -> &DescentGroup {
        &self.group
    }

    pub fn module(&self) -> &FiniteHModule {
        self.group.module()
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn d(&self) -> u32 {
        self.group.group().d()
    }

    fn check_level(&self, n: u32) -> Result<()> {
        TowerLength::Finite(self.d()).check_level(n)
    }

    /// `(a_i, h)^{p^n}` computed in `𝒢`.
    pub fn section_power(&self, i: usize, n: u32) -> Result<AmbientElement> {
        let s = self.sections.get(i).ok_or(Error::InvalidSection { index: i, detail: "no such section" })?;
        let g = self.group.group();
        let e = g.p().checked_pow(n).ok_or(Error::InvalidArgument("p^n too large"))?;
        Ok(self.group.pow(&AmbientElement { x: self.module().reduce(&s.a), g: g.h() }, e))
    }

    /// Replaces section `i` by its conjugate under `(x, 1)`.
    pub fn conjugate_section(&self, i: usize, x: &[u64]) -> Result<DescentInstance> {
        if i == 0 || i >= self.sections.len() {
            return Err(Error::InvalidSection { index: i, detail: "only sections after the first can be conjugated" });
        }
        let m = self.module();
        let mut sections = self.sections.clone();
        let s = &mut sections[i];
        s.a = m.sub(&s.a, &m.sub(&m.sigma_apply(x), x));
        for (dl, b) in s.delta_subgroup.iter().zip(s.b.iter_mut()) {
            let tx = m.apply_endo(&self.group.tau[*dl], x);
            *b = m.sub(b, &m.sub(&tx, x));
        }
        DescentInstance::new(self.group.clone(), sections)
    }

    /// `Y_n = X ∩ ⟨I_{G_n} X, I_{w_i} ∩ 𝒢_n⟩`, as a list of element indices of `X`.
    fn bruteforce_y(&self, n: u32) -> Result<Vec<u32>> {
        self.check_level(n)?;
        let grp = &self.group;
        let g = grp.group();
        let mut cl = grp.new_closure();
        let basis: Vec<u32> = (0..self.module().rank()).map(|j| grp.x_index(&self.module().basis(j))).collect();
        for gi in g.level_elements(n) {
            for &x in &basis {
                // [(0, g), (x, 1)] = (g x - x, 1)
                let c = grp.x_add(grp.x_act(gi, x), grp.x_neg(x));
                grp.extend(&mut cl, grp.pack(c, g.identity()))?;
            }
        }
        for elems in &self.inertia {
            for &e in elems {
                if g.in_level(grp.unpack(e).1, n) {
                    grp.extend(&mut cl, e)?;
                }
            }
        }
        Ok(cl
            .elems
            .iter()
            .filter_map(|&e| {
                let (x, gi) = grp.unpack(e);
                (gi == g.identity()).then_some(x)
            })
            .collect())
    }

    /// Abelian type of `X / Y_n` by subgroup enumeration in `𝒢_n`.
    pub fn bruteforce_class_quotient(&self, n: u32) -> Result<AbelianType> {
        let y = self.bruteforce_y(n)?;
        Ok(self.group.quotient_type_enumerative(&y))
    }

    /// `C = ⟨(σ - 1)X, a_2, ..., a_r⟩_H`.
    pub fn c_submodule(&self) -> Result<Submodule> {
        let m = self.module();
        let t = m.t_endo();
        let mut gens: Vec<Element> = (0..m.rank()).map(|j| m.apply_endo(&t, &m.basis(j))).collect();
        gens.extend(self.sections.iter().skip(1).map(|s| m.reduce(&s.a)));
        m.span(&gens)
    }

    /// `D = ⟨(τ_δ - 1)X, b_{δ,i}⟩_H`.
    pub fn d_submodule(&self) -> Result<Submodule> {
        let m = self.module();
        let mut gens = Vec::new();
        for tau in &self.group.tau {
            for j in 0..m.rank() {
                let e = m.basis(j);
                gens.push(m.sub(&m.apply_endo(tau, &e), &e));
            }
        }
        for s in &self.sections {
            gens.extend(s.b.iter().map(|b| m.reduce(b)));
        }
        m.span(&gens)
    }

    /// `omega_n C + D`.
    pub fn closed_form_submodule(&self, n: u32) -> Result<Submodule> {
        self.check_level(n)?;
        let m = self.module();
        let wc = m.endo_image(&m.omega_endo(n), &self.c_submodule()?)?;
        m.sum_submodules(&wc, &self.d_submodule()?)
    }

    pub fn closed_form_quotient(&self, n: u32) -> Result<AbelianType> {
        self.module().quotient_type(&self.closed_form_submodule(n)?)
    }

    /// `X̄ = X/D` with `C̄ = (C + D)/D`.
    pub fn compile_to_tower(&self) -> Result<TowerInstance> {
        let m = self.module();
        let (xbar, proj, _) = m.quotient_with_lifts(&self.d_submodule()?)?;
        let gens: Vec<Element> =
            self.c_submodule()?.generators().iter().map(|g| project(&xbar, &proj, g)).collect();
        let c_bar = xbar.span(&gens)?;
        TowerInstance::new(xbar, c_bar, TowerLength::Finite(self.d()))
    }

    /// Checks `[𝒢_n, 𝒢_n] = I_{G_n} X ⋊ [G_n, G_n]`.
    pub fn commutator_identity(&self, n: u32) -> Result<bool> {
        self.check_level(n)?;
        let grp = &self.group;
        let g = grp.group();
        let g_gens: Vec<u32> = g.level_generators(n).into_iter().map(|gi| gi as u32).collect();
        let mut all = g_gens.clone();
        let basis: Vec<u32> = (0..self.module().rank()).map(|j| grp.x_index(&self.module().basis(j))).collect();
        all.extend(basis.iter().map(|&x| grp.pack(x, g.identity())));
        let lhs = grp.commutator_subgroup(&all)?;
        let gg = grp.commutator_subgroup(&g_gens)?;
        let mut ix_gens = Vec::new();
        for gi in g.level_elements(n) {
            for &x in &basis {
                ix_gens.push(grp.x_add(grp.x_act(gi, x), grp.x_neg(x)));
            }
        }
        let (_, ix) = grp.x_closure(&[], &ix_gens);
        if lhs.elems.len() != ix.len() * gg.elems.len() {
            return Ok(false);
        }
        Ok(ix.iter().all(|&x| lhs.seen[grp.pack(x, g.identity()) as usize])
            && gg.elems.iter().all(|&e| lhs.seen[e as usize]))
    }

    fn stable_under_level(&self, n: u32, seen: &[bool], elems: &[u32]) -> bool {
        let grp = &self.group;
        grp.group().level_generators(n).into_iter().all(|g| elems.iter().all(|&y| seen[grp.x_act(g, y) as usize]))
    }

    fn compare_with(&self, n: u32, tower: &TowerInstance) -> Result<OracleLevel> {
        let grp = &self.group;
        let y = self.bruteforce_y(n)?;
        let brute = grp.quotient_type_enumerative(&y);
        let z = self.closed_form_submodule(n)?;
        let closed = self.module().quotient_type(&z)?;
        let tower_type = tower.layer(n)?;
        if !self.commutator_identity(n)? {
            return Err(Error::TheoremViolation { level: n, detail: "[𝒢, 𝒢] ≠ I_G X ⋊ [G, G]" });
        }
        let (y_seen, _) = grp.x_closure(&y, &[]);
        let z_gens: Vec<u32> = z.generators().iter().map(|g| grp.x_index(g)).collect();
        let (z_seen, z_elems) = grp.x_closure(&[], &z_gens);
        let witness = (0..grp.x_size)
            .find(|&i| y_seen[i] != z_seen[i])
            .map(|i| self.module().element_at(i as u64));
        Ok(OracleLevel {
            n,
            equal: brute == closed && closed == tower_type,
            brute,
            closed,
            tower: tower_type,
            same_subgroup: witness.is_none(),
            witness,
            brute_g_stable: self.stable_under_level(n, &y_seen, &y),
            closed_g_stable: self.stable_under_level(n, &z_seen, &z_elems),
        })
    }

    pub fn compare_level(&self, n: u32) -> Result<OracleLevel> {
        self.compare_with(n, &self.compile_to_tower()?)
    }

    /// Brute force against closed form at every level `0..=d`.
    pub fn compare_oracle(&self) -> Result<OracleReport> {
        let tower = self.compile_to_tower()?;
        let levels = (0..=self.d()).map(|n| self.compare_with(n, &tower)).collect::<Result<Vec<_>>>()?;
        Ok(OracleReport { levels })
    }
}

/// Whether every `g - 1`, `g ∈ G_n`, lies in the left `(Z/p^N)[H^{p^n}]`-span of
/// `h^{p^n} - 1` and the `δ - 1`.
pub fn augmentation_check(g: &SemidirectGroup, n: u32, precision: u32, budget: u64) -> Result<bool> {
    if n > g.d() {
        return Err(Error::LevelOutOfRange { level: n, length: g.d() });
    }
    let pr = RingParams::new(g.p(), precision)?;
    let elems = g.level_elements(n);
    let size = elems.len();
    let needed = (size as u64).saturating_mul(size as u64);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let pos = |x: usize| elems.iter().position(|&e| e == x).expect("level element");
    let id = g.identity();
    let one_minus = |x: usize| {
        let mut v = vec![0u64; size];
        v[pos(x)] = 1;
        v[pos(id)] = pr.sub(v[pos(id)], 1);
        v
    };
    let step = g.p().pow(n);
    let hn = g.element(step, g.delta().identity());
    let mut specials = vec![one_minus(hn)];
    specials.extend((0..g.delta().order()).map(|dl| one_minus(g.element(0, dl))));
    let mut rows = Vec::new();
    for j in 0..g.h_order() / step {
        let left = g.element(j * step, g.delta().identity());
        for s in &specials {
            let mut v = vec![0u64; size];
            for (k, &c) in s.iter().enumerate() {
                if c != 0 {
                    let t = pos(g.mul(left, elems[k]));
                    v[t] = pr.add(v[t], c);
                }
            }
            rows.push(v);
        }
    }
    let base = ModMatrix::from_residue_rows(pr, size, &rows)?.smith_form().rowspace_log_order();
    // every g - 1 lies in the span iff adding all of them leaves its order unchanged
    rows.extend(elems.iter().map(|&x| one_minus(x)));
    Ok(ModMatrix::from_residue_rows(pr, size, &rows)?.smith_form().rowspace_log_order() == base)
}

/// Size limits for [`random_descent_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentBounds {
    /// `|X| <= p^max_log_order`.
    pub max_log_order: u32,
    /// Exponent of the group ring `(Z/p^e)[G]` that `X` is cut out of.
    pub max_exponent: u32,
    pub max_sections: usize,
    pub budget: u64,
}

impl Default for DescentBounds {
    fn default() -> Self {
        DescentBounds { max_log_order: 6, max_exponent: 2, max_sections: 3, budget: 1 << 18 }
    }
}

const DESCENT_RETRIES: usize = 256;

/// Group ring product in `(Z/p^e)[G]`, coordinates indexed by `G`.
fn ring_mul(g: &SemidirectGroup, q: u64, u: &[u64], v: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; u.len()];
    for (a, &ua) in u.iter().enumerate() {
        if ua == 0 {
            continue;
        }
        for (b, &vb) in v.iter().enumerate() {
            if vb != 0 {
                let c = g.mul(a, b);
                out[c] = ((out[c] as u128 + ua as u128 * vb as u128) % q as u128) as u64;
            }
        }
    }
    out
}

fn basis_vec(len: usize, k: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    v[k] = 1;
    v
}

/// Deterministic random descent instance. `X` is a quotient of `(Z/p^e)[G]` by the
/// `G`-span of a few random relations; `a_i` is drawn from `ker omega_d`; `b_{δ,i}` are
/// drawn among the solutions making `I_{w_i}` a copy of `H ⋊ Δ_i` for a cyclic `Δ_i`.
pub fn random_descent_instance(
    p: u64,
    d: u32,
    preset: DeltaPreset,
    bounds: DescentBounds,
    seed: u64,
) -> Result<DescentInstance> {
    let g = SemidirectGroup::from_preset(p, d, preset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = g.order();
    let q_h = g.h_order();
    let mut over_budget = None;
    for _ in 0..DESCENT_RETRIES {
        let e = rng.random_range(1..=bounds.max_exponent.max(1));
        let q = p.pow(e);
        let one = basis_vec(size, g.identity());
        let mut t = one.clone();
        t[g.h()] = (t[g.h()] + 1) % q;
        t[g.identity()] = q - 1;
        let power = |k: u64| (0..k).fold(one.clone(), |acc, _| ring_mul(&g, q, &acc, &t));

        let k = rng.random_range(1..=q_h.min(1 + bounds.max_log_order as u64 / e as u64));
        let mut rels = vec![power(k)];
        if bounds.max_log_order == 0 {
            rels.push(one.clone());
        }
        for _ in 0..rng.random_range(0..=2) {
            let w: Vec<u64> = (0..size).map(|_| rng.random_range(0..q)).collect();
            let rel = if rng.random_bool(0.5) {
                let j = rng.random_range(1..=e);
                w.iter().map(|&c| c * p.pow(j) % q).collect()
            } else {
                ring_mul(&g, q, &power(rng.random_range(1..=k)), &w)
            };
            rels.push(rel);
        }
        let m = g.delta().order();
        if m > 1 && rng.random_bool(0.5) {
            let dl = rng.random_range(1..m);
            let dl = if dl >= g.delta().identity() { (dl + 1) % m } else { dl };
            let dl = if dl == g.delta().identity() { (dl + 1) % m } else { dl };
            let mut rel = basis_vec(size, g.element(0, dl));
            let c = if rng.random_bool(0.5) { 1 } else { q - 1 };
            rel[g.identity()] = (rel[g.identity()] + q - c) % q;
            rels.push(rel);
        }

        let params = RingParams::new(p, e)?;
        let exps = vec![e; size];
        let left = |x: usize| {
            ModMatrix::from_fn(params, size, size, |i, j| i64::from(g.mul(x, j) == i))
        };
        let free = FiniteHModule::from_matrix(&exps, left(g.h()), default_k_max(p, &exps))?;
        let mut span_gens = Vec::new();
        for rel in &rels {
            for x in 0..size {
                span_gens.push(ring_mul(&g, q, &basis_vec(size, x), rel));
            }
        }
        let s = free.span(&span_gens)?;
        if free.log_order() - s.log_order() > bounds.max_log_order as u64 {
            continue;
        }
        let (xmod, proj, lifts) = free.quotient_with_lifts(&s)?;
        let xp = xmod.params();
        let tau = (0..m)
            .map(|dl| {
                let l = left(g.element(0, dl));
                let mut t = ModMatrix::zero(xp, xmod.rank(), xmod.rank());
                for (col, b) in lifts.iter().enumerate() {
                    let image = project(&xmod, &proj, &free.apply_endo(&l, b));
                    for (row, &v) in image.iter().enumerate() {
                        t.set_raw(row, col, v);
                    }
                }
                t
            })
            .collect::<Vec<_>>();
        let group = match build_group(g.clone(), xmod, tau, bounds.budget) {
            Ok(grp) => grp,
            Err(err @ Error::BudgetExceeded { .. }) => {
                over_budget = Some(err);
                continue;
            }
            Err(err) => return Err(err),
        };
        let sections = random_sections(&group, bounds.max_sections, &mut rng);
        match DescentInstance::new(group, sections) {
            Ok(inst) => return Ok(inst),
            Err(Error::InvalidSection { .. }) => continue,
            Err(err) => return Err(err),
        }
    }
    Err(over_budget.unwrap_or(Error::GenerationFailed))
}

fn random_sections(group: &DescentGroup, max_sections: usize, rng: &mut ChaCha8Rng) -> Vec<Section> {
    let module = group.module();
    let g = group.group();
    let x_size = group.x_size;
    let omega_d = module.omega_endo(g.d());
    let kernel: Vec<u32> = (0..x_size as u32)
        .filter(|&i| module.is_zero_element(&module.apply_endo(&omega_d, &module.element_at(i as u64))))
        .collect();
    let delta = g.delta();
    let mut sections = vec![Section::totally_ramified(group)];
    let r = rng.random_range(1..=max_sections.max(1));
    for _ in 1..r {
        let a_idx = kernel[rng.random_range(0..kernel.len())];
        let a = module.element_at(a_idx as u64);
        let gen_delta = rng.random_range(0..delta.order());
        let cyc = delta.powers(gen_delta);
        let mut section = Section { delta_subgroup: vec![delta.identity()], a: a.clone(), b: vec![module.zero()] };
        if cyc.len() > 1 {
            let ah = group.pack(a_idx, g.h());
            let target = g.chi()[gen_delta];
            let ah_pow = pow_idx(group, ah, target);
            let candidates: Vec<u32> = (0..x_size as u32)
                .filter(|&b| {
                    let bd = group.pack(b, g.element(0, gen_delta));
                    pow_idx(group, bd, cyc.len() as u64) == g.identity() as u32
                        && group.amb_mul(group.amb_mul(bd, ah), group.amb_inv(bd)) == ah_pow
                })
                .collect();
            if !candidates.is_empty() {
                let b = candidates[rng.random_range(0..candidates.len())];
                let bd = group.pack(b, g.element(0, gen_delta));
                let mut bs = Vec::with_capacity(cyc.len());
                let mut acc = g.identity() as u32;
                for _ in 0..cyc.len() {
                    bs.push(module.element_at(group.unpack(acc).0 as u64));
                    acc = group.amb_mul(acc, bd);
                }
                section.delta_subgroup = cyc;
                section.b = bs;
            }
        }
        sections.push(section);
    }
    sections
}

fn pow_idx(group: &DescentGroup, a: u32, mut e: u64) -> u32 {
    let mut base = a;
    let mut acc = group.group().identity() as u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = group.amb_mul(acc, base);
        }
        base = group.amb_mul(base, base);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(e: &[u32]) -> AbelianType {
        AbelianType::from_exponents(e.iter().copied())
    }

    fn z3_trivial_action() -> DescentGroup {
        let g = SemidirectGroup::from_preset(3, 1, DeltaPreset::Trivial).unwrap();
        let x = FiniteHModule::new(3, &[1], &[[1]]).unwrap();
        let tau = vec![x.identity_endo()];
        build_group(g, x, tau, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn direct_product_group() {
        let grp = z3_trivial_action();
        assert_eq!(grp.ambient_order(), 9);
        let a = AmbientElement { x: vec![1], g: grp.group().h() };
        let b = AmbientElement { x: vec![2], g: grp.group().identity() };
        assert_eq!(grp.mul(&a, &b), grp.mul(&b, &a));
        assert_eq!(grp.pow(&a, 3), AmbientElement { x: vec![0], g: 0 });
    }

    #[test]
    fn inverting_z2_gives_s3() {
        let g = SemidirectGroup::from_preset(3, 1, DeltaPreset::Z2Inverting).unwrap();
        assert_eq!(g.order(), 6);
        let s3 = DeltaGroup::s3();
        // find an isomorphism by brute force over bijections fixing the identity
        let mut perm: Vec<usize> = (0..6).collect();
        let mut found = false;
        permute(&mut perm, 0, &mut |f| {
            if (0..6).all(|a| (0..6).all(|b| f[g.mul(a, b)] == s3.mul(f[a], f[b]))) {
                found = true;
            }
        });
        assert!(found);
        let abelian = (0..6).all(|a| (0..6).all(|b| g.mul(a, b) == g.mul(b, a)));
        assert!(!abelian);
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn rejects_bad_tables_and_actions() {
        assert!(matches!(DeltaGroup::from_table(2, vec![0, 1, 1, 1]), Err(Error::InvalidGroupTable(_))));
        assert!(matches!(DeltaGroup::from_table(3, vec![0, 1, 2, 1, 0, 2, 2, 2, 0]), Err(Error::InvalidGroupTable(_))));
        assert!(matches!(
            SemidirectGroup::new(3, 1, DeltaGroup::cyclic(2), vec![1, 3]),
            Err(Error::ActionNotHomomorphism(_))
        ));
        // τ of order 2 on Z/3 must square to the identity
        let g = SemidirectGroup::from_preset(3, 1, DeltaPreset::Z2Central).unwrap();
        let x = FiniteHModule::new(3, &[1], &[[1]]).unwrap();
        let pr = x.params();
        let bad = vec![x.identity_endo(), ModMatrix::from_rows(pr, &[[0]]).unwrap()];
        assert!(build_group(g.clone(), x.clone(), bad, DEFAULT_BUDGET).is_err());
        let good = vec![x.identity_endo(), ModMatrix::from_rows(pr, &[[-1]]).unwrap()];
        assert!(build_group(g.clone(), x.clone(), good.clone(), DEFAULT_BUDGET).is_ok());
        assert!(matches!(build_group(g, x, good, 4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn hand_example() {
        let grp = z3_trivial_action();
        let mut sections = vec![Section::totally_ramified(&grp)];
        let inst = DescentInstance::new(grp.clone(), sections.clone()).unwrap();
        for n in 0..=1 {
            assert_eq!(inst.bruteforce_class_quotient(n).unwrap(), ty(&[1]));
            assert_eq!(inst.closed_form_quotient(n).unwrap(), ty(&[1]));
        }
        sections.push(Section { delta_subgroup: vec![0], a: vec![1], b: vec![vec![0]] });
        let inst = DescentInstance::new(grp, sections).unwrap();
        assert_eq!(inst.bruteforce_class_quotient(0).unwrap(), ty(&[]));
        assert_eq!(inst.bruteforce_class_quotient(1).unwrap(), ty(&[1]));
        assert_eq!(inst.closed_form_quotient(0).unwrap(), ty(&[]));
        assert_eq!(inst.closed_form_quotient(1).unwrap(), ty(&[1]));
        let report = inst.compare_oracle().unwrap();
        assert!(report.all_equal());
        let tower = inst.compile_to_tower().unwrap();
        assert_eq!(tower.module().abelian_type(), ty(&[1]));
        assert_eq!(tower.layer_sequence(1).unwrap().exponents(), [0, 1]);
        assert_eq!(inst.section_power(1, 1).unwrap(), AmbientElement { x: vec![0], g: 0 });
    }

    #[test]
    fn full_augmentation_image_kills_everything() {
        let g = SemidirectGroup::from_preset(3, 1, DeltaPreset::Z2Central).unwrap();
        let x = FiniteHModule::new(3, &[1], &[[1]]).unwrap();
        let tau = vec![x.identity_endo(), ModMatrix::from_rows(x.params(), &[[-1]]).unwrap()];
        let grp = build_group(g, x, tau, DEFAULT_BUDGET).unwrap();
        let inst = DescentInstance::new(grp.clone(), vec![Section::totally_ramified(&grp)]).unwrap();
        for n in 0..=1 {
            assert!(inst.closed_form_quotient(n).unwrap().is_trivial());
            assert!(inst.bruteforce_class_quotient(n).unwrap().is_trivial());
        }
        assert_eq!(inst.compile_to_tower().unwrap().module().rank(), 0);
    }

    #[test]
    fn invalid_sections() {
        let grp = z3_trivial_action();
        let base = Section::totally_ramified(&grp);
        let bad_first = Section { a: vec![1], ..base.clone() };
        assert!(DescentInstance::new(grp.clone(), vec![bad_first]).is_err());
        // the identity of Δ_i must have b = 0
        let bad = Section { delta_subgroup: vec![0], a: vec![0], b: vec![vec![1]] };
        assert!(matches!(
            DescentInstance::new(grp, vec![base, bad]),
            Err(Error::InvalidSection { index: 1, .. })
        ));
    }

    #[test]
    fn augmentation_presets() {
        for preset in DeltaPreset::ALL {
            for d in 1..=2 {
                for n in 0..=1 {
                    let g = SemidirectGroup::from_preset(3, d, preset).unwrap();
                    assert!(augmentation_check(&g, n, 3, DEFAULT_BUDGET).unwrap());
                }
            }
        }
        let g = SemidirectGroup::from_preset(2, 2, DeltaPreset::Z2Inverting).unwrap();
        assert!(augmentation_check(&g, 1, 4, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn random_instances_are_valid() {
        let b = DescentBounds::default();
        for seed in 0..40 {
            for preset in [DeltaPreset::Trivial, DeltaPreset::Z2Inverting, DeltaPreset::Z2Central] {
                let p = if seed % 2 == 0 { 2 } else { 3 };
                let d = 1 + (seed % 3 == 0) as u32;
                let inst = random_descent_instance(p, d, preset, b, seed).unwrap();
                assert!(inst.group().ambient_order() <= b.budget);
                for (i, s) in inst.sections().iter().enumerate() {
                    let law = inst.section_power(i, d).unwrap();
                    assert_eq!(law.g, inst.group().group().identity());
                    assert!(inst.module().is_zero_element(&law.x));
                    let _ = s;
                }
            }
        }
        let a = random_descent_instance(3, 1, DeltaPreset::Z2Inverting, b, 9).unwrap();
        let c = random_descent_instance(3, 1, DeltaPreset::Z2Inverting, b, 9).unwrap();
        assert_eq!(a.sections(), c.sections());
        let tiny = DescentBounds { max_log_order: 0, ..b };
        let inst = random_descent_instance(3, 1, DeltaPreset::Trivial, tiny, 1).unwrap();
        assert!(inst.sections().iter().all(|s| inst.module().is_zero_element(&s.a)));
    }

    #[test]
    fn section_order_law() {
        let b = DescentBounds::default();
        for seed in 0..20 {
            let inst = random_descent_instance(3, 2, DeltaPreset::Z2Central, b, seed).unwrap();
            let m = inst.module();
            for (i, s) in inst.sections().iter().enumerate() {
                for n in 0..=2 {
                    let got = inst.section_power(i, n).unwrap();
                    let want_x = m.apply_endo(&m.omega_endo(n), &s.a);
                    assert_eq!(got.x, want_x);
                    assert_eq!(got.g, inst.group().group().element(3u64.pow(n), 0));
                }
            }
        }
    }

    #[test]
    fn direct_products_match_closed_form() {
        let b = DescentBounds::default();
        for seed in 0..30 {
            let preset = if seed % 2 == 0 { DeltaPreset::Trivial } else { DeltaPreset::Z2Central };
            let p = if seed % 3 == 0 { 2 } else { 3 };
            let inst = random_descent_instance(p, 1 + (seed % 2) as u32, preset, b, seed).unwrap();
            let report = inst.compare_oracle().unwrap();
            for l in &report.levels {
                assert!(l.equal, "seed {seed} level {}: {} vs {}", l.n, l.brute, l.closed);
                assert!(l.brute_g_stable && l.closed_g_stable);
            }
        }
    }

    #[test]
    fn conjugate_sections_give_the_same_quotient() {
        let b = DescentBounds::default();
        for seed in 0..20 {
            let inst = random_descent_instance(3, 1, DeltaPreset::Z2Central, b, seed).unwrap();
            if inst.sections().len() < 2 || inst.module().rank() == 0 {
                continue;
            }
            let x = inst.module().element_at(seed % inst.module().order().unwrap());
            let conj = inst.conjugate_section(1, &x).unwrap();
            for n in 0..=1 {
                assert_eq!(inst.bruteforce_class_quotient(n).unwrap(), conj.bruteforce_class_quotient(n).unwrap());
            }
        }
    }
}
