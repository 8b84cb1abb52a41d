//! Weight- and degree-graded basis bookkeeping, exterior monomials, and the
//! single Koszul sign rule used by every complex in the crate.
//!
//! Every exterior factor carries the parity `homdeg + 1 (mod 2)`, so two
//! degree-0 generators anticommute. Degree contributions depend on the role
//! of the monomial: factors on the "raising" side (cochain slots, dual-side
//! ring generators) contribute `homdeg + 1`, factors on the "lowering" side
//! (chain-side factors such as the `c`-part of a semiinfinite module)
//! contribute `homdeg - 1`. Dual generators are registered with negated
//! weight and homological degree, so weights always add up literally.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which space a generator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpaceTag {
    B,
    C,
    BStar,
    CStar,
    Module,
    Central,
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceTag::B => "b",
            SpaceTag::C => "c",
            SpaceTag::BStar => "b*",
            SpaceTag::CStar => "c*",
            SpaceTag::Module => "module",
            SpaceTag::Central => "central",
        };
        f.write_str(s)
    }
}

/// Interned generator handle. Ordering of monomial factors goes through
/// [`Basis::ord_key`], never through the raw index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

impl fmt::Debug for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct GenInfo {
    pub name: String,
    pub weight: i64,
    pub homdeg: i64,
    pub tag: SpaceTag,
    /// Paired dual generator, if registered.
    pub dual: Option<GenId>,
}

/// Registry of generators. Generators are never removed; ids stay stable.
#[derive(Clone, Debug, Default)]
pub struct Basis {
    gens: Vec<GenInfo>,
    by_name: BTreeMap<String, GenId>,
}

impl Basis {
    pub fn new() -> Self {
        Basis::default()
    }

    pub fn add(&mut self, name: &str, weight: i64, homdeg: i64, tag: SpaceTag) -> Result<GenId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateGenerator(name.to_string()));
        }
        let id = GenId(self.gens.len() as u32);
        self.gens.push(GenInfo {
            name: name.to_string(),
            weight,
            homdeg,
            tag,
            dual: None,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Registers the dual of `primal` with negated weight and homological
    /// degree, linking both ways.
    pub fn add_dual(&mut self, primal: GenId, tag: SpaceTag) -> Result<GenId> {
        let (name, weight, homdeg) = {
            let info = self.info(primal);
            (format!("{}*", info.name), -info.weight, -info.homdeg)
        };
        let dual = self.add(&name, weight, homdeg, tag)?;
        self.gens[primal.0 as usize].dual = Some(dual);
        self.gens[dual.0 as usize].dual = Some(primal);
        Ok(dual)
    }

    pub fn info(&self, id: GenId) -> &GenInfo {
        &self.gens[id.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Result<GenId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn contains(&self, id: GenId) -> bool {
        (id.0 as usize) < self.gens.len()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.gens.len() as u32).map(GenId)
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.info(id).name
    }

    pub fn weight(&self, id: GenId) -> i64 {
        self.info(id).weight
    }

    pub fn homdeg(&self, id: GenId) -> i64 {
        self.info(id).homdeg
    }

    /// Parity of `id` as an exterior factor: `homdeg + 1 (mod 2)`.
    pub fn factor_parity(&self, id: GenId) -> u8 {
        ((self.info(id).homdeg + 1).rem_euclid(2)) as u8
    }

    /// Parity of `id` as a coefficient (module element or operator).
    pub fn coeff_parity(&self, id: GenId) -> u8 {
        (self.info(id).homdeg.rem_euclid(2)) as u8
    }

    /// Deterministic total order on generators: (weight, space tag,
    /// declaration index). All monomial normal forms use this key.
    pub fn ord_key(&self, id: GenId) -> (i64, SpaceTag, u32) {
        let info = self.info(id);
        (info.weight, info.tag, id.0)
    }

    fn check_id(&self, id: GenId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownGenerator(format!("#{}", id.0)))
        }
    }
}

/// A strict exterior monomial: factors strictly increasing in the basis
/// order, never repeated. The empty monomial is the unit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExtMonomial(pub Vec<GenId>);

impl ExtMonomial {
    pub fn unit() -> Self {
        ExtMonomial(Vec::new())
    }

    pub fn single(id: GenId) -> Self {
        ExtMonomial(vec![id])
    }

    /// Builds a monomial from factors in arbitrary order, returning the
    /// normalizing sign; `None` when a factor repeats.
    pub fn from_factors(basis: &Basis, factors: &[GenId]) -> Option<(i8, ExtMonomial)> {
        let mut m = ExtMonomial::unit();
        let mut sign = 1i8;
        for &g in factors.iter().rev() {
            let (s, next) = basis.wedge_gen(g, &m)?;
            sign *= s;
            m = next;
        }
        Some((sign, m))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: GenId) -> bool {
        self.0.contains(&id)
    }

    pub fn factors(&self) -> &[GenId] {
        &self.0
    }

    pub fn label(&self, basis: &Basis) -> String {
        if self.0.is_empty() {
            "1".to_string()
        } else {
            let names: Vec<&str> = self.0.iter().map(|&g| basis.name(g)).collect();
            names.join("^")
        }
    }
}

impl fmt::Debug for ExtMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext{:?}", self.0)
    }
}

impl Basis {
    pub fn monomial_weight(&self, m: &ExtMonomial) -> i64 {
        m.0.iter().map(|&g| self.weight(g)).sum()
    }

    /// Degree with each factor contributing `homdeg + 1` (cochain slots and
    /// dual-side ring factors).
    pub fn monomial_degree_raising(&self, m: &ExtMonomial) -> i64 {
        m.0.iter().map(|&g| self.homdeg(g) + 1).sum()
    }

    /// Degree with each factor contributing `homdeg - 1` (chain-side factors).
    pub fn monomial_degree_lowering(&self, m: &ExtMonomial) -> i64 {
        m.0.iter().map(|&g| self.homdeg(g) - 1).sum()
    }

    /// Sum of declared homological degrees, no exterior shift.
    pub fn monomial_homdeg(&self, m: &ExtMonomial) -> i64 {
        m.0.iter().map(|&g| self.homdeg(g)).sum()
    }

    pub fn monomial_parity(&self, m: &ExtMonomial) -> u8 {
        m.0.iter().map(|&g| self.factor_parity(g)).sum::<u8>() % 2
    }

    /// Left-wedges a single generator into a monomial: `g ∧ m`.
    /// Returns `None` when `g` already occurs.
    pub fn wedge_gen(&self, g: GenId, m: &ExtMonomial) -> Option<(i8, ExtMonomial)> {
        let gk = self.ord_key(g);
        let pg = self.factor_parity(g);
        let mut sign = 1i8;
        let mut out = Vec::with_capacity(m.0.len() + 1);
        let mut placed = false;
        for &f in &m.0 {
            let fk = self.ord_key(f);
            if fk == gk {
                return None; // repeated factor
            }
            if !placed && gk < fk {
                out.push(g);
                placed = true;
            }
            if !placed {
                // g moves right past f
                if pg == 1 && self.factor_parity(f) == 1 {
                    sign = -sign;
                }
            }
            out.push(f);
        }
        if !placed {
            out.push(g);
        }
        Some((sign, ExtMonomial(out)))
    }

    /// Koszul sign for swapping whole monomials m1, m2.
    pub fn swap_sign(&self, m1: &ExtMonomial, m2: &ExtMonomial) -> i8 {
        if self.monomial_parity(m1) == 1 && self.monomial_parity(m2) == 1 {
            -1
        } else {
            1
        }
    }

    /// Wedge product of monomials with the permutation/Koszul sign; `None`
    /// when a factor is shared.
    pub fn wedge(&self, m1: &ExtMonomial, m2: &ExtMonomial) -> Option<(i8, ExtMonomial)> {
        let mut sign = 1i8;
        let mut out = m2.clone();
        for &g in m1.0.iter().rev() {
            let (s, next) = self.wedge_gen(g, &out)?;
            sign *= s;
            out = next;
        }
        Some((sign, out))
    }

    /// Checked wedge for spec-level callers.
    pub fn wedge_checked(
        &self,
        m1: &ExtMonomial,
        m2: &ExtMonomial,
    ) -> Result<Option<(i8, ExtMonomial)>> {
        for &g in m1.0.iter().chain(m2.0.iter()) {
            self.check_id(g)?;
        }
        Ok(self.wedge(m1, m2))
    }

    /// Removes the factor `id` from `m` with the sign of moving it to the
    /// front (left contraction); `None` when absent.
    pub fn contract_factor(&self, id: GenId, m: &ExtMonomial) -> Option<(i8, ExtMonomial)> {
        let pos = m.0.iter().position(|&f| f == id)?;
        let pid = self.factor_parity(id);
        let mut sign = 1i8;
        if pid == 1 {
            for &f in &m.0[..pos] {
                if self.factor_parity(f) == 1 {
                    sign = -sign;
                }
            }
        }
        let mut out = m.0.clone();
        out.remove(pos);
        Some((sign, ExtMonomial(out)))
    }

    /// Contraction by a dual generator: removes the factor paired with
    /// `phi` (left contraction). Errors when `phi` has no registered pair.
    pub fn contract(&self, phi: GenId, m: &ExtMonomial) -> Result<Option<(i8, ExtMonomial)>> {
        self.check_id(phi)?;
        let primal = self
            .info(phi)
            .dual
            .ok_or_else(|| Error::UnknownGenerator(format!("{} has no dual pair", self.name(phi))))?;
        Ok(self.contract_factor(primal, m))
    }
}

/// A finitely supported linear combination with exact coefficients.
/// Zero coefficients are never stored; iteration order is deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct LinComb<K: Ord + Clone> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord + Clone> Default for LinComb<K> {
    fn default() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: K, coeff: Scalar) -> Self {
        let mut lc = Self::zero();
        lc.add_term(key, coeff);
        lc
    }

    pub fn single(key: K) -> Self {
        Self::term(key, Scalar::one())
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(k.clone(), factor * v);
        }
    }

    pub fn scale(&mut self, factor: &Scalar) {
        if factor.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v = &*v * factor;
        }
    }

    pub fn scaled(mut self, factor: &Scalar) -> Self {
        self.scale(factor);
        self
    }

    pub fn negated(self) -> Self {
        self.scaled(&-Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_iter_terms(self) -> impl Iterator<Item = (K, Scalar)> {
        self.terms.into_iter()
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, v) in self.iter() {
            out.add_term(f(k), v.clone());
        }
        out
    }

    /// Applies a linear map given on basis keys and resums.
    pub fn flat_map<K2: Ord + Clone>(
        &self,
        mut f: impl FnMut(&K) -> LinComb<K2>,
    ) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, v) in self.iter() {
            out.add_scaled(&f(k), v);
        }
        out
    }

    /// Fallible version of [`Self::flat_map`].
    pub fn try_flat_map<K2: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&K) -> std::result::Result<LinComb<K2>, E>,
    ) -> std::result::Result<LinComb<K2>, E> {
        let mut out = LinComb::zero();
        for (k, v) in self.iter() {
            out.add_scaled(&f(k)?, v);
        }
        Ok(out)
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{v}*{k:?}")?;
        }
        Ok(())
    }
}

pub fn sign_scalar(sign: i8) -> Scalar {
    if sign >= 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Extends generator images `D(g)` to an exterior monomial as a (signed)
/// derivation of the given operator parity.
pub fn apply_derivation(
    basis: &Basis,
    op_parity: u8,
    images: &impl Fn(GenId) -> LinComb<ExtMonomial>,
    m: &ExtMonomial,
) -> LinComb<ExtMonomial> {
    let mut out = LinComb::zero();
    let mut prefix_parity = 0u8;
    for (j, &g) in m.0.iter().enumerate() {
        let image = images(g);
        if !image.is_zero() {
            let prefix = ExtMonomial(m.0[..j].to_vec());
            let suffix = ExtMonomial(m.0[j + 1..].to_vec());
            let cross = if op_parity == 1 && prefix_parity == 1 {
                -1i8
            } else {
                1
            };
            for (val, coeff) in image.iter() {
                let Some((s1, pm)) = basis.wedge(&prefix, val) else {
                    continue;
                };
                let Some((s2, full)) = basis.wedge(&pm, &suffix) else {
                    continue;
                };
                out.add_term(full, coeff * &sign_scalar(cross * s1 * s2));
            }
        }
        prefix_parity = (prefix_parity + self_parity(basis, g)) % 2;
    }
    out
}

fn self_parity(basis: &Basis, g: GenId) -> u8 {
    basis.factor_parity(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_even_gens() -> (Basis, GenId, GenId) {
        let mut basis = Basis::new();
        let e1 = basis.add("e1", 0, 0, SpaceTag::B).unwrap();
        let e2 = basis.add("e2", 0, 0, SpaceTag::B).unwrap();
        (basis, e1, e2)
    }

    #[test]
    fn wedge_transposition_sign() {
        let (basis, e1, e2) = two_even_gens();
        let m1 = ExtMonomial::single(e1);
        let m2 = ExtMonomial::single(e2);
        let (s, m) = basis.wedge(&m1, &m2).unwrap();
        assert_eq!(s, 1);
        assert_eq!(m.factors(), &[e1, e2]);
        let (s, m) = basis.wedge(&m2, &m1).unwrap();
        assert_eq!(s, -1);
        assert_eq!(m.factors(), &[e1, e2]);
        assert!(basis.wedge(&m1, &m1).is_none());
    }

    #[test]
    fn contract_signs() {
        let mut basis = Basis::new();
        let e1 = basis.add("e1", 0, 0, SpaceTag::B).unwrap();
        let e2 = basis.add("e2", 0, 0, SpaceTag::B).unwrap();
        let e3 = basis.add("e3", 0, 0, SpaceTag::B).unwrap();
        let d1 = basis.add_dual(e1, SpaceTag::BStar).unwrap();
        let d2 = basis.add_dual(e2, SpaceTag::BStar).unwrap();
        let d3 = basis.add_dual(e3, SpaceTag::BStar).unwrap();
        let m = ExtMonomial(vec![e1, e2]);
        let (s, r) = basis.contract(d1, &m).unwrap().unwrap();
        assert_eq!((s, r.factors()), (1, &[e2][..]));
        let (s, r) = basis.contract(d2, &m).unwrap().unwrap();
        assert_eq!((s, r.factors()), (-1, &[e1][..]));
        assert!(basis.contract(d3, &m).unwrap().is_none());
    }

    #[test]
    fn weight_additivity_and_dual_negation() {
        let mut basis = Basis::new();
        let a = basis.add("a", -1, 0, SpaceTag::C).unwrap();
        let b = basis.add("b", -2, 0, SpaceTag::C).unwrap();
        let m = ExtMonomial(vec![a, b]);
        assert_eq!(basis.monomial_weight(&ExtMonomial::unit()), 0);
        assert_eq!(basis.monomial_weight(&m), -3);
        let c = basis.add("c", 2, 0, SpaceTag::B).unwrap();
        let cd = basis.add_dual(c, SpaceTag::BStar).unwrap();
        assert_eq!(basis.weight(cd), -2);
    }

    #[test]
    fn wedge_associativity_with_signs() {
        // random-ish monomials over a mixed-parity basis
        let mut basis = Basis::new();
        let mut gens = Vec::new();
        for (i, hd) in [0i64, 1, 0, 1, 2, 3].iter().enumerate() {
            gens.push(
                basis
                    .add(&format!("g{i}"), (i as i64) - 2, *hd, SpaceTag::B)
                    .unwrap(),
            );
        }
        let monos = [
            ExtMonomial(vec![gens[0]]),
            ExtMonomial(vec![gens[1], gens[4]]),
            ExtMonomial(vec![gens[2], gens[5]]),
            ExtMonomial::unit(),
            ExtMonomial(vec![gens[3]]),
        ];
        for a in &monos {
            for b in &monos {
                for c in &monos {
                    let left = basis
                        .wedge(a, b)
                        .and_then(|(s1, ab)| basis.wedge(&ab, c).map(|(s2, m)| (s1 * s2, m)));
                    let right = basis
                        .wedge(b, c)
                        .and_then(|(s2, bc)| basis.wedge(a, &bc).map(|(s1, m)| (s1 * s2, m)));
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn contract_is_a_signed_derivation() {
        let mut basis = Basis::new();
        let mut gens = Vec::new();
        for (i, hd) in [0i64, 1, 0, 2].iter().enumerate() {
            gens.push(
                basis
                    .add(&format!("x{i}"), i as i64, *hd, SpaceTag::B)
                    .unwrap(),
            );
        }
        let duals: Vec<GenId> = gens
            .iter()
            .map(|&g| basis.add_dual(g, SpaceTag::BStar).unwrap())
            .collect();
        // iota_phi(m1 ∧ m2) = iota_phi(m1) ∧ m2 + (-1)^{p(phi) p(m1)} m1 ∧ iota_phi(m2)
        let m1 = ExtMonomial(vec![gens[0], gens[1]]);
        let m2 = ExtMonomial(vec![gens[2], gens[3]]);
        for (&phi, &primal) in duals.iter().zip(gens.iter()) {
            let (s12, m12) = basis.wedge(&m1, &m2).unwrap();
            let mut lhs: LinComb<ExtMonomial> = LinComb::zero();
            if let Some((s, r)) = basis.contract(phi, &m12).unwrap() {
                lhs.add_term(r, sign_scalar(s12 * s));
            }
            let mut rhs: LinComb<ExtMonomial> = LinComb::zero();
            if let Some((s, r)) = basis.contract(phi, &m1).unwrap() {
                if let Some((s2, full)) = basis.wedge(&r, &m2) {
                    rhs.add_term(full, sign_scalar(s * s2));
                }
            }
            if let Some((s, r)) = basis.contract(phi, &m2).unwrap() {
                let cross = if basis.factor_parity(primal) == 1 && basis.monomial_parity(&m1) == 1
                {
                    -1
                } else {
                    1
                };
                if let Some((s2, full)) = basis.wedge(&m1, &r) {
                    rhs.add_term(full, sign_scalar(cross * s * s2));
                }
            }
            assert_eq!(lhs, rhs, "derivation property fails for {phi:?}");
        }
    }

    #[test]
    fn contract_twice_is_zero() {
        let mut basis = Basis::new();
        let a = basis.add("a", 0, 0, SpaceTag::B).unwrap();
        let b = basis.add("b", 0, 1, SpaceTag::B).unwrap();
        let da = basis.add_dual(a, SpaceTag::BStar).unwrap();
        let m = ExtMonomial(vec![a, b]);
        let (_, r) = basis.contract(da, &m).unwrap().unwrap();
        assert!(basis.contract(da, &r).unwrap().is_none());
    }

    #[test]
    fn lincomb_cancellation() {
        let mut lc: LinComb<u32> = LinComb::zero();
        lc.add_term(3, Scalar::from_int(2));
        lc.add_term(3, Scalar::from_int(-2));
        assert!(lc.is_zero());
    }
}
