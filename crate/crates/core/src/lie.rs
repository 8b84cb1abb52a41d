//! Lie (super)algebras and their modules presented by exact structure
//! constants on weight-graded bases, with axiom checking.
//!
//! Brackets are stored once per unordered pair (diagonal entries permitted
//! only for odd generators); super-antisymmetry completes the table. Lookups
//! distinguish "absent inside the window" (an exact zero) from "outside the
//! window" (unknown: [`Error::TruncationTooSmall`]).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{Basis, GenId, LinComb, SpaceTag};
use crate::linalg::SparseMatrix;
use crate::report::Report;
use crate::scalar::Scalar;

/// Finite proxy for a completed weight-graded space: all data are restricted
/// to `[w_min, w_max]`, monomials to at most `max_factors` exterior factors,
/// with `margin` outer weight bands used only for stability certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub w_min: i64,
    pub w_max: i64,
    pub max_factors: usize,
    pub margin: i64,
}

impl Truncation {
    pub fn window(w_min: i64, w_max: i64) -> Result<Self> {
        if w_min > 0 || w_max < 0 {
            return Err(Error::WindowInvalid(w_min, w_max));
        }
        Ok(Truncation {
            w_min,
            w_max,
            max_factors: 64,
            margin: 1,
        })
    }

    pub fn symmetric(n: i64) -> Self {
        Truncation::window(-n, n).expect("symmetric window")
    }

    pub fn with_max_factors(mut self, k: usize) -> Self {
        self.max_factors = k;
        self
    }

    pub fn with_margin(mut self, m: i64) -> Self {
        self.margin = m;
        self
    }

    pub fn contains(&self, w: i64) -> bool {
        self.w_min <= w && w <= self.w_max
    }

    /// Shrinks the window by `k` on both sides.
    pub fn shrunk(&self, k: i64) -> Truncation {
        Truncation {
            w_min: (self.w_min + k).min(0),
            w_max: (self.w_max - k).max(0),
            ..*self
        }
    }
}

/// A Lie (super)algebra on a weight-graded basis with exact structure
/// constants, valid inside a declared weight window.
#[derive(Clone, Debug)]
pub struct LieSpec {
    pub basis: Basis,
    pub gens: Vec<GenId>,
    brackets: BTreeMap<(GenId, GenId), LinComb<GenId>>,
    pub w_min: i64,
    pub w_max: i64,
}

impl LieSpec {
    pub fn new(basis: Basis, gens: Vec<GenId>, w_min: i64, w_max: i64) -> Self {
        LieSpec {
            basis,
            gens,
            brackets: BTreeMap::new(),
            w_min,
            w_max,
        }
    }

    /// Convenience constructor: registers `names` as degree-0 generators of
    /// the given weights, all carrying the same space tag.
    pub fn from_names(names: &[(&str, i64)], tag: SpaceTag) -> Result<Self> {
        let mut basis = Basis::new();
        let mut gens = Vec::new();
        let mut w_min = 0;
        let mut w_max = 0;
        for &(name, w) in names {
            gens.push(basis.add(name, w, 0, tag)?);
            w_min = w_min.min(w);
            w_max = w_max.max(w);
        }
        Ok(LieSpec::new(basis, gens, 2 * w_min, 2 * w_max))
    }

    pub fn parity(&self, g: GenId) -> u8 {
        self.basis.coeff_parity(g)
    }

    pub fn weight(&self, g: GenId) -> i64 {
        self.basis.weight(g)
    }

    pub fn in_window(&self, w: i64) -> bool {
        self.w_min <= w && w <= self.w_max
    }

    /// Declares `[x, y] = value`. The pair is canonicalized by id; weight
    /// additivity is enforced.
    pub fn set_bracket(&mut self, x: GenId, y: GenId, value: LinComb<GenId>) -> Result<()> {
        let wxy = self.weight(x) + self.weight(y);
        for (k, _) in value.iter() {
            if self.weight(*k) != wxy {
                return Err(Error::DimensionMismatch(format!(
                    "weight additivity violated: [{}, {}] -> {}",
                    self.basis.name(x),
                    self.basis.name(y),
                    self.basis.name(*k)
                )));
            }
        }
        if x.0 <= y.0 {
            if x == y && self.parity(x) == 0 && !value.is_zero() {
                return Err(Error::DimensionMismatch(format!(
                    "[{0}, {0}] must vanish for an even generator",
                    self.basis.name(x)
                )));
            }
            if value.is_zero() {
                self.brackets.remove(&(x, y));
            } else {
                self.brackets.insert((x, y), value);
            }
        } else {
            let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            return self.set_bracket(y, x, value.scaled(&sign));
        }
        Ok(())
    }

    pub fn set_bracket_coeffs(
        &mut self,
        x: GenId,
        y: GenId,
        terms: &[(GenId, Scalar)],
    ) -> Result<()> {
        let mut lc = LinComb::zero();
        for (g, c) in terms {
            lc.add_term(*g, c.clone());
        }
        self.set_bracket(x, y, lc)
    }

    /// `[x, y]` for generators. Errors when the product weight leaves the
    /// declared window (the value is unknown there, not zero).
    pub fn bracket_gen(&self, x: GenId, y: GenId) -> Result<LinComb<GenId>> {
        let w = self.weight(x) + self.weight(y);
        if !self.in_window(w) {
            return Err(Error::TruncationTooSmall(format!(
                "[{}, {}] has weight {} outside window [{}, {}]",
                self.basis.name(x),
                self.basis.name(y),
                w,
                self.w_min,
                self.w_max
            )));
        }
        if x.0 <= y.0 {
            Ok(self.brackets.get(&(x, y)).cloned().unwrap_or_default())
        } else {
            let val = self.brackets.get(&(y, x)).cloned().unwrap_or_default();
            let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            Ok(val.scaled(&sign))
        }
    }

    /// Bilinear, super-antisymmetric expansion of the bracket.
    pub fn bracket_eval(
        &self,
        x: &LinComb<GenId>,
        y: &LinComb<GenId>,
    ) -> Result<LinComb<GenId>> {
        let mut out = LinComb::zero();
        for (gx, cx) in x.iter() {
            for (gy, cy) in y.iter() {
                out.add_scaled(&self.bracket_gen(*gx, *gy)?, &(cx * cy));
            }
        }
        Ok(out)
    }

    pub fn render(&self, lc: &LinComb<GenId>) -> String {
        render_comb(&self.basis, lc)
    }

    /// Checks the super-Jacobi identity on all basis triples whose brackets
    /// stay inside the weight window; out-of-window triples are skipped and
    /// counted.
    pub fn check_jacobi(&self, trunc: &Truncation) -> Report {
        let mut report = Report::new("jacobi");
        let gens: Vec<GenId> = self
            .gens
            .iter()
            .copied()
            .filter(|&g| trunc.contains(self.weight(g)))
            .collect();
        for (i, &x) in gens.iter().enumerate() {
            for (j, &y) in gens.iter().enumerate().skip(i) {
                for &z in gens.iter().skip(j) {
                    match self.jacobiator(x, y, z) {
                        Ok(res) => {
                            report.checked += 1;
                            if !res.is_zero() {
                                report.violate(
                                    format!(
                                        "jacobi({}, {}, {})",
                                        self.basis.name(x),
                                        self.basis.name(y),
                                        self.basis.name(z)
                                    ),
                                    self.render(&res),
                                );
                            }
                        }
                        Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                        Err(e) => report.violate("jacobi evaluation", e.to_string()),
                    }
                }
            }
        }
        report
    }

    /// `[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]`.
    pub fn jacobiator(&self, x: GenId, y: GenId, z: GenId) -> Result<LinComb<GenId>> {
        let lx = LinComb::single(x);
        let ly = LinComb::single(y);
        let lz = LinComb::single(z);
        let mut res = self.bracket_eval(&lx, &self.bracket_eval(&ly, &lz)?)?;
        let xy_z = self.bracket_eval(&self.bracket_eval(&lx, &ly)?, &lz)?;
        res.add_scaled(&xy_z, &-Scalar::one());
        let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
            Scalar::one()
        } else {
            -Scalar::one()
        };
        let y_xz = self.bracket_eval(&ly, &self.bracket_eval(&lx, &lz)?)?;
        res.add_scaled(&y_xz, &sign);
        Ok(res)
    }

    /// Matrix of `ad(x)` compressed to the weight-window basis slice, in
    /// basis order. Components leaving the requested window are dropped.
    pub fn adjoint_matrix(&self, x: GenId, trunc: &Truncation) -> Result<SparseMatrix> {
        let mut slice: Vec<GenId> = self
            .gens
            .iter()
            .copied()
            .filter(|&g| trunc.contains(self.weight(g)))
            .collect();
        slice.sort_by_key(|&g| self.basis.ord_key(g));
        let index: BTreeMap<GenId, usize> =
            slice.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = SparseMatrix::zero(slice.len(), slice.len());
        for (j, &g) in slice.iter().enumerate() {
            let image = self.bracket_gen(x, g)?;
            for (k, c) in image.iter() {
                if let Some(&i) = index.get(k) {
                    m.add_to(i, j, c);
                }
            }
        }
        Ok(m)
    }
}

pub fn render_comb(basis: &Basis, lc: &LinComb<GenId>) -> String {
    if lc.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (g, c) in lc.iter() {
        parts.push(format!("{}*{}", c, basis.name(*g)));
    }
    parts.join(" + ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A module over a [`LieSpec`] given by an exact action table.
/// For `Side::Left` the table entry is `a · m`; for `Side::Right` it is
/// `m · a`. Weight spaces above `w_max` are genuinely zero; below `w_min`
/// they are unknown when `truncated_below` is set.
#[derive(Clone, Debug)]
pub struct ModuleSpec {
    pub gens: Vec<GenId>,
    pub side: Side,
    action: BTreeMap<(GenId, GenId), LinComb<GenId>>,
    pub w_min: i64,
    pub w_max: i64,
    pub truncated_below: bool,
}

impl ModuleSpec {
    pub fn new(gens: Vec<GenId>, side: Side, w_min: i64, w_max: i64) -> Self {
        ModuleSpec {
            gens,
            side,
            action: BTreeMap::new(),
            w_min,
            w_max,
            truncated_below: false,
        }
    }

    pub fn truncated(mut self) -> Self {
        self.truncated_below = true;
        self
    }

    pub fn set_action(
        &mut self,
        basis: &Basis,
        alg: GenId,
        m: GenId,
        value: LinComb<GenId>,
    ) -> Result<()> {
        let w = basis.weight(alg) + basis.weight(m);
        for (k, _) in value.iter() {
            if basis.weight(*k) != w {
                return Err(Error::DimensionMismatch(format!(
                    "module weight additivity violated at ({}, {})",
                    basis.name(alg),
                    basis.name(m)
                )));
            }
        }
        if value.is_zero() {
            self.action.remove(&(alg, m));
        } else {
            self.action.insert((alg, m), value);
        }
        Ok(())
    }

    /// Action of an algebra generator on a module generator.
    pub fn act(&self, basis: &Basis, alg: GenId, m: GenId) -> Result<LinComb<GenId>> {
        let w = basis.weight(alg) + basis.weight(m);
        if w > self.w_max {
            return Ok(LinComb::zero());
        }
        if w < self.w_min {
            if self.truncated_below {
                return Err(Error::TruncationTooSmall(format!(
                    "action of {} on {} has weight {} below module depth {}",
                    basis.name(alg),
                    basis.name(m),
                    w,
                    self.w_min
                )));
            }
            return Ok(LinComb::zero());
        }
        Ok(self.action.get(&(alg, m)).cloned().unwrap_or_default())
    }

    pub fn act_comb(
        &self,
        basis: &Basis,
        alg: &LinComb<GenId>,
        m: &LinComb<GenId>,
    ) -> Result<LinComb<GenId>> {
        let mut out = LinComb::zero();
        for (ga, ca) in alg.iter() {
            for (gm, cm) in m.iter() {
                out.add_scaled(&self.act(basis, *ga, *gm)?, &(ca * cm));
            }
        }
        Ok(out)
    }

    /// Checks the side-appropriate action axiom on all algebra pairs and
    /// module generators inside the window.
    pub fn check_module(&self, alg: &LieSpec, trunc: &Truncation) -> Report {
        let mut report = Report::new("module action");
        let basis = &alg.basis;
        let agens: Vec<GenId> = alg
            .gens
            .iter()
            .copied()
            .filter(|&g| trunc.contains(alg.weight(g)))
            .collect();
        for (i, &x) in agens.iter().enumerate() {
            for &y in agens.iter().skip(i) {
                for &m in &self.gens {
                    let lm = LinComb::single(m);
                    let result: Result<LinComb<GenId>> = (|| {
                        let braket = alg.bracket_gen(x, y)?;
                        let lhs = self.act_comb(basis, &braket, &lm)?;
                        let sign = if alg.parity(x) == 1 && alg.parity(y) == 1 {
                            Scalar::one()
                        } else {
                            -Scalar::one()
                        };
                        let mut rhs = match self.side {
                            Side::Left => {
                                // [x,y]·m = x·(y·m) - (-1)^{xy} y·(x·m)
                                let xym =
                                    self.act_comb(basis, &LinComb::single(x), &self.act(basis, y, m)?)?;
                                let yxm =
                                    self.act_comb(basis, &LinComb::single(y), &self.act(basis, x, m)?)?;
                                let mut r = xym;
                                r.add_scaled(&yxm, &sign);
                                r
                            }
                            Side::Right => {
                                // m·[x,y] = (m·x)·y - (-1)^{xy} (m·y)·x
                                let mxy =
                                    self.act_comb(basis, &LinComb::single(y), &self.act(basis, x, m)?)?;
                                let myx =
                                    self.act_comb(basis, &LinComb::single(x), &self.act(basis, y, m)?)?;
                                let mut r = mxy;
                                r.add_scaled(&myx, &sign);
                                r
                            }
                        };
                        rhs.add_scaled(&lhs, &-Scalar::one());
                        Ok(rhs)
                    })();
                    match result {
                        Ok(res) => {
                            report.checked += 1;
                            if !res.is_zero() {
                                report.violate(
                                    format!(
                                        "action([{}, {}], {})",
                                        basis.name(x),
                                        basis.name(y),
                                        basis.name(m)
                                    ),
                                    render_comb(basis, &res),
                                );
                            }
                        }
                        Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                        Err(e) => report.violate("action evaluation", e.to_string()),
                    }
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sl2() -> (LieSpec, GenId, GenId, GenId) {
        let mut spec = LieSpec::from_names(&[("e", 0), ("h", 0), ("f", 0)], SpaceTag::B).unwrap();
        let e = spec.basis.lookup("e").unwrap();
        let h = spec.basis.lookup("h").unwrap();
        let f = spec.basis.lookup("f").unwrap();
        spec.set_bracket_coeffs(h, e, &[(e, Scalar::from_int(2))]).unwrap();
        spec.set_bracket_coeffs(h, f, &[(f, Scalar::from_int(-2))]).unwrap();
        spec.set_bracket_coeffs(e, f, &[(h, Scalar::one())]).unwrap();
        (spec, e, h, f)
    }

    #[test]
    fn bracket_eval_sl2() {
        let (spec, e, h, f) = sl2();
        let ef = spec
            .bracket_eval(&LinComb::single(e), &LinComb::single(f))
            .unwrap();
        assert_eq!(ef, LinComb::single(h));
        let fe = spec
            .bracket_eval(&LinComb::single(f), &LinComb::single(e))
            .unwrap();
        assert_eq!(fe, LinComb::term(h, -Scalar::one()));
        let ee = spec
            .bracket_eval(&LinComb::single(e), &LinComb::single(e))
            .unwrap();
        assert!(ee.is_zero());
    }

    #[test]
    fn jacobi_sl2_passes() {
        let (spec, ..) = sl2();
        let report = spec.check_jacobi(&Truncation::symmetric(0));
        assert!(report.passed(), "{report}");
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn jacobi_scaled_ef_still_passes() {
        // [e,f] = 2h is sl2 in a rescaled basis, so Jacobi must still hold
        let (mut spec, e, _, f) = sl2();
        let h = spec.basis.lookup("h").unwrap();
        spec.set_bracket_coeffs(e, f, &[(h, Scalar::from_int(2))]).unwrap();
        assert!(spec.check_jacobi(&Truncation::symmetric(0)).passed());
    }

    #[test]
    fn jacobi_perturbed_fails_at_ehf() {
        // [h,e] = 3e against [e,f] = h, [h,f] = -2f: expanding the
        // jacobiator on (e,h,f) by hand leaves -h
        let (mut spec, e, h, _) = sl2();
        spec.set_bracket_coeffs(h, e, &[(e, Scalar::from_int(3))]).unwrap();
        let report = spec.check_jacobi(&Truncation::symmetric(0));
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.what.contains('e')
            && v.what.contains('h')
            && v.what.contains('f')));
    }

    #[test]
    fn abelian_passes_everything() {
        let spec = LieSpec::from_names(&[("x", 0), ("y", 0)], SpaceTag::B).unwrap();
        assert!(spec.check_jacobi(&Truncation::symmetric(0)).passed());
        let x = spec.basis.lookup("x").unwrap();
        let y = spec.basis.lookup("y").unwrap();
        assert!(spec
            .bracket_eval(&LinComb::single(x), &LinComb::single(y))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn adjoint_matrix_sl2_cartan() {
        let (spec, _, h, _) = sl2();
        let m = spec.adjoint_matrix(h, &Truncation::symmetric(0)).unwrap();
        // basis order is declaration order here (equal weights/tags): e, h, f
        assert_eq!(m.get(0, 0), Scalar::from_int(2));
        assert_eq!(m.get(1, 1), Scalar::zero());
        assert_eq!(m.get(2, 2), Scalar::from_int(-2));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn adjoint_module_of_sl2_checks() {
        let (spec, ..) = sl2();
        let mut module = ModuleSpec::new(spec.gens.clone(), Side::Left, 0, 0);
        for &x in &spec.gens {
            for &m in &spec.gens {
                let v = spec.bracket_gen(x, m).unwrap();
                module.set_action(&spec.basis, x, m, v).unwrap();
            }
        }
        let report = module.check_module(&spec, &Truncation::symmetric(0));
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn transposed_natural_module_fails() {
        // natural 2-dim module of sl2 with the e-action transposed
        let (spec, e, h, f) = sl2();
        let mut basis = spec.basis.clone();
        let vp = basis.add("v+", 0, 0, SpaceTag::Module).unwrap();
        let vm = basis.add("v-", 0, 0, SpaceTag::Module).unwrap();
        let mut alg = spec.clone();
        alg.basis = basis.clone();
        let mut module = ModuleSpec::new(vec![vp, vm], Side::Left, 0, 0);
        // correct actions: e·v- = v+, f·v+ = v-, h·v± = ±v±; transpose e
        module.set_action(&basis, e, vp, LinComb::single(vm)).unwrap();
        module.set_action(&basis, f, vp, LinComb::single(vm)).unwrap();
        module
            .set_action(&basis, h, vp, LinComb::single(vp))
            .unwrap();
        module
            .set_action(&basis, h, vm, LinComb::term(vm, -Scalar::one()))
            .unwrap();
        let report = module.check_module(&alg, &Truncation::symmetric(0));
        assert!(!report.passed());
    }

    #[test]
    fn window_escape_is_loud() {
        let mut spec = LieSpec::from_names(&[("a", 2), ("b", 2)], SpaceTag::B).unwrap();
        spec.w_min = -3;
        spec.w_max = 3;
        let a = spec.basis.lookup("a").unwrap();
        let b = spec.basis.lookup("b").unwrap();
        match spec.bracket_gen(a, b) {
            Err(Error::TruncationTooSmall(_)) => {}
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
