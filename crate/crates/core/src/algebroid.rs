//! Lie algebroids over exterior base algebras, presented on a frame.
//!
//! An algebroid here is `A = F ⊗ R` with `R = Λ(ring generators)` and a
//! finite frame `F`: the bracket of frame elements is `A`-valued, the anchor
//! acts on ring generators by derivations, and general elements are left
//! `R`-combinations `ρ·x` of frame elements. Curved data add the degree-1
//! derivations `d_R`, `d_A` and the curvature `h ∈ A_2` with
//! `d_A² = [h, -]` and `d_R² = h(-)`; `d_A(h) = 0` is imposed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{apply_derivation, sign_scalar, Basis, ExtMonomial, GenId, LinComb};
use crate::report::Report;
use crate::scalar::Scalar;

/// A basis element `ρ ⊗ x` of `A = F ⊗ R`: ring monomial, then frame
/// generator.
pub type AElem = (ExtMonomial, GenId);

/// `R`-combinations of frame elements.
pub type AValue = LinComb<AElem>;

pub fn unit_frame(x: GenId) -> AValue {
    AValue::single((ExtMonomial::unit(), x))
}

#[derive(Clone, Debug)]
pub struct AlgebroidSpec {
    pub basis: Basis,
    pub frame: Vec<GenId>,
    pub ring_gens: Vec<GenId>,
    /// Dual slot generator for each frame generator.
    pub slot_duals: BTreeMap<GenId, GenId>,
    bracket: BTreeMap<(GenId, GenId), AValue>,
    /// Anchor images `τ_x(r)` on (frame gen, ring gen) pairs.
    anchor: BTreeMap<(GenId, GenId), LinComb<ExtMonomial>>,
    pub w_min: i64,
    pub w_max: i64,
}

impl AlgebroidSpec {
    /// Registers slot duals for the frame and builds an empty algebroid.
    pub fn new(
        mut basis: Basis,
        frame: Vec<GenId>,
        ring_gens: Vec<GenId>,
        w_min: i64,
        w_max: i64,
    ) -> Result<Self> {
        let mut slot_duals = BTreeMap::new();
        for &x in &frame {
            let dual = match basis.info(x).dual {
                Some(d) => d,
                None => basis.add_dual(x, crate::graded::SpaceTag::BStar)?,
            };
            slot_duals.insert(x, dual);
        }
        Ok(AlgebroidSpec {
            basis,
            frame,
            ring_gens,
            slot_duals,
            bracket: BTreeMap::new(),
            anchor: BTreeMap::new(),
            w_min,
            w_max,
        })
    }

    pub fn parity(&self, x: GenId) -> u8 {
        self.basis.coeff_parity(x)
    }

    pub fn elem_weight(&self, a: &AElem) -> i64 {
        self.basis.monomial_weight(&a.0) + self.basis.weight(a.1)
    }

    pub fn elem_degree(&self, a: &AElem) -> i64 {
        self.basis.monomial_degree_raising(&a.0) + self.basis.homdeg(a.1)
    }

    pub fn elem_parity(&self, a: &AElem) -> u8 {
        (self.basis.monomial_parity(&a.0) + self.basis.coeff_parity(a.1)) % 2
    }

    pub fn in_window(&self, w: i64) -> bool {
        self.w_min <= w && w <= self.w_max
    }

    pub fn set_bracket(&mut self, x: GenId, y: GenId, value: AValue) -> Result<()> {
        if x.0 <= y.0 {
            if x == y && self.parity(x) == 0 && !value.is_zero() {
                return Err(Error::DimensionMismatch(format!(
                    "[{0}, {0}] must vanish for an even frame generator",
                    self.basis.name(x)
                )));
            }
            if value.is_zero() {
                self.bracket.remove(&(x, y));
            } else {
                self.bracket.insert((x, y), value);
            }
            Ok(())
        } else {
            let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            self.set_bracket(y, x, value.scaled(&sign))
        }
    }

    pub fn set_anchor(&mut self, x: GenId, r: GenId, value: LinComb<ExtMonomial>) {
        if value.is_zero() {
            self.anchor.remove(&(x, r));
        } else {
            self.anchor.insert((x, r), value);
        }
    }

    /// `[x, y]` of frame generators; errors when the pair's weight leaves
    /// the window.
    pub fn bracket_frame(&self, x: GenId, y: GenId) -> Result<AValue> {
        let w = self.basis.weight(x) + self.basis.weight(y);
        if !self.in_window(w) {
            return Err(Error::TruncationTooSmall(format!(
                "frame bracket [{}, {}] at weight {}",
                self.basis.name(x),
                self.basis.name(y),
                w
            )));
        }
        if x.0 <= y.0 {
            Ok(self.bracket.get(&(x, y)).cloned().unwrap_or_default())
        } else {
            let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            Ok(self
                .bracket
                .get(&(y, x))
                .cloned()
                .unwrap_or_default()
                .scaled(&sign))
        }
    }

    /// Anchor derivation `τ_x` applied to a ring monomial.
    pub fn anchor_apply(&self, x: GenId, rho: &ExtMonomial) -> LinComb<ExtMonomial> {
        apply_derivation(
            &self.basis,
            self.parity(x),
            &|g| self.anchor.get(&(x, g)).cloned().unwrap_or_default(),
            rho,
        )
    }

    /// Anchor of a general element: `τ(ρ·x)(σ) = ρ ∧ τ_x(σ)`.
    pub fn anchor_apply_elem(&self, a: &AElem, rho: &ExtMonomial) -> LinComb<ExtMonomial> {
        let inner = self.anchor_apply(a.1, rho);
        let mut out = LinComb::zero();
        for (mono, c) in inner.iter() {
            if let Some((s, m)) = self.basis.wedge(&a.0, mono) {
                out.add_term(m, c * &sign_scalar(s));
            }
        }
        out
    }

    /// Full bracket of dressed elements
    /// `[ρ⊗x, σ⊗y] = ±(ρ∧σ)[x,y] + ρ∧τ_x(σ)⊗y ∓ σ∧τ_y(ρ)⊗x`.
    pub fn bracket_dressed(&self, a: &AElem, b: &AElem) -> Result<AValue> {
        let (rho, x) = a;
        let (sigma, y) = b;
        let mut out = AValue::zero();

        // (-1)^{|x||σ|} (ρ∧σ) ⊗ [x, y]
        let base = self.bracket_frame(*x, *y)?;
        let cross = if self.parity(*x) == 1 && self.basis.monomial_parity(sigma) == 1 {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        if let Some((s0, rs)) = self.basis.wedge(rho, sigma) {
            for ((mu, z), c) in base.iter() {
                if let Some((s1, full)) = self.basis.wedge(&rs, mu) {
                    out.add_term((full, *z), c * &(&cross * &sign_scalar(s0 * s1)));
                }
            }
        }

        // ρ ∧ τ_x(σ) ⊗ y
        for (mono, c) in self.anchor_apply(*x, sigma).iter() {
            if let Some((s, full)) = self.basis.wedge(rho, mono) {
                out.add_term((full, *y), c * &sign_scalar(s));
            }
        }

        // -(-1)^{|ρ⊗x||σ⊗y|} σ ∧ τ_y(ρ) ⊗ x
        let pa = self.elem_parity(a);
        let pb = self.elem_parity(b);
        let sign = if pa == 1 && pb == 1 {
            Scalar::one()
        } else {
            -Scalar::one()
        };
        for (mono, c) in self.anchor_apply(*y, rho).iter() {
            if let Some((s, full)) = self.basis.wedge(sigma, mono) {
                out.add_term((full, *x), c * &(&sign * &sign_scalar(s)));
            }
        }
        Ok(out)
    }

    pub fn bracket_values(
        &self,
        a: &AValue,
        b: &AValue,
    ) -> Result<AValue> {
        let mut out = AValue::zero();
        for (ea, ca) in a.iter() {
            for (eb, cb) in b.iter() {
                out.add_scaled(&self.bracket_dressed(ea, eb)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn render(&self, v: &AValue) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((mono, x), c) in v.iter() {
            parts.push(format!("{}*{}({})", c, mono.label(&self.basis), self.basis.name(*x)));
        }
        parts.join(" + ")
    }

    pub fn render_ring(&self, v: &LinComb<ExtMonomial>) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (mono, c) in v.iter() {
            parts.push(format!("{}*{}", c, mono.label(&self.basis)));
        }
        parts.join(" + ")
    }

    /// Checks frame-triple Jacobi, anchor compatibility
    /// `[τ(a), τ(b)] = τ([a,b])` on ring generators, and the Leibniz rule
    /// `[a, r·b] = τ(a)(r)·b ± r·[a,b]` on frame × dressed pairs.
    pub fn verify(&self) -> Report {
        let mut report = Report::new("algebroid");
        // Jacobi on frame triples
        for (i, &x) in self.frame.iter().enumerate() {
            for (j, &y) in self.frame.iter().enumerate().skip(i) {
                for &z in self.frame.iter().skip(j) {
                    match self.frame_jacobiator(x, y, z) {
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
        // anchor compatibility on ring generators
        for (i, &x) in self.frame.iter().enumerate() {
            for &y in self.frame.iter().skip(i) {
                for &r in &self.ring_gens {
                    match self.anchor_compat_residual(x, y, r) {
                        Ok(res) => {
                            report.checked += 1;
                            if !res.is_zero() {
                                report.violate(
                                    format!(
                                        "anchor_compat({}, {}; {})",
                                        self.basis.name(x),
                                        self.basis.name(y),
                                        self.basis.name(r)
                                    ),
                                    self.render_ring(&res),
                                );
                            }
                        }
                        Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                        Err(e) => report.violate("anchor compatibility", e.to_string()),
                    }
                }
            }
        }
        // Leibniz [x, r·y] = τ_x(r)·y + (-1)^{|x||r|} r·[x, y]
        for &x in &self.frame {
            for &y in &self.frame {
                for &r in &self.ring_gens {
                    let res: Result<AValue> = (|| {
                        let rm = ExtMonomial::single(r);
                        let lhs = self.bracket_dressed(&(ExtMonomial::unit(), x), &(rm.clone(), y))?;
                        let mut rhs = AValue::zero();
                        for (mono, c) in self.anchor_apply(x, &rm).iter() {
                            rhs.add_term((mono.clone(), y), c.clone());
                        }
                        let sign = if self.parity(x) == 1 && self.basis.factor_parity(r) == 1 {
                            -Scalar::one()
                        } else {
                            Scalar::one()
                        };
                        for ((mu, z), c) in self.bracket_frame(x, y)?.iter() {
                            if let Some((s, full)) = self.basis.wedge(&rm, mu) {
                                rhs.add_term((full, *z), c * &(&sign * &sign_scalar(s)));
                            }
                        }
                        rhs.add_scaled(&lhs, &-Scalar::one());
                        Ok(rhs)
                    })();
                    match res {
                        Ok(res) => {
                            report.checked += 1;
                            if !res.is_zero() {
                                report.violate(
                                    format!(
                                        "leibniz({}, {}·{})",
                                        self.basis.name(x),
                                        self.basis.name(r),
                                        self.basis.name(y)
                                    ),
                                    self.render(&res),
                                );
                            }
                        }
                        Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                        Err(e) => report.violate("leibniz evaluation", e.to_string()),
                    }
                }
            }
        }
        report
    }

    fn frame_jacobiator(&self, x: GenId, y: GenId, z: GenId) -> Result<AValue> {
        let ux = unit_frame(x);
        let uy = unit_frame(y);
        let uz = unit_frame(z);
        let mut res = self.bracket_values(&ux, &self.bracket_values(&uy, &uz)?)?;
        res.add_scaled(
            &self.bracket_values(&self.bracket_values(&ux, &uy)?, &uz)?,
            &-Scalar::one(),
        );
        let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
            Scalar::one()
        } else {
            -Scalar::one()
        };
        res.add_scaled(
            &self.bracket_values(&uy, &self.bracket_values(&ux, &uz)?)?,
            &sign,
        );
        Ok(res)
    }

    /// `τ_x(τ_y(r)) - (-1)^{|x||y|} τ_y(τ_x(r)) - τ_{[x,y]}(r)`.
    fn anchor_compat_residual(
        &self,
        x: GenId,
        y: GenId,
        r: GenId,
    ) -> Result<LinComb<ExtMonomial>> {
        let rm = ExtMonomial::single(r);
        let mut res = self
            .anchor_apply(y, &rm)
            .flat_map(|m| self.anchor_apply(x, m));
        let sign = if self.parity(x) == 1 && self.parity(y) == 1 {
            Scalar::one()
        } else {
            -Scalar::one()
        };
        res.add_scaled(
            &self
                .anchor_apply(x, &rm)
                .flat_map(|m| self.anchor_apply(y, m)),
            &sign,
        );
        for ((mu, z), c) in self.bracket_frame(x, y)?.iter() {
            // τ(μ·z)(r) = μ ∧ τ_z(r)
            for (mono, c2) in self.anchor_apply(*z, &rm).iter() {
                if let Some((s, full)) = self.basis.wedge(mu, mono) {
                    res.add_term(full, &(c * c2) * &-sign_scalar(s));
                }
            }
        }
        Ok(res)
    }
}

/// Global sign conventions of the curved structure, fixed once for the whole
/// crate. `d_R` is the Chevalley codifferential sign, `d_b` the dual of the
/// mixed bracket component, `h` the curvature normalization. These are the
/// documented single flip points for the convention; all verifiers and the
/// acceptance suite pin them operationally.
pub mod convention {
    /// Sign of the codifferential `d_R(r*) = D_R · Σ r*([s,t]) s*∧t*`.
    pub const D_R: i64 = -1;
    /// Sign of the frame part `d_b(x) = D_B · Σ s* ⊗ μ2(x, s)`.
    pub const D_B: i64 = 1;
    /// Sign of the curvature element `h = H · Σ h*(s,t) ⊗ s*∧t*`.
    pub const H: i64 = 1;
    /// Sign of the coadjoint anchor `τ_x(u*) = ANCHOR · Σ u*([x,s]) s*`.
    pub const ANCHOR: i64 = -1;
}

#[derive(Clone, Debug)]
pub struct CDGAlgebroidSpec {
    pub algebroid: AlgebroidSpec,
    d_ring: BTreeMap<GenId, LinComb<ExtMonomial>>,
    d_frame: BTreeMap<GenId, AValue>,
    pub h: AValue,
}

impl CDGAlgebroidSpec {
    pub fn new(algebroid: AlgebroidSpec) -> Self {
        CDGAlgebroidSpec {
            algebroid,
            d_ring: BTreeMap::new(),
            d_frame: BTreeMap::new(),
            h: AValue::zero(),
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.algebroid.basis
    }

    pub fn set_d_ring(&mut self, r: GenId, value: LinComb<ExtMonomial>) {
        if value.is_zero() {
            self.d_ring.remove(&r);
        } else {
            self.d_ring.insert(r, value);
        }
    }

    pub fn set_d_frame(&mut self, x: GenId, value: AValue) {
        if value.is_zero() {
            self.d_frame.remove(&x);
        } else {
            self.d_frame.insert(x, value);
        }
    }

    /// `d_R` as an odd derivation on ring monomials.
    pub fn d_ring_apply(&self, rho: &ExtMonomial) -> LinComb<ExtMonomial> {
        apply_derivation(
            &self.algebroid.basis,
            1,
            &|g| self.d_ring.get(&g).cloned().unwrap_or_default(),
            rho,
        )
    }

    pub fn d_frame_gen(&self, x: GenId) -> AValue {
        self.d_frame.get(&x).cloned().unwrap_or_default()
    }

    /// `d_A(ρ⊗x) = d_R(ρ)⊗x + (-1)^{|ρ|} ρ ∧ d_A(x)`.
    pub fn d_elem(&self, a: &AElem) -> AValue {
        let basis = &self.algebroid.basis;
        let (rho, x) = a;
        let mut out = AValue::zero();
        for (mono, c) in self.d_ring_apply(rho).iter() {
            out.add_term((mono.clone(), *x), c.clone());
        }
        let sign = if basis.monomial_parity(rho) == 1 {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        for ((mu, z), c) in self.d_frame_gen(*x).iter() {
            if let Some((s, full)) = basis.wedge(rho, mu) {
                out.add_term((full, *z), c * &(&sign * &sign_scalar(s)));
            }
        }
        out
    }

    pub fn d_value(&self, v: &AValue) -> AValue {
        let mut out = AValue::zero();
        for (e, c) in v.iter() {
            out.add_scaled(&self.d_elem(e), c);
        }
        out
    }

    /// Anchor action of `h` on a ring monomial: `h(r) = Σ ρ ∧ τ_z(r)`.
    pub fn h_anchor(&self, rho: &ExtMonomial) -> LinComb<ExtMonomial> {
        let mut out = LinComb::zero();
        for (e, c) in self.h.iter() {
            out.add_scaled(&self.algebroid.anchor_apply_elem(e, rho), c);
        }
        out
    }

    /// The four curvature/Leibniz identities:
    /// `d_A` is a bracket derivation, `d_A² = [h, -]`, `d_R² = h(-)`,
    /// `d_A(h) = 0` (imposed). Mutual Leibniz between `d_A` and `d_R` holds
    /// by construction of `d_elem` and is spot-checked on dressed pairs.
    pub fn verify(&self) -> Report {
        let alg = &self.algebroid;
        let basis = &alg.basis;
        let mut report = Report::new("cdg algebroid");

        // d_A derivation over the bracket, frame pairs
        for (i, &x) in alg.frame.iter().enumerate() {
            for &y in alg.frame.iter().skip(i) {
                let res: Result<AValue> = (|| {
                    let mut lhs = self.d_value(&alg.bracket_frame(x, y)?);
                    let dx_y = alg.bracket_values(&self.d_frame_gen(x), &unit_frame(y))?;
                    let sign = if alg.parity(x) == 1 { -Scalar::one() } else { Scalar::one() };
                    let x_dy = alg.bracket_values(&unit_frame(x), &self.d_frame_gen(y))?;
                    lhs.add_scaled(&dx_y, &-Scalar::one());
                    lhs.add_scaled(&x_dy, &-sign);
                    Ok(lhs)
                })();
                match res {
                    Ok(res) => {
                        report.checked += 1;
                        if !res.is_zero() {
                            report.violate(
                                format!(
                                    "d_A leibniz([{}, {}])",
                                    basis.name(x),
                                    basis.name(y)
                                ),
                                alg.render(&res),
                            );
                        }
                    }
                    Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                    Err(e) => report.violate("d_A leibniz", e.to_string()),
                }
            }
        }

        // d_A^2 = [h, -] on frame generators
        for &x in &alg.frame {
            let res: Result<AValue> = (|| {
                let mut res = self.d_value(&self.d_frame_gen(x));
                let hx = alg.bracket_values(&self.h, &unit_frame(x))?;
                res.add_scaled(&hx, &-Scalar::one());
                Ok(res)
            })();
            match res {
                Ok(res) => {
                    report.checked += 1;
                    if !res.is_zero() {
                        report.violate(
                            format!("d_A²({}) = [h, {}]", basis.name(x), basis.name(x)),
                            alg.render(&res),
                        );
                    }
                }
                Err(Error::TruncationTooSmall(_)) => report.skipped += 1,
                Err(e) => report.violate("d_A² = [h,-]", e.to_string()),
            }
        }

        // d_R^2 = h(-) on ring generators
        for &r in &alg.ring_gens {
            let rm = ExtMonomial::single(r);
            let mut res = self.d_ring_apply(&rm).flat_map(|m| self.d_ring_apply(m));
            res.add_scaled(&self.h_anchor(&rm), &-Scalar::one());
            report.checked += 1;
            if !res.is_zero() {
                report.violate(
                    format!("d_R²({}) = h({})", basis.name(r), basis.name(r)),
                    alg.render_ring(&res),
                );
            }
        }

        // d_A(h) = 0
        let dh = self.d_value(&self.h);
        report.checked += 1;
        if !dh.is_zero() {
            report.violate("d_A(h) = 0", alg.render(&dh));
        }

        report
    }
}
