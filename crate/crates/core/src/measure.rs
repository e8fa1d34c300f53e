//! Finite complex measures on `[0, 1)` built from closed-form primitives.
//!
//! A [`RadialMeasure`] is the radial part `η` of a rotation-invariant measure on
//! the unit disk. Its moments, tail masses and distribution function are exact
//! up to double rounding.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{self, Positivity};
use crate::quadrature::{panel_breaks, panel_nodes, Estimate, GaussLegendre, QuadratureConfig};
use crate::special;

/// `x^e` for `x ∈ [0, 1]` and real `e ≥ 0`, with `0^0 = 1`. Underflows to 0.
pub(crate) fn unit_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 || x == 1.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else if e.fract() == 0.0 && e <= i32::MAX as f64 {
        x.powi(e as i32)
    } else {
        (e * x.ln()).exp()
    }
}

/// `1 - x^e` for `x ∈ [0, 1]`, accurate to a few ulps relative even as `x → 1`.
fn unit_pow_complement(x: f64, e: f64) -> f64 {
    if x < 0.5 {
        1.0 - unit_pow(x, e)
    } else {
        // 1 - x is exact here
        -(e * (-(1.0 - x)).ln_1p()).exp_m1()
    }
}

/// `hi^e - lo^e` for `0 ≤ lo ≤ hi ≤ 1`, without cancellation near 1.
fn unit_pow_diff(lo: f64, hi: f64, e: f64) -> f64 {
    if lo >= 0.5 {
        unit_pow_complement(lo, e) - unit_pow_complement(hi, e)
    } else {
        unit_pow(hi, e) - unit_pow(lo, e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MeasurePrimitive {
    /// Unit point mass at `x ∈ [0, 1)`.
    Dirac { x: f64 },
    /// `(Σ c_m r^m) dr` on `[a, b)`.
    Poly { coeffs: Vec<f64>, a: f64, b: f64 },
    /// `r^q (1 - r)^p dr` on `[0, 1)`.
    Jacobi { p: f64, q: f64 },
}

impl MeasurePrimitive {
    pub fn dirac(x: f64) -> Result<Self> {
        if !(x.is_finite() && (0.0..1.0).contains(&x)) {
            return Err(Error::domain(format!(
                "dirac location must lie in [0, 1), got {x}"
            )));
        }
        Ok(MeasurePrimitive::Dirac { x })
    }

    pub fn poly(coeffs: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("poly needs at least one coefficient"));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain(format!("poly coefficient {c} is not finite")));
        }
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::domain(format!(
                "poly support must satisfy 0 <= a < b <= 1, got [{a}, {b})"
            )));
        }
        Ok(MeasurePrimitive::Poly { coeffs, a, b })
    }

    pub fn jacobi(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && p > -1.0) {
            return Err(Error::domain(format!(
                "jacobi exponent p must exceed -1, got {p}"
            )));
        }
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::domain(format!(
                "jacobi exponent q must be >= 0, got {q}"
            )));
        }
        Ok(MeasurePrimitive::Jacobi { p, q })
    }

    /// `r dr` on `[0, 1)`, the measure whose Toeplitz operator is the identity.
    pub fn lebesgue() -> Self {
        MeasurePrimitive::Poly {
            coeffs: vec![0.0, 1.0],
            a: 0.0,
            b: 1.0,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, MeasurePrimitive::Dirac { .. })
    }

    /// `∫ r^k dη` for real `k ≥ 0`.
    pub fn moment(&self, k: f64) -> f64 {
        match self {
            MeasurePrimitive::Dirac { x } => unit_pow(*x, k),
            MeasurePrimitive::Poly { coeffs, a, b } => coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let e = k + m as f64 + 1.0;
                    c * (unit_pow(*b, e) - unit_pow(*a, e)) / e
                })
                .sum(),
            MeasurePrimitive::Jacobi { p, q } => special::beta(k + q + 1.0, p + 1.0),
        }
    }

    /// `η([lo, hi))` for `lo ≤ hi`, intervals clipped to `[0, 1)`.
    fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        match self {
            MeasurePrimitive::Dirac { x } => {
                if lo <= *x && *x < hi {
                    1.0
                } else {
                    0.0
                }
            }
            MeasurePrimitive::Poly { coeffs, a, b } => {
                let lo = lo.max(*a);
                let hi = hi.min(*b);
                if lo >= hi {
                    return 0.0;
                }
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, c)| {
                        let e = m as f64 + 1.0;
                        c * unit_pow_diff(lo, hi, e) / e
                    })
                    .sum()
            }
            MeasurePrimitive::Jacobi { p, q } => {
                let lo = lo.max(0.0);
                let hi = hi.min(1.0);
                if lo >= hi {
                    return 0.0;
                }
                let total = special::beta(q + 1.0, p + 1.0);
                let (_, upper_lo) = special::inc_beta_pair(q + 1.0, p + 1.0, lo);
                let (_, upper_hi) = special::inc_beta_pair(q + 1.0, p + 1.0, hi);
                total * (upper_lo - upper_hi)
            }
        }
    }

    /// Density with respect to `dr`; zero for atoms.
    pub fn density(&self, r: f64) -> f64 {
        match self {
            MeasurePrimitive::Dirac { .. } => 0.0,
            MeasurePrimitive::Poly { coeffs, a, b } => {
                if r >= *a && r < *b {
                    poly::eval(coeffs, r)
                } else {
                    0.0
                }
            }
            MeasurePrimitive::Jacobi { p, q } => {
                if (0.0..1.0).contains(&r) {
                    unit_pow(r, *q) * (1.0 - r).powf(*p)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn positivity(&self) -> Positivity {
        match self {
            MeasurePrimitive::Poly { coeffs, a, b } => poly::certify_nonnegative(coeffs, *a, *b),
            _ => Positivity::Certified,
        }
    }
}

impl fmt::Display for MeasurePrimitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurePrimitive::Dirac { x } => write!(f, "dirac({x})"),
            p if *p == MeasurePrimitive::lebesgue() => write!(f, "lebesgue"),
            MeasurePrimitive::Poly { coeffs, a, b } => {
                write!(f, "poly([")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "], {a}, {b})")
            }
            MeasurePrimitive::Jacobi { p, q } => write!(f, "jacobi({p}, {q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeff: Complex64,
    pub primitive: MeasurePrimitive,
}

/// A finite complex combination of primitives. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialMeasure {
    terms: Vec<Term>,
    positivity_certificate: bool,
}

/// The four positive parts of `η = η₁ - η₂ + i(η₃ - η₄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanParts {
    pub pos_re: RadialMeasure,
    pub neg_re: RadialMeasure,
    pub pos_im: RadialMeasure,
    pub neg_im: RadialMeasure,
}

impl JordanParts {
    pub fn as_array(&self) -> [&RadialMeasure; 4] {
        [&self.pos_re, &self.neg_re, &self.pos_im, &self.neg_im]
    }

    /// Signs of the parts in the recombination: `1, -1, i, -i`.
    pub const WEIGHTS: [Complex64; 4] = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];

    pub fn recombine(&self) -> RadialMeasure {
        RadialMeasure::combine(
            self.as_array()
                .into_iter()
                .zip(Self::WEIGHTS)
                .map(|(m, w)| (w, m)),
        )
    }
}

impl RadialMeasure {
    /// Builds a measure, merging identical primitives and dropping zero terms.
    pub fn new(terms: impl IntoIterator<Item = (Complex64, MeasurePrimitive)>) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for (coeff, primitive) in terms {
            match merged.iter_mut().find(|t| t.primitive == primitive) {
                Some(t) => t.coeff += coeff,
                None => merged.push(Term { coeff, primitive }),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        let positivity_certificate = merged.iter().all(|t| {
            t.coeff.im == 0.0
                && t.coeff.re >= 0.0
                && t.primitive.positivity() == Positivity::Certified
        });
        RadialMeasure {
            terms: merged,
            positivity_certificate,
        }
    }

    pub fn zero() -> Self {
        RadialMeasure::new([])
    }

    pub fn from_primitive(p: MeasurePrimitive) -> Self {
        RadialMeasure::new([(Complex64::new(1.0, 0.0), p)])
    }

    pub fn lebesgue() -> Self {
        Self::from_primitive(MeasurePrimitive::lebesgue())
    }

    pub fn dirac(x: f64) -> Result<Self> {
        MeasurePrimitive::dirac(x).map(Self::from_primitive)
    }

    pub fn combine<'a>(parts: impl IntoIterator<Item = (Complex64, &'a RadialMeasure)>) -> Self {
        RadialMeasure::new(parts.into_iter().flat_map(|(w, m)| {
            m.terms
                .iter()
                .map(move |t| (w * t.coeff, t.primitive.clone()))
        }))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::combine([(c, self)])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.positivity_certificate
    }

    pub fn has_atoms(&self) -> bool {
        self.terms.iter().any(|t| t.primitive.is_atom())
    }

    /// `∫ r^k dη`.
    pub fn moment(&self, k: u64) -> Complex64 {
        self.moment_real_order(k as f64)
    }

    pub(crate) fn moment_real_order(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.primitive.moment(k))
            .sum()
    }

    /// `η([0, 1))`.
    pub fn total_mass(&self) -> Complex64 {
        self.moment(0)
    }

    /// `η([r, 1))` for `0 ≤ r < 1`.
    pub fn tail_mass(&self, r: f64) -> Result<Complex64> {
        if !(r.is_finite() && (0.0..1.0).contains(&r)) {
            return Err(Error::domain(format!(
                "tail mass needs r in [0, 1), got {r}"
            )));
        }
        Ok(self.mass_between(r, 1.0))
    }

    /// `η([lo, hi))`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.primitive.mass_between(lo, hi))
            .sum()
    }

    /// Atoms at exactly `u`, summed.
    pub fn atom_mass_at(&self, u: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| matches!(t.primitive, MeasurePrimitive::Dirac { x } if x == u))
            .map(|t| t.coeff)
            .sum()
    }

    /// `(F(u), F⁻(u)) = (η((-∞, u]), η((-∞, u)))`, with `η` extended by zero.
    pub fn distribution(&self, u: f64) -> (Complex64, Complex64) {
        if u.is_nan() || u < 0.0 {
            let z = Complex64::new(0.0, 0.0);
            return (z, z);
        }
        let left = self.mass_between(0.0, u);
        (left + self.atom_mass_at(u), left)
    }

    pub fn distribution_function(&self) -> DistributionFunction<'_> {
        DistributionFunction { measure: self }
    }

    /// Points where integrands built from this measure lose smoothness.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        let mut near_zero = false;
        for t in &self.terms {
            match &t.primitive {
                MeasurePrimitive::Dirac { x } => pts.push(*x),
                MeasurePrimitive::Poly { a, b, .. } => {
                    pts.push(*a);
                    pts.push(*b);
                }
                MeasurePrimitive::Jacobi { q, .. } => near_zero |= q.fract() != 0.0,
            }
        }
        if near_zero {
            // r^q with fractional q is not smooth at 0
            pts.extend((2..=40).map(|j| 2f64.powi(-j)));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Discretization of the restriction of `η` to `[lo, hi)` as weighted nodes.
    ///
    /// Atoms are exact nodes; densities use Gauss–Legendre panels. The final
    /// panel of a Jacobi density at `r = 1` collapses to a one-point rule
    /// carrying its exact mass, since `(1 - r)^p` may be singular there.
    pub fn discretize(
        &self,
        lo: f64,
        hi: f64,
        cfg: &QuadratureConfig,
        split: usize,
    ) -> Vec<(f64, Complex64)> {
        let rule = GaussLegendre::new(cfg.nodes);
        let extra = self.breakpoints();
        let mut nodes = Vec::new();
        for t in &self.terms {
            match &t.primitive {
                MeasurePrimitive::Dirac { x } => {
                    if lo <= *x && *x < hi {
                        nodes.push((*x, t.coeff));
                    }
                }
                MeasurePrimitive::Poly { coeffs, a, b } => {
                    let (l, h) = (lo.max(*a), hi.min(*b));
                    if l < h {
                        let breaks = panel_breaks(l, h, &extra, cfg);
                        nodes.extend(
                            panel_nodes(&breaks, split, &rule)
                                .into_iter()
                                .map(|(r, w)| (r, t.coeff * (w * poly::eval(coeffs, r)))),
                        );
                    }
                }
                jac @ MeasurePrimitive::Jacobi { p, q } => {
                    let (l, h) = (lo.max(0.0), hi.min(1.0));
                    if l >= h {
                        continue;
                    }
                    let edge = 1.0 - cfg.boundary_width();
                    let h_panels = if h >= 1.0 { edge.max(l) } else { h };
                    if l < h_panels {
                        // Panels in the upper half are laid out in s = 1 - r, so that
                        // (1 - r)^p keeps full relative precision next to the breaks 1 - 2^-j.
                        let breaks = panel_breaks(l, h_panels, &extra, cfg);
                        for pair in breaks.windows(2) {
                            let (a, b) = (pair[0], pair[1]);
                            if a >= 0.5 {
                                nodes.extend(
                                    panel_nodes(&[1.0 - b, 1.0 - a], split, &rule)
                                        .into_iter()
                                        .map(|(s, w)| {
                                            let r = 1.0 - s;
                                            (r, t.coeff * (w * unit_pow(r, *q) * s.powf(*p)))
                                        }),
                                );
                            } else {
                                nodes.extend(
                                    panel_nodes(&[a, b], split, &rule)
                                        .into_iter()
                                        .map(|(r, w)| (r, t.coeff * (w * jac.density(r)))),
                                );
                            }
                        }
                    }
                    if h >= 1.0 {
                        let start = h_panels;
                        let mass = jac.mass_between(start, 1.0);
                        let centre = 1.0 - (1.0 - start) * (p + 1.0) / (p + 2.0);
                        nodes.push((centre, t.coeff * mass));
                    }
                }
            }
        }
        nodes
    }

    /// `∫_{[lo, hi)} g dη` with an error estimate.
    pub fn integrate<G>(&self, g: G, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Estimate
    where
        G: Fn(f64) -> Complex64,
    {
        let apply = |nodes: Vec<(f64, Complex64)>| -> Complex64 {
            nodes.into_iter().map(|(r, w)| g(r) * w).sum()
        };
        let coarse = apply(self.discretize(lo, hi, cfg, cfg.split));
        let fine = apply(self.discretize(lo, hi, cfg, 2 * cfg.split));
        Estimate {
            value: fine,
            error: (fine - coarse).norm(),
        }
    }

    /// Splits into four positivity-certified parts with `η = η₁ - η₂ + i(η₃ - η₄)`.
    pub fn jordan_decompose(&self) -> Result<JordanParts> {
        let mut parts: [Vec<(Complex64, MeasurePrimitive)>; 4] = Default::default();
        for t in &self.terms {
            for (component, offset) in [(t.coeff.re, 0usize), (t.coeff.im, 2usize)] {
                if component == 0.0 {
                    continue;
                }
                match &t.primitive {
                    MeasurePrimitive::Poly { coeffs, a, b } => {
                        for (lo, hi, sign) in poly::sign_pieces(coeffs, *a, *b)? {
                            if sign == 0 {
                                continue;
                            }
                            let s = f64::from(sign);
                            let piece = MeasurePrimitive::Poly {
                                coeffs: coeffs.iter().map(|c| c * s).collect(),
                                a: lo,
                                b: hi,
                            };
                            let weight = component * s;
                            let slot = offset + usize::from(weight < 0.0);
                            parts[slot].push((Complex64::new(weight.abs(), 0.0), piece));
                        }
                    }
                    prim => {
                        let slot = offset + usize::from(component < 0.0);
                        parts[slot].push((Complex64::new(component.abs(), 0.0), prim.clone()));
                    }
                }
            }
        }
        let [a, b, c, d] = parts.map(RadialMeasure::new);
        for (m, name) in [(&a, "η₁"), (&b, "η₂"), (&c, "η₃"), (&d, "η₄")] {
            if !m.is_positive() {
                return Err(Error::RootFinding {
                    lo: 0.0,
                    hi: 1.0,
                    reason: format!("Jordan part {name} could not be certified nonnegative"),
                });
            }
        }
        Ok(JordanParts {
            pos_re: a,
            neg_re: b,
            pos_im: c,
            neg_im: d,
        })
    }
}

impl fmt::Display for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (negative, body) = scalar_parts(t.coeff);
            match (i, negative) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            if body != "1" {
                write!(f, "{body}*")?;
            }
            write!(f, "{}", t.primitive)?;
        }
        Ok(())
    }
}

/// Sign and magnitude text of a coefficient in DSL scalar syntax.
fn scalar_parts(c: Complex64) -> (bool, String) {
    if c.im == 0.0 {
        (c.re.is_sign_negative(), format!("{}", c.re.abs()))
    } else if c.re == 0.0 {
        (c.im.is_sign_negative(), format!("{}i", c.im.abs()))
    } else {
        let op = if c.im.is_sign_negative() { '-' } else { '+' };
        (false, format!("{}{}{}i", c.re, op, c.im.abs()))
    }
}

/// `u ↦ (F(u), F⁻(u))` for a fixed measure.
#[derive(Debug, Clone, Copy)]
pub struct DistributionFunction<'a> {
    measure: &'a RadialMeasure,
}

impl DistributionFunction<'_> {
    pub fn eval(&self, u: f64) -> (Complex64, Complex64) {
        self.measure.distribution(u)
    }

    pub fn right(&self, u: f64) -> Complex64 {
        self.eval(u).0
    }

    pub fn left(&self, u: f64) -> Complex64 {
        self.eval(u).1
    }
}
