//! The graded polynomial algebra A = O(𝔥*×𝔸¹): exact-rational polynomials
//! in the dual-basis generators x_1..x_r and the deformation coordinate u,
//! all in degree 2, with the affine Weyl action, affine roots as degree-2
//! elements, Demazure operators, and single-reflection invariant splittings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::affweyl::AffineWeylElement;
use crate::rootdata::{AffineIndex, Mat, RootDataError, RootDatum};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Datum(#[from] RootDataError),
    #[error(transparent)]
    Word(#[from] crate::affweyl::AffWeylError),
    #[error("polynomial is not divisible by the reflection root")]
    NotDivisible,
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// Exponent vector over the generators x_1..x_r, u (u last). Ordered by
/// total degree, then lexicographically with u most significant (the
/// graded-lex order for x_1 < … < x_r < u).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients; every generator has
/// degree 2, so the graded degree of a monomial is twice its total degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPolynomial {
    vars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GradedPolynomial {
    pub fn zero(vars: usize) -> Self {
        GradedPolynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        let mut p = GradedPolynomial::zero(vars);
        p.add_to(&Monomial::one(vars), &c);
        p
    }

    pub fn one(vars: usize) -> Self {
        GradedPolynomial::constant(vars, BigRational::one())
    }

    /// The generator with 0-based index j; j = vars−1 is u.
    pub fn generator(vars: usize, j: usize) -> Self {
        assert!(j < vars, "generator index in range");
        let mut e = vec![0; vars];
        e[j] = 1;
        let mut p = GradedPolynomial::zero(vars);
        p.add_to(&Monomial(e), &BigRational::one());
        p
    }

    pub fn x(datum: &RootDatum, j: usize) -> Self {
        GradedPolynomial::generator(datum.rank() + 1, j)
    }

    pub fn u(datum: &RootDatum) -> Self {
        GradedPolynomial::generator(datum.rank() + 1, datum.rank())
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_to(&mut self, m: &Monomial, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.vars);
        let entry = self
            .terms
            .entry(m.clone())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(m);
        }
    }

    pub fn add(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_to(m, c);
        }
        out
    }

    pub fn sub(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_to(m, &(-c));
        }
        out
    }

    pub fn neg(&self) -> GradedPolynomial {
        GradedPolynomial::zero(self.vars).sub(self)
    }

    pub fn scale(&self, c: &BigRational) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.vars);
        for (m, a) in &self.terms {
            out.add_to(m, &(a * c));
        }
        out
    }

    pub fn mul(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.vars);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_to(&m.mul(n), &(a * b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> GradedPolynomial {
        let mut out = GradedPolynomial::one(self.vars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Graded degree (twice the top total degree); None for the zero
    /// polynomial.
    pub fn graded_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| 2 * m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// The part of graded degree d (d is even; generators have degree 2).
    pub fn homogeneous_component(&self, d: u32) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.vars);
        for (m, c) in &self.terms {
            if 2 * m.degree() == d {
                out.add_to(m, c);
            }
        }
        out
    }

    /// Formal partial derivative by generator j.
    pub fn partial(&self, j: usize) -> GradedPolynomial {
        assert!(j < self.vars);
        let mut out = GradedPolynomial::zero(self.vars);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[j] -= 1;
            out.add_to(&dm, &(c * rat(e as i64)));
        }
        out
    }

    /// Image under u ↦ 0, the degeneration from the affine to the finite
    /// picture.
    pub fn specialize_u_zero(&self) -> GradedPolynomial {
        let u_index = self.vars - 1;
        let mut out = GradedPolynomial::zero(self.vars);
        for (m, c) in &self.terms {
            if m.0[u_index] == 0 {
                out.add_to(m, c);
            }
        }
        out
    }
}

/// An affine simple reflection packaged with its degree-2 root element and
/// its matrix on the generator span. For finite indices `alpha_elt` is the
/// coroot-pairing functional Σ ⟨e_j, α̌_i⟩ x_j; for an affine node it is
/// θ̌ + u, the defining equation of the fixed hyperplane of t_θ s_θ (which
/// this reflection negates — the u − θ̌ variant is fixed by nothing in the
/// action and is not a root element).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineReflectionDatum {
    pub index: usize,
    pub alpha_elt: GradedPolynomial,
    pub action: Mat,
}

/// The coroot functional λ̌ ∈ 𝔥 ⊂ A given by its pairing row against the
/// lattice basis.
fn functional(vars: usize, pairing_row: &[i64]) -> GradedPolynomial {
    let mut out = GradedPolynomial::zero(vars);
    for (j, &p) in pairing_row.iter().enumerate() {
        if p != 0 {
            out = out.add(&GradedPolynomial::generator(vars, j).scale(&rat(p)));
        }
    }
    out
}

/// Images of the generators x_1..x_r, u under g = t_λ w: u is fixed, and
/// x_j ↦ (x_j ∘ w^{-1}) + ⟨x_j ∘ w^{-1}, λ⟩·u.
fn generator_images(datum: &RootDatum, g: &AffineWeylElement) -> Vec<GradedPolynomial> {
    let r = datum.rank();
    let vars = r + 1;
    let w_inv = datum.weyl_inv(&g.finite_part);
    let mut images = Vec::with_capacity(vars);
    for j in 0..r {
        let mut e = vec![0i64; r];
        e[j] = 1;
        let row = w_inv.mat.apply_row(&e);
        let mut img = functional(vars, &row);
        let shift: i64 = row
            .iter()
            .zip(&g.translation.0)
            .map(|(c, l)| c * l)
            .sum();
        if shift != 0 {
            img = img.add(&GradedPolynomial::generator(vars, r).scale(&rat(shift)));
        }
        images.push(img);
    }
    images.push(GradedPolynomial::generator(vars, r));
    images
}

/// The W'_aff action on A by algebra automorphisms (Ω-elements act through
/// their AffineWeylElement form).
pub fn act(
    datum: &RootDatum,
    g: &AffineWeylElement,
    f: &GradedPolynomial,
) -> GradedPolynomial {
    assert_eq!(f.vars, datum.rank() + 1, "polynomial over this datum");
    let images = generator_images(datum, g);
    let mut out = GradedPolynomial::zero(f.vars);
    for (m, c) in &f.terms {
        let mut term = GradedPolynomial::constant(f.vars, c.clone());
        for (j, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = term.mul(&images[j].pow(e));
            }
        }
        out = out.add(&term);
    }
    out
}

/// Assemble the reflection datum for an affine simple index.
pub fn affine_reflection(
    datum: &RootDatum,
    index: usize,
) -> Result<AffineReflectionDatum, PolyError> {
    let vars = datum.rank() + 1;
    let alpha_elt = match datum.classify_affine_index(index)? {
        AffineIndex::Finite(i) => functional(vars, &datum.simple_root(i).pairing),
        AffineIndex::Affine(c) => functional(vars, &datum.highest_short_root(c).pairing)
            .add(&GradedPolynomial::generator(vars, vars - 1)),
    };
    let s = AffineWeylElement::affine_simple(datum, index)?;
    let images = generator_images(datum, &s);
    // Row j of the action matrix = coefficients of the image of generator j.
    let mut entries = Vec::with_capacity(vars * vars);
    for img in &images {
        for k in 0..vars {
            let mut e = vec![0u32; vars];
            e[k] = 1;
            let c = img
                .terms
                .get(&Monomial(e))
                .cloned()
                .unwrap_or_else(BigRational::zero);
            assert!(c.is_integer());
            entries.push(i64::try_from(c.to_integer()).expect("small entry"));
        }
    }
    Ok(AffineReflectionDatum {
        index,
        alpha_elt,
        action: Mat { n: vars, a: entries },
    })
}

pub fn alpha_elt(datum: &RootDatum, index: usize) -> Result<GradedPolynomial, PolyError> {
    Ok(affine_reflection(datum, index)?.alpha_elt)
}

/// Exact division by a linear form; None when not divisible.
fn divide_by_linear(
    f: &GradedPolynomial,
    alpha: &GradedPolynomial,
) -> Option<GradedPolynomial> {
    assert!(alpha.terms.keys().all(|m| m.degree() == 1));
    // Pivot: the largest generator with a nonzero coefficient in alpha.
    let (pivot, pivot_coeff) = alpha
        .terms
        .iter()
        .map(|(m, c)| {
            let j = m.0.iter().position(|&e| e == 1).expect("linear");
            (j, c.clone())
        })
        .max_by_key(|(j, _)| *j)?;
    let mut quotient = GradedPolynomial::zero(f.vars);
    let mut work = f.clone();
    let max_e = work.terms.keys().map(|m| m.0[pivot]).max().unwrap_or(0);
    for e in (1..=max_e).rev() {
        let level: Vec<(Monomial, BigRational)> = work
            .terms
            .iter()
            .filter(|(m, _)| m.0[pivot] == e)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        for (m, c) in level {
            let mut qm = m.clone();
            qm.0[pivot] -= 1;
            let qc = &c / &pivot_coeff;
            quotient.add_to(&qm, &qc);
            // work −= qc · x^qm · alpha.
            let mut shifted = GradedPolynomial::zero(f.vars);
            shifted.add_to(&qm, &qc);
            work = work.sub(&shifted.mul(alpha));
        }
    }
    if work.is_zero() {
        Some(quotient)
    } else {
        None
    }
}

/// Demazure operator ∂_i f = (f − s_i f)/alpha_elt(i); exact by
/// construction and s_i-invariant of degree deg f − 2.
pub fn demazure(
    datum: &RootDatum,
    f: &GradedPolynomial,
    index: usize,
) -> Result<GradedPolynomial, PolyError> {
    let refl = affine_reflection(datum, index)?;
    let s = AffineWeylElement::affine_simple(datum, index)?;
    let numerator = f.sub(&act(datum, &s, f));
    divide_by_linear(&numerator, &refl.alpha_elt).ok_or(PolyError::NotDivisible)
}

/// Split f = P + Q·alpha_elt(i) with P, Q both s_i-invariant:
/// P = f − (α/2)·∂_i f and Q = (∂_i f)/2.
pub fn invariant_split(
    datum: &RootDatum,
    f: &GradedPolynomial,
    index: usize,
) -> Result<(GradedPolynomial, GradedPolynomial), PolyError> {
    let refl = affine_reflection(datum, index)?;
    let df = demazure(datum, f, index)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let q = df.scale(&half);
    let p = f.sub(&refl.alpha_elt.mul(&q));
    Ok((p, q))
}

pub fn is_invariant(
    datum: &RootDatum,
    f: &GradedPolynomial,
    index: usize,
) -> Result<bool, PolyError> {
    let s = AffineWeylElement::affine_simple(datum, index)?;
    Ok(act(datum, &s, f) == *f)
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let u_index = self.vars - 1;
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(abs.to_string());
            }
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if j == u_index {
                    "u".to_string()
                } else {
                    format!("x{}", j + 1)
                };
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Parse the canonical polynomial grammar: terms joined by `+`/`-`, each a
/// `*`-product of rational constants (`3`, `3/2`), generators `x1..xr`, `u`,
/// powers `^k`, and the aliases `a<i>` for alpha_elt(i).
pub fn parse_polynomial(
    datum: &RootDatum,
    text: &str,
) -> Result<GradedPolynomial, PolyError> {
    let vars = datum.rank() + 1;
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let err = |offset: usize, message: &str| PolyError::Parse {
        offset,
        message: message.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_uint = |pos: &mut usize| -> Result<u64, PolyError> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start {
            return Err(err(start, "expected a number"));
        }
        text[start..*pos]
            .parse::<u64>()
            .map_err(|_| err(start, "number out of range"))
    };

    let mut total = GradedPolynomial::zero(vars);
    skip_ws(&mut pos);
    let mut sign = BigRational::one();
    if pos < bytes.len() && bytes[pos] == b'-' {
        sign = -sign;
        pos += 1;
    }
    loop {
        skip_ws(&mut pos);
        // One term: product of factors.
        let mut term = GradedPolynomial::constant(vars, sign.clone());
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(err(pos, "expected a factor"));
            }
            let factor = match bytes[pos] {
                b'0'..=b'9' => {
                    let n = read_uint(&mut pos)?;
                    let mut value = BigRational::from_integer(BigInt::from(n));
                    if pos < bytes.len() && bytes[pos] == b'/' {
                        pos += 1;
                        let at = pos;
                        let d = read_uint(&mut pos)?;
                        if d == 0 {
                            return Err(err(at, "zero denominator"));
                        }
                        value /= BigRational::from_integer(BigInt::from(d));
                    }
                    GradedPolynomial::constant(vars, value)
                }
                b'u' => {
                    pos += 1;
                    GradedPolynomial::generator(vars, vars - 1)
                }
                b'x' => {
                    let at = pos;
                    pos += 1;
                    let k = read_uint(&mut pos)? as usize;
                    if k == 0 || k > datum.rank() {
                        return Err(err(at, "generator index out of range"));
                    }
                    GradedPolynomial::generator(vars, k - 1)
                }
                b'a' => {
                    let at = pos;
                    pos += 1;
                    let k = read_uint(&mut pos)? as usize;
                    if !datum.affine_index_set().contains(&k) {
                        return Err(err(at, "affine index out of range"));
                    }
                    alpha_elt(datum, k)?
                }
                _ => return Err(err(pos, "expected a factor")),
            };
            let factor = if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let at = pos;
                let e = read_uint(&mut pos)?;
                let e = u32::try_from(e).map_err(|_| err(at, "exponent out of range"))?;
                factor.pow(e)
            } else {
                factor
            };
            term = term.mul(&factor);
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                continue;
            }
            break;
        }
        total = total.add(&term);
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        sign = match bytes[pos] {
            b'+' => BigRational::one(),
            b'-' => -BigRational::one(),
            _ => return Err(err(pos, "expected + or -")),
        };
        pos += 1;
    }
    Ok(total)
}
