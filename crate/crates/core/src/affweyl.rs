//! The extended affine Weyl group W'_aff = W ⋉ 𝕏 and words in its braid
//! cover ℬ'_aff.
//!
//! Group elements are kept in the semidirect normal form t_λ·w, multiplied by
//! (t_λ u)(t_μ v) = t_{λ+u·μ}(u v). Braid words are free words in three kinds
//! of letters: finite/affine generators `Ts(i)^{±1}`, lattice letters
//! `Theta(λ)`, and length-zero letters `Omega(μ)` (identified by their
//! translation part). No relation is ever applied implicitly; rewriting
//! toward the normal form θ_λ·(residue) is an explicit, budgeted procedure,
//! since the braid-group word problem is not solved here.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rootdata::{
    AffineIndex, FiniteWeylElement, OmegaElement, RootDataError, RootDatum, Weight,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AffWeylError {
    #[error(transparent)]
    Datum(#[from] RootDataError),
    #[error("finite part is not an element of this Weyl group")]
    ForeignFinitePart,
    #[error("no length-zero element has translation {0}")]
    UnknownOmega(Weight),
    #[error("normal form not reached within {steps} rewriting steps")]
    NormalFormNotReached { steps: u64 },
    #[error("no conjugation witness of length at most {bound}")]
    NoWitnessWithinBound { bound: u64 },
    #[error("conjugation witnesses are searched in the extended group; use the weight lattice")]
    WrongLattice,
    #[error("index {0} is not an affine node")]
    NotAffineNode(usize),
}

/// Element t_λ·w of the extended affine Weyl group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWeylElement {
    pub translation: Weight,
    pub finite_part: FiniteWeylElement,
}

impl AffineWeylElement {
    pub fn identity(datum: &RootDatum) -> Self {
        AffineWeylElement {
            translation: Weight::zero(datum.rank()),
            finite_part: datum.weyl_identity().clone(),
        }
    }

    pub fn from_translation(datum: &RootDatum, lam: &Weight) -> Result<Self, AffWeylError> {
        datum.check_weight(lam)?;
        Ok(AffineWeylElement {
            translation: lam.clone(),
            finite_part: datum.weyl_identity().clone(),
        })
    }

    pub fn from_omega(omega: &OmegaElement) -> Self {
        AffineWeylElement {
            translation: omega.translation.clone(),
            finite_part: omega.finite.clone(),
        }
    }

    /// The affine simple reflection s_i as a group element: s_0 = t_θ s_θ
    /// for affine nodes, plain s_i for finite indices.
    pub fn affine_simple(datum: &RootDatum, index: usize) -> Result<Self, AffWeylError> {
        Ok(AffineWeylElement {
            translation: datum.affine_simple_translation(index)?,
            finite_part: datum.affine_simple_finite(index)?.clone(),
        })
    }

    /// Level-one action on 𝕏: (t_λ w)·μ = λ + w(μ).
    pub fn act(&self, mu: &Weight) -> Weight {
        Weight(self.finite_part.mat.apply(&mu.0)).add(&self.translation)
    }

    fn key(&self) -> (Vec<i64>, Vec<u8>) {
        (self.translation.0.clone(), self.finite_part.word.clone())
    }
}

fn validate(datum: &RootDatum, a: &AffineWeylElement) -> Result<(), AffWeylError> {
    datum.check_weight(&a.translation)?;
    if !datum.weyl_contains(&a.finite_part) {
        return Err(AffWeylError::ForeignFinitePart);
    }
    Ok(())
}

/// Semidirect product: (t_λ u)(t_μ v) = t_{λ+u·μ}(uv).
pub fn weyl_multiply(
    datum: &RootDatum,
    a: &AffineWeylElement,
    b: &AffineWeylElement,
) -> Result<AffineWeylElement, AffWeylError> {
    validate(datum, a)?;
    validate(datum, b)?;
    Ok(AffineWeylElement {
        translation: a
            .translation
            .add(&Weight(a.finite_part.mat.apply(&b.translation.0))),
        finite_part: datum.weyl_mul(&a.finite_part, &b.finite_part).clone(),
    })
}

/// (t_λ w)⁻¹ = t_{−w⁻¹λ} w⁻¹.
pub fn weyl_inverse(
    datum: &RootDatum,
    a: &AffineWeylElement,
) -> Result<AffineWeylElement, AffWeylError> {
    validate(datum, a)?;
    let winv = datum.weyl_inv(&a.finite_part);
    Ok(AffineWeylElement {
        translation: Weight(winv.mat.apply(&a.translation.0)).neg(),
        finite_part: winv.clone(),
    })
}

/// Length in the quasi-Coxeter structure; length-zero elements form Ω.
pub fn coxeter_length(datum: &RootDatum, a: &AffineWeylElement) -> u64 {
    datum.affine_length(&a.translation, &a.finite_part)
}

/// One letter of a word in ℬ'_aff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BraidLetter {
    /// Generator for the affine simple index `index`; `inverse` marks T⁻¹.
    Ts { index: usize, inverse: bool },
    /// Lattice generator θ_λ.
    Theta(Weight),
    /// Length-zero element, identified by its translation part.
    Omega(Weight),
}

impl BraidLetter {
    pub fn ts(index: usize) -> Self {
        BraidLetter::Ts {
            index,
            inverse: false,
        }
    }

    pub fn ts_inverse(index: usize) -> Self {
        BraidLetter::Ts {
            index,
            inverse: true,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            BraidLetter::Ts { index, inverse } => BraidLetter::Ts {
                index: *index,
                inverse: !inverse,
            },
            BraidLetter::Theta(lam) => BraidLetter::Theta(lam.neg()),
            BraidLetter::Omega(_) => {
                panic!("Omega letters are inverted through the group, not letterwise")
            }
        }
    }
}

/// Free word in ℬ'_aff; no relation is applied implicitly.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn empty() -> Self {
        BraidWord(Vec::new())
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.0.clone();
        letters.extend(other.0.iter().cloned());
        BraidWord(letters)
    }

    /// Letterwise free inverse; errors on Omega letters whose inverse is a
    /// different group element than a letter-level flip can express.
    pub fn free_inverse(&self, datum: &RootDatum) -> Result<BraidWord, AffWeylError> {
        let mut letters = Vec::with_capacity(self.0.len());
        for letter in self.0.iter().rev() {
            match letter {
                BraidLetter::Omega(mu) => {
                    let o = omega_by_translation(datum, mu)?;
                    let inv = weyl_inverse(datum, &AffineWeylElement::from_omega(o))?;
                    letters.push(BraidLetter::Omega(inv.translation));
                }
                other => letters.push(other.inverse()),
            }
        }
        Ok(BraidWord(letters))
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidLetter::Ts { index, inverse } => {
                write!(f, "T{index}")?;
                if *inverse {
                    write!(f, "^-1")?;
                }
                Ok(())
            }
            BraidLetter::Theta(lam) => write!(f, "th[{lam}]"),
            BraidLetter::Omega(mu) => write!(f, "om[{mu}]"),
        }
    }
}

/// Canonical serialization: letters joined by `.`, the empty word printed
/// as `e`. Example: `T0^-1.T1.th[1,-2].om[1]`.
impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for letter in &self.0 {
            if !first {
                write!(f, ".")?;
            }
            first = false;
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

/// Syntax error in the braid-word grammar, with a byte offset into the input.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("braid word syntax error at byte {offset}: {message}")]
pub struct BraidParseError {
    pub offset: usize,
    pub message: String,
}

fn parse_coords(body: &str, offset: usize) -> Result<Weight, BraidParseError> {
    let mut coords = Vec::new();
    for part in body.split(',') {
        let c = part.trim().parse::<i64>().map_err(|_| BraidParseError {
            offset,
            message: format!("expected an integer coordinate, found `{part}`"),
        })?;
        coords.push(c);
    }
    Ok(Weight(coords))
}

impl FromStr for BraidWord {
    type Err = BraidParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() || text == "e" {
            return Ok(BraidWord::empty());
        }
        let mut letters = Vec::new();
        let mut offset = 0usize;
        for token in text.split('.') {
            let tok = token.trim();
            let letter = if let Some(rest) = tok.strip_prefix("th[") {
                let body = rest.strip_suffix(']').ok_or_else(|| BraidParseError {
                    offset,
                    message: "unterminated `th[` letter".into(),
                })?;
                BraidLetter::Theta(parse_coords(body, offset)?)
            } else if let Some(rest) = tok.strip_prefix("om[") {
                let body = rest.strip_suffix(']').ok_or_else(|| BraidParseError {
                    offset,
                    message: "unterminated `om[` letter".into(),
                })?;
                BraidLetter::Omega(parse_coords(body, offset)?)
            } else if let Some(rest) = tok.strip_prefix('T') {
                let (digits, inverse) = match rest.strip_suffix("^-1") {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                let index = digits.parse::<usize>().map_err(|_| BraidParseError {
                    offset,
                    message: format!("expected `T<index>` or `T<index>^-1`, found `{tok}`"),
                })?;
                BraidLetter::Ts { index, inverse }
            } else {
                return Err(BraidParseError {
                    offset,
                    message: format!("unknown letter `{tok}`"),
                });
            };
            letters.push(letter);
            offset += token.len() + 1;
        }
        Ok(BraidWord(letters))
    }
}

/// Check every letter against the datum: letter indices must be affine
/// simple indices, weights must have the right rank, Omega translations must
/// belong to length-zero elements.
pub fn validate_word(datum: &RootDatum, word: &BraidWord) -> Result<(), AffWeylError> {
    for letter in &word.0 {
        match letter {
            BraidLetter::Ts { index, .. } => {
                datum.classify_affine_index(*index)?;
            }
            BraidLetter::Theta(lam) => datum.check_weight(lam)?,
            BraidLetter::Omega(mu) => {
                omega_by_translation(datum, mu)?;
            }
        }
    }
    Ok(())
}

pub fn omega_by_translation<'d>(
    datum: &'d RootDatum,
    mu: &Weight,
) -> Result<&'d OmegaElement, AffWeylError> {
    datum.check_weight(mu)?;
    datum
        .omega_elements()
        .iter()
        .find(|o| &o.translation == mu)
        .ok_or_else(|| AffWeylError::UnknownOmega(mu.clone()))
}

/// Image of a braid word under the quotient ℬ'_aff → W'_aff (s_i² = 1,
/// so inverse marks on Ts letters are ignored).
pub fn braid_word_image(
    datum: &RootDatum,
    word: &BraidWord,
) -> Result<AffineWeylElement, AffWeylError> {
    let mut acc = AffineWeylElement::identity(datum);
    for letter in &word.0 {
        let factor = match letter {
            BraidLetter::Ts { index, .. } => AffineWeylElement::affine_simple(datum, *index)?,
            BraidLetter::Theta(lam) => AffineWeylElement::from_translation(datum, lam)?,
            BraidLetter::Omega(mu) => {
                AffineWeylElement::from_omega(omega_by_translation(datum, mu)?)
            }
        };
        acc = weyl_multiply(datum, &acc, &factor)?;
    }
    Ok(acc)
}

/// Deterministic positive lift: the lexicographically least reduced word in
/// the positive generators Ts(i), followed by one Omega letter when the
/// length-zero part is not the identity. Letter count (excluding the Omega
/// letter) equals `coxeter_length`.
pub fn positive_lift(
    datum: &RootDatum,
    a: &AffineWeylElement,
) -> Result<BraidWord, AffWeylError> {
    validate(datum, a)?;
    let mut letters = Vec::new();
    let mut rest = a.clone();
    let mut len = coxeter_length(datum, &rest);
    while len > 0 {
        // The smallest left descent extends the lex-least reduced word.
        let mut advanced = false;
        for idx in datum.affine_index_set() {
            let s = AffineWeylElement::affine_simple(datum, idx)?;
            let shorter = weyl_multiply(datum, &s, &rest)?;
            let l = coxeter_length(datum, &shorter);
            if l < len {
                letters.push(BraidLetter::ts(idx));
                rest = shorter;
                len = l;
                advanced = true;
                break;
            }
        }
        // Some affine generator always shortens a positive-length element.
        assert!(advanced, "no left descent found at positive length");
    }
    if rest.finite_part != *datum.weyl_identity() || !rest.translation.is_zero() {
        letters.push(BraidLetter::Omega(rest.translation));
    }
    Ok(BraidWord(letters))
}

/// Outcome of the budgeted rewriting toward θ_λ·(Theta-free residue).
///
/// `Ok((λ, residue))` certifies that `Theta(λ)` concatenated with `residue`
/// is related to the input by the defining relations. The error marker means
/// the budget ran out or no rewrite applies; it is NOT a proof that no
/// normal form exists.
pub fn theta_normal_form(
    datum: &RootDatum,
    word: &BraidWord,
    budget: u64,
) -> Result<(Weight, BraidWord), AffWeylError> {
    validate_word(datum, word)?;
    let mut letters: Vec<BraidLetter> = Vec::new();
    // The affine generators are not primitive in the Bernstein presentation;
    // expand them first through t_θ = s_0·s_θ, i.e. Ts(0) = θ_θ·(lift of
    // s_θ)⁻¹, which is an equality of braid lifts since the lengths add.
    for letter in &word.0 {
        match letter {
            BraidLetter::Ts { index, inverse } => {
                match datum.classify_affine_index(*index)? {
                    AffineIndex::Finite(_) => letters.push(letter.clone()),
                    AffineIndex::Affine(c) => {
                        let theta = datum.highest_short_root(c).vec.clone();
                        let s_theta_word: Vec<usize> = datum
                            .s_theta(c)
                            .word
                            .iter()
                            .map(|&i| i as usize + 1)
                            .collect();
                        if !*inverse {
                            letters.push(BraidLetter::Theta(theta));
                            for &i in s_theta_word.iter().rev() {
                                letters.push(BraidLetter::ts_inverse(i));
                            }
                        } else {
                            for &i in &s_theta_word {
                                letters.push(BraidLetter::ts(i));
                            }
                            letters.push(BraidLetter::Theta(theta.neg()));
                        }
                    }
                }
            }
            other => letters.push(other.clone()),
        }
    }

    let mut steps = 0u64;
    loop {
        if steps >= budget {
            return Err(AffWeylError::NormalFormNotReached { steps });
        }
        match apply_first_move(datum, &mut letters)? {
            true => steps += 1,
            false => break,
        }
    }

    // Success: at most one Theta letter, sitting at the front.
    let mut lam = Weight::zero(datum.rank());
    let mut residue = letters.as_slice();
    if let Some(BraidLetter::Theta(l)) = letters.first() {
        lam = l.clone();
        residue = &letters[1..];
    }
    if residue
        .iter()
        .any(|l| matches!(l, BraidLetter::Theta(_)))
    {
        return Err(AffWeylError::NormalFormNotReached { steps });
    }
    Ok((lam, BraidWord(residue.to_vec())))
}

/// Apply the first applicable rewriting move, scanning left to right.
/// Returns whether a move was applied. Moves:
///   θ_0 ↦ (nothing); θ_x θ_y ↦ θ_{x+y}; T T⁻¹ ↦ (nothing);
///   ω ω' ↦ ωω' and ω = e ↦ (nothing);
///   T_i θ_x ↦ θ_x T_i (⟨x,α̌_i⟩ = 0), θ_{s_i x} T_i⁻¹ (⟨x,α̌_i⟩ = −1);
///   T_i⁻¹ θ_x ↦ θ_x T_i⁻¹ (⟨x,α̌_i⟩ = 0), θ_{s_i x} T_i (⟨x,α̌_i⟩ = +1);
///   ω T_i ↦ T_{ω(i)} ω.
/// ω θ_x pairs never rewrite: exchanging them is only a W'_aff identity,
/// not a ℬ'_aff one. Every move strictly decreases (length, Σ_θ
/// letters-to-the-left, Σ_ω Ts-to-the-right) lexicographically, so
/// rewriting terminates.
fn apply_first_move(
    datum: &RootDatum,
    letters: &mut Vec<BraidLetter>,
) -> Result<bool, AffWeylError> {
    for pos in 0..letters.len() {
        // Single-letter drops.
        match &letters[pos] {
            BraidLetter::Theta(lam) if lam.is_zero() => {
                letters.remove(pos);
                return Ok(true);
            }
            BraidLetter::Omega(mu) if mu.is_zero() => {
                let o = omega_by_translation(datum, mu)?;
                if o.finite == *datum.weyl_identity() {
                    letters.remove(pos);
                    return Ok(true);
                }
            }
            _ => {}
        }
        if pos + 1 >= letters.len() {
            break;
        }
        let (left, right) = (letters[pos].clone(), letters[pos + 1].clone());
        match (left, right) {
            (BraidLetter::Theta(x), BraidLetter::Theta(y)) => {
                letters[pos] = BraidLetter::Theta(x.add(&y));
                letters.remove(pos + 1);
                return Ok(true);
            }
            (
                BraidLetter::Ts { index: i, inverse: a },
                BraidLetter::Ts { index: j, inverse: b },
            ) if i == j && a != b => {
                letters.remove(pos + 1);
                letters.remove(pos);
                return Ok(true);
            }
            (BraidLetter::Omega(mu), BraidLetter::Omega(nu)) => {
                let o1 = AffineWeylElement::from_omega(omega_by_translation(datum, &mu)?);
                let o2 = AffineWeylElement::from_omega(omega_by_translation(datum, &nu)?);
                let prod = weyl_multiply(datum, &o1, &o2)?;
                letters[pos] = BraidLetter::Omega(prod.translation);
                letters.remove(pos + 1);
                return Ok(true);
            }
            // ω θ_x is blocked: ω θ_x ω⁻¹ = θ_{w_ω x} holds in W'_aff but
            // NOT in ℬ'_aff (in rank one it would force T_1² = e), so no
            // letter-level exchange is available.
            (BraidLetter::Omega(_), BraidLetter::Theta(_)) => continue,
            (BraidLetter::Ts { index, inverse }, BraidLetter::Theta(x)) => {
                // Bernstein commutation θ_x = T_i θ_{s_i x} T_i for
                // ⟨x,α̌_i⟩ = 1 and plain commutation for pairing 0; other
                // pairings do not rewrite (the normal form may not exist).
                let i = match datum.classify_affine_index(index)? {
                    AffineIndex::Finite(i) => i,
                    AffineIndex::Affine(_) => continue,
                };
                let k = datum.pairing(&x, i)?;
                let passes = if inverse { k == 1 } else { k == -1 };
                if k == 0 {
                    letters.swap(pos, pos + 1);
                    return Ok(true);
                } else if passes {
                    let sx = Weight(datum.simple_reflection(i).mat.apply(&x.0));
                    letters[pos] = BraidLetter::Theta(sx);
                    letters[pos + 1] = BraidLetter::Ts {
                        index,
                        inverse: !inverse,
                    };
                    return Ok(true);
                }
            }
            (BraidLetter::Omega(mu), BraidLetter::Ts { index, inverse }) => {
                let o = omega_by_translation(datum, &mu)?;
                letters[pos] = BraidLetter::Ts {
                    index: o.perm[&index],
                    inverse,
                };
                letters[pos + 1] = BraidLetter::Omega(mu);
                return Ok(true);
            }
            _ => {}
        }
    }
    Ok(false)
}

/// Instances of the defining relations of ℬ'_aff over the given weights,
/// as pairs of words with equal image (and, modulo the relations, equal
/// braid-group value). Deterministic enumeration.
pub fn defining_relation_pairs(
    datum: &RootDatum,
    weights: &[Weight],
) -> Result<Vec<(BraidWord, BraidWord)>, AffWeylError> {
    let mut pairs = Vec::new();
    let th = |x: &Weight| BraidLetter::Theta(x.clone());
    // θ_x θ_y = θ_{x+y}.
    for x in weights {
        for y in weights {
            pairs.push((
                BraidWord(vec![th(x), th(y)]),
                BraidWord(vec![th(&x.add(y))]),
            ));
        }
    }
    // Commutation and the ⟨x,α̌⟩ = 1 relation.
    for i in 0..datum.rank() {
        let s = datum.simple_reflection(i).clone();
        for x in weights {
            let k = datum.pairing(x, i)?;
            let sx = Weight(s.mat.apply(&x.0));
            if k == 0 {
                pairs.push((
                    BraidWord(vec![BraidLetter::ts(i + 1), th(x)]),
                    BraidWord(vec![th(x), BraidLetter::ts(i + 1)]),
                ));
            } else if k == 1 {
                pairs.push((
                    BraidWord(vec![th(x)]),
                    BraidWord(vec![
                        BraidLetter::ts(i + 1),
                        th(&sx),
                        BraidLetter::ts(i + 1),
                    ]),
                ));
            }
        }
    }
    // Finite braid relations: alternating words of length m_ij.
    for i in 0..datum.rank() {
        for j in (i + 1)..datum.rank() {
            let m = match datum.cartan()[i][j] * datum.cartan()[j][i] {
                0 => 2,
                1 => 3,
                2 => 4,
                3 => 6,
                other => panic!("not a finite Cartan product: {other}"),
            };
            let alternating = |a: usize, b: usize| {
                BraidWord(
                    (0..m)
                        .map(|t| BraidLetter::ts(if t % 2 == 0 { a + 1 } else { b + 1 }))
                        .collect(),
                )
            };
            pairs.push((alternating(i, j), alternating(j, i)));
        }
    }
    // Ω-relations: conjugation permutes the affine generators, and Ω
    // multiplies by its own group law. (There is no ω θ_x relation: the
    // exchange ω θ_x = θ_{w_ω x} ω holds in W'_aff but not in ℬ'_aff.)
    for o in datum.omega_elements() {
        let om = BraidLetter::Omega(o.translation.clone());
        for idx in datum.affine_index_set() {
            pairs.push((
                BraidWord(vec![om.clone(), BraidLetter::ts(idx)]),
                BraidWord(vec![BraidLetter::ts(o.perm[&idx]), om.clone()]),
            ));
        }
        for o2 in datum.omega_elements() {
            let prod = weyl_multiply(
                datum,
                &AffineWeylElement::from_omega(o),
                &AffineWeylElement::from_omega(o2),
            )?;
            pairs.push((
                BraidWord(vec![om.clone(), BraidLetter::Omega(o2.translation.clone())]),
                BraidWord(vec![BraidLetter::Omega(prod.translation)]),
            ));
        }
    }
    Ok(pairs)
}

/// Breadth-first search for `(b, α)` with image(b)⁻¹ · s_α · image(b) equal
/// to the affine reflection at `target`; `α` is returned as a finite simple
/// index (1-based, as in the affine index set). First hit in BFS order.
///
/// The search runs in the extended group, so the weight lattice is required
/// (Ω is trivial on the root lattice and the witness may not exist there).
pub fn conjugation_witness(
    datum: &RootDatum,
    target: usize,
    bound: u64,
) -> Result<(BraidWord, usize), AffWeylError> {
    if datum.lattice() != crate::rootdata::Lattice::Weight {
        return Err(AffWeylError::WrongLattice);
    }
    match datum.classify_affine_index(target)? {
        AffineIndex::Affine(_) => {}
        AffineIndex::Finite(_) => return Err(AffWeylError::NotAffineNode(target)),
    }
    let s0 = AffineWeylElement::affine_simple(datum, target)?;

    let mut queue: VecDeque<AffineWeylElement> = VecDeque::new();
    let mut seen: BTreeSet<(Vec<i64>, Vec<u8>)> = BTreeSet::new();
    for o in datum.omega_elements() {
        let g = AffineWeylElement::from_omega(o);
        if seen.insert(g.key()) {
            queue.push_back(g);
        }
    }
    while let Some(g) = queue.pop_front() {
        let ginv = weyl_inverse(datum, &g)?;
        for alpha in 1..=datum.rank() {
            let s_alpha = AffineWeylElement::affine_simple(datum, alpha)?;
            let conj = weyl_multiply(datum, &weyl_multiply(datum, &ginv, &s_alpha)?, &g)?;
            if conj == s0 {
                return Ok((positive_lift(datum, &g)?, alpha));
            }
        }
        let len = coxeter_length(datum, &g);
        if len >= bound {
            continue;
        }
        for idx in datum.affine_index_set() {
            let s = AffineWeylElement::affine_simple(datum, idx)?;
            let next = weyl_multiply(datum, &g, &s)?;
            if coxeter_length(datum, &next) == len + 1 && seen.insert(next.key()) {
                queue.push_back(next);
            }
        }
    }
    Err(AffWeylError::NoWitnessWithinBound { bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{Lattice, RootSystemType};

    fn datum(t: RootSystemType, l: Lattice) -> RootDatum {
        RootDatum::new(t, l)
    }

    fn a1w() -> RootDatum {
        datum(RootSystemType::A1, Lattice::Weight)
    }

    #[test]
    fn semidirect_products_match_hand_cases() {
        let d = a1w();
        let omega = AffineWeylElement {
            translation: Weight(vec![1]),
            finite_part: d.simple_reflection(0).clone(),
        };
        // (t_ω s)² = t_{ω + s·ω} = t_0 = e.
        let sq = weyl_multiply(&d, &omega, &omega).unwrap();
        assert_eq!(sq, AffineWeylElement::identity(&d));
        // s_{α_0}² = e.
        let s0 = AffineWeylElement::affine_simple(&d, 0).unwrap();
        assert_eq!(
            weyl_multiply(&d, &s0, &s0).unwrap(),
            AffineWeylElement::identity(&d)
        );
        // Identity really is neutral.
        let e = AffineWeylElement::identity(&d);
        assert_eq!(weyl_multiply(&d, &e, &s0).unwrap(), s0);
        assert_eq!(weyl_multiply(&d, &s0, &e).unwrap(), s0);
    }

    #[test]
    fn products_associate_and_inverses_cancel() {
        for t in RootSystemType::ALL {
            let d = datum(t, Lattice::Weight);
            let mut sample = vec![AffineWeylElement::identity(&d)];
            for idx in d.affine_index_set() {
                sample.push(AffineWeylElement::affine_simple(&d, idx).unwrap());
            }
            for o in d.omega_elements() {
                sample.push(AffineWeylElement::from_omega(o));
            }
            let lam = Weight(vec![1; d.rank()]);
            sample.push(AffineWeylElement::from_translation(&d, &lam).unwrap());
            for a in &sample {
                let ainv = weyl_inverse(&d, a).unwrap();
                assert_eq!(
                    weyl_multiply(&d, a, &ainv).unwrap(),
                    AffineWeylElement::identity(&d),
                    "{t}"
                );
                for b in &sample {
                    for c in &sample {
                        let ab_c = weyl_multiply(&d, &weyl_multiply(&d, a, b).unwrap(), c)
                            .unwrap();
                        let a_bc = weyl_multiply(&d, a, &weyl_multiply(&d, b, c).unwrap())
                            .unwrap();
                        assert_eq!(ab_c, a_bc, "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn lengths_match_hand_cases() {
        let d = a1w();
        assert_eq!(coxeter_length(&d, &AffineWeylElement::identity(&d)), 0);
        let s0 = AffineWeylElement::affine_simple(&d, 0).unwrap();
        assert_eq!(coxeter_length(&d, &s0), 1);
        let t_alpha =
            AffineWeylElement::from_translation(&d, &Weight(vec![2])).unwrap();
        assert_eq!(coxeter_length(&d, &t_alpha), 2);
    }

    #[test]
    fn positive_lift_round_trips_and_counts_length() {
        for t in RootSystemType::ALL {
            for l in [Lattice::Weight, Lattice::Root] {
                let d = datum(t, l);
                let ball = 2i64;
                let mut coords = vec![-ball; d.rank()];
                'outer: loop {
                    let lam = Weight(coords.clone());
                    for w in d.weyl_elements() {
                        let g = AffineWeylElement {
                            translation: lam.clone(),
                            finite_part: w.clone(),
                        };
                        let word = positive_lift(&d, &g).unwrap();
                        assert_eq!(braid_word_image(&d, &word).unwrap(), g, "{t} {l}");
                        let ts_count = word
                            .0
                            .iter()
                            .filter(|x| matches!(x, BraidLetter::Ts { .. }))
                            .count() as u64;
                        assert_eq!(ts_count, coxeter_length(&d, &g), "{t} {l}");
                        assert!(word.0.iter().all(|x| !matches!(
                            x,
                            BraidLetter::Ts { inverse: true, .. }
                        )));
                    }
                    let mut i = 0;
                    loop {
                        if i == d.rank() {
                            break 'outer;
                        }
                        coords[i] += 1;
                        if coords[i] <= ball {
                            break;
                        }
                        coords[i] = -ball;
                        i += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn positive_lift_hand_cases() {
        let d = a1w();
        assert_eq!(
            positive_lift(&d, &AffineWeylElement::identity(&d)).unwrap(),
            BraidWord::empty()
        );
        let t_alpha =
            AffineWeylElement::from_translation(&d, &Weight(vec![2])).unwrap();
        assert_eq!(
            positive_lift(&d, &t_alpha).unwrap(),
            BraidWord(vec![BraidLetter::ts(0), BraidLetter::ts(1)])
        );
        let omega = AffineWeylElement {
            translation: Weight(vec![1]),
            finite_part: d.simple_reflection(0).clone(),
        };
        assert_eq!(
            positive_lift(&d, &omega).unwrap(),
            BraidWord(vec![BraidLetter::Omega(Weight(vec![1]))])
        );
    }

    #[test]
    fn serialization_round_trips() {
        let d = datum(RootSystemType::A2, Lattice::Weight);
        let words = [
            BraidWord::empty(),
            BraidWord(vec![
                BraidLetter::ts_inverse(0),
                BraidLetter::ts(1),
                BraidLetter::Theta(Weight(vec![1, -2])),
                BraidLetter::Omega(d.omega_elements()[1].translation.clone()),
            ]),
        ];
        for w in &words {
            let text = w.to_string();
            let back: BraidWord = text.parse().unwrap();
            assert_eq!(&back, w, "{text}");
        }
        assert_eq!(
            "T0^-1.T1.th[1,-2]".parse::<BraidWord>().unwrap().to_string(),
            "T0^-1.T1.th[1,-2]"
        );
        assert_eq!("e".parse::<BraidWord>().unwrap(), BraidWord::empty());
        assert!("T1.xy".parse::<BraidWord>().is_err());
        let err = "T1.th[1,q]".parse::<BraidWord>().unwrap_err();
        assert_eq!(err.offset, 3);
    }

    #[test]
    fn theta_normal_form_hand_cases() {
        let d = a1w();
        // θ_λ θ_μ ↦ θ_{λ+μ}.
        let (lam, residue) = theta_normal_form(
            &d,
            &BraidWord(vec![
                BraidLetter::Theta(Weight(vec![2])),
                BraidLetter::Theta(Weight(vec![-1])),
            ]),
            16,
        )
        .unwrap();
        assert_eq!(lam, Weight(vec![1]));
        assert!(residue.0.is_empty());
        // T₁ θ_{−ω} T₁ ↦ θ_ω.
        let (lam, residue) = theta_normal_form(
            &d,
            &BraidWord(vec![
                BraidLetter::ts(1),
                BraidLetter::Theta(Weight(vec![-1])),
                BraidLetter::ts(1),
            ]),
            16,
        )
        .unwrap();
        assert_eq!(lam, Weight(vec![1]));
        assert!(residue.0.is_empty());
        // T₁ θ_0 ↦ (0, T₁).
        let (lam, residue) = theta_normal_form(
            &d,
            &BraidWord(vec![BraidLetter::ts(1), BraidLetter::Theta(Weight(vec![0]))]),
            16,
        )
        .unwrap();
        assert!(lam.is_zero());
        assert_eq!(residue, BraidWord(vec![BraidLetter::ts(1)]));
    }

    #[test]
    fn theta_normal_form_expands_affine_generators() {
        for t in RootSystemType::ALL {
            for l in [Lattice::Weight, Lattice::Root] {
                let d = datum(t, l);
                for idx in d.affine_nodes() {
                    let (lam, residue) = theta_normal_form(
                        &d,
                        &BraidWord(vec![BraidLetter::ts(idx)]),
                        64,
                    )
                    .unwrap();
                    // Image check: θ_λ·residue still maps to s_idx.
                    let mut word = vec![BraidLetter::Theta(lam)];
                    word.extend(residue.0);
                    assert_eq!(
                        braid_word_image(&d, &BraidWord(word)).unwrap(),
                        AffineWeylElement::affine_simple(&d, idx).unwrap(),
                        "{t} {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta_normal_form_reports_failure_without_deciding() {
        let d = a1w();
        // T₁ θ_α has no normal form (it equals the inverse affine generator
        // up to the relations); the procedure must stop with the marker.
        let stuck = BraidWord(vec![
            BraidLetter::ts(1),
            BraidLetter::Theta(Weight(vec![2])),
        ]);
        match theta_normal_form(&d, &stuck, 100) {
            Err(AffWeylError::NormalFormNotReached { .. }) => {}
            other => panic!("expected the failure marker, got {other:?}"),
        }
        // Zero budget fails even on rewritable words.
        let easy = BraidWord(vec![
            BraidLetter::Theta(Weight(vec![1])),
            BraidLetter::Theta(Weight(vec![1])),
        ]);
        assert!(matches!(
            theta_normal_form(&d, &easy, 0),
            Err(AffWeylError::NormalFormNotReached { .. })
        ));
    }

    #[test]
    fn defining_relations_hold_in_the_weyl_group() {
        for t in RootSystemType::ALL {
            let d = datum(t, Lattice::Weight);
            let mut weights = vec![Weight::zero(d.rank())];
            for i in 0..d.rank() {
                let mut e = vec![0; d.rank()];
                e[i] = 1;
                weights.push(Weight(e.clone()));
                e[i] = -1;
                weights.push(Weight(e));
            }
            for (lhs, rhs) in defining_relation_pairs(&d, &weights).unwrap() {
                assert_eq!(
                    braid_word_image(&d, &lhs).unwrap(),
                    braid_word_image(&d, &rhs).unwrap(),
                    "{t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn conjugation_witnesses_exist_and_check_out() {
        // A1: the nontrivial ω conjugates s₁ to s₀.
        let d = a1w();
        let (b, alpha) = conjugation_witness(&d, 0, 4).unwrap();
        assert_eq!(b, BraidWord(vec![BraidLetter::Omega(Weight(vec![1]))]));
        assert_eq!(alpha, 1);

        for t in RootSystemType::ALL {
            let d = datum(t, Lattice::Weight);
            for node in d.affine_nodes() {
                let (b, alpha) = conjugation_witness(&d, node, 6).unwrap();
                let g = braid_word_image(&d, &b).unwrap();
                let ginv = weyl_inverse(&d, &g).unwrap();
                let s_alpha = AffineWeylElement::affine_simple(&d, alpha).unwrap();
                let conj = weyl_multiply(
                    &d,
                    &weyl_multiply(&d, &ginv, &s_alpha).unwrap(),
                    &g,
                )
                .unwrap();
                assert_eq!(
                    conj,
                    AffineWeylElement::affine_simple(&d, node).unwrap(),
                    "{t} node {node}"
                );
            }
        }

        // Root lattice mode is rejected.
        let dr = datum(RootSystemType::A1, Lattice::Root);
        assert!(matches!(
            conjugation_witness(&dr, 0, 4),
            Err(AffWeylError::WrongLattice)
        ));
    }

    #[test]
    fn free_inverse_inverts_the_image() {
        let d = datum(RootSystemType::A2, Lattice::Weight);
        let word = BraidWord(vec![
            BraidLetter::ts(0),
            BraidLetter::Theta(Weight(vec![1, -1])),
            BraidLetter::Omega(d.omega_elements()[1].translation.clone()),
            BraidLetter::ts_inverse(2),
        ]);
        let inv = word.free_inverse(&d).unwrap();
        let prod = weyl_multiply(
            &d,
            &braid_word_image(&d, &word).unwrap(),
            &braid_word_image(&d, &inv).unwrap(),
        )
        .unwrap();
        assert_eq!(prod, AffineWeylElement::identity(&d));
    }
}
