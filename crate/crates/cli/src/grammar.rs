//! Textual grammars for the command line.
//!
//! Three little languages live here, all parsed by recursive descent with
//! byte-offset error reporting:
//!
//! * Hecke elements: `q^2*e[1,0]*T[s1.s2] + (q - 1)*T[s1] - 3`. A term is a
//!   `*`-product of factors; factors are integer or `q`/`v` powers, weight
//!   symbols `e[c1,c2]`, finite Weyl words `T[s1.s2]`, or a parenthesized
//!   subexpression. Products are multiplied out, so any well-formed
//!   expression parses to Bernstein normal form and printing is canonical.
//! * Bimodule construction words: `R0.R1.th[2]@om[1]`, dot-joined letters
//!   `R<i>` (elementary wall bimodule), `th[λ]` (translation graph), and
//!   `om[μ]` (length-zero graph), with an optional trailing `@om[μ]` twist.
//! * Affine Weyl elements: `t[2]*s1.s2`, `s1`, or `e`, used by filtration
//!   census printouts.
//!
//! Braid words (`T0^-1.T1.th[1,-2].om[1]`) are parsed by
//! [`affhecke::affweyl::BraidWord`]'s `FromStr` and are not duplicated here.

use affhecke::affweyl::{weyl_multiply, AffineWeylElement};
use affhecke::bimod::{build_graph, build_r, tensor, GradedBimodule};
use affhecke::hecke::{hecke_multiply, CharacterElement, HeckeDisplay, HeckeElement, t_element};
use affhecke::laurent::LaurentScalar;
use affhecke::rootdata::{RootDatum, Weight};
use std::fmt;
use thiserror::Error;

use crate::CliError;

/// Syntax error with a byte offset into the input.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Scanner<'a> {
    datum: &'a RootDatum,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(datum: &'a RootDatum, text: &'a str) -> Self {
        Scanner {
            datum,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", b as char)))
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| self.err("invalid utf-8"))
    }

    fn unsigned(&mut self) -> Result<i128, ParseError> {
        let text = self.digits()?;
        text.parse::<i128>()
            .map_err(|_| self.err(format!("integer `{text}` out of range")))
    }

    fn signed(&mut self) -> Result<i128, ParseError> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let n = self.unsigned()?;
        Ok(if neg { -n } else { n })
    }

    /// `c1,c2,...` with the datum's rank enforced.
    fn coords(&mut self) -> Result<Weight, ParseError> {
        let mut cs = vec![self.signed()? as i64];
        while self.peek() == Some(b',') {
            self.pos += 1;
            cs.push(self.signed()? as i64);
        }
        if cs.len() != self.datum.rank() {
            return Err(self.err(format!(
                "weight has {} coordinates, expected {}",
                cs.len(),
                self.datum.rank()
            )));
        }
        Ok(Weight(cs))
    }

    fn bracketed_coords(&mut self) -> Result<Weight, ParseError> {
        self.expect(b'[')?;
        let w = self.coords()?;
        self.expect(b']')?;
        Ok(w)
    }

    /// Sum of signed terms; stops before `)` or end of input.
    fn element(&mut self) -> Result<HeckeElement, ParseError> {
        self.skip_ws();
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.skip_ws();
            negate = true;
        }
        let first = self.term()?;
        let mut acc = if negate {
            first.scale(&LaurentScalar::from_int(-1))
        } else {
            first
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<HeckeElement, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                let f = self.factor()?;
                acc = hecke_multiply(self.datum, &acc, &f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    /// Optional `^<signed>` exponent, defaulting to 1.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.signed()?;
            i32::try_from(e).map_err(|_| self.err("exponent out of range"))
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<HeckeElement, ParseError> {
        let scalar = |c: LaurentScalar, datum: &RootDatum| HeckeElement::one(datum).scale(&c);
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.element()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'0'..=b'9') => {
                let n = self.unsigned()?;
                Ok(scalar(LaurentScalar::from_int(n), self.datum))
            }
            Some(b'q') => {
                self.pos += 1;
                let k = self.exponent()?;
                Ok(scalar(LaurentScalar::q_power(k), self.datum))
            }
            Some(b'v') => {
                self.pos += 1;
                let k = self.exponent()?;
                Ok(scalar(LaurentScalar::v_power(k), self.datum))
            }
            Some(b'e') => {
                self.pos += 1;
                let lam = self.bracketed_coords()?;
                Ok(HeckeElement::from_character(&CharacterElement::from_weight(
                    &lam,
                )))
            }
            Some(b'T') => {
                self.pos += 1;
                self.expect(b'[')?;
                let mut acc = HeckeElement::one(self.datum);
                loop {
                    self.expect(b's')?;
                    let k = self.unsigned()? as usize;
                    if k == 0 || k > self.datum.rank() {
                        return Err(self.err(format!("unknown generator index s{k}")));
                    }
                    let t = t_element(self.datum, self.datum.simple_reflection(k - 1));
                    acc = hecke_multiply(self.datum, &acc, &t);
                    if self.peek() == Some(b'.') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.expect(b']')?;
                Ok(acc)
            }
            Some(other) => Err(self.err(format!(
                "expected a factor, found `{}`",
                other as char
            ))),
            None => Err(self.err("expected a factor, found end of input")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }
}

/// Parse a Hecke element; products are multiplied out so the result is in
/// Bernstein normal form.
pub fn parse_element(datum: &RootDatum, text: &str) -> Result<HeckeElement, ParseError> {
    let mut sc = Scanner::new(datum, text);
    let e = sc.element()?;
    sc.finish()?;
    Ok(e)
}

/// Parse an element of ℤ[v^{±}][𝕏]: a Hecke expression whose normal form has
/// no T-part.
pub fn parse_character(datum: &RootDatum, text: &str) -> Result<CharacterElement, ParseError> {
    let e = parse_element(datum, text)?;
    let mut out = CharacterElement::zero();
    for ((lam, wi), c) in &e.0 {
        if *wi != 0 {
            return Err(ParseError {
                offset: 0,
                message: format!("`{text}` is not T-free"),
            });
        }
        out.add_term(lam, c);
    }
    Ok(out)
}

/// Parse a Laurent scalar: a Hecke expression supported on the identity.
pub fn parse_scalar(datum: &RootDatum, text: &str) -> Result<LaurentScalar, ParseError> {
    let e = parse_element(datum, text)?;
    let zero = Weight::zero(datum.rank());
    let mut out = LaurentScalar::zero();
    for ((lam, wi), c) in &e.0 {
        if *wi != 0 || *lam != zero {
            return Err(ParseError {
                offset: 0,
                message: format!("`{text}` is not a scalar"),
            });
        }
        out = &out + c;
    }
    Ok(out)
}

/// Canonical text of a Hecke element for this datum.
pub fn show_element(datum: &RootDatum, e: &HeckeElement) -> String {
    HeckeDisplay { datum, element: e }.to_string()
}

/// Bare comma-separated coordinates, e.g. `1,-2`, rank enforced.
pub fn parse_weight(datum: &RootDatum, text: &str) -> Result<Weight, ParseError> {
    let mut sc = Scanner::new(datum, text.trim());
    let w = sc.coords()?;
    sc.finish()?;
    Ok(w)
}

/// One tensor factor of a construction word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimodLetter {
    /// Elementary wall-crossing bimodule R_i at an affine simple index.
    R(usize),
    /// Translation graph bimodule J_{t_λ}.
    Graph(Weight),
    /// Length-zero graph bimodule J_ω, named by its translation part.
    Omega(Weight),
}

impl fmt::Display for BimodLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BimodLetter::R(i) => write!(f, "R{i}"),
            BimodLetter::Graph(lam) => write!(f, "th[{lam}]"),
            BimodLetter::Omega(mu) => write!(f, "om[{mu}]"),
        }
    }
}

/// Construction word `R0.R1.th[2]@om[1]`; the optional `@om[μ]` is a final
/// tensor factor J_ω.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BimodWord {
    pub letters: Vec<BimodLetter>,
    pub twist: Option<Weight>,
}

impl fmt::Display for BimodWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            write!(f, "e")?;
        } else {
            let mut first = true;
            for letter in &self.letters {
                if !first {
                    write!(f, ".")?;
                }
                first = false;
                write!(f, "{letter}")?;
            }
        }
        if let Some(mu) = &self.twist {
            write!(f, "@om[{mu}]")?;
        }
        Ok(())
    }
}

/// Parse a construction word. The letter list may be `e` for the empty
/// word; the datum fixes the coordinate rank.
pub fn parse_bimod_word(datum: &RootDatum, text: &str) -> Result<BimodWord, ParseError> {
    let text = text.trim();
    let (body, twist) = match text.split_once('@') {
        Some((body, tail)) => {
            let inner = tail
                .strip_prefix("om[")
                .and_then(|t| t.strip_suffix(']'))
                .ok_or(ParseError {
                    offset: body.len() + 1,
                    message: "twist must be `om[<coords>]`".into(),
                })?;
            let mut sc = Scanner::new(datum, inner);
            let mu = sc.coords()?;
            sc.finish().map_err(|e| ParseError {
                offset: body.len() + 4 + e.offset,
                message: e.message,
            })?;
            (body, Some(mu))
        }
        None => (text, None),
    };
    let mut letters = Vec::new();
    if !(body.is_empty() || body == "e") {
        let mut offset = 0usize;
        for token in body.split('.') {
            let make_err = |message: String| ParseError { offset, message };
            let letter = if let Some(rest) = token.strip_prefix('R') {
                let i = rest
                    .parse::<usize>()
                    .map_err(|_| make_err(format!("expected `R<index>`, found `{token}`")))?;
                BimodLetter::R(i)
            } else if let Some(rest) = token.strip_prefix("th[") {
                let inner = rest
                    .strip_suffix(']')
                    .ok_or_else(|| make_err("unterminated `th[` letter".into()))?;
                let mut sc = Scanner::new(datum, inner);
                let lam = sc.coords().map_err(|e| make_err(e.message))?;
                sc.finish().map_err(|e| make_err(e.message))?;
                BimodLetter::Graph(lam)
            } else if let Some(rest) = token.strip_prefix("om[") {
                let inner = rest
                    .strip_suffix(']')
                    .ok_or_else(|| make_err("unterminated `om[` letter".into()))?;
                let mut sc = Scanner::new(datum, inner);
                let mu = sc.coords().map_err(|e| make_err(e.message))?;
                sc.finish().map_err(|e| make_err(e.message))?;
                BimodLetter::Omega(mu)
            } else {
                return Err(make_err(format!("unknown letter `{token}`")));
            };
            letters.push(letter);
            offset += token.len() + 1;
        }
    }
    Ok(BimodWord { letters, twist })
}

fn letter_module(datum: &RootDatum, letter: &BimodLetter) -> Result<GradedBimodule, CliError> {
    use affhecke::affweyl::omega_by_translation;
    Ok(match letter {
        BimodLetter::R(i) => build_r(datum, *i)?,
        BimodLetter::Graph(lam) => {
            build_graph(datum, &AffineWeylElement::from_translation(datum, lam)?)
        }
        BimodLetter::Omega(mu) => build_graph(
            datum,
            &AffineWeylElement::from_omega(omega_by_translation(datum, mu)?),
        ),
    })
}

/// Tensor the letters left to right; the empty word builds the diagonal
/// bimodule.
pub fn build_bimod_word(datum: &RootDatum, word: &BimodWord) -> Result<GradedBimodule, CliError> {
    let mut module: Option<GradedBimodule> = None;
    let push = |m: GradedBimodule, module: &mut Option<GradedBimodule>| -> Result<(), CliError> {
        *module = Some(match module.take() {
            None => m,
            Some(acc) => tensor(datum, &acc, &m)?,
        });
        Ok(())
    };
    for letter in &word.letters {
        push(letter_module(datum, letter)?, &mut module)?;
    }
    if let Some(mu) = &word.twist {
        push(
            letter_module(datum, &BimodLetter::Omega(mu.clone()))?,
            &mut module,
        )?;
    }
    Ok(match module {
        Some(m) => m,
        None => build_graph(datum, &AffineWeylElement::identity(datum)),
    })
}

/// `t[λ]*s1.s2`, `s1`, `t[λ]`, or `e`.
pub fn show_affine(g: &AffineWeylElement) -> String {
    let mut parts = Vec::new();
    if !g.translation.is_zero() {
        parts.push(format!("t[{}]", g.translation));
    }
    if !g.finite_part.word.is_empty() {
        let letters: Vec<String> = g
            .finite_part
            .word
            .iter()
            .map(|&i| format!("s{}", i as usize + 1))
            .collect();
        parts.push(letters.join("."));
    }
    if parts.is_empty() {
        "e".into()
    } else {
        parts.join("*")
    }
}

/// Inverse of [`show_affine`].
pub fn parse_affine(datum: &RootDatum, text: &str) -> Result<AffineWeylElement, ParseError> {
    let text = text.trim();
    if text == "e" {
        return Ok(AffineWeylElement::identity(datum));
    }
    let mut sc = Scanner::new(datum, text);
    let mut translation = Weight::zero(datum.rank());
    if sc.peek() == Some(b't') {
        sc.pos += 1;
        translation = sc.bracketed_coords()?;
        if sc.peek() == Some(b'*') {
            sc.pos += 1;
        }
    }
    let mut out = AffineWeylElement::identity(datum);
    while sc.peek() == Some(b's') {
        sc.pos += 1;
        let k = sc.unsigned()? as usize;
        if k == 0 || k > datum.rank() {
            return Err(sc.err(format!("unknown generator index s{k}")));
        }
        let step = AffineWeylElement {
            translation: Weight::zero(datum.rank()),
            finite_part: datum.simple_reflection(k - 1).clone(),
        };
        out = weyl_multiply(datum, &out, &step).map_err(|e| sc.err(e.to_string()))?;
        if sc.peek() == Some(b'.') {
            sc.pos += 1;
        } else {
            break;
        }
    }
    sc.finish()?;
    out.translation = translation;
    Ok(out)
}

/// Dotted affine-simple indices: `0.1.0`, or `e` for the empty word.
pub fn parse_index_word(datum: &RootDatum, text: &str) -> Result<Vec<usize>, ParseError> {
    let text = text.trim();
    if text.is_empty() || text == "e" {
        return Ok(Vec::new());
    }
    let allowed = datum.affine_index_set();
    let mut out = Vec::new();
    let mut offset = 0usize;
    for token in text.split('.') {
        let i = token.parse::<usize>().map_err(|_| ParseError {
            offset,
            message: format!("expected an affine simple index, found `{token}`"),
        })?;
        if !allowed.contains(&i) {
            return Err(ParseError {
                offset,
                message: format!("index {i} is not an affine node of this datum"),
            });
        }
        out.push(i);
        offset += token.len() + 1;
    }
    Ok(out)
}
