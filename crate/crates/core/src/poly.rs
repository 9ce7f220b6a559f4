//! Sparse multivariate polynomials over a generic field scalar, plus a small
//! expression parser for defining-polynomial input.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};

use crate::scalar::Rat;
use crate::{Error, Result};

/// Scalar requirements for polynomial coefficients.
pub trait Coeff:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + std::fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// A polynomial in a fixed number of variables, stored term-sparse with
/// exponent vectors as keys.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, T>,
}

impl<T: Coeff> MPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exp = vec![0u16; nvars];
        exp[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(exp, T::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &T)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, c: T, exp: Vec<u16>) {
        assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(slot) => {
                let sum = slot.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *slot = sum;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(ca.clone() * cb.clone(), exp);
            }
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = MPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, t) in &self.terms {
            out.terms.insert(e.clone(), t.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = MPoly::constant(self.nvars, T::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            let mut k = T::zero();
            for _ in 0..e[i] {
                k = k + T::one();
            }
            out.add_term(c.clone() * k, exp);
        }
        out
    }

    /// Substitutes a polynomial for variable `i`.
    pub fn substitute(&self, i: usize, g: &MPoly<T>) -> Self {
        assert_eq!(self.nvars, g.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(self.nvars, c.clone());
            let mut rest = e.clone();
            let k = rest[i];
            rest[i] = 0;
            let mut base = MPoly::zero(self.nvars);
            base.terms.insert(rest, T::one());
            term = term.mul(&base).mul(&g.pow(k as usize));
            out = out.add(&term);
        }
        out
    }

    /// Exact division by variable `i`; errors when a term lacks that factor.
    pub fn divide_by_var(&self, i: usize) -> Result<Self> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return Err(Error::Domain(format!(
                    "polynomial is not divisible by variable {i}"
                )));
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            out.terms.insert(exp, c.clone());
        }
        Ok(out)
    }

    pub fn degree_in(&self, i: usize) -> usize {
        self.terms.keys().map(|e| e[i] as usize).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Which variables actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn map_coeffs<S: Coeff>(&self, f: impl Fn(&T) -> S) -> MPoly<S> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(f(c), e.clone());
        }
        out
    }

    /// Widens to a larger variable set, keeping variable indices.
    pub fn extend_vars(&self, nvars: usize) -> MPoly<T> {
        assert!(nvars >= self.nvars);
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut exp = e.clone();
            exp.resize(nvars, 0);
            out.add_term(c.clone(), exp);
        }
        out
    }
}

/// Coefficients of a univariate polynomial in variable `i`, low to high,
/// as polynomials in the remaining variables.
pub fn coeffs_in_var<T: Coeff>(p: &MPoly<T>, i: usize) -> Vec<MPoly<T>> {
    let d = p.degree_in(i);
    let mut out = vec![MPoly::zero(p.nvars()); d + 1];
    for (e, c) in p.terms() {
        let k = e[i] as usize;
        let mut exp = e.clone();
        exp[i] = 0;
        out[k].add_term(c.clone(), exp);
    }
    out
}

// ---------------------------------------------------------------------------
// parser

/// Parses an expression like `x0^2 - 3*x0 + 1/2` over the named variables.
/// Supported: `+ - * ^`, parentheses, integer and `p/q` literals.
pub fn parse_poly(src: &str, vars: &[&str]) -> Result<MPoly<Rat>> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected trailing input in {src:?}"
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == '/' {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j > i + 1 {
                        text.push('/');
                        text.extend(&chars[i + 1..j]);
                        i = j;
                    }
                }
                out.push(Tok::Num(crate::scalar::parse_rat(&text)?));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<MPoly<Rat>> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MPoly<Rat>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                // implicit multiplication: `3x0`, `x0 x1`, `2(x0+1)`
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly<Rat>> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Tok::Num(n)) if n.is_integer() && !num::Signed::is_negative(&n) => {
                    let k = crate::linalg::int_to_i64(n.numer())? as usize;
                    Ok(base.pow(k))
                }
                other => Err(Error::Parse(format!(
                    "exponent must be a nonnegative integer, found {other:?}"
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<MPoly<Rat>> {
        let n = self.vars.len();
        match self.next() {
            Some(Tok::Num(r)) => Ok(MPoly::constant(n, r)),
            Some(Tok::Ident(name)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| v == &name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(MPoly::var(n, idx))
            }
            Some(Tok::Minus) => Ok(self.factor()?.neg()),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn arithmetic_round_trip() {
        let x = MPoly::<Rat>::var(2, 0);
        let y = MPoly::<Rat>::var(2, 1);
        let p = x.mul(&x).add(&y.scale(&rat_int(-3)));
        assert_eq!(p.eval(&[rat_int(2), rat_int(5)]), rat_int(-11));
        assert_eq!(p.partial_derivative(0).eval(&[rat_int(2), rat_int(5)]), rat_int(4));
        assert_eq!(p.degree_in(0), 2);
        let q = p.substitute(0, &y);
        assert_eq!(q.eval(&[rat_int(9), rat_int(5)]), rat_int(10));
    }

    #[test]
    fn division_by_variable() {
        let x = MPoly::<Rat>::var(2, 0);
        let y = MPoly::<Rat>::var(2, 1);
        let p = x.mul(&y).add(&x.mul(&x));
        let q = p.divide_by_var(0).unwrap();
        assert_eq!(q, y.add(&x));
        assert!(y.add(&MPoly::constant(2, rat_int(1))).divide_by_var(1).is_err());
    }

    #[test]
    fn parser_accepts_the_catalog_forms() {
        let vars = ["x0", "u1", "v1"];
        let f = parse_poly("x0^2 - x0", &vars).unwrap();
        assert_eq!(f.eval(&[rat_int(3), rat_int(0), rat_int(0)]), rat_int(6));
        let g = parse_poly("x0^3 + x0", &vars).unwrap();
        assert_eq!(g.eval(&[rat_int(2), rat_int(0), rat_int(0)]), rat_int(10));
        let h = parse_poly("1/2 x0 (x0 - 1) + 3", &vars).unwrap();
        assert_eq!(h.eval(&[rat_int(3), rat_int(0), rat_int(0)]), rat_int(6));
        let k = parse_poly("-x0^2 + 2*u1*v1", &vars).unwrap();
        assert_eq!(
            k.eval(&[rat_int(1), rat_int(2), rat_int(3)]),
            rat_int(11)
        );
        assert!(parse_poly("x9", &vars).is_err());
        assert!(parse_poly("x0 +", &vars).is_err());
        assert!(parse_poly("(x0", &vars).is_err());
    }

    #[test]
    fn rational_literals() {
        let vars = ["x0"];
        let f = parse_poly("2/3 x0 - 1/6", &vars).unwrap();
        assert_eq!(f.eval(&[rat(1, 2)]), rat(1, 6));
    }
}
