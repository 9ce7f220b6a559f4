//! Affine suspensions `uv = f` over a base, their automorphism subgroups,
//! derivation lifting, the surface solver, and flexibility certificates.
//!
//! A level-`l` suspension over affine `k`-space lives in coordinates
//! `x0..x_{k-1}, u1, v1, .., ul, vl` and is cut out by the relations
//! `u_i v_i = f_i`, where each `f_i` may use only the earlier coordinates and
//! must be nonconstant modulo the earlier relations.
//!
//! Two scalar modes share the same code: exact rationals, and complex doubles
//! with a tolerance. The defining data is always exact; points, words and
//! solver parameters are generic in the scalar.

use num::complex::Complex64;
use num::{One, Signed, Zero};

use crate::poly::{coeffs_in_var, MPoly};
use crate::scalar::{rat_int, rational_nth_root, Int, Rat};
use crate::{Error, Result};

/// Scalar for suspension points and words: exact rationals or complex
/// doubles. Tolerances are ignored in the exact mode.
pub trait SuspScalar: crate::poly::Coeff {
    const EXACT: bool;
    fn from_rat(r: &Rat) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_rat(&rat_int(n))
    }
    fn abs_f64(&self) -> f64;
    fn is_zero_within(&self, tol: f64) -> bool;
    fn eq_within(&self, other: &Self, tol: f64) -> bool {
        let d = self.clone() - other.clone();
        d.is_zero_within(tol)
    }
    /// Exact scalars expose their rational value; numeric ones return `None`.
    fn to_rat(&self) -> Option<Rat>;
    /// Numeric scalars convert to and from complex doubles.
    fn to_complex(&self) -> Complex64;
    fn from_complex(z: Complex64) -> Option<Self>;
}

impl SuspScalar for Rat {
    const EXACT: bool = true;
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn abs_f64(&self) -> f64 {
        use num::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN).abs()
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn to_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn to_complex(&self) -> Complex64 {
        use num::ToPrimitive;
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_complex(_z: Complex64) -> Option<Self> {
        None
    }
}

impl SuspScalar for Complex64 {
    const EXACT: bool = false;
    fn from_rat(r: &Rat) -> Self {
        use num::ToPrimitive;
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn to_rat(&self) -> Option<Rat> {
        None
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
}

/// An iterated suspension over affine `k`-space.
#[derive(Clone, Debug)]
pub struct Suspension {
    k: usize,
    /// `fs[i]` is the defining polynomial of level `i + 1` in its natural
    /// variable set of size `k + 2 i`.
    fs: Vec<MPoly<Rat>>,
}

impl Suspension {
    /// Validates variable usage and non-constancy modulo the earlier
    /// relations.
    pub fn new(k: usize, fs: Vec<MPoly<Rat>>) -> Result<Suspension> {
        if k == 0 {
            return Err(Error::Domain("the base must have at least one coordinate".into()));
        }
        for (i, f) in fs.iter().enumerate() {
            let expected = k + 2 * i;
            if f.nvars() != expected {
                return Err(Error::RankMismatch {
                    expected,
                    found: f.nvars(),
                });
            }
        }
        let susp = Suspension { k, fs };
        for level in 1..=susp.level() {
            let base = susp.truncate(level - 1);
            let f = susp.fs[level - 1].clone();
            let reduced = base.reduce(&f.extend_vars(base.nvars().max(f.nvars())));
            if reduced.is_constant() {
                return Err(Error::Domain(format!(
                    "defining polynomial of level {level} is constant modulo the earlier relations"
                )));
            }
        }
        Ok(susp)
    }

    pub fn affine_space(k: usize) -> Result<Suspension> {
        Suspension::new(k, vec![])
    }

    pub fn base_dim(&self) -> usize {
        self.k
    }

    pub fn level(&self) -> usize {
        self.fs.len()
    }

    pub fn nvars(&self) -> usize {
        self.k + 2 * self.level()
    }

    pub fn dim(&self) -> usize {
        self.k + self.level()
    }

    pub fn defining_polynomials(&self) -> &[MPoly<Rat>] {
        &self.fs
    }

    /// Ambient index of `u_i` (levels are 1-based).
    pub fn u_index(&self, level: usize) -> usize {
        self.k + 2 * (level - 1)
    }

    pub fn v_index(&self, level: usize) -> usize {
        self.k + 2 * (level - 1) + 1
    }

    /// The suspension with the top `self.level() - keep` levels removed.
    pub fn truncate(&self, keep: usize) -> Suspension {
        Suspension {
            k: self.k,
            fs: self.fs[..keep].to_vec(),
        }
    }

    pub fn base(&self) -> Suspension {
        assert!(self.level() > 0);
        self.truncate(self.level() - 1)
    }

    /// `u_i v_i - f_i` in the full ambient variable set.
    pub fn relation(&self, level: usize) -> MPoly<Rat> {
        let n = self.nvars();
        let u = MPoly::var(n, self.u_index(level));
        let v = MPoly::var(n, self.v_index(level));
        u.mul(&v).sub(&self.fs[level - 1].extend_vars(n))
    }

    pub fn relations(&self) -> Vec<MPoly<Rat>> {
        (1..=self.level()).map(|i| self.relation(i)).collect()
    }

    /// Normal form: replaces every occurrence of `u_i v_i` by `f_i`, top
    /// level first, until no monomial contains a `u_i v_i` pair.
    pub fn reduce(&self, p: &MPoly<Rat>) -> MPoly<Rat> {
        let n = self.nvars();
        let mut cur = p.extend_vars(n.max(p.nvars()));
        'outer: loop {
            for level in (1..=self.level()).rev() {
                let ui = self.u_index(level);
                let vi = self.v_index(level);
                let offending = cur
                    .terms()
                    .find(|(e, _)| e[ui] >= 1 && e[vi] >= 1)
                    .map(|(e, c)| (e.clone(), c.clone()));
                if let Some((e, c)) = offending {
                    let mut rest = e.clone();
                    rest[ui] -= 1;
                    rest[vi] -= 1;
                    let mut replacement = MPoly::zero(n);
                    replacement.add_term(c.clone(), rest);
                    let replacement = replacement.mul(&self.fs[level - 1].extend_vars(n));
                    let mut removed = MPoly::zero(n);
                    removed.add_term(c, e);
                    cur = cur.sub(&removed).add(&replacement);
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    pub fn on_variety<S: SuspScalar>(&self, pt: &[S], tol: f64) -> bool {
        if pt.len() != self.nvars() {
            return false;
        }
        self.relations()
            .iter()
            .all(|r| r.map_coeffs(S::from_rat).eval(pt).is_zero_within(tol))
    }

    /// Jacobian rows of the defining relations over all ambient coordinates.
    pub fn jacobian(&self) -> Vec<Vec<MPoly<Rat>>> {
        let n = self.nvars();
        self.relations()
            .iter()
            .map(|r| (0..n).map(|j| r.partial_derivative(j)).collect())
            .collect()
    }

    /// Rank test of the Jacobian at the point: smooth exactly when the rank
    /// equals the number of relations.
    pub fn smooth_at<S: SuspScalar>(&self, pt: &[S], tol: f64) -> Result<bool> {
        if !self.on_variety(pt, tol.max(1e-7)) {
            return Err(Error::Domain("point does not satisfy the relations".into()));
        }
        let rows: Vec<Vec<S>> = self
            .jacobian()
            .iter()
            .map(|row| row.iter().map(|p| p.map_coeffs(S::from_rat).eval(pt)).collect())
            .collect();
        Ok(approx_rank(rows, tol) == self.level())
    }

    /// Projection to the base: drop the top `u, v` pair.
    pub fn project<S: Clone>(&self, pt: &[S]) -> Vec<S> {
        pt[..self.nvars() - 2].to_vec()
    }

    /// All `u_i v_i` nonzero at the point.
    pub fn is_hyperbolic<S: SuspScalar>(&self, pt: &[S], tol: f64) -> bool {
        (1..=self.level()).all(|i| {
            !pt[self.u_index(i)].is_zero_within(tol) && !pt[self.v_index(i)].is_zero_within(tol)
        })
    }
}

/// Rank with a pivot threshold; exact scalars use exact zero tests.
pub fn approx_rank<S: SuspScalar>(mut rows: Vec<Vec<S>>, tol: f64) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let threshold = if S::EXACT { 0.0 } else { tol };
    let mut rank = 0;
    for col in 0..ncols {
        // partial pivoting by magnitude
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate().skip(rank) {
            let a = row[col].abs_f64();
            if a > threshold && best.map(|(_, b)| a > b).unwrap_or(true) {
                best = Some((i, a));
            }
        }
        let Some((p, _)) = best else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for i in 0..nrows {
            if i != rank {
                let factor = rows[i][col].clone() / pivot.clone();
                for j in col..ncols {
                    let v = rows[i][j].clone() - factor.clone() * rows[rank][j].clone();
                    rows[i][j] = v;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// surface letters: the two one-parameter families on `uv = f(x)`

/// Which coordinate the subgroup preserves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

/// A word letter on the surface: side, the multiplier polynomial `q` with
/// `q(0) = 0` (coefficients low to high), and the parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceLetter<S> {
    pub side: Side,
    pub q: Vec<S>,
    pub t: S,
}

impl<S: SuspScalar> SurfaceLetter<S> {
    pub fn new(side: Side, q: Vec<S>, t: S) -> Result<Self> {
        match q.first() {
            Some(c) if c.is_zero() => Ok(SurfaceLetter { side, q, t }),
            Some(_) => Err(Error::Domain("letter multiplier must vanish at zero".into())),
            None => Ok(SurfaceLetter { side, q, t }),
        }
    }

    pub fn inverse(&self) -> Self {
        SurfaceLetter {
            side: self.side,
            q: self.q.clone(),
            t: -self.t.clone(),
        }
    }
}

/// Univariate coefficients of the defining polynomial of a surface
/// `uv = f(x)` over the affine line.
pub fn surface_f_coeffs<S: SuspScalar>(susp: &Suspension) -> Result<Vec<S>> {
    if susp.base_dim() != 1 || susp.level() != 1 {
        return Err(Error::Domain(
            "surface operations require a level-1 suspension over the affine line".into(),
        ));
    }
    let coeffs = coeffs_in_var(&susp.fs[0], 0);
    Ok(coeffs
        .iter()
        .map(|c| {
            let r = c
                .terms()
                .next()
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Rat::zero);
            S::from_rat(&r)
        })
        .collect())
}

pub fn poly_eval<S: SuspScalar>(coeffs: &[S], x: &S) -> S {
    let mut acc = S::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

fn poly_add<S: SuspScalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(S::zero);
            let y = b.get(i).cloned().unwrap_or_else(S::zero);
            x + y
        })
        .collect()
}

fn poly_mul<S: SuspScalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn poly_scale<S: SuspScalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Taylor coefficients of `f` at `x0`: `f(x0 + y) = sum c_d y^d`.
pub fn taylor_at<S: SuspScalar>(f: &[S], x0: &S) -> Vec<S> {
    let deg = f.len().saturating_sub(1);
    let mut out = vec![S::zero(); deg + 1];
    // c_d = sum_{j >= d} binom(j, d) f_j x0^{j - d}
    for d in 0..=deg {
        let mut acc = S::zero();
        let mut binom: Vec<S> = Vec::new(); // binom(j, d) built incrementally
        let mut xpow = S::one();
        for j in d..=deg {
            let b = if j == d {
                S::one()
            } else {
                // binom(j, d) = binom(j-1, d) * j / (j - d)
                let prev: S = binom.last().cloned().unwrap();
                prev * S::from_int(j as i64) / S::from_int((j - d) as i64)
            };
            binom.push(b.clone());
            acc = acc + b * f[j].clone() * xpow.clone();
            xpow = xpow * x0.clone();
        }
        out[d] = acc;
    }
    out
}

/// The divided difference `(f(x + s(z)) - f(x)) / z` as a polynomial in `z`,
/// where `s(z) = t q(z)` and `q(0) = 0`; exact even at `z = 0`.
fn divided_difference_poly<S: SuspScalar>(f: &[S], x: &S, q: &[S], t: &S) -> Vec<S> {
    let taylor = taylor_at(f, x);
    let s = poly_scale(q, t);
    let mut acc: Vec<S> = vec![];
    let mut spow = vec![S::one()];
    for c in taylor.iter().skip(1) {
        spow = poly_mul(&spow, &s);
        acc = poly_add(&acc, &poly_scale(&spow, c));
    }
    // s(0) = 0, so the constant term vanishes identically; divide by z
    if acc.is_empty() {
        return vec![];
    }
    debug_assert!(acc[0].is_zero_within(1e-12));
    acc.remove(0);
    acc
}

/// Value of the divided difference at a scalar `z`; the numeric mode
/// evaluates the quotient directly when `z` is well away from zero so that
/// an exactly-zero multiplier gives an exactly-zero shift.
fn divided_difference_value<S: SuspScalar>(f: &[S], x: &S, q: &[S], t: &S, z: &S) -> S {
    if !S::EXACT && z.abs_f64() > 1e-8 {
        let s = t.clone() * poly_eval(q, z);
        if s.is_zero_within(0.0) {
            return S::zero();
        }
        let shifted = x.clone() + s;
        return (poly_eval(f, &shifted) - poly_eval(f, x)) / z.clone();
    }
    poly_eval(&divided_difference_poly(f, x, q, t), z)
}

/// Applies a surface letter to a point of `uv = f(x)`.
///
/// Side `U` fixes `u` and maps `(x, u, v)` to
/// `(x + t q(u), u, v + (f(x + t q(u)) - f(x)) / u)`; side `V` is symmetric.
pub fn apply_surface_letter<S: SuspScalar>(
    f: &[S],
    letter: &SurfaceLetter<S>,
    pt: &[S],
) -> Result<Vec<S>> {
    if pt.len() != 3 {
        return Err(Error::RankMismatch {
            expected: 3,
            found: pt.len(),
        });
    }
    let (x, u, v) = (pt[0].clone(), pt[1].clone(), pt[2].clone());
    match letter.side {
        Side::U => {
            let shift = divided_difference_value(f, &x, &letter.q, &letter.t, &u);
            let x1 = x + letter.t.clone() * poly_eval(&letter.q, &u);
            Ok(vec![x1, u, v + shift])
        }
        Side::V => {
            let shift = divided_difference_value(f, &x, &letter.q, &letter.t, &v);
            let x1 = x + letter.t.clone() * poly_eval(&letter.q, &v);
            Ok(vec![x1, u + shift, v])
        }
    }
}

pub fn apply_surface_word<S: SuspScalar>(
    f: &[S],
    word: &[SurfaceLetter<S>],
    pt: &[S],
) -> Result<Vec<S>> {
    let mut cur = pt.to_vec();
    for letter in word {
        cur = apply_surface_letter(f, letter, &cur)?;
    }
    Ok(cur)
}

pub fn invert_surface_word<S: SuspScalar>(word: &[SurfaceLetter<S>]) -> Vec<SurfaceLetter<S>> {
    word.iter().rev().map(|l| l.inverse()).collect()
}

// ---------------------------------------------------------------------------
// surface solver

/// Outcome of one normalization step, re-verified after replay.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub name: &'static str,
    pub letters: usize,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct SurfaceSolveOutcome<S> {
    pub word: Vec<SurfaceLetter<S>>,
    pub steps: Vec<StepReport>,
    /// Max-norm replay residual against the targets (zero in exact mode).
    pub residual: f64,
}

const RETRY_CAP: i64 = 400;

struct SurfacePipeline<'a, S: SuspScalar> {
    f: &'a [S],
    tol: f64,
    states: Vec<Vec<S>>,
    word: Vec<SurfaceLetter<S>>,
    steps: Vec<StepReport>,
}

impl<'a, S: SuspScalar> SurfacePipeline<'a, S> {
    fn nonzero(&self, s: &S) -> bool {
        !s.is_zero_within(self.tol)
    }

    fn distinct(&self, a: &S, b: &S) -> bool {
        !a.eq_within(b, self.tol)
    }

    fn push(&mut self, letter: SurfaceLetter<S>) -> Result<()> {
        for st in &mut self.states {
            *st = apply_surface_letter(self.f, &letter, st)?;
        }
        self.word.push(letter);
        Ok(())
    }

    /// Step 1: make every `v` coordinate nonzero with a single generic shear.
    fn step_clear_v(&mut self) -> Result<()> {
        let before = self.word.len();
        let mut tries = 0;
        while self.states.iter().any(|s| !self.nonzero(&s[2])) {
            tries += 1;
            if tries > RETRY_CAP {
                return Err(Error::Infeasible(
                    "could not move every point off the v = 0 divisor".into(),
                ));
            }
            let letter = SurfaceLetter::new(
                Side::U,
                vec![S::zero(), S::one()],
                S::from_int(tries),
            )?;
            let candidate: Vec<Vec<S>> = self
                .states
                .iter()
                .map(|s| apply_surface_letter(self.f, &letter, s))
                .collect::<Result<_>>()?;
            if candidate.iter().all(|s| !s[2].is_zero_within(self.tol)) {
                self.states = candidate;
                self.word.push(letter);
            }
        }
        let verified = self.states.iter().all(|s| self.nonzero(&s[2]));
        self.steps.push(StepReport {
            name: "clear-v",
            letters: self.word.len() - before,
            verified,
        });
        Ok(())
    }

    fn us_good(&self, states: &[Vec<S>]) -> bool {
        states.iter().all(|s| self.nonzero(&s[1]))
            && states
                .iter()
                .enumerate()
                .all(|(i, a)| states[..i].iter().all(|b| self.distinct(&a[1], &b[1])))
    }

    /// Step 2: make the `u` coordinates nonzero and pairwise distinct.
    fn step_separate_u(&mut self) -> Result<()> {
        let before = self.word.len();
        if !self.us_good(&self.states) {
            let q = self.find_separating_q()?;
            let mut accepted = false;
            for tries in 1..=RETRY_CAP {
                let letter = SurfaceLetter::new(Side::V, q.clone(), S::from_int(tries))?;
                let candidate: Vec<Vec<S>> = self
                    .states
                    .iter()
                    .map(|s| apply_surface_letter(self.f, &letter, s))
                    .collect::<Result<_>>()?;
                if self.us_good(&candidate) {
                    self.states = candidate;
                    self.word.push(letter);
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(Error::Infeasible(
                    "no parameter separated the u coordinates".into(),
                ));
            }
        }
        let verified = self.us_good(&self.states);
        self.steps.push(StepReport {
            name: "separate-u",
            letters: self.word.len() - before,
            verified,
        });
        Ok(())
    }

    /// Searches small-coefficient multipliers until the per-point motion
    /// polynomials in the parameter are pairwise distinct.
    fn find_separating_q(&self) -> Result<Vec<S>> {
        for degree in 1..=7usize {
            let mut pattern = vec![0i64; degree];
            pattern[degree - 1] = 1;
            loop {
                let q: Vec<S> = std::iter::once(S::zero())
                    .chain(pattern.iter().map(|&c| S::from_int(c)))
                    .collect();
                if self.q_separates(&q) {
                    return Ok(q);
                }
                // next small-coefficient pattern with the same degree
                let mut idx = 0;
                loop {
                    if idx == degree {
                        break;
                    }
                    pattern[idx] += 1;
                    if pattern[idx] <= 2 {
                        break;
                    }
                    pattern[idx] = 0;
                    idx += 1;
                }
                if idx == degree || pattern[degree - 1] == 0 {
                    break;
                }
            }
        }
        Err(Error::Infeasible(
            "no small multiplier polynomial separates the points".into(),
        ))
    }

    fn q_separates(&self, q: &[S]) -> bool {
        // q must be nonzero on every v coordinate
        for s in &self.states {
            if poly_eval(q, &s[2]).is_zero_within(self.tol) {
                return false;
            }
        }
        // motion polynomials u_i + (f(x_i + t q(v_i)) - f(x_i)) / v_i in t
        let polys: Vec<Vec<S>> = self
            .states
            .iter()
            .map(|s| {
                let taylor = taylor_at(self.f, &s[0]);
                let qv = poly_eval(q, &s[2]);
                let mut coeffs = vec![s[1].clone()];
                let mut qpow = S::one();
                for c in taylor.iter().skip(1) {
                    qpow = qpow * qv.clone();
                    coeffs.push(c.clone() * qpow.clone() / s[2].clone());
                }
                coeffs
            })
            .collect();
        for i in 0..polys.len() {
            for j in 0..i {
                let n = polys[i].len().max(polys[j].len());
                let mut differ = false;
                for d in 0..n {
                    let a = polys[i].get(d).cloned().unwrap_or_else(S::zero);
                    let b = polys[j].get(d).cloned().unwrap_or_else(S::zero);
                    if !a.eq_within(&b, self.tol) {
                        differ = true;
                        break;
                    }
                }
                if !differ {
                    return false;
                }
            }
        }
        true
    }

    /// Step 3: move every `v` to its standard value with one frozen letter
    /// per point; needs a root of `f(x) = u_i (v0_i - v_i) + f(x_i)`.
    fn step_standard_v(&mut self, standard_v: &[S]) -> Result<()> {
        let before = self.word.len();
        for i in 0..self.states.len() {
            let (x_i, u_i, v_i) = (
                self.states[i][0].clone(),
                self.states[i][1].clone(),
                self.states[i][2].clone(),
            );
            if !self.distinct(&v_i, &standard_v[i]) {
                continue;
            }
            // q(z) = z * prod_{j != i} (z - u_j)
            let mut q = vec![S::zero(), S::one()];
            for (j, s) in self.states.iter().enumerate() {
                if j != i {
                    q = poly_mul(&q, &[-s[1].clone(), S::one()]);
                }
            }
            let c = u_i.clone() * (standard_v[i].clone() - v_i.clone()) + poly_eval(self.f, &x_i);
            let a = root_of_f_equals(self.f, &c, &x_i, self.tol)?;
            let qu = poly_eval(&q, &u_i);
            if qu.is_zero_within(self.tol) {
                return Err(Error::Inconsistency(
                    "separating multiplier vanishes at its own point".into(),
                ));
            }
            let t = (a - x_i) / qu;
            let letter = SurfaceLetter::new(Side::U, q, t)?;
            self.push(letter)?;
        }
        let verified = self
            .states
            .iter()
            .zip(standard_v)
            .all(|(s, v0)| s[2].eq_within(v0, self.tol));
        self.steps.push(StepReport {
            name: "standard-v",
            letters: self.word.len() - before,
            verified,
        });
        Ok(())
    }

    /// Step 4: one interpolating letter moves every `x` to its standard value
    /// (and hence every `u`, by the relation).
    fn step_standard_x(&mut self, standard_x: &[S], standard_v: &[S]) -> Result<()> {
        let before = self.word.len();
        let needs = self
            .states
            .iter()
            .zip(standard_x)
            .any(|(s, x0)| !s[0].eq_within(x0, self.tol));
        if needs {
            // interpolate q(0) = 0, q(v0_i) = x0_i - x_i
            let mut nodes = vec![S::zero()];
            let mut values = vec![S::zero()];
            for (s, (x0, v0)) in self.states.iter().zip(standard_x.iter().zip(standard_v)) {
                nodes.push(v0.clone());
                values.push(x0.clone() - s[0].clone());
            }
            let q = lagrange_interpolate(&nodes, &values)?;
            let letter = SurfaceLetter::new(Side::V, q, S::one())?;
            self.push(letter)?;
        }
        let verified = self
            .states
            .iter()
            .zip(standard_x)
            .all(|(s, x0)| s[0].eq_within(x0, self.tol));
        self.steps.push(StepReport {
            name: "standard-x",
            letters: self.word.len() - before,
            verified,
        });
        Ok(())
    }
}

/// Lagrange interpolation through distinct nodes.
fn lagrange_interpolate<S: SuspScalar>(nodes: &[S], values: &[S]) -> Result<Vec<S>> {
    let n = nodes.len();
    let mut acc: Vec<S> = vec![];
    for i in 0..n {
        let mut basis = vec![S::one()];
        let mut denom = S::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            basis = poly_mul(&basis, &[-nodes[j].clone(), S::one()]);
            let d = nodes[i].clone() - nodes[j].clone();
            if d.is_zero_within(0.0) {
                return Err(Error::Domain("interpolation nodes collide".into()));
            }
            denom = denom * d;
        }
        acc = poly_add(&acc, &poly_scale(&basis, &(values[i].clone() / denom)));
    }
    Ok(acc)
}

/// A root of `f(x) = c`; rational in exact mode (or a field-extension
/// error naming the level), complex nearest to the hint in numeric mode.
fn root_of_f_equals<S: SuspScalar>(f: &[S], c: &S, hint: &S, tol: f64) -> Result<S> {
    let mut poly = f.to_vec();
    if poly.is_empty() {
        poly.push(S::zero());
    }
    poly[0] = poly[0].clone() - c.clone();
    let roots = all_roots(&poly, tol)?;
    if roots.is_empty() {
        return Err(Error::Infeasible("the defining polynomial has no roots at this level".into()));
    }
    let best = roots
        .into_iter()
        .min_by(|a, b| {
            let da = (a.clone() - hint.clone()).abs_f64();
            let db = (b.clone() - hint.clone()).abs_f64();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    Ok(best)
}

/// Roots of a univariate polynomial in the scalar's own field; exact mode
/// returns the rational roots and errors when there are none.
fn all_roots<S: SuspScalar>(poly: &[S], tol: f64) -> Result<Vec<S>> {
    if S::EXACT {
        let rat_poly: Vec<Rat> = poly
            .iter()
            .map(|c| c.to_rat().expect("exact scalars are rationals"))
            .collect();
        let roots = rational_roots(&rat_poly)?;
        if roots.is_empty() {
            return Err(Error::FieldExtension(format!(
                "no rational root of the level equation with constant term {}",
                crate::scalar::format_rat(&rat_poly[0])
            )));
        }
        Ok(roots.iter().map(|r| S::from_rat(r)).collect())
    } else {
        let cpoly: Vec<Complex64> = poly.iter().map(|c| c.to_complex()).collect();
        let roots = complex_roots(&cpoly, tol);
        Ok(roots
            .into_iter()
            .map(|z| S::from_complex(z).expect("numeric scalars are complex doubles"))
            .collect())
    }
}

/// Durand-Kerner iteration with Newton polishing; roots sorted by real then
/// imaginary part for determinism.
pub fn complex_roots(poly: &[Complex64], _tol: f64) -> Vec<Complex64> {
    let mut coeffs = poly.to_vec();
    while coeffs.last().map(|c| c.norm() == 0.0).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return vec![];
    }
    let lead = *coeffs.last().unwrap();
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let d = monic.len() - 1;
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let deriv: Vec<Complex64> = (1..=d)
        .map(|k| monic[k] * Complex64::new(k as f64, 0.0))
        .collect();
    let eval_d = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in deriv.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..600 {
        let mut delta_max = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-14 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let fp = eval_d(*r);
            if fp.norm() < 1e-300 {
                break;
            }
            *r -= eval(*r) / fp;
        }
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots
}

/// Rational roots of a rational-coefficient polynomial (all of them).
pub fn rational_roots(poly: &[Rat]) -> Result<Vec<Rat>> {
    let mut coeffs = poly.to_vec();
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Ok(vec![]);
    }
    // clear denominators
    let mut lcm = Int::one();
    for c in &coeffs {
        lcm = num::Integer::lcm(&lcm, c.denom());
    }
    let ints: Vec<Int> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let deg = ints.len() - 1;
    match deg {
        1 => Ok(vec![Rat::new(-ints[0].clone(), ints[1].clone())]),
        2 => {
            let disc = &ints[1] * &ints[1] - Int::from(4) * &ints[2] * &ints[0];
            let disc_rat = Rat::from_integer(disc);
            match rational_nth_root(&disc_rat, 2) {
                Ok(s) => {
                    let two_a = Rat::from_integer(Int::from(2) * &ints[2]);
                    let b = Rat::from_integer(ints[1].clone());
                    let mut roots = vec![(-&b + &s) / &two_a, (-&b - &s) / &two_a];
                    roots.sort();
                    roots.dedup();
                    Ok(roots)
                }
                Err(_) => Ok(vec![]),
            }
        }
        _ => rational_roots_by_divisors(&ints),
    }
}

fn rational_roots_by_divisors(ints: &[Int]) -> Result<Vec<Rat>> {
    // strip zero roots first
    let mut shift = 0;
    while ints[shift].is_zero() {
        shift += 1;
    }
    let mut roots = Vec::new();
    if shift > 0 {
        roots.push(Rat::zero());
    }
    let body = &ints[shift..];
    if body.len() <= 1 {
        return Ok(roots);
    }
    let a0 = body[0].abs();
    let ad = body.last().unwrap().abs();
    let eval = |r: &Rat| -> Rat {
        let mut acc = Rat::zero();
        for c in body.iter().rev() {
            acc = acc * r + Rat::from_integer(c.clone());
        }
        acc
    };
    for p in divisors(&a0)? {
        for q in divisors(&ad)? {
            for sign in [1i64, -1] {
                let cand = Rat::new(&p * Int::from(sign), q.clone());
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

fn divisors(n: &Int) -> Result<Vec<Int>> {
    use num::ToPrimitive;
    if n.is_zero() {
        return Ok(vec![Int::one()]);
    }
    let n = n
        .to_u128()
        .ok_or_else(|| Error::Capability("coefficient too large to factor".into()))?;
    let mut factors: Vec<(u128, u32)> = Vec::new();
    let mut m = n;
    let mut d = 2u128;
    while d * d <= m && d < 1_000_000 {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        if m < 1_000_000_000_000 || is_prime_u128(m) {
            factors.push((m, 1));
        } else {
            return Err(Error::Capability(
                "constant term too large to factor for root search".into(),
            ));
        }
    }
    let mut divs = vec![1u128];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = 1u128;
            for _ in 0..=e {
                next.push(d * pk);
                if pk > u128::MAX / p {
                    break;
                }
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs.dedup();
    Ok(divs.into_iter().map(Int::from).collect())
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_mul(a: u128, b: u128, m: u128) -> u128 {
    // schoolbook double-and-add to avoid overflow
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn mod_pow(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Solves the tuple-to-tuple problem on the surface `uv = f(x)` by
/// normalizing both tuples to the standard one and splicing the words.
pub fn surface_solve<S: SuspScalar>(
    susp: &Suspension,
    points: &[Vec<S>],
    targets: Option<&[Vec<S>]>,
    tol: f64,
) -> Result<SurfaceSolveOutcome<S>> {
    let f: Vec<S> = surface_f_coeffs(susp)?;
    if f.len() <= 1 {
        return Err(Error::Domain("the defining polynomial must be nonconstant".into()));
    }
    validate_surface_tuple(susp, points, tol)?;
    let m = points.len();
    let standard_v: Vec<S> = (1..=m as i64).map(S::from_int).collect();
    let standard_x: Vec<S> = vec![S::zero(); m];

    let normalize = |pts: &[Vec<S>]| -> Result<(Vec<SurfaceLetter<S>>, Vec<StepReport>)> {
        let mut pipe = SurfacePipeline {
            f: &f,
            tol,
            states: pts.to_vec(),
            word: Vec::new(),
            steps: Vec::new(),
        };
        pipe.step_clear_v()?;
        pipe.step_separate_u()?;
        pipe.step_standard_v(&standard_v)?;
        pipe.step_standard_x(&standard_x, &standard_v)?;
        if pipe.steps.iter().any(|s| !s.verified) {
            return Err(Error::Inconsistency(
                "a normalization step failed its postcondition".into(),
            ));
        }
        Ok((pipe.word, pipe.steps))
    };

    let (mut word, mut steps) = normalize(points)?;
    if let Some(tg) = targets {
        validate_surface_tuple(susp, tg, tol)?;
        if tg.len() != m {
            return Err(Error::Domain("point and target tuples differ in size".into()));
        }
        let (wt, st) = normalize(tg)?;
        word.extend(invert_surface_word(&wt));
        steps.extend(st);
    }

    // replay and measure the residual
    let mut residual = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        let image = apply_surface_word(&f, &word, p)?;
        let want: Vec<S> = match targets {
            Some(tg) => tg[i].clone(),
            None => {
                let x0 = standard_x[i].clone();
                let v0 = standard_v[i].clone();
                let u0 = poly_eval(&f, &x0) / v0.clone();
                vec![x0, u0, v0]
            }
        };
        for (a, b) in image.iter().zip(&want) {
            let d = (a.clone() - b.clone()).abs_f64();
            residual = residual.max(d);
            if S::EXACT && !d.eq(&0.0) {
                return Err(Error::Inconsistency(
                    "exact replay does not reproduce the target".into(),
                ));
            }
        }
    }
    if !S::EXACT && residual > tol {
        return Err(Error::Infeasible(format!(
            "replay residual {residual:.3e} exceeds the tolerance {tol:.3e}"
        )));
    }
    Ok(SurfaceSolveOutcome {
        word,
        steps,
        residual,
    })
}

fn validate_surface_tuple<S: SuspScalar>(
    susp: &Suspension,
    pts: &[Vec<S>],
    tol: f64,
) -> Result<()> {
    if pts.is_empty() {
        return Err(Error::Domain("empty tuple".into()));
    }
    for (i, p) in pts.iter().enumerate() {
        if !susp.on_variety(p, tol.max(1e-7)) {
            return Err(Error::Domain(format!("point {i} is not on the surface")));
        }
        if !susp.smooth_at(p, tol)? {
            return Err(Error::Domain(format!("point {i} is singular")));
        }
        for (j, q) in pts[..i].iter().enumerate() {
            let same = p
                .iter()
                .zip(q)
                .all(|(a, b)| a.eq_within(b, tol));
            if same {
                return Err(Error::Domain(format!("points {j} and {i} coincide")));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// derivation lifting

/// A polynomial derivation of the ambient ring, given by its coordinate
/// images; lifted derivations annihilate every defining relation in the free
/// ring.
#[derive(Clone, Debug)]
pub struct AmbientDerivation {
    images: Vec<MPoly<Rat>>,
    structurally_nilpotent: bool,
}

impl AmbientDerivation {
    /// A derivation on affine space from coordinate images; accepted only
    /// when the dependency graph is acyclic, which makes local nilpotency a
    /// structural fact.
    pub fn triangular(images: Vec<MPoly<Rat>>) -> Result<AmbientDerivation> {
        let n = images.len();
        for img in &images {
            if img.nvars() != n {
                return Err(Error::RankMismatch {
                    expected: n,
                    found: img.nvars(),
                });
            }
        }
        // Kahn's algorithm on "i depends on j" edges
        let deps: Vec<Vec<usize>> = images.iter().map(|p| p.support_vars()).collect();
        let mut removed = vec![false; n];
        loop {
            let next = (0..n)
                .find(|&i| !removed[i] && deps[i].iter().all(|&j| removed[j]));
            match next {
                Some(i) => removed[i] = true,
                None => break,
            }
        }
        if removed.iter().all(|&r| r) {
            Ok(AmbientDerivation {
                images,
                structurally_nilpotent: true,
            })
        } else {
            Err(Error::Domain(
                "derivation images have a cyclic dependency; local nilpotency is not structurally decidable".into(),
            ))
        }
    }

    pub fn coordinate(nvars: usize, i: usize) -> AmbientDerivation {
        let mut images = vec![MPoly::zero(nvars); nvars];
        images[i] = MPoly::constant(nvars, Rat::one());
        AmbientDerivation {
            images,
            structurally_nilpotent: true,
        }
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[MPoly<Rat>] {
        &self.images
    }

    /// Applies the derivation to a polynomial via the chain rule.
    pub fn apply(&self, p: &MPoly<Rat>) -> MPoly<Rat> {
        let n = self.nvars();
        let p = p.extend_vars(n);
        let mut acc = MPoly::zero(n);
        for i in 0..n {
            let d = p.partial_derivative(i);
            if !d.is_zero() {
                acc = acc.add(&d.mul(&self.images[i]));
            }
        }
        acc
    }

    /// The image point under the exponential of `t` times the derivation:
    /// coordinatewise terminating series.
    pub fn exp_at(&self, t: &Rat, pt: &[Rat]) -> Result<Vec<Rat>> {
        let n = self.nvars();
        if pt.len() != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: pt.len(),
            });
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut term = MPoly::var(n, i);
            let mut acc = term.eval(pt);
            let mut tk = Rat::one();
            let mut fact = Rat::one();
            let mut k = 0usize;
            loop {
                term = self.apply(&term);
                if term.is_zero() {
                    break;
                }
                k += 1;
                if k > 64 {
                    return Err(Error::Inconsistency(
                        "derivation series did not terminate; the data is not locally nilpotent"
                            .into(),
                    ));
                }
                tk *= t;
                fact *= Rat::from_integer(Int::from(k as i64));
                acc += &tk / &fact * term.eval(pt);
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// A lifted locally nilpotent derivation on a suspension.
#[derive(Clone, Debug)]
pub struct SuspLnd {
    pub side: Side,
    pub derivation: AmbientDerivation,
}

/// Lifts a base derivation to the suspension `uv = f` over it.
///
/// For the `V` side the images are `x -> q(v) d(x)`, `u -> (q(v)/v) d(f)`,
/// `v -> 0`; the `U` side swaps the roles of `u` and `v`. Requires
/// `q(0) = 0`, a structurally nilpotent base derivation, and verifies that
/// the lift annihilates every relation identically.
pub fn lift_lnd(
    base: &Suspension,
    delta0: &AmbientDerivation,
    f: &MPoly<Rat>,
    q: &[Rat],
    side: Side,
) -> Result<SuspLnd> {
    let nb = base.nvars();
    if delta0.nvars() != nb {
        return Err(Error::RankMismatch {
            expected: nb,
            found: delta0.nvars(),
        });
    }
    if f.nvars() != nb {
        return Err(Error::RankMismatch {
            expected: nb,
            found: f.nvars(),
        });
    }
    if !delta0.structurally_nilpotent {
        return Err(Error::Domain(
            "base derivation is not structurally locally nilpotent".into(),
        ));
    }
    match q.first() {
        Some(c) if !c.is_zero() => {
            return Err(Error::Domain("lift multiplier must vanish at zero".into()))
        }
        None => return Err(Error::Domain("lift multiplier is the zero polynomial".into())),
        _ => {}
    }
    let n = nb + 2;
    let (u_idx, v_idx) = (nb, nb + 1);
    let fixed = match side {
        Side::V => v_idx,
        Side::U => u_idx,
    };
    let moved = match side {
        Side::V => u_idx,
        Side::U => v_idx,
    };
    // q(w) and q(w)/w as ambient polynomials in the fixed coordinate w
    let mut q_poly = MPoly::zero(n);
    let mut q_over_w = MPoly::zero(n);
    for (k, c) in q.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut e = vec![0u16; n];
        e[fixed] = k as u16;
        q_poly.add_term(c.clone(), e.clone());
        if k >= 1 {
            let mut e1 = vec![0u16; n];
            e1[fixed] = (k - 1) as u16;
            q_over_w.add_term(c.clone(), e1);
        }
    }
    let df = delta0.apply(f).extend_vars(n);
    let mut images = Vec::with_capacity(n);
    for i in 0..nb {
        images.push(q_poly.mul(&delta0.images()[i].extend_vars(n)));
    }
    // placeholder slots for u, v in ambient order
    images.push(MPoly::zero(n));
    images.push(MPoly::zero(n));
    images[moved] = q_over_w.mul(&df);
    images[fixed] = MPoly::zero(n);
    let lifted = AmbientDerivation {
        images,
        structurally_nilpotent: true,
    };
    // by construction the lift annihilates u v - f identically; verify, and
    // verify it still annihilates the base relations
    let lifted_susp_rel = {
        let u = MPoly::var(n, u_idx);
        let v = MPoly::var(n, v_idx);
        u.mul(&v).sub(&f.extend_vars(n))
    };
    if !lifted.apply(&lifted_susp_rel).is_zero() {
        return Err(Error::Inconsistency(
            "lifted derivation does not annihilate the new relation".into(),
        ));
    }
    for rel in base.relations() {
        if !lifted.apply(&rel.extend_vars(n)).is_zero() {
            return Err(Error::Inconsistency(
                "lifted derivation does not annihilate an earlier relation".into(),
            ));
        }
    }
    Ok(SuspLnd {
        side,
        derivation: lifted,
    })
}

// ---------------------------------------------------------------------------
// flexibility

#[derive(Clone, Debug)]
pub struct SuspFlexCertificate {
    pub matrix: Vec<Vec<Rat>>,
    pub rank: usize,
    pub dim: usize,
}

/// Tangent-spanning certificate at a hyperbolic point: the base family is
/// lifted on the `V` side, one derivation with nonvanishing image of the
/// defining polynomial is lifted on the `U` side, and the velocity matrix
/// must reach the variety's dimension.
pub fn flexibility_matrix(susp: &Suspension, pt: &[Rat]) -> Result<SuspFlexCertificate> {
    if pt.len() != susp.nvars() {
        return Err(Error::RankMismatch {
            expected: susp.nvars(),
            found: pt.len(),
        });
    }
    if !susp.on_variety(pt, 0.0) {
        return Err(Error::Domain("point is not on the suspension".into()));
    }
    if !susp.is_hyperbolic(pt, 0.0) {
        return Err(Error::Domain(
            "flexibility certificates require a hyperbolic point".into(),
        ));
    }
    let family = flex_family(susp, pt)?;
    let matrix: Vec<Vec<Rat>> = family
        .iter()
        .map(|d| d.images().iter().map(|p| p.eval(pt)).collect())
        .collect();
    let rank = crate::linalg::rat_rank(&matrix);
    if rank != susp.dim() {
        return Err(Error::Inconsistency(format!(
            "velocity matrix rank {rank} below the dimension {}",
            susp.dim()
        )));
    }
    Ok(SuspFlexCertificate {
        matrix,
        rank,
        dim: susp.dim(),
    })
}

fn flex_family(susp: &Suspension, pt: &[Rat]) -> Result<Vec<AmbientDerivation>> {
    if susp.level() == 0 {
        return Ok((0..susp.base_dim())
            .map(|i| AmbientDerivation::coordinate(susp.base_dim(), i))
            .collect());
    }
    let base = susp.base();
    let base_pt = susp.project(pt);
    let base_family = flex_family(&base, &base_pt)?;
    let f = susp.fs.last().unwrap().extend_vars(base.nvars());
    let q = vec![Rat::zero(), Rat::one()];
    let mut out = Vec::new();
    let mut u_side_source = None;
    for d in &base_family {
        if u_side_source.is_none() && !d.apply(&f).eval(&base_pt).is_zero() {
            u_side_source = Some(d.clone());
        }
        out.push(lift_lnd(&base, d, &f, &q, Side::V)?.derivation);
    }
    let chosen = u_side_source.ok_or_else(|| {
        Error::Domain(
            "no supplied base derivation moves the defining polynomial at the projected point"
                .into(),
        )
    })?;
    out.push(lift_lnd(&base, &chosen, &f, &q, Side::U)?.derivation);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::rat;

    fn rpt(coords: &[i64]) -> Vec<Rat> {
        coords.iter().map(|&c| rat_int(c)).collect()
    }

    #[test]
    fn build_and_reject() {
        let s = catalog::suspension_x2();
        assert_eq!(s.nvars(), 3);
        assert_eq!(s.dim(), 2);
        // constant f rejected
        let c = MPoly::constant(1, rat_int(5));
        assert!(matches!(Suspension::new(1, vec![c]).err(), Some(Error::Domain(_))));
        // iterated build: two levels over the line
        let f2 = crate::poly::parse_poly("u1 + v1 + x0", &["x0", "u1", "v1"]).unwrap();
        let two = Suspension::new(1, vec![catalog::suspension_x2().fs[0].clone(), f2]).unwrap();
        assert_eq!(two.level(), 2);
        assert_eq!(two.nvars(), 5);
        // constant modulo the relations: u1 v1 - x0^2 + 7 reduces to 7
        let f2c = crate::poly::parse_poly("u1 v1 - x0^2 + 7", &["x0", "u1", "v1"]).unwrap();
        assert!(Suspension::new(1, vec![catalog::suspension_x2().fs[0].clone(), f2c]).is_err());
    }

    #[test]
    fn smoothness_on_the_quadric_cone() {
        let s = catalog::suspension_x2();
        assert!(!s.smooth_at(&rpt(&[0, 0, 0]), 0.0).unwrap(), "cone vertex");
        assert!(s.smooth_at(&rpt(&[1, 1, 1]), 0.0).unwrap());
        // u != 0 over any base point is smooth
        assert!(s.smooth_at(&rpt(&[0, 5, 0]), 0.0).unwrap());
        assert!(s.smooth_at(&rpt(&[0, 0, 5]), 0.0).unwrap());
    }

    #[test]
    fn letters_preserve_the_relation() {
        let s = catalog::suspension_x2();
        let f: Vec<Rat> = surface_f_coeffs(&s).unwrap();
        // q = z, t = 1 on (1, 1, 1): lands on (2, 1, 4) and 1 * 4 = f(2)
        let letter =
            SurfaceLetter::new(Side::U, vec![Rat::zero(), Rat::one()], Rat::one()).unwrap();
        let image = apply_surface_letter(&f, &letter, &rpt(&[1, 1, 1])).unwrap();
        assert_eq!(image, rpt(&[2, 1, 4]));
        assert!(s.on_variety(&image, 0.0));

        // t = 0 is the identity
        let id = SurfaceLetter::new(Side::U, vec![Rat::zero(), Rat::one()], Rat::zero()).unwrap();
        assert_eq!(apply_surface_letter(&f, &id, &rpt(&[1, 1, 1])).unwrap(), rpt(&[1, 1, 1]));

        // u = 0: x unchanged, v shifts by the polynomial divided difference
        let p = rpt(&[3, 0, 3]); // on uv = x^2: 0*3 = 9? no; use f(3)=9, u=0 requires x^2=0
        assert!(!s.on_variety(&p, 0.0));
        let p = rpt(&[0, 0, 5]);
        let image = apply_surface_letter(&f, &letter, &p).unwrap();
        assert_eq!(image[0], p[0], "q(0) = 0 keeps x");
        assert!(s.on_variety(&image, 0.0));

        // group law in t on random points
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for susp in catalog::suspension_catalog() {
            let fc: Vec<Rat> = surface_f_coeffs(&susp).unwrap();
            for _ in 0..25 {
                let x = rat(rng.gen_range(-6..6), rng.gen_range(1..4));
                let u = rat(rng.gen_range(1..8), 1);
                let v = poly_eval(&fc, &x) / &u;
                let pt = vec![x, u, v];
                assert!(susp.on_variety(&pt, 0.0));
                let s1 = rat(rng.gen_range(-5..5), 1);
                let s2 = rat(rng.gen_range(-5..5), 1);
                for side in [Side::U, Side::V] {
                    let q = vec![Rat::zero(), rat_int(1), rat_int(2)];
                    let a = apply_surface_letter(
                        &fc,
                        &SurfaceLetter::new(side, q.clone(), s1.clone()).unwrap(),
                        &pt,
                    )
                    .unwrap();
                    let b = apply_surface_letter(
                        &fc,
                        &SurfaceLetter::new(side, q.clone(), s2.clone()).unwrap(),
                        &a,
                    )
                    .unwrap();
                    let c = apply_surface_letter(
                        &fc,
                        &SurfaceLetter::new(side, q, &s1 + &s2).unwrap(),
                        &pt,
                    )
                    .unwrap();
                    assert_eq!(b, c, "one-parameter group law");
                    assert!(susp.on_variety(&b, 0.0));
                }
            }
        }
    }

    #[test]
    fn lift_identities() {
        // base line, d/dx, f = x^2, q = v: x -> v, u -> 2x, v -> 0
        let base = Suspension::affine_space(1).unwrap();
        let ddx = AmbientDerivation::coordinate(1, 0);
        let f = crate::poly::parse_poly("x0^2", &["x0"]).unwrap();
        let q = vec![Rat::zero(), Rat::one()];
        let lift = lift_lnd(&base, &ddx, &f, &q, Side::V).unwrap();
        let imgs = lift.derivation.images();
        assert_eq!(imgs[0], MPoly::var(3, 2));
        let two_x = MPoly::var(3, 0).scale(&rat_int(2));
        assert_eq!(imgs[1], two_x);
        assert!(imgs[2].is_zero());

        // a base derivation killing f lifts to pure base motion
        let ddx_kills = AmbientDerivation::triangular(vec![MPoly::zero(2), MPoly::var(2, 0)])
            .unwrap();
        let g = crate::poly::parse_poly("x0", &["x0", "x1"]).unwrap();
        let lifted = lift_lnd(
            &Suspension::affine_space(2).unwrap(),
            &ddx_kills,
            &g,
            &q,
            Side::V,
        )
        .unwrap();
        assert!(lifted.derivation.images()[2].is_zero(), "u image vanishes");

        // q(0) != 0 rejected
        assert!(lift_lnd(&base, &ddx, &f, &[Rat::one()], Side::V).is_err());

        // the lift velocity matches the letter velocity at t = 0 on points
        let s = catalog::suspension_x2();
        let fc: Vec<Rat> = surface_f_coeffs(&s).unwrap();
        let p = rpt(&[2, 1, 4]);
        let eps = rat(1, 1000);
        let letter = SurfaceLetter::new(Side::V, vec![Rat::zero(), Rat::one()], eps.clone())
            .unwrap();
        let moved = apply_surface_letter(&fc, &letter, &p).unwrap();
        let velocity: Vec<Rat> = moved
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b) / &eps)
            .collect();
        let imgs = lift.derivation.images();
        let lin: Vec<Rat> = imgs.iter().map(|img| img.eval(&p)).collect();
        // first-order agreement: velocity = images + O(eps)
        for (v, l) in velocity.iter().zip(&lin) {
            let diff = v - l;
            assert!(diff.abs_f64() < 1e-2, "velocity {v:?} vs image {l:?}");
        }
    }

    #[test]
    fn exponentials_of_lifts() {
        let base = Suspension::affine_space(1).unwrap();
        let ddx = AmbientDerivation::coordinate(1, 0);
        let f = crate::poly::parse_poly("x0^2", &["x0"]).unwrap();
        let q = vec![Rat::zero(), Rat::one()];
        let lift = lift_lnd(&base, &ddx, &f, &q, Side::V).unwrap();
        let s = catalog::suspension_x2();
        let p = rpt(&[1, 1, 1]);
        let image = lift.derivation.exp_at(&rat_int(1), &p).unwrap();
        assert!(s.on_variety(&image, 0.0));
        assert_eq!(image[2], p[2], "the fixed side is preserved");
        // matches the letter family on the surface
        let fc: Vec<Rat> = surface_f_coeffs(&s).unwrap();
        let letter = SurfaceLetter::new(Side::V, vec![Rat::zero(), Rat::one()], rat_int(1))
            .unwrap();
        assert_eq!(image, apply_surface_letter(&fc, &letter, &p).unwrap());
    }

    #[test]
    fn flexibility_certificates() {
        let s = catalog::suspension_x2();
        let cert = flexibility_matrix(&s, &rpt(&[1, 1, 1])).unwrap();
        assert_eq!(cert.rank, 2);
        assert_eq!(cert.matrix.len(), 2);
        assert_eq!(
            cert.matrix,
            vec![
                vec![rat_int(1), rat_int(2), rat_int(0)],
                vec![rat_int(1), rat_int(0), rat_int(2)],
            ]
        );
        // non-hyperbolic points rejected
        assert!(flexibility_matrix(&s, &rpt(&[0, 0, 5])).is_err());

        // iterated level-2 certificate has rank 3
        let f2 = crate::poly::parse_poly("u1 + v1 + x0", &["x0", "u1", "v1"]).unwrap();
        let two = Suspension::new(1, vec![s.fs[0].clone(), f2]).unwrap();
        // point: x=1, u1=1, v1=1, u2 v2 = u1+v1+x0 = 3: (3, 1)
        let p = rpt(&[1, 1, 1, 3, 1]);
        assert!(two.on_variety(&p, 0.0));
        let cert = flexibility_matrix(&two, &p).unwrap();
        assert_eq!(cert.rank, 3);
    }

    #[test]
    fn exact_surface_solve_round_trip() {
        let s = catalog::suspension_x2_minus_x();
        let f: Vec<Rat> = surface_f_coeffs(&s).unwrap();
        // engineered: u_i = f(r_i) / i for rational step-3 roots r_i, with
        // the u values distinct so the earlier steps are no-ops
        let rs = [rat_int(2), rat_int(-1), rat_int(4)];
        let xs = [rat_int(3), rat_int(2), rat_int(-2)];
        let mut points = Vec::new();
        for (i, (r, x)) in rs.iter().zip(&xs).enumerate() {
            let u = poly_eval(&f, r) / rat_int(i as i64 + 1);
            let v = poly_eval(&f, x) / &u;
            points.push(vec![x.clone(), u, v]);
        }
        let outcome = surface_solve(&s, &points, None, 0.0).unwrap();
        assert_eq!(outcome.residual, 0.0);
        for p in &points {
            let image = apply_surface_word(&f, &outcome.word, p).unwrap();
            assert!(s.on_variety(&image, 0.0));
        }
        // identity instance: points equal targets
        let outcome = surface_solve(&s, &points, Some(&points), 0.0).unwrap();
        for p in &points {
            let image = apply_surface_word(&f, &outcome.word, p).unwrap();
            assert_eq!(&image, p);
        }
    }

    #[test]
    fn numeric_surface_solve() {
        let s = catalog::suspension_x3_plus_x();
        let tol = 1e-9;
        let mk = |x: f64, u: f64| -> Vec<Complex64> {
            let xc = Complex64::new(x, 0.0);
            let uc = Complex64::new(u, 0.0);
            let fx = xc * xc * xc + xc;
            vec![xc, uc, fx / uc]
        };
        let points = vec![mk(1.5, 2.0), mk(-0.5, 1.0)];
        let targets = vec![mk(2.0, -1.0), mk(0.5, 3.0)];
        let outcome = surface_solve(&s, &points, Some(&targets), tol).unwrap();
        assert!(outcome.residual < tol, "residual {}", outcome.residual);
    }

    #[test]
    fn rational_root_finding() {
        let p = [rat_int(-6), rat_int(1), rat_int(1)]; // x^2 + x - 6
        assert_eq!(rational_roots(&p).unwrap(), vec![rat_int(-3), rat_int(2)]);
        let p = [rat_int(2), rat_int(0), rat_int(1)]; // x^2 + 2: none
        assert!(rational_roots(&p).unwrap().is_empty());
        let p = [rat_int(0), rat_int(-1), rat_int(0), rat_int(1)]; // x^3 - x
        assert_eq!(
            rational_roots(&p).unwrap(),
            vec![rat_int(-1), rat_int(0), rat_int(1)]
        );
    }

    #[test]
    fn complex_root_finding() {
        let one = Complex64::new(1.0, 0.0);
        // x^3 + x = x(x - i)(x + i)
        let p = [Complex64::new(0.0, 0.0), one, Complex64::new(0.0, 0.0), one];
        let roots = complex_roots(&p, 1e-9);
        assert_eq!(roots.len(), 3);
        for r in &roots {
            let val = ((r * r) + one) * r;
            assert!(val.norm() < 1e-9);
        }
    }
}
