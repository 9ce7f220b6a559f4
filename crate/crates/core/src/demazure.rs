//! Demazure roots of the defining cone and the automorphisms they generate.
//!
//! A root is a character pairing to -1 against exactly one ray generator and
//! nonnegatively against all others. Each root `e` gives a locally nilpotent
//! derivation of the coordinate ring acting on characters by
//! `chi^m -> <rho_e, m> chi^{m+e}`; its exponential is a one-parameter
//! unipotent automorphism group normalized by the torus, and the distinguished
//! ray also gives a one-parameter torus action scaling `chi^m` by
//! `t^{<rho_e, m>}`. This module enumerates roots, exponentiates generator
//! applications on points, classifies which orbit closures each group
//! preserves, and traces the pair of torus orbits covering a unipotent orbit.

use num::{One, Signed, Zero};

use crate::lattice::{pairing, LatticeVector, Space};
use crate::linalg::{int_to_i64, IMat};
use crate::scalar::{rat_pow, Int, Rat};
use crate::toric::{Point, ToricVariety};
use crate::{Error, Result};

/// A Demazure root: the character `e` together with the index of its
/// distinguished ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    e: LatticeVector,
    ray: usize,
}

impl Root {
    /// Validates the defining inequalities and locates the distinguished ray.
    pub fn new(x: &ToricVariety, e: LatticeVector) -> Result<Root> {
        if e.space() != Space::M || e.rank() != x.rank() {
            return Err(Error::SpaceMismatch);
        }
        let mut distinguished = None;
        for (i, rho) in x.cone().rays().iter().enumerate() {
            let p = pairing(rho, &e)?;
            if p == Int::from(-1) {
                if distinguished.is_some() {
                    return Err(Error::Domain(format!("{e:?} is not a root: two negative pairings")));
                }
                distinguished = Some(i);
            } else if p.is_negative() {
                return Err(Error::Domain(format!(
                    "{e:?} is not a root: pairing {p} with ray {i}"
                )));
            }
        }
        match distinguished {
            Some(ray) => Ok(Root { e, ray }),
            None => Err(Error::Domain(format!("{e:?} pairs nonnegatively with every ray"))),
        }
    }

    pub fn exponent(&self) -> &LatticeVector {
        &self.e
    }

    /// Index of the distinguished ray in the variety's cone.
    pub fn ray_index(&self) -> usize {
        self.ray
    }
}

/// All roots with sup-norm at most `bound`, sorted by distinguished ray and
/// then lexicographically. The full root set is infinite; the box is the
/// enumeration window.
pub fn enumerate_roots(x: &ToricVariety, bound: i64) -> Result<Vec<Root>> {
    if bound < 1 {
        return Err(Error::Domain("enumeration bound must be at least 1".into()));
    }
    let n = x.rank();
    let mut out = Vec::new();
    let mut coords = vec![-bound; n];
    'scan: loop {
        let e = LatticeVector::from_i64(Space::M, &coords);
        if let Ok(root) = Root::new(x, e) {
            out.push(root);
        }
        for i in 0..n {
            coords[i] += 1;
            if coords[i] <= bound {
                continue 'scan;
            }
            coords[i] = -bound;
        }
        break;
    }
    out.sort_by(|a, b| (a.ray, a.e.coords()).cmp(&(b.ray, b.e.coords())));
    Ok(out)
}

/// Groups enumerated roots into their ray classes.
pub fn root_classes(x: &ToricVariety, bound: i64) -> Result<Vec<(usize, Vec<Root>)>> {
    let roots = enumerate_roots(x, bound)?;
    let mut classes: Vec<(usize, Vec<Root>)> =
        (0..x.cone().rays().len()).map(|i| (i, Vec::new())).collect();
    for r in roots {
        classes[r.ray].1.push(r);
    }
    Ok(classes)
}

/// A root with the given distinguished ray, built constructively: solve the
/// pairing-minus-one equation, then add the smallest multiple of an interior
/// point of the orthogonal facet that makes all other pairings nonnegative.
pub fn root_for_ray(x: &ToricVariety, ray: usize) -> Result<Root> {
    let rays = x.cone().rays();
    if ray >= rays.len() {
        return Err(Error::Domain(format!("no ray with index {ray}")));
    }
    let rho = &rays[ray];
    let a = IMat::from_rows(vec![rho.coords().to_vec()]);
    let e0 = a
        .solve(&[Int::from(-1)])
        .expect("a primitive vector pairs to -1 with some character");
    let e0 = LatticeVector::new(Space::M, e0);
    // interior point of the facet orthogonal to the ray: the sum of the
    // dual-cone rays lying on that facet
    let mut v0 = LatticeVector::zero(Space::M, x.rank());
    for u in x.dual_cone().rays() {
        if pairing(rho, u)? == Int::zero() {
            v0 = v0.add(u);
        }
    }
    let mut k = Int::zero();
    loop {
        let e = e0.add_scaled(&v0, &k);
        let ok = rays
            .iter()
            .enumerate()
            .all(|(j, r)| j == ray || pairing(r, &e).unwrap() >= Int::zero());
        if ok {
            return Root::new(x, e);
        }
        if v0.is_zero() {
            return Err(Error::Inconsistency(
                "facet interior point is zero but pairings stay negative".into(),
            ));
        }
        k += 1;
    }
}

/// One symbolic derivation step: the coefficient `<rho_e, m>` and the shifted
/// exponent `m + e`.
pub fn lnd_apply(x: &ToricVariety, root: &Root, m: &LatticeVector) -> Result<(Int, LatticeVector)> {
    if !x.dual_cone().contains(m) {
        return Err(Error::Domain(format!("{m:?} is outside the dual cone")));
    }
    let c = pairing(&x.cone().rays()[root.ray], m)?;
    Ok((c, m.add(&root.e)))
}

/// An element of the derivation's kernel: a finite rational combination of
/// characters orthogonal to the distinguished ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelElement {
    ray: usize,
    terms: Vec<(Rat, LatticeVector)>,
}

impl KernelElement {
    /// The constant function one.
    pub fn one(x: &ToricVariety, root: &Root) -> KernelElement {
        KernelElement {
            ray: root.ray,
            terms: vec![(Rat::one(), LatticeVector::zero(Space::M, x.rank()))],
        }
    }

    pub fn new(
        x: &ToricVariety,
        root: &Root,
        terms: Vec<(Rat, LatticeVector)>,
    ) -> Result<KernelElement> {
        for (_, m) in &terms {
            if !x.dual_cone().contains(m) {
                return Err(Error::Domain(format!("{m:?} is outside the dual cone")));
            }
            if pairing(&x.cone().rays()[root.ray], m)? != Int::zero() {
                return Err(Error::Domain(format!(
                    "{m:?} is not orthogonal to the distinguished ray"
                )));
            }
        }
        Ok(KernelElement::collect(root.ray, terms))
    }

    fn collect(ray: usize, terms: Vec<(Rat, LatticeVector)>) -> KernelElement {
        let mut merged: Vec<(Rat, LatticeVector)> = Vec::new();
        for (c, m) in terms {
            if c.is_zero() {
                continue;
            }
            if let Some(slot) = merged.iter_mut().find(|(_, mm)| mm == &m) {
                slot.0 += c;
            } else {
                merged.push((c, m));
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        merged.sort_by(|a, b| a.1.cmp(&b.1));
        KernelElement { ray, terms: merged }
    }

    pub fn terms(&self) -> &[(Rat, LatticeVector)] {
        &self.terms
    }

    pub fn ray_index(&self) -> usize {
        self.ray
    }

    pub fn is_constant_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_zero()
    }

    /// Product of kernel elements (the kernel is a subalgebra).
    pub fn mul(&self, other: &KernelElement) -> KernelElement {
        debug_assert_eq!(self.ray, other.ray);
        let mut terms = Vec::new();
        for (a, m) in &self.terms {
            for (b, mm) in &other.terms {
                terms.push((a * b, m.add(mm)));
            }
        }
        KernelElement::collect(self.ray, terms)
    }

    pub fn evaluate(&self, x: &ToricVariety, p: &Point) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (c, m) in &self.terms {
            acc += c * x.eval_char(p, m)?;
        }
        Ok(acc)
    }
}

/// A replayable word letter: the exponential of `t` times the kernel
/// multiple `q` of the root derivation. The inverse is the same letter with
/// parameter `-t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorApplication {
    pub root: Root,
    pub q: KernelElement,
    pub t: Rat,
}

impl GeneratorApplication {
    pub fn plain(x: &ToricVariety, root: Root, t: Rat) -> GeneratorApplication {
        let q = KernelElement::one(x, &root);
        GeneratorApplication { root, q, t }
    }

    pub fn with_kernel(root: Root, q: KernelElement, t: Rat) -> Result<GeneratorApplication> {
        if q.ray != root.ray {
            return Err(Error::Domain(
                "kernel multiplier belongs to a different root class".into(),
            ));
        }
        Ok(GeneratorApplication { root, q, t })
    }

    pub fn inverse(&self) -> GeneratorApplication {
        GeneratorApplication {
            root: self.root.clone(),
            q: self.q.clone(),
            t: -self.t.clone(),
        }
    }
}

/// Applies the exponential of `t * q * derivation` to a point.
///
/// Because `q` lies in the kernel, the action on the point equals the plain
/// exponential with effective parameter `t * q(p)`; each Hilbert value is the
/// finite binomial series, and the point is rebuilt from the value vector.
pub fn exp_action(x: &ToricVariety, g: &GeneratorApplication, p: &Point) -> Result<Point> {
    let effective = &g.t * g.q.evaluate(x, p)?;
    exp_plain(x, &g.root, &effective, p)
}

fn exp_plain(x: &ToricVariety, root: &Root, s: &Rat, p: &Point) -> Result<Point> {
    let mut values = Vec::with_capacity(x.hilbert_basis().len());
    for h in x.hilbert_basis() {
        values.push(exp_series_value(x, root, s, p, h)?);
    }
    x.point_from_hilbert_values(&values)
}

/// The truncated exponential series of one character at a point:
/// sum over k of binom(K, k) s^k chi^{h + k e}(p) with K the ray pairing.
fn exp_series_value(
    x: &ToricVariety,
    root: &Root,
    s: &Rat,
    p: &Point,
    h: &LatticeVector,
) -> Result<Rat> {
    let kmax = int_to_i64(&pairing(&x.cone().rays()[root.ray], h)?)?;
    debug_assert!(kmax >= 0, "characters of the dual cone pair nonnegatively");
    let mut acc = x.eval_char(p, h)?;
    let mut binom = Rat::one();
    let mut power = Rat::one();
    let mut shifted = h.clone();
    for k in 1..=kmax {
        binom *= Rat::new(Int::from(kmax - k + 1), Int::from(k));
        power *= s;
        shifted = shifted.add(&root.e);
        let v = x.eval_char(p, &shifted)?;
        if !v.is_zero() {
            acc += &binom * &power * v;
        }
    }
    Ok(acc)
}

/// The one-parameter torus action attached to the root's ray: scales the
/// character by `t^{<rho_e, m>}`. Requires `t != 0`; the support face is
/// unchanged.
pub fn re_action(x: &ToricVariety, root: &Root, t: &Rat, p: &Point) -> Result<Point> {
    if t.is_zero() {
        return Err(Error::Domain("torus parameter must be nonzero".into()));
    }
    let of = x.orbit_face(p.face);
    let rho = &x.cone().rays()[root.ray];
    let mut chi = Vec::with_capacity(p.chi.len());
    for (b, c) in of.basis.iter().zip(&p.chi) {
        let w = int_to_i64(&pairing(rho, b)?)?;
        chi.push(rat_pow(t, w)? * c);
    }
    Ok(Point { face: p.face, chi })
}

/// Witness data for the orbit-pair connectedness criterion.
#[derive(Clone, Debug)]
pub struct ConnectionWitness {
    pub connected: bool,
    /// Pairings of the root against the rays of the smaller orbit's dual face.
    pub pairings: Vec<(usize, Int)>,
    /// Rays of the dual face where the root vanishes.
    pub zero_set: Vec<usize>,
    pub expected_zero_set: Vec<usize>,
}

/// Connectedness criterion for an incident orbit pair `(face1, face2)` with
/// `face2` contained in `face1`: writing `delta_i` for the dual faces, the
/// pair is covered by a single unipotent orbit exactly when the root is
/// nonpositive on `delta_2` and `delta_1` is the facet of `delta_2` cut out
/// by the root's vanishing.
pub fn connected_pair(
    x: &ToricVariety,
    root: &Root,
    face1: usize,
    face2: usize,
) -> Result<ConnectionWitness> {
    let of1 = x.orbit_face(face1);
    let of2 = x.orbit_face(face2);
    let incident = of2
        .face
        .ray_indices
        .iter()
        .all(|i| of1.face.ray_indices.contains(i));
    if !incident {
        return Err(Error::Domain(
            "orbit pair is not incident: the second face must lie in the first".into(),
        ));
    }
    let delta1 = &of1.dual_face;
    let delta2 = &of2.dual_face;
    let mut pairings = Vec::new();
    let mut zero_set = Vec::new();
    let mut nonpositive = true;
    for &ri in &delta2.ray_indices {
        let p = pairing(&x.cone().rays()[ri], &root.e)?;
        if p.is_positive() {
            nonpositive = false;
        }
        if p.is_zero() {
            zero_set.push(ri);
        }
        pairings.push((ri, p));
    }
    let connected = nonpositive
        && zero_set == delta1.ray_indices
        && delta1.dim + 1 == delta2.dim;
    Ok(ConnectionWitness {
        connected,
        pairings,
        zero_set,
        expected_zero_set: delta1.ray_indices.clone(),
    })
}

/// Whether the orbit closure of the face is stable under the root's
/// unipotent group, decided by the shift criterion `m + e` staying off the
/// face for every off-face lattice point `m` with positive ray pairing.
///
/// The check runs over a finite box; the criterion is determined by ray
/// pairings, which are linear in `m`, so the box of side
/// `max |hilbert coordinate| + |e| + 2` decides it.
pub fn orbit_closure_stable(x: &ToricVariety, root: &Root, face: usize) -> Result<bool> {
    let n = x.rank();
    let mut bound = Int::zero();
    for h in x.hilbert_basis() {
        bound = bound.max(h.sup_norm());
    }
    bound = bound + root.e.sup_norm() + Int::from(2);
    let b = int_to_i64(&bound)?;
    let rho = &x.cone().rays()[root.ray];
    let mut coords = vec![-b; n];
    'scan: loop {
        let m = LatticeVector::from_i64(Space::M, &coords.iter().map(|&c| c).collect::<Vec<_>>());
        if x.dual_cone().contains(&m)
            && !x.face_contains(face, &m)
            && pairing(rho, &m)?.is_positive()
        {
            let shifted = m.add(&root.e);
            let inside = x.dual_cone().contains(&shifted);
            if !inside || x.face_contains(face, &shifted) {
                return Ok(false);
            }
        }
        for i in 0..n {
            coords[i] += 1;
            if coords[i] <= b {
                continue 'scan;
            }
            coords[i] = -b;
        }
        break;
    }
    Ok(true)
}

/// Sufficient condition for stability of the orbit closure under every
/// equivalent root: the distinguished ray is not among the dual face's rays.
pub fn stable_for_class(x: &ToricVariety, root: &Root, face: usize) -> bool {
    !x.orbit_face(face)
        .dual_face
        .ray_indices
        .contains(&root.ray)
}

/// The trace of the unipotent orbit through a point the derivation moves:
/// the value of each Hilbert character along the orbit is a polynomial in the
/// parameter, every nonconstant one is a pure power of `(t - t*)` for one
/// common exceptional parameter `t*`, and the support faces are the generic
/// one and the one at `t*`.
#[derive(Clone, Debug)]
pub struct OrbitTrace {
    /// Face met at every parameter but the exceptional one.
    pub generic_face: usize,
    /// Face met exactly at the exceptional parameter.
    pub special_face: usize,
    /// The exceptional parameter (always rational in exact mode).
    pub t_star: Rat,
    /// Per-Hilbert-character coefficient vectors of the orbit polynomials.
    pub polynomials: Vec<Vec<Rat>>,
}

pub fn trace_orbit(x: &ToricVariety, root: &Root, p: &Point) -> Result<OrbitTrace> {
    let polys = orbit_polynomials(x, root, p)?;
    let moved = polys.iter().any(|c| c.len() > 1);
    if !moved {
        return Err(Error::Domain(
            "the derivation fixes the point; the orbit is a single point".into(),
        ));
    }
    // extract t* from any nonconstant polynomial: a pure power c (t - t*)^d
    // has t* = -a_{d-1} / (d a_d)
    let mut t_star: Option<Rat> = None;
    for c in &polys {
        if c.len() > 1 {
            let d = c.len() - 1;
            let lead = &c[d];
            let sub = &c[d - 1];
            let cand = -(sub / (Rat::from_integer(Int::from(d as i64)) * lead));
            match &t_star {
                None => t_star = Some(cand),
                Some(t) => {
                    if t != &cand {
                        return Err(Error::Inconsistency(
                            "orbit polynomials disagree on the exceptional parameter".into(),
                        ));
                    }
                }
            }
        }
    }
    let t_star = t_star.expect("some polynomial is nonconstant");
    // certify the pure-power shape exactly
    for c in &polys {
        if c.len() > 1 {
            let d = c.len() - 1;
            let expanded = scaled_binomial_power(&c[d], &t_star, d);
            if &expanded != c {
                return Err(Error::Inconsistency(
                    "orbit polynomial is not a pure power of (t - t*)".into(),
                ));
            }
        }
    }
    let generic_support: Vec<usize> = (0..polys.len())
        .filter(|&i| !polys[i].is_empty())
        .collect();
    let special_support: Vec<usize> = (0..polys.len())
        .filter(|&i| !eval_poly(&polys[i], &t_star).is_zero())
        .collect();
    let generic_face = face_of_support(x, &generic_support)?;
    let special_face = face_of_support(x, &special_support)?;
    let g = x.orbit_face(generic_face).dim();
    let s = x.orbit_face(special_face).dim();
    if g != s + 1 {
        return Err(Error::Inconsistency(format!(
            "traced orbit faces have dimensions {g} and {s}, not a gap of one"
        )));
    }
    Ok(OrbitTrace {
        generic_face,
        special_face,
        t_star,
        polynomials: polys,
    })
}

/// The exceptional parameter of the orbit through `p`, see [`trace_orbit`].
pub fn exceptional_parameter(x: &ToricVariety, root: &Root, p: &Point) -> Result<Rat> {
    Ok(trace_orbit(x, root, p)?.t_star)
}

/// Point on the traced orbit at the given parameter.
pub fn orbit_point(x: &ToricVariety, root: &Root, p: &Point, t: &Rat) -> Result<Point> {
    exp_plain(x, root, t, p)
}

/// Coefficient vectors (low to high degree, trailing zeros trimmed) of the
/// Hilbert character values along the orbit `t -> exp(t d) p`.
pub fn orbit_polynomials(x: &ToricVariety, root: &Root, p: &Point) -> Result<Vec<Vec<Rat>>> {
    let mut out = Vec::with_capacity(x.hilbert_basis().len());
    for h in x.hilbert_basis() {
        let kmax = int_to_i64(&pairing(&x.cone().rays()[root.ray], h)?)?;
        let mut coeffs = Vec::with_capacity(kmax as usize + 1);
        let mut binom = Rat::one();
        let mut shifted = h.clone();
        coeffs.push(x.eval_char(p, h)?);
        for k in 1..=kmax {
            binom *= Rat::new(Int::from(kmax - k + 1), Int::from(k));
            shifted = shifted.add(&root.e);
            coeffs.push(&binom * x.eval_char(p, &shifted)?);
        }
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        out.push(coeffs);
    }
    Ok(out)
}

fn face_of_support(x: &ToricVariety, support: &[usize]) -> Result<usize> {
    x.orbit_faces()
        .iter()
        .position(|f| f.hilbert_members == support)
        .ok_or_else(|| Error::Inconsistency("orbit support is not a face".into()))
}

fn eval_poly(coeffs: &[Rat], t: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Coefficients of `lead * (t - t0)^d`.
fn scaled_binomial_power(lead: &Rat, t0: &Rat, d: usize) -> Vec<Rat> {
    let mut coeffs = vec![Rat::one()]; // (t - t0)^0
    for _ in 0..d {
        let mut next = vec![Rat::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= t0 * c;
        }
        coeffs = next;
    }
    coeffs.iter().map(|c| lead * c).collect()
}
