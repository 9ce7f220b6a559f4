//! Integer lattices and rational polyhedral cones.
//!
//! Vectors carry a space tag distinguishing the lattice `N` of one-parameter
//! subgroups from its dual character lattice `M`; the pairing is only defined
//! between the two. Cones are stored by their primitive extremal ray
//! generators, value-compared by the sorted ray list, and cache their dual
//! cone and face lattice after first use. All operations are exact.

use std::fmt;

use once_cell::sync::OnceCell;

use crate::linalg::IMat;
use crate::scalar::Int;
use crate::{Error, Result};

/// Which lattice a vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// One-parameter subgroups.
    N,
    /// Characters.
    M,
}

impl Space {
    pub fn dual(self) -> Space {
        match self {
            Space::N => Space::M,
            Space::M => Space::N,
        }
    }
}

/// An integer lattice vector with its space tag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    coords: Vec<Int>,
    space: Space,
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.space {
            Space::N => "N",
            Space::M => "M",
        };
        write!(f, "{tag}(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl LatticeVector {
    pub fn new(space: Space, coords: Vec<Int>) -> Self {
        LatticeVector { coords, space }
    }

    pub fn from_i64(space: Space, coords: &[i64]) -> Self {
        LatticeVector::new(space, coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(space: Space, rank: usize) -> Self {
        LatticeVector::new(space, vec![Int::from(0); rank])
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c == &Int::from(0))
    }

    /// gcd of the coordinates equals one (zero vector is not primitive).
    pub fn is_primitive(&self) -> bool {
        self.content() == Int::from(1)
    }

    fn content(&self) -> Int {
        use num::Integer;
        let mut g = Int::from(0);
        for c in &self.coords {
            g = g.gcd(c);
        }
        g
    }

    /// Divides out the gcd of the coordinates, keeping the direction.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g <= Int::from(1) {
            return self.clone();
        }
        LatticeVector::new(self.space, self.coords.iter().map(|c| c / &g).collect())
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.space, other.space);
        debug_assert_eq!(self.rank(), other.rank());
        LatticeVector::new(
            self.space,
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector::new(self.space, self.coords.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &Int) -> LatticeVector {
        LatticeVector::new(self.space, self.coords.iter().map(|c| c * k).collect())
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &LatticeVector, k: &Int) -> LatticeVector {
        self.add(&other.scale(k))
    }

    pub fn sup_norm(&self) -> Int {
        use num::Signed;
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(|| Int::from(0))
    }
}

/// The natural pairing between `N` and `M`: the standard dot product.
pub fn pairing(n: &LatticeVector, m: &LatticeVector) -> Result<Int> {
    if n.space != Space::N || m.space != Space::M {
        return Err(Error::SpaceMismatch);
    }
    if n.rank() != m.rank() {
        return Err(Error::RankMismatch {
            expected: n.rank(),
            found: m.rank(),
        });
    }
    Ok(dot(n.coords(), m.coords()))
}

pub(crate) fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Default desk-scale bound on the ambient rank for Hilbert basis
/// computations.
pub const DEFAULT_MAX_HILBERT_RANK: usize = 4;

const MAX_RAYS: usize = 16;

/// A face of a cone, identified by the subset of the parent's rays it
/// contains. The improper faces (the minimal face and the whole cone) are
/// included in the face lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Sorted indices into the parent cone's ray list.
    pub ray_indices: Vec<usize>,
    /// Dimension of the linear span of those rays.
    pub dim: usize,
}

/// A rational polyhedral cone given by primitive extremal ray generators.
///
/// Construction canonicalizes the generator list: generators are made
/// primitive, duplicates removed, non-extremal generators dropped whenever
/// the cone is pointed, and the rays sorted. Two cones compare equal exactly
/// when their canonical ray lists agree.
pub struct Cone {
    space: Space,
    rank: usize,
    rays: Vec<LatticeVector>,
    dual: OnceCell<Box<Cone>>,
    faces: OnceCell<Vec<Face>>,
    hilbert: OnceCell<Vec<LatticeVector>>,
}

impl Clone for Cone {
    fn clone(&self) -> Self {
        Cone {
            space: self.space,
            rank: self.rank,
            rays: self.rays.clone(),
            dual: OnceCell::new(),
            faces: OnceCell::new(),
            hilbert: OnceCell::new(),
        }
    }
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.rank == other.rank && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone(rank {}, rays {:?})", self.rank, self.rays)
    }
}

impl Cone {
    /// Builds a cone from a generating set. The generators need not be
    /// extremal or primitive; the constructor canonicalizes them.
    pub fn from_generators(space: Space, rank: usize, gens: Vec<LatticeVector>) -> Result<Cone> {
        let mut rays: Vec<LatticeVector> = Vec::new();
        for g in gens {
            if g.space() != space {
                return Err(Error::SpaceMismatch);
            }
            if g.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: g.rank(),
                });
            }
            if g.is_zero() {
                continue;
            }
            let p = g.primitive_part();
            if !rays.contains(&p) {
                rays.push(p);
            }
        }
        if rays.len() > MAX_RAYS {
            return Err(Error::Capability(format!(
                "cone with {} generators exceeds the supported {MAX_RAYS}",
                rays.len()
            )));
        }
        let raw = Cone {
            space,
            rank,
            rays: rays.clone(),
            dual: OnceCell::new(),
            faces: OnceCell::new(),
            hilbert: OnceCell::new(),
        };
        let dual = raw.compute_dual();
        let pointed = dual.span_rank() == rank;
        let rays = if pointed {
            // keep exactly the extremal generators: those whose active
            // constraint set has corank one
            rays.into_iter()
                .filter(|r| {
                    let active: Vec<Vec<Int>> = dual
                        .rays
                        .iter()
                        .filter(|u| dot(u.coords(), r.coords()) == Int::from(0))
                        .map(|u| u.coords().to_vec())
                        .collect();
                    IMat::from_rows(active).rank() == rank - 1
                })
                .collect()
        } else {
            rays
        };
        let mut rays = rays;
        rays.sort();
        Ok(Cone {
            space,
            rank,
            rays,
            dual: OnceCell::new(),
            faces: OnceCell::new(),
            hilbert: OnceCell::new(),
        })
    }

    pub fn from_i64_rows(space: Space, rank: usize, rows: &[&[i64]]) -> Result<Cone> {
        Cone::from_generators(
            space,
            rank,
            rows.iter()
                .map(|r| LatticeVector::from_i64(space, r))
                .collect(),
        )
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    fn ray_matrix(&self) -> IMat {
        IMat::from_rows(self.rays.iter().map(|r| r.coords().to_vec()).collect())
    }

    /// Dimension of the linear span of the cone.
    pub fn span_rank(&self) -> usize {
        if self.rays.is_empty() {
            0
        } else {
            self.ray_matrix().rank()
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span_rank() == self.rank
    }

    /// A cone is pointed when it contains no line; equivalently its dual is
    /// full-dimensional.
    pub fn is_pointed(&self) -> bool {
        self.dual().span_rank() == self.rank
    }

    /// The dual cone `{x : <r, x> >= 0 for every ray r}` in the dual space.
    pub fn dual(&self) -> &Cone {
        self.dual.get_or_init(|| Box::new(self.compute_dual()))
    }

    fn compute_dual(&self) -> Cone {
        let n = self.rank;
        let dual_space = self.space.dual();
        if self.rays.is_empty() {
            // dual of the zero cone is the whole space
            let mut gens = Vec::new();
            for j in 0..n {
                let mut e = vec![Int::from(0); n];
                e[j] = Int::from(1);
                gens.push(LatticeVector::new(dual_space, e.clone()));
                e[j] = Int::from(-1);
                gens.push(LatticeVector::new(dual_space, e));
            }
            return Cone::new_raw(dual_space, n, gens);
        }
        let mat = self.ray_matrix();
        let d = mat.rank();
        let lineality = mat.kernel_basis();
        let mut gens: Vec<LatticeVector> = Vec::new();
        for b in &lineality {
            let v = LatticeVector::new(dual_space, b.clone());
            gens.push(v.neg());
            gens.push(v);
        }
        let k = self.rays.len();
        debug_assert!(k <= MAX_RAYS);
        // every extremal direction of the dual lies on d-1 independent
        // supporting hyperplanes; scan ray subsets of that rank
        for mask in 0u32..(1u32 << k) {
            let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let sub_rows: Vec<Vec<Int>> = subset
                .iter()
                .map(|&i| self.rays[i].coords().to_vec())
                .collect();
            let sub = IMat::from_rows(sub_rows);
            let sub = if subset.is_empty() {
                IMat::zeros(0, n)
            } else {
                sub
            };
            if d == 0 || sub.rank() != d - 1 {
                continue;
            }
            for kvec in sub.kernel_basis() {
                let pair: Vec<Int> = self.rays.iter().map(|r| dot(r.coords(), &kvec)).collect();
                if pair.iter().all(|p| p == &Int::from(0)) {
                    continue; // lies in the lineality of the dual
                }
                let cand = if pair.iter().all(|p| p >= &Int::from(0)) {
                    LatticeVector::new(dual_space, kvec)
                } else if pair.iter().all(|p| p <= &Int::from(0)) {
                    LatticeVector::new(dual_space, kvec).neg()
                } else {
                    continue;
                };
                let cand = cand.primitive_part();
                if !gens.contains(&cand) {
                    gens.push(cand);
                }
                break; // one representative per subset is enough
            }
        }
        Cone::new_raw(dual_space, n, gens)
    }

    fn new_raw(space: Space, rank: usize, mut rays: Vec<LatticeVector>) -> Cone {
        rays.sort();
        rays.dedup();
        Cone {
            space,
            rank,
            rays,
            dual: OnceCell::new(),
            faces: OnceCell::new(),
            hilbert: OnceCell::new(),
        }
    }

    /// Exact membership test via the dual description.
    pub fn contains(&self, v: &LatticeVector) -> bool {
        debug_assert_eq!(v.space(), self.space);
        self.dual()
            .rays()
            .iter()
            .all(|u| dot(u.coords(), v.coords()) >= Int::from(0))
    }

    /// The complete face lattice, sorted by dimension then ray set. Faces are
    /// the exposed faces: intersections of the cone with supporting
    /// hyperplanes, plus the cone itself.
    pub fn faces(&self) -> &[Face] {
        self.faces.get_or_init(|| {
            let dual_rays = self.dual().rays();
            let k = dual_rays.len();
            let mut seen: Vec<Vec<usize>> = Vec::new();
            let mut out: Vec<Face> = Vec::new();
            for mask in 0u32..(1u32 << k.min(MAX_RAYS)) {
                let support: Vec<&LatticeVector> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| &dual_rays[i])
                    .collect();
                let members: Vec<usize> = (0..self.rays.len())
                    .filter(|&i| {
                        support
                            .iter()
                            .all(|u| dot(u.coords(), self.rays[i].coords()) == Int::from(0))
                    })
                    .collect();
                if seen.contains(&members) {
                    continue;
                }
                let rows: Vec<Vec<Int>> = members
                    .iter()
                    .map(|&i| self.rays[i].coords().to_vec())
                    .collect();
                let dim = if rows.is_empty() {
                    0
                } else {
                    IMat::from_rows(rows).rank()
                };
                seen.push(members.clone());
                out.push(Face {
                    ray_indices: members,
                    dim,
                });
            }
            out.sort_by(|a, b| (a.dim, &a.ray_indices).cmp(&(b.dim, &b.ray_indices)));
            out
        })
    }

    pub fn face_by_rays(&self, ray_indices: &[usize]) -> Option<&Face> {
        let mut key = ray_indices.to_vec();
        key.sort_unstable();
        self.faces().iter().find(|f| f.ray_indices == key)
    }

    /// The dual face: for a face `f` of this cone, the face of the dual cone
    /// orthogonal to `f`. The correspondence is an inclusion-reversing
    /// bijection, and for pointed full-dimensional cones the dimensions of a
    /// face and its dual face sum to the ambient rank.
    pub fn dual_face(&self, f: &Face) -> Face {
        let dual = self.dual();
        let members: Vec<usize> = (0..dual.rays().len())
            .filter(|&j| {
                f.ray_indices
                    .iter()
                    .all(|&i| dot(self.rays[i].coords(), dual.rays()[j].coords()) == Int::from(0))
            })
            .collect();
        let rows: Vec<Vec<Int>> = members
            .iter()
            .map(|&j| dual.rays()[j].coords().to_vec())
            .collect();
        let dim = if rows.is_empty() {
            0
        } else {
            IMat::from_rows(rows).rank()
        };
        Face {
            ray_indices: members,
            dim,
        }
    }

    /// Whether the ray generators of the face extend to a basis of the
    /// ambient lattice: they must be linearly independent and their matrix
    /// must have all elementary divisors equal to one.
    pub fn smooth_face(&self, f: &Face) -> bool {
        if f.ray_indices.is_empty() {
            return true;
        }
        let rows: Vec<Vec<Int>> = f
            .ray_indices
            .iter()
            .map(|&i| self.rays[i].coords().to_vec())
            .collect();
        let m = IMat::from_rows(rows);
        let snf = m.snf();
        if snf.rank != f.ray_indices.len() {
            return false;
        }
        (0..snf.rank).all(|i| snf.d.get(i, i) == &Int::from(1))
    }

    /// The minimal generating set of the semigroup of lattice points of a
    /// pointed cone, sorted lexicographically.
    ///
    /// The cone is triangulated into simplicial subcones on its own rays;
    /// the lattice points of each half-open fundamental parallelepiped,
    /// together with the ray generators, generate the semigroup, and a
    /// greedy pass removes every reducible element.
    pub fn hilbert_basis(&self) -> Result<&[LatticeVector]> {
        self.hilbert_basis_bounded(DEFAULT_MAX_HILBERT_RANK)
            .map(|v| v as _)
    }

    pub fn hilbert_basis_bounded(&self, max_rank: usize) -> Result<&Vec<LatticeVector>> {
        if self.rank > max_rank {
            return Err(Error::Capability(format!(
                "Hilbert basis computation limited to rank {max_rank}, got {}",
                self.rank
            )));
        }
        if !self.is_pointed() {
            return Err(Error::Domain(
                "Hilbert basis requires a pointed cone".into(),
            ));
        }
        if let Some(h) = self.hilbert.get() {
            return Ok(h);
        }
        let computed = self.compute_hilbert()?;
        Ok(self.hilbert.get_or_init(|| computed))
    }

    fn compute_hilbert(&self) -> Result<Vec<LatticeVector>> {
        let mut candidates: Vec<LatticeVector> = Vec::new();
        let push = |v: LatticeVector, candidates: &mut Vec<LatticeVector>| {
            if !v.is_zero() && !candidates.contains(&v) {
                candidates.push(v);
            }
        };
        for r in &self.rays {
            push(r.clone(), &mut candidates);
        }
        for simplex in self.triangulate()? {
            for p in parallelepiped_points(self.space, self.rank, &simplex)? {
                push(p, &mut candidates);
            }
        }
        // positive functional on the cone: sum of the dual rays
        let dual = self.dual();
        let height = |v: &LatticeVector| -> Int {
            dual.rays()
                .iter()
                .map(|u| dot(u.coords(), v.coords()))
                .sum()
        };
        candidates.sort_by(|a, b| (height(a), a.coords()).cmp(&(height(b), b.coords())));
        let mut kept: Vec<LatticeVector> = Vec::new();
        for g in candidates {
            let reducible = kept.iter().any(|h| {
                let diff = LatticeVector::new(
                    self.space,
                    g.coords().iter().zip(h.coords()).map(|(a, b)| a - b).collect(),
                );
                !diff.is_zero() && self.contains(&diff)
            });
            if !reducible {
                kept.push(g);
            }
        }
        kept.sort();
        Ok(kept)
    }

    /// Pulling triangulation on the cone's own rays: each simplex is a list
    /// of ray vectors forming a linearly independent set spanning the cone's
    /// dimension.
    fn triangulate(&self) -> Result<Vec<Vec<LatticeVector>>> {
        fn rec(space: Space, rank: usize, rays: &[LatticeVector]) -> Result<Vec<Vec<LatticeVector>>> {
            if rays.is_empty() {
                return Ok(vec![]);
            }
            let mat = IMat::from_rows(rays.iter().map(|r| r.coords().to_vec()).collect());
            let dim = mat.rank();
            if rays.len() == dim {
                return Ok(vec![rays.to_vec()]);
            }
            let sub = Cone::from_generators(space, rank, rays.to_vec())?;
            let apex = sub.rays()[0].clone();
            let mut out = Vec::new();
            for f in sub.faces() {
                if f.dim + 1 != dim {
                    continue; // facets of the subcone only
                }
                let fr: Vec<LatticeVector> = f
                    .ray_indices
                    .iter()
                    .map(|&i| sub.rays()[i].clone())
                    .collect();
                if fr.contains(&apex) {
                    continue;
                }
                for mut piece in rec(space, rank, &fr)? {
                    piece.push(apex.clone());
                    out.push(piece);
                }
            }
            Ok(out)
        }
        rec(self.space, self.rank, &self.rays)
    }
}

/// Lattice points of the half-open parallelepiped `{sum t_i w_i : 0 <= t_i < 1}`
/// for linearly independent `w_i`, found by scanning the integer bounding box
/// and solving for the coefficients exactly.
fn parallelepiped_points(
    space: Space,
    rank: usize,
    gens: &[LatticeVector],
) -> Result<Vec<LatticeVector>> {
    use crate::scalar::Rat;
    use num::{One, Signed, Zero};

    let d = gens.len();
    let mut lo = vec![Int::from(0); rank];
    let mut hi = vec![Int::from(0); rank];
    for w in gens {
        for (i, c) in w.coords().iter().enumerate() {
            if c.is_negative() {
                lo[i] += c;
            } else {
                hi[i] += c;
            }
        }
    }
    let mut out = Vec::new();
    let mut point = lo.clone();
    'scan: loop {
        // solve sum t_j w_j = point over the rationals
        let mut rows: Vec<Vec<Rat>> = (0..rank)
            .map(|i| {
                let mut row: Vec<Rat> = gens
                    .iter()
                    .map(|w| Rat::from_integer(w.coords()[i].clone()))
                    .collect();
                row.push(Rat::from_integer(point[i].clone()));
                row
            })
            .collect();
        // gaussian elimination with the augmented column
        let mut piv_rows: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..d {
            if let Some(p) = (r..rank).find(|&i| !rows[i][c].is_zero()) {
                rows.swap(r, p);
                let inv = rows[r][c].recip();
                for x in rows[r].iter_mut() {
                    *x = &*x * &inv;
                }
                for i in 0..rank {
                    if i != r && !rows[i][c].is_zero() {
                        let f = rows[i][c].clone();
                        for j in 0..=d {
                            let v = &rows[i][j] - &f * &rows[r][j];
                            rows[i][j] = v;
                        }
                    }
                }
                piv_rows.push(c);
                r += 1;
            }
        }
        let consistent = (r..rank).all(|i| rows[i][d].is_zero());
        if consistent && r == d {
            let mut ok = true;
            for (ri, _c) in piv_rows.iter().enumerate() {
                let t = &rows[ri][d];
                if t < &Rat::zero() || t >= &Rat::one() {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(LatticeVector::new(space, point.clone()));
            }
        }
        // advance the box scan
        for i in 0..rank {
            point[i] += 1;
            if point[i] <= hi[i] {
                continue 'scan;
            }
            point[i] = lo[i].clone();
        }
        break;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nvec(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(Space::N, c)
    }

    fn mvec(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(Space::M, c)
    }

    #[test]
    fn pairing_examples() {
        // roots of the plane pair to x against the first ray
        for x in 0..4 {
            assert_eq!(
                pairing(&nvec(&[1, 0]), &mvec(&[x, -1])).unwrap(),
                Int::from(x)
            );
        }
        assert_eq!(
            pairing(&nvec(&[0, 0]), &mvec(&[5, 7])).unwrap(),
            Int::from(0)
        );
        assert_eq!(
            pairing(&nvec(&[2, 3]), &mvec(&[-1, 1])).unwrap(),
            Int::from(1)
        );
        assert!(pairing(&nvec(&[1]), &mvec(&[1, 2])).is_err());
        assert!(pairing(&mvec(&[1, 0]), &mvec(&[1, 2])).is_err());
    }

    #[test]
    fn primitivity_enforced() {
        let c = Cone::from_i64_rows(Space::N, 2, &[&[2, 4], &[3, 0]]).unwrap();
        assert_eq!(c.rays(), &[nvec(&[1, 0]), nvec(&[1, 2])]);
    }

    #[test]
    fn non_extremal_generators_dropped() {
        let c = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[1, 1], &[0, 1]]).unwrap();
        assert_eq!(c.rays().len(), 2);
        assert!(c.rays().contains(&nvec(&[1, 0])));
        assert!(c.rays().contains(&nvec(&[0, 1])));
    }

    #[test]
    fn dual_quadrant_is_quadrant() {
        let c = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[0, 1]]).unwrap();
        let d = c.dual();
        assert_eq!(d.space(), Space::M);
        assert_eq!(d.rays(), &[mvec(&[0, 1]), mvec(&[1, 0])]);
    }

    #[test]
    fn dual_of_full_space_is_origin() {
        let c =
            Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]).unwrap();
        assert!(c.dual().rays().is_empty());
        // and back: dual of the zero cone is everything
        assert_eq!(c.dual().dual().span_rank(), 2);
    }

    #[test]
    fn dual_known_two_dimensional() {
        let c = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[1, 2]]).unwrap();
        let d = c.dual();
        assert_eq!(d.rays(), &[mvec(&[0, 1]), mvec(&[2, -1])]);
    }

    /// Independent 2-d oracle: collect all primitive vectors in a box that
    /// pair nonnegatively with the rays, and read off the angular extremes.
    fn dual_rays_2d_oracle(c: &Cone) -> Vec<LatticeVector> {
        let mut kept: Vec<(f64, LatticeVector)> = Vec::new();
        for x in -12i64..=12 {
            for y in -12i64..=12 {
                if (x, y) == (0, 0) {
                    continue;
                }
                let v = LatticeVector::from_i64(c.space().dual(), &[x, y]);
                if !v.is_primitive() {
                    continue;
                }
                if c.rays()
                    .iter()
                    .all(|r| dot(r.coords(), v.coords()) >= Int::from(0))
                {
                    kept.push(((y as f64).atan2(x as f64), v));
                }
            }
        }
        kept.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if kept.is_empty() {
            return vec![];
        }
        let mut out = vec![kept.first().unwrap().1.clone(), kept.last().unwrap().1.clone()];
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn dual_matches_rotation_oracle() {
        for rays in [
            vec![vec![1i64, 0], vec![1, 2]],
            vec![vec![2, -1], vec![0, 1]],
            vec![vec![1, 1], vec![-1, 2]],
            vec![vec![3, 1], vec![1, 4]],
        ] {
            let rows: Vec<&[i64]> = rays.iter().map(|r| r.as_slice()).collect();
            let c = Cone::from_i64_rows(Space::N, 2, &rows).unwrap();
            let mut got = c.dual().rays().to_vec();
            got.sort();
            assert_eq!(got, dual_rays_2d_oracle(&c), "rays {rays:?}");
        }
    }

    #[test]
    fn dual_is_involutive_on_pointed_cones() {
        for rays in [
            vec![vec![1i64, 0], vec![1, 2]],
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![2, -1], vec![0, 1]],
        ] {
            let rows: Vec<&[i64]> = rays.iter().map(|r| r.as_slice()).collect();
            let c = Cone::from_i64_rows(Space::M, 2, &rows).unwrap();
            assert_eq!(c.dual().dual(), &c);
        }
        let q3 = Cone::from_i64_rows(
            Space::N,
            3,
            &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]],
        )
        .unwrap();
        assert_eq!(q3.dual().dual(), &q3);
    }

    #[test]
    fn hilbert_free_semigroup() {
        let c = Cone::from_i64_rows(Space::M, 2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(c.hilbert_basis().unwrap(), &[mvec(&[0, 1]), mvec(&[1, 0])]);
    }

    #[test]
    fn hilbert_known_values() {
        let c = Cone::from_i64_rows(Space::M, 2, &[&[2, -1], &[0, 1]]).unwrap();
        let h = c.hilbert_basis().unwrap();
        assert_eq!(h, &[mvec(&[0, 1]), mvec(&[1, 0]), mvec(&[2, -1])]);

        let c = Cone::from_i64_rows(Space::M, 2, &[&[1, 0], &[1, 3]]).unwrap();
        assert_eq!(c.hilbert_basis().unwrap().len(), 4);
    }

    #[test]
    fn hilbert_rejects_bad_inputs() {
        let c = Cone::from_i64_rows(Space::M, 2, &[&[1, 0], &[-1, 0], &[0, 1]]).unwrap();
        assert!(matches!(c.hilbert_basis(), Err(Error::Domain(_))));
        let c5 = Cone::from_i64_rows(
            Space::M,
            5,
            &[
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 1],
            ],
        )
        .unwrap();
        assert!(matches!(c5.hilbert_basis(), Err(Error::Capability(_))));
    }

    /// Brute-force irreducibility: an element is irreducible when it is not
    /// the sum of two nonzero semigroup elements from a covering box.
    #[test]
    fn hilbert_elements_are_irreducible() {
        let c = Cone::from_i64_rows(Space::M, 2, &[&[2, -1], &[0, 1]]).unwrap();
        let h = c.hilbert_basis().unwrap().to_vec();
        let box_pts: Vec<LatticeVector> = {
            let mut v = Vec::new();
            for x in -8i64..=8 {
                for y in -8i64..=8 {
                    let p = mvec(&[x, y]);
                    if !p.is_zero() && c.contains(&p) {
                        v.push(p);
                    }
                }
            }
            v
        };
        for g in &h {
            for a in &box_pts {
                let diff = LatticeVector::new(
                    Space::M,
                    g.coords().iter().zip(a.coords()).map(|(x, y)| x - y).collect(),
                );
                assert!(
                    diff.is_zero() || !c.contains(&diff) || diff == *g || a == g,
                    "{g:?} = {a:?} + {diff:?} is reducible"
                );
            }
        }
    }

    /// Every cone point in a test box is a nonnegative integer combination of
    /// the Hilbert basis (exhaustive search).
    #[test]
    fn hilbert_generates_box_points() {
        fn representable(target: &[Int], basis: &[LatticeVector], c: &Cone) -> bool {
            if target.iter().all(|t| t == &Int::from(0)) {
                return true;
            }
            let tv = LatticeVector::new(Space::M, target.to_vec());
            if !c.contains(&tv) {
                return false;
            }
            for b in basis {
                let rest: Vec<Int> = target
                    .iter()
                    .zip(b.coords())
                    .map(|(t, bc)| t - bc)
                    .collect();
                let rv = LatticeVector::new(Space::M, rest.clone());
                if c.contains(&rv) && representable(&rest, basis, c) {
                    return true;
                }
            }
            false
        }
        let c = Cone::from_i64_rows(Space::M, 2, &[&[1, 0], &[1, 3]]).unwrap();
        let h = c.hilbert_basis().unwrap().to_vec();
        for x in 0i64..=6 {
            for y in -6i64..=18 {
                let p = mvec(&[x, y]);
                if c.contains(&p) {
                    assert!(
                        representable(p.coords(), &h, &c),
                        "{p:?} not generated by {h:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn face_lattice_counts() {
        let quad = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(quad.faces().len(), 4);

        let q3 = Cone::from_i64_rows(
            Space::N,
            3,
            &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]],
        )
        .unwrap();
        assert_eq!(q3.faces().len(), 10);
    }

    /// Independent oracle: enumerate faces by scanning supporting functionals
    /// in a small box of the dual space.
    #[test]
    fn face_lattice_matches_supporting_hyperplane_oracle() {
        let q3 = Cone::from_i64_rows(
            Space::N,
            3,
            &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]],
        )
        .unwrap();
        let mut oracle: Vec<Vec<usize>> = Vec::new();
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                for z in -3i64..=3 {
                    let m = mvec(&[x, y, z]);
                    if !q3.dual().contains(&m) {
                        continue;
                    }
                    let members: Vec<usize> = (0..q3.rays().len())
                        .filter(|&i| dot(q3.rays()[i].coords(), m.coords()) == Int::from(0))
                        .collect();
                    if !oracle.contains(&members) {
                        oracle.push(members);
                    }
                }
            }
        }
        let got: Vec<Vec<usize>> = q3.faces().iter().map(|f| f.ray_indices.clone()).collect();
        for o in &oracle {
            assert!(got.contains(o), "missing face {o:?}");
        }
        for g in &got {
            assert!(oracle.contains(g), "spurious face {g:?}");
        }
    }

    #[test]
    fn dual_face_involution_and_dimensions() {
        let q3 = Cone::from_i64_rows(
            Space::N,
            3,
            &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]],
        )
        .unwrap();
        for f in q3.faces() {
            let df = q3.dual_face(f);
            assert_eq!(f.dim + df.dim, 3);
            let back = q3.dual().dual_face(&df);
            assert_eq!(&back, f);
        }
        // improper faces swap
        let quad = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[0, 1]]).unwrap();
        let vertex = quad.face_by_rays(&[]).unwrap();
        let top = quad.dual_face(vertex);
        assert_eq!(top.dim, 2);
        assert_eq!(top.ray_indices.len(), quad.dual().rays().len());
    }

    #[test]
    fn smooth_face_detection() {
        let c = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[1, 2]]).unwrap();
        let whole = c.faces().iter().find(|f| f.dim == 2).unwrap();
        assert!(!c.smooth_face(whole));
        for f in c.faces().iter().filter(|f| f.dim <= 1) {
            assert!(c.smooth_face(f), "rays and vertex are smooth");
        }
        let quad = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[0, 1]]).unwrap();
        let whole = quad.faces().iter().find(|f| f.dim == 2).unwrap();
        assert!(quad.smooth_face(whole));
    }
}
