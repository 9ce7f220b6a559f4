//! The affine toric variety of a pointed full-dimensional cone.
//!
//! The coordinate ring is the semigroup algebra of the dual cone's lattice
//! points; the variety is presented through the Hilbert basis of that
//! semigroup. A point is stored as its support face together with a
//! multiplicative character on the lattice generated by the face, which makes
//! validity structural: any nonzero character values give a genuine point.
//!
//! The orbit-face catalog records, for each face of the dual cone, the dual
//! face in the primal cone, a lattice basis of the group generated by the
//! face's lattice points, and which Hilbert basis elements lie on the face.

use num::{One, Zero};

use crate::lattice::{dot, pairing, Cone, Face, LatticeVector, Space, DEFAULT_MAX_HILBERT_RANK};
use crate::linalg::{int_to_i64, rat_rank, solve_multiplicative, IMat};
use crate::scalar::{Int, Rat};
use crate::{Error, Result};

/// Per-face data of the orbit catalog.
#[derive(Clone, Debug)]
pub struct OrbitFace {
    /// The face of the dual cone (support faces of points live here).
    pub face: Face,
    /// The dual face in the primal cone; its rays generate the stabilizer.
    pub dual_face: Face,
    /// Lattice basis of the group generated by the face's lattice points
    /// (a saturated sublattice of the character lattice).
    pub basis: Vec<LatticeVector>,
    /// Indices of Hilbert basis elements lying on the face.
    pub hilbert_members: Vec<usize>,
}

impl OrbitFace {
    pub fn dim(&self) -> usize {
        self.face.dim
    }
}

/// An affine toric variety, immutable after construction.
pub struct ToricVariety {
    sigma: Cone,
    sigma_dual: Cone,
    hilbert: Vec<LatticeVector>,
    orbit_faces: Vec<OrbitFace>,
}

impl ToricVariety {
    /// Builds the variety of a pointed full-dimensional cone in `N`.
    pub fn new(sigma: Cone) -> Result<Self> {
        Self::with_max_rank(sigma, DEFAULT_MAX_HILBERT_RANK)
    }

    pub fn with_max_rank(sigma: Cone, max_rank: usize) -> Result<Self> {
        if sigma.space() != Space::N {
            return Err(Error::SpaceMismatch);
        }
        if !sigma.is_pointed() || !sigma.is_full_dimensional() {
            return Err(Error::Domain(
                "the defining cone must be pointed and full-dimensional".into(),
            ));
        }
        let sigma_dual = sigma.dual().clone();
        if sigma_dual.dual() != &sigma {
            return Err(Error::Inconsistency("cone duality is not involutive".into()));
        }
        let hilbert = sigma_dual.hilbert_basis_bounded(max_rank)?.clone();
        let mut orbit_faces = Vec::new();
        for face in sigma_dual.faces() {
            let dual_face = sigma_dual.dual_face(face);
            // group generated by the face's semigroup = {m : m orthogonal to
            // the dual face's rays}; its basis comes from an integer kernel
            let rows: Vec<Vec<Int>> = dual_face
                .ray_indices
                .iter()
                .map(|&i| sigma.rays()[i].coords().to_vec())
                .collect();
            let mat = if rows.is_empty() {
                IMat::zeros(0, sigma.rank())
            } else {
                IMat::from_rows(rows)
            };
            let basis: Vec<LatticeVector> = mat
                .kernel_basis()
                .into_iter()
                .map(|b| LatticeVector::new(Space::M, b))
                .collect();
            let hilbert_members: Vec<usize> = (0..hilbert.len())
                .filter(|&i| {
                    dual_face.ray_indices.iter().all(|&r| {
                        dot(sigma.rays()[r].coords(), hilbert[i].coords()) == Int::zero()
                    })
                })
                .collect();
            orbit_faces.push(OrbitFace {
                face: face.clone(),
                dual_face,
                basis,
                hilbert_members,
            });
        }
        Ok(ToricVariety {
            sigma,
            sigma_dual,
            hilbert,
            orbit_faces,
        })
    }

    pub fn rank(&self) -> usize {
        self.sigma.rank()
    }

    pub fn cone(&self) -> &Cone {
        &self.sigma
    }

    pub fn dual_cone(&self) -> &Cone {
        &self.sigma_dual
    }

    pub fn hilbert_basis(&self) -> &[LatticeVector] {
        &self.hilbert
    }

    pub fn orbit_faces(&self) -> &[OrbitFace] {
        &self.orbit_faces
    }

    pub fn orbit_face(&self, idx: usize) -> &OrbitFace {
        &self.orbit_faces[idx]
    }

    /// Index of the full-dimensional face of the dual cone (the open orbit).
    pub fn open_face(&self) -> usize {
        self.orbit_faces
            .iter()
            .position(|f| f.dim() == self.rank())
            .expect("a full-dimensional cone has a top face")
    }

    pub fn face_index_by_rays(&self, ray_indices: &[usize]) -> Option<usize> {
        let mut key = ray_indices.to_vec();
        key.sort_unstable();
        self.orbit_faces
            .iter()
            .position(|f| f.face.ray_indices == key)
    }

    /// `m` lies on the face when it is orthogonal to the dual face's rays.
    pub fn face_contains(&self, face_idx: usize, m: &LatticeVector) -> bool {
        self.orbit_faces[face_idx]
            .dual_face
            .ray_indices
            .iter()
            .all(|&r| dot(self.sigma.rays()[r].coords(), m.coords()) == Int::zero())
    }

    /// Coordinates of `m` in the stored lattice basis of the face's group.
    fn face_coordinates(&self, face_idx: usize, m: &LatticeVector) -> Result<Vec<Int>> {
        let basis = &self.orbit_faces[face_idx].basis;
        if basis.is_empty() {
            return if m.is_zero() {
                Ok(vec![])
            } else {
                Err(Error::Inconsistency(
                    "nonzero character exponent on the fixed-point face".into(),
                ))
            };
        }
        // columns are the basis vectors
        let rows: Vec<Vec<Int>> = (0..self.rank())
            .map(|i| basis.iter().map(|b| b.coords()[i].clone()).collect())
            .collect();
        IMat::from_rows(rows)
            .solve(m.coords())
            .ok_or_else(|| Error::Inconsistency("exponent outside the face lattice".into()))
    }

    /// The first lexicographic subset of ray indices whose generators are
    /// linearly independent of full rank.
    pub fn ray_basis(&self) -> Vec<usize> {
        let n = self.rank();
        let r = self.sigma.rays().len();
        fn rec(
            start: usize,
            r: usize,
            n: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for i in start..r {
                cur.push(i);
                rec(i + 1, r, n, cur, out);
                cur.pop();
            }
        }
        let mut combos = Vec::new();
        rec(0, r, n, &mut Vec::new(), &mut combos);
        for combo in combos {
            let rows: Vec<Vec<Int>> = combo
                .iter()
                .map(|&i| self.sigma.rays()[i].coords().to_vec())
                .collect();
            if IMat::from_rows(rows).rank() == n {
                return combo;
            }
        }
        unreachable!("a full-dimensional cone has n independent rays")
    }

    /// Order of the kernel of the ray-basis parametrization of the torus:
    /// the index of the sublattice spanned by the chosen basis rays.
    pub fn theta_kernel_order(&self, basis: &[usize]) -> Int {
        use num::Signed;
        let rows: Vec<Vec<Int>> = basis
            .iter()
            .map(|&i| self.sigma.rays()[i].coords().to_vec())
            .collect();
        IMat::from_rows(rows).det().abs()
    }

    // ------------------------------------------------------------------
    // points

    /// The base point: support on the open orbit, all character values one.
    pub fn base_point(&self) -> Point {
        let top = self.open_face();
        Point {
            face: top,
            chi: vec![Rat::one(); self.orbit_faces[top].basis.len()],
        }
    }

    /// Open-orbit point from torus coordinates along independent rays:
    /// the character sends `m` to the product of `t_i^<rho_i, m>`.
    pub fn point_from_torus(&self, basis: &[usize], coords: &[Rat]) -> Result<Point> {
        let n = self.rank();
        if basis.len() != n || coords.len() != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: basis.len().max(coords.len()),
            });
        }
        let rows: Vec<Vec<Int>> = basis
            .iter()
            .map(|&i| {
                self.sigma
                    .rays()
                    .get(i)
                    .ok_or_else(|| Error::Domain(format!("no ray with index {i}")))
                    .map(|r| r.coords().to_vec())
            })
            .collect::<Result<_>>()?;
        if IMat::from_rows(rows).rank() != n {
            return Err(Error::Domain("chosen rays are linearly dependent".into()));
        }
        if coords.iter().any(|c| c.is_zero()) {
            return Err(Error::Domain("torus coordinates must be nonzero".into()));
        }
        let top = self.open_face();
        let face_basis = self.orbit_faces[top].basis.clone();
        let mut chi = Vec::with_capacity(face_basis.len());
        for b in &face_basis {
            let mut acc = Rat::one();
            for (&ri, t) in basis.iter().zip(coords) {
                let e = int_to_i64(&pairing(&self.sigma.rays()[ri], b)?)?;
                acc *= crate::scalar::rat_pow(t, e)?;
            }
            chi.push(acc);
        }
        Ok(Point { face: top, chi })
    }

    /// The standard point with all torus coordinates equal to `j` along the
    /// chosen ray basis.
    pub fn standard_point(&self, basis: &[usize], j: i64) -> Result<Point> {
        let coords = vec![Rat::from_integer(Int::from(j)); self.rank()];
        self.point_from_torus(basis, &coords)
    }

    /// Evaluates the character of `p` on a lattice point of the dual cone:
    /// the stored character value when `m` lies on the support face, zero
    /// otherwise.
    pub fn eval_char(&self, p: &Point, m: &LatticeVector) -> Result<Rat> {
        if m.space() != Space::M || m.rank() != self.rank() {
            return Err(Error::SpaceMismatch);
        }
        if !self.sigma_dual.contains(m) {
            return Err(Error::Domain(format!(
                "{m:?} is not a lattice point of the dual cone"
            )));
        }
        if !self.face_contains(p.face, m) {
            return Ok(Rat::zero());
        }
        self.eval_on_face_lattice(p, m)
    }

    fn eval_on_face_lattice(&self, p: &Point, m: &LatticeVector) -> Result<Rat> {
        let coords = self.face_coordinates(p.face, m)?;
        let mut acc = Rat::one();
        for (c, chi) in coords.iter().zip(&p.chi) {
            acc *= crate::scalar::rat_pow(chi, int_to_i64(c)?)?;
        }
        Ok(acc)
    }

    /// Character value of `p` on an arbitrary lattice point of the face
    /// group, not necessarily inside the dual cone. Open-orbit points have
    /// characters on the whole lattice.
    pub fn eval_char_unrestricted(&self, p: &Point, m: &LatticeVector) -> Result<Rat> {
        if !self.face_contains(p.face, m) {
            return Err(Error::Domain(format!(
                "{m:?} is outside the face lattice of the point's support"
            )));
        }
        self.eval_on_face_lattice(p, m)
    }

    /// The derived view of a point: its character evaluated on every Hilbert
    /// basis element.
    pub fn hilbert_values(&self, p: &Point) -> Result<Vec<Rat>> {
        self.hilbert.iter().map(|h| self.eval_char(p, h)).collect()
    }

    /// Reconstructs a point from its Hilbert value vector. The support must
    /// match a face of the catalog exactly, and the multiplicative system on
    /// the face's lattice basis must be solvable over the rationals; a
    /// missing rational root is reported as a field-extension error rather
    /// than approximated.
    pub fn point_from_hilbert_values(&self, values: &[Rat]) -> Result<Point> {
        if values.len() != self.hilbert.len() {
            return Err(Error::RankMismatch {
                expected: self.hilbert.len(),
                found: values.len(),
            });
        }
        let support: Vec<usize> = (0..values.len())
            .filter(|&i| !values[i].is_zero())
            .collect();
        let face = self
            .orbit_faces
            .iter()
            .position(|f| f.hilbert_members == support)
            .ok_or_else(|| {
                Error::Inconsistency("value-vector support is not an orbit face".into())
            })?;
        let of = &self.orbit_faces[face];
        if of.basis.is_empty() {
            return Ok(Point { face, chi: vec![] });
        }
        let mut rows = Vec::with_capacity(support.len());
        let mut rhs = Vec::with_capacity(support.len());
        for &i in &support {
            rows.push(self.face_coordinates(face, &self.hilbert[i])?);
            rhs.push(values[i].clone());
        }
        let exps = IMat::from_rows(rows);
        let chi = solve_multiplicative(&exps, &rhs)?;
        let p = Point { face, chi };
        // the system could be underdetermined only if the face's Hilbert
        // elements failed to generate its lattice; verify the solution
        for (&i, v) in support.iter().zip(&rhs) {
            if &self.eval_char(&p, &self.hilbert[i])? != v {
                return Err(Error::Inconsistency(
                    "reconstructed point does not reproduce its values".into(),
                ));
            }
        }
        Ok(p)
    }

    /// Support face of the point (the orbit it lies on).
    pub fn orbit_of(&self, p: &Point) -> &OrbitFace {
        &self.orbit_faces[p.face]
    }

    pub fn orbit_dim(&self, p: &Point) -> usize {
        self.orbit_faces[p.face].dim()
    }

    /// The stabilizer subtorus of the orbit, encoded as a basis of the
    /// saturated sublattice of `N` spanned by the dual face's rays.
    pub fn stabilizer_sublattice(&self, face_idx: usize) -> Vec<LatticeVector> {
        let of = &self.orbit_faces[face_idx];
        if of.dual_face.ray_indices.is_empty() {
            return vec![];
        }
        // saturation: N-vectors orthogonal to everything orthogonal to the rays
        let rows: Vec<Vec<Int>> = of.basis.iter().map(|b| b.coords().to_vec()).collect();
        let mat = if rows.is_empty() {
            IMat::zeros(0, self.rank())
        } else {
            IMat::from_rows(rows)
        };
        mat.kernel_basis()
            .into_iter()
            .map(|v| LatticeVector::new(Space::N, v))
            .collect()
    }

    /// A point is smooth exactly when the rays of its orbit's dual face form
    /// part of a lattice basis.
    pub fn is_smooth_point(&self, p: &Point) -> bool {
        self.sigma.smooth_face(&self.orbit_faces[p.face].dual_face)
    }

    // ------------------------------------------------------------------
    // certificates

    /// Tangent-spanning certificate at an open-orbit point: one root per
    /// basis ray, whose velocity vectors at the point form a matrix of full
    /// rank over the rationals.
    pub fn flexibility_certificate(&self, p: &Point) -> Result<FlexCertificate> {
        if p.face != self.open_face() {
            return Err(Error::Domain(
                "flexibility certificates are issued at open-orbit points".into(),
            ));
        }
        let basis = self.ray_basis();
        let mut roots = Vec::new();
        let mut matrix = Vec::new();
        for &i in &basis {
            let root = crate::demazure::root_for_ray(self, i)?;
            let mut row = Vec::with_capacity(self.hilbert.len());
            for h in &self.hilbert {
                let coeff = pairing(&self.sigma.rays()[i], h)?;
                if coeff.is_zero() {
                    row.push(Rat::zero());
                } else {
                    let shifted = h.add(root.exponent());
                    let val = self.eval_char(p, &shifted)?;
                    row.push(Rat::from_integer(coeff) * val);
                }
            }
            matrix.push(row);
            roots.push(root);
        }
        let rank = rat_rank(&matrix);
        if rank != self.rank() {
            return Err(Error::Inconsistency(format!(
                "velocity matrix rank {rank} below ambient rank {}",
                self.rank()
            )));
        }
        Ok(FlexCertificate {
            ray_basis: basis,
            roots,
            velocity_matrix: matrix,
            rank,
        })
    }

    /// Certificate that the Makar-Limanov invariant is trivial: the common
    /// kernel of the ray derivations meets the dual cone's lattice only at
    /// the origin, because the rays span the ambient space.
    pub fn ml_certificate(&self) -> MlCertificate {
        let rows: Vec<Vec<Int>> = self
            .sigma
            .rays()
            .iter()
            .map(|r| r.coords().to_vec())
            .collect();
        let mat = IMat::from_rows(rows);
        let ray_span_rank = mat.rank();
        let joint_kernel = mat.kernel_basis();
        let facet_hilbert: Vec<Vec<usize>> = (0..self.sigma.rays().len())
            .map(|i| {
                (0..self.hilbert.len())
                    .filter(|&h| {
                        dot(self.sigma.rays()[i].coords(), self.hilbert[h].coords()) == Int::zero()
                    })
                    .collect()
            })
            .collect();
        MlCertificate {
            ray_span_rank,
            ambient_rank: self.rank(),
            joint_kernel_dim: joint_kernel.len(),
            facet_hilbert_members: facet_hilbert,
            trivial: ray_span_rank == self.rank() && joint_kernel.is_empty(),
        }
    }
}

/// A point of the variety: support face plus a character on the face's
/// lattice basis. All values are nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    /// Index into the variety's orbit-face catalog.
    pub face: usize,
    /// Character values on the face's stored lattice basis.
    pub chi: Vec<Rat>,
}

impl Point {
    pub fn new(variety: &ToricVariety, face: usize, chi: Vec<Rat>) -> Result<Self> {
        let of = variety
            .orbit_faces()
            .get(face)
            .ok_or_else(|| Error::Domain(format!("no orbit face with index {face}")))?;
        if chi.len() != of.basis.len() {
            return Err(Error::RankMismatch {
                expected: of.basis.len(),
                found: chi.len(),
            });
        }
        if chi.iter().any(|c| c.is_zero()) {
            return Err(Error::Domain("character values must be nonzero".into()));
        }
        Ok(Point { face, chi })
    }
}

/// Flexibility certificate: roots and the full-rank velocity matrix.
#[derive(Clone, Debug)]
pub struct FlexCertificate {
    pub ray_basis: Vec<usize>,
    pub roots: Vec<crate::demazure::Root>,
    pub velocity_matrix: Vec<Vec<Rat>>,
    pub rank: usize,
}

/// Makar-Limanov triviality certificate.
#[derive(Clone, Debug)]
pub struct MlCertificate {
    pub ray_span_rank: usize,
    pub ambient_rank: usize,
    pub joint_kernel_dim: usize,
    /// Hilbert members of each ray-orthogonal facet, for inspection.
    pub facet_hilbert_members: Vec<Vec<usize>>,
    pub trivial: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::{rat, rat_int};

    fn mvec(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(Space::M, c)
    }

    #[test]
    fn build_plane() {
        let x = catalog::affine_plane();
        assert_eq!(x.hilbert_basis(), &[mvec(&[0, 1]), mvec(&[1, 0])]);
        assert_eq!(x.orbit_faces().len(), 4);
    }

    /// Independent oracle for the cyclic quotient surface: count the minimal
    /// invariant monomials of the order-2 action directly.
    #[test]
    fn build_quotient_surface() {
        let x = catalog::quotient_surface(2, 1);
        assert_eq!(x.hilbert_basis().len(), 3);

        // invariant monomials x^a y^b with a + b even, minimal generators
        let mut gens: Vec<(i64, i64)> = Vec::new();
        for a in 0..=4i64 {
            for b in 0..=4i64 {
                if (a, b) == (0, 0) || (a + b) % 2 != 0 {
                    continue;
                }
                gens.push((a, b));
            }
        }
        let minimal: Vec<(i64, i64)> = gens
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !gens
                    .iter()
                    .any(|&(c, d)| (c, d) != (a, b) && c <= a && d <= b && (a - c + b - d) % 2 == 0)
            })
            .collect();
        assert_eq!(minimal.len(), x.hilbert_basis().len());
    }

    #[test]
    fn build_three_dimensional() {
        let x = catalog::quadric_cone_threefold();
        assert_eq!(x.rank(), 3);
        assert_eq!(x.orbit_faces().len(), 10);
        assert!(x.hilbert_basis().len() >= 4);
    }

    #[test]
    fn degenerate_cone_rejected() {
        let half = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[-1, 0], &[0, 1]]).unwrap();
        assert!(matches!(ToricVariety::new(half), Err(Error::Domain(_))));
        let thin = Cone::from_i64_rows(Space::N, 2, &[&[1, 0]]).unwrap();
        assert!(matches!(ToricVariety::new(thin), Err(Error::Domain(_))));
    }

    #[test]
    fn torus_points_and_characters() {
        let x = catalog::affine_plane();
        let base = x.base_point();
        for h in x.hilbert_basis() {
            assert_eq!(x.eval_char(&base, h).unwrap(), Rat::one());
        }
        // the standard point along the diagonal
        let basis = x.ray_basis();
        let q2 = x.standard_point(&basis, 2).unwrap();
        assert_eq!(x.hilbert_values(&q2).unwrap(), vec![rat_int(2), rat_int(2)]);

        // product formula on the quotient surface
        let y = catalog::quotient_surface(2, 1);
        let p = y
            .point_from_torus(&y.ray_basis(), &[rat_int(2), rat_int(3)])
            .unwrap();
        for h in y.hilbert_basis() {
            let mut expect = Rat::one();
            for (&ri, t) in y.ray_basis().iter().zip([rat_int(2), rat_int(3)]) {
                let e = int_to_i64(&pairing(&y.cone().rays()[ri], h).unwrap()).unwrap();
                expect *= crate::scalar::rat_pow(&t, e).unwrap();
            }
            assert_eq!(y.eval_char(&p, h).unwrap(), expect);
        }

        assert!(x
            .point_from_torus(&basis, &[rat_int(0), rat_int(1)])
            .is_err());
    }

    #[test]
    fn character_evaluation() {
        let x = catalog::affine_plane();
        let p = x
            .point_from_torus(&x.ray_basis(), &[rat_int(5), rat_int(2)])
            .unwrap();
        let m = mvec(&[1, 1]);
        let vx = x.eval_char(&p, &mvec(&[1, 0])).unwrap();
        let vy = x.eval_char(&p, &mvec(&[0, 1])).unwrap();
        assert_eq!(x.eval_char(&p, &m).unwrap(), vx * vy);

        // support definition: off-face characters vanish
        let axis_dir = mvec(&[1, 0]);
        let axis_ray = (0..x.dual_cone().rays().len())
            .find(|&i| x.dual_cone().rays()[i] == axis_dir)
            .unwrap();
        let axis = x.face_index_by_rays(&[axis_ray]).unwrap();
        let q = Point::new(&x, axis, vec![rat_int(3)]).unwrap();
        let off = x
            .hilbert_basis()
            .iter()
            .find(|h| !x.face_contains(axis, h))
            .unwrap()
            .clone();
        assert_eq!(x.eval_char(&q, &off).unwrap(), Rat::zero());
        assert!(x.eval_char(&q, &mvec(&[-1, 0])).is_err());
    }

    #[test]
    fn orbits_and_stabilizers() {
        let x = catalog::affine_plane();
        let open = x.base_point();
        assert_eq!(x.orbit_dim(&open), 2);
        assert!(x.stabilizer_sublattice(open.face).is_empty());

        // the fixed point
        let vertex = x.face_index_by_rays(&[]).unwrap();
        let fixed = Point::new(&x, vertex, vec![]).unwrap();
        assert_eq!(x.orbit_dim(&fixed), 0);
        assert_eq!(x.stabilizer_sublattice(vertex).len(), 2);

        // a point on an axis: one-dimensional orbit, one-dimensional stabilizer
        let values = vec![rat_int(0), rat_int(7)];
        let p = x.point_from_hilbert_values(&values).unwrap();
        assert_eq!(x.orbit_dim(&p), 1);
        assert_eq!(x.stabilizer_sublattice(p.face).len(), 1);
    }

    #[test]
    fn hilbert_value_round_trip() {
        let x = catalog::quotient_surface(2, 1);
        let p = x
            .point_from_torus(&x.ray_basis(), &[rat(2, 3), rat(-5, 7)])
            .unwrap();
        let values = x.hilbert_values(&p).unwrap();
        let q = x.point_from_hilbert_values(&values).unwrap();
        assert_eq!(p, q);
    }

    /// Character evaluation is factorization independent: products over any
    /// two decompositions of the same exponent agree.
    #[test]
    fn factorization_independence() {
        use rand::{Rng, SeedableRng};
        let x = catalog::quotient_surface(2, 1);
        let p = x
            .point_from_torus(&x.ray_basis(), &[rat(3, 2), rat(7, 5)])
            .unwrap();
        let h = x.hilbert_basis().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a: Vec<i64> = (0..h.len()).map(|_| rng.gen_range(0..4)).collect();
            let m = a
                .iter()
                .zip(&h)
                .fold(LatticeVector::zero(Space::M, 2), |acc, (&k, hv)| {
                    acc.add_scaled(hv, &Int::from(k))
                });
            let direct = x.eval_char(&p, &m).unwrap();
            let mut product = Rat::one();
            for (&k, hv) in a.iter().zip(&h) {
                product *= crate::scalar::rat_pow(&x.eval_char(&p, hv).unwrap(), k).unwrap();
            }
            assert_eq!(direct, product);
        }
    }

    #[test]
    fn smoothness_classification() {
        let x = catalog::quotient_surface(2, 1);
        let vertex = x.face_index_by_rays(&[]).unwrap();
        let origin = Point::new(&x, vertex, vec![]).unwrap();
        assert!(!x.is_smooth_point(&origin), "quotient singularity");
        assert!(x.is_smooth_point(&x.base_point()));

        let plane = catalog::affine_plane();
        let vertex = plane.face_index_by_rays(&[]).unwrap();
        let origin = Point::new(&plane, vertex, vec![]).unwrap();
        assert!(
            plane.is_smooth_point(&origin),
            "the plane is smooth everywhere"
        );
    }

    #[test]
    fn flexibility_certificates() {
        for x in catalog::toric_catalog() {
            let cert = x.flexibility_certificate(&x.base_point()).unwrap();
            assert_eq!(cert.rank, x.rank());
        }
        let x = catalog::affine_plane();
        let cert = x.flexibility_certificate(&x.base_point()).unwrap();
        assert_eq!(rat_rank(&cert.velocity_matrix), 2);
    }

    #[test]
    fn ml_invariant_trivial_on_catalog() {
        for x in catalog::toric_catalog() {
            let cert = x.ml_certificate();
            assert!(cert.trivial);
            assert_eq!(cert.joint_kernel_dim, 0);
            assert_eq!(cert.ray_span_rank, cert.ambient_rank);
        }
    }
}
