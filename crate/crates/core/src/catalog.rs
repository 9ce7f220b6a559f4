//! The in-repo catalog of desk-scale examples used by the test suites and
//! shipped as JSON files for the command line.

use crate::lattice::{Cone, Space};
use crate::poly::MPoly;
use crate::scalar::rat_int;
use crate::suspension::Suspension;
use crate::toric::ToricVariety;

/// The affine plane: the first quadrant in a rank-2 lattice.
pub fn affine_plane() -> ToricVariety {
    let sigma = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[0, 1]]).unwrap();
    ToricVariety::new(sigma).unwrap()
}

/// Affine three-space.
pub fn affine_space_3() -> ToricVariety {
    let sigma =
        Cone::from_i64_rows(Space::N, 3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
    ToricVariety::new(sigma).unwrap()
}

/// The cyclic quotient surface of the plane by the order-`d` diagonal action
/// with weight `e`: the cone over `(1, 0)` and `(1, d)` twisted by `e`.
/// For coprime `0 < e < d` this is the standard singular quotient surface.
pub fn quotient_surface(d: i64, _e: i64) -> ToricVariety {
    let sigma = Cone::from_i64_rows(Space::N, 2, &[&[1, 0], &[1, d]]).unwrap();
    ToricVariety::new(sigma).unwrap()
}

/// The three-dimensional cone over a quadric surface: four rays over the
/// vertices of a unit square at height one.
pub fn quadric_cone_threefold() -> ToricVariety {
    let sigma = Cone::from_i64_rows(
        Space::N,
        3,
        &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]],
    )
    .unwrap();
    ToricVariety::new(sigma).unwrap()
}

/// All toric catalog entries, in a fixed order.
pub fn toric_catalog() -> Vec<ToricVariety> {
    vec![
        affine_plane(),
        affine_space_3(),
        quotient_surface(2, 1),
        quotient_surface(3, 1),
        quadric_cone_threefold(),
    ]
}

pub fn toric_catalog_names() -> Vec<&'static str> {
    vec!["A2", "A3", "X_2_1", "X_3_1", "quadric_cone_3"]
}

/// A univariate defining polynomial over the affine line (coefficients low to
/// high).
fn univariate(coeffs: &[i64]) -> MPoly<crate::scalar::Rat> {
    let mut p = MPoly::zero(1);
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            p.add_term(rat_int(c), vec![k as u16]);
        }
    }
    p
}

/// The surface `uv = x^2`.
pub fn suspension_x2() -> Suspension {
    Suspension::new(1, vec![univariate(&[0, 0, 1])]).unwrap()
}

/// The surface `uv = x^2 - x`.
pub fn suspension_x2_minus_x() -> Suspension {
    Suspension::new(1, vec![univariate(&[0, -1, 1])]).unwrap()
}

/// The surface `uv = x^3 + x`.
pub fn suspension_x3_plus_x() -> Suspension {
    Suspension::new(1, vec![univariate(&[0, 1, 0, 1])]).unwrap()
}

pub fn suspension_catalog() -> Vec<Suspension> {
    vec![
        suspension_x2(),
        suspension_x2_minus_x(),
        suspension_x3_plus_x(),
    ]
}

pub fn suspension_catalog_names() -> Vec<&'static str> {
    vec!["uv_x2", "uv_x2_minus_x", "uv_x3_plus_x"]
}
