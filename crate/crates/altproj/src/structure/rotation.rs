//! Plane rotation of a two-vector basis making the supports disjoint,
//! when the per-index coefficient pairs concentrate on two orthogonal
//! directions.

use crate::l2core::SeqVec;
use crate::projections::Basis;
use crate::tol::{ANGLE_CLUSTER_TOL, DIRECTION_FLOOR};
use crate::{Error, Result};

/// A basis rotated to disjoint supports, with the plane rotation that
/// produced it: `w_i = sum_j coefficients[i][j] v_j`.
#[derive(Debug, Clone)]
pub struct Rotation {
    pub basis: Basis,
    pub coefficients: [[f64; 2]; 2],
}

/// Search for a rotation of span{v1, v2} whose two output vectors have
/// disjoint supports.
///
/// Every index k contributes the plane point (v1_k, v2_k). A rotation
/// sending w2 to zero at k must be orthogonal to that point, so disjoint
/// supports are possible exactly when the points lie on two orthogonal
/// lines through the origin (a line and its perpendicular). Directions
/// are clustered modulo pi with tolerance 1e-9; two clusters at right
/// angles yield the rotation, anything else yields `None`.
pub fn find_disjoint_rotation(basis: &Basis) -> Result<Option<Rotation>> {
    if basis.len() != 2 {
        return Err(Error::Unsupported(format!(
            "the rotation search handles exactly two vectors, got {}",
            basis.len()
        )));
    }
    let v1 = basis.vector(0);
    let v2 = basis.vector(1);

    // Cluster representatives: (angle mod pi, weight, smallest index).
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    for (idx, (a, b)) in v1.as_slice().iter().zip(v2.as_slice()).enumerate() {
        let weight = a.hypot(*b);
        if weight <= DIRECTION_FLOOR {
            continue;
        }
        let angle = fold_to_half_turn(b.atan2(*a));
        match clusters
            .iter_mut()
            .find(|(repr, _, _)| half_turn_distance(*repr, angle) <= ANGLE_CLUSTER_TOL)
        {
            Some(cluster) => {
                if weight > cluster.1 {
                    cluster.0 = angle;
                    cluster.1 = weight;
                }
            }
            None => clusters.push((angle, weight, idx)),
        }
        if clusters.len() > 2 {
            return Ok(None);
        }
    }

    let [first, second] = match clusters.as_slice() {
        // A single direction would make the two vectors proportional,
        // which orthonormality rules out; treat it as no rotation.
        [] | [_] => return Ok(None),
        [c1, c2] => {
            // Order clusters by their smallest participating index so the
            // first output vector covers the earliest coordinates.
            if c1.2 <= c2.2 {
                [*c1, *c2]
            } else {
                [*c2, *c1]
            }
        }
        _ => unreachable!("capped at two clusters above"),
    };
    if half_turn_distance(first.0, second.0 + std::f64::consts::FRAC_PI_2) > 1e-9 {
        return Ok(None);
    }

    // Exact plane rotation by the first cluster angle: orthogonal by
    // construction, so the rotated pair inherits orthonormality.
    let mut psi = first.0;
    // Canonical orientation: the first output keeps a positive entry at
    // the first cluster's leading index.
    let lead = first.2;
    if psi.cos() * v1.as_slice()[lead] + psi.sin() * v2.as_slice()[lead] < 0.0 {
        psi += std::f64::consts::PI;
    }
    let (s, c) = psi.sin_cos();
    let w1: Vec<f64> =
        v1.as_slice().iter().zip(v2.as_slice()).map(|(a, b)| c * a + s * b).collect();
    let w2: Vec<f64> =
        v1.as_slice().iter().zip(v2.as_slice()).map(|(a, b)| -s * a + c * b).collect();
    let mut w2 = SeqVec::from_entries(w2);
    let mut sign = 1.0;
    if w2.as_slice()[second.2] < 0.0 {
        sign = -1.0;
        w2 = w2.scaled(-1.0);
    }
    let rotated = Basis::orthonormal(vec![SeqVec::from_entries(w1), w2])?;
    Ok(Some(Rotation { basis: rotated, coefficients: [[c, s], [-s * sign, c * sign]] }))
}

/// Map an angle to [0, pi): directions modulo sign.
fn fold_to_half_turn(theta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut t = theta % pi;
    if t < 0.0 {
        t += pi;
    }
    if t >= pi {
        t -= pi;
    }
    t
}

/// Distance between two direction angles identified modulo pi.
fn half_turn_distance(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let diff = (fold_to_half_turn(a) - fold_to_half_turn(b)).abs();
    diff.min(pi - diff)
}
