//! Independent verification helpers.
//!
//! These checks never reuse the construction they validate: subgroup
//! comparisons go through plain integer linear algebra, so they can serve
//! as oracles for the Gale dual machinery in tests and in the CLI.

use crate::lattice::{dual_inclusion, same_column_span, FgAbelianGroup, GaleDual, GroupHom, IntMatrix};

/// Report of the two four-term exact sequences attached to a map and its
/// Gale dual:
///
/// ```text
/// 0 -> DG^* -> Z^m -> N  -> coker          (dual of the dual map injects as ker beta)
/// 0 -> N^*  -> Z^m -> DG -> coker(dual)    (the functional lattice is ker of the dual map)
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    /// `im(N^* -> Z^m) = ker(dual map)` as sublattices of `Z^m`.
    pub functional_kernel_match: bool,
    /// `im(DG^* -> Z^m) = ker(beta)` as sublattices of `Z^m`.
    pub dual_functional_kernel_match: bool,
    /// `coker(dual map)` is isomorphic to the torsion subgroup of `N`.
    pub dual_cokernel_match: bool,
}

impl ExactnessReport {
    pub fn all_hold(&self) -> bool {
        self.functional_kernel_match && self.dual_functional_kernel_match && self.dual_cokernel_match
    }
}

/// Check both exact sequences for `beta : Z^m -> N` against its Gale dual.
pub fn check_gale_exactness(beta: &GroupHom, gd: &GaleDual) -> ExactnessReport {
    let m = beta.domain.num_coords();

    // im(N^* -> Z^m): columns are the functionals paired against beta's columns
    let functional_image = dual_inclusion(beta);
    let dual_kernel = gd.dual_map.kernel_sublattice();
    let functional_kernel_match = if functional_image.cols() == 0 && dual_kernel.cols() == 0 {
        true
    } else {
        same_column_span(
            &pad_columns(&functional_image, m),
            &pad_columns(&dual_kernel, m),
        )
    };

    // im(DG^* -> Z^m) via the transpose of the dual map's free rows
    let dual_functional_image = dual_inclusion(&gd.dual_map);
    let beta_kernel = beta.kernel_sublattice();
    let dual_functional_kernel_match = same_column_span(
        &pad_columns(&dual_functional_image, m),
        &pad_columns(&beta_kernel, m),
    );

    // coker(dual map) must be the torsion subgroup of N
    let (coker, _) = crate::lattice::cokernel(&gd.dual_map);
    let expected = FgAbelianGroup {
        free_rank: 0,
        torsion: beta.codomain.torsion.clone(),
    };
    let dual_cokernel_match = coker == expected;

    ExactnessReport {
        functional_kernel_match,
        dual_functional_kernel_match,
        dual_cokernel_match,
    }
}

fn pad_columns(m: &IntMatrix, rows: usize) -> IntMatrix {
    if m.cols() == 0 {
        IntMatrix::zeros(rows, 0)
    } else {
        m.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gale_dual, FgAbelianGroup, GroupHom, IntMatrix};
    use num::bigint::BigInt;

    #[test]
    fn exactness_on_known_cases() {
        // P(1,2)
        let beta = GroupHom::new(
            FgAbelianGroup::free(2),
            FgAbelianGroup::free(1),
            IntMatrix::from_i64_rows(&[vec![1, -2]]),
        )
        .unwrap();
        let gd = gale_dual(&beta).unwrap();
        assert!(check_gale_exactness(&beta, &gd).all_hold());

        // gerbe Z/2 + Z/4
        let n = FgAbelianGroup::new(0, vec![BigInt::from(2), BigInt::from(4)]).unwrap();
        let beta = GroupHom::new(
            FgAbelianGroup::free(1),
            n,
            IntMatrix::from_i64_rows(&[vec![1], vec![1]]),
        )
        .unwrap();
        let gd = gale_dual(&beta).unwrap();
        assert!(check_gale_exactness(&beta, &gd).all_hold());
    }
}
