use std::sync::Arc;

use qspicb_core::{
    compute, Convention, CoxeterGroup, CoxeterType, HeckeAlgebra, Lattice, LaurentPoly, QSPConfig,
};

// In a dihedral group every Kazhdan-Lusztig polynomial is 1, so the
// canonical basis has coefficient q^(l(w)-l(y)) at each y < w.
fn dihedral_closed_form(kind: CoxeterType, s: usize) {
    let group = Arc::new(CoxeterGroup::new(kind, s).unwrap());
    let t = HeckeAlgebra::new(group.clone())
        .parabolic_kl_matrix(&[])
        .unwrap();
    let index: Vec<usize> = t
        .labels
        .iter()
        .map(|l| group.index_of(l).unwrap())
        .collect();
    for (f, &w) in index.iter().enumerate() {
        for (g, &y) in index.iter().enumerate() {
            let expected = if group.bruhat_le(y, w) {
                LaurentPoly::q_pow((group.length(w) - group.length(y)) as i64)
            } else {
                LaurentPoly::zero()
            };
            assert_eq!(t.entry(g, f), expected, "y={y} w={w}");
        }
    }
}

#[test]
fn kl_matrices_of_dihedral_groups() {
    dihedral_closed_form(CoxeterType::A, 3);
    dihedral_closed_form(CoxeterType::B, 2);
}

const VV_PART3: &str = "row;col;value
(-1/2,-1/2);(-1/2,-1/2);1
(-1/2,-1/2);(-1/2,1/2);q^2
(-1/2,1/2);(-1/2,1/2);1
(1/2,-1/2);(-1/2,1/2);q
(-1/2,-1/2);(1/2,-1/2);q
(1/2,-1/2);(1/2,-1/2);1
(-1/2,-1/2);(1/2,1/2);q^3
(-1/2,1/2);(1/2,1/2);q
(1/2,-1/2);(1/2,1/2);q^2
(1/2,1/2);(1/2,1/2);1
";

const VV_PART2: &str = "row;col;value
(-1/2,-1/2);(-1/2,-1/2);1
(-1/2,1/2);(-1/2,-1/2);q^-2
(1/2,-1/2);(-1/2,-1/2);q^-1
(1/2,1/2);(-1/2,-1/2);q^-3
(-1/2,1/2);(-1/2,1/2);1
(1/2,1/2);(-1/2,1/2);q^-1
(-1/2,1/2);(1/2,-1/2);q^-1
(1/2,-1/2);(1/2,-1/2);1
(1/2,1/2);(1/2,-1/2);q^-2
(1/2,1/2);(1/2,1/2);1
";

#[test]
fn rank_two_square_of_the_natural_module() {
    for (conv, expected) in [(Convention::Part3, VV_PART3), (Convention::Part2, VV_PART2)] {
        let comp = compute(&[0, 0], &[], &QSPConfig::new(2, conv)).unwrap();
        assert_eq!(comp.canonical.to_csv(), expected, "{conv:?}");
    }
}

#[test]
fn part2_dual_basis_uses_the_complementary_lattice() {
    let comp = compute(&[0, 1], &[], &QSPConfig::new(2, Convention::Part2)).unwrap();
    let dual = comp.dual().unwrap();
    assert!(dual.is_unitriangular());
    assert!(dual.off_diagonal_in(Lattice::QZq));
    assert_eq!(dual.lattice, Lattice::QZq);
}
