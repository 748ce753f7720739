use geocount::exact::{
    enumerate_lattice_points_in_ball, int, integer_span_basis, rat, smith_form, smith_normal_form, solve_in_lattice,
    Rational, RationalMatrix, RationalVector,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix(rows: &[Vec<i64>]) -> RationalMatrix {
    let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    RationalMatrix::from_rows(&rows).unwrap()
}

fn int_matrix(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect()
}

fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect()).collect()
}

/// Unimodular matrix from a sequence of row additions and swaps.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> RationalMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(a, b, k) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            rows[a].iter_mut().for_each(|x| *x = -*x);
        } else if k == 0 {
            rows.swap(a, b);
        } else {
            let add: Vec<i64> = rows[b].iter().map(|x| k * x).collect();
            rows[a].iter_mut().zip(add).for_each(|(x, y)| *x += y);
        }
    }
    matrix(&rows)
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..8)
}

proptest! {
    #[test]
    fn smith_form_is_invariant_under_unimodular_change(m in small_matrix(), left in ops(), right in ops()) {
        let a = matrix(&m);
        let u = unimodular(a.rows(), &left);
        let v = unimodular(a.cols(), &right);
        let b = u.mul(&a).mul(&v);
        prop_assert_eq!(smith_normal_form(&a).unwrap(), smith_normal_form(&b).unwrap());
    }

    #[test]
    fn smith_transforms_diagonalize(m in small_matrix()) {
        let a = matrix(&m);
        let f = smith_form(&a).unwrap();
        let d = mul(&mul(&f.left, &int_matrix(&a)), &f.right);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let expected = if i == j { f.diagonal[i].clone() } else { BigInt::from(0) };
                prop_assert_eq!(x, &expected);
            }
        }
        for w in f.diagonal[..f.rank].windows(2) {
            prop_assert!(&w[1] % &w[0] == BigInt::from(0), "divisibility chain broken: {:?}", f.diagonal);
        }
        let det = |x: &Vec<Vec<BigInt>>| {
            let rows: Vec<Vec<Rational>> =
                x.iter().map(|r| r.iter().map(|v| Rational::from_integer(v.clone())).collect()).collect();
            RationalMatrix::from_rows(&rows).unwrap().determinant()
        };
        prop_assert_eq!(det(&f.left).abs(), int(1));
        prop_assert_eq!(det(&f.right).abs(), int(1));
        // for square nonsingular input the product of invariant factors is |det|
        if a.is_square() && a.rank() == a.rows() {
            let prod: BigInt = f.diagonal.iter().product();
            prop_assert_eq!(Rational::from_integer(prod), a.determinant().abs());
        }
    }

    #[test]
    fn ball_enumeration_matches_box_search(
        basis in prop::collection::vec(-2i64..=2, 4),
        center in prop::collection::vec(-12i64..=12, 2),
        radius in 0i64..=16,
        strict in any::<bool>(),
    ) {
        let b = matrix(&[basis[0..2].to_vec(), basis[2..4].to_vec()]);
        prop_assume!(!b.determinant().is_zero());
        let gram = matrix(&[vec![2, 1], vec![1, 1]]);
        let c = RationalVector::new(center.iter().map(|&x| rat(x, 4)).collect());
        let r2 = rat(radius, 4);
        let found = enumerate_lattice_points_in_ball(&b, &gram, &c, &r2, strict).unwrap();

        // integer oracle on 4·(Bn + c)
        let mut expected = Vec::new();
        for x in -30i64..=30 {
            for y in -30i64..=30 {
                let px = 4 * (basis[0] * x + basis[1] * y) + center[0];
                let py = 4 * (basis[2] * x + basis[3] * y) + center[1];
                let n = 2 * px * px + 2 * px * py + py * py;
                if if strict { n < 4 * radius } else { n <= 4 * radius } {
                    expected.push(vec![BigInt::from(x), BigInt::from(y)]);
                }
            }
        }
        expected.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn lattice_coordinates_round_trip(
        basis in prop::collection::vec(-3i64..=3, 4),
        denom in 1i64..=4,
        coords in prop::collection::vec(-20i64..=20, 2),
    ) {
        let rows: Vec<Vec<Rational>> = vec![
            vec![rat(basis[0], denom), rat(basis[1], denom)],
            vec![rat(basis[2], denom), rat(basis[3], denom)],
        ];
        let b = RationalMatrix::from_rows(&rows).unwrap();
        prop_assume!(b.rank() == 2);
        let v = b.mul_vec(&RationalVector::from_integers(&coords));
        let expected: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        prop_assert_eq!(solve_in_lattice(&b, &v).unwrap(), Some(expected));

        let det = b.determinant().abs();
        // a point off the lattice: add a fraction smaller than any lattice shift
        let nudge = RationalVector::new(vec![det / int(2 * 9 * 9 * 16 + 1), int(0)]);
        prop_assert_eq!(solve_in_lattice(&b, &(&v + &nudge)).unwrap(), None);
    }

    #[test]
    fn span_basis_ignores_generator_order(
        gens in prop::collection::vec(prop::collection::vec(-4i64..=4, 2), 1..5),
        rotate in 0usize..5,
    ) {
        let vectors: Vec<RationalVector> = gens.iter().map(|g| RationalVector::new(vec![rat(g[0], 2), int(g[1])])).collect();
        let mut shuffled = vectors.clone();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = integer_span_basis(2, &vectors).unwrap();
        let b = integer_span_basis(2, &shuffled).unwrap();
        prop_assert_eq!(&a, &b);
        for v in &vectors {
            prop_assert!(solve_in_lattice(&a, v).unwrap().is_some());
        }
    }
}
