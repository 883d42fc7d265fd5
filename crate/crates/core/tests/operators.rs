use dfsl_core::{
    apply, build_operator, verify_by_parts, Backend, DenseMatrix, FracOrder, GridFunction,
    GridSpec, OperatorKind,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Q = BigRational;

fn order(n: i64, d: i64) -> FracOrder {
    FracOrder::new(n, d, Backend::ExactRational).unwrap()
}

const ORDERS: [(i64, i64); 6] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];

/// Sum weights `Γ(j+nu)/(Γ(nu) j!)` as an independent product.
fn sum_weight(nu: &Q, j: usize) -> Q {
    (0..j).fold(Q::one(), |acc, i| {
        let i = Q::from_integer(BigInt::from(i));
        acc * (i.clone() + nu.clone()) / (i + Q::one())
    })
}

/// Evaluates the left R-L difference at interior index `i` by literally
/// forming the order `1-mu` sum at `t` and `t-1` with zero exterior values.
fn rl_left_diff_pointwise(mu: &FracOrder, x: &[Q], i: usize) -> Q {
    let nu = Q::one() - mu.as_rational();
    let sum_at = |k: Option<usize>| -> Q {
        match k {
            None => Q::zero(),
            Some(k) => (0..=k).fold(Q::zero(), |acc, s| {
                acc + sum_weight(&nu, k - s) * x[s].clone()
            }),
        }
    };
    sum_at(Some(i)) - sum_at(i.checked_sub(1))
}

/// Right R-L difference: minus the forward difference of the order `1-mu` right sum.
fn rl_right_diff_pointwise(mu: &FracOrder, x: &[Q], i: usize) -> Q {
    let nu = Q::one() - mu.as_rational();
    let n = x.len();
    let sum_at = |k: usize| -> Q {
        if k >= n {
            return Q::zero();
        }
        (k..n).fold(Q::zero(), |acc, s| {
            acc + sum_weight(&nu, s - k) * x[s].clone()
        })
    };
    -(sum_at(i + 1) - sum_at(i))
}

fn sample(n: usize, salt: i64) -> Vec<Q> {
    (0..n as i64)
        .map(|i| Q::from_integer(BigInt::from((i * 7 + salt * 3) % 11 - 5)))
        .collect()
}

#[test]
fn nabla_differences_match_pointwise_definitions() {
    let g = GridSpec::with_interior(7).unwrap();
    for (num, den) in ORDERS {
        let mu = order(num, den);
        let x = sample(7, num + den);
        let xf = GridFunction::new(g.clone(), x.clone()).unwrap();
        let left = apply(
            &build_operator::<Q>(OperatorKind::NablaLeftDiff, &mu, &g).unwrap(),
            &xf,
        )
        .unwrap();
        let right = apply(
            &build_operator::<Q>(OperatorKind::NablaRightDiff, &mu, &g).unwrap(),
            &xf,
        )
        .unwrap();
        for i in 0..7 {
            assert_eq!(
                left.values()[i],
                rl_left_diff_pointwise(&mu, &x, i),
                "mu = {mu}, i = {i}"
            );
            assert_eq!(
                right.values()[i],
                rl_right_diff_pointwise(&mu, &x, i),
                "mu = {mu}, i = {i}"
            );
        }
    }
}

#[test]
fn right_operators_are_transposes() {
    for n in [3, 8, 32] {
        let g = GridSpec::with_interior(n).unwrap();
        for (num, den) in ORDERS {
            let mu = order(num, den);
            for kind in [
                OperatorKind::NablaLeftSum,
                OperatorKind::NablaLeftDiff,
                OperatorKind::DeltaLeftDiff,
            ] {
                let left = build_operator::<Q>(kind, &mu, &g).unwrap();
                let right = build_operator::<Q>(kind.partner(), &mu, &g).unwrap();
                assert_eq!(
                    right.entries,
                    left.entries.transpose(),
                    "{kind} mu = {mu} n = {n}"
                );
            }
        }
    }
}

#[test]
fn toeplitz_and_triangular_structure() {
    let g = GridSpec::with_interior(12).unwrap();
    let mu = order(2, 3);
    for kind in OperatorKind::ALL {
        let m = build_operator::<Q>(kind, &mu, &g).unwrap().entries;
        for i in 0..12 {
            for j in 0..12 {
                let (lag, zero_side) = if kind.is_left() {
                    (i as i64 - j as i64, j > i)
                } else {
                    (j as i64 - i as i64, i > j)
                };
                if zero_side {
                    assert!(m[(i, j)].is_zero(), "{kind} ({i},{j})");
                } else {
                    let first = if kind.is_left() {
                        m[(lag as usize, 0)].clone()
                    } else {
                        m[(0, lag as usize)].clone()
                    };
                    assert_eq!(m[(i, j)], first, "{kind} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn classical_reduction() {
    let g = GridSpec::with_interior(10).unwrap();
    let one = FracOrder::one(Backend::ExactRational);
    let mut backward = DenseMatrix::<Q>::identity(10);
    for i in 1..10 {
        backward[(i, i - 1)] = -Q::one();
    }
    let diff = build_operator::<Q>(OperatorKind::NablaLeftDiff, &one, &g).unwrap();
    assert_eq!(diff.entries, backward);
    let sum = build_operator::<Q>(OperatorKind::NablaLeftSum, &one, &g).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            assert_eq!(
                sum.entries[(i, j)],
                if j <= i { Q::one() } else { Q::zero() }
            );
        }
    }
}

#[test]
fn difference_undoes_sum() {
    for n in [2, 5, 17, 32] {
        let g = GridSpec::with_interior(n).unwrap();
        for (num, den) in [(1, 4), (1, 2), (3, 4)] {
            let mu = order(num, den);
            let d = build_operator::<Q>(OperatorKind::NablaLeftDiff, &mu, &g).unwrap();
            let s = build_operator::<Q>(OperatorKind::NablaLeftSum, &mu, &g).unwrap();
            assert_eq!(
                d.entries.matmul(&s.entries),
                DenseMatrix::identity(n),
                "mu = {mu} n = {n}"
            );
        }
    }
}

/// `Σ_s u(s) Σ_k L[s][k] v(k) - Σ_s v(s) Σ_k R[s][k] u(k)` by explicit double loops.
fn by_parts_double_sum(l: &DenseMatrix<Q>, r: &DenseMatrix<Q>, u: &[Q], v: &[Q]) -> Q {
    let n = u.len();
    let mut total = Q::zero();
    for s in 0..n {
        for k in 0..n {
            total += u[s].clone() * l[(s, k)].clone() * v[k].clone();
            total -= v[s].clone() * r[(s, k)].clone() * u[k].clone();
        }
    }
    total
}

#[test]
fn by_parts_double_sum_oracle() {
    let g = GridSpec::with_interior(8).unwrap();
    let mu = order(1, 2);
    let l = build_operator::<Q>(OperatorKind::DeltaLeftDiff, &mu, &g).unwrap();
    let r = build_operator::<Q>(OperatorKind::DeltaRightDiff, &mu, &g).unwrap();
    for salt in 0..5 {
        let (u, v) = (sample(8, salt), sample(8, salt + 17));
        assert!(by_parts_double_sum(&l.entries, &r.entries, &u, &v).is_zero());
    }
    assert!(verify_by_parts(&l, &r, 20, 5).unwrap().is_zero());
}

#[test]
fn unmatched_pair_is_rejected() {
    let g = GridSpec::with_interior(6).unwrap();
    let mu = order(1, 2);
    let l = build_operator::<Q>(OperatorKind::NablaLeftDiff, &mu, &g).unwrap();
    let s = build_operator::<Q>(OperatorKind::NablaRightSum, &mu, &g).unwrap();
    assert!(verify_by_parts(&l, &s, 3, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn by_parts_holds_exactly(den in 2i64..12, num_frac in 0.0f64..1.0, n in 2usize..20, seed in any::<u64>(), gl in any::<bool>()) {
        let num = ((num_frac * den as f64) as i64).clamp(1, den);
        let mu = order(num, den);
        let g = GridSpec::with_interior(n).unwrap();
        let (lk, rk) = if gl {
            (OperatorKind::DeltaLeftDiff, OperatorKind::DeltaRightDiff)
        } else {
            (OperatorKind::NablaLeftDiff, OperatorKind::NablaRightDiff)
        };
        let l = build_operator::<Q>(lk, &mu, &g).unwrap();
        let r = build_operator::<Q>(rk, &mu, &g).unwrap();
        prop_assert!(verify_by_parts(&l, &r, 3, seed).unwrap().is_zero());
    }
}
