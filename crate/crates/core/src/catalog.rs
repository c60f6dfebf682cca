//! Reference instances with known behaviour, used by tests, benchmarks and
//! the command-line examples.

use crate::classes::{ClassSpec, GaussianRational, Instance, Mode};

fn q(a: i64, b: i64) -> GaussianRational {
    GaussianRational::frac(a, b)
}

fn build(mode: Mode, classes: Vec<Vec<(GaussianRational, usize)>>) -> Instance {
    let specs = classes
        .iter()
        .map(|c| ClassSpec::diagonal(mode, c).expect("catalog class is valid"))
        .collect();
    Instance::new(mode, specs).expect("catalog instance is valid")
}

fn neg_sum(vals: &[&GaussianRational]) -> GaussianRational {
    let mut s = GaussianRational::zero();
    for v in vals {
        s += *v;
    }
    -&s
}

/// Three regular 2x2 classes with generic eigenvalues.
pub fn hypergeometric_n2() -> Instance {
    build(
        Mode::Additive,
        vec![
            vec![(q(0, 1), 1), (q(1, 3), 1)],
            vec![(q(0, 1), 1), (q(-1, 2), 1)],
            vec![(q(1, 4), 1), (q(-1, 12), 1)],
        ],
    )
}

/// Multiplicities `(1,1,1), (1,1,1), (2,1)` with generic eigenvalues.
pub fn hypergeometric_n3() -> Instance {
    let fixed = [q(1, 2), q(1, 3), q(-1, 1), q(1, 5), q(1, 7), q(1, 11), q(2, 13)];
    let last = neg_sum(&fixed.iter().collect::<Vec<_>>());
    build(
        Mode::Additive,
        vec![
            vec![(q(1, 2), 1), (q(1, 3), 1), (q(-1, 1), 1)],
            vec![(q(1, 5), 1), (q(1, 7), 1), (q(1, 11), 1)],
            vec![(q(1, 13), 2), (last, 1)],
        ],
    )
}

/// `n = 4`, classes 2 and 3 with multiplicities `(2,2)`, generic eigenvalues.
pub fn case_a_n4() -> Instance {
    let rest = [q(1, 2), q(1, 3), q(1, 5), q(2, 7), q(2, 11), q(2, 13), q(2, 17)];
    let last = neg_sum(&rest.iter().collect::<Vec<_>>());
    build(
        Mode::Additive,
        vec![
            vec![(q(1, 2), 1), (q(1, 3), 1), (q(1, 5), 1), (last, 1)],
            vec![(q(1, 7), 2), (q(1, 11), 2)],
            vec![(q(1, 13), 2), (q(1, 17), 2)],
        ],
    )
}

/// The `(2,2), (2,2)` pattern with eigenvalues that admit direct sums of two
/// irreducible 2x2 tuples: `a + b + mu + nu + eta + zeta = 0` and
/// `c + d + mu + nu + eta + zeta = 0`.
pub fn case_a_reducible_n4() -> Instance {
    let (mu, nu, eta, zeta) = (q(1, 7), q(1, 11), q(1, 13), q(1, 17));
    let (a, c) = (q(1, 3), q(1, 19));
    let b = neg_sum(&[&a, &mu, &nu, &eta, &zeta]);
    let d = neg_sum(&[&c, &mu, &nu, &eta, &zeta]);
    build(
        Mode::Additive,
        vec![
            vec![(a, 1), (b, 1), (c, 1), (d, 1)],
            vec![(mu, 2), (nu, 2)],
            vec![(eta, 2), (zeta, 2)],
        ],
    )
}

/// Rigid pattern `(1,1,1,1), (2,2), (2,1,1)` whose eigenvalues satisfy the
/// two complementary 2-relations `a + b + mu + nu + eta + xi = 0` and
/// `c + d + mu + nu + eta + zeta = 0`. Reducible tuples with trivial
/// centralizer exist and irreducible ones do not.
pub fn rigid_reducible_n4(mode: Mode) -> Instance {
    let (a, b, c, d) = (q(1, 3), q(1, 7), q(1, 19), q(1, 23));
    let (mu, nu, eta) = (q(1, 11), q(1, 13), q(1, 17));
    let xi = neg_sum(&[&a, &b, &mu, &nu, &eta]);
    let zeta = neg_sum(&[&c, &d, &mu, &nu, &eta]);
    build(
        mode,
        vec![
            vec![(a, 1), (b, 1), (c, 1), (d, 1)],
            vec![(mu, 2), (nu, 2)],
            vec![(eta, 2), (xi, 1), (zeta, 1)],
        ],
    )
}

/// `n = 4`, five classes: one regular class and four with multiplicities
/// `(3,1)`. The only relation is `lambda + mu_2 + ... + mu_5 = 0` through
/// the triple eigenvalues (and its complement).
pub fn single_relation_n4() -> Instance {
    let mus = [q(1, 1), q(2, 1), q(4, 1), q(8, 1)];
    let nus = [q(1, 3), q(1, 5), q(1, 7), q(1, 11)];
    let (l2, l3) = (q(100, 13), q(1000, 17));
    let mut tail: Vec<&GaussianRational> = nus.iter().collect();
    let thirty = q(30, 1);
    tail.extend([&l2, &l3, &thirty]);
    let l4 = neg_sum(&tail);
    let mut classes = vec![vec![(q(-15, 1), 1), (l2, 1), (l3, 1), (l4, 1)]];
    for (mu, nu) in mus.into_iter().zip(nus) {
        classes.push(vec![(mu, 3), (nu, 1)]);
    }
    build(Mode::Additive, classes)
}

/// All catalog entries with their names.
pub fn all() -> Vec<(&'static str, Instance)> {
    vec![
        ("hypergeometric-n2", hypergeometric_n2()),
        ("hypergeometric-n3", hypergeometric_n3()),
        ("case-a-n4", case_a_n4()),
        ("case-a-reducible-n4", case_a_reducible_n4()),
        ("rigid-reducible-n4", rigid_reducible_n4(Mode::Multiplicative)),
        ("rigid-reducible-n4-additive", rigid_reducible_n4(Mode::Additive)),
        ("single-relation-n4", single_relation_n4()),
    ]
}
