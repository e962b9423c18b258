//! The named quantum semigroups: `QMap(X_n)`, `QMap(qs(M_2))` and the
//! commutant of the swap automorphism of `M_2`.

use std::sync::Arc;

use crate::ncpoly::NCPoly;
use crate::presentation::{Generator, Presentation};
use crate::scalar::Scalar;
use crate::semigroup::{Action, FDCStar, MElem, QuantumSemigroup};

fn gens(names: &[&str], sa: &[&str]) -> Vec<Generator> {
    names.iter().map(|n| Generator { name: n.to_string(), self_adjoint: sa.contains(n) }).collect()
}

/// Name of the matrix entry `a_{ij}` (1-based). Indices are separated by `_`
/// once they stop being single digits.
pub fn entry_name(i: usize, j: usize, n: usize) -> String {
    if n < 10 {
        format!("a{i}{j}")
    } else {
        format!("a{i}_{j}")
    }
}

/// `QMap(X_n)`: projections `a_ij` whose rows are partitions of unity,
/// `Δ(a_ij) = Σ_k a_ik ⊗ a_kj`, `ε(a_ij) = δ_ij`, `Φ(e_j) = Σ_i e_i ⊗ a_ij`.
pub fn qmap_xn(n: usize) -> QuantumSemigroup {
    assert!(n >= 1, "QMap(X_n) needs n >= 1");
    let names: Vec<String> = (1..=n).flat_map(|i| (1..=n).map(move |j| entry_name(i, j, n))).collect();
    let generators = names.iter().map(|s| Generator { name: s.clone(), self_adjoint: true }).collect();
    let idx = |i: usize, j: usize| ((i - 1) * n + (j - 1)) as u16;
    let rows = (1..=n).map(|i| (1..=n).map(|j| idx(i, j)).collect()).collect();
    let pres = Arc::new(Presentation::new(format!("QMap(X{n})"), generators, Vec::new(), rows).expect("valid"));
    let a = |i: usize, j: usize| NCPoly::letter(pres.letter(idx(i, j)));
    let mut delta = Vec::new();
    let mut counit = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let d = (1..=n).fold(NCPoly::zero(), |acc, k| &acc + &(&a(i, k) * &a(k, j).on_leg(1)));
            delta.push(d);
            counit.push(if i == j { Scalar::one() } else { Scalar::zero() });
        }
    }
    let space = FDCStar::points(n).expect("n >= 1");
    let images = (1..=n).map(|j| MElem((1..=n).map(|i| a(i, j)).collect())).collect();
    let action = Action { space, generator_images: images };
    QuantumSemigroup::new(format!("QMap(X{n})"), pres, delta, counit, Some(action)).expect("valid")
}

/// `QMap(qs(M_2))`, the entries of `Φ(n) = [[alpha, beta], [gamma, delta]]`.
pub fn qmap_m2() -> QuantumSemigroup {
    let free = Presentation::free("QMap(M2)", gens(&["alpha", "beta", "gamma", "delta"], &[])).expect("valid");
    let e = |s: &str| free.expr(s).expect("builtin expression");
    let relations = vec![
        e("alpha* alpha + gamma* gamma + alpha alpha* + beta beta* - 1"),
        e("alpha* beta + gamma* delta + alpha gamma* + beta delta*"),
        e("beta* beta + delta* delta + gamma gamma* + delta delta* - 1"),
        e("alpha^2 + beta gamma"),
        e("alpha beta + beta delta"),
        e("gamma alpha + delta gamma"),
        e("gamma beta + delta^2"),
    ];
    let pres = Arc::new(Presentation::new("QMap(M2)", free.generators().to_vec(), relations, vec![]).expect("valid"));
    let t = |s: &str| {
        let r = |_leg: u8, name: &str| crate::ncpoly::LetterNames::resolve(pres.as_ref(), 0, name);
        crate::dsl::parse_tensor_expression(s, &r, 2).expect("builtin expression")
    };
    let delta = vec![
        t("alpha alpha* (*) alpha + beta beta* (*) alpha + alpha (*) beta + alpha* (*) gamma + alpha* alpha (*) delta + gamma* gamma (*) delta"),
        t("alpha gamma* (*) alpha + beta delta* (*) alpha + beta (*) beta + gamma* (*) gamma + alpha* beta (*) delta + gamma* delta (*) delta"),
        t("gamma alpha* (*) alpha + delta beta* (*) alpha + gamma (*) beta + beta* (*) gamma + beta* alpha (*) delta + delta* gamma (*) delta"),
        t("gamma gamma* (*) alpha + delta delta* (*) alpha + delta (*) beta + delta* (*) gamma + beta* beta (*) delta + delta* delta (*) delta"),
    ];
    let counit = vec![Scalar::zero(), Scalar::one(), Scalar::zero(), Scalar::zero()];
    let g = |s: &str| pres.gen(s);
    let action = Action {
        space: FDCStar::m2(),
        generator_images: vec![MElem(vec![g("alpha"), g("beta"), g("gamma"), g("delta")])],
    };
    QuantumSemigroup::new("QMap(M2)", pres.clone(), delta, counit, Some(action)).expect("valid")
}

/// The commutant of the swap automorphism of `M_2`: `alpha`, self-adjoint
/// `beta`, `gamma`, with `Φ(n) = [[alpha, beta], [gamma, alpha*]]`.
pub fn m2_commutant_phi() -> QuantumSemigroup {
    let free =
        Presentation::free("M2 swap commutant", gens(&["alpha", "beta", "gamma"], &["beta", "gamma"])).expect("valid");
    let e = |s: &str| free.expr(s).expect("builtin expression");
    let relations = vec![
        e("alpha* alpha + gamma^2 + alpha alpha* + beta^2 - 1"),
        e("alpha* beta + gamma alpha* + alpha gamma + beta alpha"),
        e("alpha^2 + beta gamma"),
        e("alpha beta + beta alpha*"),
        e("gamma alpha + alpha* gamma"),
    ];
    let pres =
        Arc::new(Presentation::new("M2 swap commutant", free.generators().to_vec(), relations, vec![]).expect("valid"));
    let t = |s: &str| {
        let r = |_leg: u8, name: &str| crate::ncpoly::LetterNames::resolve(pres.as_ref(), 0, name);
        crate::dsl::parse_tensor_expression(s, &r, 2).expect("builtin expression")
    };
    let delta = vec![
        t("1 (*) alpha + (alpha* alpha + gamma^2) (*) (alpha* - alpha) + alpha (*) beta + alpha* (*) gamma"),
        t("(alpha gamma + beta alpha) (*) (alpha - alpha*) + beta (*) beta + gamma (*) gamma"),
        t("(beta alpha + alpha gamma) (*) (alpha* - alpha) + gamma (*) beta + beta (*) gamma"),
    ];
    let counit = vec![Scalar::zero(), Scalar::one(), Scalar::zero()];
    let g = |s: &str| pres.gen(s);
    let action = Action {
        space: FDCStar::m2(),
        generator_images: vec![MElem(vec![g("alpha"), g("beta"), g("gamma"), g("alpha").star()])],
    };
    QuantumSemigroup::new("M2 swap commutant", pres.clone(), delta, counit, Some(action)).expect("valid")
}

/// Looks up a builtin by its command-line name.
pub fn by_name(name: &str) -> Option<QuantumSemigroup> {
    match name {
        "qmap-m2" => Some(qmap_m2()),
        "m2-commutant" => Some(m2_commutant_phi()),
        _ => {
            let n: usize = name.strip_prefix("qmap-x")?.parse().ok()?;
            (1..=64).contains(&n).then(|| qmap_xn(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;
    use crate::rewrite::complete;

    #[test]
    fn qmap_xn_counts() {
        for n in 1..=4 {
            let s = qmap_xn(n);
            assert_eq!(s.algebra.generators().len(), n * n);
            // per row: n idempotents, n(n-1)/2 orthogonality products, one sum
            let per_row = n + n * (n - 1) / 2 + 1;
            assert_eq!(s.algebra.relations().len(), n * per_row);
            assert_eq!(s.algebra.closures().len(), n);
        }
        let s = qmap_xn(3);
        assert_eq!(s.counit[0], Scalar::one());
        assert_eq!(s.counit[1], Scalar::zero());
        assert_eq!(s.counit[4], Scalar::one());
    }

    #[test]
    fn qmap_x1_is_scalars() {
        let s = qmap_xn(1);
        let rs = complete(&s.algebra, 4).unwrap();
        assert_eq!(rs.normal_form(&s.algebra.gen("a11")).unwrap(), NCPoly::one());
    }

    #[test]
    fn m2_relations_present() {
        let s = qmap_m2();
        let want = s.algebra.expr("alpha* beta + gamma* delta + alpha gamma* + beta delta*").unwrap();
        assert!(s.algebra.ideal_generators().any(|r| *r == want));
        let c = m2_commutant_phi();
        let want = c.algebra.expr("alpha* beta + gamma alpha* + alpha gamma + beta alpha").unwrap();
        assert!(c.algebra.ideal_generators().any(|r| *r == want));
        // ε(α² + βγ) = 0
        let eps = s.counit_map();
        let r = s.algebra.expr("alpha^2 + beta gamma").unwrap();
        assert!(eps.apply(&r).is_zero());
    }

    #[test]
    fn builtins_round_trip_through_dsl() {
        for s in [qmap_xn(1), qmap_xn(3), qmap_m2(), m2_commutant_phi()] {
            let text = dsl::print_semigroup(&s);
            let back = match dsl::parse(&text).unwrap() {
                dsl::Parsed::Semigroup(t) => t,
                _ => panic!(),
            };
            assert_eq!(back.algebra.hash(), s.algebra.hash(), "{}", s.name);
            assert_eq!(back.delta, s.delta);
            assert_eq!(back.counit, s.counit);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(by_name("qmap-x3").is_some());
        assert!(by_name("qmap-m2").is_some());
        assert!(by_name("m2-commutant").is_some());
        assert!(by_name("qmap-x0").is_none());
        assert!(by_name("nope").is_none());
    }
}
