mod common;

use common::random_field;
use fracflow::grid::{
    inner_product, mean_field, norm, Direction, Field6, GridDims, ScalarField, VectorField3,
};
use fracflow::operators::{div_minus, extend_a, grad_plus, restrict_a_star, shift_back, shift_forward};
use fracflow::spectral::{extended_direction, SpectralPlan};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = GridDims> {
    (1usize..=8, 1usize..=8, 1usize..=8).prop_map(|(a, b, c)| GridDims::new(a, b, c).unwrap())
}

fn direction() -> impl Strategy<Value = Direction<f64>> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(|v| Direction::normalized(v).unwrap())
}

fn close<const K: usize>(
    a: &fracflow::grid::Field<f64, K>,
    b: &fracflow::grid::Field<f64, K>,
    tol: f64,
) -> bool {
    a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_symmetric_and_bilinear(d in dims(), seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let a: VectorField3<f64> = random_field(d, seed);
        let b: VectorField3<f64> = random_field(d, seed ^ 1);
        let c: VectorField3<f64> = random_field(d, seed ^ 2);
        let scale = norm(&a) * norm(&b) + norm(&a) * norm(&c) + norm(&b) * norm(&c);
        let ab = inner_product(&a, &b).unwrap();
        prop_assert!((ab - inner_product(&b, &a).unwrap()).abs() <= 1e-13 * scale);
        let mut lin = a.scaled(alpha);
        lin.axpy(1.0, &b).unwrap();
        let lhs = inner_product(&lin, &c).unwrap();
        let rhs = alpha * inner_product(&a, &c).unwrap() + inner_product(&b, &c).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + alpha.abs()) * scale);
        prop_assert!(inner_product(&a, &a).unwrap() >= 0.0);
    }

    #[test]
    fn gradients_have_zero_mean(d in dims(), seed in any::<u64>()) {
        let phi: ScalarField<f64> = random_field(d, seed);
        for m in mean_field(&grad_plus(&phi)) {
            prop_assert!(m.abs() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_pairs(d in dims(), seed in any::<u64>()) {
        let v: VectorField3<f64> = random_field(d, seed);
        let w: VectorField3<f64> = random_field(d, seed ^ 7);
        let w6: Field6<f64> = random_field(d, seed ^ 9);
        let phi: ScalarField<f64> = random_field(d, seed ^ 11);
        let nv = norm(&v);

        let lhs = inner_product(&shift_back(&v), &w).unwrap();
        let rhs = inner_product(&v, &shift_forward(&w)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * nv * norm(&w));

        let lhs = inner_product(&extend_a(&v), &w6).unwrap();
        let rhs = inner_product(&v, &restrict_a_star(&w6)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * nv * norm(&w6));

        let lhs = inner_product(&grad_plus(&phi), &v).unwrap();
        let rhs = inner_product(&phi, &div_minus(&v)).unwrap();
        prop_assert!((lhs + rhs).abs() <= 1e-12 * norm(&phi) * nv);
    }

    #[test]
    fn a_is_an_isometry(d in dims(), seed in any::<u64>()) {
        let v: VectorField3<f64> = random_field(d, seed);
        let av = extend_a(&v);
        prop_assert!(close(&restrict_a_star(&av), &v, 1e-13));
        prop_assert!((norm(&av) - norm(&v)).abs() <= 1e-13 * norm(&v));
        prop_assert!(close(&shift_forward(&shift_back(&v)), &v, 0.0));
    }

    #[test]
    fn gamma_projects_onto_gradients(d in dims(), seed in any::<u64>(), c in prop::array::uniform3(-5.0f64..5.0)) {
        let mut plan = SpectralPlan::<f64>::new(d);
        let phi: ScalarField<f64> = random_field(d, seed);
        let g = grad_plus(&phi);
        let tol = 1e-10 * (1.0 + g.max_abs());
        prop_assert!(close(&plan.gamma_apply(&g).unwrap(), &g, tol));
        let konst = VectorField3::constant(d, c);
        prop_assert!(plan.gamma_apply(&konst).unwrap().max_abs() <= 1e-12 * 5.0);
        let w: VectorField3<f64> = random_field(d, seed ^ 3);
        let once = plan.gamma_apply(&w).unwrap();
        prop_assert!(close(&plan.gamma_apply(&once).unwrap(), &once, 1e-10));
    }

    #[test]
    fn compatible_projection_properties(d in dims(), seed in any::<u64>(), dir in direction(), alpha in -2.0f64..2.0) {
        let mut plan = SpectralPlan::<f64>::new(d);
        let w: Field6<f64> = random_field(d, seed);
        let p = plan.project_compatible(&w, &dir).unwrap();
        let scale = 1.0 + w.max_abs();
        prop_assert!(close(&plan.project_compatible(&p, &dir).unwrap(), &p, 1e-10 * scale));

        // A*P(w) − ξ̄ is a discrete gradient
        let mut r = restrict_a_star(&p);
        let xi = dir.components();
        for (c, plane) in r.components_mut().into_iter().enumerate() {
            plane.iter_mut().for_each(|x| *x -= xi[c]);
        }
        prop_assert!(close(&plan.gamma_apply(&r).unwrap(), &r, 1e-10 * scale));
        for m in mean_field(&r) {
            prop_assert!(m.abs() <= 1e-12 * scale);
        }

        // P(w) − Aξ̄ is linear in w
        let a_xi = Field6::constant(d, extended_direction(&dir));
        let w2: Field6<f64> = random_field(d, seed ^ 5);
        let mut combo = w.scaled(alpha);
        combo.axpy(1.0, &w2).unwrap();
        let mut lhs = plan.project_compatible(&combo, &dir).unwrap();
        lhs.axpy(-1.0, &a_xi).unwrap();
        let mut rhs = plan.project_compatible(&w2, &dir).unwrap();
        rhs.axpy(-1.0, &a_xi).unwrap();
        let mut pw = p.clone();
        pw.axpy(-1.0, &a_xi).unwrap();
        rhs.axpy(alpha, &pw).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10 * scale * (1.0 + alpha.abs())));
    }
}
