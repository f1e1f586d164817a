//! Operator catalog, matrix assembly, ground states and symmetric bases,
//! checked against dense Kronecker-product constructions.

mod common;

use cdqaoa::linalg::{CsrMatrix, EigOptions, C64};
use cdqaoa::spin_ops::{build_matrix, catalog, ground_state, mixing_constants, ModelKind, ModelSpec, OperatorTerm, SiteOp, Spin, TermList};
use cdqaoa::symmetry::{build_sector, equivalent, generate_gauge_terms, GaugeGenOptions, SymmetrySpec};
use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn full(n: usize, spin: Spin) -> cdqaoa::symmetry::SectorBasis {
    build_sector(n, spin, SymmetrySpec::full()).unwrap()
}

fn d_of(spin: Spin) -> usize {
    spin.local_dim()
}

/// Dense reference for every catalog label on a chain model.
fn reference(label: &str, model: &ModelSpec) -> CMat {
    let d = d_of(model.spin());
    let n = model.n_sites;
    let j = model.coupling("J").unwrap();
    let hz = || model.coupling("h_z").unwrap();
    let hx = || model.coupling("h_x").unwrap();
    match (model.kind, label) {
        (ModelKind::IsingHalf, "H1") | (_, "Z|Z+Z") => scaled(&bond(d, n, 'z', 'z'), j) + scaled(&field(d, n, 'z'), hz()),
        (ModelKind::IsingHalf, "H2") => scaled(&field(d, n, 'x'), hx()),
        (ModelKind::IsingOne, "H1") => scaled(&bond(d, n, 'z', 'z'), j) + scaled(&field(d, n, 'x'), hx()),
        (ModelKind::IsingOne, "H2") => scaled(&field(d, n, 'z'), hz()),
        (ModelKind::HeisenbergOne, "H1") => scaled(&(bond(d, n, 'x', 'x') + bond(d, n, 'y', 'y')), j),
        (ModelKind::HeisenbergOne, "H2") => scaled(&bond(d, n, 'z', 'z'), model.coupling("Delta").unwrap()),
        (_, "X") => field(d, n, 'x'),
        (_, "Y") => field(d, n, 'y'),
        (_, "Z") => field(d, n, 'z'),
        (_, "X|Y") => bond(d, n, 'x', 'y') + bond(d, n, 'y', 'x'),
        (_, "Y|Z") => bond(d, n, 'y', 'z') + bond(d, n, 'z', 'y'),
        (_, "XY") => onsite_sym(d, n, 'x', 'y'),
        (_, "YZ") => onsite_sym(d, n, 'y', 'z'),
        _ => panic!("no reference for {label}"),
    }
}

fn models(n: usize) -> Vec<ModelSpec> {
    vec![
        ModelSpec::new(ModelKind::IsingHalf, n),
        ModelSpec::new(ModelKind::IsingOne, n),
        ModelSpec::new(ModelKind::HeisenbergOne, n).with("Delta", -0.7),
    ]
}

fn labels_for(spin: Spin) -> Vec<&'static str> {
    let mut l = vec!["H1", "H2", "X", "Y", "Z", "X|Y", "Y|Z"];
    if spin == Spin::One {
        l.extend(["XY", "YZ"]);
    }
    l
}

fn labels_for_model(model: &ModelSpec) -> Vec<&'static str> {
    let mut l = labels_for(model.spin());
    if model.kind != ModelKind::HeisenbergOne {
        l.push("Z|Z+Z");
    }
    l
}

#[test]
fn catalog_matches_kronecker_construction() {
    for n in 2..=4 {
        for model in models(n) {
            if model.spin() == Spin::One && n > 3 {
                continue;
            }
            let basis = full(n, model.spin());
            for label in labels_for_model(&model) {
                let m = dense(&build_matrix(&catalog(label, &model).unwrap(), &basis).unwrap());
                let r = reference(label, &model);
                assert!(max_abs_diff(&m, &r) < 1e-12, "{label} on {} N={n}", model.kind);
            }
        }
    }
}

#[test]
fn two_site_ising_with_wrapped_bond() {
    let model = ModelSpec::new(ModelKind::IsingHalf, 2).with("J", 1.0).with("h_z", 0.809);
    let m = dense(&build_matrix(&catalog("Z|Z+Z", &model).unwrap(), &full(2, Spin::Half)).unwrap());
    let zz = site_product(2, 2, &[('z', 0), ('z', 1)]);
    let expect = scaled(&zz, 2.0) + scaled(&field(2, 2, 'z'), 0.809);
    assert!(max_abs_diff(&m, &expect) < 1e-14);
    assert!(max_abs_diff(&m, &m.adjoint()) < 1e-14);
}

#[test]
fn all_catalog_terms_are_hermitian() {
    for n in 2..=4 {
        for model in models(n) {
            let basis = full(n, model.spin());
            let mut labels = labels_for_model(&model);
            if model.spin() == Spin::One {
                labels.extend(["X|Y-XY", "Y|Z-YZ"]);
            }
            for label in labels {
                let m = build_matrix(&catalog(label, &model).unwrap(), &basis).unwrap();
                assert!(m.hermiticity_defect() < 1e-12, "{label}");
            }
        }
    }
}

#[test]
fn gauge_terms_are_imaginary() {
    let check = |m: &CsrMatrix, what: &str| {
        for (_, _, v) in m.iter() {
            assert!(v.re.abs() < 1e-14, "{what} has a real entry {v}");
        }
    };
    for n in 2..=4 {
        let half = ModelSpec::new(ModelKind::IsingHalf, n);
        for label in ["Y", "X|Y", "Y|Z"] {
            check(&build_matrix(&catalog(label, &half).unwrap(), &full(n, Spin::Half)).unwrap(), label);
        }
        if n <= 3 {
            let one = ModelSpec::new(ModelKind::IsingOne, n);
            for label in ["Y", "XY", "YZ", "X|Y", "Y|Z", "X|Y-XY", "Y|Z-YZ"] {
                check(&build_matrix(&catalog(label, &one).unwrap(), &full(n, Spin::One)).unwrap(), label);
            }
        }
    }
    let lmg = ModelSpec::new(ModelKind::Lmg, 4);
    for label in ["hatXY", "hatZY"] {
        check(&build_matrix(&catalog(label, &lmg).unwrap(), &full(4, Spin::Half)).unwrap(), label);
    }
}

#[test]
fn mixed_terms_are_trace_orthogonal_to_onsite_terms() {
    let hs = |a: &CMat, b: &CMat| (a.adjoint() * b).trace();
    for n in 3..=4 {
        let model = ModelSpec::new(ModelKind::IsingOne, n);
        let basis = full(n, Spin::One);
        let m = |l: &str| dense(&build_matrix(&catalog(l, &model).unwrap(), &basis).unwrap());
        let xy = m("XY");
        let yz = m("YZ");
        let a = hs(&xy, &m("X|Y-XY"));
        let b = hs(&yz, &m("Y|Z-YZ"));
        assert!(a.norm() < 1e-12 * hs(&xy, &xy).norm(), "N={n}: {a}");
        assert!(b.norm() < 1e-12 * hs(&yz, &yz).norm(), "N={n}: {b}");
    }
    let (a, b) = mixing_constants();
    assert!(a.is_finite() && b.is_finite());
}

#[test]
fn catalog_is_translation_covariant() {
    for n in 2..=4 {
        for model in models(n) {
            if model.spin() == Spin::One && n > 3 {
                continue;
            }
            let d = d_of(model.spin());
            let dim = d.pow(n as u32);
            let shift = permutation(dim, |x| {
                let mut v = digits(x, d, n);
                v.rotate_left(1);
                from_digits(&v, d)
            });
            for label in labels_for_model(&model) {
                let m = dense(&build_matrix(&catalog(label, &model).unwrap(), &full(n, model.spin())).unwrap());
                assert!(max_abs_diff(&(&shift * &m * shift.adjoint()), &m) < 1e-12, "{label}");
            }
        }
    }
}

#[test]
fn single_site_y_is_imaginary() {
    let m = dense(&build_matrix(&catalog("Y", &ModelSpec::new(ModelKind::IsingHalf, 2)).unwrap(), &full(2, Spin::Half)).unwrap());
    assert!(m.iter().all(|v| v.re == 0.0));
    assert!(m.iter().any(|v| v.im != 0.0));
}

#[test]
fn empty_term_list_gives_zero_matrix() {
    for spec in [SymmetrySpec::full(), SymmetrySpec::translation_parity()] {
        let basis = build_sector(4, Spin::Half, spec).unwrap();
        let m = build_matrix(&TermList::new("empty", Spin::Half, 4), &basis).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.dim(), basis.dim());
    }
}

#[test]
fn mismatched_basis_is_rejected() {
    let tl = catalog("X", &ModelSpec::new(ModelKind::IsingHalf, 3)).unwrap();
    assert!(build_matrix(&tl, &full(4, Spin::Half)).is_err());
    assert!(build_matrix(&tl, &full(3, Spin::One)).is_err());
}

#[test]
fn unknown_or_wrong_spin_labels_are_rejected() {
    let half = ModelSpec::new(ModelKind::IsingHalf, 3);
    assert!(catalog("Q|Q", &half).is_err());
    assert!(catalog("XY", &half).is_err());
    assert!(catalog("hatXY", &ModelSpec::new(ModelKind::IsingOne, 3)).is_err());
}

#[test]
fn two_site_ising_spectrum() {
    let model = ModelSpec::new(ModelKind::IsingHalf, 2);
    let h = |l: &str| reference(l, &model);
    let dense_h = h("H1") + h("H2");
    let tl = catalog("H1", &model).unwrap().plus(1.0, &catalog("H2", &model).unwrap());
    let m = dense(&build_matrix(&tl, &full(2, Spin::Half)).unwrap());
    let (a, b) = (eigenvalues(&m), eigenvalues(&dense_h));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn four_site_ising_ground_state_matches_dense_spectrum() {
    let model = ModelSpec::new(ModelKind::IsingHalf, 4);
    let tl = catalog("H1", &model).unwrap().plus(1.0, &catalog("H2", &model).unwrap());
    let h = build_matrix(&tl, &full(4, Spin::Half)).unwrap();
    let gs = ground_state(&h, EigOptions::default()).unwrap();
    let e = eigenvalues(&(reference("H1", &model) + reference("H2", &model)));
    assert!((gs.energy() - e[0]).abs() < 1e-10);
    assert!(!gs.degenerate());
    let v = &gs.states[0];
    let r: f64 = h.matvec(v).iter().zip(v).map(|(a, b)| (a - b * gs.energy()).norm_sqr()).sum::<f64>().sqrt();
    assert!(r <= 1e-10, "residual {r}");
}

#[test]
fn heisenberg_sector_ground_energy_agrees_with_full_space() {
    let model = ModelSpec::new(ModelKind::HeisenbergOne, 4).with("Delta", 0.5);
    let tl = catalog("H1", &model).unwrap().plus(1.0, &catalog("H2", &model).unwrap());
    let sector = build_sector(4, Spin::One, SymmetrySpec::translation_parity()).unwrap();
    let e_sector = ground_state(&build_matrix(&tl, &sector).unwrap(), EigOptions::default()).unwrap().energy();
    let e_dense = eigenvalues(&(reference("H1", &model) + reference("H2", &model)))[0];
    assert!((e_sector - e_dense).abs() < 1e-10, "{e_sector} vs {e_dense}");

    let model8 = ModelSpec::new(ModelKind::HeisenbergOne, 8).with("Delta", 0.5);
    let tl8 = catalog("H1", &model8).unwrap().plus(1.0, &catalog("H2", &model8).unwrap());
    let sector8 = build_sector(8, Spin::One, SymmetrySpec::translation_parity()).unwrap();
    assert_eq!(sector8.dim(), 498);
    let e8 = ground_state(&build_matrix(&tl8, &sector8).unwrap(), EigOptions::default()).unwrap().energy();
    let e8_full = ground_state(&build_matrix(&tl8, &full(8, Spin::One)).unwrap(), EigOptions::default()).unwrap().energy();
    assert!((e8 - e8_full).abs() < 1e-9, "{e8} vs {e8_full}");
}

#[test]
fn ferromagnetic_heisenberg_ground_level_is_doubly_degenerate() {
    let model = ModelSpec::new(ModelKind::HeisenbergOne, 8).with("Delta", -2.0);
    let tl = catalog("H1", &model).unwrap().plus(1.0, &catalog("H2", &model).unwrap());
    let sector = build_sector(8, Spin::One, SymmetrySpec::translation_parity()).unwrap();
    let gs = ground_state(&build_matrix(&tl, &sector).unwrap(), EigOptions::default()).unwrap();
    assert_eq!(gs.states.len(), 2);
    assert!((gs.energies[1] - gs.energies[0]).abs() < 1e-8);
    let overlap: C64 = gs.states[0].iter().zip(&gs.states[1]).map(|(a, b)| a.conj() * b).sum();
    assert!(overlap.norm() < 1e-9);
}

#[test]
fn lmg_catalog_ground_energy_at_zero_field() {
    for n in [2, 4, 6, 8] {
        let model = ModelSpec::new(ModelKind::Lmg, n).with("h", 0.0);
        let basis = full(n, Spin::Half);
        let h = build_matrix(&catalog("H1", &model).unwrap(), &basis).unwrap();
        let e = ground_state(&h, EigOptions::default()).unwrap().energy();
        assert!((e + n as f64 / 4.0).abs() < 1e-10, "N={n}: {e}");
    }
}

#[test]
fn sector_dimensions_equal_projector_rank() {
    for spin in [Spin::Half, Spin::One] {
        let d = d_of(spin);
        let max_n = if spin == Spin::Half { 8 } else { 5 };
        for n in 2..=max_n {
            for (t, r) in [(true, true), (true, false), (false, true)] {
                let spec = SymmetrySpec { translation: t, reflection: r, permutation: false };
                let basis = build_sector(n, spin, spec).unwrap();
                let rank = symmetric_projector(d, n, t, r).trace().re;
                assert!((basis.dim() as f64 - rank).abs() < 1e-9, "{spin:?} N={n} {spec:?}: {} vs {rank}", basis.dim());
            }
        }
    }
}

#[test]
fn representatives_are_smallest_in_their_orbits() {
    let basis = build_sector(6, Spin::One, SymmetrySpec::translation_parity()).unwrap();
    for r in 0..basis.dim() {
        let orbit = basis.orbit(r).unwrap();
        assert_eq!(*orbit.iter().min().unwrap(), basis.reps[r]);
        assert!(basis.norms[r] > 0.0);
    }
}

#[test]
fn lifted_basis_spans_the_symmetric_subspace() {
    for (n, spin) in [(4, Spin::Half), (3, Spin::One), (4, Spin::One)] {
        let d = d_of(spin);
        let basis = build_sector(n, spin, SymmetrySpec::translation_parity()).unwrap();
        let full_dim = d.pow(n as u32);
        let mut v = CMat::zeros(full_dim, basis.dim());
        for r in 0..basis.dim() {
            let mut e = vec![c(0., 0.); basis.dim()];
            e[r] = c(1., 0.);
            let col = basis.lift(&e).unwrap();
            let norm: f64 = col.iter().map(|x| x.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            v.set_column(r, &dvec(&col));
        }
        let p = &v * v.adjoint();
        assert!(max_abs_diff(&(&p * &p), &p) < 1e-12);
        assert!(max_abs_diff(&p, &symmetric_projector(d, n, true, true)) < 1e-12);
    }
}

#[test]
fn lift_of_polarized_state_is_the_product_vector() {
    for spin in [Spin::Half, Spin::One] {
        let basis = build_sector(4, spin, SymmetrySpec::translation_parity()).unwrap();
        let psi = basis.product_state(&[0, 0, 0, 0]).unwrap();
        let full = basis.lift(&psi).unwrap();
        assert!((full[0] - c(1., 0.)).norm() < 1e-15);
        assert!(full[1..].iter().all(|x| x.norm() == 0.0));
    }
}

#[test]
fn lift_project_and_matrix_elements_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = ModelSpec::new(ModelKind::IsingOne, 4);
    let sector = build_sector(4, Spin::One, SymmetrySpec::translation_parity()).unwrap();
    let fullb = full(4, Spin::One);
    let tl = catalog("H1", &model).unwrap().plus(1.0, &catalog("H2", &model).unwrap()).plus(0.3, &catalog("X|Y", &model).unwrap());
    let hs = build_matrix(&tl, &sector).unwrap();
    let hf = build_matrix(&tl, &fullb).unwrap();
    for _ in 0..5 {
        let u = random_state(&mut rng, sector.dim());
        let v = random_state(&mut rng, sector.dim());
        let back = sector.project(&sector.lift(&u).unwrap()).unwrap();
        assert!(vec_diff(&back, &u) < 1e-13);
        let lu = sector.lift(&u).unwrap();
        let lv = sector.lift(&v).unwrap();
        let full_elem: C64 = lu.iter().zip(hf.matvec(&lv)).map(|(a, b)| a.conj() * b).sum();
        let sec_elem: C64 = u.iter().zip(hs.matvec(&v)).map(|(a, b)| a.conj() * b).sum();
        assert!((full_elem - sec_elem).norm() < 1e-12);
    }
}

#[test]
fn multiplet_basis_has_n_plus_one_states() {
    for n in [2, 5, 12, 501] {
        assert_eq!(build_sector(n, Spin::Half, SymmetrySpec::lmg()).unwrap().dim(), n + 1);
    }
}

fn y_sum(spin: Spin, n: usize) -> TermList {
    let mut tl = TermList::new("Ysum", spin, n);
    for i in 0..n {
        tl.push(OperatorTerm::real("y", &[i], 1.0));
    }
    tl
}

#[test]
fn equivalence_up_to_real_scalar() {
    let n = 3;
    let mut a = TermList::new("a", Spin::Half, n);
    let mut b = TermList::new("b", Spin::Half, n);
    for i in 0..n {
        a.push(OperatorTerm::new("y", &[i], c(0., 2.)).unwrap());
        b.push(OperatorTerm::new("y", &[i], c(0., 1.)).unwrap());
    }
    assert!(equivalent(&a, &b).unwrap());
    assert!(equivalent(&a, &b.scaled(-3.5)).unwrap());
    let xy = catalog("X|Y", &ModelSpec::new(ModelKind::IsingHalf, n)).unwrap();
    assert!(!equivalent(&y_sum(Spin::Half, n), &xy).unwrap());
}

/// Best real scalar `s` minimizing `|A - s B|` and the relative residual.
fn scalar_fit(a: &CMat, b: &CMat) -> f64 {
    let s = a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>() / b.norm_squared();
    (a - b * c(s, 0.)).norm() / a.norm()
}

#[test]
fn equivalence_agrees_with_least_squares_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ops = ["x", "y", "z"];
    let basis = full(3, Spin::Half);
    for trial in 0..20 {
        let mut a = TermList::new("a", Spin::Half, 3);
        for _ in 0..4 {
            let o = format!("{}{}", ops[rng.gen_range(0..3)], ops[rng.gen_range(0..3)]);
            let i = rng.gen_range(0..3);
            a.push(OperatorTerm::real(&o, &[i, (i + 1) % 3], rng.gen::<f64>() - 0.5));
        }
        let a = a.plus(1.0, &a.dagger_sum());
        let b = if trial % 2 == 0 {
            a.scaled(if trial % 4 == 0 { 1.7 } else { -0.3 })
        } else {
            a.plus(0.05, &y_sum(Spin::Half, 3))
        };
        let da = dense(&build_matrix(&a, &basis).unwrap());
        let db = dense(&build_matrix(&b, &basis).unwrap());
        let oracle = scalar_fit(&da, &db) < 1e-10;
        assert_eq!(equivalent(&a, &b).unwrap(), oracle, "trial {trial}");
    }
}

trait DaggerSum {
    fn dagger_sum(&self) -> TermList;
}

impl DaggerSum for TermList {
    fn dagger_sum(&self) -> TermList {
        let mut out = TermList::new("dag", self.spin, self.n_sites);
        for t in &self.terms {
            out.push(t.dagger());
        }
        out
    }
}

fn gauge(order: usize, spin: Spin, elementary: &[SiteOp]) -> Vec<TermList> {
    let kind = if spin == Spin::Half { ModelKind::IsingHalf } else { ModelKind::IsingOne };
    let model = ModelSpec::new(kind, 4);
    generate_gauge_terms(order, elementary, SymmetrySpec::translation_parity(), &model, GaugeGenOptions::default()).unwrap()
}

const PMZ: [SiteOp; 3] = [SiteOp::Plus, SiteOp::Minus, SiteOp::Z];

#[test]
fn first_order_spin_half_gauge_term_is_the_y_field() {
    let terms = gauge(1, Spin::Half, &PMZ);
    assert_eq!(terms.len(), 1);
    assert!(equivalent(&terms[0], &y_sum(Spin::Half, 4)).unwrap());
}

#[test]
fn second_order_spin_half_gauge_terms_are_the_two_bond_combinations() {
    let terms = gauge(2, Spin::Half, &PMZ);
    let model = ModelSpec::new(ModelKind::IsingHalf, 4);
    assert_eq!(terms.len(), 2);
    for label in ["X|Y", "Y|Z"] {
        let target = catalog(label, &model).unwrap();
        assert!(terms.iter().any(|t| equivalent(t, &target).unwrap()), "{label} missing");
    }
}

/// Relative residual of `target` after least-squares projection onto `span`.
fn span_residual(target: &CMat, span: &[CMat]) -> f64 {
    let k = span.len();
    let g = DMatrix::<f64>::from_fn(k, k, |i, j| span[i].iter().zip(span[j].iter()).map(|(a, b)| (a.conj() * b).re).sum());
    let rhs = nalgebra::DVector::<f64>::from_fn(k, |i, _| span[i].iter().zip(target.iter()).map(|(a, b)| (a.conj() * b).re).sum());
    let coef = g.svd(true, true).solve(&rhs, 1e-12).unwrap();
    let fit = span.iter().zip(coef.iter()).fold(CMat::zeros(target.nrows(), target.ncols()), |acc, (m, &s)| acc + m * c(s, 0.));
    (target - fit).norm() / target.norm()
}

#[test]
fn second_order_spin_one_gauge_terms_include_onsite_products() {
    let first = gauge(1, Spin::One, &PMZ);
    let second = gauge(2, Spin::One, &PMZ);
    let basis = full(4, Spin::One);
    let mut span: Vec<CMat> = first.iter().chain(&second).map(|t| dense(&build_matrix(t, &basis).unwrap())).collect();
    span.retain(|m| m.norm() > 0.0);
    let model = ModelSpec::new(ModelKind::IsingOne, 4);
    for label in ["XY", "YZ", "X|Y", "Y|Z"] {
        let m = dense(&build_matrix(&catalog(label, &model).unwrap(), &basis).unwrap());
        assert!(span_residual(&m, &span) < 1e-10, "{label} not spanned");
    }
}

#[test]
fn generated_gauge_terms_are_hermitian_imaginary_and_off_diagonal() {
    for spin in [Spin::Half, Spin::One] {
        let n = 3;
        let kind = if spin == Spin::Half { ModelKind::IsingHalf } else { ModelKind::IsingOne };
        let model = ModelSpec::new(kind, n);
        let basis = full(n, spin);
        let h = |lambda: f64| {
            let tl = catalog("H2", &model).unwrap().plus(lambda, &catalog("H1", &model).unwrap());
            let m = dense(&build_matrix(&tl, &basis).unwrap());
            DMatrix::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
        };
        let eig = SymmetricEigen::new(h(0.37));
        for order in [1, 2] {
            for t in generate_gauge_terms(order, &PMZ, SymmetrySpec::translation_parity(), &model, GaugeGenOptions::default()).unwrap() {
                let g = dense(&build_matrix(&t, &basis).unwrap());
                assert!(max_abs_diff(&g, &g.adjoint()) < 1e-12);
                assert!(g.iter().all(|v| v.re.abs() < 1e-12));
                let gi = DMatrix::<f64>::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)].im);
                for k in 0..eig.eigenvectors.ncols() {
                    let v = eig.eigenvectors.column(k);
                    let diag = (v.transpose() * &gi * v)[(0, 0)];
                    assert!(diag.abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn gauge_term_generation_is_deterministic() {
    let a = gauge(2, Spin::One, &PMZ);
    let b = gauge(2, Spin::One, &PMZ);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.terms, y.terms);
    }
}
