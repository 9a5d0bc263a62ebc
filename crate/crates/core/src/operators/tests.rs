use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::blaschke::random_blaschke;
use crate::linalg::max_abs;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid() -> CircleGrid {
    CircleGrid::new(256).unwrap()
}

fn mat(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&(re, im)| c(re, im)))
}

fn unit(n: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); n];
    v[k] = c(1.0, 0.0);
    v
}

fn lower_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, col| if r == col + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn random_symbol(rng: &mut ChaCha8Rng) -> SymbolSpec {
    SymbolSpec::uv_bar(random_blaschke(2, 0.8, rng).unwrap(), random_blaschke(3, 0.8, rng).unwrap())
}

/// Taylor coefficients of `(z - a)/(1 - a z)` for real `a` by long division.
fn single_factor_taylor(a: f64, count: usize) -> Vec<f64> {
    let num = [-a, 1.0];
    let mut out = Vec::with_capacity(count);
    let mut rem = vec![0.0; count + 2];
    rem[..2].copy_from_slice(&num);
    for k in 0..count {
        let q = rem[k];
        out.push(q);
        rem[k + 1] += a * q;
    }
    out
}

#[test]
fn identity_symbol_gives_identity() {
    let g = grid();
    let theta = BlaschkeProduct::from_zeros(vec![c(0.2, 0.1), c(-0.4, 0.0)]).unwrap();
    let one = SymbolSpec::constant(c(1.0, 0.0));
    let a = tto(&one, &theta, &g).unwrap();
    assert!(max_abs(&(a.entries() - CMatrix::identity(2, 2))) < 1e-12);
    let m = block_assemble(&one, &theta, Truncation::symmetric(5), &g).unwrap();
    assert!(max_abs(&(m.entries() - CMatrix::identity(12, 12))) < 1e-12);
}

#[test]
fn compressed_shift_on_monomial_model_spaces() {
    let g = grid();
    for n in 1..5 {
        let s = compressed_shift(&BlaschkeProduct::monomial(n), &g).unwrap();
        assert!(max_abs(&(s.entries() - lower_shift(n))) < 1e-14);
    }
    let theta = BlaschkeProduct::from_zeros(vec![c(0.5, 0.3), c(-0.6, 0.1), c(0.0, -0.7)]).unwrap();
    assert!(compressed_shift(&theta, &g).unwrap().norm() <= 1.0 + 1e-12);
}

#[test]
fn single_factor_tto_matches_taylor_oracle() {
    let taylor = single_factor_taylor(0.5, 4);
    assert_eq!(taylor, vec![-0.5, 0.75, 0.375, 0.1875]);
    // column i holds z^i · b, projected to span{1, z}
    let want = mat(2, 2, &[(taylor[0], 0.0), (0.0, 0.0), (taylor[1], 0.0), (taylor[0], 0.0)]);
    let b = SymbolSpec::inner(BlaschkeProduct::from_zeros(vec![c(0.5, 0.0)]).unwrap());
    let a = tto(&b, &BlaschkeProduct::monomial(2), &grid()).unwrap();
    assert!(max_abs(&(a.entries() - want)) < 1e-12);
}

#[test]
fn tto_examples() {
    let g = grid();
    let theta = BlaschkeProduct::monomial(2);
    let a = tto(&SymbolSpec::monomial(1), &theta, &g).unwrap();
    assert!(max_abs(&(a.entries() - mat(2, 2, &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)]))) < 1e-14);
    let a = tto(&SymbolSpec::monomial(-1), &theta, &g).unwrap();
    assert!(max_abs(&(a.entries() - mat(2, 2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]))) < 1e-14);
    let zero = SymbolSpec::zero_symbol(theta.clone(), vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]);
    assert!(tto(&zero, &theta, &g).unwrap().norm() < 1e-9);
}

#[test]
fn dtto_examples() {
    let g = grid();
    let theta = BlaschkeProduct::monomial(2);
    let t = Truncation::symmetric(4);
    let dz = dtto(&SymbolSpec::monomial(1), &theta, t, &g).unwrap();
    let apply = |m: &OperatorMatrix, k: usize| -> Vec<Complex64> {
        let x = CoefVector { coords: unit(8, k), frame_id: m.domain_frame_id() };
        m.apply(&x).unwrap().coords
    };
    // z^{-1} sits at index pos + 0
    assert!(apply(&dz, 4).iter().all(|z| z.norm() < 1e-14));
    let y = apply(&dz, 0);
    assert!(y.iter().zip(unit(8, 1)).all(|(a, b)| (a - b).norm() < 1e-14));
    let dzb = dtto(&SymbolSpec::monomial(-1), &theta, t, &g).unwrap();
    let y = apply(&dzb, 4);
    assert!(y.iter().zip(unit(8, 5)).all(|(a, b)| (a - b).norm() < 1e-14));
}

#[test]
fn tho_and_dtho_examples() {
    let g = grid();
    let theta = BlaschkeProduct::monomial(2);
    let t = Truncation::symmetric(3);
    assert!(tho(&SymbolSpec::constant(c(2.0, -1.0)), &theta, t, &g).unwrap().norm() < 1e-14);
    assert!(dtho(&SymbolSpec::constant(c(2.0, -1.0)), &theta, t, &g).unwrap().norm() < 1e-14);
    let bz = tho(&SymbolSpec::monomial(1), &theta, t, &g).unwrap();
    let mut want = CMatrix::zeros(6, 2);
    want[(0, 1)] = c(1.0, 0.0);
    assert!(max_abs(&(bz.entries() - &want)) < 1e-14);
    let bzb = tho(&SymbolSpec::monomial(-1), &theta, t, &g).unwrap();
    let mut want = CMatrix::zeros(6, 2);
    want[(3, 0)] = c(1.0, 0.0);
    assert!(max_abs(&(bzb.entries() - &want)) < 1e-14);
    let czb = dtho(&SymbolSpec::monomial(-1), &theta, t, &g).unwrap();
    let mut want = CMatrix::zeros(2, 6);
    want[(1, 0)] = c(1.0, 0.0);
    assert!(max_abs(&(czb.entries() - &want)) < 1e-14);
}

#[test]
fn toeplitz_and_hankel_sections() {
    let g = grid();
    let t = toeplitz(&SymbolSpec::monomial(1), 3, &g).unwrap();
    assert!(max_abs(&(t.entries() - lower_shift(3))) < 1e-14);
    assert!(hankel(&SymbolSpec::monomial(1), 4, 4, &g).unwrap().norm() < 1e-14);
    let h = hankel(&SymbolSpec::monomial(-1), 3, 2, &g).unwrap();
    let mut want = CMatrix::zeros(2, 3);
    want[(0, 0)] = c(1.0, 0.0);
    assert!(max_abs(&(h.entries() - &want)) < 1e-14);
}

#[test]
fn atom_route_agrees_with_direct_quadrature() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let theta = random_blaschke(3, 0.8, &mut rng).unwrap();
    let phi = random_symbol(&mut rng);
    let frames = BlockFrames::new(&theta, Truncation::symmetric(6), &g).unwrap();
    let values = phi.samples(&g).unwrap();
    for (dom, cod) in [(frames.dual(), frames.dual()), (frames.model(), frames.dual()), (frames.dual(), frames.model())]
    {
        let fast = compress(&phi, dom, cod, &g).unwrap();
        let direct = CMatrix::from_fn(cod.dimension(), dom.dimension(), |j, i| {
            let f: Vec<Complex64> = values.iter().zip(dom.basis(i)).map(|(p, e)| p * e).collect();
            crate::frames::inner_product(&f, cod.basis(j), &g).unwrap()
        });
        assert!(max_abs(&(fast.entries() - direct)) < 1e-14);
    }
}

#[test]
fn block_assembly_equals_stacked_compression() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z2 = BlaschkeProduct::monomial(2);
    let theta = random_blaschke(3, 0.8, &mut rng).unwrap();
    let cases = [(SymbolSpec::monomial(1), z2), (random_symbol(&mut rng), theta)];
    for (phi, theta) in cases {
        let frames = BlockFrames::new(&theta, Truncation::symmetric(10), &g).unwrap();
        let m = frames.block(&phi).unwrap();
        let stacked = frames.stacked().unwrap();
        let direct = compress(&phi, &stacked, &stacked, &g).unwrap();
        assert!(max_abs(&(m.entries() - direct.entries())) <= 1e-10);
        assert_eq!(m.domain_frame_id(), stacked.id());
    }
}

#[test]
fn adjoint_symmetry() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let theta = random_blaschke(4, 0.8, &mut rng).unwrap();
        let phi = random_symbol(&mut rng);
        let frames = BlockFrames::new(&theta, Truncation::symmetric(12), &g).unwrap();
        let a = frames.a(&phi).unwrap();
        let ab = frames.a(&phi.conj()).unwrap();
        assert!(max_abs(&(ab.entries() - a.adjoint().entries())) < 1e-10);
        let d = frames.d(&phi).unwrap();
        let db = frames.d(&phi.conj()).unwrap();
        assert!(max_abs(&(db.entries() - d.adjoint().entries())) < 1e-10);
        let b = frames.b(&phi).unwrap();
        let cb = frames.c(&phi.conj()).unwrap();
        assert!(max_abs(&(cb.entries() - b.adjoint().entries())) < 1e-9);
    }
}

#[test]
fn conjugation_examples() {
    let g = grid();
    for n in [2usize, 3] {
        let theta = BlaschkeProduct::monomial(n);
        let model = Frame::model_basis(&theta, &g).unwrap();
        let u = conjugation_on(&model, &theta, &g).unwrap();
        let rev = CMatrix::from_fn(n, n, |r, col| if r + col == n - 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(max_abs(&(u.matrix() - rev)) < 1e-14);
    }
    let theta = BlaschkeProduct::monomial(1);
    let lopsided = Frame::dual_frame(&theta, Truncation { pos: 3, neg: 2 }, &g).unwrap();
    assert!(matches!(conjugation_on(&lopsided, &theta, &g), Err(LabError::Size(_))));
    let section = Frame::analytic_section(3, &g).unwrap();
    assert!(matches!(conjugation_on(&section, &theta, &g), Err(LabError::FrameKind(_))));
}

#[test]
fn conjugation_is_unitary_involution_and_symmetrises() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let theta = random_blaschke(4, 0.8, &mut rng).unwrap();
        let phi = random_symbol(&mut rng);
        let frames = BlockFrames::new(&theta, Truncation::symmetric(8), &g).unwrap();
        for (frame, op) in [(frames.model(), frames.a(&phi).unwrap()), (frames.dual(), frames.d(&phi).unwrap())] {
            let u = conjugation_on(frame, &theta, &g).unwrap();
            assert!(u.involution_error() < 1e-10);
            assert!(u.unitarity_error() < 1e-10);
            assert!(max_abs(&(op.adjoint().entries() - u.sandwich(op.entries()))) < 1e-9);
        }
    }
}

#[test]
fn conjugation_maps_dual_atoms() {
    let g = grid();
    let theta = BlaschkeProduct::from_zeros(vec![c(0.3, 0.0)]).unwrap();
    let dual = Frame::dual_frame(&theta, Truncation::symmetric(3), &g).unwrap();
    let u = conjugation_on(&dual, &theta, &g).unwrap();
    // θ z^j ↦ z^{-(j+1)}, z^{-k} ↦ θ z^{k-1}
    let perm =
        CMatrix::from_fn(6, 6, |r, col| if (r + 3 == col) || (col + 3 == r) { c(1.0, 0.0) } else { c(0.0, 0.0) });
    assert!(max_abs(&(u.matrix() - perm)) < 1e-12);
}

#[test]
fn block_identities_hold_to_tail_tolerance() {
    let g = CircleGrid::new(1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let side = 150;
    for _ in 0..3 {
        let theta = random_blaschke(3, 0.8, &mut rng).unwrap();
        let phi = random_symbol(&mut rng);
        let psi = random_symbol(&mut rng);
        let radius = [theta.tail_radius(), phi.tail_radius(), psi.tail_radius()].into_iter().fold(0.0, f64::max);
        let eps = tail_epsilon(radius, side, 4);
        let f = BlockFrames::new(&theta, Truncation::symmetric(side), &g).unwrap();
        let prod = phi.clone().times(psi.clone());
        let (a_pp, a_p, a_s) = (f.a(&prod).unwrap(), f.a(&phi).unwrap(), f.a(&psi).unwrap());
        let (b_pb, b_s) = (f.b(&phi.conj()).unwrap(), f.b(&psi).unwrap());
        let r1 = a_pp.entries() - a_p.entries() * a_s.entries() - b_pb.entries().adjoint() * b_s.entries();
        assert!(linalg::spectral_norm(&r1) <= eps);

        let (b_pp, d_p, b_p) = (f.b(&prod).unwrap(), f.d(&phi).unwrap(), f.b(&phi).unwrap());
        let r2 = b_pp.entries() - d_p.entries() * b_s.entries() - b_p.entries() * a_s.entries();
        assert!(linalg::spectral_norm(&r2) <= eps);

        let (d_pp, d_s, b_sb) = (f.d(&prod).unwrap(), f.d(&psi).unwrap(), f.b(&psi.conj()).unwrap());
        let r3 = d_pp.entries() - d_p.entries() * d_s.entries() - b_p.entries() * b_sb.entries().adjoint();
        let interior = f.dual().interior_indices();
        assert!(linalg::spectral_norm(&linalg::select_columns(&r3, &interior)) <= eps);

        let hf = tho_hankel_form(&phi, &f, side).unwrap();
        assert!(linalg::spectral_norm(&(b_p.entries() - hf.entries())) <= eps);
    }
}

#[test]
fn dtto_norm_grows_towards_sup_norm() {
    let g = CircleGrid::new(1024).unwrap();
    let theta = BlaschkeProduct::from_zeros(vec![c(0.5, 0.2)]).unwrap();
    let phi = SymbolSpec::laurent(vec![c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.5)]).unwrap();
    let sup = phi.samples(&g).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut last = 0.0;
    for side in [32, 64, 104] {
        let n = dtto(&phi, &theta, Truncation::symmetric(side), &g).unwrap().norm();
        assert!(n >= last - 1e-12);
        last = n;
    }
    assert!((sup - last).abs() <= 1e-3);
}

#[test]
fn compose_and_csv() {
    let g = grid();
    let theta = BlaschkeProduct::monomial(2);
    let a = tto(&SymbolSpec::monomial(1), &theta, &g).unwrap();
    assert!(a.compose(&a).unwrap().norm() < 1e-14);
    let b = tho(&SymbolSpec::monomial(1), &theta, Truncation::symmetric(2), &g).unwrap();
    assert!(a.compose(&b).is_err());
    let m = OperatorMatrix::new(
        mat(2, 2, &[(0., 0.), (0.5, -1.), (1., 0.), (0., 0.)]),
        a.domain_frame_id(),
        a.codomain_frame_id(),
        "pinned",
    );
    assert_eq!(m.to_csv(), "0,0,0.5,-1\n1,0,0,0\n");
}
