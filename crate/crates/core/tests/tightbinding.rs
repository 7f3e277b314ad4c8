mod common;

use proptest::prelude::*;

use qband::tightbinding::{
    build_full_hamiltonian, build_s_block, diagonalize_classical, make_kpath, KPoint,
};
use qband::{BlochHamiltonian, TbParameters};

fn spectrum(params: &TbParameters, frac: [f64; 3]) -> Vec<f64> {
    diagonalize_classical(&build_full_hamiltonian(params, &KPoint::new(frac)).unwrap()).unwrap()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn shipped_parameter_file_is_the_builtin_set() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/silicon_sp3.json");
    let p: TbParameters = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(p, TbParameters::silicon());
    assert!(((p.e_p - p.e_s) - 7.20).abs() < 1e-12);
}

#[test]
fn dense_solver_agrees_with_jacobi_on_random_matrices() {
    let mut rng = common::rng(41);
    for dim in [2, 3, 5, 8] {
        for _ in 0..20 {
            let m = common::random_hermitian(dim, &mut rng);
            let ours = diagonalize_classical(&BlochHamiltonian::new(m.clone()).unwrap()).unwrap();
            assert_close(&ours, &common::jacobi_hermitian(&m), 1e-10);
        }
    }
}

#[test]
fn dense_solver_agrees_with_jacobi_on_silicon() {
    let p = TbParameters::silicon();
    for frac in [[0.0; 3], [1.0, 0.0, 0.0], [0.5, 0.5, 0.5], [0.3, -0.1, 0.7], [0.75, 0.25, 0.0]] {
        let h = build_full_hamiltonian(&p, &KPoint::new(frac)).unwrap();
        assert_close(&diagonalize_classical(&h).unwrap(), &common::jacobi_hermitian(&h.matrix), 1e-10);
    }
}

/// Groups sorted values whose neighbours differ by less than `tol`.
fn multiplicities(values: &[f64], tol: f64) -> Vec<usize> {
    let mut out = vec![1];
    for w in values.windows(2) {
        if w[1] - w[0] < tol {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

#[test]
fn gamma_multiplicities_are_one_three_three_one() {
    // Silicon orders them 1, 3, 1, 3: the antibonding s level sits below the
    // antibonding p triplet.
    let e = spectrum(&TbParameters::silicon(), [0.0; 3]);
    assert_eq!(multiplicities(&e, 1e-9), vec![1, 3, 1, 3], "{e:?}");
    let p = TbParameters {
        v_sp: 0.0,
        ..TbParameters::silicon()
    };
    let mut m = multiplicities(&spectrum(&p, [0.0; 3]), 1e-9);
    m.sort_unstable();
    assert_eq!(m, vec![1, 1, 3, 3]);
}

#[test]
fn every_band_is_doubly_degenerate_at_x() {
    let e = spectrum(&TbParameters::silicon(), [1.0, 0.0, 0.0]);
    assert_eq!(multiplicities(&e, 1e-9), vec![2, 2, 2, 2], "{e:?}");
}

#[test]
fn x_gamma_l_path_has_41_increasing_points() {
    let path = make_kpath(&[KPoint::x(), KPoint::gamma(), KPoint::l()], 20).unwrap();
    assert_eq!(path.len(), 41);
    assert_eq!(path.coordinates[0], 0.0);
    assert!(path.coordinates.windows(2).all(|w| w[1] > w[0]));
    let total = 1.0 + 0.75f64.sqrt();
    assert!((path.coordinates[40] - total).abs() < 1e-12);
}

fn kpoint() -> impl Strategy<Value = [f64; 3]> {
    [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64]
}

fn params() -> impl Strategy<Value = TbParameters> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(
        |(e_s, e_p, v_ss, v_sp, v_xx, v_xy)| TbParameters {
            lattice_constant: 5.431,
            e_s,
            e_p,
            v_ss,
            v_sp,
            v_xx,
            v_xy,
        },
    )
}

proptest! {
    #[test]
    fn hamiltonian_is_hermitian(p in params(), k in kpoint()) {
        let h = build_full_hamiltonian(&p, &KPoint::new(k)).unwrap();
        prop_assert!(h.hermitian_residual() <= 1e-12);
        prop_assert_eq!(h.dim(), 8);
    }

    #[test]
    fn spectrum_is_even_in_k(p in params(), k in kpoint()) {
        let a = spectrum(&p, k);
        let b = spectrum(&p, [-k[0], -k[1], -k[2]]);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn spectrum_is_reciprocal_lattice_periodic(p in params(), k in kpoint(), which in 0usize..4) {
        let g = [[1.0, 1.0, 1.0], [2.0, 0.0, 0.0], [0.0, -2.0, 0.0], [-1.0, 1.0, -1.0]][which];
        let a = spectrum(&p, k);
        let b = spectrum(&p, [k[0] + g[0], k[1] + g[1], k[2] + g[2]]);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn trace_is_k_independent(p in params(), k in kpoint()) {
        let h = build_full_hamiltonian(&p, &KPoint::new(k)).unwrap();
        let tr = h.matrix.trace();
        prop_assert!((tr.re - 2.0 * (p.e_s + 3.0 * p.e_p)).abs() < 1e-9);
        prop_assert!(tr.im.abs() < 1e-12);
    }

    #[test]
    fn s_block_levels_appear_in_decoupled_full_spectrum(p in params(), k in kpoint()) {
        let p = TbParameters { v_sp: 0.0, ..p };
        let kp = KPoint::new(k);
        let s = diagonalize_classical(&build_s_block(&p, &kp).unwrap()).unwrap();
        let full = diagonalize_classical(&build_full_hamiltonian(&p, &kp).unwrap()).unwrap();
        for e in s {
            prop_assert!(full.iter().any(|f| (f - e).abs() <= 1e-10), "{} not in {:?}", e, full);
        }
    }

    #[test]
    fn kpath_coordinates_are_monotone(
        anchors in prop::collection::vec(kpoint(), 2..5),
        n in 1usize..12,
    ) {
        let pts: Vec<KPoint> = anchors.iter().map(|&a| KPoint::new(a)).collect();
        let path = make_kpath(&pts, n).unwrap();
        prop_assert_eq!(path.len(), n * (pts.len() - 1) + 1);
        prop_assert_eq!(path.coordinates[0], 0.0);
        prop_assert!(path.coordinates.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(path.points.last().unwrap().frac, pts.last().unwrap().frac);
    }
}
