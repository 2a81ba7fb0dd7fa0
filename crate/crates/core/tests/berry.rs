use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use crystalphase_core::berry::*;
use crystalphase_core::manybody::*;

fn shipped(name: &str) -> LatticeModel {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    LatticeModel::from_path(&p).expect("shipped model loads")
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn random_unitary(rng: &mut StdRng, m: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(m, m, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    a.qr().q()
}

fn random_gauge(sample: &BundleSample, rng: &mut StdRng) -> BundleSample {
    let us: Vec<_> = (0..sample.node_count()).map(|_| random_unitary(rng, sample.degeneracy)).collect();
    sample.regauge(&us)
}

// ---- independent curvature oracle ----------------------------------------

/// Integrates the Kubo-formula curvature of the lowest band of `h` over the
/// unit cell of fractional momenta with an `n x n` midpoint rule.
fn kubo_chern<F>(n: usize, h: F) -> f64
where
    F: Fn(f64, f64) -> [DMatrix<Complex64>; 3],
{
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (kx, ky) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let [hk, dx, dy] = h(kx, ky);
            let eig = hk.symmetric_eigen();
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let u0 = eig.eigenvectors.column(order[0]).into_owned();
            let e0 = eig.eigenvalues[order[0]];
            let mut omega = 0.0;
            for &b in &order[1..] {
                let un = eig.eigenvectors.column(b).into_owned();
                let de = e0 - eig.eigenvalues[b];
                let a = u0.dotc(&(&dx * &un));
                let c = un.dotc(&(&dy * &u0));
                omega += 2.0 * (a * c).im / (de * de);
            }
            total += omega / (n * n) as f64;
        }
    }
    total / TAU
}

/// Flux-1/3 Hofstadter Bloch matrix written out by hand, with derivatives.
fn hofstadter_oracle(kx: f64, ky: f64) -> [DMatrix<Complex64>; 3] {
    let mut h = DMatrix::zeros(3, 3);
    let mut dx = DMatrix::zeros(3, 3);
    let mut dy = DMatrix::zeros(3, 3);
    for j in 0..3 {
        let arg = TAU * (ky - j as f64 / 3.0);
        h[(j, j)] = Complex64::new(-2.0 * arg.cos(), 0.0);
        dy[(j, j)] = Complex64::new(2.0 * TAU * arg.sin(), 0.0);
    }
    for (a, b) in [(0, 1), (1, 2)] {
        h[(a, b)] = Complex64::new(-1.0, 0.0);
        h[(b, a)] = Complex64::new(-1.0, 0.0);
    }
    h[(2, 0)] = -cis(TAU * kx);
    h[(0, 2)] = -cis(-TAU * kx);
    dx[(2, 0)] = -Complex64::new(0.0, TAU) * cis(TAU * kx);
    dx[(0, 2)] = Complex64::new(0.0, TAU) * cis(-TAU * kx);
    [h, dx, dy]
}

/// Two-band model d(k)·σ with d = (sin kx, sin ky, u + cos kx + cos ky).
fn qwz_oracle(u: f64) -> impl Fn(f64, f64) -> [DMatrix<Complex64>; 3] {
    move |kx, ky| {
        let (x, y) = (TAU * kx, TAU * ky);
        let pauli = |a: f64, b: f64, c: f64| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(c, 0.0),
                    Complex64::new(a, -b),
                    Complex64::new(a, b),
                    Complex64::new(-c, 0.0),
                ],
            )
        };
        [
            pauli(x.sin(), y.sin(), u + x.cos() + y.cos()),
            pauli(TAU * x.cos(), 0.0, -TAU * x.sin()),
            pauli(0.0, TAU * y.cos(), -TAU * y.sin()),
        ]
    }
}

fn qwz_model(u: f64) -> LatticeModel {
    let v = json!({
        "dim": 2, "cells": [1, 1], "orbitals": 2, "statistics": "fermion", "N": 1,
        "onsite": [u, -u],
        "hoppings": [
            {"i": 0, "j": 1, "d": [1, 0], "t": [0.0, -0.5]},
            {"i": 1, "j": 0, "d": [1, 0], "t": [0.0, -0.5]},
            {"i": 0, "j": 1, "d": [0, 1], "t": [-0.5, 0.0]},
            {"i": 1, "j": 0, "d": [0, 1], "t": [0.5, 0.0]},
            {"i": 0, "j": 0, "d": [1, 0], "t": [0.5, 0.0]},
            {"i": 1, "j": 1, "d": [1, 0], "t": [-0.5, 0.0]},
            {"i": 0, "j": 0, "d": [0, 1], "t": [0.5, 0.0]},
            {"i": 1, "j": 1, "d": [0, 1], "t": [-0.5, 0.0]}
        ]
    });
    LatticeModel::from_json(&v.to_string()).unwrap()
}

#[test]
fn oracle_matrices_match_the_model_files() {
    let m = shipped("hofstadter_q3.json");
    let q = qwz_model(1.0);
    for (kx, ky) in [(0.1, 0.7), (0.45, 0.2), (0.9, 0.33)] {
        assert!((bloch_hamiltonian(&m, &[kx, ky]) - &hofstadter_oracle(kx, ky)[0]).norm() < 1e-12);
        assert!((bloch_hamiltonian(&q, &[kx, ky]) - &qwz_oracle(1.0)(kx, ky)[0]).norm() < 1e-12);
    }
}

#[test]
fn hofstadter_lowest_band_has_chern_one() {
    let oracle = kubo_chern(120, hofstadter_oracle);
    assert!((oracle - 1.0).abs() < 1e-2, "oracle {oracle}");
    let r = band_chern(&shipped("hofstadter_q3.json"), 1, [24, 24]).unwrap();
    assert_eq!(r.integer(), 1);
    assert!(r.quantization_distance < 1e-12);
    assert!(r.admissibility_margin > 0.0);
    assert_eq!(r.plaquettes.len(), 576);
}

#[test]
fn two_band_model_matches_oracle_sign() {
    for u in [-1.0, 1.0, 3.0] {
        let oracle = kubo_chern(120, qwz_oracle(u));
        let r = band_chern(&qwz_model(u), 1, [24, 24]).unwrap();
        assert!((oracle - r.value).abs() < 2e-2, "u = {u}: oracle {oracle}, lattice {}", r.value);
    }
    assert_eq!(band_chern(&qwz_model(1.0), 1, [24, 24]).unwrap().integer().abs(), 1);
    assert_eq!(band_chern(&qwz_model(3.0), 1, [24, 24]).unwrap().integer(), 0);
}

#[test]
fn chern_is_stable_under_mesh_refinement() {
    let m = shipped("hofstadter_q3.json");
    let values: Vec<i64> = [6, 12, 24].iter().map(|&n| band_chern(&m, 1, [n, n]).unwrap().integer()).collect();
    assert_eq!(values, vec![1, 1, 1]);
}

#[test]
fn determinant_line_of_two_bands() {
    // Lowest two Hofstadter bands carry 1 + (-2) = -1.
    let m = shipped("hofstadter_q3.json");
    assert_eq!(band_chern(&m, 2, [12, 12]).unwrap().integer(), -1);
    assert_eq!(band_chern(&m, 3, [12, 12]).unwrap().integer(), 0);
}

// ---- links and holonomies --------------------------------------------------

fn scalar_field(shape: [usize; 2], phase: impl Fn(usize, usize) -> f64) -> BundleSample {
    let mut frames = Vec::new();
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            frames.push(vec![DVector::from_vec(vec![cis(phase(i, j))])]);
        }
    }
    BundleSample::torus(shape.to_vec(), frames).unwrap()
}

#[test]
fn constant_field_links_and_chern() {
    let s = scalar_field([4, 5], |_, _| 0.0);
    for i in 0..4 {
        for j in 0..5 {
            for d in 0..2 {
                assert_eq!(overlap_link(&s, &[i, j], d).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
    }
    let r = fhs_chern(&s).unwrap();
    assert_eq!(r.value, 0.0);
    let loop_ = ClosedPath::cycle(&[0, 1, 6, 5]);
    assert_eq!(wilson_holonomy(&s, &loop_).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn pure_gauge_links() {
    let phi = |i: usize, j: usize| 0.3 * i as f64 + 0.7 * (j * j) as f64;
    let s = scalar_field([4, 4], phi);
    let link = overlap_link(&s, &[1, 2], 1).unwrap();
    assert!((link - cis(phi(1, 3) - phi(1, 2))).norm() < 1e-14);
    assert_eq!(fhs_chern(&s).unwrap().value, 0.0);
}

#[test]
fn plaquette_loop_reproduces_field_strength() {
    let s = band_sample(&shipped("hofstadter_q3.json"), 1, [6, 6]).unwrap();
    let phases = plaquette_phases(&s).unwrap();
    let (i, j) = (2, 3);
    let nodes = [s.node_index(&[i, j]), s.node_index(&[i + 1, j]), s.node_index(&[i + 1, j + 1]), s.node_index(&[i, j + 1])];
    let hol = wilson_holonomy(&s, &ClosedPath::cycle(&nodes)).unwrap();
    assert!((hol - cis(phases[i * 6 + j])).norm() < 1e-14);
}

#[test]
fn determinant_link_under_basis_changes() {
    let s = band_sample(&shipped("hofstadter_q3.json"), 2, [6, 6]).unwrap();
    let before = overlap_link(&s, &[0, 0], 0).unwrap();
    let swap = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let mut us = vec![DMatrix::identity(2, 2); s.node_count()];
    us[0] = swap;
    let swapped = s.regauge(&us);
    // Swapping the frame at the start node flips the determinant sign only.
    assert!((overlap_link(&swapped, &[0, 0], 0).unwrap() + before).norm() < 1e-12);
    let mut rng = StdRng::seed_from_u64(3);
    let mixed = random_gauge(&s, &mut rng);
    let loop_ = ClosedPath::cycle(&[0, 1, 7, 6]);
    let a = wilson_holonomy(&s, &loop_).unwrap();
    let b = wilson_holonomy(&mixed, &loop_).unwrap();
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn holonomy_and_chern_are_gauge_invariant() {
    let s = band_sample(&shipped("hofstadter_q3.json"), 1, [8, 8]).unwrap();
    let base = fhs_chern(&s).unwrap();
    let loop_ = ClosedPath::cycle(&[0, 1, 2, 10, 18, 17, 9]);
    let hol = wilson_holonomy(&s, &loop_).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let g = random_gauge(&s, &mut rng);
        let r = fhs_chern(&g).unwrap();
        assert_eq!(r.value, base.value);
        for (a, b) in r.plaquettes.iter().zip(&base.plaquettes) {
            assert!((a.phase - b.phase).abs() < 1e-12);
        }
        assert!((wilson_holonomy(&g, &loop_).unwrap() - hol).norm() < 1e-12);
    }
}

#[test]
fn open_paths_are_rejected() {
    let s = scalar_field([3, 3], |_, _| 0.0);
    let open = ClosedPath {
        steps: vec![PathStep { from: 0, to: 1, op: None }, PathStep { from: 1, to: 2, op: None }],
    };
    assert!(matches!(wilson_holonomy(&s, &open), Err(BerryError::OpenPath(_))));
    assert!(matches!(wilson_holonomy(&s, &ClosedPath::default()), Err(BerryError::OpenPath(_))));
}

#[test]
fn orthogonal_neighbors_need_a_finer_mesh() {
    let mut frames = Vec::new();
    for k in 0..4 {
        let mut v = DVector::zeros(2);
        v[k % 2] = Complex64::new(1.0, 0.0);
        frames.push(vec![v]);
    }
    let s = BundleSample::torus(vec![2, 2], frames).unwrap();
    assert!(matches!(fhs_chern(&s), Err(BerryError::MeshTooCoarse { .. })));
}

#[test]
fn admissibility_limit_is_enforced() {
    let s = band_sample(&shipped("hofstadter_q3.json"), 1, [6, 6]).unwrap();
    let r = fhs_chern(&s).unwrap();
    let worst = PI - r.admissibility_margin;
    assert!(matches!(fhs_chern_with_limit(&s, worst * 0.5), Err(BerryError::Inadmissible { .. })));
}

#[test]
fn curvature_csv_lists_every_plaquette() {
    let r = band_chern(&shipped("hofstadter_q3.json"), 1, [4, 4]).unwrap();
    let csv = r.curvature_csv();
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.starts_with("face,i0,i1,phase\n"));
    let sum: f64 = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((sum / TAU - 1.0).abs() < 1e-9);
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert!(v.get("plaquettes").is_none());
    assert_eq!(v["invariant"], "chern");
}

// ---- many-body Chern numbers -------------------------------------------------

#[test]
fn manybody_chern_equals_band_chern() {
    let m = shipped("hofstadter_q3.json");
    let single = band_chern(&m, 1, [24, 24]).unwrap().integer();
    let many = manybody_chern(&m, [6, 6], None).unwrap();
    assert_eq!(many.integer(), single);
    assert!(many.quantization_distance < 1e-10);
    assert_eq!(many.model_hash.as_deref(), Some(m.content_hash().as_str()));
}

#[test]
fn interaction_keeps_the_integer() {
    let m = shipped("hofstadter_q3_interacting.json");
    for scale in [0.5, 1.0] {
        let mv = m.with_interaction_scale(scale);
        assert!(sweep_twist_grid(&mv, &[6, 6], None).unwrap().min_gap > 0.0);
        assert_eq!(manybody_chern(&mv, [6, 6], None).unwrap().integer(), 1);
    }
}

#[test]
fn vacuum_and_partial_filling() {
    let m = shipped("hofstadter_q3.json");
    assert_eq!(manybody_chern(&m.with_particles(0).unwrap(), [4, 4], None).unwrap().value, 0.0);
    assert!(matches!(
        manybody_chern(&m.with_particles(4).unwrap(), [4, 4], None),
        Err(BerryError::Degenerate { .. })
    ));
}

// ---- torsion invariant -------------------------------------------------------

#[test]
fn flat_model_has_trivial_torsion() {
    let r = f222_torsion(&shipped("f222_flat.json"), 1, 4).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.invariant, "torsion");
}

#[test]
fn f222_torsion_is_one_half_across_meshes() {
    let m = shipped("f222_tb.json");
    for mesh in [4, 8] {
        let r = f222_torsion(&m, 1, mesh).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "mesh {mesh}: {}", r.value);
        assert!(r.quantization_distance < 1e-3);
        assert_eq!(r.grid, vec![mesh; 3]);
        assert_eq!(r.plaquettes.len(), 3 * mesh * mesh);
    }
}

#[test]
fn loop_choice_does_not_matter() {
    let d = f222_domain(&shipped("f222_tb.json"), 1, 6).unwrap();
    let values: Vec<f64> = [LoopStart::A, LoopStart::B, LoopStart::C].iter().map(|&s| d.torsion(s).unwrap().value).collect();
    for v in &values {
        assert!((v - values[0]).abs() < 1e-9, "{values:?}");
    }
}

#[test]
fn torsion_is_gauge_invariant() {
    let d = f222_domain(&shipped("f222_tb.json"), 1, 4).unwrap();
    let base = d.torsion(LoopStart::A).unwrap().value;
    let mut rng = StdRng::seed_from_u64(29);
    for _ in 0..20 {
        let mut g = d.clone();
        g.sample = random_gauge(&d.sample, &mut rng);
        assert!((g.torsion(LoopStart::A).unwrap().value - base).abs() < 1e-12);
    }
}

fn block_ops(a: &[DMatrix<Complex64>; 3], b: &[DMatrix<Complex64>; 3]) -> [DMatrix<Complex64>; 3] {
    std::array::from_fn(|k| {
        let (n, m) = (a[k].nrows(), b[k].nrows());
        let mut big = DMatrix::zeros(n + m, n + m);
        big.view_mut((0, 0), (n, n)).copy_from(&a[k]);
        big.view_mut((n, n), (m, m)).copy_from(&b[k]);
        big
    })
}

fn sum_domain(a: &QuotientDomain, b: &QuotientDomain) -> QuotientDomain {
    let mut d = a.clone();
    d.sample = a.sample.direct_sum(&b.sample).unwrap();
    d.ops = block_ops(&a.ops, &b.ops);
    d
}

#[test]
fn torsion_is_additive_mod_one() {
    let tb = f222_domain(&shipped("f222_tb.json"), 1, 4).unwrap();
    let flat = f222_domain(&shipped("f222_flat.json"), 1, 4).unwrap();
    let doubled = sum_domain(&tb, &tb).torsion(LoopStart::A).unwrap();
    assert!(doubled.value.abs() < 1e-9, "{}", doubled.value);
    let mixed = sum_domain(&tb, &flat).torsion(LoopStart::A).unwrap();
    assert!((mixed.value - 0.5).abs() < 1e-9);
}

#[test]
fn inconsistent_sewing_is_detected() {
    let mut d = f222_domain(&shipped("f222_tb.json"), 1, 4).unwrap();
    let swap = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    for id in &mut d.sample.identifications {
        id.op = swap.clone();
    }
    assert!(matches!(d.torsion(LoopStart::A), Err(BerryError::InconsistentSewing { .. })));
}

#[test]
fn torsion_requires_symmetric_model() {
    let m = shipped("f222_tb.json");
    let mut broken = m.clone();
    broken.onsite = vec![1.8, -1.5];
    broken.hoppings.push(Hopping { i: 0, j: 1, d: vec![0, 0, 0], t: Complex64::new(0.3, 0.0) });
    broken.hoppings.push(Hopping { i: 1, j: 0, d: vec![0, 0, 0], t: Complex64::new(0.3, 0.0) });
    assert!(matches!(
        f222_torsion(&broken, 1, 4),
        Err(BerryError::ManyBody(ManyBodyError::SymmetryViolation(_)))
    ));
    assert!(matches!(f222_torsion(&shipped("hofstadter_q3.json"), 1, 4), Err(BerryError::Geometry(_))));
}
