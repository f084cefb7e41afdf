//! Structural tests for assembled deformation complexes: block patterns,
//! d^2 = 0, the pasting-composition chain maps, cones, the dual-cylinder
//! lemma and the association homotopy.

use deforma::complex::{
    assemble, association_homotopy, cone, dual_cylinder, pasting_map, pushout_union,
    quotient_by_subcomplex, sigma_ddagger, AssembleOptions, BlockMatrix, ChainMap, GradedComplex,
};
use deforma::diagram::PastingTree;
use deforma::matrix::ExactMatrix;
use deforma::scalar::{Field, Scalar};
use deforma::shapes;
use std::collections::BTreeMap;

const Q: Field = Field::Rational;

fn opts(n_max: i64) -> AssembleOptions {
    AssembleOptions {
        n_max,
        force_dtop: None,
    }
}

#[test]
fn bare_category_complex() {
    let d = shapes::bare_category(std::sync::Arc::new(deforma::samples::point(Q)));
    let x = assemble(&d, opts(3)).unwrap();
    assert_eq!(x.summands.len(), 1);
    assert_eq!(x.summands[0].shift, 2);
    // diagonal is -d: at total degree 0 the block is minus the differential
    // C^2(1) -> C^3(1); on the point category d(basis of C^2) = 0 and
    // d(basis of C^1) = -basis of C^2, so the block at degree -1 is +1
    let b = x.diff_matrix(-1);
    assert_eq!((b.rows(), b.cols()), (1, 1));
    assert_eq!(b.get(0, 0), Scalar::one(Q));
    assert!(x.check_d_squared().is_ok());
}

#[test]
fn triangular_pillow_matches_displayed_pattern() {
    let d = shapes::triangular_pillow(Q, 2, 3, 5, 1, 1);
    assert!(d.validate().is_valid());
    let x = assemble(&d, opts(2)).unwrap();
    // summand order: A, B, F, G, H, sigma, tau, upsilon, 3-cell
    let labels: Vec<&str> = x.summands.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(
        labels,
        vec!["A", "B", "F", "G", "H", "sigma", "tau", "upsilon", "assoc"]
    );
    assert_eq!(
        x.summands.iter().map(|s| s.shift).collect::<Vec<_>>(),
        vec![3, 3, 2, 2, 2, 1, 1, 1, 0]
    );
    // displayed zero/nonzero pattern of the coboundary (rows x cols);
    // 1 marks a block that may be nonzero
    let pattern: [[u8; 9]; 9] = [
        [1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 1, 0, 0, 0, 0, 0],
        [1, 1, 0, 0, 1, 0, 0, 0, 0],
        [0, 1, 1, 1, 0, 1, 0, 0, 0],
        [0, 1, 0, 1, 1, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 1, 1, 1, 1],
    ];
    for n in x.n_min..x.n_max {
        let bm = x.diff.get(&n).unwrap();
        for (&(i, j), b) in &bm.blocks {
            if !b.is_zero() {
                assert_eq!(
                    pattern[i][j], 1,
                    "unexpected nonzero block ({}, {}) at degree {}",
                    labels[i], labels[j], n
                );
            }
        }
    }
    // lower-triangular with diagonal present
    assert!(x.check_d_squared().is_ok(), "d^2 != 0 on the pillow");
}

#[test]
fn pillow_three_cell_row_entries() {
    // the 3-cell row at the deformation degree: the (3cell, sigma) block is
    // tau_*, the (3cell, tau) block is sigma^*, the (3cell, upsilon) block is
    // -Id
    let d = shapes::triangular_pillow(Q, 2, 3, 5, 1, 1);
    let x = assemble(&d, opts(2)).unwrap();
    let n = -1; // sigma summand holds C^0(F,G), 3-cell row lands in C^0(F,H)
    let bm = x.diff.get(&n).unwrap();
    let ups_block = bm.block(8, 7, Q);
    assert_eq!(ups_block, ExactMatrix::identity(2, Q).neg());
    assert!(!bm.block(8, 5, Q).is_zero());
    assert!(!bm.block(8, 6, Q).is_zero());
}

#[test]
fn d_squared_zero_on_shapes() {
    let diagrams = vec![
        shapes::dual_two_cell(Q, 2, 3, 1),
        shapes::bigonal_pillow(Q, 2, 3, 1),
        shapes::triangular_pillow(Q, 1, 2, 3, 1, 2),
        shapes::square_pillow(Q, [1, 2, 3, 4], [1, 2]),
        shapes::triple_pillow(Q, [1, 2, 3, 4], [1, 1, 1], false),
        shapes::triple_pillow(Q, [1, 2, 3, 4], [1, 1, 1], true),
        shapes::post1comp(Q, 2, 3, 5, 1),
        shapes::pre1comp(Q, 2, 3, 5, 1),
        shapes::two_edges(Q, 2, 3),
    ];
    for d in diagrams {
        assert!(d.validate().is_valid(), "{} invalid", d.name);
        let x = assemble(&d, opts(2)).unwrap();
        assert!(x.check_d_squared().is_ok(), "d^2 != 0 on {}", d.name);
    }
}

#[test]
fn pasting_map_single_leaf_is_identity() {
    let d = shapes::dual_two_cell(Q, 2, 3, 1);
    let pm = pasting_map(&d, &PastingTree::cell(0), opts(2)).unwrap();
    for n in pm.source.n_min..=pm.source.n_max {
        let m = pm.map.matrix(&pm.source, &pm.target, n);
        assert_eq!(m, ExactMatrix::identity(pm.source.total_dim(n), Q));
    }
}

#[test]
fn comp2_map_is_chain_map_with_displayed_pattern() {
    // sigma, tau composable bigons without the 3-cell
    let mut d = shapes::triangular_pillow(Q, 2, 3, 5, 1, 2);
    d.cells3.clear();
    d.cells2.remove(2); // drop upsilon, keep sigma, tau
    let tree = PastingTree::comp2(PastingTree::cell(0), PastingTree::cell(1));
    let pm = pasting_map(&d, &tree, opts(2)).unwrap();
    assert!(
        pm.map.verify_chain_map(&pm.source, &pm.target).is_ok(),
        "comp2 pasting map is not a chain map"
    );
    // target summands: A, B, F, H, composite
    let tlabels: Vec<&str> = pm.target.summands.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(tlabels, vec!["A", "B", "F", "H", "composite"]);
    // displayed pattern: identities on A, B, F; identity H from H; bottom row
    // from B, sigma, tau
    let n = 0;
    let bm = pm.map.mats.get(&n).unwrap();
    // source order: A, B, F, G, H, sigma, tau
    let id_pairs = [(0usize, 0usize), (1, 1), (2, 2), (3, 4)];
    for &(t, s) in &id_pairs {
        let b = bm.block(t, s, Q);
        assert_eq!(b, ExactMatrix::identity(b.rows(), Q));
    }
    for (&(i, j), b) in &bm.blocks {
        if b.is_zero() {
            continue;
        }
        let ok = id_pairs.contains(&(i, j)) || (i == 4 && (j == 1 || j == 5 || j == 6));
        assert!(ok, "unexpected nonzero block ({i},{j}) in comp2 map");
    }
}

#[test]
fn whisker_maps_are_chain_maps() {
    // pre-composition: sigma: G => H whiskered by F
    let mut d = shapes::pre1comp(Q, 2, 3, 5, 1);
    d.cells3.clear();
    d.cells2.remove(1); // keep only sigma
    let tree = PastingTree::WhiskPre(0, Box::new(PastingTree::cell(0)));
    let pm = pasting_map(&d, &tree, opts(2)).unwrap();
    assert!(pm.map.verify_chain_map(&pm.source, &pm.target).is_ok());
    let tlabels: Vec<&str> = pm.target.summands.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(tlabels.len(), 5, "A, C, G(F), H(F), composite: {tlabels:?}");

    // post-composition: sigma: F => G whiskered by H
    let mut d = shapes::post1comp(Q, 2, 3, 5, 1);
    d.cells3.clear();
    d.cells2.remove(1);
    let tree = PastingTree::WhiskPost(Box::new(PastingTree::cell(0)), 2);
    let pm = pasting_map(&d, &tree, opts(2)).unwrap();
    assert!(pm.map.verify_chain_map(&pm.source, &pm.target).is_ok());
}

#[test]
fn cone_of_identity_is_acyclic() {
    let d = shapes::bare_category(std::sync::Arc::new(deforma::samples::dual_numbers(Q)));
    let x = assemble(&d, opts(3)).unwrap();
    let mut mats = BTreeMap::new();
    for n in x.n_min..=x.n_max {
        let dim = x.total_dim(n);
        let mut bm = BlockMatrix::zero(vec![dim], vec![dim]);
        if dim > 0 {
            bm.add_block(0, 0, ExactMatrix::identity(dim, Q));
        }
        mats.insert(n, bm);
    }
    let idmap = ChainMap {
        name: "id".into(),
        mats,
    };
    let c = cone(&idmap, &x, &x).unwrap();
    assert!(c.check_d_squared().is_ok());
    for (_, h) in c.cohomology_dims(c.n_min + 1, c.n_max - 1) {
        assert_eq!(h, 0, "cone(Id) must be acyclic");
    }
}

#[test]
fn cone_of_zero_is_direct_sum() {
    let d = shapes::bare_category(std::sync::Arc::new(deforma::samples::point(Q)));
    let x = assemble(&d, opts(3)).unwrap();
    let zero = ChainMap {
        name: "0".into(),
        mats: BTreeMap::new(),
    };
    let c = cone(&zero, &x, &x).unwrap();
    assert!(c.check_d_squared().is_ok());
    // dims are the sums of the shifted and unshifted parts
    for n in c.n_min..=c.n_max {
        assert_eq!(c.total_dim(n), x.total_dim(n + 1) + x.total_dim(n));
    }
}

#[test]
fn sigma_ddagger_is_chain_map_and_cone_matches_assemble() {
    let d = shapes::dual_two_cell(Q, 2, 3, 1);
    let sd = sigma_ddagger(&d, 0, opts(3)).unwrap();
    assert!(
        sd.map.verify_chain_map(&sd.domain, &sd.target).is_ok(),
        "sigma_ddagger is not a chain map"
    );
    // cone(sigma_ddagger) reproduces the assembled complex of the two-cell
    // diagram up to the global sign of the differential
    let c = cone(&sd.map, &sd.domain, &sd.target).unwrap();
    let x = assemble(&d, opts(2)).unwrap();
    for n in x.n_min..x.n_max {
        let a = x.diff_matrix(n);
        let b = c.diff_matrix(n);
        assert_eq!(x.total_dim(n), c.total_dim(n), "dims differ at {n}");
        assert!(
            a.add(&b).is_zero(),
            "cone(sigma_ddagger) differs from the assembled complex at degree {n}"
        );
    }
    // and in particular they have the same cohomology
    let ha = x.cohomology_dims(x.n_min, x.n_max - 1);
    let hb = c.cohomology_dims(x.n_min, x.n_max - 1);
    assert_eq!(ha, hb);
}

/// Generate a lemma instance: complexes C = A = B = the Hochschild complex
/// of the dual numbers, f = a*Id, tau = t*Id, sigma random of degree -1,
/// g = tau f + d sigma + sigma d.
fn lemma_instance(seed: u64) -> (GradedComplex, GradedComplex, GradedComplex, ChainMap, ChainMap, ChainMap) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dd = std::sync::Arc::new(deforma::samples::dual_numbers(Q));
    let x = deforma::complex::hochschild_summand_complex(
        "C",
        deforma::hochschild::SpaceKind::Category(dd.clone()),
        0,
        0,
        4,
        1,
        Q,
    );
    let scalar_map = |c: i64, x: &GradedComplex| -> ChainMap {
        let mut mats = BTreeMap::new();
        for n in x.n_min..=x.n_max {
            let dim = x.total_dim(n);
            let mut bm = BlockMatrix::zero(vec![dim], vec![dim]);
            if dim > 0 {
                bm.add_block(0, 0, ExactMatrix::identity(dim, Q).scale(&Scalar::from_int(Q, c)));
            }
            mats.insert(n, bm);
        }
        ChainMap {
            name: format!("{c}*Id"),
            mats,
        }
    };
    let a = rng.gen_range(-3..=3);
    let t = rng.gen_range(-3..=3);
    let f = scalar_map(a, &x);
    let tau = scalar_map(t, &x);
    // sigma_n : C^{n+1} -> B^n random
    let mut sigma: BTreeMap<i64, ExactMatrix> = BTreeMap::new();
    for n in x.n_min..=x.n_max {
        let rows = x.total_dim(n);
        let cols = x.total_dim(n + 1);
        let mut m = ExactMatrix::zero(rows, cols, Q);
        for i in 0..rows {
            for j in 0..cols {
                let v = rng.gen_range(-2..=2);
                if v != 0 {
                    m.set(i, j, Scalar::from_int(Q, v));
                }
            }
        }
        sigma.insert(n, m);
    }
    // g = tau f + d sigma + sigma d  (as per-degree matrices)
    let mut gmats = BTreeMap::new();
    for n in x.n_min..=x.n_max {
        let tf = tau
            .matrix(&x, &x, n)
            .mul(&f.matrix(&x, &x, n));
        let ds = if n > x.n_min {
            x.diff_matrix(n - 1).mul(&sigma[&(n - 1)])
        } else {
            ExactMatrix::zero(x.total_dim(n), x.total_dim(n), Q)
        };
        let sd = if n < x.n_max {
            sigma[&n].mul(&x.diff_matrix(n))
        } else {
            ExactMatrix::zero(x.total_dim(n), x.total_dim(n), Q)
        };
        let g = tf.add(&ds).add(&sd);
        let mut bm = BlockMatrix::zero(vec![g.rows()], vec![g.cols()]);
        bm.add_block(0, 0, g);
        gmats.insert(n, bm);
    }
    let g = ChainMap {
        name: "g".into(),
        mats: gmats,
    };
    // phi: cone(f) -> cone(g), [Id, 0; sigma, tau]
    let cf = cone(&f, &x, &x).unwrap();
    let cg = cone(&g, &x, &x).unwrap();
    let mut pmats = BTreeMap::new();
    for n in cf.n_min..=cf.n_max {
        let dim_c1 = x.total_dim(n + 1);
        let dim_b = x.total_dim(n);
        let row_dims = vec![dim_c1, dim_b];
        let col_dims = vec![dim_c1, dim_b];
        let mut bm = BlockMatrix::zero(row_dims, col_dims);
        if dim_c1 > 0 {
            bm.add_block(0, 0, ExactMatrix::identity(dim_c1, Q));
        }
        if dim_b > 0 && dim_c1 > 0 {
            bm.add_block(1, 0, sigma[&n].clone());
        }
        if dim_b > 0 {
            bm.add_block(1, 1, tau.matrix(&x, &x, n).clone());
        }
        pmats.insert(n, bm);
    }
    let phi = ChainMap {
        name: "phi".into(),
        mats: pmats,
    };
    assert!(phi.verify_chain_map(&cf, &cg).is_ok(), "phi not a chain map");
    (x, cf, cg, f, g, phi)
}

#[test]
fn lemma_cylinder_quasi_isomorphic_to_reduced_complex() {
    for seed in 0..5u64 {
        let (x, cf, cg, f, g, phi) = lemma_instance(seed);
        let cyl = dual_cylinder(&phi, &cf, &cg).unwrap();
        assert!(cyl.check_d_squared().is_ok());

        // reduced complex: C^{+2} (+) A^{+1} (+) B^{+1} (+) B.  The signs
        // are pinned by requiring the stated inclusion to be a chain map
        // against the cylinder built from the cone convention
        // [-d_X, 0; -f, d_Y]: rows (d_C; f, -d_A; g, 0, -d_B;
        // -sigma, -tau, Id, d_B).
        let mut dims = BTreeMap::new();
        let n_min = cyl.n_min;
        let n_max = cyl.n_max;
        for n in n_min..=n_max {
            dims.insert(
                n,
                vec![
                    x.total_dim(n + 2),
                    x.total_dim(n + 1),
                    x.total_dim(n + 1),
                    x.total_dim(n),
                ],
            );
        }
        let mut diff = BTreeMap::new();
        for n in n_min..n_max {
            let mut bm = BlockMatrix::zero(dims[&(n + 1)].clone(), dims[&n].clone());
            let set = |bm: &mut BlockMatrix, i: usize, j: usize, m: ExactMatrix| {
                if m.rows() > 0 && m.cols() > 0 && !m.is_zero() {
                    bm.add_block(i, j, m);
                }
            };
            set(&mut bm, 0, 0, x.diff_matrix(n + 2));
            set(&mut bm, 1, 0, f.matrix(&x, &x, n + 2));
            set(&mut bm, 1, 1, x.diff_matrix(n + 1).neg());
            set(&mut bm, 2, 0, g.matrix(&x, &x, n + 2));
            set(&mut bm, 2, 2, x.diff_matrix(n + 1).neg());
            // sigma at this degree: block (1,0) of phi at degree n+1
            let pm = phi.mats.get(&(n + 1)).unwrap();
            set(&mut bm, 3, 0, pm.block(1, 0, Q).neg());
            set(&mut bm, 3, 1, pm.block(1, 1, Q).neg());
            if x.total_dim(n + 1) > 0 {
                set(&mut bm, 3, 2, ExactMatrix::identity(x.total_dim(n + 1), Q));
            }
            set(&mut bm, 3, 3, x.diff_matrix(n));
            diff.insert(n, bm);
        }
        let reduced = GradedComplex {
            name: "reduced".into(),
            field: Q,
            summands: (0..4)
                .map(|i| deforma::complex::Summand {
                    label: format!("r{i}"),
                    kind: deforma::complex::SummandKind::Opaque,
                    shift: 0,
                    space_kind: None,
                })
                .collect(),
            n_min,
            n_max,
            dims,
            spaces: BTreeMap::new(),
            diff,
        };
        assert!(reduced.check_d_squared().is_ok(), "reduced d^2 != 0");
        let lo = n_min + 1;
        let hi = n_max - 2;
        assert_eq!(
            cyl.cohomology_dims(lo, hi),
            reduced.cohomology_dims(lo, hi),
            "cylinder vs reduced cohomology at seed {seed}"
        );

        // the inclusion (c, a, b, b') -> (c, a, c, b, 0, b') has acyclic
        // cokernel
        let mut inclusions = BTreeMap::new();
        for n in n_min..=n_max {
            let sub = x.total_dim(n + 2) + x.total_dim(n + 1) * 2 + x.total_dim(n);
            let amb = cyl.total_dim(n);
            let mut inc = ExactMatrix::zero(amb, sub, Q);
            let c2 = x.total_dim(n + 2);
            let a1 = x.total_dim(n + 1);
            let b1 = x.total_dim(n + 1);
            let b0 = x.total_dim(n);
            // ambient layout: [C^{n+2}, A^{n+1} | C^{n+2}, B^{n+1} | C^{n+1}, B^n]
            for i in 0..c2 {
                inc.set(i, i, Scalar::one(Q)); // c -> first slot
                inc.set(c2 + a1 + i, i, Scalar::one(Q)); // c -> third slot
            }
            for i in 0..a1 {
                inc.set(c2 + i, c2 + i, Scalar::one(Q)); // a
            }
            for i in 0..b1 {
                inc.set(c2 + a1 + c2 + i, c2 + a1 + i, Scalar::one(Q)); // b
            }
            for i in 0..b0 {
                inc.set(
                    c2 + a1 + c2 + b1 + x.total_dim(n + 1) + i,
                    c2 + a1 + b1 + i,
                    Scalar::one(Q),
                ); // b'
            }
            inclusions.insert(n, inc);
        }
        // subcomplex property: d(im) is in im; verified by the quotient
        let coker = quotient_by_subcomplex(&cyl, &inclusions).unwrap();
        assert!(coker.check_d_squared().is_ok());
        for (deg, h) in coker.cohomology_dims(lo, hi) {
            assert_eq!(h, 0, "cokernel not acyclic at degree {deg}, seed {seed}");
        }
    }
}

#[test]
fn babyqi_pillow_quasi_isomorphic_to_cylinder() {
    let pillow = shapes::triangular_pillow(Q, 2, 3, 5, 1, 2);
    let p = assemble(&pillow, opts(2)).unwrap();

    // same cells without the 3-cell, composed by the pasting map; the
    // composable diagram grades its categories at shift 2, and the two
    // shifts in the cylinder formula land its pieces exactly on the
    // pillow's grading
    let mut dst = pillow.clone();
    dst.cells3.clear();
    dst.cells2.remove(2); // the map composes sigma, tau only
    let tree = PastingTree::comp2(PastingTree::cell(0), PastingTree::cell(1));
    let pm = pasting_map(&dst, &tree, opts(3)).unwrap();
    assert!(pm.map.verify_chain_map(&pm.source, &pm.target).is_ok());

    let cyl = dual_cylinder(&pm.map, &pm.source, &pm.target).unwrap();
    assert!(cyl.check_d_squared().is_ok());
    let lo = p.n_min;
    let hi = p.n_max - 2;
    assert_eq!(
        p.cohomology_dims(lo, hi),
        cyl.cohomology_dims(lo, hi),
        "pillow vs dual cylinder cohomology"
    );
}

#[test]
fn association_homotopy_residual_vanishes() {
    let mut d = shapes::triple_pillow(Q, [1, 2, 3, 4], [1, 1, 2], false);
    d.cells3.clear();
    d.cells2.remove(3); // drop chi; keep sigma, tau, upsilon
    assert!(d.validate().is_valid());
    let h = association_homotopy(&d, 0, 1, 2, opts(2)).unwrap();
    // difference of the two associations is nonzero somewhere
    let mut any_diff = false;
    for n in h.source.n_min..h.source.n_max {
        let dm = h
            .psi_left
            .matrix(&h.source, &h.target, n)
            .sub(&h.psi_right.matrix(&h.source, &h.target, n));
        if !dm.is_zero() {
            any_diff = true;
        }
        assert!(
            h.residual[&n].is_zero(),
            "association homotopy residual nonzero at degree {n}"
        );
    }
    assert!(any_diff, "the two associations agree identically; test is vacuous");
    // induced maps on cohomology agree: psi - psi~ maps cocycles to
    // coboundaries
    for n in (h.source.n_min + 1)..(h.source.n_max - 1) {
        let dm = h
            .psi_left
            .matrix(&h.source, &h.target, n)
            .sub(&h.psi_right.matrix(&h.source, &h.target, n));
        let cocycles = h.source.diff_matrix(n).kernel_basis();
        for z in cocycles {
            let img = dm.apply(&z);
            if img.iter().all(|v| v.is_zero()) {
                continue;
            }
            let prev = h.target.diff_matrix(n - 1);
            assert!(
                prev.solve(&img).is_some(),
                "induced cohomology maps differ at degree {n}"
            );
        }
    }
}

#[test]
fn pushout_union_glues_blockwise() {
    // two triangles sharing an edge: D1 = {A,B,F,G,sigma}, D2 = {A,B,G,H,tau}
    let full = shapes::triangular_pillow(Q, 2, 3, 5, 1, 2);
    let mut d1 = full.clone();
    d1.cells3.clear();
    d1.cells2.truncate(1); // sigma only
    d1.edges.truncate(2); // F, G
    d1.name = "left".into();
    let mut d2 = full.clone();
    d2.cells3.clear();
    d2.cells2 = vec![full.cells2[1].clone()]; // tau
    d2.cells2[0].dom_path = vec![0];
    d2.cells2[0].cod_path = vec![1];
    d2.edges = vec![full.edges[1].clone(), full.edges[2].clone()]; // G, H
    d2.name = "right".into();
    assert!(d1.validate().is_valid());
    assert!(d2.validate().is_valid());

    let glued = pushout_union(&d1, &d2, opts(2)).unwrap();
    assert!(glued.check_d_squared().is_ok());
    // directly assembled union agrees blockwise by construction; check the
    // summand count collapses the shared cells
    assert_eq!(glued.summands.len(), 2 + 3 + 2); // A, B, F, G, H, sigma, tau

    // absorbing union: D2 a subdiagram of D1 gives back D1's complex
    let same = pushout_union(&d1, &d1, opts(2)).unwrap();
    let direct = assemble(&d1, opts(2)).unwrap();
    for n in direct.n_min..direct.n_max {
        assert!(same.diff_matrix(n).sub(&direct.diff_matrix(n)).is_zero());
    }
}
