//! Checks against independent oracles: quadrature, dense linear algebra,
//! brute-force enumeration.

use bddcso_core::bddc::{build_bddc, full_continuity};
use bddcso_core::experiment::{parse_config_file, run, ExperimentConfig, Pipeline};
use bddcso_core::linalg::{
    dense_sym_eig, saddle_factor, saddle_solve, spd_factor, spd_solve, tridiag_eig, DenseMatrix, SparseRow, SymBuilder,
};
use bddcso_core::partition::{classify_objects, MembershipSets, ObjectKind, Partition, PartitionPair};
use bddcso_core::{
    assemble, build_mesh, count_coarse_dofs, element_stiffness, partition_uniform, pcg, refine_by_coefficient,
    refine_uniform, CoefficientField, PcgOptions, Recipe,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(text: &str) -> ExperimentConfig {
    parse_config_file(text).unwrap().remove(0)
}

/// ∫ ∇φa·∇φb over a box of side lengths `h`, by 2-point Gauss per axis.
fn quadrature_stiffness(dim: usize, h: &[f64]) -> Vec<f64> {
    let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let nloc = 1 << dim;
    let mut k = vec![0.0; nloc * nloc];
    let vol: f64 = h.iter().product();
    for q in 0..nloc {
        let xi: Vec<f64> = (0..dim).map(|d| g[(q >> d) & 1]).collect();
        let grad = |a: usize| -> Vec<f64> {
            (0..dim)
                .map(|d| {
                    let mut v = 1.0;
                    for e in 0..dim {
                        let bit = (a >> e) & 1;
                        if e == d {
                            v *= if bit == 1 { 1.0 } else { -1.0 } / h[e];
                        } else {
                            v *= if bit == 1 { xi[e] } else { 1.0 - xi[e] };
                        }
                    }
                    v
                })
                .collect()
        };
        for a in 0..nloc {
            let ga = grad(a);
            for b in 0..nloc {
                let gb = grad(b);
                let w = vol / nloc as f64;
                k[a * nloc + b] += w * ga.iter().zip(&gb).map(|(x, y)| x * y).sum::<f64>();
            }
        }
    }
    k
}

#[test]
fn element_stiffness_matches_quadrature() {
    for (dim, h) in [(2, vec![1.0, 1.0]), (2, vec![0.3, 0.7]), (3, vec![0.5, 0.25, 2.0])] {
        let alpha = 3.5;
        let k = element_stiffness(dim, &h, alpha);
        let q = quadrature_stiffness(dim, &h);
        for (a, b) in k.iter().zip(&q) {
            assert!((a - alpha * b).abs() < 1e-12, "{dim}D {h:?}: {a} vs {}", alpha * b);
        }
    }
    let k = element_stiffness(2, &[1.0, 1.0], 1.0);
    assert!((k[0] - 2.0 / 3.0).abs() < 1e-15);
    assert!((k[1] + 1.0 / 6.0).abs() < 1e-15);
    assert!((k[3] + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn poisson_solve_matches_dense_lu() {
    let mesh = build_mesh(2, &[8, 8]).unwrap();
    let coeff = CoefficientField::constant(64, 1.0).unwrap();
    let sys = assemble(&mesh, &coeff, 1.0).unwrap();
    let n = sys.dof_count();
    let dense = DMatrix::from_fn(n, n, |i, j| sys.matrix.get(i, j));
    let expected = dense.lu().solve(&DVector::from_column_slice(&sys.rhs)).unwrap();
    let got = spd_solve(&spd_factor(&sys.matrix).unwrap(), &sys.rhs);
    let err = (DVector::from_vec(got) - &expected).norm() / expected.norm();
    assert!(err <= 1e-10, "{err}");
}

fn neumann_patch(cells: usize) -> bddcso_core::linalg::SparseSym {
    let nodes = cells + 1;
    let k = element_stiffness(2, &[1.0, 1.0], 1.0);
    let mut b = SymBuilder::new(nodes * nodes);
    for j in 0..cells {
        for i in 0..cells {
            let local: Vec<usize> = (0..4).map(|a| (i + (a & 1)) + (j + (a >> 1)) * nodes).collect();
            for a in 0..4 {
                for c in a..4 {
                    b.add(local[a], local[c], k[a * 4 + c]);
                }
            }
        }
    }
    b.build()
}

#[test]
fn average_constrained_neumann_matches_pseudo_inverse() {
    let a = neumann_patch(4);
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    f.iter_mut().for_each(|v| *v -= mean);

    let avg = SparseRow::new((0..n).collect(), vec![1.0 / n as f64; n]);
    let fact = saddle_factor(&a, &[avg]).unwrap();
    let (u, _) = saddle_solve(&fact, &f, &[0.0]);

    let dense = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    let pinv = dense.pseudo_inverse(1e-10).unwrap();
    let expected = pinv * DVector::from_vec(f);
    let err = (DVector::from_vec(u) - &expected).norm() / expected.norm();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn dense_and_tridiagonal_eigensolvers_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [3, 7, 12] {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let mut ours = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ours.set(i, j, m[(i, j)]);
            }
        }
        let got = dense_sym_eig(&ours).unwrap();
        let mut want: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9 * w.abs().max(1.0));
        }

        let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        let off: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => diag[i],
            1 => off[i.min(j)],
            _ => 0.0,
        });
        let ev = t.symmetric_eigenvalues();
        let (lo, hi) = tridiag_eig(&diag, &off).unwrap();
        assert!((lo - ev.min()).abs() < 1e-10 && (hi - ev.max()).abs() < 1e-10);
    }
}

fn kinds(objs: &[bddcso_core::InterfaceObject]) -> (usize, usize, usize) {
    let c = |k| objs.iter().filter(|o| o.kind == k).count();
    (c(ObjectKind::Vertex), c(ObjectKind::Edge), c(ObjectKind::Face))
}

#[test]
fn offset_cross_refinement_has_eight_subedges_and_five_vertices() {
    let mesh = build_mesh(2, &[20, 20]).unwrap();
    let (mut theta, mut hat) = (Vec::new(), Vec::new());
    for c in 0..mesh.cell_count() {
        let [i, j, _] = mesh.cell_coords(c);
        let (sub, sh) = match (i < 10, j < 10) {
            (true, true) => (0, usize::from(i >= 5 && j >= 5)),
            (true, false) => (2, 2 + usize::from(i >= 5 && j < 16)),
            (false, true) => (1, 4 + usize::from(i >= 15)),
            (false, false) => (3, 6 + usize::from(i >= 15)),
        };
        theta.push(sub);
        hat.push(sh);
    }
    let pair = PartitionPair::new(&mesh, Partition::new(theta).unwrap(), Partition::new(hat).unwrap()).unwrap();
    let objs = classify_objects(&mesh, &pair, &MembershipSets::new(&mesh, &pair));
    assert_eq!(kinds(&objs), (5, 8, 0));
}

#[test]
fn standard_cube_objects() {
    let mesh = build_mesh(3, &[8, 8, 8]).unwrap();
    let pair = PartitionPair::standard(&mesh, partition_uniform(&mesh, &[2, 2, 2]).unwrap()).unwrap();
    let objs = classify_objects(&mesh, &pair, &MembershipSets::new(&mesh, &pair));
    assert_eq!(kinds(&objs), (1, 6, 12));
}

/// Counts selected objects by classifying an actual mesh.
fn brute_force_count(subs: &[usize], s: usize, cells_per_sub: usize, recipe: Recipe) -> u64 {
    let cells: Vec<usize> = subs.iter().map(|n| n * cells_per_sub).collect();
    let mesh = build_mesh(subs.len(), &cells).unwrap();
    let theta = partition_uniform(&mesh, subs).unwrap();
    let pair = refine_uniform(&mesh, &theta, s).unwrap();
    let objs = classify_objects(&mesh, &pair, &MembershipSets::new(&mesh, &pair));
    objs.iter().filter(|o| recipe.selects(o.kind)).count() as u64
}

#[test]
fn combinatorial_count_matches_enumeration() {
    let v: Recipe = "v".parse().unwrap();
    assert_eq!(brute_force_count(&[10, 10, 10], 1, 3, v), 729);
    for (subs, s) in [(vec![3, 2, 2], 1), (vec![2, 2, 3], 2), (vec![3, 3, 2], 2), (vec![2, 2, 2], 3)] {
        for r in ["v", "e", "f", "ve", "vf", "ef", "vef"] {
            let recipe: Recipe = r.parse().unwrap();
            let brute = brute_force_count(&subs, s, 3 * s, recipe);
            assert_eq!(count_coarse_dofs(&subs, s, recipe).unwrap(), brute, "{subs:?} s={s} {r}");
        }
    }
    for (subs, s) in [(vec![2, 2], 1), (vec![3, 4], 2), (vec![4, 3], 3)] {
        for r in ["v", "e", "ve"] {
            let recipe: Recipe = r.parse().unwrap();
            let brute = brute_force_count(&subs, s, 3 * s, recipe);
            assert_eq!(count_coarse_dofs(&subs, s, recipe).unwrap(), brute, "{subs:?} s={s} {r}");
        }
    }
}

#[test]
fn coarse_size_grows_with_recipe() {
    let counts: Vec<u64> = ["v", "ve", "vef"]
        .iter()
        .map(|r| count_coarse_dofs(&[4, 4, 4], 2, r.parse().unwrap()).unwrap())
        .collect();
    assert!(counts[0] < counts[1] && counts[1] < counts[2], "{counts:?}");
}

#[test]
fn two_by_two_vertex_edge_coarse_space() {
    let p = Pipeline::build(&config("cells=[8,8]\nsubdomains=[2,2]\npreconditioner=\"bddc\"\nrecipe=\"ve\"\n")).unwrap();
    assert_eq!(p.constraints.coarse_count(), 5);
}

#[test]
fn full_continuity_inverts_the_operator() {
    let p = Pipeline::build(&config("cells=[12,12]\nsubdomains=[3,2]\npreconditioner=\"bddc\"\nrecipe=\"v\"\n")).unwrap();
    let full = full_continuity(&p.objects);
    let b = build_bddc(&p.mesh, &p.coeff, &p.system, &p.pair, &full, &p.weights).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let r: Vec<f64> = (0..p.system.dof_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let back = p.system.matrix.matvec(&b.apply(&r));
    let err = back.iter().zip(&r).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(err < 1e-8, "{err}");
    let (_, rep) = pcg(|v| p.system.matrix.matvec(v), |v| b.apply(v), &r, PcgOptions::default()).unwrap();
    assert_eq!(rep.iterations, 1);
}

#[test]
fn harmonic_extension_of_zero_is_zero() {
    let p = Pipeline::build(&config("cells=[8,8,8]\nsubdomains=[2,2,2]\npreconditioner=\"bddc\"\nrecipe=\"vef\"\n")).unwrap();
    let n = p.system.dof_count();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut u = vec![0.0; n];
    for (i, v) in u.iter_mut().enumerate() {
        if !p.weights.is_interface(i) {
            *v = rng.random_range(-1.0..1.0);
        }
    }
    assert!(p.bddc.harmonic_extension(&u).iter().all(|&v| v.abs() < 1e-14));
}

#[test]
fn coefficient_scaling_leaves_iterations_unchanged() {
    let base = config("cells=[12,12]\nsubdomains=[3,3]\nsplit={mode=\"uniform\",s=2}\npreconditioner=\"bddc-so\"\nrecipe=\"ve\"\n");
    let mut scaled = base.clone();
    scaled.coefficient = bddcso_core::experiment::CoefficientSpec::Constant { value: 1e4 };
    let (a, b) = (run(&base).unwrap(), run(&scaled).unwrap());
    assert_eq!(a.iters, b.iters);
    assert!((a.kappa.unwrap() - b.kappa.unwrap()).abs() < 1e-8 * a.kappa.unwrap());
}

#[test]
fn straight_channel_splits_subdomain_in_three() {
    let mesh = build_mesh(2, &[6, 6]).unwrap();
    let theta = partition_uniform(&mesh, &[1, 1]).unwrap();
    for (row, parts) in [(2, 3), (0, 2)] {
        let alpha = (0..36)
            .map(|c| if mesh.cell_coords(c)[1] == row { 100.0 } else { 1.0 })
            .collect();
        let pair = refine_by_coefficient(&mesh, &theta, &CoefficientField::new(alpha).unwrap()).unwrap();
        assert_eq!(pair.subsubdomain_count(), parts);
    }
}

#[test]
fn reruns_are_deterministic_and_match_the_counter() {
    let c = config("cells=[16,16,16]\nsubdomains=[2,2,2]\nsplit={mode=\"uniform\",s=2}\npreconditioner=\"bddc-so\"\nrecipe=\"vef\"\n");
    let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
    assert_eq!((a.iters, a.coarse_size), (b.iters, b.coarse_size));
    assert_eq!(a.kappa, b.kappa);
    assert_eq!(a.coarse_size, count_coarse_dofs(&[2, 2, 2], 2, Recipe::VEF).unwrap());
}

#[test]
fn forty_cubed_unit_coefficient_run_converges() {
    let row = run(&config("cells=[40,40,40]\nsubdomains=[4,4,4]\npreconditioner=\"bddc\"\nrecipe=\"vef\"\n")).unwrap();
    assert!(row.converged);
    assert_eq!(row.coarse_size, count_coarse_dofs(&[4, 4, 4], 1, Recipe::VEF).unwrap());
    assert!(row.iters.unwrap() < 20, "{row:?}");
}
