//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p clustervol --test acceptance -- --nocapture` to
//! see every line.

mod common;

use clustervol::assign::{kmeans, lsa_fixed_shape, lsa_objective};
use clustervol::clustering::clustering_vector;
use clustervol::cone::{build_normal_cone, sphere_surface_area, Variant};
use clustervol::demo::twelve_points;
use clustervol::oracle::{empirical_lsa_frequency, enumerate_feasible, is_vertex, oracle_adjacent};
use clustervol::powerdiagram::{verify_induces, weights_for_sites};
use clustervol::stability::{
    most_stable_site, norm_equivalence_constant, rescale_for_norm, stability_of, PNorm,
};
use clustervol::{Bounds, Clustering, Cone, NormalConeH, PointSet, SiteVector};
use rand::Rng;
use std::f64::consts::PI;
use std::sync::LazyLock;

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n:2} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

struct DemoCones {
    ps: PointSet,
    c: Clustering,
    single: NormalConeH,
    single_filtered: NormalConeH,
    bounded_all: NormalConeH,
}

static DEMO: LazyLock<DemoCones> = LazyLock::new(|| {
    let (ps, c) = twelve_points();
    let single =
        build_normal_cone(&ps, &c, Variant::Single, &Bounds::single_shape(c.shape())).unwrap();
    let single_filtered = single.filter_facets().unwrap();
    let bounded_all =
        build_normal_cone(&ps, &c, Variant::Bounded, &Bounds::all_shape(3, 12)).unwrap();
    DemoCones { ps, c, single, single_filtered, bounded_all }
});

#[test]
fn c01_sphere_surface_area_constant() {
    let got = sphere_surface_area(6);
    let err = (got - PI.powi(3)).abs();
    report(
        1,
        "sphere-area constant",
        err <= 1e-9,
        &format!("area(S^6) = {got:.8} vs pi^3 = {:.8}, |err| = {err:.2e}", PI.powi(3)),
    );
}

#[test]
fn c02_analytic_cone_volumes() {
    let samples = 100_000;
    let half = Cone::from_normals(6, vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]]).unwrap();
    let est_half = half.estimate_volume(samples, 201);
    let mut pass = (est_half.mu_hat - 0.5).abs() <= 3.0 * est_half.std_err;
    let mut detail = format!("half-space {:.4}+-{:.4}", est_half.mu_hat, est_half.std_err);
    for (m, seed) in [(4usize, 202u64), (6, 203)] {
        let normals = (0..m)
            .map(|i| {
                let mut v = vec![0.0; m];
                v[i] = -1.0;
                v
            })
            .collect();
        let orthant = Cone::from_normals(m, normals).unwrap();
        let est = orthant.estimate_volume(samples, seed);
        let want = 0.5_f64.powi(m as i32);
        pass &= (est.mu_hat - want).abs() <= 3.0 * est.std_err;
        detail += &format!(
            ", orthant m={m} {:.5}+-{:.5} (want {want:.5})",
            est.mu_hat, est.std_err
        );
    }
    report(2, "analytic cone volumes", pass, &detail);
}

#[test]
fn c03_demo_fixture_end_to_end() {
    let demo = &*DEMO;
    let single_cert = is_vertex(
        &demo.ps,
        &demo.c,
        Variant::Single,
        &Bounds::single_shape(demo.c.shape()),
    )
    .unwrap();
    let all_cert =
        is_vertex(&demo.ps, &demo.c, Variant::Bounded, &Bounds::all_shape(3, 12)).unwrap();
    let st = most_stable_site(&demo.single_filtered.cone, PNorm::Two).unwrap();
    let a = SiteVector::new(2, 3, st.z.clone()).unwrap();
    let out = weights_for_sites(
        &demo.ps,
        &demo.c,
        &a,
        Variant::Single,
        &Bounds::single_shape(demo.c.shape()),
    )
    .unwrap();
    let induction = verify_induces(&out.diagram, &demo.ps, &demo.c, true);
    let pass = single_cert.is_vertex && all_cert.is_vertex && out.margin > 0.0 && induction.ok;
    report(
        3,
        "demo fixture end-to-end",
        pass,
        &format!(
            "vertex(P=)={}, vertex(P)={}, margin={:.4}, strict induction={}",
            single_cert.is_vertex, all_cert.is_vertex, out.margin, induction.ok
        ),
    );
}

#[test]
fn c04_volume_matches_lsa_frequency_and_c10_monotonicity() {
    let demo = &*DEMO;
    let samples = 20_000;
    let vol_eq = demo.single.cone.estimate_volume(samples, 42_001);
    let freq = empirical_lsa_frequency(&demo.ps, &demo.c, samples, 42_002).unwrap();
    let combined = (vol_eq.std_err.powi(2) + freq.std_err.powi(2)).sqrt();
    let diff = (vol_eq.mu_hat - freq.freq).abs();
    report(
        4,
        "cone volume equals LSA frequency",
        diff <= 3.0 * combined,
        &format!(
            "mu_eq = {:.4}+-{:.4}, freq = {:.4}+-{:.4}, |diff| = {diff:.4} <= {:.4}",
            vol_eq.mu_hat,
            vol_eq.std_err,
            freq.freq,
            freq.std_err,
            3.0 * combined
        ),
    );

    // criterion 10 bundled here: bounded volume below single-shape volume
    let vol_pm = demo.bounded_all.cone.estimate_volume(samples, 42_003);
    let mut pass10 =
        vol_pm.mu_hat <= vol_eq.mu_hat + 3.0 * (vol_pm.std_err.powi(2) + vol_eq.std_err.powi(2)).sqrt();
    let mut detail10 = format!("demo: mu_pm = {:.4} <= mu_eq = {:.4}", vol_pm.mu_hat, vol_eq.mu_hat);
    let mut rng = common::rng(1000);
    for _ in 0..2 {
        let n = rng.random_range(6..=8);
        let k = rng.random_range(2..=3);
        let ps = common::random_points(&mut rng, n, 2);
        let bounds = common::random_bounds(&mut rng, k, n);
        let c = common::random_vertex_clustering(&mut rng, &ps, &bounds);
        let pm = build_normal_cone(&ps, &c, Variant::Bounded, &bounds).unwrap();
        let eq = build_normal_cone(&ps, &c, Variant::Single, &bounds).unwrap();
        let vp = pm.cone.estimate_volume(samples, 42_004);
        let ve = eq.cone.estimate_volume(samples, 42_005);
        let sigma = (vp.std_err.powi(2) + ve.std_err.powi(2)).sqrt();
        pass10 &= vp.mu_hat <= ve.mu_hat + 3.0 * sigma;
        detail10 += &format!(", random n={n} k={k}: {:.4} <= {:.4}", vp.mu_hat, ve.mu_hat);
    }
    report(10, "bounded below single-shape volume", pass10, &detail10);
}

#[test]
fn c05_facets_equal_oracle_adjacency() {
    let mut pass = true;
    let mut detail = String::new();
    for idx in 0..10u64 {
        let mut rng = common::rng(5000 + idx);
        let k = if idx % 2 == 0 { 2 } else { 3 };
        let n = match k {
            2 => 6 + (idx as usize % 3),      // 6..8
            _ => 5 + (idx as usize % 3),      // 5..7
        };
        let ps = common::random_points(&mut rng, n, 2);
        let (variant, bounds) = if idx % 4 < 2 {
            let shape = common::random_shape(&mut rng, k, n, 1);
            (Variant::Single, Bounds::single_shape(&shape))
        } else {
            (Variant::Bounded, common::random_bounds(&mut rng, k, n))
        };
        let c = common::random_vertex_clustering(&mut rng, &ps, &bounds);

        let nc = build_normal_cone(&ps, &c, variant, &bounds).unwrap();
        let filtered = nc.filter_facets().unwrap();
        let facet_dirs: Vec<Vec<f64>> = filtered
            .cone
            .facet_normals()
            .iter()
            .map(|v| {
                let nv = norm(v);
                v.iter().map(|x| x / nv).collect()
            })
            .collect();

        let w = clustering_vector(&ps, &c).unwrap();
        let all = enumerate_feasible(&ps, &bounds).unwrap();
        let mut adjacency_dirs: Vec<Vec<f64>> = Vec::new();
        let mut seen: Vec<Vec<f64>> = Vec::new();
        for other in &all {
            let wo = clustering_vector(&ps, other).unwrap();
            let diff: Vec<f64> = wo
                .as_slice()
                .iter()
                .zip(w.as_slice())
                .map(|(a, b)| a - b)
                .collect();
            let nd = norm(&diff);
            if nd <= 1e-9 {
                continue;
            }
            let dir: Vec<f64> = diff.iter().map(|x| x / nd).collect();
            if seen
                .iter()
                .any(|s| s.iter().zip(&dir).all(|(a, b)| (a - b).abs() <= 1e-7))
            {
                continue;
            }
            seen.push(dir.clone());
            if oracle_adjacent(&ps, &c, other, variant, &bounds).unwrap() {
                adjacency_dirs.push(dir);
            }
        }

        let matched = facet_dirs.len() == adjacency_dirs.len()
            && facet_dirs.iter().all(|f| {
                adjacency_dirs
                    .iter()
                    .any(|o| f.iter().zip(o).all(|(a, b)| (a - b).abs() <= 1e-7))
            });
        pass &= matched;
        detail += &format!(
            "{}[{}:{} f={} a={}] ",
            if matched { "ok" } else { "MISMATCH" },
            variant.label(),
            n,
            facet_dirs.len(),
            adjacency_dirs.len()
        );
    }
    report(5, "facets equal oracle adjacency (10 instances)", pass, detail.trim());
}

#[test]
fn c06_stability_qp_analytic() {
    let cone = Cone::from_normals(2, vec![vec![2.0, -1.0], vec![-2.0, -1.0]]).unwrap();
    let st = most_stable_site(&cone.filter_facets().unwrap(), PNorm::Two).unwrap();
    let z_err = (st.z[0].abs()).max((st.z[1] - 5.0_f64.sqrt()).abs());
    let tau_err = (st.tau - 1.0 / 5.0_f64.sqrt()).abs();
    let pass = z_err <= 1e-6 && tau_err <= 1e-6 && st.kkt_residual <= 1e-8;
    report(
        6,
        "stability QP analytic case",
        pass,
        &format!(
            "z = ({:.7}, {:.7}), tau = {:.7}, kkt = {:.2e}",
            st.z[0], st.z[1], st.tau, st.kkt_residual
        ),
    );
}

#[test]
fn c07_boundary_counterexample_guard() {
    let s3 = 3.0_f64.sqrt();
    // facet normals of the cone spanned by (0, +-sqrt(3), 3), (sqrt(3), 0, 3)
    let cone = Cone::from_normals(
        3,
        vec![
            vec![-1.0, 0.0, 0.0],
            vec![s3, s3, -1.0],
            vec![s3, -s3, -1.0],
        ],
    )
    .unwrap()
    .filter_facets()
    .unwrap();
    let st = most_stable_site(&cone, PNorm::Two).unwrap();
    let boundary = [0.0, 0.0, 2.0];
    let tau_boundary = stability_of(&cone, &boundary, PNorm::Two).unwrap();
    let pass = cone.contains(&st.z, true) && st.tau > 0.0 && tau_boundary <= 1e-9;
    report(
        7,
        "boundary-center counterexample guard",
        pass,
        &format!(
            "optimal center interior: {}, tau = {:.6}; stability of (0,0,2) = {tau_boundary:.2e}",
            cone.contains(&st.z, true),
            st.tau
        ),
    );
}

#[test]
fn c08_infinity_ball_containment_after_rescale() {
    let demo = &*DEMO;
    let st = most_stable_site(&demo.single_filtered.cone, PNorm::Two).unwrap();
    let c_const = norm_equivalence_constant(6, PNorm::Two, PNorm::Inf);
    let z_prime = rescale_for_norm(&st.z, PNorm::Two, PNorm::Inf);
    let facets = demo.single_filtered.cone.facet_normals();
    let mut worst = f64::NEG_INFINITY;
    for corner_bits in 0..(1u32 << 6) {
        let corner: Vec<f64> = (0..6)
            .map(|b| z_prime[b] + if corner_bits >> b & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        for v in &facets {
            let slack = dot(v, &corner) / (1.0 + norm(v) * norm(&corner));
            worst = worst.max(slack);
        }
    }
    report(
        8,
        "infinity-ball containment after rescale",
        worst <= 1e-9,
        &format!("c = {c_const:.4}, worst scaled corner slack = {worst:.2e}"),
    );
}

#[test]
fn c09_scaling_invariance_of_fixed_shape_lsa() {
    let mut rng = common::rng(900);
    let mut pass = true;
    let mut checked_argmin = 0;
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(5..=8);
        let k = rng.random_range(2..=3);
        let ps = common::random_points(&mut rng, n, 2);
        let shape = common::random_shape(&mut rng, k, n, 0);
        let a = common::random_site_vector(&mut rng, 2, k);
        let base = lsa_fixed_shape(&ps, &a, &shape).unwrap();
        let base_obj = lsa_objective(&ps, &base, &a);
        let strict = build_normal_cone(&ps, &base, Variant::Single, &Bounds::single_shape(&shape))
            .unwrap()
            .cone
            .contains(a.as_slice(), true);
        for lambda in [0.1, 7.3] {
            let scaled = lsa_fixed_shape(&ps, &a.scaled(lambda), &shape).unwrap();
            let delta = (lsa_objective(&ps, &scaled, &a) - base_obj).abs();
            worst = worst.max(delta);
            pass &= delta <= 1e-9 * (1.0 + base_obj.abs());
            if strict {
                checked_argmin += 1;
                pass &= scaled == base;
            }
        }
    }
    report(
        9,
        "scaling invariance of fixed-shape LSA",
        pass,
        &format!("100 triples, worst objective delta {worst:.2e}, {checked_argmin} strict argmin checks"),
    );
}

#[test]
fn c11_frequent_kmeans_output_has_larger_volume() {
    let mut rng = common::rng(777);
    let centers = vec![vec![-4.0, -1.0], vec![4.5, -0.5], vec![0.5, 5.0]];
    let ps = common::blob_points(&mut rng, &centers, 9, 0.9);

    // 20 seeded uniform-random restarts, outputs grouped up to relabeling
    let mut groups: Vec<(Clustering, Clustering, usize)> = Vec::new(); // (canonical, representative, count)
    for _ in 0..20 {
        let mut seeds: Vec<usize> = Vec::new();
        while seeds.len() < 3 {
            let j = rng.random_range(0..ps.len());
            if !seeds.contains(&j) {
                seeds.push(j);
            }
        }
        let init = SiteVector::from_sites(
            &seeds.iter().map(|&j| ps.point(j).to_vec()).collect::<Vec<_>>(),
        )
        .unwrap();
        let out = kmeans(&ps, 3, &init, 500).unwrap();
        let canon = out.clustering.canonical_labels();
        match groups.iter_mut().find(|(c, _, _)| *c == canon) {
            Some((_, _, count)) => *count += 1,
            None => groups.push((canon, out.clustering, 1)),
        }
    }
    groups.sort_by(|a, b| b.2.cmp(&a.2));
    let distinct = groups.len();
    assert!(distinct >= 2, "need at least one rare output, got {distinct} group(s)");

    let volumes: Vec<f64> = groups
        .iter()
        .enumerate()
        .map(|(g, (_, rep, _))| {
            let nc = build_normal_cone(
                &ps,
                rep,
                Variant::Single,
                &Bounds::single_shape(rep.shape()),
            )
            .unwrap();
            nc.cone.estimate_volume(20_000, 7_700 + g as u64).mu_hat
        })
        .collect();
    let top = volumes[0];
    let pass = groups[0].2 > groups[1].2 && volumes[1..].iter().all(|&v| top > v);
    let detail = groups
        .iter()
        .zip(&volumes)
        .map(|((_, _, count), v)| format!("{count}x mu_eq={v:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        11,
        "frequent k-means output has the largest volume",
        pass,
        &format!("{distinct} distinct outputs: {detail}"),
    );
}
