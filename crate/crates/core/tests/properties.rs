use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use metric_thickenings::homology::{betti, boundary_squares_to_zero};
use metric_thickenings::measure::{convex_combination, marginals, product_measure};
use metric_thickenings::metric_space::{coproduct, linf_product, wedge, Norm};
use metric_thickenings::simplicial_complex;
use metric_thickenings::thickening::{cech, vietoris_rips};
use metric_thickenings::wasserstein::{is_coupling, wasserstein, wasserstein_from_delta};
use metric_thickenings::{FiniteMeasure, MetricSpace, PointedMetricSpace, ScaleParameter, SimplicialComplex, WassersteinConfig};

fn planar(coords: &[(f64, f64)], prefix: &str) -> Arc<MetricSpace> {
    let labels = (0..coords.len()).map(|i| format!("{prefix}{i}")).collect();
    let pts: Vec<Vec<f64>> = coords.iter().map(|&(x, y)| vec![x, y]).collect();
    Arc::new(MetricSpace::from_points(labels, &pts, Norm::L2).unwrap())
}

fn cloud(min: usize, max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64), min..=max)
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, n).prop_map(|w| {
        let t: f64 = w.iter().sum();
        w.into_iter().map(|x| x / t).collect()
    })
}

/// Maximal faces by checking every subset.
fn brute_maximal(n: usize, is_face: impl Fn(&[usize]) -> bool) -> BTreeSet<Vec<String>> {
    let faces: Vec<u32> = (1u32..(1 << n))
        .filter(|&s| is_face(&(0..n).filter(|&i| s >> i & 1 == 1).collect::<Vec<_>>()))
        .collect();
    faces
        .iter()
        .filter(|&&s| !faces.iter().any(|&t| t != s && t & s == s))
        .map(|&s| {
            let mut v: Vec<String> = (0..n).filter(|&i| s >> i & 1 == 1).map(|i| format!("p{i}")).collect();
            v.sort();
            v
        })
        .collect()
}

/// `W_p` on the real line via quantile functions.
fn quantile_oracle(xs: &[(f64, f64)], ys: &[(f64, f64)], p: f64) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|u, v| u.0.total_cmp(&v.0));
    b.sort_by(|u, v| u.0.total_cmp(&v.0));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut total = 0.0;
    loop {
        let step = ra.min(rb);
        total += step * (a[i].0 - b[j].0).abs().powf(p);
        ra -= step;
        rb -= step;
        if ra <= 1e-15 {
            i += 1;
            if i == a.len() {
                break;
            }
            ra += a[i].1;
        }
        if rb <= 1e-15 {
            j += 1;
            if j == b.len() {
                break;
            }
            rb += b[j].1;
        }
    }
    total.powf(1.0 / p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructions_stay_metric(a in cloud(1, 5), b in cloud(1, 5), ba in 0usize..5, bb in 0usize..5) {
        let x = planar(&a, "x");
        let y = planar(&b, "y");
        prop_assert!(linf_product(&x, &y).validate().is_empty());
        prop_assert!(coproduct(&x, &y).validate().is_empty());
        let px = PointedMetricSpace::new(x.clone(), ba % a.len()).unwrap();
        let py = PointedMetricSpace::new(y.clone(), bb % b.len()).unwrap();
        let w = wedge(&px, &py);
        prop_assert!(w.space.validate().is_empty());
        prop_assert_eq!(w.space.len(), a.len() + b.len() - 1);
        for i in 0..a.len() {
            for j in 0..b.len() {
                if i == px.basepoint || j == py.basepoint {
                    continue;
                }
                let (wi, wj) = (w.space.index_of(&format!("x{i}")).unwrap(), w.space.index_of(&format!("y{j}")).unwrap());
                let expect = x.d(i, px.basepoint) + y.d(py.basepoint, j);
                prop_assert!((w.space.d(wi, wj) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vr_and_cech_match_subset_enumeration(a in cloud(1, 7), r in 0.0..12.0f64, open in any::<bool>()) {
        let x = planar(&a, "p");
        let n = a.len();
        let s = if open { ScaleParameter::open(r) } else { ScaleParameter::closed(r) };
        let admits = |d: f64| if open { d < r } else { d <= r };
        let vr = brute_maximal(n, |f| f.len() == 1 || f.iter().all(|&i| f.iter().all(|&j| admits(x.d(i, j)))));
        prop_assert_eq!(vietoris_rips(&x, s).complex().canonical_faces(), vr);
        let ch = brute_maximal(n, |f| f.len() == 1 || (0..n).any(|w| f.iter().all(|&i| admits(x.d(w, i)))));
        prop_assert_eq!(cech(&x, s).complex().canonical_faces(), ch);
    }

    #[test]
    fn complexes_grow_with_r(a in cloud(2, 6), r in 0.0..8.0f64, dr in 0.0..4.0f64) {
        let x = planar(&a, "p");
        let small = vietoris_rips(&x, ScaleParameter::closed(r));
        let big = vietoris_rips(&x, ScaleParameter::closed(r + dr));
        prop_assert!(small.complex().is_subcomplex_of(big.complex()));
        prop_assert!(vietoris_rips(&x, ScaleParameter::open(r)).complex().is_subcomplex_of(small.complex()));
        prop_assert!(small.complex().is_subcomplex_of(cech(&x, ScaleParameter::closed(r)).complex()));
    }

    #[test]
    fn betti_is_label_invariant_and_additive(a in cloud(2, 6), b in cloud(2, 5), r in 0.0..8.0f64) {
        let x = planar(&a, "p");
        let k = vietoris_rips(&x, ScaleParameter::closed(r));
        prop_assert_eq!(boundary_squares_to_zero(k.complex(), 3).unwrap(), None);
        // reverse the vertex order
        let n = a.len();
        let rev_labels: Vec<String> = (0..n).rev().map(|i| format!("q{i}")).collect();
        let faces = k.complex().maximal_faces().iter().map(|f| f.iter().map(|&v| n - 1 - v).collect()).collect();
        let relabelled = SimplicialComplex::from_faces(rev_labels, faces).unwrap();
        prop_assert_eq!(betti(&relabelled, 3), betti(k.complex(), 3));

        let l = vietoris_rips(&planar(&b, "s"), ScaleParameter::closed(r));
        let (sum, _) = simplicial_complex::coproduct(k.complex(), l.complex());
        prop_assert_eq!(betti(&sum, 3), betti(k.complex(), 3).add(&betti(l.complex(), 3)).unwrap());
    }

    #[test]
    fn product_measure_round_trip(a in cloud(1, 4), b in cloud(1, 4), wa in weights(4), wb in weights(4), t in 0.0..=1.0f64) {
        let x = planar(&a, "x");
        let y = planar(&b, "y");
        let norm = |w: &[f64], k: usize| { let s: f64 = w[..k].iter().sum(); w[..k].iter().map(|v| v / s).collect::<Vec<_>>() };
        let mu = FiniteMeasure::new(x.clone(), norm(&wa, a.len()).into_iter().enumerate().collect()).unwrap();
        let nu = FiniteMeasure::new(y.clone(), norm(&wb, b.len()).into_iter().enumerate().collect()).unwrap();
        let alpha = product_measure(&mu, &nu);
        let (m2, n2) = marginals(&alpha).unwrap();
        prop_assert!(m2.max_weight_diff(&mu) <= 1e-12 && n2.max_weight_diff(&nu) <= 1e-12);
        let uniform = FiniteMeasure::uniform(alpha.space().clone(), &[0]).unwrap();
        let mix = convex_combination(t, &alpha, &uniform).unwrap();
        prop_assert!((mix.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn wasserstein_on_a_line_matches_quantiles(
        xs in prop::collection::vec(-5.0..5.0f64, 1..=5),
        ws in weights(5),
        ys in prop::collection::vec(-5.0..5.0f64, 1..=5),
        vs in weights(5),
        p in prop_oneof![Just(1.0), Just(2.0), Just(3.0)],
    ) {
        let all: Vec<Vec<f64>> = xs.iter().chain(&ys).map(|&v| vec![v]).collect();
        let labels = (0..all.len()).map(|i| format!("t{i}")).collect();
        let line = Arc::new(MetricSpace::from_points(labels, &all, Norm::L1).unwrap());
        let norm = |w: &[f64], k: usize| { let s: f64 = w[..k].iter().sum(); w[..k].iter().map(|v| v / s).collect::<Vec<_>>() };
        let (wx, wy) = (norm(&ws, xs.len()), norm(&vs, ys.len()));
        // Each coordinate gets its own point, so equal coordinates stay distinct atoms.
        let mu = FiniteMeasure::new(line.clone(), wx.iter().copied().enumerate().collect()).unwrap();
        let nu = FiniteMeasure::new(line.clone(), wy.iter().enumerate().map(|(j, &w)| (xs.len() + j, w)).collect()).unwrap();
        let cfg = WassersteinConfig::with_p(p).unwrap();
        let t = wasserstein(&mu, &nu, &cfg).unwrap();
        let oracle = quantile_oracle(
            &xs.iter().copied().zip(wx).collect::<Vec<_>>(),
            &ys.iter().copied().zip(wy).collect::<Vec<_>>(),
            p,
        );
        prop_assert!((t.distance - oracle).abs() <= 1e-9 * (1.0 + oracle), "{} vs {}", t.distance, oracle);
        prop_assert!(is_coupling(t.plan.as_ref().unwrap(), 1e-9).is_coupling());
        prop_assert!(t.is_certified_optimal(&cfg));
    }

    #[test]
    fn delta_distances_have_closed_form(a in cloud(2, 6), w in weights(6), x in 0usize..6, p in 1.0..3.0f64) {
        let sp = planar(&a, "p");
        let n = a.len();
        let s: f64 = w[..n].iter().sum();
        let nu = FiniteMeasure::new(sp.clone(), (0..n).map(|i| (i, w[i] / s)).collect()).unwrap();
        let x = x % n;
        let cfg = WassersteinConfig::with_p(p).unwrap();
        let expect = (0..n).map(|j| w[j] / s * sp.d(x, j).powf(p)).sum::<f64>().powf(1.0 / p);
        let delta = FiniteMeasure::delta(sp.clone(), x).unwrap();
        prop_assert!((wasserstein(&delta, &nu, &cfg).unwrap().distance - expect).abs() <= 1e-9 * (1.0 + expect));
        prop_assert!((wasserstein_from_delta(x, &nu, &cfg) - expect).abs() <= 1e-12 * (1.0 + expect));
    }
}
