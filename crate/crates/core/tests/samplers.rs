use abc_shadow::mcmc::abc::{abc_draws, Distance};
use abc_shadow::mcmc::simulate_statistics;
use abc_shadow::posterior::quantile;
use abc_shadow::prelude::*;
use rand_distr::{Distribution, Gamma, Normal};

const T_OBS: [f64; 2] = [1765.45, 12145.83];
// Table 1 ABC means.
const MEANS: [f64; 2] = [1.76, 9.06];

fn gauss() -> ModelSpec {
    ModelSpec::Gaussian { m: 1000 }
}

fn t_obs() -> SufficientStatistics {
    SufficientStatistics::new(T_OBS.to_vec())
}

fn abc_prior() -> BoxPrior {
    BoxPrior::new(vec![0.5, 6.0], vec![3.5, 14.0]).unwrap()
}

fn column_means(v: &[ParameterVector]) -> [f64; 2] {
    let n = v.len() as f64;
    [v.iter().map(|p| p.values()[0]).sum::<f64>() / n, v.iter().map(|p| p.values()[1]).sum::<f64>() / n]
}

fn pilot_distance() -> Distance {
    Distance::from_pilot(&gauss(), &abc_prior(), 1000, &PpSamplerConfig::default(), &RngState::new(50, 1)).unwrap()
}

#[test]
fn rejection_at_fifth_percentile_tolerance() {
    let d = pilot_distance();
    let draws =
        abc_draws(&gauss(), &t_obs(), &abc_prior(), 10_000, &d, &PpSamplerConfig::default(), &RngState::new(50, 0))
            .unwrap();
    let mut dist: Vec<f64> = draws.iter().map(|x| x.distance).collect();
    dist.sort_by(f64::total_cmp);
    let eps = quantile(&dist, 0.05);
    let kept = abc_rejection(
        &gauss(),
        &t_obs(),
        &abc_prior(),
        eps,
        10_000,
        &d,
        &PpSamplerConfig::default(),
        &RngState::new(50, 0),
    )
    .unwrap();
    assert!((499..=501).contains(&kept.len()), "{}", kept.len());
    let m = column_means(&kept);
    for i in 0..2 {
        assert!((m[i] - MEANS[i]).abs() < 0.3, "{m:?}");
    }
}

#[test]
fn knn_keeps_k_nearest() {
    let d = pilot_distance();
    let kept =
        abc_knn(&gauss(), &t_obs(), &abc_prior(), 500, 10_000, &d, &PpSamplerConfig::default(), &RngState::new(51, 0))
            .unwrap();
    assert_eq!(kept.len(), 500);
    let m = column_means(&kept);
    for i in 0..2 {
        assert!((m[i] - MEANS[i]).abs() < 0.3, "{m:?}");
    }
}

#[test]
fn auxiliary_variable_mh_matches_table() {
    let config = AuxMhConfig {
        widths: vec![0.05, 0.25],
        iterations: 100_000,
        thinning: 100,
        initial: ParameterVector::new(vec![2.0, 9.0]),
        prior: BoxPrior::new(vec![-100.0, 0.0], vec![100.0, 200.0]).unwrap(),
        reference: Some(ParameterVector::new(vec![1.76545, 9.0288])),
        aux: PpSamplerConfig::default(),
    };
    let trace = aux_var_mh(&gauss(), &t_obs(), &config, &mut RngState::new(52, 0)).unwrap();
    let s = summarize(&trace, &[0.05, 0.25, 0.5, 0.75, 0.95]).unwrap();
    let rows = [(0, [1.60, 1.70, 1.76, 1.82, 1.91], 0.1), (1, [8.35, 8.78, 9.03, 9.33, 9.83], 0.3)];
    for (i, want, tol) in rows {
        let got = &s.params[i].quantiles;
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{}: {got:?} vs {want:?}", s.params[i].name);
        }
    }
}

/// Marginal quantiles of the exact posterior by quadrature on a fine grid.
fn quadrature_quantiles(levels: &[f64]) -> [Vec<f64>; 2] {
    let m = 1000.0;
    let (n1, n2) = (600, 600);
    let (lo1, hi1, lo2, hi2) = (1.3, 2.2, 7.0, 12.0);
    let (h1, h2) = ((hi1 - lo1) / n1 as f64, (hi2 - lo2) / n2 as f64);
    let mut logp = vec![0.0; n1 * n2];
    for i in 0..n1 {
        let a = lo1 + (i as f64 + 0.5) * h1;
        for j in 0..n2 {
            let b = lo2 + (j as f64 + 0.5) * h2;
            logp[i * n2 + j] = -0.5 * m * b.ln() - (T_OBS[1] - 2.0 * a * T_OBS[0] + m * a * a) / (2.0 * b);
        }
    }
    let top = logp.iter().cloned().fold(f64::MIN, f64::max);
    let p: Vec<f64> = logp.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = p.iter().sum();
    let m1: Vec<f64> = (0..n1).map(|i| p[i * n2..(i + 1) * n2].iter().sum::<f64>() / z).collect();
    let m2: Vec<f64> = (0..n2).map(|j| (0..n1).map(|i| p[i * n2 + j]).sum::<f64>() / z).collect();
    let inv = |mass: &[f64], lo: f64, h: f64| -> Vec<f64> {
        levels
            .iter()
            .map(|q| {
                let mut acc = 0.0;
                for (k, w) in mass.iter().enumerate() {
                    if acc + w >= *q {
                        return lo + (k as f64 + (q - acc) / w) * h;
                    }
                    acc += w;
                }
                lo + mass.len() as f64 * h
            })
            .collect()
    };
    [inv(&m1, lo1, h1), inv(&m2, lo2, h2)]
}

#[test]
fn direct_mh_agrees_with_quadrature_posterior() {
    let levels = [0.05, 0.25, 0.5, 0.75, 0.95];
    let exact = quadrature_quantiles(&levels);
    let config = DirectMhConfig {
        widths: vec![0.5, 0.5],
        iterations: 2_000_000,
        thinning: 200,
        initial: ParameterVector::new(vec![2.0, 9.0]),
        prior: BoxPrior::new(vec![-100.0, 0.0], vec![100.0, 200.0]).unwrap(),
    };
    let trace = gaussian_direct_mh(&t_obs(), 1000, &config, &mut RngState::new(53, 0)).unwrap();
    let s = summarize(&trace, &levels).unwrap();
    for (i, tol) in [(0, 0.015), (1, 0.08)] {
        for (g, w) in s.params[i].quantiles.iter().zip(&exact[i]) {
            assert!(
                (g - w).abs() < tol,
                "{}: chain {:?} vs quadrature {:?}",
                s.params[i].name,
                s.params[i].quantiles,
                exact[i]
            );
        }
    }
}

#[test]
fn shadow_error_halves_with_delta() {
    let model = gauss();
    let prior = BoxPrior::new(vec![-100.0, 0.0], vec![100.0, 200.0]).unwrap();
    let mut rng = RngState::new(54, 0);
    let (m, xbar) = (1000.0, T_OBS[0] / 1000.0);
    let ss = T_OBS[1] - m * xbar * xbar;
    let g = Gamma::new((m - 3.0) / 2.0, 2.0 / ss).unwrap();
    let pairs: Vec<_> = (0..100)
        .map(|_| {
            let t2: f64 = 1.0 / g.sample(&mut rng);
            let t1 = Normal::new(xbar, (t2 / m).sqrt()).unwrap().sample(&mut rng);
            let theta = ParameterVector::new(vec![t1, t2]);
            let aux = simulate_statistics(&model, &theta, &PpSamplerConfig::default(), &mut rng).unwrap();
            let u: [f64; 2] = [rand::Rng::random::<f64>(&mut rng) - 0.5, rand::Rng::random::<f64>(&mut rng) - 0.5];
            (theta, aux, u)
        })
        .collect();
    let err = |d: f64| {
        pairs
            .iter()
            .map(|(theta, aux, u)| {
                let th = theta.values();
                let psi = ParameterVector::new(vec![th[0] + d * u[0], th[1] + d * u[1]]);
                let s = shadow_acceptance(&model, &t_obs(), aux, theta, &psi, &prior).unwrap();
                let i = ideal_acceptance_numeric(&model, &t_obs(), aux, theta, &psi, &[d, d], &prior, 200).unwrap();
                (i - s).abs()
            })
            .fold(0.0, f64::max)
    };
    let ratio = err(0.02) / err(0.01);
    assert!((1.5..=2.5).contains(&ratio), "{ratio}");
}
