use ebmatch_core::geometry::{AxisBox, Domain, Polycube};
use ebmatch_core::sampling::{iid_sample, iid_sample_counted, poisson_process, thin, Density, HolderDensity, SeedStream};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson as PoissonLaw};

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, _) = mean_sd(a);
    let (mb, _) = mean_sd(b);
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() as f64 - 1.0)
}

fn wave(d: usize, k: usize) -> HolderDensity {
    HolderDensity::from_fn(d, 1.0, k, 1.0, |x| 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x[0]).sin()).unwrap()
}

#[test]
fn empty_sample() {
    let mut rng = SeedStream::new(1).rng(0);
    let s = iid_sample(&Density::uniform_cube(3), 0, &mut rng);
    assert!(s.is_empty());
    assert_eq!(s.dim(), 3);
}

#[test]
fn uniform_coordinates_have_mean_one_half() {
    let n = 100_000;
    let mut rng = SeedStream::new(2).rng(0);
    let s = iid_sample(&Density::uniform_cube(3), n, &mut rng);
    let sigma = (1.0f64 / 12.0).sqrt();
    for a in 0..3 {
        let m = s.iter().map(|p| p[a]).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() <= 3.0 * sigma / (n as f64).sqrt(), "axis {a}: {m}");
    }
    assert!(s.iter().all(|p| p.iter().all(|&c| (0.0..1.0).contains(&c))));
}

#[test]
fn uniform_polycube_samples_stay_inside_with_volume_weights() {
    let boxes = vec![
        AxisBox::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap(),
        AxisBox::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap(),
    ];
    let domain = Domain::Polycube(Polycube::new(boxes).unwrap());
    let mut rng = SeedStream::new(3).rng(0);
    let n = 30_000;
    let s = iid_sample(&Density::Uniform(domain.clone()), n, &mut rng);
    assert!(s.iter().all(|p| domain.contains(p)));
    let upper = s.iter().filter(|p| p[1] > 1.0).count() as f64 / n as f64;
    let third = 1.0 / 3.0;
    assert!((upper - third).abs() <= 4.0 * (third * (1.0 - third) / n as f64).sqrt());
}

#[test]
fn holder_cell_frequencies_match_integrals() {
    let density = wave(3, 65);
    let n = 200_000;
    let mut rng = SeedStream::new(4).rng(0);
    let s = iid_sample(&Density::Holder(density.clone()), n, &mut rng);
    for cell in 0..8usize {
        let lo: Vec<f64> = (0..3).map(|a| 0.5 * (cell >> a & 1) as f64).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + 0.5).collect();
        let prob = density.mass_in(&lo, &hi);
        // Integral of the exact density over the cell.
        let exact = if cell & 1 == 0 { 0.125 + 0.05 / std::f64::consts::PI } else { 0.125 - 0.05 / std::f64::consts::PI };
        assert!((prob - exact).abs() < 1e-4, "cell {cell}: {prob} vs {exact}");
        let freq = s.iter().filter(|p| (0..3).all(|a| p[a] >= lo[a] && p[a] < hi[a])).count() as f64 / n as f64;
        assert!((freq - prob).abs() <= 4.0 * (prob * (1.0 - prob) / n as f64).sqrt(), "cell {cell}: {freq} vs {prob}");
    }
}

#[test]
fn rejection_acceptance_rate_is_at_least_rho0() {
    let density = wave(2, 257);
    let rho0 = density.rho0();
    let dens = Density::Holder(density);
    let mut rng = SeedStream::new(5).rng(0);
    let (pts, proposals) = iid_sample_counted(&dens, 20_000, &mut rng);
    assert!(proposals >= 10_000);
    let rate = pts.len() as f64 / proposals as f64;
    let se = (rate * (1.0 - rate) / proposals as f64).sqrt();
    assert!(rate >= rho0 - 3.0 * se, "rate {rate} rho0 {rho0}");
    assert!((rate - dens.acceptance_probability()).abs() <= 4.0 * se);
}

#[test]
fn poisson_counts_have_the_right_mean() {
    let trials = 10_000;
    let stream = SeedStream::new(6);
    let counts: Vec<f64> = (0..trials)
        .map(|t| poisson_process(&Density::uniform_cube(2), 4.0, &mut stream.rng(t)).unwrap().len() as f64)
        .collect();
    let (m, _) = mean_sd(&counts);
    assert!((m - 4.0).abs() <= 3.0 * (4.0f64 / trials as f64).sqrt(), "{m}");
}

#[test]
fn poisson_subcell_counts_are_independent_poisson() {
    let trials = 10_000u64;
    let lambda = 40.0;
    let stream = SeedStream::new(7);
    let density = Density::uniform_cube(2);
    let mut counts = (0..4).map(|_| Vec::with_capacity(trials as usize)).collect::<Vec<_>>();
    for t in 0..trials {
        let s = poisson_process(&density, lambda, &mut stream.rng(t)).unwrap();
        let mut c = [0.0; 4];
        for p in s.iter() {
            c[(p[0] >= 0.5) as usize + 2 * (p[1] >= 0.5) as usize] += 1.0;
        }
        for k in 0..4 {
            counts[k].push(c[k]);
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let (_, sa) = mean_sd(&counts[a]);
            let (_, sb) = mean_sd(&counts[b]);
            let se = sa * sb / (trials as f64).sqrt();
            assert!(covariance(&counts[a], &counts[b]).abs() <= 4.0 * se, "cells {a},{b}");
        }
    }
    // Chi-square goodness of fit of one subcell's counts against Poisson(10).
    let law = PoissonLaw::new(lambda / 4.0).unwrap();
    let mut observed = [0.0f64; 40];
    for &c in &counts[0] {
        observed[(c as usize).min(39)] += 1.0;
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..40u64 {
        o += observed[k as usize];
        e += if k == 39 { 1.0 - law.cdf(38) } else { law.pmf(k) } * trials as f64;
        if e >= 5.0 && (1.0 - law.cdf(k)) * trials as f64 >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    bins.last_mut().unwrap().0 += o;
    bins.last_mut().unwrap().1 += e;
    let chi2: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let critical = ChiSquared::new((bins.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 <= critical, "chi2 {chi2} > {critical}");
}

#[test]
fn thinning_extremes_and_conservation() {
    let mut rng = SeedStream::new(8).rng(0);
    let pts = iid_sample(&Density::uniform_cube(2), 500, &mut rng);
    let (kept, removed) = thin(&pts, 0.0, &mut rng).unwrap();
    assert_eq!((kept.len(), removed.len()), (500, 0));
    assert_eq!(kept, pts);
    let (kept, removed) = thin(&pts, 1.0, &mut rng).unwrap();
    assert_eq!((kept.len(), removed.len()), (0, 500));
    let (kept, removed) = thin(&pts, 0.4, &mut rng).unwrap();
    let mut all: Vec<Vec<f64>> = kept.iter().chain(removed.iter()).map(|p| p.to_vec()).collect();
    let mut orig: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    orig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(all, orig);
    assert!(thin(&pts, 1.5, &mut rng).is_err());
}

#[test]
fn thinned_poisson_parts_are_independent() {
    let trials = 1000u64;
    let stream = SeedStream::new(9);
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for t in 0..trials {
        let mut rng = stream.rng(t);
        let s = poisson_process(&Density::uniform_cube(2), 1000.0, &mut rng).unwrap();
        let (k, r) = thin(&s, 0.3, &mut rng).unwrap();
        kept.push(k.len() as f64);
        removed.push(r.len() as f64);
    }
    let (m, sd) = mean_sd(&removed);
    assert!((m - 300.0).abs() <= 3.0 * (300.0f64 / trials as f64).sqrt(), "{m}");
    assert!((sd * sd - 300.0).abs() <= 0.2 * 300.0);
    let (_, sk) = mean_sd(&kept);
    let corr = covariance(&kept, &removed) / (sk * sd);
    assert!(corr.abs() <= 4.0 / (trials as f64).sqrt(), "{corr}");
}

#[test]
fn same_seed_same_points() {
    let density = Density::Holder(wave(2, 257));
    let a = iid_sample(&density, 100, &mut SeedStream::new(10).rng(5));
    let b = iid_sample(&density, 100, &mut SeedStream::new(10).rng(5));
    assert_eq!(a.coords(), b.coords());
}
