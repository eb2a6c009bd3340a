use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::check::{params, InequalityCheck};
use crate::cotype::{axis_sum, check_even, check_exponents, cotype_functionals, gamma_hilbert_exact, sigma_edge_mean, CotypeOptions};
use crate::error::{Error, Result};
use crate::field::{MetricField, NormedField, PointMap, VectorField};
use crate::harmonic::root_of_unity;
use crate::metric::{distortion_of, moduli_of, Metric, PointCloud, TorusDomain};
use crate::numeric::Norm;
use crate::search::run_restarts;

/// Collision threshold when sampling random injections.
const MIN_SEPARATION: f64 = 1e-9;

/// `x ↦ Σ_j e^{2πi x_j/m} e_j` in `ℓ_2^n` (complex coordinates).
pub fn character_embedding(n: usize, m: usize) -> Result<PointCloud> {
    let d = TorusDomain::new(n, m)?;
    let points = (0..d.size())
        .map(|x| d.coords(x).iter().map(|&c| root_of_unity(c as i64, m)).collect())
        .collect();
    Ok(PointCloud { points, norm: Norm::l2(n) })
}

/// `√n / (2 Γ_2(H; n, m))`.
pub fn grid_lower_bound_bound(n: usize, m: usize) -> Result<f64> {
    Ok((n as f64).sqrt() / (2.0 * gamma_hilbert_exact(n, m)?.value))
}

fn random_cloud(size: usize, norm: Norm, rng: &mut ChaCha8Rng) -> PointCloud {
    loop {
        let points: Vec<Vec<Complex64>> = (0..size)
            .map(|_| (0..norm.dim).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect())
            .collect();
        let cloud = PointCloud { points, norm };
        let separated = (0..size).all(|i| (i + 1..size).all(|j| cloud.dist(i, j) >= MIN_SEPARATION));
        if separated {
            return cloud;
        }
    }
}

fn cloud_distortion(domain: &TorusDomain, cloud: &PointCloud) -> f64 {
    let map: Vec<usize> = (0..domain.size()).collect();
    distortion_of(&map, domain, cloud).map(|d| d.distortion).unwrap_or(f64::INFINITY)
}

/// Single-point Gaussian moves that never increase the distortion.
fn minimize_distortion(domain: &TorusDomain, mut cloud: PointCloud, iterations: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut best = cloud_distortion(domain, &cloud);
    let mut step = 0.3;
    for _ in 0..iterations {
        let i = rng.random_range(0..cloud.points.len());
        let saved = cloud.points[i].clone();
        for c in cloud.points[i].iter_mut() {
            *c += Complex64::new(step * rng.sample::<f64, _>(StandardNormal), 0.0);
        }
        let value = cloud_distortion(domain, &cloud);
        // Only the extreme pairs set the distortion, so equal values are
        // accepted to let the other points drift.
        if value <= best {
            if value < best {
                step = (step * 1.2_f64).min(2.0);
            }
            best = value;
        } else {
            cloud.points[i] = saved;
            step = (step * 0.95_f64).max(1e-4);
        }
    }
    best
}

/// Sampled distortions of injections `Z_m^n -> ℓ_2^d` against
/// `√n / (2 Γ_2(H; n, m))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLowerBound {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub bound: f64,
    /// Distortions of the plain Gaussian samples.
    pub random: Vec<f64>,
    /// Distortions reached by the minimizing hill climbs.
    pub adversarial: Vec<f64>,
    /// `lhs` is the bound, `rhs` the smallest distortion seen.
    pub check: InequalityCheck,
}

/// Samples `trials` Gaussian injections, of which the last `adversarial`
/// are then hill climbed to lower their distortion. Not finding a map below
/// the bound is evidence for it, not a proof.
pub fn grid_lower_bound_check(
    n: usize,
    m: usize,
    d: usize,
    trials: usize,
    adversarial: usize,
    seed: u64,
) -> Result<GridLowerBound> {
    if trials == 0 || adversarial > trials || d == 0 {
        return Err(Error::PreconditionViolation("need 0 < trials, adversarial <= trials and d > 0".into()));
    }
    let domain = TorusDomain::new(n, m)?;
    let bound = grid_lower_bound_bound(n, m)?;
    let norm = Norm::l2(d);
    let plain = trials - adversarial;
    let values = run_restarts(trials, seed, |i, rng| {
        let cloud = random_cloud(domain.size(), norm, rng);
        if i < plain {
            cloud_distortion(&domain, &cloud)
        } else {
            minimize_distortion(&domain, cloud, 4000, rng)
        }
    });
    let smallest = values.iter().copied().fold(f64::INFINITY, f64::min);
    let text = params(&[
        ("n", n.to_string()),
        ("m", m.to_string()),
        ("d", d.to_string()),
        ("trials", trials.to_string()),
        ("adversarial", adversarial.to_string()),
        ("seed", seed.to_string()),
    ]);
    Ok(GridLowerBound {
        n,
        m,
        d,
        bound,
        random: values[..plain].to_vec(),
        adversarial: values[plain..].to_vec(),
        check: InequalityCheck::new("grid-lower-bound", text, bound, smallest, bound),
    })
}

/// The `ℓ_1` case through the square-root snowflake, which is a Hilbert
/// metric: both checks use `Γ_2(H; n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnowflakeCheck {
    /// Worst sample of `Σ_j avg ‖f(x + m/2 e_j) − f(x)‖_1 <= Γ² m² E_σ avg ‖f(x+ε) − f(x)‖_1`.
    pub cotype: InequalityCheck,
    /// `n / (2 m Γ² (1 − 3^{-n}))` against the smallest sampled distortion.
    pub distortion: InequalityCheck,
}

pub fn l1_snowflake_check(n: usize, m: usize, d: usize, trials: usize, seed: u64) -> Result<SnowflakeCheck> {
    if trials == 0 || d == 0 {
        return Err(Error::PreconditionViolation("need trials > 0 and d > 0".into()));
    }
    let domain = TorusDomain::new(n, m)?;
    let gamma = gamma_hilbert_exact(n, m)?.value;
    let factor = gamma * gamma * (m * m) as f64;
    let norm = Norm::new(1.0, d)?;
    let samples = run_restarts(trials, seed, |_, rng| {
        let cloud = random_cloud(domain.size(), norm, rng);
        let values = cloud.points.iter().flatten().copied().collect();
        let f = VectorField::new(domain, d, values).expect("sizes match");
        let field = NormedField { f: &f, norm };
        let lhs = axis_sum(&field, (m / 2) as i64, 1.0);
        let rhs = sigma_edge_mean(&field, 1.0);
        (lhs, rhs, cloud_distortion(&domain, &cloud))
    });
    let worst = samples
        .iter()
        .copied()
        .fold((0.0, 1.0, f64::INFINITY), |w, s| if s.0 * w.1 > w.0 * s.1 { s } else { w });
    let smallest = samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let bound = n as f64 / (2.0 * m as f64 * gamma * gamma * (1.0 - 3f64.powi(-(n as i32))));
    let text = params(&[
        ("n", n.to_string()),
        ("m", m.to_string()),
        ("d", d.to_string()),
        ("trials", trials.to_string()),
        ("seed", seed.to_string()),
    ]);
    Ok(SnowflakeCheck {
        cotype: InequalityCheck::new("l1-snowflake-cotype", text.clone(), worst.0, factor * worst.1, worst.0),
        distortion: InequalityCheck::new("l1-snowflake-distortion", text, bound, smallest, bound),
    })
}

/// For `f` given on the net `{Σ_j s e^{2πi x_j/m} e_j}` of `ℓ_r^n` (indexed
/// by `x ∈ Z_m^n`), checks
/// `n^{1/q} ω_f(2s) <= Γ̂ m Ω_f(2π s n^{1/r} / m)` with `Γ̂` the measured
/// constant of `x ↦ f(net(x))`.
pub fn coarse_obstruction_check<M: Metric + Sync + ?Sized>(
    f: &PointMap,
    space: &M,
    p: f64,
    q: f64,
    r: f64,
    s: f64,
) -> Result<InequalityCheck> {
    check_exponents(p, q)?;
    if !(r >= q) || !(s > 0.0) {
        return Err(Error::PreconditionViolation("need r >= q and s > 0".into()));
    }
    let d = f.domain;
    check_even(d.m)?;
    let (n, m) = (d.n, d.m);
    let net = PointCloud {
        points: (0..d.size())
            .map(|x| d.coords(x).iter().map(|&c| root_of_unity(c as i64, m) * s).collect())
            .collect(),
        norm: Norm::new(r, n)?,
    };
    let tables = moduli_of(&f.values, &net, space)?;
    let gamma = cotype_functionals(&MetricField::new(f, space)?, p, q, CotypeOptions::default())?.gamma_hat;
    let slack = 1e-12;
    let omega = tables.omega_at(2.0 * s * (1.0 - slack));
    let big = tables.big_omega_at(2.0 * PI * s * (n as f64).powf(1.0 / r) / m as f64 * (1.0 + slack));
    let lhs = (n as f64).powf(1.0 / q) * omega;
    let rhs = gamma * m as f64 * big;
    let text = params(&[
        ("n", n.to_string()),
        ("m", m.to_string()),
        ("p", p.to_string()),
        ("q", q.to_string()),
        ("r", r.to_string()),
        ("s", s.to_string()),
        ("gamma_hat", gamma.to_string()),
    ]);
    Ok(InequalityCheck::new("coarse-obstruction", text, lhs, rhs, rhs.max(lhs)))
}
