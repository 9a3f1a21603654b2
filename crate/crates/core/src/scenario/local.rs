use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::local_model::{
    antipodal, complex_square_sum, distance_to_sphere, geodesic_flow, model_twist,
    parametrized_evaluation, section_from_unit_covector, sphere_distance, tilde_r, tilde_r_d1,
    twist_moment, CotangentPoint, FibreSolver, TwistProfile,
};

use super::{ConfigError, ScenarioConfig};

/// A measured quantity and the bound it must stay below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalCheckReport {
    pub schema: u32,
    pub seed: u64,
    pub r: f64,
    pub lambda: f64,
    pub delta: f64,
    pub checks: Vec<NumericCheck>,
    pub passed: bool,
}

fn check(name: &str, value: f64, tolerance: f64) -> NumericCheck {
    NumericCheck {
        name: name.into(),
        value,
        tolerance,
        passed: value.is_finite() && value <= tolerance,
    }
}

fn unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A point of `T*S^n` with `|v| = 1`, `u ⊥ v`, `|u| = mu`.
fn covector(rng: &mut ChaCha8Rng, n: usize, mu: f64) -> CotangentPoint<f64> {
    let v = unit(rng, n + 1);
    let w = unit(rng, n + 1);
    let c: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
    let u: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - c * b).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    CotangentPoint::retract(&u.iter().map(|x| x * mu / nu).collect::<Vec<_>>(), &v)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Numerical checks of the local model at the profile of `cfg`, with
/// `samples` random points per check.
pub fn local_check(cfg: &ScenarioConfig, samples: usize) -> Result<LocalCheckReport, ConfigError> {
    cfg.validate()?;
    let p: TwistProfile<f64> = cfg.profile()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    checks.push(check(
        "R(0) = -r/4",
        (p.value(0.0) + p.r() / 4.0).abs(),
        1e-12,
    ));

    let mut k0 = 0.0f64;
    let mut anti = 0.0f64;
    let mut inv = 0.0f64;
    for _ in 0..samples {
        let z = CotangentPoint::on_zero_section(unit(&mut rng, 3)).expect("unit vector");
        k0 = k0.max((twist_moment(&p, &z) + std::f64::consts::TAU * p.value(0.0)).abs());
        let mu = rng.gen_range(0.01..2.0);
        let y = covector(&mut rng, 2, mu);
        let flowed = geodesic_flow(&y, std::f64::consts::PI).expect("off the zero section");
        anti = anti.max(flowed.distance(&antipodal(&y)));
        let mu = rng.gen_range(0.0..1.2 * p.lambda());
        let y = covector(&mut rng, 2, mu);
        inv = inv.max((twist_moment(&p, &model_twist(&p, &y)) - twist_moment(&p, &y)).abs());
    }
    checks.push(check("K = -2πR(0) on the zero section", k0, 1e-9));
    checks.push(check("σ_π is antipodal", anti, 1e-9));
    checks.push(check("K is twist invariant", inv, 1e-9));

    // Decay bounds on a 200 x 200 grid, counted as violations.
    let mut bad = 0usize;
    for i in 1..=200 {
        let s = i as f64 / 200.0;
        for j in 0..200 {
            let t = 0.1 + 9.9 * j as f64 / 199.0;
            let (v, d) = (tilde_r(s, t), tilde_r_d1(s, t));
            let bound = s * s / 16.0;
            if !(v < 0.0 && v >= -bound / t && d > 0.0 && d <= bound / (t * t)) {
                bad += 1;
            }
        }
    }
    checks.push(check("decay bound violations", bad as f64, 0.0));

    match FibreSolver::new(p, cfg.delta) {
        Ok(solver) => {
            let (mut res, mut pre, mut multi) = (0.0f64, 0.0f64, 0usize);
            let mut solved = 0;
            while solved < samples {
                let y0 = unit(&mut rng, 3);
                let y1 = unit(&mut rng, 3);
                if sphere_distance(&y0, &y1) < std::f64::consts::TAU * cfg.delta {
                    continue;
                }
                match solver.solve(&y0, &y1, true) {
                    Ok(f) => {
                        res = res.max(f.residual);
                        pre = pre.max(f.preimage_error);
                        multi += usize::from(f.crossings != Some(1));
                    }
                    Err(_) => multi += 1,
                }
                solved += 1;
            }
            checks.push(check("fibre residual", res, 1e-9));
            checks.push(check("fibre preimage error", pre, 1e-7));
            checks.push(check("fibre non-unique solutions", multi as f64, 0.0));
            let y1 = unit(&mut rng, 3);
            let y0: Vec<f64> = y1.iter().map(|x| -x).collect();
            let a = solver.solve(&y0, &y1, false);
            let exact = a.map_or(f64::INFINITY, |f| {
                max_diff(f.point.v(), &y1) + f.point.u().iter().map(|x| x.abs()).sum::<f64>()
            });
            checks.push(check("antipodal fibre pair gives y1", exact, 0.0));
        }
        Err(_) => checks.push(check("profile is δ-wobbly", 1.0, 0.0)),
    }

    let (mut onto, mut sphere, mut round, mut ends) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let y = covector(&mut rng, 2, 1.0);
        let s = rng.gen_range(0.05..1.0);
        let m = section_from_unit_covector(s, &y).expect("unit covector");
        for k in 0..samples {
            let z = Complex::from_polar(s, std::f64::consts::TAU * k as f64 / samples as f64);
            let w = m.evaluate(z);
            onto = onto.max((complex_square_sum(&w) - z).norm());
            sphere = sphere.max(distance_to_sphere(&w, z));
        }
        round = round.max(m.evaluation().distance(&y));
        let (_, v1, w1) = parametrized_evaluation(1.0, &y);
        let (_, v0, w0) = parametrized_evaluation(0.0, &y);
        let neg: Vec<f64> = v0.iter().map(|x| -x).collect();
        ends = ends.max(max_diff(&v1, &w1)).max(max_diff(&w0, &neg));
    }
    checks.push(check("section q(w(z)) = z", onto, 1e-12));
    checks.push(check("section lies on Σ_z", sphere, 1e-9));
    checks.push(check("evaluation round trip", round, 1e-12));
    checks.push(check("evaluation endpoints on diagonals", ends, 1e-12));

    Ok(LocalCheckReport {
        schema: super::REPORT_SCHEMA,
        seed: cfg.seed,
        r: p.r(),
        lambda: p.lambda(),
        delta: cfg.delta,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

impl LocalCheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("local report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "local model checks, r = {}, lambda = {}, delta = {}, seed {}\n",
            self.r, self.lambda, self.delta, self.seed
        );
        for c in &self.checks {
            s.push_str(&format!(
                "  [{}] {}: {:e} (tol {:e})\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            ));
        }
        s.push_str(if self.passed {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_passes() {
        let r = local_check(&ScenarioConfig::default(), 30).unwrap();
        assert!(r.passed, "{}", r.render_text());
    }

    #[test]
    fn non_wobbly_profile_is_reported() {
        let mut cfg = ScenarioConfig::default();
        cfg.twist_r = 0.45;
        cfg.lambda = 0.05;
        let r = local_check(&cfg, 5).unwrap();
        assert!(!r.passed);
    }
}
