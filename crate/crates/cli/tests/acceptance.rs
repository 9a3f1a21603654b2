//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    brute_cohomology, generated_triples, moved, oracle_h, oracle_induced, push_forward,
    random_complex, random_point, tangent_frame, H,
};
use les_core::graded::{
    long_exact_ranks, total_complex, total_spectral_check, verify_triple, SpectralVerdict,
};
use les_core::local_model::{
    liouville, model_twist, symplectic_pairing, twist_moment, TwistProfile,
};
use les_core::scenario::{local_check, LocalCheckReport, ScenarioConfig};
use les_core::torus::{
    admissible_width, count_decomposition, generic_offsets, primitive_directions, rank_consistency,
    SlopeCurve, TwistConvention,
};
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let el = t.elapsed();
    match (r, limit) {
        (Ok(_), Some(lim)) if el > lim => Err(format!("took {el:.1?}, limit {lim:?}")),
        (Ok(m), _) => Ok(format!("{m} in {el:.1?}")),
        (Err(m), _) => Err(m),
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn oracle_cohomology() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..500 {
        let n = 1 + i % 12;
        let (c, expect) = random_complex(&mut rng, n);
        let brute = brute_cohomology(&c.d().matrix());
        let lib = c.cohomology_rank();
        ensure(
            brute == expect && lib == brute,
            format!("complex {i}: lib {lib}, brute {brute}"),
        )?;
    }
    Ok("500 complexes agree".into())
}

fn exactness_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let triples = generated_triples(200, &mut rng);
    let mut conn = 0;
    for (name, t) in &triples {
        ensure(
            verify_triple(t).all_passed(),
            format!("{name}: verify_triple"),
        )?;
        let total = total_complex(t).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            oracle_h(&total) == 0,
            format!("{name}: total complex not acyclic"),
        )?;
        let sp = total_spectral_check(t).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            sp.verdict == SpectralVerdict::Vanishes,
            format!("{name}: spectral {:?}", sp.verdict),
        )?;
        let r = long_exact_ranks(t).map_err(|e| format!("{name}: {e}"))?;
        let h = (
            oracle_h(t.prime()),
            oracle_h(t.middle()),
            oracle_h(t.double_prime()),
        );
        let rb = oracle_induced(t.b(), t.prime(), t.middle());
        let rc = oracle_induced(t.c(), t.middle(), t.double_prime());
        ensure(
            (r.h_prime, r.h_middle, r.h_double_prime, r.rank_b, r.rank_c)
                == (h.0, h.1, h.2, rb, rc),
            format!("{name}: ranks differ from oracle"),
        )?;
        ensure(h.1 == rb + rc, format!("{name}: exactness at the middle"))?;
        ensure(
            h.2 == rc + (h.0 - rb),
            format!("{name}: exactness at the end"),
        )?;
        ensure(
            r.rank_conn == r.rank_conn_from_identities && r.rank_conn == h.0 - rb,
            format!("{name}: connecting ranks differ"),
        )?;
        conn += usize::from(r.rank_conn > 0);
    }
    Ok(format!(
        "200 triples exact, {conn} with nonzero connecting map"
    ))
}

fn local_report() -> LocalCheckReport {
    local_check(&ScenarioConfig::default(), 100).expect("default config is valid")
}

fn named_checks(report: &LocalCheckReport, names: &[(&str, f64)]) -> Outcome {
    for &(name, tol) in names {
        let c = report
            .checks
            .iter()
            .find(|c| c.name == name)
            .ok_or(format!("missing check {name}"))?;
        ensure(
            c.tolerance <= tol,
            format!("{name}: tolerance {} above {tol}", c.tolerance),
        )?;
        ensure(c.passed, format!("{name}: {:e}", c.value))?;
    }
    let worst = names
        .iter()
        .filter_map(|(n, _)| report.checks.iter().find(|c| c.name == *n))
        .map(|c| format!("{} {:.1e}", c.name, c.value))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(worst)
}

fn local_constants(report: &LocalCheckReport) -> Outcome {
    // Closed form on its own, independent of the report.
    for r in [0.02f64, 0.1, 0.3] {
        let p = TwistProfile::new(r, 1.0).map_err(|e| e.to_string())?;
        ensure(
            (p.value(0.0) + r / 4.0).abs() <= 1e-12,
            format!("R(0) at r = {r}"),
        )?;
    }
    named_checks(
        report,
        &[
            ("R(0) = -r/4", 1e-12),
            ("K = -2πR(0) on the zero section", 1e-9),
            ("σ_π is antipodal", 1e-9),
            ("decay bound violations", 0.0),
        ],
    )
}

fn twist_identities() -> Outcome {
    let p = TwistProfile::new(0.2, 1.0).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut symp, mut inv, mut exact) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let y = random_point(&mut rng, 2, (0.05, 1.2));
        let ty = model_twist(&p, &y);
        inv = inv.max((twist_moment(&p, &ty) - twist_moment(&p, &y)).abs());
        let frame = tangent_frame(&y);
        let images: Vec<Vec<f64>> = frame.iter().map(|xi| push_forward(&p, &y, xi)).collect();
        for i in 0..frame.len() {
            for j in 0..frame.len() {
                let d = symplectic_pairing(&frame[i], &frame[j])
                    - symplectic_pairing(&images[i], &images[j]);
                symp = symp.max(d.abs());
            }
        }
        let m = y.v().len();
        for (xi, image) in frame.iter().zip(&images) {
            let dk = (twist_moment(&p, &moved(&y, xi, H)) - twist_moment(&p, &moved(&y, xi, -H)))
                / (2.0 * H);
            let d = liouville(&ty, &image[m..]) - liouville(&y, &xi[m..]) - dk;
            exact = exact.max(d.abs());
        }
    }
    ensure(symp <= 1e-6, format!("symplectic defect {symp:e}"))?;
    ensure(inv <= 1e-9, format!("moment invariance {inv:e}"))?;
    ensure(exact < 1e-6, format!("Liouville residual {exact:e}"))?;
    Ok(format!(
        "symplectic {symp:.1e}, invariance {inv:.1e}, Liouville {exact:.1e}"
    ))
}

fn torus_decomposition() -> Outcome {
    let dirs = primitive_directions(4);
    let (mut n, mut bad) = (0usize, Vec::new());
    for &dl in &dirs {
        let l = SlopeCurve::new(dl.0, dl.1, Rational64::from(0)).map_err(|e| e.to_string())?;
        for &d0 in &dirs {
            for &d1 in &dirs {
                let par = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 == a.1 * b.0;
                if par(dl, d0) || par(dl, d1) || par(d0, d1) {
                    continue;
                }
                n += 1;
                let r = generic_offsets(&l, d0, d1, 0, 24).and_then(|(a, b)| {
                    let w = admissible_width(&l, &a, &b)?;
                    count_decomposition(&l, &a, &b, w, TwistConvention::Positive)
                });
                match r {
                    Ok(d) if d.n_pl == d.n_q + d.n_p => {}
                    other => bad.push(format!("{dl:?} {d0:?} {d1:?}: {other:?}")),
                }
            }
        }
    }
    ensure(
        bad.is_empty(),
        format!("{} exceptions, first {:?}", bad.len(), bad.first()),
    )?;
    Ok(format!("{n} triples, 0 exceptions"))
}

fn rank_scan() -> Outcome {
    let dirs = primitive_directions(6);
    let (mut zero, mut positive) = (0usize, 0usize);
    for &dl in &dirs {
        let l = SlopeCurve::new(dl.0, dl.1, Rational64::from(0)).map_err(|e| e.to_string())?;
        for &d0 in &dirs {
            for &d1 in &dirs {
                let par = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 == a.1 * b.0;
                if par(dl, d0) || par(dl, d1) || par(d0, d1) {
                    continue;
                }
                let a = SlopeCurve::new(d0.0, d0.1, Rational64::new(1, 3))
                    .map_err(|e| e.to_string())?;
                let b = SlopeCurve::new(d1.0, d1.1, Rational64::new(2, 7))
                    .map_err(|e| e.to_string())?;
                let rc = rank_consistency(&l, &a, &b, TwistConvention::Positive)
                    .map_err(|e| format!("{dl:?} {d0:?} {d1:?}: {e}"))?;
                ensure(rc.is_consistent(), format!("{dl:?} {d0:?} {d1:?}: {rc:?}"))?;
                if rc.conn_rank == 0 {
                    zero += 1;
                } else {
                    positive += 1;
                }
            }
        }
    }
    ensure(
        zero > 0 && positive > 0,
        format!("zero {zero}, positive {positive}"),
    )?;
    Ok(format!("conn_rank 0 in {zero} triples, >= 1 in {positive}"))
}

fn end_to_end() -> Outcome {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.cfg");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_les"))
            .args([
                "verify-les",
                "--config",
                cfg,
                "--seed",
                "7",
                "--format",
                "json",
            ])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        a.status.code() == Some(0),
        format!(
            "exit {:?}: {}",
            a.status.code(),
            String::from_utf8_lossy(&a.stderr)
        ),
    )?;
    ensure(b.status.code() == Some(0), "second run failed")?;
    ensure(
        !a.stdout.is_empty() && a.stdout == b.stdout,
        "reports differ",
    )?;
    Ok(format!("exit 0, {} identical bytes", a.stdout.len()))
}

fn main() {
    let report = local_report();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        (
            "GF(2) oracle equivalence",
            Box::new(|| timed(Some(Duration::from_secs(30)), oracle_cohomology)),
        ),
        (
            "exactness engine",
            Box::new(|| timed(None, exactness_engine)),
        ),
        (
            "local model constants",
            Box::new(|| local_constants(&report)),
        ),
        (
            "twist identities",
            Box::new(|| timed(None, twist_identities)),
        ),
        (
            "fibre intersection",
            Box::new(|| {
                named_checks(
                    &report,
                    &[
                        ("fibre residual", 1e-9),
                        ("fibre preimage error", 1e-7),
                        ("fibre non-unique solutions", 0.0),
                        ("antipodal fibre pair gives y1", 0.0),
                    ],
                )
            }),
        ),
        (
            "section moduli",
            Box::new(|| {
                named_checks(
                    &report,
                    &[
                        ("section q(w(z)) = z", 1e-12),
                        ("section lies on Σ_z", 1e-9),
                        ("evaluation round trip", 1e-12),
                        ("evaluation endpoints on diagonals", 1e-12),
                    ],
                )
            }),
        ),
        (
            "torus decomposition",
            Box::new(|| timed(Some(Duration::from_secs(60)), torus_decomposition)),
        ),
        (
            "rank-level exact sequence",
            Box::new(|| timed(None, rank_scan)),
        ),
        (
            "end-to-end verify-les",
            Box::new(|| timed(None, end_to_end)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {}. {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
