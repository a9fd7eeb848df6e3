//! Reduced-size property checks backed by the oracle, run by `momentgate selftest`.

use nalgebra::{DVector, Vector3};

use crate::moments::{augmented_matrix, classify, volume_ratio, ToleranceConfig};
use crate::oracle::{
    construct_witness, moments_of, quadratic_form, random_distribution_from, SplitMix64,
};
use crate::repair::{max_feasible_mass, MassBound};
use crate::rigid_body::{com_feasibility, semiaxes, InertiaFrame, RigidBodyParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, failures: usize, total: usize) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failures == 0,
        detail: format!("{} of {total} cases passed", total - failures),
    }
}

/// Runs every check with the given seed.
pub fn run(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = SplitMix64::new(seed);
    vec![
        volume_table(),
        plate_example(),
        forward_theorem(&mut rng, 1_000),
        quadratic_form_nonnegative(&mut rng, 10_000),
        witness_round_trip(&mut rng, 200),
    ]
}

#[allow(clippy::approx_constant)]
fn volume_table() -> CheckOutcome {
    let table = [
        (1, 1.0),
        (2, 0.7854),
        (3, 0.5236),
        (4, 0.3084),
        (5, 0.1645),
        (10, 0.0025),
    ];
    let failures = table
        .iter()
        .filter(|&&(n, expected)| {
            let tol = if n == 10 { 5e-4 } else { 5e-5 };
            volume_ratio(n).map_or(true, |v| (v - expected).abs() > tol)
        })
        .count();
    outcome("volume ratio table", failures, table.len())
}

fn plate_example() -> CheckOutcome {
    let mut failures = 0;
    match semiaxes(10.0, 20.0, 30.0, 300.0) {
        Ok(s)
            if (s.a - 0.2582).abs() <= 5e-5
                && (s.b - 0.1826).abs() <= 5e-5
                && s.c.abs() <= 1e-9 => {}
        _ => failures += 1,
    }
    let com = Vector3::new(2.0, 5.0, 0.0);
    let infeasible = RigidBodyParams::from_principal(
        10.0,
        20.0,
        30.0,
        300.0,
        com,
        InertiaFrame::AboutReferencePoint,
    )
    .and_then(|p| com_feasibility(&p, &ToleranceConfig::default()))
    .is_ok_and(|r| !r.status.is_feasible());
    if !infeasible {
        failures += 1;
    }
    match max_feasible_mass(10.0, 20.0, 30.0, &com) {
        Ok(MassBound::Finite(m)) if (m - 0.370370).abs() <= 1e-4 => {}
        _ => failures += 1,
    }
    outcome("planar plate counterexample", failures, 3)
}

fn forward_theorem(rng: &mut SplitMix64, cases: usize) -> CheckOutcome {
    let tol = ToleranceConfig::default();
    let failures = (0..cases)
        .filter(|_| {
            let n = rng.range_inclusive(1, 6);
            let k = rng.range_inclusive(1, 12);
            let d = random_distribution_from(rng, n, k).expect("valid sizes");
            match classify(&moments_of(&d), &tol) {
                Ok(r) => !(r.status.is_feasible() && r.margin.is_some_and(|m| m >= -1e-9)),
                Err(_) => true,
            }
        })
        .count();
    outcome(
        "moments of real distributions are feasible",
        failures,
        cases,
    )
}

fn quadratic_form_nonnegative(rng: &mut SplitMix64, cases: usize) -> CheckOutcome {
    let failures = (0..cases)
        .filter(|_| {
            let n = rng.range_inclusive(1, 6);
            let k = rng.range_inclusive(1, 12);
            let d = random_distribution_from(rng, n, k).expect("valid sizes");
            let alpha = DVector::from_fn(n + 1, |_, _| rng.uniform(-1.0, 1.0));
            let direct = quadratic_form(&d, &alpha).expect("matching length");
            let a = augmented_matrix(&moments_of(&d));
            let via_matrix = alpha.dot(&(a.as_matrix() * &alpha));
            let scale = d
                .atoms()
                .iter()
                .map(|atom| {
                    atom.weight * (1.0 + atom.position.norm_squared()) * alpha.norm_squared()
                })
                .sum::<f64>();
            direct < 0.0 || (direct - via_matrix).abs() > 1e-10 * scale.max(1.0)
        })
        .count();
    outcome(
        "quadratic form is non-negative and matches the bordered matrix",
        failures,
        cases,
    )
}

fn witness_round_trip(rng: &mut SplitMix64, cases: usize) -> CheckOutcome {
    let failures = (0..cases)
        .filter(|_| {
            let n = rng.range_inclusive(1, 6);
            let k = rng.range_inclusive(1, 12);
            let m = moments_of(&random_distribution_from(rng, n, k).expect("valid sizes"));
            match construct_witness(&m) {
                Ok(w) => {
                    let back = moments_of(&w);
                    (back.mean() - m.mean()).amax() > 1e-10
                        || (back.second() - m.second()).amax() > 1e-10
                }
                Err(_) => true,
            }
        })
        .count();
    outcome(
        "witness distributions reproduce their moments",
        failures,
        cases,
    )
}
