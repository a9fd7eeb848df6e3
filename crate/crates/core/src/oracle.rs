//! Ground truth at desk scale: discrete distributions, their exact moments,
//! the non-negative quadratic form behind the feasibility condition, witness
//! distributions for feasible moment sets, and a brute-force ellipse/ellipsoid
//! projection.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::{classify, MomentSet, ToleranceConfig};

/// Accepted deviation of a distribution's total weight from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Positions drawn by [`random_distribution`] are uniform in `[-BOX, BOX]ⁿ`.
pub const POSITION_BOX: f64 = 10.0;

/// SplitMix64 (Steele, Lea and Flood), chosen because it is a few lines in
/// any language and needs no tables.
///
/// `next_u64` adds `0x9E3779B97F4A7C15` to the state and mixes with
/// `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
/// `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, `z ^ (z >> 31)`.
/// `next_f64` keeps the top 53 bits: `(x >> 11) * 2⁻⁵³ ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub position: DVector<f64>,
}

/// A finite set of weighted points with total weight one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "dimension must be at least 1".to_string(),
            ));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidInput("distribution has no atoms".to_string()));
        }
        for (k, atom) in atoms.iter().enumerate() {
            if !(atom.weight.is_finite() && atom.weight >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "atom {k} has invalid weight {}",
                    atom.weight
                )));
            }
            if atom.position.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "atom {k} has {} coordinates, expected {dim}",
                    atom.position.len()
                )));
            }
            if atom.position.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("atom {k} is not finite")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(DiscreteDistribution { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// `k` atoms uniform in `[-10, 10]ⁿ` with normalized uniform weights.
///
/// Each atom draws its `n` coordinates and then a raw weight `1 − u`, so the
/// output is a fixed function of `seed`.
pub fn random_distribution(seed: u64, n: usize, k: usize) -> Result<DiscreteDistribution> {
    random_distribution_from(&mut SplitMix64::new(seed), n, k)
}

pub fn random_distribution_from(
    rng: &mut SplitMix64,
    n: usize,
    k: usize,
) -> Result<DiscreteDistribution> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput(format!(
            "need n >= 1 and k >= 1, got n={n}, k={k}"
        )));
    }
    let mut atoms: Vec<Atom> = (0..k)
        .map(|_| {
            let position = DVector::from_fn(n, |_, _| rng.uniform(-POSITION_BOX, POSITION_BOX));
            let weight = 1.0 - rng.next_f64();
            Atom { weight, position }
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for atom in &mut atoms {
        atom.weight /= total;
    }
    DiscreteDistribution::new(n, atoms)
}

/// Exact first and second moments about the origin.
pub fn moments_of(d: &DiscreteDistribution) -> MomentSet {
    let n = d.dim();
    let mut mean = DVector::zeros(n);
    let mut second = DMatrix::zeros(n, n);
    for atom in d.atoms() {
        mean.axpy(atom.weight, &atom.position, 1.0);
        for i in 0..n {
            for j in 0..n {
                second[(i, j)] += atom.weight * atom.position[i] * atom.position[j];
            }
        }
    }
    MomentSet::new(mean, second).expect("moments of a valid distribution are well-formed")
}

/// `Σₖ wₖ (α₀ + α₁xₖ₁ + … + αₙxₖₙ)²`, evaluated by direct summation.
pub fn quadratic_form(d: &DiscreteDistribution, alpha: &DVector<f64>) -> Result<f64> {
    if alpha.len() != d.dim() + 1 {
        return Err(Error::InvalidInput(format!(
            "alpha has length {}, expected {}",
            alpha.len(),
            d.dim() + 1
        )));
    }
    Ok(d.atoms()
        .iter()
        .map(|atom| {
            let lin = alpha[0] + alpha.rows(1, d.dim()).dot(&atom.position);
            atom.weight * lin * lin
        })
        .sum())
}

/// A `2n`-atom distribution reproducing a feasible moment set exactly: atoms
/// at `x̄ ± √(n·μᵢ)·eᵢ` with weight `1/(2n)`, where `(μᵢ, eᵢ)` are the
/// eigenpairs of the centered matrix `S − x̄x̄ᵀ`.
pub fn construct_witness(m: &MomentSet) -> Result<DiscreteDistribution> {
    let report = classify(m, &ToleranceConfig::default())?;
    if !report.status.is_feasible() {
        return Err(Error::InvalidInput(format!(
            "moment set is {}, no distribution has these moments",
            report.status
        )));
    }
    let n = m.dim();
    let mean = m.mean();
    let centered = m.second() - mean * mean.transpose();
    let eig = linalg::jacobi_eigen(&centered)?;
    let weight = 1.0 / (2 * n) as f64;
    let mut atoms = Vec::with_capacity(2 * n);
    for i in 0..n {
        let spread = (n as f64 * eig.values[i].max(0.0)).sqrt();
        let offset = eig.vectors.column(i) * spread;
        atoms.push(Atom {
            weight,
            position: mean + &offset,
        });
        atoms.push(Atom {
            weight,
            position: mean - &offset,
        });
    }
    DiscreteDistribution::new(n, atoms)
}

/// Closest point on an ellipse (2D) or ellipsoid (3D) surface by exhaustive
/// sampling, then local refinement. Independent of the Newton projection in
/// [`crate::repair`].
///
/// 2D samples `resolution` angles of `(s₀ cos θ, s₁ sin θ)` and refines the
/// best one by golden-section search. 3D samples a `√resolution × √resolution`
/// grid of `(s₀ sin θ cos φ, s₁ sin θ sin φ, s₂ cos θ)` and refines with a
/// shrinking pattern search. The grid alone is accurate to
/// O((perimeter/resolution)²) in squared distance.
pub fn brute_force_nearest(semiaxes: &[f64], point: &[f64], resolution: usize) -> Result<Vec<f64>> {
    if semiaxes.len() != point.len() || !(2..=3).contains(&semiaxes.len()) {
        return Err(Error::InvalidInput(
            "brute-force projection supports matching 2D or 3D inputs".to_string(),
        ));
    }
    if semiaxes.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidInput("semiaxes must be positive".to_string()));
    }
    if resolution < 10_000 {
        return Err(Error::InvalidInput(format!(
            "resolution must be at least 10^4, got {resolution}"
        )));
    }
    if semiaxes.len() == 2 {
        Ok(nearest_on_ellipse(
            semiaxes[0],
            semiaxes[1],
            point[0],
            point[1],
            resolution,
        ))
    } else {
        Ok(nearest_on_ellipsoid(semiaxes, point, resolution))
    }
}

fn nearest_on_ellipse(a: f64, b: f64, px: f64, py: f64, resolution: usize) -> Vec<f64> {
    use std::f64::consts::TAU;
    let dist2 = |t: f64| {
        let (dx, dy) = (a * t.cos() - px, b * t.sin() - py);
        dx * dx + dy * dy
    };
    let step = TAU / resolution as f64;
    let best = (0..resolution)
        .map(|k| k as f64 * step)
        .min_by(|&s, &t| dist2(s).total_cmp(&dist2(t)))
        .expect("resolution is positive");

    // golden-section on the bracketing cell pair
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best - step, best + step);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (dist2(x1), dist2(x2));
    while hi - lo > 1e-15 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = dist2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = dist2(x2);
        }
        if x1 == x2 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    vec![a * t.cos(), b * t.sin()]
}

fn nearest_on_ellipsoid(s: &[f64], p: &[f64], resolution: usize) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let surface = |theta: f64, phi: f64| {
        [
            s[0] * theta.sin() * phi.cos(),
            s[1] * theta.sin() * phi.sin(),
            s[2] * theta.cos(),
        ]
    };
    let dist2 = |theta: f64, phi: f64| {
        let q = surface(theta, phi);
        (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2)
    };

    let side = (resolution as f64).sqrt().ceil() as usize;
    let d_theta = PI / side as f64;
    let d_phi = TAU / side as f64;
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..=side {
        let theta = i as f64 * d_theta;
        for j in 0..side {
            let phi = j as f64 * d_phi;
            let d = dist2(theta, phi);
            if d < best.2 {
                best = (theta, phi, d);
            }
        }
    }

    let (mut theta, mut phi, mut value) = best;
    let mut step = d_theta.max(d_phi);
    const DIRECTIONS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (-1.0, -1.0),
    ];
    while step > 1e-14 {
        let mut improved = false;
        for (dt, dp) in DIRECTIONS {
            let (t, f) = (theta + dt * step, phi + dp * step);
            let d = dist2(t, f);
            if d < value {
                theta = t;
                phi = f;
                value = d;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    surface(theta, phi).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn splitmix_reference_values() {
        // reference outputs for seed 0 from the published algorithm
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn random_distribution_examples() {
        let d = random_distribution(1, 1, 1).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.atoms()[0].weight, 1.0);

        assert_eq!(
            random_distribution(42, 3, 4).unwrap(),
            random_distribution(42, 3, 4).unwrap()
        );
        assert_ne!(
            random_distribution(42, 3, 4).unwrap(),
            random_distribution(43, 3, 4).unwrap()
        );

        let d = random_distribution(7, 3, 5).unwrap();
        assert_eq!(d.atoms().len(), 5);
        let total: f64 = d.atoms().iter().map(|a| a.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d
            .atoms()
            .iter()
            .all(|a| a.position.iter().all(|x| x.abs() <= POSITION_BOX)));

        assert!(random_distribution(1, 0, 1).is_err());
        assert!(random_distribution(1, 1, 0).is_err());
    }

    #[test]
    fn distribution_validation() {
        let atom = |w: f64, x: f64| Atom {
            weight: w,
            position: DVector::from_vec(vec![x]),
        };
        assert!(DiscreteDistribution::new(1, vec![atom(0.5, 0.0)]).is_err());
        assert!(DiscreteDistribution::new(1, vec![atom(1.5, 0.0), atom(-0.5, 1.0)]).is_err());
        assert!(DiscreteDistribution::new(2, vec![atom(1.0, 0.0)]).is_err());
        assert!(DiscreteDistribution::new(1, vec![]).is_err());
    }

    #[test]
    fn moments_examples() {
        let d = DiscreteDistribution::new(
            1,
            vec![
                Atom {
                    weight: 0.5,
                    position: DVector::from_vec(vec![-1.0]),
                },
                Atom {
                    weight: 0.5,
                    position: DVector::from_vec(vec![1.0]),
                },
            ],
        )
        .unwrap();
        let m = moments_of(&d);
        assert_eq!(m.mean()[0], 0.0);
        assert_eq!(m.second()[(0, 0)], 1.0);

        let x = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        let d = DiscreteDistribution::new(
            3,
            vec![Atom {
                weight: 1.0,
                position: x.clone(),
            }],
        )
        .unwrap();
        let m = moments_of(&d);
        assert_eq!(m.mean(), &x);
        assert_eq!(m.second(), &(&x * x.transpose()));

        let corners = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|&(a, b)| Atom {
                weight: 0.25,
                position: DVector::from_vec(vec![a, b]),
            })
            .collect();
        let m = moments_of(&DiscreteDistribution::new(2, corners).unwrap());
        assert_eq!(m.mean().as_slice(), &[0.0, 0.0]);
        assert_eq!(m.second(), &DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn quadratic_form_examples() {
        let d = random_distribution(3, 2, 6).unwrap();
        let m = moments_of(&d);
        let e0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!((quadratic_form(&d, &e0).unwrap() - 1.0).abs() < 1e-15);

        let centered = DVector::from_vec(vec![-m.mean()[0], 1.0, 0.0]);
        let variance = m.second()[(0, 0)] - m.mean()[0] * m.mean()[0];
        let q = quadratic_form(&d, &centered).unwrap();
        assert!(q >= 0.0);
        assert!((q - variance).abs() < 1e-10 * m.second()[(0, 0)]);

        assert!(quadratic_form(&d, &DVector::zeros(2)).is_err());
    }

    #[test]
    fn witness_examples() {
        let m = MomentSet::from_rows(&[0.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let w = construct_witness(&m).unwrap();
        assert_eq!(w.atoms().len(), 4);
        let r2 = 2f64.sqrt();
        for atom in w.atoms() {
            assert_eq!(atom.weight, 0.25);
            let p = atom.position.as_slice();
            assert!(
                [[r2, 0.0], [-r2, 0.0], [0.0, r2], [0.0, -r2]]
                    .iter()
                    .any(|q| dist(p, q) < 1e-15),
                "{p:?}"
            );
        }

        let x = DVector::from_vec(vec![1.0, -3.0]);
        let m = MomentSet::new(x.clone(), &x * x.transpose()).unwrap();
        let w = construct_witness(&m).unwrap();
        assert!(w
            .atoms()
            .iter()
            .all(|a| dist(a.position.as_slice(), x.as_slice()) < 1e-7));

        let infeasible = MomentSet::from_rows(&[1.0], &[vec![0.5]]).unwrap();
        assert!(matches!(
            construct_witness(&infeasible),
            Err(Error::InvalidInput(_))
        ));
        let invalid = MomentSet::from_rows(&[0.0], &[vec![-1.0]]).unwrap();
        assert!(construct_witness(&invalid).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let p = brute_force_nearest(&[1.0, 1.0, 1.0], &[2.0, 0.0, 0.0], 10_000).unwrap();
        assert!(dist(&p, &[1.0, 0.0, 0.0]) < 1e-6);
        let p = brute_force_nearest(&[2.0, 1.0], &[3.0, 0.0], 10_000).unwrap();
        assert!(dist(&p, &[2.0, 0.0]) < 1e-6);
        assert!(brute_force_nearest(&[2.0, 1.0], &[3.0, 0.0], 100).is_err());
        assert!(brute_force_nearest(&[2.0], &[3.0], 10_000).is_err());
        assert!(brute_force_nearest(&[2.0, 0.0], &[3.0, 0.0], 10_000).is_err());
    }
}
