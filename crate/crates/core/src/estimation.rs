//! The quadratic MSE surface `J(w) = σ_d² − 2wᵀp + wᵀRw` and the solvers that
//! work on it with full knowledge of `R` and `p`: the closed-form Wiener
//! solution, Newton's method and steepest descent.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::signal::fill_taps;
use crate::DIVERGENCE_CEILING;

const SYMMETRY_TOL: f64 = 1e-12;
const POWER_ITER_TOL: f64 = 1e-9;
const POWER_ITER_CAP: usize = 10_000;

/// Second-order statistics `(R, p, σ_d²)` of an input/desired pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    r: Matrix,
    p: Vec<f64>,
    sigma_d2: f64,
}

impl CorrelationModel {
    /// Checks that `R` is symmetric and shaped like `p`, that `σ_d² ≥ 0`, and
    /// that the diagonal and 2x2 minors of `R` are non-negative (necessary
    /// conditions for `R` to be positive semidefinite).
    pub fn new(r: Matrix, p: Vec<f64>, sigma_d2: f64) -> Result<Self> {
        let n = r.dim();
        if n == 0 || p.len() != n {
            return Err(Error::invalid(format!(
                "R is {n}x{n} but p has {} entries",
                p.len()
            )));
        }
        if !(sigma_d2 >= 0.0) {
            return Err(Error::invalid(format!("sigma_d^2 must be >= 0, got {sigma_d2}")));
        }
        for i in 0..n {
            if !(r[(i, i)] >= 0.0) {
                return Err(Error::invalid(format!("R[{i}][{i}] is negative")));
            }
            for j in 0..i {
                let (a, b) = (r[(i, j)], r[(j, i)]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(Error::invalid(format!("R is not symmetric at ({i}, {j})")));
                }
                let bound = (r[(i, i)] * r[(j, j)]).sqrt();
                if a.abs() > bound * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::invalid(format!(
                        "R is not positive semidefinite: minor ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CorrelationModel { r, p, sigma_d2 })
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn sigma_d2(&self) -> f64 {
        self.sigma_d2
    }

    pub fn taps(&self) -> usize {
        self.p.len()
    }

    fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.taps() {
            return Err(Error::invalid(format!(
                "weight vector has {} entries, model has {} taps",
                w.len(),
                self.taps()
            )));
        }
        Ok(())
    }
}

/// Weight iterates of a deterministic solver together with the cost at each.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub weights: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.weights.last().expect("trajectory holds the initial weight")
    }
}

/// Biased sample estimate of `(R, p, σ_d²)` over all `M` instants, with zero
/// pre-history in the regressor.
pub fn estimate_correlation(x: &[f64], d: &[f64], taps: usize) -> Result<CorrelationModel> {
    if taps == 0 {
        return Err(Error::invalid("tap count must be at least 1"));
    }
    if x.len() != d.len() {
        return Err(Error::invalid(format!(
            "input has {} samples but desired has {}",
            x.len(),
            d.len()
        )));
    }
    if x.len() < taps {
        return Err(Error::invalid(format!(
            "need at least {taps} samples, got {}",
            x.len()
        )));
    }
    let m = x.len() as f64;
    let mut r = Matrix::zeros(taps);
    let mut p = vec![0.0; taps];
    let mut sigma = 0.0;
    let mut xv = vec![0.0; taps];
    for (n, dn) in d.iter().enumerate() {
        fill_taps(x, n, &mut xv);
        for i in 0..taps {
            p[i] += dn * xv[i];
            for j in 0..taps {
                r[(i, j)] += xv[i] * xv[j];
            }
        }
        sigma += dn * dn;
    }
    let rt = r.transpose();
    for i in 0..taps {
        for j in 0..taps {
            r[(i, j)] = 0.5 * (r[(i, j)] + rt[(i, j)]) / m;
        }
    }
    p.iter_mut().for_each(|v| *v /= m);
    CorrelationModel::new(r, p, sigma / m)
}

/// `J(w) = σ_d² − 2wᵀp + wᵀRw`.
pub fn cost(model: &CorrelationModel, w: &[f64]) -> Result<f64> {
    model.check_dim(w)?;
    Ok(model.sigma_d2 - 2.0 * dot(w, &model.p) + dot(w, &model.r.mul_vec(w)))
}

/// `∇J(w) = −2p + 2Rw`.
pub fn gradient(model: &CorrelationModel, w: &[f64]) -> Result<Vec<f64>> {
    model.check_dim(w)?;
    Ok(model
        .r
        .mul_vec(w)
        .iter()
        .zip(&model.p)
        .map(|(rw, p)| 2.0 * rw - 2.0 * p)
        .collect())
}

/// The Hessian of the quadratic cost, `2R`.
pub fn hessian(model: &CorrelationModel) -> Matrix {
    model.r.scaled(2.0)
}

/// `R⁻¹p` via a pivoted linear solve.
pub fn wiener_solve(model: &CorrelationModel) -> Result<Vec<f64>> {
    model.r.solve(&model.p)
}

/// One Newton update `w − H⁻¹∇J(w)`. For this cost it lands on the Wiener
/// solution from any start.
pub fn newton_step(model: &CorrelationModel, w: &[f64]) -> Result<Vec<f64>> {
    let g = gradient(model, w)?;
    let step = hessian(model).solve(&g)?;
    Ok(w.iter().zip(&step).map(|(wi, si)| wi - si).collect())
}

/// Steepest descent `w ← w + μ(p − Rw)` for `iterations` steps.
///
/// The trajectory has `iterations + 1` entries unless an iterate's norm passes
/// the divergence ceiling, in which case it ends at that iterate and is flagged.
pub fn sda_run(model: &CorrelationModel, w0: &[f64], mu: f64, iterations: usize) -> Result<Trajectory> {
    model.check_dim(w0)?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("step size mu must be > 0, got {mu}")));
    }
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let mut weights = Vec::with_capacity(iterations + 1);
    let mut costs = Vec::with_capacity(iterations + 1);
    let mut w = w0.to_vec();
    costs.push(cost(model, &w)?);
    weights.push(w.clone());
    let mut diverged = false;
    for _ in 0..iterations {
        let rw = model.r.mul_vec(&w);
        for i in 0..w.len() {
            w[i] += mu * (model.p[i] - rw[i]);
        }
        costs.push(cost(model, &w)?);
        weights.push(w.clone());
        if !(norm(&w) <= DIVERGENCE_CEILING) {
            diverged = true;
            break;
        }
    }
    Ok(Trajectory { weights, costs, diverged })
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// all-ones vector.
pub fn max_eigenvalue(r: &Matrix) -> Result<f64> {
    let n = r.dim();
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if n == 1 {
        return Ok(r[(0, 0)]);
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut estimate = f64::NAN;
    for _ in 0..POWER_ITER_CAP {
        let u = r.mul_vec(&v);
        let next = dot(&v, &u);
        let len = norm(&u);
        if len == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().zip(&u).for_each(|(vi, ui)| *vi = ui / len);
        if (next - estimate).abs() <= POWER_ITER_TOL * next.abs() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NoConvergence { iterations: POWER_ITER_CAP, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{fir_filter, generate_white_gaussian, FirSystem};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(r: &[Vec<f64>], p: &[f64], s: f64) -> CorrelationModel {
        CorrelationModel::new(Matrix::from_rows(r).unwrap(), p.to_vec(), s).unwrap()
    }

    fn ident_model() -> CorrelationModel {
        model(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 2.0], 5.0)
    }

    /// Random well-conditioned model: R = AᵀA/n + 0.1·I.
    fn random_model(rng: &mut ChaCha8Rng, n: usize) -> CorrelationModel {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                rows[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum::<f64>() / n as f64;
            }
            rows[i][i] += 0.1;
        }
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        CorrelationModel::new(Matrix::from_rows(&rows).unwrap(), p, rng.random_range(0.0..5.0)).unwrap()
    }

    fn cost_oracle(m: &CorrelationModel, w: &[f64]) -> f64 {
        let n = w.len();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += w[i] * m.r()[(i, j)] * w[j];
            }
        }
        let mut lin = 0.0;
        for i in 0..n {
            lin += w[i] * m.p()[i];
        }
        m.sigma_d2() - 2.0 * lin + quad
    }

    #[test]
    fn constant_signal_model() {
        let x = vec![1.0; 10_000];
        let d: Vec<f64> = (0..10_000).map(|i| (i % 7) as f64).collect();
        let m = estimate_correlation(&x, &d, 1).unwrap();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((m.r()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((m.p()[0] - mean).abs() < 1e-12);
    }

    #[test]
    fn white_noise_model_near_identity() {
        // E[x(n)²]=1, E[x(n)x(n-1)]=0, E[d(n)x(n-k)] = h_k.
        let x = generate_white_gaussian(200_000, 1).unwrap();
        let d = fir_filter(&FirSystem::new(vec![1.0, 2.0]).unwrap(), &x).unwrap();
        let m = estimate_correlation(&x, &d, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m.r()[(i, j)] - want).abs() < 0.02);
            }
        }
        assert!((m.p()[0] - 1.0).abs() < 0.02 && (m.p()[1] - 2.0).abs() < 0.02);
        let w = wiener_solve(&m).unwrap();
        assert!((w[0] - 1.0).abs() < 0.03 && (w[1] - 2.0).abs() < 0.03, "{w:?}");
    }

    #[test]
    fn estimate_matches_summation_oracle() {
        let x = [0.5, -1.0, 2.0, 0.25, 3.0];
        let d = [1.0, 0.0, -2.0, 4.0, 0.5];
        let m = estimate_correlation(&x, &d, 2).unwrap();
        let xp = |n: isize| if n < 0 { 0.0 } else { x[n as usize] };
        let mut r = [[0.0; 2]; 2];
        let mut p = [0.0; 2];
        let mut s = 0.0;
        for n in 0..5isize {
            for i in 0..2 {
                p[i] += d[n as usize] * xp(n - i as isize) / 5.0;
                for j in 0..2 {
                    r[i][j] += xp(n - i as isize) * xp(n - j as isize) / 5.0;
                }
            }
            s += d[n as usize] * d[n as usize] / 5.0;
        }
        for i in 0..2 {
            assert!((m.p()[i] - p[i]).abs() < 1e-15);
            for j in 0..2 {
                assert!((m.r()[(i, j)] - r[i][j]).abs() < 1e-15);
            }
        }
        assert!((m.sigma_d2() - s).abs() < 1e-15);
    }

    #[test]
    fn estimate_rejects_bad_shapes() {
        assert!(estimate_correlation(&[1.0, 2.0], &[1.0], 1).is_err());
        assert!(estimate_correlation(&[1.0], &[1.0], 2).is_err());
        assert!(estimate_correlation(&[1.0], &[1.0], 0).is_err());
    }

    #[test]
    fn model_rejects_asymmetric_and_negative_variance() {
        let r = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(CorrelationModel::new(r, vec![0.0, 0.0], 1.0).is_err());
        assert!(CorrelationModel::new(Matrix::identity(2), vec![0.0, 0.0], -1.0).is_err());
        assert!(CorrelationModel::new(Matrix::identity(2), vec![0.0], 1.0).is_err());
        let not_psd = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(CorrelationModel::new(not_psd, vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn cost_hand_values() {
        let zero = model(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0], 1.0);
        assert_eq!(cost(&zero, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cost(&ident_model(), &[1.0, 2.0]).unwrap(), 0.0);
        assert!(cost(&ident_model(), &[1.0]).is_err());
    }

    #[test]
    fn cost_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.random_range(1..6);
            let m = random_model(&mut rng, n);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let got = cost(&m, &w).unwrap();
            let want = cost_oracle(&m, &w);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn gradient_hand_value_and_optimum() {
        assert_eq!(gradient(&ident_model(), &[0.0, 0.0]).unwrap(), vec![-2.0, -4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_model(&mut rng, 4);
        let w = wiener_solve(&m).unwrap();
        let g = gradient(&m, &w).unwrap();
        assert!(norm(&g) <= 1e-9 * norm(m.p()).max(1.0));
        assert!(gradient(&m, &[0.0]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-5;
        for _ in 0..100 {
            let n = rng.random_range(1..5);
            let m = random_model(&mut rng, n);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = gradient(&m, &w).unwrap();
            let fd: Vec<f64> = (0..n)
                .map(|i| {
                    let mut a = w.clone();
                    let mut b = w.clone();
                    a[i] += h;
                    b[i] -= h;
                    (cost_oracle(&m, &a) - cost_oracle(&m, &b)) / (2.0 * h)
                })
                .collect();
            let err: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
            assert!(norm(&err) <= 1e-6 * norm(&g).max(1.0), "{g:?} vs {fd:?}");
        }
    }

    #[test]
    fn hessian_is_twice_r() {
        let h = hessian(&ident_model());
        assert_eq!(h, Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_model(&mut rng, 4);
        let h = hessian(&m);
        assert_eq!(h, h.transpose());
        // second differences of the cost
        let step = 1e-3;
        let w0 = vec![0.3, -0.2, 0.1, 0.7];
        for i in 0..4 {
            for j in 0..4 {
                let at = |di: f64, dj: f64| {
                    let mut w = w0.clone();
                    w[i] += di;
                    w[j] += dj;
                    cost_oracle(&m, &w)
                };
                let fd = (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step))
                    / (4.0 * step * step);
                assert!((fd - h[(i, j)]).abs() <= 1e-5 * h[(i, j)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn wiener_hand_values() {
        assert_eq!(wiener_solve(&ident_model()).unwrap(), vec![1.0, 2.0]);
        let diag = model(&[vec![2.0, 0.0], vec![0.0, 4.0]], &[2.0, 4.0], 1.0);
        assert_eq!(wiener_solve(&diag).unwrap(), vec![1.0, 1.0]);
        let singular = model(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0], 1.0);
        assert!(matches!(wiener_solve(&singular), Err(Error::SingularMatrix { pivot: 1, .. })));
    }

    #[test]
    fn newton_one_step() {
        let m = ident_model();
        assert_eq!(newton_step(&m, &[10.0, -10.0]).unwrap(), vec![1.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let n = rng.random_range(2..6);
            let m = random_model(&mut rng, n);
            let opt = wiener_solve(&m).unwrap();
            assert!(norm(&sub(&newton_step(&m, &opt).unwrap(), &opt)) <= 1e-9);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            assert!(norm(&sub(&newton_step(&m, &w).unwrap(), &opt)) <= 1e-9);
        }
    }

    fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    #[test]
    fn sda_fixed_point_and_contraction() {
        let m = ident_model();
        let t = sda_run(&m, &[1.0, 2.0], 0.3, 20).unwrap();
        assert!(t.weights.iter().all(|w| norm(&sub(w, &[1.0, 2.0])) <= 1e-9));
        assert_eq!(t.weights.len(), 21);
        assert_eq!(t.costs.len(), 21);

        // error contracts by |1 - 0.5| per step
        let t = sda_run(&m, &[0.0, 0.0], 0.5, 100).unwrap();
        assert!(!t.diverged);
        assert!(norm(&sub(t.last(), &[1.0, 2.0])) <= 1e-9);
    }

    #[test]
    fn sda_diverges_past_boundary() {
        let t = sda_run(&ident_model(), &[0.0, 0.0], 2.5, 1000).unwrap();
        assert!(t.diverged);
        assert!(t.weights.len() < 1001);
        assert_eq!(t.weights.len(), t.costs.len());
        assert!(sda_run(&ident_model(), &[0.0, 0.0], 0.0, 10).is_err());
        assert!(sda_run(&ident_model(), &[0.0, 0.0], -1.0, 10).is_err());
    }

    #[test]
    fn sda_dichotomy_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = random_model(&mut rng, 3);
            let lmax = max_eigenvalue(m.r()).unwrap();
            let good = sda_run(&m, &[0.0; 3], 1.9 / lmax, 10_000).unwrap();
            assert!(norm(&gradient(&m, good.last()).unwrap()) < 1e-6);
            let bad = sda_run(&m, &[0.0; 3], 2.1 / lmax, 10_000).unwrap();
            assert!(bad.diverged);
        }
    }

    #[test]
    fn eigen_simple_cases() {
        assert!((max_eigenvalue(&Matrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        let d = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert!((max_eigenvalue(&d).unwrap() - 4.0).abs() < 1e-8);
        assert_eq!(max_eigenvalue(&Matrix::zeros(3)).unwrap(), 0.0);
        let one = Matrix::from_rows(&[vec![3.5]]).unwrap();
        assert_eq!(max_eigenvalue(&one).unwrap(), 3.5);
    }

    // det(R - λI) for 3x3, and its largest root by bisection on [0, trace].
    fn char_poly(r: &Matrix, l: f64) -> f64 {
        let a = |i, j| r[(i, j)] - if i == j { l } else { 0.0 };
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    }

    fn largest_root(r: &Matrix) -> f64 {
        // scan down from the trace for the first sign change, then bisect
        let tr = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
        let steps = 20_000;
        let mut hi = tr + 1e-9;
        let mut lo = hi;
        for k in 1..=steps {
            lo = tr * (1.0 - k as f64 / steps as f64);
            if char_poly(r, lo).signum() != char_poly(r, hi).signum() {
                break;
            }
            hi = lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if char_poly(r, mid).signum() == char_poly(r, hi).signum() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn eigen_matches_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let m = random_model(&mut rng, 3);
            let got = max_eigenvalue(m.r()).unwrap();
            let want = largest_root(m.r());
            assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wiener_is_minimum(seed in 0u64..10_000, n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_model(&mut rng, n);
            let opt = wiener_solve(&m).unwrap();
            let j_opt = cost(&m, &opt).unwrap();
            let alt = m.sigma_d2() - dot(m.p(), &opt);
            prop_assert!((j_opt - alt).abs() <= 1e-12 * j_opt.abs().max(alt.abs()).max(1.0));
            for _ in 0..100 {
                let mut delta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let len = norm(&delta);
                if len > 1.0 {
                    delta.iter_mut().for_each(|v| *v /= len);
                }
                let w: Vec<f64> = opt.iter().zip(&delta).map(|(a, b)| a + b).collect();
                prop_assert!(cost(&m, &w).unwrap() >= j_opt - 1e-12);
            }
        }

        #[test]
        fn estimated_r_is_psd(seed in 0u64..10_000, taps in 1usize..5) {
            let x = generate_white_gaussian(64, seed).unwrap();
            let d = generate_white_gaussian(64, seed + 1).unwrap();
            let m = estimate_correlation(&x, &d, taps).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let v: Vec<f64> = (0..taps).map(|_| rng.random_range(-1.0..1.0)).collect();
                prop_assert!(dot(&v, &m.r().mul_vec(&v)) >= -1e-9 * dot(&v, &v));
            }
            for i in 0..taps {
                for j in 0..taps {
                    prop_assert_eq!(m.r()[(i, j)], m.r()[(j, i)]);
                }
            }
        }
    }
}
