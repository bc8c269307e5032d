use rustfft::num_complex::Complex;
use std::f64::consts::PI;

const MAX_ITER: usize = 500;

/// All complex roots of a real polynomial, coefficients in descending powers.
///
/// Aberth-Ehrlich simultaneous iteration. Leading zeros are ignored and
/// trailing zeros contribute roots at the origin.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let start = coeffs.iter().position(|&c| c != 0.0);
    let Some(start) = start else {
        return Vec::new();
    };
    let mut poly: Vec<f64> = coeffs[start..].to_vec();
    let mut roots = Vec::new();
    while poly.len() > 1 && *poly.last().unwrap() == 0.0 {
        poly.pop();
        roots.push(Complex::new(0.0, 0.0));
    }
    let degree = poly.len() - 1;
    if degree == 0 {
        return roots;
    }
    let lead = poly[0];
    let monic: Vec<Complex<f64>> = poly.iter().map(|&c| Complex::new(c / lead, 0.0)).collect();

    let radius = monic[degree].norm().powf(1.0 / degree as f64).max(1e-3);
    let mut z: Vec<Complex<f64>> = (0..degree)
        .map(|k| Complex::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..degree {
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<f64> = (0..degree)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Real coefficients: snap near-real roots to the real axis.
    for r in z.iter_mut() {
        if r.im.abs() < 1e-12 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    roots.extend(z);
    roots
}

fn horner(coeffs: &[Complex<f64>], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = coeffs[0];
    let mut dp = Complex::new(0.0, 0.0);
    for c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(roots: &[Complex<f64>]) -> Vec<f64> {
        let mut poly = vec![Complex::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            poly = next;
        }
        poly.iter().map(|c| c.re).collect()
    }

    fn assert_same_roots(found: &[Complex<f64>], expected: &[Complex<f64>], tol: f64) {
        assert_eq!(found.len(), expected.len());
        for e in expected {
            let best = found.iter().map(|f| (f - e).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < tol, "root {e} not found (closest {best})");
        }
    }

    #[test]
    fn quadratic() {
        let roots = polynomial_roots(&[1.0, -3.0, 2.0]);
        assert_same_roots(&roots, &[Complex::new(1.0, 0.0), Complex::new(2.0, 0.0)], 1e-12);
    }

    #[test]
    fn resonator_poles_recovered() {
        let mut poles = Vec::new();
        for (f, r) in [(700.0, 0.98), (1220.0, 0.97), (2600.0, 0.95), (3500.0, 0.9)] {
            let p = Complex::from_polar(r, 2.0 * PI * f / 16_000.0);
            poles.push(p);
            poles.push(p.conj());
        }
        poles.push(Complex::new(0.5, 0.0));
        let coeffs = expand(&poles);
        assert_same_roots(&polynomial_roots(&coeffs), &poles, 1e-8);
    }

    #[test]
    fn zero_roots_and_leading_zeros() {
        let roots = polynomial_roots(&[0.0, 2.0, -2.0, 0.0]);
        assert_same_roots(&roots, &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], 1e-12);
        assert!(polynomial_roots(&[0.0, 0.0]).is_empty());
    }
}
