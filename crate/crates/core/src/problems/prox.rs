//! Scalar and block proximal operators.

use crate::scalar::Real;

/// `sign(v)·max(|v| − threshold, 0)`
#[inline]
pub fn soft_threshold<T: Real>(v: T, threshold: T) -> T {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        T::zero()
    }
}

/// Prox of `threshold·|u| + (shrink/2)·u²`: `ST(v, threshold) / (1 + shrink)`.
#[inline]
pub fn elastic_net_prox<T: Real>(v: T, threshold: T, shrink: T) -> T {
    soft_threshold(v, threshold) / (T::one() + shrink)
}

/// Block soft-thresholding: `v·max(1 − threshold/‖v‖, 0)`.
pub fn prox_group<T: Real>(v: &[T], threshold: T) -> Vec<T> {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm <= threshold {
        return vec![T::zero(); v.len()];
    }
    let scale = T::one() - threshold / norm;
    v.iter().map(|&x| x * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-2.0, 1.0), -1.0);
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
    }

    #[test]
    fn group_prox_boundary_and_scaling() {
        assert_eq!(prox_group(&[3.0, 4.0], 5.0), vec![0.0, 0.0]);
        assert_eq!(prox_group(&[3.0, 4.0], 2.5), vec![1.5, 2.0]);
        assert_eq!(prox_group(&[0.0, 0.0], 0.0), vec![0.0, 0.0]);
    }

    #[test]
    fn elastic_net_prox_without_ridge_is_soft_threshold() {
        for v in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert_eq!(elastic_net_prox(v, 0.5, 0.0), soft_threshold(v, 0.5));
        }
    }

    proptest! {
        #[test]
        fn proxes_are_nonexpansive(a in -10.0f64..10.0, b in -10.0f64..10.0, t in 0.0f64..5.0, s in 0.0f64..3.0) {
            // one rounding of magnitude up to |a| + |b|
            let slack = 1e-15 * (a.abs() + b.abs() + t);
            prop_assert!((soft_threshold(a, t) - soft_threshold(b, t)).abs() <= (a - b).abs() + slack);
            prop_assert!((elastic_net_prox(a, t, s) - elastic_net_prox(b, t, s)).abs() <= (a - b).abs() + slack);
        }

        #[test]
        fn group_prox_matches_radial_oracle(v in proptest::collection::vec(-5.0f64..5.0, 1..6), t in 0.0f64..6.0) {
            // the prox only shrinks the norm: minimize t·r + ½(r − ‖v‖)² over r >= 0
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = (norm - t).max(0.0);
            let got = prox_group(&v, t);
            for (g, x) in got.iter().zip(&v) {
                let want = if norm > 0.0 { x * r / norm } else { 0.0 };
                prop_assert!((g - want).abs() < 1e-12);
            }
        }
    }
}
