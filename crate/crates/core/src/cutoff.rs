//! Smooth cutoff functions built from a fixed monotone template.
//!
//! The template `psi_template` is a smooth nondecreasing function equal to 0
//! on (-inf,-1] and 1 on [1,inf) whose shifted version `psi - 1/2` is odd.
//! `cutoff(a, b, t)` rescales it linearly so that the transition happens
//! between `a` (value 0) and `b` (value 1), with the transition interval
//! mapped onto [-3, 3] in template coordinates.

/// Smooth bump ingredient: e^{-1/s} for s > 0, identically 0 otherwise.
fn smooth_step_ingredient(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth monotone template on [-1, 1]: 0 below -1, 1 above 1, and
/// `psi_template(t) - 1/2` is odd.
pub fn psi_template(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let p = smooth_step_ingredient(1.0 + t);
        let q = smooth_step_ingredient(1.0 - t);
        p / (p + q)
    }
}

/// Cutoff transitioning from 0 near `a` to 1 near `b`.
///
/// The linear change of variables sends a -> -3 and b -> 3, so the function
/// is exactly 0 on a neighborhood of `a` and exactly 1 on a neighborhood of
/// `b` (the transition lives in the middle third of [a,b]). Satisfies
/// `cutoff(a,b,t) + cutoff(b,a,t) == 1`.
///
/// Panics if `a == b`.
pub fn cutoff(a: f64, b: f64, t: f64) -> f64 {
    assert!(a != b, "cutoff endpoints must differ");
    let l = -3.0 + 6.0 * (t - a) / (b - a);
    psi_template(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert_eq!(cutoff(0.0, 1.0, 0.0), 0.0);
        assert_eq!(cutoff(0.0, 1.0, 1.0), 1.0);
        assert_eq!(cutoff(0.0, 1.0, -5.0), 0.0);
        assert_eq!(cutoff(0.0, 1.0, 7.0), 1.0);
    }

    #[test]
    fn midpoint_is_half() {
        assert!((cutoff(0.0, 1.0, 0.5) - 0.5).abs() < 1e-15);
        assert!((cutoff(2.0, 6.0, 4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_of_unity() {
        for i in 0..200 {
            let t = -2.0 + 4.0 * (i as f64) / 199.0;
            let s = cutoff(0.0, 1.0, t) + cutoff(1.0, 0.0, t);
            assert!((s - 1.0).abs() < 1e-14, "t={t} sum={s}");
        }
    }

    #[test]
    fn monotone_and_flat_near_ends() {
        let mut prev = -1.0;
        for i in 0..=400 {
            let t = (i as f64) / 400.0;
            let v = cutoff(0.0, 1.0, t);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        // exactly flat in the outer thirds (template support is [-1,1] of [-3,3])
        assert_eq!(cutoff(0.0, 1.0, 0.15), 0.0);
        assert_eq!(cutoff(0.0, 1.0, 0.85), 1.0);
    }

    #[test]
    fn decreasing_orientation() {
        assert_eq!(cutoff(1.0, 0.0, 1.0), 0.0);
        assert_eq!(cutoff(1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    #[should_panic]
    fn equal_endpoints_rejected() {
        cutoff(1.0, 1.0, 0.0);
    }
}
