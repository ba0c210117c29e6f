//! Test-only reference evaluations, written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Turbulent-boundary-layer trailing-edge noise of one airfoil section,
/// straight from the Brooks, Pope & Marcolini (1989) correlations for an
/// untripped boundary layer. Returns the total ⅓-octave level in dB at
/// band centre `f`, for an observer at distance `re` with emission angles
/// `theta_e`, `phi_e` (rad), without convective amplification.
pub struct BpmCase {
    pub chord: f64,
    pub span: f64,
    pub u: f64,
    pub alpha_deg: f64,
    pub c0: f64,
    pub nu: f64,
}

fn log(x: f64) -> f64 {
    x.log10()
}

/// (δ*_p, δ*_s) in m.
pub fn disp_thickness(case: &BpmCase) -> (f64, f64) {
    let rc = case.u * case.chord / case.nu;
    let l = log(rc);
    let d0 = case.chord * 10f64.powf(3.0187 - 1.5397 * l + 0.1059 * l * l);
    let a = case.alpha_deg.abs();
    let dp = d0 * 10f64.powf(-0.0432 * a + 0.00113 * a * a);
    let ds = d0
        * if a <= 7.5 {
            10f64.powf(0.0679 * a)
        } else if a <= 12.5 {
            0.0162 * 10f64.powf(0.3066 * a)
        } else {
            52.42 * 10f64.powf(0.0258 * a)
        };
    (dp, ds)
}

fn amin(a: f64) -> f64 {
    match a {
        a if a < 0.204 => (67.552 - 886.788 * a * a).sqrt() - 8.219,
        a if a <= 0.244 => -32.665 * a + 3.981,
        a => -142.795 * a * a * a + 103.656 * a * a - 57.757 * a + 6.006,
    }
}

fn amax(a: f64) -> f64 {
    match a {
        a if a < 0.13 => (67.552 - 886.788 * a * a).sqrt() - 8.219,
        a if a <= 0.321 => -15.901 * a + 1.098,
        a => -4.669 * a * a * a + 3.491 * a * a - 16.699 * a + 1.149,
    }
}

fn bmin(b: f64) -> f64 {
    match b {
        b if b < 0.13 => (16.888 - 886.788 * b * b).sqrt() - 4.109,
        b if b <= 0.145 => -83.607 * b + 8.138,
        b => -817.81 * b * b * b + 355.21 * b * b - 135.024 * b + 10.619,
    }
}

fn bmax(b: f64) -> f64 {
    match b {
        b if b < 0.10 => (16.888 - 886.788 * b * b).sqrt() - 4.109,
        b if b <= 0.187 => -31.33 * b + 1.854,
        b => -80.541 * b * b * b + 44.174 * b * b - 39.381 * b + 2.344,
    }
}

fn a_shape(st_over_peak: f64, rc: f64) -> f64 {
    let a = log(st_over_peak).abs();
    let a0 = if rc < 9.52e4 {
        0.57
    } else if rc < 8.57e5 {
        -9.57e-13 * (rc - 8.57e5).powi(2) + 1.13
    } else {
        1.13
    };
    let ar = (-20.0 - amin(a0)) / (amax(a0) - amin(a0));
    amin(a) + ar * (amax(a) - amin(a))
}

fn b_shape(st_over_peak: f64, rc: f64) -> f64 {
    let b = log(st_over_peak).abs();
    let b0 = if rc < 9.52e4 {
        0.30
    } else if rc < 8.57e5 {
        -4.48e-13 * (rc - 8.57e5).powi(2) + 0.56
    } else {
        0.56
    };
    let br = (-20.0 - bmin(b0)) / (bmax(b0) - bmin(b0));
    bmin(b) + br * (bmax(b) - bmin(b))
}

/// Band level at `f` for the given directivity factor D̄h and distance.
pub fn tbl_te_level(case: &BpmCase, f: f64, dh: f64, re: f64) -> f64 {
    let a = case.alpha_deg.abs();
    let m = case.u / case.c0;
    let rc = case.u * case.chord / case.nu;
    let (dp, ds) = disp_thickness(case);
    let st1 = 0.02 * m.powf(-0.6);
    let st2 = st1
        * if a < 1.33 {
            1.0
        } else if a <= 12.5 {
            10f64.powf(0.0054 * (a - 1.33).powi(2))
        } else {
            4.72
        };
    let st1m = (st1 + st2) / 2.0;
    let k1 = if rc < 2.47e5 {
        -4.31 * log(rc) + 156.3
    } else if rc < 8.0e5 {
        -9.0 * log(rc) + 181.6
    } else {
        128.5
    };
    let rdp = case.u * dp / case.nu;
    let dk1 = if rdp <= 5000.0 { a * (1.43 * log(rdp) - 5.29) } else { 0.0 };
    let gamma = 27.094 * m + 3.31;
    let gamma0 = 23.43 * m + 4.651;
    let beta = 72.65 * m + 10.74;
    let beta0 = -34.19 * m - 13.82;
    let k2 = k1
        + if a < gamma0 - gamma {
            -1000.0
        } else if a <= gamma0 + gamma {
            (beta * beta - (beta / gamma).powi(2) * (a - gamma0).powi(2)).sqrt() + beta0
        } else {
            -12.0
        };
    assert!(a <= gamma0.min(12.5), "oracle covers attached flow only");

    let stp = f * dp / case.u;
    let sts = f * ds / case.u;
    let common = |d: f64| 10.0 * log(d * m.powi(5) * case.span * dh / (re * re));
    let lp = common(dp) + a_shape(stp / st1, rc) + k1 - 3.0 + dk1;
    let ls = common(ds) + a_shape(sts / st1m, rc) + k1 - 3.0;
    let la = common(ds) + b_shape(sts / st2, rc) + k2;
    10.0 * log(10f64.powf(lp / 10.0) + 10f64.powf(ls / 10.0) + 10f64.powf(la / 10.0))
}

/// Exact base-2 third-octave centres used by the library.
pub fn bands() -> Vec<f64> {
    (-17..=13).map(|n| 1000.0 * 2f64.powf(n as f64 / 3.0)).collect()
}

pub fn energy_sum_db(levels: &[f64]) -> f64 {
    10.0 * log(levels.iter().map(|l| 10f64.powf(l / 10.0)).sum::<f64>())
}

/// Index of the loudest level.
pub fn argmax(levels: &[f64]) -> usize {
    let mut best = 0;
    for (i, l) in levels.iter().enumerate() {
        if *l > levels[best] {
            best = i;
        }
    }
    best
}

/// Air-side limit angle, deg.
pub fn limit_angle_deg(n: f64) -> f64 {
    (1.0 / n).asin() * 180.0 / PI
}

/// Incidence angle by dense scan and secant polishing, for cross-checks.
pub fn incidence_oracle(d: f64, beta: f64, h: f64, n: f64) -> f64 {
    let phi_lim = (1.0 / n).asin();
    let reach = |p: f64| {
        let pw = (n * p.sin()).asin();
        h * p.tan() + beta * h * pw.tan()
    };
    // reach is monotone; locate the bracket on a fine grid then bisect
    let steps = 100_000;
    let mut lo = 0.0;
    for i in 1..steps {
        let p = phi_lim * i as f64 / steps as f64;
        if reach(p) >= d {
            break;
        }
        lo = p;
    }
    let mut hi = (lo + phi_lim / steps as f64).min(phi_lim * (1.0 - 1e-15));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reach(mid) < d {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

/// Dense-grid peak of the named hearing filter form.
pub fn weighting(f: f64, f1: f64, f2: f64, a: f64, b: f64, c: f64) -> f64 {
    let r1 = f / f1;
    let r2 = f / f2;
    c + 10.0 * log(r1.powf(2.0 * a) / ((1.0 + r1 * r1).powf(a) * (1.0 + r2 * r2).powf(b)))
}
