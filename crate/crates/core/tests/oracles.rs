//! Independent oracles for the normal distribution and the recovery curve.
//!
//! Nothing here calls into the library's special functions: Φ comes from the
//! positive-term series of erf (|x| small) or a Lentz continued fraction for erfc
//! (|x| large), and the recovery curve from adaptive Simpson quadrature of
//! the lognormal expectation `E[V/F · 1{V < F}] / P(V < F)`.

use structural_recovery::model::{expected_loss, structural_rr, CompoundB};
use structural_recovery::numerics::{log_norm_cdf, norm_cdf, norm_cdf_inv};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

// erf(x) = 2x/√π · e^{-x²} · Σ (2x²)^n / (1·3·…·(2n+1)), all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..500 {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

// erfc(x) = exp(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), x > 0.
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..20_000 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

fn phi_oracle(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    if z.abs() < 2.0 {
        0.5 * (1.0 + erf_series(z))
    } else if z > 0.0 {
        1.0 - 0.5 * erfc_cf(z)
    } else {
        0.5 * erfc_cf(-z)
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `(PD, RR)` of `X = ln(V/F) ~ N(m, b²)` by quadrature over `x < 0`.
fn quadrature_pd_rr(m: f64, b: f64) -> (f64, f64) {
    let density = |x: f64| {
        let z = (x - m) / b;
        (-0.5 * z * z).exp() / (b * (2.0 * std::f64::consts::PI).sqrt())
    };
    let lo = m - 40.0 * b;
    let n = 200_000;
    let pd = simpson(&density, lo, 0.0, n);
    let mass = simpson(&|x: f64| x.exp() * density(x), lo, 0.0, n);
    (pd, mass / pd)
}

#[test]
fn phi_oracle_is_self_consistent() {
    for i in -60..=60 {
        let x = i as f64 * 0.1;
        assert!((phi_oracle(x) + phi_oracle(-x) - 1.0).abs() < 1e-15);
    }
    // Both oracle branches agree where they overlap.
    for &z in &[2.0f64, 2.5, 3.0] {
        let a = 1.0 - erf_series(z);
        let b = erfc_cf(z);
        assert!(((a - b) / b).abs() < 1e-11, "{a} {b}");
    }
}

#[test]
fn norm_cdf_matches_series_oracle() {
    for i in -370..=80 {
        let x = i as f64 * 0.1;
        let (got, want) = (norm_cdf(x), phi_oracle(x));
        assert!((got - want).abs() <= 1e-14, "x={x}");
        assert!(((got - want) / want).abs() <= 1e-12, "x={x} got={got} want={want}");
    }
    assert!((norm_cdf(1.96) - phi_oracle(1.96)).abs() < 1e-15);
    assert!((phi_oracle(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
    assert!((phi_oracle(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-16);
}

#[test]
fn log_norm_cdf_matches_oracle_in_the_tail() {
    for i in 8..=37 {
        let x = -(i as f64);
        let want = phi_oracle(x);
        let got = log_norm_cdf(x).exp();
        assert!(((got - want) / want).abs() <= 1e-10, "x={x}");
    }
    assert!((log_norm_cdf(-10.0) - phi_oracle(-10.0).ln()).abs() < 1e-9);
}

#[test]
fn quantile_matches_bisection_on_oracle() {
    let bisect = |p: f64| {
        let (mut lo, mut hi) = (-40.0f64, 40.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi_oracle(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    for &p in &[1e-10, 1e-4, 0.025, 0.1, 0.3, 0.5, 0.7, 0.975_002_104_851_779_6] {
        let want = bisect(p);
        let got = norm_cdf_inv(p).unwrap();
        assert!((got - want).abs() < 1e-9, "p={p}: {got} vs {want}");
    }
    assert!((norm_cdf_inv(1e-10).unwrap() - (-6.361_340_902_404_056)).abs() < 1e-9);
    assert!((norm_cdf_inv(0.975_002_104_851_779_6).unwrap() - 1.96).abs() < 1e-9);
}

#[test]
fn recovery_curve_matches_quadrature_of_the_expectation() {
    // PD = 1/2 puts the median of ln(V/F) at zero for any B.
    let (pd, rr) = quadrature_pd_rr(0.0, 1.0);
    assert!((pd - 0.5).abs() < 1e-12);
    let b1 = CompoundB::new(1.0).unwrap();
    assert!((structural_rr(0.5, b1).unwrap() - rr).abs() < 1e-10, "{rr}");
    assert!((expected_loss(0.5, b1).unwrap() - 0.5 * (1.0 - rr)).abs() < 1e-10);
    // Closed form 2·e^{1/2}·Φ(-1) from the series oracle.
    let closed = 2.0 * 0.5f64.exp() * phi_oracle(-1.0);
    assert!((rr - closed).abs() < 1e-10);
    assert!((rr - 0.523_156_583_730_246_7).abs() < 1e-10);

    // PD = 0.1 with Φ⁻¹(0.1) taken from the oracle bisection.
    let z = {
        let (mut lo, mut hi) = (-5.0f64, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi_oracle(mid) < 0.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let b = 0.5;
    let (pd, rr) = quadrature_pd_rr(-b * z, b);
    assert!((pd - 0.1).abs() < 1e-12);
    let got = structural_rr(0.1, CompoundB::new(b).unwrap()).unwrap();
    assert!((got - rr).abs() < 1e-10, "{got} vs {rr}");
    assert!((rr - 0.804_588_406_919_794_6).abs() < 1e-10);

    // c = 0, B = 0.2 at PD = 1/2.
    let (_, rr) = quadrature_pd_rr(0.0, 0.2);
    assert!((rr - 0.858_479_616).abs() < 1e-9);
}

#[test]
fn quadrature_across_the_grid() {
    for &b in &[0.2, 0.6, 1.0, 1.4] {
        for &pd in &[0.01, 0.05, 0.2, 0.5, 0.8, 0.95, 0.99] {
            let m = -b * norm_cdf_inv(pd).unwrap();
            let (qpd, qrr) = quadrature_pd_rr(m, b);
            let got = structural_rr(qpd, CompoundB::new(b).unwrap()).unwrap();
            assert!((got - qrr).abs() < 1e-9, "pd={pd} b={b}: {got} vs {qrr}");
        }
    }
}
