//! Modified Bessel functions of the second kind and the radial Matérn profile.
//!
//! The Sobolev kernels used throughout the crate are radial functions of the form
//! `c * g_nu(r)` with `g_nu(r) = r^nu K_nu(r)`. Laplacians of such kernels reduce to
//! finite sums of terms `r^(2p) g_mu(r)` with lower indices `mu`, using
//! `d/dr g_nu(r) = -r g_(nu-1)(r)`. This module evaluates those sums without dividing by `r`,
//! so that kernel diagonals are available at `r = 0`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this radius `g_nu` is evaluated from its ascending series.
pub const SERIES_SWITCH: f64 = 1e-3;

/// `K_0` and `K_1` are computed from ascending series up to this argument and from
/// Steed's continued fraction above it.
const SMALL_ARG: f64 = 2.0;

/// Modified Bessel function of the second kind `K_nu(r)` for integer order.
pub fn bessel_k(nu: u32, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires r > 0, got {r}")));
    }
    let (k0, k1) = bessel_k01(r);
    Ok(upward(nu, r, k0, k1))
}

fn upward(nu: u32, r: f64, k0: f64, k1: f64) -> f64 {
    match nu {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for n in 1..nu {
                let next = prev + 2.0 * f64::from(n) / r * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `(K_0(r), K_1(r))` for `r > 0`.
fn bessel_k01(r: f64) -> (f64, f64) {
    if r <= SMALL_ARG {
        k01_series(r)
    } else {
        k01_steed(r)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I_0, I_1 and the harmonic-number sums of the ascending expansions.
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    // term_k = q^k / (k!)^2 ; term1_k = q^k / (k! (k+1)!)
    let mut term = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut k = 0u32;
    loop {
        let term1 = term / f64::from(k + 1);
        i0 += term;
        i1 += term1;
        s0 += term * harmonic;
        let harmonic_next = harmonic + 1.0 / f64::from(k + 1);
        // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_(k+1)
        s1 += term1 * (harmonic + harmonic_next - 2.0 * EULER_GAMMA);
        if term < 1e-18 * i0 && k > 2 {
            break;
        }
        k += 1;
        term *= q / f64::from(k * k);
        harmonic = harmonic_next;
    }
    i1 *= 0.5 * x;
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction for `K_0`, `K_1` (Temme's normalisation), accurate for `x >= 2`.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = f64::from(i);
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// `Gamma(n)` for positive integers.
pub fn gamma_int(n: u32) -> f64 {
    assert!(n >= 1, "gamma_int needs n >= 1");
    factorial(n - 1)
}

/// Limit of `g_nu(r) = r^nu K_nu(r)` at `r = 0`: `2^(nu-1) Gamma(nu)`, infinite for `nu = 0`.
pub fn matern_g_at_zero(nu: u32) -> f64 {
    if nu == 0 {
        f64::INFINITY
    } else {
        2f64.powi(nu as i32 - 1) * gamma_int(nu)
    }
}

/// Ascending series of `x^n K_n(x)` for integer `n` and small `x > 0`.
fn matern_g_series(n: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    // 2^(n-1) sum_{k<n} (n-k-1)!/k! (-q)^k
    let mut finite = 0.0;
    if n > 0 {
        let mut pow = 1.0;
        for k in 0..n {
            finite += factorial(n - k - 1) / factorial(k) * pow;
            pow *= -q;
        }
        finite *= 2f64.powi(n as i32 - 1);
    }
    // x^n (x/2)^n / n! times sums of I_n and of the digamma terms
    let lead = x.powi(n as i32) * (0.5 * x).powi(n as i32) / factorial(n);
    let log_half = (0.5 * x).ln();
    let mut i_sum = 0.0;
    let mut psi_sum = 0.0;
    let mut term = 1.0; // q^k n! / (k! (n+k)!)
    let mut psi_a = -EULER_GAMMA; // psi(k+1)
    let mut psi_b = -EULER_GAMMA + (1..=n).map(|j| 1.0 / f64::from(j)).sum::<f64>(); // psi(n+k+1)
    let mut k = 0u32;
    loop {
        i_sum += term;
        psi_sum += term * (psi_a + psi_b);
        k += 1;
        term *= q / (f64::from(k) * f64::from(n + k));
        psi_a += 1.0 / f64::from(k);
        psi_b += 1.0 / f64::from(n + k);
        if term < 1e-18 || k > 60 {
            break;
        }
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // (-1)^(n+1) ln(x/2) x^n I_n(x) + (-1)^n 1/2 x^n (x/2)^n sum
    finite - sign * log_half * lead * i_sum + sign * 0.5 * lead * psi_sum
}

/// Radial Matérn profile `g_nu(r) = r^nu K_nu(r)`, continuous at `r = 0`.
pub fn matern_g(nu: u32, r: f64) -> f64 {
    assert!(r >= 0.0, "matern_g requires r >= 0");
    if r == 0.0 {
        matern_g_at_zero(nu)
    } else if r < SERIES_SWITCH {
        matern_g_series(nu, r)
    } else {
        let (k0, k1) = bessel_k01(r);
        r.powi(nu as i32) * upward(nu, r, k0, k1)
    }
}

/// One term `coeff * r^(2 * r2_power) * g_index(r)` of a radial Laplacian expansion.
/// Negative indices stand for `g_(-k)(r) = r^(-2k) g_k(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileTerm {
    pub coeff: f64,
    pub r2_power: u32,
    pub index: i32,
}

impl ProfileTerm {
    fn eval(&self, r: f64) -> f64 {
        // fold negative indices into the power of r^2
        let (power, index) = if self.index < 0 {
            (self.r2_power as i32 + self.index, self.index.unsigned_abs())
        } else {
            (self.r2_power as i32, self.index as u32)
        };
        if r == 0.0 {
            return match power {
                p if p > 0 => 0.0,
                0 if index == 0 => f64::INFINITY * self.coeff.signum(),
                0 => self.coeff * matern_g_at_zero(index),
                _ => f64::INFINITY * self.coeff.signum(),
            };
        }
        self.coeff * (r * r).powi(power) * matern_g(index, r)
    }
}

/// `nu`, dimension and the number of Laplacians folded into one radial expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub nu: u32,
    pub dim: u32,
    pub laplacians: u32,
    pub terms: Vec<ProfileTerm>,
}

impl RadialProfile {
    /// Expansion of `Delta^laplacians g_nu` in `dim` dimensions.
    ///
    /// Fails with [`Error::OrderTooLow`] unless `nu - laplacians >= 1`, which is exactly the
    /// condition for the result to be finite at `r = 0`.
    pub fn new(nu: u32, dim: u32, laplacians: u32) -> Result<Self> {
        if nu < laplacians + 1 {
            return Err(Error::OrderTooLow { nu, laplacians });
        }
        let mut terms = vec![ProfileTerm { coeff: 1.0, r2_power: 0, index: nu as i32 }];
        for _ in 0..laplacians {
            terms = apply_laplacian(&terms, dim);
        }
        Ok(Self { nu, dim, laplacians, terms })
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }
}

// Delta(r^(2p) g_mu) = -(d + 4p) r^(2p) g_(mu-1) + r^(2p+2) g_(mu-2) + 2p(2p+d-2) r^(2p-2) g_mu
fn apply_laplacian(terms: &[ProfileTerm], dim: u32) -> Vec<ProfileTerm> {
    let d = f64::from(dim);
    let mut out: Vec<ProfileTerm> = Vec::new();
    let mut push = |coeff: f64, r2_power: u32, index: i32| {
        if coeff == 0.0 {
            return;
        }
        match out.iter_mut().find(|t| t.r2_power == r2_power && t.index == index) {
            Some(t) => t.coeff += coeff,
            None => out.push(ProfileTerm { coeff, r2_power, index }),
        }
    };
    for t in terms {
        let p = f64::from(t.r2_power);
        push(-(d + 4.0 * p) * t.coeff, t.r2_power, t.index - 1);
        push(t.coeff, t.r2_power + 1, t.index - 2);
        if t.r2_power > 0 {
            push(2.0 * p * (2.0 * p + d - 2.0) * t.coeff, t.r2_power - 1, t.index);
        }
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// `Delta^total_laplacians [g_nu(|.|)]` evaluated at radius `r` in `dim` dimensions.
pub fn matern_laplacian_profile(nu: u32, dim: u32, total_laplacians: u32, r: f64) -> Result<f64> {
    Ok(RadialProfile::new(nu, dim, total_laplacians)?.eval(r))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // reference values from a 40-digit mpmath evaluation
    const K_REFERENCE: &[(u32, f64, f64)] = &[
        (0, 1.0, 0.421_024_438_240_708_33),
        (1, 1.0, 0.601_907_230_197_234_57),
        (2, 1.0, 1.624_838_898_635_177_5),
        (0, 5.0, 0.003_691_098_334_042_594_3),
        (1, 5.0, 0.004_044_613_445_452_164_2),
        (0, 2.0, 0.113_893_872_749_533_44),
        (1, 2.0, 0.139_865_881_816_522_43),
        (0, 0.1, 2.427_069_024_702_016_6),
        (1, 0.1, 9.853_844_780_870_605_6),
        (0, 1e-6, 13.931_442_073_626_419),
        (1, 1e-6, 999_999.999_992_784_3),
        (0, 30.0, 2.132_477_496_463_056_4e-14),
        (1, 30.0, 2.167_732_001_891_549_4e-14),
        (0, 12.5, 1.308_403_696_776_977_4e-6),
        (5, 0.3, 157_139.123_371_216_71),
        (6, 2.5, 11.632_742_520_769_015),
        (3, 20.0, 7.148_966_692_015_483_8e-10),
    ];

    #[test]
    fn bessel_k_matches_reference() {
        for &(nu, r, want) in K_REFERENCE {
            let got = bessel_k(nu, r).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_k_rejects_nonpositive_argument() {
        assert!(matches!(bessel_k(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(1, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn series_and_fraction_agree_at_the_seam() {
        let (a0, a1) = k01_series(SMALL_ARG);
        let (b0, b1) = k01_steed(SMALL_ARG);
        assert_relative_eq!(a0, b0, max_relative = 1e-13);
        assert_relative_eq!(a1, b1, max_relative = 1e-13);
    }

    #[test]
    fn recurrence_consistency() {
        for nu in 1..9 {
            for i in 0..=99 {
                let r = 0.1 + 9.9 * f64::from(i) / 99.0;
                let lhs = bessel_k(nu + 1, r).unwrap();
                let rhs = bessel_k(nu - 1, r).unwrap() + 2.0 * f64::from(nu) / r * bessel_k(nu, r).unwrap();
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs(), "nu={nu} r={r}");
            }
        }
    }

    #[test]
    fn matern_g_limits() {
        assert_eq!(matern_g(2, 0.0), 2.0);
        assert_eq!(matern_g(6, 0.0), 3840.0);
        assert_relative_eq!(matern_g(2, 1.0), 1.624_838_898_635_177_5, max_relative = 1e-12);
        for nu in 1..9 {
            let limit = matern_g_at_zero(nu);
            for r in [1e-8f64, 1e-6, 1e-4] {
                // for nu = 1 the leading correction is r^2 log r, about 5e-8 at r = 1e-4
                let tol = if nu == 1 { r * r * (1.0 - r.ln()) } else { 1e-8 };
                assert_relative_eq!(matern_g(nu, r), limit, max_relative = tol);
            }
        }
    }

    #[test]
    fn series_branch_meets_direct_branch() {
        for nu in 0..10 {
            let r = SERIES_SWITCH;
            let series = matern_g_series(nu, r);
            let direct = r.powi(nu as i32) * bessel_k(nu, r).unwrap();
            assert_relative_eq!(series, direct, max_relative = 1e-10);
        }
    }

    #[test]
    fn base_profile_positive_and_decreasing() {
        for nu in 1..8 {
            let mut prev = matern_g(nu, 0.0);
            for i in 1..400 {
                let r = f64::from(i) * 0.05;
                let v = matern_g(nu, r);
                assert!(v > 0.0 && v < prev, "nu={nu} r={r}");
                prev = v;
            }
        }
    }

    #[test]
    fn single_laplacian_matches_closed_form() {
        let r = 0.7;
        let want = -2.0 * matern_g(5, r) + 0.49 * matern_g(4, r);
        let got = matern_laplacian_profile(6, 2, 1, r).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-14);
        // mpmath value of the 2-D Laplacian of g_6(|x|) at |x| = 0.7
        assert_relative_eq!(got, -722.362_745_252_954_56, max_relative = 1e-12);
    }

    #[test]
    fn double_laplacian_expansion() {
        let p = RadialProfile::new(6, 2, 2).unwrap();
        let r = 0.7;
        let want = 8.0 * matern_g(4, r) - 8.0 * r * r * matern_g(3, r) + r.powi(4) * matern_g(2, r);
        assert_relative_eq!(p.eval(r), want, max_relative = 1e-13);
        assert_relative_eq!(p.eval(r), 339.670_325_650_469_22, max_relative = 1e-12);
    }

    #[test]
    fn zero_laplacians_is_base_profile() {
        assert_eq!(matern_laplacian_profile(2, 2, 0, 0.5).unwrap(), matern_g(2, 0.5));
    }

    #[test]
    fn profiles_finite_at_origin_when_admissible() {
        // nu = 3 carries two Laplacians: 8 g_1(0) = 8
        assert_relative_eq!(matern_laplacian_profile(3, 2, 2, 0.0).unwrap(), 8.0);
        assert_relative_eq!(matern_laplacian_profile(2, 2, 1, 0.0).unwrap(), -2.0);
        assert!(matches!(RadialProfile::new(2, 2, 2), Err(Error::OrderTooLow { nu: 2, laplacians: 2 })));
        assert!(matches!(RadialProfile::new(0, 2, 0), Err(Error::OrderTooLow { .. })));
    }

    #[test]
    fn profiles_continuous_at_origin() {
        for nu in 3..8 {
            for lap in 0..3 {
                let p = RadialProfile::new(nu, 2, lap).unwrap();
                let at0 = p.eval(0.0);
                let near = p.eval(1e-7);
                assert_relative_eq!(at0, near, max_relative = 1e-6);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn recurrence_holds_at_random_points(nu in 1u32..10, r in 0.1f64..10.0) {
            let lhs = bessel_k(nu + 1, r).unwrap();
            let rhs = bessel_k(nu - 1, r).unwrap() + 2.0 * f64::from(nu) / r * bessel_k(nu, r).unwrap();
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs());
        }

        #[test]
        fn base_profile_is_positive_and_decreasing(nu in 1u32..10, r in 0.0f64..30.0, dr in 1e-3f64..1.0) {
            let a = matern_g(nu, r);
            let b = matern_g(nu, r + dr);
            proptest::prop_assert!(a > 0.0 && b > 0.0);
            proptest::prop_assert!(b < a);
        }
    }
}
