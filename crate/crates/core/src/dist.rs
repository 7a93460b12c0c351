//! Special functions and the handful of distributions the region constructors need.
//!
//! Quantiles are obtained by inverting the regularized incomplete gamma and beta
//! functions with a bracketed Newton iteration, so they are accurate to a few ulps
//! of the probability scale rather than to the precision of a rational
//! approximation.

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 500;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::lit(2.0) * T::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma function P(a, x).
pub fn gamma_p<T: Scalar>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x < a + T::one() {
        gamma_series(a, x)
    } else {
        T::one() - gamma_cont_frac(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn gamma_q<T: Scalar>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    if x < a + T::one() {
        T::one() - gamma_series(a, x)
    } else {
        gamma_cont_frac(a, x)
    }
}

fn gamma_prefactor<T: Scalar>(a: T, x: T) -> T {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_series<T: Scalar>(a: T, x: T) -> T {
    let mut ap = a;
    let mut term = T::one() / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * T::iter_tol() {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_cont_frac<T: Scalar>(a: T, x: T) -> T {
    // modified Lentz on the continued fraction for Q(a, x)
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = T::from_usize_lossy(i);
        let an = -i * (i - a);
        b = b + T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < T::iter_tol() {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn beta_inc<T: Scalar>(a: T, b: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * beta_cont_frac(a, b, x) / a
    } else {
        T::one() - front * beta_cont_frac(b, a, T::one() - x) / b
    }
}

fn beta_cont_frac<T: Scalar>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = T::from_usize_lossy(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() < T::iter_tol() {
            break;
        }
    }
    h
}

/// Complementary error function.
pub fn erfc<T: Scalar>(x: T) -> T {
    let q = gamma_q(T::lit(0.5), x * x);
    if x >= T::zero() {
        q
    } else {
        T::lit(2.0) - q
    }
}

pub fn normal_cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * erfc(-x / T::SQRT_2())
}

pub fn normal_pdf<T: Scalar>(x: T) -> T {
    (-T::lit(0.5) * x * x).exp() / (T::lit(2.0) * T::PI()).sqrt()
}

/// Standard normal quantile.
pub fn normal_quantile<T: Scalar>(p: T) -> T {
    assert_probability(p);
    if p == T::lit(0.5) {
        return T::zero();
    }
    // solve on the smaller tail so the target keeps full relative precision
    let (tail, sign) = if p < T::lit(0.5) {
        (p, -T::one())
    } else {
        (T::one() - p, T::one())
    };
    let upper_tail = |z: T| T::lit(0.5) * erfc(z / T::SQRT_2());
    let guess = (-T::lit(2.0) * tail.ln()).sqrt();
    let z = invert_decreasing(upper_tail, normal_pdf, tail, T::zero(), guess + T::one());
    sign * z
}

pub fn student_t_pdf<T: Scalar>(t: T, df: T) -> T {
    student_t_ln_pdf(t, df).exp()
}

pub fn student_t_ln_pdf<T: Scalar>(t: T, df: T) -> T {
    let half = T::lit(0.5);
    ln_gamma((df + T::one()) * half)
        - ln_gamma(df * half)
        - half * (df * T::PI()).ln()
        - (df + T::one()) * half * (T::one() + t * t / df).ln()
}

/// P(T > t) for t >= 0.
fn student_t_upper_tail<T: Scalar>(t: T, df: T) -> T {
    let x = df / (df + t * t);
    T::lit(0.5) * beta_inc(df * T::lit(0.5), T::lit(0.5), x)
}

pub fn student_t_cdf<T: Scalar>(t: T, df: T) -> T {
    if t.is_infinite() {
        return if t > T::zero() { T::one() } else { T::zero() };
    }
    let tail = student_t_upper_tail(t.abs(), df);
    if t >= T::zero() {
        T::one() - tail
    } else {
        tail
    }
}

/// Student t quantile with `df > 0` degrees of freedom (non-integer allowed).
pub fn student_t_quantile<T: Scalar>(p: T, df: T) -> T {
    assert_probability(p);
    assert!(df > T::zero(), "degrees of freedom must be positive");
    if p == T::lit(0.5) {
        return T::zero();
    }
    let (tail, sign) = if p < T::lit(0.5) {
        (p, -T::one())
    } else {
        (T::one() - p, T::one())
    };
    let mut hi = normal_quantile(T::one() - tail).max(T::one());
    while student_t_upper_tail(hi, df) > tail {
        hi = hi * T::lit(2.0);
    }
    let t = invert_decreasing(
        |t| student_t_upper_tail(t, df),
        |t| student_t_pdf(t, df),
        tail,
        T::zero(),
        hi,
    );
    sign * t
}

pub fn chi_squared_cdf<T: Scalar>(x: T, k: T) -> T {
    gamma_p(k * T::lit(0.5), x * T::lit(0.5))
}

pub fn chi_squared_pdf<T: Scalar>(x: T, k: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let h = k * T::lit(0.5);
    ((h - T::one()) * x.ln() - x * T::lit(0.5) - h * T::LN_2() - ln_gamma(h)).exp()
}

/// Chi-squared quantile: the x with P(X <= x) = p for `k` degrees of freedom.
pub fn chi_squared_quantile<T: Scalar>(p: T, k: T) -> T {
    assert_probability(p);
    assert!(k > T::zero(), "degrees of freedom must be positive");
    let half = T::lit(0.5);
    let mut hi = k.max(T::one());
    while gamma_p(k * half, hi * half) < p {
        hi = hi * T::lit(2.0);
    }
    if p > half {
        // invert the upper tail for precision near p = 1
        invert_decreasing(
            |x| gamma_q(k * half, x * half),
            |x| chi_squared_pdf(x, k),
            T::one() - p,
            T::zero(),
            hi,
        )
    } else {
        invert_decreasing(
            |x| T::one() - gamma_p(k * half, x * half),
            |x| chi_squared_pdf(x, k),
            T::one() - p,
            T::zero(),
            hi,
        )
    }
}

fn assert_probability<T: Scalar>(p: T) {
    assert!(
        p > T::zero() && p < T::one(),
        "probability must lie in (0, 1), got {p}"
    );
}

/// Finds x in [lo, hi] with `f(x) = target` for a decreasing `f` whose negated
/// derivative is `density`. Newton steps are taken when they stay inside the
/// current bracket, bisection otherwise.
fn invert_decreasing<T, F, D>(f: F, density: D, target: T, mut lo: T, mut hi: T) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let half = T::lit(0.5);
    let mut x = (lo + hi) * half;
    for _ in 0..MAX_ITER {
        let fx = f(x);
        let err = fx - target;
        if err.abs() <= target * T::iter_tol() {
            return x;
        }
        if err > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = density(x);
        let newton = x + err / slope;
        x = if slope > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * half
        };
        if hi - lo <= T::epsilon() * hi.abs().max(T::min_positive_value()) {
            return x;
        }
    }
    x
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}
