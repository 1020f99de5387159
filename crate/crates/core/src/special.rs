//! Special functions used by the closed-form averages: harmonic numbers,
//! digamma, Riemann zeta at integer arguments, and binomial coefficients.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this bound harmonic numbers are summed term by term.
pub const EXACT_HARMONIC_LIMIT: u64 = 1 << 20;

/// ζ(2) ..= ζ(64), correctly rounded.
const ZETA_TABLE: [f64; 63] = [
    1.6449340668482264,
    1.2020569031595942,
    1.0823232337111381,
    1.03692775514337,
    1.0173430619844492,
    1.008349277381923,
    1.0040773561979444,
    1.0020083928260821,
    1.000994575127818,
    1.0004941886041194,
    1.000246086553308,
    1.0001227133475785,
    1.0000612481350588,
    1.000030588236307,
    1.0000152822594086,
    1.0000076371976379,
    1.000003817293265,
    1.0000019082127165,
    1.0000009539620338,
    1.0000004769329869,
    1.0000002384505027,
    1.000000119219926,
    1.000000059608189,
    1.0000000298035034,
    1.0000000149015549,
    1.0000000074507118,
    1.000000003725334,
    1.0000000018626598,
    1.0000000009313275,
    1.0000000004656628,
    1.000000000232831,
    1.0000000001164155,
    1.0000000000582077,
    1.0000000000291038,
    1.000000000014552,
    1.000000000007276,
    1.000000000003638,
    1.000000000001819,
    1.0000000000009095,
    1.0000000000004547,
    1.0000000000002274,
    1.0000000000001137,
    1.0000000000000568,
    1.0000000000000284,
    1.0000000000000142,
    1.000000000000007,
    1.0000000000000036,
    1.0000000000000018,
    1.0000000000000009,
    1.0000000000000004,
    1.0000000000000002,
    1.0000000000000002,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
];

/// H_n = Σ_{k=1}^{n} 1/k.
pub fn harmonic(n: u64) -> f64 {
    harmonic_difference(n, 0)
}

/// H_hi − H_lo = Σ_{k=lo+1}^{hi} 1/k for lo ≤ hi.
///
/// Summed smallest-term first when exact; above [`EXACT_HARMONIC_LIMIT`]
/// both ends switch to the asymptotic expansion.
pub fn harmonic_difference(hi: u64, lo: u64) -> f64 {
    assert!(lo <= hi, "harmonic_difference requires lo <= hi");
    if hi <= EXACT_HARMONIC_LIMIT {
        return ((lo + 1)..=hi).rev().map(|k| 1.0 / k as f64).sum();
    }
    if lo <= EXACT_HARMONIC_LIMIT {
        let head = harmonic_difference(EXACT_HARMONIC_LIMIT, lo);
        return head + asymptotic_psi1(hi) - asymptotic_psi1(EXACT_HARMONIC_LIMIT);
    }
    asymptotic_psi1(hi) - asymptotic_psi1(lo)
}

/// Ψ(n + 1) for integer n ≥ 0, i.e. H_n − γ.
pub fn digamma_int_plus_one(n: u64) -> f64 {
    if n <= EXACT_HARMONIC_LIMIT {
        harmonic(n) - EULER_GAMMA
    } else {
        asymptotic_psi1(n)
    }
}

// Ψ(n + 1) = ln n + 1/(2n) − Σ B_{2k} / (2k n^{2k})
fn asymptotic_psi1(n: u64) -> f64 {
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    x.ln() + 0.5 / x - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// Digamma for real x > 0 via upward recurrence and the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    assert!(
        x > 0.0,
        "digamma is only implemented for positive arguments"
    );
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + x.ln() - 0.5 / x - series
}

/// Riemann ζ(j) for integer j ≥ 2.
pub fn zeta(j: u32) -> f64 {
    assert!(j >= 2, "zeta diverges at j = {j}");
    if let Some(v) = ZETA_TABLE.get((j - 2) as usize) {
        return *v;
    }
    // j > 64: 2^-j is already below 1e-19, a handful of terms suffices.
    let s = -(j as f64);
    (2..=8u32).rev().map(|k| (k as f64).powf(s)).sum::<f64>() + 1.0
}

/// C(n, k) as a float, by the multiplicative formula. Zero when k > n.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// ln((n)!) by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_matches_harmonic_numbers() {
        for n in (0..=(1u64 << 14)).step_by(97).chain([1, 2, 3, 1 << 14]) {
            let via_real = digamma(n as f64 + 1.0) - digamma(1.0);
            assert!((via_real - harmonic(n)).abs() < 1e-12, "n = {n}");
            let via_int = digamma_int_plus_one(n) - digamma_int_plus_one(0);
            assert!((via_int - harmonic(n)).abs() < 1e-12, "n = {n}");
        }
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_branch_is_continuous() {
        let n = EXACT_HARMONIC_LIMIT;
        let exact = harmonic(n) - EULER_GAMMA;
        assert!((exact - asymptotic_psi1(n)).abs() < 1e-12);
        let d = harmonic_difference(n + 1000, n - 1000);
        let direct: f64 = ((n - 999)..=(n + 1000)).map(|k| 1.0 / k as f64).sum();
        assert!((d - direct).abs() < 1e-13);
    }

    #[test]
    fn zeta_table_and_series_agree() {
        // Direct partial sums plus an Euler–Maclaurin tail.
        for j in 2..=70u32 {
            let s = -(j as f64);
            let k = 200.0f64;
            let partial: f64 = (1..200u32).rev().map(|i| (i as f64).powf(s)).sum();
            let tail = k.powf(1.0 + s) / (j as f64 - 1.0)
                + 0.5 * k.powf(s)
                + (j as f64) / 12.0 * k.powf(s - 1.0)
                - (j * (j + 1) * (j + 2)) as f64 / 720.0 * k.powf(s - 3.0);
            let oracle = partial + tail;
            assert!(
                (zeta(j) - oracle).abs() < 2e-15,
                "j = {j}: {} vs {}",
                zeta(j),
                oracle
            );
        }
        assert!((zeta(2) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-16);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(9, 4), 126.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert!((binomial(64, 32) / 1_832_624_140_942_590_534.0 - 1.0).abs() < 1e-14);
        assert!((ln_factorial(10) - 3_628_800f64.ln()).abs() < 1e-12);
    }
}
