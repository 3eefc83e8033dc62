//! Exact rational bookkeeping for Strichartz exponents.
//!
//! All identities here are checked with arbitrary-precision rationals, so a
//! pass means the identity holds exactly, not to a tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ExponentError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.01"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ExponentError> {
    let t = text.trim();
    let bad = || ExponentError::NotRational(text.to_string());
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exponent in `(0, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRational {
    Finite(Rational),
    Infinite,
}

impl ExtRational {
    /// `1/x`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match self {
            ExtRational::Finite(x) => x.recip(),
            ExtRational::Infinite => Rational::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(x) => to_f64(x),
            ExtRational::Infinite => f64::INFINITY,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(x: Rational) -> Self {
        ExtRational::Finite(x)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(x) => write!(f, "{x}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = ExponentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(ExtRational::Infinite),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Space-time exponent pair `(q, r)` at Sobolev level `s`.
///
/// `s = 0` is the plain biharmonic-admissible case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: ExtRational,
    pub r: ExtRational,
    #[serde(with = "rational_string")]
    pub s: Rational,
}

impl AdmissiblePair {
    pub fn new(q: ExtRational, r: ExtRational, s: Rational) -> Self {
        Self { q, r, s }
    }

    pub fn biharmonic(q: ExtRational, r: ExtRational) -> Self {
        Self::new(q, r, Rational::zero())
    }

    /// `4/q + N/r − (N/2 − s)`; zero exactly on the scaling line.
    pub fn scaling_defect(&self, dim: u32) -> Rational {
        let n = int(dim as i64);
        int(4) * self.q.reciprocal() + &n * self.r.reciprocal() - (n / int(2) - &self.s)
    }
}

/// Membership in the admissible family at level `pair.s` in dimension `dim`.
///
/// `s = 0`: `2 ≤ r < 2N/(N−4)` for `N ≥ 5`, `2 ≤ r < ∞` for `N = 4`,
/// `2 ≤ r ≤ ∞` for `N ≤ 3`.
/// `s ≠ 0`: `2N/(N−2s) ≤ r < 2N/(N−4)` for `N ≥ 5`, `< ∞` for `N ≤ 4`.
pub fn is_admissible(pair: &AdmissiblePair, dim: u32) -> bool {
    let positive = |x: &ExtRational| match x {
        ExtRational::Finite(v) => v.is_positive(),
        ExtRational::Infinite => true,
    };
    if !positive(&pair.q) || !positive(&pair.r) {
        return false;
    }
    if let ExtRational::Finite(q) = &pair.q {
        if *q < int(2) {
            return false;
        }
    }
    if !pair.scaling_defect(dim).is_zero() {
        return false;
    }
    let n = int(dim as i64);
    let inv_r = pair.r.reciprocal();

    // lower end: 1/r ≤ 1/2 (s = 0) or 1/r ≤ (N−2s)/(2N) (s ≠ 0)
    let inv_r_max = if pair.s.is_zero() {
        rat(1, 2)
    } else {
        let denom = &n - int(2) * &pair.s;
        if !denom.is_positive() {
            return false;
        }
        denom / (int(2) * &n)
    };
    if inv_r > inv_r_max {
        return false;
    }

    // upper end: r < 2N/(N−4), i.e. 1/r > (N−4)/(2N)
    match dim {
        d if d >= 5 => inv_r > (&n - int(4)) / (int(2) * &n),
        4 => !pair.r.is_infinite(),
        _ => pair.s.is_zero() || !pair.r.is_infinite(),
    }
}

/// Which side of the unit sphere the Hölder split is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Ball,
    Exterior,
}

/// The five-dimensional exponent system of the `α ≥ 7 − 2b` gradient estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSystem {
    #[serde(with = "rational_string")]
    pub b: Rational,
    #[serde(with = "rational_string")]
    pub alpha: Rational,
    #[serde(with = "rational_string")]
    pub eta: Rational,
    #[serde(with = "rational_string")]
    pub theta_tilde: Rational,
    pub region: Region,
    #[serde(with = "rational_string")]
    pub sc: Rational,
    /// `2 − s_c` on the ball, `−s_c` outside.
    #[serde(with = "rational_string")]
    pub l: Rational,
    /// Reciprocals `1/r_1, …, 1/r_5`.
    #[serde(with = "rational_vec")]
    pub inv_r: Vec<Rational>,
    #[serde(with = "rational_string")]
    pub alpha1: Rational,
    #[serde(with = "rational_string")]
    pub alpha2: Rational,
}

impl ExponentSystem {
    /// Builds `r_1..r_5`, `α_1`, `α_2` from the displayed definitions.
    pub fn build(
        b: &Rational,
        alpha: &Rational,
        eta: &Rational,
        theta_tilde: &Rational,
        region: Region,
    ) -> Self {
        let five = int(5);
        let sc = rat(5, 2) - (int(4) - b) / alpha;
        let l = match region {
            Region::Ball => int(2) - &sc,
            Region::Exterior => -sc.clone(),
        };
        let te = theta_tilde * eta;
        let inv_r = vec![
            (b + int(1) + &l * &te) / &five,
            (int(4) - b) / (&five * alpha) - &l / &five,
            (int(4) - b - eta) / (&five * alpha),
            eta / (&five * alpha),
            eta / int(10),
        ];
        let denom = int(8) - int(2) * b - int(4) * eta;
        let alpha1 = (int(5) - int(2) * b) / &denom * alpha
            - (int(3) * alpha + theta_tilde * (int(8) - int(2) * b) - int(2) * &te) / &denom * eta;
        let alpha2 = int(3) / &denom * alpha - (alpha - int(2) * &te) / &denom * eta;
        Self {
            b: b.clone(),
            alpha: alpha.clone(),
            eta: eta.clone(),
            theta_tilde: theta_tilde.clone(),
            region,
            sc,
            l,
            inv_r,
            alpha1,
            alpha2,
        }
    }

    /// The three pairs used in the time-Hölder step, with their levels.
    pub fn pairs(&self) -> [AdmissiblePair; 3] {
        let a = &self.alpha;
        let b = &self.b;
        let eta = &self.eta;
        let four_minus = int(4) - b - eta;
        [
            AdmissiblePair::new(
                ExtRational::Finite(int(4) * a / eta),
                ExtRational::Finite(int(5) * a / &four_minus),
                self.sc.clone(),
            ),
            AdmissiblePair::biharmonic(
                ExtRational::Finite(int(4) * a / &four_minus),
                ExtRational::Finite(int(5) * a / (a * &self.sc + eta)),
            ),
            AdmissiblePair::biharmonic(
                ExtRational::Finite(int(8) / (int(1) - eta)),
                ExtRational::Finite(int(10) / (int(4) + eta)),
            ),
        ]
    }

    /// `1/r_1 + θ̃η/r_2 + α_1/r_3 + α_2/r_4 + 1/r_5`; should equal `7/10`.
    pub fn holder_sum(&self) -> Rational {
        let r = &self.inv_r;
        &r[0] + &self.theta_tilde * &self.eta * &r[1] + &self.alpha1 * &r[2] + &self.alpha2 * &r[3] + &r[4]
    }

    /// Time-exponent balance `α_1 η/(4α) + α_2(4−b−η)/(4α) + (1−η)/8`;
    /// should equal `1/2` so the product lands in `L²` in time.
    pub fn time_interpolation_sum(&self) -> Rational {
        let a4 = int(4) * &self.alpha;
        &self.alpha1 * &self.eta / &a4
            + &self.alpha2 * (int(4) - &self.b - &self.eta) / &a4
            + (int(1) - &self.eta) / int(8)
    }

    /// The mixed space/time form `α_1η/(4α) + α_2(αs_c+η)/(5α) + (4+η)/10`
    /// as it appears in print. Kept for comparison; it is not an identity.
    pub fn printed_interpolation_sum(&self) -> Rational {
        &self.alpha1 * &self.eta / (int(4) * &self.alpha)
            + &self.alpha2 * (&self.alpha * &self.sc + &self.eta) / (int(5) * &self.alpha)
            + (int(4) + &self.eta) / int(10)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Short label `(a)` … `(f)` plus a description.
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub system: ExponentSystem,
    pub checks: Vec<IdentityCheck>,
    /// Whether the printed mixed-exponent interpolation line evaluates to 1/2.
    pub printed_interpolation_holds: bool,
}

impl ExponentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Builds the five-dimensional system and checks identities (a)–(f) exactly.
///
/// Preconditions (rejected with an error): `0 < b < 5/2`,
/// `7 − 2b ≤ α < 8 − 2b`, `η > 0`, `θ̃ > 0`, `8 − 2b − 4η ≠ 0`, `η < 1`.
pub fn verify_exponent_system(
    b: &Rational,
    alpha: &Rational,
    eta: &Rational,
    theta_tilde: &Rational,
    region: Region,
) -> Result<ExponentReport, ExponentError> {
    let pre = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(ExponentError::Precondition(msg.into())) };
    pre(b.is_positive() && *b < rat(5, 2), "0 < b < 5/2")?;
    pre(*alpha >= int(7) - int(2) * b, "alpha >= 7 - 2b")?;
    pre(*alpha < int(8) - int(2) * b, "alpha < 8 - 2b")?;
    pre(eta.is_positive(), "eta must be positive")?;
    pre(*eta < int(1), "eta < 1")?;
    pre(theta_tilde.is_positive(), "theta_tilde must be positive")?;
    pre(!(int(8) - int(2) * b - int(4) * eta).is_zero(), "8 - 2b - 4 eta != 0")?;

    let system = ExponentSystem::build(b, alpha, eta, theta_tilde, region);
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(IdentityCheck { name: name.into(), passed, detail });
    };

    let holder = system.holder_sum();
    push(
        "(a) Hölder sum = 7/10",
        holder == rat(7, 10),
        format!("sum = {holder}"),
    );

    let total = &system.alpha1 + &system.alpha2 + theta_tilde * eta;
    push(
        "(b) alpha1 + alpha2 + theta_tilde*eta = alpha",
        total == *alpha,
        format!("lhs = {total}, alpha = {alpha}"),
    );

    let labels = ["H^{s_c}-admissible", "B-admissible", "B-admissible"];
    for (pair, label) in system.pairs().iter().zip(labels) {
        push(
            &format!("(c) ({}, {}) {label}", pair.q, pair.r),
            is_admissible(pair, 5),
            format!("scaling defect = {}", pair.scaling_defect(5)),
        );
    }

    let interp = system.time_interpolation_sum();
    push(
        "(d) time interpolation sum = 1/2",
        interp == rat(1, 2),
        format!("sum = {interp}"),
    );

    let cap = alpha - theta_tilde * eta;
    push(
        "(e) 0 < alpha1 < alpha - theta_tilde*eta",
        system.alpha1.is_positive() && system.alpha1 < cap,
        format!("alpha1 = {}, cap = {cap}", system.alpha1),
    );

    let five_over_r1 = int(5) * &system.inv_r[0];
    let b1 = b + int(1);
    let integrable = match region {
        Region::Ball => five_over_r1 > b1,
        Region::Exterior => five_over_r1 < b1,
    };
    push(
        "(f) |x|^-(b+1) in L^{r1}(region)",
        integrable,
        format!("5/r1 = {five_over_r1}, b+1 = {b1}"),
    );

    let printed_interpolation_holds = system.printed_interpolation_sum() == rat(1, 2);
    Ok(ExponentReport { system, checks, printed_interpolation_holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSample {
    #[serde(with = "rational_string")]
    pub r: Rational,
    /// `N r (α+1) / (N − r b)`.
    #[serde(with = "rational_string")]
    pub value: Rational,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWindow {
    #[serde(with = "rational_string")]
    pub low: Rational,
    #[serde(with = "rational_string")]
    pub high: Rational,
    pub samples: Vec<WindowSample>,
}

impl EmbeddingWindow {
    pub fn all_samples_pass(&self) -> bool {
        self.samples.iter().all(|s| s.passed)
    }
}

/// Checks `2 < N r(α+1)/(N − r b) < 2N/(N−4)` at a single `r`.
pub fn embedding_condition(dim: u32, b: &Rational, alpha: &Rational, r: &Rational) -> WindowSample {
    let n = int(dim as i64);
    let denom = &n - r * b;
    if !denom.is_positive() {
        return WindowSample { r: r.clone(), value: Rational::zero(), passed: false };
    }
    let value = &n * r * (alpha + int(1)) / denom;
    let upper_ok = if dim >= 5 {
        value < int(2) * &n / (&n - int(4))
    } else {
        true
    };
    WindowSample { r: r.clone(), passed: value > int(2) && upper_ok, value }
}

/// The open interval `(2N/(N+8), 2N/(N+4))` with the embedding condition
/// evaluated at ten equally spaced interior points.
pub fn embedding_window(dim: u32, b: &Rational, alpha: &Rational) -> EmbeddingWindow {
    let n = int(dim as i64);
    let low = int(2) * &n / (&n + int(8));
    let high = int(2) * &n / (&n + int(4));
    let samples = (1..=10)
        .map(|k| {
            let r = &low + (&high - &low) * rat(k, 11);
            embedding_condition(dim, b, alpha, &r)
        })
        .collect();
    EmbeddingWindow { low, high, samples }
}

/// Serde helper: rationals as `"p/q"` strings.
pub mod rational_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec {
    use super::{parse_rational, Rational};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(q: &str, r: &str, s: &str) -> AdmissiblePair {
        AdmissiblePair::new(q.parse().unwrap(), r.parse().unwrap(), parse_rational(s).unwrap())
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("7/2").unwrap(), rat(7, 2));
        assert_eq!(parse_rational("0.01").unwrap(), rat(1, 100));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), int(3));
        assert!(parse_rational("pi").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("NaN").is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&pair("inf", "2", "0"), 5));
        assert!(!is_admissible(&pair("2", "10", "0"), 5));
        assert!(is_admissible(&pair("4", "10/3", "0"), 5));
    }

    #[test]
    fn sobolev_level_lower_endpoint_is_included() {
        // N = 5, s = 1: r = 2N/(N-2s) = 10/3, q = ∞
        assert!(is_admissible(&pair("inf", "10/3", "1"), 5));
        assert!(!is_admissible(&pair("inf", "2", "1"), 5));
    }

    #[test]
    fn low_dimension_ranges() {
        // N = 3, s = 0: r = ∞ allowed, q = 8/3
        assert!(is_admissible(&pair("8/3", "inf", "0"), 3));
        // N = 4: r = ∞ excluded, q = 2
        assert!(!is_admissible(&pair("2", "inf", "0"), 4));
        assert!(is_admissible(&pair("4", "4", "0"), 4));
    }

    #[test]
    fn reference_system_passes() {
        let report =
            verify_exponent_system(&int(2), &rat(7, 2), &rat(1, 100), &rat(1, 100), Region::Ball).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert!(!report.printed_interpolation_holds);
        // 1/r2 collapses to 1/10 on the ball, 1/2 outside
        assert_eq!(report.system.inv_r[1], rat(1, 10));
        let ext =
            verify_exponent_system(&int(2), &rat(7, 2), &rat(1, 100), &rat(1, 100), Region::Exterior).unwrap();
        assert!(ext.passed());
        assert_eq!(ext.system.inv_r[1], rat(1, 2));
    }

    #[test]
    fn zero_eta_rejected() {
        let err = verify_exponent_system(&int(2), &rat(7, 2), &int(0), &rat(1, 100), Region::Ball).unwrap_err();
        assert!(matches!(err, ExponentError::Precondition(_)));
    }

    #[test]
    fn large_eta_breaks_range_and_is_reported() {
        // r3 = 5α/(4−b−η) reaches 10 when α = 8 − 2b − 2η
        let report =
            verify_exponent_system(&int(1), &rat(11, 2), &rat(1, 4), &rat(1, 100), Region::Ball).unwrap();
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.name.starts_with("(c)")));
    }

    #[test]
    fn window_endpoints() {
        let w5 = embedding_window(5, &int(1), &int(2));
        assert_eq!((w5.low.clone(), w5.high.clone()), (rat(10, 13), rat(10, 9)));
        assert!(w5.all_samples_pass());
        let w8 = embedding_window(8, &int(1), &int(2));
        assert_eq!((w8.low, w8.high), (int(1), rat(4, 3)));
        let s = embedding_condition(5, &int(1), &int(2), &int(1));
        assert_eq!(s.value, rat(15, 4));
        assert!(s.passed);
    }
}
