use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rat::from_integer(acc)
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

/// Serde adapter writing a rational as `{"num": "p", "den": "q"}` with decimal strings.
/// Reading also accepts JSON integers.
pub mod rat_serde {
    use super::Rat;
    use num_bigint::BigInt;
    use num_traits::Zero;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Int {
        Small(i64),
        Big(String),
    }

    impl Int {
        fn to_big(&self) -> Option<BigInt> {
            match self {
                Int::Small(v) => Some(BigInt::from(*v)),
                Int::Big(s) => s.parse().ok(),
            }
        }
    }

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: Int,
        den: Int,
    }

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        Repr { num: Int::Big(x.numer().to_string()), den: Int::Big(x.denom().to_string()) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let r = Repr::deserialize(d)?;
        let num = r.num.to_big().ok_or_else(|| D::Error::custom("bad numerator"))?;
        let den = r.den.to_big().ok_or_else(|| D::Error::custom("bad denominator"))?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rat::new(num, den))
    }
}
