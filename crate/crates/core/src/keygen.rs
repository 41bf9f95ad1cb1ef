//! Common prime RSA instances: `p = 2ga + 1`, `q = 2gb + 1` with `g` prime,
//! `gcd(a, b) = 1`, `h = 2gab + a + b` prime, and `e*d = 1 (mod 2gab)`.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::integer::{IsPrime, Order};
use rug::ops::DivRounding;
use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Miller-Rabin rounds used for every primality decision.
pub const PRIMALITY_ROUNDS: u32 = 64;

/// Upper limit on candidate `(a, b)` pairs before generation gives up.
pub const MAX_PAIR_CANDIDATES: u64 = 1_000_000;

/// Candidates for `b` tried against one `a` before `a` is redrawn.
const B_TRIES_PER_A: u64 = 200_000;

pub fn is_probable_prime(n: &Integer) -> bool {
    *n > 1 && n.is_probably_prime(PRIMALITY_ROUNDS) != IsPrime::No
}

/// Full key-generation transcript of a common prime RSA key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonPrimeInstance {
    pub n: Integer,
    pub p: Integer,
    pub q: Integer,
    pub g: Integer,
    pub a: Integer,
    pub b: Integer,
    pub h: Integer,
    pub e: Integer,
    pub d: Integer,
    pub k: Integer,
    pub bits: u32,
    pub gamma_bits: u32,
    pub delta_bits: u32,
    pub seed: u64,
}

impl CommonPrimeInstance {
    /// Assembles an instance from its structure integers `g, a, b` and the
    /// private exponent `d`. No primality is checked here; use
    /// [`verify_instance`].
    pub fn from_parts(g: Integer, a: Integer, b: Integer, d: Integer) -> Result<Self> {
        let two_g = Integer::from(&g * 2u32);
        let p = Integer::from(&two_g * &a) + 1u32;
        let q = Integer::from(&two_g * &b) + 1u32;
        let lam = Integer::from(&two_g * &a) * &b;
        let h = Integer::from(&lam + &a) + &b;
        let e = d
            .clone()
            .invert(&lam)
            .map_err(|_| Error::Infeasible("d is not invertible modulo 2gab".into()))?;
        let k = (Integer::from(&e * &d) - 1u32) / &lam;
        let n = Integer::from(&p * &q);
        Ok(Self {
            bits: n.significant_bits(),
            gamma_bits: g.significant_bits(),
            delta_bits: d.significant_bits(),
            seed: 0,
            n,
            p,
            q,
            g,
            a,
            b,
            h,
            e,
            d,
            k,
        })
    }

    /// The classic toy key: g = 3, a = 2, b = 3, d = 11, giving N = 247 and
    /// e = 23.
    pub fn toy() -> Self {
        Self::from_parts(
            Integer::from(3),
            Integer::from(2),
            Integer::from(3),
            Integer::from(11),
        )
        .expect("toy instance is well formed")
    }

    /// `2gab = lcm(p - 1, q - 1)`.
    pub fn lambda(&self) -> Integer {
        Integer::from(&self.g * 2u32) * &self.a * &self.b
    }

    /// `gamma = gamma_bits / bits`.
    pub fn gamma(&self) -> Rational {
        Rational::from((self.gamma_bits, self.bits))
    }

    /// `delta = delta_bits / bits`.
    pub fn delta(&self) -> Rational {
        Rational::from((self.delta_bits, self.bits))
    }

    /// The integer root `(d, ak, bk)` of the attack polynomial.
    pub fn planted_root(&self) -> [Integer; 3] {
        [
            self.d.clone(),
            Integer::from(&self.a * &self.k),
            Integer::from(&self.b * &self.k),
        ]
    }

    /// `gcd(k, 2g)`; recorded, never enforced.
    pub fn k_gcd_2g(&self) -> Integer {
        Integer::from(&self.g * 2u32).gcd(&self.k)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    n: String,
    p: String,
    q: String,
    g: String,
    a: String,
    b: String,
    h: String,
    e: String,
    d: String,
    k: String,
    bits: String,
    gamma_bits: String,
    delta_bits: String,
    seed: String,
}

impl Serialize for CommonPrimeInstance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceJson {
            n: self.n.to_string(),
            p: self.p.to_string(),
            q: self.q.to_string(),
            g: self.g.to_string(),
            a: self.a.to_string(),
            b: self.b.to_string(),
            h: self.h.to_string(),
            e: self.e.to_string(),
            d: self.d.to_string(),
            k: self.k.to_string(),
            bits: self.bits.to_string(),
            gamma_bits: self.gamma_bits.to_string(),
            delta_bits: self.delta_bits.to_string(),
            seed: self.seed.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CommonPrimeInstance {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = InstanceJson::deserialize(de)?;
        let int = |name: &str, v: &str| {
            v.parse::<Integer>()
                .map_err(|_| D::Error::custom(format!("field `{name}` is not a decimal integer")))
        };
        let small = |name: &str, v: &str| {
            v.parse::<u64>()
                .map_err(|_| D::Error::custom(format!("field `{name}` is not a decimal integer")))
        };
        Ok(Self {
            n: int("n", &j.n)?,
            p: int("p", &j.p)?,
            q: int("q", &j.q)?,
            g: int("g", &j.g)?,
            a: int("a", &j.a)?,
            b: int("b", &j.b)?,
            h: int("h", &j.h)?,
            e: int("e", &j.e)?,
            d: int("d", &j.d)?,
            k: int("k", &j.k)?,
            bits: small("bits", &j.bits)? as u32,
            gamma_bits: small("gamma_bits", &j.gamma_bits)? as u32,
            delta_bits: small("delta_bits", &j.delta_bits)? as u32,
            seed: small("seed", &j.seed)?,
        })
    }
}

/// Uniform integer in `[lo, hi]` (requires `lo <= hi`).
/// Serializes a big integer as a decimal string.
pub fn ser_decimal<S: Serializer>(x: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn random_in_range<R: RngCore>(rng: &mut R, lo: &Integer, hi: &Integer) -> Integer {
    let span = Integer::from(hi - lo) + 1u32;
    let nbits = span.significant_bits();
    let nbytes = nbits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        let mut x = Integer::from_digits(&buf, Order::Lsf);
        x.keep_bits_mut(nbits);
        if x < span {
            return x + lo;
        }
    }
}

/// Uniform integer with exactly `bits` bits.
pub(crate) fn random_bits<R: RngCore>(rng: &mut R, bits: u32) -> Integer {
    let lo = Integer::from(1) << (bits - 1);
    let hi = (Integer::from(1) << bits) - 1u32;
    random_in_range(rng, &lo, &hi)
}

/// Range of multipliers `m` such that `2gm + 1` has exactly `half_bits` bits
/// and is at least `sqrt(2) * 2^(half_bits - 1)`, so that two such primes
/// multiply to a modulus of exactly `p_bits + q_bits` bits.
fn multiplier_range(g: &Integer, half_bits: u32) -> (Integer, Integer) {
    let low_prime = (Integer::from(1) << (2 * half_bits - 1)).sqrt() + 1u32;
    let high_prime = (Integer::from(1) << half_bits) - 1u32;
    let two_g = Integer::from(g * 2u32);
    // 2gm + 1 >= low_prime  <=>  m >= ceil((low_prime - 1) / 2g)
    let lo = (low_prime - 1u32).div_ceil(two_g.clone()).max(Integer::from(1));
    let hi = (high_prime - 1u32) / two_g;
    (lo, hi)
}

/// Generates a common prime RSA key with an `bits`-bit modulus, a
/// `gamma_bits`-bit common prime `g` and a `delta_bits`-bit private exponent.
/// Deterministic in `seed`.
pub fn generate_instance(
    bits: u32,
    gamma_bits: u32,
    delta_bits: u32,
    seed: u64,
) -> Result<CommonPrimeInstance> {
    if gamma_bits == 0 || 2 * gamma_bits >= bits {
        return Err(Error::Infeasible(format!(
            "need 0 < gamma_bits < bits/2, got gamma_bits = {gamma_bits} for bits = {bits}"
        )));
    }
    if delta_bits < 2 || delta_bits >= bits {
        return Err(Error::Infeasible(format!(
            "need 1 < delta_bits < bits, got delta_bits = {delta_bits} for bits = {bits}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p_bits = bits.div_ceil(2);
    let q_bits = bits / 2;

    let g = loop {
        let mut c = random_bits(&mut rng, gamma_bits);
        c.set_bit(0, true);
        if is_probable_prime(&c) {
            break c;
        }
    };
    let (a_lo, a_hi) = multiplier_range(&g, p_bits);
    let (b_lo, b_hi) = multiplier_range(&g, q_bits);
    if a_lo > a_hi || b_lo > b_hi {
        return Err(Error::Infeasible(format!(
            "no room for a, b with a {gamma_bits}-bit g in a {bits}-bit modulus"
        )));
    }
    let two_g = Integer::from(&g * 2u32);

    let mut pairs = 0u64;
    let (a, b) = 'search: loop {
        let a = loop {
            let a = random_in_range(&mut rng, &a_lo, &a_hi);
            let p = Integer::from(&two_g * &a) + 1u32;
            pairs += 1;
            if pairs > MAX_PAIR_CANDIDATES {
                return Err(exhausted(bits, gamma_bits));
            }
            if is_probable_prime(&p) {
                break a;
            }
        };
        for _ in 0..B_TRIES_PER_A {
            pairs += 1;
            if pairs > MAX_PAIR_CANDIDATES {
                return Err(exhausted(bits, gamma_bits));
            }
            let mut b = random_in_range(&mut rng, &b_lo, &b_hi);
            // h = 2gab + a + b is odd only when a + b is odd.
            if b.is_odd() == a.is_odd() {
                if b < b_hi {
                    b += 1u32;
                } else if b > b_lo {
                    b -= 1u32;
                } else {
                    continue;
                }
            }
            if b == a || Integer::from(a.gcd_ref(&b)) != 1 {
                continue;
            }
            let q = Integer::from(&two_g * &b) + 1u32;
            if !is_probable_prime(&q) {
                continue;
            }
            let h = Integer::from(&two_g * &a) * &b + &a + &b;
            if is_probable_prime(&h) {
                break 'search (a, b);
            }
        }
    };

    let lam = Integer::from(&two_g * &a) * &b;
    let d_lo = Integer::from(1) << (delta_bits - 1);
    let d_hi = (Integer::from(1) << delta_bits) - 1u32;
    let mut tries = 0u32;
    let d = loop {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::Infeasible(format!(
                "no {delta_bits}-bit d coprime to 2gab found"
            )));
        }
        let mut d = random_in_range(&mut rng, &d_lo, &d_hi);
        d.set_bit(0, true);
        if d > d_hi || Integer::from(d.gcd_ref(&lam)) != 1 {
            continue;
        }
        let e = d.clone().invert(&lam).expect("d is coprime to 2gab");
        if e > 1 {
            break d;
        }
    };

    let mut inst = CommonPrimeInstance::from_parts(g, a, b, d)?;
    inst.bits = bits;
    inst.gamma_bits = gamma_bits;
    inst.delta_bits = delta_bits;
    inst.seed = seed;
    Ok(inst)
}

fn exhausted(bits: u32, gamma_bits: u32) -> Error {
    Error::Infeasible(format!(
        "no admissible (a, b) among {MAX_PAIR_CANDIDATES} candidates for bits = {bits}, gamma_bits = {gamma_bits}"
    ))
}

/// Outcome of one structural check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// `gcd(k, 2g)`, informational.
    pub k_gcd_2g: String,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<24} {}", c.name, if c.passed { "ok" } else { "FAIL" })?;
        }
        write!(f, "{:<24} {}", "gcd(k, 2g)", self.k_gcd_2g)
    }
}

/// Re-checks every structural invariant of an instance independently of how
/// it was produced.
pub fn verify_instance(inst: &CommonPrimeInstance) -> VerificationReport {
    let one = Integer::from(1);
    let two_g = Integer::from(&inst.g * 2u32);
    let lam = Integer::from(&two_g * &inst.a) * &inst.b;
    let pm1 = Integer::from(&inst.p - 1u32);
    let qm1 = Integer::from(&inst.q - 1u32);
    let ed = Integer::from(&inst.e * &inst.d);
    let key_eq = !lam.is_zero() && Integer::from(&ed - 1u32).is_divisible(&lam);
    let k_ok = !lam.is_zero() && Integer::from(&inst.k * &lam) + 1u32 == ed;
    let pq = Integer::from(&inst.p * &inst.q);
    let semiprime = pq.is_odd() && (Integer::from(&pq - 1u32) >> 1) == Integer::from(&inst.g * &inst.h);
    let pbits = inst.p.significant_bits() as i64;
    let qbits = inst.q.significant_bits() as i64;
    let checks = vec![
        Check { name: "g prime", passed: is_probable_prime(&inst.g) },
        Check { name: "p prime", passed: is_probable_prime(&inst.p) },
        Check { name: "q prime", passed: is_probable_prime(&inst.q) },
        Check { name: "h prime", passed: is_probable_prime(&inst.h) },
        Check { name: "p = 2ga + 1", passed: Integer::from(&two_g * &inst.a) + 1u32 == inst.p },
        Check { name: "q = 2gb + 1", passed: Integer::from(&two_g * &inst.b) + 1u32 == inst.q },
        Check { name: "gcd(a, b) = 1", passed: Integer::from(inst.a.gcd_ref(&inst.b)) == one },
        Check { name: "h = 2gab + a + b", passed: Integer::from(&lam + &inst.a) + &inst.b == inst.h },
        Check { name: "(pq - 1)/2 = gh", passed: semiprime },
        Check { name: "N = pq", passed: pq == inst.n },
        Check { name: "lcm(p-1, q-1) = 2gab", passed: pm1.lcm(&qm1) == lam },
        Check { name: "ed = 1 mod 2gab", passed: key_eq },
        Check { name: "k = (ed - 1)/2gab", passed: k_ok },
        Check { name: "p, q balanced", passed: (pbits - qbits).abs() <= 1 },
    ];
    VerificationReport { checks, k_gcd_2g: inst.k_gcd_2g().to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_instance_values() {
        let t = CommonPrimeInstance::toy();
        assert_eq!((t.p.to_u32(), t.q.to_u32(), t.n.to_u32()), (Some(13), Some(19), Some(247)));
        assert_eq!(t.h, 41);
        assert_eq!(t.lambda(), 36);
        assert_eq!(t.e, 23);
        assert_eq!(t.k, 7);
        assert_eq!(t.planted_root(), [Integer::from(11), Integer::from(14), Integer::from(21)]);
        let report = verify_instance(&t);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn broken_key_equation_is_reported() {
        let mut t = CommonPrimeInstance::toy();
        t.d = Integer::from(12);
        let report = verify_instance(&t);
        assert_eq!(report.passed("ed = 1 mod 2gab"), Some(false));
    }

    #[test]
    fn composite_q_is_reported() {
        let mut t = CommonPrimeInstance::toy();
        t.q = Integer::from(21);
        let report = verify_instance(&t);
        assert_eq!(report.passed("q prime"), Some(false));
        assert_eq!(report.passed("p prime"), Some(true));
    }

    #[test]
    fn generated_512_bit_shape() {
        let inst = generate_instance(512, 102, 60, 7).unwrap();
        let report = verify_instance(&inst);
        assert!(report.all_passed(), "{report}");
        assert!((inst.g.significant_bits() as i64 - 102).abs() <= 1);
        assert!((inst.n.significant_bits() as i64 - 512).abs() <= 1);
        assert_eq!(inst.d.significant_bits(), 60);
        assert!(inst.e < inst.lambda());
        assert_eq!(Integer::from(&inst.e * &inst.d) % inst.lambda(), 1);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_instance(256, 50, 30, 11).unwrap();
        let b = generate_instance(256, 50, 30, 11).unwrap();
        let c = generate_instance(256, 50, 30, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.n, c.n);
    }

    #[test]
    fn infeasible_gamma_rejected() {
        assert!(matches!(generate_instance(512, 300, 80, 1), Err(Error::Infeasible(_))));
        assert!(matches!(generate_instance(512, 256, 80, 1), Err(Error::Infeasible(_))));
        assert!(matches!(generate_instance(512, 100, 512, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn json_round_trip() {
        let inst = generate_instance(128, 20, 20, 3).unwrap();
        let text = inst.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["n", "p", "q", "g", "a", "b", "h", "e", "d", "k", "bits", "gamma_bits", "delta_bits", "seed"] {
            assert!(v[key].is_string(), "{key} should be a decimal string");
        }
        assert_eq!(CommonPrimeInstance::from_json(&text).unwrap(), inst);
    }
}
