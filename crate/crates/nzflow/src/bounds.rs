//! Guaranteed lower bounds of the form `ceil(2^(a/b))`, evaluated exactly in
//! integer arithmetic. No floating point: `c = ceil(2^(a/b))` is the least
//! `c` with `c^b >= 2^a`.

use num_bigint::BigUint;

/// Which flow-family guarantee is being evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundVariant {
    /// `2^(n/7)` for 3-edge-connected graphs under Z2xZ3.
    Z6ThreeEc,
    /// `2^(2(m-n)/9)` for 2-edge-connected graphs under Z2xZ3.
    Z6TwoEc,
    /// `2^(n/5)` for cubic 3-edge-connected graphs under Z2xZ3.
    Z6Cubic,
    /// `2^(m - 3n/2)` for 3-edge-connected graphs under Z2xZ3.
    Z6Dense,
    /// `2^(n/250)` for graphs with two disjoint spanning trees under Z2xZ2.
    Z4,
    /// `2^((n-2)/12)` for 6-edge-connected graphs under Z3.
    Z3,
}

/// Exact `ceil(2^(a/b))` for the variant's exponent at the given `n`, `m`.
pub fn guaranteed_bound(variant: BoundVariant, n: u64, m: u64) -> BigUint {
    let (a, b): (i64, u64) = match variant {
        BoundVariant::Z6ThreeEc => (n as i64, 7),
        BoundVariant::Z6TwoEc => (2 * (m as i64 - n as i64), 9),
        BoundVariant::Z6Cubic => (n as i64, 5),
        BoundVariant::Z6Dense => (2 * m as i64 - 3 * n as i64, 2),
        BoundVariant::Z4 => (n as i64, 250),
        BoundVariant::Z3 => (n as i64 - 2, 12),
    };
    ceil_pow2_rational(a, b)
}

/// `ceil(2^(a/b))` with `b >= 1`; any non-positive exponent gives 1.
pub fn ceil_pow2_rational(a: i64, b: u64) -> BigUint {
    assert!(b >= 1);
    if a <= 0 {
        return BigUint::from(1u32);
    }
    let a = a as u64;
    let whole = a / b;
    let frac = a % b;
    let base = BigUint::from(1u32) << whole;
    if frac == 0 {
        return base;
    }
    // Smallest c in (base, 2*base] with c^b >= 2^a.
    let target = BigUint::from(1u32) << a;
    let mut lo = base.clone() + 1u32; // base^b < 2^a since frac > 0
    let mut hi = base << 1;
    while lo < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if mid.pow(b as u32) >= target {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    lo
}

/// Exact check `count >= ceil(2^(a/b))` without constructing the power when
/// `count` is already large.
pub fn meets_pow2_bound(count: &BigUint, a: i64, b: u64) -> bool {
    *count >= ceil_pow2_rational(a, b)
}
