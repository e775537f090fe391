//! Newton polygons, root valuations, and the closed-form p-adic entropy and
//! scale of a rational matrix.
//!
//! A segment of slope `s` and horizontal length `ℓ` in the lower convex hull
//! of `(i, v_p(a_i))` accounts for `ℓ` roots of valuation `-s` in a splitting
//! field. Roots of norm greater than one are those of negative valuation, so
//! the entropy exponent is the total rise of the positive-slope segments.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::matrix::{charpoly, MonicPolynomial, RationalMatrix};
use crate::padic::{format_rational, rational_to_exponent, vp_finite, EntropyValue, Prime, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(with = "crate::padic::serde_rational")]
    pub slope: Q,
    pub length: u64,
}

impl Segment {
    /// `slope · length`, always an integer.
    pub fn rise(&self) -> Q {
        &self.slope * Q::from_integer(self.length.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    /// Left to right, slopes strictly increasing.
    pub segments: Vec<Segment>,
    /// Number of roots equal to zero (the lowest nonzero coefficient index).
    pub zero_root_multiplicity: u64,
}

impl NewtonPolygon {
    pub fn degree(&self) -> u64 {
        self.zero_root_multiplicity + self.segments.iter().map(|s| s.length).sum::<u64>()
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let segs: Vec<String> = self
            .segments
            .iter()
            .map(|s| format!("(slope {}, length {})", s.slope, s.length))
            .collect();
        write!(f, "[{}]", segs.join(", "))?;
        if self.zero_root_multiplicity > 0 {
            write!(f, " + {} zero root(s)", self.zero_root_multiplicity)?;
        }
        Ok(())
    }
}

/// Lower convex hull of `(i, v_p(a_i))` over the nonzero coefficients.
pub fn newton_polygon(f: &MonicPolynomial, p: Prime) -> NewtonPolygon {
    let n = f.degree();
    let points: Vec<(i64, i64)> = (0..=n)
        .filter_map(|i| {
            let c = f.coeff(i);
            (!c.is_zero()).then(|| (i as i64, vp_finite(&c, p)))
        })
        .collect();
    let zero_roots = points[0].0 as u64;

    // monotone chain; collinear middle points are dropped so each segment is maximal
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(points.len());
    for &pt in &points {
        while hull.len() >= 2 {
            let (ax, ay) = hull[hull.len() - 2];
            let (bx, by) = hull[hull.len() - 1];
            let cross = (bx - ax) * (pt.1 - ay) - (by - ay) * (pt.0 - ax);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let segments = hull
        .windows(2)
        .map(|w| {
            let (ax, ay) = w[0];
            let (bx, by) = w[1];
            Segment {
                slope: Q::new((by - ay).into(), (bx - ax).into()),
                length: (bx - ax) as u64,
            }
        })
        .collect();
    NewtonPolygon {
        segments,
        zero_root_multiplicity: zero_roots,
    }
}

/// Multiset of root valuations; zero roots are counted separately at `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootValuations {
    /// Ascending by valuation.
    pub finite: Vec<(Q, u64)>,
    pub zero_roots: u64,
}

impl RootValuations {
    pub fn degree(&self) -> u64 {
        self.zero_roots + self.finite.iter().map(|(_, m)| m).sum::<u64>()
    }
}

impl Serialize for RootValuations {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            valuation: String,
            multiplicity: u64,
        }
        let mut entries: Vec<Entry> = self
            .finite
            .iter()
            .map(|(v, m)| Entry {
                valuation: format_rational(v),
                multiplicity: *m,
            })
            .collect();
        if self.zero_roots > 0 {
            entries.push(Entry {
                valuation: "+inf".into(),
                multiplicity: self.zero_roots,
            });
        }
        entries.serialize(s)
    }
}

impl fmt::Display for RootValuations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .finite
            .iter()
            .map(|(v, m)| format!("{v} (x{m})"))
            .collect();
        if self.zero_roots > 0 {
            parts.push(format!("+inf (x{})", self.zero_roots));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn root_valuations(f: &MonicPolynomial, p: Prime) -> RootValuations {
    let poly = newton_polygon(f, p);
    let mut finite: Vec<(Q, u64)> = poly
        .segments
        .iter()
        .map(|s| (-s.slope.clone(), s.length))
        .collect();
    finite.reverse();
    RootValuations {
        finite,
        zero_roots: poly.zero_root_multiplicity,
    }
}

/// Exponent `m` with `h = m·log p`: total rise of the positive-slope segments.
pub fn entropy_exponent(f: &MonicPolynomial, p: Prime) -> u64 {
    let rise: Q = newton_polygon(f, p)
        .segments
        .iter()
        .filter(|s| s.slope.is_positive())
        .map(Segment::rise)
        .sum();
    rational_to_exponent(&rise).expect("segment rises are non-negative integers")
}

/// Sum of `log |λ|_p` over the eigenvalues of norm greater than one.
pub fn yuzvinski_entropy(a: &RationalMatrix, p: Prime) -> Result<EntropyValue> {
    let f = charpoly(a)?;
    Ok(EntropyValue::log_p(p, entropy_exponent(&f, p)))
}

/// Product of `|λ|_p` over the eigenvalues of norm greater than one.
pub fn yuzvinski_scale(a: &RationalMatrix, p: Prime) -> Result<BigUint> {
    let f = charpoly(a)?;
    Ok(p.pow_uint(entropy_exponent(&f, p)))
}
