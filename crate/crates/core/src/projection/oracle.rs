//! Exact rational reference for the projection, used to check the floating
//! point path. Dense triple loop, no sparsity, no shared code with
//! [`super::project_with`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::counting::CountingError;
use crate::model::{CountingScheme, EntityId, PaperRecord};

pub type Rational = BigRational;

/// Dense `I × J` incidence matrix with exact entries, rows sorted by
/// `(level, id)` and columns in record order.
///
/// Equal splits are exact (`1/k`). Custom weights are taken at the exact
/// value of their binary floating point representation.
pub fn rational_incidence(
    records: &[PaperRecord],
    scheme: CountingScheme,
) -> Result<(Vec<EntityId>, Vec<Vec<Rational>>), CountingError> {
    let mut index: BTreeMap<&EntityId, usize> = BTreeMap::new();
    for r in records {
        for c in r.contributors() {
            index.insert(c, 0);
        }
    }
    for (i, slot) in index.values_mut().enumerate() {
        *slot = i;
    }
    let mut dense = vec![vec![Rational::zero(); records.len()]; index.len()];
    for (j, r) in records.iter().enumerate() {
        let k = r.contributors().len();
        for (x, c) in r.contributors().iter().enumerate() {
            let credit = match scheme {
                CountingScheme::Full => Rational::one(),
                CountingScheme::FractionalEqual => Rational::new(BigInt::one(), BigInt::from(k)),
                CountingScheme::FractionalCustom => {
                    let w = r
                        .credit_override()
                        .ok_or_else(|| CountingError::MissingOverride(r.paper_id().to_string()))?;
                    Rational::from_float(w[x]).expect("weights are finite")
                }
            };
            dense[index[c]][j] = credit;
        }
    }
    let rows = index.into_keys().cloned().collect();
    Ok((rows, dense))
}

/// `B = A·Aᵀ` by the textbook triple loop in exact arithmetic.
#[allow(clippy::needless_range_loop)]
pub fn oracle_project(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut b = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Rational::zero();
            for k in 0..m {
                acc += &a[i][k] * &a[j][k];
            }
            b[i][j] = acc;
        }
    }
    b
}

pub fn grand_total(m: &[Vec<Rational>]) -> Rational {
    m.iter().flatten().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn to_f64(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    use num_traits::ToPrimitive;
    m.iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}
