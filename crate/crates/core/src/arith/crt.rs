use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{ArithError, ResidueClass};

/// Combines congruences into one class modulo the lcm of the moduli.
///
/// Moduli need not be coprime. On a conflict the error names two input
/// classes that are incompatible on their own.
pub fn crt_solve(classes: &[ResidueClass]) -> Result<ResidueClass, ArithError> {
    let (first, rest) = classes
        .split_first()
        .ok_or(ArithError::InvalidArgument("crt_solve needs at least one class"))?;
    let mut acc = first.clone();
    for (idx, next) in rest.iter().enumerate() {
        acc = match merge(&acc, next) {
            Some(c) => c,
            None => {
                let culprit = classes[..=idx]
                    .iter()
                    .find(|c| merge(c, next).is_none())
                    .expect("pairwise compatibility implies global compatibility");
                return Err(ArithError::Inconsistent { first: culprit.clone(), second: next.clone() });
            }
        };
    }
    Ok(acc)
}

fn merge(a: &ResidueClass, b: &ResidueClass) -> Option<ResidueClass> {
    let (r1, m1) = (BigInt::from(a.residue().clone()), BigInt::from(a.modulus().clone()));
    let (r2, m2) = (BigInt::from(b.residue().clone()), BigInt::from(b.modulus().clone()));
    let ext = m1.extended_gcd(&m2);
    let g = ext.gcd;
    let diff = &r2 - &r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let lcm = &m1 / &g * &m2;
    // r1 + m1 * t with t = (diff / g) * x mod (m2 / g)
    let t = (&diff / &g * ext.x).mod_floor(&(&m2 / &g));
    let r = (r1 + m1 * t).mod_floor(&lcm);
    ResidueClass::new(r.to_biguint()?, lcm.to_biguint()?)
}
