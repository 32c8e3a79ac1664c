use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::fusion::FusionRule;

/// Exact arithmetic facts about the length-symbol values at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdReport {
    pub level: u32,
    /// Symbol values in declaration order.
    pub values: Vec<BigInt>,
    pub gcd: BigInt,
    /// `(prime, residues of the values)` for each requested modulus.
    pub residues: Vec<(u64, Vec<u64>)>,
}

impl GcdReport {
    pub fn coprime(&self) -> bool {
        self.gcd == BigInt::from(1)
    }

    pub fn residues_mod(&self, p: u64) -> Option<&[u64]> {
        self.residues.iter().find(|(q, _)| *q == p).map(|(_, r)| r.as_slice())
    }
}

/// Gcd of the symbol values at level `n` and their residues modulo each of
/// `moduli` (3 is always included).
pub fn gcd_report(rule: &FusionRule, n: u32, moduli: &[u64]) -> GcdReport {
    let values = rule.symbol_values(n);
    let gcd = values.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    let mut ps: Vec<u64> = moduli.iter().copied().filter(|&p| p > 0).collect();
    if !ps.contains(&3) {
        ps.insert(0, 3);
    }
    let residues = ps
        .into_iter()
        .map(|p| {
            let m = BigInt::from(p);
            let r = values
                .iter()
                .map(|v| v.mod_floor(&m).try_into().expect("residue fits in u64"))
                .collect();
            (p, r)
        })
        .collect();
    GcdReport { level: n, values, gcd, residues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn small_levels() {
        let rule = bundled::frank_dpv();
        let r = gcd_report(&rule, 2, &[]);
        assert_eq!(r.values, [BigInt::from(7), BigInt::from(4)]);
        assert!(r.coprime());
        assert_eq!(r.residues_mod(3), Some(&[1u64, 1][..]));
        let r = gcd_report(&rule, 9, &[5]);
        assert_eq!(r.values, [BigInt::from(2683), BigInt::from(1159)]);
        assert!(r.coprime());
        assert_eq!(r.residues_mod(5), Some(&[3u64, 4][..]));
        assert!(gcd_report(&rule, 0, &[]).coprime());
    }
}
