use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KappaError {
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no items to compare")]
    Empty,
    #[error("expected agreement is 1 but the raters disagree")]
    Degenerate,
}

/// Cohen's kappa between two raters labelling the same items in the same order.
pub fn kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let mut margins: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    for x in a {
        margins.entry(x).or_default().0 += 1;
    }
    for y in b {
        margins.entry(y).or_default().1 += 1;
    }
    let p_o = agree / n;
    let p_e: f64 = margins.values().map(|&(ca, cb)| ca as f64 * cb as f64).sum::<f64>() / (n * n);
    if (1.0 - p_e).abs() < 1e-15 {
        return if p_o == 1.0 { Ok(1.0) } else { Err(KappaError::Degenerate) };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_one() {
        let a: Vec<char> = "abcdefghij".chars().cycle().take(54).collect();
        assert_eq!(kappa(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn chance_agreement_is_zero() {
        let k = kappa(&['a', 'a', 'b', 'b'], &['a', 'b', 'a', 'b']).unwrap();
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn single_category() {
        assert_eq!(kappa(&['a', 'a'], &['a', 'a']).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(kappa(&['a'], &['a', 'b']), Err(KappaError::LengthMismatch(1, 2)));
        assert_eq!(kappa::<char>(&[], &[]), Err(KappaError::Empty));
    }

    #[test]
    fn matches_hand_value() {
        // p_o = 0.8; marginals a:(3,2) b:(2,3) -> p_e = 12/25 = 0.48; kappa = 0.32/0.52
        let k = kappa(&['a', 'a', 'a', 'b', 'b'], &['a', 'a', 'b', 'b', 'b']).unwrap();
        assert!((k - 0.32 / 0.52).abs() < 1e-12);
    }
}
