use num_bigint::BigInt;
use num_traits::One;

/// Grid terms: `1000`, `10^4`, or `10^1..10^5` for every power in between.
pub fn parse_grid(spec: &str) -> Result<Vec<BigInt>, String> {
    let mut out = Vec::new();
    for term in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match term.split_once("..") {
            Some((a, b)) => {
                let (base_a, ea) = power(a)?;
                let (base_b, eb) = power(b)?;
                if base_a != base_b || ea > eb {
                    return Err(format!("range {term} needs a common base and increasing exponents"));
                }
                for e in ea..=eb {
                    out.push(num_traits::pow(base_a.clone(), e as usize));
                }
            }
            None => {
                let (base, e) = power(term)?;
                out.push(num_traits::pow(base, e as usize));
            }
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    if out.iter().any(|q| *q < BigInt::one()) {
        return Err("grid values must be positive".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn power(term: &str) -> Result<(BigInt, u32), String> {
    let bad = || format!("cannot parse grid term {term:?}");
    match term.split_once('^') {
        Some((b, e)) => Ok((b.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?)),
        None => Ok((term.parse().map_err(|_| bad())?, 1)),
    }
}

/// `10, 100, …` up to `q_max`, plus `q_max` itself.
pub fn decades(q_max: &BigInt) -> Vec<BigInt> {
    let ten = BigInt::from(10);
    let mut out = Vec::new();
    let mut q = ten.clone();
    while q < *q_max {
        out.push(q.clone());
        q *= &ten;
    }
    out.push(q_max.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g = parse_grid("10^1..10^3, 7, 2^4").unwrap();
        let want: Vec<BigInt> = [7, 10, 16, 100, 1000].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(g, want);
        assert!(parse_grid("x").is_err());
        assert!(parse_grid("10^3..10^1").is_err());
        assert!(parse_grid("0").is_err());
    }

    #[test]
    fn decade_grid() {
        let g = decades(&BigInt::from(2500));
        assert_eq!(g.len(), 4);
        assert_eq!(g[3], BigInt::from(2500));
    }
}
