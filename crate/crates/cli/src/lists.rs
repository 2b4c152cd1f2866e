//! Parsers for list-valued flags: `0,1,2.5`, ranges `a..b[:steps]`, and
//! quantum-number pairs `1:2`.

pub const DEFAULT_RANGE_STEPS: usize = 50;

/// Comma-separated reals, where each item is a number or `a..b[:steps]`
/// (`steps` equal intervals, both ends included). Several flag
/// occurrences concatenate.
pub fn parse_reals(items: &[String]) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty list item".into());
        }
        if let Some((a, rest)) = item.split_once("..") {
            let (b, steps) = match rest.split_once(':') {
                Some((b, s)) => (b, parse_count(s)?),
                None => (rest, DEFAULT_RANGE_STEPS),
            };
            let (a, b) = (parse_real(a)?, parse_real(b)?);
            if steps == 0 {
                return Err(format!("range '{item}' needs at least one step"));
            }
            out.extend((0..=steps).map(|i| {
                if i == steps {
                    b
                } else {
                    a + (b - a) * i as f64 / steps as f64
                }
            }));
        } else {
            out.push(parse_real(item)?);
        }
    }
    Ok(out)
}

/// Comma-separated positive integers, with inclusive ranges `a..b`.
pub fn parse_quantum_numbers(items: &[String]) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let (a, b) = (parse_count(a)?, parse_count(b)?);
            if a > b {
                return Err(format!("empty range '{item}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_count(item)?);
        }
    }
    if out.contains(&0) {
        return Err("quantum numbers start at 1".into());
    }
    Ok(out)
}

/// Comma-separated pairs `n1:n2`.
pub fn parse_pairs(items: &[String]) -> Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let (a, b) = item
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("expected n1:n2, got '{item}'"))?;
        let (a, b) = (parse_count(a)?, parse_count(b)?);
        if a == 0 || b == 0 {
            return Err("quantum numbers start at 1".into());
        }
        out.push((a, b));
    }
    Ok(out)
}

fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v: f64 = match s {
        "e-1" => std::f64::consts::E - 1.0,
        _ => s.parse().map_err(|_| format!("not a number: '{s}'"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: '{s}'"))
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("not a non-negative integer: '{}'", s.trim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn reals_and_ranges() {
        assert_eq!(parse_reals(&v(&["0,1", "2.5"])).unwrap(), vec![0.0, 1.0, 2.5]);
        let r = parse_reals(&v(&["0..1:4"])).unwrap();
        assert_eq!(r, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let r = parse_reals(&v(&["0..5"])).unwrap();
        assert_eq!(r.len(), DEFAULT_RANGE_STEPS + 1);
        assert_eq!(*r.last().unwrap(), 5.0);
        assert_eq!(parse_reals(&v(&["e-1"])).unwrap(), vec![std::f64::consts::E - 1.0]);
        assert_eq!(parse_reals(&v(&["-0.5"])).unwrap(), vec![-0.5]);
        assert!(parse_reals(&v(&["x"])).is_err());
        assert!(parse_reals(&v(&["0..1:0"])).is_err());
        assert!(parse_reals(&v(&["1,,2"])).is_err());
        assert!(parse_reals(&v(&["inf"])).is_err());
    }

    #[test]
    fn quantum_numbers_and_pairs() {
        assert_eq!(parse_quantum_numbers(&v(&["1,3..5"])).unwrap(), vec![1, 3, 4, 5]);
        assert!(parse_quantum_numbers(&v(&["0"])).is_err());
        assert!(parse_quantum_numbers(&v(&["3..1"])).is_err());
        assert_eq!(parse_pairs(&v(&["1:1,1:2"])).unwrap(), vec![(1, 1), (1, 2)]);
        assert!(parse_pairs(&v(&["1"])).is_err());
        assert!(parse_pairs(&v(&["0:1"])).is_err());
    }
}
