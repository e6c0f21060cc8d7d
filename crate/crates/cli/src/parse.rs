//! Text forms accepted on the command line.

use lightcone::{ComplexPoint2, RealPoint2, Region};

fn pair(s: &str) -> Result<RealPoint2, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"));
    let p = RealPoint2::new(num(a)?, num(b)?);
    if !p.is_finite() {
        return Err(format!("non-finite coordinate in {s:?}"));
    }
    Ok(p)
}

/// `"x0,x1"`.
pub fn real_point(s: &str) -> Result<RealPoint2, String> {
    pair(s)
}

/// `"re0,re1;im0,im1"`, or `"re0,re1"` for a real point.
pub fn complex_point(s: &str) -> Result<ComplexPoint2, String> {
    match s.split_once(';') {
        Some((re, im)) => Ok(ComplexPoint2::from_parts(pair(re)?, pair(im)?)),
        None => Ok(pair(s)?.complexify()),
    }
}

/// `"lo,hi"` with `lo < hi`.
pub fn range(s: &str) -> Result<(f64, f64), String> {
    let p = pair(s)?;
    if !(p.t < p.x) {
        return Err(format!("range {s:?} must have lo < hi"));
    }
    Ok((p.t, p.x))
}

/// A number or `inf`.
pub fn mass(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        v => v.parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}")),
    }
}

/// Region JSON, inline or as `@path`.
pub fn region_text(s: &str) -> Result<String, String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(s.to_string()),
    }
}

pub fn region(s: &str) -> Result<Region, lightcone::Error> {
    Region::from_json(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        let z = complex_point("2,0;0,1").unwrap();
        assert_eq!(z.re(), RealPoint2::new(2.0, 0.0));
        assert_eq!(z.im(), RealPoint2::new(0.0, 1.0));
        assert_eq!(complex_point(" -0.5 , 0 ").unwrap().im(), RealPoint2::ORIGIN);
        assert!(complex_point("1;2").is_err());
        assert!(real_point("1,2,3").is_err());
        assert!(real_point("nan,1").is_err());
        assert_eq!(range("-1,2").unwrap(), (-1.0, 2.0));
        assert!(range("2,1").is_err());
        assert_eq!(mass("inf").unwrap(), f64::INFINITY);
        assert_eq!(mass("2.5").unwrap(), 2.5);
    }
}
