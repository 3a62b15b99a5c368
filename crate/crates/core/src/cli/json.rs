use serde_json::{json, Value};

use crate::linalg::{Field, Operator, Scalar};

/// Rounds to 15 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    json!(rounded)
}

fn scalar(z: Scalar, field: Field) -> Value {
    match field {
        Field::Real => num(z.re),
        Field::Complex => json!([num(z.re), num(z.im)]),
    }
}

/// Rows of entries; complex entries are `[re, im]`.
pub fn matrix(m: &Operator, field: Field) -> Value {
    let field = field.join(m.field());
    let n = m.dim();
    let rows: Vec<Value> = (0..n)
        .map(|i| Value::Array((0..n).map(|j| scalar(m.get(i, j), field)).collect()))
        .collect();
    Value::Array(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(num(1.0 / 3.0).to_string(), "0.333333333333333");
        assert_eq!(num(2.0).to_string(), "2.0");
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn complex_entries_are_pairs() {
        let m = Operator::from_rows(&[[Scalar::new(1.0, 0.0), Scalar::new(0.0, -1.0)], [Scalar::new(0.0, 1.0), Scalar::new(2.0, 0.0)]]);
        assert_eq!(matrix(&m, Field::Real).to_string(), "[[[1.0,0.0],[0.0,-1.0]],[[0.0,1.0],[2.0,0.0]]]");
    }
}
