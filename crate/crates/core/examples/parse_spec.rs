//! Loading a spec document, evaluating component expressions, and writing
//! the explicit-samples form back out.

use cframe::framespec::{evaluate, load_spec, materialize, parse_expr, write_spec};

const DOC: &str = r#"
[frame]
dim = 2
label = "bump"
components = ["2*s*(1-s)", "sqrt(s) - 1/2"]

[measure]
kind = uniform
interval = [0.0, 1.0]
order = 4

[controller]
V = [[2, 0], [0, 1]]
"#;

fn main() -> cframe::Result<()> {
    let e = parse_expr("1 + 2*3^2")?;
    println!("{e} = {}", evaluate(&e, 0.0)?);
    let e = parse_expr("-2^2")?;
    println!("{e} = {}", evaluate(&e, 0.0)?);

    let spec = load_spec(DOC)?;
    let (frame, v) = materialize(&spec)?;
    print!("{}", write_spec(&frame, v.as_ref(), spec.label.as_deref()));

    match load_spec(&DOC.replace("[2, 0], [0, 1]", "[2, 0]")) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
