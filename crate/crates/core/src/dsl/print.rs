use std::fmt::Write;

use super::ast::{Measure, Primitive, Scalar, ScalarForm, Sign, Term};

/// Normal-form text of a tree. Reals use the shortest representation that
/// reads back to the same double, so parsing the output reproduces the tree.
pub fn print(measure: &Measure) -> String {
    let mut out = String::new();
    write_measure(&mut out, measure);
    out
}

fn write_measure(out: &mut String, measure: &Measure) {
    for (i, t) in measure.terms.iter().enumerate() {
        match (i, t.sign) {
            (0, Sign::Plus) => {}
            (0, Sign::Minus) => out.push('-'),
            (_, Sign::Plus) => out.push_str(" + "),
            (_, Sign::Minus) => out.push_str(" - "),
        }
        match &t.term {
            Term::Scaled { scalar, primitive } => {
                write_scalar(out, scalar);
                out.push('*');
                write_primitive(out, primitive);
            }
            Term::Plain(p) => write_primitive(out, p),
            Term::Constant(s) => write_scalar(out, s),
        }
    }
}

fn write_scalar(out: &mut String, s: &Scalar) {
    let _ = match s.form {
        ScalarForm::Real => write!(out, "{:?}", s.re),
        ScalarForm::Imaginary => write!(out, "{:?}i", s.im),
        ScalarForm::Complex => {
            let op = if s.im.is_sign_negative() { '-' } else { '+' };
            write!(out, "{:?}{op}{:?}i", s.re, s.im.abs())
        }
    };
}

fn write_primitive(out: &mut String, p: &Primitive) {
    let _ = match p {
        Primitive::Dirac { x, .. } => write!(out, "dirac({:?})", x.value),
        Primitive::Lebesgue { .. } => write!(out, "lebesgue"),
        Primitive::Jacobi { p, q, .. } => write!(out, "jacobi({:?}, {:?})", p.value, q.value),
        Primitive::Poly {
            coeffs, support, ..
        } => {
            out.push_str("poly([");
            for (i, c) in coeffs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{:?}", c.value);
            }
            out.push(']');
            if let Some((a, b)) = support {
                let _ = write!(out, ", {:?}, {:?}", a.value, b.value);
            }
            write!(out, ")")
        }
        Primitive::Group { inner, .. } => {
            out.push('(');
            write_measure(out, inner);
            write!(out, ")")
        }
    };
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn normal_form() {
        let m = parse("2*dirac(0.5)-0.5i*poly([0,1])").unwrap();
        assert_eq!(print(&m), "2.0*dirac(0.5) - 0.5i*poly([0.0, 1.0])");
        let m = parse("-(1-2i*lebesgue + 3)").unwrap();
        assert_eq!(print(&m), "-(1.0-2.0i*lebesgue + 3.0)");
    }

    #[test]
    fn reprint_is_stable() {
        for src in [
            "1e-300*dirac(0.1)",
            "poly([1,0,3],0.2,0.7) + -0.0i",
            "0.1+0.2",
        ] {
            let once = parse(src).unwrap();
            let again = parse(&print(&once)).unwrap();
            assert!(once.same_structure(&again), "{src}");
        }
    }
}
