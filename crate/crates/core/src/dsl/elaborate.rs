use num_complex::Complex64;

use super::ast::{Measure, Primitive, Scalar, Sign, Term};
use super::{Diagnostic, DiagnosticKind, Span};
use crate::measure::{MeasurePrimitive, RadialMeasure};

type Flat = Vec<(Complex64, MeasurePrimitive, Span)>;

/// Flattens a parsed tree into a measure, merging identical primitives.
///
/// Primitive parameters were checked by the parser; what remains is that
/// products of nested scalars stay finite.
pub fn elaborate(ast: &Measure) -> Result<RadialMeasure, Vec<Diagnostic>> {
    let mut terms = Vec::new();
    flatten(ast, Complex64::new(1.0, 0.0), &mut terms);
    let overflow: Vec<Diagnostic> = terms
        .iter()
        .filter(|(c, _, _)| !c.is_finite())
        .map(|(_, _, span)| Diagnostic {
            kind: DiagnosticKind::Domain,
            message: "coefficient of this term is not a finite number".into(),
            span: *span,
            expected: Vec::new(),
        })
        .collect();
    if !overflow.is_empty() {
        return Err(overflow);
    }
    Ok(RadialMeasure::new(
        terms.into_iter().map(|(c, p, _)| (c, p)),
    ))
}

fn flatten(ast: &Measure, factor: Complex64, out: &mut Flat) {
    for t in &ast.terms {
        let sign = match t.sign {
            Sign::Plus => factor,
            Sign::Minus => -factor,
        };
        match &t.term {
            Term::Scaled { scalar, primitive } => push(primitive, sign * value(scalar), out),
            Term::Plain(p) => push(p, sign, out),
            Term::Constant(s) => out.push((sign * value(s), MeasurePrimitive::lebesgue(), s.span)),
        }
    }
}

fn value(s: &Scalar) -> Complex64 {
    Complex64::new(s.re, s.im)
}

fn push(p: &Primitive, coeff: Complex64, out: &mut Flat) {
    let primitive = match p {
        Primitive::Dirac { x, .. } => MeasurePrimitive::Dirac { x: x.value },
        Primitive::Lebesgue { .. } => MeasurePrimitive::lebesgue(),
        Primitive::Jacobi { p, q, .. } => MeasurePrimitive::Jacobi {
            p: p.value,
            q: q.value,
        },
        Primitive::Poly {
            coeffs, support, ..
        } => {
            let (a, b) = support.map_or((0.0, 1.0), |(a, b)| (a.value, b.value));
            MeasurePrimitive::Poly {
                coeffs: coeffs.iter().map(|c| c.value).collect(),
                a,
                b,
            }
        }
        Primitive::Group { inner, .. } => return flatten(inner, coeff, out),
    };
    out.push((coeff, primitive, p.span()));
}

#[cfg(test)]
mod tests {
    use super::super::parse_measure;
    use super::*;

    #[test]
    fn merges_and_cancels() {
        let m = parse_measure("dirac(0.3) + dirac(0.3)").unwrap();
        assert_eq!(m.terms().len(), 1);
        assert_eq!(m.terms()[0].coeff, Complex64::new(2.0, 0.0));
        let m = parse_measure("lebesgue - lebesgue").unwrap();
        assert!(m.is_zero());
        assert_eq!(m.total_mass(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grammar_example() {
        let m = parse_measure("2*dirac(0.5) - 0.5i*poly([0,1])").unwrap();
        let expected = RadialMeasure::new([
            (Complex64::new(2.0, 0.0), MeasurePrimitive::Dirac { x: 0.5 }),
            (Complex64::new(0.0, -0.5), MeasurePrimitive::lebesgue()),
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn positivity_certification() {
        assert!(!parse_measure("poly([-1,2])").unwrap().is_positive());
        assert!(parse_measure("poly([1,0,3],0.2,0.7)")
            .unwrap()
            .is_positive());
        assert!(parse_measure("3").unwrap().is_positive());
        assert!(!parse_measure("1i").unwrap().is_positive());
    }

    #[test]
    fn overflowing_products_are_rejected() {
        let src = "1e200*(1e200*dirac(0.5))";
        let errs = super::super::parse(src)
            .map(|ast| elaborate(&ast))
            .unwrap()
            .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(
            &src[errs[0].span.offset..errs[0].span.offset + errs[0].span.len],
            "dirac(0.5)"
        );
        assert_eq!(parse_measure(src).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn groups_distribute() {
        let m = parse_measure("2i*(dirac(0.1) - 3)").unwrap();
        let expected = RadialMeasure::new([
            (Complex64::new(0.0, 2.0), MeasurePrimitive::Dirac { x: 0.1 }),
            (Complex64::new(0.0, -6.0), MeasurePrimitive::lebesgue()),
        ]);
        assert_eq!(m, expected);
    }
}
