use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// A literal real with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num {
    pub value: f64,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarForm {
    Real,
    Imaginary,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar {
    pub re: f64,
    pub im: f64,
    pub form: ScalarForm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Dirac {
        x: Num,
        span: Span,
    },
    Lebesgue {
        span: Span,
    },
    Poly {
        coeffs: Vec<Num>,
        support: Option<(Num, Num)>,
        span: Span,
    },
    Jacobi {
        p: Num,
        q: Num,
        span: Span,
    },
    Group {
        inner: Box<Measure>,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Scaled {
        scalar: Scalar,
        primitive: Primitive,
    },
    Plain(Primitive),
    /// A bare scalar `c`, read as `c*lebesgue`.
    Constant(Scalar),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedTerm {
    pub sign: Sign,
    pub term: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub terms: Vec<SignedTerm>,
    pub span: Span,
}

impl Num {
    fn erased(self) -> Num {
        Num {
            span: Span::default(),
            ..self
        }
    }
}

impl Scalar {
    fn erased(self) -> Scalar {
        Scalar {
            span: Span::default(),
            ..self
        }
    }
}

impl Primitive {
    pub fn span(&self) -> Span {
        match self {
            Primitive::Dirac { span, .. }
            | Primitive::Lebesgue { span }
            | Primitive::Poly { span, .. }
            | Primitive::Jacobi { span, .. }
            | Primitive::Group { span, .. } => *span,
        }
    }

    fn erased(&self) -> Primitive {
        let span = Span::default();
        match self {
            Primitive::Dirac { x, .. } => Primitive::Dirac {
                x: x.erased(),
                span,
            },
            Primitive::Lebesgue { .. } => Primitive::Lebesgue { span },
            Primitive::Poly {
                coeffs, support, ..
            } => Primitive::Poly {
                coeffs: coeffs.iter().map(|c| c.erased()).collect(),
                support: support.map(|(a, b)| (a.erased(), b.erased())),
                span,
            },
            Primitive::Jacobi { p, q, .. } => Primitive::Jacobi {
                p: p.erased(),
                q: q.erased(),
                span,
            },
            Primitive::Group { inner, .. } => Primitive::Group {
                inner: Box::new(inner.without_spans()),
                span,
            },
        }
    }
}

impl Term {
    fn erased(&self) -> Term {
        match self {
            Term::Scaled { scalar, primitive } => Term::Scaled {
                scalar: scalar.erased(),
                primitive: primitive.erased(),
            },
            Term::Plain(p) => Term::Plain(p.erased()),
            Term::Constant(s) => Term::Constant(s.erased()),
        }
    }
}

impl Measure {
    /// The same tree with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> Measure {
        Measure {
            terms: self
                .terms
                .iter()
                .map(|t| SignedTerm {
                    sign: t.sign,
                    term: t.term.erased(),
                })
                .collect(),
            span: Span::default(),
        }
    }

    pub fn same_structure(&self, other: &Measure) -> bool {
        self.without_spans() == other.without_spans()
    }
}
