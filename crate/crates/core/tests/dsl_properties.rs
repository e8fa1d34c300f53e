use proptest::prelude::*;
use radial_toeplitz::dsl::{self, DiagnosticKind};

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i32..1000).prop_map(|k| k as f64 / 8.0),
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        (1e-300f64..1e300),
    ]
}

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (0.0f64..1.0)]
}

fn scalar_text() -> impl Strategy<Value = String> {
    prop_oneof![
        real().prop_map(|x| format!("{x:?}")),
        real().prop_map(|x| format!("{x:?}i")),
        (real(), 0.0f64..1e6, any::<bool>())
            .prop_map(|(re, im, neg)| format!("{re:?}{}{im:?}i", if neg { '-' } else { '+' })),
    ]
}

fn primitive_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        unit().prop_map(|x| format!("dirac({x:?})")),
        Just("lebesgue".to_string()),
        prop::collection::vec(real(), 1..5).prop_map(|c| format!("poly({c:?})")),
        (prop::collection::vec(real(), 1..4), unit(), unit())
            .prop_filter_map("a < b", |(c, a, b)| {
                (a < b).then(|| format!("poly({c:?}, {a:?}, {b:?})"))
            }),
        ((-0.999f64..50.0), (0.0f64..50.0)).prop_map(|(p, q)| format!("jacobi({p:?}, {q:?})")),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop::collection::vec(
            (any::<bool>(), prop::option::of(scalar_text()), inner),
            1..4,
        )
        .prop_map(|terms| {
            let body = join_terms(&terms);
            format!("({body})")
        })
    })
}

fn join_terms(terms: &[(bool, Option<String>, String)]) -> String {
    let mut out = String::new();
    for (i, (minus, scalar, prim)) in terms.iter().enumerate() {
        if i > 0 {
            out.push_str(if *minus { " - " } else { " + " });
        }
        if let Some(s) = scalar {
            out.push_str(s);
            out.push('*');
        }
        out.push_str(prim);
    }
    out
}

fn measure_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        (
            any::<bool>(),
            prop::option::of(scalar_text()),
            primitive_text(),
        ),
        1..5,
    )
    .prop_map(|terms| join_terms(&terms))
}

proptest! {
    #[test]
    fn generated_measures_parse_and_reprint(src in measure_text()) {
        let first = dsl::parse(&src).map_err(|d| TestCaseError::fail(format!("{src}: {d:?}")))?;
        let printed = dsl::print(&first);
        let second = dsl::parse(&printed).map_err(|d| TestCaseError::fail(format!("{printed}: {d:?}")))?;
        prop_assert!(first.same_structure(&second), "{} vs {}", src, printed);
        prop_assert_eq!(dsl::print(&second), printed);
        prop_assert_eq!(dsl::elaborate(&first).is_ok(), dsl::elaborate(&second).is_ok());
        if let (Ok(a), Ok(b)) = (dsl::elaborate(&first), dsl::elaborate(&second)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn arbitrary_text_yields_a_tree_or_diagnostics(src in "\\PC{0,64}") {
        if let Err(diags) = dsl::parse(&src) {
            prop_assert!(!diags.is_empty());
            for d in diags {
                prop_assert!(d.span.offset + d.span.len <= src.len());
                prop_assert!(src.is_char_boundary(d.span.offset));
                let _ = d.render(&src);
            }
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..128)) {
        let src = String::from_utf8_lossy(&bytes);
        let _ = dsl::parse(&src);
    }

    #[test]
    fn out_of_range_dirac_is_a_domain_error(x in prop_oneof![1.0f64..1e6, -1e6f64..-1e-9]) {
        let src = format!("dirac({x:?})");
        let diags = dsl::parse(&src).unwrap_err();
        prop_assert_eq!(diags[0].kind, DiagnosticKind::Domain);
        prop_assert_eq!(diags[0].span.offset, 6);
        prop_assert_eq!(diags[0].span.len, src.len() - 7);
    }
}

#[test]
fn diagnostic_rendering_marks_the_span() {
    let diags = dsl::parse("lebesgue +\n  dirac(1.5)").unwrap_err();
    let text = diags[0].render("lebesgue +\n  dirac(1.5)");
    assert_eq!(
        text,
        "2:9: dirac location must lie in [0, 1), got 1.5\n    dirac(1.5)\n          ^^^"
    );
}
