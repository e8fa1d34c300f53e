//! Deterministic CSV formatting.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! `.` as decimal separator and `\n` line endings, so identical runs
//! produce byte-identical files.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::berezin::BerezinProfile;
use crate::spectral::SpectralSequence;

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# key=value ...` provenance line.
pub fn header_comment(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", body.join(" "))
}

/// Rows `n,re,im[,method]`; with several sequences the rows are grouped by `n`.
pub fn write_gamma_csv<W: Write + ?Sized>(
    out: &mut W,
    header: &str,
    seqs: &[SpectralSequence],
    with_method: bool,
) -> io::Result<()> {
    out.write_all(header.as_bytes())?;
    writeln!(
        out,
        "{}",
        if with_method {
            "n,re,im,method"
        } else {
            "n,re,im"
        }
    )?;
    let Some(first) = seqs.first() else {
        return Ok(());
    };
    for (i, n) in first.indices().enumerate() {
        for seq in seqs {
            let z = seq.values[i];
            write!(out, "{n},{},{}", format_number(z.re), format_number(z.im))?;
            if with_method {
                write!(out, ",{}", seq.method.name())?;
            }
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Rows `r,re,im`.
pub fn write_kappa_csv<W: Write + ?Sized>(
    out: &mut W,
    header: &str,
    rows: &[(f64, Complex64)],
) -> io::Result<()> {
    out.write_all(header.as_bytes())?;
    writeln!(out, "r,re,im")?;
    for (r, z) in rows {
        writeln!(
            out,
            "{},{},{}",
            format_number(*r),
            format_number(z.re),
            format_number(z.im)
        )?;
    }
    Ok(())
}

/// Rows `a,re,im[,method]`, grouped by `a`.
pub fn write_berezin_csv<W: Write + ?Sized>(
    out: &mut W,
    header: &str,
    profiles: &[BerezinProfile],
    with_method: bool,
) -> io::Result<()> {
    out.write_all(header.as_bytes())?;
    writeln!(
        out,
        "{}",
        if with_method {
            "a,re,im,method"
        } else {
            "a,re,im"
        }
    )?;
    let Some(first) = profiles.first() else {
        return Ok(());
    };
    for i in 0..first.points.len() {
        for profile in profiles {
            let p = &profile.points[i];
            write!(
                out,
                "{},{},{}",
                format_number(p.a),
                format_number(p.value.re),
                format_number(p.value.im)
            )?;
            if with_method {
                write!(out, ",{}", profile.method.name())?;
            }
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralMethod;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.1), "-1.0000000000000001e-1");
        assert_eq!(format_number(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn gamma_rows() {
        let seq = SpectralSequence {
            start: 0,
            values: vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -1.0)],
            method: SpectralMethod::Moments,
            measure: "lebesgue".into(),
        };
        let mut buf = Vec::new();
        write_gamma_csv(
            &mut buf,
            &header_comment(&[("n-max", "1".into())]),
            &[seq],
            true,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# n-max=1\nn,re,im,method\n0,1.0000000000000000e0,0.0000000000000000e0,moments\n\
             1,5.0000000000000000e-1,-1.0000000000000000e0,moments\n"
        );
    }
}
