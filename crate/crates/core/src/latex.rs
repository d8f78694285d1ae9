//! LaTeX rendering of rational functions, matrices, operators and reports.

use num_traits::{One, Signed};

use crate::exact::{rat::fmt_rat, MPoly, Rat, RatFunc, Var};
use crate::linalg::Mat;
use crate::ore::OreOp;
use crate::report::VerificationReport;

fn latex_rat_abs(c: &Rat) -> String {
    let a = c.abs();
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

fn latex_monomial(e: &[u32; 4]) -> String {
    let mut s = String::new();
    for v in Var::ALL {
        match e[v.index()] {
            0 => {}
            1 => s.push_str(v.name()),
            k => s.push_str(&format!("{}^{{{k}}}", v.name())),
        }
    }
    s
}

pub fn latex_poly(p: &MPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = latex_monomial(e);
        if mono.is_empty() {
            out.push_str(&latex_rat_abs(c));
        } else if c.abs().is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&latex_rat_abs(c));
            out.push_str(&mono);
        }
    }
    out
}

pub fn latex_ratfunc(f: &RatFunc) -> String {
    if f.is_polynomial() {
        return latex_poly(f.num());
    }
    let num = f.num();
    // pull a lone sign out of the fraction
    if num.len() == 1 && num.terms()[0].1.is_negative() {
        return format!("-\\frac{{{}}}{{{}}}", latex_poly(&-num), latex_poly(f.den()));
    }
    format!("\\frac{{{}}}{{{}}}", latex_poly(num), latex_poly(f.den()))
}

pub fn latex_mat(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| latex_ratfunc(m.get(i, j)))
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect();
    format!("\\begin{{pmatrix}} {} \\end{{pmatrix}}", rows.join(" \\\\ "))
}

pub fn latex_op(op: &OreOp) -> String {
    if op.is_zero() {
        return "0".into();
    }
    let v = op.derivation().var().name();
    let mut parts = Vec::new();
    for (k, c) in op.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let d = match k {
            0 => String::new(),
            1 => format!("\\partial_{v}"),
            _ => format!("\\partial_{v}^{{{k}}}"),
        };
        let coeff = if c.is_identity() && k > 0 {
            format!("I_{{{}}}", c.rows())
        } else {
            latex_mat(c)
        };
        parts.push(format!("{coeff} {d}").trim_end().to_string());
    }
    parts.join(" + ")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}")
        .replace('_', "\\_")
        .replace('^', "\\^{}")
        .replace('&', "\\&")
        .replace('%', "\\%")
        .replace('#', "\\#")
}

pub fn latex_report(r: &VerificationReport) -> String {
    let mut s = String::from("\\begin{tabular}{lll}\n\\hline\ncheck & identity & result \\\\\n\\hline\n");
    for c in &r.checks {
        s.push_str(&format!(
            "{} & \\texttt{{{}}} & {} \\\\\n",
            escape(&c.name),
            escape(&c.identity),
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    s.push_str("\\hline\n\\end{tabular}\n");
    s
}

/// A standalone document with one display per named item.
pub fn latex_document(items: &[(String, String)], report: Option<&VerificationReport>) -> String {
    let mut s = String::from(
        "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n",
    );
    for (name, body) in items {
        s.push_str(&format!("\\paragraph{{{}}}\n\\[\n{}\n\\]\n", escape(name), body));
    }
    if let Some(r) = report {
        s.push_str("\\paragraph{Verification}\n");
        s.push_str(&latex_report(r));
    }
    s.push_str("\\end{document}\n");
    s
}

pub fn latex_rat(r: &Rat) -> String {
    if r.is_negative() {
        format!("-{}", latex_rat_abs(r))
    } else if r.is_integer() {
        fmt_rat(r)
    } else {
        latex_rat_abs(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_ratfunc, Derivation};

    #[test]
    fn second_derivative_identity() {
        let op = OreOp::d(2, Derivation::dx()).pow(2).unwrap();
        let s = latex_op(&op);
        assert!(s.contains("\\partial_x^{2}"));
        assert!(s.contains("I_{2}"));
    }

    #[test]
    fn fractions() {
        assert_eq!(latex_ratfunc(&parse_ratfunc("-1/x^2").unwrap()), "-\\frac{1}{x^{2}}");
        assert_eq!(latex_ratfunc(&parse_ratfunc("3/2*x").unwrap()), "\\frac{3}{2}x");
        let m = Mat::from_rows(vec![vec![parse_ratfunc("1/x").unwrap(), parse_ratfunc("-1/x^2").unwrap()]]).unwrap();
        assert_eq!(latex_mat(&m), "\\begin{pmatrix} \\frac{1}{x} & -\\frac{1}{x^{2}} \\end{pmatrix}");
    }

    #[test]
    fn report_table() {
        let mut r = VerificationReport::new();
        r.push_mat("first identity", "P_x = 0", &Mat::zeros(1, 1));
        let t = latex_report(&r);
        assert!(t.contains("\\begin{tabular}"));
        assert!(t.contains("first identity & \\texttt{P\\_x = 0} & pass"));
    }
}
