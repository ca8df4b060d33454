use super::{Formula, Regex};

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    fmt_formula(f, 0, &mut s);
    s
}

pub fn regex_to_string(r: &Regex) -> String {
    let mut s = String::new();
    fmt_regex(r, 0, &mut s);
    s
}

// precedence: 0 implication/binders, 1 or, 2 and, 3 unary/atoms
fn fmt_formula(f: &Formula, prec: u8, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Prop(p) | Formula::Var(p) => out.push_str(p),
        Formula::Not(a) => {
            out.push('~');
            fmt_formula(a, 3, out);
        }
        Formula::And(a, b) => {
            let wrap = prec > 2;
            if wrap {
                out.push('(');
            }
            fmt_formula(a, 2, out);
            out.push_str(" & ");
            fmt_formula(b, 3, out);
            if wrap {
                out.push(')');
            }
        }
        Formula::Or(a, b) => {
            let wrap = prec > 1;
            if wrap {
                out.push('(');
            }
            fmt_formula(a, 1, out);
            out.push_str(" | ");
            fmt_formula(b, 2, out);
            if wrap {
                out.push(')');
            }
        }
        Formula::Rat(i, re) => {
            out.push_str(&format!("Rat[{i}]{{"));
            fmt_regex(re, 0, out);
            out.push('}');
        }
        Formula::FRat(i, re, g) => {
            out.push_str(&format!("FRat[{i}]{{"));
            fmt_regex(re, 0, out);
            out.push_str("}(");
            fmt_formula(g, 0, out);
            out.push(')');
        }
        Formula::URat(i, re, g, h) => {
            out.push_str(&format!("URat[{i}]{{"));
            fmt_regex(re, 0, out);
            out.push_str("}(");
            fmt_formula(g, 0, out);
            out.push_str(", ");
            fmt_formula(h, 0, out);
            out.push(')');
        }
        Formula::Mu(z, a) | Formula::Nu(z, a) => {
            let kw = if matches!(f, Formula::Mu(..)) {
                "mu"
            } else {
                "nu"
            };
            let wrap = prec > 0;
            if wrap {
                out.push('(');
            }
            out.push_str(&format!("{kw} {z}. "));
            fmt_formula(a, 0, out);
            if wrap {
                out.push(')');
            }
        }
    }
}

// precedence: 0 union, 1 concat, 2 star operand
fn fmt_regex(r: &Regex, prec: u8, out: &mut String) {
    match r {
        Regex::Empty => out.push_str("<false>"),
        Regex::Eps => out.push_str("eps"),
        Regex::Atom(f) => match &**f {
            Formula::Prop(p) | Formula::Var(p) => out.push_str(p),
            Formula::True => out.push_str("true"),
            g => {
                out.push('<');
                fmt_formula(g, 0, out);
                out.push('>');
            }
        },
        Regex::Union(a, b) => {
            if prec > 0 {
                out.push('(');
            }
            fmt_regex(a, 1, out);
            out.push_str(" + ");
            fmt_regex(b, 0, out);
            if prec > 0 {
                out.push(')');
            }
        }
        Regex::Concat(a, b) => {
            if prec > 1 {
                out.push('(');
            }
            fmt_regex(a, 2, out);
            out.push_str(" . ");
            fmt_regex(b, 1, out);
            if prec > 1 {
                out.push(')');
            }
        }
        Regex::Star(a) => {
            fmt_regex(a, 2, out);
            out.push('*');
        }
    }
}
