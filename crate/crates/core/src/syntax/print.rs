use super::term::Term;

/// Prints a term in the surface grammar, using numeral and list sugar.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out, true);
    out
}

/// Prints without numeral and list sugar.
pub fn print_term_plain(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out, false);
    out
}

fn write_term(t: &Term, out: &mut String, sugar: bool) {
    match t {
        Term::Abs(x, body) => {
            out.push('\\');
            out.push_str(x);
            out.push_str(". ");
            write_term(body, out, sugar);
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            write_operand(head, out, sugar, false);
            for a in args {
                out.push(' ');
                write_operand(a, out, sugar, true);
            }
        }
        _ => write_atom(t, out, sugar),
    }
}

fn write_operand(t: &Term, out: &mut String, sugar: bool, argument: bool) {
    let needs_parens = match t {
        Term::Abs(..) => true,
        Term::App(..) => argument,
        _ => false,
    };
    if needs_parens {
        out.push('(');
        write_term(t, out, sugar);
        out.push(')');
    } else {
        write_term(t, out, sugar);
    }
}

fn write_atom(t: &Term, out: &mut String, sugar: bool) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Const(c) => out.push_str(&c.to_string()),
        Term::Constr(co, args) => {
            if sugar {
                if let Some(n) = t.as_numeral() {
                    out.push_str(&n.to_string());
                    return;
                }
                if let Some(items) = t.as_list() {
                    out.push('[');
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_term(item, out, sugar);
                    }
                    out.push(']');
                    return;
                }
            }
            out.push_str(co);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(a, out, sugar);
                }
                out.push(')');
            }
        }
        Term::Abs(..) | Term::App(..) => write_operand(t, out, sugar, true),
    }
}
