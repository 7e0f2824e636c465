//! Proof script format.
//!
//! ```text
//! script  := [ "premises:" NL { formula NL } ] { n "." formula ";" just NL }
//! just    := "A1" | "A2" | "A3" | "A4" | "CHOICE"
//!          | "PREM" k | "MP" i j | "GEN" i name ["^" type] | "DEFEQ" i
//! ```
//!
//! Lines are numbered from 1 without gaps. `#` starts a comment. Free names
//! share one typing context across the whole script, so an annotation given
//! in a premise carries over to later lines. The variable of `GEN` may omit
//! its type when the line begins with a quantifier over that name.

use crate::lang::{parse_formula_at, parse_term_in, print_formula, Context, Formula, LangError, Term};

use super::check::{Justification, Line, Proof};
use super::ProofError;

fn err(line: usize, col: usize, msg: impl Into<String>) -> ProofError {
    ProofError::Script {
        line,
        col,
        msg: msg.into(),
    }
}

pub fn parse_proof(input: &str) -> Result<Proof, ProofError> {
    let mut ctx = Context::new();
    let mut proof = Proof::default();
    let mut in_premises = false;
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let text = raw.split('#').next().unwrap_or("");
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "premises:" {
            if in_premises || !proof.premises.is_empty() || !proof.lines.is_empty() {
                return Err(err(lineno, 1, "unexpected `premises:`"));
            }
            in_premises = true;
            continue;
        }
        let Some((number, rest)) = split_number(trimmed) else {
            if in_premises && proof.lines.is_empty() {
                proof.premises.push(formula_at(text, 0, lineno, &mut ctx)?);
                continue;
            }
            return Err(err(lineno, column(text, trimmed), "expected `n. formula ; justification`"));
        };
        in_premises = false;
        let expected = proof.lines.len() + 1;
        if number != expected {
            return Err(err(lineno, column(text, trimmed), format!("expected line number {expected}, found {number}")));
        }
        let Some(semi) = rest.rfind(';') else {
            return Err(err(lineno, text.len() + 1, "missing `;` before the justification"));
        };
        let start = text.len() - rest.len();
        let formula = formula_at(&text[..start + semi], start, lineno, &mut ctx)?;
        let just_text = &rest[semi + 1..];
        let just = justification(just_text, &formula, &mut ctx)
            .map_err(|msg| err(lineno, start + semi + 2 + leading_ws(just_text), msg))?;
        proof.lines.push(Line {
            formula,
            justification: just,
        });
    }
    if proof.lines.is_empty() {
        return Err(err(input.lines().count().max(1), 1, "proof has no lines"));
    }
    Ok(proof)
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn column(text: &str, trimmed: &str) -> usize {
    text.find(trimmed).unwrap_or(0) + 1
}

/// Parses the formula in `text[start..]`, blanking the prefix so reported
/// columns refer to the original line.
fn formula_at(text: &str, start: usize, line: usize, ctx: &mut Context) -> Result<Formula, ProofError> {
    let padded: String = text
        .char_indices()
        .map(|(i, c)| if i < start { ' ' } else { c })
        .collect();
    Ok(parse_formula_at(&padded, line, ctx)?)
}

fn split_number(s: &str) -> Option<(usize, &str)> {
    let digits = s.find(|c: char| !c.is_ascii_digit())?;
    if digits == 0 || !s[digits..].starts_with('.') {
        return None;
    }
    Some((s[..digits].parse().ok()?, &s[digits + 1..]))
}

fn justification(text: &str, formula: &Formula, ctx: &mut Context) -> Result<Justification, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let num = |w: &str| w.parse::<usize>().map_err(|_| format!("expected a line number, found `{w}`"));
    let arity = |n: usize| {
        if words.len() == n + 1 {
            Ok(())
        } else {
            Err(format!("{} takes {n} argument(s)", words[0]))
        }
    };
    let Some(&head) = words.first() else {
        return Err("missing justification".into());
    };
    Ok(match head {
        "A1" | "A2" | "A3" | "A4" | "CHOICE" => {
            arity(0)?;
            match head {
                "A1" => Justification::A1,
                "A2" => Justification::A2,
                "A3" => Justification::A3,
                "A4" => Justification::A4,
                _ => Justification::Choice,
            }
        }
        "PREM" => {
            arity(1)?;
            Justification::Premise(num(words[1])?)
        }
        "MP" => {
            arity(2)?;
            Justification::MP(num(words[1])?, num(words[2])?)
        }
        "DEFEQ" => {
            arity(1)?;
            Justification::DefEq(num(words[1])?)
        }
        "GEN" => {
            arity(2)?;
            Justification::Gen(num(words[1])?, gen_var(words[2], formula, ctx)?)
        }
        other => return Err(format!("unknown justification `{other}`")),
    })
}

fn gen_var(word: &str, formula: &Formula, ctx: &mut Context) -> Result<Term, String> {
    if let Formula::Forall(v, _) = formula {
        if *v.name == *word {
            return Ok(v.clone());
        }
    }
    match parse_term_in(word, ctx) {
        Ok(t) => Ok(Term::var(&t.name, t.ty)),
        Err(LangError::Syntax { msg, .. }) => Err(msg),
        Err(e) => Err(e.to_string()),
    }
}

/// Canonical script text; parses back to the same proof.
pub fn print_proof(p: &Proof) -> String {
    let mut out = String::new();
    if !p.premises.is_empty() {
        out.push_str("premises:\n");
        for f in &p.premises {
            out.push_str("  ");
            out.push_str(&print_formula(f));
            out.push('\n');
        }
    }
    for (i, l) in p.lines.iter().enumerate() {
        let just = match &l.justification {
            Justification::Gen(k, v) => format!("GEN {k} {}^{}", v.name, v.ty),
            j => j.to_string(),
        };
        out.push_str(&format!("{}. {} ; {}\n", i + 1, print_formula(&l.formula), just));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check::check_proof;

    const MP: &str = "\
premises:
  A^<e2>(c^e2)          # first premise
  A(c) -> B^<e2>(c)
1. A(c) ; PREM 1
2. A(c) -> B(c) ; PREM 2
3. B(c) ; MP 1 2
";

    #[test]
    fn parses_and_checks() {
        let p = parse_proof(MP).unwrap();
        assert_eq!(p.premises.len(), 2);
        assert_eq!(p.lines.len(), 3);
        assert!(check_proof(&p).is_accepted());
    }

    #[test]
    fn gen_variable_from_binder() {
        let p = parse_proof("1. P^<e1>(x^e1) -> P(x) ; A1\n2. forall x^e1 . P(x) -> P(x) ; GEN 1 x\n").unwrap();
        assert_eq!(p.lines[1].justification.to_string(), "GEN 1 x");
        assert!(check_proof(&p).is_accepted());
    }

    #[test]
    fn round_trip() {
        let p = parse_proof(MP).unwrap();
        let text = print_proof(&p);
        assert_eq!(parse_proof(&text).unwrap(), p);
        let g = parse_proof("1. P^<e1>(x^e1) -> P(x) ; A1\n2. forall x^e1 . P(x) -> P(x) ; GEN 1 x\n").unwrap();
        assert_eq!(parse_proof(&print_proof(&g)).unwrap(), g);
    }

    #[test]
    fn positioned_errors() {
        assert_eq!(
            parse_proof("1. A^<e2>(c^e2) ; A1\n3. A(c) ; A1\n").unwrap_err(),
            err(2, 1, "expected line number 2, found 3")
        );
        assert_eq!(
            parse_proof("1. A^<e2>(c^e2) ; FOO").unwrap_err(),
            err(1, 19, "unknown justification `FOO`")
        );
        match parse_proof("1. A^<e2>(c^e2) & ; A1").unwrap_err() {
            ProofError::Lang(LangError::Syntax { line: 1, col, .. }) => assert_eq!(col, 19),
            e => panic!("{e:?}"),
        }
        assert!(parse_proof("# nothing\n").is_err());
    }
}
