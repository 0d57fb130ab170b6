//! CPLEX LP text format.
//!
//! Every variable gets a line in `Bounds` (binaries included, as `0 <= z <= 1`)
//! in declaration order, which lets the parser restore the original order.
//! Coefficients are written as decimals; a value with no finite decimal
//! expansion is rounded and reported by [`LpExport::inexact`].

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::milp::model::{MilpModel, Relation, Sense, VarId, VarKind};
use crate::scalar::Scalar;

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpExport {
    pub text: String,
    /// Number of coefficients, bounds or right-hand sides that were rounded.
    pub inexact: usize,
}

pub fn export_lp<S: Scalar>(model: &MilpModel<S>) -> String {
    export_lp_checked(model).text
}

pub fn export_lp_checked<S: Scalar>(model: &MilpModel<S>) -> LpExport {
    let mut inexact = 0usize;
    let mut num = |v: &S| {
        let text = v.to_decimal_string();
        if S::parse_decimal(&text).as_ref() != Some(v) {
            inexact += 1;
        }
        text
    };
    let mut out = String::new();
    out.push_str(match model.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    if model.objective.is_empty() {
        out.push_str(" 0");
    }
    write_terms(&mut out, model, &model.objective, &mut num);
    out.push('\n');
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        if c.terms.is_empty() {
            out.push_str(" 0");
        }
        write_terms(&mut out, model, &c.terms, &mut num);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", num(&c.rhs));
    }
    if !model.variables.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.variables {
            let _ = writeln!(out, " {} <= {} <= {}", num(&v.lower), v.name, num(&v.upper));
        }
    }
    let binaries: Vec<&str> =
        model.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    LpExport { text: out, inexact }
}

fn write_terms<S: Scalar>(out: &mut String, model: &MilpModel<S>, terms: &[(VarId, S)], num: &mut impl FnMut(&S) -> String) {
    for (i, (v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, magnitude) = if c.is_negative() { ('-', -c.clone()) } else { ('+', c.clone()) };
        let _ = write!(out, " {sign} {} {}", num(&magnitude), model.variables[v.0].name);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_keyword(line: &str) -> Option<(Section, Option<Sense>)> {
    let lower = line.trim().to_ascii_lowercase();
    Some(match lower.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(Sense::Maximize)),
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(Sense::Minimize)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "binaries" | "binary" | "bin" => (Section::Binaries, None),
        "generals" | "general" | "gen" => (Section::Generals, None),
        "end" => (Section::End, None),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Name(String),
    Sign(bool),
    Rel(Relation),
    Colon,
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Token, usize)>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' || c == '-' {
            tokens.push((Token::Sign(c == '-'), line_no));
            i += 1;
        } else if c == ':' {
            tokens.push((Token::Colon, line_no));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let rel = match op.as_str() {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                _ => return Err(Error::LpFormat { line: line_no, message: format!("unknown operator {op}") }),
            };
            tokens.push((Token::Rel(rel), line_no));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() {
                let d = chars[j];
                let exponent_sign = (d == '+' || d == '-') && j > i && matches!(chars[j - 1], 'e' | 'E');
                let next_digit = |k: usize| chars.get(k).is_some_and(|c| c.is_ascii_digit());
                let exponent = (d == 'e' || d == 'E')
                    && (next_digit(j + 1) || (matches!(chars.get(j + 1), Some('+' | '-')) && next_digit(j + 2)));
                if d.is_ascii_digit() || d == '.' || exponent || exponent_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            tokens.push((Token::Num(chars[i..j].iter().collect()), line_no));
            i = j;
        } else {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !matches!(chars[j], '+' | '-' | ':' | '<' | '>' | '=') {
                j += 1;
            }
            tokens.push((Token::Name(chars[i..j].iter().collect()), line_no));
            i = j;
        }
    }
    Ok(tokens)
}

struct Reader<S> {
    model: MilpModel<S>,
    ids: HashMap<String, VarId>,
    bounded: Vec<bool>,
}

impl<S: Scalar> Reader<S> {
    fn var(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        // CPLEX default bounds are [0, +inf); the upper bound must be supplied later.
        let id = self.model.add_continuous(name, S::zero(), S::zero());
        self.ids.insert(name.to_string(), id);
        self.bounded.push(false);
        id
    }
}

fn number<S: Scalar>(text: &str, line: usize) -> Result<S> {
    S::parse_decimal(text).ok_or_else(|| Error::LpFormat { line, message: format!("bad number {text}") })
}

/// Parses `[name:] expr [rel rhs]` from `tokens`.
#[allow(clippy::type_complexity)]
fn linear<S: Scalar>(
    reader: &mut Reader<S>,
    tokens: &[(Token, usize)],
) -> Result<(Option<String>, Vec<(VarId, S)>, Option<(Relation, S)>)> {
    let mut rest = tokens;
    let mut name = None;
    if let [(Token::Name(n), _), (Token::Colon, _), tail @ ..] = rest {
        name = Some(n.clone());
        rest = tail;
    }
    let mut terms = Vec::new();
    let mut negative = false;
    let mut coef: Option<S> = None;
    let mut i = 0;
    while i < rest.len() {
        let (token, line) = &rest[i];
        match token {
            Token::Sign(neg) => negative ^= neg,
            Token::Num(text) => {
                if coef.is_some() {
                    return Err(Error::LpFormat { line: *line, message: "two numbers in a row".into() });
                }
                coef = Some(number(text, *line)?);
            }
            Token::Name(n) => {
                let id = reader.var(n);
                let c = coef.take().unwrap_or_else(S::one);
                terms.push((id, if negative { -c } else { c }));
                negative = false;
            }
            Token::Rel(rel) => {
                if let Some(c) = coef.take() {
                    // A lone constant such as `obj: 0`.
                    if !c.is_zero() {
                        return Err(Error::LpFormat { line: *line, message: "constant term on the left".into() });
                    }
                }
                let mut sign = false;
                let mut j = i + 1;
                while let Some((Token::Sign(neg), _)) = rest.get(j) {
                    sign ^= neg;
                    j += 1;
                }
                let Some((Token::Num(text), line)) = rest.get(j) else {
                    return Err(Error::LpFormat { line: *line, message: "missing right-hand side".into() });
                };
                if j + 1 != rest.len() {
                    return Err(Error::LpFormat { line: *line, message: "trailing tokens after right-hand side".into() });
                }
                let rhs = number::<S>(text, *line)?;
                return Ok((name, terms, Some((*rel, if sign { -rhs } else { rhs }))));
            }
            Token::Colon => return Err(Error::LpFormat { line: *line, message: "unexpected ':'".into() }),
        }
        i += 1;
    }
    if let Some(c) = coef {
        if !c.is_zero() {
            let line = rest.last().map_or(0, |t| t.1);
            return Err(Error::LpFormat { line, message: "objective constants are not supported".into() });
        }
    }
    Ok((name, terms, None))
}

/// Reads a model written by [`export_lp`] or any LP file using the same
/// subset: linear rows, finite bounds, binaries.
pub fn parse_lp<S: Scalar>(text: &str) -> Result<MilpModel<S>> {
    let mut reader = Reader { model: MilpModel::new(), ids: HashMap::new(), bounded: Vec::new() };
    let mut section: Option<Section> = None;
    let mut pending: Vec<(Token, usize)> = Vec::new();
    let mut objective: Vec<(VarId, S)> = Vec::new();
    let mut sense = None;
    let mut bound_order: Vec<VarId> = Vec::new();
    let mut row_lines = Vec::new();
    let mut binaries = Vec::new();

    // Bounds name every variable first so that declaration order follows them.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('\\').next().unwrap_or("")))
        .collect();
    let mut current = None;
    for &(no, line) in &lines {
        if let Some((s, _)) = section_keyword(line) {
            current = Some(s);
        } else if current == Some(Section::Bounds) && !line.trim().is_empty() {
            for (token, _) in tokenize(line, no)? {
                if let Token::Name(n) = token {
                    if !n.eq_ignore_ascii_case("inf") && !n.eq_ignore_ascii_case("infinity") && !n.eq_ignore_ascii_case("free") {
                        let id = reader.var(&n);
                        if !bound_order.contains(&id) {
                            bound_order.push(id);
                        }
                    }
                }
            }
        }
    }

    let flush = |reader: &mut Reader<S>, pending: &mut Vec<(Token, usize)>, section: Option<Section>, objective: &mut Vec<(VarId, S)>, row_lines: &mut Vec<usize>| -> Result<()> {
        if pending.is_empty() {
            return Ok(());
        }
        let tokens = std::mem::take(pending);
        let line = tokens[0].1;
        match section {
            Some(Section::Objective) => {
                let (_, terms, rel) = linear(reader, &tokens)?;
                if rel.is_some() {
                    return Err(Error::LpFormat { line, message: "relation in objective".into() });
                }
                objective.extend(terms);
            }
            Some(Section::Constraints) => {
                let (name, terms, rel) = linear(reader, &tokens)?;
                let Some((relation, rhs)) = rel else {
                    return Err(Error::LpFormat { line, message: "constraint without relation".into() });
                };
                let name = name.unwrap_or_else(|| format!("c{}", reader.model.constraints.len() + 1));
                reader.model.add_constraint(name, terms, relation, rhs);
                row_lines.push(line);
            }
            _ => {}
        }
        Ok(())
    };

    for &(no, line) in &lines {
        if let Some((s, sn)) = section_keyword(line) {
            flush(&mut reader, &mut pending, section, &mut objective, &mut row_lines)?;
            if s == Section::Objective {
                if sense.is_some() {
                    return Err(Error::LpFormat { line: no, message: "second objective section".into() });
                }
                sense = sn;
            }
            section = Some(s);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match section {
            None => return Err(Error::LpFormat { line: no, message: "text before the objective section".into() }),
            Some(Section::End) => return Err(Error::LpFormat { line: no, message: "text after End".into() }),
            Some(Section::Objective) | Some(Section::Constraints) => {
                let tokens = tokenize(line, no)?;
                // A new row starts at `name:` once the previous row has its relation.
                let starts_row = matches!(tokens.as_slice(), [(Token::Name(_), _), (Token::Colon, _), ..]);
                let complete = pending.iter().any(|(t, _)| matches!(t, Token::Rel(_)));
                if section == Some(Section::Constraints) && (starts_row || complete) {
                    flush(&mut reader, &mut pending, section, &mut objective, &mut row_lines)?;
                }
                pending.extend(tokens);
            }
            Some(Section::Bounds) => parse_bound(&mut reader, &tokenize(line, no)?, no)?,
            Some(Section::Binaries) => {
                for (token, _) in tokenize(line, no)? {
                    match token {
                        Token::Name(n) => binaries.push(reader.var(&n)),
                        _ => return Err(Error::LpFormat { line: no, message: "expected variable names".into() }),
                    }
                }
            }
            Some(Section::Generals) => {
                return Err(Error::LpFormat { line: no, message: "general integers are not supported".into() })
            }
        }
    }
    flush(&mut reader, &mut pending, section, &mut objective, &mut row_lines)?;
    if section != Some(Section::End) {
        return Err(Error::LpFormat { line: lines.len(), message: "missing End".into() });
    }
    let Some(sense) = sense else {
        return Err(Error::LpFormat { line: 1, message: "missing objective section".into() });
    };
    for id in &binaries {
        let v = &mut reader.model.variables[id.0];
        v.kind = VarKind::Binary;
        if !reader.bounded[id.0] {
            v.lower = S::zero();
            v.upper = S::one();
            reader.bounded[id.0] = true;
        }
    }
    if let Some(i) = reader.bounded.iter().position(|b| !b) {
        let name = &reader.model.variables[i].name;
        return Err(Error::LpFormat { line: lines.len(), message: format!("variable {name} has no finite upper bound") });
    }

    // Renumber: variables with a Bounds entry first, in that order.
    let mut order = bound_order;
    for i in 0..reader.model.variables.len() {
        if !order.contains(&VarId(i)) {
            order.push(VarId(i));
        }
    }
    let mut new_id = vec![VarId(0); order.len()];
    for (new, old) in order.iter().enumerate() {
        new_id[old.0] = VarId(new);
    }
    let old = reader.model;
    let mut model = MilpModel::new();
    model.variables = order.iter().map(|v| old.variables[v.0].clone()).collect();
    model.constraints = old
        .constraints
        .into_iter()
        .map(|mut c| {
            for (v, _) in &mut c.terms {
                *v = new_id[v.0];
            }
            c
        })
        .collect();
    model.set_objective(sense, objective.into_iter().map(|(v, c)| (new_id[v.0], c)).collect());
    model.validate()?;
    Ok(model)
}

fn parse_bound<S: Scalar>(reader: &mut Reader<S>, tokens: &[(Token, usize)], line: usize) -> Result<()> {
    let bad = |message: &str| Error::LpFormat { line, message: message.to_string() };
    // Collapse signs into numbers.
    let mut items: Vec<Token> = Vec::new();
    let mut negative = false;
    for (t, _) in tokens {
        match t {
            Token::Sign(neg) => negative ^= neg,
            Token::Num(n) => {
                items.push(Token::Num(if negative { format!("-{n}") } else { n.clone() }));
                negative = false;
            }
            Token::Name(n) if n.eq_ignore_ascii_case("inf") || n.eq_ignore_ascii_case("infinity") => {
                return Err(bad("infinite bounds are not supported"));
            }
            other => items.push(other.clone()),
        }
    }
    let set = |reader: &mut Reader<S>, name: &str, rel: Relation, value: S| {
        let id = reader.var(name);
        let v = &mut reader.model.variables[id.0];
        match rel {
            Relation::Le => {
                v.upper = value;
                reader.bounded[id.0] = true;
            }
            Relation::Ge => v.lower = value,
            Relation::Eq => {
                v.lower = value.clone();
                v.upper = value;
                reader.bounded[id.0] = true;
            }
        }
    };
    let flip = |r: Relation| match r {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    };
    match items.as_slice() {
        [Token::Num(lo), Token::Rel(r1), Token::Name(n), Token::Rel(r2), Token::Num(hi)] => {
            set(reader, n, flip(*r1), number(lo, line)?);
            set(reader, n, *r2, number(hi, line)?);
        }
        [Token::Name(n), Token::Rel(r), Token::Num(v)] => set(reader, n, *r, number(v, line)?),
        [Token::Num(v), Token::Rel(r), Token::Name(n)] => set(reader, n, flip(*r), number(v, line)?),
        [Token::Name(_), Token::Name(kw)] if kw.eq_ignore_ascii_case("free") => {
            return Err(bad("free variables are not supported"));
        }
        _ => return Err(bad("unrecognised bound")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn empty_model() {
        let m: MilpModel<Rational> = MilpModel::new();
        let text = export_lp(&m);
        assert_eq!(text, "Maximize\n obj: 0\nSubject To\nEnd\n");
        assert_eq!(parse_lp::<Rational>(&text).unwrap(), m);
    }

    #[test]
    fn small_model_round_trips() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", q(-1, 2), q(3, 1));
        let z = m.add_binary("z");
        m.add_constraint("c1", vec![(x, q(1, 1)), (z, q(-7, 4))], Relation::Le, q(-1, 10));
        m.add_constraint("c2", vec![(x, q(2, 1))], Relation::Eq, q(1, 1));
        m.set_objective(Sense::Minimize, vec![(x, q(1, 1)), (z, q(3, 8))]);
        let out = export_lp_checked(&m);
        assert_eq!(out.inexact, 0);
        assert!(out.text.contains(" c1: + 1 x - 1.75 z <= -0.1\n"), "{}", out.text);
        assert_eq!(parse_lp::<Rational>(&out.text).unwrap(), m);
    }

    #[test]
    fn repeating_decimals_are_flagged() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", q(0, 1), q(1, 3));
        m.set_objective(Sense::Maximize, vec![(x, q(1, 1))]);
        assert_eq!(export_lp_checked(&m).inexact, 1);
    }

    #[test]
    fn accepts_common_variants() {
        let text = "\\ hand written\nMAXIMIZE\n obj: 2 a + b\nST\n r: a + b\n    <= 1.5\n a - b >= -1\nBOUNDS\n a <= 1\n 0 <= b <= 2\nBINARY\n a\nEND\n";
        let m = parse_lp::<Rational>(text).unwrap();
        assert_eq!(m.variables.len(), 2);
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(m.constraints[1].name, "c2");
        assert_eq!(m.variables[0].kind, VarKind::Binary);
        assert_eq!(m.constraints[0].rhs, q(3, 2));
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(parse_lp::<Rational>("Maximize\n obj: x\nSubject To\n c: x <= 1\nEnd\n").is_err());
        assert!(parse_lp::<Rational>("Maximize\n obj: x\nSubject To\n c: x <= \nBounds\n 0 <= x <= 1\nEnd\n").is_err());
        assert!(parse_lp::<Rational>("Maximize\n obj: x\nBounds\n 0 <= x <= 1\n").is_err());
    }
}
