//! Line-oriented circuit DSL.
//!
//! ```text
//! dim 2
//! ineq h1: 1 x1 + 2 x2 <= 4
//! ineq h2: -1 x1 < 0
//! gate g: and h1 h2
//! output g
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Gate, GateId, PolyhedraCircuit};
use crate::geometry::LinearInequality;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {kind}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct ParsedCircuit {
    pub circuit: PolyhedraCircuit,
    pub warnings: Vec<ParseDiagnostic>,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

struct Parser<'a> {
    line_no: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    line_len: usize,
}

type Step<T> = Result<T, (usize, String)>;

impl<'a> Parser<'a> {
    fn next(&mut self, what: &str) -> Step<Token<'a>> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| (self.line_len + 1, format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn finish(&self) -> Step<()> {
        match self.peek() {
            Some(t) => Err((t.column, format!("unexpected token `{}`", t.text))),
            None => Ok(()),
        }
    }

    /// `<name>:` or `<name> :`.
    fn definition_name(&mut self) -> Step<Token<'a>> {
        let t = self.next("name")?;
        let name = if let Some(stripped) = t.text.strip_suffix(':') {
            stripped
        } else {
            let colon = self.next("`:`")?;
            if colon.text != ":" {
                return Err((colon.column, "expected `:` after name".into()));
            }
            t.text
        };
        if !is_name(name) {
            return Err((t.column, format!("invalid name `{name}`")));
        }
        Ok(Token { text: name, column: t.column })
    }

    fn int(&mut self) -> Step<BigInt> {
        let t = self.next("integer")?;
        parse_int(t.text).ok_or((t.column, format!("expected integer, found `{}`", t.text)))
    }

    fn variable(&mut self, dim: usize) -> Step<usize> {
        let t = self.next("variable")?;
        let k = t
            .text
            .strip_prefix('x')
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or((t.column, format!("expected variable `x<k>`, found `{}`", t.text)))?;
        if k == 0 || k > dim {
            return Err((t.column, format!("variable x{k} out of range for dim {dim}")));
        }
        Ok(k - 1)
    }

    fn inequality(&mut self, dim: usize) -> Step<LinearInequality> {
        let start = self.peek().map_or(self.line_len + 1, |t| t.column);
        let mut a = vec![BigInt::zero(); dim];
        let c = self.int()?;
        let k = self.variable(dim)?;
        a[k] += c;
        loop {
            let t = self.next("`+`, `-`, `<=` or `<`")?;
            match t.text {
                "+" | "-" => {
                    let c = self.int()?;
                    let k = self.variable(dim)?;
                    if t.text == "-" {
                        a[k] -= c;
                    } else {
                        a[k] += c;
                    }
                }
                "<=" | "<" => {
                    let b = self.int()?;
                    self.finish()?;
                    return LinearInequality::new(a, b, t.text == "<")
                        .map_err(|_| (start, "zero coefficient row".into()));
                }
                other => return Err((t.column, format!("expected `+`, `-`, `<=` or `<`, found `{other}`"))),
            }
        }
    }
}

/// Parses the circuit DSL. Errors are collected across lines; unused gates
/// are reported as warnings alongside a successful parse.
pub fn parse_circuit(text: &str) -> Result<ParsedCircuit, Vec<ParseDiagnostic>> {
    let mut errors = Vec::new();
    let mut dim: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut def_lines: Vec<(usize, usize)> = Vec::new();
    let mut ids: HashMap<String, GateId> = HashMap::new();
    let mut output: Option<(GateId, usize)> = None;
    let mut last_line = 0;

    let err = |line: usize, column: usize, message: String| ParseDiagnostic {
        line,
        column,
        severity: Severity::Error,
        message,
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(first) = tokens.first().copied() else {
            continue;
        };
        let mut p = Parser { line_no, tokens, pos: 1, line_len: content.chars().count() };

        if let Some((_, out_line)) = output {
            errors.push(err(line_no, first.column, format!("statement after `output` (line {out_line})")));
            continue;
        }

        let result: Step<()> = match (first.text, dim) {
            ("dim", None) => (|| {
                let t = p.next("dimension")?;
                let d = t
                    .text
                    .parse::<usize>()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or((t.column, format!("invalid dimension `{}`", t.text)))?;
                p.finish()?;
                dim = Some(d);
                Ok(())
            })(),
            ("dim", Some(_)) => Err((first.column, "duplicate `dim` statement".into())),
            (_, None) => {
                errors.push(err(line_no, first.column, "first statement must be `dim <d>`".into()));
                // assume nothing about the dimension; skip the rest
                return Err(errors);
            }
            ("ineq", Some(d)) => (|| {
                let name = p.definition_name()?;
                let ineq = p.inequality(d)?;
                define(&mut ids, &mut names, &mut def_lines, name, p.line_no)?;
                gates.push(Gate::Input(ineq));
                Ok(())
            })(),
            ("gate", Some(_)) => (|| {
                let name = p.definition_name()?;
                let op = p.next("`and` or `or`")?;
                let is_union = match op.text {
                    "and" => false,
                    "or" => true,
                    other => return Err((op.column, format!("expected `and` or `or`, found `{other}`"))),
                };
                let mut children = Vec::new();
                while let Some(t) = p.peek() {
                    p.pos += 1;
                    let id = *ids
                        .get(t.text)
                        .ok_or((t.column, format!("undefined gate `{}`", t.text)))?;
                    children.push(id);
                }
                if children.is_empty() {
                    return Err((p.line_len + 1, "gate needs at least one child".into()));
                }
                define(&mut ids, &mut names, &mut def_lines, name, p.line_no)?;
                gates.push(if is_union { Gate::Union(children) } else { Gate::Intersection(children) });
                Ok(())
            })(),
            ("output", Some(_)) => (|| {
                let t = p.next("gate name")?;
                let id = *ids.get(t.text).ok_or((t.column, format!("undefined gate `{}`", t.text)))?;
                p.finish()?;
                output = Some((id, p.line_no));
                Ok(())
            })(),
            (other, Some(_)) => Err((first.column, format!("unknown statement `{other}`"))),
        };
        if let Err((column, message)) = result {
            errors.push(err(line_no, column, message));
        }
    }

    let Some(d) = dim else {
        errors.push(err(last_line.max(1), 1, "missing `dim` statement".into()));
        return Err(errors);
    };
    let Some((out, _)) = output else {
        errors.push(err(last_line + 1, 1, "missing output".into()));
        return Err(errors);
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    let circuit = PolyhedraCircuit::new(d, gates, names, out)
        .map_err(|e| vec![err(last_line, 1, e.to_string())])?;
    let warnings = circuit
        .unused_gates()
        .into_iter()
        .map(|id| ParseDiagnostic {
            line: def_lines[id].0,
            column: def_lines[id].1,
            severity: Severity::Warning,
            message: format!("gate `{}` is unused", circuit.names()[id]),
        })
        .collect();
    Ok(ParsedCircuit { circuit, warnings })
}

fn define(
    ids: &mut HashMap<String, GateId>,
    names: &mut Vec<String>,
    def_lines: &mut Vec<(usize, usize)>,
    name: Token<'_>,
    line: usize,
) -> Step<()> {
    if ids.contains_key(name.text) {
        return Err((name.column, format!("duplicate name `{}`", name.text)));
    }
    ids.insert(name.text.to_string(), names.len());
    names.push(name.text.to_string());
    def_lines.push((line, name.column));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<ParseDiagnostic> {
        parse_circuit(text).expect_err("expected diagnostics")
    }

    #[test]
    fn missing_output() {
        let e = errors("dim 1\nineq h: 1 x1 <= 2\n");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].message, "missing output");
        assert_eq!(e[0].line, 3);
    }

    #[test]
    fn zero_row() {
        let e = errors("dim 1\nineq h1: 0 x1 <= 1\noutput h1\n");
        assert_eq!(e[0].message, "zero coefficient row");
        assert_eq!((e[0].line, e[0].column), (2, 10));
    }

    #[test]
    fn cancelling_terms_are_a_zero_row() {
        let e = errors("dim 2\nineq h: 2 x1 - 2 x1 <= 1\noutput h\n");
        assert_eq!(e[0].message, "zero coefficient row");
    }

    #[test]
    fn undefined_and_forward_references() {
        let e = errors("dim 1\ngate g: and h\nineq h: 1 x1 <= 0\noutput g\n");
        assert!(e[0].message.contains("undefined gate `h`"));
        assert_eq!((e[0].line, e[0].column), (2, 13));
    }

    #[test]
    fn dimension_errors() {
        let e = errors("dim 2\nineq h: 1 x3 <= 0\noutput h\n");
        assert!(e[0].message.contains("out of range"));
        let e = errors("ineq h: 1 x1 <= 0\n");
        assert!(e[0].message.contains("dim"));
        let e = errors("dim 0\n");
        assert!(e[0].message.contains("invalid dimension"));
    }

    #[test]
    fn syntax_errors_collected_per_line() {
        let e = errors("dim 1\nineq a: 1 x1 =< 0\nineq b 1 x1 <= 0\nfoo\nineq c: 1 x1 <= 0\noutput c\n");
        assert_eq!(e.len(), 3, "{e:?}");
        assert_eq!(e.iter().map(|d| d.line).collect::<Vec<_>>(), vec![2, 3, 4]);
    }

    #[test]
    fn output_must_be_last_and_unique() {
        let e = errors("dim 1\nineq a: 1 x1 <= 0\noutput a\noutput a\n");
        assert!(e[0].message.contains("after `output`"));
    }

    #[test]
    fn duplicate_names() {
        let e = errors("dim 1\nineq a: 1 x1 <= 0\nineq a: 1 x1 <= 1\noutput a\n");
        assert!(e[0].message.contains("duplicate name"));
    }

    #[test]
    fn accepts_signed_terms_comments_and_spacing() {
        let text = "# header\n\n  dim   2  # two\nineq h : -3 x1 + -2 x2 - +4 x1 < +7\noutput h\n";
        let c = parse_circuit(text).unwrap().circuit;
        let leaf = c.leaves().next().unwrap();
        assert_eq!(leaf, &LinearInequality::lt(&[-7, -2], 7).unwrap());
    }

    #[test]
    fn rejects_bad_names_and_numbers() {
        assert!(errors("dim 1\nineq 1h: 1 x1 <= 0\noutput 1h\n")[0].message.contains("invalid name"));
        assert!(errors("dim 1\nineq h: 1.5 x1 <= 0\noutput h\n")[0].message.contains("expected integer"));
        assert!(errors("dim 1\nineq h: 1x1 <= 0\noutput h\n")[0].message.contains("expected integer"));
    }

    #[test]
    fn diagnostics_display() {
        let d = ParseDiagnostic { line: 3, column: 7, severity: Severity::Error, message: "boom".into() };
        assert_eq!(d.to_string(), "3:7: error: boom");
    }
}
