//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! imp   := or ( "->" imp )?
//! or    := and ( "|" and )*
//! and   := unary ( "&" unary )*
//! unary := ("~" | "<>" | "[]" | "<!=>" | "[!=]" | "E" | "A") unary | atom
//! atom  := "p" digits | "F" | "T" | "(" imp ")"
//! ```

use super::Formula;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(u32),
    False,
    True,
    Not,
    And,
    Or,
    Arrow,
    Dia,
    Box,
    DiffDia,
    DiffBox,
    Exists,
    Forall,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(i) => format!("`p{i}`"),
            Tok::False => "`F`".into(),
            Tok::True => "`T`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Dia => "`<>`".into(),
            Tok::Box => "`[]`".into(),
            Tok::DiffDia => "`<!=>`".into(),
            Tok::DiffBox => "`[!=]`".into(),
            Tok::Exists => "`E`".into(),
            Tok::Forall => "`A`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

/// Splits `text` into tokens tagged with their 1-based column.
fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let fixed: [(&str, Tok); 10] = [
        ("<!=>", Tok::DiffDia),
        ("[!=]", Tok::DiffBox),
        ("<>", Tok::Dia),
        ("[]", Tok::Box),
        ("->", Tok::Arrow),
        ("~", Tok::Not),
        ("&", Tok::And),
        ("|", Tok::Or),
        ("(", Tok::LParen),
        (")", Tok::RParen),
    ];
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        for (lit, tok) in &fixed {
            let n = lit.chars().count();
            if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(lit.chars()) {
                out.push((i + 1, tok.clone()));
                i += n;
                continue 'outer;
            }
        }
        let tok = match c {
            'F' => Tok::False,
            'T' => Tok::True,
            'E' => Tok::Exists,
            'A' => Tok::Forall,
            'p' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(syntax(start + 1, "expected digits after `p`"));
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let index = digits.parse::<u32>().map_err(|_| {
                    syntax(start + 1, format!("variable index `{digits}` out of range"))
                })?;
                out.push((start + 1, Tok::Var(index)));
                i = j;
                continue;
            }
            other => return Err(syntax(i + 1, format!("unexpected character `{other}`"))),
        };
        out.push((i + 1, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(c, _)| *c)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => syntax(
                self.column(),
                format!("expected {wanted}, found {}", t.describe()),
            ),
            None => syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = acc.or(self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = acc.and(self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        let op = match self.peek() {
            Some(
                t @ (Tok::Not
                | Tok::Dia
                | Tok::Box
                | Tok::DiffDia
                | Tok::DiffBox
                | Tok::Exists
                | Tok::Forall),
            ) => t.clone(),
            _ => return self.atom(),
        };
        self.pos += 1;
        let arg = self.unary()?;
        Ok(match op {
            Tok::Not => arg.not(),
            Tok::Dia => arg.diamond(),
            Tok::Box => arg.boxed(),
            Tok::DiffDia => arg.diff_diamond(),
            Tok::DiffBox => arg.diff_box(),
            Tok::Exists => arg.exists(),
            Tok::Forall => arg.forall(),
            _ => unreachable!(),
        })
    }

    fn atom(&mut self) -> Result<Formula> {
        let f = match self.peek() {
            Some(Tok::Var(i)) => Formula::Var(*i),
            Some(Tok::False) => Formula::Bottom,
            Some(Tok::True) => Formula::top(),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                return Ok(inner);
            }
            _ => return Err(self.unexpected("a formula")),
        };
        self.pos += 1;
        Ok(f)
    }
}

/// Parses a formula; derived connectives are expanded on the way in.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count() + 1,
    };
    let f = p.implication()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> Formula {
        Formula::var(i)
    }

    fn position(text: &str) -> usize {
        match parse(text) {
            Err(Error::Syntax { position, .. }) => position,
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn reads_basic_forms() {
        assert_eq!(parse("p0 -> <>p0").unwrap(), p(0).implies(p(0).diamond()));
        assert_eq!(parse("E p1").unwrap(), p(1).diff_diamond().or(p(1)));
        assert_eq!(parse("A p1").unwrap(), p(1).diff_box().and(p(1)));
        assert_eq!(parse("[]~p0").unwrap(), p(0).not().boxed());
        assert_eq!(parse("[!=]T").unwrap(), Formula::top().diff_box());
    }

    #[test]
    fn truncated_input_reports_column_past_end() {
        assert_eq!(position("p0 ->"), 6);
    }

    #[test]
    fn error_positions() {
        assert_eq!(position("p0 p1"), 4);
        assert_eq!(position("(p0"), 4);
        assert_eq!(position("p0 ? p1"), 4);
        assert_eq!(position("q"), 1);
        assert_eq!(position("p"), 1);
        assert_eq!(position(""), 1);
        assert_eq!(position("p99999999999"), 1);
    }

    #[test]
    fn precedence_and_associativity() {
        // & binds tighter than |, which binds tighter than ->.
        assert_eq!(parse("p0 & p1 | p2").unwrap(), p(0).and(p(1)).or(p(2)));
        assert_eq!(parse("p0 | p1 & p2").unwrap(), p(0).or(p(1).and(p(2))));
        assert_eq!(
            parse("p0 -> p1 -> p2").unwrap(),
            p(0).implies(p(1).implies(p(2)))
        );
        assert_eq!(parse("p0 & p1 & p2").unwrap(), p(0).and(p(1)).and(p(2)));
        assert_eq!(parse("~p0 & p1").unwrap(), p(0).not().and(p(1)));
        assert_eq!(
            parse("<>p0 -> E p0").unwrap(),
            p(0).diamond().implies(p(0).exists())
        );
    }

    #[test]
    fn canonical_text_round_trips() {
        for text in ["<>F", "(p0 -> p1)", "<!=>p2", "((p0 -> F) -> <><!=>p3)"] {
            assert_eq!(parse(text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse("  <>  ( p0->F )").unwrap(),
            parse("<>(p0->F)").unwrap()
        );
    }
}
