//! Line-oriented parser for the `i2e-litmus v1` text format.
//!
//! ```text
//! i2e-litmus v1
//! name: mp
//! init:
//!   a = 0
//! thread P1:
//!   St a 42
//!   Commit
//!   St f 1
//! thread P2:
//!   r1 = Ld f
//!   Reconcile
//!   r2 = Ld a
//! check forbidden [wmm]: r1 = 1 & r2 = 0
//! ```

use std::fmt;

use super::ast::*;
use crate::model::Model;

pub const HEADER: &str = "i2e-litmus";
pub const VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    NoThreads,
    NoChecks,
    DuplicateThread(String),
    DuplicateLabel(String),
    UnresolvedLabel(String),
    UnknownFence(String),
    UnknownModel(String),
    UnsupportedVersion(String),
    UnknownRegister(String),
    AmbiguousRegister(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::NoThreads => f.write_str("no threads"),
            ParseErrorKind::NoChecks => f.write_str("no checks"),
            ParseErrorKind::DuplicateThread(t) => write!(f, "duplicate thread name `{t}`"),
            ParseErrorKind::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            ParseErrorKind::UnresolvedLabel(l) => write!(f, "unresolved label `{l}`"),
            ParseErrorKind::UnknownFence(k) => write!(f, "unknown fence keyword `{k}`"),
            ParseErrorKind::UnknownModel(m) => write!(f, "unknown model `{m}`"),
            ParseErrorKind::UnsupportedVersion(v) => write!(f, "unsupported format version `{v}`"),
            ParseErrorKind::UnknownRegister(r) => write!(f, "unknown register `{r}`"),
            ParseErrorKind::AmbiguousRegister(r) => {
                write!(
                    f,
                    "register `{r}` is used by several threads; qualify it as THREAD:{r}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }
}

/// `r` followed by digits.
pub fn is_register_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('r') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

const KEYWORDS: &[&str] = &[
    "Ld",
    "St",
    "Commit",
    "Reconcile",
    "exit",
    "beqz",
    "bnez",
    "thread",
    "init",
    "check",
    "m",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eq,
    Neq,
    Amp,
    Pipe,
    Bang,
    Colon,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
        }
    }
}

/// Tokens of one line, each paired with its 1-based column.
struct Tokens {
    line: usize,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Tokens {
    fn lex(text: &str, line: usize, col0: usize) -> Result<Self, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = col0 + i;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse::<i64>().map_err(|_| {
                    ParseError::new(
                        line,
                        col,
                        ParseErrorKind::Syntax(format!("integer `{s}` out of range")),
                    )
                })?;
                toks.push((Tok::Int(v), col));
                continue;
            }
            let tok = match c {
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '=' => Tok::Eq,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                ':' => Tok::Colon,
                ',' => Tok::Comma,
                '!' if chars.get(i + 1) == Some(&'=') => {
                    i += 1;
                    Tok::Neq
                }
                '≠' => Tok::Neq,
                '!' => Tok::Bang,
                other => {
                    return Err(ParseError::new(
                        line,
                        col,
                        ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                    ))
                }
            };
            toks.push((tok, col));
            i += 1;
        }
        Ok(Tokens {
            line,
            toks,
            pos: 0,
            end_col: col0 + chars.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), ParseErrorKind::Syntax(msg.into()))
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn register(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if is_register_name(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("register")),
        }
    }

    fn symbol(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_register_name(s) && !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("location name")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Term::Int(v))
            }
            Some(Tok::Ident(s)) if is_register_name(&s) => {
                self.pos += 1;
                Ok(Term::Reg(s))
            }
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(Term::Sym(s))
            }
            _ => Err(self.unexpected("register, integer or location")),
        }
    }

    /// `[-] term ((+|-) term)*`
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let first_sign = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            Sign::Minus
        } else {
            Sign::Plus
        };
        let mut terms = vec![(first_sign, self.term()?)];
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => Sign::Plus,
                Some(Tok::Minus) => Sign::Minus,
                _ => break,
            };
            self.pos += 1;
            terms.push((sign, self.term()?));
        }
        Ok(Expr { terms })
    }

    /// A bare term or a parenthesised expression.
    fn operand_expr(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(e)
        } else {
            Ok(Expr::term(self.term()?))
        }
    }

    fn value_operand(&mut self) -> Result<Operand, ParseError> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Operand::Int(if neg { -v } else { v }))
            }
            Some(Tok::Ident(_)) if !neg => Ok(Operand::Sym(self.symbol()?)),
            _ => Err(self.unexpected("integer or location name")),
        }
    }

    fn location(&mut self) -> Result<Location, ParseError> {
        match (self.peek().cloned(), self.peek_at(1).cloned()) {
            (Some(Tok::Ident(m)), Some(Tok::LBracket)) if m == "m" => {
                self.pos += 2;
                let name = self.symbol()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Location::Mem(name))
            }
            (Some(Tok::Ident(t)), Some(Tok::Colon)) if !is_register_name(&t) => {
                self.pos += 2;
                let reg = self.register()?;
                Ok(Location::Reg {
                    thread: Some(t),
                    reg,
                })
            }
            _ => Ok(Location::Reg {
                thread: None,
                reg: self.register()?,
            }),
        }
    }

    fn cond(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            lhs = lhs.or(self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Condition, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let c = self.cond()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => {
                let loc = self.location()?;
                let negated = match self.next() {
                    Some(Tok::Eq) => false,
                    Some(Tok::Neq) => true,
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        return Err(self.unexpected("`=` or `!=`"));
                    }
                };
                let atom = Condition::atom(loc, self.value_operand()?);
                Ok(if negated { atom.not() } else { atom })
            }
        }
    }
}

fn parse_instr(text: &str, line: usize, col0: usize) -> Result<SurfaceInstr, ParseError> {
    let mut t = Tokens::lex(text, line, col0)?;
    let first = match t.peek().cloned() {
        Some(Tok::Ident(s)) => s,
        _ => return Err(t.unexpected("instruction")),
    };

    // `NAME:` on its own is a label.
    if t.peek_at(1) == Some(&Tok::Colon) && t.toks.len() == 2 {
        if is_register_name(&first) || KEYWORDS.contains(&first.as_str()) {
            return Err(t.err(format!("`{first}` cannot be used as a label")));
        }
        return Ok(SurfaceInstr::Label(first));
    }

    let instr = match first.as_str() {
        "Commit" => {
            t.pos += 1;
            SurfaceInstr::Fence(FenceKind::Commit)
        }
        "Reconcile" => {
            t.pos += 1;
            SurfaceInstr::Fence(FenceKind::Reconcile)
        }
        "exit" => {
            t.pos += 1;
            SurfaceInstr::Exit
        }
        "beqz" | "bnez" => {
            t.pos += 1;
            let cond = if first == "beqz" {
                BranchCond::Eqz
            } else {
                BranchCond::Nez
            };
            let reg = t.register()?;
            if t.peek() == Some(&Tok::Comma) {
                t.pos += 1;
            }
            let target = t.ident("branch target label")?;
            SurfaceInstr::Branch { cond, reg, target }
        }
        "St" => {
            t.pos += 1;
            let addr = t.operand_expr()?;
            let val = t.operand_expr()?;
            SurfaceInstr::Store { addr, val }
        }
        r if is_register_name(r) => {
            t.pos += 1;
            t.expect(Tok::Eq, "`=`")?;
            if matches!(t.peek(), Some(Tok::Ident(s)) if s == "Ld") {
                t.pos += 1;
                let addr = if t.peek() == Some(&Tok::LParen) {
                    t.operand_expr()?
                } else {
                    t.expr()?
                };
                SurfaceInstr::Load {
                    dst: first.clone(),
                    addr,
                }
            } else {
                SurfaceInstr::Assign {
                    dst: first.clone(),
                    expr: t.expr()?,
                }
            }
        }
        other if t.toks.len() == 1 => {
            return Err(ParseError::new(
                line,
                t.col(),
                ParseErrorKind::UnknownFence(other.to_string()),
            ))
        }
        _ => return Err(t.unexpected("instruction")),
    };
    t.expect_end()?;
    Ok(instr)
}

/// Strip a `#` comment and return the remaining text.
fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

enum Section {
    Preamble,
    Init,
    Thread(usize),
}

struct LabelUse {
    thread: usize,
    target: String,
    line: usize,
    col: usize,
}

struct RegUse {
    loc: (Option<String>, String),
    line: usize,
    col: usize,
}

/// Parse a litmus test. See the module documentation for the format.
pub fn parse(text: &str) -> Result<LitmusTest, ParseError> {
    let mut test = LitmusTest {
        name: String::new(),
        model_hint: None,
        init: Vec::new(),
        threads: Vec::new(),
        checks: Vec::new(),
    };
    let mut section = Section::Preamble;
    let mut seen_content = false;
    let mut label_uses: Vec<LabelUse> = Vec::new();
    let mut reg_uses: Vec<RegUse> = Vec::new();
    let mut thread_lines: Vec<(usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim_start();
        let col0 = body.len() - trimmed.len() + 1;
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let first_line = !seen_content;
        seen_content = true;

        if first_line && trimmed.starts_with(HEADER) {
            let rest = trimmed[HEADER.len()..].trim();
            if rest != VERSION {
                return Err(ParseError::new(
                    lineno,
                    col0 + HEADER.len() + 1,
                    ParseErrorKind::UnsupportedVersion(rest.to_string()),
                ));
            }
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("name:") {
            test.name = rest.trim().to_string();
            section = Section::Preamble;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("model:") {
            let m = rest.trim();
            test.model_hint = Some(m.parse::<Model>().map_err(|_| {
                ParseError::new(
                    lineno,
                    col0 + 6,
                    ParseErrorKind::UnknownModel(m.to_string()),
                )
            })?);
            section = Section::Preamble;
            continue;
        }
        if trimmed == "init:" {
            section = Section::Init;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("thread ") {
            let name = rest.trim();
            let name = name.strip_suffix(':').ok_or_else(|| {
                ParseError::new(
                    lineno,
                    col0 + trimmed.len(),
                    ParseErrorKind::Syntax("expected `:` after thread name".into()),
                )
            })?;
            let name = name.trim();
            if name.is_empty()
                || !name.chars().next().is_some_and(is_ident_start)
                || !name.chars().all(is_ident_char)
            {
                return Err(ParseError::new(
                    lineno,
                    col0 + 7,
                    ParseErrorKind::Syntax(format!("invalid thread name `{name}`")),
                ));
            }
            if test.threads.iter().any(|t| t.name == name) {
                return Err(ParseError::new(
                    lineno,
                    col0 + 7,
                    ParseErrorKind::DuplicateThread(name.to_string()),
                ));
            }
            test.threads.push(Thread {
                name: name.to_string(),
                instrs: Vec::new(),
            });
            thread_lines.push((lineno, col0));
            section = Section::Thread(test.threads.len() - 1);
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("check") {
            if rest.starts_with(|c: char| c.is_whitespace()) {
                let check = parse_check(rest, lineno, col0 + 5, &mut reg_uses)?;
                test.checks.push(check);
                section = Section::Preamble;
                continue;
            }
        }

        match section {
            Section::Preamble => {
                return Err(ParseError::new(
                    lineno,
                    col0,
                    ParseErrorKind::Syntax(format!(
                        "unexpected line `{trimmed}` outside any section"
                    )),
                ))
            }
            Section::Init => {
                let mut t = Tokens::lex(trimmed, lineno, col0)?;
                let name = match (t.peek().cloned(), t.peek_at(1).cloned()) {
                    (Some(Tok::Ident(m)), Some(Tok::LBracket)) if m == "m" => {
                        t.pos += 2;
                        let n = t.symbol()?;
                        t.expect(Tok::RBracket, "`]`")?;
                        n
                    }
                    _ => t.symbol()?,
                };
                t.expect(Tok::Eq, "`=`")?;
                let v = t.value_operand()?;
                t.expect_end()?;
                test.init.push((name, v));
            }
            Section::Thread(ti) => {
                let instr = parse_instr(trimmed, lineno, col0)?;
                if let SurfaceInstr::Branch { target, .. } = &instr {
                    label_uses.push(LabelUse {
                        thread: ti,
                        target: target.clone(),
                        line: lineno,
                        col: col0,
                    });
                }
                if let SurfaceInstr::Label(l) = &instr {
                    if test.threads[ti]
                        .instrs
                        .iter()
                        .any(|i| matches!(i, SurfaceInstr::Label(x) if x == l))
                    {
                        return Err(ParseError::new(
                            lineno,
                            col0,
                            ParseErrorKind::DuplicateLabel(l.clone()),
                        ));
                    }
                }
                test.threads[ti].instrs.push(instr);
            }
        }
    }

    if test.threads.is_empty() {
        return Err(ParseError::new(1, 1, ParseErrorKind::NoThreads));
    }
    for u in &label_uses {
        let thread = &test.threads[u.thread];
        let found = u.target == EXIT_LABEL
            || thread
                .instrs
                .iter()
                .any(|i| matches!(i, SurfaceInstr::Label(l) if *l == u.target));
        if !found {
            return Err(ParseError::new(
                u.line,
                u.col,
                ParseErrorKind::UnresolvedLabel(u.target.clone()),
            ));
        }
    }
    if test.checks.is_empty() {
        let line = text.lines().count().max(1);
        return Err(ParseError::new(line, 1, ParseErrorKind::NoChecks));
    }
    for u in &reg_uses {
        resolve_register(&test, &u.loc.0, &u.loc.1)
            .map_err(|kind| ParseError::new(u.line, u.col, kind))?;
    }
    Ok(test)
}

fn parse_check(
    rest: &str,
    line: usize,
    col0: usize,
    reg_uses: &mut Vec<RegUse>,
) -> Result<Check, ParseError> {
    let colon = rest.find(':').ok_or_else(|| {
        ParseError::new(
            line,
            col0 + rest.len(),
            ParseErrorKind::Syntax("expected `:` in check".into()),
        )
    })?;
    let head = &rest[..colon];
    let cond_text = &rest[colon + 1..];
    let (polarity_text, scope) = match head.find('[') {
        Some(open) => {
            let close = head.rfind(']').ok_or_else(|| {
                ParseError::new(
                    line,
                    col0 + open,
                    ParseErrorKind::Syntax("unclosed `[` in check".into()),
                )
            })?;
            (&head[..open], Some((&head[open + 1..close], open + 1)))
        }
        None => (head, None),
    };
    let polarity = match polarity_text.trim() {
        "allowed" => Polarity::Allowed,
        "forbidden" => Polarity::Forbidden,
        other => {
            return Err(ParseError::new(
                line,
                col0 + 1,
                ParseErrorKind::Syntax(format!(
                    "expected `allowed` or `forbidden`, found `{other}`"
                )),
            ))
        }
    };
    let mut models = Vec::new();
    if let Some((scope, off)) = scope {
        for m in scope.split(',').map(str::trim).filter(|m| !m.is_empty()) {
            let model = m.parse::<Model>().map_err(|_| {
                ParseError::new(
                    line,
                    col0 + off,
                    ParseErrorKind::UnknownModel(m.to_string()),
                )
            })?;
            if !models.contains(&model) {
                models.push(model);
            }
        }
    }
    let mut t = Tokens::lex(cond_text, line, col0 + colon + 1)?;
    let start = t.pos;
    let cond = t.cond()?;
    t.expect_end()?;
    // Record register references for validation once all threads are known.
    for (i, (tok, col)) in t.toks.iter().enumerate().skip(start) {
        if let Tok::Ident(r) = tok {
            if is_register_name(r) {
                let qualifier = if i >= 2 && t.toks[i - 1].0 == Tok::Colon {
                    match &t.toks[i - 2].0 {
                        Tok::Ident(th) => Some(th.clone()),
                        _ => None,
                    }
                } else {
                    None
                };
                reg_uses.push(RegUse {
                    loc: (qualifier, r.clone()),
                    line,
                    col: *col,
                });
            }
        }
    }
    Ok(Check {
        polarity,
        models,
        cond,
    })
}

/// Find the thread owning a register reference from a condition.
pub fn resolve_register<'a>(
    test: &'a LitmusTest,
    thread: &Option<String>,
    reg: &str,
) -> Result<&'a Thread, ParseErrorKind> {
    match thread {
        Some(name) => {
            let th = test
                .thread(name)
                .ok_or_else(|| ParseErrorKind::UnknownRegister(format!("{name}:{reg}")))?;
            if th.registers().iter().any(|r| r == reg) {
                Ok(th)
            } else {
                Err(ParseErrorKind::UnknownRegister(format!("{name}:{reg}")))
            }
        }
        None => {
            let owners: Vec<&Thread> = test
                .threads
                .iter()
                .filter(|t| t.registers().iter().any(|r| r == reg))
                .collect();
            match owners.as_slice() {
                [one] => Ok(one),
                [] => Err(ParseErrorKind::UnknownRegister(reg.to_string())),
                _ => Err(ParseErrorKind::AmbiguousRegister(reg.to_string())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEKKER: &str = "\
i2e-litmus v1
name: dekker-wmm
thread P1:
  St a 1
  Commit
  Reconcile
  r1 = Ld b
thread P2:
  St b 1
  Commit
  Reconcile
  r2 = Ld a
check forbidden [wmm]: r1 = 0 & r2 = 0
";

    #[test]
    fn parses_dekker() {
        let t = parse(DEKKER).unwrap();
        assert_eq!(t.name, "dekker-wmm");
        assert_eq!(t.threads.len(), 2);
        assert!(t.threads.iter().all(|th| th.len() == 4));
        assert_eq!(t.checks.len(), 1);
        assert_eq!(t.checks[0].polarity, Polarity::Forbidden);
        assert_eq!(t.checks[0].models, vec![Model::Wmm]);
        assert_eq!(
            t.threads[0].instrs[1],
            SurfaceInstr::Fence(FenceKind::Commit)
        );
    }

    #[test]
    fn empty_input_has_no_threads() {
        let e = parse("").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NoThreads);
        assert_eq!(e.to_string(), "1:1: no threads");
        assert_eq!(
            parse("  \n# only a comment\n").unwrap_err().kind,
            ParseErrorKind::NoThreads
        );
    }

    #[test]
    fn address_arithmetic_assignment() {
        let i = parse_instr("r3 = a + r2 - 1", 1, 1).unwrap();
        assert_eq!(
            i,
            SurfaceInstr::Assign {
                dst: "r3".into(),
                expr: Expr {
                    terms: vec![
                        (Sign::Plus, Term::Sym("a".into())),
                        (Sign::Plus, Term::Reg("r2".into())),
                        (Sign::Minus, Term::Int(1)),
                    ]
                }
            }
        );
    }

    #[test]
    fn store_operands() {
        let i = parse_instr("St (r1 + c - 1) 1", 1, 1).unwrap();
        let SurfaceInstr::Store { addr, val } = i else {
            panic!()
        };
        assert_eq!(addr.terms.len(), 3);
        assert_eq!(val, Expr::int(1));
        let i = parse_instr("St b (r1 - 1)", 1, 1).unwrap();
        let SurfaceInstr::Store { addr, val } = i else {
            panic!()
        };
        assert_eq!(addr, Expr::sym("b"));
        assert_eq!(val.terms.len(), 2);
        assert!(parse_instr("St a r1 - 1", 1, 1).is_err());
    }

    #[test]
    fn load_through_register() {
        assert_eq!(
            parse_instr("r2 = Ld r1", 1, 1).unwrap(),
            SurfaceInstr::Load {
                dst: "r2".into(),
                addr: Expr::reg("r1")
            }
        );
    }

    #[test]
    fn duplicate_thread_rejected() {
        let src = "thread P1:\n St a 1\nthread P1:\n St b 1\ncheck allowed: m[a] = 1\n";
        let e = parse(src).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateThread("P1".into()));
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unresolved_label_rejected() {
        let src = "thread P1:\n r1 = Ld a\n beqz r1 done\ncheck allowed: r1 = 0\n";
        let e = parse(src).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnresolvedLabel("done".into()));
        assert_eq!((e.line, e.col), (3, 2));
    }

    #[test]
    fn exit_is_a_builtin_target() {
        let src = "thread P1:\n r1 = Ld a\n beqz r1 exit\n r2 = Ld b\ncheck allowed: r1 = 0\n";
        parse(src).unwrap();
    }

    #[test]
    fn unknown_fence_rejected() {
        let src = "thread P1:\n St a 1\n  MEMBAR\ncheck allowed: m[a] = 1\n";
        let e = parse(src).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownFence("MEMBAR".into()));
        assert_eq!((e.line, e.col), (3, 3));
    }

    #[test]
    fn syntax_error_has_position() {
        let src = "thread P1:\n r1 = Ld\ncheck allowed: r1 = 0\n";
        let e = parse(src).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.line, 2);
        assert_eq!(e.col, 9);
    }

    #[test]
    fn missing_checks_rejected() {
        assert_eq!(
            parse("thread P1:\n St a 1\n").unwrap_err().kind,
            ParseErrorKind::NoChecks
        );
    }

    #[test]
    fn ambiguous_and_unknown_registers() {
        let src = "thread P1:\n r1 = Ld a\nthread P2:\n r1 = Ld b\ncheck allowed: r1 = 0\n";
        assert_eq!(
            parse(src).unwrap_err().kind,
            ParseErrorKind::AmbiguousRegister("r1".into())
        );
        let src = "thread P1:\n r1 = Ld a\nthread P2:\n r1 = Ld b\ncheck allowed: P2:r1 = 0\n";
        parse(src).unwrap();
        let src = "thread P1:\n r1 = Ld a\ncheck allowed: r7 = 0\n";
        assert_eq!(
            parse(src).unwrap_err().kind,
            ParseErrorKind::UnknownRegister("r7".into())
        );
    }

    #[test]
    fn bad_version_and_model() {
        assert!(matches!(
            parse("i2e-litmus v2\nthread P1:\n St a 1\ncheck allowed: m[a]=1\n")
                .unwrap_err()
                .kind,
            ParseErrorKind::UnsupportedVersion(_)
        ));
        assert!(matches!(
            parse("thread P1:\n St a 1\ncheck allowed [rmo]: m[a]=1\n")
                .unwrap_err()
                .kind,
            ParseErrorKind::UnknownModel(_)
        ));
    }

    #[test]
    fn condition_precedence() {
        let mut t = Tokens::lex("r1 = 0 | r2 = 1 & !m[a] = 2", 1, 1).unwrap();
        let c = t.cond().unwrap();
        let Condition::Or(_, rhs) = c else {
            panic!("| binds loosest")
        };
        let Condition::And(_, rhs) = *rhs else {
            panic!("& binds tighter")
        };
        assert!(matches!(*rhs, Condition::Not(_)));
    }

    #[test]
    fn init_section() {
        let src = "init:\n a = 7\n m[b] = a\nthread P1:\n r1 = Ld a\ncheck allowed: r1 = 7\n";
        let t = parse(src).unwrap();
        assert_eq!(
            t.init,
            vec![
                ("a".into(), Operand::Int(7)),
                ("b".into(), Operand::Sym("a".into()))
            ]
        );
    }
}
