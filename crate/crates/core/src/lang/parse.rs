//! Concrete syntax for DataLang.
//!
//! Grammar (precedence from loosest to tightest):
//!
//! ```text
//! program  := def*
//! def      := "@tmc"? "fun" NAME param "=" expr
//! param    := x | "(" x "," y ")"
//! expr     := "let" x "=" expr "in" expr
//!           | "if" expr "then" expr "else" expr
//!           | "match" expr "with" "[" "]" "->" expr "|" x "::" y "->" expr "end"
//!           | store (";" expr)?
//! store    := eq ("<-" store)?        -- lhs must be a load
//! eq       := cons ("==" cons)?
//! cons     := add ("::" cons)?
//! add      := mul ("+" mul)*          -- integer extension
//! mul      := post ("*" post)*        -- integer extension
//! post     := atom ( "(" args ")" | ".[" index "]" | "[@tailcall" "false"? "]" | atom )*
//! atom     := "()" | "true" | "false" | NUMBER | "#" NAME | "&" NAME | "@" NAME
//!           | NAME | "_?" | "(" expr ("," expr)? ")" | "[" (expr ("," expr)*)? "]"
//!           | "block" "#" NAME "(" expr "," expr ")"
//!           | "blockdet" "#" NAME "(" expr "," expr ")"
//! ```
//!
//! Juxtaposition application (`post atom`) is accepted only when the head is
//! an `@`-prefixed function pointer, so paper-style `@map (f, xs)` parses.
//! Numerals are indices 0/1/2 unless the integer extension is on; inside
//! `.[ ]` a literal 0/1/2 is always an index. Comments are `(* ... *)`,
//! nested. Sugar (pairs, lists, `::`, `;`, `match`, `_?`) is desugared during
//! parsing, so the resulting AST contains only core forms.

use super::ast::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("{line}:{col}: unknown annotation \"[@{name}]\"")]
    UnknownAnnotation { line: u32, col: u32, name: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Enables integer literals and `+`/`*`.
    pub ints: bool,
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(tokens, opts);
    p.program()
}

/// Parses a standalone expression (used for CLI call arguments).
pub fn parse_expr_text(text: &str, opts: ParseOptions) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(tokens, opts);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(i64),
    TagLit(String),
    // keywords
    Fun,
    Let,
    In,
    If,
    Then,
    Else,
    Match,
    With,
    End,
    Block,
    Blockdet,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    DblColon,
    EqEq,
    Assign,
    Arrow,
    Bar,
    StoreArrow,
    Plus,
    Star,
    Amp,
    At,
    DotBracket,
    Hole,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    macro_rules! err {
        ($($arg:tt)*) => {
            return Err(ParseError::Syntax { line, col, msg: format!($($arg)*) })
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            // nested comment
            let mut depth = 1;
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            while depth > 0 {
                if i >= chars.len() {
                    err!("unterminated comment");
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col);
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col);
                }
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        let mut push = |t: Tok| {
            toks.push(Token {
                tok: t,
                line: tl,
                col: tc,
            })
        };
        match c {
            '(' => {
                push(Tok::LParen);
                advance(&mut i, &mut line, &mut col);
            }
            ')' => {
                push(Tok::RParen);
                advance(&mut i, &mut line, &mut col);
            }
            '[' => {
                push(Tok::LBracket);
                advance(&mut i, &mut line, &mut col);
            }
            ']' => {
                push(Tok::RBracket);
                advance(&mut i, &mut line, &mut col);
            }
            ',' => {
                push(Tok::Comma);
                advance(&mut i, &mut line, &mut col);
            }
            ';' => {
                push(Tok::Semi);
                advance(&mut i, &mut line, &mut col);
            }
            '|' => {
                push(Tok::Bar);
                advance(&mut i, &mut line, &mut col);
            }
            '+' => {
                push(Tok::Plus);
                advance(&mut i, &mut line, &mut col);
            }
            '*' => {
                push(Tok::Star);
                advance(&mut i, &mut line, &mut col);
            }
            '&' => {
                push(Tok::Amp);
                advance(&mut i, &mut line, &mut col);
            }
            '@' => {
                push(Tok::At);
                advance(&mut i, &mut line, &mut col);
            }
            ':' => {
                if chars.get(i + 1) == Some(&':') {
                    push(Tok::DblColon);
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                } else {
                    err!("expected \"::\"");
                }
            }
            '=' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::EqEq);
                    advance(&mut i, &mut line, &mut col);
                } else {
                    push(Tok::Assign);
                }
                advance(&mut i, &mut line, &mut col);
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') {
                    push(Tok::StoreArrow);
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                } else {
                    err!("expected \"<-\"");
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow);
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                } else if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    advance(&mut i, &mut line, &mut col);
                    let mut n: i64 = 0;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        n = n.wrapping_mul(10).wrapping_sub(chars[i] as i64 - '0' as i64);
                        advance(&mut i, &mut line, &mut col);
                    }
                    push(Tok::Number(n));
                } else {
                    err!("expected \"->\" or a negative numeral");
                }
            }
            '.' => {
                if chars.get(i + 1) == Some(&'[') {
                    push(Tok::DotBracket);
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                } else {
                    err!("stray \".\"");
                }
            }
            '#' => {
                advance(&mut i, &mut line, &mut col);
                let name = lex_ident(&chars, &mut i, &mut line, &mut col);
                if name.is_empty() {
                    err!("expected a tag name after \"#\"");
                }
                push(Tok::TagLit(name));
            }
            '_' if chars.get(i + 1) == Some(&'?') => {
                push(Tok::Hole);
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut n: i64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n.wrapping_mul(10).wrapping_add(chars[i] as i64 - '0' as i64);
                    advance(&mut i, &mut line, &mut col);
                }
                push(Tok::Number(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let name = lex_ident(&chars, &mut i, &mut line, &mut col);
                push(match name.as_str() {
                    "fun" => Tok::Fun,
                    "let" => Tok::Let,
                    "in" => Tok::In,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    "match" => Tok::Match,
                    "with" => Tok::With,
                    "end" => Tok::End,
                    "block" => Tok::Block,
                    "blockdet" => Tok::Blockdet,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(name),
                });
            }
            c => err!("unexpected character {c:?}"),
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(toks)
}

/// Identifiers also admit `%` (fresh-name suffixes) and interior `.`
/// (transform-generated names like `map.dps`), except a `.` that opens a
/// load/store bracket.
fn lex_ident(chars: &[char], i: &mut usize, line: &mut u32, col: &mut u32) -> String {
    let mut s = String::new();
    while *i < chars.len() {
        let c = chars[*i];
        let ok = c.is_ascii_alphanumeric()
            || c == '_'
            || c == '%'
            || (c == '.'
                && chars
                    .get(*i + 1)
                    .is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_'));
        if !ok {
            break;
        }
        s.push(c);
        *col += 1;
        *i += 1;
        let _ = line;
    }
    s
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
    names: NameGen,
}

impl Parser {
    fn new(toks: Vec<Token>, opts: ParseOptions) -> Parser {
        let mut names = NameGen::new();
        // Reserve every identifier in the input so desugaring-generated
        // fresh names cannot collide with user-written ones.
        for t in &toks {
            if let Tok::Ident(s) = &t.tok {
                names.reserve(s);
            }
        }
        Parser {
            toks,
            pos: 0,
            opts,
            names,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected {what}, found {other:?}")),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("trailing input: {:?}", self.peek()))
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut p = Program::new(self.opts.ints);
        while *self.peek() != Tok::Eof {
            let tmc = if *self.peek() == Tok::At && *self.peek2() == Tok::Ident("tmc".into()) {
                self.bump();
                self.bump();
                true
            } else {
                false
            };
            self.eat(Tok::Fun, "\"fun\"")?;
            let (line, col) = self.here();
            let name = self.ident("a function name")?;
            let (param, wrap) = self.param()?;
            self.eat(Tok::Assign, "\"=\"")?;
            let body = self.expr()?;
            let def = Def {
                param,
                body: wrap(body),
                annotated_tmc: tmc,
            };
            if p.insert(name.clone(), def).is_err() {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("duplicate definition of {name}"),
                });
            }
        }
        Ok(p)
    }

    /// `x` or `(x, y)`; the pair form desugars to loads from a fresh param.
    #[allow(clippy::type_complexity)]
    fn param(&mut self) -> Result<(String, Box<dyn Fn(Expr) -> Expr>), ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let x = self.ident("a parameter name")?;
            self.eat(Tok::Comma, "\",\"")?;
            let y = self.ident("a parameter name")?;
            self.eat(Tok::RParen, "\")\"")?;
            let p = self.names.fresh("p");
            let pn = p.clone();
            Ok((
                p,
                Box::new(move |body| {
                    Expr::let_(
                        x.clone(),
                        Expr::load(Expr::var(&pn), Expr::idx(Idx::ONE)),
                        Expr::let_(
                            y.clone(),
                            Expr::load(Expr::var(&pn), Expr::idx(Idx::TWO)),
                            body,
                        ),
                    )
                }),
            ))
        } else {
            let x = self.ident("a parameter")?;
            Ok((x, Box::new(|body| body)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Let => {
                self.bump();
                let x = self.ident("a variable name")?;
                self.eat(Tok::Assign, "\"=\"")?;
                let e1 = self.expr()?;
                self.eat(Tok::In, "\"in\"")?;
                let e2 = self.expr()?;
                Ok(Expr::let_(x, e1, e2))
            }
            Tok::If => {
                self.bump();
                let c = self.expr()?;
                self.eat(Tok::Then, "\"then\"")?;
                let t = self.expr()?;
                self.eat(Tok::Else, "\"else\"")?;
                let e = self.expr()?;
                Ok(Expr::if_(c, t, e))
            }
            Tok::Match => self.match_expr(),
            _ => {
                let e = self.store()?;
                if *self.peek() == Tok::Semi {
                    self.bump();
                    let e2 = self.expr()?;
                    let x = self.names.fresh("_");
                    Ok(Expr::let_(x, e, e2))
                } else {
                    Ok(e)
                }
            }
        }
    }

    /// `match e with [] -> e1 | x :: xs -> e2 end`, desugared per the list
    /// sugar: one Eq against nil, one If, two Loads at indices 1 and 2.
    fn match_expr(&mut self) -> Result<Expr, ParseError> {
        self.eat(Tok::Match, "\"match\"")?;
        let scrut = self.expr()?;
        self.eat(Tok::With, "\"with\"")?;
        // optional leading bar before the nil arm
        if *self.peek() == Tok::Bar {
            self.bump();
        }
        self.eat(Tok::LBracket, "\"[\"")?;
        self.eat(Tok::RBracket, "\"]\"")?;
        self.eat(Tok::Arrow, "\"->\"")?;
        let nil_arm = self.expr()?;
        self.eat(Tok::Bar, "\"|\"")?;
        let x = self.ident("a head binder")?;
        self.eat(Tok::DblColon, "\"::\"")?;
        let xs = self.ident("a tail binder")?;
        self.eat(Tok::Arrow, "\"->\"")?;
        let cons_arm = self.expr()?;
        self.eat(Tok::End, "\"end\"")?;
        let y = self.names.fresh("y");
        Ok(Expr::let_(
            y.clone(),
            scrut,
            Expr::if_(
                Expr::eq(Expr::var(&y), Expr::nil()),
                nil_arm,
                Expr::let_(
                    x,
                    Expr::load(Expr::var(&y), Expr::idx(Idx::ONE)),
                    Expr::let_(
                        xs,
                        Expr::load(Expr::var(&y), Expr::idx(Idx::TWO)),
                        cons_arm,
                    ),
                ),
            ),
        ))
    }

    fn store(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.eq()?;
        if *self.peek() == Tok::StoreArrow {
            self.bump();
            let rhs = self.store()?;
            match lhs {
                Expr::Load(e1, e2) => Ok(Expr::Store(e1, e2, Box::new(rhs))),
                _ => self.err("left-hand side of \"<-\" must be a load \"e.[e]\""),
            }
        } else {
            Ok(lhs)
        }
    }

    fn eq(&mut self) -> Result<Expr, ParseError> {
        let l = self.cons()?;
        if *self.peek() == Tok::EqEq {
            self.bump();
            let r = self.cons()?;
            Ok(Expr::eq(l, r))
        } else {
            Ok(l)
        }
    }

    fn cons(&mut self) -> Result<Expr, ParseError> {
        let l = self.add()?;
        if *self.peek() == Tok::DblColon {
            self.bump();
            let r = self.cons()?;
            Ok(Expr::cons(l, r))
        } else {
            Ok(l)
        }
    }

    fn add(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.mul()?;
        while *self.peek() == Tok::Plus {
            if !self.opts.ints {
                return self.err("\"+\" requires the integer extension");
            }
            self.bump();
            let r = self.mul()?;
            e = Expr::binop(BinOp::Add, e, r);
        }
        Ok(e)
    }

    fn mul(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.postfix()?;
        while *self.peek() == Tok::Star {
            if !self.opts.ints {
                return self.err("\"*\" requires the integer extension");
            }
            self.bump();
            let r = self.postfix()?;
            e = Expr::binop(BinOp::Mul, e, r);
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let (mut e, mut callable) = self.atom()?;
        loop {
            match self.peek() {
                Tok::LParen => {
                    self.bump();
                    let arg = self.call_args()?;
                    e = Expr::call(e, arg);
                    callable = false;
                }
                Tok::DotBracket => {
                    self.bump();
                    let idx = self.index_expr()?;
                    self.eat(Tok::RBracket, "\"]\"")?;
                    e = Expr::load(e, idx);
                    callable = false;
                }
                Tok::LBracket if *self.peek2() == Tok::At => {
                    e = self.annotation(e)?;
                    callable = false;
                }
                t if callable && starts_atom(t) => {
                    // juxtaposition call, only after an `@f` head
                    let arg = self.postfix()?;
                    e = Expr::call(e, arg);
                    callable = false;
                }
                _ => break,
            }
        }
        Ok(e)
    }

    /// `(e)` or `(e1, e2)` after a callee; the pair form builds one pair arg.
    fn call_args(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(Expr::unit());
        }
        let e1 = self.expr()?;
        if *self.peek() == Tok::Comma {
            self.bump();
            let e2 = self.expr()?;
            self.eat(Tok::RParen, "\")\"")?;
            Ok(Expr::pair(e1, e2))
        } else {
            self.eat(Tok::RParen, "\")\"")?;
            Ok(e1)
        }
    }

    /// Inside `.[ ]` a literal numeral 0/1/2 is always an index, even with
    /// the integer extension on.
    fn index_expr(&mut self) -> Result<Expr, ParseError> {
        if let Tok::Number(n) = *self.peek() {
            if *self.peek2() == Tok::RBracket {
                if let Some(i) = u8::try_from(n).ok().and_then(Idx::new) {
                    self.bump();
                    return Ok(Expr::idx(i));
                }
            }
        }
        self.expr()
    }

    fn annotation(&mut self, e: Expr) -> Result<Expr, ParseError> {
        self.eat(Tok::LBracket, "\"[\"")?;
        self.eat(Tok::At, "\"@\"")?;
        let (line, col) = self.here();
        let name = self.ident("an annotation name")?;
        if name != "tailcall" {
            return Err(ParseError::UnknownAnnotation { line, col, name });
        }
        let flag = if *self.peek() == Tok::False {
            self.bump();
            false
        } else {
            true
        };
        self.eat(Tok::RBracket, "\"]\"")?;
        if !matches!(e, Expr::Call(_, _)) {
            return self.err("[@tailcall] may only annotate a call");
        }
        Ok(Expr::annotated(e, Annotation::Tailcall(flag)))
    }

    /// Returns (expr, callable-by-juxtaposition).
    fn atom(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok((Expr::unit(), false));
                }
                let e1 = self.expr()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let e2 = self.expr()?;
                    self.eat(Tok::RParen, "\")\"")?;
                    Ok((Expr::pair(e1, e2), false))
                } else {
                    self.eat(Tok::RParen, "\")\"")?;
                    Ok((e1, false))
                }
            }
            Tok::True => {
                self.bump();
                Ok((Expr::bool(true), false))
            }
            Tok::False => {
                self.bump();
                Ok((Expr::bool(false), false))
            }
            Tok::Number(n) => {
                self.bump();
                if self.opts.ints {
                    Ok((Expr::int(n), false))
                } else if let Some(i) = u8::try_from(n).ok().and_then(Idx::new) {
                    Ok((Expr::idx(i), false))
                } else {
                    self.err(format!("numeral {n} requires the integer extension"))
                }
            }
            Tok::TagLit(t) => {
                self.bump();
                Ok((Expr::Val(Val::Tag(t)), false))
            }
            Tok::Amp => {
                self.bump();
                let f = self.ident("a function name")?;
                Ok((Expr::fnptr(f), false))
            }
            Tok::At => {
                self.bump();
                let f = self.ident("a function name")?;
                Ok((Expr::fnptr(f), true))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok((Expr::var(x), false))
            }
            Tok::Hole => {
                self.bump();
                Ok((Expr::hole(), false))
            }
            Tok::LBracket => {
                self.bump();
                if *self.peek() == Tok::RBracket {
                    self.bump();
                    return Ok((Expr::nil(), false));
                }
                let mut items = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.expr()?);
                }
                self.eat(Tok::RBracket, "\"]\"")?;
                let mut e = Expr::nil();
                for item in items.into_iter().rev() {
                    e = Expr::cons(item, e);
                }
                Ok((e, false))
            }
            Tok::Block => {
                let (t, e1, e2) = self.block_body()?;
                Ok((Expr::block(t, e1, e2), false))
            }
            Tok::Blockdet => {
                let (t, e1, e2) = self.block_body()?;
                Ok((Expr::block_det(t, e1, e2), false))
            }
            other => self.err(format!("expected an expression, found {other:?}")),
        }
    }

    fn block_body(&mut self) -> Result<(String, Expr, Expr), ParseError> {
        self.bump(); // block / blockdet
        let t = match self.peek().clone() {
            Tok::TagLit(t) => {
                self.bump();
                t
            }
            other => return self.err(format!("expected a #tag, found {other:?}")),
        };
        self.eat(Tok::LParen, "\"(\"")?;
        let e1 = self.expr()?;
        self.eat(Tok::Comma, "\",\"")?;
        let e2 = self.expr()?;
        self.eat(Tok::RParen, "\")\"")?;
        Ok((t, e1, e2))
    }
}

fn starts_atom(t: &Tok) -> bool {
    matches!(
        t,
        Tok::LParen
            | Tok::True
            | Tok::False
            | Tok::Number(_)
            | Tok::TagLit(_)
            | Tok::Amp
            | Tok::At
            | Tok::Ident(_)
            | Tok::Hole
            | Tok::LBracket
            | Tok::Block
            | Tok::Blockdet
    )
}
