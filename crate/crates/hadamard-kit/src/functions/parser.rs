//! Recursive-descent parser for the expression language.
//!
//! Grammar (whitespace-insensitive, +-*/ left-associative, `^` binds tighter
//! than unary minus):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | power
//! power   := atom ['^' int]
//! atom    := number | 'z' | '(' expr ')' | func '(' expr ')'
//!          | 'laurent' '(' '[' coeff (',' coeff)* ']' ',' int ')'
//! func    := 'exp' | 'log' | 'log1p' | 'li2'
//! number  := decimal literal, optional exponent, optional 'i' suffix
//! coeff   := ['-'] number
//! ```
//!
//! `log` only accepts arguments affine in z; `log(1+z)` normalizes to the
//! dedicated `log1p` node so its cut stays exact.

use num_complex::Complex64;

use super::{affine_parts, Expr};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: Vec<&'static str>) -> Error {
        let found = match self.src.get(self.pos) {
            Some(&c) => format!("`{}`", c as char),
            None => "end of input".to_string(),
        };
        Error::ParseError {
            offset: self.pos,
            found,
            expected,
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(vec![what]))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.int()?;
            return Ok(Expr::PowInt(Box::new(base), k));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error(vec!["integer"]));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<i32>()
            .map_err(|_| self.error(vec!["integer"]))
    }

    fn number(&mut self) -> Result<Complex64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error(vec!["number"]));
        }
        // optional exponent
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
        {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            let d0 = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == d0 {
                self.pos = mark; // `e` begins an identifier, not an exponent
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::ParseError {
            offset: start,
            found: format!("`{text}`"),
            expected: vec!["number"],
        })?;
        if self.pos < self.src.len() && self.src[self.pos] == b'i' {
            self.pos += 1;
            Ok(Complex64::new(0.0, value))
        } else {
            Ok(Complex64::new(value, 0.0))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn coeff(&mut self) -> Result<Complex64> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            Ok(-self.number()?)
        } else {
            self.number()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')', "`)`")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "z" => Ok(Expr::Var),
                    "exp" | "log" | "log1p" | "li2" => {
                        self.expect(b'(', "`(`")?;
                        let arg = self.expr()?;
                        self.expect(b')', "`)`")?;
                        self.apply_func(&name, arg)
                    }
                    "laurent" => {
                        self.expect(b'(', "`(`")?;
                        self.expect(b'[', "`[`")?;
                        let mut coeffs = vec![self.coeff()?];
                        while self.peek() == Some(b',') {
                            self.pos += 1;
                            if self.peek() == Some(b']') {
                                break;
                            }
                            coeffs.push(self.coeff()?);
                        }
                        self.expect(b']', "`]`")?;
                        self.expect(b',', "`,`")?;
                        let n_min = self.int()?;
                        self.expect(b')', "`)`")?;
                        Ok(Expr::Laurent { coeffs, n_min })
                    }
                    "" => Err(self.error(vec!["number", "`z`", "`(`", "function name"])),
                    other => Err(Error::ParseError {
                        offset: self.pos - other.len(),
                        found: format!("`{other}`"),
                        expected: vec!["exp", "log", "log1p", "li2", "laurent", "z"],
                    }),
                }
            }
            _ => Err(self.error(vec!["number", "`z`", "`(`", "function name"])),
        }
    }

    fn apply_func(&self, name: &str, arg: Expr) -> Result<Expr> {
        match name {
            "exp" => Ok(Expr::Exp(Box::new(arg))),
            "li2" => Ok(Expr::Li2(Box::new(arg))),
            "log1p" => Ok(Expr::Log1p(Box::new(arg))),
            "log" => {
                // only affine arguments keep the cut computable
                let (a, b) = affine_parts(&arg).ok_or_else(|| {
                    Error::RejectedExpression(
                        "log admits only arguments affine in z; rewrite or use log1p/li2".into(),
                    )
                })?;
                let one = Complex64::new(1.0, 0.0);
                if (a - one).norm() < 1e-15 && (b - one).norm() < 1e-15 {
                    Ok(Expr::Log1p(Box::new(Expr::Var)))
                } else {
                    Ok(Expr::LogP(Box::new(arg)))
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Parse an expression in the `z` variable.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(vec!["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_of_one_plus_z_normalizes_to_log1p() {
        let e = parse_expr("log(1+z)").unwrap();
        assert!(matches!(e, Expr::Log1p(ref a) if matches!(**a, Expr::Var)));
        let e = parse_expr("log( 1 + z )").unwrap();
        assert!(matches!(e, Expr::Log1p(_)));
    }

    #[test]
    fn simple_rational() {
        let e = parse_expr("1/(z-2)").unwrap();
        match e {
            Expr::Div(n, d) => {
                assert!(matches!(*n, Expr::Const(c) if c == Complex64::new(1.0, 0.0)));
                assert!(matches!(*d, Expr::Sub(_, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_input_reports_offset() {
        match parse_expr("li2(z") {
            Err(Error::ParseError { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_expr("-z^2").unwrap();
        assert!(matches!(e, Expr::Neg(ref inner) if matches!(**inner, Expr::PowInt(_, 2))));
    }

    #[test]
    fn laurent_atom() {
        let e = parse_expr("laurent([1, -0.5, 2i], -1)").unwrap();
        match e {
            Expr::Laurent { coeffs, n_min } => {
                assert_eq!(n_min, -1);
                assert_eq!(coeffs.len(), 3);
                assert_eq!(coeffs[2], Complex64::new(0.0, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_of_nonaffine_argument_is_rejected() {
        assert!(matches!(
            parse_expr("log(z^2)"),
            Err(Error::RejectedExpression(_))
        ));
        assert!(parse_expr("log(2*z + 1)").is_ok());
    }

    #[test]
    fn trailing_garbage_is_an_error() {
        assert!(parse_expr("z + 1 )").is_err());
    }
}
