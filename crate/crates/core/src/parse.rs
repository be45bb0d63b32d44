//! Recursive-descent parser for the rotation-expression language.
//!
//! ```text
//! Expr   := Term ('+' Term)*
//! Term   := Factor ('*' Factor)*
//! Factor := Axis '(' signed-real ')' | '(' Expr ')'
//! Axis   := 'x' | 'y' | 'z' | 'u' '(' real ',' real ',' real ')'
//! ```
//!
//! The sign of the frequency literal selects the rotation sense. Whitespace
//! is insignificant. `Display` on [`RotationExpr`] produces text this parser
//! accepts.

use crate::error::{Error, Result};
use crate::rotation::{AsrSpec, Axis, RotationExpr, Sense};

pub fn parse_expr(src: &str) -> Result<RotationExpr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(Error::Parse {
            offset: 0,
            expected: vec!["expression".into()],
            found: "end of input".into(),
        });
    }
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&["'+'", "'*'", "end of input"]));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{}'", c as char)]))
        }
    }

    fn error(&mut self, expected: &[&str]) -> Error {
        self.skip_ws();
        let found = match std::str::from_utf8(&self.src[self.pos..]) {
            Ok(rest) => match rest.chars().next() {
                Some(ch) => format!("'{ch}'"),
                None => "end of input".to_string(),
            },
            Err(_) => "invalid UTF-8".to_string(),
        };
        Error::Parse {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn expr(&mut self) -> Result<RotationExpr> {
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            RotationExpr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<RotationExpr> {
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            RotationExpr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<RotationExpr> {
        const EXPECTED: [&str; 5] = ["'x'", "'y'", "'z'", "'u'", "'('"];
        let start = {
            self.skip_ws();
            self.pos
        };
        let axis = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                return Ok(inner);
            }
            Some(b'x') => {
                self.pos += 1;
                Axis::X
            }
            Some(b'y') => {
                self.pos += 1;
                Axis::Y
            }
            Some(b'z') => {
                self.pos += 1;
                Axis::Z
            }
            Some(b'u') => {
                self.pos += 1;
                self.expect(b'(')?;
                let dx = self.real()?;
                self.expect(b',')?;
                let dy = self.real()?;
                self.expect(b',')?;
                let dz = self.real()?;
                self.expect(b')')?;
                Axis::Direction([dx, dy, dz])
            }
            _ => return Err(self.error(&EXPECTED)),
        };
        self.expect(b'(')?;
        self.skip_ws();
        let negative = self.src.get(self.pos) == Some(&b'-');
        let omega = self.real()?;
        self.expect(b')')?;
        let spec = AsrSpec {
            axis,
            omega: omega.abs(),
            sense: if negative { Sense::Negative } else { Sense::Positive },
        };
        if let Err(e) = spec.axis.validate() {
            return Err(match e {
                Error::InvalidAxis { norm } => Error::Parse {
                    offset: start,
                    expected: vec!["unit-norm u-axis".into()],
                    found: format!("axis of norm {norm}"),
                },
                other => other,
            });
        }
        Ok(RotationExpr::Leaf(spec))
    }

    /// Decimal literal with optional sign and exponent.
    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut mantissa_digits = i - digits_start;
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            let frac_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            mantissa_digits += i - frac_start;
        }
        if mantissa_digits == 0 {
            self.pos = start;
            return Err(self.error(&["number"]));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).expect("ASCII slice");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: vec!["number".into()],
            found: format!("'{text}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                offset: start,
                expected: vec!["finite number".into()],
                found: format!("'{text}'"),
            });
        }
        self.pos = i;
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf() {
        assert_eq!(parse_expr("z(1.0)").unwrap(), RotationExpr::Leaf(AsrSpec::z(1.0)));
    }

    #[test]
    fn negative_frequency_is_sense() {
        assert_eq!(
            parse_expr("z(-2)").unwrap(),
            RotationExpr::Leaf(AsrSpec::z(2.0).with_sense(Sense::Negative))
        );
    }

    #[test]
    fn product_binds_tighter_than_sum() {
        let e = parse_expr("z(1)*x(2)+y(0.5)").unwrap();
        assert_eq!(
            e,
            RotationExpr::Sum(vec![
                RotationExpr::Product(vec![AsrSpec::z(1.0).into(), AsrSpec::x(2.0).into()]),
                AsrSpec::y(0.5).into(),
            ])
        );
    }

    #[test]
    fn whitespace_and_parentheses() {
        let e = parse_expr("  ( z( 1 ) + x(2e0) ) *\ty(+3.5) ").unwrap();
        assert_eq!(
            e,
            RotationExpr::Product(vec![
                RotationExpr::Sum(vec![AsrSpec::z(1.0).into(), AsrSpec::x(2.0).into()]),
                AsrSpec::y(3.5).into(),
            ])
        );
    }

    #[test]
    fn arbitrary_axis() {
        let e = parse_expr("u(0.6, 0, -0.8)(.5)").unwrap();
        assert_eq!(
            e,
            RotationExpr::Leaf(AsrSpec {
                axis: Axis::Direction([0.6, 0.0, -0.8]),
                omega: 0.5,
                sense: Sense::Positive
            })
        );
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("") {
            Err(Error::Parse { offset: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_expr("z(1)*") {
            Err(Error::Parse { offset, expected, .. }) => {
                assert_eq!(offset, 5);
                assert!(expected.contains(&"'('".to_string()));
            }
            other => panic!("{other:?}"),
        }
        match parse_expr("z(1) x(2)") {
            Err(Error::Parse { offset: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_expr("w(1)") {
            Err(Error::Parse { offset: 0, found, .. }) => assert_eq!(found, "'w'"),
            other => panic!("{other:?}"),
        }
        match parse_expr("z()") {
            Err(Error::Parse {
                offset: 2, expected, ..
            }) => assert_eq!(expected, vec!["number"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_unit_axis_is_a_parse_error() {
        match parse_expr("x(1)+u(1,1,0)(2)") {
            Err(Error::Parse {
                offset: 5, expected, ..
            }) => assert_eq!(expected, vec!["unit-norm u-axis"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_is_fixed_point() {
        for src in [
            "z(1)*x(2)+y(0.5)",
            "(z(1)+x(-2))*(y(3)*z(0.25))",
            "u(0.6,0.8,0)(-1e-3)+((x(1)))",
        ] {
            let e = parse_expr(src).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, again);
            assert_eq!(e.to_string(), again.to_string());
        }
    }
}
