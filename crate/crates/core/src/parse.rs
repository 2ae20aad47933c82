//! Text grammar for scales and function models, used by the command line
//! and by config files:
//!
//! ```text
//! scale  := sinlog
//!         | iter(m=INT, n=INT, a=FLOAT, c=FLOAT)
//!         | maxmod(model)
//!         | charac(model)
//! model  := poly(COMPLEX, ...)
//!         | exppow(c=FLOAT, n=INT)
//!         | exptower(k=INT)
//!         | rat(zeros=[COMPLEX, ...]; poles=[COMPLEX, ...]; scale=COMPLEX)
//!         | sum(model, model)
//!         | prod(model, model)
//! ```
//!
//! Complex literals: `2`, `-1.5`, `3i`, `1+2i`, `2.5-1e-3i`, `i`, `-i`.

use crate::error::{Error, Result};
use crate::models::FunctionModel;
use crate::scales::GrowthScale;
use num_complex::Complex64;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn fail(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} of {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.fail(&format!("expected '{c}'")))
        }
    }

    /// Lowercase keyword: identifier characters only.
    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(self.fail("expected a name"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    /// Raw token up to one of the delimiter characters (exclusive).
    fn until(&mut self, delims: &[char]) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest.find(|c: char| delims.contains(&c)).unwrap_or(rest.len());
        self.pos += end;
        rest[..end].trim()
    }

    fn done(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.fail("trailing input"))
        }
    }
}

fn parse_f64(tok: &str, cur: &Cursor) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| cur.fail(&format!("bad number {tok:?}")))
}

fn parse_u32(tok: &str, cur: &Cursor) -> Result<u32> {
    tok.parse::<u32>()
        .map_err(|_| cur.fail(&format!("bad integer {tok:?}")))
}

/// Split "a+bi" style literals. The split sign is the last '+'/'-' that is
/// neither leading nor part of an exponent.
pub fn parse_complex_literal(tok: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex literal {tok:?}"));
    let tok = tok.trim();
    if tok.is_empty() {
        return Err(bad());
    }
    if !tok.ends_with(['i', 'I']) {
        return tok.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    let body = &tok[..tok.len() - 1];
    let split = body
        .char_indices()
        .rev()
        .find(|&(i, c)| {
            (c == '+' || c == '-')
                && i > 0
                && !body[..i].ends_with(['e', 'E'])
        })
        .map(|(i, _)| i);
    let (re_str, im_str) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// name=value pairs, comma separated, closed by ')'. Keys must match
/// `keys` exactly (order free, no repeats, none missing).
fn kv_args<'a>(cur: &mut Cursor<'a>, keys: &[&str]) -> Result<Vec<&'a str>> {
    cur.expect('(')?;
    let mut seen: Vec<(&str, &str)> = Vec::new();
    loop {
        let name = cur.ident()?;
        cur.expect('=')?;
        let value = cur.until(&[',', ')']);
        if seen.iter().any(|(n, _)| *n == name) {
            return Err(cur.fail(&format!("duplicate argument {name:?}")));
        }
        if !keys.contains(&name) {
            return Err(cur.fail(&format!("unknown argument {name:?}")));
        }
        seen.push((name, value));
        match cur.peek() {
            Some(',') => cur.expect(',')?,
            Some(')') => {
                cur.expect(')')?;
                break;
            }
            _ => return Err(cur.fail("expected ',' or ')'")),
        }
    }
    keys.iter()
        .map(|k| {
            seen.iter()
                .find(|(n, _)| n == k)
                .map(|(_, v)| *v)
                .ok_or_else(|| cur.fail(&format!("missing argument {k:?}")))
        })
        .collect()
}

fn complex_list(cur: &mut Cursor, open: char, close: char) -> Result<Vec<Complex64>> {
    cur.expect(open)?;
    let mut out = Vec::new();
    if cur.peek() == Some(close) {
        cur.expect(close)?;
        return Ok(out);
    }
    loop {
        let tok = cur.until(&[',', close]);
        out.push(parse_complex_literal(tok)?);
        match cur.peek() {
            Some(',') => cur.expect(',')?,
            Some(c) if c == close => {
                cur.expect(close)?;
                break;
            }
            _ => return Err(cur.fail(&format!("expected ',' or '{close}'"))),
        }
    }
    Ok(out)
}

fn rat_field(cur: &mut Cursor, key: &str) -> Result<()> {
    let name = cur.ident()?;
    if name != key {
        return Err(cur.fail(&format!("expected {key:?}")));
    }
    cur.expect('=')
}

fn model_body(cur: &mut Cursor) -> Result<FunctionModel> {
    let name = cur.ident()?;
    let model = match name {
        "poly" => {
            let coeffs = complex_list(cur, '(', ')')?;
            FunctionModel::Polynomial { coeffs }
        }
        "exppow" => {
            let args = kv_args(cur, &["c", "n"])?;
            FunctionModel::ExpPower {
                c: parse_f64(args[0], cur)?,
                n: parse_u32(args[1], cur)?,
            }
        }
        "exptower" => {
            let args = kv_args(cur, &["k"])?;
            FunctionModel::ExpTower {
                k: parse_u32(args[0], cur)?,
            }
        }
        "rat" => {
            cur.expect('(')?;
            rat_field(cur, "zeros")?;
            let zeros = complex_list(cur, '[', ']')?;
            cur.expect(';')?;
            rat_field(cur, "poles")?;
            let poles = complex_list(cur, '[', ']')?;
            cur.expect(';')?;
            rat_field(cur, "scale")?;
            let tok = cur.until(&[')']);
            let scale = parse_complex_literal(tok)?;
            cur.expect(')')?;
            FunctionModel::FactoredRational { zeros, poles, scale }
        }
        "sum" | "prod" => {
            cur.expect('(')?;
            let lhs = model_body(cur)?;
            cur.expect(',')?;
            let rhs = model_body(cur)?;
            cur.expect(')')?;
            if name == "sum" {
                FunctionModel::Sum(Box::new(lhs), Box::new(rhs))
            } else {
                FunctionModel::Product(Box::new(lhs), Box::new(rhs))
            }
        }
        other => return Err(cur.fail(&format!("unknown model {other:?}"))),
    };
    model.validate()?;
    Ok(model)
}

pub fn parse_model(src: &str) -> Result<FunctionModel> {
    let mut cur = Cursor::new(src);
    let model = model_body(&mut cur)?;
    cur.done()?;
    Ok(model)
}

pub fn parse_scale(src: &str) -> Result<GrowthScale> {
    let mut cur = Cursor::new(src);
    let name = cur.ident()?;
    let scale = match name {
        "sinlog" => GrowthScale::sinlog(),
        "iter" => {
            let args = kv_args(&mut cur, &["m", "n", "a", "c"])?;
            GrowthScale::iterated(
                parse_u32(args[0], &cur)?,
                parse_u32(args[1], &cur)?,
                parse_f64(args[2], &cur)?,
                parse_f64(args[3], &cur)?,
            )?
        }
        "maxmod" => {
            cur.expect('(')?;
            let model = model_body(&mut cur)?;
            cur.expect(')')?;
            GrowthScale::derived_max_mod(model)?
        }
        "charac" => {
            cur.expect('(')?;
            let model = model_body(&mut cur)?;
            cur.expect(')')?;
            GrowthScale::derived_characteristic(model)?
        }
        other => return Err(cur.fail(&format!("unknown scale {other:?}"))),
    };
    cur.done()?;
    Ok(scale)
}
