//! Text format for regions and run configurations.
//!
//! A configuration document is a sequence of statements:
//!
//! ```text
//! # comment to end of line
//! space  = S^2
//! metric = euclidean
//! region A = cap(axis=[0, 0, 1], theta=pi/3)
//! region B = union(cap(axis=[1, 0, 0], theta=0.7227342478134157),
//!                  cap(axis=[-1, 0, 0], theta=0.7227342478134157))
//! command = verify
//! ```
//!
//! `key = value` settings take the rest of the line as their value. Region
//! bindings take an expression that may span lines:
//!
//! ```text
//! expr    := NAME | ctor "(" [arg ("," arg)*] ")"
//! arg     := key "=" value | expr
//! value   := number | "[" number ("," number)* "]"
//! number  := ["-"] atom (("*" | "/") ["-"] atom)*      atom := literal | "pi"
//! ```
//!
//! Constructors: `full()`, `empty()`, `cap(axis=V, theta=x)` (also
//! `center=` and, instead of `theta`, the chord radius `r=`),
//! `ball(center=V, r=x)`, `hemisphere(normal=V)`, `band(axis=V, lo=z, hi=z)`,
//! `anglesum(lo=a, hi=b)`, `union(e, ...)`, `intersection(e, ...)`,
//! `complement(e)`, `difference(e, e)` and `product(e, ...)`. Vectors whose
//! norm is not 1 within 1e-12 are normalized. A NAME refers to an earlier
//! binding. Every error carries the line and column it was detected at.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::region::{Cap, Region};

/// One `key = value` line.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub column: usize,
}

/// A parsed configuration document, in source order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub settings: Vec<Setting>,
    pub regions: Vec<(String, Region)>,
}

impl Document {
    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().rev().find(|(n, _)| n == name).map(|(_, r)| r)
    }
}

const CONSTRUCTORS: [&str; 13] = [
    "full",
    "empty",
    "cap",
    "ball",
    "hemisphere",
    "band",
    "anglesum",
    "union",
    "intersection",
    "complement",
    "difference",
    "product",
    "region",
];

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    bindings: &'a [(String, Region)],
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

enum Arg {
    Named(String, Pos, Value),
    Positional(Region),
}

enum Value {
    Number(f64),
    Vector(Vec<f64>),
}

impl<'a> Scanner<'a> {
    fn new(text: &str, bindings: &'a [(String, Region)]) -> Self {
        Scanner {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            bindings,
        }
    }

    fn here(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error<T>(at: Pos, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: at.line,
            column: at.column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips blanks and comments; newlines only when `lines` is set.
    fn skip(&mut self, lines: bool) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c == '\n' && !lines {
                return;
            } else if c.is_whitespace() {
                self.bump();
            } else {
                return;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip(true);
        let at = self.here();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Self::error(at, format!("expected '{want}', found '{c}'")),
            None => Self::error(at, format!("expected '{want}', found end of input")),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip(true);
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        self.skip(true);
        let at = self.here();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let ok = if s.is_empty() {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '-'
            };
            if !ok {
                break;
            }
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            return match self.peek() {
                Some(c) => Self::error(at, format!("expected a name, found '{c}'")),
                None => Self::error(at, "expected a name, found end of input"),
            };
        }
        Ok((s, at))
    }

    fn atom(&mut self) -> Result<f64> {
        self.skip(true);
        let at = self.here();
        let negative = self.eat('-');
        self.skip(true);
        let at_digits = self.here();
        let value = if self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            let (name, _) = self.ident()?;
            if name != "pi" {
                return Self::error(at_digits, format!("expected a number, found '{name}'"));
            }
            PI
        } else {
            let mut s = String::new();
            while let Some(c) = self.peek() {
                let exp_sign = (c == '-' || c == '+') && s.ends_with(['e', 'E']);
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if s.is_empty() {
                return Self::error(at, "expected a number");
            }
            s.parse::<f64>()
                .map_err(|_| Error::Parse {
                    line: at_digits.line,
                    column: at_digits.column,
                    message: format!("malformed number '{s}'"),
                })?
        };
        Ok(if negative { -value } else { value })
    }

    fn number(&mut self) -> Result<f64> {
        let mut v = self.atom()?;
        loop {
            if self.eat('*') {
                v *= self.atom()?;
            } else if self.eat('/') {
                v /= self.atom()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        if self.eat('[') {
            let mut v = vec![self.number()?];
            while self.eat(',') {
                v.push(self.number()?);
            }
            self.expect(']')?;
            Ok(Value::Vector(v))
        } else {
            Ok(Value::Number(self.number()?))
        }
    }

    /// Is the next non-blank token a name followed by '='?
    fn at_keyword(&self) -> bool {
        let mut i = self.pos;
        let chars = &self.chars;
        let blank = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        blank(&mut i);
        if i >= chars.len() || !(chars[i].is_ascii_alphabetic() || chars[i] == '_') {
            return false;
        }
        while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
            i += 1;
        }
        blank(&mut i);
        i < chars.len() && chars[i] == '='
    }

    fn expr(&mut self) -> Result<Region> {
        let (name, at) = self.ident()?;
        self.skip(true);
        if self.peek() != Some('(') {
            return match self.bindings.iter().rev().find(|(n, _)| *n == name) {
                Some((_, r)) => Ok(r.clone()),
                None if CONSTRUCTORS.contains(&name.as_str()) => {
                    Self::error(self.here(), format!("expected '(' after '{name}'"))
                }
                None => Self::error(at, format!("unknown region '{name}'")),
            };
        }
        self.bump();
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                if self.at_keyword() {
                    let (key, kat) = self.ident()?;
                    self.expect('=')?;
                    args.push(Arg::Named(key, kat, self.value()?));
                } else {
                    args.push(Arg::Positional(self.expr()?));
                }
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        build(&name, at, args)
    }
}

struct Args {
    ctor: String,
    at: Pos,
    named: Vec<(String, Pos, Value)>,
    positional: Vec<Region>,
}

impl Args {
    fn take(&mut self, keys: &[&str]) -> Option<(String, Pos, Value)> {
        let i = self.named.iter().position(|(k, _, _)| keys.contains(&k.as_str()))?;
        Some(self.named.remove(i))
    }

    fn number(&mut self, keys: &[&str]) -> Result<Option<f64>> {
        match self.take(keys) {
            None => Ok(None),
            Some((_, _, Value::Number(x))) => Ok(Some(x)),
            Some((k, at, Value::Vector(_))) => Scanner::error(at, format!("'{k}' takes a number")),
        }
    }

    fn point(&mut self, keys: &[&str]) -> Result<Option<SpherePoint>> {
        match self.take(keys) {
            None => Ok(None),
            Some((k, at, Value::Number(_))) => Scanner::error(at, format!("'{k}' takes a vector")),
            Some((_, at, Value::Vector(v))) => {
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                let p = if (norm - 1.0).abs() <= 1e-12 {
                    SpherePoint::new(v)
                } else {
                    SpherePoint::normalized(v)
                };
                p.map(Some).or_else(|e| Scanner::error(at, e.to_string()))
            }
        }
    }

    fn required<T>(&self, v: Option<T>, key: &str) -> Result<T> {
        match v {
            Some(v) => Ok(v),
            None => Scanner::error(self.at, format!("{}(...) needs '{key}='", self.ctor)),
        }
    }

    fn finish(self, positional: std::ops::RangeInclusive<usize>) -> Result<Vec<Region>> {
        if let Some((k, at, _)) = self.named.first() {
            return Scanner::error(*at, format!("unexpected argument '{k}' for {}", self.ctor));
        }
        let n = self.positional.len();
        if !positional.contains(&n) {
            let want = if positional.start() == positional.end() {
                positional.start().to_string()
            } else if *positional.end() == usize::MAX {
                format!("at least {}", positional.start())
            } else {
                format!("{} to {}", positional.start(), positional.end())
            };
            return Scanner::error(
                self.at,
                format!("{} takes {want} region argument(s), got {n}", self.ctor),
            );
        }
        Ok(self.positional)
    }
}

fn build(ctor: &str, at: Pos, raw: Vec<Arg>) -> Result<Region> {
    let mut args = Args {
        ctor: ctor.to_string(),
        at,
        named: Vec::new(),
        positional: Vec::new(),
    };
    for a in raw {
        match a {
            Arg::Named(k, p, v) => {
                if args.named.iter().any(|(q, _, _)| *q == k) {
                    return Scanner::error(p, format!("duplicate argument '{k}'"));
                }
                args.named.push((k, p, v));
            }
            Arg::Positional(r) => args.positional.push(r),
        }
    }
    if ctor == "region" || !CONSTRUCTORS.contains(&ctor) {
        return Scanner::error(at, format!("unknown constructor '{ctor}'"));
    }
    let allowed: &[&str] = match ctor {
        "cap" => &["axis", "center", "theta", "r"],
        "ball" => &["center", "r"],
        "hemisphere" => &["normal", "axis"],
        "band" => &["axis", "lo", "hi"],
        "anglesum" => &["lo", "hi"],
        _ => &[],
    };
    if let Some((k, p, _)) = args.named.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
        return Scanner::error(*p, format!("unexpected argument '{k}' for {ctor}"));
    }
    let checked = |r: Result<Region>| r.or_else(|e| Scanner::error(at, e.to_string()));
    match ctor {
        "full" => args.finish(0..=0).map(|_| Region::Full),
        "empty" => args.finish(0..=0).map(|_| Region::Empty),
        "cap" | "ball" => {
            let keys: &[&str] = if ctor == "cap" { &["axis", "center"] } else { &["center"] };
            let center = args.point(keys)?;
            let center = args.required(center, keys[0])?;
            let theta = if ctor == "cap" { args.number(&["theta"])? } else { None };
            let r = args.number(&["r"])?;
            let region = match (theta, r) {
                (Some(t), None) => Region::cap(center, t),
                (None, Some(r)) => Cap::from_chord_radius(center, r).map(Region::Cap),
                (Some(_), Some(_)) => {
                    return Scanner::error(at, "give either theta= or r=, not both")
                }
                (None, None) if ctor == "cap" => {
                    return Scanner::error(at, "cap(...) needs 'theta=' or 'r='")
                }
                (None, None) => return Scanner::error(at, "ball(...) needs 'r='"),
            };
            args.finish(0..=0)?;
            checked(region)
        }
        "hemisphere" => {
            let n = args.point(&["normal", "axis"])?;
            let n = args.required(n, "normal")?;
            args.finish(0..=0)?;
            Ok(Region::hemisphere(n))
        }
        "band" => {
            let axis = args.point(&["axis"])?;
            let axis = args.required(axis, "axis")?;
            let lo = args.number(&["lo"])?;
            let lo = args.required(lo, "lo")?;
            let hi = args.number(&["hi"])?;
            let hi = args.required(hi, "hi")?;
            args.finish(0..=0)?;
            checked(Region::band(axis, lo, hi))
        }
        "anglesum" => {
            let lo = args.number(&["lo"])?;
            let lo = args.required(lo, "lo")?;
            let hi = args.number(&["hi"])?;
            let hi = args.required(hi, "hi")?;
            args.finish(0..=0)?;
            checked(Region::angle_sum(lo, hi))
        }
        "union" => args.finish(1..=usize::MAX).map(Region::Union),
        "intersection" => args.finish(1..=usize::MAX).map(Region::Intersection),
        "product" => args.finish(1..=usize::MAX).map(Region::Product),
        "complement" => {
            let mut rs = args.finish(1..=1)?;
            Ok(Region::Complement(Box::new(rs.remove(0))))
        }
        "difference" => {
            let mut rs = args.finish(2..=2)?;
            let b = rs.remove(1);
            Ok(rs.remove(0).minus(b))
        }
        other => Scanner::error(at, format!("unknown constructor '{other}'")),
    }
}

fn finish_expr(s: &mut Scanner<'_>) -> Result<()> {
    s.skip(true);
    match s.peek() {
        None => Ok(()),
        Some(c) => Scanner::error(s.here(), format!("unexpected '{c}' after expression")),
    }
}

/// Parses a single region expression; names resolve against `bindings`.
pub fn parse_region_with(text: &str, bindings: &[(String, Region)]) -> Result<Region> {
    let mut s = Scanner::new(text, bindings);
    let r = s.expr()?;
    finish_expr(&mut s)?;
    Ok(r)
}

pub fn parse_region(text: &str) -> Result<Region> {
    parse_region_with(text, &[])
}

/// Parses `NAME=EXPR` as given on the command line.
pub fn parse_binding(text: &str, bindings: &[(String, Region)]) -> Result<(String, Region)> {
    let mut s = Scanner::new(text, bindings);
    let (name, at) = s.ident()?;
    if CONSTRUCTORS.contains(&name.as_str()) {
        return Scanner::error(at, format!("'{name}' is reserved"));
    }
    s.expect('=')?;
    let r = s.expr()?;
    finish_expr(&mut s)?;
    Ok((name, r))
}

/// Parses a configuration document.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    let mut s = Scanner::new(text, &[]);
    loop {
        s.skip(true);
        if s.peek().is_none() {
            return Ok(doc);
        }
        let (key, at) = s.ident()?;
        if key == "region" {
            let (name, nat) = s.ident()?;
            if CONSTRUCTORS.contains(&name.as_str()) {
                return Scanner::error(nat, format!("'{name}' is reserved"));
            }
            if name.contains('-') {
                return Scanner::error(nat, format!("region name '{name}' may not contain '-'"));
            }
            s.expect('=')?;
            let bindings = std::mem::take(&mut doc.regions);
            let mut inner = Scanner {
                chars: std::mem::take(&mut s.chars),
                pos: s.pos,
                line: s.line,
                column: s.column,
                bindings: &bindings,
            };
            let parsed = inner.expr();
            s.chars = std::mem::take(&mut inner.chars);
            (s.pos, s.line, s.column) = (inner.pos, inner.line, inner.column);
            doc.regions = bindings;
            doc.regions.push((name, parsed?));
        } else {
            s.skip(false);
            if s.peek() != Some('=') {
                return Scanner::error(s.here(), format!("expected '=' after '{key}'"));
            }
            s.bump();
            s.skip(false);
            let vat = s.here();
            let mut value = String::new();
            while let Some(c) = s.peek() {
                if c == '\n' || c == '#' {
                    break;
                }
                value.push(c);
                s.bump();
            }
            let value = value.trim().to_string();
            if value.is_empty() {
                return Scanner::error(vat, format!("missing value for '{key}'"));
            }
            doc.settings.push(Setting {
                key,
                value,
                line: at.line,
                column: vat.column,
            });
        }
        s.skip(false);
        match s.peek() {
            None | Some('\n') => {}
            Some(c) => return Scanner::error(s.here(), format!("unexpected '{c}' at end of statement")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_document(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn constructors() {
        let r = parse_region("cap(axis=[0,0,1], theta=pi/3)").unwrap();
        assert_eq!(r, Region::cap(SpherePoint::north(2), PI / 3.0).unwrap());
        let b = parse_region("ball(center=[0, 0, 2], r=1)").unwrap();
        match &b {
            Region::Cap(c) => {
                assert_eq!(c.center(), &SpherePoint::north(2));
                assert!((c.theta() - PI / 3.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        let c = parse_region("cap(center=[0,0,1], r=1)").unwrap();
        assert_eq!(b, c);
        let band = parse_region("band(axis=[0,1], lo=-0.5, hi=1e-1)").unwrap();
        assert_eq!(band, Region::band(SpherePoint::basis(1, 1), -0.5, 0.1).unwrap());
        let t = parse_region("anglesum(lo=0, hi=pi)").unwrap();
        assert_eq!(t, Region::angle_sum(0.0, PI).unwrap());
        let d = parse_region("difference(full(), hemisphere(normal=[1,0,0]))").unwrap();
        assert_eq!(d, Region::Full.minus(Region::hemisphere(SpherePoint::basis(2, 0))));
        let p = parse_region("product(hemisphere(normal=[0,0,1]), full())").unwrap();
        assert_eq!(
            p,
            Region::Product(vec![Region::hemisphere(SpherePoint::north(2)), Region::Full])
        );
        assert_eq!(parse_region("  empty( ) ").unwrap(), Region::Empty);
        assert_eq!(parse_region("cap(axis=[0,1], theta=-2*-pi/4)").unwrap(),
            Region::cap(SpherePoint::basis(1, 1), PI / 2.0).unwrap());
    }

    #[test]
    fn documents_bind_names_and_settings() {
        let doc = parse_document(
            "# fixture\nspace = S^2   # trailing\nregion A = cap(axis=[0,0,1],\n   theta=1.0)\n\
             region B = complement(A)\nseed=7\n",
        )
        .unwrap();
        assert_eq!(doc.settings.len(), 2);
        assert_eq!(doc.settings[0].key, "space");
        assert_eq!(doc.settings[0].value, "S^2");
        assert_eq!(doc.settings[1].line, 6);
        let a = doc.region("A").unwrap().clone();
        assert_eq!(doc.region("B").unwrap(), &a.complement());
    }

    #[test]
    fn errors_cite_positions() {
        assert_eq!(parse_err("space = S^2\nregion A = cup(theta=1)").0, 2);
        let (l, c, m) = parse_err("region A = cup(theta=1)");
        assert_eq!((l, c), (1, 12));
        assert!(m.contains("unknown constructor"), "{m}");
        let (l, c, _) = parse_err("region A = union(B)");
        assert_eq!((l, c), (1, 18));
        let (l, c, m) = parse_err("region A = cap(axis=[0,0,1], theta=1.0, phi=2)");
        assert_eq!((l, c), (1, 41));
        assert!(m.contains("phi"));
        let (l, c, _) = parse_err("\n\nregion A = cap(axis=[0,0,1], theta=4)");
        assert_eq!((l, c), (3, 12));
        let (l, c, _) = parse_err("region A = cap(axis=[0,0,1] theta=1)");
        assert_eq!((l, c), (1, 29));
        let (l, _, m) = parse_err("seed\n");
        assert_eq!(l, 1);
        assert!(m.contains("'='"));
        let (_, _, m) = parse_err("region A = cap(axis=[0,0,1], theta=1");
        assert!(m.contains("end of input"), "{m}");
        let (l, c, _) = parse_err("region A = band(axis=[0,0,1], lo=0.x, hi=1)");
        assert_eq!((l, c), (1, 36));
        let (_, _, m) = parse_err("region union = full()");
        assert!(m.contains("reserved"));
        let (_, _, m) = parse_err("region A = full() full()");
        assert!(m.contains("unexpected"));
    }

    #[test]
    fn bindings_from_the_command_line() {
        let (n, r) = parse_binding("H=hemisphere(normal=[0,0,1])", &[]).unwrap();
        assert_eq!(n, "H");
        let binds = vec![(n, r.clone())];
        assert_eq!(parse_binding("K = complement(H)", &binds).unwrap().1, r.complement());
        assert!(parse_binding("K complement(H)", &binds).is_err());
    }

    fn leaf() -> impl Strategy<Value = Region> {
        let point = (prop::collection::vec(-1.0f64..1.0, 3))
            .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-3)
            .prop_map(|v| SpherePoint::normalized(v).unwrap());
        prop_oneof![
            Just(Region::Full),
            Just(Region::Empty),
            (point.clone(), 1e-3f64..PI).prop_map(|(p, t)| Region::cap(p, t).unwrap()),
            point.clone().prop_map(Region::hemisphere),
            (point, -1.0f64..0.0, 0.0f64..1.0).prop_map(|(p, lo, hi)| Region::band(p, lo, hi).unwrap()),
        ]
    }

    fn tree() -> impl Strategy<Value = Region> {
        leaf().prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(Region::Union),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Region::Intersection),
                inner.clone().prop_map(Region::complement),
                (inner.clone(), inner).prop_map(|(a, b)| a.minus(b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(r in tree()) {
            let text = r.to_string();
            prop_assert_eq!(parse_region(&text).unwrap(), r);
        }
    }
}
