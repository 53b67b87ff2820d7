//! Plain-text system files, CSV and SVG emitters, and run reports.
//!
//! A system file is line oriented; `#` starts a comment:
//!
//! ```text
//! param a = 1/5
//! interval 0 1
//! map 1/5 a 1/5 0 0
//! map 1/3 -1/5 -1/5 1/5 1/5
//! ```
//!
//! Each `map` line lists `p q r h s`. Values are integers, fractions or
//! decimals; a parameter name (optionally negated, `-a`) may stand for a
//! value. Fractions and integers are exact. If any decimal appears the whole
//! system is read in floating point and a warning is recorded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::affine::Affine2;
use crate::attractor::{evaluate_f_exact, sample_attractor, GraphSample, SampleOptions};
use crate::error::{FifError, Result};
use crate::examples;
use crate::orbit::OrbitTrace;
use crate::scalar::{Rational, Scalar};
use crate::system::IfsSystem;

/// A parsed system in whichever arithmetic its file called for.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem {
    Exact(IfsSystem<Rational>),
    Float(IfsSystem<f64>),
}

impl AnySystem {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnySystem::Exact(_))
    }

    pub fn to_f64(&self) -> IfsSystem<f64> {
        match self {
            AnySystem::Exact(s) => s.to_f64(),
            AnySystem::Float(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpecFile {
    pub system: AnySystem,
    /// Parameter values in their written form.
    pub params: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> FifError {
    FifError::Parse {
        line,
        message: message.into(),
    }
}

fn is_decimal(token: &str) -> bool {
    token.contains(['.', 'e', 'E']) || token.eq_ignore_ascii_case("inf") || token.eq_ignore_ascii_case("nan")
}

fn is_number(token: &str) -> bool {
    token
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
        && !token[1..].starts_with(|c: char| c.is_alphabetic() && c != 'e' && c != 'E')
}

fn is_identifier(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Replaces parameter names by their values; `-name` negates.
fn substitute(token: &str, params: &BTreeMap<String, String>, line: usize) -> Result<String> {
    if let Some(v) = params.get(token) {
        return Ok(v.clone());
    }
    if let Some(name) = token.strip_prefix('-') {
        if let Some(v) = params.get(name) {
            return Ok(match v.strip_prefix('-') {
                Some(pos) => pos.to_string(),
                None => format!("-{v}"),
            });
        }
    }
    if is_identifier(token.trim_start_matches('-')) {
        return Err(parse_err(line, format!("unknown parameter {token:?}")));
    }
    Ok(token.to_string())
}

fn exact_value(token: &str, line: usize) -> Result<Rational> {
    Rational::from_str(token).map_err(|_| parse_err(line, format!("bad number {token:?}")))
}

fn float_value(token: &str, line: usize) -> Result<f64> {
    if token.contains('/') {
        return Ok(exact_value(token, line)?.to_f64());
    }
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("bad number {token:?}")))
}

/// Parses a system file. `overrides` replace parameter values declared in the file.
pub fn parse_spec(text: &str, overrides: &[(String, String)]) -> Result<SpecFile> {
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    let mut interval: Option<(usize, [String; 2])> = None;
    let mut maps: Vec<(usize, [String; 5])> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        match keyword {
            "param" => {
                let joined = rest.join(" ");
                let (name, value) = joined
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, "expected `param NAME = VALUE`"))?;
                let (name, value) = (name.trim(), value.trim());
                if !is_identifier(name) {
                    return Err(parse_err(line, format!("bad parameter name {name:?}")));
                }
                if value.is_empty() || !is_number(value) {
                    return Err(parse_err(line, format!("bad parameter value {value:?}")));
                }
                params.insert(name.to_string(), value.to_string());
            }
            "interval" => {
                if interval.is_some() {
                    return Err(parse_err(line, "interval given twice"));
                }
                let [a, b] = rest[..] else {
                    return Err(parse_err(line, "expected `interval A B`"));
                };
                interval = Some((line, [a.to_string(), b.to_string()]));
            }
            "map" => {
                let [p, q, r, h, s] = rest[..] else {
                    return Err(parse_err(line, "expected `map P Q R H S`"));
                };
                maps.push((line, [p, q, r, h, s].map(str::to_string)));
            }
            other => return Err(parse_err(line, format!("unknown keyword {other:?}"))),
        }
    }
    for (name, value) in overrides {
        if !is_identifier(name) || !is_number(value) {
            return Err(parse_err(0, format!("bad parameter override {name}={value}")));
        }
        params.insert(name.clone(), value.clone());
    }

    let (iline, [a, b]) = interval.ok_or_else(|| parse_err(0, "missing `interval` line"))?;
    let iv = [substitute(&a, &params, iline)?, substitute(&b, &params, iline)?];
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (line, tokens) in &maps {
        let row = tokens
            .iter()
            .map(|t| substitute(t, &params, *line))
            .collect::<Result<Vec<_>>>()?;
        rows.push((*line, row));
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no `map` lines"));
    }

    let decimal = iv.iter().any(|t| is_decimal(t)) || rows.iter().any(|(_, r)| r.iter().any(|t| is_decimal(t)));
    let mut warnings = Vec::new();
    let system = if decimal {
        warnings.push("decimal values present; the whole system is read in floating point".to_string());
        let maps = rows
            .iter()
            .map(|(line, r)| {
                let v = r.iter().map(|t| float_value(t, *line)).collect::<Result<Vec<_>>>()?;
                Ok(Affine2::new(v[0], v[1], v[2], v[3], v[4]))
            })
            .collect::<Result<Vec<_>>>()?;
        AnySystem::Float(IfsSystem::new(maps, float_value(&iv[0], iline)?, float_value(&iv[1], iline)?)?)
    } else {
        let maps = rows
            .iter()
            .map(|(line, r)| {
                let v = r.iter().map(|t| exact_value(t, *line)).collect::<Result<Vec<_>>>()?;
                let [p, q, rr, h, s]: [Rational; 5] = v.try_into().unwrap();
                Ok(Affine2::new(p, q, rr, h, s))
            })
            .collect::<Result<Vec<_>>>()?;
        AnySystem::Exact(IfsSystem::new(maps, exact_value(&iv[0], iline)?, exact_value(&iv[1], iline)?)?)
    };
    Ok(SpecFile {
        system,
        params,
        warnings,
    })
}

/// A scalar as written in a system file: fractions exactly, floats in
/// shortest round-trip form with a decimal point.
pub fn format_scalar<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_string()
    } else {
        format!("{:?}", v.to_f64())
    }
}

/// Writes a system file with all parameters substituted.
pub fn emit_spec<S: Scalar>(sys: &IfsSystem<S>) -> String {
    let mut out = String::new();
    writeln!(out, "interval {} {}", format_scalar(sys.a()), format_scalar(sys.b())).unwrap();
    for g in sys.maps() {
        let cols: Vec<String> = g.coefficients().iter().map(|c| format_scalar(*c)).collect();
        writeln!(out, "map {}", cols.join(" ")).unwrap();
    }
    out
}

pub fn emit_any_spec(sys: &AnySystem) -> String {
    match sys {
        AnySystem::Exact(s) => emit_spec(s),
        AnySystem::Float(s) => emit_spec(s),
    }
}

/// `x,y` CSV at full double precision.
pub fn points_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in points {
        writeln!(out, "{x:?},{y:?}").unwrap();
    }
    out
}

/// `n,x,y` CSV of an orbit.
pub fn orbit_csv<S: Scalar>(trace: &OrbitTrace<S>) -> String {
    let mut out = String::from("n,x,y\n");
    for (n, (x, y)) in trace.points_f64().into_iter().enumerate() {
        writeln!(out, "{n},{x:?},{y:?}").unwrap();
    }
    out
}

/// Minimal SVG plot: polylines, shaded vertical bands, labelled markers, axes.
#[derive(Clone, Debug)]
pub struct SvgPlot {
    width: f64,
    height: f64,
    margin: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: Vec<String>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl SvgPlot {
    /// Ranges are padded by 5% so curves do not touch the frame.
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            let w = if hi > lo { hi - lo } else { 1.0 };
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        SvgPlot {
            width: 800.0,
            height: 500.0,
            margin: 40.0,
            x_range: pad(x_range),
            y_range: pad(y_range),
            body: Vec::new(),
        }
    }

    fn sx(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin + (x - lo) / (hi - lo) * (self.width - 2.0 * self.margin)
    }

    fn sy(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - self.margin - (y - lo) / (hi - lo) * (self.height - 2.0 * self.margin)
    }

    pub fn band(&mut self, x0: f64, x1: f64, fill: &str, label: &str) {
        let (top, bottom) = (self.sy(self.y_range.1), self.sy(self.y_range.0));
        self.body.push(format!(
            "<rect class=\"band\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" fill-opacity=\"0.25\"><title>{}</title></rect>",
            num(self.sx(x0)),
            num(top),
            num(self.sx(x1) - self.sx(x0)),
            num(bottom - top),
            escape(label)
        ));
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64, dash: Option<&str>) {
        let mut pts = String::new();
        for (k, &(x, y)) in points.iter().enumerate() {
            if k > 0 {
                pts.push(' ');
            }
            write!(pts, "{},{}", num(self.sx(x)), num(self.sy(y))).unwrap();
        }
        let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
        self.body.push(format!(
            "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\"{dash} points=\"{pts}\"/>",
            num(width)
        ));
    }

    pub fn marker(&mut self, x: f64, y: f64, label: &str) {
        let (cx, cy) = (self.sx(x), self.sy(y));
        self.body.push(format!(
            "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"black\" data-x=\"{}\" data-y=\"{}\"/>",
            num(cx),
            num(cy),
            escape(label.split(',').next().unwrap_or("").trim_start_matches('(')),
            escape(label.rsplit(',').next().unwrap_or("").trim_end_matches(')'))
        ));
        self.body.push(format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>",
            num(cx + 6.0),
            num(cy - 6.0),
            escape(label)
        ));
    }

    pub fn finish(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            self.width, self.height, self.width, self.height
        )
        .unwrap();
        writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
        // axes through the origin when visible, else along the frame
        let ax = if self.x_range.0 <= 0.0 && 0.0 <= self.x_range.1 { self.sx(0.0) } else { self.margin };
        let ay = if self.y_range.0 <= 0.0 && 0.0 <= self.y_range.1 {
            self.sy(0.0)
        } else {
            self.height - self.margin
        };
        writeln!(
            out,
            "<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>",
            num(self.margin),
            num(ay),
            num(self.width - self.margin),
            num(ay)
        )
        .unwrap();
        writeln!(
            out,
            "<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>",
            num(ax),
            num(self.margin),
            num(ax),
            num(self.height - self.margin)
        )
        .unwrap();
        for el in &self.body {
            writeln!(out, "{el}").unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

fn extent(points: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
    let mut yr = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        xr = (xr.0.min(x), xr.1.max(x));
        yr = (yr.0.min(y), yr.1.max(y));
    }
    (xr, yr)
}

/// The sampled graph as a single polyline.
pub fn sample_svg(sample: &GraphSample<f64>) -> String {
    let (xr, yr) = extent(&sample.points);
    let mut plot = SvgPlot::new(xr, yr);
    plot.polyline(&sample.points, "black", 1.0, None);
    plot.finish()
}

/// Points of the four-map graph marked in the figure, exact.
pub fn figure1_marked_points(param: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let sys = examples::four_map(param.clone())?;
    [(0, 1), (1, 5), (7, 15), (8, 15), (4, 5), (1, 1)]
        .into_iter()
        .map(|(n, d)| {
            let x = Rational::new(n, d);
            let y = evaluate_f_exact(&sys, &x)?.ok_or(FifError::ResolutionInsufficient { eps: 0.0 })?;
            Ok((x, y))
        })
        .collect()
}

/// The four-map graph with the pieces `S_2(Γ)` (blue) and `S_3(Γ)` (red,
/// dashed), their common strip `[7/15, 8/15]` shaded and the six marked points.
pub fn figure1_svg(param: &Rational, depth: usize) -> Result<String> {
    let sys = examples::four_map(param.clone())?;
    let sample = sample_attractor(&sys.to_f64(), depth, &SampleOptions::default())?;
    let piece = |i: usize| -> Vec<(f64, f64)> {
        let g = sys.maps()[i - 1].to_f64();
        let mut pts: Vec<(f64, f64)> = sample.points.iter().map(|p| g.apply(p)).collect();
        pts.sort_by(|u, v| u.0.total_cmp(&v.0));
        pts
    };
    let (xr, yr) = extent(&sample.points);
    let mut plot = SvgPlot::new(xr, yr);
    plot.band(7.0 / 15.0, 8.0 / 15.0, "gold", "overlap [7/15, 8/15]");
    plot.polyline(&sample.points, "black", 0.6, None);
    plot.polyline(&piece(2), "blue", 1.6, None);
    plot.polyline(&piece(3), "red", 1.6, Some("4 2"));
    for (x, y) in figure1_marked_points(param)? {
        plot.marker(x.to_f64(), y.to_f64(), &format!("({x},{y})"));
    }
    Ok(plot.finish())
}

/// Hex SHA-256 of the input bytes.
pub fn input_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Line-oriented `key: value` report with optional tables. The output
/// depends only on what was added, so identical runs give identical bytes.
#[derive(Clone, Debug, Default)]
pub struct RunReport {
    lines: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, input: &[u8]) -> Self {
        let mut r = RunReport::default();
        r.field("tool", format!("fif {}", env!("CARGO_PKG_VERSION")));
        r.field("command", command);
        r.field("input_sha256", input_hash(input));
        r
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}: {value}"));
        self
    }

    pub fn table(&mut self, title: &str, header: &[&str], rows: &[Vec<String>]) -> &mut Self {
        self.lines.push(format!("{title}:"));
        self.lines.push(format!("  {}", header.join("\t")));
        for row in rows {
            self.lines.push(format!("  {}", row.join("\t")));
        }
        self
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
