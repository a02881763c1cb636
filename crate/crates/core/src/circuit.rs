//! A small line-oriented circuit language compiled to the normal form
//! `e^{logPhase} W(h) T(R)`.
//!
//! ```text
//! # displacement, squeeze, beamsplitter, rotation, raw element
//! D(0, 1.0, 0.0)
//! S(1, 0.5, 0.0);
//! BS(0, 1, 0.785, 0.0)
//! R(0, 0.3)
//! SYMP("element.json")
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c, identity, ComplexMatrix, ComplexVector, LogComplex, C64, ZERO};
use crate::representation::{act, multiplier_with_product};
use crate::state::{weyl_apply, UltracoherentState};
use crate::symplectic::{
    compose, make_symplectic, symplectic_form, SymplecticElement, DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `W(α e_mode)`.
    Displace { mode: usize, amplitude: C64 },
    /// Single-mode squeeze sending the vacuum to `Z = e^{iφ} tanh r`.
    Squeeze { mode: usize, r: f64, phi: f64 },
    /// Passive mixing with entries `cos θ` and `e^{iφ} sin θ`.
    Beamsplitter {
        mode1: usize,
        mode2: usize,
        theta: f64,
        phi: f64,
    },
    /// Phase rotation `f_mode ↦ e^{iθ} f_mode`.
    Rotate { mode: usize, theta: f64 },
    /// A full symplectic element loaded from a JSON file.
    RawSymplectic { source: String },
}

impl Gate {
    pub fn max_mode(&self) -> Option<usize> {
        match self {
            Gate::Displace { mode, .. }
            | Gate::Squeeze { mode, .. }
            | Gate::Rotate { mode, .. } => Some(*mode),
            Gate::Beamsplitter { mode1, mode2, .. } => Some(*mode1.max(mode2)),
            Gate::RawSymplectic { .. } => None,
        }
    }

    /// The inverse gate, if it is expressible in the language.
    pub fn inverse(&self) -> Option<Gate> {
        Some(match self {
            Gate::Displace { mode, amplitude } => Gate::Displace {
                mode: *mode,
                amplitude: -amplitude,
            },
            Gate::Squeeze { mode, r, phi } => Gate::Squeeze {
                mode: *mode,
                r: -r,
                phi: *phi,
            },
            Gate::Beamsplitter {
                mode1,
                mode2,
                theta,
                phi,
            } => Gate::Beamsplitter {
                mode1: *mode1,
                mode2: *mode2,
                theta: -theta,
                phi: *phi,
            },
            Gate::Rotate { mode, theta } => Gate::Rotate {
                mode: *mode,
                theta: -theta,
            },
            Gate::RawSymplectic { .. } => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Displace { mode, amplitude } => {
                write!(f, "D({}, {:?}, {:?})", mode, amplitude.re, amplitude.im)
            }
            Gate::Squeeze { mode, r, phi } => write!(f, "S({mode}, {r:?}, {phi:?})"),
            Gate::Beamsplitter {
                mode1,
                mode2,
                theta,
                phi,
            } => write!(f, "BS({mode1}, {mode2}, {theta:?}, {phi:?})"),
            Gate::Rotate { mode, theta } => write!(f, "R({mode}, {theta:?})"),
            Gate::RawSymplectic { source } => write!(f, "SYMP({source:?})"),
        }
    }
}

/// One gate per line.
pub fn pretty_print(gates: &[Gate]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

enum Arg {
    Number(f64, usize),
    Str(String, usize),
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let accept = |c: char| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E');
        while self.pos < self.chars.len() && accept(self.chars[self.pos]) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        if s.is_empty() {
            return Err(self.error(start + 1, "expected a number"));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| self.error(start + 1, format!("invalid number '{s}'")))?;
        if !v.is_finite() {
            return Err(self.error(start + 1, format!("number out of range '{s}'")));
        }
        Ok(v)
    }

    fn string(&mut self) -> Result<String> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        while let Some(ch) = self.peek() {
            self.pos += 1;
            match ch {
                '"' => return Ok(out),
                '\\' => match self.peek() {
                    Some(e @ ('"' | '\\')) => {
                        out.push(e);
                        self.pos += 1;
                    }
                    _ => return Err(self.error(self.col(), "invalid escape")),
                },
                _ => out.push(ch),
            }
        }
        Err(self.error(start + 1, "unterminated string"))
    }

    fn args(&mut self, open_col: usize) -> Result<Vec<Arg>> {
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            self.skip_ws();
            let col = self.col();
            match self.peek() {
                None | Some('#') => return Err(self.error(open_col, "unclosed parenthesis")),
                Some('"') => args.push(Arg::Str(self.string()?, col)),
                Some(_) => args.push(Arg::Number(self.number()?, col)),
            }
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                None | Some('#') => return Err(self.error(open_col, "unclosed parenthesis")),
                Some(ch) => return Err(self.error(self.col(), format!("unexpected '{ch}'"))),
            }
        }
    }
}

fn mode_arg(cur: &Cursor, arg: &Arg) -> Result<usize> {
    match arg {
        Arg::Number(v, _) if *v >= 0.0 && v.fract() == 0.0 && *v < u32::MAX as f64 => {
            Ok(*v as usize)
        }
        Arg::Number(_, col) => Err(cur.error(*col, "mode must be a non-negative integer")),
        Arg::Str(_, col) => Err(cur.error(*col, "mode must be a number")),
    }
}

fn real_arg(cur: &Cursor, arg: &Arg) -> Result<f64> {
    match arg {
        Arg::Number(v, _) => Ok(*v),
        Arg::Str(_, col) => Err(cur.error(*col, "expected a number, found a string")),
    }
}

fn parse_line(text: &str, line: usize) -> Result<Option<Gate>> {
    let mut cur = Cursor::new(text, line);
    cur.skip_ws();
    if cur.at_end_or_comment() {
        return Ok(None);
    }
    let name_col = cur.col();
    let name = cur.ident();
    if name.is_empty() {
        return Err(cur.error(name_col, "expected a gate name"));
    }
    cur.skip_ws();
    if cur.peek() != Some('(') {
        return Err(cur.error(cur.col(), "expected '('"));
    }
    let open_col = cur.col();
    cur.pos += 1;
    let args = cur.args(open_col)?;
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(cur.error(
                open_col,
                format!("{name} takes {n} arguments, found {}", args.len()),
            ));
        }
        Ok(())
    };
    let gate = match name.as_str() {
        "D" => {
            arity(3)?;
            Gate::Displace {
                mode: mode_arg(&cur, &args[0])?,
                amplitude: c(real_arg(&cur, &args[1])?, real_arg(&cur, &args[2])?),
            }
        }
        "S" => {
            arity(3)?;
            Gate::Squeeze {
                mode: mode_arg(&cur, &args[0])?,
                r: real_arg(&cur, &args[1])?,
                phi: real_arg(&cur, &args[2])?,
            }
        }
        "BS" => {
            arity(4)?;
            let (mode1, mode2) = (mode_arg(&cur, &args[0])?, mode_arg(&cur, &args[1])?);
            if mode1 == mode2 {
                return Err(cur.error(open_col, "beamsplitter modes must differ"));
            }
            Gate::Beamsplitter {
                mode1,
                mode2,
                theta: real_arg(&cur, &args[2])?,
                phi: real_arg(&cur, &args[3])?,
            }
        }
        "R" => {
            arity(2)?;
            Gate::Rotate {
                mode: mode_arg(&cur, &args[0])?,
                theta: real_arg(&cur, &args[1])?,
            }
        }
        "SYMP" => {
            arity(1)?;
            match &args[0] {
                Arg::Str(s, _) => Gate::RawSymplectic { source: s.clone() },
                Arg::Number(_, col) => return Err(cur.error(*col, "expected a quoted file name")),
            }
        }
        _ => return Err(cur.error(name_col, format!("unknown gate '{name}'"))),
    };
    cur.skip_ws();
    if cur.peek() == Some(';') {
        cur.pos += 1;
        cur.skip_ws();
    }
    if !cur.at_end_or_comment() {
        return Err(cur.error(cur.col(), "unexpected text after gate"));
    }
    Ok(Some(gate))
}

pub fn parse(text: &str) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if let Some(g) = parse_line(line, k + 1)? {
            gates.push(g);
        }
    }
    Ok(gates)
}

/// Checks every mode index against the circuit dimension.
pub fn validate(gates: &[Gate], dim: usize) -> Result<()> {
    for g in gates {
        if let Some(mode) = g.max_mode() {
            if mode >= dim {
                return Err(Error::ModeOutOfRange { mode, dim });
            }
        }
    }
    Ok(())
}

/// Either a Weyl displacement or a homogeneous symplectic factor.
#[derive(Debug, Clone)]
pub enum Step {
    Weyl(ComplexVector),
    Symplectic(SymplecticElement),
}

fn embed_single(dim: usize, mode: usize, u: C64, v: C64) -> Result<SymplecticElement> {
    let mut um = identity(dim);
    let mut vm = ComplexMatrix::zeros(dim, dim);
    um[(mode, mode)] = u;
    vm[(mode, mode)] = v;
    make_symplectic(um, vm, DEFAULT_TOL)
}

/// Resolves gates into steps; `load` supplies raw symplectic elements.
pub fn lower<F>(gates: &[Gate], dim: usize, mut load: F) -> Result<Vec<Step>>
where
    F: FnMut(&str) -> Result<SymplecticElement>,
{
    validate(gates, dim)?;
    gates
        .iter()
        .map(|g| {
            Ok(match g {
                Gate::Displace { mode, amplitude } => {
                    let mut h = ComplexVector::zeros(dim);
                    h[*mode] = *amplitude;
                    Step::Weyl(h)
                }
                Gate::Squeeze { mode, r, phi } => Step::Symplectic(embed_single(
                    dim,
                    *mode,
                    c(r.cosh(), 0.0),
                    C64::from_polar(r.sinh(), *phi),
                )?),
                Gate::Rotate { mode, theta } => Step::Symplectic(embed_single(
                    dim,
                    *mode,
                    C64::from_polar(1.0, *theta),
                    ZERO,
                )?),
                Gate::Beamsplitter {
                    mode1,
                    mode2,
                    theta,
                    phi,
                } => {
                    let mut k = identity(dim);
                    let (s, co) = theta.sin_cos();
                    k[(*mode1, *mode1)] = c(co, 0.0);
                    k[(*mode2, *mode2)] = c(co, 0.0);
                    k[(*mode2, *mode1)] = C64::from_polar(s, *phi);
                    k[(*mode1, *mode2)] = -C64::from_polar(s, -*phi);
                    Step::Symplectic(SymplecticElement::from_unitary(&k, DEFAULT_TOL)?)
                }
                Gate::RawSymplectic { source } => {
                    let r = load(source)?;
                    if r.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: r.dim(),
                        });
                    }
                    Step::Symplectic(r)
                }
            })
        })
        .collect()
}

/// `e^{logPhase} W(h) T(R)`.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub h: ComplexVector,
    pub r: SymplecticElement,
    pub log_phase: LogComplex,
}

impl CompiledCircuit {
    pub fn identity(dim: usize) -> Self {
        Self {
            h: ComplexVector::zeros(dim),
            r: SymplecticElement::identity(dim),
            log_phase: LogComplex::ZERO,
        }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    /// Left-multiplies the normal form by one more step.
    pub fn push(&mut self, step: &Step) -> Result<()> {
        match step {
            Step::Weyl(g) => {
                self.log_phase += LogComplex::new(0.0, -symplectic_form(g, &self.h)?);
                self.h = g + &self.h;
            }
            Step::Symplectic(s) => {
                let r3 = compose(s, &self.r)?;
                let chi = multiplier_with_product(s, &self.r, &r3)?;
                self.log_phase += chi.log();
                self.h = s.apply(&self.h)?;
                self.r = r3;
            }
        }
        Ok(())
    }
}

pub fn compile_steps(steps: &[Step], dim: usize) -> Result<CompiledCircuit> {
    let mut out = CompiledCircuit::identity(dim);
    for s in steps {
        out.push(s)?;
    }
    Ok(out)
}

pub fn compile<F>(gates: &[Gate], dim: usize, load: F) -> Result<CompiledCircuit>
where
    F: FnMut(&str) -> Result<SymplecticElement>,
{
    compile_steps(&lower(gates, dim, load)?, dim)
}

/// `e^{logPhase} W(h) T(R) vacuum`.
pub fn run(circuit: &CompiledCircuit) -> Result<UltracoherentState> {
    let vac = UltracoherentState::vacuum(circuit.dim());
    Ok(weyl_apply(&circuit.h, &act(&circuit.r, &vac)?)?.scaled(circuit.log_phase))
}

/// Applies the steps one at a time to the vacuum.
pub fn run_sequential(steps: &[Step], dim: usize) -> Result<UltracoherentState> {
    let mut x = UltracoherentState::vacuum(dim);
    for s in steps {
        x = match s {
            Step::Weyl(h) => weyl_apply(h, &x)?,
            Step::Symplectic(r) => act(r, &x)?,
        };
    }
    Ok(x)
}

/// Loader that rejects every raw symplectic reference.
pub fn no_files(source: &str) -> Result<SymplecticElement> {
    Err(Error::Input(format!("cannot load '{source}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{norm, state_residual};

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("D(0, 1.0, 0.0)").unwrap(),
            vec![Gate::Displace {
                mode: 0,
                amplitude: c(1.0, 0.0)
            }]
        );
        let gates = parse("S(0, 0.5, 0.0)\nD(0, 1.0, 0.0)").unwrap();
        assert!(matches!(gates[0], Gate::Squeeze { .. }));
        assert!(matches!(gates[1], Gate::Displace { .. }));
        assert_eq!(
            parse("S(0, 0.5"),
            Err(Error::Syntax {
                line: 1,
                col: 2,
                message: "unclosed parenthesis".into()
            })
        );
    }

    #[test]
    fn parse_comments_and_errors() {
        let text = "# header\n  BS(0,1, 0.3 ,-1e-1);  # mix\n\nR(2, 1)\nSYMP(\"a b.json\")\n";
        let gates = parse(text).unwrap();
        assert_eq!(gates.len(), 3);
        assert_eq!(
            gates[2],
            Gate::RawSymplectic {
                source: "a b.json".into()
            }
        );
        assert!(matches!(
            parse("X(0)"),
            Err(Error::Syntax {
                line: 1,
                col: 1,
                ..
            })
        ));
        assert!(matches!(parse("D(0, 1)"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("D(0.5, 1, 0)"),
            Err(Error::Syntax { col: 3, .. })
        ));
        assert!(matches!(
            parse("R(0, 1) R(0, 1)"),
            Err(Error::Syntax { col: 9, .. })
        ));
        assert!(matches!(
            parse("\nD(0, 1, abc)"),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert_eq!(
            validate(&parse("R(3, 0.1)").unwrap(), 2),
            Err(Error::ModeOutOfRange { mode: 3, dim: 2 })
        );
    }

    #[test]
    fn pretty_print_round_trip() {
        let text = "D(0, 0.1, -2.5e-3)\nS(1, 0.5, 3.0)\nBS(0, 1, 0.7853981633974483, 0.0)\nR(1, -0.2)\nSYMP(\"x\\\"y.json\")\n";
        let gates = parse(text).unwrap();
        assert_eq!(parse(&pretty_print(&gates)).unwrap(), gates);
    }

    #[test]
    fn empty_and_single_displacement() {
        let cc = compile(&[], 2, no_files).unwrap();
        assert_eq!(cc.h, ComplexVector::zeros(2));
        assert_eq!(cc.log_phase, LogComplex::ZERO);
        let cc = compile(&parse("D(0, 1, 0)").unwrap(), 1, no_files).unwrap();
        assert_eq!(cc.h[0], c(1.0, 0.0));
        assert!(cc.r.distance(&SymplecticElement::identity(1)) == 0.0);
        let x = run(&cc).unwrap();
        let expected =
            UltracoherentState::coherent(ComplexVector::from_column_slice(&[c(1.0, 0.0)]));
        assert!(state_residual(&x, &expected) < 1e-15);
    }

    #[test]
    fn squeezed_vacuum() {
        let cc = compile(&parse("S(0, 0.5, 0)").unwrap(), 1, no_files).unwrap();
        let x = run(&cc).unwrap();
        assert!((x.z().matrix()[(0, 0)] - c(0.5f64.tanh(), 0.0)).norm() < 1e-14);
        assert!((norm(&x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_matters_but_both_match_sequential() {
        for text in [
            "D(0, 1, 0.5)\nS(0, 0.5, 0.3)",
            "S(0, 0.5, 0.3)\nD(0, 1, 0.5)",
        ] {
            let steps = lower(&parse(text).unwrap(), 1, no_files).unwrap();
            let compiled = run(&compile_steps(&steps, 1).unwrap()).unwrap();
            let seq = run_sequential(&steps, 1).unwrap();
            assert!(state_residual(&compiled, &seq) < 1e-9);
        }
        let a =
            run(&compile(&parse("D(0, 1, 0.5)\nS(0, 0.5, 0.3)").unwrap(), 1, no_files).unwrap())
                .unwrap();
        let b =
            run(&compile(&parse("S(0, 0.5, 0.3)\nD(0, 1, 0.5)").unwrap(), 1, no_files).unwrap())
                .unwrap();
        assert!(state_residual(&a, &b) > 1e-3);
    }

    #[test]
    fn raw_symplectic_requires_loader() {
        let gates = parse("SYMP(\"r.json\")").unwrap();
        assert!(matches!(compile(&gates, 1, no_files), Err(Error::Input(_))));
        let cc = compile(&gates, 1, |_| Ok(SymplecticElement::identity(1))).unwrap();
        assert_eq!(cc.r.dim(), 1);
        assert!(matches!(
            compile(&gates, 2, |_| Ok(SymplecticElement::identity(1))),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
