//! Text formats for polynomials, models, graphs and hypercube-sum
//! expressions, plus DOT export.
//!
//! All formats are line-oriented; `#` starts a comment. Grammars:
//!
//! ```text
//! poly mode=<r|rplus> vars=<v1,v2,...> : <coef>*<v1>^<e1>*... ; ...
//!
//! circuit|formula mode=<r|rplus> vars=<n>
//! node <id> leaf var=<i>
//! node <id> leaf const=<val>
//! node <id> gate op=min|plus l=<id> r=<id>
//! root <id>
//!
//! abp mode=<r|rplus> vars=<n> kind=weakest|general layers=<k0,k1,...>
//! edge L=<layer> f=<i> t=<j> label=var:<i>|const:<val>|lin:<forms>
//!
//! graph n=<v> directed=<0|1>
//! edge <u> <v>
//! ```
//!
//! A `<val>` is `p`, `p/q` or `inf`. A linear-form label `lin:` lists
//! degree-≤1 terms separated by `|`, e.g. `lin:2*x0|x1|5` for
//! `(2⊗x0) ⊕ x1 ⊕ 5`. In a polynomial term, an omitted coefficient is `0`
//! (the multiplicative identity), an omitted variable has exponent 0 and a
//! variable without `^` has exponent 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hypercube::{HypercubeExpr, WireTarget};
use crate::model::{
    Abp, AbpKind, Circuit, EdgeLabel, Formula, GateOp, LeafLabel, Model, Node,
};
use crate::poly::TropPoly;
use crate::semiring::{SemiringMode, TropValue};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Content lines with their 1-based numbers, comments and blanks removed.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            let l = match l.find('#') {
                Some(pos) => &l[..pos],
                None => l,
            };
            (i + 1, l.trim())
        })
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn kv<'a>(token: &'a str, line: usize) -> Result<(&'a str, &'a str)> {
    token
        .split_once('=')
        .ok_or_else(|| perr(line, format!("expected key=value, got `{token}`")))
}

fn parse_mode(s: &str, line: usize) -> Result<SemiringMode> {
    s.parse().map_err(|e: String| perr(line, e))
}

fn parse_value(s: &str, line: usize) -> Result<TropValue> {
    s.parse().map_err(|e: String| perr(line, e))
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| perr(line, format!("bad {what} `{s}`")))
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Default variable names `x0, x1, …`.
pub fn default_var_names(arity: usize) -> Vec<String> {
    (0..arity).map(|i| format!("x{i}")).collect()
}

pub fn poly_to_string(p: &TropPoly, names: &[String]) -> String {
    let mut out = format!("poly mode={} vars={} :", p.mode(), names.join(","));
    let mut first = true;
    for (exps, coeff) in p.terms() {
        if first {
            out.push(' ');
            first = false;
        } else {
            out.push_str(" ; ");
        }
        let mut parts: Vec<String> = Vec::new();
        let coeff_val = TropValue::Finite(*coeff);
        if coeff_val != TropValue::zero() || exps.iter().all(|&e| e == 0) {
            parts.push(coeff_val.to_string());
        }
        for (i, e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        out.push_str(&parts.join("*"));
    }
    out.push('\n');
    out
}

/// Parses a polynomial document; returns the polynomial and its variable
/// names.
pub fn parse_poly(text: &str) -> Result<(TropPoly, Vec<String>)> {
    let lines = content_lines(text);
    if lines.is_empty() {
        return Err(perr(1, "empty polynomial document"));
    }
    let first_line = lines[0].0;
    // The format is a single logical line; allow it to wrap.
    let joined: String = lines
        .iter()
        .map(|(_, l)| *l)
        .collect::<Vec<_>>()
        .join(" ");

    let rest = joined
        .strip_prefix("poly")
        .ok_or_else(|| perr(first_line, "expected `poly` header"))?;
    let (header, body) = rest
        .split_once(':')
        .ok_or_else(|| perr(first_line, "missing `:` after poly header"))?;

    let mut mode = None;
    let mut names: Vec<String> = Vec::new();
    for token in header.split_whitespace() {
        let (k, v) = kv(token, first_line)?;
        match k {
            "mode" => mode = Some(parse_mode(v, first_line)?),
            "vars" => {
                names = v
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            }
            other => return Err(perr(first_line, format!("unknown poly key `{other}`"))),
        }
    }
    let mode = mode.ok_or_else(|| perr(first_line, "missing mode="))?;
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if index.len() != names.len() {
        return Err(perr(first_line, "duplicate variable name"));
    }

    let mut poly = TropPoly::empty(mode, names.len());
    for term in body.split(';') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let mut exps = vec![0u32; names.len()];
        let mut coeff = TropValue::zero();
        for factor in term.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b.trim(),
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| perr(first_line, format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            if let Some(&i) = index.get(base) {
                exps[i] += exp;
            } else {
                let v = parse_value(base, first_line)?;
                coeff = coeff.trop_mul(&v.trop_pow(exp));
            }
        }
        poly.insert_term(exps, &coeff)?;
    }
    Ok((poly, names))
}

// ---------------------------------------------------------------------------
// Linear-form labels
// ---------------------------------------------------------------------------

fn lin_to_string(p: &TropPoly) -> String {
    if p.is_empty() {
        return "inf".into();
    }
    let mut forms = Vec::new();
    for (exps, coeff) in p.terms() {
        let mut parts = Vec::new();
        let coeff_val = TropValue::Finite(*coeff);
        if coeff_val != TropValue::zero() || exps.iter().all(|&e| e == 0) {
            parts.push(coeff_val.to_string());
        }
        for (i, e) in exps.iter().enumerate() {
            for _ in 0..*e {
                parts.push(format!("x{i}"));
            }
        }
        forms.push(parts.join("*"));
    }
    forms.join("|")
}

fn parse_lin(s: &str, mode: SemiringMode, arity: usize, line: usize) -> Result<TropPoly> {
    let mut p = TropPoly::empty(mode, arity);
    if s == "inf" {
        return Ok(p);
    }
    for term in s.split('|') {
        let mut exps = vec![0u32; arity];
        let mut coeff = TropValue::zero();
        for factor in term.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<u32>()
                        .map_err(|_| perr(line, format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            if let Some(idx) = base.strip_prefix('x').and_then(|i| i.parse::<usize>().ok()) {
                if idx >= arity {
                    return Err(perr(line, format!("variable x{idx} out of range")));
                }
                exps[idx] += exp;
            } else {
                let v = parse_value(base, line)?;
                coeff = coeff.trop_mul(&v.trop_pow(exp));
            }
        }
        p.insert_term(exps, &coeff)?;
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

fn label_to_string(label: &EdgeLabel) -> String {
    match label {
        EdgeLabel::Var(i) => format!("var:{i}"),
        EdgeLabel::Const(c) => format!("const:{c}"),
        EdgeLabel::Lin(p) => format!("lin:{}", lin_to_string(p)),
    }
}

pub fn model_to_string(m: &Model) -> String {
    let mut out = String::new();
    match m {
        Model::Circuit(c) => {
            write_circuit(&mut out, c, "circuit");
        }
        Model::Formula(f) => {
            write_circuit(&mut out, f.circuit(), "formula");
        }
        Model::Abp(a) => {
            let layers: Vec<String> = a.layers.iter().map(|k| k.to_string()).collect();
            let kind = match a.kind {
                AbpKind::Weakest => "weakest",
                AbpKind::General => "general",
            };
            writeln!(
                out,
                "abp mode={} vars={} kind={} layers={}",
                a.mode,
                a.arity,
                kind,
                layers.join(",")
            )
            .unwrap();
            for e in &a.edges {
                writeln!(
                    out,
                    "edge L={} f={} t={} label={}",
                    e.layer,
                    e.from,
                    e.to,
                    label_to_string(&e.label)
                )
                .unwrap();
            }
        }
    }
    out
}

fn write_circuit(out: &mut String, c: &Circuit, kind: &str) {
    writeln!(out, "{kind} mode={} vars={}", c.mode, c.arity).unwrap();
    for (id, node) in c.nodes.iter().enumerate() {
        match node {
            Node::Leaf(LeafLabel::Var(i)) => writeln!(out, "node {id} leaf var={i}").unwrap(),
            Node::Leaf(LeafLabel::Const(v)) => {
                writeln!(out, "node {id} leaf const={v}").unwrap()
            }
            Node::Gate { op, left, right } => writeln!(
                out,
                "node {id} gate op={} l={left} r={right}",
                op.as_str()
            )
            .unwrap(),
        }
    }
    writeln!(out, "root {}", c.root).unwrap();
}

pub fn parse_model(text: &str) -> Result<Model> {
    let lines = content_lines(text);
    let Some(&(first_line, header)) = lines.first() else {
        return Err(perr(1, "empty model document"));
    };
    let mut tokens = header.split_whitespace();
    match tokens.next() {
        Some("circuit") => parse_circuit_body(&lines, false).map(Model::Circuit),
        Some("formula") => {
            let c = parse_circuit_body(&lines, true)?;
            Formula::new(c).map(Model::Formula)
        }
        Some("abp") => parse_abp_body(&lines).map(Model::Abp),
        _ => Err(perr(
            first_line,
            "expected circuit|formula|abp header",
        )),
    }
}

fn parse_circuit_body(lines: &[(usize, &str)], _formula: bool) -> Result<Circuit> {
    let (first_line, header) = lines[0];
    let mut mode = None;
    let mut arity = None;
    for token in header.split_whitespace().skip(1) {
        let (k, v) = kv(token, first_line)?;
        match k {
            "mode" => mode = Some(parse_mode(v, first_line)?),
            "vars" => arity = Some(parse_usize(v, first_line, "vars")?),
            other => return Err(perr(first_line, format!("unknown header key `{other}`"))),
        }
    }
    let mode = mode.ok_or_else(|| perr(first_line, "missing mode="))?;
    let arity = arity.ok_or_else(|| perr(first_line, "missing vars="))?;

    let mut nodes: Vec<Node> = Vec::new();
    let mut root = None;
    for &(ln, line) in &lines[1..] {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("node") => {
                let id = parse_usize(tok.next().ok_or_else(|| perr(ln, "missing node id"))?, ln, "node id")?;
                if id != nodes.len() {
                    return Err(perr(ln, format!("node ids must be dense, expected {}", nodes.len())));
                }
                match tok.next() {
                    Some("leaf") => {
                        let (k, v) = kv(tok.next().ok_or_else(|| perr(ln, "missing leaf label"))?, ln)?;
                        let label = match k {
                            "var" => LeafLabel::Var(parse_usize(v, ln, "var index")?),
                            "const" => LeafLabel::Const(parse_value(v, ln)?),
                            other => return Err(perr(ln, format!("unknown leaf key `{other}`"))),
                        };
                        nodes.push(Node::Leaf(label));
                    }
                    Some("gate") => {
                        let mut op = None;
                        let mut l = None;
                        let mut r = None;
                        for t in tok {
                            let (k, v) = kv(t, ln)?;
                            match k {
                                "op" => {
                                    op = Some(match v {
                                        "min" => GateOp::Min,
                                        "plus" => GateOp::Plus,
                                        other => {
                                            return Err(perr(ln, format!("unknown op `{other}`")))
                                        }
                                    })
                                }
                                "l" => l = Some(parse_usize(v, ln, "left child")?),
                                "r" => r = Some(parse_usize(v, ln, "right child")?),
                                other => return Err(perr(ln, format!("unknown gate key `{other}`"))),
                            }
                        }
                        let op = op.ok_or_else(|| perr(ln, "missing op="))?;
                        let left = l.ok_or_else(|| perr(ln, "missing l="))?;
                        let right = r.ok_or_else(|| perr(ln, "missing r="))?;
                        if left >= nodes.len() || right >= nodes.len() {
                            return Err(perr(ln, "gate child defined after the gate"));
                        }
                        nodes.push(Node::Gate { op, left, right });
                    }
                    _ => return Err(perr(ln, "expected leaf|gate")),
                }
            }
            Some("root") => {
                root = Some(parse_usize(tok.next().ok_or_else(|| perr(ln, "missing root id"))?, ln, "root id")?);
            }
            _ => return Err(perr(ln, "expected node or root line")),
        }
    }
    let root = root.ok_or_else(|| perr(first_line, "missing root line"))?;
    let c = Circuit {
        mode,
        arity,
        nodes,
        root,
    };
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations.join("; ")));
    }
    Ok(c)
}

fn parse_abp_body(lines: &[(usize, &str)]) -> Result<Abp> {
    let (first_line, header) = lines[0];
    let mut mode = None;
    let mut arity = None;
    let mut kind = None;
    let mut layers: Option<Vec<usize>> = None;
    for token in header.split_whitespace().skip(1) {
        let (k, v) = kv(token, first_line)?;
        match k {
            "mode" => mode = Some(parse_mode(v, first_line)?),
            "vars" => arity = Some(parse_usize(v, first_line, "vars")?),
            "kind" => {
                kind = Some(match v {
                    "weakest" => AbpKind::Weakest,
                    "general" => AbpKind::General,
                    other => return Err(perr(first_line, format!("unknown kind `{other}`"))),
                })
            }
            "layers" => {
                layers = Some(
                    v.split(',')
                        .map(|s| parse_usize(s, first_line, "layer size"))
                        .collect::<Result<_>>()?,
                )
            }
            other => return Err(perr(first_line, format!("unknown header key `{other}`"))),
        }
    }
    let mut abp = Abp::new(
        mode.ok_or_else(|| perr(first_line, "missing mode="))?,
        arity.ok_or_else(|| perr(first_line, "missing vars="))?,
        kind.ok_or_else(|| perr(first_line, "missing kind="))?,
        layers.ok_or_else(|| perr(first_line, "missing layers="))?,
    );

    for &(ln, line) in &lines[1..] {
        let mut tok = line.split_whitespace();
        if tok.next() != Some("edge") {
            return Err(perr(ln, "expected edge line"));
        }
        let mut layer = None;
        let mut from = None;
        let mut to = None;
        let mut label = None;
        for t in tok {
            let (k, v) = kv(t, ln)?;
            match k {
                "L" => layer = Some(parse_usize(v, ln, "layer")?),
                "f" => from = Some(parse_usize(v, ln, "from")?),
                "t" => to = Some(parse_usize(v, ln, "to")?),
                "label" => {
                    let (tag, body) = v
                        .split_once(':')
                        .ok_or_else(|| perr(ln, "label needs var:|const:|lin:"))?;
                    label = Some(match tag {
                        "var" => EdgeLabel::Var(parse_usize(body, ln, "label var")?),
                        "const" => EdgeLabel::Const(parse_value(body, ln)?),
                        "lin" => EdgeLabel::Lin(parse_lin(body, abp.mode, abp.arity, ln)?),
                        other => return Err(perr(ln, format!("unknown label kind `{other}`"))),
                    });
                }
                other => return Err(perr(ln, format!("unknown edge key `{other}`"))),
            }
        }
        abp.add_edge(
            layer.ok_or_else(|| perr(ln, "missing L="))?,
            from.ok_or_else(|| perr(ln, "missing f="))?,
            to.ok_or_else(|| perr(ln, "missing t="))?,
            label.ok_or_else(|| perr(ln, "missing label="))?,
        );
    }
    let violations = abp.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations.join("; ")));
    }
    Ok(abp)
}

// ---------------------------------------------------------------------------
// Hypercube expressions
// ---------------------------------------------------------------------------

pub fn hyper_to_string(e: &HypercubeExpr) -> String {
    let mut out = model_to_string(e.inner());
    let comp: Vec<String> = e.complemented().iter().map(|i| i.to_string()).collect();
    writeln!(out, "hyper y={} comp={}", e.y_vars(), comp.join(",")).unwrap();
    for (slot, target) in e.wiring().iter().enumerate() {
        let t = match target {
            WireTarget::X(i) => format!("x:{i}"),
            WireTarget::Y(j) => format!("y:{j}"),
            WireTarget::YBar(j) => format!("ybar:{j}"),
            WireTarget::Const(v) => format!("const:{v}"),
        };
        writeln!(out, "wire slot={slot} -> {t}").unwrap();
    }
    out
}

pub fn parse_hyper(text: &str) -> Result<HypercubeExpr> {
    let lines = content_lines(text);
    let hyper_pos = lines
        .iter()
        .position(|(_, l)| l.starts_with("hyper "))
        .ok_or_else(|| perr(1, "missing hyper line"))?;

    let model_text: String = lines[..hyper_pos]
        .iter()
        .map(|(_, l)| format!("{l}\n"))
        .collect();
    let inner = parse_model(&model_text)?;

    let (ln, hyper_line) = lines[hyper_pos];
    let mut y_vars = None;
    let mut comp: Vec<usize> = Vec::new();
    for token in hyper_line.split_whitespace().skip(1) {
        let (k, v) = kv(token, ln)?;
        match k {
            "y" => y_vars = Some(parse_usize(v, ln, "y count")?),
            "comp" => {
                comp = v
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_usize(s, ln, "complement index"))
                    .collect::<Result<_>>()?
            }
            other => return Err(perr(ln, format!("unknown hyper key `{other}`"))),
        }
    }
    let y_vars = y_vars.ok_or_else(|| perr(ln, "missing y="))?;

    let mut wiring: Vec<Option<WireTarget>> = vec![None; inner.arity()];
    for &(ln, line) in &lines[hyper_pos + 1..] {
        let rest = line
            .strip_prefix("wire")
            .ok_or_else(|| perr(ln, "expected wire line"))?;
        let (slot_part, target_part) = rest
            .split_once("->")
            .ok_or_else(|| perr(ln, "wire needs `slot=<k> -> <target>`"))?;
        let (k, v) = kv(slot_part.trim(), ln)?;
        if k != "slot" {
            return Err(perr(ln, "expected slot="));
        }
        let slot = parse_usize(v, ln, "slot")?;
        if slot >= wiring.len() {
            return Err(perr(ln, format!("slot {slot} out of range")));
        }
        let target_part = target_part.trim();
        let (tag, body) = target_part
            .split_once(':')
            .ok_or_else(|| perr(ln, "target needs x:|y:|ybar:|const:"))?;
        let target = match tag {
            "x" => WireTarget::X(parse_usize(body, ln, "x index")?),
            "y" => WireTarget::Y(parse_usize(body, ln, "y index")?),
            "ybar" => WireTarget::YBar(parse_usize(body, ln, "ybar index")?),
            "const" => WireTarget::Const(parse_value(body, ln)?),
            other => return Err(perr(ln, format!("unknown wire target `{other}`"))),
        };
        wiring[slot] = Some(target);
    }
    let wiring: Vec<WireTarget> = wiring
        .into_iter()
        .enumerate()
        .map(|(slot, t)| t.ok_or_else(|| perr(ln, format!("slot {slot} not wired"))))
        .collect::<Result<_>>()?;

    HypercubeExpr::new(inner, y_vars, comp.into_iter().collect(), wiring)
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

pub fn parse_graph(text: &str) -> Result<crate::families::CostGraph> {
    let lines = content_lines(text);
    let Some(&(first_line, header)) = lines.first() else {
        return Err(perr(1, "empty graph document"));
    };
    let rest = header
        .strip_prefix("graph")
        .ok_or_else(|| perr(first_line, "expected `graph` header"))?;
    let mut n = None;
    let mut directed = None;
    for token in rest.split_whitespace() {
        let (k, v) = kv(token, first_line)?;
        match k {
            "n" => n = Some(parse_usize(v, first_line, "vertex count")?),
            "directed" => directed = Some(v == "1"),
            other => return Err(perr(first_line, format!("unknown graph key `{other}`"))),
        }
    }
    let mut g = crate::families::CostGraph::new(
        n.ok_or_else(|| perr(first_line, "missing n="))?,
        directed.unwrap_or(false),
    );
    for &(ln, line) in &lines[1..] {
        let mut tok = line.split_whitespace();
        if tok.next() != Some("edge") {
            return Err(perr(ln, "expected edge line"));
        }
        let u = parse_usize(tok.next().ok_or_else(|| perr(ln, "missing endpoint"))?, ln, "endpoint")?;
        let v = parse_usize(tok.next().ok_or_else(|| perr(ln, "missing endpoint"))?, ln, "endpoint")?;
        g.add_edge(u, v)?;
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

pub fn model_to_dot(m: &Model) -> String {
    let mut out = String::from("digraph model {\n");
    match m {
        Model::Circuit(c) | Model::Formula(_) => {
            let c = match m {
                Model::Circuit(c) => c,
                Model::Formula(f) => f.circuit(),
                _ => unreachable!(),
            };
            let _ = c;
            for (id, node) in c.nodes.iter().enumerate() {
                match node {
                    Node::Leaf(LeafLabel::Var(i)) => {
                        writeln!(out, "  n{id} [label=\"x{i}\", shape=box];").unwrap()
                    }
                    Node::Leaf(LeafLabel::Const(v)) => {
                        writeln!(out, "  n{id} [label=\"{v}\", shape=box];").unwrap()
                    }
                    Node::Gate { op, left, right } => {
                        let sym = match op {
                            GateOp::Min => "⊕",
                            GateOp::Plus => "⊗",
                        };
                        writeln!(out, "  n{id} [label=\"{sym}\"];").unwrap();
                        writeln!(out, "  n{left} -> n{id};").unwrap();
                        writeln!(out, "  n{right} -> n{id};").unwrap();
                    }
                }
            }
            writeln!(out, "  n{} [penwidth=2];", c.root).unwrap();
        }
        Model::Abp(a) => {
            writeln!(out, "  rankdir=LR;").unwrap();
            for (l, &size) in a.layers.iter().enumerate() {
                writeln!(out, "  {{ rank=same;").unwrap();
                for v in 0..size {
                    writeln!(out, "    v{l}_{v} [label=\"{l}.{v}\"];").unwrap();
                }
                writeln!(out, "  }}").unwrap();
            }
            for e in &a.edges {
                writeln!(
                    out,
                    "  v{}_{} -> v{}_{} [label=\"{}\"];",
                    e.layer,
                    e.from,
                    e.layer + 1,
                    e.to,
                    e.label
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CircuitBuilder;

    #[test]
    fn poly_round_trip() {
        let text = "poly mode=r vars=x,y : x^2 ; 1*x*y ; 7/2\n";
        let (p, names) = parse_poly(text).unwrap();
        assert_eq!(names, vec!["x", "y"]);
        assert_eq!(p.term_count(), 3);
        let back = poly_to_string(&p, &names);
        let (p2, _) = parse_poly(&back).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn poly_parse_details() {
        // Omitted coefficient is 0, `inf` coefficient drops the term,
        // repeated variables multiply out.
        let (p, _) = parse_poly("poly mode=rplus vars=a,b : a*a*b ; inf*b ; 3\n").unwrap();
        assert_eq!(
            p,
            TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[2, 1], 0), (&[0, 0], 3)])
        );

        // Empty body → empty polynomial.
        let (p, _) = parse_poly("poly mode=r vars=a :\n").unwrap();
        assert!(p.is_empty());

        assert!(parse_poly("poly mode=bogus vars=a : a\n").is_err());
    }

    #[test]
    fn circuit_round_trip() {
        let mut b = CircuitBuilder::new(SemiringMode::RPlus, 2);
        let x = b.var(0);
        let c = b.constant(TropValue::ratio(5, 2));
        let g = b.gate(GateOp::Plus, x, c);
        let y = b.var(1);
        let root = b.gate(GateOp::Min, g, y);
        let circuit = b.finish(root);

        let text = model_to_string(&Model::Circuit(circuit.clone()));
        let back = parse_model(&text).unwrap();
        assert_eq!(back, Model::Circuit(circuit));
    }

    #[test]
    fn abp_round_trip_with_lin_labels() {
        let lin = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 2), (&[0, 0], 5)]);
        let mut abp = Abp::new(SemiringMode::R, 2, AbpKind::General, vec![1, 2, 1]);
        abp.add_edge(0, 0, 0, EdgeLabel::Var(1));
        abp.add_edge(0, 0, 1, EdgeLabel::Const(TropValue::Infinity));
        abp.add_edge(1, 0, 0, EdgeLabel::Lin(lin));
        abp.add_edge(1, 1, 0, EdgeLabel::Const(TropValue::int(-3)));

        let text = model_to_string(&Model::Abp(abp.clone()));
        let back = parse_model(&text).unwrap();
        assert_eq!(back, Model::Abp(abp));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "circuit mode=r vars=1\nnode 0 leaf var=0\nnode 1 gate op=min l=0 r=5\nroot 1\n";
        match parse_model(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn graph_parsing() {
        let g = parse_graph("graph n=3 directed=0\nedge 0 1\nedge 1 2\n").unwrap();
        assert_eq!(g.vertices, 3);
        assert_eq!(g.edges.len(), 2);
        assert!(parse_graph("graph n=2 directed=0\nedge 0 0\n").is_err());
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let mut b = CircuitBuilder::new(SemiringMode::R, 1);
        let x = b.var(0);
        let c = b.constant(TropValue::int(4));
        let root = b.gate(GateOp::Min, x, c);
        let dot = model_to_dot(&Model::Circuit(b.finish(root)));
        assert!(dot.contains("digraph"));
        assert!(dot.contains("x0"));
        assert!(dot.contains("⊕"));
    }
}
