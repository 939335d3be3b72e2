//! Declarative transformational networks: a JSON document format with named
//! systems, nodes and labeled edges; an operation-expression grammar;
//! verification of every edge and declared commuting square; deterministic
//! DOT export.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::contextual::{ti_orbit, TiOrbit};
use crate::error::{Error, Result};
use crate::groupcore::{close_generators, Perm};
use crate::pcmath::{AffineMap, Modulus, PcSegment, VoicePerm};
use crate::serial::{rich, ContextualOp, RetroSystem};
use crate::subdual::build_sub_dual;

/// One term of an operation expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpAtom {
    Transpose(i64),
    Invert(i64),
    Multiply(i64),
    Affine(i64, i64),
    P,
    L,
    R,
    K,
    Q(i64),
    Qbar(i64),
    W(i64),
    J(usize, usize),
    Rich,
    /// Voice permutation in cycle notation, e.g. `(13)`; resolved against
    /// the segment length at evaluation time.
    Perm(String),
}

impl OpAtom {
    /// Global atoms act on any segment; contextual atoms resolve against the
    /// source node's system.
    pub fn is_global(&self) -> bool {
        matches!(
            self,
            OpAtom::Transpose(_)
                | OpAtom::Invert(_)
                | OpAtom::Multiply(_)
                | OpAtom::Affine(_, _)
                | OpAtom::Rich
                | OpAtom::Perm(_)
        )
    }
}

impl fmt::Display for OpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpAtom::Transpose(i) => write!(f, "T{i}"),
            OpAtom::Invert(j) => write!(f, "I{j}"),
            OpAtom::Multiply(a) => write!(f, "M{a}"),
            OpAtom::Affine(a, b) => write!(f, "aff({a},{b})"),
            OpAtom::P => write!(f, "P"),
            OpAtom::L => write!(f, "L"),
            OpAtom::R => write!(f, "R"),
            OpAtom::K => write!(f, "K"),
            OpAtom::Q(i) => write!(f, "Q{i}"),
            OpAtom::Qbar(j) => write!(f, "Qbar{j}"),
            OpAtom::W(a) => write!(f, "W{a}"),
            OpAtom::J(q, r) => write!(f, "J({q},{r})"),
            OpAtom::Rich => write!(f, "RICH"),
            OpAtom::Perm(cycles) => write!(f, "{cycles}"),
        }
    }
}

/// A composition of atoms, applied right to left: `g*f` applies `f` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpExpr {
    atoms: Vec<OpAtom>,
}

impl OpExpr {
    pub fn atoms(&self) -> &[OpAtom] {
        &self.atoms
    }

    /// Parse the normative grammar `expr := term ("*" term)*`. Terms are
    /// `T<i> I<j> M<a> aff(a,b) P L R K Q<i> Qbar<j> W<a> J(q,r) RICH
    /// perm(<cycles>)`; bare cycle notation like `(13)` is accepted as a
    /// shorthand for `perm((13))`.
    pub fn parse(text: &str) -> Result<OpExpr> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse(text, "empty operation expression"));
        }
        let mut atoms = Vec::new();
        for term in compact.split('*') {
            atoms.push(parse_atom(term, text)?);
        }
        Ok(OpExpr { atoms })
    }

    /// Evaluate at a segment; contextual atoms resolve in `system`.
    pub fn eval(&self, system: &ResolvedSystem, y: &PcSegment) -> Result<PcSegment> {
        let mut value = y.clone();
        for atom in self.atoms.iter().rev() {
            value = eval_atom(atom, system, &value)?;
        }
        Ok(value)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for atom in &self.atoms {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{atom}")?;
            first = false;
        }
        Ok(())
    }
}

fn parse_int(text: &str, whole: &str) -> Result<i64> {
    text.parse()
        .map_err(|_| Error::parse(whole, format!("bad integer `{text}`")))
}

fn parse_atom(term: &str, whole: &str) -> Result<OpAtom> {
    if let Some(rest) = term.strip_prefix("aff(").and_then(|r| r.strip_suffix(')')) {
        let mut parts = rest.splitn(2, ',');
        let a = parts
            .next()
            .ok_or_else(|| Error::parse(whole, "aff needs two arguments"))?;
        let b = parts
            .next()
            .ok_or_else(|| Error::parse(whole, "aff needs two arguments"))?;
        return Ok(OpAtom::Affine(parse_int(a, whole)?, parse_int(b, whole)?));
    }
    if let Some(rest) = term.strip_prefix("J(").and_then(|r| r.strip_suffix(')')) {
        let mut parts = rest.splitn(2, ',');
        let q = parts
            .next()
            .ok_or_else(|| Error::parse(whole, "J needs two positions"))?;
        let r = parts
            .next()
            .ok_or_else(|| Error::parse(whole, "J needs two positions"))?;
        let q = parse_int(q, whole)?;
        let r = parse_int(r, whole)?;
        if q < 1 || r <= q {
            return Err(Error::parse(whole, "J positions must satisfy 1 <= q < r"));
        }
        return Ok(OpAtom::J(q as usize, r as usize));
    }
    if let Some(rest) = term.strip_prefix("perm(").and_then(|r| r.strip_suffix(')')) {
        return parse_cycles(rest, whole);
    }
    if term.starts_with('(') {
        return parse_cycles(term, whole);
    }
    match term {
        "RICH" => return Ok(OpAtom::Rich),
        "P" => return Ok(OpAtom::P),
        "L" => return Ok(OpAtom::L),
        "R" => return Ok(OpAtom::R),
        "K" => return Ok(OpAtom::K),
        _ => {}
    }
    if let Some(rest) = term.strip_prefix("Qbar") {
        return Ok(OpAtom::Qbar(parse_int(rest, whole)?));
    }
    if let Some(rest) = term.strip_prefix('Q') {
        return Ok(OpAtom::Q(parse_int(rest, whole)?));
    }
    if let Some(rest) = term.strip_prefix('T') {
        return Ok(OpAtom::Transpose(parse_int(rest, whole)?));
    }
    if let Some(rest) = term.strip_prefix('I') {
        return Ok(OpAtom::Invert(parse_int(rest, whole)?));
    }
    if let Some(rest) = term.strip_prefix('M') {
        return Ok(OpAtom::Multiply(parse_int(rest, whole)?));
    }
    if let Some(rest) = term.strip_prefix('W') {
        return Ok(OpAtom::W(parse_int(rest, whole)?));
    }
    Err(Error::parse(whole, format!("unknown atom `{term}`")))
}

fn parse_cycles(text: &str, whole: &str) -> Result<OpAtom> {
    if text.is_empty()
        || !text.starts_with('(')
        || !text.ends_with(')')
        || !text
            .chars()
            .all(|c| c.is_ascii_digit() || c == '(' || c == ')')
    {
        return Err(Error::parse(whole, format!("bad cycle notation `{text}`")));
    }
    // Validated in detail at evaluation time, when the arity is known.
    Ok(OpAtom::Perm(text.to_string()))
}

fn eval_atom(atom: &OpAtom, system: &ResolvedSystem, y: &PcSegment) -> Result<PcSegment> {
    let m = y.modulus();
    match atom {
        OpAtom::Transpose(i) => AffineMap::transposition(m, *i).apply(y),
        OpAtom::Invert(j) => AffineMap::inversion(m, *j).apply(y),
        OpAtom::Multiply(a) => AffineMap::multiplication(m, *a).apply(y),
        OpAtom::Affine(a, b) => AffineMap::new(m, *a, *b).apply(y),
        OpAtom::Rich => rich(y),
        OpAtom::Perm(cycles) => VoicePerm::parse(cycles, y.len())?.apply(y),
        OpAtom::P => system.contextual(ContextualOp::P, y),
        OpAtom::L => system.contextual(ContextualOp::L, y),
        OpAtom::R => system.contextual(ContextualOp::R, y),
        OpAtom::K => system.contextual(ContextualOp::K, y),
        OpAtom::Q(i) => system.contextual(ContextualOp::Q(*i), y),
        OpAtom::Qbar(j) => system.contextual(ContextualOp::Qbar(*j), y),
        OpAtom::W(a) => system.contextual(ContextualOp::W(*a), y),
        OpAtom::J(q, r) => system.contextual(ContextualOp::J(*q, *r), y),
    }
}

/// The raw JSON shape of a network document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub modulus: u32,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub systems: IndexMap<String, SystemDecl>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub nodes: IndexMap<String, NodeDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<SquareDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDecl {
    pub kind: SystemKind,
    pub seed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_gens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orderings: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "ti-orbit")]
    TiOrbit,
    #[serde(rename = "sub-dual")]
    SubDual,
    #[serde(rename = "retro")]
    Retro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDecl {
    pub system: String,
    pub segment: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDecl {
    pub from: String,
    pub to: String,
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareDecl {
    /// `[a, b, c, d]`: the paths `a -> b -> d` and `a -> c -> d` must both
    /// exist as edges and agree.
    pub corners: [String; 4],
}

/// A system declaration resolved into an evaluable object.
#[derive(Debug, Clone)]
pub enum ResolvedSystem {
    TiOrbit(TiOrbit),
    SubDual {
        orbit: TiOrbit,
        members: BTreeSet<PcSegment>,
    },
    Retro(RetroSystem),
}

impl ResolvedSystem {
    fn contextual(&self, op: ContextualOp, y: &PcSegment) -> Result<PcSegment> {
        match self {
            ResolvedSystem::TiOrbit(orbit) | ResolvedSystem::SubDual { orbit, .. } => {
                op.apply(orbit, y)
            }
            ResolvedSystem::Retro(system) => system.conj_op(op, y),
        }
    }

    /// The segments belonging to the system.
    pub fn members(&self) -> Vec<PcSegment> {
        match self {
            ResolvedSystem::TiOrbit(orbit) => orbit.carrier().elements().to_vec(),
            ResolvedSystem::SubDual { members, .. } => members.iter().cloned().collect(),
            ResolvedSystem::Retro(system) => system.carrier().elements().to_vec(),
        }
    }

    pub fn seed_len(&self) -> usize {
        match self {
            ResolvedSystem::TiOrbit(orbit) => orbit.seed().len(),
            ResolvedSystem::SubDual { orbit, .. } => orbit.seed().len(),
            ResolvedSystem::Retro(system) => system.seed().len(),
        }
    }
}

/// A fully resolved document: raw declarations plus parsed segments,
/// expressions, and built systems.
#[derive(Debug, Clone)]
pub struct ResolvedNetwork {
    doc: NetworkDoc,
    modulus: Modulus,
    systems: IndexMap<String, ResolvedSystem>,
    node_segments: IndexMap<String, PcSegment>,
    edge_ops: Vec<OpExpr>,
}

impl ResolvedNetwork {
    pub fn doc(&self) -> &NetworkDoc {
        &self.doc
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn systems(&self) -> &IndexMap<String, ResolvedSystem> {
        &self.systems
    }

    pub fn node_segment(&self, id: &str) -> Option<&PcSegment> {
        self.node_segments.get(id)
    }
}

/// Parse JSON text into a resolved network document.
pub fn parse_network(text: &str) -> Result<ResolvedNetwork> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        locus: format!("line {} column {}", e.line(), e.column()),
        msg: e.to_string(),
    })?;
    resolve_network(doc)
}

/// Resolve an in-memory document: build each system, parse node segments and
/// edge expressions, and check the structural invariants.
pub fn resolve_network(doc: NetworkDoc) -> Result<ResolvedNetwork> {
    let modulus = Modulus::new(doc.modulus)?;

    let mut systems: IndexMap<String, ResolvedSystem> = IndexMap::new();
    for (name, decl) in &doc.systems {
        let locus = format!("systems.{name}");
        let seed = PcSegment::parse(&decl.seed, modulus)
            .map_err(|e| Error::parse(&locus, e.to_string()))?;
        let resolved = match decl.kind {
            SystemKind::TiOrbit => ResolvedSystem::TiOrbit(
                ti_orbit(&seed).map_err(|e| Error::parse(&locus, e.to_string()))?,
            ),
            SystemKind::SubDual => resolve_sub_dual(&seed, decl, &locus, modulus)?,
            SystemKind::Retro => {
                let orderings = match &decl.orderings {
                    None => [
                        VoicePerm::parse("(123)", seed.len())
                            .map_err(|e| Error::parse(&locus, e.to_string()))?,
                        VoicePerm::parse("(12)", seed.len())
                            .map_err(|e| Error::parse(&locus, e.to_string()))?,
                    ],
                    Some(texts) => {
                        if texts.len() != 2 {
                            return Err(Error::parse(&locus, "exactly two orderings required"));
                        }
                        [
                            VoicePerm::parse(&texts[0], seed.len())
                                .map_err(|e| Error::parse(&locus, e.to_string()))?,
                            VoicePerm::parse(&texts[1], seed.len())
                                .map_err(|e| Error::parse(&locus, e.to_string()))?,
                        ]
                    }
                };
                ResolvedSystem::Retro(
                    RetroSystem::build(&seed, orderings)
                        .map_err(|e| Error::parse(&locus, e.to_string()))?,
                )
            }
        };
        systems.insert(name.clone(), resolved);
    }

    let mut node_segments: IndexMap<String, PcSegment> = IndexMap::new();
    for (id, node) in &doc.nodes {
        let locus = format!("nodes.{id}");
        let Some(system) = systems.get(&node.system) else {
            return Err(Error::parse(
                &locus,
                format!("unknown system `{}`", node.system),
            ));
        };
        let segment = PcSegment::parse(&node.segment, modulus)
            .map_err(|e| Error::parse(&locus, e.to_string()))?;
        if segment.len() != system.seed_len() {
            return Err(Error::parse(
                &locus,
                format!(
                    "segment length {} does not match the system seed length {}",
                    segment.len(),
                    system.seed_len()
                ),
            ));
        }
        node_segments.insert(id.clone(), segment);
    }

    let mut edge_ops = Vec::with_capacity(doc.edges.len());
    for (i, edge) in doc.edges.iter().enumerate() {
        let locus = format!("edges[{i}]");
        for id in [&edge.from, &edge.to] {
            if !node_segments.contains_key(id) {
                return Err(Error::parse(&locus, format!("unknown node `{id}`")));
            }
        }
        let op = OpExpr::parse(&edge.op).map_err(|e| Error::parse(&locus, e.to_string()))?;
        let from_system = &doc.nodes[&edge.from].system;
        let to_system = &doc.nodes[&edge.to].system;
        if from_system != to_system {
            if let Some(atom) = op.atoms().iter().find(|a| !a.is_global()) {
                return Err(Error::parse(
                    &locus,
                    format!(
                        "contextual atom `{atom}` on an edge between systems `{from_system}` and `{to_system}`"
                    ),
                ));
            }
        }
        // Arity checks against the source system's seed length.
        let n = systems[from_system].seed_len();
        for atom in op.atoms() {
            match atom {
                OpAtom::J(q, r) => {
                    if *q < 1 || r <= q || *r > n {
                        return Err(Error::parse(
                            &locus,
                            format!("J({q},{r}) is out of range for segments of length {n}"),
                        ));
                    }
                }
                OpAtom::Perm(cycles) => {
                    VoicePerm::parse(cycles, n).map_err(|e| Error::parse(&locus, e.to_string()))?;
                }
                _ => {}
            }
        }
        edge_ops.push(op);
    }

    for (i, square) in doc.squares.iter().enumerate() {
        let locus = format!("squares[{i}]");
        for id in &square.corners {
            if !node_segments.contains_key(id) {
                return Err(Error::parse(&locus, format!("unknown node `{id}`")));
            }
        }
        let [a, b, c, d] = &square.corners;
        for (from, to) in [(a, b), (b, d), (a, c), (c, d)] {
            if !doc.edges.iter().any(|e| &e.from == from && &e.to == to) {
                return Err(Error::parse(
                    &locus,
                    format!("missing edge `{from}` -> `{to}` for the square"),
                ));
            }
        }
    }

    Ok(ResolvedNetwork {
        doc,
        modulus,
        systems,
        node_segments,
        edge_ops,
    })
}

fn resolve_sub_dual(
    seed: &PcSegment,
    decl: &SystemDecl,
    locus: &str,
    modulus: Modulus,
) -> Result<ResolvedSystem> {
    let orbit = ti_orbit(seed).map_err(|e| Error::parse(locus, e.to_string()))?;
    let Some(gen_texts) = &decl.subgroup_gens else {
        return Err(Error::parse(locus, "sub-dual systems need subgroup_gens"));
    };
    if gen_texts.is_empty() {
        return Err(Error::parse(locus, "subgroup_gens must be nonempty"));
    }
    let plain = ResolvedSystem::TiOrbit(orbit.clone());
    let mut gens: Vec<Perm> = Vec::new();
    for text in gen_texts {
        let op = OpExpr::parse(text).map_err(|e| Error::parse(locus, e.to_string()))?;
        let perm = orbit
            .perm_of(text, |y| op.eval(&plain, y))
            .map_err(|e| Error::parse(locus, e.to_string()))?;
        gens.push(perm);
    }
    let ti = orbit.ti_perm_group();
    let ctx = crate::contextual::contextual_group(&orbit);
    let in_ti = gens.iter().all(|g| ti.contains(g));
    let in_ctx = gens.iter().all(|g| ctx.contains(g));
    let (parent_g, parent_h) = if in_ti {
        (ti, ctx)
    } else if in_ctx {
        (ctx, ti)
    } else {
        return Err(Error::parse(
            locus,
            "subgroup generators must lie entirely in the T/I side or the contextual side",
        ));
    };
    let g0 = close_generators(std::sync::Arc::clone(orbit.carrier()), &gens)
        .map_err(|e| Error::parse(locus, e.to_string()))?;
    let base = match &decl.base {
        Some(text) => {
            PcSegment::parse(text, modulus).map_err(|e| Error::parse(locus, e.to_string()))?
        }
        None => seed.clone(),
    };
    let system = build_sub_dual(parent_g, parent_h, g0, &base)
        .map_err(|e| Error::parse(locus, e.to_string()))?;
    let members: BTreeSet<PcSegment> = system.sub_carrier().into_iter().collect();
    Ok(ResolvedSystem::SubDual { orbit, members })
}

/// Result of checking one edge.
#[derive(Debug, Clone)]
pub struct EdgeCheck {
    pub index: usize,
    pub from: String,
    pub to: String,
    pub op: String,
    pub expected: PcSegment,
    pub computed: std::result::Result<PcSegment, String>,
    pub pass: bool,
}

/// Result of checking one declared commuting square.
#[derive(Debug, Clone)]
pub struct SquareCheck {
    pub index: usize,
    pub corners: [String; 4],
    pub via_second: std::result::Result<PcSegment, String>,
    pub via_third: std::result::Result<PcSegment, String>,
    pub pass: bool,
}

/// Whole-document verification outcome.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub edges: Vec<EdgeCheck>,
    pub squares: Vec<SquareCheck>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.edges.iter().all(|e| e.pass) && self.squares.iter().all(|s| s.pass)
    }
}

/// Evaluate every edge at its source node and compare with the target; then
/// evaluate both paths of every declared square.
pub fn verify_network(network: &ResolvedNetwork) -> VerificationReport {
    let mut edges = Vec::with_capacity(network.doc.edges.len());
    for (i, edge) in network.doc.edges.iter().enumerate() {
        let source = &network.node_segments[&edge.from];
        let expected = network.node_segments[&edge.to].clone();
        let system = &network.systems[&network.doc.nodes[&edge.from].system];
        let computed = network.edge_ops[i]
            .eval(system, source)
            .map_err(|e| e.to_string());
        let pass = computed.as_ref().map(|v| *v == expected).unwrap_or(false);
        edges.push(EdgeCheck {
            index: i,
            from: edge.from.clone(),
            to: edge.to.clone(),
            op: network.edge_ops[i].to_string(),
            expected,
            computed,
            pass,
        });
    }

    let mut squares = Vec::with_capacity(network.doc.squares.len());
    for (i, square) in network.doc.squares.iter().enumerate() {
        let [a, b, c, d] = &square.corners;
        let eval_path = |mid: &String| -> std::result::Result<PcSegment, String> {
            let first = network
                .find_edge(a, mid)
                .expect("square edges checked at resolution");
            let second = network
                .find_edge(mid, d)
                .expect("square edges checked at resolution");
            let sys1 = &network.systems[&network.doc.nodes[a].system];
            let v1 = network.edge_ops[first]
                .eval(sys1, &network.node_segments[a])
                .map_err(|e| e.to_string())?;
            let sys2 = &network.systems[&network.doc.nodes[mid].system];
            network.edge_ops[second]
                .eval(sys2, &v1)
                .map_err(|e| e.to_string())
        };
        let via_second = eval_path(b);
        let via_third = eval_path(c);
        let target = &network.node_segments[d];
        let pass = matches!((&via_second, &via_third), (Ok(x), Ok(y)) if x == y && x == target);
        squares.push(SquareCheck {
            index: i,
            corners: square.corners.clone(),
            via_second,
            via_third,
            pass,
        });
    }

    VerificationReport { edges, squares }
}

impl ResolvedNetwork {
    fn find_edge(&self, from: &str, to: &str) -> Option<usize> {
        self.doc
            .edges
            .iter()
            .position(|e| e.from == from && e.to == to)
    }
}

/// Styling knobs for DOT export.
#[derive(Debug, Clone)]
pub struct DotStyle {
    pub rankdir: String,
    pub include_notes: bool,
}

impl Default for DotStyle {
    fn default() -> Self {
        DotStyle {
            rankdir: "LR".into(),
            include_notes: true,
        }
    }
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT rendering: systems become clusters in declaration
/// order, nodes and edges follow document order, labels are the segment and
/// operation texts. Identical documents produce byte-identical output.
pub fn export_dot(network: &ResolvedNetwork, style: &DotStyle) -> String {
    let doc = &network.doc;
    let mut out = String::from("digraph {\n");
    if doc.systems.is_empty() && doc.nodes.is_empty() && doc.edges.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str(&format!("  rankdir={};\n", style.rankdir));
    out.push_str("  node [shape=box];\n");
    for (cluster_index, name) in doc.systems.keys().enumerate() {
        out.push_str(&format!("  subgraph cluster_{cluster_index} {{\n"));
        out.push_str(&format!("    label=\"{}\";\n", dot_escape(name)));
        for (id, node) in &doc.nodes {
            if &node.system == name {
                out.push_str(&format!(
                    "    \"{}\" [label=\"{}\"];\n",
                    dot_escape(id),
                    dot_escape(&node.segment)
                ));
            }
        }
        out.push_str("  }\n");
    }
    // Nodes whose system is undeclared cannot exist post-resolution, but
    // keep the renderer total over raw documents anyway.
    for (id, node) in &doc.nodes {
        if !doc.systems.contains_key(&node.system) {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}\"];\n",
                dot_escape(id),
                dot_escape(&node.segment)
            ));
        }
    }
    for (i, edge) in doc.edges.iter().enumerate() {
        let mut label = dot_escape(&network.edge_ops[i].to_string());
        if style.include_notes {
            if let Some(note) = &edge.note {
                label.push_str("\\n");
                label.push_str(&dot_escape(note));
            }
        }
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{label}\"];\n",
            dot_escape(&edge.from),
            dot_escape(&edge.to)
        ));
    }
    out.push_str("}\n");
    out
}

/// Serialize a document as pretty JSON (stable field and key order).
pub fn serialize_network(doc: &NetworkDoc) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serialization");
    text.push('\n');
    text
}
