//! File formats: graph documents, replay files, and run traces.
//!
//! Graphs travel in three formats, all loss-free for the structures this
//! crate produces:
//!
//! * **json**: the canonical [`GraphDocument`] schema;
//! * **edge_list**: plain text, `n <count>` then one `i j [weight]` line
//!   per edge, `#` comments;
//! * **dot_subset**: `digraph { a -> b [weight="3/2"]; }`, vertices indexed
//!   by first appearance, attribute `weight` only.
//!
//! Weights always render as exact rational strings (`5/6`), never decimals.

use serde::{Deserialize, Serialize};

use crate::balance::{BalanceOutcome, ChoiceSequence, RoundTrace};
use crate::cregular::{CRegularAction, CRegularSchedule, CRegularTrace, CRegularVerdict};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::weight::ExactWeight;

/// Serialization format for graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    DotSubset,
    EdgeList,
}

impl GraphFormat {
    pub fn from_name(name: &str) -> Option<GraphFormat> {
        match name {
            "json" => Some(GraphFormat::Json),
            "dot" | "dot_subset" => Some(GraphFormat::DotSubset),
            "edge_list" | "edgelist" => Some(GraphFormat::EdgeList),
            _ => None,
        }
    }
}

/// The JSON graph schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub version: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allows_self_loops: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<GraphMetadata>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    /// Exact rational string; absent means weight 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

impl GraphDocument {
    pub fn from_graph(g: &WeightedDigraph, metadata: Option<GraphMetadata>) -> GraphDocument {
        GraphDocument {
            version: "1".to_string(),
            n: g.order(),
            allows_self_loops: g.allows_self_loops(),
            metadata,
            edges: g
                .edges()
                .map(|(i, j, w)| EdgeRecord {
                    i,
                    j,
                    weight: if *w == ExactWeight::one() {
                        None
                    } else {
                        Some(w.to_string())
                    },
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<WeightedDigraph> {
        let mut g = if self.allows_self_loops {
            WeightedDigraph::new_with_self_loops(self.n)
        } else {
            WeightedDigraph::new(self.n)
        };
        for edge in &self.edges {
            if g.weight(edge.i, edge.j).is_some() {
                return Err(Error::DuplicateEdge {
                    from: edge.i,
                    to: edge.j,
                });
            }
            let weight = match &edge.weight {
                Some(text) => {
                    let w: ExactWeight = text.parse()?;
                    if !w.is_positive() {
                        return Err(Error::BadWeight { text: text.clone() });
                    }
                    w
                }
                None => ExactWeight::one(),
            };
            g.set_weight(edge.i, edge.j, weight)?;
        }
        Ok(g)
    }
}

/// Parses a graph in the given format.
pub fn parse_graph(text: &str, format: GraphFormat) -> Result<WeightedDigraph> {
    match format {
        GraphFormat::Json => {
            let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            doc.to_graph()
        }
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::DotSubset => parse_dot(text),
    }
}

/// Serializes a graph in the given format; `parse_graph` inverts it.
pub fn serialize_graph(g: &WeightedDigraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => {
            let doc = GraphDocument::from_graph(g, None);
            let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
            text.push('\n');
            text
        }
        GraphFormat::EdgeList => {
            let mut out = format!("n {}\n", g.order());
            for (i, j, w) in g.edges() {
                if *w == ExactWeight::one() {
                    out.push_str(&format!("{i} {j}\n"));
                } else {
                    out.push_str(&format!("{i} {j} {w}\n"));
                }
            }
            out
        }
        GraphFormat::DotSubset => {
            let mut out = String::from("digraph {\n");
            for v in 0..g.order() {
                out.push_str(&format!("  v{v};\n"));
            }
            for (i, j, w) in g.edges() {
                if *w == ExactWeight::one() {
                    out.push_str(&format!("  v{i} -> v{j};\n"));
                } else {
                    out.push_str(&format!("  v{i} -> v{j} [weight=\"{w}\"];\n"));
                }
            }
            out.push_str("}\n");
            out
        }
    }
}

fn parse_edge_list(text: &str) -> Result<WeightedDigraph> {
    let mut graph: Option<WeightedDigraph> = None;
    for (line_index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_error = |message: &str, column: usize| Error::Parse {
            line: line_index + 1,
            column,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match &mut graph {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(parse_error("expected header `n <count>`", 1));
                }
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_error("bad vertex count", 3))?;
                if n == 0 {
                    return Err(parse_error("vertex count must be positive", 3));
                }
                graph = Some(WeightedDigraph::new(n));
            }
            Some(g) => {
                if fields.len() < 2 || fields.len() > 3 {
                    return Err(parse_error("expected `i j [weight]`", 1));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_error("bad source index", 1))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_error("bad target index", 1))?;
                let w = match fields.get(2) {
                    Some(text) => {
                        let w: ExactWeight = text.parse()?;
                        if !w.is_positive() {
                            return Err(Error::BadWeight {
                                text: text.to_string(),
                            });
                        }
                        w
                    }
                    None => ExactWeight::one(),
                };
                if g.weight(i, j).is_some() {
                    return Err(Error::DuplicateEdge { from: i, to: j });
                }
                g.set_weight(i, j, w)?;
            }
        }
    }
    graph.ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty edge list".to_string(),
    })
}

/// Minimal DOT reader: `digraph [name] { stmt; ... }` where a statement is
/// `id;` (declares a vertex) or `id -> id [weight="r"];`. Identifiers are
/// `[A-Za-z0-9_.]+`; vertices are indexed by first appearance.
fn parse_dot(text: &str) -> Result<WeightedDigraph> {
    let mut scanner = DotScanner::new(text);
    scanner.expect_ident("digraph")?;
    // optional graph name
    if let Token::Ident(_) = scanner.peek()? {
        scanner.next()?;
    }
    scanner.expect(Token::OpenBrace)?;

    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, ExactWeight)> = Vec::new();
    let intern = |names: &mut Vec<String>, name: &str| -> usize {
        if let Some(pos) = names.iter().position(|x| x == name) {
            pos
        } else {
            names.push(name.to_string());
            names.len() - 1
        }
    };

    loop {
        match scanner.next()? {
            Token::CloseBrace => break,
            Token::Ident(name) => {
                let from = intern(&mut names, &name);
                match scanner.next()? {
                    Token::Semicolon => continue,
                    Token::Arrow => {
                        let Token::Ident(to_name) = scanner.next()? else {
                            return Err(scanner.error("expected a vertex name after `->`"));
                        };
                        let to = intern(&mut names, &to_name);
                        let mut weight = ExactWeight::one();
                        if scanner.peek()? == Token::OpenBracket {
                            scanner.next()?;
                            scanner.expect_ident("weight")?;
                            scanner.expect(Token::Equals)?;
                            let Token::Quoted(value) = scanner.next()? else {
                                return Err(scanner.error("expected a quoted weight"));
                            };
                            weight = value.parse()?;
                            if !weight.is_positive() {
                                return Err(Error::BadWeight { text: value });
                            }
                            scanner.expect(Token::CloseBracket)?;
                        }
                        scanner.expect(Token::Semicolon)?;
                        edges.push((from, to, weight));
                    }
                    _ => return Err(scanner.error("expected `;` or `->`")),
                }
            }
            _ => return Err(scanner.error("expected a vertex name or `}`")),
        }
    }

    if names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "digraph declares no vertices".to_string(),
        });
    }
    let allows_self_loops = edges.iter().any(|&(i, j, _)| i == j);
    let mut g = if allows_self_loops {
        WeightedDigraph::new_with_self_loops(names.len())
    } else {
        WeightedDigraph::new(names.len())
    };
    for (i, j, w) in edges {
        if g.weight(i, j).is_some() {
            return Err(Error::DuplicateEdge { from: i, to: j });
        }
        g.set_weight(i, j, w)?;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Quoted(String),
    Arrow,
    OpenBrace,
    CloseBrace,
    OpenBracket,
    CloseBracket,
    Equals,
    Semicolon,
    End,
}

struct DotScanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    lookahead: Option<Token>,
}

impl<'a> DotScanner<'a> {
    fn new(text: &'a str) -> Self {
        DotScanner {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
            lookahead: None,
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.to_string(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Result<Token> {
        if self.lookahead.is_none() {
            self.lookahead = Some(self.scan()?);
        }
        Ok(self.lookahead.clone().unwrap())
    }

    fn next(&mut self) -> Result<Token> {
        if let Some(token) = self.lookahead.take() {
            return Ok(token);
        }
        self.scan()
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        let found = self.next()?;
        if found == token {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}, found {found:?}")))
        }
    }

    fn expect_ident(&mut self, ident: &str) -> Result<()> {
        match self.next()? {
            Token::Ident(name) if name == ident => Ok(()),
            other => Err(self.error(&format!("expected `{ident}`, found {other:?}"))),
        }
    }

    fn scan(&mut self) -> Result<Token> {
        loop {
            match self.chars.peek() {
                None => return Ok(Token::End),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    // // line comment
                    self.bump();
                    if self.chars.peek() != Some(&'/') {
                        return Err(self.error("stray `/`"));
                    }
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let c = self.bump().expect("peeked");
        match c {
            '{' => Ok(Token::OpenBrace),
            '}' => Ok(Token::CloseBrace),
            '[' => Ok(Token::OpenBracket),
            ']' => Ok(Token::CloseBracket),
            '=' => Ok(Token::Equals),
            ';' => Ok(Token::Semicolon),
            '-' => {
                if self.chars.peek() == Some(&'>') {
                    self.bump();
                    Ok(Token::Arrow)
                } else {
                    Err(self.error("expected `->`"))
                }
            }
            '"' => {
                let mut value = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some(c) => value.push(c),
                        None => return Err(self.error("unterminated string")),
                    }
                }
                Ok(Token::Quoted(value))
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let mut name = String::from(c);
                while let Some(&next) = self.chars.peek() {
                    if next.is_ascii_alphanumeric() || next == '_' || next == '.' {
                        name.push(next);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(Token::Ident(name))
            }
            other => Err(self.error(&format!("unexpected character {other:?}"))),
        }
    }
}

/// Parses a balancing replay file (JSON [`ChoiceSequence`]).
pub fn parse_choice_sequence(text: &str) -> Result<ChoiceSequence> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a C-regular replay schedule (JSON [`CRegularSchedule`]).
pub fn parse_cregular_schedule(text: &str) -> Result<CRegularSchedule> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// One serialized round/iteration record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecordDocument {
    pub round: usize,
    /// Lyapunov value for balancing runs, total positive load for C-regular
    /// runs; exact rational string.
    pub summary: String,
    /// `from->to:old->new` per modified edge.
    pub modified_edges: Vec<String>,
    /// Per-vertex state: imbalances, or `Ls,Lt,Hs,Ht` quadruples.
    pub vertex_state: Vec<String>,
}

/// Serialized run trace; field order is the canonical output order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub version: String,
    pub algorithm: String,
    pub policy: String,
    pub verdict: String,
    pub total_rounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub announcer: Option<usize>,
    pub records: Vec<TraceRecordDocument>,
}

impl TraceDocument {
    pub fn from_balance_trace(trace: &RoundTrace) -> TraceDocument {
        let algorithm = match trace.algorithm {
            crate::balance::BalanceAlgorithm::MinWeight => "wbda",
            crate::balance::BalanceAlgorithm::MinImbalance => "wbmda",
        };
        let verdict = match trace.outcome {
            BalanceOutcome::Converged { .. } => "converged",
            BalanceOutcome::MaxRoundsExceeded { .. } => "max_rounds_exceeded",
        };
        TraceDocument {
            version: "1".to_string(),
            algorithm: algorithm.to_string(),
            policy: trace.policy.clone(),
            verdict: verdict.to_string(),
            total_rounds: trace.rounds(),
            c: None,
            announcer: None,
            records: trace
                .records
                .iter()
                .map(|r| TraceRecordDocument {
                    round: r.round,
                    summary: r.lyapunov.to_string(),
                    modified_edges: r
                        .updates
                        .iter()
                        .map(|u| format!("{}->{}:{}->{}", u.from, u.to, u.old, u.new))
                        .collect(),
                    vertex_state: r.imbalances.iter().map(|w| w.to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_cregular_trace(
        verdict: &CRegularVerdict,
        trace: &CRegularTrace,
        policy: &str,
    ) -> TraceDocument {
        let (verdict_name, announcer) = match verdict {
            CRegularVerdict::CRegular { .. } => ("c_regular", None),
            CRegularVerdict::NotCRegular { announcer } => ("not_c_regular", *announcer),
        };
        TraceDocument {
            version: "1".to_string(),
            algorithm: "cregular".to_string(),
            policy: policy.to_string(),
            verdict: verdict_name.to_string(),
            total_rounds: trace.iterations(),
            c: Some(trace.c),
            announcer,
            records: trace
                .records
                .iter()
                .map(|r| TraceRecordDocument {
                    round: r.iteration,
                    summary: r.positive_load.to_string(),
                    modified_edges: r.actions.iter().map(describe_action).collect(),
                    vertex_state: r
                        .agents
                        .iter()
                        .map(|a| {
                            format!(
                                "{},{},{},{}",
                                a.source_load, a.target_load, a.source_height, a.target_height
                            )
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("trace serializes");
        text.push('\n');
        text
    }

    /// One row per record: `round,<summary>,<edges joined by ;>`.
    pub fn to_csv(&self) -> String {
        let summary_column = if self.algorithm == "cregular" {
            "positive_load"
        } else {
            "v_wb"
        };
        let mut out = format!("round,{summary_column},modified_edges\n");
        for record in &self.records {
            out.push_str(&format!(
                "{},{},{}\n",
                record.round,
                record.summary,
                record.modified_edges.join(";")
            ));
        }
        out
    }
}

fn describe_action(action: &CRegularAction) -> String {
    match action {
        CRegularAction::PushForward { vertex, to, amount } => {
            format!("forward:{vertex}->{to}:{amount}")
        }
        CRegularAction::PushBackward {
            vertex,
            from,
            amount,
        } => format!("backward:{from}->{vertex}:{amount}"),
        CRegularAction::RaiseTargetHeight { vertex, new_height } => {
            format!("raise_target:{vertex}:{new_height}")
        }
        CRegularAction::RaiseSourceHeight { vertex, new_height } => {
            format!("raise_source:{vertex}:{new_height}")
        }
        CRegularAction::Declare { vertex } => format!("declare:{vertex}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{run_wbda, BalancePolicy};
    use crate::fixtures;

    #[test]
    fn json_round_trip() {
        let g = fixtures::fig2a();
        let text = serialize_graph(&g, GraphFormat::Json);
        let back = parse_graph(&text, GraphFormat::Json).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_round_trip_and_isolated_vertex() {
        let g = fixtures::fig1();
        let text = serialize_graph(&g, GraphFormat::EdgeList);
        assert_eq!(parse_graph(&text, GraphFormat::EdgeList).unwrap(), g);

        let lonely = parse_graph("n 1\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(lonely.order(), 1);
        assert_eq!(lonely.edge_count(), 0);
    }

    #[test]
    fn dot_round_trip_and_two_cycle() {
        let g = parse_graph("digraph { a->b; b->a; }", GraphFormat::DotSubset).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.edge_count(), 2);

        let fig = fixtures::fig2b();
        let text = serialize_graph(&fig, GraphFormat::DotSubset);
        assert_eq!(parse_graph(&text, GraphFormat::DotSubset).unwrap(), fig);
    }

    #[test]
    fn dot_weights_parse_exactly() {
        let g = parse_graph(
            "digraph { a -> b [weight=\"3/2\"]; b -> a; }",
            GraphFormat::DotSubset,
        )
        .unwrap();
        assert_eq!(*g.weight(0, 1).unwrap(), ExactWeight::new(3, 2));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_graph("digraph { a -> ; }", GraphFormat::DotSubset).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        let err = parse_graph("n 2\n0 0 0\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, Error::BadWeight { .. }));

        let err = parse_graph("n 2\n0 1\n0 1\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { from: 0, to: 1 }));
    }

    #[test]
    fn balance_trace_csv_has_the_lyapunov_column() {
        let trace = run_wbda(&fixtures::fig2a(), &BalancePolicy::LowestIndex, None).unwrap();
        let doc = TraceDocument::from_balance_trace(&trace);
        let csv = doc.to_csv();
        let column: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(column, vec!["6", "4", "4", "4", "4", "4", "0"]);
    }

    #[test]
    fn already_balanced_trace_is_a_single_row() {
        let balanced =
            WeightedDigraph::from_matrix(&fixtures::fig2b_balanced_matrix(), false).unwrap();
        let trace = run_wbda(&balanced, &BalancePolicy::LowestIndex, None).unwrap();
        let doc = TraceDocument::from_balance_trace(&trace);
        let csv = doc.to_csv();
        assert_eq!(csv.lines().count(), 2); // header + round 0
        assert!(csv.lines().nth(1).unwrap().starts_with("0,0,"));
    }
}
