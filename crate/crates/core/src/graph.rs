//! Erdős–Rényi Max-Cut instances.
//!
//! Instances are drawn from `G(n, p)`: every candidate edge `(i, j)` with
//! `i < j` is visited in lexicographic order and kept independently with
//! probability `p`. The random stream is ChaCha8 (`rand_chacha` 0.3) seeded
//! through `SeedableRng::seed_from_u64` on stream 0. For each candidate one
//! `u64` is drawn and the edge is kept iff `draw < p * 2^64`, evaluated in
//! exact integer arithmetic on the rational `p`. An instance is therefore a
//! pure function of `(n, p, seed)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};

/// A cut is a side assignment per vertex (`false` = side 0, `true` = side 1).
pub type Cut = Assignment;

/// An edge probability stored as a reduced fraction `num / den`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EdgeProbability {
    num: u64,
    den: u64,
}

impl EdgeProbability {
    pub const HALF: EdgeProbability = EdgeProbability { num: 1, den: 2 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::input("edge probability denominator is zero"));
        }
        if num > den {
            return Err(Error::input(format!(
                "edge probability {num}/{den} lies outside [0, 1]"
            )));
        }
        let g = gcd(num, den);
        Ok(EdgeProbability {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Keep-test for one uniform 64-bit draw: `draw / 2^64 < num / den`.
    fn accepts(&self, draw: u64) -> bool {
        (draw as u128) * (self.den as u128) < (self.num as u128) << 64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for EdgeProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for EdgeProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `a/b`, a plain integer (`0`, `1`) or a decimal such as `0.5`.
impl FromStr for EdgeProbability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("cannot parse edge probability {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return EdgeProbability::new(num, den);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let frac_num: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_num))
            .ok_or_else(bad)?;
        EdgeProbability::new(num, den)
    }
}

impl TryFrom<String> for EdgeProbability {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EdgeProbability> for String {
    fn from(p: EdgeProbability) -> String {
        p.to_string()
    }
}

/// An undirected simple graph on vertices `0..n`.
///
/// Edges are kept sorted lexicographically with `i < j` and no duplicates.
/// `seed` and `edge_probability` are present for generated instances and
/// for files carrying the metadata line.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphInstance {
    n: usize,
    edges: Vec<(u32, u32)>,
    seed: Option<u64>,
    edge_probability: Option<EdgeProbability>,
}

impl fmt::Debug for GraphInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphInstance")
            .field("n", &self.n)
            .field("m", &self.edges.len())
            .field("seed", &self.seed)
            .field("edge_probability", &self.edge_probability)
            .finish()
    }
}

impl GraphInstance {
    /// Builds a graph from an arbitrary edge list. Pairs are normalized to
    /// `i < j`; self-loops, duplicates and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        check_vertex_count(n)?;
        let mut list = Vec::new();
        for (a, b) in edges {
            list.push(normalize_edge(n, a, b)?);
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(GraphInstance {
            n,
            edges: list,
            seed: None,
            edge_probability: None,
        })
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        check_vertex_count(n)?;
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i as u32, j as u32)))
            .collect();
        Ok(GraphInstance {
            n,
            edges,
            seed: None,
            edge_probability: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(i, j)| (i as usize, j as usize))
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn edge_probability(&self) -> Option<EdgeProbability> {
        self.edge_probability
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&(i as u32, j as u32)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        deg
    }

    /// Attaches generation metadata, e.g. to a hand-built instance.
    pub fn with_metadata(mut self, seed: u64, p: EdgeProbability) -> Self {
        self.seed = Some(seed);
        self.edge_probability = Some(p);
        self
    }

    /// Writes the canonical text form: `n m`, then one `i j` line per
    /// edge in lexicographic order, then the `# seed=.. p=..` metadata
    /// line when the instance carries metadata.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n, self.edges.len())?;
        for &(i, j) in &self.edges {
            writeln!(out, "{i} {j}")?;
        }
        if let (Some(seed), Some(p)) = (self.seed, self.edge_probability) {
            writeln!(out, "# seed={seed} p={p}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::with_capacity(16 + self.edges.len() * 10);
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("graph text is ASCII")
    }

    /// Parses the canonical text form. Comment lines other than the
    /// metadata line and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        let mut seed = None;
        let mut probability = None;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((s, p)) = parse_metadata(comment, line_no)? {
                    seed = Some(s);
                    probability = Some(p);
                }
                continue;
            }
            let (a, b) = parse_pair(line, line_no)?;
            match header {
                None => {
                    check_vertex_count(a).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    header = Some((a, b));
                    edges.reserve(b.min(1 << 24));
                }
                Some((n, _)) => {
                    if a == b {
                        return Err(Error::parse(line_no, format!("self-loop on vertex {a}")));
                    }
                    let e = normalize_edge(n, a, b)
                        .map_err(|e| Error::parse(line_no, e.to_string()))?;
                    edges.push((e, line_no));
                }
            }
        }

        let (n, m) = header.ok_or_else(|| Error::parse(last_line.max(1), "missing header line"))?;
        if edges.len() != m {
            return Err(Error::parse(
                last_line.max(1),
                format!("header announces {m} edges, found {}", edges.len()),
            ));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0].0 == w[1].0) {
            let (i, j) = w[1].0;
            return Err(Error::parse(w[1].1, format!("duplicate edge ({i}, {j})")));
        }
        Ok(GraphInstance {
            n,
            edges: edges.into_iter().map(|(e, _)| e).collect(),
            seed,
            edge_probability: probability,
        })
    }
}

impl FromStr for GraphInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphInstance::parse(s)
    }
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("vertex count must be at least 1"));
    }
    if n > u32::MAX as usize {
        return Err(Error::input(format!("vertex count {n} exceeds u32 range")));
    }
    Ok(())
}

fn normalize_edge(n: usize, a: usize, b: usize) -> Result<(u32, u32)> {
    if a == b {
        return Err(Error::input(format!("self-loop on vertex {a}")));
    }
    if a >= n || b >= n {
        return Err(Error::input(format!(
            "edge ({a}, {b}) has an endpoint outside [0, {n})"
        )));
    }
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    Ok((i as u32, j as u32))
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut fields = line.split_ascii_whitespace();
    let mut next = || -> Result<usize> {
        let field = fields
            .next()
            .ok_or_else(|| Error::parse(line_no, "expected two integers"))?;
        field
            .parse()
            .map_err(|_| Error::parse(line_no, format!("not a non-negative integer: {field:?}")))
    };
    let a = next()?;
    let b = next()?;
    if fields.next().is_some() {
        return Err(Error::parse(line_no, "expected exactly two integers"));
    }
    Ok((a, b))
}

fn parse_metadata(comment: &str, line_no: usize) -> Result<Option<(u64, EdgeProbability)>> {
    let comment = comment.trim();
    if !comment.starts_with("seed=") {
        return Ok(None);
    }
    let mut seed = None;
    let mut p = None;
    for field in comment.split_ascii_whitespace() {
        if let Some(v) = field.strip_prefix("seed=") {
            seed = Some(
                v.parse::<u64>()
                    .map_err(|_| Error::parse(line_no, format!("bad seed {v:?}")))?,
            );
        } else if let Some(v) = field.strip_prefix("p=") {
            p = Some(
                v.parse::<EdgeProbability>()
                    .map_err(|e| Error::parse(line_no, e.to_string()))?,
            );
        }
    }
    match (seed, p) {
        (Some(s), Some(p)) => Ok(Some((s, p))),
        _ => Err(Error::parse(line_no, "metadata line needs both seed= and p=")),
    }
}

/// Samples `G(n, p)` reproducibly from `seed`.
pub fn generate_er_graph(n: usize, p: EdgeProbability, seed: u64) -> Result<GraphInstance> {
    check_vertex_count(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = (n as f64) * (n as f64 - 1.0) / 2.0 * p.as_f64();
    let mut edges = Vec::with_capacity((expected * 1.01) as usize + 16);
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if p.accepts(rng.next_u64()) {
                edges.push((i, j));
            }
        }
    }
    Ok(GraphInstance {
        n,
        edges,
        seed: Some(seed),
        edge_probability: Some(p),
    })
}

/// Number of edges whose endpoints lie on different sides of `cut`.
pub fn cut_cost(graph: &GraphInstance, cut: &Cut) -> Result<u64> {
    if cut.len() != graph.n {
        return Err(Error::input(format!(
            "cut has length {}, graph has {} vertices",
            cut.len(),
            graph.n
        )));
    }
    let bits = cut.bits();
    Ok(graph
        .edges
        .iter()
        .filter(|&&(i, j)| bits[i as usize] != bits[j as usize])
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> GraphInstance {
        GraphInstance::complete(3).unwrap()
    }

    #[test]
    fn p_one_gives_complete_graph() {
        let g = generate_er_graph(5, EdgeProbability::new(1, 1).unwrap(), 99).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g, GraphInstance::complete(5).unwrap().with_metadata(99, "1".parse().unwrap()));
    }

    #[test]
    fn p_zero_gives_empty_graph() {
        let g = generate_er_graph(5, "0".parse().unwrap(), 12345).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn edge_count_of_large_instance_is_in_binomial_band() {
        let g = generate_er_graph(1000, EdgeProbability::HALF, 7).unwrap();
        let candidates = 1000.0 * 999.0 / 2.0;
        let mean = candidates / 2.0;
        let sd = (candidates * 0.25f64).sqrt();
        let m = g.edge_count() as f64;
        assert!((m - mean).abs() <= 4.0 * sd, "m = {m}, mean = {mean}, sd = {sd}");
    }

    #[test]
    fn mean_edge_count_over_many_instances() {
        let n = 50usize;
        let candidates = (n * (n - 1) / 2) as f64;
        let counts: Vec<f64> = (0..100)
            .map(|s| generate_er_graph(n, EdgeProbability::HALF, s).unwrap().edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        let se = (candidates * 0.25).sqrt() / (counts.len() as f64).sqrt();
        assert!((mean - candidates / 2.0).abs() < 5.0 * se);
    }

    #[test]
    fn generation_rejects_bad_input() {
        assert!(generate_er_graph(0, EdgeProbability::HALF, 1).is_err());
        assert!(EdgeProbability::new(3, 2).is_err());
        assert!("1.5".parse::<EdgeProbability>().is_err());
        assert!("-0.5".parse::<EdgeProbability>().is_err());
        assert!("1/0".parse::<EdgeProbability>().is_err());
    }

    #[test]
    fn probability_parsing() {
        assert_eq!("0.5".parse::<EdgeProbability>().unwrap(), EdgeProbability::HALF);
        assert_eq!("2/4".parse::<EdgeProbability>().unwrap(), EdgeProbability::HALF);
        assert_eq!("1".parse::<EdgeProbability>().unwrap().to_string(), "1/1");
        assert_eq!("0".parse::<EdgeProbability>().unwrap().to_string(), "0/1");
        assert_eq!(".25".parse::<EdgeProbability>().unwrap().to_string(), "1/4");
    }

    #[test]
    fn cut_cost_examples() {
        let t = triangle();
        let c = Cut::from_bits(vec![true, false, false]);
        assert_eq!(cut_cost(&t, &c).unwrap(), 2);
        assert_eq!(cut_cost(&t, &Cut::zeros(3)).unwrap(), 0);
        let k4 = GraphInstance::complete(4).unwrap();
        let c = Cut::from_bits(vec![false, false, true, true]);
        assert_eq!(cut_cost(&k4, &c).unwrap(), 4);
        assert!(cut_cost(&k4, &Cut::zeros(3)).is_err());
    }

    #[test]
    fn triangle_text_form() {
        let text = triangle().to_text();
        assert_eq!(text, "3 3\n0 1\n0 2\n1 2\n");
        assert_eq!(GraphInstance::parse(&text).unwrap(), triangle());
    }

    #[test]
    fn empty_graph_text_form() {
        let g = GraphInstance::from_edges(4, []).unwrap();
        assert_eq!(g.to_text(), "4 0\n");
        assert_eq!(GraphInstance::parse("4 0\n").unwrap(), g);
    }

    #[test]
    fn metadata_line_round_trips() {
        let g = generate_er_graph(6, EdgeProbability::HALF, 42).unwrap();
        let text = g.to_text();
        assert!(text.ends_with("# seed=42 p=1/2\n"));
        let back = GraphInstance::parse(&text).unwrap();
        assert_eq!(back.seed(), Some(42));
        assert_eq!(back, g);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match GraphInstance::parse("3 1\n2 2\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("self-loop"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            GraphInstance::parse("3 2\n0 1\n1 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            GraphInstance::parse("3 1\n0 7\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            GraphInstance::parse("3 2\n0 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            GraphInstance::parse("3 1\n0 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(GraphInstance::parse("").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(n in 1usize..40, num in 0u64..=8, seed in any::<u64>()) {
            let g = generate_er_graph(n, EdgeProbability::new(num, 8).unwrap(), seed).unwrap();
            prop_assert_eq!(GraphInstance::parse(&g.to_text()).unwrap(), g.clone());
            prop_assert_eq!(generate_er_graph(n, EdgeProbability::new(num, 8).unwrap(), seed).unwrap(), g);
        }

        #[test]
        fn edges_are_simple_and_in_range(n in 1usize..60, seed in any::<u64>()) {
            let g = generate_er_graph(n, EdgeProbability::HALF, seed).unwrap();
            let edges: Vec<_> = g.edges().collect();
            for w in edges.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for (i, j) in edges {
                prop_assert!(i < j && j < n);
            }
        }

        #[test]
        fn cut_cost_ignores_global_flip(n in 1usize..30, seed in any::<u64>(), code in any::<u64>()) {
            let g = generate_er_graph(n, EdgeProbability::HALF, seed).unwrap();
            let c = Cut::from_index(n, code);
            prop_assert_eq!(cut_cost(&g, &c).unwrap(), cut_cost(&g, &c.complement()).unwrap());
        }
    }
}
