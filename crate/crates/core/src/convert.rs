//! Conversion between grid diagrams and external knot descriptions: braid
//! words and planar diagram (PD) codes.
//!
//! PD convention: each crossing lists its four edge labels counterclockwise
//! starting from the incoming under-strand, so slots 0 and 2 are the under
//! strand and slots 1 and 3 the over strand. The plane is oriented with `x`
//! to the right and `y` up, which is also the grid's column/row orientation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::GridDiagram;
use crate::moves::{self, GridMove};
use crate::transcript;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConvertError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("braid letter {letter} does not fit {strands} strands")]
    Letter { letter: i64, strands: usize },
    #[error("edge {label} appears {count} times, expected 2")]
    EdgeCount { label: u32, count: usize },
    #[error("edge {label} is inconsistently oriented")]
    Orientation { label: u32 },
    #[error("the code is not planar: {faces} faces for {crossings} crossings in {parts} parts")]
    NonPlanar { faces: usize, crossings: usize, parts: usize },
    #[error("router could not place the remaining {left} crossings")]
    Stuck { left: usize },
}

/// A braid word on `strands` strands. Letter `i` is the generator twisting
/// strands `i - 1` and `i` (0-based positions); negative letters are inverses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<i64>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i64>) -> Result<BraidWord, ConvertError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands.max(1) {
                return Err(ConvertError::Letter { letter: l, strands });
            }
        }
        if strands == 0 {
            return Err(ConvertError::Letter { letter: 0, strands });
        }
        Ok(BraidWord { strands, letters })
    }

    /// Braid file: `strands=<k>` then whitespace-separated signed letters.
    pub fn parse(text: &str) -> Result<BraidWord, ConvertError> {
        let mut strands = None;
        let mut letters = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if strands.is_none() {
                let v = line.strip_prefix("strands=").ok_or_else(|| ConvertError::Parse {
                    line: i + 1,
                    msg: "expected `strands=<k>`".into(),
                })?;
                strands = Some(v.trim().parse::<usize>().map_err(|_| ConvertError::Parse {
                    line: i + 1,
                    msg: format!("bad strand count `{v}`"),
                })?);
                continue;
            }
            for tok in line.split_whitespace() {
                letters.push(tok.parse::<i64>().map_err(|_| ConvertError::Parse {
                    line: i + 1,
                    msg: format!("bad letter `{tok}`"),
                })?);
            }
        }
        let strands = strands.ok_or(ConvertError::Parse { line: 0, msg: "empty braid file".into() })?;
        BraidWord::new(strands, letters)
    }

    pub fn serialize(&self) -> String {
        let letters: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        format!("strands={}\n{}\n", self.strands, letters.join(" "))
    }
}

/// A planar diagram code. Crossing-free components are counted separately.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDCode {
    pub crossings: Vec<[u32; 4]>,
    #[serde(default)]
    pub free_loops: usize,
}

impl fmt::Display for PDCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.crossings {
            writeln!(f, "X {} {} {} {}", x[0], x[1], x[2], x[3])?;
        }
        if self.free_loops > 0 {
            writeln!(f, "loops {}", self.free_loops)?;
        }
        Ok(())
    }
}

impl PDCode {
    /// PD file: one crossing per line, `X a b c d`; an optional line
    /// `loops <k>` adds crossing-free unknotted components.
    pub fn parse(text: &str) -> Result<PDCode, ConvertError> {
        let mut pd = PDCode::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| ConvertError::Parse { line: i + 1, msg };
            let mut toks = line.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']');
            let head = toks.next().unwrap_or("");
            let nums: Vec<&str> = toks.filter(|t| !t.is_empty()).collect();
            match head {
                "X" => {
                    if nums.len() != 4 {
                        return Err(err(format!("crossing needs 4 labels, got {}", nums.len())));
                    }
                    let mut x = [0u32; 4];
                    for (k, t) in nums.iter().enumerate() {
                        x[k] = t.parse().map_err(|_| err(format!("bad label `{t}`")))?;
                    }
                    pd.crossings.push(x);
                }
                "loops" => {
                    let [t] = nums[..] else { return Err(err("`loops` takes one count".into())) };
                    pd.free_loops = t.parse().map_err(|_| err(format!("bad count `{t}`")))?;
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }
        Ok(pd)
    }

    /// The two `(crossing, slot)` ends of every edge label.
    fn ends(&self) -> Result<BTreeMap<u32, Vec<(usize, usize)>>, ConvertError> {
        let mut ends: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, x) in self.crossings.iter().enumerate() {
            for (s, &l) in x.iter().enumerate() {
                ends.entry(l).or_default().push((i, s));
            }
        }
        for (&label, v) in &ends {
            if v.len() != 2 {
                return Err(ConvertError::EdgeCount { label, count: v.len() });
            }
        }
        Ok(ends)
    }

    /// Checks that every label appears twice, that the under strands are
    /// consistently oriented, and that the rotation system is planar.
    pub fn validate(&self) -> Result<(), ConvertError> {
        let ends = self.ends()?;
        // Slot 0 is an incoming end and slot 2 an outgoing one; an edge may
        // not be incoming (or outgoing) at both of its ends.
        for (&label, v) in &ends {
            let (a, b) = (v[0].1, v[1].1);
            if (a == 0 && b == 0) || (a == 2 && b == 2) {
                return Err(ConvertError::Orientation { label });
            }
        }
        self.over_directions()?;
        let c = self.crossings.len();
        let partner = |x: usize, s: usize| -> (usize, usize) {
            let v = &ends[&self.crossings[x][s]];
            if v[0] == (x, s) {
                v[1]
            } else {
                v[0]
            }
        };
        let mut seen = vec![false; 4 * c];
        let mut faces = 0;
        for start in 0..4 * c {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                let (y, j) = partner(d / 4, d % 4);
                d = 4 * y + (j + 1) % 4;
            }
        }
        let mut uf = UnionFind::new(c);
        for v in ends.values() {
            uf.union(v[0].0, v[1].0);
        }
        let parts = (0..c).filter(|&i| uf.find(i) == i).count();
        if faces != c + 2 * parts {
            return Err(ConvertError::NonPlanar { faces, crossings: c, parts });
        }
        Ok(())
    }

    /// For every crossing, whether the over strand runs from slot 1 to slot 3.
    /// Components that never pass under are oriented arbitrarily.
    pub fn over_directions(&self) -> Result<Vec<bool>, ConvertError> {
        let ends = self.ends()?;
        let c = self.crossings.len();
        let mut dir: Vec<Option<bool>> = vec![None; c];
        let other = |x: usize, s: usize| -> (usize, usize) {
            let v = &ends[&self.crossings[x][s]];
            if v[0] == (x, s) {
                v[1]
            } else {
                v[0]
            }
        };
        // Walk a strand starting by leaving crossing `x` through slot `s`.
        let walk = |x0: usize, s0: usize, dir: &mut Vec<Option<bool>>| -> Result<(), ConvertError> {
            let (mut x, mut s) = (x0, s0);
            loop {
                let (y, j) = other(x, s);
                let label = self.crossings[y][j];
                match j {
                    0 => {}
                    2 => return Err(ConvertError::Orientation { label }),
                    _ => {
                        let d = j == 1;
                        match dir[y] {
                            Some(prev) if prev != d => return Err(ConvertError::Orientation { label }),
                            Some(_) => {}
                            None => dir[y] = Some(d),
                        }
                    }
                }
                x = y;
                s = (j + 2) % 4;
                if (x, s) == (x0, s0) {
                    return Ok(());
                }
            }
        };
        for x in 0..c {
            walk(x, 2, &mut dir)?;
        }
        for x in 0..c {
            if dir[x].is_none() {
                dir[x] = Some(true);
                walk(x, 3, &mut dir)?;
            }
        }
        Ok(dir.into_iter().map(|d| d.unwrap_or(true)).collect())
    }

    /// Number of link components, counting free loops.
    pub fn component_count(&self) -> Result<usize, ConvertError> {
        let ends = self.ends()?;
        let c = self.crossings.len();
        let mut uf = UnionFind::new(4 * c);
        for v in ends.values() {
            uf.union(4 * v[0].0 + v[0].1, 4 * v[1].0 + v[1].1);
        }
        for x in 0..c {
            uf.union(4 * x, 4 * x + 2);
            uf.union(4 * x + 1, 4 * x + 3);
        }
        let strands = (0..4 * c).filter(|&d| uf.find(d) == d).count();
        Ok(strands + self.free_loops)
    }

    /// Relabels edges `1..` in order of first appearance.
    pub fn normalized(&self) -> PDCode {
        let mut map = HashMap::new();
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                x.map(|l| {
                    let next = map.len() as u32 + 1;
                    *map.entry(l).or_insert(next)
                })
            })
            .collect();
        PDCode { crossings, free_loops: self.free_loops }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// PD code of a braid closure, strands oriented upward.
pub fn braid_to_pd(b: &BraidWord) -> PDCode {
    let k = b.strands;
    let mut pos: Vec<u32> = (1..=k as u32).collect();
    let mut next = k as u32 + 1;
    let mut crossings = Vec::new();
    let mut touched = vec![false; k];
    for &l in &b.letters {
        let p = l.unsigned_abs() as usize - 1;
        let q = p + 1;
        touched[p] = true;
        touched[q] = true;
        let (lb, rb) = (pos[p], pos[q]);
        let (rt, lt) = (next, next + 1);
        next += 2;
        if l > 0 {
            // Left strand over: the under strand enters bottom right.
            crossings.push([rb, rt, lt, lb]);
        } else {
            crossings.push([lb, rb, rt, lt]);
        }
        pos[p] = lt;
        pos[q] = rt;
    }
    let close: HashMap<u32, u32> = pos.iter().enumerate().map(|(i, &l)| (l, i as u32 + 1)).collect();
    let crossings: Vec<[u32; 4]> = crossings.into_iter().map(|x: [u32; 4]| x.map(|l| *close.get(&l).unwrap_or(&l))).collect();
    let free_loops = touched.iter().filter(|t| !**t).count();
    PDCode { crossings, free_loops }.normalized()
}

/// PD code of a grid, oriented so vertical arcs run from X to O and
/// horizontal arcs from O to X. Edges are numbered along each component.
pub fn grid_to_pd(g: &GridDiagram) -> PDCode {
    let n = g.n();
    let x_col = g.x_col();
    let spans = g.row_spans();
    let is_crossing = |c: usize, r: usize| {
        let (lo, hi) = g.col_span(c);
        lo < r && r < hi && spans[r].0 < c && c < spans[r].1
    };
    // Crossing passages in traversal order: (col, row, over, forward), where
    // forward means upward for the over strand and rightward for the under.
    let mut comps: Vec<Vec<(usize, usize, bool, bool)>> = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut passes = Vec::new();
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            let (r0, r1) = (g.x_row()[c], g.o_row()[c]);
            let up = r1 > r0;
            let rows: Vec<usize> = if up { (r0 + 1..r1).collect() } else { (r1 + 1..r0).rev().collect() };
            passes.extend(rows.into_iter().filter(|&r| is_crossing(c, r)).map(|r| (c, r, true, up)));
            let c2 = x_col[r1];
            let right = c2 > c;
            let cols: Vec<usize> = if right { (c + 1..c2).collect() } else { (c2 + 1..c).rev().collect() };
            passes.extend(cols.into_iter().filter(|&cc| is_crossing(cc, r1)).map(|cc| (cc, r1, false, right)));
            c = c2;
        }
        comps.push(passes);
    }
    let under_right: HashMap<(usize, usize), bool> = comps
        .iter()
        .flatten()
        .filter(|p| !p.2)
        .map(|&(c, r, _, right)| ((c, r), right))
        .collect();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut slots: Vec<[u32; 4]> = Vec::new();
    let mut free_loops = 0;
    let mut label = 0u32;
    for passes in &comps {
        if passes.is_empty() {
            free_loops += 1;
            continue;
        }
        let m = passes.len() as u32;
        for (t, &(c, r, over, forward)) in passes.iter().enumerate() {
            let t = t as u32;
            let inc = label + 1 + (t + m - 1) % m;
            let out = label + 1 + t;
            let id = *index.entry((c, r)).or_insert_with(|| {
                slots.push([0; 4]);
                slots.len() - 1
            });
            let x = &mut slots[id];
            if !over {
                x[0] = inc;
                x[2] = out;
                continue;
            }
            let (south, north) = if forward { (inc, out) } else { (out, inc) };
            // Counterclockwise from the under strand's entry: entering from
            // the west that is W, S, E, N; from the east it is E, N, W, S.
            if under_right[&(c, r)] {
                x[1] = south;
                x[3] = north;
            } else {
                x[1] = north;
                x[3] = south;
            }
        }
        label += m;
    }
    PDCode { crossings: slots, free_loops }
}

/// Orthogonal curve builder used by the converters. Strands of the current
/// front rise in their own columns; every operation works on a fresh row
/// above everything built so far, so horizontal segments only cross the
/// columns of active strands they are meant to cross.
struct Router {
    /// Column ids in left-to-right order.
    cols: Vec<u32>,
    next_col: u32,
    top: i64,
    bottom: i64,
    front: Vec<Strand>,
    /// Corner points `(col id, row)` with their vertical and horizontal partners.
    nodes: Vec<Node>,
}

#[derive(Clone, Copy)]
struct Strand {
    label: u32,
    col: u32,
    node: usize,
}

#[derive(Clone, Copy)]
struct Node {
    col: u32,
    row: i64,
    v: usize,
    h: usize,
}

impl Router {
    fn new() -> Router {
        Router { cols: Vec::new(), next_col: 0, top: 0, bottom: 0, front: Vec::new(), nodes: Vec::new() }
    }

    fn row(&mut self) -> i64 {
        self.top += 1;
        self.top
    }

    fn col_at(&mut self, index: usize) -> u32 {
        let id = self.next_col;
        self.next_col += 1;
        self.cols.insert(index, id);
        id
    }

    fn index_of(&self, col: u32) -> usize {
        self.cols.iter().position(|&c| c == col).expect("known column")
    }

    fn node(&mut self, col: u32, row: i64) -> usize {
        self.nodes.push(Node { col, row, v: usize::MAX, h: usize::MAX });
        self.nodes.len() - 1
    }

    fn link_h(&mut self, a: usize, b: usize) {
        self.nodes[a].h = b;
        self.nodes[b].h = a;
    }

    fn link_v(&mut self, a: usize, b: usize) {
        self.nodes[a].v = b;
        self.nodes[b].v = a;
    }

    /// Ends a strand's vertical run at `row`, returning the new corner.
    fn end(&mut self, s: Strand, row: i64) -> usize {
        let n = self.node(s.col, row);
        self.link_v(s.node, n);
        n
    }

    /// New pair of strands joined at the bottom, inserted at front position `i`.
    fn cup(&mut self, i: usize, left: u32, right: u32) {
        let at = if i == 0 { 0 } else { self.index_of(self.front[i - 1].col) + 1 };
        let cl = self.col_at(at);
        let cr = self.col_at(at + 1);
        let y = self.row();
        let a = self.node(cl, y);
        let b = self.node(cr, y);
        self.link_h(a, b);
        self.front.insert(i, Strand { label: right, col: cr, node: b });
        self.front.insert(i, Strand { label: left, col: cl, node: a });
    }

    /// Joins the strands at positions `i` and `i + 1`.
    fn cap(&mut self, i: usize) {
        let y = self.row();
        let (l, r) = (self.front[i], self.front[i + 1]);
        let a = self.end(l, y);
        let b = self.end(r, y);
        self.link_h(a, b);
        self.front.drain(i..i + 2);
    }

    /// Crosses the strands at `i` and `i + 1`; the over strand stays vertical
    /// and the under strand jogs across it into a new column. The new left
    /// and right strands carry `left` and `right`.
    fn cross(&mut self, i: usize, left_over: bool, left: u32, right: u32) {
        let y = self.row();
        let (l, r) = (self.front[i], self.front[i + 1]);
        if left_over {
            let a = self.end(r, y);
            let at = self.index_of(l.col);
            let cn = self.col_at(at);
            let b = self.node(cn, y);
            self.link_h(a, b);
            self.front[i] = Strand { label: left, col: cn, node: b };
            self.front[i + 1] = Strand { label: right, ..l };
        } else {
            let a = self.end(l, y);
            let at = self.index_of(r.col) + 1;
            let cn = self.col_at(at);
            let b = self.node(cn, y);
            self.link_h(a, b);
            self.front[i] = Strand { label: left, ..r };
            self.front[i + 1] = Strand { label: right, col: cn, node: b };
        }
    }

    /// Moves the rightmost strand to the far left by routing it around the
    /// outside of everything built so far.
    fn rotate(&mut self) {
        let s = self.front.pop().expect("non-empty front");
        let y = self.row();
        let a = self.end(s, y);
        let far_right = self.col_at(self.cols.len());
        let b = self.node(far_right, y);
        self.link_h(a, b);
        self.bottom -= 1;
        let yb = self.bottom;
        let c = self.node(far_right, yb);
        self.link_v(b, c);
        let far_left = self.col_at(0);
        let d = self.node(far_left, yb);
        self.link_h(c, d);
        self.front.insert(0, Strand { label: s.label, col: far_left, node: d });
    }

    fn cap_matching(&mut self) {
        while let Some(i) = (0..self.front.len().saturating_sub(1)).find(|&i| self.front[i].label == self.front[i + 1].label) {
            self.cap(i);
        }
    }

    /// Reads off the finished curves as a grid, alternating X and O along
    /// each component.
    fn into_grid(self) -> GridDiagram {
        assert!(self.front.is_empty(), "unfinished strands");
        let col_index: HashMap<u32, usize> = self.cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut rows: Vec<i64> = self.nodes.iter().map(|n| n.row).collect();
        rows.sort_unstable();
        rows.dedup();
        let row_index: HashMap<i64, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let n = self.cols.len();
        let mut x = vec![usize::MAX; n];
        let mut o = vec![usize::MAX; n];
        let mut seen = vec![false; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            let mut a = start;
            loop {
                // a and its vertical partner b get X and O.
                let b = self.nodes[a].v;
                seen[a] = true;
                seen[b] = true;
                let (na, nb) = (self.nodes[a], self.nodes[b]);
                let c = col_index[&na.col];
                x[c] = row_index[&na.row];
                o[c] = row_index[&nb.row];
                a = self.nodes[b].h;
                if a == start {
                    break;
                }
            }
        }
        GridDiagram::new(x, o).expect("router builds valid grids")
    }
}

/// Outcome of a PD or braid conversion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversionReport {
    pub crossings: usize,
    /// Arc index of the routed grid before reduction.
    pub arc_index_raw: usize,
    pub arc_index: usize,
    /// The reference size `(81/20) c`.
    pub reference_cap: f64,
    /// `arc_index / reference_cap`; absent when the input has no crossings.
    pub cap_ratio: Option<f64>,
    /// Moves taking the routed grid to the returned one.
    pub moves: Vec<GridMove>,
    /// Total length of the Reidemeister transcripts of `moves`.
    pub r_moves: u64,
}

/// Greedily lowers the arc index with [`moves::find_reduction`].
pub fn reduce(g: &GridDiagram) -> (GridDiagram, Vec<GridMove>) {
    let mut h = g.clone();
    let mut log = Vec::new();
    while let Some(seq) = moves::find_reduction(&h) {
        h = moves::replay(&h, &seq).expect("reductions are legal");
        log.extend(seq);
    }
    (h, log)
}

fn report(raw: GridDiagram, c: usize) -> (GridDiagram, ConversionReport) {
    let (g, log) = reduce(&raw);
    let r_moves = transcript::expanded_total(&raw, &log)
        .expect("reduction moves expand")
        .try_into()
        .unwrap_or(u64::MAX);
    let reference_cap = 81.0 * c as f64 / 20.0;
    let rep = ConversionReport {
        crossings: c,
        arc_index_raw: raw.n(),
        arc_index: g.n(),
        reference_cap,
        cap_ratio: if c == 0 { None } else { Some(g.n() as f64 / reference_cap) },
        moves: log,
        r_moves,
    };
    (g, rep)
}

/// Builds a grid for a PD code by sweeping the diagram upward, one crossing
/// at a time, then greedily destabilises. The arc index is not guaranteed
/// to meet any particular constant; the report records it.
pub fn pd_to_grid(p: &PDCode) -> Result<(GridDiagram, ConversionReport), ConvertError> {
    p.validate()?;
    let raw = route_pd(p)?;
    Ok(report(raw, p.crossings.len()))
}

fn route_pd(p: &PDCode) -> Result<GridDiagram, ConvertError> {
    let c = p.crossings.len();
    let mut r = Router::new();
    let mut done = vec![false; c];
    let mut left = c;
    loop {
        r.cap_matching();
        if left == 0 && r.front.is_empty() {
            break;
        }
        // Find the fewest front rotations after which either two matching
        // ends are adjacent or some crossing's incoming edges appear as a
        // contiguous run in counterclockwise order; prefer larger runs.
        let labels: Vec<u32> = r.front.iter().map(|s| s.label).collect();
        let len = labels.len();
        let mut found = None;
        'search: for rot in 0..len.max(1) {
            let view: Vec<u32> = (0..len).map(|i| labels[(i + len - rot) % len]).collect();
            if view.windows(2).any(|w| w[0] == w[1]) {
                found = Some((rot, None));
                break;
            }
            for j in (1..=4usize).rev() {
                for (x, slots) in p.crossings.iter().enumerate() {
                    if done[x] {
                        continue;
                    }
                    for k in 0..4 {
                        let down: Vec<u32> = (0..j).map(|t| slots[(k + t) % 4]).collect();
                        if let Some(i) = view.windows(j).position(|w| w == down.as_slice()) {
                            found = Some((rot, Some((j, x, k, i))));
                            break 'search;
                        }
                    }
                }
            }
        }
        let (j, x, k, i) = match found {
            Some((rot, step)) => {
                for _ in 0..rot {
                    r.rotate();
                }
                match step {
                    Some(step) => step,
                    None => continue,
                }
            }
            None => {
                // A new piece of the diagram that shares no edge with the
                // front can start anywhere.
                let touches = |x: usize| p.crossings[x].iter().any(|l| labels.contains(l));
                match (0..c).find(|&x| !done[x]) {
                    Some(x) if (0..c).all(|y| done[y] || !touches(y)) => (0, x, 0, 0),
                    _ => return Err(ConvertError::Stuck { left }),
                }
            }
        };
        let s = |t: usize| p.crossings[x][(k + t) % 4];
        // The leftmost incoming edge is on the over strand when its slot is odd.
        let left_over = (k % 2) == 1;
        match j {
            0 => {
                r.cup(i, s(0), s(0));
                r.cup(i + 2, s(1), s(1));
                r.cross(i + 1, left_over, s(3), s(2));
            }
            1 => {
                r.cup(i + 1, s(1), s(1));
                r.cross(i, left_over, s(3), s(2));
            }
            _ => r.cross(i, left_over, s(3), s(2)),
        }
        done[x] = true;
        left -= 1;
    }
    for _ in 0..p.free_loops {
        r.cup(0, 0, 0);
        r.cap(0);
    }
    if r.nodes.is_empty() {
        return Ok(GridDiagram::trivial());
    }
    Ok(r.into_grid())
}

/// Grid for the closure of a braid: nested cups, one crossing per letter,
/// nested caps, then greedy destabilisation.
pub fn braid_to_grid(b: &BraidWord) -> (GridDiagram, ConversionReport) {
    let k = b.strands;
    let mut r = Router::new();
    for i in 0..k {
        r.cup(i, 0, 0);
    }
    for &l in &b.letters {
        let p = l.unsigned_abs() as usize - 1;
        r.cross(p, l > 0, 0, 0);
    }
    for i in (0..k).rev() {
        r.cap(i);
    }
    let raw = r.into_grid();
    report(raw, b.letters.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: &[usize], o: &[usize]) -> GridDiagram {
        GridDiagram::new(x.to_vec(), o.to_vec()).unwrap()
    }

    #[test]
    fn braid_file_round_trip() {
        let b = BraidWord::parse("strands=2\n1 1 1\n").unwrap();
        assert_eq!(b, BraidWord { strands: 2, letters: vec![1, 1, 1] });
        assert_eq!(BraidWord::parse(&b.serialize()).unwrap(), b);
        assert!(BraidWord::parse("strands=2\n2\n").is_err());
        assert!(BraidWord::parse("strands=2\n1 x\n").is_err());
    }

    #[test]
    fn pd_file_round_trip() {
        let pd = PDCode::parse("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3\n").unwrap();
        assert_eq!(pd.crossings.len(), 3);
        assert_eq!(PDCode::parse(&pd.to_string()).unwrap(), pd);
        pd.validate().unwrap();
        assert!(PDCode::parse("X 1 2 3\n").is_err());
        assert!(matches!(
            PDCode::parse("X 1 2 3 4\n").unwrap().validate(),
            Err(ConvertError::EdgeCount { .. })
        ));
    }

    #[test]
    fn trivial_braid_is_trivial_grid() {
        let (grid, rep) = braid_to_grid(&BraidWord::new(1, vec![]).unwrap());
        assert_eq!(grid, GridDiagram::trivial());
        assert_eq!(rep.arc_index, 2);
    }

    #[test]
    fn trefoil_braid() {
        let b = BraidWord::new(2, vec![1, 1, 1]).unwrap();
        let pd = braid_to_pd(&b);
        assert_eq!(pd.crossings.len(), 3);
        pd.validate().unwrap();
        let (grid, rep) = braid_to_grid(&b);
        assert!(rep.arc_index <= 2 + 3);
        assert_eq!(grid.component_count(), 1);
    }

    #[test]
    fn grid_pd_counts() {
        assert_eq!(grid_to_pd(&GridDiagram::trivial()), PDCode { crossings: vec![], free_loops: 1 });
        let g3 = grid_to_pd(&g(&[1, 0, 2], &[0, 2, 1]));
        assert_eq!(g3.crossings.len(), 1);
        g3.validate().unwrap();
        let g5 = grid_to_pd(&g(&[1, 2, 3, 4, 0], &[3, 4, 0, 1, 2]));
        assert_eq!(g5.crossings.len(), 4);
        g5.validate().unwrap();
    }

    #[test]
    fn kink_pd_routes_to_trivial() {
        let pd = PDCode::parse("X 1 2 2 1\n").unwrap();
        pd.validate().unwrap();
        let raw = route_pd(&pd).unwrap();
        assert!(raw.n() <= 6);
        let (grid, _) = pd_to_grid(&pd).unwrap();
        assert_eq!(grid.component_count(), 1);
    }
}
