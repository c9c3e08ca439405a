//! Expansion of grid moves into Reidemeister moves, with crossing-count
//! traces, per-move caps and global budget accounting.
//!
//! Every elementary move is modelled as one line of the grid sliding past
//! its neighbours one at a time. A single pass of line `V` over an adjacent
//! parallel line `W` changes crossings only through the four arcs ending on
//! `V` or `W`, and every arc crossing both lines gives one triangle move.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::grid::GridDiagram;
use crate::moves::{self, Axis, DecomposeError, GridMove, MoveKind, Rejection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RKind {
    R1,
    R2,
    R3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Begin,
    Mid,
    End,
}

/// Where an R-move happens: the sliding line, the line it passes, and
/// whether the move opens, continues or closes the pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub axis: Axis,
    pub moving: usize,
    pub passed: usize,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RMove {
    pub kind: RKind,
    pub site: Site,
}

/// The Reidemeister expansion of one grid move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub source: GridMove,
    pub moves: Vec<RMove>,
    /// Crossing count before the first move and after each move.
    pub crossings: Vec<usize>,
    pub start_key: String,
    pub end_key: String,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn count(&self, kind: RKind) -> usize {
        self.moves.iter().filter(|m| m.kind == kind).count()
    }
}

pub fn key_hex(g: &GridDiagram) -> String {
    g.canonical_key().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("transcript requested for the wrong move kind")]
    WrongKind,
    #[error(transparent)]
    Illegal(#[from] Rejection),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

struct Builder {
    moves: Vec<RMove>,
    crossings: Vec<usize>,
}

impl Builder {
    fn new(start: usize) -> Builder {
        Builder { moves: Vec::new(), crossings: vec![start] }
    }

    fn push(&mut self, kind: RKind, site: Site, delta: i64) {
        let last = *self.crossings.last().expect("trace starts non-empty") as i64;
        self.moves.push(RMove { kind, site });
        self.crossings.push((last + delta) as usize);
    }

    fn finish(self, source: GridMove, start: &GridDiagram, end: &GridDiagram) -> Transcript {
        Transcript {
            source,
            moves: self.moves,
            crossings: self.crossings,
            start_key: key_hex(start),
            end_key: key_hex(end),
        }
    }
}

/// Slides column `v` over the adjacent column `w` of `g` and records the
/// R-moves. The state afterwards is `g` with the two columns swapped.
fn pass(g: &GridDiagram, spans: &[(usize, usize)], v: usize, w: usize, axis: Axis, b: &mut Builder) {
    let (va, vb) = g.col_span(v);
    let (wa, wb) = g.col_span(w);
    let strictly = |lo: usize, x: usize, hi: usize| lo.min(hi) < x && x < lo.max(hi);
    // Change in crossings between the arc in `row`, which ends on the line at
    // `mover`, and the other line at `at`, once the two lines trade places.
    let stub = |row: usize, mover: usize, other_lo: usize, other_hi: usize, at: usize| -> i64 {
        if !(other_lo < row && row < other_hi) {
            return 0;
        }
        let (a, c) = spans[row];
        let far = if a == mover { c } else { a };
        let before = strictly(mover, at, far) as i64;
        let after = strictly(at, mover, far) as i64;
        after - before
    };
    let delta = stub(va, v, wa, wb, w) + stub(vb, v, wa, wb, w) + stub(wa, w, va, vb, v) + stub(wb, w, va, vb, v);
    let (lo, hi) = (va.max(wa), vb.min(wb));
    let triangles = (lo + 1..hi)
        .filter(|&r| {
            let (a, c) = spans[r];
            a < v.min(w) && v.max(w) < c
        })
        .count();
    let site = |phase| Site { axis, moving: v, passed: w, phase };
    match delta {
        2 => b.push(RKind::R2, site(Phase::Begin), 2),
        1 => b.push(RKind::R1, site(Phase::Begin), 1),
        _ => {}
    }
    for _ in 0..triangles {
        b.push(RKind::R3, site(Phase::Mid), 0);
    }
    match delta {
        -2 => b.push(RKind::R2, site(Phase::End), -2),
        -1 => b.push(RKind::R1, site(Phase::End), -1),
        _ => {}
    }
}

fn swap_cols(g: &GridDiagram, c: usize) -> GridDiagram {
    let (mut x, mut o) = (g.x_row().to_vec(), g.o_row().to_vec());
    x.swap(c, c + 1);
    o.swap(c, c + 1);
    GridDiagram::from_parts(x, o)
}

/// Runs a chain of passes in column coordinates; `path` lists `(v, w)`.
fn passes(g: &GridDiagram, path: &[(usize, usize)], axis: Axis, b: &mut Builder) -> GridDiagram {
    let mut h = g.clone();
    for &(v, w) in path {
        let spans = h.row_spans();
        pass(&h, &spans, v, w, axis, b);
        h = swap_cols(&h, v.min(w));
        debug_assert_eq!(*b.crossings.last().unwrap(), h.crossing_count());
    }
    h
}

/// Transcript of an exchange: one pass, empty when the spans are disjoint.
pub fn exchange_transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    let (h, axis, c) = match *m {
        GridMove::ExchangeCols { c } => (g.clone(), Axis::Cols, c),
        GridMove::ExchangeRows { r } => (g.transpose(), Axis::Rows, r),
        _ => return Err(TranscriptError::WrongKind),
    };
    moves::legal(g, m)?;
    let mut b = Builder::new(h.crossing_count());
    passes(&h, &[(c, c + 1)], axis, &mut b);
    let end = moves::apply_unchecked(g, m);
    Ok(b.finish(*m, g, &end))
}

/// Transcript of a cyclic permutation: the wrapped line passes each of the
/// other `n - 1` lines in turn.
pub fn cyclic_transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    let (h, axis, shift) = match *m {
        GridMove::CyclicCols { shift } => (g.clone(), Axis::Cols, shift),
        GridMove::CyclicRows { shift } => (g.transpose(), Axis::Rows, shift),
        _ => return Err(TranscriptError::WrongKind),
    };
    moves::legal(g, m)?;
    let n = g.n();
    let path: Vec<(usize, usize)> = if shift > 0 {
        (1..n).rev().map(|v| (v, v - 1)).collect()
    } else {
        (0..n - 1).map(|v| (v, v + 1)).collect()
    };
    let mut b = Builder::new(h.crossing_count());
    passes(&h, &path, axis, &mut b);
    let end = moves::apply_unchecked(g, m);
    Ok(b.finish(*m, g, &end))
}

/// Transcript of a stabilisation or destabilisation, read off the change in
/// crossing count: nothing, a kink, or a pair of crossings.
pub fn stabilize_transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    let (axis, line) = match *m {
        GridMove::Stabilize { col, .. } => (Axis::Cols, col),
        GridMove::Destabilize { block_col, .. } => (Axis::Cols, block_col),
        _ => return Err(TranscriptError::WrongKind),
    };
    moves::legal(g, m)?;
    let end = moves::apply_unchecked(g, m);
    let (before, after) = (g.crossing_count() as i64, end.crossing_count() as i64);
    let mut delta = after - before;
    let mut b = Builder::new(before as usize);
    let site = |phase| Site { axis, moving: line, passed: line + 1, phase };
    while delta != 0 {
        let step = delta.clamp(-2, 2);
        let kind = if step.abs() == 2 { RKind::R2 } else { RKind::R1 };
        b.push(kind, site(if step > 0 { Phase::Begin } else { Phase::End }), step);
        delta -= step;
    }
    Ok(b.finish(*m, g, &end))
}

fn concat(g: &GridDiagram, source: GridMove, steps: &[GridMove]) -> Result<Transcript, TranscriptError> {
    let mut b = Builder::new(g.crossing_count());
    let mut h = g.clone();
    for s in steps {
        let t = transcript(&h, s)?;
        for (mv, &c) in t.moves.iter().zip(t.crossings.iter().skip(1)) {
            b.moves.push(*mv);
            b.crossings.push(c);
        }
        h = moves::apply_unchecked(&h, s);
    }
    Ok(b.finish(source, g, &h))
}

/// Transcript of a generalised exchange: the concatenated transcripts of its
/// elementary decomposition.
pub fn gen_exchange_transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    if m.kind() != MoveKind::GenExchange {
        return Err(TranscriptError::WrongKind);
    }
    let steps = moves::decompose_gen_exchange(g, m)?;
    concat(g, *m, &steps)
}

pub fn gen_destabilize_transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    if m.kind() != MoveKind::GenDestabilize {
        return Err(TranscriptError::WrongKind);
    }
    let steps = moves::decompose_gen_destabilize(g, m)?;
    concat(g, *m, &steps)
}

/// Transcript of any legal move.
pub fn transcript(g: &GridDiagram, m: &GridMove) -> Result<Transcript, TranscriptError> {
    match m.kind() {
        MoveKind::ExchangeCols | MoveKind::ExchangeRows => exchange_transcript(g, m),
        MoveKind::CyclicCols | MoveKind::CyclicRows => cyclic_transcript(g, m),
        MoveKind::Stabilize | MoveKind::Destabilize => stabilize_transcript(g, m),
        MoveKind::GenExchange => gen_exchange_transcript(g, m),
        MoveKind::GenDestabilize => gen_destabilize_transcript(g, m),
    }
}

/// Cap on the transcript length of one move at arc index `n`.
pub fn move_cap(kind: MoveKind, n: usize) -> u64 {
    let n = n as u64;
    match kind {
        MoveKind::ExchangeCols | MoveKind::ExchangeRows => n,
        MoveKind::CyclicCols | MoveKind::CyclicRows => (n - 1) * (n - 1),
        MoveKind::GenExchange => n * n * n,
        MoveKind::Stabilize | MoveKind::Destabilize => 2,
        MoveKind::GenDestabilize => n * n + 2,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Mismatch {
    #[error("trace has {trace} entries for {moves} moves")]
    TraceLength { trace: usize, moves: usize },
    #[error("trace starts at {trace}, grid has {actual} crossings")]
    Start { trace: usize, actual: usize },
    #[error("trace ends at {trace}, grid has {actual} crossings")]
    End { trace: usize, actual: usize },
    #[error("move {index} is {kind:?} but changes crossings by {delta}")]
    Step { index: usize, kind: RKind, delta: i64 },
    #[error("{len} moves exceed the cap {cap}")]
    Cap { len: usize, cap: u64 },
    #[error("canonical key of the {which} grid differs")]
    Key { which: &'static str },
}

/// Checks trace arithmetic, the per-kind cap and the end-point keys.
pub fn verify(t: &Transcript, g_start: &GridDiagram, g_end: &GridDiagram) -> Result<(), Mismatch> {
    if t.crossings.len() != t.moves.len() + 1 {
        return Err(Mismatch::TraceLength { trace: t.crossings.len(), moves: t.moves.len() });
    }
    let start = g_start.crossing_count();
    if t.crossings[0] != start {
        return Err(Mismatch::Start { trace: t.crossings[0], actual: start });
    }
    let end = g_end.crossing_count();
    let last = *t.crossings.last().unwrap();
    if last != end {
        return Err(Mismatch::End { trace: last, actual: end });
    }
    for (index, (mv, w)) in t.moves.iter().zip(t.crossings.windows(2)).enumerate() {
        let delta = w[1] as i64 - w[0] as i64;
        let ok = match mv.kind {
            RKind::R1 => delta.abs() == 1,
            RKind::R2 => delta.abs() == 2,
            RKind::R3 => delta == 0,
        };
        if !ok {
            return Err(Mismatch::Step { index, kind: mv.kind, delta });
        }
    }
    let cap = move_cap(t.source.kind(), g_start.n());
    if t.moves.len() as u64 > cap {
        return Err(Mismatch::Cap { len: t.moves.len(), cap });
    }
    if t.start_key != key_hex(g_start) {
        return Err(Mismatch::Key { which: "start" });
    }
    if t.end_key != key_hex(g_end) {
        return Err(Mismatch::Key { which: "end" });
    }
    Ok(())
}

fn big_str<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_big_str<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// One count checked against a cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapCheck {
    #[serde(serialize_with = "big_str")]
    pub count: BigUint,
    #[serde(serialize_with = "big_str")]
    pub cap: BigUint,
    pub ok: bool,
}

impl CapCheck {
    fn new(count: BigUint, cap: BigUint) -> CapCheck {
        let ok = count <= cap;
        CapCheck { count, cap, ok }
    }
}

/// Move and R-move totals of a simplification log against the global caps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub n0: usize,
    pub c: usize,
    pub counts: BTreeMap<MoveKind, u64>,
    /// Sum of the per-move caps along the log.
    #[serde(serialize_with = "big_str")]
    pub r_move_cap_total: BigUint,
    /// Exact expanded R-move count, when the log was replayed.
    #[serde(serialize_with = "opt_big_str")]
    pub r_moves_exact: Option<BigUint>,
    /// `(231 c)^11` against the cap total.
    pub reidemeister: CapCheck,
    /// `(48 c)^11`, the split-link variant.
    #[serde(serialize_with = "big_str")]
    pub split_reidemeister_cap: BigUint,
    #[serde(serialize_with = "big_str")]
    pub crossing_cap: BigUint,
    /// Move counts against the caps for taking an unknot to the trivial grid.
    pub unknot: BTreeMap<String, CapCheck>,
    /// Move counts against the caps for reaching a disconnected grid.
    pub split: BTreeMap<String, CapCheck>,
}

impl Budget {
    pub fn all_ok(&self) -> bool {
        self.reidemeister.ok
            && self.unknot.values().all(|c| c.ok)
            && self.r_moves_exact.as_ref().map_or(true, |e| *e <= self.reidemeister.cap)
    }
}

fn pow(base: u64, e: u32) -> BigUint {
    BigUint::from(base).pow(e)
}

fn scaled(mantissa: u64, exp10: u32, n: usize, npow: u32) -> BigUint {
    BigUint::from(mantissa) * pow(10, exp10) * pow(n as u64, npow)
}

/// Budget accounting for a move log starting at arc index `n0` from a
/// diagram with `c` crossings. Caps are summed exactly along the log.
pub fn budget_report(move_log: &[GridMove], c: usize, n0: usize) -> Budget {
    let mut counts: BTreeMap<MoveKind, u64> = BTreeMap::new();
    let mut total = BigUint::zero();
    let mut n = n0 as i64;
    for m in move_log {
        *counts.entry(m.kind()).or_default() += 1;
        total += BigUint::from(move_cap(m.kind(), n.max(2) as usize));
        n += m.size_delta();
    }
    let get = |ks: &[MoveKind]| -> BigUint { ks.iter().map(|k| counts.get(k).copied().unwrap_or(0)).sum::<u64>().into() };
    let exchanges = get(&[MoveKind::ExchangeCols, MoveKind::ExchangeRows]);
    let cyclics = get(&[MoveKind::CyclicCols, MoveKind::CyclicRows]);
    let gen_ex = get(&[MoveKind::GenExchange]);
    let stabs = get(&[MoveKind::Stabilize]);
    let destabs = get(&[MoveKind::Destabilize, MoveKind::GenDestabilize]);
    let unknot = BTreeMap::from([
        ("exchange".to_string(), CapCheck::new(exchanges.clone(), scaled(4, 18, n0, 10))),
        ("cyclic".to_string(), CapCheck::new(cyclics.clone(), scaled(6, 18, n0, 9))),
        ("gen_exchange".to_string(), CapCheck::new(gen_ex.clone(), scaled(1, 19, n0, 8))),
        ("stabilize".to_string(), CapCheck::new(stabs, scaled(3, 13, n0, 6))),
        ("destabilize".to_string(), CapCheck::new(destabs, scaled(3, 13, n0, 6))),
    ]);
    let split = BTreeMap::from([
        ("gen_exchange".to_string(), CapCheck::new(gen_ex, scaled(3, 11, n0, 8))),
        ("cyclic".to_string(), CapCheck::new(cyclics, scaled(2, 11, n0, 9))),
        ("exchange".to_string(), CapCheck::new(exchanges, scaled(8, 10, n0, 10))),
    ]);
    let cc = c as u64;
    Budget {
        n0,
        c,
        counts,
        reidemeister: CapCheck::new(total.clone(), pow(231 * cc, 11)),
        r_move_cap_total: total,
        r_moves_exact: None,
        split_reidemeister_cap: pow(48 * cc, 11),
        crossing_cap: BigUint::from(9 * cc * cc),
        unknot,
        split,
    }
}

/// Replays `move_log` from `g`, expanding every move, and returns the exact
/// number of R-moves.
pub fn expanded_total(g: &GridDiagram, move_log: &[GridMove]) -> Result<BigUint, TranscriptError> {
    let mut h = g.clone();
    let mut total = BigUint::zero();
    for m in move_log {
        let t = transcript(&h, m)?;
        total += BigUint::from(t.len());
        h = moves::apply_unchecked(&h, m);
    }
    Ok(total)
}

/// [`budget_report`] with the exact R-move total filled in.
pub fn budget_report_exact(g: &GridDiagram, move_log: &[GridMove], c: usize) -> Result<Budget, TranscriptError> {
    let mut b = budget_report(move_log, c, g.n());
    b.r_moves_exact = Some(expanded_total(g, move_log)?);
    Ok(b)
}
