//! The grid move calculus: cyclic permutations, exchanges, (de)stabilisations
//! and the generalised exchange and destabilisation moves, with legality
//! checks, application and decomposition into elementary moves.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridDiagram, Marker};

/// Which cell of the stabilisation block receives the lone marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    NW,
    NE,
    SW,
    SE,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::NW, Corner::NE, Corner::SW, Corner::SE];

    fn from_sides(east: bool, north: bool) -> Corner {
        match (east, north) {
            (false, true) => Corner::NW,
            (true, true) => Corner::NE,
            (false, false) => Corner::SW,
            (true, false) => Corner::SE,
        }
    }

    fn is_east(self) -> bool {
        matches!(self, Corner::NE | Corner::SE)
    }

    fn is_north(self) -> bool {
        matches!(self, Corner::NW | Corner::NE)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Cols,
    Rows,
}

/// One grid move. Indices refer to the grid the move is applied to; the size
/// `n` is taken from that grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridMove {
    /// `shift = 1` moves the last column to the front, `-1` the first to the back.
    CyclicCols { shift: i8 },
    CyclicRows { shift: i8 },
    /// Transposes columns `c` and `c + 1`.
    ExchangeCols { c: usize },
    ExchangeRows { r: usize },
    Stabilize { marker: Marker, col: usize, row: usize, corner: Corner },
    /// Collapses the 2x2 block with lower-left cell `(block_col, block_row)`.
    Destabilize { block_col: usize, block_row: usize },
    /// Swaps the line blocks `[s1, s2)` and `[s2, s3)`; the band `[t1, t2)`
    /// on the other axis selects which arcs count as inside.
    GenExchange { axis: Axis, s1: usize, s2: usize, s3: usize, t1: usize, t2: usize },
    /// Merges the two horizontal arcs in rows `row_a` and `row_b` that meet
    /// at the short vertical arc in `shared_vertex_col`.
    GenDestabilize { shared_vertex_col: usize, row_a: usize, row_b: usize },
}

/// Move kinds, in the order used by [`enumerate_moves`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    CyclicCols,
    CyclicRows,
    ExchangeCols,
    ExchangeRows,
    Stabilize,
    Destabilize,
    GenExchange,
    GenDestabilize,
}

impl MoveKind {
    pub const ALL: [MoveKind; 8] = [
        MoveKind::CyclicCols,
        MoveKind::CyclicRows,
        MoveKind::ExchangeCols,
        MoveKind::ExchangeRows,
        MoveKind::Stabilize,
        MoveKind::Destabilize,
        MoveKind::GenExchange,
        MoveKind::GenDestabilize,
    ];
}

impl GridMove {
    pub fn kind(&self) -> MoveKind {
        match self {
            GridMove::CyclicCols { .. } => MoveKind::CyclicCols,
            GridMove::CyclicRows { .. } => MoveKind::CyclicRows,
            GridMove::ExchangeCols { .. } => MoveKind::ExchangeCols,
            GridMove::ExchangeRows { .. } => MoveKind::ExchangeRows,
            GridMove::Stabilize { .. } => MoveKind::Stabilize,
            GridMove::Destabilize { .. } => MoveKind::Destabilize,
            GridMove::GenExchange { .. } => MoveKind::GenExchange,
            GridMove::GenDestabilize { .. } => MoveKind::GenDestabilize,
        }
    }

    /// Change in arc index caused by the move.
    pub fn size_delta(&self) -> i64 {
        match self {
            GridMove::Stabilize { .. } => 1,
            GridMove::Destabilize { .. } | GridMove::GenDestabilize { .. } => -1,
            _ => 0,
        }
    }
}

/// A pair of line positions with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub lo: usize,
    pub hi: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Pair {
        Pair { lo: a.min(b), hi: a.max(b) }
    }

    fn strictly_contains(&self, v: usize) -> bool {
        self.lo < v && v < self.hi
    }
}

/// Whether two endpoint pairs interleave: exactly one element of `pair_b`
/// lies strictly between the elements of `pair_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interleaving {
    pub pair_a: Pair,
    pub pair_b: Pair,
    pub interleaved: bool,
}

impl Interleaving {
    pub fn new(pair_a: Pair, pair_b: Pair) -> Interleaving {
        let inside = [pair_b.lo, pair_b.hi].iter().filter(|&&v| pair_a.strictly_contains(v)).count();
        Interleaving { pair_a, pair_b, interleaved: inside == 1 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Rejection {
    #[error("move does not fit a grid of size {n}: {reason}")]
    Shape { n: usize, reason: String },
    #[error("lines {lines:?} share the endpoint {at}")]
    SharedEndpoint { lines: [usize; 2], at: usize },
    #[error("lines {lines:?} have interleaved spans {spans:?}")]
    Interleaved { lines: [usize; 2], spans: [Pair; 2] },
    #[error("no {marker:?} marker at ({col}, {row})")]
    NoMarker { marker: Marker, col: usize, row: usize },
    #[error("block at ({col}, {row}) holds {count} markers, need 3")]
    BlockMarkers { col: usize, row: usize, count: usize },
    #[error("arc in row {row} with span {span:?} interleaves the cuts {cuts:?}")]
    CutInterleaved { row: usize, span: Pair, cuts: Pair },
    #[error("column {col} is not a short arc joining rows {row_a} and {row_b}")]
    NotShortArc { col: usize, row_a: usize, row_b: usize },
    #[error("rows {row_a} and {row_b} meet column {col} from the same column")]
    ClosedLoop { col: usize, row_a: usize, row_b: usize },
}

fn shape(n: usize, reason: impl Into<String>) -> Rejection {
    Rejection::Shape { n, reason: reason.into() }
}

/// Legality of `m` on `g`; the rejection names the first violated condition.
pub fn legal(g: &GridDiagram, m: &GridMove) -> Result<(), Rejection> {
    let n = g.n();
    match *m {
        GridMove::CyclicCols { shift } | GridMove::CyclicRows { shift } => {
            if shift == 1 || shift == -1 {
                Ok(())
            } else {
                Err(shape(n, format!("cyclic shift {shift} is not +-1")))
            }
        }
        GridMove::ExchangeCols { c } => {
            if c + 1 >= n {
                return Err(shape(n, format!("column exchange at {c}")));
            }
            exchange_ok(c, Pair::new(g.x_row()[c], g.o_row()[c]), Pair::new(g.x_row()[c + 1], g.o_row()[c + 1]))
        }
        GridMove::ExchangeRows { r } => {
            if r + 1 >= n {
                return Err(shape(n, format!("row exchange at {r}")));
            }
            let (xc, oc) = (g.x_col(), g.o_col());
            exchange_ok(r, Pair::new(xc[r], oc[r]), Pair::new(xc[r + 1], oc[r + 1]))
        }
        GridMove::Stabilize { marker, col, row, .. } => {
            if col >= n || row >= n {
                return Err(shape(n, format!("stabilisation at ({col}, {row})")));
            }
            if g.row_of(marker, col) != row {
                return Err(Rejection::NoMarker { marker, col, row });
            }
            Ok(())
        }
        GridMove::Destabilize { block_col, block_row } => {
            if n < 3 {
                return Err(shape(n, "cannot destabilise below arc index 2"));
            }
            if block_col + 1 >= n || block_row + 1 >= n {
                return Err(shape(n, format!("block at ({block_col}, {block_row})")));
            }
            let count = block_markers(g, block_col, block_row).len();
            if count != 3 {
                return Err(Rejection::BlockMarkers { col: block_col, row: block_row, count });
            }
            Ok(())
        }
        GridMove::GenExchange { axis, s1, s2, s3, t1, t2 } => {
            if !(s1 < s2 && s2 < s3 && s3 <= n && t1 < t2 && t2 <= n) {
                return Err(shape(n, format!("cuts s=({s1},{s2},{s3}) t=({t1},{t2})")));
            }
            let h = match axis {
                Axis::Cols => g.clone(),
                Axis::Rows => g.transpose(),
            };
            gen_exchange_ok(&h, s1, s2, s3, t1, t2)
        }
        GridMove::GenDestabilize { shared_vertex_col: s, row_a, row_b } => {
            if n < 3 {
                return Err(shape(n, "cannot destabilise below arc index 2"));
            }
            if s >= n || row_b >= n || row_a >= row_b {
                return Err(shape(n, format!("generalised destabilisation ({s}, {row_a}, {row_b})")));
            }
            if row_b != row_a + 1 || g.col_span(s) != (row_a, row_b) {
                return Err(Rejection::NotShortArc { col: s, row_a, row_b });
            }
            let (p, q) = short_arc_partners(g, s, row_a, row_b);
            if p == q {
                return Err(Rejection::ClosedLoop { col: s, row_a, row_b });
            }
            Ok(())
        }
    }
}

fn exchange_ok(line: usize, a: Pair, b: Pair) -> Result<(), Rejection> {
    for v in [a.lo, a.hi] {
        if v == b.lo || v == b.hi {
            return Err(Rejection::SharedEndpoint { lines: [line, line + 1], at: v });
        }
    }
    if Interleaving::new(a, b).interleaved {
        return Err(Rejection::Interleaved { lines: [line, line + 1], spans: [a, b] });
    }
    Ok(())
}

fn gen_exchange_ok(g: &GridDiagram, s1: usize, s2: usize, s3: usize, t1: usize, t2: usize) -> Result<(), Rejection> {
    for (row, &(a, b)) in g.row_spans().iter().enumerate() {
        let inside = t1 <= row && row < t2;
        let (lo, hi) = if inside { (s2, s3) } else { (s1, s2) };
        let hits = [a, b].iter().filter(|&&c| lo <= c && c < hi).count();
        if hits == 1 {
            return Err(Rejection::CutInterleaved { row, span: Pair::new(a, b), cuts: Pair::new(lo, hi) });
        }
    }
    Ok(())
}

/// Markers inside the 2x2 block as `(col, row, marker)`.
fn block_markers(g: &GridDiagram, bc: usize, br: usize) -> Vec<(usize, usize, Marker)> {
    let mut out = Vec::new();
    for c in [bc, bc + 1] {
        for (m, r) in [(Marker::X, g.x_row()[c]), (Marker::O, g.o_row()[c])] {
            if r == br || r == br + 1 {
                out.push((c, r, m));
            }
        }
    }
    out
}

/// Columns of the other endpoints of rows `row_a` and `row_b`, whose arcs
/// both end in column `s`.
fn short_arc_partners(g: &GridDiagram, s: usize, row_a: usize, row_b: usize) -> (usize, usize) {
    let (xc, oc) = (g.x_col(), g.o_col());
    let other = |r: usize| if xc[r] == s { oc[r] } else { xc[r] };
    (other(row_a), other(row_b))
}

/// Applies a legal move.
pub fn apply(g: &GridDiagram, m: &GridMove) -> Result<GridDiagram, Rejection> {
    legal(g, m)?;
    Ok(apply_unchecked(g, m))
}

/// Applies `m` without checking legality. Callers must have checked it.
pub(crate) fn apply_unchecked(g: &GridDiagram, m: &GridMove) -> GridDiagram {
    let n = g.n();
    match *m {
        GridMove::CyclicCols { shift } => g.rotate(if shift > 0 { 1 } else { n - 1 }, 0),
        GridMove::CyclicRows { shift } => g.rotate(0, if shift > 0 { 1 } else { n - 1 }),
        GridMove::ExchangeCols { c } => {
            let (mut x, mut o) = (g.x_row().to_vec(), g.o_row().to_vec());
            x.swap(c, c + 1);
            o.swap(c, c + 1);
            GridDiagram::from_parts(x, o)
        }
        GridMove::ExchangeRows { r } => {
            let swap = |v: usize| if v == r { r + 1 } else if v == r + 1 { r } else { v };
            GridDiagram::from_parts(
                g.x_row().iter().map(|&v| swap(v)).collect(),
                g.o_row().iter().map(|&v| swap(v)).collect(),
            )
        }
        GridMove::Stabilize { marker, col, row, corner } => stabilize(g, marker, col, row, corner),
        GridMove::Destabilize { block_col, block_row } => destabilize(g, block_col, block_row),
        GridMove::GenExchange { axis: Axis::Cols, s1, s2, s3, .. } => {
            let order: Vec<usize> = (0..s1).chain(s2..s3).chain(s1..s2).chain(s3..n).collect();
            GridDiagram::from_parts(
                order.iter().map(|&c| g.x_row()[c]).collect(),
                order.iter().map(|&c| g.o_row()[c]).collect(),
            )
        }
        GridMove::GenExchange { axis: Axis::Rows, s1, s2, s3, t1, t2 } => {
            let moved = GridMove::GenExchange { axis: Axis::Cols, s1, s2, s3, t1, t2 };
            apply_unchecked(&g.transpose(), &moved).transpose()
        }
        GridMove::GenDestabilize { .. } => {
            let steps = decompose_gen_destabilize(g, m).expect("legal generalised destabilisation");
            steps.iter().fold(g.clone(), |h, s| apply_unchecked(&h, s))
        }
    }
}

fn stabilize(g: &GridDiagram, marker: Marker, col: usize, row: usize, corner: Corner) -> GridDiagram {
    let n = g.n();
    let shift_c = |c: usize| if c <= col { c } else { c + 1 };
    let shift_r = |r: usize| if r <= row { r } else { r + 1 };
    let (cs, ce) = if corner.is_east() { (col + 1, col) } else { (col, col + 1) };
    let (rs, re) = if corner.is_north() { (row + 1, row) } else { (row, row + 1) };
    let lone = marker.other();
    let mut rows = [vec![0; n + 1], vec![0; n + 1]];
    let slot = |m: Marker| if m == Marker::X { 0 } else { 1 };
    for c in 0..n {
        for m in [Marker::X, Marker::O] {
            let r = g.row_of(m, c);
            if c == col {
                if m == lone {
                    rows[slot(m)][ce] = shift_r(r);
                }
                continue;
            }
            // The other endpoint of the split row joins the row without the lone marker.
            let r2 = if r == row { re } else { shift_r(r) };
            rows[slot(m)][shift_c(c)] = r2;
        }
    }
    rows[slot(lone)][cs] = rs;
    rows[slot(marker)][cs] = re;
    rows[slot(marker)][ce] = rs;
    let [x, o] = rows;
    GridDiagram::from_parts(x, o)
}

fn destabilize(g: &GridDiagram, bc: usize, br: usize) -> GridDiagram {
    let (c2, r2, lone) = block_corner(g, bc, br);
    let c1 = if c2 == bc { bc + 1 } else { bc };
    let r1 = if r2 == br { br + 1 } else { br };
    let doubled = lone.other();
    let (mut x, mut o) = (g.x_row().to_vec(), g.o_row().to_vec());
    match doubled {
        Marker::X => x[c1] = r1,
        Marker::O => o[c1] = r1,
    }
    x.remove(c2);
    o.remove(c2);
    let drop = |v: usize| if v > r2 { v - 1 } else { v };
    GridDiagram::from_parts(x.into_iter().map(drop).collect(), o.into_iter().map(drop).collect())
}

/// The block cell holding the lone marker type, i.e. the cell sharing both a
/// row and a column with the other two block markers.
fn block_corner(g: &GridDiagram, bc: usize, br: usize) -> (usize, usize, Marker) {
    let ms = block_markers(g, bc, br);
    debug_assert_eq!(ms.len(), 3);
    for &(c, r, m) in &ms {
        let same_col = ms.iter().filter(|t| t.0 == c).count();
        let same_row = ms.iter().filter(|t| t.1 == r).count();
        if same_col == 2 && same_row == 2 {
            return (c, r, m);
        }
    }
    unreachable!("three markers in a 2x2 block always form an L")
}

/// The move undoing `m` on `g`, i.e. `apply(apply(g, m), inverse(g, m)) == g`.
/// Returns `None` for the generalised moves.
pub fn inverse(g: &GridDiagram, m: &GridMove) -> Option<GridMove> {
    match *m {
        GridMove::CyclicCols { shift } => Some(GridMove::CyclicCols { shift: -shift }),
        GridMove::CyclicRows { shift } => Some(GridMove::CyclicRows { shift: -shift }),
        GridMove::ExchangeCols { .. } | GridMove::ExchangeRows { .. } => Some(*m),
        GridMove::Stabilize { col, row, .. } => Some(GridMove::Destabilize { block_col: col, block_row: row }),
        GridMove::Destabilize { block_col, block_row } => {
            let (c2, r2, lone) = block_corner(g, block_col, block_row);
            Some(GridMove::Stabilize {
                marker: lone.other(),
                col: block_col,
                row: block_row,
                corner: Corner::from_sides(c2 != block_col, r2 != block_row),
            })
        }
        GridMove::GenExchange { .. } | GridMove::GenDestabilize { .. } => None,
    }
}

/// All legal moves of the requested kinds, ordered by kind then indices.
pub fn enumerate_moves(g: &GridDiagram, kinds: &[MoveKind]) -> Vec<GridMove> {
    let n = g.n();
    let mut wanted: Vec<MoveKind> = kinds.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut out = Vec::new();
    for kind in wanted {
        let candidates: Vec<GridMove> = match kind {
            MoveKind::CyclicCols => vec![GridMove::CyclicCols { shift: -1 }, GridMove::CyclicCols { shift: 1 }],
            MoveKind::CyclicRows => vec![GridMove::CyclicRows { shift: -1 }, GridMove::CyclicRows { shift: 1 }],
            MoveKind::ExchangeCols => (0..n - 1).map(|c| GridMove::ExchangeCols { c }).collect(),
            MoveKind::ExchangeRows => (0..n - 1).map(|r| GridMove::ExchangeRows { r }).collect(),
            MoveKind::Stabilize => {
                let mut v = Vec::new();
                for col in 0..n {
                    for marker in [Marker::X, Marker::O] {
                        for corner in Corner::ALL {
                            v.push(GridMove::Stabilize { marker, col, row: g.row_of(marker, col), corner });
                        }
                    }
                }
                v
            }
            MoveKind::Destabilize => {
                let mut v = Vec::new();
                for block_col in 0..n - 1 {
                    for block_row in 0..n - 1 {
                        v.push(GridMove::Destabilize { block_col, block_row });
                    }
                }
                v
            }
            MoveKind::GenExchange => {
                let mut v = Vec::new();
                for axis in [Axis::Cols, Axis::Rows] {
                    for s1 in 0..n {
                        for s2 in s1 + 1..n {
                            for s3 in s2 + 1..=n {
                                for t1 in 0..n {
                                    for t2 in t1 + 1..=n {
                                        v.push(GridMove::GenExchange { axis, s1, s2, s3, t1, t2 });
                                    }
                                }
                            }
                        }
                    }
                }
                v
            }
            MoveKind::GenDestabilize => {
                let mut v = Vec::new();
                for s in 0..n {
                    let (lo, hi) = g.col_span(s);
                    v.push(GridMove::GenDestabilize { shared_vertex_col: s, row_a: lo, row_b: hi });
                }
                v
            }
        };
        out.extend(candidates.into_iter().filter(|m| legal(g, m).is_ok()));
    }
    out
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("not the right move kind for this decomposition")]
    WrongKind,
    #[error(transparent)]
    Illegal(#[from] Rejection),
    #[error("step {step} ({mv:?}) is illegal on its intermediate grid: {reason}")]
    IllegalStep { step: usize, mv: GridMove, reason: Rejection },
}

/// Writes a legal generalised exchange as elementary exchanges. The sequence
/// reproduces `apply(g, m)` exactly and uses no cyclic permutations: rows are
/// sorted so that the arcs meeting the first block sit in one contiguous
/// band, the two column blocks are swapped one exchange at a time, and the
/// row sort is undone.
pub fn decompose_gen_exchange(g: &GridDiagram, m: &GridMove) -> Result<Vec<GridMove>, DecomposeError> {
    let GridMove::GenExchange { axis, s1, s2, s3, t1, t2 } = *m else {
        return Err(DecomposeError::WrongKind);
    };
    legal(g, m)?;
    let h = match axis {
        Axis::Cols => g.clone(),
        Axis::Rows => g.transpose(),
    };
    let mut steps = gen_exchange_cols(&h, s1, s2, s3, t1, t2);
    if axis == Axis::Rows {
        for s in steps.iter_mut() {
            *s = match *s {
                GridMove::ExchangeCols { c } => GridMove::ExchangeRows { r: c },
                GridMove::ExchangeRows { r } => GridMove::ExchangeCols { c: r },
                other => other,
            };
        }
    }
    check_replay(g, &steps)?;
    Ok(steps)
}

fn gen_exchange_cols(g: &GridDiagram, s1: usize, s2: usize, s3: usize, t1: usize, t2: usize) -> Vec<GridMove> {
    let n = g.n();
    let in_a = |c: usize| s1 <= c && c < s2;
    let in_b = |c: usize| s2 <= c && c < s3;
    // Rank 1 and 2 rows are the ones that can meet block A; they end up
    // contiguous, with the rows meeting block B below (rank 0) or above (3).
    let rank: Vec<u8> = g
        .row_spans()
        .iter()
        .enumerate()
        .map(|(r, &(a, b))| {
            let both_a = in_a(a) && in_a(b);
            let both_b = in_b(a) && in_b(b);
            if r < t1 {
                if both_a { 1 } else { 0 }
            } else if r < t2 {
                if both_b { 3 } else { 2 }
            } else if both_a {
                2
            } else {
                3
            }
        })
        .collect();
    let mut order = rank.clone();
    let mut row_swaps = Vec::new();
    for i in 1..n {
        let mut j = i;
        while j > 0 && order[j - 1] > order[j] {
            order.swap(j - 1, j);
            row_swaps.push(GridMove::ExchangeRows { r: j - 1 });
            j -= 1;
        }
    }
    let mut steps = row_swaps.clone();
    for k in 0..(s3 - s2) {
        let mut c = s2 + k;
        while c > s1 + k {
            steps.push(GridMove::ExchangeCols { c: c - 1 });
            c -= 1;
        }
    }
    steps.extend(row_swaps.iter().rev().copied());
    steps
}

/// Writes a legal generalised destabilisation as exchanges that slide the
/// short vertical arc next to the nearer of its two neighbours, followed by
/// one destabilisation.
pub fn decompose_gen_destabilize(g: &GridDiagram, m: &GridMove) -> Result<Vec<GridMove>, DecomposeError> {
    let GridMove::GenDestabilize { shared_vertex_col: s, row_a, row_b } = *m else {
        return Err(DecomposeError::WrongKind);
    };
    legal(g, m)?;
    let (p, q) = short_arc_partners(g, s, row_a, row_b);
    let dist = |t: usize| t.abs_diff(s);
    let target = if dist(p) <= dist(q) { p } else { q };
    let mut steps = Vec::new();
    let mut c = s;
    while c + 1 < target {
        steps.push(GridMove::ExchangeCols { c });
        c += 1;
    }
    while c > target + 1 {
        steps.push(GridMove::ExchangeCols { c: c - 1 });
        c -= 1;
    }
    steps.push(GridMove::Destabilize { block_col: c.min(target), block_row: row_a });
    check_replay(g, &steps)?;
    Ok(steps)
}

fn check_replay(g: &GridDiagram, steps: &[GridMove]) -> Result<(), DecomposeError> {
    let mut h = g.clone();
    for (step, mv) in steps.iter().enumerate() {
        if let Err(reason) = legal(&h, mv) {
            return Err(DecomposeError::IllegalStep { step, mv: *mv, reason });
        }
        h = apply_unchecked(&h, mv);
    }
    Ok(())
}

/// Finds a sequence that lowers the arc index by one: a destabilisation,
/// possibly after cyclic permutations that bring its block off the edge of
/// the grid, or a generalised destabilisation along a short vertical or
/// horizontal arc. Returns `None` when the grid has no short arc with two
/// distinct neighbours.
pub fn find_reduction(g: &GridDiagram) -> Option<Vec<GridMove>> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    // Plain blocks, including ones that wrap around the edges.
    for bc in 0..n {
        for br in 0..n {
            let (c1, r1) = ((bc + 1) % n, (br + 1) % n);
            let mut count = 0;
            for c in [bc, c1] {
                for r in [g.x_row()[c], g.o_row()[c]] {
                    if r == br || r == r1 {
                        count += 1;
                    }
                }
            }
            if count == 3 {
                let mut seq = Vec::new();
                let (mut c, mut r) = (bc, br);
                if c1 == 0 {
                    seq.push(GridMove::CyclicCols { shift: 1 });
                    c = 0;
                }
                if r1 == 0 {
                    seq.push(GridMove::CyclicRows { shift: 1 });
                    r = 0;
                }
                seq.push(GridMove::Destabilize { block_col: c, block_row: r });
                return Some(seq);
            }
        }
    }
    if let Some(seq) = short_column_reduction(g) {
        return Some(seq);
    }
    let t = g.transpose();
    short_column_reduction(&t).map(|seq| {
        seq.into_iter()
            .map(|m| match m {
                GridMove::CyclicRows { shift } => GridMove::CyclicCols { shift },
                GridMove::CyclicCols { shift } => GridMove::CyclicRows { shift },
                GridMove::ExchangeCols { c } => GridMove::ExchangeRows { r: c },
                GridMove::Destabilize { block_col, block_row } => {
                    GridMove::Destabilize { block_col: block_row, block_row: block_col }
                }
                other => other,
            })
            .collect()
    })
}

fn short_column_reduction(g: &GridDiagram) -> Option<Vec<GridMove>> {
    let n = g.n();
    for s in 0..n {
        let (lo, hi) = g.col_span(s);
        let (h, pre, row_a) = if hi == lo + 1 {
            (g.clone(), None, lo)
        } else if lo == 0 && hi == n - 1 {
            let m = GridMove::CyclicRows { shift: 1 };
            (apply_unchecked(g, &m), Some(m), 0)
        } else {
            continue;
        };
        let m = GridMove::GenDestabilize { shared_vertex_col: s, row_a, row_b: row_a + 1 };
        if legal(&h, &m).is_err() {
            continue;
        }
        let steps = decompose_gen_destabilize(&h, &m).ok()?;
        let mut seq: Vec<GridMove> = pre.into_iter().collect();
        seq.extend(steps);
        return Some(seq);
    }
    None
}

/// Applies a sequence of moves, checking each on its intermediate grid.
pub fn replay(g: &GridDiagram, moves: &[GridMove]) -> Result<GridDiagram, (usize, Rejection)> {
    let mut h = g.clone();
    for (i, m) in moves.iter().enumerate() {
        h = apply(&h, m).map_err(|e| (i, e))?;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: &[usize], o: &[usize]) -> GridDiagram {
        GridDiagram::new(x.to_vec(), o.to_vec()).unwrap()
    }

    fn g3() -> GridDiagram {
        g(&[1, 0, 2], &[0, 2, 1])
    }

    #[test]
    fn exchange_legality() {
        let t = GridDiagram::trivial();
        assert!(matches!(
            legal(&t, &GridMove::ExchangeCols { c: 0 }),
            Err(Rejection::SharedEndpoint { .. })
        ));
        let two = g(&[0, 1, 2, 3], &[1, 0, 3, 2]);
        assert_eq!(legal(&two, &GridMove::ExchangeCols { c: 1 }), Ok(()));
        let after = apply(&two, &GridMove::ExchangeCols { c: 1 }).unwrap();
        assert_eq!(after, g(&[0, 2, 1, 3], &[1, 3, 0, 2]));
    }

    #[test]
    fn interleaving_definition() {
        assert!(Interleaving::new(Pair::new(0, 3), Pair::new(1, 5)).interleaved);
        assert!(!Interleaving::new(Pair::new(0, 5), Pair::new(1, 3)).interleaved);
        assert!(!Interleaving::new(Pair::new(0, 1), Pair::new(2, 3)).interleaved);
    }

    #[test]
    fn destabilize_g3() {
        let m = GridMove::Destabilize { block_col: 0, block_row: 0 };
        assert_eq!(legal(&g3(), &m), Ok(()));
        assert_eq!(apply(&g3(), &m).unwrap(), GridDiagram::trivial());
        assert!(enumerate_moves(&g3(), &[MoveKind::Destabilize]).contains(&m));
    }

    #[test]
    fn stabilize_round_trips() {
        let t = GridDiagram::trivial();
        for marker in [Marker::X, Marker::O] {
            for col in 0..2 {
                for corner in Corner::ALL {
                    let m = GridMove::Stabilize { marker, col, row: t.row_of(marker, col), corner };
                    let big = apply(&t, &m).unwrap();
                    assert_eq!(big.n(), 3);
                    let back = inverse(&t, &m).unwrap();
                    assert_eq!(apply(&big, &back).unwrap(), t, "{m:?}");
                    let again = inverse(&big, &back).unwrap();
                    assert_eq!(again, m);
                }
            }
        }
    }

    #[test]
    fn enumerate_small() {
        let t = GridDiagram::trivial();
        assert!(enumerate_moves(&t, &[MoveKind::ExchangeCols]).is_empty());
        assert_eq!(enumerate_moves(&t, &[MoveKind::CyclicCols, MoveKind::CyclicRows]).len(), 4);
        assert_eq!(enumerate_moves(&t, &[MoveKind::Stabilize]).len(), 16);
        assert!(enumerate_moves(&t, &[MoveKind::Destabilize]).is_empty());
    }

    #[test]
    fn move_json_names() {
        let m = GridMove::ExchangeCols { c: 1 };
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"kind":"exchange_cols","c":1}"#);
        let s = GridMove::Stabilize { marker: Marker::X, col: 0, row: 1, corner: Corner::NW };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"stabilize","marker":"x","col":0,"row":1,"corner":"nw"}"#);
        assert_eq!(serde_json::from_str::<GridMove>(&text).unwrap(), s);
    }

    #[test]
    fn gen_exchange_with_clear_blocks() {
        // Two unlinked unknots side by side: swapping the halves is legal for
        // every band and needs no row sorting.
        let two = g(&[0, 1, 2, 3], &[1, 0, 3, 2]);
        let m = GridMove::GenExchange { axis: Axis::Cols, s1: 0, s2: 2, s3: 4, t1: 0, t2: 2 };
        assert_eq!(legal(&two, &m), Ok(()));
        let steps = decompose_gen_exchange(&two, &m).unwrap();
        assert!(steps.iter().all(|s| matches!(s, GridMove::ExchangeCols { .. })));
        assert_eq!(steps.len(), 4);
        assert_eq!(replay(&two, &steps).unwrap(), apply(&two, &m).unwrap());
    }

    #[test]
    fn reduction_finds_wrapped_blocks() {
        // G3 rotated so that its collapsible block straddles both edges.
        let h = g3().rotate(2, 2);
        let seq = find_reduction(&h).unwrap();
        let out = replay(&h, &seq).unwrap();
        assert_eq!(out.n(), 2);
        assert!(find_reduction(&GridDiagram::trivial()).is_none());
    }

    #[test]
    fn gen_destabilize_adjacent() {
        let m = GridMove::GenDestabilize { shared_vertex_col: 0, row_a: 0, row_b: 1 };
        assert_eq!(legal(&g3(), &m), Ok(()));
        let steps = decompose_gen_destabilize(&g3(), &m).unwrap();
        assert_eq!(steps, vec![GridMove::Destabilize { block_col: 0, block_row: 0 }]);
        assert_eq!(apply(&g3(), &m).unwrap(), GridDiagram::trivial());
    }
}
