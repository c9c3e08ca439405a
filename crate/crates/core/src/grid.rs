//! Grid diagrams: an `n x n` arrangement with one X and one O marker in every
//! column and every row. Columns carry the vertical arcs, rows the horizontal
//! ones, and the vertical strand is always over.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The two marker types of a grid diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    X,
    O,
}

impl Marker {
    pub fn other(self) -> Marker {
        match self {
            Marker::X => Marker::O,
            Marker::O => Marker::X,
        }
    }
}

/// One failed invariant of a candidate grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooSmall { n: usize },
    Length { which: Marker, len: usize, n: usize },
    OutOfRange { which: Marker, col: usize, row: i64 },
    RepeatedRow { which: Marker, row: usize, cols: [usize; 2] },
    Degenerate { col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |m: &Marker| match m {
            Marker::X => "x_row",
            Marker::O => "o_row",
        };
        match self {
            Violation::TooSmall { n } => write!(f, "n={n} is below the minimum arc index 2"),
            Violation::Length { which, len, n } => {
                write!(f, "{} has length {len}, expected {n}", name(which))
            }
            Violation::OutOfRange { which, col, row } => {
                write!(f, "{}[{col}]={row} is out of range", name(which))
            }
            Violation::RepeatedRow { which, row, cols } => write!(
                f,
                "{}[{}]={}[{}]={row} is not a permutation",
                name(which),
                cols[0],
                name(which),
                cols[1]
            ),
            Violation::Degenerate { col } => write!(f, "x_row[{col}]=o_row[{col}]"),
        }
    }
}

/// Result of [`validate`]: empty means the candidate is a valid grid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("invalid grid: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Checks every grid invariant on raw arrays and reports all violations.
pub fn validate(n: i64, x_row: &[i64], o_row: &[i64]) -> ValidationReport {
    let mut violations = Vec::new();
    if n < 2 {
        violations.push(Violation::TooSmall { n: n.max(0) as usize });
    }
    let n = n.max(0) as usize;
    let mut in_range = true;
    for (which, rows) in [(Marker::X, x_row), (Marker::O, o_row)] {
        if rows.len() != n {
            violations.push(Violation::Length { which, len: rows.len(), n });
            in_range = false;
            continue;
        }
        let mut seen = vec![usize::MAX; n];
        for (col, &row) in rows.iter().enumerate() {
            if row < 0 || row as usize >= n {
                violations.push(Violation::OutOfRange { which, col, row });
                in_range = false;
                continue;
            }
            let r = row as usize;
            if seen[r] != usize::MAX {
                violations.push(Violation::RepeatedRow { which, row: r, cols: [seen[r], col] });
            } else {
                seen[r] = col;
            }
        }
    }
    if in_range {
        for c in 0..n {
            if x_row[c] == o_row[c] {
                violations.push(Violation::Degenerate { col: c });
            }
        }
    }
    ValidationReport { violations }
}

/// A crossing of the vertical arc in `col` over the horizontal arc in `row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Crossing {
    pub col: usize,
    pub row: usize,
}

/// A link component, listed as the columns visited when walking from an X
/// marker along its row to the O marker, then along that column to its X.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub columns: Vec<usize>,
}

/// Witness that a grid is block diagonal after rotating it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCertificate {
    pub col_rotation: usize,
    pub row_rotation: usize,
    pub col_cut: usize,
    pub row_cut: usize,
}

impl SplitCertificate {
    /// Re-checks the certificate against `g`.
    pub fn verify(&self, g: &GridDiagram) -> bool {
        let n = g.n();
        if self.col_rotation >= n || self.row_rotation >= n {
            return false;
        }
        if self.col_cut == 0 || self.col_cut >= n || self.row_cut == 0 || self.row_cut >= n {
            return false;
        }
        let h = g.rotate(self.col_rotation, self.row_rotation);
        (0..n).all(|c| {
            let low = c < self.col_cut;
            [h.x_row[c], h.o_row[c]].iter().all(|&r| (r < self.row_cut) == low)
        })
    }
}

#[derive(Deserialize)]
struct RawGrid {
    n: i64,
    x: Vec<i64>,
    o: Vec<i64>,
}

impl TryFrom<RawGrid> for GridDiagram {
    type Error = GridError;

    fn try_from(raw: RawGrid) -> Result<Self, GridError> {
        GridDiagram::from_raw(raw.n, &raw.x, &raw.o)
    }
}

/// A valid grid diagram. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridDiagram {
    n: usize,
    #[serde(rename = "x")]
    x_row: Vec<usize>,
    #[serde(rename = "o")]
    o_row: Vec<usize>,
}

impl GridDiagram {
    /// Builds a grid from the X and O rows of each column.
    pub fn new(x_row: Vec<usize>, o_row: Vec<usize>) -> Result<Self, GridError> {
        let n = x_row.len();
        let xs: Vec<i64> = x_row.iter().map(|&v| v as i64).collect();
        let os: Vec<i64> = o_row.iter().map(|&v| v as i64).collect();
        let report = validate(n as i64, &xs, &os);
        if !report.is_ok() {
            return Err(GridError::Invalid(report.violations));
        }
        Ok(GridDiagram { n, x_row, o_row })
    }

    pub fn from_raw(n: i64, x_row: &[i64], o_row: &[i64]) -> Result<Self, GridError> {
        let report = validate(n, x_row, o_row);
        if !report.is_ok() {
            return Err(GridError::Invalid(report.violations));
        }
        Ok(GridDiagram {
            n: n as usize,
            x_row: x_row.iter().map(|&v| v as usize).collect(),
            o_row: o_row.iter().map(|&v| v as usize).collect(),
        })
    }

    /// Internal constructor for move code that already guarantees validity.
    pub(crate) fn from_parts(x_row: Vec<usize>, o_row: Vec<usize>) -> Self {
        let g = GridDiagram { n: x_row.len(), x_row, o_row };
        debug_assert!(
            validate(
                g.n as i64,
                &g.x_row.iter().map(|&v| v as i64).collect::<Vec<_>>(),
                &g.o_row.iter().map(|&v| v as i64).collect::<Vec<_>>()
            )
            .is_ok(),
            "move produced an invalid grid: {g:?}"
        );
        g
    }

    /// The arc index 2 presentation of the unknot.
    pub fn trivial() -> Self {
        GridDiagram { n: 2, x_row: vec![0, 1], o_row: vec![1, 0] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_row(&self) -> &[usize] {
        &self.x_row
    }

    pub fn o_row(&self) -> &[usize] {
        &self.o_row
    }

    pub fn row_of(&self, m: Marker, col: usize) -> usize {
        match m {
            Marker::X => self.x_row[col],
            Marker::O => self.o_row[col],
        }
    }

    /// Column of the X marker in each row.
    pub fn x_col(&self) -> Vec<usize> {
        invert(&self.x_row)
    }

    /// Column of the O marker in each row.
    pub fn o_col(&self) -> Vec<usize> {
        invert(&self.o_row)
    }

    /// Marker at a cell, if any.
    pub fn marker_at(&self, col: usize, row: usize) -> Option<Marker> {
        if self.x_row[col] == row {
            Some(Marker::X)
        } else if self.o_row[col] == row {
            Some(Marker::O)
        } else {
            None
        }
    }

    /// Row span `(lo, hi)` of the vertical arc in column `c`.
    pub fn col_span(&self, c: usize) -> (usize, usize) {
        let (a, b) = (self.x_row[c], self.o_row[c]);
        (a.min(b), a.max(b))
    }

    /// Column spans `(lo, hi)` of every row's horizontal arc.
    pub fn row_spans(&self) -> Vec<(usize, usize)> {
        let (xc, oc) = (self.x_col(), self.o_col());
        (0..self.n).map(|r| (xc[r].min(oc[r]), xc[r].max(oc[r]))).collect()
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        let spans = self.row_spans();
        let mut out = Vec::new();
        for c in 0..self.n {
            let (lo, hi) = self.col_span(c);
            for (r, &(a, b)) in spans.iter().enumerate().take(hi).skip(lo + 1) {
                if a < c && c < b {
                    out.push(Crossing { col: c, row: r });
                }
            }
        }
        out
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings().len()
    }

    pub fn components(&self) -> Vec<Component> {
        let o_col = self.o_col();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut columns = Vec::new();
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                columns.push(c);
                c = o_col[self.x_row[c]];
            }
            out.push(Component { columns });
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Rotates columns by `a` and rows by `b`: the marker at `(c, r)` moves
    /// to `((c + a) mod n, (r + b) mod n)`.
    pub fn rotate(&self, a: usize, b: usize) -> GridDiagram {
        let n = self.n;
        let mut x = vec![0; n];
        let mut o = vec![0; n];
        for c in 0..n {
            x[(c + a) % n] = (self.x_row[c] + b) % n;
            o[(c + a) % n] = (self.o_row[c] + b) % n;
        }
        GridDiagram { n, x_row: x, o_row: o }
    }

    /// Reflects the grid in the diagonal, so rows become columns. This swaps
    /// over and under at every crossing but keeps the crossing set.
    pub fn transpose(&self) -> GridDiagram {
        GridDiagram { n: self.n, x_row: self.x_col(), o_row: self.o_col() }
    }

    /// Looks for a rotation under which the grid is block diagonal. The
    /// search runs over column rotations, then row rotations, then cuts, each
    /// ascending, so the first certificate found is deterministic.
    pub fn is_disconnected(&self) -> Option<SplitCertificate> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let h = self.rotate(a, b);
                let mut max_row = 0;
                for k in 1..n {
                    max_row = max_row.max(h.x_row[k - 1]).max(h.o_row[k - 1]);
                    // k columns hold 2k markers, so filling rows 0..k exactly
                    // forces the complementary block as well.
                    if max_row == k - 1 {
                        return Some(SplitCertificate {
                            col_rotation: a,
                            row_rotation: b,
                            col_cut: k,
                            row_cut: k,
                        });
                    }
                }
            }
        }
        None
    }

    /// A key equal for two grids iff they differ by cyclic rotation of rows
    /// and columns. It is the least serialisation over the rotation orbit.
    pub fn canonical_key(&self) -> Vec<u8> {
        let n = self.n;
        let mut best: Option<Vec<u8>> = None;
        let mut buf = Vec::with_capacity(2 + 4 * n);
        for a in 0..n {
            // Lexicographic minimality forces x[0] = 0 after rotation, which
            // pins the row rotation for each column rotation.
            let b = (n - self.x_row[(n - a) % n]) % n;
            buf.clear();
            buf.extend_from_slice(&(n as u16).to_be_bytes());
            for rows in [&self.x_row, &self.o_row] {
                for c in 0..n {
                    let v = (rows[(c + n - a) % n] + b) % n;
                    buf.extend_from_slice(&(v as u16).to_be_bytes());
                }
            }
            if best.as_ref().map_or(true, |cur| buf < *cur) {
                best = Some(buf.clone());
            }
        }
        best.expect("n >= 2")
    }

    /// Text format: `n=<n>`, `X=<rows>`, `O=<rows>`, one per line.
    pub fn serialize(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        format!("n={}\nX={}\nO={}\n", self.n, join(&self.x_row), join(&self.o_row))
    }

    pub fn parse(text: &str) -> Result<GridDiagram, GridError> {
        let mut lines = text.split('\n').enumerate();
        let mut field = |key: &str| -> Result<(usize, &str), GridError> {
            for (i, line) in lines.by_ref() {
                let line = line.strip_suffix('\r').unwrap_or(line);
                if line.trim().is_empty() {
                    continue;
                }
                let prefix = format!("{key}=");
                return match line.strip_prefix(&prefix) {
                    Some(rest) => Ok((i + 1, rest)),
                    None => Err(GridError::Parse {
                        line: i + 1,
                        col: 1,
                        msg: format!("expected `{prefix}`"),
                    }),
                };
            }
            Err(GridError::Parse { line: 0, col: 0, msg: format!("missing `{key}=` line") })
        };
        let (nl, ntext) = field("n")?;
        let n: i64 = ntext.trim().parse().map_err(|_| GridError::Parse {
            line: nl,
            col: 3,
            msg: format!("not an integer: `{ntext}`"),
        })?;
        let (xl, xtext) = field("X")?;
        let x = parse_list(xtext, xl)?;
        let (ol, otext) = field("O")?;
        let o = parse_list(otext, ol)?;
        for (i, line) in lines {
            if !line.trim().is_empty() {
                return Err(GridError::Parse { line: i + 1, col: 1, msg: "trailing content".into() });
            }
        }
        GridDiagram::from_raw(n, &x, &o)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serialises")
    }

    /// Text picture, top row first. Each cell is three characters wide; a
    /// crossing shows as `)|(`, the horizontal arc broken under the vertical.
    pub fn render_ascii(&self) -> String {
        let n = self.n;
        let spans = self.row_spans();
        let mut out = String::new();
        for r in (0..n).rev() {
            let (a, b) = spans[r];
            for c in 0..n {
                let (lo, hi) = self.col_span(c);
                let vert = lo < r && r < hi;
                let horiz = a < c && c < b;
                let cell = match (self.marker_at(c, r), vert, horiz) {
                    (Some(Marker::X), _, _) => [if c > a { '-' } else { ' ' }, 'X', if c < b { '-' } else { ' ' }],
                    (Some(Marker::O), _, _) => [if c > a { '-' } else { ' ' }, 'O', if c < b { '-' } else { ' ' }],
                    (None, true, true) => [')', '|', '('],
                    (None, true, false) => [' ', '|', ' '],
                    (None, false, true) => ['-', '-', '-'],
                    (None, false, false) => [' ', '.', ' '],
                };
                out.extend(cell);
            }
            let trimmed = out.trim_end_matches(' ').len();
            out.truncate(trimmed);
            out.push('\n');
        }
        out
    }

    /// SVG picture with one `<line>` per drawn segment. Horizontal arcs are
    /// broken around crossings; vertical arcs are drawn last, unbroken.
    pub fn render_svg(&self) -> String {
        const CELL: usize = 20;
        const GAP: usize = 4;
        let n = self.n;
        let size = CELL * (n + 1);
        let px = |c: usize| CELL * (c + 1);
        let py = |r: usize| size - CELL * (r + 1);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        let spans = self.row_spans();
        for (r, &(a, b)) in spans.iter().enumerate() {
            let mut cuts: Vec<usize> = ((a + 1)..b)
                .filter(|&c| {
                    let (lo, hi) = self.col_span(c);
                    lo < r && r < hi
                })
                .collect();
            cuts.push(b);
            let mut start = px(a);
            for c in cuts {
                let end = if c == b { px(b) } else { px(c) - GAP };
                out.push_str(&format!(
                    "  <line x1=\"{start}\" y1=\"{y}\" x2=\"{end}\" y2=\"{y}\" stroke=\"black\"/>\n",
                    y = py(r)
                ));
                start = px(c) + GAP;
            }
        }
        for c in 0..n {
            let (lo, hi) = self.col_span(c);
            out.push_str(&format!(
                "  <line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"black\"/>\n",
                x = px(c),
                y1 = py(lo),
                y2 = py(hi)
            ));
        }
        for c in 0..n {
            for (m, r) in [("X", self.x_row[c]), ("O", self.o_row[c])] {
                out.push_str(&format!(
                    "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"12\">{m}</text>\n",
                    x = px(c),
                    y = py(r)
                ));
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

fn parse_list(text: &str, line: usize) -> Result<Vec<i64>, GridError> {
    let mut out = Vec::new();
    let mut col = 3;
    for piece in text.split(',') {
        let v = piece.trim().parse::<i64>().map_err(|_| GridError::Parse {
            line,
            col,
            msg: format!("not an integer: `{piece}`"),
        })?;
        out.push(v);
        col += piece.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: &[usize], o: &[usize]) -> GridDiagram {
        GridDiagram::new(x.to_vec(), o.to_vec()).unwrap()
    }

    fn g5() -> GridDiagram {
        g(&[1, 2, 3, 4, 0], &[3, 4, 0, 1, 2])
    }

    /// Segment-intersection oracle: tests every vertical against every
    /// horizontal arc as geometric segments.
    fn crossings_oracle(g: &GridDiagram) -> usize {
        let n = g.n();
        let mut count = 0;
        for c in 0..n {
            for r in 0..n {
                let (y0, y1) = (g.x_row()[c].min(g.o_row()[c]), g.x_row()[c].max(g.o_row()[c]));
                let xs: Vec<usize> = (0..n).filter(|&k| g.x_row()[k] == r || g.o_row()[k] == r).collect();
                let (x0, x1) = (xs[0], xs[1]);
                if x0 < c && c < x1 && y0 < r && r < y1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn validate_examples() {
        assert!(validate(2, &[0, 1], &[1, 0]).is_ok());
        let bad = validate(2, &[0, 1], &[0, 1]);
        assert_eq!(bad.violations[0].to_string(), "x_row[0]=o_row[0]");
        assert!(validate(3, &[1, 0, 2], &[0, 2, 1]).is_ok());
        assert!(!validate(1, &[0], &[0]).is_ok());
        assert!(!validate(3, &[1, 1, 2], &[0, 2, 1]).is_ok());
        assert!(!validate(3, &[1, 0, 5], &[0, 2, 1]).is_ok());
    }

    #[test]
    fn crossing_examples() {
        assert!(GridDiagram::trivial().crossings().is_empty());
        let g3 = g(&[1, 0, 2], &[0, 2, 1]);
        assert_eq!(g3.crossings(), vec![Crossing { col: 1, row: 1 }]);
        assert_eq!(crossings_oracle(&g3), 1);
        assert_eq!(g5().crossing_count(), crossings_oracle(&g5()));
        assert_eq!(g5().crossing_count(), 4);
    }

    #[test]
    fn component_examples() {
        assert_eq!(GridDiagram::trivial().component_count(), 1);
        let two = g(&[0, 1, 2, 3], &[1, 0, 3, 2]);
        let comps = two.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].columns, vec![0, 1]);
        assert_eq!(comps[1].columns, vec![2, 3]);
        assert_eq!(g5().component_count(), 1);
    }

    #[test]
    fn disconnection_examples() {
        let two = g(&[0, 1, 2, 3], &[1, 0, 3, 2]);
        let cert = two.is_disconnected().unwrap();
        assert_eq!(
            cert,
            SplitCertificate { col_rotation: 0, row_rotation: 0, col_cut: 2, row_cut: 2 }
        );
        assert!(cert.verify(&two));
        assert!(GridDiagram::trivial().is_disconnected().is_none());
        assert!(g5().is_disconnected().is_none());
    }

    #[test]
    fn canonical_key_examples() {
        let t = GridDiagram::trivial();
        assert_eq!(t.canonical_key(), t.rotate(1, 0).canonical_key());
        assert_ne!(g(&[1, 0, 2], &[0, 2, 1]).canonical_key(), g5().canonical_key());
        assert_eq!(g5().canonical_key(), g5().rotate(2, 3).canonical_key());
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(GridDiagram::trivial().serialize(), "n=2\nX=0,1\nO=1,0\n");
        assert_eq!(GridDiagram::parse(&g5().serialize()).unwrap(), g5());
        let json = g5().to_json();
        assert_eq!(json, r#"{"n":5,"x":[1,2,3,4,0],"o":[3,4,0,1,2]}"#);
        assert_eq!(serde_json::from_str::<GridDiagram>(&json).unwrap(), g5());
        assert!(serde_json::from_str::<GridDiagram>(r#"{"n":2,"x":[0,1],"o":[0,1]}"#).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match GridDiagram::parse("n=3\nX=1,a,2\nO=0,2,1\n") {
            Err(GridError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 5)),
            other => panic!("{other:?}"),
        }
        match GridDiagram::parse("n=3\nY=1,0,2\n") {
            Err(GridError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            GridDiagram::parse("n=2\nX=0,1\nO=0,1\n"),
            Err(GridError::Invalid(_))
        ));
    }

    #[test]
    fn ascii_render_marks_crossings() {
        let g3 = g(&[1, 0, 2], &[0, 2, 1]);
        let pic = g3.render_ascii();
        assert_eq!(pic.matches(")|(").count(), 1);
        assert_eq!(g5().render_ascii().matches(")|(").count(), 4);
        assert_eq!(pic.lines().count(), 3);
    }

    #[test]
    fn svg_has_segment_per_piece() {
        let g3 = g(&[1, 0, 2], &[0, 2, 1]);
        let svg = g3.render_svg();
        // three horizontals, one broken once, plus three verticals
        assert_eq!(svg.matches("<line").count(), 7);
        assert!(svg.starts_with("<svg"));
    }
}
