//! Molecular data model: XYZ ingestion, distance-based bond perception, and
//! the valency tables used by labeling and metrics.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::element;
use crate::vec3::Vec3;

/// A 3D molecule: atomic numbers, coordinates in Å, optional scalar properties.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule3D {
    atoms: Vec<u8>,
    coords: Vec<Vec3>,
    props: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MolError {
    #[error("molecule must have at least one atom")]
    Empty,
    #[error("atoms and coords length mismatch: {atoms} vs {coords}")]
    LengthMismatch { atoms: usize, coords: usize },
    #[error("coordinate of atom {index} is not finite")]
    NonFiniteCoord { index: usize },
    #[error("atomic number 0 at atom {index}")]
    ZeroAtomicNumber { index: usize },
}

impl Molecule3D {
    pub fn new(atoms: Vec<u8>, coords: Vec<Vec3>) -> Result<Self, MolError> {
        if atoms.is_empty() {
            return Err(MolError::Empty);
        }
        if atoms.len() != coords.len() {
            return Err(MolError::LengthMismatch {
                atoms: atoms.len(),
                coords: coords.len(),
            });
        }
        if let Some(index) = atoms.iter().position(|&z| z == 0) {
            return Err(MolError::ZeroAtomicNumber { index });
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(MolError::NonFiniteCoord { index });
        }
        Ok(Molecule3D {
            atoms,
            coords,
            props: BTreeMap::new(),
        })
    }

    pub fn with_props(
        atoms: Vec<u8>,
        coords: Vec<Vec3>,
        props: BTreeMap<String, f64>,
    ) -> Result<Self, MolError> {
        let mut mol = Self::new(atoms, coords)?;
        mol.props = props;
        Ok(mol)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n ≥ 1 by construction
    }

    pub fn atoms(&self) -> &[u8] {
        &self.atoms
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn props(&self) -> &BTreeMap<String, f64> {
        &self.props
    }

    pub fn prop(&self, name: &str) -> Option<f64> {
        self.props.get(name).copied()
    }

    /// Returns a copy with atoms reordered so that new position `i` holds the
    /// atom previously at `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Molecule3D {
        debug_assert_eq!(perm.len(), self.len());
        Molecule3D {
            atoms: perm.iter().map(|&i| self.atoms[i]).collect(),
            coords: perm.iter().map(|&i| self.coords[i]).collect(),
            props: self.props.clone(),
        }
    }
}

/// An undirected vertex-colored graph with integer bond orders on edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    colors: Vec<u32>,
    /// Sorted, deduplicated `(u, v, order)` with `u < v`.
    edges: Vec<(usize, usize, u8)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("colors length {got} does not match vertex count {n}")]
    ColorLength { n: usize, got: usize },
    #[error("edge ({u}, {v}) out of range for {n} vertices")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("bond order {order} on edge ({u}, {v}) must be 1, 2, or 3")]
    BadOrder { u: usize, v: usize, order: u8 },
}

impl ColoredGraph {
    pub fn new(
        n: usize,
        colors: Vec<u32>,
        edges: impl IntoIterator<Item = (usize, usize, u8)>,
    ) -> Result<Self, GraphError> {
        if colors.len() != n {
            return Err(GraphError::ColorLength {
                n,
                got: colors.len(),
            });
        }
        let mut norm: Vec<(usize, usize, u8)> = Vec::new();
        for (a, b, order) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= n || b >= n {
                return Err(GraphError::EdgeOutOfRange { u: a, v: b, n });
            }
            if !(1..=3).contains(&order) {
                return Err(GraphError::BadOrder { u: a, v: b, order });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            norm.push((u, v, order));
        }
        norm.sort_unstable();
        if let Some(w) = norm
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(ColoredGraph {
            n,
            colors,
            edges: norm,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn edges(&self) -> &[(usize, usize, u8)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Bond order between `u` and `v`, or 0 if not adjacent.
    pub fn order_between(&self, u: usize, v: usize) -> u8 {
        if u == v {
            return 0;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        match self.edges.binary_search_by(|&(a, b, _)| (a, b).cmp(&key)) {
            Ok(i) => self.edges[i].2,
            Err(_) => 0,
        }
    }

    /// Adjacency lists as `(neighbor, order)` pairs, sorted by neighbor.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u8)>> {
        let mut adj = alloc::vec![Vec::new(); self.n];
        for &(u, v, order) in &self.edges {
            adj[u].push((v, order));
            adj[v].push((u, order));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Total bond order incident to each vertex.
    pub fn total_orders(&self) -> Vec<u32> {
        let mut tot = alloc::vec![0u32; self.n];
        for &(u, v, order) in &self.edges {
            tot[u] += order as u32;
            tot[v] += order as u32;
        }
        tot
    }

    /// The image of this graph under a relabeling: new vertex `i` is old
    /// vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> ColoredGraph {
        debug_assert_eq!(perm.len(), self.n);
        let mut inv = alloc::vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let colors = perm.iter().map(|&old| self.colors[old]).collect();
        let edges = self.edges.iter().map(|&(u, v, o)| (inv[u], inv[v], o));
        ColoredGraph::new(self.n, colors, edges).expect("relabeling preserves validity")
    }
}

/// Reference covalent bond lengths keyed by `(Z1, Z2, order)`, plus the
/// per-order distance margins used during perception.
#[derive(Debug, Clone)]
pub struct BondTable {
    /// Lengths in Å, key has Z1 ≤ Z2.
    lengths: BTreeMap<(u8, u8, u8), f64>,
    /// Margin in Å added to the reference length for orders 1, 2, 3.
    margins: [f64; 3],
}

/// Allowed total bond orders per atomic number.
#[derive(Debug, Clone)]
pub struct ValencyTable {
    allowed: BTreeMap<u8, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: expected `{expected}`")]
    Malformed { line: usize, expected: &'static str },
    #[error("line {line}: bad number `{field}`")]
    BadNumber { line: usize, field: String },
    #[error("line {line}: bond order must be 1-3")]
    BadOrder { line: usize },
    #[error("table is empty")]
    Empty,
}

fn parse_table_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl BondTable {
    /// Parses `Z1 Z2 order length_pm` records, one per line. `#` starts a
    /// comment. Lengths are stored in Å.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lengths = BTreeMap::new();
        for (line, l) in parse_table_lines(text) {
            let mut it = l.split_whitespace();
            let (z1, z2, order, pm) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => {
                    return Err(TableError::Malformed {
                        line,
                        expected: "Z1 Z2 order length_pm",
                    })
                }
            };
            if it.next().is_some() {
                return Err(TableError::Malformed {
                    line,
                    expected: "Z1 Z2 order length_pm",
                });
            }
            let bad = |field: &str| TableError::BadNumber {
                line,
                field: field.to_owned(),
            };
            let z1: u8 = z1.parse().map_err(|_| bad(z1))?;
            let z2: u8 = z2.parse().map_err(|_| bad(z2))?;
            let order: u8 = order.parse().map_err(|_| bad(order))?;
            let pm: f64 = pm.parse().map_err(|_| bad(pm))?;
            if !(1..=3).contains(&order) {
                return Err(TableError::BadOrder { line });
            }
            let key = (z1.min(z2), z1.max(z2), order);
            lengths.insert(key, pm / 100.0);
        }
        if lengths.is_empty() {
            return Err(TableError::Empty);
        }
        Ok(BondTable {
            lengths,
            margins: [0.10, 0.05, 0.03],
        })
    }

    /// The built-in reference table.
    pub fn default_table() -> Self {
        Self::parse(include_str!("../data/bond_lengths.txt")).expect("built-in table is valid")
    }

    pub fn set_margins(&mut self, margins: [f64; 3]) {
        self.margins = margins;
    }

    /// Reference length in Å for a pair at a given order, if tabulated.
    pub fn reference_length(&self, z1: u8, z2: u8, order: u8) -> Option<f64> {
        self.lengths.get(&(z1.min(z2), z1.max(z2), order)).copied()
    }

    /// Highest order k ∈ {3, 2, 1} whose reference length + margin covers the
    /// distance, or 0 for no bond.
    pub fn perceive_order(&self, z1: u8, z2: u8, distance: f64) -> u8 {
        for order in (1..=3u8).rev() {
            if let Some(len) = self.reference_length(z1, z2, order) {
                if distance <= len + self.margins[order as usize - 1] {
                    return order;
                }
            }
        }
        0
    }
}

impl ValencyTable {
    /// Parses `Z valence [valence ...]` records, one per line.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut allowed = BTreeMap::new();
        for (line, l) in parse_table_lines(text) {
            let mut it = l.split_whitespace();
            let bad = |field: &str| TableError::BadNumber {
                line,
                field: field.to_owned(),
            };
            let z: u8 = match it.next() {
                Some(z) => z.parse().map_err(|_| bad(z))?,
                None => {
                    return Err(TableError::Malformed {
                        line,
                        expected: "Z valence...",
                    })
                }
            };
            let mut vals = Vec::new();
            for v in it {
                let v: u32 = v.parse().map_err(|_| bad(v))?;
                if v == 0 {
                    return Err(TableError::BadNumber {
                        line,
                        field: "0".to_owned(),
                    });
                }
                vals.push(v);
            }
            if vals.is_empty() {
                return Err(TableError::Malformed {
                    line,
                    expected: "Z valence...",
                });
            }
            allowed.insert(z, vals);
        }
        if allowed.is_empty() {
            return Err(TableError::Empty);
        }
        Ok(ValencyTable { allowed })
    }

    pub fn default_table() -> Self {
        Self::parse(include_str!("../data/valencies.txt")).expect("built-in table is valid")
    }

    /// Whether `total` bond order is an allowed valency for element `z`.
    /// Elements absent from the table are never stable.
    pub fn is_stable(&self, z: u8, total: u32) -> bool {
        self.allowed
            .get(&z)
            .is_some_and(|vals| vals.contains(&total))
    }

    /// Largest allowed valency for `z`, used as the validity cap.
    pub fn max_allowed(&self, z: u8) -> Option<u32> {
        self.allowed
            .get(&z)
            .and_then(|vals| vals.iter().max().copied())
    }
}

/// Bond and valency tables bundled for the perception/metrics pipeline.
#[derive(Debug, Clone)]
pub struct ChemTables {
    pub bonds: BondTable,
    pub valencies: ValencyTable,
}

impl Default for ChemTables {
    fn default() -> Self {
        ChemTables {
            bonds: BondTable::default_table(),
            valencies: ValencyTable::default_table(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum XyzError {
    #[error("line {line}: malformed atom count `{text}`")]
    BadCount { line: usize, text: String },
    #[error("line {line}: unknown element {symbol}")]
    UnknownElement { line: usize, symbol: String },
    #[error("line {line}: non-numeric coordinate `{text}`")]
    BadCoordinate { line: usize, text: String },
    #[error("line {line}: expected `symbol x y z`, got `{text}`")]
    BadAtomLine { line: usize, text: String },
    #[error("line {line}: unexpected end of input ({missing} atom lines missing)")]
    Truncated { line: usize, missing: usize },
}

/// Streaming parser over concatenated XYZ blocks.
///
/// Each block is a count line, a comment line (scanned for `key=value`
/// properties), and `count` atom lines. After an error the iterator resyncs at
/// the next parseable count line, so one malformed block does not poison the
/// rest of the file.
pub struct XyzBlocks<'a> {
    lines: core::iter::Peekable<core::iter::Enumerate<core::str::Lines<'a>>>,
    failed: bool,
}

impl<'a> XyzBlocks<'a> {
    pub fn new(text: &'a str) -> Self {
        XyzBlocks {
            lines: text.lines().enumerate().peekable(),
            failed: false,
        }
    }

    fn skip_blank(&mut self) {
        while matches!(self.lines.peek(), Some((_, l)) if l.trim().is_empty()) {
            self.lines.next();
        }
    }

    /// After a block error, advance to the next line that parses as a bare
    /// atom count.
    fn resync(&mut self) {
        while let Some((_, l)) = self.lines.peek() {
            let t = l.trim();
            if !t.is_empty() && t.parse::<usize>().is_ok() {
                return;
            }
            self.lines.next();
        }
    }

    fn parse_block(&mut self) -> Option<Result<Molecule3D, XyzError>> {
        self.skip_blank();
        let (idx, count_line) = self.lines.next()?;
        let line = idx + 1;
        let count: usize = match count_line.trim().parse() {
            Ok(0) | Err(_) => {
                return Some(Err(XyzError::BadCount {
                    line,
                    text: count_line.trim().to_string(),
                }))
            }
            Ok(n) => n,
        };
        let props = match self.lines.next() {
            Some((_, comment)) => parse_props(comment),
            None => {
                return Some(Err(XyzError::Truncated {
                    line: line + 1,
                    missing: count,
                }))
            }
        };
        let mut atoms = Vec::with_capacity(count);
        let mut coords = Vec::with_capacity(count);
        for k in 0..count {
            let (idx, atom_line) = match self.lines.next() {
                Some(x) => x,
                None => {
                    return Some(Err(XyzError::Truncated {
                        line: line + 2 + k,
                        missing: count - k,
                    }))
                }
            };
            let line = idx + 1;
            let mut fields = atom_line.split_whitespace();
            let (sym, xs, ys, zs) =
                match (fields.next(), fields.next(), fields.next(), fields.next()) {
                    (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                    _ => {
                        return Some(Err(XyzError::BadAtomLine {
                            line,
                            text: atom_line.trim().to_string(),
                        }))
                    }
                };
            let z = match element::atomic_number(sym) {
                Some(z) => z,
                None => {
                    return Some(Err(XyzError::UnknownElement {
                        line,
                        symbol: sym.to_string(),
                    }))
                }
            };
            let mut coord = [0.0f64; 3];
            for (slot, text) in coord.iter_mut().zip([xs, ys, zs]) {
                *slot = match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        return Some(Err(XyzError::BadCoordinate {
                            line,
                            text: text.to_string(),
                        }))
                    }
                };
            }
            atoms.push(z);
            coords.push(Vec3::from(coord));
        }
        Some(Ok(Molecule3D {
            atoms,
            coords,
            props,
        }))
    }
}

impl Iterator for XyzBlocks<'_> {
    type Item = Result<Molecule3D, XyzError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            self.resync();
            self.failed = false;
        }
        let item = self.parse_block();
        if matches!(item, Some(Err(_))) {
            self.failed = true;
        }
        item
    }
}

fn parse_props(comment: &str) -> BTreeMap<String, f64> {
    let mut props = BTreeMap::new();
    for field in comment.split_whitespace() {
        if let Some((key, value)) = field.split_once('=') {
            if let Ok(v) = value.parse::<f64>() {
                if v.is_finite() && !key.is_empty() {
                    props.insert(key.to_string(), v);
                }
            }
        }
    }
    props
}

/// Parses concatenated XYZ blocks, failing on the first malformed block.
pub fn parse_xyz(text: &str) -> Result<Vec<Molecule3D>, XyzError> {
    XyzBlocks::new(text).collect()
}

/// Renders molecules as concatenated XYZ blocks (inverse of [`parse_xyz`]).
pub fn write_xyz(mols: &[Molecule3D]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for mol in mols {
        let _ = writeln!(out, "{}", mol.len());
        let mut first = true;
        for (key, value) in mol.props() {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{key}={value}");
            first = false;
        }
        out.push('\n');
        for (&z, c) in mol.atoms().iter().zip(mol.coords()) {
            let sym = element::symbol(z).unwrap_or("?");
            let _ = writeln!(out, "{sym} {:.6} {:.6} {:.6}", c.x, c.y, c.z);
        }
    }
    out
}

/// Perceives bonds from interatomic distances: for each pair, the highest
/// order whose reference length + margin covers the distance. Colors are the
/// atomic numbers.
pub fn infer_bonds(mol: &Molecule3D, table: &BondTable) -> ColoredGraph {
    let n = mol.len();
    let atoms = mol.atoms();
    let coords = mol.coords();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = coords[i].distance(coords[j]);
            let order = table.perceive_order(atoms[i], atoms[j], d);
            if order > 0 {
                edges.push((i, j, order));
            }
        }
    }
    let colors = atoms.iter().map(|&z| z as u32).collect();
    ColoredGraph::new(n, colors, edges).expect("pairwise edges are valid")
}

/// Partition of the vertices by edge connectivity, each component sorted,
/// components ordered by smallest member.
pub fn connected_components(g: &ColoredGraph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = alloc::vec![false; g.vertex_count()];
    let mut components = Vec::new();
    for start in 0..g.vertex_count() {
        if seen[start] {
            continue;
        }
        let mut stack = alloc::vec![start];
        let mut comp = BTreeSet::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.insert(v);
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        components.push(comp.into_iter().collect());
    }
    components
}
