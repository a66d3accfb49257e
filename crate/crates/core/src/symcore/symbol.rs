use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Role a coordinate or constant plays in an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    State,
    Input,
    /// Adapted coordinate `θⁱ = fⁱ(x,u)`.
    AdaptedTheta,
    /// Complementary adapted coordinate `ξʲ = hʲ(x,u)`.
    AdaptedXi,
    /// Constant parameter such as a sampling time. `nonzero` records the
    /// assumption that the parameter never vanishes.
    Parameter {
        nonzero: bool,
    },
    /// A forward-shifted input `u_[α]`.
    ShiftedInput,
    /// A flat-output coordinate `y_[α]`.
    FlatOutput,
}

struct SymbolData {
    name: Box<str>,
    kind: SymbolKind,
    shift: u32,
}

/// A named coordinate. Identity, hashing and ordering depend on the name only,
/// so names must be unique within a chart.
///
/// Ordering is "natural": digit runs compare numerically, so `x2 < x10`.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    pub fn new(name: impl Into<String>, kind: SymbolKind) -> Self {
        Self::with_shift(name, kind, 0)
    }

    pub fn with_shift(name: impl Into<String>, kind: SymbolKind, shift: u32) -> Self {
        let name: String = name.into();
        Symbol(Arc::new(SymbolData {
            name: name.into_boxed_str(),
            kind,
            shift,
        }))
    }

    pub fn state(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::State)
    }

    pub fn input(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::Input)
    }

    pub fn parameter(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::Parameter { nonzero: true })
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.0.kind
    }

    /// Shift order, 0 for unshifted coordinates.
    pub fn shift_order(&self) -> u32 {
        self.0.shift
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.0.kind, SymbolKind::Parameter { .. })
    }
}

/// Natural-order comparison of identifiers.
pub(crate) fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        let (ca, cb) = (ab[i], bb[j]);
        if ca.is_ascii_digit() && cb.is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = a[si..i].trim_start_matches('0');
            let db = b[sj..j].trim_start_matches('0');
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            if ca != cb {
                return ca.cmp(&cb);
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.cmp(b))
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        natural_cmp(&self.0.name, &other.0.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// Polynomial indeterminate: a plain symbol, or `sin`/`cos` of a symbol.
///
/// Trigonometric indeterminates are treated as independent variables subject
/// to the single side relation `cos² = 1 − sin²`, applied during reduction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    Sym(Symbol),
    Sin(Symbol),
    Cos(Symbol),
}

impl Var {
    pub fn symbol(&self) -> &Symbol {
        match self {
            Var::Sym(s) | Var::Sin(s) | Var::Cos(s) => s,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Sym(s) => write!(f, "{s}"),
            Var::Sin(s) => write!(f, "sin({s})"),
            Var::Cos(s) => write!(f, "cos({s})"),
        }
    }
}
