//! Bimodal formulas over variables `p0, p1, ...`.
//!
//! Only five constructors are stored: variables, `F`, implication, the
//! relational diamond `<>` and the difference diamond `<!=>`. Everything
//! else (negation, conjunction, boxes, the universal modalities `E`/`A`)
//! is a macro that expands into those five.

mod axioms;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use axioms::{axiom, shorthand, AxiomId};
pub use parser::parse;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(u32),
    Bottom,
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    DiffDiamond(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn var(i: u32) -> Formula {
        Var(i)
    }

    pub fn bottom() -> Formula {
        Bottom
    }

    /// `T`, i.e. `F -> F`.
    pub fn top() -> Formula {
        Bottom.not()
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Implies(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        self.implies(Bottom)
    }

    /// `a | b` is `~a -> b`.
    pub fn or(self, rhs: Formula) -> Formula {
        self.not().implies(rhs)
    }

    /// `a & b` is `~(a -> ~b)`.
    pub fn and(self, rhs: Formula) -> Formula {
        self.implies(rhs.not()).not()
    }

    pub fn diamond(self) -> Formula {
        Diamond(Box::new(self))
    }

    pub fn diff_diamond(self) -> Formula {
        DiffDiamond(Box::new(self))
    }

    /// `[]a` is `~<>~a`.
    pub fn boxed(self) -> Formula {
        self.not().diamond().not()
    }

    /// `[!=]a` is `~<!=>~a`.
    pub fn diff_box(self) -> Formula {
        self.not().diff_diamond().not()
    }

    /// `E a` is `<!=>a | a`.
    pub fn exists(self) -> Formula {
        self.clone().diff_diamond().or(self)
    }

    /// `A a` is `[!=]a & a`.
    pub fn forall(self) -> Formula {
        self.clone().diff_box().and(self)
    }

    /// Left-folded conjunction; the empty conjunction is `T`.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-folded disjunction; the empty disjunction is `F`.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Bottom)
    }

    /// Variable indices occurring in the formula, ascending.
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Var(i) => {
                out.insert(*i);
            }
            Bottom => {}
            Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Diamond(a) | DiffDiamond(a) => a.collect_vars(out),
        }
    }

    /// Number of AST nodes, counting repeated subtrees every time they occur.
    pub fn node_count(&self) -> usize {
        match self {
            Var(_) | Bottom => 1,
            Implies(a, b) => 1 + a.node_count() + b.node_count(),
            Diamond(a) | DiffDiamond(a) => 1 + a.node_count(),
        }
    }

    /// Nesting depth of `<>` and `<!=>`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Var(_) | Bottom => 0,
            Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            Diamond(a) | DiffDiamond(a) => 1 + a.modal_depth(),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Var(_) | Bottom => vec![],
            Implies(a, b) => vec![a, b],
            Diamond(a) | DiffDiamond(a) => vec![a],
        }
    }

    /// The set of all subformulas, the formula itself included.
    pub fn subformulas(&self) -> FormulaSet {
        let mut set = FormulaSet::new();
        self.collect_subformulas(&mut set.0);
        set
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.contains(self) {
            return;
        }
        for c in self.children() {
            c.collect_subformulas(out);
        }
        out.insert(self.clone());
    }

    /// Simultaneous substitution; variables outside the map are kept.
    pub fn substitute(&self, map: &BTreeMap<u32, Formula>) -> Formula {
        match self {
            Var(i) => map.get(i).cloned().unwrap_or(Var(*i)),
            Bottom => Bottom,
            Implies(a, b) => a.substitute(map).implies(b.substitute(map)),
            Diamond(a) => a.substitute(map).diamond(),
            DiffDiamond(a) => a.substitute(map).diff_diamond(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var(i) => write!(f, "p{i}"),
            Bottom => f.write_str("F"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            Diamond(a) => write!(f, "<>{a}"),
            DiffDiamond(a) => write!(f, "<!=>{a}"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Reads either a generator shorthand (`CF:3`, `CON`, ...) or formula text.
pub fn read(text: &str) -> crate::Result<Formula> {
    shorthand(text).unwrap_or_else(|| parse(text))
}

/// A finite, deduplicated set of formulas in structural order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormulaSet(BTreeSet<Formula>);

impl FormulaSet {
    pub fn new() -> Self {
        FormulaSet(BTreeSet::new())
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.0.insert(f)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Every member's immediate subformulas are members too.
    pub fn is_sub_closed(&self) -> bool {
        self.0
            .iter()
            .all(|f| f.children().into_iter().all(|c| self.0.contains(c)))
    }

    /// The union of `Sub(f)` over all members.
    pub fn sub_closure(&self) -> FormulaSet {
        let mut out = BTreeSet::new();
        for f in &self.0 {
            f.collect_subformulas(&mut out);
        }
        FormulaSet(out)
    }

    pub fn extend<I: IntoIterator<Item = Formula>>(&mut self, items: I) {
        self.0.extend(items);
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        FormulaSet(iter.into_iter().collect())
    }
}

impl IntoIterator for FormulaSet {
    type Item = Formula;
    type IntoIter = std::collections::btree_set::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = std::collections::btree_set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn printing_uses_canonical_tokens() {
        assert_eq!(Bottom.diamond().to_string(), "<>F");
        assert_eq!(p(0).implies(p(1)).to_string(), "(p0 -> p1)");
        assert_eq!(p(2).diff_diamond().to_string(), "<!=>p2");
    }

    #[test]
    fn subformulas_of_small_formulas() {
        assert_eq!(
            Bottom.subformulas().iter().collect::<Vec<_>>(),
            vec![&Bottom]
        );

        let dp = p(0).diamond();
        let sub = dp.subformulas();
        assert_eq!(sub.len(), 2);
        assert!(sub.contains(&dp) && sub.contains(&p(0)));

        // p0 -> <>p0 has nodes {->, p0, <>, p0}; p0 is shared.
        let f = p(0).implies(p(0).diamond());
        let sub = f.subformulas();
        assert_eq!(sub.len(), 3);
        assert_eq!(f.node_count(), 4);
        assert!(sub.is_sub_closed());
    }

    #[test]
    fn substitution_examples() {
        let s: BTreeMap<_, _> = [(0, p(1).diamond())].into();
        assert_eq!(p(0).substitute(&s), p(1).diamond());

        let f = p(0).diamond().or(p(1));
        let s: BTreeMap<_, _> = [(0, Bottom)].into();
        assert_eq!(f.substitute(&s), Bottom.diamond().or(p(1)));
    }

    #[test]
    fn empty_folds() {
        assert_eq!(Formula::and_all([]), Formula::top());
        assert_eq!(Formula::or_all([]), Bottom);
        assert_eq!(Formula::and_all([p(3)]), p(3));
        assert_eq!(Formula::or_all([p(0), p(1), p(2)]), p(0).or(p(1)).or(p(2)));
    }

    #[test]
    fn modal_depth_counts_both_diamonds() {
        let f = p(0).diamond().diff_diamond().implies(p(1).diamond());
        assert_eq!(f.modal_depth(), 2);
        assert_eq!(Formula::top().modal_depth(), 0);
    }
}
