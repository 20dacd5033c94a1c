use std::fmt;
use std::str::FromStr;

use super::Formula;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomId {
    /// Non-k-colourability, valid on a point-generated diff frame iff `C(X,R) > k`.
    Cf,
    /// Connectedness of a symmetric relation.
    Con,
    /// Connectedness for arbitrary relations.
    ConDirected,
    /// `p -> [!=]<!=>p`: D is symmetric.
    DiffSym,
    /// `<!=><!=>p -> Ep`: D plus the diagonal is transitive.
    DiffPseudotrans,
    /// `<>p -> Ep`: R is inside D plus the diagonal.
    DiffIncl,
    /// `p -> []<>p`: R is symmetric.
    B,
    /// `<>p -> <!=>p`: R is inside D.
    IrrIncl,
    /// `<>T`: every point has an R-successor.
    Serial,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::Cf,
        AxiomId::Con,
        AxiomId::ConDirected,
        AxiomId::DiffSym,
        AxiomId::DiffPseudotrans,
        AxiomId::DiffIncl,
        AxiomId::B,
        AxiomId::IrrIncl,
        AxiomId::Serial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Cf => "CF",
            AxiomId::Con => "CON",
            AxiomId::ConDirected => "CON_DIRECTED",
            AxiomId::DiffSym => "DIFF_SYM",
            AxiomId::DiffPseudotrans => "DIFF_PSEUDOTRANS",
            AxiomId::DiffIncl => "DIFF_INCL",
            AxiomId::B => "B",
            AxiomId::IrrIncl => "IRR_INCL",
            AxiomId::Serial => "SERIAL",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase().replace('-', "_");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == upper)
            .ok_or_else(|| Error::BadParameter(format!("unknown axiom `{s}`")))
    }
}

fn p(i: u32) -> Formula {
    Formula::var(i)
}

/// `A (OR_{i<k} (p_i & AND_{j<k, j!=i} ~p_j)) -> E (OR_{i<k} (p_i & <>p_i))`.
fn colourability(k: u32) -> Formula {
    let premise = Formula::or_all((0..k).map(|i| {
        Formula::and_all(
            std::iter::once(p(i)).chain((0..k).filter(|&j| j != i).map(|j| p(j).not())),
        )
    }));
    let conclusion = Formula::or_all((0..k).map(|i| p(i).and(p(i).diamond())));
    premise.forall().implies(conclusion.exists())
}

/// Builds the named axiom. `k` is required (and must be positive) for `CF`
/// and ignored otherwise.
pub fn axiom(id: AxiomId, k: Option<u32>) -> Result<Formula> {
    let p0 = p(0);
    let split = || p(0).exists().and(p(0).not().exists());
    Ok(match id {
        AxiomId::Cf => match k {
            Some(k) if k >= 1 => colourability(k),
            _ => return Err(Error::BadParameter("CF needs k >= 1".into())),
        },
        AxiomId::Con => split().implies(p0.clone().and(p0.not().diamond()).exists()),
        AxiomId::ConDirected => split().implies(
            p(0).and(p(0).not().diamond())
                .exists()
                .or(p(0).not().and(p(0).diamond()).exists()),
        ),
        AxiomId::DiffSym => p0.clone().implies(p0.diff_diamond().diff_box()),
        AxiomId::DiffPseudotrans => p0
            .clone()
            .diff_diamond()
            .diff_diamond()
            .implies(p0.exists()),
        AxiomId::DiffIncl => p0.clone().diamond().implies(p0.exists()),
        AxiomId::B => p0.clone().implies(p0.diamond().boxed()),
        AxiomId::IrrIncl => p0.clone().diamond().implies(p0.diff_diamond()),
        AxiomId::Serial => Formula::top().diamond(),
    })
}

/// Resolves generator shorthands such as `CF:3`, `CON` or `irr_incl`.
/// Returns `None` when `text` is not a shorthand at all.
pub fn shorthand(text: &str) -> Option<Result<Formula>> {
    let text = text.trim();
    let (name, k) = match text.split_once(':') {
        Some((name, k)) => (name, Some(k)),
        None => (text, None),
    };
    let id = name.parse::<AxiomId>().ok()?;
    let k = match k {
        None => None,
        Some(k) => match k.trim().parse::<u32>() {
            Ok(k) => Some(k),
            Err(_) => return Some(Err(Error::BadParameter(format!("bad k in `{text}`")))),
        },
    };
    Some(axiom(id, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn cf1_shape() {
        let expected = p(0).forall().implies(p(0).and(p(0).diamond()).exists());
        assert_eq!(axiom(AxiomId::Cf, Some(1)).unwrap(), expected);
    }

    #[test]
    fn cf2_matches_hand_written_text() {
        let text = "A((p0 & ~p1) | (p1 & ~p0)) -> E((p0 & <>p0) | (p1 & <>p1))";
        assert_eq!(axiom(AxiomId::Cf, Some(2)).unwrap(), parse(text).unwrap());
    }

    #[test]
    fn named_axioms_match_their_text() {
        let cases = [
            (AxiomId::Con, "E p0 & E ~p0 -> E (p0 & <>~p0)"),
            (
                AxiomId::ConDirected,
                "E p0 & E ~p0 -> E (p0 & <>~p0) | E (~p0 & <>p0)",
            ),
            (AxiomId::DiffSym, "p0 -> [!=]<!=>p0"),
            (AxiomId::DiffPseudotrans, "<!=><!=>p0 -> E p0"),
            (AxiomId::DiffIncl, "<>p0 -> E p0"),
            (AxiomId::B, "p0 -> []<>p0"),
            (AxiomId::IrrIncl, "<>p0 -> <!=>p0"),
            (AxiomId::Serial, "<>T"),
        ];
        for (id, text) in cases {
            assert_eq!(axiom(id, None).unwrap(), parse(text).unwrap(), "{id}");
        }
    }

    #[test]
    fn cf_requires_positive_k() {
        assert!(matches!(
            axiom(AxiomId::Cf, None),
            Err(Error::BadParameter(_))
        ));
        assert!(matches!(
            axiom(AxiomId::Cf, Some(0)),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn cf_closure_grows_with_k() {
        let sizes: Vec<usize> = (1..=5)
            .map(|k| axiom(AxiomId::Cf, Some(k)).unwrap().subformulas().len())
            .collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
        // Each step adds at least the k new conjunction blocks.
        assert!(sizes[4] - sizes[3] > sizes[1] - sizes[0]);
    }

    #[test]
    fn shorthands() {
        assert_eq!(
            shorthand("CF:2").unwrap().unwrap(),
            axiom(AxiomId::Cf, Some(2)).unwrap()
        );
        assert_eq!(
            shorthand("con").unwrap().unwrap(),
            axiom(AxiomId::Con, None).unwrap()
        );
        assert!(shorthand("p0 -> p1").is_none());
        assert!(shorthand("CF:x").unwrap().is_err());
        assert!(shorthand("CF").unwrap().is_err());
    }
}
