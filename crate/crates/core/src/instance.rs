//! The ambient finite category: universe, κ, clause variant, mode and co-slice base.

use alloc::format;

use crate::atoms::{AtomSet, MAX_REPRESENTABLE_ATOMS};
use crate::error::Error;
use crate::family::Family;

/// Default hard cap on the universe size.
pub const DEFAULT_UNIVERSE_CAP: usize = 16;

/// Which clause family decides the labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Variant {
    /// Bounds read off `|x|` and `x ∪ y'`, for κ-directed objects.
    Qt,
    /// Bounds read off `|x ∩ y|` and `(x ∩ y) ∪ y'`; cofibrations by chains.
    St,
}

/// Which category the objects and arrows live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mode {
    /// All families, plain inclusion-domination arrows.
    #[cfg_attr(feature = "serde", serde(rename = "st"))]
    St,
    /// Cute κ-directed families.
    #[cfg_attr(feature = "serde", serde(rename = "qt"))]
    Qt,
    /// Cute families, arrows and labels compared through κ-union closures.
    #[cfg_attr(feature = "serde", serde(rename = "qt+"))]
    QtPlus,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::St => "st",
            Mode::Qt => "qt",
            Mode::QtPlus => "qt+",
        }
    }
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Qt => "qt",
            Variant::St => "st",
        }
    }
}

/// Orientation of the quantifiers in the cofibration clause.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum COrientation {
    /// `∀y ∃x`: every target member is bounded by some source member.
    #[default]
    Normative,
    /// `∀x ∃y`, as the κ-labelling is sometimes written.
    Printed,
}

/// Deliberate clause corruptions used to check that the suites notice them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mutation {
    /// `|y \ x| < κ` becomes `|y \ x| <= κ` in the (wc) clause.
    FlipWcComparison,
    /// Source quantifiers range over `X` instead of `X ∪ {∅}`.
    DropEmptyAdjunction,
    /// The absorbed bound `max(a, κ)` becomes the literal sum `a + κ`.
    SumInsteadOfMax,
}

impl Mutation {
    pub const ALL: [Mutation; 3] =
        [Mutation::FlipWcComparison, Mutation::DropEmptyAdjunction, Mutation::SumInsteadOfMax];
}

/// Diagnostic switches on the label clauses. The default is the normative reading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClauseConfig {
    pub c_orientation: COrientation,
    /// When false, the (w) clause quantifies over `X` only (no `∅` adjoined).
    pub w_adjoins_empty: bool,
    pub mutation: Option<Mutation>,
}

impl ClauseConfig {
    pub const NORMATIVE: ClauseConfig =
        ClauseConfig { c_orientation: COrientation::Normative, w_adjoins_empty: true, mutation: None };
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    universe: usize,
    kappa: usize,
    pub variant: Variant,
    pub mode: Mode,
    base: Option<Family>,
    pub clauses: ClauseConfig,
}

impl Instance {
    /// An instance in Qt mode with qt-style clauses and no co-slice base.
    pub fn new(universe: usize, kappa: usize) -> Result<Self, Error> {
        Self::with_cap(universe, kappa, DEFAULT_UNIVERSE_CAP)
    }

    /// Like [`Instance::new`], with an explicit universe cap (at most 32).
    pub fn with_cap(universe: usize, kappa: usize, cap: usize) -> Result<Self, Error> {
        let cap = cap.min(MAX_REPRESENTABLE_ATOMS);
        if universe > cap {
            return Err(Error::UniverseTooLarge { requested: universe, cap });
        }
        if universe == 0 {
            return Err(Error::InvalidInstance("universe must have at least one atom".into()));
        }
        if kappa == 0 || kappa > universe {
            return Err(Error::InvalidInstance(format!(
                "kappa must satisfy 1 <= kappa <= {universe}, got {kappa}"
            )));
        }
        Ok(Instance {
            universe,
            kappa,
            variant: Variant::Qt,
            mode: Mode::Qt,
            base: None,
            clauses: ClauseConfig::NORMATIVE,
        })
    }

    pub fn variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mutated(mut self, mutation: Mutation) -> Self {
        self.clauses.mutation = Some(mutation);
        self
    }

    pub fn clauses(mut self, clauses: ClauseConfig) -> Self {
        self.clauses = clauses;
        self
    }

    pub fn base(mut self, base: Family) -> Result<Self, Error> {
        self.validate(&base)?;
        self.base = Some(base.canonicalize());
        Ok(self)
    }

    pub fn without_base(mut self) -> Self {
        self.base = None;
        self
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// The co-slice base, if any.
    pub fn base_family(&self) -> Option<&Family> {
        self.base.as_ref()
    }

    /// The co-slice base, defaulting to the empty family ⊥.
    pub fn base_or_bottom(&self) -> Family {
        self.base.clone().unwrap_or_else(Family::bottom)
    }

    pub fn full_set(&self) -> AtomSet {
        AtomSet::full(self.universe)
    }

    /// The object `{universe}`.
    pub fn top(&self) -> Family {
        Family::from_sets([self.full_set()])
    }

    /// The absorbed cardinal sum `a + κ`, read as `max(a, κ)` at finite scale.
    #[inline]
    pub fn bound(&self, a: usize) -> usize {
        if self.clauses.mutation == Some(Mutation::SumInsteadOfMax) {
            a + self.kappa
        } else {
            a.max(self.kappa)
        }
    }

    /// "Small": fewer than κ atoms.
    #[inline]
    pub fn is_small(&self, size: usize) -> bool {
        if self.clauses.mutation == Some(Mutation::FlipWcComparison) {
            size <= self.kappa
        } else {
            size < self.kappa
        }
    }

    /// Whether source quantifiers adjoin the empty set (the (w) clause has its own switch).
    pub(crate) fn adjoins_empty(&self) -> bool {
        self.clauses.mutation != Some(Mutation::DropEmptyAdjunction)
    }

    pub(crate) fn w_adjoins_empty(&self) -> bool {
        self.adjoins_empty() && self.clauses.w_adjoins_empty
    }

    pub fn validate(&self, family: &Family) -> Result<(), Error> {
        let full = self.full_set();
        for m in family.members() {
            if !m.is_subset(full) {
                let atom = m.difference(full).atoms().next().unwrap_or(0);
                return Err(Error::AtomOutOfRange { atom, universe: self.universe });
            }
        }
        Ok(())
    }

    pub fn validate_set(&self, set: AtomSet) -> Result<(), Error> {
        if !set.is_subset(self.full_set()) {
            let atom = set.difference(self.full_set()).atoms().next().unwrap_or(0);
            return Err(Error::AtomOutOfRange { atom, universe: self.universe });
        }
        Ok(())
    }
}
