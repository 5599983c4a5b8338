//! Model-class and logic-class identifiers.

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModelBranch {
    Monolithic,
    MultiAgent,
}

/// Identifies a model class in the hierarchy. Only `Kripke` and `CGS` have a
/// payload format; `LTS` and `IS` are declared leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelClassId {
    name: &'static str,
    branch: ModelBranch,
}

impl ModelClassId {
    pub const KRIPKE: Self = Self::new("Kripke", ModelBranch::Monolithic);
    pub const LTS: Self = Self::new("LTS", ModelBranch::Monolithic);
    pub const CGS: Self = Self::new("CGS", ModelBranch::MultiAgent);
    pub const IS: Self = Self::new("IS", ModelBranch::MultiAgent);

    pub const ALL: [Self; 4] = [Self::KRIPKE, Self::CGS, Self::LTS, Self::IS];

    const fn new(name: &'static str, branch: ModelBranch) -> Self {
        Self { name, branch }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name == name)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn branch(&self) -> ModelBranch {
        self.branch
    }
}

impl fmt::Display for ModelClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl Serialize for ModelClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LogicBranch {
    Temporal,
    Strategic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogicClassId {
    name: &'static str,
    branch: LogicBranch,
}

impl LogicClassId {
    pub const CTL: Self = Self::new("CTL", LogicBranch::Temporal);
    pub const LTL: Self = Self::new("LTL", LogicBranch::Temporal);
    pub const ATL: Self = Self::new("ATL", LogicBranch::Strategic);
    pub const SL: Self = Self::new("SL", LogicBranch::Strategic);

    pub const ALL: [Self; 4] = [Self::CTL, Self::ATL, Self::LTL, Self::SL];

    const fn new(name: &'static str, branch: LogicBranch) -> Self {
        Self { name, branch }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name == name)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn branch(&self) -> LogicBranch {
        self.branch
    }

    /// Logic classes whose checkers can also decide formulas of `self`,
    /// starting with `self`. CTL embeds into ATL, and both embed into SL.
    pub fn served_by(&self) -> &'static [LogicClassId] {
        match self.name {
            "CTL" => &[Self::CTL, Self::ATL, Self::SL],
            "ATL" => &[Self::ATL, Self::SL],
            "LTL" => &[Self::LTL, Self::SL],
            _ => &[Self::SL],
        }
    }
}

impl fmt::Display for LogicClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl Serialize for LogicClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_follow_the_hierarchy() {
        assert_eq!(ModelClassId::KRIPKE.branch(), ModelBranch::Monolithic);
        assert_eq!(ModelClassId::LTS.branch(), ModelBranch::Monolithic);
        assert_eq!(ModelClassId::CGS.branch(), ModelBranch::MultiAgent);
        assert_eq!(ModelClassId::IS.branch(), ModelBranch::MultiAgent);
        assert_eq!(LogicClassId::CTL.branch(), LogicBranch::Temporal);
        assert_eq!(LogicClassId::LTL.branch(), LogicBranch::Temporal);
        assert_eq!(LogicClassId::ATL.branch(), LogicBranch::Strategic);
        assert_eq!(LogicClassId::SL.branch(), LogicBranch::Strategic);
    }

    #[test]
    fn names_are_unique_and_resolvable() {
        for c in ModelClassId::ALL {
            assert_eq!(ModelClassId::from_name(c.name()), Some(c));
        }
        for c in LogicClassId::ALL {
            assert_eq!(LogicClassId::from_name(c.name()), Some(c));
        }
        assert_eq!(ModelClassId::from_name("Petri"), None);
    }
}
