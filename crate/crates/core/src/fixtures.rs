//! Generator input documents and the bundled three-qubit fixtures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::mub::{CyclicGenerator, GeneratorTriple};

/// Input form for a generator: either a triple `(B, R, A)` or an explicit `C`,
/// each with an optional seed X-part.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<GeneratorTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Gf2Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_x: Option<Gf2Matrix>,
    /// Published generator matrix to compare `build_C` against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_c: Option<Gf2Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_structure: Option<Vec<usize>>,
}

impl GeneratorSpec {
    pub fn from_triple(name: impl Into<String>, triple: GeneratorTriple) -> Self {
        Self {
            name: name.into(),
            triple: Some(triple),
            ..Self::default()
        }
    }

    pub fn triple(&self) -> Option<&GeneratorTriple> {
        self.triple.as_ref()
    }

    pub fn generator(&self) -> Result<CyclicGenerator> {
        let g = match (&self.triple, &self.c) {
            (Some(t), None) => CyclicGenerator::from_triple(t)?,
            (None, Some(c)) => CyclicGenerator::from_explicit(c.clone())?,
            (Some(_), Some(_)) => {
                return Err(Error::Parse("give either `triple` or `c`, not both".into()))
            }
            (None, None) => return Err(Error::Parse("generator needs `triple` or `c`".into())),
        };
        match &self.seed_x {
            Some(sx) => g.with_seed_x(sx.clone()),
            None => Ok(g),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

const FIELD2: &str = include_str!("../fixtures/field2.json");
const FIELD3: &str = include_str!("../fixtures/field3.json");
const GROUP3: &str = include_str!("../fixtures/group3.json");
const SEMIGROUP3: &str = include_str!("../fixtures/semigroup3.json");
const SEMIGROUP3_PRINTED: &str = include_str!("../fixtures/semigroup3-printed.json");
const OFFSET3: &str = include_str!("../fixtures/offset3.json");

pub const FIXTURE_NAMES: [&str; 6] = [
    "field2",
    "field3",
    "group3",
    "semigroup3",
    "semigroup3-printed",
    "offset3",
];

/// The four valid three-qubit sets: field, group, semigroup and offset.
pub const THREE_QUBIT_SETS: [&str; 4] = ["field3", "group3", "semigroup3", "offset3"];

fn load(text: &str) -> GeneratorSpec {
    GeneratorSpec::from_json(text).expect("bundled fixture parses")
}

pub fn field2() -> GeneratorSpec {
    load(FIELD2)
}

pub fn field3() -> GeneratorSpec {
    load(FIELD3)
}

pub fn group3() -> GeneratorSpec {
    load(GROUP3)
}

pub fn semigroup3() -> GeneratorSpec {
    load(SEMIGROUP3)
}

pub fn semigroup3_printed() -> GeneratorSpec {
    load(SEMIGROUP3_PRINTED)
}

pub fn offset3() -> GeneratorSpec {
    load(OFFSET3)
}

pub fn by_name(name: &str) -> Option<GeneratorSpec> {
    Some(match name {
        "field2" => field2(),
        "field3" => field3(),
        "group3" => group3(),
        "semigroup3" => semigroup3(),
        "semigroup3-printed" => semigroup3_printed(),
        "offset3" => offset3(),
        _ => return None,
    })
}
