//! JSON documents for generated sets, so a set can be written out, edited or
//! checked later without recomputing anything but the generator.

use serde::{Deserialize, Serialize};

use crate::entanglement::{class_partitions, StructureVector};
use crate::error::{Error, Result};
use crate::fixtures::GeneratorSpec;
use crate::gf2::Gf2Matrix;
use crate::mub::{CyclicGenerator, CyclicMubSet, GeneratorSource, MubClass, SetType};
use crate::pauli::SymplecticVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDocument {
    pub index: usize,
    pub generator: Gf2Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    /// Operators as letter strings, e.g. `"XZI"`.
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDocument {
    pub n: usize,
    pub d: usize,
    pub set_type: SetType,
    pub generator: GeneratorSpec,
    pub classes: Vec<ClassDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureVector>,
}

/// Input spec that rebuilds `g`: the triple when there is one, otherwise `C`.
pub fn generator_spec(g: &CyclicGenerator, name: &str) -> GeneratorSpec {
    let mut spec = match g.source() {
        GeneratorSource::Triple(t) => GeneratorSpec::from_triple(name, t.clone()),
        GeneratorSource::Explicit => GeneratorSpec {
            name: name.to_string(),
            c: Some(g.c().clone()),
            ..GeneratorSpec::default()
        },
    };
    if !g.has_standard_seed() {
        spec.seed_x = Some(g.seed_x().clone());
    }
    spec
}

impl SetDocument {
    /// Includes per-class partitions when they can be computed.
    pub fn from_set(set: &CyclicMubSet, name: &str) -> Self {
        let partitions = class_partitions(set).ok();
        let classes = set
            .classes
            .iter()
            .enumerate()
            .map(|(k, c)| ClassDocument {
                index: c.index,
                generator: c.generator.clone(),
                partition: partitions.as_ref().map(|p| p[k].to_string()),
                elements: c.elements.iter().map(|e| e.to_string()).collect(),
            })
            .collect();
        Self {
            n: set.n(),
            d: set.d(),
            set_type: set.set_type,
            generator: generator_spec(&set.generator, name),
            classes,
            structure: set.structure.clone(),
        }
    }

    /// Rebuilds the set exactly as listed: the generator comes from the spec,
    /// the classes and their elements from the document, so edits survive and
    /// show up in validation.
    pub fn to_set(&self) -> Result<CyclicMubSet> {
        let generator = self.generator.generator()?;
        if generator.n() != self.n {
            return Err(Error::LengthMismatch(generator.n(), self.n));
        }
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let elements = c
                    .elements
                    .iter()
                    .map(|s| s.parse::<SymplecticVector>())
                    .collect::<Result<Vec<_>>>()?;
                if let Some(bad) = elements.iter().find(|e| e.n() != self.n) {
                    return Err(Error::Parse(format!("element {bad} has the wrong length")));
                }
                Ok(MubClass {
                    index: c.index,
                    generator: c.generator.clone(),
                    elements,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CyclicMubSet {
            generator,
            classes,
            set_type: self.set_type,
            structure: self.structure.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::annotate;
    use crate::fixtures;
    use crate::mub::{build_classes, validate_set};

    #[test]
    fn round_trip_keeps_set_valid() {
        for name in fixtures::THREE_QUBIT_SETS {
            let mut set =
                build_classes(&fixtures::by_name(name).unwrap().generator().unwrap()).unwrap();
            annotate(&mut set).unwrap();
            let doc = SetDocument::from_set(&set, name);
            let back = SetDocument::from_json(&doc.to_json().unwrap()).unwrap();
            assert_eq!(back, doc);
            let rebuilt = back.to_set().unwrap();
            assert_eq!(rebuilt, set);
            assert!(validate_set(&rebuilt).is_valid());
        }
    }

    #[test]
    fn tampered_element_is_caught() {
        let set = build_classes(&fixtures::group3().generator().unwrap()).unwrap();
        let mut doc = SetDocument::from_set(&set, "group3");
        let victim = doc.classes[2].elements[0]
            .parse::<SymplecticVector>()
            .unwrap();
        let flipped = SymplecticVector::new(3, victim.z_bits() ^ 1, victim.x_bits()).unwrap();
        doc.classes[2].elements[0] = flipped.to_string();
        let report = validate_set(&doc.to_set().unwrap());
        assert!(!report.is_valid());
        assert!(report.failures().any(|c| c.detail.is_some()));
    }

    #[test]
    fn explicit_generator_spec_keeps_seed() {
        let g = fixtures::offset3().generator().unwrap();
        let spec = generator_spec(&g, "x");
        assert!(spec.triple.is_none());
        assert_eq!(spec.seed_x, fixtures::offset3().seed_x);
        assert_eq!(spec.generator().unwrap(), g);
    }
}
