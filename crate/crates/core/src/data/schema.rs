use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which in-vitro characteristic the targets represent. Drives target
/// validation ranges, target scaling and the accuracy criterion used in
/// evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// Oral fast disintegrating film: one target, disintegration time in
    /// seconds.
    Ofdf,
    /// Sustained release matrix tablet: cumulative % released at ordered
    /// time points (typically 2/4/6/8 h).
    Srmt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: ColumnKind,
}

impl FeatureColumn {
    pub fn numeric(name: &str) -> Self {
        FeatureColumn {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
        }
    }

    pub fn categorical(name: &str) -> Self {
        FeatureColumn {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
        }
    }
}

fn default_id_column() -> String {
    "record_id".to_string()
}

/// Declares the column layout of a dataset: which CSV columns are features
/// (and of what kind), which are targets, which carries the API group label.
///
/// The layout is user-declared per dataset rather than hard-coded; example
/// schemas for the two supported dosage forms ship with [`crate::synth`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    /// Name of the unique record identifier column.
    #[serde(default = "default_id_column")]
    pub id: String,
    pub features: Vec<FeatureColumn>,
    pub targets: Vec<String>,
    /// Name of the API group column.
    pub group: String,
    pub task_kind: TaskKind,
}

impl DatasetSchema {
    /// Checks the structural invariants: at least one feature and one target,
    /// no column claimed by two roles, and a target count compatible with the
    /// task kind.
    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Schema("schema declares no feature columns".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Schema("schema declares no target columns".into()));
        }
        if self.task_kind == TaskKind::Ofdf && self.targets.len() != 1 {
            return Err(Error::Schema(format!(
                "ofdf task requires exactly one target column, got {}",
                self.targets.len()
            )));
        }
        let mut seen: Vec<&str> = Vec::new();
        for name in std::iter::once(self.id.as_str())
            .chain(std::iter::once(self.group.as_str()))
            .chain(self.features.iter().map(|f| f.name.as_str()))
            .chain(self.targets.iter().map(String::as_str))
        {
            if seen.contains(&name) {
                return Err(Error::Schema(format!(
                    "column {name:?} appears in more than one role"
                )));
            }
            seen.push(name);
        }
        Ok(())
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureColumn> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn numeric_features(&self) -> impl Iterator<Item = &FeatureColumn> {
        self.features
            .iter()
            .filter(|f| f.kind == ColumnKind::Numeric)
    }

    pub fn categorical_features(&self) -> impl Iterator<Item = &FeatureColumn> {
        self.features
            .iter()
            .filter(|f| f.kind == ColumnKind::Categorical)
    }

    /// Valid range for a single target value under this task.
    pub fn target_range(&self) -> (f64, f64) {
        match self.task_kind {
            TaskKind::Ofdf => (0.0, 200.0),
            TaskKind::Srmt => (0.0, 100.0),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: DatasetSchema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// The nine molecular descriptors representing an API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSet {
    pub molecular_weight: f64,
    pub xlogp3: f64,
    pub h_bond_donors: u32,
    pub h_bond_acceptors: u32,
    pub rotatable_bonds: u32,
    pub topological_polar_surface_area: f64,
    pub heavy_atom_count: u32,
    pub complexity: f64,
    pub log_s: f64,
}

impl DescriptorSet {
    /// Canonical column names, in field order.
    pub const COLUMN_NAMES: [&'static str; 9] = [
        "molecular_weight",
        "xlogp3",
        "h_bond_donors",
        "h_bond_acceptors",
        "rotatable_bonds",
        "topological_polar_surface_area",
        "heavy_atom_count",
        "complexity",
        "log_s",
    ];

    pub fn validate(&self) -> Result<()> {
        let row = self.to_row();
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(
                "descriptor values must all be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn to_row(&self) -> [f64; 9] {
        [
            self.molecular_weight,
            self.xlogp3,
            f64::from(self.h_bond_donors),
            f64::from(self.h_bond_acceptors),
            f64::from(self.rotatable_bonds),
            self.topological_polar_surface_area,
            f64::from(self.heavy_atom_count),
            self.complexity,
            self.log_s,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_schema() -> DatasetSchema {
        DatasetSchema {
            id: "record_id".into(),
            features: vec![
                FeatureColumn::numeric("x1"),
                FeatureColumn::categorical("polymer"),
            ],
            targets: vec!["dt_s".into()],
            group: "api".into(),
            task_kind: TaskKind::Ofdf,
        }
    }

    #[test]
    fn valid_schema_passes() {
        toy_schema().validate().unwrap();
    }

    #[test]
    fn duplicate_role_rejected() {
        let mut s = toy_schema();
        s.group = "x1".into();
        assert!(matches!(s.validate(), Err(Error::Schema(_))));
    }

    #[test]
    fn ofdf_requires_single_target() {
        let mut s = toy_schema();
        s.targets = vec!["a".into(), "b".into()];
        assert!(matches!(s.validate(), Err(Error::Schema(_))));
    }

    #[test]
    fn descriptor_row_has_nine_values() {
        let d = DescriptorSet {
            molecular_weight: 300.0,
            xlogp3: 2.1,
            h_bond_donors: 1,
            h_bond_acceptors: 4,
            rotatable_bonds: 5,
            topological_polar_surface_area: 60.0,
            heavy_atom_count: 21,
            complexity: 350.0,
            log_s: -3.2,
        };
        d.validate().unwrap();
        assert_eq!(d.to_row().len(), DescriptorSet::COLUMN_NAMES.len());
    }
}
