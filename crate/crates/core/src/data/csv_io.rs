use std::collections::BTreeMap;
use std::path::Path;

use crate::data::{ColumnKind, Dataset, DatasetSchema, FormulationRecord};
use crate::error::{Error, Result};

/// Column positions resolved against a header row.
struct HeaderMap {
    id: usize,
    group: usize,
    features: Vec<(usize, ColumnKind, String)>,
    targets: Vec<(usize, String)>,
}

fn resolve_header(headers: &csv::StringRecord, schema: &DatasetSchema) -> Result<HeaderMap> {
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("header is missing column {name:?}")))
    };
    Ok(HeaderMap {
        id: find(&schema.id)?,
        group: find(&schema.group)?,
        features: schema
            .features
            .iter()
            .map(|f| Ok((find(&f.name)?, f.kind, f.name.clone())))
            .collect::<Result<_>>()?,
        targets: schema
            .targets
            .iter()
            .map(|t| Ok((find(t)?, t.clone())))
            .collect::<Result<_>>()?,
    })
}

fn parse_numeric(token: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| Error::Parse {
        row,
        msg: format!("non-numeric token {token:?} in numeric column {column:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            msg: format!("non-finite value {token:?} in numeric column {column:?}"),
        });
    }
    Ok(v)
}

fn read_records(
    path: &Path,
    schema: &DatasetSchema,
    require_targets: bool,
) -> Result<Vec<FormulationRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?
        .clone();

    let map = if require_targets {
        resolve_header(&headers, schema)?
    } else {
        // Targets are optional on prediction input; resolve them only when
        // every target column is present.
        let mut m = resolve_header(
            &headers,
            &DatasetSchema {
                targets: vec![],
                ..schema.clone()
            },
        )?;
        if schema
            .targets
            .iter()
            .all(|t| headers.iter().any(|h| h == t))
        {
            m.targets = schema
                .targets
                .iter()
                .map(|t| (headers.iter().position(|h| h == t).unwrap(), t.clone()))
                .collect();
        }
        m
    };

    let mut records = Vec::new();
    for (row_idx, result) in reader.records().enumerate() {
        let row_no = row_idx + 1;
        let row = result.map_err(|e| Error::Parse {
            row: row_no,
            msg: e.to_string(),
        })?;
        let cell = |idx: usize| -> &str { row.get(idx).unwrap_or("") };

        let mut numerics = BTreeMap::new();
        let mut categoricals = BTreeMap::new();
        for (idx, kind, name) in &map.features {
            match kind {
                ColumnKind::Numeric => {
                    numerics.insert(name.clone(), parse_numeric(cell(*idx), row_no, name)?);
                }
                ColumnKind::Categorical => {
                    categoricals.insert(name.clone(), cell(*idx).trim().to_string());
                }
            }
        }
        let targets = map
            .targets
            .iter()
            .map(|(idx, name)| parse_numeric(cell(*idx), row_no, name))
            .collect::<Result<Vec<f64>>>()?;

        records.push(FormulationRecord {
            record_id: cell(map.id).trim().to_string(),
            group_id: cell(map.group).trim().to_string(),
            categoricals,
            numerics,
            targets,
        });
    }
    Ok(records)
}

/// Loads a dataset from a UTF-8, comma-separated file with a header row.
/// Row order is preserved; the group index is built on construction.
pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<Dataset> {
    schema.validate()?;
    let records = read_records(path, schema, true)?;
    Dataset::new(schema.clone(), records)
}

/// Loads prediction input: the feature, id and group columns of `schema` are
/// required but target columns may be absent (records then carry an empty
/// target vector).
pub fn load_feature_csv(path: &Path, schema: &DatasetSchema) -> Result<Vec<FormulationRecord>> {
    schema.validate()?;
    read_records(path, schema, false)
}

/// Writes the dataset back to CSV in canonical column order
/// (id, group, features, targets). Numbers use the shortest representation
/// that round-trips, so load → save → load is record-level idempotent.
pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| {
        Error::io(path, std::io::Error::other(e))
    })?;
    let schema = ds.schema();
    let mut header: Vec<&str> = vec![&schema.id, &schema.group];
    header.extend(schema.features.iter().map(|f| f.name.as_str()));
    header.extend(schema.targets.iter().map(String::as_str));
    writer
        .write_record(&header)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;

    for rec in ds.records() {
        let mut row: Vec<String> = vec![rec.record_id.clone(), rec.group_id.clone()];
        for f in &schema.features {
            match f.kind {
                ColumnKind::Numeric => row.push(rec.numerics[&f.name].to_string()),
                ColumnKind::Categorical => row.push(rec.categoricals[&f.name].clone()),
            }
        }
        for t in &rec.targets {
            row.push(t.to_string());
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_fixtures::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_row_file_loads_with_group_index() {
        let f = write_temp(
            "record_id,api,x1,x2,polymer,dt_s\n\
             r1,A,1,10,HPMC,30\n\
             r2,A,2,20,PVA,40\n\
             r3,B,3,30,HPMC,50\n",
        );
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        assert_eq!(ds.n_records(), 3);
        assert_eq!(ds.group_index()["A"], vec![0, 1]);
        assert_eq!(ds.group_index()["B"], vec![2]);
        assert_eq!(ds.record(1).numerics["x2"], 20.0);
    }

    #[test]
    fn missing_group_column_is_schema_error() {
        let f = write_temp("record_id,x1,x2,polymer,dt_s\nr1,1,10,HPMC,30\n");
        let err = load_csv(f.path(), &toy_schema()).unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("api"), "message should name the column: {msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_token_reports_row_number() {
        let f = write_temp(
            "record_id,api,x1,x2,polymer,dt_s\n\
             r1,A,1,10,HPMC,30\n\
             r2,A,oops,20,PVA,40\n",
        );
        let err = load_csv(f.path(), &toy_schema()).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_record_id_is_integrity_error() {
        let f = write_temp(
            "record_id,api,x1,x2,polymer,dt_s\n\
             r1,A,1,10,HPMC,30\n\
             r1,A,2,20,PVA,40\n",
        );
        assert!(matches!(
            load_csv(f.path(), &toy_schema()),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn save_then_load_round_trips_records() {
        let ds = toy_dataset();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        save_csv(&ds, &path).unwrap();
        let reloaded = load_csv(&path, ds.schema()).unwrap();
        assert_eq!(reloaded.records(), ds.records());
        // and a second round trip is byte-identical
        let path2 = dir.path().join("toy2.csv");
        save_csv(&reloaded, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn feature_csv_allows_absent_targets() {
        let f = write_temp(
            "record_id,api,x1,x2,polymer\n\
             r1,A,1,10,HPMC\n",
        );
        let recs = load_feature_csv(f.path(), &toy_schema()).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].targets.is_empty());
    }
}
