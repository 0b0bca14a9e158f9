//! CSV interchange for the catalog and the interaction log.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use csv::StringRecord;

use super::{Course, Dataset, DatasetOverrides, Interaction};
use crate::error::{Error, Result};

pub const COURSE_HEADER: [&str; 8] = [
    "id",
    "category",
    "last_update",
    "level",
    "asset_types",
    "enrolments",
    "price",
    "description",
];

pub const INTERACTION_HEADER: [&str; 4] = ["learner_id", "course_id", "rating", "timestamp"];

/// Loads `courses.csv` and `interactions.csv` into a validated [`Dataset`].
pub fn load_catalog(
    courses: &Path,
    interactions: &Path,
    overrides: &DatasetOverrides,
) -> Result<Dataset> {
    let open = |p: &Path| File::open(p).map_err(|e| Error::io(p, e));
    let courses_vec = read_courses(open(courses)?, &courses.display().to_string())?;
    let log = read_interactions(open(interactions)?, &interactions.display().to_string())?;
    Dataset::new(courses_vec, log, overrides)
}

pub(crate) fn check_header(file: &str, found: &StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<String> = found.iter().map(|h| h.trim().to_owned()).collect();
    if found.len() != expected.len() || found.iter().zip(expected).any(|(f, e)| f != e) {
        return Err(Error::BadHeader {
            file: file.to_owned(),
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        });
    }
    Ok(())
}

pub(crate) struct RowParser<'a> {
    pub file: &'a str,
    pub row: usize,
    pub record: &'a StringRecord,
    pub header: &'a [&'a str],
}

impl RowParser<'_> {
    pub fn raw(&self, col: usize) -> &str {
        self.record.get(col).unwrap_or("")
    }

    pub fn parse<T: FromStr>(&self, col: usize) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(col).trim();
        raw.parse::<T>()
            .map_err(|e| self.error(col, format!("cannot parse `{raw}`: {e}")))
    }

    pub fn error(&self, col: usize, message: String) -> Error {
        Error::MalformedRow {
            file: self.file.to_owned(),
            row: self.row,
            field: self.header[col].to_owned(),
            message,
        }
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

/// Parses a course CSV. Row numbers in errors are 1-based data rows.
pub fn read_courses<R: Read>(input: R, file: &str) -> Result<Vec<Course>> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| Error::csv(file, e))?.clone();
    check_header(file, &header, &COURSE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let record = rec.map_err(|e| Error::csv(file, e))?;
        let p = RowParser {
            file,
            row: i + 1,
            record: &record,
            header: &COURSE_HEADER,
        };
        if record.len() != COURSE_HEADER.len() {
            return Err(p.error(
                record.len().min(COURSE_HEADER.len() - 1),
                format!(
                    "expected {} fields, found {}",
                    COURSE_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let category = p.raw(1).trim().to_owned();
        if category.is_empty() {
            return Err(p.error(1, "empty category".into()));
        }
        let level = p.raw(3).trim().to_owned();
        if level.is_empty() {
            return Err(p.error(3, "empty level".into()));
        }
        let price: f64 = p.parse(6)?;
        if !(price >= 0.0) || !price.is_finite() {
            return Err(p.error(
                6,
                format!("price must be a non-negative number, got {price}"),
            ));
        }
        out.push(Course {
            id: p.parse(0)?,
            category,
            last_update: p.parse(2)?,
            level,
            asset_types: p.parse(4)?,
            enrolments: p.parse(5)?,
            price,
            description: p.raw(7).to_owned(),
            mean_rating: None,
        });
    }
    Ok(out)
}

pub fn read_interactions<R: Read>(input: R, file: &str) -> Result<Vec<Interaction>> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| Error::csv(file, e))?.clone();
    check_header(file, &header, &INTERACTION_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let record = rec.map_err(|e| Error::csv(file, e))?;
        let p = RowParser {
            file,
            row: i + 1,
            record: &record,
            header: &INTERACTION_HEADER,
        };
        if record.len() != INTERACTION_HEADER.len() {
            return Err(p.error(
                record.len().min(INTERACTION_HEADER.len() - 1),
                format!(
                    "expected {} fields, found {}",
                    INTERACTION_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let rating: f64 = p.parse(2)?;
        if !rating.is_finite() {
            return Err(p.error(2, "rating must be finite".into()));
        }
        out.push(Interaction {
            learner_id: p.parse(0)?,
            course_id: p.parse(1)?,
            rating,
            timestamp: p.parse(3)?,
        });
    }
    Ok(out)
}

pub fn write_courses<W: Write>(out: W, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| Error::csv("courses", e);
    w.write_record(COURSE_HEADER).map_err(err)?;
    for c in ds.courses().values() {
        w.write_record([
            c.id.to_string(),
            c.category.clone(),
            c.last_update.to_string(),
            c.level.clone(),
            c.asset_types.to_string(),
            c.enrolments.to_string(),
            c.price.to_string(),
            c.description.clone(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("courses", e))
}

pub fn write_interactions<W: Write>(out: W, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| Error::csv("interactions", e);
    w.write_record(INTERACTION_HEADER).map_err(err)?;
    for r in ds.interactions() {
        w.write_record([
            r.learner_id.to_string(),
            r.course_id.to_string(),
            r.rating.to_string(),
            r.timestamp.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("interactions", e))
}
