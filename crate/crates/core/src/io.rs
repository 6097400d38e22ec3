//! The JSON matrix/tensor file format.
//!
//! ```json
//! {"kind": "generator", "n": 2, "shape": [16, 16], "data": [0.0, ...]}
//! ```
//!
//! `data` is row-major. Hermitian operators store `[re, im]` pairs, the other
//! kinds store plain numbers. Doubles are written in shortest round-trip form.

use crate::algebra::{GeneratorMatrix, TransformMatrix};
use crate::tensor::{BlochTensor, HermitianOperator};
use crate::{CMatrix, Error, RMatrix, Result, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Hermitian,
    Bloch,
    Transform,
    Generator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

impl Data {
    fn len(&self) -> usize {
        match self {
            Data::Real(v) => v.len(),
            Data::Complex(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: DocumentKind,
    pub n: usize,
    pub shape: Vec<usize>,
    pub data: Data,
}

fn real_rows(m: &RMatrix) -> Vec<f64> {
    m.row_iter()
        .flat_map(|r| r.iter().copied().collect::<Vec<_>>())
        .collect()
}

impl Document {
    pub fn from_hermitian(op: &HermitianOperator) -> Self {
        let m = op.matrix();
        let data = m
            .row_iter()
            .flat_map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect();
        Document {
            kind: DocumentKind::Hermitian,
            n: op.n(),
            shape: vec![m.nrows(), m.ncols()],
            data: Data::Complex(data),
        }
    }

    pub fn from_bloch(r: &BlochTensor) -> Self {
        let data: Vec<f64> = r.coeffs().iter().copied().collect();
        Document {
            kind: DocumentKind::Bloch,
            n: r.n(),
            shape: vec![data.len()],
            data: Data::Real(data),
        }
    }

    pub fn from_transform(h: &TransformMatrix) -> Self {
        let m = h.matrix();
        Document {
            kind: DocumentKind::Transform,
            n: h.n(),
            shape: vec![m.nrows(), m.ncols()],
            data: Data::Real(real_rows(m)),
        }
    }

    pub fn from_generator(x: &GeneratorMatrix) -> Self {
        let m = x.matrix();
        Document {
            kind: DocumentKind::Generator,
            n: x.n(),
            shape: vec![m.nrows(), m.ncols()],
            data: Data::Real(real_rows(m)),
        }
    }

    fn expect_kind(&self, kind: DocumentKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Parse(format!(
                "expected a {kind:?} document, found {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Checks `shape` against `n` and the data length.
    fn check_shape(&self) -> Result<()> {
        crate::check_qubits(self.n)?;
        let expected = match self.kind {
            DocumentKind::Hermitian => vec![1 << self.n, 1 << self.n],
            DocumentKind::Bloch => vec![1 << (2 * self.n)],
            DocumentKind::Transform | DocumentKind::Generator => vec![1 << (2 * self.n), 1 << (2 * self.n)],
        };
        if self.shape != expected {
            return Err(Error::Shape(format!(
                "shape {:?} does not match n = {} (expected {expected:?})",
                self.shape, self.n
            )));
        }
        let total: usize = expected.iter().product();
        if self.data.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: self.data.len(),
            });
        }
        if matches!(self.data, Data::Complex(_)) && self.kind != DocumentKind::Hermitian {
            return Err(Error::Parse(format!("{:?} data must be real", self.kind)));
        }
        Ok(())
    }

    fn real_matrix(&self) -> Result<RMatrix> {
        self.check_shape()?;
        match &self.data {
            Data::Real(v) => Ok(RMatrix::from_row_slice(self.shape[0], self.shape[1], v)),
            Data::Complex(_) => Err(Error::Parse("expected real data".into())),
        }
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        self.expect_kind(DocumentKind::Hermitian)?;
        self.check_shape()?;
        let dim = self.shape[0];
        let entries: Vec<C64> = match &self.data {
            Data::Complex(v) => v.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
            Data::Real(v) => v.iter().map(|&re| C64::new(re, 0.0)).collect(),
        };
        HermitianOperator::new(CMatrix::from_row_slice(dim, dim, &entries))
    }

    pub fn to_bloch(&self) -> Result<BlochTensor> {
        self.expect_kind(DocumentKind::Bloch)?;
        self.check_shape()?;
        match &self.data {
            Data::Real(v) => BlochTensor::new(v.clone()),
            Data::Complex(_) => Err(Error::Parse("expected real data".into())),
        }
    }

    pub fn to_transform(&self) -> Result<TransformMatrix> {
        self.expect_kind(DocumentKind::Transform)?;
        TransformMatrix::new(self.real_matrix()?)
    }

    pub fn to_generator(&self) -> Result<GeneratorMatrix> {
        self.expect_kind(DocumentKind::Generator)?;
        GeneratorMatrix::new(self.real_matrix()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)?;
        doc.check_shape()?;
        Ok(doc)
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    Document::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_document(path: &Path, doc: &Document) -> Result<()> {
    let mut text = doc.to_json()?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quantum_generator;
    use crate::rng::{random_hermitian, sample_rng, Domain};
    use crate::tensor::bloch_from_hermitian;

    #[test]
    fn hermitian_round_trip_is_bit_exact() {
        let m = random_hermitian(&mut sample_rng(1, Domain::Matrices, 0), 2);
        let op = HermitianOperator::new(m).unwrap();
        let doc = Document::from_hermitian(&op);
        let back = Document::from_json(&doc.to_json().unwrap())
            .unwrap()
            .to_hermitian()
            .unwrap();
        assert_eq!(back.matrix(), op.matrix());
    }

    #[test]
    fn generator_and_bloch_round_trip() {
        let q = quantum_generator(&[1, 2]).unwrap();
        let doc = Document::from_generator(&q);
        assert_eq!(doc.shape, vec![16, 16]);
        assert_eq!(
            Document::from_json(&doc.to_json().unwrap())
                .unwrap()
                .to_generator()
                .unwrap(),
            q
        );
        let op = HermitianOperator::new(random_hermitian(&mut sample_rng(2, Domain::Matrices, 0), 1)).unwrap();
        let r = bloch_from_hermitian(&op);
        let text = Document::from_bloch(&r).to_json().unwrap();
        assert_eq!(Document::from_json(&text).unwrap().to_bloch().unwrap(), r);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad_shape = r#"{"kind":"bloch","n":1,"shape":[3],"data":[1,0,0]}"#;
        assert!(matches!(Document::from_json(bad_shape), Err(Error::Shape(_))));
        let short = r#"{"kind":"bloch","n":1,"shape":[4],"data":[1,0,0]}"#;
        assert!(matches!(
            Document::from_json(short),
            Err(Error::DimensionMismatch { .. })
        ));
        let wrong_kind = r#"{"kind":"bloch","n":1,"shape":[4],"data":[1,0,0,0]}"#;
        assert!(Document::from_json(wrong_kind).unwrap().to_generator().is_err());
        assert!(matches!(Document::from_json("{"), Err(Error::Parse(_))));
        let extra = r#"{"kind":"bloch","n":1,"shape":[4],"data":[1,0,0,0],"x":1}"#;
        assert!(matches!(Document::from_json(extra), Err(Error::Parse(_))));
    }

    #[test]
    fn files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        let doc = Document::from_generator(&quantum_generator(&[1, 1]).unwrap());
        write_document(&path, &doc).unwrap();
        assert_eq!(read_document(&path).unwrap(), doc);
        assert!(matches!(
            read_document(&dir.path().join("missing.json")),
            Err(Error::Io(_))
        ));
    }
}
