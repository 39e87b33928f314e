//! JSON instance files:
//! `{"type": "qp"|"lp", "Q"|"A": [[..], ..], "c"|"b": [..], "p": number|[..], "seed": int}`.
//! `"normalize"` (bool, default true) is accepted for ℓp instances. Numbers are
//! written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problems::{make_lp_oracle, make_qp_oracle, LpRegressionInstance, QpInstance, SubgradientOracle};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Instance<T> {
    Qp(QpInstance<T>),
    Lp(LpRegressionInstance<T>),
}

impl<T: Scalar> Instance<T> {
    pub fn dim(&self) -> usize {
        match self {
            Instance::Qp(q) => q.dim(),
            Instance::Lp(l) => l.dim(),
        }
    }

    pub fn oracle(&self) -> Result<SubgradientOracle<T>> {
        match self {
            Instance::Qp(q) => make_qp_oracle(q.clone()),
            Instance::Lp(l) => make_lp_oracle(l.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile<T> {
    pub instance: Instance<T>,
    pub seed: Option<u64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInstance(msg.into())
}

fn number<T: Scalar>(v: &Value) -> Result<T> {
    v.as_f64().map(T::lit).ok_or_else(|| bad(format!("expected a number, found {v}")))
}

fn vector<T: Scalar>(v: &Value, key: &str) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| bad(format!("\"{key}\" must be an array")))?
        .iter()
        .map(number)
        .collect()
}

fn matrix<T: Scalar>(v: &Value, key: &str) -> Result<Matrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad(format!("\"{key}\" must be a nested array")))?
        .iter()
        .map(|r| vector(r, key))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| bad(format!("missing \"{key}\"")))
}

impl<T: Scalar> InstanceFile<T> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(s)?;
        let seed = match doc.get("seed") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| bad("\"seed\" must be a nonnegative integer"))?),
        };
        let kind = field(&doc, "type")?
            .as_str()
            .ok_or_else(|| bad("\"type\" must be a string"))?;
        let instance = match kind {
            "qp" => {
                let q = matrix(field(&doc, "Q")?, "Q")?;
                let c = vector(field(&doc, "c")?, "c")?;
                Instance::Qp(QpInstance::new(q, c)?)
            }
            "lp" => {
                let a = matrix(field(&doc, "A")?, "A")?;
                let b = vector(field(&doc, "b")?, "b")?;
                let p = field(&doc, "p")?;
                let exponents = if p.is_array() {
                    vector(p, "p")?
                } else {
                    vec![number(p)?; a.rows()]
                };
                let normalize = match doc.get("normalize") {
                    None => true,
                    Some(v) => v.as_bool().ok_or_else(|| bad("\"normalize\" must be a boolean"))?,
                };
                Instance::Lp(LpRegressionInstance::mixed(a, b, exponents)?.with_normalize(normalize))
            }
            other => return Err(bad(format!("unknown instance type \"{other}\""))),
        };
        Ok(Self { instance, seed })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = String::from("{");
        match &self.instance {
            Instance::Qp(q) => {
                s.push_str("\"type\":\"qp\",\"Q\":");
                write_matrix(&mut s, &q.q);
                s.push_str(",\"c\":");
                write_vec(&mut s, &q.c);
            }
            Instance::Lp(l) => {
                s.push_str("\"type\":\"lp\",\"A\":");
                write_matrix(&mut s, &l.a);
                s.push_str(",\"b\":");
                write_vec(&mut s, &l.b);
                s.push_str(",\"p\":");
                if l.is_uniform() {
                    write_num(&mut s, l.exponents[0]);
                } else {
                    write_vec(&mut s, &l.exponents);
                }
                let _ = write!(s, ",\"normalize\":{}", l.normalize);
            }
        }
        if let Some(seed) = self.seed {
            let _ = write!(s, ",\"seed\":{seed}");
        }
        s.push_str("}\n");
        s
    }
}

fn write_num<T: Scalar>(s: &mut String, v: T) {
    let _ = write!(s, "{:.16e}", v.as_f64());
}

fn write_vec<T: Scalar>(s: &mut String, v: &[T]) {
    s.push('[');
    for (i, &x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write_num(s, x);
    }
    s.push(']');
}

fn write_matrix<T: Scalar>(s: &mut String, m: &Matrix<T>) {
    s.push('[');
    for i in 0..m.rows() {
        if i > 0 {
            s.push(',');
        }
        write_vec(s, m.row(i));
    }
    s.push(']');
}

pub fn read_instance<T: Scalar>(path: impl AsRef<Path>) -> Result<InstanceFile<T>> {
    InstanceFile::from_json_str(&std::fs::read_to_string(path)?)
}

pub fn write_instance<T: Scalar>(path: impl AsRef<Path>, file: &InstanceFile<T>) -> Result<()> {
    std::fs::write(path, file.to_json_string())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Rng;

    #[test]
    fn parses_scalar_and_array_exponents() {
        let f: InstanceFile<f64> =
            InstanceFile::from_json_str(r#"{"type":"lp","A":[[1,0],[0,1]],"b":[1,-1],"p":1.5,"seed":3}"#).unwrap();
        match &f.instance {
            Instance::Lp(l) => assert_eq!(l.exponents, vec![1.5, 1.5]),
            _ => panic!(),
        }
        assert_eq!(f.seed, Some(3));
        let f: InstanceFile<f64> =
            InstanceFile::from_json_str(r#"{"type":"lp","A":[[1],[2]],"b":[0,0],"p":[1,2]}"#).unwrap();
        assert_eq!(f.seed, None);
        assert_eq!(f.instance.dim(), 1);
    }

    #[test]
    fn rejects_malformed_documents() {
        for doc in [
            r#"{"type":"qp","Q":[[1]]}"#,
            r#"{"type":"cone","Q":[[1]],"c":[0]}"#,
            r#"{"type":"qp","Q":[[1,2]],"c":[0]}"#,
            r#"{"type":"lp","A":[[1]],"b":[0],"p":3}"#,
            r#"{"type":"qp","Q":[[1]],"c":[0],"seed":-1}"#,
        ] {
            assert!(InstanceFile::<f64>::from_json_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn writes_seventeen_significant_digits_and_round_trips() {
        let mut rng = Rng::new(4);
        let inst = QpInstance::<f64>::random(4, &mut rng);
        let file = InstanceFile {
            instance: Instance::Qp(inst),
            seed: Some(4),
        };
        let text = file.to_json_string();
        assert!(text.contains("e"));
        let back = InstanceFile::<f64>::from_json_str(&text).unwrap();
        assert_eq!(back, file);

        let lp = LpRegressionInstance::random(5, 3, vec![1.0, 1.2, 1.5, 1.8, 2.0], &mut rng).unwrap();
        let file = InstanceFile {
            instance: Instance::Lp(lp.with_normalize(false)),
            seed: None,
        };
        assert_eq!(InstanceFile::<f64>::from_json_str(&file.to_json_string()).unwrap(), file);
    }
}
