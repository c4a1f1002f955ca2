//! Sequence data shared by the recurrent models: samples, the linear readout,
//! the masked MSE, and the CSV layout `seq_id,t,x0..xk,y0..ym`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Real;

/// One input sequence with per-step targets. A non-finite target component
/// marks that step/output as unsupervised (e.g. warm-up steps of an echo task).
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence<T> {
    pub id: u64,
    pub inputs: Vec<Vec<T>>,
    pub targets: Vec<Vec<T>>,
}

impl<T: Real> Sequence<T> {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn supervised_count(&self) -> usize {
        self.targets
            .iter()
            .flatten()
            .filter(|y| y.is_finite())
            .count()
    }

    pub(crate) fn check(&self, input_dim: usize, output_dim: usize) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Empty("sequence"));
        }
        if self.targets.len() != self.inputs.len() {
            return Err(Error::LengthMismatch {
                what: "target steps",
                expected: self.inputs.len(),
                got: self.targets.len(),
            });
        }
        for x in &self.inputs {
            if x.len() != input_dim {
                return Err(Error::LengthMismatch {
                    what: "input dimension",
                    expected: input_dim,
                    got: x.len(),
                });
            }
        }
        for y in &self.targets {
            if y.len() != output_dim {
                return Err(Error::LengthMismatch {
                    what: "target dimension",
                    expected: output_dim,
                    got: y.len(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_dataset<T: Real>(
    data: &[Sequence<T>],
    input_dim: usize,
    output_dim: usize,
) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let mut supervised = 0;
    for s in data {
        s.check(input_dim, output_dim)?;
        supervised += s.supervised_count();
    }
    if supervised == 0 {
        return Err(Error::Empty("supervised targets"));
    }
    Ok(supervised)
}

/// `y = W h + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Readout<T> {
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<T>,
}

impl<T: Real> Readout<T> {
    pub fn zeros(output_dim: usize, hidden_dim: usize) -> Self {
        Self {
            weights: vec![vec![T::zero(); hidden_dim]; output_dim],
            bias: vec![T::zero(); output_dim],
        }
    }

    /// Weights `N(0, std)`, bias zero.
    pub fn gaussian(output_dim: usize, hidden_dim: usize, std: f64, rng: &mut Rng) -> Self {
        let normal = Normal::new(0.0, std).expect("finite std");
        Self {
            weights: (0..output_dim)
                .map(|_| {
                    (0..hidden_dim)
                        .map(|_| T::lit(normal.sample(rng)))
                        .collect()
                })
                .collect(),
            bias: vec![T::zero(); output_dim],
        }
    }

    pub fn output_dim(&self) -> usize {
        self.bias.len()
    }

    pub fn apply(&self, h: &[T]) -> Vec<T> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(h).fold(*b, |acc, (w, x)| acc + *w * *x))
            .collect()
    }

    pub(crate) fn values_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.weights
            .iter_mut()
            .flatten()
            .chain(self.bias.iter_mut())
    }

    pub(crate) fn values(&self) -> impl Iterator<Item = &T> {
        self.weights.iter().flatten().chain(self.bias.iter())
    }

    /// Accumulates `dL/dW`, `dL/db` for output error `dy` into `grad` and
    /// returns `dL/dh`.
    pub(crate) fn backward(&self, h: &[T], dy: &[T], grad: &mut Self) -> Vec<T> {
        let mut dh = vec![T::zero(); h.len()];
        for (o, &d) in dy.iter().enumerate() {
            if d == T::zero() {
                continue;
            }
            grad.bias[o] += d;
            for (k, &hk) in h.iter().enumerate() {
                grad.weights[o][k] += d * hk;
                dh[k] += d * self.weights[o][k];
            }
        }
        dh
    }
}

/// Per-step squared-error terms: returns (sum of squared errors, dL/dy per
/// output scaled by `2 / n_total`). Unsupervised components contribute 0.
pub(crate) fn squared_error<T: Real>(pred: &[T], target: &[T], n_total: usize) -> (T, Vec<T>) {
    let scale = T::lit(2.0 / n_total as f64);
    let mut sse = T::zero();
    let dy = pred
        .iter()
        .zip(target)
        .map(|(&p, &y)| {
            if y.is_finite() {
                let r = p - y;
                sse += r * r;
                r * scale
            } else {
                T::zero()
            }
        })
        .collect();
    (sse, dy)
}

/// Writes sequences in the `seq_id,t,x0..xk,y0..ym` layout. Unsupervised
/// target cells are left empty.
pub fn write_sequences_csv<W: Write>(writer: W, data: &[Sequence<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let (k, m) = data
        .first()
        .and_then(|s| Some((s.inputs.first()?.len(), s.targets.first()?.len())))
        .unwrap_or((0, 0));
    let mut header = vec!["seq_id".to_string(), "t".to_string()];
    header.extend((0..k).map(|i| format!("x{i}")));
    header.extend((0..m).map(|i| format!("y{i}")));
    w.write_record(&header)?;
    for s in data {
        for (t, (x, y)) in s.inputs.iter().zip(&s.targets).enumerate() {
            let mut row = vec![s.id.to_string(), t.to_string()];
            row.extend(x.iter().map(|v| format!("{v:?}")));
            row.extend(y.iter().map(|v| {
                if v.is_finite() {
                    format!("{v:?}")
                } else {
                    String::new()
                }
            }));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the `seq_id,t,x..,y..` layout; rows may come in any order.
pub fn read_sequences_csv<R: Read>(reader: R) -> Result<Vec<Sequence<f64>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let n_x = headers.iter().filter(|h| h.starts_with('x')).count();
    let n_y = headers.iter().filter(|h| h.starts_with('y')).count();
    if headers.get(0) != Some("seq_id")
        || headers.get(1) != Some("t")
        || headers.len() != 2 + n_x + n_y
    {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header seq_id,t,x0..xk,y0..ym".into(),
        });
    }
    let mut rows: BTreeMap<u64, BTreeMap<usize, (Vec<f64>, Vec<f64>)>> = BTreeMap::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let line = r + 2;
        let parse_err = |v: &str| Error::Parse {
            line,
            msg: format!("bad number {v:?}"),
        };
        let id: u64 = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(&record[0]))?;
        let t: usize = record[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(&record[1]))?;
        let mut values = Vec::with_capacity(n_x + n_y);
        for (c, v) in record.iter().enumerate().skip(2) {
            let v = v.trim();
            if v.is_empty() && c >= 2 + n_x {
                values.push(f64::NAN);
            } else {
                values.push(v.parse().map_err(|_| parse_err(v))?);
            }
        }
        let y = values.split_off(n_x);
        if rows.entry(id).or_default().insert(t, (values, y)).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate step {t} of sequence {id}"),
            });
        }
    }
    rows.into_iter()
        .map(|(id, steps)| {
            if steps.keys().copied().ne(0..steps.len()) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("sequence {id} has non-contiguous steps"),
                });
            }
            let (inputs, targets) = steps.into_values().unzip();
            Ok(Sequence {
                id,
                inputs,
                targets,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readout_backward_matches_definition() {
        let r = Readout {
            weights: vec![vec![0.5, -1.0], vec![2.0, 0.25]],
            bias: vec![0.1, -0.2],
        };
        let h = [0.3, -0.7];
        assert_eq!(r.apply(&h), vec![0.1 + 0.15 + 0.7, -0.2 + 0.6 - 0.175]);
        let mut g = Readout::zeros(2, 2);
        let dh = r.backward(&h, &[1.0, 2.0], &mut g);
        assert_eq!(dh, vec![0.5 + 4.0, -1.0 + 0.5]);
        assert_eq!(g.bias, vec![1.0, 2.0]);
        assert_eq!(g.weights, vec![vec![0.3, -0.7], vec![0.6, -1.4]]);
    }

    #[test]
    fn masked_targets_are_skipped() {
        let (sse, dy) = squared_error(&[1.0, 2.0], &[f64::NAN, 1.0], 4);
        assert_eq!(sse, 1.0);
        assert_eq!(dy, vec![0.0, 0.5]);
    }

    #[test]
    fn csv_round_trip_with_masked_cells() {
        let data = vec![
            Sequence {
                id: 0,
                inputs: vec![vec![1.0], vec![-1.0], vec![1.0]],
                targets: vec![vec![f64::NAN], vec![f64::NAN], vec![1.0]],
            },
            Sequence {
                id: 7,
                inputs: vec![vec![0.5], vec![0.25]],
                targets: vec![vec![0.25], vec![0.125]],
            },
        ];
        let mut buf = Vec::new();
        write_sequences_csv(&mut buf, &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("seq_id,t,x0,y0\n0,0,1.0,\n"));
        let back = read_sequences_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1], data[1]);
        assert!(back[0].targets[0][0].is_nan());
        assert_eq!(back[0].inputs, data[0].inputs);
    }

    #[test]
    fn csv_rejects_gaps_and_duplicates() {
        assert!(read_sequences_csv("seq_id,t,x0,y0\n0,0,1,1\n0,2,1,1\n".as_bytes()).is_err());
        assert!(read_sequences_csv("seq_id,t,x0,y0\n0,0,1,1\n0,0,1,1\n".as_bytes()).is_err());
        assert!(read_sequences_csv("id,t,x0,y0\n".as_bytes()).is_err());
    }

    #[test]
    fn dataset_checks() {
        let s = Sequence {
            id: 0,
            inputs: vec![vec![1.0_f64]],
            targets: vec![vec![f64::NAN]],
        };
        assert!(matches!(
            check_dataset(&[s.clone()], 1, 1),
            Err(Error::Empty(_))
        ));
        assert!(check_dataset(&[s], 2, 1).is_err());
        assert!(check_dataset::<f64>(&[], 1, 1).is_err());
    }
}
