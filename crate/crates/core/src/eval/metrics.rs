use serde::{Deserialize, Serialize};

use super::EvalError;

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(labels: &[String]) -> Self {
        let k = labels.len();
        Self {
            labels: labels.to_vec(),
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn true_positives(&self, k: usize) -> u64 {
        self.counts[k][k]
    }

    pub fn row_sum(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn column_sum(&self, k: usize) -> u64 {
        self.counts.iter().map(|r| r[k]).sum()
    }

    /// Elementwise sum; both matrices must share a label list.
    pub fn add(&mut self, other: &ConfusionMatrix) {
        assert_eq!(self.labels, other.labels, "label lists differ");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// CSV with a header row of predicted labels and one row per true label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(l);
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion_matrix(
    y_true: &[String],
    y_pred: &[String],
    labels: &[String],
) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    let position = |l: &String| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| EvalError::UnknownLabel(l.clone()))
    };
    let mut cm = ConfusionMatrix::zeros(labels);
    for (t, p) in y_true.iter().zip(y_pred) {
        cm.counts[position(t)?][position(p)?] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true instances of the class.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassMetrics {
    pub classes: Vec<ClassMetrics>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Unweighted per-class precision, recall and F1; empty denominators give 0.
pub fn per_class_prf(cm: &ConfusionMatrix) -> PerClassMetrics {
    let classes = (0..cm.labels.len())
        .map(|k| {
            let tp = cm.true_positives(k);
            let precision = ratio(tp, cm.column_sum(k));
            let recall = ratio(tp, cm.row_sum(k));
            ClassMetrics {
                label: cm.labels[k].clone(),
                precision,
                recall,
                f1: harmonic(precision, recall),
                support: cm.row_sum(k),
            }
        })
        .collect();
    PerClassMetrics { classes }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroMetrics {
    pub precision: f64,
    pub recall: f64,
    /// Harmonic mean of macro precision and macro recall.
    pub f1: f64,
    /// Arithmetic mean of per-class F1.
    pub mean_class_f1: f64,
}

pub fn macro_metrics(pcm: &PerClassMetrics) -> MacroMetrics {
    let k = pcm.classes.len().max(1) as f64;
    let precision = pcm.classes.iter().map(|c| c.precision).sum::<f64>() / k;
    let recall = pcm.classes.iter().map(|c| c.recall).sum::<f64>() / k;
    let mean_class_f1 = pcm.classes.iter().map(|c| c.f1).sum::<f64>() / k;
    MacroMetrics {
        precision,
        recall,
        f1: harmonic(precision, recall),
        mean_class_f1,
    }
}

/// Accuracy, which equals micro precision, recall and F1 for single-label data.
pub fn micro_metrics(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let diag: u64 = (0..cm.labels.len()).map(|k| cm.true_positives(k)).sum();
    Ok(diag as f64 / total as f64)
}

/// Support-weighted mean of per-class F1.
pub fn weighted_f1(pcm: &PerClassMetrics) -> f64 {
    let total: u64 = pcm.classes.iter().map(|c| c.support).sum();
    if total == 0 {
        return 0.0;
    }
    pcm.classes
        .iter()
        .map(|c| c.f1 * c.support as f64)
        .sum::<f64>()
        / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn hand_counted_matrix() {
        let labels = s(&["A", "B"]);
        let cm = confusion_matrix(&s(&["A", "A", "B"]), &s(&["A", "B", "B"]), &labels).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 1], vec![0, 1]]);
        let pcm = per_class_prf(&cm);
        let (a, b) = (&pcm.classes[0], &pcm.classes[1]);
        assert_eq!((a.precision, a.recall), (1.0, 0.5));
        assert_eq!((b.precision, b.recall), (0.5, 1.0));
        assert!((a.f1 - 2.0 / 3.0).abs() < 1e-12 && (b.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((micro_metrics(&cm).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_empty() {
        let labels = s(&["A", "B", "C"]);
        let y = s(&["A", "C", "B", "C"]);
        let cm = confusion_matrix(&y, &y, &labels).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let m = macro_metrics(&per_class_prf(&cm));
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        assert_eq!(micro_metrics(&cm).unwrap(), 1.0);

        let empty = confusion_matrix(&[], &[], &labels).unwrap();
        assert_eq!(empty.total(), 0);
        assert!(matches!(micro_metrics(&empty), Err(EvalError::EmptyMatrix)));
        let pcm = per_class_prf(&empty);
        assert!(pcm
            .classes
            .iter()
            .all(|c| c.precision == 0.0 && c.recall == 0.0 && c.f1 == 0.0));
    }

    #[test]
    fn errors() {
        let labels = s(&["A"]);
        assert!(matches!(
            confusion_matrix(&s(&["A"]), &[], &labels),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(matches!(
            confusion_matrix(&s(&["A"]), &s(&["Z"]), &labels),
            Err(EvalError::UnknownLabel(l)) if l == "Z"
        ));
    }

    #[test]
    fn macro_from_per_class() {
        let mk = |p, r| ClassMetrics {
            label: String::new(),
            precision: p,
            recall: r,
            f1: harmonic(p, r),
            support: 1,
        };
        let pcm = PerClassMetrics {
            classes: vec![mk(1.0, 1.0), mk(0.5, 1.0), mk(0.0, 0.0)],
        };
        let m = macro_metrics(&pcm);
        assert!((m.precision - 0.5).abs() < 1e-12);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1 - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn eight_of_ten() {
        let labels = s(&["A", "B"]);
        let t = s(&["A", "A", "A", "A", "A", "B", "B", "B", "B", "B"]);
        let p = s(&["A", "A", "A", "A", "B", "B", "B", "B", "B", "A"]);
        let cm = confusion_matrix(&t, &p, &labels).unwrap();
        assert!((micro_metrics(&cm).unwrap() - 0.8).abs() < 1e-12);
        let zero = confusion_matrix(&s(&["A", "B"]), &s(&["B", "A"]), &labels).unwrap();
        assert_eq!(micro_metrics(&zero).unwrap(), 0.0);
    }

    #[test]
    fn weighted_f1_weights_by_support() {
        let labels = s(&["A", "B"]);
        let cm = confusion_matrix(
            &s(&["A", "A", "A", "B"]),
            &s(&["A", "A", "A", "A"]),
            &labels,
        )
        .unwrap();
        let pcm = per_class_prf(&cm);
        let fa = harmonic(0.75, 1.0);
        assert!((weighted_f1(&pcm) - 0.75 * fa).abs() < 1e-12);
    }
}
