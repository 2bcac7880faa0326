use park_plate::{alphabet_index, confusable, ALPHABET};

/// Per-character counts of predicted (rows) against true (columns) characters.
///
/// Reads whose length differs from the truth cannot be aligned; each of their
/// true characters is counted in the rejection row instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; 36]; 36],
    rejected: [u64; 36],
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self { counts: [[0; 36]; 36], rejected: [0; 36] }
    }
}

impl ConfusionMatrix {
    /// Adds one plate. `read` is `None` when recognition failed outright.
    pub fn record(&mut self, truth: &str, read: Option<&str>) {
        let truth: Vec<usize> = truth.chars().filter_map(alphabet_index).collect();
        match read.map(|r| r.chars().filter_map(alphabet_index).collect::<Vec<_>>()) {
            Some(pred) if pred.len() == truth.len() => {
                for (p, t) in pred.into_iter().zip(truth) {
                    self.counts[p][t] += 1;
                }
            }
            _ => {
                for t in truth {
                    self.rejected[t] += 1;
                }
            }
        }
    }

    pub fn count(&self, predicted: char, truth: char) -> u64 {
        match (alphabet_index(predicted), alphabet_index(truth)) {
            (Some(p), Some(t)) => self.counts[p][t],
            _ => 0,
        }
    }

    pub fn rejected(&self, truth: char) -> u64 {
        alphabet_index(truth).map_or(0, |t| self.rejected[t])
    }

    pub fn diagonal(&self) -> u64 {
        (0..36).map(|i| self.counts[i][i]).sum()
    }

    pub fn off_diagonal(&self) -> u64 {
        self.cells().filter(|&(p, t, _)| p != t).map(|(_, _, n)| n).sum()
    }

    /// Off-diagonal counts whose two characters share a confusion class.
    pub fn off_diagonal_within_classes(&self) -> u64 {
        self.cells().filter(|&(p, t, _)| confusable(p, t)).map(|(_, _, n)| n).sum()
    }

    pub fn total_rejected(&self) -> u64 {
        self.rejected.iter().sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal() == 0 && self.total_rejected() == 0
    }

    /// Non-zero off-diagonal cells as `(predicted, truth, count)`, largest first.
    pub fn top_confusions(&self) -> Vec<(char, char, u64)> {
        let mut v: Vec<_> = self.cells().filter(|&(p, t, n)| p != t && n > 0).collect();
        v.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        v
    }

    fn cells(&self) -> impl Iterator<Item = (char, char, u64)> + '_ {
        (0..36).flat_map(move |p| (0..36).map(move |t| (ALPHABET[p], ALPHABET[t], self.counts[p][t])))
    }

    /// 37 data rows (one per predicted character, then `REJECT`) under a
    /// header naming the true characters.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("predicted\\truth");
        for c in ALPHABET {
            out.push(',');
            out.push(c);
        }
        out.push('\n');
        for (p, row) in self.counts.iter().enumerate() {
            out.push(ALPHABET[p]);
            for n in row {
                out.push_str(&format!(",{n}"));
            }
            out.push('\n');
        }
        out.push_str("REJECT");
        for n in &self.rejected {
            out.push_str(&format!(",{n}"));
        }
        out.push('\n');
        out
    }
}

/// Confusion matrix over `(truth, read)` pairs.
pub fn confusion_matrix<'a>(pairs: impl IntoIterator<Item = (&'a str, Option<&'a str>)>) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::default();
    for (truth, read) in pairs {
        m.record(truth, read);
    }
    m
}
