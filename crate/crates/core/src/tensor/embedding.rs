//! Token embedding table with sparse gradient accumulation.

use crate::error::{Error, Result};
use crate::tensor::matrix::Matrix;

/// Embedding table: one row of width `dim` per vocabulary entry.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub vectors: Matrix,
    pub unk_index: usize,
}

impl EmbeddingTable {
    pub fn new(vectors: Matrix, unk_index: usize) -> Result<Self> {
        if unk_index >= vectors.rows() {
            return Err(Error::Validation(format!(
                "unk index {unk_index} outside vocabulary of {}",
                vectors.rows()
            )));
        }
        if vectors.cols() == 0 {
            return Err(Error::Validation("embedding dimension must be >= 1".into()));
        }
        Ok(Self { vectors, unk_index })
    }

    pub fn vocab_size(&self) -> usize {
        self.vectors.rows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    /// Gather token embeddings into an `dim x n` matrix, column i holding the
    /// embedding of token i. Out-of-range ids are rejected: mapping to unk is
    /// the loader's job.
    pub fn lookup(&self, tokens: &[u32]) -> Result<Matrix> {
        if tokens.is_empty() {
            return Err(Error::DegenerateInput(
                "embedding lookup over empty token sequence".into(),
            ));
        }
        let m = self.dim();
        let mut out = Matrix::zeros(m, tokens.len());
        for (i, &t) in tokens.iter().enumerate() {
            let t = t as usize;
            if t >= self.vocab_size() {
                return Err(Error::Lookup(format!(
                    "token id {t} outside vocabulary of {}",
                    self.vocab_size()
                )));
            }
            let row = self.vectors.row(t);
            for (r, &v) in row.iter().enumerate() {
                out.set(r, i, v);
            }
        }
        Ok(out)
    }

    /// Scatter per-column gradients back into a vocab-shaped gradient table.
    /// Only the looked-up rows receive gradient; repeated tokens accumulate.
    pub fn accumulate_lookup_grad(
        &self,
        tokens: &[u32],
        grad_cols: &Matrix,
        grad_table: &mut Matrix,
    ) {
        debug_assert_eq!(grad_cols.rows(), self.dim());
        debug_assert_eq!(grad_cols.cols(), tokens.len());
        debug_assert_eq!(grad_table.rows(), self.vocab_size());
        for (i, &t) in tokens.iter().enumerate() {
            let row = grad_table.row_mut(t as usize);
            for (r, g) in row.iter_mut().enumerate() {
                *g += grad_cols.get(r, i);
            }
        }
    }
}
