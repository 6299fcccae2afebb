//! Model parameters partitioned into representation, supervision, and
//! confidence groups, each with its own optimizer state.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotate::lexicon::SENTIMENT_CLASSES;
use crate::data::vocab::{Vocabulary, PAD_ID};
use crate::error::{Error, Result};
use crate::tensor::{Activation, AdamState, ConvBank, DenseLayer, EmbeddingTable, Matrix};

/// Which task a parameter set serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Ranking,
    Sentiment,
}

/// Per-vocabulary-term weights feeding the softmax composition.
#[derive(Debug, Clone)]
pub struct TermWeights {
    values: Vec<f64>,
}

impl TermWeights {
    pub fn zeros(vocab_size: usize) -> Self {
        Self {
            values: vec![0.0; vocab_size],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, token: u32) -> f64 {
        self.values[token as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The shared representation encoder.
#[derive(Debug, Clone)]
pub enum Representation {
    /// Weighted-embedding composition over query and both documents.
    Rank {
        embedding: EmbeddingTable,
        term_weights: TermWeights,
    },
    /// Embedding, convolution, relu, max pooling.
    Sentence {
        embedding: EmbeddingTable,
        conv: ConvBank,
    },
}

impl Representation {
    pub fn embedding(&self) -> &EmbeddingTable {
        match self {
            Representation::Rank { embedding, .. } => embedding,
            Representation::Sentence { embedding, .. } => embedding,
        }
    }

    /// Width of the representation vector.
    pub fn output_width(&self) -> usize {
        match self {
            Representation::Rank { embedding, .. } => 3 * embedding.dim(),
            Representation::Sentence { conv, .. } => conv.filter_count(),
        }
    }
}

/// Layer widths for both networks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkDims {
    /// Embedding dimension m.
    pub embedding_dim: usize,
    /// Number of convolution filters f (sentiment only).
    pub conv_filters: usize,
    /// Convolution window h (sentiment only).
    pub conv_window: usize,
    /// Hidden widths of the supervision stack.
    pub supervision_hidden: Vec<usize>,
    /// Hidden widths of the confidence stack.
    pub confidence_hidden: Vec<usize>,
}

impl Default for NetworkDims {
    fn default() -> Self {
        Self {
            embedding_dim: 32,
            conv_filters: 16,
            conv_window: 3,
            supervision_hidden: vec![32, 32],
            confidence_hidden: vec![64, 64],
        }
    }
}

impl NetworkDims {
    pub fn validate(&self) -> Result<()> {
        if self.embedding_dim == 0 {
            return Err(Error::Config("embedding_dim must be >= 1".into()));
        }
        if self.conv_filters == 0 || self.conv_window == 0 {
            return Err(Error::Config("conv dims must be >= 1".into()));
        }
        Ok(())
    }
}

/// One of the three disjoint parameter groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Representation,
    Supervision,
    Confidence,
}

pub const ALL_GROUPS: [ParamGroup; 3] = [
    ParamGroup::Representation,
    ParamGroup::Supervision,
    ParamGroup::Confidence,
];

/// Gradients for one parameter group, tensors ordered exactly like the
/// group's parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupGrads {
    pub tensors: Vec<Vec<f64>>,
}

impl GroupGrads {
    pub fn zeros(shapes: &[usize]) -> Self {
        Self {
            tensors: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn add(&mut self, other: &GroupGrads) {
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.tensors {
            for x in t.iter_mut() {
                *x *= s;
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.tensors
            .iter()
            .flat_map(|t| t.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.tensors
            .iter()
            .flat_map(|t| t.iter().copied())
            .collect()
    }
}

/// All parameters of the joint model plus Adam state per group.
#[derive(Debug, Clone)]
pub struct ModelParameters {
    pub task: Task,
    pub representation: Representation,
    /// Target-network head: hidden relu layers then sigmoid (ranking) or
    /// softmax (sentiment).
    pub supervision: Vec<DenseLayer>,
    /// Confidence head over representation + weak label, sigmoid output.
    pub confidence: Vec<DenseLayer>,
    opt_representation: AdamState,
    opt_supervision: AdamState,
    opt_confidence: AdamState,
}

/// Width of the weak label concatenated onto the confidence input.
pub fn weak_label_width(task: Task) -> usize {
    match task {
        Task::Ranking => 1,
        Task::Sentiment => SENTIMENT_CLASSES,
    }
}

pub(crate) fn build_stack<R: Rng>(
    input: usize,
    hidden: &[usize],
    output: usize,
    output_activation: Activation,
    rng: &mut R,
) -> Vec<DenseLayer> {
    let mut layers = Vec::with_capacity(hidden.len() + 1);
    let mut width = input;
    for &h in hidden {
        layers.push(DenseLayer::init(width, h, Activation::Relu, rng));
        width = h;
    }
    layers.push(DenseLayer::init(width, output, output_activation, rng));
    layers
}

/// Build parameters for a task. Deterministic per seed: the same
/// (task, dims, vocab, seed, inputs) always yields bit-identical values.
///
/// Embeddings come from `pretrained` rows when provided (missing words fall
/// back to the random init), otherwise uniform +/- 0.05. Term weights start
/// at the supplied idf values (ranking) or zero. The pad row is zero and is
/// never updated.
pub fn init_parameters(
    task: Task,
    dims: &NetworkDims,
    vocab: &Vocabulary,
    seed: u64,
    pretrained: Option<&HashMap<String, Vec<f64>>>,
    idf: Option<&[f64]>,
) -> Result<ModelParameters> {
    dims.validate()?;
    let vocab_size = vocab.len();
    let m = dims.embedding_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vectors = Matrix::zeros(vocab_size, m);
    for id in 0..vocab_size {
        // fixed draw order: one row per id, drawn even when overwritten below
        let row: Vec<f64> = (0..m).map(|_| rng.random_range(-0.05..=0.05)).collect();
        vectors.row_mut(id).copy_from_slice(&row);
        if let (Some(table), Some(term)) = (pretrained, vocab.term(id as u32)) {
            if let Some(vec) = table.get(term) {
                if vec.len() != m {
                    return Err(Error::Validation(format!(
                        "pretrained vector for {term:?} has {} dims, model uses {m}",
                        vec.len()
                    )));
                }
                vectors.row_mut(id).copy_from_slice(vec);
            }
        }
    }
    for v in vectors.row_mut(PAD_ID as usize) {
        *v = 0.0;
    }
    let embedding = EmbeddingTable::new(vectors, crate::data::vocab::UNK_ID as usize)?;

    let representation = match task {
        Task::Ranking => {
            let term_weights = match idf {
                Some(values) => {
                    if values.len() != vocab_size {
                        return Err(Error::Validation(format!(
                            "idf table has {} entries, vocabulary {}",
                            values.len(),
                            vocab_size
                        )));
                    }
                    TermWeights::from_values(values.to_vec())
                }
                None => TermWeights::zeros(vocab_size),
            };
            Representation::Rank {
                embedding,
                term_weights,
            }
        }
        Task::Sentiment => {
            let conv = ConvBank::init(m, dims.conv_window, dims.conv_filters, &mut rng)?;
            Representation::Sentence { embedding, conv }
        }
    };

    let rep_width = representation.output_width();
    let supervision = match task {
        Task::Ranking => build_stack(
            rep_width,
            &dims.supervision_hidden,
            1,
            Activation::Sigmoid,
            &mut rng,
        ),
        Task::Sentiment => build_stack(
            rep_width,
            &dims.supervision_hidden,
            SENTIMENT_CLASSES,
            Activation::Softmax,
            &mut rng,
        ),
    };
    let confidence = build_stack(
        rep_width + weak_label_width(task),
        &dims.confidence_hidden,
        1,
        Activation::Sigmoid,
        &mut rng,
    );

    let mut params = ModelParameters {
        task,
        representation,
        supervision,
        confidence,
        opt_representation: AdamState::new(&[]),
        opt_supervision: AdamState::new(&[]),
        opt_confidence: AdamState::new(&[]),
    };
    params.opt_representation = AdamState::new(&params.group_shapes(ParamGroup::Representation));
    params.opt_supervision = AdamState::new(&params.group_shapes(ParamGroup::Supervision));
    params.opt_confidence = AdamState::new(&params.group_shapes(ParamGroup::Confidence));
    Ok(params)
}

impl ModelParameters {
    /// Tensor lengths of a group, in the group's fixed tensor order.
    pub fn group_shapes(&self, group: ParamGroup) -> Vec<usize> {
        self.group_values(group).iter().map(|t| t.len()).collect()
    }

    /// Immutable views of a group's tensors.
    ///
    /// Order: representation = embedding then term weights (ranking) or
    /// embedding, each filter, conv bias (sentiment); stacks alternate
    /// weights and bias per layer.
    pub fn group_values(&self, group: ParamGroup) -> Vec<&[f64]> {
        match group {
            ParamGroup::Representation => match &self.representation {
                Representation::Rank {
                    embedding,
                    term_weights,
                } => {
                    vec![embedding.vectors.values(), &term_weights.values]
                }
                Representation::Sentence { embedding, conv } => {
                    let mut v = vec![embedding.vectors.values()];
                    for f in &conv.filters {
                        v.push(f.values());
                    }
                    v.push(conv.bias.as_slice());
                    v
                }
            },
            ParamGroup::Supervision => stack_values(&self.supervision),
            ParamGroup::Confidence => stack_values(&self.confidence),
        }
    }

    /// Mutable views of a group's tensors, same order as `group_values`.
    pub fn group_values_mut(&mut self, group: ParamGroup) -> Vec<&mut Vec<f64>> {
        match group {
            ParamGroup::Representation => match &mut self.representation {
                Representation::Rank {
                    embedding,
                    term_weights,
                } => {
                    vec![embedding.vectors.values_mut(), &mut term_weights.values]
                }
                Representation::Sentence { embedding, conv } => {
                    let mut v = vec![embedding.vectors.values_mut()];
                    for f in &mut conv.filters {
                        v.push(f.values_mut());
                    }
                    v.push(&mut conv.bias);
                    v
                }
            },
            ParamGroup::Supervision => stack_values_mut(&mut self.supervision),
            ParamGroup::Confidence => stack_values_mut(&mut self.confidence),
        }
    }

    /// One Adam step on a group. Gradients must use the group tensor order.
    pub fn adam_step(&mut self, group: ParamGroup, grads: &GroupGrads, lr: f64) -> Result<()> {
        let grad_refs: Vec<&[f64]> = grads.tensors.iter().map(Vec::as_slice).collect();
        match group {
            ParamGroup::Representation => {
                let mut tensors = match &mut self.representation {
                    Representation::Rank {
                        embedding,
                        term_weights,
                    } => {
                        vec![embedding.vectors.values_mut(), &mut term_weights.values]
                    }
                    Representation::Sentence { embedding, conv } => {
                        let mut v = vec![embedding.vectors.values_mut()];
                        for f in &mut conv.filters {
                            v.push(f.values_mut());
                        }
                        v.push(&mut conv.bias);
                        v
                    }
                };
                self.opt_representation.update(&mut tensors, &grad_refs, lr)
            }
            ParamGroup::Supervision => {
                let mut tensors = stack_values_mut(&mut self.supervision);
                self.opt_supervision.update(&mut tensors, &grad_refs, lr)
            }
            ParamGroup::Confidence => {
                let mut tensors = stack_values_mut(&mut self.confidence);
                self.opt_confidence.update(&mut tensors, &grad_refs, lr)
            }
        }
    }

    /// Flattened copy of a group's parameters.
    pub fn group_flat(&self, group: ParamGroup) -> Vec<f64> {
        self.group_values(group)
            .iter()
            .flat_map(|t| t.iter().copied())
            .collect()
    }

    /// Overwrite a group from a flattened vector (gradient checking).
    pub fn set_group_flat(&mut self, group: ParamGroup, flat: &[f64]) -> Result<()> {
        let mut tensors = self.group_values_mut(group);
        let total: usize = tensors.iter().map(|t| t.len()).sum();
        if flat.len() != total {
            return Err(Error::Shape(format!(
                "group holds {total} parameters, got {}",
                flat.len()
            )));
        }
        let mut offset = 0;
        for t in tensors.iter_mut() {
            let len = t.len();
            t.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        Ok(())
    }

    pub fn adam_state(&self, group: ParamGroup) -> &AdamState {
        match group {
            ParamGroup::Representation => &self.opt_representation,
            ParamGroup::Supervision => &self.opt_supervision,
            ParamGroup::Confidence => &self.opt_confidence,
        }
    }
}

fn stack_values(layers: &[DenseLayer]) -> Vec<&[f64]> {
    let mut v = Vec::with_capacity(layers.len() * 2);
    for l in layers {
        v.push(l.weights.values());
        v.push(l.bias.as_slice());
    }
    v
}

fn stack_values_mut(layers: &mut [DenseLayer]) -> Vec<&mut Vec<f64>> {
    let mut v = Vec::with_capacity(layers.len() * 2);
    for l in layers.iter_mut() {
        v.push(l.weights.values_mut());
        v.push(&mut l.bias);
    }
    v
}

/// Parse a pretrained embedding file: one `word v1 v2 ... vm` line per word,
/// space separated.
pub fn load_pretrained_embeddings(path: &Path) -> Result<HashMap<String, Vec<f64>>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut table = HashMap::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().ok_or(Error::Parse {
            line: line_no,
            msg: "empty line".into(),
        })?;
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad value {f:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "word without values".into(),
            });
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("vector of {} values after {} earlier", values.len(), d),
                })
            }
            _ => {}
        }
        table.insert(word.to_string(), values);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::vocab::Vocabulary;

    fn vocab(words: &[&str]) -> Vocabulary {
        let mut v = Vocabulary::new();
        for w in words {
            v.intern(w);
        }
        v
    }

    #[test]
    fn same_seed_gives_bit_identical_parameters() {
        let v = vocab(&["a", "b", "c"]);
        let dims = NetworkDims::default();
        for task in [Task::Ranking, Task::Sentiment] {
            let p1 = init_parameters(task, &dims, &v, 42, None, None).unwrap();
            let p2 = init_parameters(task, &dims, &v, 42, None, None).unwrap();
            for g in ALL_GROUPS {
                assert_eq!(p1.group_flat(g), p2.group_flat(g));
            }
            let p3 = init_parameters(task, &dims, &v, 43, None, None).unwrap();
            assert_ne!(
                p1.group_flat(ParamGroup::Supervision),
                p3.group_flat(ParamGroup::Supervision)
            );
        }
    }

    #[test]
    fn pad_row_is_zero() {
        let v = vocab(&["a"]);
        let p =
            init_parameters(Task::Sentiment, &NetworkDims::default(), &v, 7, None, None).unwrap();
        let emb = p.representation.embedding();
        assert!(emb.vectors.row(PAD_ID as usize).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pretrained_vectors_are_loaded_exactly() {
        let dir = std::env::temp_dir().join("cws_pretrained_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.txt");
        std::fs::write(
            &path,
            "alpha 0.1 0.2 0.3 0.4\nbeta -1 -2 -3 -4\ngamma 1 1 1 1\ndelta 0 0 0 1\nepsilon 9 8 7 6\n",
        )
        .unwrap();
        let table = load_pretrained_embeddings(&path).unwrap();
        assert_eq!(table.len(), 5);

        let v = vocab(&["alpha", "beta", "unseen"]);
        let dims = NetworkDims {
            embedding_dim: 4,
            ..NetworkDims::default()
        };
        let p = init_parameters(Task::Sentiment, &dims, &v, 1, Some(&table), None).unwrap();
        let emb = p.representation.embedding();
        assert_eq!(
            emb.vectors.row(v.id("alpha") as usize),
            &[0.1, 0.2, 0.3, 0.4]
        );
        assert_eq!(
            emb.vectors.row(v.id("beta") as usize),
            &[-1.0, -2.0, -3.0, -4.0]
        );
        // unseen word keeps its random (bounded) init
        assert!(emb
            .vectors
            .row(v.id("unseen") as usize)
            .iter()
            .all(|&x| x.abs() <= 0.05));
    }

    #[test]
    fn pretrained_dimension_mismatch_rejected() {
        let dir = std::env::temp_dir().join("cws_pretrained_mismatch");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.txt");
        std::fs::write(&path, "alpha 0.1 0.2\n").unwrap();
        let table = load_pretrained_embeddings(&path).unwrap();
        let v = vocab(&["alpha"]);
        let dims = NetworkDims {
            embedding_dim: 4,
            ..NetworkDims::default()
        };
        assert!(init_parameters(Task::Sentiment, &dims, &v, 1, Some(&table), None).is_err());
    }

    #[test]
    fn idf_initialization_puts_ubiquitous_terms_lowest() {
        use crate::annotate::index::build_index;
        let docs: Vec<(String, Vec<String>)> = vec![
            ("d1".into(), vec!["common".into(), "rare".into()]),
            ("d2".into(), vec!["common".into()]),
            ("d3".into(), vec!["common".into(), "mid".into()]),
        ];
        let index = build_index(&docs).unwrap();
        let mut v = Vocabulary::new();
        for w in ["common", "rare", "mid"] {
            v.intern(w);
        }
        let idf: Vec<f64> = v.terms().map(|t| index.idf(t)).collect();
        let p = init_parameters(
            Task::Ranking,
            &NetworkDims::default(),
            &v,
            3,
            None,
            Some(&idf),
        )
        .unwrap();
        let Representation::Rank { term_weights, .. } = &p.representation else {
            panic!()
        };
        let common = term_weights.get(v.id("common"));
        // the term appearing in every document gets the smallest weight of
        // the in-corpus terms
        assert!(common < term_weights.get(v.id("rare")));
        assert!(common < term_weights.get(v.id("mid")));
    }

    #[test]
    fn group_partition_is_total_and_disjoint() {
        let v = vocab(&["a", "b"]);
        let p =
            init_parameters(Task::Sentiment, &NetworkDims::default(), &v, 5, None, None).unwrap();
        let rep = p.group_shapes(ParamGroup::Representation);
        let sup = p.group_shapes(ParamGroup::Supervision);
        let conf = p.group_shapes(ParamGroup::Confidence);
        // representation = embedding + f filters + conv bias
        assert_eq!(rep.len(), 1 + 16 + 1);
        // three-layer stacks: weights and bias each
        assert_eq!(sup.len(), 6);
        assert_eq!(conf.len(), 6);
    }

    #[test]
    fn set_group_flat_round_trips() {
        let v = vocab(&["a", "b"]);
        let mut p =
            init_parameters(Task::Ranking, &NetworkDims::default(), &v, 5, None, None).unwrap();
        let flat = p.group_flat(ParamGroup::Supervision);
        let mut changed = flat.clone();
        changed[0] += 1.0;
        p.set_group_flat(ParamGroup::Supervision, &changed).unwrap();
        assert_eq!(p.group_flat(ParamGroup::Supervision), changed);
        assert!(p
            .set_group_flat(ParamGroup::Supervision, &changed[1..])
            .is_err());
    }
}
