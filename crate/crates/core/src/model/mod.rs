//! The target network (shared representation + supervision head) and the
//! confidence network (shared representation + confidence head) for both
//! tasks, with independently updatable parameter groups.

pub mod forward;
pub mod instance;
pub mod params;

pub use forward::{
    confidence_backward, confidence_forward, predict, rank_representation, representation_backward,
    representation_forward, sentence_representation, stack_backward, stack_forward,
    supervision_forward, target_backward, task_logit_delta, task_loss, zero_grads, ComposedText,
    Prediction, RepCache, StackCache,
};
pub use instance::{Instance, RankInstance, SentenceInstance};
pub use params::{
    init_parameters, load_pretrained_embeddings, weak_label_width, GroupGrads, ModelParameters,
    NetworkDims, ParamGroup, Representation, Task, TermWeights, ALL_GROUPS,
};
