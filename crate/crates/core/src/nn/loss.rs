use super::tensor::Real;

/// Max-shifted softmax.
pub fn softmax<R: Real>(scores: &[R]) -> Vec<R> {
    let max = scores.iter().copied().fold(R::neg_infinity(), R::max);
    let exps: Vec<R> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: R = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Negative log-likelihood of `gold` under softmax, and its gradient
/// `softmax(scores) - onehot(gold)`.
pub fn nll_softmax<R: Real>(scores: &[R], gold: usize) -> (R, Vec<R>) {
    assert!(gold < scores.len(), "gold index {gold} out of {}", scores.len());
    let max = scores.iter().copied().fold(R::neg_infinity(), R::max);
    let sum: R = scores.iter().map(|&s| (s - max).exp()).sum();
    let log_z = max + sum.ln();
    let loss = log_z - scores[gold];
    let mut grad: Vec<R> = scores.iter().map(|&s| (s - log_z).exp()).collect();
    grad[gold] -= R::one();
    (loss, grad)
}
