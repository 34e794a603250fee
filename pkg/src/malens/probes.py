"""Linear probing of phone/word identity from mean-pooled representations,
and Spearman-based spoken sentence-similarity evaluation.

The probe is multinomial logistic regression trained with seeded
mini-batch gradient descent in float64; splits are stratified and seeded
so datasets and results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLabels,
    DegenerateRanks,
    DimMismatch,
    LengthMismatch,
    NoExamples,
    NonFiniteLoss,
    TooFewLabels,
)
from .interchange import Corpus
from .temporal import assign_phones, assign_words, pool_span

TRAIN_FRACTION_DEFAULT = 0.8


@dataclass(frozen=True)
class ProbeDataset:
    level: str                      # "phone" | "word"
    features: np.ndarray            # n x dim, float64
    labels: np.ndarray              # n, int label ids
    label_set: tuple[str, ...]
    train_indices: np.ndarray
    test_indices: np.ndarray

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_labels(self) -> int:
        return len(self.label_set)


@dataclass(frozen=True)
class ProbeModel:
    weights: np.ndarray             # num_labels x dim
    bias: np.ndarray                # num_labels
    epochs: int
    l2: float
    seed: int
    final_loss: float


@dataclass(frozen=True)
class StsResult:
    rho: float
    num_pairs: int


def build_probe_dataset(corpus: Corpus, stage: str, level: str,
                        min_label_count: int = 1, seed: int = 0,
                        min_overlap_ms: int = 0,
                        train_fraction: float = TRAIN_FRACTION_DEFAULT) -> ProbeDataset:
    """One example per aligned word/phone with a non-empty frame pool."""
    examples: list[tuple[np.ndarray, str]] = []
    for record, sequences in corpus:
        seq = sequences.get(stage)
        if seq is None:
            continue
        if level == "word":
            assignments = assign_words(record, seq, min_overlap_ms)
            surfaces = [w.surface for w in record.words]
        elif level == "phone":
            assignments = assign_phones(record, seq, min_overlap_ms)
            surfaces = [p.phone for p in record.phones]
        else:
            raise ValueError(f"unknown probe level {level!r}")
        for sa in assignments:
            if sa.frame_indices:
                examples.append((pool_span(seq, sa.frame_indices), surfaces[sa.word_index]))
    if not examples:
        raise NoExamples(f"corpus yields no pooled {level}-level examples for stage {stage!r}")

    counts: dict[str, int] = {}
    for _, label in examples:
        counts[label] = counts.get(label, 0) + 1
    kept = [(vec, label) for vec, label in examples if counts[label] >= min_label_count]
    if not kept:
        raise NoExamples(f"min_label_count={min_label_count} removed every example")
    label_set = tuple(sorted({label for _, label in kept}))
    if len(label_set) < 2:
        raise TooFewLabels(f"need at least 2 classes, got {len(label_set)}")

    label_ids = {label: i for i, label in enumerate(label_set)}
    features = np.stack([vec for vec, _ in kept])
    labels = np.asarray([label_ids[label] for _, label in kept])
    train_idx, test_idx = _stratified_split(labels, train_fraction, seed)
    return ProbeDataset(level=level, features=features, labels=labels,
                        label_set=label_set, train_indices=train_idx,
                        test_indices=test_idx)


def _stratified_split(labels: np.ndarray, train_fraction: float,
                      seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        # every class with >=2 instances lands in both splits
        n_train = int(round(len(idx) * train_fraction))
        n_train = min(max(n_train, 1), len(idx) - 1) if len(idx) >= 2 else len(idx)
        train.extend(idx[:n_train])
        test.extend(idx[n_train:])
    return np.sort(np.asarray(train, dtype=int)), np.sort(np.asarray(test, dtype=int))


def train_linear_probe(dataset: ProbeDataset, epochs: int = 100,
                       learning_rate: float = 0.1, l2: float = 1e-4,
                       seed: int = 0, batch_size: int = 64) -> ProbeModel:
    """Softmax regression, cross-entropy + l2*||W||^2/2, mini-batch GD."""
    x = dataset.features[dataset.train_indices]
    y = dataset.labels[dataset.train_indices]
    if x.shape[0] == 0:
        raise NoExamples("empty train split")
    if len(np.unique(y)) < 2:
        raise DegenerateLabels("train split contains a single class")
    k, d = dataset.num_labels, dataset.dim
    rng = np.random.default_rng(seed)
    w = np.zeros((k, d))
    b = np.zeros(k)
    n = x.shape[0]
    final_loss = np.inf
    for _ in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            xb, yb = x[batch], y[batch]
            logits = xb @ w.T + b
            logits -= logits.max(axis=1, keepdims=True)
            exp = np.exp(logits)
            probs = exp / exp.sum(axis=1, keepdims=True)
            nll = -np.log(probs[np.arange(len(batch)), yb] + 1e-300)
            epoch_loss += float(nll.sum())
            grad_logits = probs
            grad_logits[np.arange(len(batch)), yb] -= 1.0
            grad_logits /= len(batch)
            grad_w = grad_logits.T @ xb + l2 * w
            grad_b = grad_logits.sum(axis=0)
            w -= learning_rate * grad_w
            b -= learning_rate * grad_b
        with np.errstate(over="ignore"):
            final_loss = epoch_loss / n + 0.5 * l2 * float((w * w).sum())
        if not np.isfinite(final_loss) or not np.isfinite(w).all():
            raise NonFiniteLoss(
                f"training diverged (loss {final_loss}); lower learning_rate={learning_rate}"
            )
    return ProbeModel(weights=w, bias=b, epochs=epochs, l2=l2, seed=seed,
                      final_loss=final_loss)


def evaluate_probe(model: ProbeModel, dataset: ProbeDataset,
                   split: str = "test") -> float:
    """Top-1 micro accuracy; argmax ties break to the lowest label index."""
    if model.weights.shape[1] != dataset.dim:
        raise DimMismatch(
            f"model dim {model.weights.shape[1]} != dataset dim {dataset.dim}"
        )
    indices = dataset.test_indices if split == "test" else dataset.train_indices
    x = dataset.features[indices]
    y = dataset.labels[indices]
    if len(y) == 0:
        raise NoExamples(f"empty {split} split")
    logits = x @ model.weights.T + model.bias
    predicted = logits.argmax(axis=1)
    return float((predicted == y).mean())


def spearman(xs, ys) -> float:
    """Spearman's rho: Pearson correlation of average fractional ranks."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise LengthMismatch(f"shapes {xs.shape} and {ys.shape} differ")
    if len(xs) < 3:
        raise LengthMismatch(f"need at least 3 pairs, got {len(xs)}")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise DegenerateRanks("one side is constant; ranks are undefined")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def sts_eval(pairs) -> StsResult:
    """pairs: (seqA, seqB, human_score) triples; sequences are pooled over
    all frames and scored by cosine, then correlated with the judgments."""
    cosines, scores = [], []
    for seq_a, seq_b, human in pairs:
        va = pool_span(seq_a, range(seq_a.num_frames))
        vb = pool_span(seq_b, range(seq_b.num_frames))
        na, nb = np.linalg.norm(va), np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            raise DegenerateRanks("zero pooled vector; cosine undefined")
        cosines.append(float(va @ vb / (na * nb)))
        scores.append(float(human))
    return StsResult(rho=spearman(cosines, scores), num_pairs=len(cosines))
