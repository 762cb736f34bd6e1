"""Post emotion labeling: emoticon rule, keyword lexicon, and a distantly
supervised multinomial naive-Bayes model over n-gram features.

The cascade is deliberate: an emoticon labels the whole post and wins
outright; keyword hits come next; the model only sees posts with no rule
evidence, and abstains to Neutral on exact posterior ties or when none of
the post's features were ever seen in training.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .lexer import Token, TokenKind
from .lexicon import EmotionClass, EmotionLexicon, LEXICON_CLASSES
from .ngrams import Gram, ngrams_of_orders, parse_gram, render_gram

METHOD_EMOTICON = "emoticon"
METHOD_LEXICON = "lexicon"
METHOD_MODEL = "model"
METHOD_NEUTRAL = "neutral"

DEFAULT_ALPHA = 1.0
DEFAULT_MIN_TRAIN_DOCS = 5


class UntrainableError(ValueError):
    """Fewer than two classes have enough emoticon-labeled posts."""


@dataclass(frozen=True)
class PostLabel:
    labels: frozenset[EmotionClass]
    method: str
    scores: Mapping[EmotionClass, float] = field(default_factory=dict)


def emoticon_hits(tokens: Iterable[Token], lexicon: EmotionLexicon) -> Counter[EmotionClass]:
    """Per-class count of emoticon tokens belonging to that class."""
    hits: Counter[EmotionClass] = Counter()
    for token in tokens:
        if token.kind is TokenKind.EMOTICON:
            cls = lexicon.emoticon_to_class.get(token.surface)
            if cls is not None:
                hits[cls] += 1
    return hits


def emoticon_label(tokens: Iterable[Token], lexicon: EmotionLexicon) -> set[EmotionClass]:
    """Classes asserted by any emoticon in the post (whole-post rule)."""
    return set(emoticon_hits(tokens, lexicon))


def lexicon_match(tokens: Iterable[Token], lexicon: EmotionLexicon) -> Counter[EmotionClass]:
    """Per-class count of WORD tokens found in that class's word set."""
    hits: Counter[EmotionClass] = Counter()
    for token in tokens:
        if token.kind is TokenKind.WORD:
            cls = lexicon.word_to_class.get(token.surface)
            if cls is not None:
                hits[cls] += 1
    return hits


def occurrence_hits(tokens: Sequence[Token], lexicon: EmotionLexicon) -> Counter[EmotionClass]:
    """Word plus emoticon lexicon occurrences per class (for the
    occurrence-based series)."""
    hits = emoticon_hits(tokens, lexicon)
    hits.update(lexicon_match(tokens, lexicon))
    return hits


@dataclass(frozen=True)
class NBModel:
    classes: tuple[EmotionClass, ...]
    doc_counts: Mapping[EmotionClass, int]
    feature_counts: Mapping[EmotionClass, Mapping[Gram, int]]
    feature_mass: Mapping[EmotionClass, int]
    vocabulary: frozenset[Gram]
    alpha: float = DEFAULT_ALPHA
    n_max: int = 3

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def log_likelihood(self, gram: Gram, cls: EmotionClass) -> float:
        count = self.feature_counts[cls].get(gram, 0)
        return math.log(
            (count + self.alpha) / (self.feature_mass[cls] + self.alpha * self.vocab_size)
        )

    def features_of(self, tokens: Sequence[Token]) -> Counter[Gram]:
        return ngrams_of_orders(tokens, self.n_max)

    def log_posteriors(self, features: Mapping[Gram, int]) -> dict[EmotionClass, float]:
        """Unnormalized log posterior per class; out-of-vocabulary grams are
        skipped."""
        scores = {cls: math.log(self.doc_counts[cls]) for cls in self.classes}
        for gram, count in features.items():
            if gram not in self.vocabulary:
                continue
            for cls in self.classes:
                scores[cls] += count * self.log_likelihood(gram, cls)
        return scores

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "alpha": self.alpha,
            "n_max": self.n_max,
            "classes": [cls.value for cls in self.classes],
            "doc_counts": {cls.value: self.doc_counts[cls] for cls in self.classes},
            "vocabulary": sorted(render_gram(gram) for gram in self.vocabulary),
            "features": {
                cls.value: {
                    render_gram(gram): count
                    for gram, count in sorted(
                        self.feature_counts[cls].items(), key=lambda kv: render_gram(kv[0])
                    )
                }
                for cls in self.classes
            },
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "NBModel":
        classes = tuple(EmotionClass(name) for name in obj["classes"])
        feature_counts = {
            c: {parse_gram(text): int(n) for text, n in obj["features"][c.value].items()}
            for c in classes
        }
        model = build_model(
            classes=classes,
            doc_counts={c: int(obj["doc_counts"][c.value]) for c in classes},
            feature_counts=feature_counts,
            alpha=float(obj["alpha"]),
            n_max=int(obj["n_max"]),
        )
        listed = obj.get("vocabulary")
        if listed is not None and frozenset(parse_gram(t) for t in listed) != model.vocabulary:
            raise ValueError("model vocabulary does not match its feature tables")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NBModel":
        return cls.from_dict(json.loads(text))


def build_model(
    classes: tuple[EmotionClass, ...],
    doc_counts: Mapping[EmotionClass, int],
    feature_counts: Mapping[EmotionClass, Mapping[Gram, int]],
    alpha: float,
    n_max: int,
) -> NBModel:
    vocabulary = frozenset(g for counts in feature_counts.values() for g in counts)
    mass = {cls: sum(feature_counts[cls].values()) for cls in classes}
    return NBModel(
        classes=classes,
        doc_counts=dict(doc_counts),
        feature_counts={cls: dict(feature_counts[cls]) for cls in classes},
        feature_mass=mass,
        vocabulary=vocabulary,
        alpha=alpha,
        n_max=n_max,
    )


def train_nb(
    docs: Iterable[tuple[Sequence[Token], EmotionClass]],
    n_max: int = 3,
    alpha: float = DEFAULT_ALPHA,
    min_train_docs: int = DEFAULT_MIN_TRAIN_DOCS,
) -> NBModel:
    """Train on (pruned tokens, emoticon-derived class) pairs.

    Emoticon tokens are stripped from the features: they define the labels,
    and leaving them in would leak the label into the model. Classes with
    fewer than min_train_docs documents are dropped; fewer than two
    surviving classes raises UntrainableError.
    """
    if n_max < 1:
        raise ValueError("bad-n")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    doc_counts: Counter[EmotionClass] = Counter()
    features: dict[EmotionClass, Counter[Gram]] = {}
    for tokens, cls in docs:
        if cls is EmotionClass.NEUTRAL:
            raise ValueError("neutral is not a trainable class")
        content = [t for t in tokens if t.kind is not TokenKind.EMOTICON]
        doc_counts[cls] += 1
        features.setdefault(cls, Counter()).update(ngrams_of_orders(content, n_max))
    survivors = tuple(
        cls for cls in LEXICON_CLASSES if doc_counts.get(cls, 0) >= min_train_docs
    )
    if len(survivors) < 2:
        raise UntrainableError("untrainable")
    return build_model(
        classes=survivors,
        doc_counts={cls: doc_counts[cls] for cls in survivors},
        feature_counts={cls: features.get(cls, Counter()) for cls in survivors},
        alpha=alpha,
        n_max=n_max,
    )


def nb_predict(model: NBModel, tokens: Sequence[Token]) -> dict[EmotionClass, float]:
    """Normalized posterior over the model's classes (log-space softmax)."""
    logs = model.log_posteriors(model.features_of(tokens))
    top = max(logs.values())
    weights = {cls: math.exp(score - top) for cls, score in logs.items()}
    total = sum(weights.values())
    return {cls: weights[cls] / total for cls in model.classes}


def classify_post(
    tokens: Sequence[Token],
    lexicon: EmotionLexicon,
    model: NBModel | None = None,
) -> PostLabel:
    """Cascade: emoticon rule, then keyword lexicon, then the model, then
    Neutral."""
    e_hits = emoticon_hits(tokens, lexicon)
    if e_hits:
        return PostLabel(frozenset(e_hits), METHOD_EMOTICON, {c: float(n) for c, n in e_hits.items()})
    w_hits = lexicon_match(tokens, lexicon)
    if w_hits:
        best = max(w_hits.values())
        winners = frozenset(cls for cls, n in w_hits.items() if n == best)
        return PostLabel(winners, METHOD_LEXICON, {c: float(n) for c, n in w_hits.items()})
    if model is not None:
        features = model.features_of(tokens)
        if any(gram in model.vocabulary for gram in features):
            logs = model.log_posteriors(features)
            posterior = nb_predict(model, tokens)
            top = max(logs.values())
            winners = [cls for cls in model.classes if logs[cls] == top]
            if len(winners) == 1:
                return PostLabel(frozenset(winners), METHOD_MODEL, posterior)
            return PostLabel(frozenset({EmotionClass.NEUTRAL}), METHOD_NEUTRAL, posterior)
    return PostLabel(frozenset({EmotionClass.NEUTRAL}), METHOD_NEUTRAL, {})


def expand_lexicon(
    model: NBModel, k: int = 50, theta: float = 1.0
) -> dict[EmotionClass, list[tuple[Gram, float]]]:
    """Per class, grams whose smoothed log2 likelihood ratio against all
    other classes pooled reaches theta; top k, best first."""
    result: dict[EmotionClass, list[tuple[Gram, float]]] = {}
    total_mass = sum(model.feature_mass[cls] for cls in model.classes)
    v = model.vocab_size
    for cls in model.classes:
        if k <= 0:
            result[cls] = []
            continue
        rest_mass = total_mass - model.feature_mass[cls]
        scored: list[tuple[float, str, Gram]] = []
        for gram in model.vocabulary:
            count_in = model.feature_counts[cls].get(gram, 0)
            count_rest = sum(
                model.feature_counts[other].get(gram, 0)
                for other in model.classes
                if other is not cls
            )
            score = math.log2(
                (count_in + model.alpha) / (model.feature_mass[cls] + model.alpha * v)
            ) - math.log2((count_rest + model.alpha) / (rest_mass + model.alpha * v))
            if score >= theta:
                scored.append((-score, render_gram(gram), gram))
        scored.sort()
        result[cls] = [(gram, -neg) for neg, _, gram in scored[:k]]
    return result


def training_pairs(
    labeled: Iterable[tuple[Sequence[Token], set[EmotionClass]]],
) -> list[tuple[Sequence[Token], EmotionClass]]:
    """Distant-supervision selection: keep posts whose emoticons assert
    exactly one class; multi-class posts are ambiguous and excluded."""
    return [(tokens, next(iter(classes))) for tokens, classes in labeled if len(classes) == 1]
