"""facewall: emotion profiling and behavioural-shift detection over
timestamped wall-post corpora.

Pipeline: ingest JSONL/CSV post records into an append-only store, tokenize
and prune the text, label each post against four emotion classes (emoticon
rule, keyword lexicon, distantly supervised naive Bayes over n-grams),
aggregate per-user calendar series, and flag buckets whose class counts or
class mix depart from a trailing baseline.
"""

__version__ = "0.1.0"

from .classifier import PostLabel, classify_post, nb_predict, train_nb
from .ingest import CorpusBatch, RawPost, load_corpus, parse_post_record
from .lexer import EmoticonTable, Token, TokenKind, prune, tokenize
from .lexicon import EmotionClass, EmotionLexicon, default_lexicon, load_lexicon
from .ngrams import NGramProfile, accumulate, extract_ngrams, merge_profiles
from .store import Store, StoreError
from .timeline import DetectorConfig, bucketize, emotion_series, jsd, shift_flags, zscore_flags

__all__ = [
    "CorpusBatch",
    "DetectorConfig",
    "EmotionClass",
    "EmotionLexicon",
    "EmoticonTable",
    "NGramProfile",
    "PostLabel",
    "RawPost",
    "Store",
    "StoreError",
    "Token",
    "TokenKind",
    "accumulate",
    "bucketize",
    "classify_post",
    "default_lexicon",
    "emotion_series",
    "extract_ngrams",
    "jsd",
    "load_corpus",
    "load_lexicon",
    "merge_profiles",
    "nb_predict",
    "parse_post_record",
    "prune",
    "shift_flags",
    "tokenize",
    "train_nb",
    "zscore_flags",
]
