# Copyright 2026 The cddted Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Contamination detection (CDD) and mitigation (TED) for code benchmarks.

Records are plain dicts in the dataset line format: ``task_id``, ``prompt``,
``reference_answer``, ``greedy_completion``, ``samples`` (each with
``text`` and optionally ``passed``, ``token_logprobs``, ``embedding``),
``label`` and ``tokenizer_id``.
"""

import json as _json

from . import _core
from ._core import (
    DomainError,
    Error,
    InsufficientSamplesError,
    MissingFieldError,
    TokenizerMismatchError,
    ValidationError,
    auc,
    embedding_similarity,
    min_k_prob,
    ngram_overlap,
    pass_at_k,
    perplexity,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Error",
    "InsufficientSamplesError",
    "MissingFieldError",
    "TokenizerMismatchError",
    "ValidationError",
    "auc",
    "corrected_pass_at_1",
    "detect",
    "edit_distance",
    "embedding_similarity",
    "filter_samples",
    "generate_corpus",
    "load_dataset",
    "min_k_prob",
    "ngram_overlap",
    "pass_at_k",
    "pass_at_k_exact",
    "perplexity",
    "run_detect",
    "run_mitigate",
    "save_dataset",
    "simulate",
    "tokenize",
]


def tokenize(text, tokenizer="whitespace-punct"):
    """Token ids of ``text``."""
    return _core.tokenize(text, tokenizer)


def edit_distance(a, b, tokenizer="whitespace-punct", bound=None):
    """Token-level edit distance between two strings or id sequences.

    With ``bound``, returns None when the distance exceeds it.
    """
    if isinstance(a, str):
        a = _core.tokenize(a, tokenizer)
    if isinstance(b, str):
        b = _core.tokenize(b, tokenizer)
    if bound is None:
        return _core.edit_distance(list(a), list(b))
    return _core.edit_distance_bounded(list(a), list(b), bound)


def pass_at_k_exact(n, c, k):
    """pass@k as a ``fractions.Fraction``."""
    from fractions import Fraction

    num, den = _core.pass_at_k_exact(n, c, k)
    return Fraction(num, den)


def _record(record):
    rec = dict(record)
    rec.setdefault("prompt", "")
    return _json.dumps(rec)


def detect(record, preset="default", alpha=None, xi=None, l_cap=None,
           n_samples_expected=None, tokenizer="whitespace-punct"):
    """CDD peakedness and verdict for one record."""
    return _json.loads(_core._detect(_record(record), preset, alpha, xi, l_cap,
                                     n_samples_expected, tokenizer))


def filter_samples(record, variant="ted", tau=2, tokenizer="whitespace-punct"):
    """Indices kept by ``variant`` ("raw", "rd", "ep" or "ted")."""
    return _core._retained(_record(record), tau, variant, tokenizer)


def corrected_pass_at_1(record, variant="ted", tau=2,
                        tokenizer="whitespace-punct"):
    """Raw and filtered Pass@1 of one record with pass flags."""
    return _json.loads(_core._mitigate(_record(record), tau, variant, tokenizer))


def run_detect(records, method="cdd", preset="default", alpha=None, xi=None,
               l_cap=None, n_samples_expected=None,
               tokenizer="whitespace-punct", threshold=None, k_percent=20.0,
               ngram_n=13, workers=1):
    """Detector report (per-task scores plus aggregate metrics)."""
    payload = _json.dumps([_json.loads(_record(r)) for r in records])
    return _json.loads(_core._run_detect(
        payload, method, preset, alpha, xi, l_cap, n_samples_expected,
        tokenizer, threshold, k_percent, ngram_n, workers))


def run_mitigate(records, tau=2, tokenizer="whitespace-punct", workers=1):
    """Mitigation report over the raw, rd, ep and ted variants."""
    payload = _json.dumps([_json.loads(_record(r)) for r in records])
    return _json.loads(_core._run_mitigate(payload, tau, tokenizer, workers))


def simulate(**spec):
    """One synthetic labeled record; keyword arguments are scenario fields."""
    return _json.loads(_core._simulate(_json.dumps(spec)))


def generate_corpus(values, axis="memorization_strength", seeds_per_point=1,
                    **base):
    """Labeled synthetic records, one per (value, seed)."""
    sweep = {"base": base, "axis": axis, "values": list(values),
             "seeds_per_point": seeds_per_point}
    return _json.loads(_core._corpus(_json.dumps(sweep)))


def load_dataset(path):
    """Validated records from a dataset file."""
    return _json.loads(_core._load_dataset(str(path)))


def save_dataset(path, records):
    """Writes records in the dataset line format."""
    _core._save_dataset(str(path), _json.dumps(list(records)))
