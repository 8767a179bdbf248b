"""Evaluation metrics: FKGL, FRE, SARI, D-SARI and the coherence rate.

SARI scores keep/add/delete edits against source and references over
n-gram multisets (orders 1..4); keep and add use F1, delete uses precision
only. When both compared multisets for a component are empty the component
scores 1 (nothing was required and nothing was done), if exactly one is
empty it scores 0. D-SARI re-weights the components with document-level
output-length and sentence-count penalties; all penalties equal 1 when the
prediction matches the reference's length and sentence count, so D-SARI
collapses to SARI there.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import NoReference, NoSamples, NoText
from .textproc import Document, count_syllables, document_tokens, non_pad_sentences

SARI_MAX_ORDER = 4


@dataclass(frozen=True)
class MetricsReport:
    """One results-table row: D-SARI of predictions plus readability of the
    complex (_c) and simplified (_s) sides and the coherence rate."""

    d_sari_s: float
    fkgl_c: float
    fkgl_s: float
    fre_c: float
    fre_s: float
    coh_s: float
    n_samples: int


def _counts(doc: Document) -> tuple[int, int, int]:
    sentences = non_pad_sentences(doc)
    n_sentences = len(sentences)
    n_words = 0
    n_syllables = 0
    for sentence in sentences:
        for token in sentence.tokens:
            n_words += 1
            n_syllables += count_syllables(token)
    if n_sentences == 0 or n_words == 0:
        raise NoText(f"document {doc.id!r} has no countable words")
    return n_sentences, n_words, n_syllables


def fkgl(doc: Document) -> float:
    """Flesch-Kincaid grade level over the non-pad sentences."""
    n_sentences, n_words, n_syllables = _counts(doc)
    return 0.39 * (n_words / n_sentences) + 11.8 * (n_syllables / n_words) - 15.59


def fre(doc: Document) -> float:
    """Flesch reading ease over the non-pad sentences."""
    n_sentences, n_words, n_syllables = _counts(doc)
    return 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words)


def _ngrams(tokens: list[str], order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def _f1(candidate: Counter, reference: Counter) -> float:
    if not candidate and not reference:
        return 1.0
    if not candidate or not reference:
        return 0.0
    good = (candidate & reference).total()
    precision = good / candidate.total()
    recall = good / reference.total()
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _delete_precision(candidate: Counter, reference: Counter) -> float:
    if not candidate and not reference:
        return 1.0
    if not candidate:
        return 0.0
    return (candidate & reference).total() / candidate.total()


def sari_components(
    source_tokens: list[str],
    prediction_tokens: list[str],
    reference_token_lists: list[list[str]],
) -> tuple[float, float, float]:
    """Mean keep-F1, add-F1 and delete-precision over n-gram orders 1..4,
    each in [0, 1]. Reference multisets are combined by elementwise max, so
    duplicate references change nothing."""
    if not reference_token_lists:
        raise NoReference("sari needs at least one reference")
    keep_sum = add_sum = del_sum = 0.0
    for order in range(1, SARI_MAX_ORDER + 1):
        src = _ngrams(source_tokens, order)
        pred = _ngrams(prediction_tokens, order)
        ref: Counter = Counter()
        for tokens in reference_token_lists:
            ref |= _ngrams(tokens, order)
        keep_sum += _f1(src & pred, src & ref)
        add_sum += _f1(pred - src, ref - src)
        del_sum += _delete_precision(src - pred, src - ref)
    return (
        keep_sum / SARI_MAX_ORDER,
        add_sum / SARI_MAX_ORDER,
        del_sum / SARI_MAX_ORDER,
    )


def sari_tokens(
    source_tokens: list[str],
    prediction_tokens: list[str],
    reference_token_lists: list[list[str]],
) -> float:
    keep, add, delete = sari_components(
        source_tokens, prediction_tokens, reference_token_lists
    )
    return 100.0 * (keep + add + delete) / 3.0


def sari(source: Document, prediction: Document, references: list[Document]) -> float:
    """Sentence-style SARI over the documents' non-pad token sequences."""
    return sari_tokens(
        document_tokens(source),
        document_tokens(prediction),
        [document_tokens(r) for r in references],
    )


def _length_penalties(
    prediction_len: float,
    reference_len: float,
    prediction_sentences: float,
    reference_sentences: float,
) -> tuple[float, float, float]:
    """Short-output penalty (lp_short), long-output penalty (lp_long) and
    sentence-count penalty (slp), each in (0, 1]."""
    ref_len = max(reference_len, 1e-12)
    out_len = max(prediction_len, 1e-12)
    if prediction_len >= reference_len:
        lp_short = 1.0
    else:
        lp_short = math.exp((prediction_len - reference_len) / ref_len)
    if prediction_len <= reference_len:
        lp_long = 1.0
    else:
        lp_long = math.exp((reference_len - prediction_len) / out_len)
    denom = max(prediction_sentences, reference_sentences, 1e-12)
    slp = math.exp(-abs(reference_sentences - prediction_sentences) / denom)
    return lp_short, lp_long, slp


def d_sari(source: Document, prediction: Document, references: list[Document]) -> float:
    """Document-level SARI: keep is penalized for short outputs and sentence
    count drift, add for short outputs, delete for long outputs and sentence
    count drift. With several references the penalty targets are the mean
    reference length and sentence count (keeps reference-order invariance)."""
    if not references:
        raise NoReference("d_sari needs at least one reference")
    keep, add, delete = sari_components(
        document_tokens(source),
        document_tokens(prediction),
        [document_tokens(r) for r in references],
    )
    pred_len = len(document_tokens(prediction))
    ref_len = sum(len(document_tokens(r)) for r in references) / len(references)
    pred_sents = len(non_pad_sentences(prediction))
    ref_sents = sum(len(non_pad_sentences(r)) for r in references) / len(references)
    lp_short, lp_long, slp = _length_penalties(pred_len, ref_len, pred_sents, ref_sents)
    d_keep = keep * lp_short * slp
    d_add = add * lp_short
    d_del = delete * lp_long * slp
    return 100.0 * (d_keep + d_add + d_del) / 3.0


def coherence_rate(predictions: list[Document], model) -> float:
    """Fraction of predictions the coherence model labels coherent."""
    if not predictions:
        raise NoSamples("coherence rate needs at least one prediction")
    coherent = 0
    for doc in predictions:
        label, _ = model.predict(doc)
        coherent += label
    return coherent / len(predictions)


REPORT_COLUMNS = (
    "Model",
    "Dataset",
    "Loss",
    "Setting",
    "D-SARI_S",
    "FKGL_C",
    "FKGL_S",
    "FRE_C",
    "FRE_S",
    "COH_S",
)


def report_row(
    model: str, dataset: str, loss: str, setting: str, report: MetricsReport
) -> dict[str, str]:
    """One table row in the results layout, numbers fixed to 3 decimals."""
    return {
        "Model": model,
        "Dataset": dataset,
        "Loss": loss,
        "Setting": setting,
        "D-SARI_S": f"{report.d_sari_s:.3f}",
        "FKGL_C": f"{report.fkgl_c:.3f}",
        "FKGL_S": f"{report.fkgl_s:.3f}",
        "FRE_C": f"{report.fre_c:.3f}",
        "FRE_S": f"{report.fre_s:.3f}",
        "COH_S": f"{report.coh_s:.3f}",
    }


def rows_to_tsv(rows: list[dict[str, str]]) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for row in rows:
        lines.append("\t".join(row[c] for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_table(rows: list[dict[str, str]]) -> str:
    """Aligned plain-text rendering of the report rows."""
    widths = {c: len(c) for c in REPORT_COLUMNS}
    for row in rows:
        for column in REPORT_COLUMNS:
            widths[column] = max(widths[column], len(row[column]))
    header = "  ".join(c.ljust(widths[c]) for c in REPORT_COLUMNS)
    rule = "  ".join("-" * widths[c] for c in REPORT_COLUMNS)
    lines = [header, rule]
    for row in rows:
        lines.append("  ".join(row[c].ljust(widths[c]) for c in REPORT_COLUMNS))
    return "\n".join(line.rstrip() for line in lines) + "\n"
