"""Corpus construction: leveled-article pairing schemes, coherence data
ingestion, control-token input formatting, a seeded synthetic corpus
generator, and the on-disk newline-delimited corpus format.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .errors import EmptyText, InvalidRating, MissingComplex
from .textproc import (
    DEFAULT_FRAME,
    Document,
    document_from_text,
    frame_document,
    make_sentence,
    non_pad_sentences,
)

TASK_SIMPLIFY = "simplify"
TASK_READ_CLASSIFY = "read_classify"
CONTROL_PREFIXES = {
    TASK_SIMPLIFY: "simplify: ",
    TASK_READ_CLASSIFY: "read classify: ",
}

SPLIT_TRAIN = "train"
SPLIT_VALID = "valid"
SPLIT_TEST = "test"


@dataclass(frozen=True)
class LeveledArticle:
    """One article in up to five readability versions; level 0 is the
    complex original, 4 the simplest."""

    article_id: str
    versions: dict[int, str]

    def __post_init__(self):
        for level in self.versions:
            if level not in (0, 1, 2, 3, 4):
                raise ValueError(f"level {level} outside [0, 4]")


@dataclass(frozen=True)
class SimplificationInstance:
    id: str
    source: Document
    target: Document
    readability_label: int | None
    split: str


@dataclass(frozen=True)
class CoherenceExample:
    document: Document
    expert_ratings: tuple[int, ...]
    consensus_class: str
    binary_label: int


def assign_split(article_id: str) -> str:
    """Deterministic 80/10/10 split from a stable hash of the id."""
    digest = hashlib.md5(article_id.encode("utf-8")).digest()
    bucket = digest[0] % 10
    if bucket < 8:
        return SPLIT_TRAIN
    if bucket == 8:
        return SPLIT_VALID
    return SPLIT_TEST


def format_control_input(task: str, text: str) -> str:
    """Prepend the literal task prefix ("simplify: " / "read classify: ")."""
    if task not in CONTROL_PREFIXES:
        raise ValueError(f"unknown task {task!r}")
    if not text:
        raise EmptyText("control input text must be non-empty")
    return CONTROL_PREFIXES[task] + text


def _instance(
    instance_id: str,
    complex_text: str,
    simple_text: str,
    label: int | None,
    frame: int,
    split: str,
) -> SimplificationInstance:
    return SimplificationInstance(
        id=instance_id,
        source=document_from_text(complex_text, frame=frame, doc_id=f"{instance_id}-src"),
        target=document_from_text(simple_text, frame=frame, doc_id=f"{instance_id}-tgt"),
        readability_label=label,
        split=split,
    )


def build_newsela_s(
    articles: list[LeveledArticle], frame: int = DEFAULT_FRAME
) -> tuple[list[SimplificationInstance], list[str]]:
    """Pair level 0 with level 4, falling back to level 3; articles with
    neither are skipped and returned in the skip report."""
    instances = []
    skipped = []
    for article in articles:
        if 0 not in article.versions:
            raise MissingComplex(f"article {article.article_id} has no level 0")
        if 4 in article.versions:
            simple = article.versions[4]
        elif 3 in article.versions:
            simple = article.versions[3]
        else:
            skipped.append(article.article_id)
            continue
        instances.append(
            _instance(
                article.article_id,
                article.versions[0],
                simple,
                label=None,
                frame=frame,
                split=assign_split(article.article_id),
            )
        )
    return instances, skipped


def build_newsela_sl(
    articles: list[LeveledArticle], frame: int = DEFAULT_FRAME
) -> list[SimplificationInstance]:
    """Pair level 0 with every available simple level, carrying the level
    as the readability label."""
    instances = []
    for article in articles:
        if 0 not in article.versions:
            raise MissingComplex(f"article {article.article_id} has no level 0")
        split = assign_split(article.article_id)
        for level in (1, 2, 3, 4):
            if level not in article.versions:
                continue
            instances.append(
                _instance(
                    f"{article.article_id}-l{level}",
                    article.versions[0],
                    article.versions[level],
                    label=level,
                    frame=frame,
                    split=split,
                )
            )
    return instances


def consensus_class(mean_rating: float) -> str:
    """GCDC-style 3-way consensus: low <= 1.8 < medium <= 2.2 < high."""
    if mean_rating <= 1.8:
        return "low"
    if mean_rating <= 2.2:
        return "medium"
    return "high"


def binary_coherence_label(consensus: str) -> int:
    """Only the strict high-consensus class counts as coherent."""
    return 1 if consensus == "high" else 0


def ingest_gcdc(
    records: list[tuple[str, list[int]]], frame: int = DEFAULT_FRAME
) -> list[CoherenceExample]:
    """Turn (text, expert ratings) records into framed coherence examples."""
    examples = []
    for text, ratings in records:
        if not ratings:
            raise InvalidRating("each record needs at least one rating")
        for rating in ratings:
            if rating not in (1, 2, 3):
                raise InvalidRating(f"rating {rating!r} outside [1, 3]")
        consensus = consensus_class(sum(ratings) / len(ratings))
        examples.append(
            CoherenceExample(
                document=document_from_text(text, frame=frame),
                expert_ratings=tuple(ratings),
                consensus_class=consensus,
                binary_label=binary_coherence_label(consensus),
            )
        )
    return examples


def ingest_pairs(
    pairs: list[tuple[str, str]], frame: int = DEFAULT_FRAME
) -> list[SimplificationInstance]:
    """Plain aligned (complex, simple) pairs with no readability labels."""
    instances = []
    for index, (complex_text, simple_text) in enumerate(pairs):
        if not complex_text.strip():
            raise EmptyText(f"pair {index} has an empty complex side")
        if not simple_text.strip():
            raise EmptyText(f"pair {index} has an empty simple side")
        instance_id = f"pair{index:05d}"
        instances.append(
            _instance(
                instance_id,
                complex_text,
                simple_text,
                label=None,
                frame=frame,
                split=assign_split(instance_id),
            )
        )
    return instances


# ---------------------------------------------------------------------------
# Synthetic leveled articles
# ---------------------------------------------------------------------------

# hard -> easy substitutions, one group applied per simplification step
_LEXICON_GROUPS = (
    (
        ("purchase", "buy"),
        ("utilize", "use"),
        ("demonstrate", "show"),
        ("examine", "check"),
        ("discover", "find"),
    ),
    (
        ("automobile", "car"),
        ("residence", "home"),
        ("assistance", "help"),
        ("frequently", "often"),
        ("enormous", "big"),
    ),
    (
        ("approximately", "about"),
        ("consume", "eat"),
        ("construct", "build"),
        ("entire", "whole"),
        ("obtain", "get"),
    ),
    (
        ("individuals", "people"),
        ("numerous", "many"),
        ("commence", "start"),
        ("terminate", "end"),
        ("additional", "more"),
    ),
)

SUBSTITUTION_TABLE = {hard: easy for group in _LEXICON_GROUPS for hard, easy in group}

_NOUNS = (
    "farmer", "teacher", "doctor", "sailor", "baker", "painter", "miner",
    "writer", "singer", "driver", "garden", "market", "harbor", "castle",
    "forest", "valley", "river", "bridge", "tower", "village", "weaver",
    "hunter", "trader", "mason", "potter", "tailor", "smith", "scout",
    "ranger", "keeper",
)
_PLACES = (
    "barn", "mill", "dock", "shop", "field", "cave", "camp", "road",
    "hill", "lake", "pier", "farm", "yard", "gate", "well", "path",
)
_EASY_VERBS = (
    "sees", "keeps", "makes", "takes", "holds", "brings", "moves",
    "shows", "meets", "leads", "lifts", "pulls", "turns", "greets",
)


def _render_sentence(tokens: list[str]) -> str:
    words = list(tokens)
    words[0] = words[0][0].upper() + words[0][1:]
    return " ".join(words) + "."


def _generate_level0(rng: random.Random) -> list[list[str]]:
    # consecutive sentences share exactly one content word (the chain noun);
    # everything else is drawn without replacement, so sentence order is the
    # only source of systematic lexical overlap
    n_sentences = rng.randint(11, 14)
    chain = rng.sample(_NOUNS, n_sentences + 1)
    hard_words = rng.sample(sorted(SUBSTITUTION_TABLE), n_sentences)
    places = rng.sample(_PLACES, min(n_sentences, len(_PLACES)))
    easy_verbs = rng.sample(_EASY_VERBS, min(n_sentences, len(_EASY_VERBS)))
    sentences = []
    for i in range(n_sentences):
        hard = hard_words[i]
        place = places[i % len(places)]
        if rng.random() < 0.4:
            easy = easy_verbs[i % len(easy_verbs)]
            tokens = [
                "the", chain[i], "will", hard, "the", chain[i + 1],
                "and", "the", chain[i], easy, "the", place,
            ]
        else:
            tokens = [
                "the", chain[i], "will", hard, "the", chain[i + 1],
                "near", "the", place,
            ]
        sentences.append(tokens)
    return sentences


def _simplify_step(sentences: list[list[str]], level: int) -> list[list[str]]:
    table = dict(_LEXICON_GROUPS[level - 1])
    result = []
    for tokens in sentences:
        substituted = [table.get(t, t) for t in tokens]
        if "and" in substituted:
            idx = substituted.index("and")
            left, right = substituted[:idx], substituted[idx + 1 :]
            if left and right:
                result.append(left)
                result.append(right)
                continue
        result.append(substituted)
    if level >= 3 and len(result) > 8:
        result = result[:-1]
    return result


def generate_synthetic_corpus(seed: int, n_articles: int) -> list[LeveledArticle]:
    """Seeded leveled articles: each level is derived from the previous one
    by lexicon substitution, conjunction splitting and trailing-sentence
    deletion, so higher levels read strictly easier."""
    if n_articles < 1:
        raise ValueError("n_articles must be >= 1")
    rng = random.Random(seed)
    articles = []
    for index in range(n_articles):
        sentences = _generate_level0(rng)
        versions = {0: " ".join(_render_sentence(s) for s in sentences)}
        current = sentences
        for level in (1, 2, 3, 4):
            current = _simplify_step(current, level)
            versions[level] = " ".join(_render_sentence(s) for s in current)
        articles.append(LeveledArticle(article_id=f"art{index:04d}", versions=versions))
    return articles


# ---------------------------------------------------------------------------
# On-disk formats
# ---------------------------------------------------------------------------

def _doc_to_field(doc: Document) -> str:
    return "\n".join(s.text for s in non_pad_sentences(doc))


def _doc_from_field(field: str, frame: int, doc_id: str) -> Document:
    sentences = [make_sentence(part) for part in field.split("\n")]
    return frame_document(sentences, frame=frame, doc_id=doc_id)


def instance_to_record(instance: SimplificationInstance) -> dict:
    record = {
        "id": instance.id,
        "source": _doc_to_field(instance.source),
        "target": _doc_to_field(instance.target),
    }
    if instance.readability_label is not None:
        record["level"] = instance.readability_label
    record["split"] = instance.split
    return record


def instance_from_record(record: dict, frame: int = DEFAULT_FRAME) -> SimplificationInstance:
    instance_id = record["id"]
    return SimplificationInstance(
        id=instance_id,
        source=_doc_from_field(record["source"], frame, f"{instance_id}-src"),
        target=_doc_from_field(record["target"], frame, f"{instance_id}-tgt"),
        readability_label=record.get("level"),
        split=record["split"],
    )


def write_corpus(instances: list[SimplificationInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            handle.write(json.dumps(instance_to_record(instance), ensure_ascii=False))
            handle.write("\n")


def read_corpus(path, frame: int = DEFAULT_FRAME) -> list[SimplificationInstance]:
    instances = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                instances.append(instance_from_record(json.loads(line), frame=frame))
    return instances


def read_gcdc_file(path) -> list[tuple[str, list[int]]]:
    """Newline-delimited records with keys "text" and "expert_ratings"."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                record = json.loads(line)
                records.append((record["text"], list(record["expert_ratings"])))
    return records
