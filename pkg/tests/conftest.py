import random

import pytest

from simdoc.corpus import CoherenceExample, generate_synthetic_corpus
from simdoc.textproc import document_from_text, frame_document, non_pad_sentences


def shuffled_copy(doc, rng):
    """Sentence-shuffled version of a framed document, guaranteed to differ."""
    sentences = list(non_pad_sentences(doc))
    original = [s.text for s in sentences]
    while True:
        rng.shuffle(sentences)
        if [s.text for s in sentences] != original:
            return frame_document(sentences, frame=len(doc.sentences), doc_id=doc.id + "-shuf")


def ordered_vs_shuffled(n_articles, seed):
    """Coherence examples: level-0 synthetic documents labeled coherent, their
    sentence-shuffled copies labeled incoherent."""
    articles = generate_synthetic_corpus(seed, n_articles)
    rng = random.Random(seed + 1)
    examples = []
    for article in articles:
        doc = document_from_text(article.versions[0], doc_id=article.article_id)
        examples.append(CoherenceExample(doc, (3, 3, 3), "high", 1))
        examples.append(CoherenceExample(shuffled_copy(doc, rng), (1, 1, 1), "low", 0))
    return examples


@pytest.fixture(scope="session")
def synthetic_articles():
    return generate_synthetic_corpus(seed=11, n_articles=20)


@pytest.fixture(scope="session")
def coherence_examples():
    return ordered_vs_shuffled(n_articles=40, seed=5)
