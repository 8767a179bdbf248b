"""Train the coherence scorer to tell ordered documents from shuffled ones.

The synthetic corpus chains its nouns across sentences, so adjacent
sentences of an untouched document share words while a shuffled copy
mostly does not. A logistic regression over a handful of discourse
features separates the two cleanly.

Run with: python3 demos/coherence_training.py
"""

import random

from simdoc.coherence import FEATURE_NAMES, train_coherence
from simdoc.corpus import CoherenceExample, generate_synthetic_corpus
from simdoc.textproc import document_from_text, frame_document, non_pad_sentences


def shuffled(doc, rng):
    sentences = list(non_pad_sentences(doc))
    original = [s.text for s in sentences]
    while True:
        rng.shuffle(sentences)
        if [s.text for s in sentences] != original:
            return frame_document(sentences, frame=len(doc.sentences), doc_id=doc.id)


def labeled_set(n_articles, seed):
    rng = random.Random(seed + 1)
    examples = []
    for article in generate_synthetic_corpus(seed, n_articles):
        doc = document_from_text(article.versions[0], doc_id=article.article_id)
        examples.append(CoherenceExample(doc, (3, 3, 3), "high", 1))
        examples.append(CoherenceExample(shuffled(doc, rng), (1, 1, 1), "low", 0))
    return examples


train = labeled_set(100, seed=21)
held_out = labeled_set(50, seed=77)

model = train_coherence(train, seed=0)

print("training loss by epoch (every 10th)")
for epoch, loss in model.training_log[::10]:
    print(f"  epoch {epoch:3d}  bce {loss:.4f}")

print("\nlearned weights")
for name, weight in zip(FEATURE_NAMES, model.weights):
    print(f"  {name:20s} {weight:+.4f}")

correct = sum(model.predict(e.document)[0] == e.binary_label for e in held_out)
print(f"\nheld-out accuracy: {correct}/{len(held_out)} = {correct / len(held_out):.3f}")
