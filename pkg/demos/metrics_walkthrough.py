"""Walk through the evaluation metrics on a tiny worked example.

Run with: python3 demos/metrics_walkthrough.py
"""

from simdoc.metrics import d_sari, fkgl, fre, sari
from simdoc.textproc import document_from_text

# A two-sentence "complex" document and a hand-written simplification.
source = document_from_text(
    "The municipal committee deliberated extensively regarding the proposal. "
    "Ultimately the committee approved it."
)
reference = document_from_text(
    "The town committee talked about the plan. They approved it."
)

# First, readability of each side. Lower FKGL and higher FRE mean easier text.
print("readability")
print(f"  source     FKGL {fkgl(source):7.3f}   FRE {fre(source):8.3f}")
print(f"  reference  FKGL {fkgl(reference):7.3f}   FRE {fre(reference):8.3f}")

# A prediction that copies the source unchanged scores poorly: it keeps
# n-grams the reference deleted and adds none of the reference's new ones.
print("\nprediction = source (no simplification at all)")
print(f"  SARI   {sari(source, source, [reference]):7.3f}")
print(f"  D-SARI {d_sari(source, source, [reference]):7.3f}")

# A prediction equal to the reference is the fixed point: both metrics hit 100.
print("\nprediction = reference (perfect match)")
print(f"  SARI   {sari(source, reference, [reference]):7.3f}")
print(f"  D-SARI {d_sari(source, reference, [reference]):7.3f}")

# Something in between: right words, but crammed into one long sentence.
# Plain SARI barely notices; D-SARI penalizes the sentence-count drift.
one_sentence = document_from_text(
    "The town committee talked about the plan and they approved it."
)
print("\nprediction = reference text squashed into one sentence")
print(f"  SARI   {sari(source, one_sentence, [reference]):7.3f}")
print(f"  D-SARI {d_sari(source, one_sentence, [reference]):7.3f}")
