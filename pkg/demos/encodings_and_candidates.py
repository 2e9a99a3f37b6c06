"""Per-word diagnostics that drive the document view.

influence: how much the score moves if the word is swapped for its
nearest neighbor. selection: how likely the attack is to pick the word.
semantic: how well the current word fits its slot under the n-gram model.
"""

from advtext import fixtures
from advtext.analytics import candidate_records, compute_encodings
from advtext.classifiers import LexiconClassifier
from advtext.text import tokenize

store = fixtures.load_toy_store(stop_words=frozenset({"the", "was"}), antonyms={})
classifier = LexiconClassifier(fixtures.load_toy_lexicon())
lm = fixtures.load_toy_lm()

doc = tokenize("the movie was bad")
enc = compute_encodings(doc, classifier, store, lm, tau=0.25)

print(f"{'word':>8}  {'influence':>9}  {'selection':>9}  {'lm':>5}")
for i, token in enumerate(doc.tokens):
    print(f"{token.surface:>8}  {enc.influence[i]:>+9.3f}  "
          f"{enc.selection_prob[i]:>9.3f}  {enc.lm_score[i]:>5.2f}")

# the scatterplot view behind a word: every in-threshold replacement with
# its similarity, score shift, and normalized language-model fit
print("\ncandidates for 'bad':")
for rec in candidate_records(doc, 3, classifier, store, lm, tau=0.25, k=10):
    print(f"  {rec.word:>9}  sim {rec.similarity:.4f}  delta {rec.score_delta:+.2f}  "
          f"lm_norm {rec.lm_norm:.2f}")
