"""One full attack against the builtin lexicon scorer.

The population starts as mutated copies of the document; each generation
keeps the elite unchanged and breeds the rest by crossover plus one
nearest-neighbor word swap. We stop when the score crosses zero.
"""

from advtext import fixtures
from advtext.attack import AttackConfig, ScoreThreshold, run_attack
from advtext.classifiers import LexiconClassifier
from advtext.text import tokenize

store = fixtures.load_toy_store()
classifier = LexiconClassifier(fixtures.load_toy_lexicon())
doc = tokenize("the movie was bad")

config = AttackConfig(
    generations=10,
    population_size=8,
    tau=2.5,
    k_neighbors=5,
    conditions=(ScoreThreshold(0.0),),
    seed=3,
)

print(f"original: {doc.text!r}  score {classifier.score(doc.text).score:+.2f}")
result = run_attack(doc, classifier, store, config)

print(f"{'gen':>3}  {'score':>6}  {'wmd':>6}  {'swaps':>5}  {'queries':>7}  text")
for ev in result.events:
    print(
        f"{ev.generation:>3}  {ev.elite.score:+.2f}  {ev.wmd:6.3f}  "
        f"{ev.swap_count:>5}  {ev.queries:>7}  {ev.elite.doc.text!r}"
    )
print(f"stopped: {result.reason} after {result.generations_run} generation(s), "
      f"{result.queries_used} classifier queries")
