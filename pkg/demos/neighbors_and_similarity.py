"""Nearest-neighbor lookups over the packaged 8-word vector space.

The threshold tau comes first, then the k cut: a word with no neighbors
inside tau is simply immovable, no matter how large k is.
"""

from advtext import fixtures
from advtext.embeddings import neighbors, similarity

store = fixtures.load_toy_store()
print(f"{len(store.vectors)} words, dim {store.dim}")

for tau in (0.25, 1.0, 2.5):
    found = neighbors(store, "bad", tau, k=10)
    names = [f"{n.word} ({n.distance:.3f})" for n in found]
    print(f"bad, tau={tau}: {', '.join(names) or '(none)'}")

# antonyms are filtered out so the attack cannot flip meaning outright:
# good/great stay unreachable from bad even at tau 2.5 above
print("good in store:", "good" in store)

# similarity maps distance into (0, 1]; identical words score 1.0
print("sim(good, great) =", round(similarity(store, "good", "great"), 4))
print("sim(good, movie) =", round(similarity(store, "good", "movie"), 4))
