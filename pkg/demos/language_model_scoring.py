"""Katz-backoff scoring of candidate words in context.

position_score sums the log10 probabilities of every n-gram window that
covers the position, so a candidate is judged by how it reads both after
its left context and before its right context.
"""

from advtext import fixtures
from advtext.lm import normalize_candidates, position_score, word_logprob
from advtext.text import tokenize

lm = fixtures.load_toy_lm()
print("order:", lm.order)

print("p(movie | good) =", word_logprob(lm, ["good"], "movie"))
print("p(good | movie) =", word_logprob(lm, ["movie"], "good"))
print("p(<unk> anywhere) =", word_logprob(lm, [], "zzz"))

doc = tokenize("good movie")
for candidate in ("movie", "good"):
    raw = position_score(lm, doc, 1, candidate)
    print(f"position_score(pos=1, {candidate!r}) = {raw:.3f}")

# candidate sets are min-max normalized for display: best word pins 1.0
raws = [position_score(lm, doc, 1, c) for c in ("movie", "good")]
print("normalized:", normalize_candidates(raws))
