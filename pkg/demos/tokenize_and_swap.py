"""Documents are immutable token sequences that round-trip to text.

Every transformation returns a new Document; the original survives for
diffing, reverting, and distance measurement.
"""

from advtext.text import apply_swap, lock_positions, tokenize

doc = tokenize("The movie was bad, honestly.")
print("text:     ", repr(doc.text))
print("tokens:   ", [t.surface for t in doc.tokens])
print("words at: ", doc.word_positions())

# swaps replicate the original casing, so sentence starts stay sentences
swapped = apply_swap(doc, 0, "that")
print("swap 0:   ", swapped.text)

# locks protect positions from the attack; they accumulate
locked = lock_positions(doc, [1])
print("locks:    ", sorted(locked.locks))
try:
    apply_swap(locked, 1, "film")
except Exception as exc:
    print("swap 1:   ", type(exc).__name__, "-", exc)

# punctuation is kept as separate non-word tokens and never swapped
print("round trip holds:", tokenize(doc.text).text == doc.text)
