"""Tour of the 40-state configuration: cards, blocks, tetrads, and MUB slices.

Run:  python3 demos/configuration_tour.py
"""

from fractions import Fraction

from wittingqkd import WittingConfiguration
from wittingqkd.configuration import Card, SUITS

config = WittingConfiguration()

print("The configuration has", len(config.states), "projective states in C^4.")
print("Scaled by sqrt(3), every coordinate is an Eisenstein integer a + b*w.")
print()

print("A few states, with card and block numbering:")
for label in ("S1", "S3", "H10", "C2"):
    state = config.state_of(Card.parse(label))
    coords = ", ".join(str(x) for x in state.vector)
    print(f"  {label:>3}  block {state.block}  ({coords})")
print()

print("Multiplying the 40 states by the six unit phases recovers the")
print("240 vertices of the underlying polytope:")
print("  vertices:", len(config.expand_vertices()))
print()

print("Orthogonality: every state is orthogonal to exactly 12 others, and")
print("every transition probability between distinct states is 0 or 1/3:")
probs = {config.transition_prob(s, t) for s in config.states for t in config.states}
print("  observed spectrum:", sorted(probs))
print()

print("The 240 orthogonal pairs organise into 40 measurement tetrads;")
print("each state sits in exactly 4 of them:")
tags = {}
for basis in config.bases:
    tags[basis.tag] = tags.get(basis.tag, 0) + 1
print("  tetrads by kind:", tags)
print("  (the 10 rank tetrads plus 18 more with one card per suit = 28,")
print("   and 12 tetrads made of a single suit)")
print()

print("The first few tetrads:")
for basis in config.bases[:3] + config.bases[28:29]:
    members = " ".join(c.label for c in basis.members)
    print(f"  #{basis.id:<2} {basis.tag:<12} {members}")
print()

print("Complex conjugation maps the configuration onto itself, suit by suit,")
print("through the rank involution 3<->4, 5<->8, 7<->9, 6<->10:")
for rank in (3, 5, 7, 6):
    image = config.conjugate_card(Card("S", rank))
    print(f"  conj(S{rank}) = {image.label}")
print()

print("Fixing any coordinate to zero leaves 12 states that form four")
print("mutually unbiased triads of the 3-dimensional subspace:")
for k in range(4):
    triads = config.mub_triads(k)
    rendered = "  ".join("{" + ",".join(c.label for c in t) + "}" for t in triads)
    print(f"  coord {k}: {rendered}")
third = Fraction(1, 3)
cross = config.transition_prob(
    config.mub_triads(3)[0][0], config.mub_triads(3)[1][0]
)
print("  cross-triad probability:", cross, "(exactly 1/3)" if cross == third else "")
