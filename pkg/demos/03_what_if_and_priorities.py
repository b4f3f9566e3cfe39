"""
What-if predictions and improvement priorities
==============================================

The fitted hierarchy is a prediction machine: multiply full-precision
slopes down any path and you get the expected root-rating payoff of
moving one attribute.  Ranking leaves by (path slope x competitive gap)
turns the whole survey into a to-do list.
"""

from cvmkit import datasets
from cvmkit.analytics import rank_priorities, what_if
from cvmkit.regression import fit_hierarchy
from cvmkit.rendering import render_priorities
from cvmkit.survey import split_by_supplier

tree = datasets.automobile_tree()
sample = datasets.market_survey()
own, competitors = split_by_supplier(sample)
hierarchy = fit_hierarchy(sample, tree)

# If perceived Quality moved up 0.6 of a rating point, what happens to
# the root rating?  The quality weight prints as 51%, so roughly
# 0.51 * 0.6 — about a third of a point.
effect = what_if(hierarchy, "quality", 0.6)
print(f"quality +0.6  ->  root {effect:+.3f}")

# The same machinery works three levels down; slopes multiply.
effect = what_if(hierarchy, "billing", 1.0)
print(f"billing +1.0  ->  root {effect:+.3f}")
print(f"  (path slope = {hierarchy.path_slope('billing'):.4f})")

# Rank every leaf.  Billing tops the list: a heavy weight inside the
# delivery process and a 1.4-point deficit against the market.
ranking = rank_priorities(hierarchy, own, competitors)
print()
print(render_priorities(ranking))

leader = ranking.entries[0]
print(
    f"focus first on {leader.node!r}: closing the {leader.gap:.1f}-point gap "
    f"is worth about {leader.score:+.2f} on the root rating"
)
