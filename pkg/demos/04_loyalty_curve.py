"""
The loyalty curve
=================

Bin respondents by their integer root-value rating, compute the share
"very willing" to recommend in each bin, and smooth the shares to a
monotone curve (pool-adjacent-violators).  The curve converts a value
score into a predicted willing share -- and inverts: what score buys a
given loyalty level?
"""

from cvmkit import datasets
from cvmkit.analytics import loyalty_curve, value_target_for_loyalty
from cvmkit.rendering import render_loyalty_curve
from cvmkit.survey import OutcomeKind, split_by_supplier

own, _ = split_by_supplier(datasets.market_survey())

curve = loyalty_curve(own, OutcomeKind.RECOMMEND, threshold=8)
print(render_loyalty_curve(curve))

# Reading the curve at today's own value score (about 7.3): roughly 63%
# of customers are very willing to recommend.
print(f"willing share at value 7.3: {curve.proportion_at(7.3):.1%}")

# Inverting it: to get 80% very-willing, the value score must reach ~7.8.
target = value_target_for_loyalty(curve, 0.80)
print(f"value score needed for 80% willing: {target:.2f}")

# A stricter bar ("very willing" = 9+) shifts the whole curve down.
strict = loyalty_curve(own, OutcomeKind.RECOMMEND, threshold=9)
print(f"\nwith threshold 9, the 7.3 reading drops to {strict.proportion_at(7.3):.1%}")

# The repurchase outcome gives a second curve from the same survey.
repurchase = loyalty_curve(own, OutcomeKind.REPURCHASE, threshold=8)
print(f"repurchase curve at 7.3: {repurchase.proportion_at(7.3):.1%}")
