"""
Fitting the driver hierarchy
============================

Every internal tree node gets its own least-squares model: the node's
rating regressed on its children's ratings.  Coefficients become integer
"impact weights" (percent form, no renormalisation), and each table line
pairs the weight with own-vs-competitor means and a relative rating
(100 = parity).
"""

from cvmkit import datasets
from cvmkit.analytics import profile_table
from cvmkit.regression import fit_hierarchy
from cvmkit.rendering import render_profile_table
from cvmkit.survey import split_by_supplier

tree = datasets.automobile_tree()
sample = datasets.market_survey()
own, competitors = split_by_supplier(sample)

hierarchy = fit_hierarchy(sample, tree)
print("fitted nodes:")
for node_id, model in hierarchy.models.items():
    print(f"  {node_id}: R^2 = {model.fit.r_squared:.2f}, n = {model.fit.n}")

# The headline table: how Quality and Price drive perceived value, and
# where we stand against the market on each.  The root's relative rating
# is the single-number competitive scorecard (CVA).
print()
print(render_profile_table(profile_table(hierarchy, own, competitors, tree.root)))

# Drill one level down into Quality, then into its weakest process.
print(render_profile_table(profile_table(hierarchy, own, competitors, "quality")))
print(render_profile_table(profile_table(hierarchy, own, competitors, "delivery_process")))
