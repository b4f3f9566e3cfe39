"""
Value trees and survey samples
==============================

The package's two core inputs: a tree that decomposes "worth what paid
for" into rated attributes, and a survey sample of 1-10 ratings ingested
against that tree.
"""

from cvmkit import datasets
from cvmkit.survey import node_mean, split_by_supplier

# The bundled automobile-market tree: one root, two drivers, and the
# leaf attributes respondents actually rate.
tree = datasets.automobile_tree()
print(f"tree {tree.name!r}: {len(tree.nodes)} nodes, {len(tree.leaves())} leaves")
for node_id in tree.preorder():
    node = tree.node(node_id)
    print("  " * tree.depth(node_id) + f"{node.label}  [{node.kind}]")

# The bundled survey: 2000 respondents across three suppliers.
sample = datasets.market_survey()
print(f"\n{len(sample)} respondents, suppliers: {', '.join(sample.suppliers())}")

# Split into the own half and the pooled-competitor half, then look at
# the root rating on each side.  Half-widths are 95% confidence.
own, competitors = split_by_supplier(sample)
for label, half in (("own", own), ("competitors", competitors)):
    m = node_mean(half, tree.root)
    print(f"{label:12s} mean {tree.root} = {m.mean:.3f} +/- {m.half_width:.3f} (n={m.n})")
