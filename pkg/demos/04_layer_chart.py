"""Building one layer chart from the shipped ledgers.

The level-one ledger asserts each of its differentials; every longer
layer inherits truncations and pushforwards mechanically and adds only
the records that lower the final entry.
"""

from tsseq.pipelines import Pipelines, nishida_candidates
from tsseq.tables import emit_table

pipe = Pipelines()

print(emit_table(pipe.build_tahss(2, 1), "TAHSS-L2"))

proposals, unknown = nishida_candidates(pipe, 2, 1)
print(f"attaching-map proposals for the length-2 layer: {len(proposals)}")
print(f"products the database cannot decide (reported, never proposed): {len(unknown)}")
