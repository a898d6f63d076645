"""Sphere charts: generation, exotic records, and the vanishing audit.

The circle's chart must be empty away from its fundamental class; that
audit is what forces the four records with no Hopf-invariant origin.
Dropping them breaks the chart at exactly their positions.
"""

from tsseq.pipelines import Pipelines, check_acyclicity
from tsseq.tables import emit_table

pipe = Pipelines()

s2 = pipe.build_tgss(2)
print(emit_table(s2, "TGSS-S2", emit_max=19))

print("circle-chart vanishing, stems 2..20:",
      "empty" if not check_acyclicity(pipe.build_tgss(1)) else "FAILED")

thinned = [(rid, rec) for rid, rec in pipe.ledgers if rec.provenance != "bizarre"]
broken = Pipelines(db=pipe.db, ledgers=thinned)
survivors = check_acyclicity(broken.build_tgss(1))
print(f"\nwithout the four forced records, {len(survivors)} classes survive:")
for line in survivors:
    print("  " + line)
