"""The EHP chart, its detection bijection, and the boundary-effect rule.

The assembled chart's surviving classes detect exactly the stable lines
through the covered range.  The geometric-boundary deriver reproduces
the starred exotic differentials from three plain chart records.
"""

from tsseq.engine import describe, gbe_derive
from tsseq.pipelines import Pipelines, tehpss_detection_report
from tsseq.tables import emit_table

pipe = Pipelines()

ehp = pipe.build_tehpss()
chart = emit_table(ehp, "TEHPSS", emit_max=19, boxed=True)
print("\n".join(chart.splitlines()[:40]))
print("  ... (chart continues through stem 19)\n")

issues = tehpss_detection_report(pipe, ehp)
print("detection bijection with the stable lines:", "exact" if not issues else issues)

s1, s3 = pipe.build_tgss(1), pipe.build_tgss(3)


def find(records, src_cell, tgt_cell, src):
    for rec in records:
        if (rec.src_cell, rec.tgt_cell) == (src_cell, tgt_cell) and \
                (rec.src_gen, rec.src_off) == src:
            return rec
    raise LookupError


d1 = find(s1.records, (4,), (1,), ("eps_eta", 0))
d2 = find(s3.records, (), (4,), ("a6_3", 0))
d3 = find(s1.records, (8, 2), (4, 1), ("nu", 2))
derived = gbe_derive(d1, d2, d3, s1.records, s3.records, 1, pipe.db)
print("\nboundary-effect derivation from three plain records:")
for rec in (d1, d2, d3):
    print("  input :", describe(rec, pipe.db, "tgss"))
print("  output:", describe(derived, pipe.db, "tgss"))
