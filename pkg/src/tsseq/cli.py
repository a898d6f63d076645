"""Command-line surface.

Subcommands build one instance and print its chart, propose attaching-map
candidates, query bases and the dual Steenrod action, or check every
bundled golden table and audit.  ``--records`` switches the output to a
machine-readable JSON-lines stream.  The exit status is nonzero whenever
a check or audit fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tsseq.engine import describe
from tsseq.layers import basis, steenrod_on_cell
from tsseq.pipelines import (
    DEFAULT_T_MAX,
    TEHPSS_EMIT_MAX,
    TGSS_EMIT_MAX,
    Pipelines,
    candidate_subsumption_report,
    check_acyclicity,
    default_db,
    nishida_candidates,
    parse_ledger,
    tehpss_detection_report,
)
from tsseq.stems import load_database
from tsseq.tables import diff_golden, emit_table


def _build_pipelines(args) -> Pipelines:
    db = load_database(Path(args.stems_db).read_text()) if args.stems_db else default_db()
    ledgers = None
    if args.ledger_dir:
        ledgers = []
        for path in sorted(Path(args.ledger_dir).glob("*.led")):
            ledgers.extend(parse_ledger(path.read_text(), db))
    return Pipelines(db=db, ledgers=ledgers, t_max=args.t_max)


def _json_records(inst, db):
    for fired in inst.fired:
        rec = fired.record
        yield {
            "kind": "fired",
            "source": describe(rec, db, inst.spec.kind).split(" -> ")[0],
            "record": describe(rec, db, inst.spec.kind),
            "provenance": rec.provenance,
        }
    for rec, reason in inst.skipped:
        yield {
            "kind": "skipped",
            "record": describe(rec, db, inst.spec.kind),
            "provenance": rec.provenance,
            "reason": reason,
        }
    for (row, cell), _pos in sorted(inst.positions.items(), key=lambda kv: kv[0][0]):
        for item in inst.alive_at(row, cell):
            yield {"kind": "survivor", "grade": row, "cell": list(map(list, cell)) if
                   inst.spec.kind == "tehpss" else list(cell), "class": repr(item)}


def _emit(inst, table_id, args, emit_max=None, boxed=False):
    if args.records:
        for obj in _json_records(inst, inst.db):
            print(json.dumps(obj, ensure_ascii=False))
    else:
        print(emit_table(inst, table_id, emit_max=emit_max, boxed=boxed), end="")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tsseq", description=__doc__)
    parser.add_argument("--stems-db", help="path to a stems database file")
    parser.add_argument("--ledger-dir", help="directory of .led ledger files")
    parser.add_argument("--t-max", type=int, default=DEFAULT_T_MAX)
    parser.add_argument("--records", action="store_true",
                        help="emit a JSON-lines record stream instead of a chart")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tahss = sub.add_parser("tahss", help="build one layer chart")
    p_tahss.add_argument("--k", type=int, required=True)
    p_tahss.add_argument("--n", type=int, default=1)

    p_tgss = sub.add_parser("tgss", help="build one sphere chart")
    p_tgss.add_argument("--sphere", type=int, required=True)

    sub.add_parser("tehpss", help="build the EHP chart")

    p_cand = sub.add_parser("candidates", help="attaching-map differential proposals")
    p_cand.add_argument("--k", type=int, required=True)
    p_cand.add_argument("--n", type=int, default=1)

    p_check = sub.add_parser("check", help="golden tables and audits")
    p_check.add_argument("--golden", help="directory of golden files (default: bundled)")

    p_basis = sub.add_parser("basis", help="cell basis of one layer degree")
    p_basis.add_argument("--k", type=int, required=True)
    p_basis.add_argument("--n", type=int, default=1)
    p_basis.add_argument("--d", type=int, required=True)
    p_basis.add_argument("--m", type=int)

    p_nish = sub.add_parser("nishida", help="dual Steenrod action on one cell")
    p_nish.add_argument("--r", type=int, required=True)
    p_nish.add_argument("--cell", required=True, help="comma-separated entries, e.g. 9,4")
    p_nish.add_argument("--n", type=int, default=1)

    args = parser.parse_args(argv)
    pipe = _build_pipelines(args)

    if args.command == "tahss":
        _emit(pipe.build_tahss(args.k, args.n), f"TAHSS-L{args.k}", args)
        return 0
    if args.command == "tgss":
        _emit(pipe.build_tgss(args.sphere), f"TGSS-S{args.sphere}", args,
              emit_max=TGSS_EMIT_MAX)
        return 0
    if args.command == "tehpss":
        _emit(pipe.build_tehpss(), "TEHPSS", args, emit_max=TEHPSS_EMIT_MAX, boxed=True)
        return 0
    if args.command == "candidates":
        proposals, unknown = nishida_candidates(pipe, args.k, args.n)
        for rec in proposals:
            print(describe(rec, pipe.db, "tahss"))
        for line in unknown:
            print(f"# unknown-coefficient: {line}")
        return 0
    if args.command == "basis":
        cells = sorted(basis(args.k, args.n, args.d, args.m), key=lambda c: tuple(reversed(c)))
        for cell in cells:
            print("[" + ",".join(map(str, cell)) + "]")
        return 0
    if args.command == "nishida":
        cell = tuple(int(x) for x in args.cell.split(","))
        for out in sorted(steenrod_on_cell(args.r, cell, args.n)):
            print("[" + ",".join(map(str, out)) + "]")
        return 0
    if args.command == "check":
        return run_checks(pipe, args.golden)
    return 2


def run_checks(pipe: Pipelines, golden_dir=None) -> int:
    from importlib import resources

    failures = 0

    def gold_text(name: str) -> str:
        if golden_dir:
            return (Path(golden_dir) / name).read_text()
        return resources.files("tsseq").joinpath(f"data/golden/{name}").read_text()

    charts = [(f"TAHSS-L{k}", f"tahss_l{k}.txt",
               lambda k=k: emit_table(pipe.build_tahss(k, 1), f"TAHSS-L{k}"))
              for k in (1, 2, 3)]
    charts += [(f"TGSS-S{n}", f"tgss_s{n}.txt",
                lambda n=n: emit_table(pipe.build_tgss(n), f"TGSS-S{n}", emit_max=TGSS_EMIT_MAX))
               for n in range(1, 7)]
    charts += [("TEHPSS", "tehpss.txt",
                lambda: emit_table(pipe.build_tehpss(), "TEHPSS",
                                   emit_max=TEHPSS_EMIT_MAX, boxed=True))]
    for table_id, fname, build in charts:
        issues = diff_golden(build(), gold_text(fname))
        status = "ok" if not issues else f"FAIL ({len(issues)} rows)"
        print(f"golden {table_id}: {status}")
        for issue in issues[:20]:
            print(f"  {issue}")
        failures += bool(issues)

    survivors = check_acyclicity(pipe.build_tgss(1))
    print("acyclicity S1 stems 2-20:", "ok" if not survivors else f"FAIL ({len(survivors)})")
    failures += bool(survivors)

    for k in (1, 2, 3):
        missing = candidate_subsumption_report(pipe, k)
        print(f"candidate subsumption L{k}:", "ok" if not missing else f"FAIL ({len(missing)})")
        for line in missing[:10]:
            print(f"  {line}")
        failures += bool(missing)

    detect = tehpss_detection_report(pipe, pipe.build_tehpss())
    print("EHP detection bijection:", "ok" if not detect else f"FAIL ({len(detect)})")
    failures += bool(detect)

    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
