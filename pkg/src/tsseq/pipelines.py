"""Builders, ledger/golden file handling, table emission, audits, CLI core.

The shipped ledgers assert only the differentials that cannot be derived
mechanically; everything else is generated:

* lower layers feed the next layer through truncation + pushforward,
* stable-Hopf-invariant entries generate the cross-column candidates of
  every sphere's instance (including the longer ``[m, J]`` forms),
* exotic records (geometric-boundary and forced ones) live in a ledger
  keyed by their sphere of origin and extend upward while their cells
  keep enough excess,
* the EHP instance imports each odd sphere's instance whole and lifts
  the last-entry-dropping records of the layer ledgers.

Emission produces the plain-text golden table format; ``diff_golden``
compares row for row.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tsseq.cu import cu_is_valid, excess_at_least
from tsseq.engine import (
    FiredRecord,
    InfPos,
    Instance,
    LedgerError,
    Record,
    SSeqSpec,
    cell_text,
)
from tsseq.layers import basis
from tsseq.stems import StemsDB, load_database

DEFAULT_T_MAX = 23
TGSS_ROW_MAX = 21
TGSS_EMIT_MAX = 19
TEHPSS_ROW_MAX = 20
TEHPSS_EMIT_MAX = 19

_TAG_FOR = {"gbe": "*", "bizarre": "**", "rogue": "**", "bizarre_lift": "**"}
_TEHPSS_TAG_FOR = {"gbe": "*", "bizarre": "***", "rogue": "**", "bizarre_lift": "***"}


def default_db() -> StemsDB:
    return load_database(resources.files("tsseq").joinpath("data/stems.db").read_text())


def _data_text(name: str) -> str:
    return resources.files("tsseq").joinpath(name).read_text()


# ---------------------------------------------------------------------------
# ledger files
# ---------------------------------------------------------------------------

_LINE_RE = re.compile(
    r"^(?P<name>[^\s(\[]+)"
    r"(\((?P<span>inf|\d+)\))?"
    r"\[(?P<cells>[^\]]*)\]"
    r"(@(?P<off>\d+))?$"
)


def _parse_side(token: str, db: StemsDB):
    m = _LINE_RE.match(token)
    if m is None:
        raise LedgerError(f"cannot parse record side {token!r}")
    vec = db.resolve_vector(m.group("name"))
    cells = tuple(int(x) for x in m.group("cells").split(",")) if m.group("cells") else ()
    span_s = m.group("span")
    span = 1 if span_s is None else (None if span_s == "inf" else (int(span_s).bit_length() - 1))
    extra = int(m.group("off") or 0)
    if len(vec) == 1:
        gen, off = next(iter(vec))
        return gen, off + extra, None, cells, span
    if extra:
        raise LedgerError(f"vector side {token!r} cannot carry an offset")
    return None, 0, vec, cells, span


def parse_ledger(text: str, db: StemsDB) -> List[Tuple[str, Record]]:
    """Parse `d <id> <src> -> <tgt> # provenance ...` lines."""
    out: List[Tuple[str, Record]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        body, _, comment = line.partition("#")
        fields = body.split()
        if len(fields) != 5 or fields[0] != "d" or fields[3] != "->":
            raise LedgerError(f"ledger line {lineno}: malformed {raw!r}")
        sseq_id = fields[1]
        sg, so, sv, sc, sspan = _parse_side(fields[2], db)
        tg, to, tv, tc, tspan = _parse_side(fields[4], db)
        if sspan != tspan:
            raise LedgerError(f"ledger line {lineno}: span mismatch")
        words = comment.split()
        provenance = words[0] if words else "asserted"
        rec = Record(
            src_cell=sc, tgt_cell=tc,
            src_gen=sg or "", tgt_gen=tg or "",
            src_off=so, tgt_off=to,
            span=sspan, src_vec=sv, tgt_vec=tv,
            provenance=provenance,
            note=" ".join(words[1:]),
        )
        out.append((sseq_id, rec))
    return out


@lru_cache(maxsize=None)
def _bundled_ledgers() -> Tuple[Tuple[str, Record], ...]:
    db = default_db()
    out: List[Tuple[str, Record]] = []
    for name in ("tahss_l1.led", "tahss_l2.led", "tahss_l3.led", "tgss_exotic.led", "tehpss.led"):
        out.extend(parse_ledger(_data_text(f"data/ledgers/{name}"), db))
    return tuple(out)


def shipped_records(sseq_id: str, ledgers: Optional[Sequence[Tuple[str, Record]]] = None) -> List[Record]:
    source = ledgers if ledgers is not None else _bundled_ledgers()
    return [rec for rid, rec in source if rid == sseq_id]


# ---------------------------------------------------------------------------
# layer ledgers: truncation + pushforward recursion
# ---------------------------------------------------------------------------

def record_cells_excess_ok(rec: Record, n: int) -> bool:
    return excess_at_least(rec.src_cell, n) and excess_at_least(rec.tgt_cell, n)


def push_record(rec: Record, m: int) -> Record:
    """Append the bottom weight m to both cells (lower-map image)."""
    return Record(
        src_cell=rec.src_cell + (m,), tgt_cell=rec.tgt_cell + (m,),
        src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
        src_off=rec.src_off, tgt_off=rec.tgt_off,
        span=rec.span, src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
        provenance="inherited", candidate=rec.candidate, tag=rec.tag,
        note=rec.note,
    )


class Pipelines:
    """Shared context: database, ledgers, memoized layer record sets."""

    def __init__(self, db: Optional[StemsDB] = None,
                 ledgers: Optional[Sequence[Tuple[str, Record]]] = None,
                 t_max: int = DEFAULT_T_MAX):
        self.db = db or default_db()
        self.ledgers = list(ledgers) if ledgers is not None else list(_bundled_ledgers())
        self.t_max = t_max
        self._tahss_recs: Dict[Tuple[int, int], List[Record]] = {}
        self._tgss_cache: Dict[int, Instance] = {}

    # -- layer record sets ---------------------------------------------------

    def tahss_records(self, k: int, n: int) -> List[Record]:
        key = (k, n)
        if key in self._tahss_recs:
            return self._tahss_recs[key]
        recs: List[Record] = []
        if k >= 1:
            for m in range(n, self.t_max + 1):
                for rec in self.tahss_records(k - 1, 2 * m + 1):
                    recs.append(push_record(rec, m))
            for rec in shipped_records(f"L{k}", self.ledgers):
                if record_cells_excess_ok(rec, n):
                    recs.append(rec)
        # sphere charts reach cells one degree per length past the layer
        # window, so the cap here is looser than any single instance's
        recs = [r for r in recs if sum(r.src_cell) <= self.t_max + k]
        self._tahss_recs[key] = recs
        return recs

    def build_tahss(self, k: int, n: int, extra: Sequence[Record] = ()) -> Instance:
        spec = SSeqSpec("tahss", f"L({k})_{n}", self.t_max, (k, n))
        cells = sorted(
            (c for d in range(self.t_max + 1) for c in basis(k, n, d)) if k else [()],
            key=spec.cell_sort_key,
        )
        if k == 0:
            cells = [()]
        inst = Instance(spec, self.db, cells)
        inst.populate()
        recs = [r for r in self.tahss_records(k, n) if r.src_row(spec, self.db) <= self.t_max]
        recs.extend(extra)
        inst.run(recs)
        return inst

    # -- sphere instances -----------------------------------------------------

    def tgss_cells(self, n: int, row_max: int) -> List[tuple]:
        cells = [()]
        for k in range(1, 4):
            for d in range(row_max + k + 1):
                for cell in basis(k, n, d):
                    if sum(cell) - len(cell) <= row_max:
                        cells.append(cell)
        return cells

    def _shi_candidates(self, spec: SSeqSpec, cells: Sequence[tuple], n: int, row_max: int) -> List[Record]:
        out: List[Record] = []
        shi = self.db.hopf.get("shi", {})
        ghi = self.db.hopf.get("ghi", {})
        for line, entry in shi.items():
            stem = self.db.line_stem(line)
            m = entry.cell[-1]
            for cell in cells:
                tgt_cell = (m,) + cell
                if not cu_is_valid(tgt_cell) or not excess_at_least(tgt_cell, n):
                    continue
                src_row = stem + spec.cell_stem_offset(cell)
                if src_row > row_max:
                    continue
                out.append(Record(
                    src_cell=cell, tgt_cell=tgt_cell,
                    src_gen=line[0], tgt_gen=entry.target[0],
                    src_off=line[1], tgt_off=entry.target[1],
                    provenance="shi", candidate=True,
                ))
        # unstable Hopf invariants drive the longer zero-column differentials
        for line, entry in ghi.items():
            if len(entry.cell) < 2:
                continue
            shi_entry = shi.get(line)
            if shi_entry is not None and shi_entry.cell[-1] >= n:
                continue  # the stable invariant fires first on this sphere
            J, m = entry.cell[:-1], entry.cell[-1]
            tgt_cell = J + (m,)
            if not cu_is_valid(tgt_cell) or not excess_at_least(tgt_cell, n):
                continue
            stem = self.db.line_stem(line)
            if stem > row_max:
                continue
            out.append(Record(
                src_cell=(), tgt_cell=tgt_cell,
                src_gen=line[0], tgt_gen=entry.target[0],
                src_off=line[1], tgt_off=entry.target[1],
                provenance="ghi", candidate=True,
            ))
        return out

    def _exotic_records(self, n: int) -> List[Record]:
        out = []
        for rid, rec in self.ledgers:
            if not rid.startswith("S"):
                continue
            n0 = int(rid[1:])
            if n < n0:
                continue
            if record_cells_excess_ok(rec, n):
                out.append(rec)
        return out

    def build_tgss(self, n: int, row_max: int = TGSS_ROW_MAX) -> Instance:
        if n in self._tgss_cache and self._tgss_cache[n].spec.row_max == row_max:
            return self._tgss_cache[n]
        spec = SSeqSpec("tgss", f"S{n}", row_max, (n,))
        cells = sorted(self.tgss_cells(n, row_max), key=spec.cell_sort_key)
        inst = Instance(spec, self.db, cells)
        inst.populate()
        recs: List[Record] = []
        for k in range(1, 4):
            for rec in self.tahss_records(k, n):
                if rec.src_row(spec, self.db) <= row_max:
                    recs.append(rec)
        recs.extend(self._shi_candidates(spec, cells, n, row_max))
        recs.extend(r for r in self._exotic_records(n) if r.src_row(spec, self.db) <= row_max)
        inst.run(_dedupe(recs))
        self._tgss_cache[n] = inst
        return inst

    # -- the EHP instance -----------------------------------------------------

    def build_tehpss(self, row_max: int = TEHPSS_ROW_MAX) -> Instance:
        spec = SSeqSpec("tehpss", "EHP", row_max, ())
        db = self.db
        cells: List[tuple] = []
        for m in range(row_max + 1):
            cells.append(((), m))
            for k in range(1, 4):
                for d in range(row_max + 24):
                    for J in basis(k, 2 * m + 1, d):
                        if sum(J) + m - len(J) <= row_max:
                            cells.append((J, m))
        cells.sort(key=spec.cell_sort_key)
        cellset = set(cells)
        inst = Instance(spec, db, cells)
        inst.populate()
        recs: List[Record] = []
        # each odd sphere's instance embeds as the same-m slice
        for m in range(row_max + 1):
            sub = self.build_tgss(2 * m + 1)
            for rec in sub.records:
                lifted = _reindex_to_tehpss(rec, m)
                if lifted.src_row(spec, db) <= row_max and \
                        lifted.src_cell in cellset and lifted.tgt_cell in cellset:
                    recs.append(lifted)
        # last-entry-dropping layer records lift across the sphere coordinate
        for k in range(1, 4):
            for rec in self.tahss_records(k, 1):
                if rec.src_cell[-1] <= rec.tgt_cell[-1]:
                    continue
                recs.extend(_lift_record(rec, spec, db, cellset, row_max, tehpss=True))
        for rid, rec in self.ledgers:
            if rid.startswith("S") and rec.src_cell and rec.src_cell[-1] > rec.tgt_cell[-1]:
                recs.extend(_lift_record(rec, spec, db, cellset, row_max, tehpss=True))
            if rid == "EHP":
                recs.append(Record(
                    src_cell=(rec.src_cell[:-1], rec.src_cell[-1]),
                    tgt_cell=(rec.tgt_cell[:-1], rec.tgt_cell[-1]),
                    src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
                    src_off=rec.src_off, tgt_off=rec.tgt_off,
                    span=rec.span, src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
                    provenance=rec.provenance, candidate=rec.candidate,
                    tag=rec.tag, note=rec.note))
        inst.run(_dedupe(recs))
        return inst


def _dedupe(records: Iterable[Record]) -> List[Record]:
    seen = {}
    for rec in records:
        key = (rec.src_cell, rec.tgt_cell, rec.src_gen, rec.tgt_gen,
               rec.src_off, rec.tgt_off, rec.span, rec.src_vec, rec.tgt_vec)
        if key in seen:
            # an asserted copy outranks a candidate copy
            if seen[key].candidate and not rec.candidate:
                seen[key] = rec
            continue
        seen[key] = rec
    return list(seen.values())


def _reindex_to_tehpss(rec: Record, m: int) -> Record:
    return Record(
        src_cell=(rec.src_cell, m), tgt_cell=(rec.tgt_cell, m),
        src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
        src_off=rec.src_off, tgt_off=rec.tgt_off,
        span=rec.span, src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
        provenance=rec.provenance, candidate=rec.candidate, tag=rec.tag, note=rec.note,
    )


ATTACHING_OPS = {1: "2", 2: "eta", 4: "nu", 8: "sigma"}


def nishida_candidates(pipe: Pipelines, k: int, n: int) -> Tuple[List[Record], List[str]]:
    """Attaching-map differential proposals for the length-k layer.

    For every cell, every generating Steenrod degree, and every line with
    a known nonzero product against the matching stable class, propose a
    differential onto each cell of the dual-action support.  Unknown
    products are reported, never proposed.
    """
    from tsseq.layers import steenrod_on_cell

    db = pipe.db
    spec = SSeqSpec("tahss", f"L({k})_{n}", pipe.t_max, (k, n))
    proposals: List[Record] = []
    unknown: List[str] = []
    cells = [c for d in range(pipe.t_max + 1) for c in basis(k, n, d)]
    for cell in cells:
        for r, theta in sorted(ATTACHING_OPS.items()):
            for tgt_cell in sorted(steenrod_on_cell(r, cell, n)):
                for stem in sorted(db.stems):
                    for gen in db.generators_at(stem):
                        top = 1 if gen.order_exp is None else gen.order_exp
                        for off in range(top):
                            line = (gen.name, off)
                            if stem + spec.cell_stem_offset(cell) > pipe.t_max:
                                continue
                            product = db.multiply(theta, db.line_name(line))
                            if product == "?":
                                unknown.append(
                                    f"L({k})_{n} cell {cell} Sq^{r}: {theta}*{db.line_name(line)} unknown")
                                continue
                            if product == "0":
                                continue
                            vec = db.resolve_vector(product)
                            if gen.order_exp is None and r == 1:
                                # the integral tower pairs tail against tail
                                if off == 0:
                                    proposals.append(Record(
                                        src_cell=cell, tgt_cell=tgt_cell,
                                        src_gen="1", tgt_gen="1",
                                        src_off=0, tgt_off=1, span=None,
                                        provenance="nishida_candidate", candidate=True,
                                        note=f"Sq^{r}"))
                                continue
                            if len(vec) == 1:
                                tgt_line = next(iter(vec))
                                proposals.append(Record(
                                    src_cell=cell, tgt_cell=tgt_cell,
                                    src_gen=gen.name, tgt_gen=tgt_line[0],
                                    src_off=off, tgt_off=tgt_line[1],
                                    provenance="nishida_candidate", candidate=True,
                                    note=f"Sq^{r}"))
                            else:
                                proposals.append(Record(
                                    src_cell=cell, tgt_cell=tgt_cell,
                                    src_gen=gen.name, tgt_gen="",
                                    src_off=off, tgt_vec=vec,
                                    provenance="nishida_candidate", candidate=True,
                                    note=f"Sq^{r}"))
    return proposals, unknown


def candidate_subsumption_report(pipe: Pipelines, k: int) -> List[str]:
    """Shipped attaching-map records must appear among the proposals."""
    proposals, _ = nishida_candidates(pipe, k, 1)
    prop_keys = set()
    for rec in proposals:
        for s in range(1 if rec.span is None else rec.span):
            prop_keys.add((rec.src_cell, rec.tgt_cell, rec.src_gen, rec.tgt_gen,
                           rec.src_off + (0 if rec.span is None else s),
                           rec.tgt_off + (0 if rec.span is None else s),
                           rec.src_vec, rec.tgt_vec, rec.span is None))
    missing = []
    for rec in shipped_records(f"L{k}", pipe.ledgers):
        if rec.provenance != "nishida":
            continue
        span = 1 if rec.span is None else rec.span
        for s in range(span):
            key = (rec.src_cell, rec.tgt_cell, rec.src_gen, rec.tgt_gen,
                   rec.src_off + (0 if rec.span is None else s),
                   rec.tgt_off + (0 if rec.span is None else s),
                   rec.src_vec, rec.tgt_vec, rec.span is None)
            if key not in prop_keys:
                missing.append(f"L{k}: shipped nishida record not proposed: "
                               f"{rec.src_cell}->{rec.tgt_cell} {rec.src_gen}@{rec.src_off}")
    return missing


# The EHP-chart name x[J,m] of a detecting class doubles as the lineage
# description x<J>[m] of the elements it detects, with one known exception
# in the range we cover: the class the chart names a8_5[5,2] detects
# elements whose lineage is eta2<13,6>[2].
LINEAGE_EXCEPTIONS = {
    (("a8_5", 0), ((5,), 2)): "eta2<13,6>[2]",
}


def lineage_name(db: StemsDB, line, cell) -> str:
    """Lineage annotation for an EHP-chart class ``line`` at ``(J, m)``."""
    key = (tuple(line), (tuple(cell[0]), cell[1]))
    if key in LINEAGE_EXCEPTIONS:
        return LINEAGE_EXCEPTIONS[key]
    J, m = cell
    inner = ",".join(map(str, J))
    return f"{db.line_name(tuple(line))}<{inner}>[{m}]"


def check_acyclicity(inst: Instance, lo: int = 2, hi: int = 20) -> List[str]:
    """The circle's chart must be empty in the audited stem range."""
    survivors = []
    for (row, cell), _pos in sorted(inst.positions.items(), key=lambda kv: kv[0]):
        if not lo <= row <= hi:
            continue
        for item in inst.alive_at(row, cell):
            survivors.append(f"stem {row} cell {cell}: {item}")
    return survivors


def tehpss_detection_report(pipe: Pipelines, inst: Instance, hi: int = TEHPSS_EMIT_MAX) -> List[str]:
    """E-infinity of the EHP chart must biject with the stable lines."""
    from tsseq.tables import detection_table

    db = pipe.db
    detect = detection_table(db)
    issues: List[str] = []
    seen: Dict[str, int] = {}
    for (row, cell), _pos in inst.positions.items():
        if row > hi:
            continue
        for item in inst.alive_at(row, cell):
            if item[0] == "tail":
                name = detect.get((frozenset([("1", item[1])]), cell))
                key = "1"
            else:
                if item[0] == "offsets":
                    lines = [frozenset([("1", off)]) for off in sorted(item[1])]
                else:
                    lines = [item[1]]
                name = None
                for vec in lines:
                    name = detect.get((vec, cell))
                    if name is None:
                        issues.append(f"stem {row}: undetected survivor {vec} at {cell}")
                key = name
            if name is None:
                issues.append(f"stem {row}: survivor at {cell} has no detection entry")
            else:
                seen[name] = seen.get(name, 0) + 1
    for stem in range(hi + 1):
        for gen in db.generators_at(stem):
            count = 1 if gen.order_exp is None else gen.order_exp
            for off in range(count):
                name = db.line_name((gen.name, off)) if gen.order_exp is not None else "1"
                if gen.order_exp is None:
                    break
                if seen.get(name, 0) != 1:
                    issues.append(f"stable line {name} detected {seen.get(name, 0)} times")
    return issues


def _lift_record(rec: Record, spec: SSeqSpec, db: StemsDB, cellset, row_max: int,
                 tehpss: bool) -> List[Record]:
    """Reinterpret the last cell entry as the sphere coordinate, one line at
    a time so that partially dead spans still contribute their live part."""
    src_cell = (rec.src_cell[:-1], rec.src_cell[-1])
    tgt_cell = (rec.tgt_cell[:-1], rec.tgt_cell[-1])
    if src_cell not in cellset or tgt_cell not in cellset:
        return []
    prov = "lift" if rec.provenance in ("inherited", "nishida", "jhom", "asserted") else rec.provenance
    out: List[Record] = []
    if rec.span is None:
        out.append(Record(
            src_cell=src_cell, tgt_cell=tgt_cell, src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
            src_off=rec.src_off, tgt_off=rec.tgt_off, span=None,
            provenance=prov, candidate=True, note=rec.note))
    else:
        for s in range(rec.span):
            out.append(Record(
                src_cell=src_cell, tgt_cell=tgt_cell, src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
                src_off=rec.src_off + s, tgt_off=rec.tgt_off + s, span=1,
                src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
                provenance=prov, candidate=True, note=rec.note))
    return [r for r in out if r.src_row(spec, db) <= row_max]
