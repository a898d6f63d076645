"""Chart emission in the golden table format, parsing, and diffing.

One table per instance.  Every populated grade prints its rows in
canonical order: by cell (filtration order within the display page),
then by generator listing order, then by offset.  A row is either

* a survivor            ``name(span)[cells]``
* a differential source ``name(span)[cells] -> name(span)[cells] TAG``
* a detecting class     ``name[cells] => stable-name``   (EHP chart)

Span markers are powers of two counting the F_2 lines in the group
(``(inf)`` for an integral tail) and are omitted for single lines.  At
the top grade of a layer chart only sources are printed, since
survivorship there cannot be certified inside the computation window.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from tsseq.engine import InfPos, Instance, Record, cell_text
from tsseq.stems import StemsDB


def _line_display(db: StemsDB, gen: str, off: int, span, cells_text: str) -> str:
    name = db.line_name((gen, off))
    if span == 1:
        marker = ""
    elif span is None:
        marker = "(inf)"
    else:
        marker = f"({1 << span})"
    return f"{name}{marker}{cells_text}"


def _vec_display(db: StemsDB, vec, cells_text: str) -> str:
    return f"{db.vector_name(vec)}{cells_text}"


def _arrow_rows(inst: Instance) -> List[Tuple[int, tuple, Tuple, str]]:
    """(grade, cell, sort-extras, text) for fired records at display length."""
    spec, db = inst.spec, inst.db
    tags = _tag_table(spec.kind)
    # merge per-line records back into spans for display
    merged: Dict[Tuple, List[Record]] = {}
    for fired in inst.fired:
        rec = fired.record
        if not spec.displayed(fired.length):
            continue
        key = (rec.src_cell, rec.tgt_cell, rec.src_gen, rec.tgt_gen,
               rec.src_vec, rec.tgt_vec, rec.provenance, rec.note)
        merged.setdefault(key, []).append(rec)
    rows = []
    for key, recs in merged.items():
        src_cell, tgt_cell, src_gen, tgt_gen, src_vec, tgt_vec, provenance, _ = key
        sct, tct = cell_text(spec.kind, src_cell), cell_text(spec.kind, tgt_cell)
        tag = tags.get(provenance, "")
        suffix = f" {tag}" if tag else ""
        if src_vec is not None or tgt_vec is not None:
            for rec in recs:
                left = (_vec_display(db, src_vec, sct) if src_vec is not None
                        else _line_display(db, src_gen, rec.src_off, 1, sct))
                right = (_vec_display(db, tgt_vec, tct) if tgt_vec is not None
                         else _line_display(db, tgt_gen, rec.tgt_off, 1, tct))
                grade = rec.src_row(spec, db)
                rows.append((grade, src_cell, _gen_key(db, src_gen, rec.src_off, src_vec), f"{left} -> {right}{suffix}"))
            continue
        if any(r.span is None for r in recs):
            for rec in recs:
                left = _line_display(db, src_gen, rec.src_off, None, sct)
                right = _line_display(db, tgt_gen, rec.tgt_off, None, tct)
                grade = rec.src_row(spec, db)
                rows.append((grade, src_cell, _gen_key(db, src_gen, rec.src_off, None), f"{left} -> {right}{suffix}"))
            continue
        # sort by offset and merge consecutive unit/short spans
        pieces = sorted(
            {(r.src_off, r.tgt_off, r.span) for r in recs})
        runs: List[List[int]] = []  # [src_start, tgt_start, size]
        for s_off, t_off, span in pieces:
            if runs and runs[-1][0] + runs[-1][2] == s_off and runs[-1][1] + runs[-1][2] == t_off:
                runs[-1][2] += span
            else:
                runs.append([s_off, t_off, span])
        for s_off, t_off, size in runs:
            left = _line_display(db, src_gen, s_off, size, sct)
            right = _line_display(db, tgt_gen, t_off, size, tct)
            grade = (inst.db.gens[src_gen].stem + inst.spec.cell_stem_offset(src_cell))
            rows.append((grade, src_cell, _gen_key(db, src_gen, s_off, None), f"{left} -> {right}{suffix}"))
    return rows


def _gen_key(db: StemsDB, gen: str, off: int, vec) -> Tuple:
    if vec is not None:
        parts = sorted((db.gens[g].index, o) for g, o in vec)
        return (parts[0][0], parts[0][1], 1)
    return (db.gens[gen].index, off, 0)


def _survivor_rows(inst: Instance, detect: Optional[Dict] = None) -> List[Tuple[int, tuple, Tuple, str]]:
    spec, db = inst.spec, inst.db
    rows = []
    for (row, cell), pos in inst.positions.items():
        ct = cell_text(spec.kind, cell)
        if isinstance(pos, InfPos):
            head, tail = pos.alive_offsets()
            offs = sorted(head)
            runs: List[List[int]] = []
            for off in offs:
                if runs and runs[-1][0] + runs[-1][1] == off:
                    runs[-1][1] += 1
                else:
                    runs.append([off, 1])
            for start, size in runs:
                text = _line_display(db, "1", start, size if size > 1 else 1, ct)
                rows.append((row, cell, (0, start, 2), _maybe_box(db, detect, ("1", start), cell, text)))
            if tail is not None:
                text = _line_display(db, "1", tail, None, ct)
                if detect is not None:
                    text += " => 1(inf)"
                rows.append((row, cell, (0, tail, 2), text))
            continue
        for mask in pos.alive_masks():
            vec = frozenset(pos.basis[i] for i in range(mask.bit_length()) if mask >> i & 1)
            if len(vec) == 1:
                (line,) = vec
                rows.append((row, cell, _gen_key(db, line[0], line[1], None),
                             _maybe_box(db, detect, line, cell, _line_display(db, line[0], line[1], 1, ct))))
            else:
                rows.append((row, cell, _gen_key(db, "", 0, vec),
                             _maybe_box(db, detect, vec, cell, _vec_display(db, vec, ct))))
    return _merge_survivor_runs(inst, rows)


def _merge_survivor_runs(inst: Instance, rows):
    """Collapse consecutive single-line survivors of one generator."""
    db, spec = inst.db, inst.spec
    out = []
    by_pos: Dict[Tuple, List] = {}
    for row, cell, key, text in rows:
        by_pos.setdefault((row, cell), []).append((key, text))
    for (row, cell), entries in by_pos.items():
        entries.sort()
        ct = cell_text(spec.kind, cell)
        i = 0
        while i < len(entries):
            key, text = entries[i]
            if "=>" in text or " -> " in text or len(key) != 3 or key[2] != 0:
                out.append((row, cell, key, text))
                i += 1
                continue
            # try to extend a run of consecutive offsets of the same generator
            j = i + 1
            while j < len(entries):
                nkey, ntext = entries[j]
                if (len(nkey) == 3 and nkey[2] == 0 and nkey[0] == key[0]
                        and nkey[1] == key[1] + (j - i) and "=>" not in ntext):
                    j += 1
                else:
                    break
            size = j - i
            if size > 1:
                gen = _gen_by_index(db, row - spec.cell_stem_offset(cell), key[0])
                out.append((row, cell, key, _line_display(db, gen, key[1], size, ct)))
            else:
                out.append((row, cell, key, text))
            i = j
    return out


def _gen_by_index(db: StemsDB, stem: int, index: int) -> str:
    return db.stems[stem][index].name


def _maybe_box(db: StemsDB, detect, line_or_vec, cell, text: str) -> str:
    if detect is None:
        return text
    key = line_or_vec if isinstance(line_or_vec, frozenset) else frozenset([line_or_vec])
    found = detect.get((key, cell))
    return f"{text} => {found}" if found else f"{text} => ??"


def detection_table(db: StemsDB) -> Dict:
    """Reverse generalized-Hopf-invariant map: (detecting line, cell) -> name."""
    out: Dict = {}
    for entry in db.hopf.get("ghi", {}).values():
        J, m = entry.cell[:-1], entry.cell[-1]
        out[(frozenset([entry.target]), (J, m))] = db.line_name(entry.source)
    return out


def emit_table(inst: Instance, table_id: str, emit_max: Optional[int] = None,
               boxed: bool = False) -> str:
    spec = inst.spec
    detect = detection_table(inst.db) if boxed else None
    rows = _arrow_rows(inst)
    survivors = _survivor_rows(inst, detect)
    top = spec.row_max if spec.kind == "tahss" else None
    limit = emit_max if emit_max is not None else spec.row_max
    by_grade: Dict[int, List] = {}
    for row, cell, key, text in rows + survivors:
        if row > limit:
            continue
        if top is not None and row == top and " -> " not in text:
            continue  # survivorship at the window edge is not certified
        by_grade.setdefault(row, []).append((spec.cell_sort_key(cell), key, text))
    lines = [f"table {table_id}"]
    for grade in sorted(by_grade):
        marker = " outgoing" if top is not None and grade == top else ""
        lines.append(f"grade {grade}{marker}")
        for _, _, text in sorted(by_grade[grade], key=lambda e: (e[0], e[1])):
            lines.append(text)
    return "\n".join(lines) + "\n"


def parse_golden(text: str) -> Dict[str, Dict[int, List[str]]]:
    tables: Dict[str, Dict[int, List[str]]] = {}
    current: Optional[Dict[int, List[str]]] = None
    grade: Optional[int] = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("table "):
            current = tables.setdefault(line.split()[1], {})
            grade = None
        elif line.startswith("grade "):
            if current is None:
                raise ValueError("grade before table header")
            grade = int(line.split()[1])
            current.setdefault(grade, [])
        else:
            if current is None or grade is None:
                raise ValueError(f"row outside any grade: {raw!r}")
            current[grade].append(line.strip())
    return tables


def diff_golden(emitted: str, golden: str) -> List[str]:
    """Row-for-row comparison; returns human-readable discrepancies."""
    got, want = parse_golden(emitted), parse_golden(golden)
    issues: List[str] = []
    for table in sorted(set(got) | set(want)):
        if table not in got:
            issues.append(f"{table}: missing from emission")
            continue
        if table not in want:
            issues.append(f"{table}: missing from golden")
            continue
        g, w = got[table], want[table]
        for grade in sorted(set(g) | set(w)):
            grows, wrows = g.get(grade, []), w.get(grade, [])
            if grows == wrows:
                continue
            for i, row in enumerate(wrows):
                if i >= len(grows):
                    issues.append(f"{table} grade {grade} row {i}: missing {row!r}")
                elif grows[i] != row:
                    issues.append(f"{table} grade {grade} row {i}: got {grows[i]!r}, want {row!r}")
            for i in range(len(wrows), len(grows)):
                issues.append(f"{table} grade {grade} row {i}: extra {grows[i]!r}")
    return issues


def _tag_table(kind: str) -> Dict[str, str]:
    if kind == "tehpss":
        return {"gbe": "*", "rogue": "**", "bizarre": "***", "bizarre_lift": "***"}
    if kind == "tgss":
        return {"gbe": "*", "bizarre": "**", "bizarre_lift": "**"}
    return {}
