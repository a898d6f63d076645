"""Ledger-driven transfinite spectral sequence engine.

An instance is specified by a cell set (each cell carrying an ordinal
filtration index), a population rule reading stable stems off the
bundled database, and a ledger of differential records.  Records are
executed on the 2-adic associated graded: a generator of order ``2^m``
contributes ``m`` F_2 lines, an infinite-order generator a symbolic
tail.  Pages are indexed by ordinal record length; records of equal
length execute simultaneously with honest F_2 rank bookkeeping, which
is what lets several sources share a target and leaves linear
combinations alive.

Three instance kinds are supported:

* ``tahss`` for a single layer ``L(k)_n`` (cells: CU sequences of
  length k, excess >= n; row = total degree),
* ``tgss`` for a sphere ``S^n`` (cells: all CU sequences of excess
  >= n including the empty one; row = chart stem),
* ``tehpss`` (cells ``(J, m)`` with excess(J) >= 2m+1; row = stem).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from tsseq.cu import (
    OrdinalIndex,
    cu_is_valid,
    excess_at_least,
    mu_tahss,
    mu_tehpss,
    mu_tgss,
)
from tsseq.stems import Line, StemsDB, Vector


class LedgerError(ValueError):
    pass


class StaleDifferential(LedgerError):
    pass


class TailMismatch(LedgerError):
    pass


class SourceTargetClash(LedgerError):
    pass


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SSeqSpec:
    kind: str  # tahss | tgss | tehpss
    label: str
    row_max: int
    # tahss: (k, n); tgss: (n,); tehpss: ()
    params: Tuple[int, ...] = ()

    def cell_mu(self, cell) -> OrdinalIndex:
        if self.kind == "tahss":
            return mu_tahss(cell)
        if self.kind == "tgss":
            return mu_tgss(cell)
        J, m = cell
        return mu_tehpss(J, m)

    def cell_valid(self, cell) -> bool:
        if self.kind == "tahss":
            k, n = self.params
            return len(cell) == k and cu_is_valid(cell) and excess_at_least(cell, n)
        if self.kind == "tgss":
            (n,) = self.params
            return cu_is_valid(cell) and excess_at_least(cell, n)
        J, m = cell
        return m >= 0 and cu_is_valid(J) and excess_at_least(J, 2 * m + 1)

    def cell_stem_offset(self, cell) -> int:
        """row minus stem of the populating group, constant per cell."""
        if self.kind == "tahss":
            return sum(cell)
        if self.kind == "tgss":
            return sum(cell) - len(cell)
        J, m = cell
        return sum(J) + m - len(J)

    def cell_sort_key(self, cell):
        if self.kind == "tahss":
            return tuple(reversed(cell))
        if self.kind == "tgss":
            return (len(cell), tuple(reversed(cell)))
        J, m = cell
        return (m, len(J), tuple(reversed(J)))

    def display_exponent(self):
        """Exponent key a record's length must reach to be charted."""
        if self.kind == "tahss":
            k, _ = self.params
            return (0, k - 1)
        if self.kind == "tgss":
            return (1, 0)  # the omega^omega slot
        return (1, 1)      # the omega^(omega+1) slot

    def displayed(self, length: OrdinalIndex) -> bool:
        lead = length.leading_exponent()
        return lead is not None and lead >= self.display_exponent()


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Record:
    """One differential: equal-shape spans (or F_2 vectors) at both ends.

    Spans are (generator, start offset, size); size None means the
    infinite tail of an infinite-order generator, on both sides.
    Vector records carry an explicit F_2 sum of lines and have span 1.
    """

    src_cell: tuple
    tgt_cell: tuple
    src_gen: str
    tgt_gen: str
    src_off: int = 0
    tgt_off: int = 0
    span: Optional[int] = 1
    src_vec: Optional[Vector] = None
    tgt_vec: Optional[Vector] = None
    provenance: str = "asserted"
    candidate: bool = False
    tag: str = ""
    note: str = ""

    def length(self, spec: SSeqSpec) -> OrdinalIndex:
        return spec.cell_mu(self.src_cell) - spec.cell_mu(self.tgt_cell)

    def src_row(self, spec: SSeqSpec, db: StemsDB) -> int:
        return self._stem(db, self.src_gen, self.src_vec) + spec.cell_stem_offset(self.src_cell)

    def tgt_row(self, spec: SSeqSpec, db: StemsDB) -> int:
        return self._stem(db, self.tgt_gen, self.tgt_vec) + spec.cell_stem_offset(self.tgt_cell)

    @staticmethod
    def _stem(db: StemsDB, gen: str, vec: Optional[Vector]) -> int:
        if vec is not None:
            return db.vector_stem(vec)
        return db.gens[gen].stem


@dataclass
class Diagnostic:
    clause: str
    detail: str

    def __str__(self):
        return f"{self.clause}: {self.detail}"


def validate(rec: Record, spec: SSeqSpec, db: StemsDB) -> List[Diagnostic]:
    """Structural checks; returns an empty list when the record is sound."""
    out: List[Diagnostic] = []
    for side, cell in (("source", rec.src_cell), ("target", rec.tgt_cell)):
        if not spec.cell_valid(cell):
            out.append(Diagnostic("BadCell", f"{side} cell {cell} not in {spec.label}"))
    if out:
        return out
    if not spec.cell_mu(rec.tgt_cell) < spec.cell_mu(rec.src_cell):
        out.append(Diagnostic("IndexIncrease", f"{rec.tgt_cell} !< {rec.src_cell}"))
    for side, gen, vec in (("source", rec.src_gen, rec.src_vec), ("target", rec.tgt_gen, rec.tgt_vec)):
        names = [line[0] for line in vec] if vec is not None else [gen]
        for name in names:
            if name not in db.gens:
                out.append(Diagnostic("UnknownGenerator", f"{side} generator {name}"))
        if vec is not None and rec.span != 1:
            out.append(Diagnostic("TailMismatch", f"{side} vector record must have span 1"))
    if out:
        return out
    if rec.src_row(spec, db) - 1 != rec.tgt_row(spec, db):
        out.append(Diagnostic(
            "GradeRule",
            f"grade must drop by one: {rec.src_row(spec, db)} -> {rec.tgt_row(spec, db)}"))
    for side, gen, off, vec in (
        ("source", rec.src_gen, rec.src_off, rec.src_vec),
        ("target", rec.tgt_gen, rec.tgt_off, rec.tgt_vec),
    ):
        if vec is not None:
            for g, o in vec:
                order = db.gens[g].order_exp
                if order is not None and o >= order:
                    out.append(Diagnostic("OffsetBounds", f"{side} line {g}@{o}"))
            continue
        order = db.gens[gen].order_exp
        if rec.span is None:
            if order is not None:
                out.append(Diagnostic("TailMismatch", f"{side} {gen} has finite order"))
        else:
            if off < 0 or (order is not None and off + rec.span - 1 >= order):
                out.append(Diagnostic("OffsetBounds", f"{side} span {gen}@{off}+{rec.span}"))
    return out


# ---------------------------------------------------------------------------
# F_2 helpers: subspaces as echelonized bitmask rows keyed by pivot
# ---------------------------------------------------------------------------

def _reduce(mask: int, rows: Dict[int, int]) -> int:
    while mask:
        piv = mask.bit_length() - 1
        if piv not in rows:
            return mask
        mask ^= rows[piv]
    return 0


def _insert(mask: int, rows: Dict[int, int]) -> bool:
    mask = _reduce(mask, rows)
    if not mask:
        return False
    rows[mask.bit_length() - 1] = mask
    return True


# ---------------------------------------------------------------------------
# position state
# ---------------------------------------------------------------------------

class FinitePos:
    """F_2 lines of the finite-order generators at one (row, cell)."""

    __slots__ = ("basis", "index", "zrows", "brows")

    def __init__(self, lines: Sequence[Line]):
        self.basis: List[Line] = list(lines)
        self.index: Dict[Line, int] = {line: i for i, line in enumerate(self.basis)}
        self.zrows: Dict[int, int] = {}
        for i in range(len(self.basis)):
            _insert(1 << i, self.zrows)
        self.brows: Dict[int, int] = {}

    def mask_of(self, vec: Vector) -> Optional[int]:
        mask = 0
        for line in vec:
            if line not in self.index:
                return None
            mask |= 1 << self.index[line]
        return mask

    def class_alive(self, mask: int) -> bool:
        if _reduce(mask, self.zrows):
            return False  # fell out of the cycles: died as a source earlier
        return bool(_reduce(mask, self.brows))

    def alive_masks(self) -> List[int]:
        out = []
        rows: Dict[int, int] = dict(self.brows)
        for piv in sorted(self.zrows):
            mask = _reduce(self.zrows[piv], rows)
            if mask:
                rows[mask.bit_length() - 1] = mask
                out.append(mask)
        return out


class InfPos:
    """The integral tower at one (row, cell): finite head plus optional tail."""

    __slots__ = ("head", "tail_from")

    def __init__(self):
        self.head: Set[int] = set()
        self.tail_from: Optional[int] = 0

    def offset_alive(self, off: int) -> bool:
        if off in self.head:
            return True
        return self.tail_from is not None and off >= self.tail_from

    def tail_alive_from(self, off: int) -> bool:
        if self.tail_from is None:
            return False
        if off >= self.tail_from:
            return True
        return all(self.offset_alive(x) for x in range(off, self.tail_from))

    def kill_offset(self, off: int) -> None:
        if off in self.head:
            self.head.discard(off)
            return
        if self.tail_from is None or off < self.tail_from:
            raise StaleDifferential(f"tail offset {off} already dead")
        self.head.update(range(self.tail_from, off))
        self.tail_from = off + 1

    def kill_tail(self, off: int) -> None:
        if not self.tail_alive_from(off):
            raise StaleDifferential(f"tail from {off} not fully alive")
        if self.tail_from is not None and off > self.tail_from:
            self.head.update(range(self.tail_from, off))
        self.tail_from = None
        self.head = {x for x in self.head if x < off}

    def alive_offsets(self) -> Tuple[Set[int], Optional[int]]:
        return set(self.head), self.tail_from


# ---------------------------------------------------------------------------
# computed instance
# ---------------------------------------------------------------------------

@dataclass
class FiredRecord:
    record: Record
    length: OrdinalIndex


@dataclass
class Instance:
    spec: SSeqSpec
    db: StemsDB
    cells: List[tuple]
    positions: Dict[Tuple[int, tuple], object] = field(default_factory=dict)
    records: List[Record] = field(default_factory=list)
    fired: List[FiredRecord] = field(default_factory=list)
    skipped: List[Tuple[Record, str]] = field(default_factory=list)
    kill_ledger: List[Tuple[OrdinalIndex, int, int]] = field(default_factory=list)

    # -- population ---------------------------------------------------------

    def populate(self) -> None:
        spec, db = self.spec, self.db
        for cell in self.cells:
            off = spec.cell_stem_offset(cell)
            for row in range(off, spec.row_max + 1):
                stem = row - off
                gens = db.generators_at(stem)
                if not gens:
                    continue
                key = (row, cell)
                if stem == 0:
                    self.positions[key] = InfPos()
                else:
                    lines: List[Line] = []
                    for gen in gens:
                        assert gen.order_exp is not None
                        lines.extend((gen.name, i) for i in range(gen.order_exp))
                    self.positions[key] = FinitePos(lines)

    def position(self, row: int, cell):
        return self.positions.get((row, cell))

    # -- running ------------------------------------------------------------

    def run(self, records: Sequence[Record]) -> None:
        self.records = list(records)
        staged: Dict[OrdinalIndex, List[Record]] = {}
        for rec in self.records:
            problems = validate(rec, self.spec, self.db)
            if problems:
                raise LedgerError(
                    f"{self.spec.label}: invalid record {describe(rec, self.db)}: "
                    + "; ".join(map(str, problems)))
            staged.setdefault(rec.length(self.spec), []).append(rec)
        for length in sorted(staged):
            self._run_page(length, staged[length])

    def _run_page(self, length: OrdinalIndex, records: List[Record]) -> None:
        live: List[Record] = []
        for rec in records:
            reason = self._stale_reason(rec)
            if reason is None:
                live.append(rec)
            elif rec.candidate:
                self.skipped.append((rec, reason))
            else:
                raise StaleDifferential(
                    f"{self.spec.label}: {describe(rec, self.db)}: {reason}")
        if not live:
            return
        src_pos = {(r.src_row(self.spec, self.db), r.src_cell) for r in live}
        tgt_pos = {(r.tgt_row(self.spec, self.db), r.tgt_cell) for r in live}
        clash = src_pos & tgt_pos
        if clash:
            raise SourceTargetClash(
                f"{self.spec.label}: positions {sorted(map(str, clash))} are source "
                f"and target at the same page")
        groups: Dict[Tuple[tuple, tuple], List[Record]] = {}
        for rec in live:
            key = ((rec.src_row(self.spec, self.db), rec.src_cell),
                   (rec.tgt_row(self.spec, self.db), rec.tgt_cell))
            groups.setdefault(key, []).append(rec)
        for (src_key, tgt_key), group in groups.items():
            src_killed, tgt_killed = self._execute_group(src_key, tgt_key, group)
            for rec in group:
                self.fired.append(FiredRecord(rec, length))
            self.kill_ledger.append((length, src_killed, tgt_killed))

    def _stale_reason(self, rec: Record) -> Optional[str]:
        spec, db = self.spec, self.db
        src = self.position(rec.src_row(spec, db), rec.src_cell)
        tgt = self.position(rec.tgt_row(spec, db), rec.tgt_cell)
        if src is None or tgt is None:
            return "unpopulated position"
        for side, pos, gen, off, vec in (
            ("source", src, rec.src_gen, rec.src_off, rec.src_vec),
            ("target", tgt, rec.tgt_gen, rec.tgt_off, rec.tgt_vec),
        ):
            if isinstance(pos, InfPos):
                if rec.span is None:
                    if not pos.tail_alive_from(off):
                        return f"{side} tail dead"
                else:
                    for x in range(off, off + rec.span):
                        if not pos.offset_alive(x):
                            return f"{side} line {x} dead"
            else:
                if rec.span is None:
                    return f"{side} has finite order against an infinite tail"
                vecs = [vec] if vec is not None else [
                    frozenset([(gen, off + s)]) for s in range(rec.span)]
                for v in vecs:
                    mask = pos.mask_of(v)
                    if mask is None:
                        return f"{side} line missing from position"
                    if not pos.class_alive(mask):
                        return f"{side} class dead"
        return None

    def _execute_group(self, src_key, tgt_key, group: List[Record]) -> Tuple[int, int]:
        src = self.positions[src_key]
        tgt = self.positions[tgt_key]
        pieces: List[Tuple[object, object]] = []
        for rec in group:
            if rec.span is None:
                pieces.append((("tail", rec.src_off), ("tail", rec.tgt_off)))
                continue
            for s in range(rec.span):
                sv = rec.src_vec if rec.src_vec is not None else frozenset([(rec.src_gen, rec.src_off + s)])
                tv = rec.tgt_vec if rec.tgt_vec is not None else frozenset([(rec.tgt_gen, rec.tgt_off + s)])
                pieces.append((sv, tv))
        src_killed = tgt_killed = 0
        finite_pieces = []
        for sv, tv in pieces:
            if isinstance(sv, tuple) and sv and sv[0] == "tail":
                if not isinstance(src, InfPos) or not isinstance(tgt, InfPos):
                    raise TailMismatch("infinite tail against finite-order position")
                src.kill_tail(sv[1])
                tgt.kill_tail(tv[1])
                src_killed += 1  # the tails cancel symbolically, one for one
                tgt_killed += 1
            else:
                finite_pieces.append((sv, tv))
        if not finite_pieces:
            return src_killed, tgt_killed

        # source side
        if isinstance(src, InfPos):
            for sv, _ in finite_pieces:
                (line,) = sv
                src.kill_offset(line[1])
                src_killed += 1
        else:
            # companions: real target masks when the target is finite, else
            # distinct symbolic bits (offsets on the integral tower never mix)
            if isinstance(tgt, InfPos):
                companions = [1 << i for i in range(len(finite_pieces))]
                b_tgt_before: Dict[int, int] = {}
            else:
                companions = []
                for _, tv in finite_pieces:
                    tmask = tgt.mask_of(tv)
                    if tmask is None:
                        raise LedgerError("target line missing from position")
                    companions.append(tmask)
                b_tgt_before = dict(tgt.brows)
            src_rows: Dict[int, Tuple[int, int]] = {}

            def feed(smask: int, tmask: int) -> None:
                s_red, t_red = smask, tmask
                while s_red:
                    piv = s_red.bit_length() - 1
                    if piv not in src_rows:
                        src_rows[piv] = (s_red, t_red)
                        return
                    row_s, row_t = src_rows[piv]
                    s_red ^= row_s
                    t_red ^= row_t
                if _reduce(t_red, b_tgt_before):
                    raise LedgerError("inconsistent simultaneous differentials")

            for (sv, _), comp in zip(finite_pieces, companions):
                smask = src.mask_of(sv)
                if smask is None:
                    raise LedgerError("source line missing from position")
                feed(smask, comp)
            for bmask in src.brows.values():
                feed(bmask, 0)  # boundaries must map to boundaries

            def dval(mask: int) -> int:
                s_red, t_red = mask, 0
                while s_red:
                    piv = s_red.bit_length() - 1
                    if piv not in src_rows:
                        break  # leftover part lies outside the records: maps to zero
                    row_s, row_t = src_rows[piv]
                    s_red ^= row_s
                    t_red ^= row_t
                return _reduce(t_red, b_tgt_before)

            # new cycles at the source: kernel of the induced map on Z/B
            z_basis = [src.zrows[p] for p in sorted(src.zrows, reverse=True)]
            kernel: Dict[int, int] = {}
            elim: Dict[int, Tuple[int, int]] = {}
            for z in z_basis:
                v_red, c_red = dval(z), z
                while v_red:
                    piv = v_red.bit_length() - 1
                    if piv not in elim:
                        break
                    row_v, row_c = elim[piv]
                    v_red ^= row_v
                    c_red ^= row_c
                if v_red:
                    elim[v_red.bit_length() - 1] = (v_red, c_red)
                else:
                    _insert(c_red, kernel)
            src_killed += len(src.zrows) - len(kernel)
            src.zrows = kernel

        # target side
        if isinstance(tgt, InfPos):
            for _, tv in finite_pieces:
                (line,) = tv
                tgt.kill_offset(line[1])
                tgt_killed += 1
        else:
            before = len(tgt.brows)
            for _, tv in finite_pieces:
                tmask = tgt.mask_of(tv)
                if tmask is None:
                    raise LedgerError("target line missing from position")
                _insert(tmask, tgt.brows)
            tgt_killed += len(tgt.brows) - before
        return src_killed, tgt_killed

    # -- introspection --------------------------------------------------------

    def alive_at(self, row: int, cell) -> List[object]:
        """Surviving classes: ("vec", lines) entries, or tail/offset data."""
        pos = self.position(row, cell)
        if pos is None:
            return []
        if isinstance(pos, InfPos):
            head, tail = pos.alive_offsets()
            out: List[object] = []
            if head:
                out.append(("offsets", frozenset(head)))
            if tail is not None:
                out.append(("tail", tail))
            return out
        out = []
        for mask in pos.alive_masks():
            vec = frozenset(pos.basis[i] for i in range(mask.bit_length()) if mask >> i & 1)
            out.append(("vec", vec))
        return out

    def survivor_count(self, row: int) -> int:
        total = 0
        for (r, cell), pos in self.positions.items():
            if r != row:
                continue
            if isinstance(pos, InfPos):
                head, tail = pos.alive_offsets()
                total += len(head) + (1 if tail is not None else 0)
            else:
                total += len(pos.alive_masks())
        return total

    def exactness_balance(self) -> List[Tuple[OrdinalIndex, int, int]]:
        return list(self.kill_ledger)


# ---------------------------------------------------------------------------
# maps of instances
# ---------------------------------------------------------------------------

def truncate(inst: Instance, n: int) -> Instance:
    """Raise the lower excess bound of a computed layer instance.

    Cells of smaller excess are dropped, records with a dropped endpoint
    are dropped (freeing their sources), and pages are recomputed.
    """
    if inst.spec.kind != "tahss":
        raise ValueError("truncate applies to layer instances")
    k, n0 = inst.spec.params
    if n < n0:
        raise ValueError("truncation can only raise the excess bound")
    spec = SSeqSpec("tahss", f"L({k})_{n}", inst.spec.row_max, (k, n))
    cells = [c for c in inst.cells if excess_at_least(c, n)]
    out = Instance(spec, inst.db, cells)
    out.populate()
    keep = [
        rec for rec in inst.records
        if excess_at_least(rec.src_cell, n) and excess_at_least(rec.tgt_cell, n)
    ]
    out.run(keep)
    return out


def pushforward_P(inst: Instance, n: int) -> List[Record]:
    """Lower-map image of a computed instance's ledger: [J] -> [J, n].

    Faithful for layer instances: the pushed record set is in bijection
    with the source's and preserves every page of death.
    """
    out = []
    for rec in inst.records:
        out.append(Record(
            src_cell=tuple(rec.src_cell) + (n,), tgt_cell=tuple(rec.tgt_cell) + (n,),
            src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
            src_off=rec.src_off, tgt_off=rec.tgt_off,
            span=rec.span, src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
            provenance="prop_P", candidate=rec.candidate, note=rec.note))
    return out


def pushforward_E(inst: Instance, n: int) -> Tuple[List[Record], List[str]]:
    """Suspension image of a ledger: keep records whose cells survive the
    excess-n kernel rule; report sources freed by a dropped target."""
    kept: List[Record] = []
    freed: List[str] = []
    for rec in inst.records:
        if not excess_at_least(rec.src_cell, n + 1):
            continue
        if not excess_at_least(rec.tgt_cell, n + 1):
            freed.append(
                f"source {describe(rec, inst.db, inst.spec.kind)} now potentially free")
            continue
        kept.append(Record(
            src_cell=rec.src_cell, tgt_cell=rec.tgt_cell,
            src_gen=rec.src_gen, tgt_gen=rec.tgt_gen,
            src_off=rec.src_off, tgt_off=rec.tgt_off,
            span=rec.span, src_vec=rec.src_vec, tgt_vec=rec.tgt_vec,
            provenance="prop_E", candidate=rec.candidate, note=rec.note))
    return kept, freed


# ---------------------------------------------------------------------------
# geometric boundary machinery
# ---------------------------------------------------------------------------

class ConditionStarViolation(LedgerError):
    pass


def _same_line(rec_gen, rec_off, rec_vec, other_gen, other_off, other_vec) -> bool:
    a = rec_vec if rec_vec is not None else frozenset([(rec_gen, rec_off)])
    b = other_vec if other_vec is not None else frozenset([(other_gen, other_off)])
    return a == b


def gbe_derive(d1: Record, d2: Record, d3: Record,
               s_n_records: Sequence[Record], s_2n1_records: Sequence[Record],
               n: int, db: StemsDB) -> Record:
    """Derive the exotic next-sphere differential from three chart records.

    d1: on the n-sphere, alpha[J] -> beta[J', n]
    d2: on the (2n+1)-sphere, a differential supported on the cell [J']
        (any coefficient name is accepted; see the report note)
    d3: on the n-sphere, delta[T] -> gamma[T', n] with gamma[T'] the
        target of d2

    Checks the no-interference condition: every recorded differential
    tau[I] -> tau'[I'] between the relevant cells with |I| < |I'| must
    push forward nontrivially.  Returns d^{S^(n+1)}(alpha[J]) = delta[T].
    """
    from tsseq.cu import cu_compare

    def present(rec: Record, ledger: Sequence[Record]) -> bool:
        return any(
            r.src_cell == rec.src_cell and r.tgt_cell == rec.tgt_cell
            and _same_line(r.src_gen, r.src_off, r.src_vec, rec.src_gen, rec.src_off, rec.src_vec)
            and _same_line(r.tgt_gen, r.tgt_off, r.tgt_vec, rec.tgt_gen, rec.tgt_off, rec.tgt_vec)
            for r in ledger)

    if not present(d1, s_n_records):
        raise LedgerError("first input differential not in the n-sphere ledger")
    if not present(d2, s_2n1_records):
        raise LedgerError("second input differential not in the double-sphere ledger")
    if not present(d3, s_n_records):
        raise LedgerError("third input differential not in the n-sphere ledger")
    if d1.tgt_cell[-1:] != (n,):
        raise LedgerError("first differential must land on a cell ending in n")
    J_prime = d1.tgt_cell[:-1]
    if tuple(d2.src_cell) != tuple(J_prime):
        raise LedgerError("second differential must be supported on the cell [J']")
    T_prime = d2.tgt_cell
    if d3.tgt_cell != tuple(T_prime) + (n,):
        raise LedgerError("third differential must land on [T', n]")
    if not _same_line(d3.tgt_gen, d3.tgt_off, d3.tgt_vec, d2.tgt_gen, d2.tgt_off, d2.tgt_vec):
        raise LedgerError("second and third differentials disagree on the [T'] class")
    # the no-interference condition
    for rec in s_2n1_records:
        I, I_prime = rec.src_cell, rec.tgt_cell
        if len(I) >= len(I_prime):
            continue
        if not (cu_compare(T_prime, I_prime) < 0 and cu_compare(I_prime, I) < 0
                and cu_compare(I, J_prime) < 0):
            continue
        pushed_src = tuple(I) + (n,)
        pushed_tgt = tuple(I_prime) + (n,)
        pushed_ok = any(
            r.src_cell == pushed_src and r.tgt_cell == pushed_tgt
            and _same_line(r.src_gen, r.src_off, r.src_vec, rec.src_gen, rec.src_off, rec.src_vec)
            for r in s_n_records)
        if not pushed_ok:
            raise ConditionStarViolation(
                f"offending differential {describe(rec, db, 'tgss')} has trivial image")
    note = ""
    if not _same_line(d2.src_gen, d2.src_off, d2.src_vec, d1.tgt_gen, d1.tgt_off, d1.tgt_vec):
        note = ("cell [J'] differential taken with coefficient "
                + (db.vector_name(d2.src_vec) if d2.src_vec is not None
                   else db.line_name((d2.src_gen, d2.src_off)))
                + " rather than the first differential's coefficient")
    return Record(
        src_cell=d1.src_cell, tgt_cell=d3.src_cell,
        src_gen=d1.src_gen, tgt_gen=d3.src_gen,
        src_off=d1.src_off, tgt_off=d3.src_off,
        src_vec=d1.src_vec, tgt_vec=d3.src_vec,
        provenance="gbe", note=note)


def gbt_classify(x_inst: Instance, y_inst: Instance, z_inst: Instance,
                 n: int, rec: Record) -> Tuple[int, dict]:
    """Five-way classification of a differential of the middle instance of
    a fiber-sequence triple, on chart-level evidence only.

    The triple is the EHP one: the lower map embeds the double-sphere
    chart by appending n, the suspension projects onto the next sphere's
    chart, and the remaining map vanishes on chart classes.  Cases whose
    witnesses live at homotopy level are reported with partial evidence.
    Never mutates any ledger.
    """
    db = y_inst.db

    def fired_with(inst: Instance, src_cell=None, tgt_cell=None, src=None, tgt=None):
        for fr in inst.fired:
            r = fr.record
            if src_cell is not None and r.src_cell != src_cell:
                continue
            if tgt_cell is not None and r.tgt_cell != tgt_cell:
                continue
            if src is not None and not _same_line(
                    r.src_gen, r.src_off, r.src_vec, src[0], src[1], src[2]):
                continue
            if tgt is not None and not _same_line(
                    r.tgt_gen, r.tgt_off, r.tgt_vec, tgt[0], tgt[1], tgt[2]):
                continue
            return r
        return None

    src_line = (rec.src_gen, rec.src_off, rec.src_vec)
    tgt_line = (rec.tgt_gen, rec.tgt_off, rec.tgt_vec)
    p_src_ok = excess_at_least(rec.src_cell, n + 1)
    p_tgt_ok = excess_at_least(rec.tgt_cell, n + 1)
    # case 1: the projected differential is alive and recorded
    if p_src_ok and p_tgt_ok:
        hit = fired_with(z_inst, src_cell=rec.src_cell, tgt_cell=rec.tgt_cell,
                         src=src_line, tgt=tgt_line)
        if hit is not None:
            return 1, {"z_record": hit}
    # the target is in the image of the lower map iff its cell ends in n
    if rec.tgt_cell[-1:] == (n,):
        x_cell = rec.tgt_cell[:-1]
        x_rec = fired_with(x_inst, src_cell=x_cell, src=tgt_line)
        if x_rec is not None:
            xpp_cell = tuple(x_rec.tgt_cell) + (n,)
            xpp_line = (x_rec.tgt_gen, x_rec.tgt_off, x_rec.tgt_vec)
            y_rec = fired_with(y_inst, tgt_cell=xpp_cell, tgt=xpp_line)
            if y_rec is not None and excess_at_least(y_rec.src_cell, n + 1):
                return 3, {
                    "x": (x_cell, tgt_line),
                    "x_record": x_rec,
                    "y_double_prime": y_rec,
                    "witness": "partial",
                }
            return 2, {"x_record": x_rec, "witness": "partial"}
        # x survives: the projected source detects a class hit from below
        if p_src_ok:
            return 5, {"x": (x_cell, tgt_line), "witness": "partial"}
        return 4, {"x": (x_cell, tgt_line), "witness": "partial"}
    raise LedgerError("Unclassifiable: no chart-level witness fits the record")


def hopf_query(upper_inst: Instance, double_inst: Instance, rec: Record,
               n: int) -> dict:
    """Report what the recorded differential says about a Hopf invariant.

    ``rec`` is d^{S^n}(alpha[J]) = beta[J', n] with alpha[J] a permanent
    cycle of the next sphere's chart.  Either beta[J'] survives the
    double sphere's chart and detects the invariant, or it died there
    and the invariant is detected below the cell [J'].
    """
    db = upper_inst.db
    if rec.tgt_cell[-1:] != (n,):
        return {"status": "empty", "reason": "record does not land on a cell ending in n"}
    src_pos = (rec.src_row(upper_inst.spec, db), rec.src_cell)
    alive = upper_inst.alive_at(*src_pos)
    vec = rec.src_vec if rec.src_vec is not None else frozenset([(rec.src_gen, rec.src_off)])
    if ("vec", vec) not in alive:
        return {"status": "empty", "reason": "source is not a permanent cycle upstairs"}
    J_prime = rec.tgt_cell[:-1]
    tgt_vec = rec.tgt_vec if rec.tgt_vec is not None else frozenset([(rec.tgt_gen, rec.tgt_off)])
    row = (db.vector_stem(tgt_vec) + double_inst.spec.cell_stem_offset(J_prime))
    if ("vec", tgt_vec) in double_inst.alive_at(row, J_prime):
        return {"status": "detects",
                "detector": f"{db.vector_name(tgt_vec)}{cell_text('tgss', J_prime)}"}
    for fr in double_inst.fired:
        r = fr.record
        if r.tgt_cell == tuple(J_prime) and _same_line(
                r.tgt_gen, r.tgt_off, r.tgt_vec, rec.tgt_gen, rec.tgt_off, rec.tgt_vec):
            return {"status": "killed_below",
                    "killing_record": describe(r, db, "tgss"),
                    "detector_bound": f"below {db.vector_name(tgt_vec)}{cell_text('tgss', J_prime)}"}
    return {"status": "killed_below", "killing_record": None,
            "detector_bound": f"below {db.vector_name(tgt_vec)}{cell_text('tgss', J_prime)}"}


def cell_text(kind: str, cell) -> str:
    if kind == "tehpss":
        J, m = cell
        return "[" + ",".join(map(str, J + (m,))) + "]"
    return "[" + ",".join(map(str, cell)) + "]"


def describe(rec: Record, db: StemsDB, kind: str = "tahss") -> str:
    def side(gen, off, vec, cell):
        name = db.vector_name(vec) if vec is not None else db.line_name((gen, off))
        if rec.span == 1:
            span = ""
        elif rec.span is None:
            span = "(inf)"
        else:
            span = f"({1 << rec.span})"
        return f"{name}{span}{cell_text(kind, cell)}"

    left = side(rec.src_gen, rec.src_off, rec.src_vec, rec.src_cell)
    right = side(rec.tgt_gen, rec.tgt_off, rec.tgt_vec, rec.tgt_cell)
    return f"{left} -> {right} #{rec.provenance}"
