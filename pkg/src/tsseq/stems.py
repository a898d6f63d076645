"""Stable-stems database: generators, products, aliases, Hopf invariants.

The database is loaded from a line-oriented text file.  It is data, not
computation: the package never derives stable-stem structure, it only
looks facts up and audits them.  Grammar (one record per line, ``#``
comments, blank lines ignored)::

    stem <t> <gen> <order>          order: inf or a power of two
    offsetname <gen> <i> <name>     the line 2^i * gen has its own name
    alias <name> = <line> + <line> ...
    prod <gen> * <gen> = <line-or-0-or-?>
    hopf <shi|hi|ghi> <line> = <line> [j1,...,jk]
    unstable <n> <t> <order>        2-part of an unstable group (audit aid)

A ``<line>`` is a generator name, an offset name, an alias, or
``<2^i>*<name>`` with a decimal power-of-two coefficient.  Sums are
written with ``+``.  The bracket in a ``hopf`` record is the detecting
cell; its last entry is the sphere coordinate for invariants that live
beyond the stable range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

Line = Tuple[str, int]
Vector = FrozenSet[Line]


class ParseError(ValueError):
    pass


class DanglingReference(ValueError):
    pass


class UnknownName(KeyError):
    pass


class NoEntry(KeyError):
    pass


ZERO = "0"
UNKNOWN = "?"


@dataclass(frozen=True)
class Generator:
    name: str
    stem: int
    order_exp: Optional[int]  # None means infinite order (0-stem only)
    index: int  # position within its stem's listing


@dataclass(frozen=True)
class HopfEntry:
    kind: str  # shi | hi | ghi
    source: Line
    target: Line
    cell: Tuple[int, ...]  # detecting cell; last entry is the sphere coordinate


@dataclass
class StemsDB:
    gens: Dict[str, Generator] = field(default_factory=dict)
    stems: Dict[int, List[Generator]] = field(default_factory=dict)
    offset_names: Dict[Line, str] = field(default_factory=dict)
    named_offsets: Dict[str, Line] = field(default_factory=dict)
    aliases: Dict[str, Vector] = field(default_factory=dict)
    alias_names: Dict[Vector, str] = field(default_factory=dict)
    products: Dict[Tuple[str, str], str] = field(default_factory=dict)
    hopf: Dict[str, Dict[Line, HopfEntry]] = field(default_factory=dict)
    unstable: Dict[Tuple[int, int], Optional[int]] = field(default_factory=dict)

    # -- name resolution ----------------------------------------------------

    def resolve_line(self, token: str) -> Line:
        vec = self.resolve_vector(token)
        if len(vec) != 1:
            raise UnknownName(f"{token!r} is not a single line")
        return next(iter(vec))

    def resolve_vector(self, expr: str) -> Vector:
        out: set = set()
        for token in expr.split("+"):
            token = token.strip()
            if not token:
                raise UnknownName("empty term")
            for line in self._resolve_term(token):
                out.symmetric_difference_update([line])
        return frozenset(out)

    def _resolve_term(self, token: str) -> Vector:
        shift = 0
        if "*" in token:
            coeff_s, token = token.split("*", 1)
            coeff = int(coeff_s)
            if coeff <= 0 or coeff & (coeff - 1):
                raise UnknownName(f"coefficient {coeff_s} is not a power of two")
            shift = coeff.bit_length() - 1
        if token in self.gens:
            base: Vector = frozenset([(token, 0)])
        elif token in self.named_offsets:
            base = frozenset([self.named_offsets[token]])
        elif token in self.aliases:
            base = self.aliases[token]
        elif token.isdigit():
            coeff = int(token)
            if coeff <= 0 or coeff & (coeff - 1):
                raise UnknownName(f"{token} is not a power-of-two multiple of 1")
            base = frozenset([("1", coeff.bit_length() - 1)])
        else:
            raise UnknownName(token)
        if not shift:
            return base
        shifted = set()
        for gen, off in base:
            order = self.gens[gen].order_exp
            if order is None or off + shift < order:
                shifted.add((gen, off + shift))
        return frozenset(shifted)

    def line_stem(self, line: Line) -> int:
        return self.gens[line[0]].stem

    def vector_stem(self, vec: Vector) -> int:
        stems = {self.line_stem(line) for line in vec}
        if len(stems) != 1:
            raise ValueError(f"inhomogeneous vector {vec}")
        return stems.pop()

    def line_order_exp(self, line: Line) -> Optional[int]:
        return self.gens[line[0]].order_exp

    # -- display ------------------------------------------------------------

    def line_name(self, line: Line) -> str:
        gen, off = line
        if line in self.offset_names:
            return self.offset_names[line]
        if gen == "1":
            return str(1 << off)
        if off == 0:
            return gen
        return f"{1 << off}*{gen}"

    def vector_name(self, vec: Vector) -> str:
        if len(vec) == 1:
            return self.line_name(next(iter(vec)))
        # sums display expanded and sorted, never through alias names
        return "+".join(sorted(self.line_name(line) for line in vec))

    # -- queries ------------------------------------------------------------

    def generators_at(self, stem: int) -> List[Generator]:
        return list(self.stems.get(stem, []))

    def multiply(self, a: str, b: str) -> str:
        """Product of two lines by table lookup; returns a line expression,
        ZERO, or UNKNOWN.  The token "2" multiplies by doubling."""
        if a == "2" or b == "2":
            other = b if a == "2" else a
            vec = self.resolve_vector(other)
            shifted = set()
            for gen, off in vec:
                order = self.gens[gen].order_exp
                if order is None or off + 1 < order:
                    shifted.add((gen, off + 1))
            return self.vector_name(frozenset(shifted)) if shifted else ZERO
        la, lb = self.resolve_line(a), self.resolve_line(b)
        if la[0] == "1" or lb[0] == "1":
            unit, other = (la, lb) if la[0] == "1" else (lb, la)
            gen, off = other
            order = self.gens[gen].order_exp
            off += unit[1]
            if order is not None and off >= order:
                return ZERO
            return self.line_name((gen, off))
        key = (la[0], lb[0])
        if key not in self.products:
            key = (lb[0], la[0])
        if key not in self.products:
            return UNKNOWN
        result = self.products[key]
        if result in (ZERO, UNKNOWN):
            return result
        shift = la[1] + lb[1]
        vec = self.resolve_vector(result)
        shifted = set()
        for gen, off in vec:
            order = self.gens[gen].order_exp
            if order is None or off + shift < order:
                shifted.add((gen, off + shift))
        return self.vector_name(frozenset(shifted)) if shifted else ZERO

    def _hopf_lookup(self, kind: str, name: str) -> HopfEntry:
        line = self.resolve_line(name)
        table = self.hopf.get(kind, {})
        if line not in table:
            raise NoEntry(f"no {kind} entry for {name}")
        return table[line]

    def lookup_shi(self, name: str) -> HopfEntry:
        return self._hopf_lookup("shi", name)

    def lookup_hi(self, name: str) -> HopfEntry:
        return self._hopf_lookup("hi", name)

    def lookup_ghi(self, name: str) -> HopfEntry:
        return self._hopf_lookup("ghi", name)

    def unstable_order_exp(self, sphere: int, total: int) -> Optional[int]:
        return self.unstable.get((sphere, total))

    # -- audits -------------------------------------------------------------

    def audit(self) -> List[str]:
        """Degree and alias consistency checks; returns human-readable issues."""
        issues = []
        for (a, b), result in self.products.items():
            if result in (ZERO, UNKNOWN):
                continue
            try:
                vec = self.resolve_vector(result)
            except UnknownName:
                issues.append(f"product {a}*{b}: unresolvable result {result}")
                continue
            want = self.gens[a].stem + self.gens[b].stem
            for line in vec:
                if self.line_stem(line) != want:
                    issues.append(f"product {a}*{b}: stem {self.line_stem(line)} != {want}")
        for name, vec in self.aliases.items():
            try:
                self.vector_stem(vec)
            except ValueError:
                issues.append(f"alias {name}: mixes stems")
        for table in self.hopf.values():
            for entry in table.values():
                src_stem = self.line_stem(entry.source)
                tgt_stem = self.line_stem(entry.target)
                cell = entry.cell
                m = cell[-1]
                body = sum(cell[:-1])
                # detecting line sits one total degree down in the EHP chart
                if tgt_stem + body + m - (len(cell) - 1) != src_stem:
                    issues.append(f"hopf {entry.kind} {entry.source}: cell {cell} off by degree")
        return issues


def _parse_cell(token: str) -> Tuple[int, ...]:
    token = token.strip()
    if not (token.startswith("[") and token.endswith("]")):
        raise ParseError(f"expected [cells], got {token!r}")
    inner = token[1:-1].strip()
    if not inner:
        return ()
    return tuple(int(x) for x in inner.split(","))


def load_database(text: str) -> StemsDB:
    """Parse database text; raises ParseError / DanglingReference."""
    db = StemsDB()
    deferred = []  # (lineno, kind, payload) resolved after all stems are read
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            kind = fields[0]
            if kind == "stem":
                t = int(fields[1])
                name = fields[2]
                order = fields[3]
                if order == "inf":
                    order_exp = None
                else:
                    val = int(order)
                    if val <= 1 or val & (val - 1):
                        raise ParseError(f"line {lineno}: order must be inf or a power of two > 1")
                    order_exp = val.bit_length() - 1
                if order == "inf" and t != 0:
                    raise ParseError(f"line {lineno}: only the 0-stem may be infinite")
                if name in db.gens:
                    raise ParseError(f"line {lineno}: duplicate generator {name}")
                gen = Generator(name, t, order_exp, len(db.stems.get(t, [])))
                db.gens[name] = gen
                db.stems.setdefault(t, []).append(gen)
            elif kind in ("offsetname", "alias", "prod", "hopf", "unstable"):
                deferred.append((lineno, kind, fields[1:]))
            else:
                raise ParseError(f"line {lineno}: unknown record kind {kind!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: {raw!r}: {exc}") from exc

    for lineno, kind, fields in deferred:
        try:
            if kind == "offsetname":
                gen, off, name = fields[0], int(fields[1]), fields[2]
                if gen not in db.gens:
                    raise DanglingReference(f"line {lineno}: unknown generator {gen}")
                order = db.gens[gen].order_exp
                if order is not None and not 0 < off < order:
                    raise ParseError(f"line {lineno}: offset {off} outside order of {gen}")
                db.offset_names[(gen, off)] = name
                db.named_offsets[name] = (gen, off)
            elif kind == "alias":
                name = fields[0]
                if fields[1] != "=":
                    raise ParseError(f"line {lineno}: alias needs '='")
                vec = db.resolve_vector(" ".join(fields[2:]))
                db.aliases[name] = vec
                db.alias_names.setdefault(vec, name)
            elif kind == "prod":
                a, star, b, eq = fields[0], fields[1], fields[2], fields[3]
                if star != "*" or eq != "=":
                    raise ParseError(f"line {lineno}: malformed product")
                result = " ".join(fields[4:])
                if a not in db.gens or b not in db.gens:
                    raise DanglingReference(f"line {lineno}: unknown factor in {a}*{b}")
                if result not in (ZERO, UNKNOWN):
                    db.resolve_vector(result)  # raises on dangling names
                db.products[(a, b)] = result
            elif kind == "hopf":
                table_kind = fields[0]
                if table_kind not in ("shi", "hi", "ghi"):
                    raise ParseError(f"line {lineno}: hopf kind must be shi/hi/ghi")
                src = db.resolve_line(fields[1])
                if fields[2] != "=":
                    raise ParseError(f"line {lineno}: hopf needs '='")
                tgt = db.resolve_line(fields[3])
                cell = _parse_cell(fields[4])
                entry = HopfEntry(table_kind, src, tgt, cell)
                db.hopf.setdefault(table_kind, {})[src] = entry
            elif kind == "unstable":
                n, t, order = int(fields[0]), int(fields[1]), fields[2]
                if order == "inf":
                    db.unstable[(n, t)] = None
                else:
                    val = int(order)
                    if val and (val & (val - 1)):
                        raise ParseError(f"line {lineno}: order must be a 2-power or 0")
                    db.unstable[(n, t)] = val.bit_length() - 1 if val else 0
        except UnknownName as exc:
            raise DanglingReference(f"line {lineno}: {exc}") from exc
        except (IndexError, ValueError) as exc:
            if isinstance(exc, (ParseError, DanglingReference)):
                raise
            raise ParseError(f"line {lineno}: {exc}") from exc

    issues = db.audit()
    if issues:
        raise ParseError("database audit failed: " + "; ".join(issues))
    return db
