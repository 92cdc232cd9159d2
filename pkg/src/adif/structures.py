"""Finite relational structures and their on-disk format.

Format, one directive per line (blank lines and '#' comments ignored)::

    domain 0 1
    relation P/1 { (0) }
    relation R/2 { (0,1) (1,0) }

Equality is available on every structure without being declared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formulas import Formula, relation_arities


class StructureError(Exception):
    pass


@dataclass(frozen=True)
class Structure:
    domain: tuple[str, ...]
    relations: tuple[tuple[str, int, frozenset[tuple[str, ...]]], ...]

    def __post_init__(self):
        if not self.domain:
            raise StructureError("structure domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise StructureError("structure domain values must be distinct")
        for name, arity, tuples in self.relations:
            for row in tuples:
                if len(row) != arity:
                    raise StructureError(
                        f"relation {name!r} has arity {arity} but contains a "
                        f"tuple of length {len(row)}")
                for value in row:
                    if value not in self.domain:
                        raise StructureError(
                            f"relation {name!r} mentions {value!r}, which is "
                            f"not a domain value")

    @staticmethod
    def make(domain, relations=None) -> "Structure":
        rels = tuple(
            (name, arity, frozenset(tuple(row) for row in rows))
            for name, arity, rows in (relations or ()))
        return Structure(tuple(str(v) for v in domain), rels)

    def arity(self, name: str) -> int:
        if name == "=":
            return 2
        for rel, arity, _ in self.relations:
            if rel == name:
                return arity
        raise StructureError(f"unknown relation {name!r}")

    def holds(self, name: str, row: tuple[str, ...]) -> bool:
        if name == "=":
            if len(row) != 2:
                raise StructureError("equality takes exactly two arguments")
            return row[0] == row[1]
        for rel, arity, tuples in self.relations:
            if rel == name:
                if len(row) != arity:
                    raise StructureError(
                        f"relation {name!r} has arity {arity}, got {len(row)} arguments")
                return row in tuples
        raise StructureError(f"unknown relation {name!r}")

    def check_formula(self, phi: Formula) -> None:
        """Arity/name validation of every atom against this signature."""
        for name, arities in relation_arities(phi).items():
            declared = self.arity(name)
            for used in arities:
                if used != declared:
                    raise StructureError(
                        f"relation {name!r} used with arity {used}, declared {declared}")


BINARY_EQUALITY = Structure.make(["0", "1"])

_DOMAIN_RE = re.compile(r"^domain\s+(.+)$")
_RELATION_RE = re.compile(r"^relation\s+([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)\s*\{(.*)\}\s*$")
_TUPLE_RE = re.compile(r"\(([^()]*)\)")


def parse_structure(text: str) -> Structure:
    domain: list[str] | None = None
    relations = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DOMAIN_RE.match(line)
        if m:
            if domain is not None:
                raise StructureError(f"line {lineno}: duplicate domain directive")
            domain = m.group(1).split()
            continue
        m = _RELATION_RE.match(line)
        if m:
            name, arity, body = m.group(1), int(m.group(2)), m.group(3)
            rows = []
            consumed = _TUPLE_RE.sub("", body).strip()
            if consumed:
                raise StructureError(f"line {lineno}: stray text {consumed!r} in relation body")
            for tup in _TUPLE_RE.findall(body):
                row = tuple(v.strip() for v in tup.split(",")) if tup.strip() else ()
                rows.append(row)
            relations.append((name, arity, rows))
            continue
        raise StructureError(f"line {lineno}: cannot parse {line!r}")
    if domain is None:
        raise StructureError("missing domain directive")
    return Structure.make(domain, relations)


def load_structure(path: str) -> Structure:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_structure(handle.read())
