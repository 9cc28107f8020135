"""Binary CSP instances.

A binary CSP is a set of variables 0..n-1, a finite integer domain per
variable, and a relation of allowed value pairs for some variable pairs.
Pairs without a declared relation are complete (everything allowed).

Relations are kept as bit rows: for an ordered pair (i, j) and a value
v of x_i, ``row(i, j, v)`` is an int whose bit b is set iff (v, b) is
allowed and b is still in the domain of x_j.  Values are renumbered
0..k-1 internally; the original numbers survive as per-variable value
names and are used by the text format.
"""

from __future__ import annotations

import io
import os
from typing import Iterable, Mapping, Sequence, TextIO, Union


class FormatError(ValueError):
    """Malformed instance text."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def _bits(mask: int):
    """Iterate set bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Instance:
    """A binary CSP over a fixed variable universe.

    Variables and values can be removed (preprocessing mutates through
    ``delete_value`` / ``remove_variable``), but relation rows are never
    rewritten; queries mask deleted values out on the fly.
    """

    __slots__ = ("_active", "_dom", "_mask", "_values", "_rows", "_adj", "_pairs")

    def __init__(self) -> None:
        self._active: set[int] = set()
        self._dom: dict[int, list[int]] = {}
        self._mask: dict[int, int] = {}
        self._values: dict[int, list[int]] = {}  # internal -> external name
        self._rows: dict[tuple[int, int], list[int]] = {}
        self._adj: dict[int, set[int]] = {}
        self._pairs: set[tuple[int, int]] = set()

    # -- construction ------------------------------------------------

    @staticmethod
    def build(domains: Sequence[Iterable[int]],
              constraints: Mapping[tuple[int, int], Iterable[tuple[int, int]]] | None = None,
              ) -> "Instance":
        """Build an instance from external-value domains and allowed pairs.

        Args:
            domains: one iterable of distinct non-negative ints per variable.
            constraints: {(i, j): allowed (a, b) external pairs}.  A pair
                declared with an empty list is an explicit always-false
                relation.
        """
        inst = Instance()
        for i, dom in enumerate(domains):
            names = sorted(dom)
            if len(set(names)) != len(names):
                raise ValueError("duplicate value in domain of variable %d" % i)
            if any(v < 0 for v in names):
                raise ValueError("negative value in domain of variable %d" % i)
            inst._active.add(i)
            inst._values[i] = names
            inst._dom[i] = list(range(len(names)))
            inst._mask[i] = (1 << len(names)) - 1
            inst._adj[i] = set()
        if constraints:
            for (i, j), allowed in constraints.items():
                inst._add_relation(i, j, allowed)
        return inst

    def _add_relation(self, i: int, j: int,
                      allowed: Iterable[tuple[int, int]]) -> None:
        if i == j:
            raise ValueError("self constraint on variable %d" % i)
        if i not in self._active or j not in self._active:
            raise ValueError("constraint on unknown variable (%d,%d)" % (i, j))
        key = (min(i, j), max(i, j))
        if key in self._pairs:
            raise ValueError("duplicate constraint (%d,%d)" % key)
        fwd = [0] * len(self._values[i])
        rev = [0] * len(self._values[j])
        index_i = {v: p for p, v in enumerate(self._values[i])}
        index_j = {v: p for p, v in enumerate(self._values[j])}
        for a, b in allowed:
            if a not in index_i:
                raise ValueError("value %d not in domain of variable %d" % (a, i))
            if b not in index_j:
                raise ValueError("value %d not in domain of variable %d" % (b, j))
            fwd[index_i[a]] |= 1 << index_j[b]
            rev[index_j[b]] |= 1 << index_i[a]
        self._pairs.add(key)
        self._rows[(i, j)] = fwd
        self._rows[(j, i)] = rev
        self._adj[i].add(j)
        self._adj[j].add(i)

    def copy(self) -> "Instance":
        dup = Instance()
        dup._active = set(self._active)
        dup._dom = {i: list(d) for i, d in self._dom.items()}
        dup._mask = dict(self._mask)
        dup._values = self._values  # immutable once built
        dup._rows = dict(self._rows)  # row lists are never mutated
        dup._adj = {i: set(s) for i, s in self._adj.items()}
        dup._pairs = set(self._pairs)
        return dup

    # -- queries -----------------------------------------------------

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(self._active))

    @property
    def n(self) -> int:
        return len(self._active)

    @property
    def e(self) -> int:
        """Number of declared (explicit) constraints between live variables."""
        return len(self._pairs)

    @property
    def wiped(self) -> bool:
        return any(not self._dom[i] for i in self._active)

    def is_active(self, i: int) -> bool:
        return i in self._active

    def dom(self, i: int) -> list[int]:
        """Live internal values of x_i, ascending."""
        return self._dom[i]

    def dom_mask(self, i: int) -> int:
        return self._mask[i]

    def dom_size(self, i: int) -> int:
        return len(self._dom[i])

    def max_dom_size(self) -> int:
        return max((len(self._dom[i]) for i in self._active), default=0)

    def neighbors(self, i: int) -> list[int]:
        """Live variables with an explicit constraint to x_i, ascending."""
        return sorted(self._adj[i])

    def constrains(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._pairs

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self._pairs)

    def row(self, i: int, j: int, v: int) -> int:
        """Mask over live D(x_j) of values allowed with x_i = v."""
        r = self._rows.get((i, j))
        if r is None:
            return self._mask[j]
        return r[v] & self._mask[j]

    def compatible(self, i: int, v_i: int, j: int, v_j: int) -> bool:
        """True iff (v_i, v_j) is allowed for (x_i, x_j)."""
        if not (self._mask[i] >> v_i) & 1:
            raise ValueError("value %d not in domain of variable %d" % (v_i, i))
        if not (self._mask[j] >> v_j) & 1:
            raise ValueError("value %d not in domain of variable %d" % (v_j, j))
        r = self._rows.get((i, j))
        if r is None:
            return True
        return bool((r[v_i] >> v_j) & 1)

    # -- value names -------------------------------------------------

    def value_name(self, i: int, v: int) -> int:
        return self._values[i][v]

    def value_names(self, i: int) -> list[int]:
        return [self._values[i][v] for v in self._dom[i]]

    def internal_value(self, i: int, name: int) -> int:
        try:
            return self._values[i].index(name)
        except ValueError:
            raise KeyError("variable %d has no value %d" % (i, name)) from None

    # -- mutation ----------------------------------------------------

    def delete_value(self, i: int, v: int) -> None:
        if not (self._mask[i] >> v) & 1:
            raise ValueError("value %d already absent from variable %d" % (v, i))
        self._mask[i] &= ~(1 << v)
        self._dom[i].remove(v)

    def remove_variable(self, i: int) -> None:
        if i not in self._active:
            raise ValueError("variable %d not active" % i)
        self._active.discard(i)
        for j in list(self._adj[i]):
            self._adj[j].discard(i)
            self._pairs.discard((min(i, j), max(i, j)))
            self._rows.pop((i, j), None)
            self._rows.pop((j, i), None)
        self._adj[i] = set()

    # -- comparison --------------------------------------------------

    def _relation_names(self, i: int, j: int) -> frozenset[tuple[int, int]]:
        out = []
        for v in self._dom[i]:
            r = self.row(i, j, v)
            a = self._values[i][v]
            out.extend((a, self._values[j][w]) for w in _bits(r))
        return frozenset(out)

    def __eq__(self, other: object) -> bool:
        """Semantic equality: same live variables, domains (by external
        name) and allowed pairs, regardless of internal numbering."""
        if not isinstance(other, Instance):
            return NotImplemented
        if self._active != other._active:
            return False
        for i in self._active:
            if self.value_names(i) != other.value_names(i):
                return False
        if self._pairs != other._pairs:
            return False
        for i, j in self._pairs:
            if self._relation_names(i, j) != other._relation_names(i, j):
                return False
        return True

    def __hash__(self):  # instances are mutable; identity hash is fine
        return id(self)

    def __repr__(self) -> str:
        return "Instance(n=%d, e=%d, d=%d)" % (self.n, self.e, self.max_dom_size())

    def canonical_key(self) -> tuple:
        """Hashable snapshot of the live structure (for memoization)."""
        doms = tuple((i, tuple(self.value_names(i))) for i in self.variables)
        rels = tuple((i, j, tuple(sorted(self._relation_names(i, j))))
                     for i, j in self.pairs())
        return (doms, rels)


def build_instance(domains, constraints=None) -> Instance:
    return Instance.build(domains, constraints)


Source = Union[str, os.PathLike, TextIO]


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    return open(os.fspath(source), "r", encoding="utf-8").read()


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    Grammar::

        BCSP 1
        vars <n>
        dom <i> <k> <v_1> ... <v_k>
        con <i> <j> <t>
        <a> <b>            (t allowed pairs)
        end

    Full lines starting with '#' are comments.  Declared pairs not listed
    are forbidden; undeclared variable pairs are complete.
    """
    lines = text.splitlines()
    pos = 0

    def next_tokens() -> tuple[int, list[str]]:
        nonlocal pos
        while pos < len(lines):
            raw = lines[pos]
            pos += 1
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            return pos, stripped.split()
        raise FormatError("unexpected end of input", len(lines))

    def ints(tokens: list[str], lineno: int) -> list[int]:
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise FormatError("expected integers, got %r" % " ".join(tokens), lineno) from None

    lineno, header = next_tokens()
    if header != ["BCSP", "1"]:
        raise FormatError("expected 'BCSP 1' header", lineno)
    lineno, tok = next_tokens()
    if len(tok) != 2 or tok[0] != "vars":
        raise FormatError("expected 'vars <n>'", lineno)
    n = ints(tok[1:], lineno)[0]
    if n < 0:
        raise FormatError("negative variable count", lineno)

    domains: dict[int, list[int]] = {}
    for _ in range(n):
        lineno, tok = next_tokens()
        if tok[0] != "dom":
            raise FormatError("expected 'dom' line", lineno)
        vals = ints(tok[1:], lineno)
        if len(vals) < 2:
            raise FormatError("truncated dom line", lineno)
        i, k, rest = vals[0], vals[1], vals[2:]
        if not 0 <= i < n:
            raise FormatError("variable %d out of range" % i, lineno)
        if i in domains:
            raise FormatError("duplicate dom line for variable %d" % i, lineno)
        if len(rest) != k:
            raise FormatError("dom line announces %d values, lists %d" % (k, len(rest)), lineno)
        if len(set(rest)) != k:
            raise FormatError("duplicate value in domain of variable %d" % i, lineno)
        domains[i] = rest

    inst = Instance.build([domains[i] for i in range(n)])

    while True:
        lineno, tok = next_tokens()
        if tok == ["end"]:
            break
        if tok[0] != "con":
            raise FormatError("expected 'con' or 'end'", lineno)
        vals = ints(tok[1:], lineno)
        if len(vals) != 3:
            raise FormatError("expected 'con <i> <j> <t>'", lineno)
        i, j, t = vals
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError("constraint variable out of range", lineno)
        if i == j:
            raise FormatError("self constraint on variable %d" % i, lineno)
        if t < 0:
            raise FormatError("negative pair count", lineno)
        allowed = []
        for _ in range(t):
            lineno2, ptok = next_tokens()
            pair = ints(ptok, lineno2)
            if len(pair) != 2:
                raise FormatError("expected '<a> <b>' pair", lineno2)
            allowed.append((pair[0], pair[1]))
        try:
            inst._add_relation(i, j, allowed)
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return inst


def load_instance(source: Source) -> Instance:
    """Load an instance from a path or an open text stream."""
    return parse_instance(_read_text(source))


def format_instance(inst: Instance, comment: str | None = None) -> str:
    """Serialize an instance; renumbers variables to 0..n-1 if needed.

    When renumbering happens a '# source-vars:' comment records the
    original indices in new-index order.
    """
    live = list(inst.variables)
    renum = {old: new for new, old in enumerate(live)}
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write("# %s\n" % line)
    if live != list(range(len(live))):
        out.write("# source-vars: %s\n" % " ".join(str(v) for v in live))
    out.write("BCSP 1\n")
    out.write("vars %d\n" % len(live))
    for old in live:
        names = inst.value_names(old)
        out.write("dom %d %d %s\n" % (renum[old], len(names),
                                      " ".join(str(v) for v in names)))
    for i, j in inst.pairs():
        allowed = sorted(inst._relation_names(i, j))
        out.write("con %d %d %d\n" % (renum[i], renum[j], len(allowed)))
        for a, b in allowed:
            out.write("%d %d\n" % (a, b))
    out.write("end\n")
    return out.getvalue()


def save_instance(inst: Instance, target: Source, comment: str | None = None) -> None:
    """Write an instance to a path or an open text stream."""
    text = format_instance(inst, comment)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(os.fspath(target), "w", encoding="utf-8") as fh:
            fh.write(text)


def iter_bits(mask: int):
    """Public alias of the bit iterator (ascending positions)."""
    return _bits(mask)
