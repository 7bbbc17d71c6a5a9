"""Propositional formulas, knowledge bases and a DPLL-backed reasoner.

Formulas are immutable trees built from :class:`Atom`, :class:`Not`,
:class:`And`, :class:`Or`, :class:`Implies`, :class:`Iff` and :class:`Const`.
A :class:`KnowledgeBase` is an ordered list of labelled formulas over an
explicit atom signature; models are total assignments over that signature
and are stored as the set of true atoms.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence, Union

DEFAULT_ATOM_CAP = 24
ATOM_CAP_ENV = "RECONCILE_ATOM_CAP"

ATOM_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*(_[0-9]+)?")


class LogicError(Exception):
    pass


class FormulaSyntaxError(LogicError):
    def __init__(self, text: str, offset: int, expected: Iterable[str]):
        self.text = text
        self.offset = offset
        self.expected = sorted(set(expected))
        found = text[offset : offset + 8] or "end of input"
        super().__init__(
            f"syntax error at offset {offset} near {found!r}: "
            f"expected one of {', '.join(self.expected)}"
        )


class KnowledgeBaseError(LogicError):
    pass


class EnumerationCapExceeded(LogicError):
    """Raised when a model enumeration would range over too many atoms."""


# --------------------------------------------------------------------------
# Formula AST


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not ATOM_RE.fullmatch(self.name) or self.name in ("true", "false"):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not:
    arg: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    args: tuple[Formula, ...]

    def __post_init__(self):
        # a one-element conjunction has no distinct textual form
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands; use conj()")
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    args: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands; use disj()")
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, Const, Not, And, Or, Implies, Iff]

TRUE = Const(True)
FALSE = Const(False)


def conj(*args: Formula) -> Formula:
    """Conjunction of any number of formulas (``true`` when empty)."""
    if len(args) == 1 and not isinstance(args[0], (Atom, Const, Not, And, Or, Implies, Iff)):
        args = tuple(args[0])
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args: Formula) -> Formula:
    """Disjunction of any number of formulas (``false`` when empty)."""
    if len(args) == 1 and not isinstance(args[0], (Atom, Const, Not, And, Or, Implies, Iff)):
        args = tuple(args[0])
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def atoms_of(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.left)
            stack.append(g.right)
    return out


def evaluate(f: Formula, true_atoms: Union[set, frozenset]) -> bool:
    """Truth value of ``f`` when exactly ``true_atoms`` are true."""
    if isinstance(f, Atom):
        return f.name in true_atoms
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.arg, true_atoms)
    if isinstance(f, And):
        return all(evaluate(g, true_atoms) for g in f.args)
    if isinstance(f, Or):
        return any(evaluate(g, true_atoms) for g in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.left, true_atoms)) or evaluate(f.right, true_atoms)
    if isinstance(f, Iff):
        return evaluate(f.left, true_atoms) == evaluate(f.right, true_atoms)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Text syntax

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<iff><->)|(?P<imp>->)|(?P<op>[!&|()])|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_[0-9]+)?))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(text, pos, ["atom", "true", "false", "!", "(", "&", "|", "->", "<->", ")"])
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        # an atom immediately followed by an identifier character, e.g. "p_1x"
        end = m.end()
        if m.lastgroup == "name" and end < len(text) and (text[end].isalnum() or text[end] == "_"):
            raise FormulaSyntaxError(text, end, ["&", "|", "->", "<->", ")"])
        kind = m.lastgroup if m.lastgroup != "op" else value
        if kind == "iff":
            kind = "<->"
        elif kind == "imp":
            kind = "->"
        tokens.append((kind, value, start))
        pos = end
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> bool:
        if self.tokens[self.i][0] == kind:
            self.i += 1
            return True
        return False

    def fail(self, expected: Iterable[str]):
        raise FormulaSyntaxError(self.text, self.peek()[2], expected)

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            self.fail(["&", "|", "->", "<->", "end of input"])
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.take("<->"):
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.take("->"):
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        args = [self.conjunction()]
        while self.take("|"):
            args.append(self.conjunction())
        return disj(*args)

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.take("&"):
            args.append(self.unary())
        return conj(*args)

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind == "!":
            self.i += 1
            return Not(self.unary())
        if kind == "(":
            self.i += 1
            f = self.iff()
            if not self.take(")"):
                self.fail([")", "&", "|", "->", "<->"])
            return f
        if kind == "name":
            self.i += 1
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return Atom(value)
        self.fail(["atom", "true", "false", "!", "("])


def parse_formula(text: str) -> Formula:
    """Parse formula text.

    Precedence from tightest to loosest is ``!``, ``&``, ``|``, ``->``,
    ``<->``; the last two associate to the right.

    >>> parse_formula("!G_0 & G_1 -> A_0 | B_0")
    Implies(left=And(args=(Not(arg=Atom(name='G_0')), Atom(name='G_1'))), right=Or(args=(Atom(name='A_0'), Atom(name='B_0'))))
    """
    return _Parser(text).parse()


def _fmt_child(child: Formula, parent_prec: int, strict: bool) -> str:
    prec = _PREC.get(type(child))
    text = format_formula(child)
    if prec is None:
        return text
    if prec < parent_prec or (strict and prec == parent_prec):
        return f"({text})"
    return text


def format_formula(f: Formula) -> str:
    """Render ``f`` in the text syntax accepted by :func:`parse_formula`."""
    if isinstance(f, (Atom, Const)):
        return str(f)
    if isinstance(f, Not):
        return "!" + _fmt_child(f.arg, _PREC[Not], strict=False)
    if isinstance(f, And):
        return " & ".join(_fmt_child(a, _PREC[And], strict=True) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_fmt_child(a, _PREC[Or], strict=True) for a in f.args)
    if isinstance(f, (Implies, Iff)):
        p = _PREC[type(f)]
        op = " -> " if isinstance(f, Implies) else " <-> "
        return _fmt_child(f.left, p, strict=True) + op + _fmt_child(f.right, p, strict=False)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Models, knowledge bases

Signature = tuple  # ordered tuple of atom names


def _merge_signature(*sigs: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for sig in sigs:
        for a in sig:
            seen.setdefault(a, None)
    return tuple(seen)


@dataclass(frozen=True)
class Model:
    """Total assignment over ``signature``; atoms outside ``true_atoms`` are false."""

    true_atoms: frozenset
    signature: tuple

    def __post_init__(self):
        object.__setattr__(self, "true_atoms", frozenset(self.true_atoms))
        object.__setattr__(self, "signature", tuple(self.signature))
        extra = self.true_atoms.difference(self.signature)
        if extra:
            raise ValueError(f"true atoms outside signature: {sorted(extra)}")

    def __contains__(self, atom: str) -> bool:
        return atom in self.true_atoms

    def satisfies(self, f: Formula) -> bool:
        return evaluate(f, self.true_atoms)

    def project(self, atoms: Iterable[str]) -> Model:
        atoms = tuple(atoms)
        return Model(self.true_atoms.intersection(atoms), atoms)

    def sorted_atoms(self) -> list[str]:
        return sorted(self.true_atoms)


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple  # of (label, Formula)
    signature: tuple = ()

    def __post_init__(self):
        entries = tuple((str(label), f) for label, f in self.entries)
        labels = [label for label, _ in entries]
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise KnowledgeBaseError(f"duplicate labels: {dup}")
        sig = _merge_signature(self.signature, *(sorted(atoms_of(f)) for _, f in entries))
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "signature", sig)

    @classmethod
    def from_formulas(cls, formulas: Iterable, signature: Iterable[str] = (), prefix: str = "f") -> KnowledgeBase:
        """Build a KB from formulas (or formula texts) with generated labels."""
        entries = []
        for i, f in enumerate(formulas):
            if isinstance(f, str):
                f = parse_formula(f)
            entries.append((f"{prefix}{i}", f))
        return cls(tuple(entries), tuple(signature))

    @property
    def formulas(self) -> list[Formula]:
        return [f for _, f in self.entries]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, Formula]]:
        return iter(self.entries)

    def get(self, label: str) -> Formula:
        for lab, f in self.entries:
            if lab == label:
                return f
        raise KeyError(label)

    def conjunction(self) -> Formula:
        return conj(*self.formulas)

    def with_signature(self, atoms: Iterable[str]) -> KnowledgeBase:
        return KnowledgeBase(self.entries, _merge_signature(self.signature, atoms))

    def subset(self, labels: Iterable[str]) -> KnowledgeBase:
        keep = set(labels)
        return KnowledgeBase(tuple(e for e in self.entries if e[0] in keep), self.signature)

    def add(self, label: str, f: Formula) -> KnowledgeBase:
        return KnowledgeBase(self.entries + ((label, f),), self.signature)

    def to_json(self) -> dict:
        return {
            "signature": list(self.signature),
            "formulas": [{"label": label, "text": format_formula(f)} for label, f in self.entries],
        }


def kb_from_json(data: Union[str, Mapping]) -> KnowledgeBase:
    """Load a KB from its JSON object (or JSON text)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise KnowledgeBaseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise KnowledgeBaseError("$: expected an object")
    sig = data.get("signature", [])
    if not isinstance(sig, list) or not all(isinstance(a, str) for a in sig):
        raise KnowledgeBaseError("$.signature: expected a list of atom names")
    for i, a in enumerate(sig):
        if not ATOM_RE.fullmatch(a):
            raise KnowledgeBaseError(f"$.signature[{i}]: invalid atom name {a!r}")
    items = data.get("formulas")
    if not isinstance(items, list):
        raise KnowledgeBaseError("$.formulas: expected a list")
    entries = []
    for i, item in enumerate(items):
        if not isinstance(item, Mapping) or not isinstance(item.get("text"), str):
            raise KnowledgeBaseError(f"$.formulas[{i}]: expected {{label, text}}")
        label = item.get("label", f"f{i}")
        if not isinstance(label, str):
            raise KnowledgeBaseError(f"$.formulas[{i}].label: expected a string")
        entries.append((label, parse_formula(item["text"])))
    return KnowledgeBase(tuple(entries), tuple(sig))


def load_kb(path: Union[str, os.PathLike]) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return kb_from_json(fh.read())


# --------------------------------------------------------------------------
# CNF


@dataclass(frozen=True)
class ClauseSet:
    """Clauses in DIMACS style: atom ``atoms[i]`` is variable ``i + 1``.

    ``aux_atoms`` are the definitional variables introduced by
    :func:`to_cnf`; they never occur in the source signature.
    """

    atoms: tuple
    clauses: tuple
    aux_atoms: frozenset = field(default_factory=frozenset)

    @property
    def source_atoms(self) -> tuple[str, ...]:
        return tuple(a for a in self.atoms if a not in self.aux_atoms)

    def literal_clauses(self) -> list[frozenset]:
        """Clauses as sets of ``(atom, polarity)`` pairs."""
        return [frozenset((self.atoms[abs(lit) - 1], lit > 0) for lit in cl) for cl in self.clauses]


class _CnfBuilder:
    def __init__(self, signature: Iterable[str]):
        self.atoms: list[str] = []
        self.index: dict[str, int] = {}
        self.aux: set[str] = set()
        self.clauses: list[tuple[int, ...]] = []
        self.cache: dict[Formula, int] = {}
        self._aux_counter = 0
        self._reserved: set[str] = set()
        for a in signature:
            self.var(a)

    def var(self, name: str) -> int:
        v = self.index.get(name)
        if v is None:
            self.atoms.append(name)
            v = self.index[name] = len(self.atoms)
        return v

    def fresh(self) -> int:
        while True:
            name = f"aux{self._aux_counter}"
            self._aux_counter += 1
            if name not in self.index and name not in self._reserved:
                self.aux.add(name)
                return self.var(name)

    def reserve(self, names: Iterable[str]):
        self._reserved = set(names)

    def lit(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return self.var(f.name)
        if isinstance(f, Not):
            return -self.lit(f.arg)
        cached = self.cache.get(f)
        if cached is not None:
            return cached
        if isinstance(f, And):
            kids = [self.lit(g) for g in f.args]
            x = self.fresh()
            for k in kids:
                self.clauses.append((-x, k))
            self.clauses.append((x, *(-k for k in kids)))
        elif isinstance(f, Or):
            kids = [self.lit(g) for g in f.args]
            x = self.fresh()
            for k in kids:
                self.clauses.append((x, -k))
            self.clauses.append((-x, *kids))
        elif isinstance(f, Implies):
            a, b = self.lit(f.left), self.lit(f.right)
            x = self.fresh()
            self.clauses += [(-x, -a, b), (x, a), (x, -b)]
        elif isinstance(f, Iff):
            a, b = self.lit(f.left), self.lit(f.right)
            x = self.fresh()
            self.clauses += [(-x, -a, b), (-x, a, -b), (x, a, b), (x, -a, -b)]
        else:
            raise TypeError(f"unexpected node {f!r}")
        self.cache[f] = x
        return x

    def add(self, f: Formula):
        f = simplify(f)
        if isinstance(f, Const):
            if not f.value:
                self.clauses.append(())
            return
        if isinstance(f, And):
            for g in f.args:
                self.add(g)
            return
        if isinstance(f, Or) and all(_is_literal(g) for g in f.args):
            self.clauses.append(tuple(self.lit(g) for g in f.args))
            return
        if isinstance(f, Implies) and _is_literal(f.left) and _is_literal(f.right):
            self.clauses.append((-self.lit(f.left), self.lit(f.right)))
            return
        self.clauses.append((self.lit(f),))

    def build(self) -> ClauseSet:
        return ClauseSet(tuple(self.atoms), tuple(self.clauses), frozenset(self.aux))


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def simplify(f: Formula) -> Formula:
    """Remove constants bottom-up; returns a constant or a constant-free formula."""
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        g = simplify(f.arg)
        if isinstance(g, Const):
            return Const(not g.value)
        return Not(g)
    if isinstance(f, And):
        kids = []
        for g in map(simplify, f.args):
            if isinstance(g, Const):
                if not g.value:
                    return FALSE
                continue
            kids.append(g)
        return conj(*kids)
    if isinstance(f, Or):
        kids = []
        for g in map(simplify, f.args):
            if isinstance(g, Const):
                if g.value:
                    return TRUE
                continue
            kids.append(g)
        return disj(*kids)
    if isinstance(f, Implies):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, Const):
            return b if a.value else TRUE
        if isinstance(b, Const):
            return TRUE if b.value else simplify(Not(a))
        return Implies(a, b)
    if isinstance(f, Iff):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, Const):
            return b if a.value else simplify(Not(b))
        if isinstance(b, Const):
            return a if b.value else simplify(Not(a))
        return Iff(a, b)
    raise TypeError(f"not a formula: {f!r}")


def to_cnf(f: Union[Formula, Sequence[Formula]], signature: Iterable[str] = ()) -> ClauseSet:
    """Definitional (Tseitin-style) CNF of ``f`` or of a list of formulas.

    Every compound subformula gets an auxiliary atom defined by an
    equivalence, so each source model extends to exactly one clause-set model.
    """
    formulas = [f] if isinstance(f, (Atom, Const, Not, And, Or, Implies, Iff)) else list(f)
    source = _merge_signature(signature, *(sorted(atoms_of(g)) for g in formulas))
    builder = _CnfBuilder(source)
    builder.reserve(source)
    for g in formulas:
        builder.add(g)
    return builder.build()


# --------------------------------------------------------------------------
# DPLL


def _solve(nvars: int, clauses: Sequence[Sequence[int]], start: list[int] | None = None) -> list[int] | None:
    """DPLL with unit propagation and pure-literal elimination.

    Returns ``assign`` with ``assign[v]`` in ``{1, -1}`` for ``v`` in
    ``1..nvars`` or ``None`` when unsatisfiable. ``start`` is an optional
    partial assignment to extend. Branches on the
    lowest-index unassigned variable of the remaining clauses, true first;
    variables left unconstrained at the end are set true.
    """
    for cl in clauses:
        if not cl:
            return None

    def search(assign: list[int]) -> list[int] | None:
        while True:
            open_clauses = []
            units = []
            for cl in clauses:
                free = []
                sat = False
                for lit in cl:
                    val = assign[lit if lit > 0 else -lit]
                    if val == 0:
                        free.append(lit)
                    elif (val > 0) == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if not free:
                    return None
                if len(free) == 1:
                    units.append(free[0])
                else:
                    open_clauses.append(free)
            if units:
                for lit in units:
                    v = lit if lit > 0 else -lit
                    want = 1 if lit > 0 else -1
                    if assign[v] == -want:
                        return None
                    assign[v] = want
                continue
            if not open_clauses:
                break
            polarity: dict[int, int] = {}
            for cl in open_clauses:
                for lit in cl:
                    v = lit if lit > 0 else -lit
                    polarity[v] = polarity.get(v, 0) | (1 if lit > 0 else 2)
            pure = [v for v, p in polarity.items() if p != 3]
            if pure:
                for v in pure:
                    assign[v] = 1 if polarity[v] == 1 else -1
                continue
            branch = min(polarity)
            for value in (1, -1):
                trial = assign.copy()
                trial[branch] = value
                found = search(trial)
                if found is not None:
                    return found
            return None
        for v in range(1, nvars + 1):
            if assign[v] == 0:
                assign[v] = 1
        return assign

    return search([0] * (nvars + 1) if start is None else start.copy())


def dpll_sat(cs: ClauseSet) -> Model | None:
    """Satisfying total model over ``cs.atoms`` (aux atoms included), or None."""
    assign = _solve(len(cs.atoms), cs.clauses)
    if assign is None:
        return None
    return Model(frozenset(a for i, a in enumerate(cs.atoms, 1) if assign[i] > 0), cs.atoms)


def atom_cap() -> int:
    raw = os.environ.get(ATOM_CAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise LogicError(f"{ATOM_CAP_ENV} must be an integer, got {raw!r}") from None
    return DEFAULT_ATOM_CAP


def satisfiable(formulas: Sequence[Formula], signature: Iterable[str] = ()) -> bool:
    cs = to_cnf(list(formulas), signature)
    return _solve(len(cs.atoms), cs.clauses) is not None


def find_model(formulas: Sequence[Formula], signature: Iterable[str] = ()) -> Model | None:
    """One model of the conjunction of ``formulas``, projected onto the source atoms."""
    cs = to_cnf(list(formulas), signature)
    assign = _solve(len(cs.atoms), cs.clauses)
    if assign is None:
        return None
    src = cs.source_atoms
    return Model(frozenset(a for i, a in enumerate(cs.atoms, 1) if assign[i] > 0 and a not in cs.aux_atoms), src)


def _propagate(clauses: Sequence[Sequence[int]], assign: list[int]) -> bool:
    """Unit propagation in place; False on conflict."""
    changed = True
    while changed:
        changed = False
        for cl in clauses:
            free = 0
            last = 0
            for lit in cl:
                val = assign[lit if lit > 0 else -lit]
                if val == 0:
                    free += 1
                    last = lit
                elif (val > 0) == (lit > 0):
                    break
            else:
                if free == 0:
                    return False
                if free == 1:
                    assign[last if last > 0 else -last] = 1 if last > 0 else -1
                    changed = True
    return True


def _iter_models(formulas: Sequence[Formula], signature: Sequence[str]) -> Iterator[Model]:
    """Split on the signature atoms in order, pruning by unit propagation.

    Each full assignment of the signature is confirmed by one DPLL call over
    the auxiliary atoms, so every projected model is produced exactly once.
    """
    cs = to_cnf(list(formulas), signature)
    nsrc = len(signature)
    clauses = list(cs.clauses)
    if any(not cl for cl in clauses):
        return

    def split(assign: list[int], v: int) -> Iterator[Model]:
        if not _propagate(clauses, assign):
            return
        while v <= nsrc and assign[v] != 0:
            v += 1
        if v > nsrc:
            if _solve(len(cs.atoms), clauses, assign) is not None:
                yield Model(frozenset(signature[i - 1] for i in range(1, nsrc + 1) if assign[i] > 0), signature)
            return
        for value in (1, -1):
            trial = assign.copy()
            trial[v] = value
            yield from split(trial, v + 1)

    yield from split([0] * (len(cs.atoms) + 1), 1)


def models_of(formulas: Sequence[Formula], signature: Iterable[str] = (), cap: int | None = None) -> set[Model]:
    """All models of the conjunction of ``formulas`` over ``signature``
    extended by the formulas' own atoms."""
    sig = _merge_signature(signature, *(sorted(atoms_of(g)) for g in formulas))
    limit = atom_cap() if cap is None else cap
    if len(sig) > limit:
        raise EnumerationCapExceeded(f"signature has {len(sig)} atoms, enumeration cap is {limit}")
    return set(_iter_models(list(formulas), sig))


def enumerate_models(kb: KnowledgeBase, cap: int | None = None) -> set[Model]:
    """Models of ``kb`` over ``kb.signature`` by splitting on the signature atoms."""
    return models_of(kb.formulas, kb.signature, cap=cap)


def is_consistent(kb: KnowledgeBase) -> bool:
    return satisfiable(kb.formulas, kb.signature)


def entails_skeptical(kb: KnowledgeBase, phi: Formula) -> bool:
    """``phi`` holds in every model of ``kb`` and ``kb`` has at least one model.

    An inconsistent KB entails nothing.
    """
    return is_consistent(kb) and not satisfiable(kb.formulas + [Not(phi)], kb.signature)


def entails_credulous(kb: KnowledgeBase, phi: Formula) -> bool:
    """``phi`` holds in some model of ``kb``."""
    return satisfiable(kb.formulas + [phi], kb.signature)


def entails(kb: KnowledgeBase, phi: Formula, mode: str) -> bool:
    if mode == "skeptical":
        return entails_skeptical(kb, phi)
    if mode == "credulous":
        return entails_credulous(kb, phi)
    raise ValueError(f"unknown entailment mode {mode!r}")


def subsumes(kb1: KnowledgeBase, kb2: KnowledgeBase) -> bool:
    """True iff the models of ``kb1`` are a strict subset of those of ``kb2``."""
    sig = _merge_signature(kb1.signature, kb2.signature)
    c1, c2 = kb1.conjunction(), kb2.conjunction()
    inside = not satisfiable([c1, Not(c2)], sig)
    return inside and satisfiable([c2, Not(c1)], sig)


def truth_table(f: Formula, signature: Sequence[str]) -> set[frozenset]:
    """Brute-force model set of ``f`` over ``signature`` (test oracle)."""
    sig = list(signature)
    out = set()
    for bits in product((False, True), repeat=len(sig)):
        true_atoms = frozenset(a for a, b in zip(sig, bits) if b)
        if evaluate(f, true_atoms):
            out.add(true_atoms)
    return out


def model_conjunction(m: Model) -> Formula:
    """The conjunction of literals describing ``m`` over its signature."""
    return conj(*(Atom(a) if a in m.true_atoms else Not(Atom(a)) for a in m.signature))


def models_to_formula(models: Iterable[Model]) -> Formula:
    """Disjunction of model-describing conjunctions, in a stable order."""
    ordered = sorted(models, key=lambda m: sorted(m.true_atoms))
    return disj(*(model_conjunction(m) for m in ordered))


def equivalent(a: KnowledgeBase, b: KnowledgeBase) -> bool:
    """Same model set over the union of both signatures."""
    sig = _merge_signature(a.signature, b.signature)
    ca, cb = a.conjunction(), b.conjunction()
    return not satisfiable([Not(Iff(ca, cb))], sig)
