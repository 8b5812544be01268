"""Propositional language over a finite vocabulary.

Formulas are immutable ASTs; models are complete truth assignments encoded
as integers (bit k of the id is the truth value of atom k, in vocabulary
order). All semantic operations work by exhaustive enumeration of the
2^n model space, which the vocabulary bound keeps tractable and exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import (
    FormulaSyntaxError,
    UnknownAtomError,
    VocabularyMismatchError,
    VocabularyTooLargeError,
)

_ATOM_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")

DEFAULT_MAX_ATOMS = 20


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of distinct atom names."""

    atoms: tuple[str, ...]
    max_atoms: int = field(default=DEFAULT_MAX_ATOMS, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom names must be unique")
        for name in self.atoms:
            if not _ATOM_RE.fullmatch(name):
                raise ValueError(f"invalid atom name {name!r}")
        if len(self.atoms) > self.max_atoms:
            raise VocabularyTooLargeError(
                f"{len(self.atoms)} atoms exceeds the bound of {self.max_atoms}"
            )

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, name: str) -> bool:
        return name in self.atoms

    def index(self, name: str) -> int:
        try:
            return self.atoms.index(name)
        except ValueError:
            raise UnknownAtomError(name) from None

    @property
    def model_count(self) -> int:
        return 1 << len(self.atoms)

    def models(self) -> Iterator["Model"]:
        for i in range(self.model_count):
            yield Model(self, i)


@dataclass(frozen=True, order=True)
class Model:
    """One possible world: a complete truth assignment over the vocabulary."""

    vocab: Vocabulary = field(compare=False)
    id: int

    def __post_init__(self):
        if not 0 <= self.id < self.vocab.model_count:
            raise ValueError(f"model id {self.id} out of range")

    def truth(self, atom: str) -> bool:
        return bool((self.id >> self.vocab.index(atom)) & 1)

    def assignment(self) -> dict[str, bool]:
        return {a: self.truth(a) for a in self.vocab.atoms}

    def __str__(self) -> str:
        return " ".join(
            f"{a}={'T' if self.truth(a) else 'F'}" for a in self.vocab.atoms
        )

    @classmethod
    def from_assignment(cls, vocab: Vocabulary, values: dict[str, bool]) -> "Model":
        mid = 0
        for k, atom in enumerate(vocab.atoms):
            if values[atom]:
                mid |= 1 << k
        return cls(vocab, mid)


# --- formulas ---------------------------------------------------------------


class Formula:
    """Base class for formula AST nodes. Nodes are frozen and hashable."""

    precedence: int = 0

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    precedence = 6


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula
    precedence = 5


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula
    precedence = 4


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula
    precedence = 3


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    precedence = 2


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula
    precedence = 1


_BINARY_SYMBOL = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
# -> and <-> are right-associative; & and | associate to the left.
_RIGHT_ASSOC = (Implies, Iff)


def print_formula(f: Formula) -> str:
    """Render a formula in the concrete syntax with minimal parentheses."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = print_formula(f.operand)
        if f.operand.precedence < f.precedence:
            inner = f"({inner})"
        return f"!{inner}"
    sym = _BINARY_SYMBOL[type(f)]
    left, right = print_formula(f.left), print_formula(f.right)
    if isinstance(f, _RIGHT_ASSOC):
        if f.left.precedence <= f.precedence:
            left = f"({left})"
        if f.right.precedence < f.precedence:
            right = f"({right})"
    else:
        if f.left.precedence < f.precedence:
            left = f"({left})"
        if f.right.precedence <= f.precedence:
            right = f"({right})"
    return f"{left} {sym} {right}"


def atoms_of(f: Formula) -> frozenset[str]:
    """All atom names occurring in the formula."""
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return atoms_of(f.operand)
    return atoms_of(f.left) | atoms_of(f.right)  # type: ignore[union-attr]


# --- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<atom>[a-zA-Z][a-zA-Z0-9_]*)|(?P<op><->|->|[!~&|()]))"
)


class _Parser:
    """Recursive-descent parser for the concrete syntax.

    Grammar (loosest to tightest): <-> , -> , | , & , !/~ , atom, parens.
    """

    def __init__(self, text: str, vocab: Vocabulary):
        self.text = text
        self.vocab = vocab
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                at = len(text) - len(stripped)
                raise FormulaSyntaxError(f"unexpected character {stripped[0]!r}", at)
            tok = m.group("atom") or m.group("op")
            self.tokens.append((tok, m.start("atom") if m.group("atom") else m.start("op")))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return len(self.text)

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", 0)
        f = self.iff()
        if self.i < len(self.tokens):
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.pos())
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in ("!", "~"):
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self.pos())
        if tok == "(":
            self.take()
            f = self.iff()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.pos())
            self.take()
            return f
        name, at = self.take()
        if not _ATOM_RE.fullmatch(name):
            raise FormulaSyntaxError(f"unexpected token {name!r}", at)
        if name not in self.vocab:
            raise UnknownAtomError(name, at)
        return Atom(name)


def parse_formula(text: str, vocab: Vocabulary) -> Formula:
    """Parse concrete syntax into an AST, validating atoms against the vocabulary."""
    return _Parser(text, vocab).parse()


# --- semantics --------------------------------------------------------------


def evaluate(m: Model, f: Formula) -> bool:
    """Truth value of a formula in one model (standard semantics)."""
    if isinstance(f, Atom):
        if f.name not in m.vocab:
            raise VocabularyMismatchError(f"atom {f.name!r} not in model vocabulary")
        return m.truth(f.name)
    if isinstance(f, Not):
        return not evaluate(m, f.operand)
    if isinstance(f, And):
        return evaluate(m, f.left) and evaluate(m, f.right)
    if isinstance(f, Or):
        return evaluate(m, f.left) or evaluate(m, f.right)
    if isinstance(f, Implies):
        return (not evaluate(m, f.left)) or evaluate(m, f.right)
    if isinstance(f, Iff):
        return evaluate(m, f.left) == evaluate(m, f.right)
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=16384)
def satisfying_mask(f: Formula, vocab: Vocabulary) -> np.ndarray:
    """Boolean array over all model ids: entry i is the truth of f in model i.

    The workhorse behind models_of / entails / consistent and the belief
    updates; vectorized over the whole model space at once.
    """
    n = len(vocab)
    if isinstance(f, Atom):
        if f.name not in vocab:
            raise VocabularyMismatchError(f"atom {f.name!r} not in vocabulary")
        ids = np.arange(vocab.model_count, dtype=np.int64)
        out = ((ids >> vocab.index(f.name)) & 1).astype(bool)
    elif isinstance(f, Not):
        out = ~satisfying_mask(f.operand, vocab)
    elif isinstance(f, And):
        out = satisfying_mask(f.left, vocab) & satisfying_mask(f.right, vocab)
    elif isinstance(f, Or):
        out = satisfying_mask(f.left, vocab) | satisfying_mask(f.right, vocab)
    elif isinstance(f, Implies):
        out = ~satisfying_mask(f.left, vocab) | satisfying_mask(f.right, vocab)
    elif isinstance(f, Iff):
        out = satisfying_mask(f.left, vocab) == satisfying_mask(f.right, vocab)
    else:
        raise TypeError(f"not a formula: {f!r}")
    out = np.asarray(out, dtype=bool)
    out.setflags(write=False)
    return out


def conjunction_mask(formulas, vocab: Vocabulary) -> np.ndarray:
    """Mask of models satisfying every formula; all-true for the empty set."""
    mask = np.ones(vocab.model_count, dtype=bool)
    for f in formulas:
        mask = mask & satisfying_mask(f, vocab)
    mask.setflags(write=False)
    return mask


def models_of(f: Formula, vocab: Vocabulary) -> frozenset[Model]:
    """Exactly the models in which f holds."""
    mask = satisfying_mask(f, vocab)
    return frozenset(Model(vocab, int(i)) for i in np.nonzero(mask)[0])


def entails(premises, claim: Formula, vocab: Vocabulary) -> bool:
    """Classical entailment: every model of the premises is a model of the claim."""
    pm = conjunction_mask(premises, vocab)
    cm = satisfying_mask(claim, vocab)
    return bool(not np.any(pm & ~cm))


def consistent(formulas, vocab: Vocabulary) -> bool:
    """True when the formulas are jointly satisfiable; the empty set is consistent."""
    return bool(np.any(conjunction_mask(formulas, vocab)))
