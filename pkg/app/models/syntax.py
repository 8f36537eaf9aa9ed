"""
Terms, formulas, theories and formula sequences.

ASTs are immutable. Every node caches its free variables and depths when it is
built, so structural utilities never re-walk a subtree to answer those.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple, Union

from app.core.kernel import (
    ABSDIFF,
    DOTMINUS,
    DOTPLUS,
    HALF_CONNECTIVE,
    MAX,
    MIN,
    NEG,
    Connective,
    RationalLike,
    const,
    format_rational,
    is_rational_literal,
    lipschitz_constant,
    parse_rational,
)
from app.models.vocabulary import Vocabulary
from app.utils.error_handling import StructuralError, VocabularyMismatchError

QUANTIFIER_KINDS = ("sup", "inf")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """Base class for terms."""

    def __post_init__(self):
        object.__setattr__(self, "_vars", self._collect_vars())
        object.__setattr__(self, "_depth", self._nesting())

    def _collect_vars(self) -> FrozenSet[str]:
        return frozenset()

    def _nesting(self) -> int:
        return 0

    @property
    def variables(self) -> FrozenSet[str]:
        return self._vars

    @property
    def depth(self) -> int:
        return self._depth


@dataclass(frozen=True)
class Var(Term):
    name: str

    def _collect_vars(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Elem(Term):
    """An element of some structure's universe used as a parameter."""
    label: str


@dataclass(frozen=True)
class Apply(Term):
    function: str
    args: Tuple[Term, ...]

    def _collect_vars(self):
        return frozenset().union(*(a.variables for a in self.args))

    def _nesting(self):
        return 1 + max(a.depth for a in self.args)


TermLike = Union[Term, str]


def as_term(value: TermLike) -> Term:
    """Strings become variables; terms pass through."""
    if isinstance(value, Term):
        return value
    return Var(value)


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    """Base class for formulas."""

    def __post_init__(self):
        free = self._collect_free()
        object.__setattr__(self, "_free", free)
        object.__setattr__(self, "_free_sorted", tuple(sorted(free)))
        object.__setattr__(self, "_depth", self._nesting())

    def _collect_free(self) -> FrozenSet[str]:
        raise NotImplementedError("Subclasses must implement this method")

    def _nesting(self) -> int:
        raise NotImplementedError("Subclasses must implement this method")

    @property
    def free_vars(self) -> FrozenSet[str]:
        return self._free

    @property
    def depth(self) -> int:
        """Nesting of connectives and quantifiers; atoms and constants have depth 0."""
        return self._depth

    @property
    def is_sentence(self) -> bool:
        return not self._free


@dataclass(frozen=True)
class Atom(Formula):
    predicate: str
    args: Tuple[Term, ...]

    def _collect_free(self):
        return frozenset().union(*(a.variables for a in self.args))

    def _nesting(self):
        return 0


@dataclass(frozen=True)
class Conn(Formula):
    connective: Connective
    args: Tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) != self.connective.arity:
            raise StructuralError(
                f"connective {self.connective} expects {self.connective.arity} argument(s), "
                f"got {len(self.args)}",
                details={"connective": str(self.connective)},
            )
        super().__post_init__()

    def _collect_free(self):
        return frozenset().union(*(a.free_vars for a in self.args))

    def _nesting(self):
        if not self.args:
            return 0
        return 1 + max(a.depth for a in self.args)


@dataclass(frozen=True)
class Quant(Formula):
    kind: str
    var: str
    body: Formula

    def __post_init__(self):
        if self.kind not in QUANTIFIER_KINDS:
            raise StructuralError(f"unknown quantifier {self.kind!r}")
        super().__post_init__()

    def _collect_free(self):
        return self.body.free_vars - {self.var}

    def _nesting(self):
        return 1 + self.body.depth


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def atom(predicate: str, *args: TermLike) -> Atom:
    return Atom(predicate, tuple(as_term(a) for a in args))


def apply(function: str, *args: TermLike) -> Apply:
    return Apply(function, tuple(as_term(a) for a in args))


def constant(value: RationalLike) -> Conn:
    return Conn(const(value), ())


def neg(f: Formula) -> Conn:
    return Conn(NEG, (f,))


def half(f: Formula) -> Conn:
    return Conn(HALF_CONNECTIVE, (f,))


def dotminus(a: Formula, b: Formula) -> Conn:
    return Conn(DOTMINUS, (a, b))


def dotplus(a: Formula, b: Formula) -> Conn:
    return Conn(DOTPLUS, (a, b))


def absdiff(a: Formula, b: Formula) -> Conn:
    return Conn(ABSDIFF, (a, b))


def fmin(*args: Formula) -> Formula:
    """Left-nested binary min; a single argument is returned unchanged."""
    return _fold(MIN, args)


def fmax(*args: Formula) -> Formula:
    """Left-nested binary max; a single argument is returned unchanged."""
    return _fold(MAX, args)


def _fold(conn: Connective, args: Tuple[Formula, ...]) -> Formula:
    if not args:
        raise StructuralError(f"{conn} needs at least one argument")
    result = args[0]
    for arg in args[1:]:
        result = Conn(conn, (result, arg))
    return result


def sup(var: str, body: Formula) -> Quant:
    return Quant("sup", var, body)


def inf(var: str, body: Formula) -> Quant:
    return Quant("inf", var, body)


def sup_all(variables: Iterable[str], body: Formula) -> Formula:
    """sup over each variable, the first variable outermost."""
    for v in reversed(tuple(variables)):
        body = sup(v, body)
    return body


def scaled(f: Formula, factor: int) -> Formula:
    """
    min(factor * f, 1) built from the basis by capped doubling and dotplus.

    Shared subformulas are reused, so the object graph stays logarithmic in factor.
    """
    if factor < 1:
        raise StructuralError(f"scaling factor must be a positive integer, got {factor}")
    result: Optional[Formula] = None
    power = f
    while factor:
        if factor & 1:
            result = power if result is None else dotplus(result, power)
        factor >>= 1
        if factor:
            power = dotplus(power, power)
    return result


def halved(f: Formula, times: int) -> Formula:
    """2^-times * f."""
    for _ in range(times):
        f = half(f)
    return f


# ---------------------------------------------------------------------------
# Structural utilities
# ---------------------------------------------------------------------------

def free_vars(f: Formula) -> FrozenSet[str]:
    return f.free_vars


def subterms(f: Formula) -> Iterator[Formula]:
    """Every subformula, preorder."""
    yield f
    if isinstance(f, Conn):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, Quant):
        yield from subterms(f.body)


def _term_nodes(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Apply):
        for a in t.args:
            yield from _term_nodes(a)


def atoms_of(f: Formula) -> Iterator[Atom]:
    for g in subterms(f):
        if isinstance(g, Atom):
            yield g


def term_depth(f: Formula) -> int:
    """Deepest function nesting in any term of the formula."""
    return max((t.depth for a in atoms_of(f) for t in a.args), default=0)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Quant):
        return 1 + quantifier_depth(f.body)
    if isinstance(f, Conn):
        return max((quantifier_depth(a) for a in f.args), default=0)
    return 0


def element_literals(f: Formula) -> FrozenSet[str]:
    return frozenset(
        t.label
        for a in atoms_of(f)
        for arg in a.args
        for t in _term_nodes(arg)
        if isinstance(t, Elem)
    )


def check_vocabulary(f: Formula, vocab: Vocabulary) -> None:
    """Raise if the formula uses a symbol the vocabulary lacks or misuses an arity."""
    predicate_arities = vocab.predicate_arities
    function_arities = vocab.function_arities
    for a in atoms_of(f):
        arity = predicate_arities.get(a.predicate)
        if arity is None:
            raise VocabularyMismatchError(f"unknown predicate {a.predicate!r}")
        if arity != len(a.args):
            raise StructuralError(
                f"predicate {a.predicate} has arity {arity}, applied to {len(a.args)} argument(s)"
            )
        for arg in a.args:
            for t in _term_nodes(arg):
                if isinstance(t, Apply):
                    f_arity = function_arities.get(t.function)
                    if f_arity is None:
                        raise VocabularyMismatchError(f"unknown function {t.function!r}")
                    if f_arity != len(t.args):
                        raise StructuralError(
                            f"function {t.function} has arity {f_arity}, applied to {len(t.args)} argument(s)"
                        )
                elif isinstance(t, Const) and not vocab.has_constant(t.name):
                    raise VocabularyMismatchError(f"unknown constant {t.name!r}")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


def substitute_term(t: Term, binding: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, Apply):
        if not any(v in binding for v in t.variables):
            return t
        return Apply(t.function, tuple(substitute_term(a, binding) for a in t.args))
    return t


def substitute(f: Formula, binding: Mapping[str, TermLike]) -> Formula:
    """
    Simultaneous capture-avoiding substitution of terms for free variables.

    Bindings for variables that are not free in `f` are ignored.
    """
    active = {v: as_term(t) for v, t in binding.items() if v in f.free_vars}
    if not active:
        return f
    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(substitute_term(a, active) for a in f.args))
    if isinstance(f, Conn):
        return Conn(f.connective, tuple(substitute(a, active) for a in f.args))
    if isinstance(f, Quant):
        incoming = frozenset().union(*(t.variables for t in active.values()))
        var, body = f.var, f.body
        if var in incoming:
            new_var = fresh_name(var, incoming | body.free_vars | set(active))
            body = substitute(body, {var: Var(new_var)})
            var = new_var
        return Quant(f.kind, var, substitute(body, active))
    raise StructuralError(f"not a formula: {f!r}")


def _rename_term(t: Term, renaming: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        new = renaming.get(t.name)
        return Var(new) if new is not None else t
    if isinstance(t, Apply):
        return Apply(t.function, tuple(_rename_term(a, renaming) for a in t.args))
    return t


def alpha_normalize(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """
    Rename bound variables to v0, v1, ... in preorder.

    Names already free in `f` or listed in `reserved` are skipped, so two formulas
    are alpha-equivalent exactly when their normal forms are equal.
    """
    avoid = set(f.free_vars) | set(reserved)
    counter = itertools.count()

    def next_name() -> str:
        while True:
            name = f"v{next(counter)}"
            if name not in avoid:
                return name

    def walk(g: Formula, renaming: Dict[str, str]) -> Formula:
        if isinstance(g, Atom):
            if not renaming:
                return g
            return Atom(g.predicate, tuple(_rename_term(a, renaming) for a in g.args))
        if isinstance(g, Conn):
            return Conn(g.connective, tuple(walk(a, renaming) for a in g.args))
        new = next_name()
        return Quant(g.kind, new, walk(g.body, {**renaming, g.var: new}))

    return walk(f, {})


def transform_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    """Rebuild `f` with every atom replaced by fn(atom)."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Conn):
        return Conn(f.connective, tuple(transform_atoms(a, fn) for a in f.args))
    return Quant(f.kind, f.var, transform_atoms(f.body, fn))


def formula_lipschitz_bound(f: Formula) -> Fraction:
    """
    Lipschitz bound of f in its atomic values, composed from the connectives.

    A change of at most e in every atomic value moves f by at most bound * e.
    """
    if isinstance(f, Atom):
        return Fraction(1)
    if isinstance(f, Quant):
        return formula_lipschitz_bound(f.body)
    if not f.args:
        return Fraction(0)
    return lipschitz_constant(f.connective) * max(formula_lipschitz_bound(a) for a in f.args)


# ---------------------------------------------------------------------------
# Theories and sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Theory:
    sentences: Tuple[Formula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for s in self.sentences:
            if not s.is_sentence:
                raise StructuralError(
                    f"theory member has free variables {sorted(s.free_vars)}",
                    details={"free_vars": sorted(s.free_vars)},
                )

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


@dataclass(frozen=True)
class Schedule:
    """Rate function m -> coefficient * 2^-(m + shift)."""
    name: str
    coefficient: Fraction = Fraction(1)
    shift: int = 0

    def bound(self, m: int) -> Fraction:
        return Fraction(self.coefficient) / (2 ** (m + self.shift))


EXPONENTIAL_SCHEDULE = Schedule("exponential")
LEMMA_SCHEDULE = Schedule("lemma", Fraction(1), 1)
STABILITY_SCHEDULE = Schedule("stability", Fraction(3), 0)

SCHEDULES = {s.name: s for s in (EXPONENTIAL_SCHEDULE, LEMMA_SCHEDULE, STABILITY_SCHEDULE)}


def schedule_by_name(name: str) -> Schedule:
    try:
        return SCHEDULES[name]
    except KeyError:
        raise StructuralError(
            f"unknown schedule {name!r}; expected one of {sorted(SCHEDULES)}"
        ) from None


def schedule_from_text(text: str) -> Schedule:
    """
    A preset name, or a rational first step s_0 with s_m = s_0 * 2^-m.

    The custom schedule is named by its first step, so "(schedule 1/4)" reads back.
    """
    text = text.strip()
    if not is_rational_literal(text):
        return schedule_by_name(text)
    try:
        first = parse_rational(text)
    except ValueError as e:
        raise StructuralError(str(e)) from None
    if first <= 0:
        raise StructuralError(f"a schedule's first step must be positive, got {text}")
    return Schedule(format_rational(first), first, 0)


@dataclass(frozen=True)
class FormulaSequence:
    """Formulas sharing a free-variable frame, with a claimed convergence rate."""
    entries: Tuple[Formula, ...]
    frame: Tuple[str, ...] = ("x", "y")
    schedule: Schedule = EXPONENTIAL_SCHEDULE

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "frame", tuple(self.frame))
        allowed = set(self.frame)
        for index, entry in enumerate(self.entries):
            extra = entry.free_vars - allowed
            if extra:
                raise StructuralError(
                    f"sequence entry {index} has variables {sorted(extra)} outside the frame {list(self.frame)}"
                )

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, index: int) -> Formula:
        return self.entries[index]
