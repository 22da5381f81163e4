"""CNF instances over 1-3 literal clauses: random 2+p-SAT generation,
clause classification against partial states, and DIMACS interchange.

Variables are 0-indexed.  A partial state marks every variable as
undetermined (U), true (T) or false (F); clause classification and the
clause-vector count (C1, C2, C3) of undetermined clauses by length are the
reference semantics that the solver's incremental bookkeeping must match.
"""

import io
import random
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

U, T, F = 0, 1, 2
_MARK_CHARS = {U: "u", T: "t", F: "f"}

SATISFIED = "satisfied"
VIOLATED = "violated"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Literal:
    variable_index: int
    negated: bool = False

    def encode(self) -> int:
        """Pack as 2*variable + negated; even codes are positive literals."""
        return 2 * self.variable_index + (1 if self.negated else 0)

    def opposite(self) -> "Literal":
        return Literal(self.variable_index, not self.negated)

    def __str__(self):
        return ("~x%d" if self.negated else "x%d") % self.variable_index


Clause = Tuple[Literal, ...]


class ClauseVector(NamedTuple):
    c1: int
    c2: int
    c3: int


class ClauseStatus(NamedTuple):
    status: str  # SATISFIED, VIOLATED or UNDETERMINED
    n_undetermined: int  # number of u-marked variables; 0 unless undetermined


def clause(*lits) -> Clause:
    """Build a clause from (var, negated) pairs, Literals, or DIMACS-style ints."""
    out = []
    for lit in lits:
        if isinstance(lit, Literal):
            out.append(lit)
        elif isinstance(lit, int):
            if lit == 0:
                raise ValueError("0 is not a DIMACS literal")
            out.append(Literal(abs(lit) - 1, lit < 0))
        else:
            var, neg = lit
            out.append(Literal(var, bool(neg)))
    if not 1 <= len(out) <= 3:
        raise ValueError("clause length must be 1..3")
    return tuple(out)


class Instance:
    """An immutable CNF formula over n_vars Boolean variables.

    Clauses have 1-3 literals.  Generated instances never repeat a variable
    within a clause, but hand-built ones may (e.g. a tautological pair).
    """

    def __init__(self, n_vars: int, clauses: Iterable[Clause]):
        self.n_vars = int(n_vars)
        self.clauses: Tuple[Clause, ...] = tuple(tuple(c) for c in clauses)
        for c in self.clauses:
            if not 1 <= len(c) <= 3:
                raise ValueError("clause length must be 1..3")
            for lit in c:
                if not 0 <= lit.variable_index < self.n_vars:
                    raise ValueError(
                        f"literal {lit} out of range for n_vars={self.n_vars}")
        self._encoded: Optional[List[List[int]]] = None

    def encoded_clauses(self) -> List[List[int]]:
        """Clauses as lists of packed literal codes (cached)."""
        if self._encoded is None:
            self._encoded = [[lit.encode() for lit in c] for c in self.clauses]
        return self._encoded

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def __repr__(self):
        return f"Instance(n_vars={self.n_vars}, n_clauses={self.n_clauses})"


class PartialState:
    """Per-variable marks in {U, T, F} with a cached count of U marks."""

    def __init__(self, marks: Sequence[int]):
        self.marks = list(marks)
        for m in self.marks:
            if m not in (U, T, F):
                raise ValueError(f"bad mark {m!r}")
        self.n_undetermined = sum(1 for m in self.marks if m == U)

    @classmethod
    def all_undetermined(cls, n_vars: int) -> "PartialState":
        return cls([U] * n_vars)

    @classmethod
    def from_string(cls, s: str) -> "PartialState":
        """Parse e.g. 'tuf' -> marks (T, U, F)."""
        rev = {v: k for k, v in _MARK_CHARS.items()}
        return cls([rev[ch] for ch in s])

    def set_mark(self, var: int, mark: int) -> None:
        old = self.marks[var]
        if old == U and mark != U:
            self.n_undetermined -= 1
        elif old != U and mark == U:
            self.n_undetermined += 1
        self.marks[var] = mark

    def copy(self) -> "PartialState":
        return PartialState(self.marks)

    def __str__(self):
        return "".join(_MARK_CHARS[m] for m in self.marks)


def clause_status(cl: Clause, state: PartialState) -> ClauseStatus:
    """Classify one clause: satisfied if some literal is true, violated if
    all are false, otherwise undetermined with its count of u-marked variables."""
    n_u = 0
    for lit in cl:
        m = state.marks[lit.variable_index]
        if m == U:
            n_u += 1
        elif (m == T) != lit.negated:
            return ClauseStatus(SATISFIED, 0)
    if n_u == 0:
        return ClauseStatus(VIOLATED, 0)
    return ClauseStatus(UNDETERMINED, n_u)


def clause_vector(instance: Instance, state: PartialState) -> ClauseVector:
    """Count undetermined clauses by type; the reference for the solver's
    incremental counters."""
    counts = [0, 0, 0, 0]
    for cl in instance.clauses:
        st = clause_status(cl, state)
        if st.status == UNDETERMINED:
            counts[st.n_undetermined] += 1
    return ClauseVector(counts[1], counts[2], counts[3])


def violates(instance: Instance, state: PartialState) -> bool:
    return any(clause_status(c, state).status == VIOLATED for c in instance.clauses)


def satisfies(instance: Instance, state: PartialState) -> bool:
    return all(clause_status(c, state).status == SATISFIED for c in instance.clauses)


def generate_random_instance(n_vars: int, n_2clauses: int, n_3clauses: int,
                             seed: int) -> Instance:
    """Random 2+p-SAT instance: each k-clause picks k distinct variables
    uniformly, each literal negated with probability 1/2.  Clauses are drawn
    independently (repeats across the instance are allowed)."""
    if n_3clauses > 0 and n_vars < 3:
        raise ValueError("need n_vars >= 3 to draw 3-clauses")
    if n_2clauses > 0 and n_vars < 2:
        raise ValueError("need n_vars >= 2 to draw 2-clauses")
    if n_2clauses < 0 or n_3clauses < 0 or n_vars < 1:
        raise ValueError("sizes must be non-negative (n_vars >= 1)")
    rng = random.Random(seed)
    randrange = rng.randrange
    clauses = []
    for k, count in ((2, n_2clauses), (3, n_3clauses)):
        for _ in range(count):
            v1 = randrange(n_vars)
            v2 = randrange(n_vars)
            while v2 == v1:
                v2 = randrange(n_vars)
            if k == 2:
                chosen = (v1, v2)
            else:
                v3 = randrange(n_vars)
                while v3 == v1 or v3 == v2:
                    v3 = randrange(n_vars)
                chosen = (v1, v2, v3)
            clauses.append(tuple(Literal(v, bool(randrange(2))) for v in chosen))
    return Instance(n_vars, clauses)


def brute_force_satisfiable(instance: Instance, max_vars: int = 24) -> bool:
    """Exhaustive SAT check over all 2^N assignments (bitmask sweep)."""
    n = instance.n_vars
    if n > max_vars:
        raise ValueError(f"brute force capped at {max_vars} variables")
    pos = []
    neg = []
    for c in instance.clauses:
        pm = nm = 0
        for lit in c:
            if lit.negated:
                nm |= 1 << lit.variable_index
            else:
                pm |= 1 << lit.variable_index
        pos.append(pm)
        neg.append(nm)
    full = (1 << n) - 1
    for a in range(1 << n):
        na = a ^ full
        ok = True
        for pm, nm in zip(pos, neg):
            if not (pm & a) and not (nm & na):
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------- DIMACS

def write_dimacs(instance: Instance, path_or_file) -> None:
    """Standard DIMACS CNF: 'p cnf N M' header, zero-terminated clause lines."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        fh.write(f"p cnf {instance.n_vars} {instance.n_clauses}\n")
        for c in instance.clauses:
            lits = " ".join(
                str(-(lit.variable_index + 1) if lit.negated else lit.variable_index + 1)
                for lit in c)
            fh.write(lits + " 0\n")
    finally:
        if own:
            fh.close()


def read_dimacs(path_or_file) -> Instance:
    """Parse DIMACS CNF; clauses longer than 3 literals are rejected."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file) if own else path_or_file
    try:
        n_vars = None
        clauses = []
        pending: List[int] = []
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith(("c", "%")):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) < 4 or parts[1] != "cnf":
                    raise ValueError(f"bad DIMACS header: {line!r}")
                n_vars = int(parts[2])
                continue
            for tok in line.split():
                v = int(tok)
                if v == 0:
                    if pending:
                        clauses.append(clause(*pending))
                        pending = []
                else:
                    pending.append(v)
        if pending:
            clauses.append(clause(*pending))
        if n_vars is None:
            n_vars = max((lit.variable_index for c in clauses for lit in c),
                         default=-1) + 1
        return Instance(n_vars, clauses)
    finally:
        if own:
            fh.close()


def dimacs_string(instance: Instance) -> str:
    buf = io.StringIO()
    write_dimacs(instance, buf)
    return buf.getvalue()
