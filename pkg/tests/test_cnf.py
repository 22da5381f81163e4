import io
import random

import pytest

from common import I1, I2, I3
from satgrowth import cnf
from satgrowth.cnf import (SATISFIED, UNDETERMINED, VIOLATED, ClauseVector,
                           Instance, PartialState, brute_force_satisfiable,
                           clause, clause_status, clause_vector,
                           generate_random_instance, read_dimacs,
                           dimacs_string)


def test_clause_status_examples():
    st = PartialState.from_string("tu")
    assert clause_status(clause(1, 2), st).status == SATISFIED
    st = PartialState.from_string("tt")
    assert clause_status(clause(-1, -2), st).status == VIOLATED
    st = PartialState.from_string("fuu")
    assert clause_status(clause(1, 2, 3), st) == (UNDETERMINED, 2)


def test_clause_status_total_and_disjoint():
    rng = random.Random(7)
    inst = generate_random_instance(6, 5, 15, 3)
    for _ in range(300):
        marks = [rng.randrange(3) for _ in range(6)]
        st = PartialState(marks)
        for cl in inst.clauses:
            res = clause_status(cl, st)
            assert res.status in (SATISFIED, VIOLATED, UNDETERMINED)
            if res.status == UNDETERMINED:
                assert 1 <= res.n_undetermined <= len(cl)
            else:
                assert res.n_undetermined == 0


def test_clause_vector_examples():
    assert clause_vector(I2, PartialState.from_string("uu")) == ClauseVector(0, 4, 0)
    # x1 = true satisfies two clauses and reduces the other two to units
    assert clause_vector(I2, PartialState.from_string("tu")) == ClauseVector(2, 0, 0)
    assert clause_vector(I2, PartialState.from_string("tf")) == ClauseVector(0, 0, 0)


def test_clause_vector_permutation_invariant():
    inst = generate_random_instance(8, 6, 20, 11)
    rng = random.Random(5)
    shuffled = list(inst.clauses)
    rng.shuffle(shuffled)
    inst2 = Instance(8, shuffled)
    for seed in range(20):
        marks = [random.Random(seed).randrange(3) for _ in range(8)]
        st = PartialState(marks)
        assert clause_vector(inst, st) == clause_vector(inst2, st)


def test_fresh_three_sat_vector():
    inst = generate_random_instance(30, 0, 90, 2)
    assert clause_vector(inst, PartialState.all_undetermined(30)) == \
        ClauseVector(0, 0, 90)


def test_generator_counts_and_structure():
    inst = generate_random_instance(100, 0, 430, 7)
    assert inst.n_vars == 100 and inst.n_clauses == 430
    assert all(len(c) == 3 for c in inst.clauses)
    for c in inst.clauses:
        vs = [lit.variable_index for lit in c]
        assert len(set(vs)) == len(vs)
    inst2 = generate_random_instance(2, 4, 0, 1)
    assert inst2.n_clauses == 4 and all(len(c) == 2 for c in inst2.clauses)


def test_generator_reproducible():
    a = generate_random_instance(50, 10, 100, 123)
    b = generate_random_instance(50, 10, 100, 123)
    assert a.clauses == b.clauses
    c = generate_random_instance(50, 10, 100, 124)
    assert a.clauses != c.clauses


def test_generator_sign_balance():
    # Monte Carlo check: negation frequency 0.5 +- 0.01 over ~1e5 literals
    inst = generate_random_instance(60, 0, 33334, 99)
    lits = [lit for c in inst.clauses for lit in c]
    frac = sum(lit.negated for lit in lits) / len(lits)
    assert abs(frac - 0.5) < 0.01


def test_generator_argument_errors():
    with pytest.raises(ValueError):
        generate_random_instance(2, 0, 5, 0)
    with pytest.raises(ValueError):
        generate_random_instance(1, 3, 0, 0)
    with pytest.raises(ValueError):
        generate_random_instance(5, -1, 0, 0)


def test_partial_state_counts():
    st = PartialState.from_string("utfu")
    assert st.n_undetermined == 2
    st.set_mark(0, cnf.T)
    assert st.n_undetermined == 1
    st.set_mark(1, cnf.U)
    assert st.n_undetermined == 2
    assert str(st) == "tufu"


def test_brute_force_known_instances():
    assert not brute_force_satisfiable(I1)
    assert not brute_force_satisfiable(I2)
    assert not brute_force_satisfiable(I3)
    sat = Instance(2, [clause(1, 2), clause(-1, 2)])
    assert brute_force_satisfiable(sat)


def test_dimacs_roundtrip():
    inst = generate_random_instance(12, 5, 30, 42)
    text = dimacs_string(inst)
    assert text.startswith("p cnf 12 35\n")
    back = read_dimacs(io.StringIO(text))
    assert back.n_vars == 12
    assert back.clauses == inst.clauses


def test_dimacs_rejects_long_clauses():
    with pytest.raises(ValueError):
        read_dimacs(io.StringIO("p cnf 4 1\n1 2 3 4 0\n"))


def test_clause_builder_validation():
    with pytest.raises(ValueError):
        clause()
    with pytest.raises(ValueError):
        clause(0)
    with pytest.raises(ValueError):
        Instance(2, [clause(1, 2, 3)])
