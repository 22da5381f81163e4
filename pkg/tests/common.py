"""Shared test fixtures: the three toy instances and a small unsat corpus."""

from satgrowth.cnf import (Instance, brute_force_satisfiable, clause,
                           generate_random_instance)

# single-variable contradiction: refuted by unit propagation alone
I1 = Instance(1, [clause(1), clause(-1)])

# all four sign patterns over two variables: unique refutation tree (one split)
I2 = Instance(2, [clause(1, 2), clause(-1, 2), clause(1, -2), clause(-1, -2)])

# I2 plus a tautological 2-clause on a third variable: two tree shapes
I3 = Instance(3, [clause(1, 2), clause(-1, 2), clause(1, -2), clause(-1, -2),
                  clause(3, -3)])


def unsat_corpus(count, n_vars=8, alphas=(4.0, 5.5, 7.0, 8.5, 10.0),
                 seed0=1000):
    """Random unsat 3-SAT instances at n_vars, ratios cycling over `alphas`."""
    out = []
    seed = seed0
    while len(out) < count:
        alpha = alphas[len(out) % len(alphas)]
        inst = generate_random_instance(n_vars, 0, int(round(alpha * n_vars)),
                                        seed)
        seed += 1
        if not brute_force_satisfiable(inst):
            out.append(inst)
    return out
