"""Brute-force reference for the finite-blocklength Schumacher fidelity.

Builds the code projector, the failure state and every output state as
dense numpy arrays. Usage: schumacher_oracle.py [Q n [n ...]]; with no arguments writes the
fixture JSON to stdout.
"""
import itertools
import sys

import numpy as np

STATES = [np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2.0)]
PROBS = [0.5, 0.5]


def fidelity(n, q):
    rho = sum(p * np.outer(s, s) for p, s in zip(PROBS, STATES))
    lam, vec = np.linalg.eigh(rho)
    order = np.argsort(-lam)
    lam, vec = lam[order], vec[:, order]
    rank = int(min(np.floor(2 ** (n * q) + 1e-9), 2**n))
    idx = list(itertools.product(range(2), repeat=n))
    weight = {k: np.prod([lam[d] for d in sorted(k)]) for k in idx}
    chosen = sorted(idx, key=lambda k: (-weight[k], k))[:rank]

    def prod_vec(k):
        v = np.array([1.0])
        for d in k:
            v = np.kron(v, vec[:, d])
        return v

    basis = np.array([prod_vec(k) for k in chosen]).T
    proj = basis @ basis.T
    fail = prod_vec(chosen[0])
    total = 0.0
    for xs in itertools.product(range(len(STATES)), repeat=n):
        psi = np.array([1.0])
        for x in xs:
            psi = np.kron(psi, STATES[x])
        kept = proj @ psi
        xi = np.outer(kept, kept) + (1 - kept @ kept) * np.outer(fail, fail)
        total += np.prod([PROBS[x] for x in xs]) * np.sqrt(psi @ xi @ psi)
    return total


def s_a():
    rho = sum(p * np.outer(s, s) for p, s in zip(PROBS, STATES))
    w = np.linalg.eigvalsh(rho)
    return float(-(w * np.log2(w)).sum())


if __name__ == "__main__":
    if len(sys.argv) > 1:
        q = float(sys.argv[1])
        for n in map(int, sys.argv[2:]):
            print(n, f"{fidelity(n, q):.6f}")
    else:
        import json

        rows = []
        for offset in [0.1, -0.15]:
            q = s_a() + offset
            for n in [1, 2, 3, 4, 5, 6, 8]:
                rows.append({"offset": offset, "q": q, "n": n, "fidelity": fidelity(n, q)})
        json.dump({"s_a": s_a(), "rows": rows}, sys.stdout, indent=2)
        sys.stdout.write("\n")
