"""Reference values for the three-state two-qubit example.

Uses numpy eigvalsh on the explicit 2x2 and 4x4 reduced states only, so it
shares no code with the Rust crates. Writes JSON to stdout.
"""
import json
import sys

import numpy as np

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float)


def entropy(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-(w * np.log2(w)).sum())


def profile(pairs, probs):
    kets = [np.kron(a, c) for a, c in pairs]
    rho_ac = sum(p * np.outer(k, k) for p, k in zip(probs, kets))
    t = rho_ac.reshape(2, 2, 2, 2)
    rho_a = np.einsum("icjc->ij", t)
    rho_c = np.einsum("aiaj->ij", t)
    s_a, s_c, s_ac = entropy(rho_a), entropy(rho_c), entropy(rho_ac)
    return {
        "s_a": s_a,
        "s_c": s_c,
        "s_ac": s_ac,
        "q_opt": 0.5 * (s_a + s_ac - s_c),
        "e_protocol": 0.5 * (s_a + s_c - s_ac),
    }


def after_cnot(pairs):
    out = []
    for a, c in pairs:
        v = CNOT @ np.kron(a, c)
        m = v.reshape(2, 2)
        u, s, vh = np.linalg.svd(m)
        assert s[1] < 1e-12, "image is entangled"
        out.append((u[:, 0] * s[0], vh[0]))
    return out


def main():
    rows = []
    pairs = [(KET0, KET0), (KET1, KET0), (PLUS, PLUS)]
    for t in [0.05, 0.01, 0.005, 0.001]:
        probs = [0.5 - t, 0.5 - t, 2 * t]
        rows.append({"t": t, "plain": profile(pairs, probs), "cnot": profile(after_cnot(pairs), probs)})
    plus0 = np.outer(KET0, KET0) / 2 + np.outer(PLUS, PLUS) / 2
    json.dump(
        {"discussion": rows, "zero_plus_s_a": entropy(plus0)},
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
