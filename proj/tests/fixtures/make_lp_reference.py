"""Reference LP optima for the engine tests, solved with every constraint written out (HiGHS).

Regenerate with:  python3 tests/fixtures/make_lp_reference.py > tests/fixtures/lp_reference.json
"""
import itertools
import json

import numpy as np
from scipy.optimize import linprog

MODES = [(ir, pay, ic) for ir in ("expost", "interim") for pay in ("free", "nonneg") for ic in ("bic", "dsic")]


def single_lp(values, pmf, mode):
    ir, pay, ic = mode
    T, S = pmf.shape
    cells = [(t, s) for t in range(T) for s in range(S) if pmf[t, s] > 0]
    idx = {c: k for k, c in enumerate(cells)}
    n = len(cells)
    X = lambda k: k
    P = lambda k: n + k
    A, b = [], []

    def util(row, t, r, s, sign):
        # sign * (values[t] x(r, s) - p(r, s)); zero outside the support
        if (r, s) in idx:
            k = idx[(r, s)]
            row[X(k)] += sign * values[t]
            row[P(k)] -= sign

    if ic == "bic":
        for t in range(T):
            if pmf[t].sum() <= 0:
                continue
            for r in range(T):
                if r == t:
                    continue
                row = np.zeros(2 * n)
                for s in range(S):
                    m = pmf[t, s]
                    if m > 0:
                        util(row, t, r, s, m)
                        util(row, t, t, s, -m)
                A.append(row)
                b.append(0.0)
    else:
        for (t, s) in cells:
            for r in range(T):
                if r == t:
                    continue
                row = np.zeros(2 * n)
                util(row, t, r, s, 1.0)
                util(row, t, t, s, -1.0)
                A.append(row)
                b.append(0.0)
    if ir == "expost":
        for (t, s) in cells:
            row = np.zeros(2 * n)
            util(row, t, t, s, -1.0)
            A.append(row)
            b.append(0.0)
    else:
        for t in range(T):
            if pmf[t].sum() <= 0:
                continue
            row = np.zeros(2 * n)
            for s in range(S):
                if pmf[t, s] > 0:
                    util(row, t, t, s, -pmf[t, s])
            A.append(row)
            b.append(0.0)
    c = np.zeros(2 * n)
    for (t, s), k in idx.items():
        c[P(k)] = -pmf[t, s]
    bounds = [(0, 1)] * n + [((0 if pay == "nonneg" else None), None)] * n
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return -res.fun


def multi_lp(grids, pmf, mode):
    ir, pay, ic = mode
    shape = tuple(len(g) for g in grids)
    nb = len(grids)
    profiles = [t for t in itertools.product(*[range(k) for k in shape]) if pmf[t] > 0]
    idx = {t: e for e, t in enumerate(profiles)}
    E = len(profiles)
    nv = 2 * E * nb
    X = lambda e, i: e * nb + i
    P = lambda e, i: E * nb + e * nb + i
    A, b = [], []

    def util(row, i, t, r, sign):
        q = list(t)
        q[i] = r
        q = tuple(q)
        if q in idx:
            e = idx[q]
            row[X(e, i)] += sign * grids[i][t[i]]
            row[P(e, i)] -= sign

    for i in range(nb):
        if ic == "bic":
            for ti in range(shape[i]):
                members = [t for t in profiles if t[i] == ti]
                if not members:
                    continue
                for r in range(shape[i]):
                    if r == ti:
                        continue
                    row = np.zeros(nv)
                    for t in members:
                        util(row, i, t, r, pmf[t])
                        util(row, i, t, ti, -pmf[t])
                    A.append(row)
                    b.append(0.0)
        else:
            for t in profiles:
                for r in range(shape[i]):
                    if r == t[i]:
                        continue
                    row = np.zeros(nv)
                    util(row, i, t, r, 1.0)
                    util(row, i, t, t[i], -1.0)
                    A.append(row)
                    b.append(0.0)
        for t in profiles:
            row = np.zeros(nv)
            util(row, i, t, t[i], -1.0)
            A.append(row)
            b.append(0.0)
    for t in profiles:
        row = np.zeros(nv)
        for i in range(nb):
            row[X(idx[t], i)] = 1.0
        A.append(row)
        b.append(1.0)
    c = np.zeros(nv)
    for t, e in idx.items():
        for i in range(nb):
            c[P(e, i)] = -pmf[t]
    bounds = [(0, 1)] * (E * nb) + [((0 if pay == "nonneg" else None), None)] * (E * nb)
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return -res.fun


def main():
    rng = np.random.default_rng(20240611)
    single = []
    shapes = [(2, 2, False), (3, 2, True), (4, 3, True), (5, 3, True), (6, 4, True), (7, 2, True)]
    for T, S, zeros in shapes:
        values = np.sort(rng.choice(np.arange(1, 13), size=T, replace=False)).astype(float)
        pmf = rng.exponential(size=(T, S))
        if zeros:
            pmf[rng.random((T, S)) < 0.25] = 0.0
            pmf[0, 0] = max(pmf[0, 0], 0.1)
        pmf /= pmf.sum()
        objs = {"/".join(m): single_lp(values, pmf, m) for m in MODES}
        single.append({"values": values.tolist(), "signals": [f"s{j}" for j in range(S)],
                       "pmf": pmf.ravel().tolist(), "objective": objs})
    multi = []
    for n1, n2 in [(2, 2), (3, 3), (4, 3)]:
        grids = [np.sort(rng.choice(np.arange(1, 9), size=k, replace=False)).astype(float) for k in (n1, n2)]
        pmf = rng.exponential(size=(n1, n2))
        pmf[rng.random((n1, n2)) < 0.2] = 0.0
        pmf[0, 0] = max(pmf[0, 0], 0.1)
        pmf /= pmf.sum()
        objs = {"/".join(m): multi_lp(grids, pmf, m) for m in MODES if m[0] == "expost"}
        multi.append({"grids": [g.tolist() for g in grids], "pmf": pmf.ravel().tolist(), "objective": objs})
    print(json.dumps({"single": single, "multi": multi}, indent=1))


if __name__ == "__main__":
    main()
