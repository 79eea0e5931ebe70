#!/usr/bin/env python3
"""Regenerates the Daubechies scaling-filter tables in src/wavelets.cpp.

Spectral factorization at 80-digit precision: build the halfband polynomial
P(y) = sum_{k<N} C(N-1+k, k) y^k, take the roots of its z-form inside the
unit circle (extremal phase), and renormalize so sum h = sqrt(2). The
printed tables carry 20 significant digits, well past double precision.
"""

from mpmath import binomial, fabs, mp, mpc, mpf, nstr, polyroots, sqrt

mp.dps = 80


def pmul(a, b):
    out = {}
    for i, ai in a.items():
        for j, bj in b.items():
            out[i + j] = out.get(i + j, mpf(0)) + ai * bj
    return out


def padd(a, b):
    out = dict(a)
    for j, bj in b.items():
        out[j] = out.get(j, mpf(0)) + bj
    return out


def daubechies(N):
    """Length-2N extremal-phase scaling filter with N vanishing moments."""
    # y z = (2z - z^2 - 1)/4, so y^k z^k is a degree-2k polynomial in z and
    # z^(N-1) P(y) collects to a single polynomial of degree 2(N-1).
    yz = {0: mpf(-1) / 4, 1: mpf(2) / 4, 2: mpf(-1) / 4}
    acc = {}
    for k in range(N):
        c = mpf(binomial(N - 1 + k, k))
        term = {0: mpf(1)}
        for _ in range(k):
            term = pmul(term, yz)
        term = {d + (N - 1 - k): v * c for d, v in term.items()}
        acc = padd(acc, term)
    deg = max(acc)
    coeffs = [acc.get(d, mpf(0)) for d in range(deg, -1, -1)]
    roots = polyroots(coeffs, maxsteps=400, extraprec=400) if N > 1 else []
    roots = [r for r in roots if abs(r) < 1]

    # m0(z) = sqrt(2) ((1+z)/2)^N prod_r (z - r)/(1 - r)
    poly = {0: sqrt(mpf(2))}
    for _ in range(N):
        poly = pmul(poly, {0: mpf(1) / 2, 1: mpf(1) / 2})
    for r in roots:
        poly = pmul(poly, {0: -r, 1: mpc(1)})
        poly = {d: v / (1 - r) for d, v in poly.items()}
    h = [poly.get(d, mpf(0)) for d in range(max(poly) + 1)]
    h = [x.real if isinstance(x, mpc) else x for x in h]
    # The z-polynomial ordering is the time reversal of the filter taps;
    # flip so h[0] multiplies the current sample (largest tap first).
    return h[::-1]


def check(h, N):
    assert fabs(sum(h) - sqrt(mpf(2))) < mpf(10) ** -60, "sum h != sqrt(2)"
    assert fabs(sum(x * x for x in h) - 1) < mpf(10) ** -60, "sum h^2 != 1"
    for k in range(1, N):
        dot = sum(h[t] * h[t + 2 * k] for t in range(len(h) - 2 * k))
        assert fabs(dot) < mpf(10) ** -60, f"shift-{k} orthogonality broken"
    # Vanishing moments of the mirror g[t] = (-1)^t h[L-1-t].
    L = len(h)
    g = [(-1) ** t * h[L - 1 - t] for t in range(L)]
    for q in range(N):
        mom = sum(g[t] * mpf(t) ** q for t in range(L))
        assert fabs(mom) < mpf(10) ** -55, f"moment {q} of the mirror nonzero"


def emit(h, N):
    body = ", ".join(nstr(x, 20) for x in h)
    print(f"const std::vector<double> kDb{N} = {{{body}}};")
    print()


if __name__ == "__main__":
    for N in (2, 4, 6, 8):
        h = daubechies(N)
        check(h, N)
        emit(h, N)
