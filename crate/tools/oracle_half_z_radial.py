"""High-precision oracle for f(z) = z/2 with radial nodes alpha_k = 1 - 1/(k+1).

Schur parameters come from the plain evaluation chain carried out in
60-digit arithmetic, which is far more than the ~4^k loss of the chain
needs for k <= 41. The measure has F = (1 + z f) / (1 - z f), so the
Szego function is S(z) = sqrt(3/4) / (1 - z^2/2); kappa_n = |phi_n*(alpha_n)|
comes from the transfer-matrix product.

Usage: python3 tools/oracle_half_z_radial.py > crates/core/fixtures/half_z_radial_oracle.json
"""

import json

import mpmath as mp

mp.mp.dps = 60
N = 41


def alpha(k):
    return mp.mpf(0) if k == 0 else 1 - mp.mpf(1) / (k + 1)


def zeta(a, z):
    return (z - a) / (1 - mp.conj(a) * z)


def gammas(n):
    out = []
    for k in range(n + 1):
        w = alpha(k + 1)
        v = w / 2
        for j in range(k):
            g = out[j]
            v = (v - g) / ((1 - mp.conj(g) * v) * zeta(alpha(j + 1), w))
        out.append(v)
    return out


def phistar(gs, n, z):
    m = mp.matrix([[1, 1], [1, -1]])
    omega = mp.mpf(1)
    for k in range(1, n + 1):
        g = gs[k - 1]
        zk = z if k == 1 else zeta(alpha(k - 1), z)
        step = mp.matrix([[zk, -mp.conj(g)], [-g * zk, 1]])
        m = step * m
        omega *= 1 - abs(g) ** 2
    a = alpha(n)
    pre = mp.sqrt(1 - abs(a) ** 2) / ((1 - mp.conj(a) * z) * mp.sqrt(omega))
    return pre * m[1, 0]


def main():
    gs = gammas(N)
    s_const = mp.sqrt(mp.mpf(3) / 4)
    quantity = []
    for n in range(N):
        a = alpha(n)
        kappa = abs(phistar(gs, n, a))
        s = s_const / (1 - a**2 / 2)
        quantity.append(kappa**2 * abs(s) ** 2 * (1 - abs(a) ** 2))
    print(
        json.dumps(
            {
                "digits": mp.mp.dps,
                "gammas": [[float(mp.re(g)), float(mp.im(g))] for g in gs],
                "szego_quantity": [float(q) for q in quantity],
            },
            indent=1,
        )
    )


if __name__ == "__main__":
    main()
