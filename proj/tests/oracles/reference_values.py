#!/usr/bin/env python3
"""Independent reference values for the frozen constants in the C++ tests.

Everything here is computed by brute force: dense Kronecker-product
Hamiltonians, the full 4^d Liouvillian, and scipy's expm. Nothing is shared
with the C++ implementation. Run with `python3 reference_values.py`.
"""
import math
from functools import reduce

import numpy as np
from scipy.linalg import expm

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)


def hamiltonian(d, omega):
    h = np.zeros((2**d, 2**d))
    for j in range(d):
        # bit j (LSB = 0) is the rightmost Kronecker factor
        ops = [SX if k == j else I2 for k in reversed(range(d))]
        h += omega * reduce(np.kron, ops)
    return h


def weights(d, model):
    n = 2**d
    w = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            if model == "vertex":
                w[x, y] = 0.0 if x == y else 1.0
            else:
                w[x, y] = bin(x ^ y).count("1")
    return w


def liouvillian(d, omega, lam, model):
    h = hamiltonian(d, omega)
    n = 2**d
    eye = np.eye(n)
    # row-major vec: vec(A rho B) = (A kron B^T) vec(rho)
    comm = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    damp = -lam * np.diag(weights(d, model).reshape(-1))
    return comm + damp


def evolve_hitting(d, omega, lam, model, times):
    n = 2**d
    rho0 = np.zeros(n * n, dtype=complex)
    rho0[0] = 1.0
    L = liouvillian(d, omega, lam, model)
    b = (n - 1) * n + (n - 1)
    return np.array([(expm(L * t) @ rho0)[b].real for t in times])


def eq7(d, omega, lam, t):
    beta = math.sqrt(16 * omega**2 - lam**2)
    br = 1 - math.exp(-lam * t / 2) * (math.cos(beta * t / 2) + lam / beta * math.sin(beta * t / 2))
    return 2.0**-d * br**d


def perturbative_unfolded(d, omega, lam, t):
    total = 0.0 + 0.0j
    for n in range(0, 2 * d + 1):
        for p in range(max(0, n - d), n // 2 + 1):
            w = math.factorial(d) * 2.0 ** (n - 2 * p - 2 * d) * (-1) ** (d - n) / (
                math.factorial(p) * math.factorial(n - 2 * p) * math.factorial(d - n + p))
            rate = lam * (1 - 2.0 ** (n - d - 2 * p) * math.factorial(d - n + 2 * p)
                          / (math.factorial(p) * math.factorial(d - n + p)))
            total += w * np.exp(2j * omega * (d - n) * t) * math.exp(-rate * t)
    return total.real


def main():
    T = math.pi / 2
    print("H d=3 omega=0.5 row0:", hamiltonian(3, 0.5)[0])
    print("unitary d=2 t=pi/4 (expm):",
          abs(expm(-1j * hamiltonian(2, 1.0) * math.pi / 4)[3, 0]) ** 2)
    print("subspace d=1 lam=0.2 t=T eq7: %.12f" % eq7(1, 1.0, 0.2, T))
    print("subspace d=1 lam=0.2 t=T expm: %.12f" % evolve_hitting(1, 1.0, 0.2, "subspace", [T])[0])
    print("subspace d=10 T eq7: %.12f" % eq7(10, 1.0, 0.2, T))
    print("pert d=1 T: %.12f" % perturbative_unfolded(1, 1.0, 0.2, T))
    print("bound e^-lamT: %.12f" % math.exp(-0.2 * T))
    print("asymptote d=10: %.12f" % math.exp(-10 * 0.2 * T / 4))
    print("KT decay e^{-2 lam T/pi}: %.12f" % math.exp(-2 * 0.2 * T / math.pi))
    for d in range(1, 11):
        pv = perturbative_unfolded(d, 1.0, 0.2, T)
        print("fig3 d=%2d  Pv=%.10f  Ps=%.10f  Pv-bound=%.3e" % (d, pv, eq7(d, 1.0, 0.2, T), pv - math.exp(-0.2 * T)))
    times = np.linspace(0, 10, 201)
    for lam in (0.2, 0.02):
        for d in (1, 2, 3, 4):
            exact = evolve_hitting(d, 1.0, lam, "vertex", times)
            pert = np.array([perturbative_unfolded(d, 1.0, lam, t) for t in times])
            print("vertex lam=%.2f d=%d max|pert-exact| = %.3e" % (lam, d, np.max(np.abs(pert - exact))))
    # vertex-model entropy production peak, d=4
    d = 4
    n = 2**d
    L = liouvillian(d, 1.0, 0.2, "vertex")
    rho0 = np.zeros(n * n, dtype=complex)
    rho0[0] = 1.0
    grid = np.linspace(0, T, 51)
    ent = []
    for t in grid:
        r = (expm(L * t) @ rho0).reshape(n, n)
        ev = np.clip(np.linalg.eigvalsh((r + r.conj().T) / 2), 0, None)
        ev = ev[ev > 0]
        ent.append(float(-(ev * np.log2(ev)).sum()))
    ds = np.diff(ent) / np.diff(grid)
    k = int(np.argmax(ds))
    print("entropy d=4 argmax dS/dt interval [%.4f, %.4f], pi/4=%.4f" % (grid[k], grid[k + 1], math.pi / 4))


if __name__ == "__main__":
    main()
