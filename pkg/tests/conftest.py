import numpy as np


def random_hermitian(rng, d, norm=None):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (g + g.conj().T)
    if norm is not None:
        h = h * (norm / np.linalg.norm(h, 2))
    return h


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_admissible(rng, d, real=False):
    h = random_hermitian(rng, d)
    if real:
        h = h.real.astype(complex)
        h = 0.5 * (h + h.T)
    np.fill_diagonal(h, 0.0)
    return h
