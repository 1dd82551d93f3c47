"""Identification from populations only (diagonal measurements).

When only diag(rho_t) is measurable, a single trajectory is not enough:
the network must be re-initialized in d^2 linearly independent states.
The vectorized generator L is then recovered from the output derivatives
at t = 0, provided the (selector, generator) pair is observable, and the
Hamiltonian follows from L up to an identity shift.

The demo also shows the structural catch: a zero-diagonal Hamiltonian
(a bare coupling matrix) is never observable through the diagonal
selector, because it is itself invisible to both the dynamics it
generates and the selector.  Diagonal node energies restore
observability, so the partial-information route applies to networks
with distinguishable node frequencies.
"""

import numpy as np

from qnetid import (
    diagonal_selector,
    estimate_derivative_stacks,
    exact_derivative_stacks,
    extract_hamiltonian,
    identity_initial_batch,
    liouvillian,
    observability_rank,
    physical_decomposition,
    physical_initial_batch,
    reconstruct_liouvillian,
    sample_output_stacks,
    spectral_norm,
)

d = 2
h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)  # coupled, detuned nodes
lv = liouvillian(h)
c = diagonal_selector(d)

rank, observable = observability_rank(c, lv)
print(f"pair rank {rank} of {d * d}: {'observable' if observable else 'not observable'}")

# exact-derivative oracle with the canonical (non-physical) basis states
lam0 = identity_initial_batch(d)
stacks = exact_derivative_stacks(lv, lam0, d * d)
l_hat = reconstruct_liouvillian(stacks, lam0)
h_hat = extract_hamiltonian(l_hat)
print(f"exact oracle:   generator error {spectral_norm(l_hat - lv):.2e}, "
      f"Hamiltonian error {spectral_norm(h_hat - h):.2e} (h is traceless here)")

# measured-data route: preparable states + finite differences
lam_phys, states = physical_initial_batch(d)
print(f"\npreparable initializations: {[label for _, label in states]}")
outputs = sample_output_stacks(h, lam_phys, n_half=8, step=1e-3)
est = estimate_derivative_stacks(outputs, d * d, 1e-3)
l_est = reconstruct_liouvillian(est, lam_phys)
print(f"finite differences: generator error {spectral_norm(l_est - lv):.2e} "
      "(order-4 differentiation is the accuracy bottleneck)")

# the basis element |1><2| is not a physical state; its preparable surrogate
terms = physical_decomposition(d, 1, 2)
print("\n|1><2| as a combination of preparable states:")
for rho, coeff in terms:
    print(f"  coefficient {coeff:+.2f} on state diag={np.diag(rho).real.round(2)}")

# and the structural obstruction for bare coupling matrices
sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
rank, observable = observability_rank(c, liouvillian(sx))
print(f"\nbare coupling matrix: rank {rank} of {d * d} -> "
      f"{'observable' if observable else 'not observable (structural)'}")
