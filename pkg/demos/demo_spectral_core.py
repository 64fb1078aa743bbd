"""Tour of the spectral core: grids, transforms, multipliers, packet identities.

Run:  python demos/demo_spectral_core.py
"""
import math

import numpy as np

from modlab import (Field2D, apply_multiplier, bessel_power, gaussian,
                    make_grid, mode_filter, modulate, norm_hs, norm_hseps,
                    norm_l2, rescaled_bessel, to_physical, to_spectral)

# A 256^2 torus of side 64*pi carrying the carrier k = 2 at lattice index 64.
grid = make_grid(256, 256, 64 * math.pi, 64 * math.pi, k=2.0)
print(f"grid: {grid.nx}^2 on (64*pi)^2, carrier k={grid.k} at index "
      f"{grid.carrier_index}")

# Round trip and Plancherel.
rng = np.random.default_rng(1)
f = Field2D(grid, rng.standard_normal((256, 256))
            + 1j * rng.standard_normal((256, 256)), "physical")
back = to_physical(to_spectral(f))
print(f"transform round trip error: "
      f"{np.max(np.abs(back.values - f.values)):.3e}")
print(f"Plancherel defect: {abs(norm_l2(to_spectral(f)) - norm_l2(f)):.3e}")

# A wave packet: slow Gaussian envelope times the carrier.
eps = 0.1
slow = grid.scaled(eps)
A = gaussian(slow, sigma=1.0)
packet = modulate(A, grid, grid.k)

# The rescaled Bessel weight sees exactly the envelope's Sobolev norm
# (up to the fast/slow quadrature factor eps^-1).
s = 1.0
lhs = norm_hseps(packet, s, eps, grid.k)
rhs = norm_hs(A, s) / eps
print(f"packet identity: HsEps(packet) = {lhs:.10f}, Hs(A)/eps = {rhs:.10f}")

# The sharp mode filter keeps the packet (its spectrum is concentrated in
# the ball of radius k/2 around (k, 0)) and is idempotent bit-exactly.
filt = mode_filter(grid.k)
once = apply_multiplier(packet, filt)
twice = apply_multiplier(once, filt)
print(f"filter keeps packet: "
      f"{norm_l2(once) / norm_l2(packet):.12f} of the mass")
print(f"filter idempotent bit-exact: "
      f"{np.array_equal(np.asarray(once.values), np.asarray(twice.values))}")

# Carrier-rescaled multiplier vs slow-side multiplier: the commutation
# identity that every norm and diagnostic in the package leans on.
lhs_f = apply_multiplier(packet, rescaled_bessel(s, eps, grid.k))
rhs_f = to_spectral(modulate(apply_multiplier(A, bessel_power(s)), grid, grid.k))
rel = norm_l2(Field2D(grid, np.asarray(lhs_f.values) - np.asarray(rhs_f.values),
                      "spectral")) / norm_l2(lhs_f)
print(f"packet commutation identity relative error: {rel:.3e}")
