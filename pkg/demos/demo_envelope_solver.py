"""Envelope dynamics: mass conservation, self-convergence, norm growth.

Run:  python demos/demo_envelope_solver.py
"""
import math

import numpy as np

from modlab import (Field2D, NLSParams, NLSState, fit_loglog_order, gaussian,
                    growth_functional, make_grid, mass, norm_hs, norm_l2,
                    run_nls)

slow = make_grid(64, 64, 16 * math.pi, 16 * math.pi, k=2.0).scaled(0.1)
params = NLSParams(slow_grid=slow, p=1.0, q=3, s=1.0, k=2.0, dT=2e-3)
print(f"mixed-signature envelope equation: c_x={params.c_x:+.4f}, "
      f"c_y={params.c_y:+.4f}, C_w={params.c_nl:.4f}")

A0 = gaussian(slow, sigma=0.8, chirp=0.3)
traj = run_nls(NLSState(A0, 0.0), params, 1.0)
m0 = norm_l2(A0)
drift = max(abs(mass(traj.state(i)) - m0)
            for i in range(0, traj.n_steps + 1, 50)) / m0
print(f"mass drift over T=1: {drift:.2e}")

# Strang self-convergence against a fine reference.
T = 0.2
ref = run_nls(NLSState(A0, 0.0),
              NLSParams(slow_grid=slow, p=1.0, q=3, s=1.0, k=2.0, dT=T / 512), T)
pts = []
for n in (16, 32, 64):
    tr = run_nls(NLSState(A0, 0.0),
                 NLSParams(slow_grid=slow, p=1.0, q=3, s=1.0, k=2.0, dT=T / n), T)
    err = norm_l2(Field2D(slow, np.asarray(tr.state(n).A.values)
                          - np.asarray(ref.state(512).A.values), "spectral"))
    pts.append((T / n, err))
    print(f"  dT={T / n:.4f}: error vs reference {err:.3e}")
print(f"self-convergence slope: {fit_loglog_order(pts).slope:.3f} (want 2)")

# The growth functional that the penalty construction monitors.
for i in (0, traj.n_steps // 2, traj.n_steps):
    st = traj.state(i)
    print(f"  T={st.T:.2f}: |A|_Hs={norm_hs(st.A, 1.0):.6f}, "
          f"growth functional={growth_functional(st, params):.6f}")
