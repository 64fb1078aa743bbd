"""Wave-packet construction and the residual of its equation.

Builds corrector sets of increasing depth on a shared envelope trajectory and
prints the residual of  z_tt + |D|^p z + C_w eps^2 z |z/eps|^(q-1)  per depth
and eps: each extra corrector buys one power of eps.

Run:  python demos/demo_packet_residual.py   (about a minute)
"""
import math

from modlab import SweepConfig
from modlab.harness import residual_order_study

cfg = SweepConfig(epsilons=(0.1, 0.05, 0.025), horizon_T=0.08, depth=3,
                  k=2.0, fast_nx=128, fast_lx=32 * math.pi, slow_nx=128,
                  nls_steps_min=80, profile_params=(("sigma", 1.0),))
res = residual_order_study(cfg, depths=(1, 2, 3),
                           sample_times_T=(0.0, 0.04, 0.08))
print(f"{'depth':>5} {'eps':>7} {'sup-t L2 residual':>20}")
for row in res["rows"]:
    print(f"{row['depth']:>5} {row['epsilon']:>7} {row['sup_res_l2']:>20.6e}")
print()
for depth, fit in res["fits"].items():
    print(f"depth {depth}: slope {fit.slope:.3f} (expected {depth + 2}), "
          f"r^2 = {fit.r_squared:.6f}")
