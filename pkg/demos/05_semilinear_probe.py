#!/usr/bin/env python3
"""Desk-scale pseudospectral probe of the power-nonlinear problem.

Small supercritical data should ride the linear decay (the nonlinearity is a
higher-order perturbation); subcritical powers with order-one positive data
feed the zero mode and run away. Runs are kept small so the script finishes
in well under a minute.
"""

import numpy as np

from hyperdecay import critical_exponent
from hyperdecay.presets import mgt_stack
from hyperdecay.semilinear import run_semilinear

print("=== planar box, third-order acoustic model ===")
print(f"critical power at n=2: p_bar = {critical_exponent(3, 0, 0, 2).p_bar}")

stack = mgt_stack(dim=2)
nl = run_semilinear(stack, p=5.0, sign=1.0, nu=0, T=25.0, dt0=0.25, box_halfwidth=45.0,
                    modes_per_axis=224, dim=2, amplitude=1e-3)
lin = run_semilinear(stack, p=5.0, sign=0.0, nu=0, T=25.0, dt0=0.25, box_halfwidth=45.0,
                     modes_per_axis=224, dim=2, amplitude=1e-3)
sup_nl = float(np.max(np.abs(nl.physical(0))))
sup_lin = float(np.max(np.abs(lin.physical(0))))
print(f"p = 5 (supercritical), amplitude 1e-3: sup norm at t=25 "
      f"nonlinear {sup_nl:.3e} vs linear {sup_lin:.3e} (ratio {sup_nl / sup_lin:.3f})")

growth = run_semilinear(stack, p=2.0, sign=1.0, nu=0, T=100.0, dt0=0.1, box_halfwidth=40.0,
                        modes_per_axis=128, dim=2, amplitude=1.0, initial_slot=0)
series = np.asarray(growth.l2_series)
print(f"p = 2 (subcritical), amplitude 1: norm grew x{series.max() / series[0]:.0f} "
      f"by t = {growth.times[-1]:.1f}; blow-up flag (heuristic): {growth.blowup_flag}")
