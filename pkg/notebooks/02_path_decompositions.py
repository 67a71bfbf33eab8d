# %% [markdown]
# # Additive and multiplicative pieces of one path
#
# For a positive martingale N with running maximum S we look at
# Z = N/S, M = 1 + int dN/S and A = log S, then rebuild (N, S) from Z.

# %%
import numpy as np

from doobsim import (
    TestFunction,
    TimeGrid,
    azema_yor,
    decompose,
    gen_brownian_stopped,
    reconstruct_multiplicative,
    record_times,
)

grid = TimeGrid.from_horizon(8.0, 1e-4)
n = gen_brownian_stopped(1.0, grid, 3)
d = decompose(n)
print(d.summary())

# %% [markdown]
# log S and the running maximum of M - 1 agree up to the grid overshoot.

# %%
gap = np.abs(d.A - (np.maximum.accumulate(d.M) - 1))
print("sup |log S - (max M - 1)|:", gap.max())

# %% [markdown]
# Azema-Yor martingale for f = 1{x > 2}: the two sides differ only on the
# step where S first passes 2.

# %%
x, rhs = azema_yor(TestFunction.indicator(2.0), n, d.S)
err = np.abs(np.asarray(x) - np.asarray(rhs))
print("sup gap:", err.max(), "at index", int(err.argmax()))
x, rhs = azema_yor(TestFunction.constant(1.0), n, d.S)
print("constant f gap:", np.abs(np.asarray(x) - np.asarray(rhs)).max())

# %% [markdown]
# Random times of the path and the roundtrip N -> Z -> (N, S).

# %%
rec = record_times(n)
print(rec)
n_rec, s_rec = reconstruct_multiplicative(d.Z)
print("roundtrip sup error:", np.max(np.abs(np.asarray(n_rec) - n.values)))
