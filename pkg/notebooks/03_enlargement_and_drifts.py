# %% [markdown]
# # Knowing the terminal maximum
#
# Once S_inf is known, the killed Brownian motion picks up a drift 1/B
# before its last maximum g and -1/(S_inf - B) after it.  Removing the
# drift should leave a Brownian motion.

# %%
import numpy as np

from doobsim.suites import CHECKPOINTS, SUITES, SuiteConfig, composite_batch

cfg = SuiteConfig(n_paths=20_000, seed=5)
rows, acc_pre, acc_post = composite_batch(cfg.n_paths, cfg.seed, cfg.step, cfg.workers)

# %%
for k, t in enumerate(CHECKPOINTS):
    bt = rows[:, 4 + 3 * k]
    qv = rows[:, 5 + 3 * k]
    tt = rows[:, 6 + 3 * k]
    print(f"t={t:4.1f}  E[B~ - 1]={bt.mean() - 1:+.4f} +- {bt.std() / np.sqrt(bt.size):.4f}"
          f"   E[qv]/E[t^T0]={qv.mean() / tt.mean():.4f}")

# %% [markdown]
# Binned drift before g against 1/x.

# %%
rep = SUITES["bessel3-pre-g-drift"].run(cfg).report
for b in rep.details["bins"]:
    print(f"x in [{b['lo']:.2f}, {b['hi']:.2f})  drift {b['mean']:7.3f}  1/x {b['drift']:7.3f}"
          f"  n={b['n']}")

# %%
for name in ("enlargement-stopped-bm", "post-g-bessel3", "dual-projection"):
    rep = SUITES[name].run(cfg).report
    print(f"{rep.status:5s} {name:24s} statistic={rep.statistic:.3f}")
