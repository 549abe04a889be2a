"""Standard versus accelerated primal-dual iterations.

Runs both solver variants on the same 2D instance with per-iteration
diagnostics enabled and compares how the primal energy approaches the
optimum. The accelerated step schedule reaches the stopping tolerance in
a fraction of the iterations.

Writes demos/output/convergence.png and the raw diagnostics CSVs.
"""

import io
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import dptv
from dptv import FidelityParams, SolverConfig, TV, solve

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

lam = 0.12
original = dptv.make_synthetic("double_gradient", 128)
noisy = dptv.add_gaussian_noise(original, dptv.NoiseSpec(0.1, seed=3))
fid = FidelityParams(lam, noisy)

runs = {}
for name, cfg in (
    ("standard", SolverConfig(accelerated=False, stop_tol=1e-6, max_iters=20_000)),
    ("accelerated", SolverConfig(accelerated=True, gamma=1.0 / lam,
                                 stop_tol=1e-6, max_iters=20_000)),
):
    buf = io.StringIO()
    res = solve(fid, TV(), cfg, diagnostics=buf)
    (OUT / f"diagnostics_{name}.csv").write_text(buf.getvalue())
    rows = np.genfromtxt(io.StringIO(buf.getvalue()), delimiter=",", names=True)
    runs[name] = (res, rows)
    print(f"{name:12s} iterations={res.iterations:5d} converged={res.converged}")

e_min = min(runs[n][1]["energy"].min() for n in runs)
fig, ax = plt.subplots(figsize=(5.5, 4))
for name, (res, rows) in runs.items():
    gap = rows["energy"] - e_min + 1e-14
    ax.loglog(rows["iter"], gap, label=f"{name} ({res.iterations} iterations)")
ax.set_xlabel("iteration")
ax.set_ylabel("primal energy above best observed")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "convergence.png", dpi=130)
print(f"wrote {OUT / 'convergence.png'}")
