"""Denoise a 1D sawtooth signal with the three models.

Builds the 'saw' test signal, adds Gaussian noise, then reconstructs it
with classical TV (ROF), Huber-TV and the adaptive double-phase model.
The staircase steps that TV creates on the gentle ramps are visible in
the middle panel; the double-phase weight suppresses them away from the
jumps while the jumps themselves stay sharp.

Writes demos/output/saw_reconstructions.png and prints the metrics.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import dptv

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

lam = 0.24
sigma = 0.05
original = dptv.make_synthetic("saw", 1024)
noisy = dptv.add_gaussian_noise(original, dptv.NoiseSpec(sigma, seed=42))

# weight cutoff: zero weight wherever the TV pre-solve shows a gradient
# of 0.1 or more, full plateau weight a/2 = 250 in smooth regions
spec = dptv.WeightSpec(family="w1", a=500.0, b=5000.0, radius=0.0)

results = {}
for model in ("rof", "huber", "dp-adaptive"):
    cfg = dptv.default_config(lam, epsilon=1e-6, max_iters=200_000)
    res = dptv.run_model(
        model, noisy, lam, cfg,
        alpha=0.01 if model == "huber" else None,
        weight_spec=spec if model.startswith("dp") else None,
    )
    res.report.metrics = dptv.compute_metrics(res.u, original, noisy=noisy)
    results[model] = res
    met = res.report.metrics
    print(f"{model:12s} iters={res.report.iterations:5d} "
          f"d_tv={met.d_tv:.4f} d_l2={met.d_l2:.4f} psnr={met.psnr:.2f}")

fig, axes = plt.subplots(1, 4, figsize=(16, 3.2), sharey=True)
x = np.arange(original.shape[0])
panels = [
    ("noisy input", noisy),
    ("classical TV", results["rof"].u),
    ("Huber-TV", results["huber"].u),
    ("adaptive double-phase", results["dp-adaptive"].u),
]
for ax, (title, signal) in zip(axes, panels):
    ax.plot(x, original.ravel(), lw=0.8, color="0.6", label="original")
    ax.plot(x, signal.ravel(), lw=0.9, color="C0")
    ax.set_title(title)
    ax.set_ylim(-0.05, 1.05)
axes[0].legend(loc="upper right", fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "saw_reconstructions.png", dpi=130)
print(f"wrote {OUT / 'saw_reconstructions.png'}")
