#!/usr/bin/env python3
"""
plotting.py - SVG charts of a record series against its fitted bounds
"""

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from bounds import check_gradient_growth, check_mixing_bmo, check_mixing_sup, sup_exponent, time_integral  # noqa: E402
from diagnostics import DiagnosticRecord  # noqa: E402
from errors import RecordError  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed hash salt and no date metadata keep the SVG bytes reproducible.
plt.rcParams["svg.hashsalt"] = "mixbound"


def plot_records(records: Sequence[DiagnosticRecord], out_svg: Path) -> Path:
    """
    Left: log |theta|^2_{H^-1} with the fitted BMO and sup-norm lower bounds.
    Right: |grad theta|_{L2} with its fitted exponential upper bound.
    A single record is drawn as points without bound lines.
    """
    if not records:
        raise RecordError("no records to plot")
    out_svg = Path(out_svg)
    t = np.array([r.t for r in records])
    log_h = 2.0 * np.log(np.array([r.hm1_theta for r in records]))
    grad = np.array([r.grad_l2_theta for r in records])

    fig, (ax_mix, ax_grad) = plt.subplots(1, 2, figsize=(11, 4.5))
    marker = "o" if len(records) == 1 else None
    ax_mix.plot(t, log_h, color="black", marker=marker, label=r"$\log\|\theta\|^2_{H^{-1}}$")
    ax_grad.plot(t, grad, color="black", marker=marker, label=r"$\|\nabla\theta\|_{L^2}$")

    if len(records) >= 2:
        bmo = check_mixing_bmo(records)
        sup = check_mixing_sup(records)
        ax_mix.plot(t, log_h[0] - bmo.lambda_fit * time_integral(records, "bmo_omega"), "--",
                    color="tab:blue", label=rf"BMO bound, $\lambda$={bmo.lambda_fit:.3g}")
        ax_mix.plot(t, log_h[0] - sup.lambda_fit * sup_exponent(records), ":",
                    color="tab:red", label=rf"sup bound, $\lambda$={sup.lambda_fit:.3g}")
        growth = check_gradient_growth(records, "theta")
        ax_grad.plot(t, grad[0] * np.exp(0.5 * growth.lambda_fit * sup_exponent(records)), "--",
                     color="tab:red", label=rf"upper bound, $\lambda$={growth.lambda_fit:.3g}")

    ax_mix.set_xlabel("t")
    ax_mix.set_title("mix-norm decay")
    ax_grad.set_xlabel("t")
    ax_grad.set_yscale("log")
    ax_grad.set_title("scalar gradient growth")
    for ax in (ax_mix, ax_grad):
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_svg, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("wrote %s", out_svg)
    return out_svg
