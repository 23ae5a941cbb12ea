"""Solver state containers and options."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolverOptions:
    """Knobs of the consensus solver.

    ``rho`` is the consensus penalty. ``multiplier_solve`` picks how each
    sub-problem's Lagrange multiplier is handled per outer iteration:
    "exact" (default) drives it to its inner fixed point (row projection /
    scalar bisection / complementary slackness), "single" takes one projected
    subgradient step as printed in the source update rules. Exact mode:
    ``mu_rate`` caps the SINR multipliers at mu_rate * (N + K) (the stable
    consensus injection rate) and the per-user SINR demand is clamped to
    (1 + ``trust_gain``/r) times the projected beamformer's current SINR, an
    annealed headroom that drives hard early and tightens toward the
    achievable level. ``return_best`` returns the best projected iterate
    encountered instead of the last one (subgradient-style "best point
    found"). Single-step mode: steps decay as step0 / r^``step_decay``;
    ``multiplier_mode`` "dual-ascent" increases a violated constraint's
    multiplier ([x + step g]^+), "paper" applies the opposite sign
    ([x - step g]^+); ``scale_user_steps`` divides the per-user steps by the
    constraint scale (sigma^2 + N)/2; ``inner_steps`` > 1 repeats each
    (copy, multiplier) pair (reference backend only).

    ``backend`` selects the iteration kernel: "auto" prefers the compiled
    extension, "c"/"py" force it, "reference" runs the materialized
    update-by-update route.
    """

    rho: float = 1.0
    multiplier_solve: str = "exact"
    mu_rate: float = 0.1
    trust_gain: float = 8.0
    return_best: bool = True
    alpha0: float = 0.1   # per-element power multiplier step (single mode)
    beta0: float = 0.1    # SINR-constraint multiplier step (single mode)
    tau0: float = 0.1     # eta-constraint multiplier step (single mode)
    step_decay: float = 0.5
    epsilon: float = 1e-3
    max_iters: int = 300
    multiplier_mode: str = "dual-ascent"
    report_projection: bool = True
    scale_user_steps: bool = True
    inner_steps: int = 1
    backend: str = "auto"
    track_sinr: bool = True

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if not (self.alpha0 > 0 and self.beta0 > 0 and self.tau0 > 0):
            raise ValueError("step sizes must be > 0")
        if not self.mu_rate > 0:
            raise ValueError("mu_rate must be > 0")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.multiplier_solve not in ("exact", "single"):
            raise ValueError("multiplier_solve must be 'exact' or 'single'")
        if self.multiplier_mode not in ("dual-ascent", "paper"):
            raise ValueError("multiplier_mode must be 'dual-ascent' or 'paper'")
        if self.backend not in ("auto", "c", "py", "reference"):
            raise ValueError("backend must be one of auto/c/py/reference")
        if self.inner_steps < 1:
            raise ValueError("inner_steps must be >= 1")

    @property
    def sign(self) -> float:
        return 1.0 if self.multiplier_mode == "dual-ascent" else -1.0


@dataclass
class AdmmState:
    """Materialized consensus state: the shared beamformer F, its per-element
    copies Gamma[n] and per-user copies Psi[k], the scalar objective copies
    eta[k] of gamma, accumulated error terms (Xi, Lam, xi) and the
    sub-problem multipliers (lam, mu, theta). ``anchor`` holds the previous
    Psi iterates used by the convexified SINR step."""

    F: np.ndarray            # (N, K) complex
    gamma: float
    Gamma: np.ndarray        # (N, N, K) complex: Gamma[n] is one copy
    Psi: np.ndarray          # (K, N, K) complex
    eta: np.ndarray          # (K,)
    Xi: np.ndarray           # (N, N, K) complex
    Lam: np.ndarray          # (K, N, K) complex
    xi: np.ndarray           # (K,)
    lam: np.ndarray          # (N,) >= 0
    mu: np.ndarray           # (K,) >= 0
    theta: np.ndarray        # (K,) >= 0
    anchor: np.ndarray       # (K, N, K) complex
    r: int = 0

    def copy(self) -> "AdmmState":
        return AdmmState(
            F=self.F.copy(), gamma=self.gamma, Gamma=self.Gamma.copy(),
            Psi=self.Psi.copy(), eta=self.eta.copy(), Xi=self.Xi.copy(),
            Lam=self.Lam.copy(), xi=self.xi.copy(), lam=self.lam.copy(),
            mu=self.mu.copy(), theta=self.theta.copy(),
            anchor=self.anchor.copy(), r=self.r,
        )


@dataclass
class SolveTrace:
    """Per-iteration history of one solve."""

    gamma: list = field(default_factory=list)
    min_sinr: list = field(default_factory=list)
    res_gamma_rel: list = field(default_factory=list)   # max_n ||Gamma_n - F|| / ||F||
    res_psi_rel: list = field(default_factory=list)     # max_k ||Psi_k - F|| / ||F||
    res_eta_rel: list = field(default_factory=list)     # max_k |eta_k - gamma| / |gamma|
    wall_s: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.gamma)

    def max_residual(self, i=-1) -> float:
        return max(self.res_gamma_rel[i], self.res_psi_rel[i], self.res_eta_rel[i])
