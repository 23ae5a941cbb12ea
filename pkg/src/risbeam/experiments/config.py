"""Experiment configuration: flat key=value files over the baseline scenario."""

from dataclasses import dataclass, field, fields

import numpy as np

from ..config import db_to_linear, dbm_to_watts

SWEEP_AXES = ("power", "elements", "kappa", "users")

# baseline scenario values (surface 4x4, 5 users in a 50 m disk, half-wave
# spacing, P_t = 1 mW, sigma^2 = -50 dBm, alpha = 3, beta = -20 dB, Rician
# factor 3 dB, epsilon = 1e-3)
_DEFAULTS = dict(
    scenario="default",
    n_x=4,
    n_z=4,
    users=5,
    p_t_dbm=0.0,
    noise_dbm=-50.0,
    alpha=3.0,
    beta_db=-20.0,
    kappa_db=3.0,
    epsilon=1e-3,
    max_iters=300,
    disk_radius=50.0,
    surface_height=15.0,
    multiplier_mode="dual-ascent",
    multiplier_solve="exact",
    p_t_mw=0.0,   # optional linear override of p_t_dbm; 0 means unset
    seeds=(0, 1, 2, 3, 4, 5, 6, 7, 8, 9),
    sweep_axis="power",
    sweep_values=(0.5, 1.0, 2.0, 4.0),
    out_dir="results",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scenario: str = _DEFAULTS["scenario"]
    n_x: int = _DEFAULTS["n_x"]
    n_z: int = _DEFAULTS["n_z"]
    users: int = _DEFAULTS["users"]
    p_t_dbm: float = _DEFAULTS["p_t_dbm"]          # per-element cap, dBm
    noise_dbm: float = _DEFAULTS["noise_dbm"]
    alpha: float = _DEFAULTS["alpha"]
    beta_db: float = _DEFAULTS["beta_db"]
    kappa_db: float = _DEFAULTS["kappa_db"]
    epsilon: float = _DEFAULTS["epsilon"]
    max_iters: int = _DEFAULTS["max_iters"]
    disk_radius: float = _DEFAULTS["disk_radius"]
    surface_height: float = _DEFAULTS["surface_height"]
    multiplier_mode: str = _DEFAULTS["multiplier_mode"]
    multiplier_solve: str = _DEFAULTS["multiplier_solve"]
    p_t_mw: float = _DEFAULTS["p_t_mw"]
    seeds: tuple = _DEFAULTS["seeds"]
    sweep_axis: str = _DEFAULTS["sweep_axis"]
    sweep_values: tuple = _DEFAULTS["sweep_values"]
    out_dir: str = _DEFAULTS["out_dir"]

    def __post_init__(self):
        if len(self.seeds) == 0:
            raise ConfigError("seeds: list must be non-empty")
        if self.n_x < 1 or self.n_z < 1:
            raise ConfigError("n_x/n_z: must be >= 1")
        if self.users < 1:
            raise ConfigError("users: must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon: must be > 0")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"sweep_axis: must be one of {SWEEP_AXES}")
        if len(self.sweep_values) == 0:
            raise ConfigError("sweep_values: must be non-empty")
        if any(v <= 0 for v in self.sweep_values):
            raise ConfigError("sweep_values: must be positive")
        if self.p_t_mw < 0:
            raise ConfigError("p_t_mw: power must be > 0")
        if self.p_t_watts <= 0:
            raise ConfigError("p_t_dbm: resulting power must be > 0")

    @property
    def p_t_watts(self) -> float:
        if self.p_t_mw > 0:
            return self.p_t_mw * 1e-3
        return float(dbm_to_watts(self.p_t_dbm))

    @property
    def noise_watts(self) -> float:
        return float(dbm_to_watts(self.noise_dbm))

    @property
    def kappa(self) -> float:
        return float(db_to_linear(self.kappa_db))

    @property
    def beta(self) -> float:
        return float(db_to_linear(self.beta_db))


def _parse_value(name, raw, default):
    raw = raw.strip()
    try:
        if isinstance(default, tuple):
            items = [p for p in raw.replace(",", " ").split() if p]
            kind = int if all(isinstance(d, int) for d in default) else float
            return tuple(kind(p) for p in items)
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Parse a flat key=value file; omitted keys take the baseline-scenario
    defaults, an empty file is the full baseline."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in _DEFAULTS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw, _DEFAULTS[key])
    return ExperimentConfig(**values)


def save_config(cfg: ExperimentConfig, path) -> None:
    lines = []
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = ",".join(repr(v) for v in val)
        lines.append(f"{f.name} = {val}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def system_config(cfg: ExperimentConfig, seed, n_x=None, n_z=None, users=None,
                  p_t=None, kappa=None):
    """Build the physical-layer configuration of one experiment cell.

    User positions are resampled per seed from a dedicated generator, so a
    fixed seed gives identical geometry across sweep values (paired trends);
    the user-position stream is prefix-stable in the user count.
    """
    from ..config import SystemConfig, place_users

    k = users if users is not None else cfg.users
    # stream [0, seed]: user geometry; [1, seed] is the channel stream
    rng = np.random.default_rng([0, seed])
    d, theta, phi = place_users(k, rng, radius=cfg.disk_radius,
                                height=cfg.surface_height)
    return SystemConfig(
        n_x=n_x if n_x is not None else cfg.n_x,
        n_z=n_z if n_z is not None else cfg.n_z,
        users=k,
        spacing=0.05,
        wavelength=0.1,
        p_max=p_t if p_t is not None else cfg.p_t_watts,
        noise_w=cfg.noise_watts,
        ref_gain=cfg.beta,
        pl_exp=cfg.alpha,
        rician_k=kappa if kappa is not None else cfg.kappa,
        distances=d,
        theta_aod=theta,
        phi_aod=phi,
    )
