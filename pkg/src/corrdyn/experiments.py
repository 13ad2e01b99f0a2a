"""Scenario runners reproducing the trapped-ion result sets end to end.

Each runner simulates the engineered noise, generates finite-shot
tomography records with projection noise, reconstructs, and reports the
correlation quantifier next to its analytic reference:

* fig4: exact measure vs normalized waiting time for maximally correlated,
  asymmetric, and engineered-uncorrelated two-qubit dynamics.
* fig6: pairwise lower bounds between the outermost qubit and every other
  qubit of a four-qubit register (no distance dependence).
* fig7: four-body lower bounds for three encoding patterns, via full
  four-qubit state tomography.
* fig8: exact-measure surfaces over the two phase-noise widths.

Every runner returns a ScenarioResult carrying CSV-ready rows plus embedded
pass/fail checks used by the CLI exit code.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import lower_bound_from_counts, lower_bound_from_state
from .channels import PAULI
from .linalg import DensityMatrix, Observable
from .measure import PartyStructure, measure_ibar
from .noise import (
    DecayModel,
    PhaseNoiseModel,
    analytic_dephasing_channel,
    decay_channel,
    long_time_state,
    sample_decay_trajectories,
    sample_dephasing_trajectories,
    sampled_dephasing_channel,
    sigma_b_for_time,
)
from .records import MeasurementSetting, marginalize_record
from .rng import derive_seed
from .tomography import (
    input_state_vector,
    mle_process_tomography,
    mle_state_tomography,
    process_tomography_settings,
    simulate_record,
    simulate_record_from_table,
    state_tomography_settings,
)

# Encodings enter only through the susceptibility ratio g = -2.80 / +3.36.
ENCODING_SUSCEPT = {"A": 1.0, "B": -0.83}

FIG4_VARIANTS = ("sym", "asym", "uncorr")
FIG7_PATTERNS = ("AAAA", "AABB", "AAAB")
# long-time limits: <XXXX> reaches 3/8, 1/4, 0 for the three patterns
FIG7_REFERENCES = {
    "AAAA": (3.0 / 8.0) ** 2 / (16.0 * math.log(2.0)),
    "AABB": (1.0 / 4.0) ** 2 / (16.0 * math.log(2.0)),
    "AAAB": 0.0,
}
FIG6_REFERENCE = (1.0 / 2.0) ** 2 / (8.0 * math.log(2.0))

# Reconstruction accuracy inside the sampled pipelines; statistical noise at
# the default shot counts dominates far above these.
_MLE_TOL = 1e-5
_MLE_MAX_ITER = 500


@dataclass(frozen=True)
class ScenarioCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one scenario run.

    ``encoding_pattern`` assigns a susceptibility per qubit (e.g. "AABB");
    ``analysis`` picks the estimator: "full-ibar" runs process tomography and
    the exact measure (fig4), "lower-bound" the correlator route (fig6/7).
    """

    id: str
    n_qubits: int
    encoding_pattern: str
    time_grid: tuple[float, ...]
    shots: int = 100
    n_traj: int = 500
    band_reps: int = 100
    seed: int = 0
    analysis: str = "full-ibar"

    def __post_init__(self):
        grid = tuple(float(t) for t in self.time_grid)
        if any(t < 0 for t in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("time grid must be nonnegative and strictly increasing")
        if len(self.encoding_pattern) != self.n_qubits:
            raise ValueError(
                f"encoding pattern {self.encoding_pattern!r} does not cover {self.n_qubits} qubits"
            )
        suscept_for_pattern(self.encoding_pattern)
        if self.analysis not in ("full-ibar", "lower-bound"):
            raise ValueError(f"unknown analysis {self.analysis!r}")
        object.__setattr__(self, "time_grid", grid)


def run_scenario(config: ScenarioConfig) -> "ScenarioResult":
    """Route a declarative config to the matching pipeline."""
    common = dict(shots=config.shots, n_traj=config.n_traj, band_reps=config.band_reps, seed=config.seed)
    if config.analysis == "full-ibar":
        if config.n_qubits != 2:
            raise ValueError("the full-measure pipeline is a two-qubit scenario")
        variant = {"AA": "sym", "AB": "asym"}.get(config.encoding_pattern, "sym")
        if config.id == "uncorr":
            variant = "uncorr"
        return run_fig4(variant, time_grid=config.time_grid, **common)
    if config.n_qubits != 4 or len(config.time_grid) != 1:
        raise ValueError("the lower-bound pipeline expects 4 qubits at a single waiting time")
    t = config.time_grid[0]
    if config.id == "pairwise":
        return run_fig6(t_over_tau=t, **common)
    result = ScenarioResult(
        scenario=f"four-body-{config.encoding_pattern}",
        columns=(
            "config",
            "analytic_ref",
            "pipeline_value",
            "std_err",
            "band_lo",
            "band_hi",
            "joint_mean",
        ),
    )
    result.rows.append(
        four_body_bound_row(
            config.encoding_pattern,
            seed_key=0,
            t_over_tau=t,
            **common,
        )
    )
    return result


@dataclass
class ScenarioResult:
    scenario: str
    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    checks: list[ScenarioCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(self.columns))
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: row.get(k, "") for k in self.columns})


def suscept_for_pattern(pattern: str) -> tuple[float, ...]:
    try:
        return tuple(ENCODING_SUSCEPT[c] for c in pattern)
    except KeyError as err:
        raise ValueError(f"unknown encoding {err.args[0]!r} in pattern {pattern!r}") from None


def _plus_state(n: int) -> DensityMatrix:
    return DensityMatrix.from_vector(input_state_vector("+" * n), (2,) * n)


def _band_stats(values) -> dict:
    values = np.asarray(values, dtype=float)
    return {
        "pipeline_value": float(values.mean()),
        "std_err": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "band_lo": float(values.min()),
        "band_hi": float(values.max()),
    }


# ---------------------------------------------------------------------------
# fig4: exact measure vs normalized time, three two-qubit configurations.


def default_fig4_grid(variant: str) -> np.ndarray:
    # up to 5 coherence times for the dephasing settings, 1.6 lifetimes for
    # the engineered-decay setting
    t_max = 1.6 if variant == "uncorr" else 5.0
    return np.linspace(0.1, t_max, 12)


def run_fig4(
    variant: str,
    time_grid=None,
    shots: int = 100,
    n_traj: int = 500,
    band_reps: int = 100,
    seed: int = 0,
    include_pipeline: bool = True,
) -> ScenarioResult:
    """Simulate one Fig. 4 configuration over the normalized time grid.

    Per time point: the noise is sampled (random-phase trajectories, or
    quantum-jump decay for the uncorrelated variant), a 12^2-setting process
    tomography record is generated per repetition, reconstructed by MLE, and
    the exact measure of the reconstruction recorded. The analytic column
    holds the closed-form channel's measure.
    """
    if variant not in FIG4_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {FIG4_VARIANTS}")
    grid = default_fig4_grid(variant) if time_grid is None else np.asarray(time_grid, float)
    if np.any(np.diff(grid) <= 0) or np.any(grid < 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    parties = PartyStructure(2, 2)
    settings = process_tomography_settings(2)
    result = ScenarioResult(
        scenario=f"fig4-{variant}",
        columns=(
            "variant",
            "t_over_tau",
            "analytic_ref",
            "pipeline_value",
            "std_err",
            "band_lo",
            "band_hi",
        ),
    )
    for ti, t in enumerate(grid):
        if variant == "uncorr":
            model = DecayModel(t_spont=1.0, qubits=(0, 1))
            exact = decay_channel(model, float(t), 2)
            analytic = measure_ibar(exact, parties).ibar_raw
        else:
            suscept = (1.0, 1.0) if variant == "sym" else (1.0, ENCODING_SUSCEPT["B"])
            model = PhaseNoiseModel(sigma_b=sigma_b_for_time(float(t)), suscept=suscept)
            analytic = measure_ibar(analytic_dephasing_channel(model), parties).ibar_raw
        row = {"variant": variant, "t_over_tau": float(t), "analytic_ref": analytic}
        if include_pipeline:
            estimates = []
            if variant == "uncorr":
                labels = sorted({s.input_state for s in settings})
                table = {
                    label: sample_decay_trajectories(
                        model,
                        DensityMatrix.from_vector(input_state_vector(label), (2, 2)),
                        float(t),
                        n_traj,
                        derive_seed(seed, ti, li),
                    )
                    for li, label in enumerate(labels)
                }

                def make_record(rep):
                    return simulate_record_from_table(
                        table, settings, shots, derive_seed(seed, ti, 1000 + rep)
                    )

            else:
                channel = sampled_dephasing_channel(model, n_traj, derive_seed(seed, ti))

                def make_record(rep):
                    return simulate_record(
                        channel, settings, shots, derive_seed(seed, ti, 1000 + rep)
                    )

            for rep in range(band_reps):
                rec = make_record(rep)
                recon = mle_process_tomography(rec, 2, tol=_MLE_TOL, max_iter=_MLE_MAX_ITER)
                estimates.append(measure_ibar(recon, parties).ibar_raw)
            row.update(_band_stats(estimates))
        else:
            row.update(
                {"pipeline_value": math.nan, "std_err": math.nan, "band_lo": math.nan, "band_hi": math.nan}
            )
        result.rows.append(row)
    _fig4_checks(result, variant)
    return result


def _fig4_checks(result: ScenarioResult, variant: str) -> None:
    t = result.column("t_over_tau")
    ref = result.column("analytic_ref")
    if variant == "sym":
        late = ref[t >= 3.0]
        ok = late.size > 0 and bool(np.all((late >= 0.115) & (late <= 0.13)))
        result.checks.append(
            ScenarioCheck(
                "sym analytic plateau in [0.115, 0.13] for t/tau >= 3",
                ok,
                f"values {np.round(late, 5).tolist()}",
            )
        )
    elif variant == "asym":
        imax = int(np.argmax(ref))
        tail = ref[imax:]
        decreasing = bool(np.all(np.diff(tail) <= 1e-12))
        peaked = bool(1.0 <= t[imax] <= 3.0)
        dropped = bool(ref[-1] < ref[imax] - 0.005)
        result.checks.append(
            ScenarioCheck(
                "asym analytic peaks near 2 tau then decreases",
                decreasing and peaked and dropped,
                f"peak {ref[imax]:.4f} at t/tau={t[imax]:.2f}, final {ref[-1]:.4f}",
            )
        )
    else:
        ok = bool(np.all(ref <= 1e-6))
        result.checks.append(
            ScenarioCheck(
                "uncorr analytic measure stays <= 1e-6",
                ok,
                f"max {ref.max():.2e}",
            )
        )


# ---------------------------------------------------------------------------
# fig6: pairwise lower bounds vs distance in a four-qubit register.


def run_fig6(
    shots: int = 100,
    n_traj: int = 1000,
    band_reps: int = 100,
    seed: int = 0,
    t_over_tau: float = 5.0,
) -> ScenarioResult:
    """Pairwise bounds between qubit 1 and qubits 2..4 after a 5-tau wait
    under perfectly correlated dephasing; all X-X observables."""
    model = PhaseNoiseModel(
        sigma_b=sigma_b_for_time(t_over_tau), suscept=suscept_for_pattern("AAAA")
    )
    state = sample_dephasing_trajectories(model, _plus_state(4), n_traj, derive_seed(seed, 0))
    setting = [MeasurementSetting(bases="XXXX")]
    pair_parties = PartyStructure(2, 2)
    estimates: dict[int, list[float]] = {1: [], 2: [], 3: []}
    for rep in range(band_reps):
        rec = simulate_record(state, setting, shots, derive_seed(seed, 1, rep))
        for other in (1, 2, 3):
            sub = marginalize_record(rec, [0, other])
            res = lower_bound_from_counts(sub, ["X", "X"], pair_parties)
            estimates[other].append(res.lower_bound)
    result = ScenarioResult(
        scenario="fig6",
        columns=(
            "pair",
            "distance",
            "analytic_ref",
            "pipeline_value",
            "std_err",
            "band_lo",
            "band_hi",
        ),
    )
    for other in (1, 2, 3):
        row = {
            "pair": f"1-{other + 1}",
            "distance": other,
            "analytic_ref": FIG6_REFERENCE,
        }
        row.update(_band_stats(estimates[other]))
        result.rows.append(row)
    values = result.column("pipeline_value")
    sems = result.column("std_err") / math.sqrt(band_reps)
    pairs_equal = all(
        abs(values[i] - values[j]) <= 3.0 * math.hypot(sems[i], sems[j]) + 1e-12
        for i in range(3)
        for j in range(i + 1, 3)
    )
    result.checks.append(
        ScenarioCheck(
            "pairwise bounds statistically indistinguishable",
            pairs_equal,
            f"values {np.round(values, 5).tolist()}",
        )
    )
    near = bool(np.all(np.abs(values - FIG6_REFERENCE) <= 0.01))
    result.checks.append(
        ScenarioCheck(
            "pairwise bounds near 0.045",
            near,
            f"max deviation {np.max(np.abs(values - FIG6_REFERENCE)):.4f}",
        )
    )
    return result


# ---------------------------------------------------------------------------
# fig7: four-body lower bounds for three encoding patterns.


def four_body_bound_row(
    pattern: str,
    shots: int,
    n_traj: int,
    band_reps: int,
    seed: int,
    seed_key: int,
    t_over_tau: float = 5.0,
) -> dict:
    """One encoding pattern: simulate, tomograph, and bound the four-body
    correlator; returns a fig7-schema row."""
    settings = state_tomography_settings(4)
    parties = PartyStructure(4, 2)
    obs = [Observable((2,), PAULI["X"])] * 4
    model = PhaseNoiseModel(
        sigma_b=sigma_b_for_time(t_over_tau), suscept=suscept_for_pattern(pattern)
    )
    state = sample_dephasing_trajectories(
        model, _plus_state(4), n_traj, derive_seed(seed, seed_key)
    )
    bounds, joints = [], []
    for rep in range(band_reps):
        rec = simulate_record(state, settings, shots, derive_seed(seed, seed_key, rep))
        recon = mle_state_tomography(rec, 4, tol=_MLE_TOL, max_iter=_MLE_MAX_ITER)
        res = lower_bound_from_state(recon, obs, parties)
        bounds.append(res.lower_bound)
        joints.append(res.joint)
    row = {
        "config": pattern,
        "analytic_ref": FIG7_REFERENCES.get(pattern, math.nan),
        "joint_mean": float(np.mean(joints)),
    }
    row.update(_band_stats(bounds))
    return row


def run_fig7(
    shots: int = 100,
    n_traj: int = 1000,
    band_reps: int = 100,
    seed: int = 0,
    t_over_tau: float = 5.0,
) -> ScenarioResult:
    """Four-body bound at 5 tau via full four-qubit state tomography for the
    encoding patterns AAAA, AABB, AAAB, next to the long-time references."""
    result = ScenarioResult(
        scenario="fig7",
        columns=(
            "config",
            "analytic_ref",
            "pipeline_value",
            "std_err",
            "band_lo",
            "band_hi",
            "joint_mean",
        ),
    )
    for ci, pattern in enumerate(FIG7_PATTERNS):
        result.rows.append(
            four_body_bound_row(
                pattern, shots, n_traj, band_reps, seed, seed_key=10 + ci, t_over_tau=t_over_tau
            )
        )
    refs = result.column("analytic_ref")
    ordered = bool(refs[0] >= refs[1] >= refs[2])
    result.checks.append(
        ScenarioCheck(
            "analytic references ordered AAAA >= AABB >= AAAB",
            ordered,
            f"refs {np.round(refs, 5).tolist()}",
        )
    )
    return result


# ---------------------------------------------------------------------------
# fig8: exact-measure surfaces over the phase-noise widths.


def run_fig8(
    sigma_b_grid=None,
    sigma_l_grid=None,
    panels: dict[str, tuple[float, float]] | None = None,
) -> ScenarioResult:
    """Exact measure of the analytic dephasing channel on a sigma_B x
    sigma_L mesh, for equal susceptibilities and for the ratio -0.83."""
    sb = np.linspace(0.0, 10.0, 41) if sigma_b_grid is None else np.asarray(sigma_b_grid, float)
    sl = np.linspace(0.0, 2.0, 21) if sigma_l_grid is None else np.asarray(sigma_l_grid, float)
    if panels is None:
        panels = {"sym": (1.0, 1.0), "asym": (1.0, ENCODING_SUSCEPT["B"])}
    parties = PartyStructure(2, 2)
    result = ScenarioResult(
        scenario="fig8", columns=("panel", "sigma_b", "sigma_l", "ibar")
    )
    for panel, suscept in panels.items():
        for b in sb:
            for l in sl:
                model = PhaseNoiseModel(sigma_b=float(b), sigma_l=float(l), suscept=suscept)
                ibar = measure_ibar(analytic_dephasing_channel(model), parties).ibar_raw
                result.rows.append(
                    {
                        "panel": panel,
                        "sigma_b": float(b),
                        "sigma_l": float(l),
                        "ibar": ibar,
                    }
                )
    by_key = {
        (r["panel"], r["sigma_b"], r["sigma_l"]): r["ibar"] for r in result.rows
    }
    origin_ok = all(
        abs(by_key[(panel, 0.0, 0.0)]) <= 1e-9 for panel in panels
    )
    result.checks.append(
        ScenarioCheck("measure vanishes at sigma_B = sigma_L = 0", origin_ok, "")
    )
    if "sym" in panels and (("sym", 10.0, 0.0) in by_key):
        sat = by_key[("sym", 10.0, 0.0)]
        result.checks.append(
            ScenarioCheck(
                "equal-susceptibility saturation 0.125 at sigma_B = 10",
                abs(sat - 0.125) <= 1e-4,
                f"value {sat:.6f}",
            )
        )
    if "asym" in panels:
        corner = by_key[("asym", float(sb.max()), float(sl.max()))]
        result.checks.append(
            ScenarioCheck(
                "asymmetric measure decays for large widths",
                corner <= 1e-3,
                f"value {corner:.2e}",
            )
        )
    return result


def long_time_reference(config: str) -> float:
    """Closed-form long-time lower bound for a named configuration."""
    mapping = {"sym2": "sym2", "AAAA": "sym4", "AABB": "mixed22", "AAAB": "mixed31"}
    state = long_time_state(mapping[config])
    m = len(state.dims)
    obs = [Observable((2,), PAULI["X"])] * m
    return lower_bound_from_state(state, obs, PartyStructure(m, 2)).lower_bound
