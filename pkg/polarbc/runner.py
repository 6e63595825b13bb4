"""
Experiment orchestration: mode dispatch, fan-out of trials / search cells, artifacts.

작업 분배 순서: Celery 브로커가 설정돼 있으면 group, 아니면 스레드 풀, 아니면 순차 실행.
결과 행은 항상 정렬한 뒤 기록하므로 분배 방식과 무관하게 출력 바이트가 같다.
"""
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from celery import group
from django.conf import settings
from pydantic import ValidationError
from tqdm import tqdm

from .auxiliary import BroadcastChannelSpec
from .broadcast_scheme import (
    BroadcastPolarCode,
    allocate_common,
    analyze_error_bound,
    build_code,
    simulate_trial,
)
from .exceptions import (
    BudgetExceededError,
    CapacityExceededError,
    ConfigError,
    InfeasibleScheduleError,
    InvalidStateError,
)
from .polarized_sets import PROFILE_SPECS, channel_profile, profile_rows, scheme_profiles
from .quantum_core import ClassicalChannelTable, CqEnsemble
from .rate_region import (
    CellResult,
    corner_points,
    effective_resolution,
    evaluate_common_region,
    evaluate_private_region,
    evaluate_search_cell,
    search_auxiliaries,
)
from .reports import write_csv, write_json
from .schemas import MODE_ANALYZE, MODE_POLARIZE, MODE_REGION, MODE_SIMULATE, ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

PROFILE_HEADER = ("index", "z", "method", "half_width")
TRIAL_HEADER = ("trial", "m1_ok", "m2_ok", "m0_ok")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, InvalidStateError, ValidationError)):
        return EXIT_CONFIG
    if isinstance(exc, (InfeasibleScheduleError, CapacityExceededError)):
        return EXIT_INFEASIBLE
    if isinstance(exc, BudgetExceededError):
        return EXIT_BUDGET
    return EXIT_UNEXPECTED


@dataclass
class RunResult:
    exit_code: int
    artifacts: List[Path] = field(default_factory=list)
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


# ==========================================
# Shared computations (used by tasks too)
# ==========================================

_codes: Dict[str, BroadcastPolarCode] = {}
_codes_lock = threading.Lock()


def _code_key(config: ExperimentConfig) -> str:
    # mode, trials and outputs do not change the code
    return config.model_copy(update={"mode": None, "trials": 1, "outputs": None}).config_hash()


def code_for_config(config: ExperimentConfig) -> BroadcastPolarCode:
    key = _code_key(config)
    with _codes_lock:
        cached = _codes.get(key)
        if cached is not None:
            return cached
        code = build_code(
            config.channel.build(),
            config.aux.build(),
            config.n,
            config.k,
            config.thresholds.build(),
            seed=config.seeds.shared,
            construction_seed=config.seeds.construction,
            swap_roles=config.swap_roles,
            bin_set_variant=config.bin_set_variant,
            backoff=config.backoff,
            method=config.profile_method,
            samples=config.mc_samples,
            budget=config.budget.build(),
        )
        code = allocate_common(code, config.common_bits)
        _codes[key] = code
        return code


def trial_rows(config: ExperimentConfig, trials: Sequence[int]) -> List[tuple]:
    code = code_for_config(config)
    return [simulate_trial(code, int(t), config.seeds.noise).row() for t in trials]


def cell_results(config: ExperimentConfig, phi_codes: Sequence[int]) -> List[dict]:
    spec = config.channel.build()
    search = config.search
    resolution = effective_resolution(search.resolution)
    return [
        evaluate_search_cell(spec, int(c), resolution, tuple(search.weights), config.corner_variant).to_dict()
        for c in phi_codes
    ]


def _chunks(items: Sequence[int], threads: int) -> List[List[int]]:
    size = max(1, math.ceil(len(items) / max(4 * threads, 1)))
    return [list(items[i:i + size]) for i in range(0, len(items), size)]


def _dispatch(
    config: ExperimentConfig,
    items: Sequence[int],
    threads: int,
    local: Callable[[ExperimentConfig, Sequence[int]], list],
    task_name: str,
    desc: str,
) -> list:
    chunks = _chunks(list(items), threads)
    out: list = []
    if not getattr(settings, "CELERY_TASK_ALWAYS_EAGER", True):
        from . import tasks

        task = getattr(tasks, task_name)
        payload = config.model_dump(mode="json")
        logger.info(f"[Runner] {desc}: {len(chunks)} celery tasks")
        for part in group(task.s(payload, chunk) for chunk in chunks).apply_async().get():
            out.extend(part)
    elif threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(local, config, chunk) for chunk in chunks]
            for future in tqdm(as_completed(futures), total=len(futures), desc=desc, disable=None):
                out.extend(future.result())
    else:
        for chunk in tqdm(chunks, desc=desc, disable=None):
            out.extend(local(config, chunk))
    return out


# ==========================================
# Modes
# ==========================================

def _profile_filename(key: str) -> str:
    return "profile_" + key.replace("|", "_given_").replace(",", "_") + ".csv"


def _run_polarize(config: ExperimentConfig, out: Path, digest: str) -> List[Path]:
    spec = config.channel.build()
    options = dict(method=config.profile_method, samples=config.mc_samples)
    budget = config.budget.build()
    artifacts = []
    if config.aux is not None:
        bundle = scheme_profiles(
            spec, config.aux.build(), config.n, config.seeds.construction, budget=budget, **options
        )
        for key in PROFILE_SPECS:
            artifacts.append(write_csv(out / _profile_filename(key), PROFILE_HEADER,
                                       profile_rows(bundle[key]), digest))
        return artifacts
    for receiver in (1, 2):
        if spec.is_classical:
            channel = ClassicalChannelTable(spec.marginal_rows(receiver))
        else:
            channel = CqEnsemble.uniform(*spec.marginal_states(receiver))
        profile = channel_profile(channel, config.n, budget=budget,
                                  seed=[config.seeds.construction, receiver], **options)
        artifacts.append(write_csv(out / f"profile_receiver{receiver}.csv", PROFILE_HEADER,
                                   profile_rows(profile), digest))
    return artifacts


def _run_analyze(config: ExperimentConfig, out: Path, digest: str) -> List[Path]:
    code = code_for_config(config)
    bound = analyze_error_bound(code)
    corners = corner_points(code.spec, code.aux, config.corner_variant)
    accounting = code.accounting()
    artifacts = [
        write_json(out / "code.json", code.to_dict(), digest),
        write_json(out / "schedule.json", {"sets": code.bundle.to_dict(), "schedule": code.schedule.to_dict()}, digest),
        write_csv(out / "bounds.csv", ("receiver", "layer", "union_bound", "determined_bound"), bound.rows(), digest),
    ]
    rates = code.rates()
    rows = [(name, float(value)) for name, value in rates.items()]
    rows += [(f"counted_{name}", value) for name, value in accounting.to_dict().items()]
    rows += [
        ("corner_variant", config.corner_variant),
        ("corner_A_R1", corners.a.r1), ("corner_A_R2", corners.a.r2),
        ("corner_B_R1", corners.b.r1), ("corner_B_R2", corners.b.r2),
        ("overhead", code.overhead()),
        ("block_error_bound_receiver1", bound.receiver_total(1) * code.k),
        ("block_error_bound_receiver2", bound.receiver_total(2) * code.k),
    ]
    artifacts.append(write_csv(out / "rates.csv", ("quantity", "value"), rows, digest))
    return artifacts


def phi_code_of(phi: Sequence[int]) -> int:
    return int(sum(int(bit) << index for index, bit in enumerate(phi)))


PRIVATE_KEYS = ("R1", "R2", "R1+R2 (a)", "R1+R2 (b)")
COMMON_KEYS = ("R0", "R0+R1", "R0+R2", "R0+R1+R2 (a)", "R0+R1+R2 (b)")
REGION_HEADER = (
    "source", "p_v", "p_v2|v=0", "p_v2|v=1",
    "p_v1|v=0,v2=0", "p_v1|v=0,v2=1", "p_v1|v=1,v2=0", "p_v1|v=1,v2=1", "phi",
    *(f"private {key}" for key in PRIVATE_KEYS),
    *(f"common {key}" for key in COMMON_KEYS),
    "corner_variant", "A_R1", "A_R2", "A_clamped", "B_R1", "B_R2", "B_clamped", "objective",
)


def _region_row(source: str, spec: BroadcastChannelSpec, aux, variant: str, weights) -> tuple:
    private = evaluate_private_region(spec, aux)
    common = evaluate_common_region(spec, aux)
    corners = corner_points(spec, aux, variant)
    objective = max(weights[0] * p.r1 + weights[1] * p.r2 for p in (corners.a, corners.b))
    return (
        source, aux.p_v, *aux.p_v2_given_v, *np.ravel(aux.p_v1_given_v_v2), phi_code_of(aux.phi),
        *(private.values[key] for key in PRIVATE_KEYS),
        *(common.values[key] for key in COMMON_KEYS),
        variant,
        corners.a.r1, corners.a.r2, corners.a.clamped,
        corners.b.r1, corners.b.r2, corners.b.clamped,
        objective,
    )


def _run_region(config: ExperimentConfig, out: Path, digest: str, threads: int) -> List[Path]:
    spec = config.channel.build()
    weights = tuple(config.search.weights) if config.search else (1.0, 1.0)
    rows = []
    if config.aux is not None:
        rows.append(_region_row("configured", spec, config.aux.build(), config.corner_variant, weights))
    if config.search is not None:
        def run_cells(codes):
            found = _dispatch(config, list(codes), threads, cell_results, "evaluate_phi_cells", "phi maps")
            return [CellResult(**item) for item in found]

        result = search_auxiliaries(
            spec, weights, effective_resolution(config.search.resolution), config.corner_variant, run_cells
        )
        rows.append(_region_row("search", spec, result.aux, config.corner_variant, weights))
    return [write_csv(out / "region.csv", REGION_HEADER, rows, digest)]


def _run_simulate(config: ExperimentConfig, out: Path, digest: str, threads: int) -> List[Path]:
    code = code_for_config(config)
    rows = _dispatch(config, range(config.trials), threads, trial_rows, "run_trial_batch", "trials")
    rows = sorted((tuple(row) for row in rows), key=lambda row: row[0])
    m1_ok = np.array([row[1] for row in rows], dtype=float)
    m2_ok = np.array([row[2] for row in rows], dtype=float)
    summary = [
        ("trials", len(rows)),
        ("n", code.n),
        ("k", code.k),
        ("swapped", code.swapped),
        ("block_error_receiver1", 1.0 - m1_ok.mean()),
        ("block_error_receiver2", 1.0 - m2_ok.mean()),
    ]
    common = [row[3] for row in rows if row[3] != ""]
    if common:
        summary.append(("block_error_common", 1.0 - np.mean([float(c) for c in common])))
    summary += [(name, float(value)) for name, value in code.rates().items()]
    logger.info(f"[Simulate] {len(rows)} trials, errors receiver1={summary[4][1]:.4f} receiver2={summary[5][1]:.4f}")
    return [
        write_csv(out / "trials.csv", TRIAL_HEADER, rows, digest),
        write_csv(out / "summary.csv", ("quantity", "value"), summary, digest),
    ]


def run(config: ExperimentConfig, out_dir: Optional[str] = None, threads: int = 1) -> RunResult:
    """Execute the configured mode and write its artifacts; failures become exit codes."""
    try:
        if config.mode is None:
            raise ConfigError("no mode selected")
        out = Path(out_dir or config.outputs or "out")
        digest = config.config_hash()
        logger.info(f"[Runner] mode={config.mode} out={out} config={digest[:12]}")
        if config.mode == MODE_POLARIZE:
            artifacts = _run_polarize(config, out, digest)
        elif config.mode == MODE_ANALYZE:
            artifacts = _run_analyze(config, out, digest)
        elif config.mode == MODE_REGION:
            artifacts = _run_region(config, out, digest, threads)
        elif config.mode == MODE_SIMULATE:
            artifacts = _run_simulate(config, out, digest, threads)
        else:
            raise ConfigError(f"unknown mode '{config.mode}'")
    except Exception as exc:
        code = exit_code_for(exc)
        if code == EXIT_UNEXPECTED:
            logger.error(f"[Runner] unexpected failure: {exc}", exc_info=True)
        else:
            logger.warning(f"[Runner] {type(exc).__name__}: {exc}")
        return RunResult(code, [], str(exc))
    return RunResult(EXIT_OK, artifacts, f"{len(artifacts)} artifacts written to {out}")
