"""
몬테카를로 실험 실행기

표본 하나는 A(정답) → B(채널 패턴) → C(측정 결과) → D(군집화 추정) 순서로
만들어진다. D는 C만으로 계산된다.

  - run_sample: 표본 하나 (배치 실패 시 새 하위 스트림으로 재시도)
  - run_records: 표본 묶음을 청크 단위로 (병렬 가능) 실행, 순서 보존
  - run_experiment: 한 오류 쌍 (ξ₁, ξ₂)에서 상호정보량 추정
  - run_sweep: 1종 오류 격자 × (고전, 양자) 탐침 스윕, sweep.csv 기록
  - replicate_spread: 시드 반복으로 구한 경험적 오차 막대
"""

import logging
import time
from dataclasses import dataclass, field
from functools import reduce
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from app import __version__
from app.errors import ConfigurationError, PlacementError
from app.models.clustering import PointSet
from app.models.histogram import CategoricalHistogram
from app.models.scene import AttractorTruth, ChannelPattern, ParticleTruth
from app.pipeline import storage
from app.pipeline.seeding import PRNG_ID, SampleStream, seed_stream
from app.schemas.experiment import ExperimentConfig, SweepRow
from app.schemas.info import MiEstimate
from app.schemas.probe import RocCurve
from app.schemas.scene import ErrorPair
from app.services.channel import apply_measurement_noise
from app.services.clustering import count_clusters, dbscan, kmedoids
from app.services.infotheory import (
    decode_medoids,
    degenerate_outcome,
    encode_medoids,
    mi_fixed_a_scheme,
    mi_joint_table,
    mi_plugin,
    subset_outcome_count,
)
from app.services.probe_roc import classical_roc, quantum_roc, roc_lookup
from app.services.scene import (
    attractor_occupancy,
    place_particles,
    sample_attractor_truth,
    sample_particle_truth,
    sample_pattern_from_probs,
)
from config.settings import settings

logger = logging.getLogger(__name__)

FAMILIES = ("classical", "quantum")

Truth = Union[AttractorTruth, ParticleTruth]

# 측정 결과 C → 추정 결과 D (테스트에서 군집화 단계를 대체할 때 사용)
Estimator = Callable[[ChannelPattern], int]


@dataclass(frozen=True)
class SampleRecord:
    """표본 하나의 정규 인코딩된 (A, D)"""
    sample_id: int
    a: int
    d: int
    run: int = 0
    retries: int = 0


@dataclass(frozen=True)
class SampleTrace:
    """표본 하나의 전체 생성 과정 (패턴 덤프, 빈도 지도용)"""
    truth: Truth
    pattern: ChannelPattern
    measurement: ChannelPattern
    record: SampleRecord


@dataclass
class ExperimentResult:
    estimate: MiEstimate
    records: List[SampleRecord] = field(default_factory=list)
    retries: int = 0


# ──────────────────────────────────────────
# 단계별 처리
# ──────────────────────────────────────────

def encode_truth(config: ExperimentConfig, truth: Truth) -> int:
    if isinstance(truth, AttractorTruth):
        return encode_medoids(truth.coords, config.grid.side, len(truth.coords))
    return truth.count


def estimate_outcome(config: ExperimentConfig, measurement: ChannelPattern) -> int:
    """측정 결과에서 군집화 추정 D를 계산한다"""
    points = PointSet.from_pattern(measurement)
    if config.scenario == "attractors":
        result = kmedoids(points, config.kmedoids_k)
        if result.degenerate:
            return degenerate_outcome(config.grid.side, config.kmedoids_k)
        return encode_medoids(result.medoids, config.grid.side, config.kmedoids_k)
    result = dbscan(points, config.dbscan_eps, config.dbscan_min_pts)
    return count_clusters(result, config.cluster_cap)


def draw_truth(stream: SampleStream, config: ExperimentConfig, attempt: int = 0) -> Truth:
    if config.scenario == "attractors":
        return sample_attractor_truth(stream.stage("truth", attempt), config.grid, config.attractor_params)
    if config.stratify:
        return ParticleTruth(count=stream.sample_index % (config.particle_params.max_particles + 1))
    return sample_particle_truth(stream.stage("truth", attempt), config.particle_params)


def generate_pattern(rng: np.random.Generator, config: ExperimentConfig, truth: Truth) -> ChannelPattern:
    if isinstance(truth, AttractorTruth):
        probs = attractor_occupancy(truth, config.grid, config.attractor_params)
        return sample_pattern_from_probs(rng, probs)
    return place_particles(rng, config.grid, truth, config.particle_params)


def fixed_truths(config: ExperimentConfig) -> List[AttractorTruth]:
    """고정 A 방식에 쓸 정답들 (fixed_truth 스트림에서 추출)"""
    return [
        sample_attractor_truth(
            seed_stream(config.master_seed, index, "fixed_truth"),
            config.grid,
            config.attractor_params,
        )
        for index in range(config.fixed_truths)
    ]


# ──────────────────────────────────────────
# 표본
# ──────────────────────────────────────────

def trace_sample(
    stream: SampleStream,
    config: ExperimentConfig,
    errors: ErrorPair,
    truth: Optional[Truth] = None,
    estimator: Optional[Estimator] = None,
) -> SampleTrace:
    """네 단계를 순서대로 실행하고 중간 결과를 모두 돌려준다"""
    for attempt in range(settings.RETRY_LIMIT + 1):
        try:
            current = truth if truth is not None else draw_truth(stream, config, attempt)
            pattern = generate_pattern(stream.stage("pattern", attempt), config, current)
        except PlacementError as e:
            logger.warning(
                "표본 %d (run %d) 배치 실패, 시도 %d: %s, 새 하위 스트림으로 재시도",
                stream.sample_index, stream.run, attempt, e,
            )
            continue
        measurement = apply_measurement_noise(stream.stage("measurement", attempt), pattern, errors)
        d = estimator(measurement) if estimator is not None else estimate_outcome(config, measurement)
        record = SampleRecord(
            sample_id=stream.sample_index,
            a=encode_truth(config, current),
            d=int(d),
            run=stream.run,
            retries=attempt,
        )
        return SampleTrace(truth=current, pattern=pattern, measurement=measurement, record=record)
    raise PlacementError(
        f"표본 {stream.sample_index} (run {stream.run}): {settings.RETRY_LIMIT}회 재시도 후에도 배치 실패"
    )


def run_sample(
    stream: SampleStream,
    config: ExperimentConfig,
    errors: ErrorPair,
    truth: Optional[Truth] = None,
    estimator: Optional[Estimator] = None,
) -> SampleRecord:
    """표본 하나의 정규 인코딩 (A, D)"""
    return trace_sample(stream, config, errors, truth, estimator).record


def _run_chunk(job: tuple) -> List[SampleRecord]:
    config, errors, run, start, stop, truth = job
    return [
        run_sample(SampleStream(config.master_seed, index, run), config, errors, truth)
        for index in range(start, stop)
    ]


def run_records(
    config: ExperimentConfig,
    errors: ErrorPair,
    run: int = 0,
    truth: Optional[Truth] = None,
    estimator: Optional[Estimator] = None,
    count: Optional[int] = None,
) -> List[SampleRecord]:
    """표본 count개를 실행해 sample_id 순서대로 돌려준다.

    청크 단위로 나눠 workers > 1이면 프로세스 풀에서 실행한다.
    표본마다 스트림이 독립이므로 결과는 워커 수와 무관하다.
    """
    count = config.n_samples if count is None else count
    chunk = max(settings.CHUNK_SIZE, 1)
    jobs = [(config, errors, run, start, min(start + chunk, count), truth) for start in range(0, count, chunk)]

    if estimator is None and config.workers > 1 and len(jobs) > 1:
        with Pool(processes=config.workers) as pool:
            chunks = pool.map(_run_chunk, jobs)
    elif estimator is None:
        chunks = [_run_chunk(job) for job in jobs]
    else:
        chunks = [[
            run_sample(SampleStream(config.master_seed, index, run), config, errors, truth, estimator)
            for index in range(start, stop)
        ] for _, _, _, start, stop, _ in jobs]
    return [record for part in chunks for record in part]


def outcome_histogram(records: List[SampleRecord]) -> CategoricalHistogram:
    """D 히스토그램: 청크별 부분 히스토그램을 병합"""
    chunk = max(settings.CHUNK_SIZE, 1)
    partials = [
        CategoricalHistogram.from_outcomes(r.d for r in records[start:start + chunk])
        for start in range(0, len(records), chunk)
    ]
    return reduce(CategoricalHistogram.merge, partials, CategoricalHistogram())


# ──────────────────────────────────────────
# 실험
# ──────────────────────────────────────────

def run_experiment(
    config: ExperimentConfig,
    errors: ErrorPair,
    estimator: Optional[Estimator] = None,
) -> ExperimentResult:
    """오류 쌍 하나에서 상호정보량을 추정한다.

    입자 시나리오는 층화된 N개 표본의 결합 플러그인 추정
    (stratify=False면 결합표 추정), 끌개 시나리오는 무작위 A 실행 1회와
    고정 A 실행 fixed_truths회로 이루어진 고정 A 방식.
    """
    started = time.time()
    logger.info(
        "===== 실험 시작: %s, ξ₁=%.6g, ξ₂=%.6g, N=%d =====",
        config.scenario, errors.xi1, errors.xi2, config.n_samples,
    )

    if config.scenario == "particles":
        records = run_records(config, errors, run=0, estimator=estimator)
        samples = [(r.a, r.d) for r in records]
        if config.stratify:
            estimate = mi_plugin(samples, config.particle_params.max_particles)
        else:
            estimate = mi_joint_table(samples)
    else:
        records = run_records(config, errors, run=0, estimator=estimator)
        h_d = outcome_histogram(records)
        conditional = []
        for index, truth in enumerate(fixed_truths(config)):
            fixed = run_records(config, errors, run=index + 1, truth=truth, estimator=estimator)
            conditional.append(outcome_histogram(fixed))
            records.extend(fixed)
        possible = subset_outcome_count(config.grid.side, config.kmedoids_k) if config.full_scale else None
        estimate = mi_fixed_a_scheme(
            h_d, conditional, possible_outcomes=possible, max_ratio=config.outcome_ratio_limit,
        )

    retries = sum(r.retries for r in records)
    if retries:
        logger.warning("배치 재시도 총 %d회", retries)
    logger.info(
        "===== 실험 완료: MI=%.6f bits (분산 상한 %.3g, 편향 %.3g), %.1f초 =====",
        estimate.value, estimate.variance_bound, estimate.bias, time.time() - started,
    )
    return ExperimentResult(estimate=estimate, records=records, retries=retries)


def medoid_frequency_map(
    config: ExperimentConfig,
    errors: ErrorPair,
    truth: AttractorTruth,
    draws: int,
) -> np.ndarray:
    """고정된 끌개에서 각 픽셀이 군집 중심으로 선택된 비율"""
    side, k = config.grid.side, config.kmedoids_k
    counts = np.zeros((side, side))
    degenerate = degenerate_outcome(side, k)
    for index in range(draws):
        record = run_sample(SampleStream(config.master_seed, index, run=1), config, errors, truth)
        if record.d == degenerate:
            continue
        for r, c in decode_medoids(record.d, side, k):
            counts[r, c] += 1
    return counts / max(draws, 1)


def dump_patterns(
    config: ExperimentConfig,
    errors: ErrorPair,
    directory,
    count: int = 3,
    label: str = "sample",
) -> List[Path]:
    """처음 count개 표본의 B, C 패턴을 텍스트 격자로 저장"""
    paths = []
    for index in range(count):
        trace = trace_sample(SampleStream(config.master_seed, index), config, errors)
        paths.append(storage.dump_pattern(directory, f"{label}_{index}_B", trace.pattern))
        paths.append(storage.dump_pattern(directory, f"{label}_{index}_C", trace.measurement))
    return paths


# ──────────────────────────────────────────
# 스윕
# ──────────────────────────────────────────

def load_curves(config: ExperimentConfig) -> Tuple[RocCurve, RocCurve]:
    """(고전 곡선, 양자 곡선)을 계산하거나 ROC CSV에서 읽는다"""
    if config.roc_source == "file":
        return storage.read_roc_csv(config.roc_file)
    classical = classical_roc(config.probe, config.alpha_max, settings.ROC_POINTS)
    quantum = quantum_roc(config.probe, config.a_grid, config.b_grid, config.alpha_max)
    return classical, quantum


def family_errors(curves: Tuple[RocCurve, RocCurve], alpha: float) -> Dict[str, ErrorPair]:
    """1종 오류 α에서 탐침별 (ξ₁, ξ₂). ξ₂는 해당 ROC 곡선 위의 값"""
    return {
        family: ErrorPair(xi1=alpha, xi2=roc_lookup(curve, alpha))
        for family, curve in zip(FAMILIES, curves)
    }


def estimate_method(config: ExperimentConfig) -> str:
    if config.scenario == "attractors":
        return "fixed-A-scheme"
    return "joint-plugin" if config.stratify else "joint-table"


def _row_from_csv(values: Dict[str, str], config: ExperimentConfig) -> SweepRow:
    method = estimate_method(config)

    def estimate(prefix: str) -> MiEstimate:
        return MiEstimate(
            value=float(values[f"mi_{prefix}"]),
            variance_bound=float(values[f"var_{prefix}"]),
            method=method,
            samples=config.n_samples,
        )

    return SweepRow(
        type1=float(values["type1"]),
        type2_classical=float(values["type2_classical"]),
        type2_quantum=float(values["type2_quantum"]),
        mi_classical=estimate("classical"),
        mi_quantum=estimate("quantum"),
    )


def replicate_spread(
    config: ExperimentConfig,
    errors: Dict[str, ErrorPair],
    replicates: int,
    estimator: Optional[Estimator] = None,
) -> Dict[str, float]:
    """마스터 시드만 바꿔 replicates회 반복한 MI 값의 표본 표준편차.

    분산 상한(log₂²N/N 꼴)은 느슨하므로 비교용 오차 막대는 이 값을 쓴다.
    반복 r의 시드는 master_seed + r (r = 1..replicates).
    반환: {"classical", "quantum", "gap"} → 표준편차 (gap = 양자 − 고전)
    """
    if replicates < 2:
        raise ConfigurationError(f"replicates={replicates} (2 이상 필요)")
    values: Dict[str, List[float]] = {family: [] for family in FAMILIES}
    for r in range(1, replicates + 1):
        replica = config.model_copy(update={"master_seed": config.master_seed + r})
        for family in FAMILIES:
            values[family].append(run_experiment(replica, errors[family], estimator).estimate.value)
    gaps = np.subtract(values["quantum"], values["classical"])
    spread = {family: float(np.std(values[family], ddof=1)) for family in FAMILIES}
    spread["gap"] = float(np.std(gaps, ddof=1))
    logger.info(
        "시드 반복 %d회: 표준편차 고전 %.4g, 양자 %.4g, 차이 %.4g",
        replicates, spread["classical"], spread["quantum"], spread["gap"],
    )
    return spread


def outcome_condition(config: ExperimentConfig) -> Optional[dict]:
    """끌개 시나리오의 P/N 조건 설명 (meta.json 기록용)"""
    if config.scenario != "attractors":
        return None
    possible = subset_outcome_count(config.grid.side, config.kmedoids_k)
    return {
        "outcome_count": possible if config.full_scale else "observed-support",
        "possible_outcomes": possible,
        "ratio_limit": config.outcome_ratio_limit,
        "full_scale": config.full_scale,
    }


def run_sweep(
    config: ExperimentConfig,
    out_dir=None,
    curves: Optional[Tuple[RocCurve, RocCurve]] = None,
    estimator: Optional[Estimator] = None,
    resume: bool = True,
) -> List[SweepRow]:
    """type1_grid의 α마다 두 탐침의 실험을 돌려 sweep.csv에 한 행씩 기록한다.

    두 탐침은 같은 마스터 시드를 쓰므로 정답·패턴·측정 난수가 공유된다.
    이미 기록된 α는 다시 계산하지 않는다.
    """
    started = time.time()
    out_dir = Path(out_dir or settings.OUTPUT_DIR)
    curves = curves or load_curves(config)
    writer = storage.SweepWriter(out_dir / "sweep.csv", resume=resume)
    logger.info("===== 스윕 시작: %s, α %d개, 출력 %s =====", config.scenario, len(config.type1_grid), out_dir)

    rows: List[SweepRow] = []
    total_retries = 0
    spreads: Dict[str, Dict[str, float]] = {}
    outcome_ratios: Dict[str, Dict[str, float]] = {}
    condition = outcome_condition(config)
    if condition and not config.full_scale:
        logger.warning(
            "P/N 검사에 관측된 지지 크기와 상한 %.3g를 사용 (가능한 결과 수 %d 기준이 아님)",
            config.outcome_ratio_limit, condition["possible_outcomes"],
        )
    for alpha in config.type1_grid:
        errors = family_errors(curves, alpha)
        if writer.is_done(alpha):
            rows.append(_row_from_csv(writer.completed[storage.format_float(alpha)], config))
            logger.info("α=%.6g 이미 완료, 건너뜀", alpha)
            continue

        results = {family: run_experiment(config, errors[family], estimator) for family in FAMILIES}
        row = SweepRow(
            type1=alpha,
            type2_classical=errors["classical"].xi2,
            type2_quantum=errors["quantum"].xi2,
            mi_classical=results["classical"].estimate,
            mi_quantum=results["quantum"].estimate,
        )
        writer.append([
            row.type1, row.type2_classical, row.type2_quantum,
            row.mi_classical.value, row.mi_classical.variance_bound,
            row.mi_quantum.value, row.mi_quantum.variance_bound,
        ])
        if config.records:
            with_run = config.scenario == "attractors"
            for family, result in results.items():
                storage.write_records(
                    out_dir / storage.records_filename(alpha, family),
                    ([r.sample_id, r.a, r.d] + ([r.run] if with_run else []) for r in result.records),
                    with_run=with_run,
                )
        key = storage.format_float(alpha)
        if condition:
            outcome_ratios[key] = {family: result.estimate.outcome_ratio for family, result in results.items()}
        if config.replicates:
            spreads[key] = replicate_spread(config, errors, config.replicates, estimator)
        total_retries += sum(result.retries for result in results.values())
        rows.append(row)

    storage.write_meta(out_dir / "meta.json", {
        "config": config.model_dump(mode="json"),
        "master_seed": config.master_seed,
        "prng": PRNG_ID,
        "code_version": __version__,
        "samples_per_point": config.n_samples,
        "placement_retries": total_retries,
        "outcome_condition": condition,
        "outcome_ratios": outcome_ratios,
        "replicates": config.replicates,
        "replicate_std": spreads,
        "wall_time_seconds": round(time.time() - started, 3),
    })
    logger.info("===== 스윕 완료: %d행, %.1f초 =====", len(rows), time.time() - started)
    return rows
