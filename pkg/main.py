#!/usr/bin/env python3
"""양자 판별 이점 → 군집화 상호정보량 시뮬레이션 CLI

사용법:
    python main.py roc --out output/roc.csv
    python main.py simulate --scenario particles --type1 0.01 --family quantum
    python main.py simulate --scenario attractors --type1 0.05 --type2 0.2 --fixed-truth 5,5,14,14 --map output/medoids.csv
    python main.py sweep --config config/experiments/particles_desk.json --out output/particles
    python main.py mi --records output/particles/records_0_quantum.csv --scheme joint --max-a 10
    python main.py cluster --input grid.txt --algo dbscan

종료 코드: 0 성공, 2 설정/입력 오류, 3 수치/내부 일관성 오류
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.errors import ConfigurationError, QClusterError
from app.models.clustering import PointSet
from app.models.histogram import CategoricalHistogram
from app.models.scene import AttractorTruth
from app.pipeline import storage
from app.pipeline.runner import (
    dump_patterns,
    family_errors,
    load_curves,
    medoid_frequency_map,
    run_experiment,
    run_sweep,
)
from app.schemas.experiment import ExperimentConfig
from app.schemas.probe import LossChannelPair
from app.schemas.scene import ErrorPair
from app.services.clustering import dbscan, kmedoids, squared_distances
from app.services.infotheory import histograms_by_stratum, mi_fixed_a_scheme, mi_joint_table, mi_plugin
from app.services.probe_roc import classical_roc, endpoint_schemes, quantum_roc, roc_lookup
from config.settings import settings

logger = logging.getLogger("qcluster")

DEFAULT_SIDE = {"attractors": 20, "particles": 50}


# ──────────────────────────────────────────
# roc
# ──────────────────────────────────────────

def cmd_roc(args) -> int:
    pair = LossChannelPair(tau0=args.tau0, tau1=args.tau1, mean_photons=args.mean_photons)
    alphas = np.linspace(0.0, args.alpha_max, args.points)
    classical = classical_roc(pair, args.alpha_max, args.points)
    quantum = quantum_roc(pair, args.a_grid, args.b_grid, args.alpha_max)
    rows = [
        (float(alpha), roc_lookup(classical, float(alpha)), roc_lookup(quantum, float(alpha)))
        for alpha in alphas
    ]
    path = storage.write_roc_csv(args.out, rows)
    print(f"ROC 저장: {path}")
    print(f"  β(α=0): 고전 {rows[0][1]:.6f}, 양자 {rows[0][2]:.6f}")
    print(f"  β(α={args.alpha_max:g}): 고전 {rows[-1][1]:.6f}, 양자 {rows[-1][2]:.6f}")
    if args.schemes:
        for alpha, beta in endpoint_schemes(pair).points:
            print(f"  광자 계수 방식 끝점: (α, β) = ({alpha:.6f}, {beta:.6f})")
    return 0


# ──────────────────────────────────────────
# simulate
# ──────────────────────────────────────────

def _simulate_config(args) -> ExperimentConfig:
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    else:
        if not args.scenario:
            raise ConfigurationError("--config 또는 --scenario가 필요함")
        raw = {"scenario": args.scenario, "grid": {"side": args.side or DEFAULT_SIDE[args.scenario]}}
    overrides = {
        "samples_per_point": args.samples,
        "master_seed": args.seed,
        "workers": args.workers,
        "roc_file": args.roc_file,
        "roc_source": "file" if args.roc_file else None,
    }
    raw.update({key: value for key, value in overrides.items() if value is not None})
    if args.type1 is not None:
        raw["type1_grid"] = [args.type1]
    if args.full_scale:
        raw["full_scale"] = True
    return ExperimentConfig.from_dict(raw)


def _parse_truth(text: str) -> AttractorTruth:
    try:
        r1, c1, r2, c2 = (int(v) for v in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"--fixed-truth 형식 오류 (r1,c1,r2,c2): {text!r}") from e
    return AttractorTruth.canonical((r1, c1), (r2, c2))


def cmd_simulate(args) -> int:
    config = _simulate_config(args)
    alpha = config.type1_grid[0]
    if args.type2 is not None:
        errors = ErrorPair(xi1=alpha, xi2=args.type2)
    else:
        errors = family_errors(load_curves(config), alpha)[args.family]
    logger.info("simulate: %s, ξ₁=%.6g, ξ₂=%.6g", config.scenario, errors.xi1, errors.xi2)

    if args.dump_patterns:
        for path in dump_patterns(config, errors, args.dump_patterns):
            print(f"패턴 저장: {path}")

    if args.fixed_truth:
        if config.scenario != "attractors":
            raise ConfigurationError("--fixed-truth는 끌개 시나리오에서만 사용 가능")
        truth = _parse_truth(args.fixed_truth)
        frequencies = medoid_frequency_map(config, errors, truth, config.n_samples)
        if args.map:
            Path(args.map).parent.mkdir(parents=True, exist_ok=True)
            np.savetxt(args.map, frequencies, delimiter=",", fmt="%.12g")
            print(f"군집 중심 빈도 지도 저장: {args.map}")
        print(json.dumps({"truth": truth.coords, "max_frequency": float(frequencies.max())}))
        return 0

    result = run_experiment(config, errors)
    if args.records:
        with_run = config.scenario == "attractors"
        storage.write_records(
            args.records,
            ([r.sample_id, r.a, r.d] + ([r.run] if with_run else []) for r in result.records),
            with_run=with_run,
        )
    payload = result.estimate.model_dump()
    payload.update({"type1": errors.xi1, "type2": errors.xi2, "placement_retries": result.retries})
    print(json.dumps(payload, ensure_ascii=False, indent=2))
    return 0


# ──────────────────────────────────────────
# sweep
# ──────────────────────────────────────────

def cmd_sweep(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.workers:
        config = config.model_copy(update={"workers": args.workers})
    if args.replicates is not None:
        config = ExperimentConfig.from_dict({**config.model_dump(), "replicates": args.replicates})
    out_dir = Path(args.out or settings.OUTPUT_DIR)
    if args.dump_patterns:
        curves = load_curves(config)
        for family, errors in family_errors(curves, config.type1_grid[0]).items():
            dump_patterns(config, errors, args.dump_patterns, label=family)
    else:
        curves = None
    rows = run_sweep(config, out_dir, curves=curves, resume=not args.no_resume)
    for row in rows:
        print(
            f"α={row.type1:.4f}  β_c={row.type2_classical:.4f}  β_q={row.type2_quantum:.4f}  "
            f"MI_c={row.mi_classical.value:.4f}±{row.mi_classical.error_bar:.4f}  "
            f"MI_q={row.mi_quantum.value:.4f}±{row.mi_quantum.error_bar:.4f}"
        )
    return 0


# ──────────────────────────────────────────
# mi
# ──────────────────────────────────────────

def cmd_mi(args) -> int:
    rows = storage.read_records(args.records)
    if args.scheme == "joint":
        if args.max_a is None:
            raise ConfigurationError("--scheme joint에는 --max-a가 필요함")
        estimate = mi_plugin([(r["a"], r["d"]) for r in rows], args.max_a)
    elif args.scheme == "table":
        estimate = mi_joint_table([(r["a"], r["d"]) for r in rows])
    else:
        if not rows or "run" not in rows[0]:
            raise ConfigurationError("--scheme fixed-a에는 run 열이 있는 기록 파일이 필요함")
        h_d = CategoricalHistogram.from_outcomes(r["d"] for r in rows if r["run"] == 0)
        conditional = histograms_by_stratum([(r["run"], r["d"]) for r in rows if r["run"] > 0])
        estimate = mi_fixed_a_scheme(h_d, conditional, possible_outcomes=args.possible_outcomes)
    print(json.dumps(
        {"value": estimate.value, "bias": estimate.bias, "variance_bound": estimate.variance_bound,
         "method": estimate.method, "samples": estimate.samples},
        indent=2,
    ))
    return 0


# ──────────────────────────────────────────
# cluster
# ──────────────────────────────────────────

def cmd_cluster(args) -> int:
    points = PointSet.from_bits(storage.read_bit_grid(args.input))
    if args.algo == "kmedoids":
        result = kmedoids(points, args.k)
        if result.degenerate:
            print(f"# 축퇴: 점 {len(points)}개 < k={args.k}")
            labels = np.zeros(len(points), dtype=int)
        else:
            medoids = np.array(result.medoids)
            stacked = np.vstack([points.points, medoids])
            distances = squared_distances(stacked)[: len(points), len(points):]
            labels = distances.argmin(axis=1) + 1
            print(f"# medoids: {list(result.medoids)}, 비용 {result.cost}")
    else:
        result = dbscan(points, args.eps, args.min_pts)
        labels = result.labels
        print(f"# 군집 {result.cluster_count}개, 잡음 {int((labels == 0).sum())}개")
    print("row,col,label")
    for (r, c), label in zip(points.points, labels):
        print(f"{r},{c},{label}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="양자/고전 탐침 ROC와 군집화 상호정보량 시뮬레이션")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    roc = sub.add_parser("roc", help="고전/양자 ROC 계산")
    roc.add_argument("--tau0", type=float, default=0.95)
    roc.add_argument("--tau1", type=float, default=0.4)
    roc.add_argument("--mean-photons", type=float, default=8.0)
    roc.add_argument("--alpha-max", type=float, default=settings.ALPHA_MAX)
    roc.add_argument("--points", type=int, default=settings.ROC_POINTS)
    roc.add_argument("--a-grid", type=int, default=settings.QUANTUM_A_GRID)
    roc.add_argument("--b-grid", type=int, default=settings.QUANTUM_B_GRID)
    roc.add_argument("--schemes", action="store_true", help="광자 계수 방식 끝점 출력")
    roc.add_argument("--out", default=str(Path(settings.OUTPUT_DIR) / "roc.csv"))
    roc.set_defaults(func=cmd_roc)

    sim = sub.add_parser("simulate", help="오류 쌍 하나에서 실험 실행")
    sim.add_argument("--config", help="ExperimentConfig JSON (없으면 --scenario 기본값)")
    sim.add_argument("--scenario", choices=["attractors", "particles"])
    sim.add_argument("--side", type=int)
    sim.add_argument("--type1", type=float, required=True)
    sim.add_argument("--family", choices=["classical", "quantum"], default="quantum")
    sim.add_argument("--type2", type=float, help="ROC 대신 직접 지정하는 2종 오류")
    sim.add_argument("--samples", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--roc-file")
    sim.add_argument("--full-scale", action="store_true", help="고정 A 방식 N = 800000")
    sim.add_argument("--records", help="표본 기록 CSV 경로")
    sim.add_argument("--fixed-truth", help="r1,c1,r2,c2 형식, 고정 끌개에서 군집 중심 빈도 지도 계산")
    sim.add_argument("--map", help="빈도 지도 CSV 경로")
    sim.add_argument("--dump-patterns", help="처음 몇 표본의 B, C 패턴 저장 디렉토리")
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="1종 오류 격자 스윕")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--no-resume", action="store_true", help="기존 sweep.csv를 무시하고 처음부터")
    sweep.add_argument("--dump-patterns")
    sweep.add_argument("--replicates", type=int, help="α마다 시드 반복 횟수 (경험적 오차 막대, 2 이상)")
    sweep.set_defaults(func=cmd_sweep)

    mi = sub.add_parser("mi", help="기록 CSV에서 상호정보량 추정")
    mi.add_argument("--records", required=True)
    mi.add_argument("--scheme", choices=["joint", "fixed-a", "table"], default="joint")
    mi.add_argument("--max-a", type=int)
    mi.add_argument("--possible-outcomes", type=int)
    mi.set_defaults(func=cmd_mi)

    cluster = sub.add_parser("cluster", help="0/1 격자 파일 군집화")
    cluster.add_argument("--input", required=True)
    cluster.add_argument("--algo", choices=["kmedoids", "dbscan"], default="dbscan")
    cluster.add_argument("--k", type=int, default=2)
    cluster.add_argument("--eps", type=float, default=2 ** 0.5)
    cluster.add_argument("--min-pts", type=int, default=4)
    cluster.set_defaults(func=cmd_cluster)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except QClusterError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except ValidationError as e:
        logger.error("입력 검증 실패: %s", e)
        return 2
    except (OSError, json.JSONDecodeError) as e:
        logger.error("파일 오류: %s", e)
        return 2
    except Exception:
        logger.error("예상하지 못한 오류", exc_info=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
