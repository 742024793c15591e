"""
결과 파일 입출력

  - roc.csv:      alpha,beta_classical,beta_quantum
  - sweep.csv:    type1,type2_classical,type2_quantum,mi_classical,var_classical,mi_quantum,var_quantum
                  (행 단위로 즉시 기록, 재시작 시 완료된 행은 건너뜀)
  - records_<α>_<family>.csv: sample_id,a,d (고정 A 방식은 run 열 추가)
  - meta.json:    설정, 시드, 난수 생성기 식별자, 코드 버전, 소요 시간
  - patterns/:    B, C 패턴의 0/1 텍스트 격자 (read_bit_grid로 다시 읽음)

부동소수는 모두 유효숫자 12자리로 기록한다.
"""

import csv
import json
import logging
import os
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from app.errors import ConfigurationError
from app.models.scene import ChannelPattern, parse_bit_grid
from app.schemas.probe import RocCurve

logger = logging.getLogger(__name__)

ROC_HEADER = ["alpha", "beta_classical", "beta_quantum"]
SWEEP_HEADER = [
    "type1", "type2_classical", "type2_quantum",
    "mi_classical", "var_classical", "mi_quantum", "var_quantum",
]
RECORD_HEADER = ["sample_id", "a", "d"]


def format_float(value: float) -> str:
    return f"{value:.12g}"


# ──────────────────────────────────────────
# ROC
# ──────────────────────────────────────────

def write_roc_csv(path, rows: Iterable[Tuple[float, float, float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ROC_HEADER)
        for alpha, classical, quantum in rows:
            writer.writerow([format_float(alpha), format_float(classical), format_float(quantum)])
    logger.info("ROC 저장: %s", path)
    return path


def read_roc_csv(path) -> Tuple[RocCurve, RocCurve]:
    """roc.csv → (고전 곡선, 양자 곡선)"""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"ROC 파일 없음: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ROC_HEADER:
            raise ConfigurationError(f"ROC 파일 헤더 오류: {reader.fieldnames} (기대값 {ROC_HEADER})")
        rows = [(float(r["alpha"]), float(r["beta_classical"]), float(r["beta_quantum"])) for r in reader]
    if not rows:
        raise ConfigurationError(f"ROC 파일이 비어 있음: {path}")
    classical = RocCurve(kind="classical-optimal-lower-bound", points=[(a, c) for a, c, _ in rows])
    quantum = RocCurve(kind="quantum-achievable-upper-bound", points=[(a, q) for a, _, q in rows])
    return classical, quantum


# ──────────────────────────────────────────
# 스윕
# ──────────────────────────────────────────

class SweepWriter:
    """sweep.csv 행 단위 기록기. 재시작하면 완료된 행을 읽어 이어서 기록한다."""

    def __init__(self, path, resume: bool = True):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.completed: Dict[str, Dict[str, str]] = {}
        if resume and self.path.exists():
            self._load()
        else:
            self._rewrite([])

    def _load(self) -> None:
        text = self.path.read_text(encoding="utf-8")
        lines = text.splitlines()
        # 줄바꿈으로 끝나지 않은 마지막 줄은 기록 도중 중단된 행
        if lines and not text.endswith("\n"):
            lines = lines[:-1]
        reader = csv.reader(lines)
        header = next(reader, None)
        if header is not None and header != SWEEP_HEADER:
            raise ConfigurationError(f"기존 sweep.csv 헤더가 다름: {header}")
        rows = [row for row in reader if len(row) == len(SWEEP_HEADER) and all(row)]
        self._rewrite(rows)
        self.completed = {row[0]: dict(zip(SWEEP_HEADER, row)) for row in rows}
        if self.completed:
            logger.info("sweep.csv 이어쓰기: 완료된 행 %d개", len(self.completed))

    def _rewrite(self, rows: List[List[str]]) -> None:
        with open(self.path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SWEEP_HEADER)
            writer.writerows(rows)

    def is_done(self, type1: float) -> bool:
        return format_float(type1) in self.completed

    def append(self, values: Sequence[float]) -> None:
        row = [format_float(v) for v in values]
        with open(self.path, "a", newline="", encoding="utf-8") as f:
            csv.writer(f, lineterminator="\n").writerow(row)
            f.flush()
            os.fsync(f.fileno())
        self.completed[row[0]] = dict(zip(SWEEP_HEADER, row))


# ──────────────────────────────────────────
# 표본 기록 / 메타데이터 / 패턴
# ──────────────────────────────────────────

def records_filename(type1: float, family: str) -> str:
    return f"records_{format_float(type1)}_{family}.csv"


def write_records(path, rows: Iterable[Sequence[int]], with_run: bool = False) -> Path:
    """(sample_id, a, d[, run]) 행 기록"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = RECORD_HEADER + (["run"] if with_run else [])
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def read_records(path) -> List[Dict[str, int]]:
    """records CSV → 정수 열 사전 목록 (run 열은 있으면 포함)"""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"기록 파일 없음: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(RECORD_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ConfigurationError(f"기록 파일에 열이 없음: {sorted(missing)}")
        try:
            return [{key: int(value) for key, value in row.items()} for row in reader]
        except ValueError as e:
            raise ConfigurationError(f"기록 파일 파싱 실패: {path} ({e})") from e


def write_meta(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
    return path


def read_bit_grid(path):
    """0/1 텍스트 격자 파일 → 2차원 배열 (직사각형 허용)"""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"격자 파일 없음: {path}")
    try:
        return parse_bit_grid(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigurationError(f"격자 파일 형식 오류: {path} ({e})") from e


def dump_pattern(directory, name: str, pattern: ChannelPattern) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.txt"
    path.write_text(pattern.to_text() + "\n", encoding="utf-8")
    return path
