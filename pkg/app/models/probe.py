"""탐침 계산 중간 결과 모델 (공분산 행렬, 대각화 파라미터, 3-큐비트 상태)"""

import math
from dataclasses import dataclass

import numpy as np

# 2모드 쌍대(symplectic) 형식 Ω, (x₁,p₁,x₂,p₂) 순서
OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))

# 3-큐비트 기저 |제어, 모드1 큐비트, 모드2 큐비트⟩ 레이블
THREE_QUBIT_BASIS = ("000", "001", "010", "011", "100", "101", "110", "111")


@dataclass(frozen=True)
class CovarianceMatrix2Mode:
    """2모드 가우시안 상태 공분산 행렬 (진공 = 항등행렬)"""
    entries: np.ndarray

    def symplectic_eigenvalues(self) -> tuple:
        """(ν₋, ν₊). 에르미트 행렬 i·V^½ Ω V^½ 의 고유값 ±ν 에서 얻는다.

        Δ = det A + det B + 2 det C 닫힌 형식은 ν₋ = ν₊ 근처(τ → 1)에서
        판별식 상쇄로 정밀도를 잃는다.
        """
        w, u = np.linalg.eigh(self.entries)
        root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T
        spectrum = np.sort(np.abs(np.linalg.eigvalsh(1j * root @ OMEGA @ root)))
        return float(spectrum[0]), float(spectrum[2])

    def delta_invariant(self) -> float:
        """Δ = det A + det B + 2 det C (ν₋² + ν₊² 와 같다)"""
        v = self.entries
        return float(np.linalg.det(v[:2, :2]) + np.linalg.det(v[2:, 2:]) + 2.0 * np.linalg.det(v[:2, 2:]))

    def is_bona_fide(self, tol: float = 1e-9) -> bool:
        v = self.entries
        if not np.allclose(v, v.T, atol=tol):
            return False
        return self.symplectic_eigenvalues()[0] >= 1.0 - tol


@dataclass(frozen=True)
class DiagonalizationParams:
    """채널별 열적 광자 수 n̄ᵢ, 대각화 스퀴징 rᵢ, 상대 스퀴징 r

    relative_sign: r = relative_sign·(r0 − r1) 중 잔차 검사를 통과한 부호
    """
    nbar0: float
    nbar1: float
    r0: float
    r1: float
    r: float
    relative_sign: int = 1

    @property
    def x0(self) -> float:
        return 1.0 / (self.nbar0 + 1.0)

    @property
    def x1(self) -> float:
        return 1.0 / (self.nbar1 + 1.0)

    @property
    def y(self) -> float:
        return 1.0 / math.cosh(self.r)


@dataclass(frozen=True)
class ThreeQubitState:
    """CV→DV 축약 후의 8×8 실대칭 밀도 행렬"""
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.entries))
