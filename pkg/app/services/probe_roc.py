"""
순수 손실 채널 판별 ROC 계산 서비스

두 순수 손실 채널 C₀(투과율 tau0, 입자 없음)과 C₁(투과율 tau1, 입자 있음)을
픽셀당 평균 광자 수 m 제약 아래에서 판별할 때의 ROC를 계산한다.

  - 고전 탐침: 코히어런트 상태 혼합 중 최적 → 출력 충실도 F = χ^m,
    순수 상태 판별의 (α, β) 닫힌 형식으로 정확한 하한 곡선
  - 양자 탐침: TMSV + 제어 스퀴징 측정 → 3-큐비트 축약 상태의
    Helstrom 측정으로 달성 가능한 상한 곡선 (하부 볼록 껍질)

오류 정의:
  α (1종 오류) = 입자가 없을 때(C₀) 있다고 판정할 확률
  β (2종 오류) = 입자가 있을 때(C₁) 없다고 판정할 확률
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.errors import DomainError, NumericConsistencyError
from app.models.probe import CovarianceMatrix2Mode, DiagonalizationParams, ThreeQubitState
from app.schemas.probe import LossChannelPair, RocCurve
from app.services.linalg import jacobi_eigh
from config.settings import settings

logger = logging.getLogger(__name__)

# 음의 고유공간 판정 기준 (0 근처 반올림 오차로 사영자가 뒤집히지 않도록)
NEGATIVE_EIGENVALUE_TOL = 1e-12

# 대각화 잔차 허용치
DIAGONALIZATION_TOL = 1e-9

# 3-큐비트 상태 불변식 허용치
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

# 양자 ROC 격자를 나눠 처리할 a 값 묶음 크기
A_CHUNK = 32


# ──────────────────────────────────────────
# 고전 탐침
# ──────────────────────────────────────────

def loss_overlap(pair: LossChannelPair) -> float:
    """광자 하나당 출력 충실도 χ = exp[−½|√τ₀ − √τ₁|²]"""
    gap = math.sqrt(pair.tau0) - math.sqrt(pair.tau1)
    return math.exp(-0.5 * gap * gap)


def classical_fidelity(pair: LossChannelPair) -> float:
    """평균 광자 수 m인 코히어런트 탐침의 출력 충실도 F = χ^m (고전 최적)"""
    return loss_overlap(pair) ** pair.mean_photons


def classical_alpha(beta: float, fidelity: float) -> float:
    """충실도 F인 두 순수 상태 판별에서 주어진 β에 대한 최소 α.

    α = β − 2βF² + F(F − 2√((1−β)β(1−F²))), 단조 분기 β ∈ [0, F²]만 허용.
    """
    f2 = fidelity * fidelity
    if not (0.0 <= beta <= f2 + 1e-15):
        raise DomainError(f"beta={beta}가 단조 분기 [0, F²={f2:.6g}]를 벗어남")
    beta = min(beta, f2)
    radical = math.sqrt(max((1.0 - beta) * beta * (1.0 - f2), 0.0))
    alpha = beta - 2.0 * beta * f2 + fidelity * (fidelity - 2.0 * radical)
    return min(max(alpha, 0.0), f2)


def classical_beta(alpha: float, fidelity: float) -> float:
    """classical_alpha의 역함수. [0, F²]에서 이분법으로 β를 찾는다.

    α(β)는 분기 위에서 단조 감소한다. 구간이 부동소수 해상도까지
    줄어들 때까지 반복하므로 절대 오차는 1e-12보다 훨씬 작다.
    """
    f2 = fidelity * fidelity
    if not (0.0 <= alpha <= f2 + 1e-15):
        raise DomainError(f"alpha={alpha}가 [0, F²={f2:.6g}]를 벗어남")
    lo, hi = 0.0, f2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if classical_alpha(mid, fidelity) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mixture_fidelity_candidate(n0: float, p0: float, pair: LossChannelPair) -> float:
    """두 점 혼합 탐침 p₀δ(n₀) + (1−p₀)δ(n₀+Δ)의 충실도 하한.

    f = χ^{n₀}(p₀ + (1−p₀)χ^Δ), Δ = (m − n₀)/(1 − p₀).
    순수 코히어런트 탐침의 최적성 검증에만 사용한다.
    """
    m = pair.mean_photons
    if n0 < 0.0 or n0 > m + 1e-12:
        raise DomainError(f"n0={n0}가 [0, m={m}]를 벗어남")
    if not (0.0 <= p0 < 1.0):
        raise DomainError(f"p0={p0}가 [0, 1)을 벗어남")
    chi = loss_overlap(pair)
    delta = max(m - n0, 0.0) / (1.0 - p0)
    return chi ** n0 * (p0 + (1.0 - p0) * chi ** delta)


def classical_roc(
    pair: LossChannelPair,
    alpha_max: float,
    n_points: int,
) -> RocCurve:
    """[0, alpha_max] 균등 격자에서 샘플링한 고전 최적 ROC.

    α ≥ F² 구간은 (F², 0) 전략과 '항상 입자 있음' 전략의 시분할로
    β = 0이 달성된다.
    """
    if n_points < 2:
        raise DomainError(f"n_points={n_points} (2 이상 필요)")
    fidelity = classical_fidelity(pair)
    f2 = fidelity * fidelity
    points = []
    for alpha in np.linspace(0.0, alpha_max, n_points):
        alpha = float(alpha)
        beta = classical_beta(alpha, fidelity) if alpha <= f2 else 0.0
        points.append((alpha, beta))
    return RocCurve(kind="classical-optimal-lower-bound", points=points)


# ──────────────────────────────────────────
# 가우시안 탐침 — 공분산 행렬과 대각화
# ──────────────────────────────────────────

PAULI_Z = np.diag([1.0, -1.0])


def tmsv_output_covariance(tau: float, m: float) -> CovarianceMatrix2Mode:
    """TMSV 신호 모드를 투과율 τ 손실 채널에 통과시킨 뒤의 공분산 행렬.

    블록 순서는 (보관 모드, 신호 모드):
      [[(2m+1)I, 2√(τm(m+1))Z], [2√(τm(m+1))Z, (2mτ+1)I]]
    """
    if not (0.0 < tau <= 1.0) or m < 0.0:
        raise DomainError(f"tau={tau}, m={m} 범위 오류")
    eye = np.eye(2)
    a = 2.0 * m + 1.0
    b = 2.0 * m * tau + 1.0
    c = 2.0 * math.sqrt(tau * m * (m + 1.0))
    entries = np.block([[a * eye, c * PAULI_Z], [c * PAULI_Z, b * eye]])
    return CovarianceMatrix2Mode(entries=entries)


def two_mode_squeezing_symplectic(r: float) -> np.ndarray:
    """2모드 스퀴징 U(r)의 쌍대 행렬 [[cosh r·I, sinh r·Z], [sinh r·Z, cosh r·I]]"""
    eye = np.eye(2)
    ch, sh = math.cosh(r), math.sinh(r)
    return np.block([[ch * eye, sh * PAULI_Z], [sh * PAULI_Z, ch * eye]])


def diagonal_form(nbar: float) -> np.ndarray:
    """(보관 모드 열상태, 신호 모드 진공) 대각 공분산 diag(2n̄+1, 2n̄+1, 1, 1)"""
    nu = 2.0 * nbar + 1.0
    return np.diag([nu, nu, 1.0, 1.0])


def swap_modes(v: np.ndarray) -> np.ndarray:
    """두 모드의 순서를 바꾼다: diag(ν,ν,1,1) ↔ diag(1,1,ν,ν)"""
    perm = np.array([2, 3, 0, 1])
    return v[np.ix_(perm, perm)]


def _conjugate(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    return s @ v @ s.T


def _channel_diagonalization(tau: float, m: float) -> Tuple[float, float]:
    """한 채널 출력의 (n̄, r). 잔차 검사를 통과하지 못하면 예외."""
    cov = tmsv_output_covariance(tau, m)
    _, nu_plus = cov.symplectic_eigenvalues()
    nbar = max((nu_plus - 1.0) / 2.0, 0.0)

    v = cov.entries
    a, b, c = v[0, 0], v[2, 2], v[0, 2]
    r = 0.5 * math.atanh(2.0 * c / (a + b))

    residual = np.abs(_conjugate(two_mode_squeezing_symplectic(-r), v) - diagonal_form(nbar)).max()
    if residual > DIAGONALIZATION_TOL:
        raise NumericConsistencyError(
            f"tau={tau}, m={m} 대각화 잔차 {residual:.3e} > {DIAGONALIZATION_TOL}"
        )
    return nbar, r


@lru_cache(maxsize=256)
def diagonalizing_params(pair: LossChannelPair) -> DiagonalizationParams:
    """두 채널 출력의 열적 광자 수 n̄ᵢ와 대각화 스퀴징 rᵢ, 상대 스퀴징 r.

    n̄ᵢ는 큰 쌍대 고유값 ν₊ = 2n̄ᵢ+1에서, rᵢ는 tanh(2rᵢ) = 2Cᵢ/(Aᵢ+Bᵢ)에서 얻는다.
    상대 스퀴징 r = ±(r₀ − r₁)의 부호는 C₀ 대각화 기준계에서 C₁ 출력을
    다시 대각화하는 잔차 검사로 정한다.
    """
    m = pair.mean_photons
    nbar0, r0 = _channel_diagonalization(pair.tau0, m)
    nbar1, r1 = _channel_diagonalization(pair.tau1, m)

    conjectured = (m * (1.0 - pair.tau0), m * (1.0 - pair.tau1))
    if abs(nbar0 - conjectured[0]) > 1e-9 or abs(nbar1 - conjectured[1]) > 1e-9:
        logger.warning(
            "n̄ = m(1−τ) 닫힌 형식과 불일치: 계산값 (%.12g, %.12g), 닫힌 형식 (%.12g, %.12g)",
            nbar0, nbar1, conjectured[0], conjectured[1],
        )

    v1 = tmsv_output_covariance(pair.tau1, m).entries
    in_frame0 = _conjugate(two_mode_squeezing_symplectic(-r0), v1)
    target = diagonal_form(nbar1)
    for sign in (1, -1):
        r = sign * (r0 - r1)
        residual = np.abs(_conjugate(two_mode_squeezing_symplectic(r), in_frame0) - target).max()
        if residual <= DIAGONALIZATION_TOL:
            if sign < 0:
                logger.info("상대 스퀴징 부호 반전 적용 (r = r1 − r0)")
            return DiagonalizationParams(
                nbar0=nbar0, nbar1=nbar1, r0=r0, r1=r1, r=r, relative_sign=sign,
            )
    raise NumericConsistencyError(f"상대 스퀴징 잔차 검사 실패: pair={pair}")


# ──────────────────────────────────────────
# 3-큐비트 축약 상태
# ──────────────────────────────────────────

def _output_state_stack(
    params: DiagonalizationParams,
    a_values: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """a 값마다 (ρ₀ₐ, ρ₁ₐ)를 쌓은 (len(a), 8, 8) 배열 두 개.

    기저 |제어, 모드1 큐비트, 모드2 큐비트⟩. 모드1은 측정하는(진공) 모드,
    모드2는 열상태 모드다.
    """
    a = np.asarray(a_values, dtype=float).reshape(-1)
    if np.any((a < 0.0) | (a > 1.0)):
        raise DomainError(f"a 값은 [0, 1] 범위여야 함: {a}")
    y = params.y
    y2 = y * y
    coherence = np.sqrt(a * (1.0 - a))

    stacks = []
    for x, squeezed_branch in ((params.x0, 1), (params.x1, 0)):
        d1 = 1.0 - (1.0 - x) * y
        d2 = 1.0 - (1.0 - x) * y2
        vac = x * y2
        single = (1.0 - x) * x * y2 * y2 / d2
        both = (1.0 - y2) / d2

        rho = np.zeros((a.size, 8, 8))
        if squeezed_branch:
            # C₀: 제어 |0⟩ → 항등, 제어 |1⟩ → U 적용
            rho[:, 0, 0] = a * x
            rho[:, 1, 1] = a * (1.0 - x)
            rho[:, 4, 4] = (1.0 - a) * vac
            rho[:, 5, 5] = (1.0 - a) * single
            rho[:, 7, 7] = (1.0 - a) * both
        else:
            # C₁: U₀ 기준계에서 이미 U†로 회전된 상태
            rho[:, 0, 0] = a * vac
            rho[:, 1, 1] = a * single
            rho[:, 3, 3] = a * both
            rho[:, 4, 4] = (1.0 - a) * x
            rho[:, 5, 5] = (1.0 - a) * (1.0 - x)
        rho[:, 0, 4] = rho[:, 4, 0] = coherence * x * y
        rho[:, 1, 5] = rho[:, 5, 1] = coherence * (1.0 - x) * x * y2 / d1
        stacks.append(rho)
    return stacks[0], stacks[1]


def _validate_state(entries: np.ndarray, label: str) -> None:
    trace = float(np.trace(entries))
    if abs(trace - 1.0) > TRACE_TOL:
        raise NumericConsistencyError(f"{label} 대각합 {trace!r} ≠ 1")
    if not np.allclose(entries, entries.T, atol=0.0):
        raise NumericConsistencyError(f"{label} 대칭 아님")
    eigenvalues, _ = jacobi_eigh(entries)
    if eigenvalues.min() < -PSD_TOL:
        raise NumericConsistencyError(f"{label} 최소 고유값 {eigenvalues.min():.3e} < −{PSD_TOL}")


def build_output_states(pair: LossChannelPair, a: float) -> Tuple[ThreeQubitState, ThreeQubitState]:
    """제어 가중치 a에서의 3-큐비트 출력 상태 (ρ₀ₐ: 채널 C₀, ρ₁ₐ: 채널 C₁)"""
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"a={a}가 [0, 1]을 벗어남")
    rho0, rho1 = _output_state_stack(diagonalizing_params(pair), [a])
    _validate_state(rho0[0], f"ρ₀(a={a})")
    _validate_state(rho1[0], f"ρ₁(a={a})")
    return ThreeQubitState(entries=rho0[0]), ThreeQubitState(entries=rho1[0])


# ──────────────────────────────────────────
# Helstrom 측정
# ──────────────────────────────────────────

def _helstrom_batch(
    rho0: np.ndarray,
    rho1: np.ndarray,
    weights: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """배치 Helstrom 오류. Π = {(1−b)ρ₁ − bρ₀}₋ 는 'C₀으로 판정' 사영자."""
    b = np.asarray(weights, dtype=float).reshape(-1, 1, 1)
    difference = (1.0 - b) * rho1 - b * rho0
    eigenvalues, eigenvectors = jacobi_eigh(difference)
    negative = eigenvalues < -NEGATIVE_EIGENVALUE_TOL

    overlap0 = np.einsum("nik,nij,njk->nk", eigenvectors, rho0, eigenvectors)
    overlap1 = np.einsum("nik,nij,njk->nk", eigenvectors, rho1, eigenvectors)
    alpha = 1.0 - np.where(negative, overlap0, 0.0).sum(axis=-1)
    beta = np.where(negative, overlap1, 0.0).sum(axis=-1)
    return np.clip(alpha, 0.0, 1.0), np.clip(beta, 0.0, 1.0)


def helstrom_errors(rho0: ThreeQubitState, rho1: ThreeQubitState, b: float) -> Tuple[float, float]:
    """가중치 b의 Helstrom 측정 오류 (α, β).

    α = Tr[(1−Π)ρ₀], β = Tr[Πρ₁], Π는 (1−b)ρ₁ − bρ₀의 음의 고유공간 사영자.
    """
    if not (0.0 <= b <= 1.0):
        raise DomainError(f"b={b}가 [0, 1]을 벗어남")
    alpha, beta = _helstrom_batch(rho0.entries[np.newaxis], rho1.entries[np.newaxis], np.array([b]))
    return float(alpha[0]), float(beta[0])


# ──────────────────────────────────────────
# 양자 ROC (하부 볼록 껍질)
# ──────────────────────────────────────────

def weight_grid(size: int) -> np.ndarray:
    """b 격자. 절반은 균등, 나머지는 b = 0, 1 근처에 로그 간격으로 조밀"""
    if size < 2:
        raise DomainError(f"격자 크기 {size} (2 이상 필요)")
    uniform_count = max(size // 2, 2)
    tail_count = max((size - uniform_count) // 2, 1)
    near = 0.5 * np.logspace(-12, 0, tail_count, endpoint=False)
    grid = np.concatenate([np.linspace(0.0, 1.0, uniform_count), near, 1.0 - near])
    return np.unique(np.clip(grid, 0.0, 1.0))


def _cross(o: Tuple[float, float], p: Tuple[float, float], q: Tuple[float, float]) -> float:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def lower_convex_hull(points: np.ndarray) -> List[Tuple[float, float]]:
    """(α, β) 점구름의 하부 볼록 껍질 (α 오름차순). 입력 순서에 무관."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.size == 0:
        raise NumericConsistencyError("빈 점구름")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    first_of_alpha = np.ones(len(pts), dtype=bool)
    first_of_alpha[1:] = pts[1:, 0] != pts[:-1, 0]
    pts = pts[first_of_alpha]

    hull: List[Tuple[float, float]] = []
    for alpha, beta in pts:
        point = (float(alpha), float(beta))
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0.0:
            hull.pop()
        hull.append(point)

    # 최솟값 이후 상승 구간 제거 (β 비증가)
    lowest = min(range(len(hull)), key=lambda i: (hull[i][1], i))
    return hull[: lowest + 1]


def _restrict(hull: List[Tuple[float, float]], alpha_max: Optional[float]) -> List[Tuple[float, float]]:
    if hull[0][0] > 0.0:
        raise NumericConsistencyError(f"양자 ROC가 α=0에서 시작하지 않음 (α_min={hull[0][0]:.3e})")
    if alpha_max is None:
        return hull
    kept = [p for p in hull if p[0] <= alpha_max]
    following = [p for p in hull if p[0] > alpha_max]
    if kept[-1][0] < alpha_max and following:
        (a0, b0), (a1, b1) = kept[-1], following[0]
        beta = b0 + (b1 - b0) * (alpha_max - a0) / (a1 - a0)
        kept.append((float(alpha_max), float(beta)))
    elif kept[-1][0] < alpha_max:
        # 껍질이 α_max 전에 최솟값(보통 β=0)에 닿으면 그 β를 α_max까지 유지
        kept.append((float(alpha_max), float(kept[-1][1])))
    return kept


def quantum_roc(
    pair: LossChannelPair,
    a_grid_size: Optional[int] = None,
    b_grid_size: Optional[int] = None,
    alpha_max: Optional[float] = None,
) -> RocCurve:
    """(a, b) 격자 전체의 Helstrom 오류 점구름으로부터 양자 달성 ROC.

    볼록 결합은 측정 설정의 고전적 무작위화(시분할)로 달성되므로
    점구름의 하부 볼록 껍질을 곡선으로 쓴다.
    """
    a_grid_size = settings.QUANTUM_A_GRID if a_grid_size is None else a_grid_size
    b_grid_size = settings.QUANTUM_B_GRID if b_grid_size is None else b_grid_size
    alpha_max = settings.ALPHA_MAX if alpha_max is None else alpha_max
    if a_grid_size < 2 or b_grid_size < 2:
        raise DomainError(f"격자 크기 ({a_grid_size}, {b_grid_size}), 2 이상 필요")

    a_values = np.linspace(0.0, 1.0, a_grid_size)
    b_values = weight_grid(b_grid_size)
    rho0, rho1 = _output_state_stack(diagonalizing_params(pair), a_values)

    logger.info(
        "양자 ROC 계산 시작: pair=%s, a 격자 %d, b 격자 %d",
        pair, a_values.size, b_values.size,
    )
    alphas, betas = [], []
    for start in range(0, a_values.size, A_CHUNK):
        chunk0 = rho0[start:start + A_CHUNK]
        chunk1 = rho1[start:start + A_CHUNK]
        shape = (chunk0.shape[0], b_values.size, 8, 8)
        batch0 = np.broadcast_to(chunk0[:, np.newaxis], shape).reshape(-1, 8, 8)
        batch1 = np.broadcast_to(chunk1[:, np.newaxis], shape).reshape(-1, 8, 8)
        weights = np.broadcast_to(b_values, shape[:2]).reshape(-1)
        alpha, beta = _helstrom_batch(batch0, batch1, weights)
        alphas.append(alpha)
        betas.append(beta)

    cloud = np.column_stack([np.concatenate(alphas), np.concatenate(betas)])
    cloud[np.abs(cloud) < NEGATIVE_EIGENVALUE_TOL] = 0.0
    hull = lower_convex_hull(cloud)
    points = _restrict(hull, alpha_max)
    logger.info(
        "양자 ROC 계산 완료: 점구름 %d개, 껍질 꼭짓점 %d개, β(0)=%.6f",
        len(cloud), len(points), points[0][1],
    )
    return RocCurve(kind="quantum-achievable-upper-bound", points=points)


def endpoint_schemes(pair: LossChannelPair) -> RocCurve:
    """두 광자 계수 측정 방식의 시분할 직선.

    방식 A (스퀴징 없이 모드1 계수): α = 0, β = x₁y²/(1−(1−x₁)y²)
    방식 B (U 적용 후 모드1 계수):   α = x₀y²/(1−(1−x₀)y²), β = 0
    """
    params = diagonalizing_params(pair)
    y2 = params.y ** 2
    beta_a = params.x1 * y2 / (1.0 - (1.0 - params.x1) * y2)
    alpha_b = params.x0 * y2 / (1.0 - (1.0 - params.x0) * y2)
    if alpha_b <= 0.0:
        # 동일 채널: 두 방식이 같은 점으로 축퇴
        return RocCurve(kind="time-sharing", points=[(0.0, beta_a)])
    return RocCurve(kind="time-sharing", points=[(0.0, beta_a), (alpha_b, 0.0)])


def roc_lookup(curve: RocCurve, alpha: float) -> float:
    """곡선 위 선형 보간으로 β(α)"""
    lo, hi = curve.alpha_min, curve.alpha_max
    if alpha < lo - 1e-12 or alpha > hi + 1e-12:
        raise DomainError(f"alpha={alpha}가 곡선 정의역 [{lo}, {hi}]를 벗어남")
    alphas = np.array([p[0] for p in curve.points])
    betas = np.array([p[1] for p in curve.points])
    return float(np.interp(min(max(alpha, lo), hi), alphas, betas))
