"""
배치 순환(cyclic) Jacobi 고유값 분해

작은 실대칭 행렬 묶음 (batch, n, n)을 한 번에 대각화한다.
회전은 배치 전체에 벡터화되어 적용되므로 양자 ROC 격자
(수십만 개의 8×8 행렬)도 파이썬 루프 없이 처리된다.
"""

import logging
from typing import Tuple

import numpy as np

from app.errors import NumericConsistencyError

logger = logging.getLogger(__name__)

# 비대각 노름 수렴 기준
OFF_DIAGONAL_TOL = 1e-13
MAX_SWEEPS = 50


def off_diagonal_norm(a: np.ndarray) -> np.ndarray:
    """행렬별 비대각 원소 프로베니우스 노름 (대각 행렬이면 정확히 0)"""
    n = a.shape[-1]
    off = a * (1.0 - np.eye(n))
    return np.sqrt(np.einsum("...ij,...ij->...", off, off))


def jacobi_eigh(
    matrices: np.ndarray,
    tol: float = OFF_DIAGONAL_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> Tuple[np.ndarray, np.ndarray]:
    """실대칭 행렬(들)의 고유값/고유벡터.

    Args:
        matrices: (n, n) 또는 (batch, n, n) 실대칭 행렬
        tol: 비대각 노름 수렴 기준
        max_sweeps: 최대 스윕 횟수

    Returns:
        (eigenvalues, eigenvectors) — 고유값 오름차순,
        고유벡터는 열(column) 단위
    """
    a = np.array(matrices, dtype=float, copy=True)
    single = a.ndim == 2
    if single:
        a = a[np.newaxis]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"정사각 행렬 묶음이 아님: shape={a.shape}")

    batch, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), a.shape).copy()

    converged = False
    for _ in range(max_sweeps):
        if np.all(off_diagonal_norm(a) < tol):
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                if not np.any(apq):
                    continue
                rotate = apq != 0.0
                safe_apq = np.where(rotate, apq, 1.0)
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe_apq)
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_col, s_col = c[:, np.newaxis], s[:, np.newaxis]

                col_p, col_q = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c_col * col_p - s_col * col_q
                a[:, :, q] = s_col * col_p + c_col * col_q
                row_p, row_q = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c_col * row_p - s_col * row_q
                a[:, q, :] = s_col * row_p + c_col * row_q
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vec_p, vec_q = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = c_col * vec_p - s_col * vec_q
                v[:, :, q] = s_col * vec_p + c_col * vec_q
    else:
        converged = bool(np.all(off_diagonal_norm(a) < tol))

    if not converged:
        worst = float(off_diagonal_norm(a).max())
        raise NumericConsistencyError(
            f"Jacobi 분해가 {max_sweeps}회 스윕 내에 수렴하지 않음 (비대각 노름 {worst:.3e})"
        )

    eigenvalues = np.einsum("...ii->...i", a).copy()
    order = np.argsort(eigenvalues, axis=-1, kind="stable")
    eigenvalues = np.take_along_axis(eigenvalues, order, axis=-1)
    eigenvectors = np.take_along_axis(v, order[:, np.newaxis, :], axis=-1)

    if single:
        return eigenvalues[0], eigenvectors[0]
    return eigenvalues, eigenvectors
