"""3-큐비트 출력 상태 진단 스크립트.

채널 쌍의 대각화 파라미터(n̄ᵢ, rᵢ, r)와 몇 개의 a 값에서 ρ₀ₐ, ρ₁ₐ의
0이 아닌 원소, 대각합, 최소 고유값을 출력한다. 양자 ROC가 예상과 다를 때
어느 단계에서 어긋나는지 확인하는 용도.

실행: python scripts/diagnose_states.py [--tau0 0.95] [--tau1 0.4] [--m 8] [--a 0 0.5 1]
"""

import argparse
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

logging.basicConfig(level=logging.WARNING)


def main(argv=None):
    from app.models.probe import THREE_QUBIT_BASIS
    from app.schemas.probe import LossChannelPair
    from app.services.linalg import jacobi_eigh
    from app.services.probe_roc import (
        build_output_states,
        classical_beta,
        classical_fidelity,
        diagonalizing_params,
        endpoint_schemes,
        helstrom_errors,
    )

    parser = argparse.ArgumentParser(description="3-큐비트 출력 상태 진단")
    parser.add_argument("--tau0", type=float, default=0.95)
    parser.add_argument("--tau1", type=float, default=0.4)
    parser.add_argument("--m", type=float, default=8.0)
    parser.add_argument("--a", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    args = parser.parse_args(argv)

    pair = LossChannelPair(tau0=args.tau0, tau1=args.tau1, mean_photons=args.m)
    params = diagonalizing_params(pair)
    fidelity = classical_fidelity(pair)

    print(f"\n{'='*60}")
    print(f"  채널 쌍: τ₀={pair.tau0}, τ₁={pair.tau1}, m={pair.mean_photons}")
    print(f"{'='*60}")
    print(f"  n̄₀={params.nbar0:.6f}  n̄₁={params.nbar1:.6f}  (m(1−τ): {args.m * (1 - args.tau0):.6f}, {args.m * (1 - args.tau1):.6f})")
    print(f"  r₀={params.r0:.6f}  r₁={params.r1:.6f}  r={params.r:.6f} (부호 {params.relative_sign:+d})")
    print(f"  x₀={params.x0:.6f}  x₁={params.x1:.6f}  y²={params.y ** 2:.6f}")
    print(f"  고전 F={fidelity:.6f}, β(α=0)={classical_beta(0.0, fidelity):.6f}")
    for alpha, beta in endpoint_schemes(pair).points:
        print(f"  광자 계수 끝점: α={alpha:.6f}, β={beta:.6f}")

    for a in args.a:
        rho0, rho1 = build_output_states(pair, a)
        print(f"\n  --- a = {a} ---")
        for label, state in (("ρ₀", rho0), ("ρ₁", rho1)):
            eigenvalues, _ = jacobi_eigh(state.entries)
            print(f"  {label}: 대각합 {state.trace:.15f}, 최소 고유값 {eigenvalues.min():.3e}, 0 아닌 원소 {state.nonzero_count()}개")
            rows, cols = state.entries.nonzero()
            for i, j in zip(rows, cols):
                if i <= j:
                    print(f"    ⟨{THREE_QUBIT_BASIS[i]}|{label}|{THREE_QUBIT_BASIS[j]}⟩ = {state.entries[i, j]:.6f}")
        for b in (0.0, 0.5, 1.0):
            alpha, beta = helstrom_errors(rho0, rho1, b)
            print(f"  Helstrom b={b}: α={alpha:.6f}, β={beta:.6f}")


if __name__ == "__main__":
    main()
