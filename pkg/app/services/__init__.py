"""
계산 서비스 패키지

주요 구성:
- linalg: 배치 순환 Jacobi 고유값 분해
- probe_roc: 고전/양자 ROC 계산
- scene: 정답(A)과 채널 패턴(B) 생성
- channel: 측정 잡음 채널 (B → C)
- clustering: k-medoids(PAM), DBSCAN
- infotheory: plugin 엔트로피/상호정보량 추정
"""
