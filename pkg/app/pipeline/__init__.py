"""실험 파이프라인: 난수 스트림, 실행기, 결과 저장"""
