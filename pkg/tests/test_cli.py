import json

from app.pipeline import storage
from main import main


class TestCli:
    """명령행 하위 명령과 종료 코드"""

    def test_roc(self, tmp_path, capsys):
        out = tmp_path / "roc.csv"
        code = main(["roc", "--a-grid", "64", "--b-grid", "64", "--points", "6", "--schemes", "--out", str(out)])
        assert code == 0
        classical, quantum = storage.read_roc_csv(out)
        assert len(classical.points) == 6
        assert classical.points[0][1] > quantum.points[0][1]
        assert "끝점" in capsys.readouterr().out

    def test_cluster_dbscan(self, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text("0000000\n0111110\n0111110\n0000000\n1000000\n", encoding="utf-8")
        assert main(["cluster", "--input", str(grid)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# 군집 1개, 잡음 1개")
        assert lines[1] == "row,col,label"
        assert lines[-1] == "4,0,0"

    def test_cluster_kmedoids(self, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text("1100000\n1100000\n0000000\n0000011\n0000011\n", encoding="utf-8")
        assert main(["cluster", "--input", str(grid), "--algo", "kmedoids"]) == 0
        out = capsys.readouterr().out
        assert "# medoids:" in out
        assert "비용 8" in out

    def test_cluster_rectangular_grid(self, tmp_path, capsys):
        """정사각이 아닌 3×8 격자도 읽는다"""
        grid = tmp_path / "wide.txt"
        grid.write_text("00000011\n00000011\n10000000\n", encoding="utf-8")
        assert main(["cluster", "--input", str(grid), "--min-pts", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# 군집 1개, 잡음 1개")
        assert lines[2:] == ["0,6,1", "0,7,1", "1,6,1", "1,7,1", "2,0,0"]

    def test_cluster_malformed_grid_exit_2(self, tmp_path):
        """행 길이가 다르거나 0/1 이외 문자가 있으면 설정 오류"""
        ragged = tmp_path / "ragged.txt"
        ragged.write_text("0110\n011\n", encoding="utf-8")
        assert main(["cluster", "--input", str(ragged)]) == 2
        letters = tmp_path / "letters.txt"
        letters.write_text("01x0\n0110\n", encoding="utf-8")
        assert main(["cluster", "--input", str(letters)]) == 2

    def test_mi_joint(self, tmp_path, capsys):
        path = storage.write_records(tmp_path / "records.csv", ([i, i % 2, i % 2] for i in range(40)))
        assert main(["mi", "--records", str(path), "--max-a", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == 1.0
        assert payload["method"] == "joint-plugin"

    def test_mi_fixed_a(self, tmp_path, capsys):
        rows = [[i, 0, i % 2, 0] for i in range(40)]
        rows += [[i, 0, i % 2, run] for run in (1, 2) for i in range(40)]
        path = storage.write_records(tmp_path / "records.csv", rows, with_run=True)
        assert main(["mi", "--records", str(path), "--scheme", "fixed-a"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == 0.0
        assert payload["method"] == "fixed-A-scheme"

    def test_simulate(self, capsys):
        code = main([
            "simulate", "--scenario", "particles", "--side", "20", "--type1", "0.01",
            "--type2", "0.1", "--samples", "22", "--seed", "3",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["samples"] == 22
        assert payload["type2"] == 0.1

    def test_configuration_errors_exit_2(self, tmp_path):
        assert main(["simulate", "--type1", "0.01"]) == 2
        assert main(["mi", "--records", str(tmp_path / "missing.csv"), "--max-a", "1"]) == 2
        assert main(["cluster", "--input", str(tmp_path / "missing.txt")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text('{"scenario": "particles", "grid": {"side": 20}, "colour": 1}', encoding="utf-8")
        assert main(["sweep", "--config", str(bad), "--out", str(tmp_path / "out")]) == 2

    def test_mi_joint_needs_max_a(self, tmp_path):
        path = storage.write_records(tmp_path / "records.csv", [[0, 0, 0]])
        assert main(["mi", "--records", str(path)]) == 2

    def test_domain_error_exit_code(self, tmp_path):
        """층 크기가 다르면 DomainError → 2"""
        path = storage.write_records(tmp_path / "records.csv", [[0, 0, 0], [1, 0, 1], [2, 1, 0]])
        assert main(["mi", "--records", str(path), "--max-a", "1"]) == 2


class TestDiagnoseStates:
    """출력 상태 진단 스크립트"""

    def test_prints_parameters_and_states(self, capsys):
        from scripts import diagnose_states

        diagnose_states.main(["--a", "0.5"])
        out = capsys.readouterr().out
        assert "n̄₀=" in out
        assert "광자 계수 끝점" in out
        assert "--- a = 0.5 ---" in out
        assert out.count("Helstrom b=") == 3
