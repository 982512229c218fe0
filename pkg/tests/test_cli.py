"""Command-line front end round trips."""

import json

import numpy as np

import iterauction as ia
from iterauction.cli import main
from iterauction.mvnn import InitHyper, init_params


class TestCli:
    def test_generate_writes_instance(self, tmp_path):
        out = tmp_path / "inst.json"
        assert main(["generate", "--n", "2", "--m", "4", "--seed", "3",
                     "--out", str(out)]) == 0
        inst = ia.AuctionInstance.from_json(out.read_text())
        assert inst.n == 2 and inst.m == 4

    def test_solve_wdp_on_generated_instance(self, tmp_path):
        inst_path = tmp_path / "inst.json"
        main(["generate", "--n", "2", "--m", "4", "--seed", "3", "--out", str(inst_path)])
        out = tmp_path / "sol.json"
        assert main(["solve-wdp", "--instance", str(inst_path), "--relative-gap", "0",
                     "--out", str(out)]) == 0
        sol = json.loads(out.read_text())
        inst = ia.AuctionInstance.from_json(inst_path.read_text())
        assert abs(sol["welfare"] - inst.optimal_welfare) <= 1e-9

    def test_train_emits_triple(self, tmp_path):
        reports = {"reports": [[[1, 1, 1], 1.0], [[1, 0, 0], 0.3], [[0, 1, 1], 0.6]]}
        rp = tmp_path / "reports.json"
        rp.write_text(json.dumps(reports))
        out = tmp_path / "triple.json"
        assert main(["train", "--reports", str(rp), "--epochs", "10",
                     "--hidden-dims", "4", "--out", str(out)]) == 0
        triple = ia.UubTriple.from_json_obj(json.loads(out.read_text()))
        assert triple.exact_uub_net.forward(np.ones(3)) == 1.0

    def test_export_milp_lp_text(self, tmp_path):
        nets = [init_params([3, 3, 1], InitHyper(), seed=k) for k in range(2)]
        np_path = tmp_path / "nets.json"
        np_path.write_text(json.dumps({"networks": [p.to_json_obj() for p in nets]}))
        out = tmp_path / "model.lp"
        assert main(["export-milp", "--networks", str(np_path), "--out", str(out)]) == 0
        model = ia.parse_lp_file(out.read_text())
        _, obj = ia.solve_model(model)
        ref = ia.milp_wdp(nets)
        assert abs(obj - ref.objective) <= 1e-6

    def test_run_mlca_outputs(self, tmp_path):
        inst_path = tmp_path / "inst.json"
        main(["generate", "--n", "2", "--m", "4", "--seed", "5", "--out", str(inst_path)])
        cfg = {"q_init": 3, "q_round": 2, "q_max": 7, "acquisition": "exact-uub",
               "train_hyper": {"epochs": 10}}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        outdir = tmp_path / "run"
        assert main(["run-mlca", "--instance", str(inst_path), "--config", str(cfg_path),
                     "--seed", "1", "--out", str(outdir)]) == 0
        outcome = json.loads((outdir / "outcome.json").read_text())
        assert 0.0 <= outcome["efficiency_loss"] <= 1.0
        assert (outdir / "rounds.csv").exists()

    def test_hpo_metric_command(self, tmp_path):
        data = tmp_path / "data.json"
        data.write_text(json.dumps({"predictions": [0.0], "targets": [1.0], "train_mae": 0.0}))
        out = tmp_path / "score.txt"
        assert main(["hpo-metric", "--data", str(data), "--q", "0.9",
                     "--out", str(out)]) == 0
        assert abs(float(out.read_text()) - 0.9) <= 1e-9

    def test_experiment_command(self, tmp_path):
        cfg = {
            "generator": ia.GeneratorConfig(n=2, m=4).to_json_obj(),
            "seeds": [0],
            "mechanisms": ["random"],
            "mechanism_config": {"q_init": 3, "q_round": 2, "q_max": 7},
        }
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(cfg))
        outdir = tmp_path / "expout"
        assert main(["experiment", "--config", str(cfg_path), "--out", str(outdir)]) == 0
        assert (outdir / "summary.csv").exists()
