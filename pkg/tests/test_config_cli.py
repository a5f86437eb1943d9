import json
from pathlib import Path

import pytest
import yaml

from unibound.cli import main
from unibound.config import resolve, validate_config
from unibound.errors import ConfigError
from unibound.runner import EXIT_CONFIG, EXIT_IO, EXIT_OK, run_experiment

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def small_deviate_config(out):
    return {
        "kind": "deviate",
        "seed": 7,
        "n": 8,
        "law": {
            "space": {
                "kind": "finite",
                "support": [
                    {"label": "0", "value": 0.0},
                    {"label": "1", "value": 1.0},
                ],
            }
        },
        "class": {"random_lookup": {"count": 4}},
        "statistic": {"name": "variance"},
        "delta": 0.1,
        "replications": 100,
        "gaussian_draws": 200,
        "out": str(out),
    }


# ---------------------------------------------------------------------------
# validation

def test_shipped_configs_validate():
    assert CONFIG_DIR.is_dir()
    for path in sorted(CONFIG_DIR.glob("*.yaml")):
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
        assert validate_config(raw) == [], path.name


def test_delta_out_of_range_names_field(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["delta"] = 1.5
    violations = validate_config(cfg)
    assert any("delta" in v and "(0, 1)" in v for v in violations)


def test_unknown_statistic_lists_supported(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["statistic"] = {"name": "median"}
    violations = validate_config(cfg)
    assert any("median" in v and "mean" in v and "variance" in v for v in violations)


def test_unknown_keys_rejected(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["typo_key"] = 1
    cfg["law"]["space"]["extra"] = True
    violations = validate_config(cfg)
    assert any("typo_key" in v for v in violations)
    assert any("extra" in v for v in violations)


def test_seed_is_mandatory(tmp_path):
    cfg = small_deviate_config(tmp_path)
    del cfg["seed"]
    assert any(v.startswith("seed") for v in validate_config(cfg))


def test_bad_weights_flagged(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["law"]["weights"] = [0.7, 0.7]
    assert any("sum to 1" in v for v in validate_config(cfg))


def test_u_statistic_requires_kernel(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["statistic"] = {"name": "u-statistic"}
    assert any("kernel" in v for v in validate_config(cfg))


def test_numeric_route_needs_override_for_bounds(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["constants"] = {"route": "numeric"}
    violations = validate_config(cfg)
    assert any("override_numeric_constants" in v for v in violations)
    cfg["override_numeric_constants"] = True
    assert validate_config(cfg) == []


def test_group_sizes_must_sum_to_n(tmp_path):
    cfg = small_deviate_config(tmp_path)
    cfg["statistic"] = {"name": "class-separation", "group_sizes": [3, 3]}
    assert any("group_sizes" in v for v in validate_config(cfg))
    cfg["statistic"]["group_sizes"] = [3, 5]
    assert validate_config(cfg) == []


def test_resolve_rejects_invalid():
    with pytest.raises(ConfigError):
        resolve({"kind": "deviate"})


# ---------------------------------------------------------------------------
# run + reproducibility

def test_run_writes_record_and_table(tmp_path):
    cfg = small_deviate_config(tmp_path / "out")
    code, record, summary = run_experiment(cfg)
    assert code == EXIT_OK
    result_path = tmp_path / "out" / "result.deviate.json"
    table_path = tmp_path / "out" / "table.csv"
    assert result_path.is_file() and table_path.is_file()
    on_disk = json.loads(result_path.read_text())
    assert on_disk["config"]["seed"] == 7
    assert on_disk["results"]["deviation"]["dev_mean"] == record["results"]["deviation"]["dev_mean"]
    header = table_path.read_text().splitlines()[0]
    assert header == "replication,deviation,argmax,image_gaussian,exceeds_bound"


def test_record_round_trips_from_echo(tmp_path):
    cfg = small_deviate_config(tmp_path / "a")
    code, record, _ = run_experiment(cfg)
    assert code == EXIT_OK
    echoed = dict(record["config"])
    echoed["out"] = str(tmp_path / "b")
    code2, record2, _ = run_experiment(echoed)
    assert code2 == EXIT_OK
    assert record["results"] == record2["results"]
    a = (tmp_path / "a" / "table.csv").read_bytes()
    b = (tmp_path / "b" / "table.csv").read_bytes()
    assert a == b


def test_workers_only_affect_speed(tmp_path):
    cfg = small_deviate_config(tmp_path / "w1")
    code, _, _ = run_experiment(cfg, workers=1)
    cfg2 = small_deviate_config(tmp_path / "w3")
    code2, _, _ = run_experiment(cfg2, workers=3)
    assert code == code2 == EXIT_OK
    assert (tmp_path / "w1" / "table.csv").read_bytes() == (tmp_path / "w3" / "table.csv").read_bytes()


def test_seed_override_changes_results(tmp_path):
    cfg = small_deviate_config(tmp_path / "s1")
    _, record1, _ = run_experiment(cfg)
    cfg2 = small_deviate_config(tmp_path / "s2")
    _, record2, _ = run_experiment(cfg2, seed=8)
    assert record2["config"]["seed"] == 8
    assert record1["results"]["deviation"]["dev_mean"] != record2["results"]["deviation"]["dev_mean"]


def test_numeric_constants_refused_then_overridden(tmp_path):
    cfg = small_deviate_config(tmp_path / "num")
    cfg["constants"] = {"route": "numeric", "probes": 20}
    with pytest.raises(ConfigError):
        run_experiment(cfg)
    code, record, _ = run_experiment(cfg, override=True)
    assert code == EXIT_OK
    assert record["results"]["deviation"]["constants"]["method"] == "numeric-estimate"


# ---------------------------------------------------------------------------
# CLI surface

def write_config(path, cfg):
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(cfg, handle)


def test_cli_validate_ok(tmp_path, capsys):
    path = tmp_path / "cfg.yaml"
    write_config(path, small_deviate_config(tmp_path / "out"))
    assert main(["validate", str(path)]) == EXIT_OK
    assert "valid" in capsys.readouterr().out


def test_cli_validate_reports_violations(tmp_path, capsys):
    cfg = small_deviate_config(tmp_path / "out")
    cfg["delta"] = 1.5
    path = tmp_path / "cfg.yaml"
    write_config(path, cfg)
    assert main(["validate", str(path)]) == EXIT_CONFIG
    assert "delta" in capsys.readouterr().out


def test_cli_validate_unreadable_file(tmp_path):
    assert main(["validate", str(tmp_path / "missing.yaml")]) == EXIT_IO


def test_cli_run_and_rerun_byte_identical(tmp_path, capsys):
    cfg = small_deviate_config(tmp_path / "out1")
    path = tmp_path / "cfg.yaml"
    write_config(path, cfg)
    assert main(["run", str(path)]) == EXIT_OK
    assert main(["run", str(path), "--out", str(tmp_path / "out2"), "--workers", "3"]) == EXIT_OK
    capsys.readouterr()
    a = (tmp_path / "out1" / "table.csv").read_bytes()
    b = (tmp_path / "out2" / "table.csv").read_bytes()
    assert a == b


def test_cli_run_numeric_without_override_refused(tmp_path, capsys):
    cfg = small_deviate_config(tmp_path / "out")
    cfg["constants"] = {"route": "numeric", "probes": 20}
    path = tmp_path / "cfg.yaml"
    write_config(path, cfg)
    assert main(["run", str(path)]) == EXIT_CONFIG
    assert main(["run", str(path), "--override-numeric-constants"]) == EXIT_OK
    capsys.readouterr()


def test_cli_run_missing_config(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml")]) == EXIT_IO
