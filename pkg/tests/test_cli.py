import json
import os

import pytest

from fundflow.cli import build_config, build_parser, main, read_config_file
from fundflow.description import chunk_flat_text
from fundflow.pipeline import RunConfig, run_detect
from fundflow.transport import RecordTransport

from conftest import ADVERSARIAL_ROWS, BENIGN_ROWS, FIXTURE_TEXT, ScriptedTransport
from test_pipeline import BENIGN_TEXT


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "c_adv.txt"
    path.write_text(FIXTURE_TEXT, encoding="utf-8")
    return str(path)


@pytest.fixture
def benign_file(tmp_path):
    path = tmp_path / "c_ben.txt"
    path.write_text(BENIGN_TEXT, encoding="utf-8")
    return str(path)


def record_store(tmp_path, specs):
    """Seed a replay store by running the pipeline against scripted answers."""
    store = str(tmp_path / "store.jsonl")
    for contract_id, text, rows in specs:
        config = RunConfig(out_dir=str(tmp_path / "seed" / contract_id))
        scripted = ScriptedTransport(config.params(), rows)
        run_detect(
            chunk_flat_text(text, contract_id),
            config,
            transport=RecordTransport(scripted, store),
        )
    return store


@pytest.fixture
def adv_store(tmp_path):
    return record_store(tmp_path, [("c_adv", FIXTURE_TEXT, ADVERSARIAL_ROWS)])


def test_parse_command(tmp_path, fixture_file, capsys):
    out = str(tmp_path / "out")
    assert main(["parse", "-i", fixture_file, "-o", out]) == 0
    assert os.path.exists(os.path.join(out, "forest.json"))
    stdout = capsys.readouterr().out
    assert "c_adv: 2 function(s)" in stdout


def test_flow_command(tmp_path, fixture_file, capsys):
    assert main(["flow", "-i", fixture_file, "-o", str(tmp_path / "out")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "unknownfffcf3a1:param1 --[it is required that (0x268d...4080 == sha3(tx.origin)), "
        "it is required that the 1st external call succeeds]--> stor_5.flashLoan",
    ]


def test_indicators_command(tmp_path, fixture_file, capsys):
    assert main(["indicators", "-i", fixture_file, "-o", str(tmp_path / "out")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["external_call_count"] == 1
    assert payload["unknown_fn_ratio"] == 0.5


def test_detect_single_adversarial(tmp_path, fixture_file, adv_store, capsys):
    out = str(tmp_path / "out")
    code = main(
        ["detect", "-i", fixture_file, "-o", out, "--transport", "replay", "--store", adv_store]
    )
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert payload["label"] == "adversarial"
    assert os.path.exists(os.path.join(out, "verdict.json"))


def test_detect_single_benign(tmp_path, benign_file, capsys):
    store = record_store(tmp_path, [("c_ben", BENIGN_TEXT, BENIGN_ROWS)])
    code = main(
        [
            "detect", "-i", benign_file, "-o", str(tmp_path / "out"),
            "--transport", "replay", "--store", store,
        ]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out)["label"] == "benign"


def test_detect_batch(tmp_path, capsys):
    batch_dir = tmp_path / "contracts"
    batch_dir.mkdir()
    (batch_dir / "c_adv.txt").write_text(FIXTURE_TEXT, encoding="utf-8")
    (batch_dir / "c_ben.txt").write_text(BENIGN_TEXT, encoding="utf-8")
    store = record_store(
        tmp_path,
        [("c_adv", FIXTURE_TEXT, ADVERSARIAL_ROWS), ("c_ben", BENIGN_TEXT, BENIGN_ROWS)],
    )
    out = str(tmp_path / "out")
    code = main(
        ["detect", "-i", str(batch_dir), "-o", out, "--transport", "replay", "--store", store]
    )
    assert code == 3
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("c_adv\tadversarial\t0.615")
    assert lines[1].startswith("c_ben\tbenign\t0.368")
    assert os.path.exists(os.path.join(out, "c_adv", "verdict.json"))
    assert os.path.exists(os.path.join(out, "c_ben", "verdict.json"))


def test_probe_command(tmp_path, fixture_file, adv_store, capsys):
    out = str(tmp_path / "out")
    code = main(
        ["probe", "-i", fixture_file, "-o", out, "--transport", "replay", "--store", adv_store]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["distributions"]) == 6
    assert payload["failed"] == []
    assert os.path.exists(os.path.join(out, "probes.json"))
    assert os.path.exists(os.path.join(out, "bundle.json"))


def probes_file(tmp_path, rows_table):
    from conftest import distributions

    payload = {
        "distributions": [d.to_json() for d in distributions(rows_table)],
        "failed": [],
    }
    path = tmp_path / "probes.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_fuse_command_adversarial(tmp_path, capsys):
    path = probes_file(tmp_path, ADVERSARIAL_ROWS)
    code = main(["fuse", "-i", path, "-o", str(tmp_path / "out")])
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"]["label"] == "adversarial"
    assert abs(payload["adv_score"] - 0.6153745352) < 1e-9
    assert os.path.exists(str(tmp_path / "out" / "fusion.json"))
    assert os.path.exists(str(tmp_path / "out" / "verdict.json"))


def test_fuse_command_threshold(tmp_path, capsys):
    path = probes_file(tmp_path, ADVERSARIAL_ROWS)
    code = main(["fuse", "-i", path, "-o", str(tmp_path / "out"), "--threshold", "0.7"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["verdict"]["label"] == "benign"


def test_fuse_command_invalid_threshold(tmp_path, capsys):
    path = probes_file(tmp_path, ADVERSARIAL_ROWS)
    code = main(["fuse", "-i", path, "-o", str(tmp_path / "out"), "--threshold", "1.5"])
    assert code == 1  # InvalidThreshold is a runtime error, not a usage error
    assert "threshold" in capsys.readouterr().err


def test_eval_command(tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    truth = tmp_path / "truth.jsonl"
    preds.write_text(
        '{"id": "a", "label": "adversarial"}\n{"id": "b", "label": "benign"}\n',
        encoding="utf-8",
    )
    truth.write_text(
        '{"id": "a", "label": "adversarial"}\n{"id": "b", "label": "adversarial"}\n',
        encoding="utf-8",
    )
    assert main(["eval", str(preds), str(truth)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["tp"] == 1 and payload["fn"] == 1
    assert payload["tpr"] == 0.5 and payload["tnr"] is None


def test_eval_mismatch_exits_1(tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    truth = tmp_path / "truth.jsonl"
    preds.write_text('{"id": "a", "label": "benign"}\n', encoding="utf-8")
    truth.write_text('{"id": "zz", "label": "benign"}\n', encoding="utf-8")
    assert main(["eval", str(preds), str(truth)]) == 1
    assert "error:" in capsys.readouterr().err


def scores_file(tmp_path):
    rows = [
        {"id": "a", "adv_score": 0.6154, "label": "adversarial"},
        {"id": "b", "adv_score": 0.3682, "label": "benign"},
    ]
    path = tmp_path / "scores.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return str(path)


def test_sweep_to_stdout(tmp_path, capsys):
    assert main(["sweep", "-i", scores_file(tmp_path), "--grid", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "threshold,fpr,fnr,tpr,tnr,bac"
    assert lines[1] == "0.500000,0.000000,0.000000,1.000000,1.000000,1.000000"


def test_sweep_default_grid_size(tmp_path, capsys):
    assert main(["sweep", "-i", scores_file(tmp_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 21  # header plus thresholds 0.00 .. 0.95


def test_sweep_writes_csv(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["sweep", "-i", scores_file(tmp_path), "-o", out, "--grid", "0.5"]) == 0
    out_path = capsys.readouterr().out.strip()
    assert out_path == os.path.join(out, "sweep.csv")
    assert open(out_path, encoding="utf-8").read().startswith("threshold,")


def test_sweep_rejects_out_of_range_grid(tmp_path, capsys):
    assert main(["sweep", "-i", scores_file(tmp_path), "--grid", "0.5,1.5"]) == 1


def test_replay_without_store_is_usage_error(tmp_path, fixture_file, capsys):
    code = main(["detect", "-i", fixture_file, "-o", str(tmp_path / "out")])
    assert code == 2
    assert "store" in capsys.readouterr().err


def test_missing_input_is_runtime_error(tmp_path, capsys):
    code = main(["parse", "-i", str(tmp_path / "nope.txt"), "-o", str(tmp_path / "o")])
    assert code == 1


def test_empty_description_is_runtime_error(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("no headers here\n", encoding="utf-8")
    assert main(["parse", "-i", str(path), "-o", str(tmp_path / "o")]) == 1


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 2


def test_config_file_and_flag_precedence(tmp_path):
    config_path = tmp_path / "run.cfg"
    config_path.write_text(
        "model = file-model   # comment\n"
        "\n"
        "retries = 5\n"
        "threshold = 0.25\n",
        encoding="utf-8",
    )
    parser = build_parser()
    args = parser.parse_args(
        ["detect", "-i", "x", "--config", str(config_path), "--model", "flag-model"]
    )
    config = build_config(args)
    assert config.model == "flag-model"  # flag beats file
    assert config.retries == 5  # file beats default
    assert config.threshold == 0.25
    assert config.transport == "replay"  # untouched default


def test_config_file_unknown_key(tmp_path):
    config_path = tmp_path / "bad.cfg"
    config_path.write_text("api_key = secret\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_config_file(str(config_path))


def test_config_file_bad_line(tmp_path, fixture_file, capsys):
    config_path = tmp_path / "bad.cfg"
    config_path.write_text("just words\n", encoding="utf-8")
    code = main(
        ["parse", "-i", fixture_file, "-o", str(tmp_path / "o"), "--config", str(config_path)]
    )
    assert code == 2


def test_config_file_typing(tmp_path):
    config_path = tmp_path / "typed.cfg"
    config_path.write_text("max_paths = 7\ntemperature = 0.5\n", encoding="utf-8")
    values = read_config_file(str(config_path))
    assert values == {"max_paths": 7, "temperature": 0.5}
    assert isinstance(values["max_paths"], int)
