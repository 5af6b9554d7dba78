import importlib.resources as res

import pytest

from i3rab.cli import run_command
from i3rab.conllx import parse_treebank
from i3rab.data import figures_i3rab
from i3rab.render import render_tree, render_tree_text


@pytest.fixture()
def gold_path(tmp_path):
    raw = res.files("i3rab.data").joinpath("figures_i3rab.conll").read_text(
        encoding="utf-8"
    )
    path = tmp_path / "gold.conll"
    path.write_text(raw, encoding="utf-8")
    return path


@pytest.fixture()
def padt_path(tmp_path):
    raw = res.files("i3rab.data").joinpath("figures_padt.conll").read_text(
        encoding="utf-8"
    )
    path = tmp_path / "padt.conll"
    path.write_text(raw, encoding="utf-8")
    return path


def test_eval_identity_prints_100(gold_path, capsys):
    code = run_command(["eval", str(gold_path), str(gold_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "UAS 100.00 / LAS 100.00" in out


def test_eval_missing_argument_is_usage_error(gold_path, capsys):
    assert run_command(["eval", str(gold_path)]) == 2


def test_unknown_subcommand_is_usage_error():
    assert run_command(["frobnicate"]) == 2


def test_validate_bundled_corpus_clean(gold_path, capsys):
    code = run_command(["validate", "--schema", "default", str(gold_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "0 violations" in out


def test_validate_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.conll"
    bad.write_text("1\tfoo\t_\tN\tN-\t_\t0\tBOGUS\t_\t_\n", encoding="utf-8")
    assert run_command(["validate", str(bad)]) == 1
    assert "UNKNOWN_LABEL" in capsys.readouterr().out


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run_command(["validate", str(tmp_path / "nope.conll")]) == 3


def test_convert_pipeline(tmp_path, padt_path, gold_path, capsys):
    out_path = tmp_path / "out.conll"
    report_path = tmp_path / "report.tsv"
    code = run_command(
        [
            "convert",
            str(padt_path),
            str(out_path),
            "--report",
            str(report_path),
        ]
    )
    assert code == 0
    converted = parse_treebank(out_path.read_text(encoding="utf-8"))
    assert converted == figures_i3rab()
    report = dict(
        line.split("\t") for line in report_path.read_text().splitlines()
    )
    assert report["joined_pronoun"] == "1"
    assert report["dropped_pronoun"] == "3"


def test_convert_does_not_mutate_input(tmp_path, padt_path):
    before = padt_path.read_bytes()
    run_command(["convert", str(padt_path), str(tmp_path / "x.conll")])
    assert padt_path.read_bytes() == before


def test_train_parse_eval_cycle(tmp_path, gold_path, capsys):
    model_path = tmp_path / "m.model"
    parsed_path = tmp_path / "parsed.conll"
    assert run_command(
        ["train", "--epochs", "8", "--seed", "1", str(gold_path), str(model_path)]
    ) == 0
    assert model_path.exists()
    assert run_command(
        ["parse", "--model", str(model_path), str(gold_path), str(parsed_path)]
    ) == 0
    capsys.readouterr()
    assert run_command(["eval", str(gold_path), str(parsed_path)]) == 0
    assert "UAS 100.00" in capsys.readouterr().out


def test_train_seed_reproducible(tmp_path, gold_path):
    a, b = tmp_path / "a.model", tmp_path / "b.model"
    run_command(["train", "--seed", "5", "--epochs", "4", str(gold_path), str(a)])
    run_command(["train", "--seed", "5", "--epochs", "4", str(gold_path), str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_stats_blocks(gold_path, capsys):
    assert run_command(["stats", str(gold_path)]) == 0
    out = capsys.readouterr().out
    assert "arc direction" in out
    assert "ROOT to main word" in out
    assert "relation cardinality" in out


def test_stats_machine_output(gold_path, capsys):
    assert run_command(["stats", "--machine", str(gold_path)]) == 0
    out = capsys.readouterr().out
    assert "left_pct\t" in out
    assert "cardinality_GEN\t" in out


def test_crossval_outputs_fold_table(gold_path, capsys):
    code = run_command(
        ["crossval", "--k", "4", "--epochs", "2", "--seed", "1", str(gold_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "fold\tuas\tlas"
    assert lines[-1].startswith("avg\t")


def test_render_text(tmp_path, gold_path):
    out_path = tmp_path / "trees.txt"
    assert run_command(["render", str(gold_path), str(out_path)]) == 0
    text = out_path.read_text(encoding="utf-8")
    assert "ROOT → " in text


def test_render_svg_deterministic(tmp_path, gold_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run_command(["render", "--format", "svg", str(gold_path), str(a)])
    run_command(["render", "--format", "svg", str(gold_path), str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text(encoding="utf-8").startswith("<svg")


def test_render_rtl_differs(tmp_path, gold_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run_command(["render", "--format", "svg", str(gold_path), str(a)])
    run_command(["render", "--format", "svg", "--rtl", str(gold_path), str(b)])
    assert a.read_bytes() != b.read_bytes()


# --- render unit behaviour ---


def test_render_single_token_line():
    from conftest import make_sentence

    sent = make_sentence([("كتاب", "N-", 0, "TOPIC")])
    assert render_tree_text(sent) == "ROOT → كتاب (N) [TOPIC]\n"


def test_render_figure5b_has_seven_token_lines_and_agent_arc():
    sent = figures_i3rab()[5]
    text = render_tree_text(sent)
    lines = [l for l in text.splitlines() if l.strip()]
    assert len(lines) == 7
    verb_line = next(l for l in lines if "يبدأ" in l)
    agent_line = next(l for l in lines if "ون (S) [AGENT]" in l)
    assert agent_line.index("→") > verb_line.index("→")  # nested under the verb


def test_render_same_bytes_twice():
    sent = figures_i3rab()[5]
    assert render_tree(sent, "text") == render_tree(sent, "text")
    assert render_tree(sent, "svg") == render_tree(sent, "svg")
