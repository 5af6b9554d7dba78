"""Bundled treebank data transcribed from published figure examples."""

from importlib import resources

from ..conllx import Treebank, parse_treebank


def _load(name: str) -> Treebank:
    text = resources.files(__package__).joinpath(name).read_text(encoding="utf-8")
    return parse_treebank(text, source=name)


def figures_i3rab() -> Treebank:
    """The 16-sentence figure corpus in I3rab annotation."""
    return _load("figures_i3rab.conll")


def figures_padt() -> Treebank:
    """The same 16 sentences in PADT-style annotation."""
    return _load("figures_padt.conll")
