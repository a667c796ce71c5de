import xml.etree.ElementTree as ET

import numpy as np
import pytest

from pdcmi.errors import ContractError
from pdcmi.stats import Edge
from pdcmi.svg import svg_bars, svg_digraph, svg_heatmap


def _assert_valid_xml(text):
    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    return root


def test_heatmap_valid_and_deterministic():
    values = np.random.default_rng(61).uniform(0, 0.5, (3, 4))
    doc = svg_heatmap(values, ["a", "b", "c"], ["1", "2", "3", "4"],
                      "map")
    _assert_valid_xml(doc)
    assert doc == svg_heatmap(values, ["a", "b", "c"],
                              ["1", "2", "3", "4"], "map")
    assert "scale max" in doc
    # fixed scale is honored
    fixed = svg_heatmap(values, ["a", "b", "c"], ["1", "2", "3", "4"],
                        "map", max_value=1.0)
    assert "scale max = 1" in fixed
    with pytest.raises(ContractError):
        svg_heatmap(values, ["a"], ["1", "2", "3", "4"], "map")


def test_heatmap_handles_flat_input():
    doc = svg_heatmap(np.zeros((2, 2)), ["a", "b"], ["1", "2"], "flat")
    _assert_valid_xml(doc)


def test_bars_valid_and_labeled():
    series = {"class 1": [1.0, 2.0], "class 2": [0.5, 0.1]}
    doc = svg_bars(series, ["x", "y"], "flows")
    root = _assert_valid_xml(doc)
    texts = [t.text for t in root.iter() if t.tag.endswith("text")]
    assert "x" in texts and "class 1" in texts
    with pytest.raises(ContractError):
        svg_bars({}, ["x"], "flows")
    with pytest.raises(ContractError):
        svg_bars({"s": [1.0]}, ["x", "y"], "flows")


def test_digraph_draws_every_edge():
    names = ["A", "B", "C", "D"]
    edges = [Edge(0, 2, (8.0, 12.0), 1e-5, 1),
             Edge(3, 1, (8.0, 12.0), 1e-4, 2)]
    doc = svg_digraph(edges, names, "edges")
    root = _assert_valid_xml(doc)
    lines = [e for e in root.iter() if e.tag.endswith("line")]
    assert len(lines) == 2
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 4
    with pytest.raises(ContractError):
        svg_digraph(edges, ["only"], "edges")


def test_labels_are_escaped():
    doc = svg_heatmap(np.zeros((1, 1)), ["a<b"], ["x&y"], "t<i>tle")
    _assert_valid_xml(doc)
    assert "a&lt;b" in doc and "x&amp;y" in doc
