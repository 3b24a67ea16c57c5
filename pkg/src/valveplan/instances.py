"""Bundled example networks.

`fig1` is a small 6-node demo network with one source and heterogeneous
demands; `fig2` is a 8-node, 10-pipe layout with unit demands, useful for
exercising the structural pruning rules. Larger real instances (for example
a 23-node/33-pipe municipal network) are supplied by the user as document
files in the same schema.
"""

from .network import load_instance, parse_network

FIG1_DOCUMENT = """\
{
  "name": "fig1",
  "nodes": [1, 2, 3, 4, 5, 6],
  "sources": [1],
  "edges": [
    ["e12", 1, 2, 5],
    ["e16", 1, 6, 8],
    ["e23", 2, 3, 3],
    ["e25", 2, 5, 15],
    ["e34", 3, 4, 7],
    ["e45", 4, 5, 6],
    ["e56", 5, 6, 3]
  ],
  "faces": [[1, 2, 5, 6], [2, 3, 4, 5]],
  "coords": {"1": [0, 1], "2": [1, 1], "3": [2, 1], "4": [2, 0], "5": [1, 0], "6": [0, 0]}
}
"""

# The demo 6-valve layout discussed in the README: isolates e23 on its own,
# pairs e34/e45 and e16/e56, and leaves e12/e25 as one sector.
FIG1_SIX_VALVES = ("e12:1", "e23:2", "e23:3", "e45:5", "e56:5", "e16:1")

FIG2_DOCUMENT = """\
{
  "name": "fig2",
  "nodes": [1, 2, 3, 4, 5, 6, 7, 8],
  "sources": [1],
  "edges": [
    ["e12", 1, 2, 1],
    ["e13", 1, 3, 1],
    ["e24", 2, 4, 1],
    ["e28", 2, 8, 1],
    ["e34", 3, 4, 1],
    ["e35", 3, 5, 1],
    ["e46", 4, 6, 1],
    ["e56", 5, 6, 1],
    ["e67", 6, 7, 1],
    ["e78", 7, 8, 1]
  ],
  "coords": {"1": [0, 2], "2": [2, 2], "3": [0, 1], "4": [1, 1],
             "5": [0, 0], "6": [1, 0], "7": [2, 0], "8": [2.5, 1]}
}
"""


def fig1():
    return parse_network(FIG1_DOCUMENT)


def fig2():
    return parse_network(FIG2_DOCUMENT)


BUNDLED = {"fig1": fig1, "fig2": fig2}


def load(name_or_path):
    """Resolve a bundled instance name or load a document file."""
    builder = BUNDLED.get(str(name_or_path))
    if builder is not None:
        return builder()
    return load_instance(name_or_path)
