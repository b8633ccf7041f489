import pytest

from word_map_lab import catalog, load_cayley

# Words of arity <= 3: commutator-only (type 1), nonzero exponent sums (type 2) and mixed.
WORD_CORPUS = [
    "x1",
    "x1^2",
    "x1^3",
    "x1^-1",
    "[x1,x2]",
    "[x1,x2]^2",
    "[x1,x2]^3",
    "[x2,x1]",
    "x1 x2",
    "x1^2 x2^2",
    "x1^2 x2^-2",
    "x1 x2 x1^-1 x2^-1",
    "x1^2 [x1,x2]",
    "x1^4 x2^6",
    "x1 [x2,x3]",
    "[x1,x2] [x1,x3]",
    "[x1,x2][x2,x3][x3,x1]",
    "x1^2 x2^2 x3^2",
    "x1 x2 x3 x1^-1 x2^-1 x3^-1",
    "(x1 x2)^2",
    "[x1^2,x2]",
    "[[x1,x2],x3]",
    "x1^3 x2^3 [x1,x2]^2",
]

TWO_VARIABLE_WORDS = [w for w in WORD_CORPUS if "x3" not in w]

SMALL_CLASS2 = ["cyclic(4)", "cyclic(6)", "q8", "d4", "heisenberg(3)", "modular16", "extraspecial(2,2,-)"]

S3_DOCUMENT = {
    "format": "cayley-v1",
    "name": "s3",
    "order": 6,
    # 0 = e, 1 = r, 2 = r^2, 3 = s, 4 = sr, 5 = sr^2
    "table": [
        [0, 1, 2, 3, 4, 5],
        [1, 2, 0, 5, 3, 4],
        [2, 0, 1, 4, 5, 3],
        [3, 4, 5, 0, 1, 2],
        [4, 5, 3, 2, 0, 1],
        [5, 3, 4, 1, 2, 0],
    ],
    "labels": ["e", "r", "r2", "s", "sr", "sr2"],
}


@pytest.fixture
def q8():
    return catalog("q8")


@pytest.fixture
def heisenberg3():
    return catalog("heisenberg(3)")


@pytest.fixture
def s3():
    return load_cayley(S3_DOCUMENT)


@pytest.fixture
def word_corpus():
    return list(WORD_CORPUS)
